//! The `belab` command line.
//!
//! Commands write their files and a short plain-text summary to the supplied
//! writer. Every output is a deterministic function of the flags and seed.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::catalog::{
    edge_state, extended_tiles_4x3_upb, gentiles2_4x3_upb, tiles_completion, tiles_plus_partners,
    tiles_upb, DensityMatrix, Family, ProductBasis, ProductVector, PSD_TOL, TRACE_TOL,
};
use crate::certify::{
    self, certify_state, estimate_gamma, parse_grid, CertifyOptions, Detector, DetectorKind,
    GammaKind, SweepResult, Witness, BISECTION_ITERATIONS, BISECTION_WIDTH, DEFAULT_GRID,
    DEFAULT_RESTARTS, DEFAULT_SEED,
};
use crate::error::{Error, Result};
use crate::io::{envelope, format_f64, ProductVectorFile, StateFile, TOOL_VERSION};
use crate::linalg::DEFAULT_RANK_TOL;
use crate::maps::{is_ppt, DETECTION_TOL};
use crate::range::{check_range_criterion, search_range_criterion};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "belab",
    version,
    about = "Bound entangled states from product bases"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a catalog state and write it as JSON.
    Build(BuildArgs),
    /// Evaluate a detector along a family and locate the sign change.
    Sweep(SweepArgs),
    /// Regenerate the three detector-vs-λ curves as CSV.
    Reproduce(ReproduceArgs),
    /// Estimate the witness offset γ for a UPB by multistart seesaw.
    Gamma(GammaArgs),
    /// Test whether product vectors span the range of a state.
    RangeCheck(RangeCheckArgs),
    /// PPT test, Choi detector and optional witness on one state.
    Certify(CertifyArgs),
}

#[derive(Debug, Args, Clone)]
pub struct SearchFlags {
    #[arg(long, default_value_t = DEFAULT_RESTARTS)]
    pub restarts: usize,
    #[arg(long, env = "BELAB_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    /// tiles-edge, gentiles2-edge, extended-tiles-edge, rho1:i, rho2,
    /// rho3:ab, sigma1 or sigma2:i,j,...
    pub selector: String,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long, default_value_t = DETECTION_TOL)]
    pub tol: f64,
    /// Defaults to `<selector>.json`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub family: String,
    #[arg(long, default_value = "choi-u")]
    pub detector: String,
    #[arg(long, default_value = DEFAULT_GRID)]
    pub grid: String,
    /// Supplied γ for the witness detector; estimated when absent.
    #[arg(long)]
    pub gamma_value: Option<f64>,
    #[command(flatten)]
    pub search: SearchFlags,
    #[arg(long, default_value_t = DETECTION_TOL)]
    pub tol: f64,
    #[arg(long, default_value = "sweep.csv")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ReproduceArgs {
    /// 1: ρ₁ with |ψ₁⟩, 2: ρ₂, 3: σ₁. All three when absent.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
    pub figure: Option<u8>,
    #[arg(long, default_value = DEFAULT_GRID)]
    pub grid: String,
    #[arg(long, default_value_t = DETECTION_TOL)]
    pub tol: f64,
    /// Output directory.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct GammaArgs {
    /// tiles, gentiles2 or extended-tiles.
    #[arg(long)]
    pub upb: String,
    #[command(flatten)]
    pub search: SearchFlags,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RangeCheckArgs {
    #[arg(long)]
    pub state: PathBuf,
    /// search, plus-partners, tiles-completion, computational, or a product-vector
    /// JSON file.
    #[arg(long, default_value = "search")]
    pub candidates: String,
    #[command(flatten)]
    pub search: SearchFlags,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    /// State JSON file.
    #[arg(long, conflicts_with = "family")]
    pub state: Option<PathBuf>,
    /// Build the state from a family instead of a file.
    #[arg(long, requires = "lambda")]
    pub family: Option<String>,
    #[arg(long)]
    pub lambda: Option<f64>,
    /// UPB for the witness detector (tiles, gentiles2, extended-tiles).
    #[arg(long)]
    pub upb: Option<String>,
    #[arg(long, requires = "upb")]
    pub gamma_value: Option<f64>,
    #[command(flatten)]
    pub search: SearchFlags,
    #[arg(long, default_value_t = DETECTION_TOL)]
    pub tol: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Exit code for a failed command.
pub fn exit_code(err: &Error) -> i32 {
    if err.is_numerical() {
        EXIT_NUMERICAL
    } else {
        EXIT_VALIDATION
    }
}

fn defaults() -> serde_json::Value {
    json!({
        "tool_version": TOOL_VERSION,
        "rank_tol": DEFAULT_RANK_TOL,
        "trace_tol": TRACE_TOL,
        "psd_tol": PSD_TOL,
        "detection_tol": DETECTION_TOL,
        "bisection_iterations": BISECTION_ITERATIONS,
        "bisection_width": BISECTION_WIDTH,
    })
}

pub fn upb_by_name(name: &str) -> Result<ProductBasis> {
    match name {
        "tiles" => Ok(tiles_upb()),
        "gentiles2" => Ok(gentiles2_4x3_upb()),
        "extended-tiles" => Ok(extended_tiles_4x3_upb()),
        _ => Err(Error::invalid(format!(
            "unknown UPB {name:?} (expected tiles, gentiles2 or extended-tiles)"
        ))),
    }
}

/// A buildable state: an edge state or a family member.
pub fn build_selector(selector: &str, lambda: Option<f64>) -> Result<(DensityMatrix, String)> {
    let edge = match selector {
        "tiles-edge" => Some(tiles_upb()),
        "gentiles2-edge" => Some(gentiles2_4x3_upb()),
        "extended-tiles-edge" => Some(extended_tiles_4x3_upb()),
        _ => None,
    };
    if let Some(upb) = edge {
        if lambda.is_some() {
            return Err(Error::invalid(format!("{selector} takes no --lambda")));
        }
        return Ok((edge_state(&upb)?, "edge".to_string()));
    }
    let family: Family = selector.parse()?;
    let lambda = lambda.ok_or_else(|| Error::invalid(format!("{selector} needs --lambda")))?;
    Ok((family.build()?.at(lambda)?, family.to_string()))
}

pub fn run(cli: Cli, out: &mut dyn Write) -> Result<()> {
    match cli.command {
        Command::Build(a) => cmd_build(a, out),
        Command::Sweep(a) => cmd_sweep(a, out),
        Command::Reproduce(a) => cmd_reproduce(a, out),
        Command::Gamma(a) => cmd_gamma(a, out),
        Command::RangeCheck(a) => cmd_range_check(a, out),
        Command::Certify(a) => cmd_certify(a, out),
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::invalid("--tol must be positive"));
    }
    Ok(())
}

fn cmd_build(a: BuildArgs, out: &mut dyn Write) -> Result<()> {
    check_tol(a.tol)?;
    let (rho, family) = build_selector(&a.selector, a.lambda)?;
    let path = a
        .out
        .unwrap_or_else(|| PathBuf::from(format!("{}.json", a.selector.replace([':', ','], "_"))));
    let mut file = StateFile::from_state(&rho, &a.selector, &family, a.lambda);
    file.provenance = Some(defaults());
    file.write(&path)?;
    writeln!(
        out,
        "{}: dims={}x{} rank={} trace={} ppt={}",
        a.selector,
        rho.dims().0,
        rho.dims().1,
        rho.rank(),
        format_f64(rho.trace()),
        is_ppt(&rho, a.tol)?
    )?;
    writeln!(out, "wrote {}", path.display())?;
    Ok(())
}

fn summary_path(csv: &Path) -> PathBuf {
    csv.with_extension("summary.json")
}

fn write_sweep(
    result: &SweepResult,
    csv: &Path,
    params: serde_json::Value,
    out: &mut dyn Write,
) -> Result<()> {
    std::fs::write(csv, result.to_csv())?;
    let summary = json!({
        "family": result.family_label,
        "detector": result.detector_label,
        "points": result.lambdas.len(),
        "sign_changes": result.sign_changes,
        "multiple_sign_changes": result.multiple_sign_changes(),
        "threshold": result.threshold.map(format_f64),
        "value_at_first": result.values.first().map(|v| format_f64(*v)),
        "value_at_last": result.values.last().map(|v| format_f64(*v)),
    });
    let mut params = params;
    params["defaults"] = defaults();
    std::fs::write(summary_path(csv), envelope("sweep", &summary, params)?)?;
    let threshold = result
        .threshold
        .map_or_else(|| "none".to_string(), format_f64);
    writeln!(out, "threshold={threshold}")?;
    if result.multiple_sign_changes() {
        writeln!(
            out,
            "warning: {} sign changes, no threshold located",
            result.sign_changes
        )?;
    }
    writeln!(out, "wrote {}", csv.display())?;
    Ok(())
}

fn cmd_sweep(a: SweepArgs, out: &mut dyn Write) -> Result<()> {
    check_tol(a.tol)?;
    let family: Family = a.family.parse()?;
    let kind: DetectorKind = a.detector.parse()?;
    let grid = parse_grid(&a.grid)?;
    let noisy = family.build()?;
    let mut params = json!({
        "family": family.to_string(),
        "detector": kind.as_str(),
        "grid": a.grid,
        "tol": a.tol,
    });
    let detector = match kind {
        DetectorKind::ChoiU => {
            if noisy.dims().1 != 3 {
                return Err(Error::invalid("choi-u needs a 3-dimensional party B"));
            }
            Detector::ChoiU
        }
        DetectorKind::PtMinEig => Detector::PtMinEig,
        DetectorKind::Witness => {
            let upb = family.upb();
            let w = match a.gamma_value {
                Some(g) => Witness::for_upb(&upb, g)?,
                None => Witness::estimated(&upb, a.search.restarts, a.search.seed)?.0,
            };
            params["upb"] = json!(upb.label());
            params["gamma"] = json!(format_f64(w.gamma()));
            params["gamma_kind"] = json!(w.kind());
            params["restarts"] = json!(a.search.restarts);
            params["seed"] = json!(a.search.seed);
            Detector::Witness(w)
        }
    };
    let result = certify::sweep_with(&noisy.label, |l| noisy.at(l), &grid, &detector, a.tol)?;
    write_sweep(&result, &a.out, params, out)
}

/// Family shown in each reproduced figure.
pub fn figure_family(figure: u8) -> Result<Family> {
    match figure {
        1 => Ok("rho1:1".parse()?),
        2 => Ok("rho2".parse()?),
        3 => Ok("sigma1".parse()?),
        _ => Err(Error::invalid(format!("figure {figure} not in 1..=3"))),
    }
}

fn cmd_reproduce(a: ReproduceArgs, out: &mut dyn Write) -> Result<()> {
    check_tol(a.tol)?;
    let grid = parse_grid(&a.grid)?;
    std::fs::create_dir_all(&a.out)?;
    let figures: Vec<u8> = match a.figure {
        Some(f) => vec![f],
        None => vec![1, 2, 3],
    };
    for fig in figures {
        let family = figure_family(fig)?;
        let noisy = family.build()?;
        let result = certify::sweep_with(
            &noisy.label,
            |l| noisy.at(l),
            &grid,
            &Detector::ChoiU,
            a.tol,
        )?;
        let params = json!({
            "figure": fig,
            "family": family.to_string(),
            "detector": "choi-u",
            "grid": a.grid,
            "tol": a.tol,
        });
        write!(out, "fig{fig} ")?;
        write_sweep(&result, &a.out.join(format!("fig{fig}.csv")), params, out)?;
    }
    Ok(())
}

fn cmd_gamma(a: GammaArgs, out: &mut dyn Write) -> Result<()> {
    let upb = upb_by_name(&a.upb)?;
    let pi = upb.span_projector()?;
    let est = estimate_gamma(&pi, upb.dims(), a.search.restarts, a.search.seed)?;
    let worst = est
        .restart_values
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    writeln!(out, "gamma={}", format_f64(est.gamma))?;
    writeln!(
        out,
        "minimizer a={:?} b={:?}",
        est.minimizer.a(),
        est.minimizer.b()
    )?;
    writeln!(
        out,
        "restarts={} seed={} hits={} worst_restart={}",
        est.restarts,
        est.seed,
        est.hits,
        format_f64(worst)
    )?;
    writeln!(
        out,
        "note: seesaw value, an upper bound on the true minimum"
    )?;
    if let Some(path) = a.out {
        let params = json!({
            "upb": a.upb,
            "restarts": a.search.restarts,
            "seed": a.search.seed,
            "defaults": defaults(),
        });
        std::fs::write(&path, envelope("gamma", &est, params)?)?;
        writeln!(out, "wrote {}", path.display())?;
    }
    Ok(())
}

fn computational_basis(dims: (usize, usize)) -> Vec<ProductVector> {
    let mut v = Vec::new();
    for i in 0..dims.0 {
        for j in 0..dims.1 {
            let mut a = vec![0.0; dims.0];
            let mut b = vec![0.0; dims.1];
            a[i] = 1.0;
            b[j] = 1.0;
            v.push(ProductVector::new(a, b).expect("unit vectors"));
        }
    }
    v
}

fn cmd_range_check(a: RangeCheckArgs, out: &mut dyn Write) -> Result<()> {
    let file = StateFile::read(&a.state)?;
    let rho = file.to_state()?;
    let mut params = json!({
        "state": a.state.display().to_string(),
        "label": file.label,
        "candidates": a.candidates,
        "defaults": defaults(),
    });
    let report = match a.candidates.as_str() {
        "search" => {
            params["restarts"] = json!(a.search.restarts);
            params["seed"] = json!(a.search.seed);
            search_range_criterion(&rho, a.search.restarts, a.search.seed)?.0
        }
        "plus-partners" => check_range_criterion(&rho, &tiles_plus_partners())?,
        "tiles-completion" => check_range_criterion(&rho, &tiles_completion())?,
        "computational" => check_range_criterion(&rho, &computational_basis(rho.dims()))?,
        path => {
            let vectors = ProductVectorFile::read(Path::new(path))?.to_vectors()?;
            check_range_criterion(&rho, &vectors)?
        }
    };
    let text = envelope("range-check", &report, params)?;
    match a.out {
        Some(path) => {
            std::fs::write(&path, &text)?;
            writeln!(out, "wrote {}", path.display())?;
        }
        None => write!(out, "{text}")?,
    }
    let verdict = serde_json::to_value(report.verdict)?;
    writeln!(
        out,
        "verdict={} rank={} span_rank={}",
        verdict.as_str().unwrap_or_default(),
        report.state_rank,
        report.span_rank_of_candidates
    )?;
    Ok(())
}

fn cmd_certify(a: CertifyArgs, out: &mut dyn Write) -> Result<()> {
    check_tol(a.tol)?;
    let (rho, label) = match (&a.state, &a.family) {
        (Some(path), None) => {
            let f = StateFile::read(path)?;
            (f.to_state()?, f.label)
        }
        (None, Some(fam)) => (build_selector(fam, a.lambda)?.0, fam.clone()),
        _ => {
            return Err(Error::invalid(
                "certify needs --state or --family with --lambda",
            ))
        }
    };
    let mut params = json!({ "state": label, "tol": a.tol, "defaults": defaults() });
    let witness = match &a.upb {
        Some(name) => {
            let upb = upb_by_name(name)?;
            params["upb"] = json!(name);
            Some(match a.gamma_value {
                Some(g) => Witness::for_upb(&upb, g)?,
                None => {
                    params["restarts"] = json!(a.search.restarts);
                    params["seed"] = json!(a.search.seed);
                    Witness::estimated(&upb, a.search.restarts, a.search.seed)?.0
                }
            })
        }
        None => None,
    };
    let report = certify_state(
        &rho,
        &CertifyOptions {
            witness,
            tol: Some(a.tol),
        },
    )?;
    writeln!(
        out,
        "ppt={} pt_min_eig={}",
        report.ppt,
        format_f64(report.pt_min_eig)
    )?;
    match report.choi_u {
        Some(v) => writeln!(out, "choi_u={}", format_f64(v))?,
        None => writeln!(out, "choi_u=n/a")?,
    }
    if let (Some(v), Some(g), Some(k)) = (report.witness, report.gamma, report.gamma_kind) {
        let kind = if k == GammaKind::Supplied {
            "supplied"
        } else {
            "estimated"
        };
        writeln!(
            out,
            "witness={} gamma={} ({kind})",
            format_f64(v),
            format_f64(g)
        )?;
    }
    writeln!(out, "verdict={}", report.verdict)?;
    if let Some(path) = a.out {
        std::fs::write(&path, envelope("certify", &report, params)?)?;
        writeln!(out, "wrote {}", path.display())?;
    }
    Ok(())
}
