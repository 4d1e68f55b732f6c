//! Entanglement certification: UPB witnesses, λ-sweeps and threshold
//! location.
//!
//! Two detectors certify PPT entanglement. The lifted Choi map with the local
//! rotation ([`choi_u_detect`]) is rigorous: a negative eigenvalue is
//! impossible for a separable input. The witness `W = Π − γI` is rigorous only
//! when `γ` is a true lower bound on the product-state overlap with `Π`; the
//! seesaw estimate from [`estimate_gamma`] is an upper bound on the minimum
//! and so only supplied values of `γ` feed a verdict.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::catalog::{DensityMatrix, NoisyFamily, ProductBasis, ProductVector};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::maps::{choi_u_detect, is_ppt, pt_min_eig, DETECTION_TOL};
use crate::seesaw::{self, Goal};

pub const PROJECTOR_TOL: f64 = 1e-10;
pub const DEFAULT_RESTARTS: usize = 200;
pub const DEFAULT_SEED: u64 = 42;
pub const BISECTION_ITERATIONS: usize = 50;
pub const BISECTION_WIDTH: f64 = 1e-10;
pub const DEFAULT_GRID: &str = "0:0.005:1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GammaKind {
    Supplied,
    Estimated,
}

/// `W = Π − γI`.
#[derive(Debug, Clone)]
pub struct Witness {
    pi: Matrix,
    gamma: f64,
    kind: GammaKind,
}

fn check_projector(pi: &Matrix) -> Result<()> {
    if !pi.is_square() {
        return Err(Error::dims(
            "square",
            format!("{}x{}", pi.rows(), pi.cols()),
        ));
    }
    let defect = pi.idempotency_defect().max(pi.asymmetry());
    if defect > PROJECTOR_TOL {
        return Err(Error::NotProjector { defect });
    }
    Ok(())
}

impl Witness {
    pub fn new(pi: Matrix, gamma: f64, kind: GammaKind) -> Result<Self> {
        check_projector(&pi)?;
        if !(0.0..=1.0).contains(&gamma) {
            return Err(Error::invalid(format!("gamma {gamma} outside [0, 1]")));
        }
        Ok(Self { pi, gamma, kind })
    }

    /// Witness on the span of `upb` with a caller-supplied `γ`.
    pub fn for_upb(upb: &ProductBasis, gamma: f64) -> Result<Self> {
        Self::new(upb.span_projector()?, gamma, GammaKind::Supplied)
    }

    /// Witness on the span of `upb` with `γ` from the seesaw.
    pub fn estimated(
        upb: &ProductBasis,
        restarts: usize,
        seed: u64,
    ) -> Result<(Self, GammaEstimate)> {
        let pi = upb.span_projector()?;
        let est = estimate_gamma(&pi, upb.dims(), restarts, seed)?;
        Ok((Self::new(pi, est.gamma, GammaKind::Estimated)?, est))
    }

    pub fn pi(&self) -> &Matrix {
        &self.pi
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn kind(&self) -> GammaKind {
        self.kind
    }
}

/// Result of the multistart seesaw for `min ⟨α⊗β|Π|α⊗β⟩`.
#[derive(Debug, Clone, Serialize)]
pub struct GammaEstimate {
    pub gamma: f64,
    #[serde(serialize_with = "crate::io::serialize_product_vector")]
    pub minimizer: ProductVector,
    pub restarts: usize,
    pub seed: u64,
    /// Final objective of each restart, in restart order.
    pub restart_values: Vec<f64>,
    /// Restarts ending within `1e-9` of the best value.
    pub hits: usize,
}

/// Seesaw estimate of `γ = min ⟨φ|Π|φ⟩` over real product vectors.
///
/// Each restart starts from a seeded random `β` and alternates minimal
/// eigenvectors of the compressed matrices until the objective moves by less
/// than `1e-12` or 500 iterations pass. The result is the best restart, an
/// upper bound on the true minimum.
pub fn estimate_gamma(
    pi: &Matrix,
    dims: (usize, usize),
    restarts: usize,
    seed: u64,
) -> Result<GammaEstimate> {
    check_projector(pi)?;
    let runs = seesaw::multistart(pi, dims, Goal::Minimize, restarts, seed)?;
    let best = runs
        .iter()
        .min_by(|a, b| a.value.total_cmp(&b.value))
        .expect("at least one restart");
    let gamma = best.value.clamp(0.0, 1.0);
    Ok(GammaEstimate {
        gamma,
        minimizer: best.vector.canonical(),
        restarts,
        seed,
        hits: runs.iter().filter(|r| r.value - best.value < 1e-9).count(),
        restart_values: runs.iter().map(|r| r.value).collect(),
    })
}

/// `Tr[(Π − γI)ρ] = Tr[Πρ] − γ`.
pub fn witness_value(w: &Witness, rho: &DensityMatrix) -> Result<f64> {
    let m = rho.matrix();
    if w.pi.rows() != m.rows() {
        return Err(Error::dims(w.pi.rows(), m.rows()));
    }
    let n = m.rows();
    let mut tr = 0.0;
    for i in 0..n {
        for j in 0..n {
            tr += w.pi[(i, j)] * m[(j, i)];
        }
    }
    Ok(tr - w.gamma)
}

#[derive(Debug, Clone)]
pub enum Detector {
    /// [`choi_u_detect`].
    ChoiU,
    Witness(Witness),
    /// Smallest eigenvalue of the partial transpose.
    PtMinEig,
}

impl Detector {
    pub fn evaluate(&self, rho: &DensityMatrix) -> Result<f64> {
        match self {
            Detector::ChoiU => choi_u_detect(rho),
            Detector::Witness(w) => witness_value(w, rho),
            Detector::PtMinEig => pt_min_eig(rho),
        }
    }

    pub fn label(&self) -> &'static str {
        DetectorKind::from(self).as_str()
    }
}

/// Detector names as used on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DetectorKind {
    ChoiU,
    Witness,
    PtMinEig,
}

impl DetectorKind {
    pub fn as_str(self) -> &'static str {
        match self {
            DetectorKind::ChoiU => "choi-u",
            DetectorKind::Witness => "witness",
            DetectorKind::PtMinEig => "pt-mineig",
        }
    }
}

impl From<&Detector> for DetectorKind {
    fn from(d: &Detector) -> Self {
        match d {
            Detector::ChoiU => DetectorKind::ChoiU,
            Detector::Witness(_) => DetectorKind::Witness,
            Detector::PtMinEig => DetectorKind::PtMinEig,
        }
    }
}

impl fmt::Display for DetectorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DetectorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "choi-u" => Ok(DetectorKind::ChoiU),
            "witness" => Ok(DetectorKind::Witness),
            "pt-mineig" => Ok(DetectorKind::PtMinEig),
            _ => Err(Error::invalid(format!(
                "unknown detector {s:?} (expected choi-u, witness or pt-mineig)"
            ))),
        }
    }
}

/// Parse `start:step:end` into a strictly increasing grid inside `[0, 1]`.
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    let [start, step, end] = parts.as_slice() else {
        return Err(Error::invalid(format!(
            "grid {text:?} is not start:step:end"
        )));
    };
    let num = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|_| Error::invalid(format!("bad number {s:?} in grid {text:?}")))
    };
    let (start, step, end) = (num(start)?, num(step)?, num(end)?);
    if step.is_nan() || step <= 0.0 || !start.is_finite() || !end.is_finite() {
        return Err(Error::invalid(format!(
            "grid {text:?} needs a positive step"
        )));
    }
    if start < 0.0 || end > 1.0 {
        return Err(Error::invalid(format!("grid {text:?} leaves [0, 1]")));
    }
    let span = (end - start) / step;
    if span < 1.0 - 1e-9 {
        return Err(Error::invalid(format!(
            "grid {text:?} is not increasing: it needs at least two points"
        )));
    }
    let count = (span + 1e-9).floor() as usize + 1;
    let mut grid: Vec<f64> = (0..count).map(|i| start + i as f64 * step).collect();
    let last = grid.last_mut().unwrap();
    if (*last - end).abs() < 1e-9 * step {
        *last = end;
    }
    *last = last.min(1.0);
    validate_grid(&grid)?;
    Ok(grid)
}

fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::invalid("empty grid"));
    }
    if grid.iter().any(|x| !(0.0..=1.0).contains(x)) {
        return Err(Error::invalid("grid leaves [0, 1]"));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("grid is not strictly increasing"));
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepResult {
    pub family_label: String,
    pub detector_label: String,
    pub lambdas: Vec<f64>,
    pub values: Vec<f64>,
    /// Adjacent grid pairs whose negativity flag differs.
    pub sign_changes: usize,
    /// Located only when there is exactly one sign change.
    pub threshold: Option<f64>,
    pub tolerance: f64,
}

impl SweepResult {
    pub fn multiple_sign_changes(&self) -> bool {
        self.sign_changes > 1
    }

    /// `lambda,value` with 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("lambda,value\n");
        for (l, v) in self.lambdas.iter().zip(&self.values) {
            out.push_str(&format!("{l:.16e},{v:.16e}\n"));
        }
        out
    }
}

/// Evaluate `detector` along `family` on `grid`, then refine the sign change
/// by bisection when there is exactly one.
pub fn sweep(family: &NoisyFamily, grid: &[f64], detector: &Detector) -> Result<SweepResult> {
    sweep_with(
        &family.label,
        |l| family.at(l),
        grid,
        detector,
        DETECTION_TOL,
    )
}

pub fn sweep_with<F>(
    label: &str,
    family: F,
    grid: &[f64],
    detector: &Detector,
    tol: f64,
) -> Result<SweepResult>
where
    F: Fn(f64) -> Result<DensityMatrix> + Sync,
{
    validate_grid(grid)?;
    let eval = |l: f64| family(l).and_then(|rho| detector.evaluate(&rho));
    let values = grid
        .par_iter()
        .map(|&l| eval(l))
        .collect::<Result<Vec<f64>>>()?;
    let negative = |v: f64| v < -tol;
    let changes: Vec<usize> = (0..values.len().saturating_sub(1))
        .filter(|&i| negative(values[i]) != negative(values[i + 1]))
        .collect();
    let threshold = match changes.as_slice() {
        [i] => {
            let (mut lo, mut hi) = (grid[*i], grid[*i + 1]);
            let lo_negative = negative(values[*i]);
            for _ in 0..BISECTION_ITERATIONS {
                if hi - lo < BISECTION_WIDTH {
                    break;
                }
                let mid = 0.5 * (lo + hi);
                if negative(eval(mid)?) == lo_negative {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            Some(0.5 * (lo + hi))
        }
        _ => None,
    };
    Ok(SweepResult {
        family_label: label.to_string(),
        detector_label: detector.label().to_string(),
        lambdas: grid.to_vec(),
        values,
        sign_changes: changes.len(),
        threshold,
        tolerance: tol,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    SeparableUndetected,
    EntangledPpt,
    Npt,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::SeparableUndetected => "separable-undetected",
            Verdict::EntangledPpt => "entangled-PPT",
            Verdict::Npt => "NPT",
        })
    }
}

#[derive(Debug, Clone, Default)]
pub struct CertifyOptions {
    pub witness: Option<Witness>,
    /// Defaults to [`DETECTION_TOL`].
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CertifyReport {
    pub ppt: bool,
    pub pt_min_eig: f64,
    /// `None` when party B is not 3-dimensional.
    pub choi_u: Option<f64>,
    pub witness: Option<f64>,
    pub gamma: Option<f64>,
    pub gamma_kind: Option<GammaKind>,
    pub verdict: Verdict,
    pub tol: f64,
}

/// Combine the PPT test, the Choi detector and an optional witness.
pub fn certify_state(rho: &DensityMatrix, options: &CertifyOptions) -> Result<CertifyReport> {
    let tol = options.tol.unwrap_or(DETECTION_TOL);
    let pt_min = pt_min_eig(rho)?;
    let ppt = is_ppt(rho, tol)?;
    let choi_u = if rho.dims().1 == 3 {
        Some(choi_u_detect(rho)?)
    } else {
        None
    };
    let witness = options
        .witness
        .as_ref()
        .map(|w| witness_value(w, rho))
        .transpose()?;
    let witness_certifies = matches!(
        (&options.witness, witness),
        (Some(w), Some(v)) if w.kind == GammaKind::Supplied && v < -tol
    );
    let verdict = if !ppt {
        Verdict::Npt
    } else if choi_u.is_some_and(|v| v < -tol) || witness_certifies {
        Verdict::EntangledPpt
    } else {
        Verdict::SeparableUndetected
    };
    Ok(CertifyReport {
        ppt,
        pt_min_eig: pt_min,
        choi_u,
        witness,
        gamma: options.witness.as_ref().map(|w| w.gamma),
        gamma_kind: options.witness.as_ref().map(|w| w.kind),
        verdict,
        tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{edge_state, gentiles2_4x3_upb, rho_noisy_family, tiles_upb, RhoVariant};

    #[test]
    fn gamma_trivial_projectors() {
        let full = estimate_gamma(&Matrix::identity(9), (3, 3), 5, 1).unwrap();
        assert!((full.gamma - 1.0).abs() < 1e-12);
        let zero = estimate_gamma(&Matrix::zeros(9, 9), (3, 3), 5, 1).unwrap();
        assert_eq!(zero.gamma, 0.0);
        assert!(estimate_gamma(&Matrix::identity(9).scale(0.5), (3, 3), 5, 1).is_err());
        assert!(estimate_gamma(&Matrix::identity(9), (3, 3), 0, 1).is_err());
    }

    #[test]
    fn gamma_is_deterministic() {
        let pi = tiles_upb().span_projector().unwrap();
        let a = estimate_gamma(&pi, (3, 3), 20, 7).unwrap();
        let b = estimate_gamma(&pi, (3, 3), 20, 7).unwrap();
        assert_eq!(a.gamma, b.gamma);
        assert_eq!(a.restart_values, b.restart_values);
        assert!(a.gamma > 0.0 && a.gamma < 1.0);
    }

    #[test]
    fn witness_values() {
        let upb = tiles_upb();
        let w = Witness::for_upb(&upb, 0.03).unwrap();
        let rho = edge_state(&upb).unwrap();
        assert!((witness_value(&w, &rho).unwrap() + 0.03).abs() < 1e-12);
        let mixed = DensityMatrix::maximally_mixed((3, 3));
        assert!((witness_value(&w, &mixed).unwrap() - (5.0 / 9.0 - 0.03)).abs() < 1e-12);
        let other = DensityMatrix::maximally_mixed((4, 3));
        assert!(witness_value(&w, &other).is_err());
        assert!(Witness::for_upb(&upb, 1.5).is_err());
    }

    #[test]
    fn grid_parsing() {
        let g = parse_grid("0:0.005:1").unwrap();
        assert_eq!(g.len(), 201);
        assert_eq!(g[0], 0.0);
        assert_eq!(g[200], 1.0);
        assert_eq!(parse_grid("0.2:0.2:0.6").unwrap().len(), 3);
        for bad in [
            "0:0.1:0.05",
            "0:0:1",
            "0:-0.1:1",
            "-0.1:0.1:1",
            "0:0.1:1.5",
            "0:0.1",
            "a:b:c",
        ] {
            assert!(parse_grid(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn sweep_locates_single_threshold() {
        let fam = rho_noisy_family(RhoVariant::Rho2).unwrap();
        let grid = parse_grid("0:0.05:1").unwrap();
        let r = sweep(&fam, &grid, &Detector::ChoiU).unwrap();
        assert_eq!(r.sign_changes, 1);
        let t = r.threshold.unwrap();
        assert!(t > 0.0 && t < 1.0);
        let before = choi_u_detect(&fam.at(t - 1e-6).unwrap()).unwrap();
        let after = choi_u_detect(&fam.at(t + 1e-6).unwrap()).unwrap();
        assert!(before < 0.0 && after > -DETECTION_TOL);
        assert_eq!(r.values[0], choi_u_detect(&fam.edge).unwrap());
        assert!(sweep(&fam, &[], &Detector::ChoiU).is_err());
        assert!(sweep(&fam, &[0.5, 0.2], &Detector::ChoiU).is_err());
    }

    #[test]
    fn sweep_csv_format() {
        let fam = rho_noisy_family(RhoVariant::Rho2).unwrap();
        let r = sweep(&fam, &[0.0, 0.5], &Detector::PtMinEig).unwrap();
        let csv = r.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("lambda,value"));
        let row = lines.next().unwrap();
        assert!(row.starts_with("0.0000000000000000e0,"));
        let v: f64 = row.split(',').nth(1).unwrap().parse().unwrap();
        assert_eq!(v, r.values[0]);
    }

    #[test]
    fn certify_verdicts() {
        let rho = edge_state(&tiles_upb()).unwrap();
        let r = certify_state(&rho, &CertifyOptions::default()).unwrap();
        assert!(r.ppt);
        assert_eq!(r.verdict, Verdict::EntangledPpt);

        let r = certify_state(
            &DensityMatrix::maximally_mixed((3, 3)),
            &CertifyOptions::default(),
        )
        .unwrap();
        assert_eq!(r.verdict, Verdict::SeparableUndetected);

        let s = 0.5f64.sqrt();
        let bell = DensityMatrix::new(Matrix::outer(&[s, 0.0, 0.0, s]), (2, 2)).unwrap();
        let r = certify_state(&bell, &CertifyOptions::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Npt);
        assert!(r.choi_u.is_none());
    }

    #[test]
    fn estimated_gamma_never_certifies_alone() {
        // full-rank member the Choi detector misses
        let g = gentiles2_4x3_upb();
        let fam = crate::catalog::sigma2_noisy_family(&g, &[0, 1, 2, 3, 4, 5, 6]).unwrap();
        let rho = fam.at(0.1).unwrap();
        let pi = g.span_projector().unwrap();
        let est = Witness::new(pi.clone(), 0.2, GammaKind::Estimated).unwrap();
        let sup = Witness::new(pi, 0.2, GammaKind::Supplied).unwrap();
        let with_est = certify_state(
            &rho,
            &CertifyOptions {
                witness: Some(est),
                tol: None,
            },
        )
        .unwrap();
        let with_sup = certify_state(
            &rho,
            &CertifyOptions {
                witness: Some(sup),
                tol: None,
            },
        )
        .unwrap();
        assert!(with_est.witness.unwrap() < 0.0);
        assert_eq!(with_sup.verdict, Verdict::EntangledPpt);
        assert!(with_est.choi_u.unwrap() >= -DETECTION_TOL);
        assert_eq!(with_est.verdict, Verdict::SeparableUndetected);
    }
}
