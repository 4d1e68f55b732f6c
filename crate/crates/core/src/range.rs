//! Range-criterion analysis for real, partial-transpose-invariant states.
//!
//! For such a state the range criterion reduces to one question: do real
//! product vectors span its range? Supplying a spanning set settles it.
//! Failing to find one is evidence only. The product search is a multistart
//! seesaw and does not certify global optimality.

use serde::Serialize;

use crate::catalog::{DensityMatrix, ProductBasis, ProductVector};
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix, DEFAULT_RANK_TOL};
use crate::maps::{choi_u_detect, pt_deviation, DETECTION_TOL};
use crate::seesaw::{self, Goal};

pub const PT_INVARIANCE_TOL: f64 = 1e-10;
/// `‖(I − P)|φ⟩‖` allowed for a candidate to count as inside the range.
pub const RESIDUAL_TOL: f64 = 1e-8;
/// Overlap a search result needs to count as a product vector in the range.
pub const FOUND_OVERLAP: f64 = 1.0 - 1e-8;
/// Two found vectors are the same if `|⟨α|α′⟩⟨β|β′⟩|` exceeds this.
pub const DEDUP_OVERLAP: f64 = 1.0 - 1e-6;
pub const DEFAULT_SEARCH_RESTARTS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RangeVerdict {
    /// The candidates lie in the range and span it.
    SatisfiedByCandidates,
    /// The candidates do not span the range.
    CandidatesInsufficient,
    /// A product search found product vectors in the range, but they span
    /// less than the whole of it.
    ProductDeficitEvidence,
}

#[derive(Debug, Clone, Serialize)]
pub struct SearchInfo {
    pub restarts: usize,
    pub seed: u64,
    pub best_overlap: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RangeReport {
    pub state_rank: usize,
    pub candidates_total: usize,
    pub candidates_in_range: usize,
    pub span_rank_of_candidates: usize,
    pub max_residual: f64,
    pub verdict: RangeVerdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub search: Option<SearchInfo>,
}

/// Projector onto the eigenvectors of `rho` with eigenvalue above `tol`.
pub fn range_projector(rho: &DensityMatrix, tol: f64) -> Result<Matrix> {
    if tol <= 0.0 {
        return Err(Error::invalid("tolerance must be positive"));
    }
    let eig = linalg::eig_sym(rho.matrix())?;
    let d = rho.dim();
    let vs: Vec<Vec<f64>> = (0..d)
        .filter(|&k| eig.eigenvalues[k] > tol)
        .map(|k| eig.eigenvector(k))
        .collect();
    let mut p = Matrix::zeros(d, d);
    for i in 0..d {
        for j in i..d {
            let s: f64 = vs.iter().map(|v| v[i] * v[j]).sum();
            p[(i, j)] = s;
            p[(j, i)] = s;
        }
    }
    Ok(p)
}

fn residual(p: &Matrix, v: &[f64]) -> f64 {
    let pv = p.matvec(v).expect("matching dimensions");
    v.iter()
        .zip(&pv)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Numerical rank of a vector family, from its Gram matrix.
pub fn span_rank(vectors: &[ProductVector]) -> usize {
    let n = vectors.len();
    if n == 0 {
        return 0;
    }
    let mut g = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            g[(i, j)] = vectors[i].overlap(&vectors[j]);
        }
    }
    linalg::rank(&g, DEFAULT_RANK_TOL).expect("Gram matrix is symmetric")
}

fn require_pt_invariant(rho: &DensityMatrix) -> Result<()> {
    let deviation = pt_deviation(rho);
    if deviation > PT_INVARIANCE_TOL {
        return Err(Error::NotPtInvariant { deviation });
    }
    Ok(())
}

/// Test whether `candidates` lie in the range of `rho` and span it.
pub fn check_range_criterion(
    rho: &DensityMatrix,
    candidates: &[ProductVector],
) -> Result<RangeReport> {
    require_pt_invariant(rho)?;
    for c in candidates {
        if c.dims() != rho.dims() {
            return Err(Error::dims(
                format!("{:?}", rho.dims()),
                format!("{:?}", c.dims()),
            ));
        }
    }
    let p = range_projector(rho, DEFAULT_RANK_TOL)?;
    let state_rank = rho.rank();
    let residuals: Vec<f64> = candidates.iter().map(|c| residual(&p, &c.full())).collect();
    let inside: Vec<ProductVector> = candidates
        .iter()
        .zip(&residuals)
        .filter(|(_, &r)| r <= RESIDUAL_TOL)
        .map(|(c, _)| c.clone())
        .collect();
    let span = span_rank(&inside);
    let verdict =
        if !candidates.is_empty() && inside.len() == candidates.len() && span == state_rank {
            RangeVerdict::SatisfiedByCandidates
        } else {
            RangeVerdict::CandidatesInsufficient
        };
    Ok(RangeReport {
        state_rank,
        candidates_total: candidates.len(),
        candidates_in_range: inside.len(),
        span_rank_of_candidates: span,
        max_residual: residuals.iter().copied().fold(0.0, f64::max),
        verdict,
        search: None,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct FoundProduct {
    #[serde(serialize_with = "crate::io::serialize_product_vector")]
    pub vector: ProductVector,
    pub overlap: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProductSearch {
    /// Distinct product vectors with overlap above [`FOUND_OVERLAP`],
    /// canonicalized by sign and sorted.
    pub found: Vec<FoundProduct>,
    pub best_overlap: f64,
    #[serde(serialize_with = "crate::io::serialize_product_vector")]
    pub best: ProductVector,
    pub restarts: usize,
    pub seed: u64,
}

impl ProductSearch {
    pub fn vectors(&self) -> Vec<ProductVector> {
        self.found.iter().map(|f| f.vector.clone()).collect()
    }
}

fn lexicographic(a: &ProductVector, b: &ProductVector) -> std::cmp::Ordering {
    a.a()
        .iter()
        .chain(a.b())
        .zip(b.a().iter().chain(b.b()))
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(std::cmp::Ordering::Equal)
}

/// Multistart seesaw maximization of `⟨α⊗β|P|α⊗β⟩`.
pub fn product_search(
    p: &Matrix,
    dims: (usize, usize),
    restarts: usize,
    seed: u64,
) -> Result<ProductSearch> {
    if p.idempotency_defect() > 1e-10 {
        return Err(Error::NotProjector {
            defect: p.idempotency_defect(),
        });
    }
    let runs = seesaw::multistart(p, dims, Goal::Maximize, restarts, seed)?;
    let best = runs
        .iter()
        .max_by(|a, b| a.value.total_cmp(&b.value))
        .expect("at least one restart");
    let (best_overlap, best_vec) = (best.value, best.vector.canonical());

    let mut hits: Vec<FoundProduct> = runs
        .iter()
        .filter(|r| r.value > FOUND_OVERLAP)
        .map(|r| FoundProduct {
            vector: r.vector.canonical(),
            overlap: r.value,
        })
        .collect();
    // order-independent deduplication: best overlaps claim first
    hits.sort_by(|x, y| {
        y.overlap
            .total_cmp(&x.overlap)
            .then_with(|| lexicographic(&x.vector, &y.vector))
    });
    let mut found: Vec<FoundProduct> = Vec::new();
    for h in hits {
        if found
            .iter()
            .all(|f| f.vector.overlap(&h.vector).abs() <= DEDUP_OVERLAP)
        {
            found.push(h);
        }
    }
    found.sort_by(|x, y| lexicographic(&x.vector, &y.vector));
    Ok(ProductSearch {
        found,
        best_overlap,
        best: best_vec,
        restarts,
        seed,
    })
}

/// Search the range of `rho` for product vectors and judge the range
/// criterion from what was found.
pub fn search_range_criterion(
    rho: &DensityMatrix,
    restarts: usize,
    seed: u64,
) -> Result<(RangeReport, ProductSearch)> {
    require_pt_invariant(rho)?;
    let p = range_projector(rho, DEFAULT_RANK_TOL)?;
    let search = product_search(&p, rho.dims(), restarts, seed)?;
    let mut report = check_range_criterion(rho, &search.vectors())?;
    if report.verdict == RangeVerdict::CandidatesInsufficient
        && report.candidates_in_range > 0
        && report.span_rank_of_candidates < report.state_rank
    {
        report.verdict = RangeVerdict::ProductDeficitEvidence;
    }
    report.search = Some(SearchInfo {
        restarts,
        seed,
        best_overlap: search.best_overlap,
    });
    Ok((report, search))
}

/// True iff `basis ∪ completion` is a full orthogonal product basis.
pub fn verify_completion(basis: &ProductBasis, completion: &[ProductVector]) -> bool {
    let all: Vec<&ProductVector> = basis.vectors().iter().chain(completion).collect();
    if all.len() != basis.total_dim() || all.iter().any(|v| v.dims() != basis.dims()) {
        return false;
    }
    for i in 0..all.len() {
        for j in i + 1..all.len() {
            if all[i].overlap(all[j]).abs() > crate::catalog::ORTHOGONALITY_TOL {
                return false;
            }
        }
    }
    true
}

#[derive(Debug, Clone, Serialize)]
pub struct UcpbEvidence {
    pub subset_size: usize,
    pub complement_dim: usize,
    pub state_rank: usize,
    /// `None` when party B is not 3-dimensional.
    pub choi_u: Option<f64>,
    /// The Choi detector proved the complement state entangled, hence the
    /// subset cannot be completed.
    pub complement_entangled: bool,
    pub best_overlap: f64,
    pub found_count: usize,
    pub found_span_rank: usize,
    pub found_below_dim: bool,
    /// Result of [`verify_completion`] when a completion was supplied.
    pub completable: Option<bool>,
    pub restarts: usize,
    pub seed: u64,
}

/// Analyse the complement of an orthogonal product set: detector value on
/// its normalized projector, product vectors found inside it and, when
/// supplied, a candidate completion.
pub fn ucpb_evidence(
    subset: &ProductBasis,
    completion: Option<&[ProductVector]>,
    restarts: usize,
    seed: u64,
) -> Result<UcpbEvidence> {
    let state = crate::catalog::edge_state(subset)?;
    let p = Matrix::identity(subset.total_dim()).sub(&subset.projector_sum())?;
    let choi_u = if subset.dims().1 == 3 {
        Some(choi_u_detect(&state)?)
    } else {
        None
    };
    let search = product_search(&p, subset.dims(), restarts, seed)?;
    let complement_dim = subset.total_dim() - subset.len();
    Ok(UcpbEvidence {
        subset_size: subset.len(),
        complement_dim,
        state_rank: state.rank(),
        choi_u,
        complement_entangled: choi_u.is_some_and(|v| v < -DETECTION_TOL),
        best_overlap: search.best_overlap,
        found_count: search.found.len(),
        found_span_rank: span_rank(&search.vectors()),
        found_below_dim: search.found.len() < complement_dim,
        completable: completion.map(|c| verify_completion(subset, c)),
        restarts,
        seed,
    })
}
