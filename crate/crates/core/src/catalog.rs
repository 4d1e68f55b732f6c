//! Product bases and the density-matrix families built from them.
//!
//! Kets are written the usual way, `|1⟩, |2⟩, …` with 1-based labels, and
//! `|a±b±c⟩` stands for the unnormalized sum `|a⟩ ± |b⟩ ± |c⟩`. Internally
//! everything is 0-based: `|1⟩` is index 0.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::{self, dot, kron_vec, Matrix, DEFAULT_RANK_TOL};

/// Pairwise overlap allowed between members of a [`ProductBasis`].
pub const ORTHOGONALITY_TOL: f64 = 1e-12;
/// Trace deviation allowed for a [`DensityMatrix`].
pub const TRACE_TOL: f64 = 1e-12;
/// Smallest eigenvalue allowed for a [`DensityMatrix`].
pub const PSD_TOL: f64 = 1e-10;

/// Parse a ket label such as `"1-2"` or `"1+2+3"` into an unnormalized
/// vector of length `d`.
///
/// ```
/// assert_eq!(belab::catalog::ket(3, "1-2").unwrap(), vec![1.0, -1.0, 0.0]);
/// ```
pub fn ket(d: usize, label: &str) -> Result<Vec<f64>> {
    let mut v = vec![0.0; d];
    let mut sign = 1.0;
    let mut digits = String::new();
    let mut flush = |digits: &mut String, sign: f64| -> Result<()> {
        let k: usize = digits
            .parse()
            .map_err(|_| Error::invalid(format!("bad ket label {label:?}")))?;
        if k == 0 || k > d {
            return Err(Error::invalid(format!("ket |{k}⟩ outside dimension {d}")));
        }
        v[k - 1] += sign;
        digits.clear();
        Ok(())
    };
    for c in label.chars() {
        match c {
            '0'..='9' => digits.push(c),
            '+' | '-' => {
                flush(&mut digits, sign)?;
                sign = if c == '+' { 1.0 } else { -1.0 };
            }
            ' ' => {}
            _ => return Err(Error::invalid(format!("bad ket label {label:?}"))),
        }
    }
    flush(&mut digits, sign)?;
    Ok(v)
}

/// `|α⟩ ⊗ |β⟩` with real unit factors.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductVector {
    a: Vec<f64>,
    b: Vec<f64>,
}

impl ProductVector {
    /// Normalizes both factors.
    pub fn new(a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        let a = linalg::normalized(&a).ok_or(Error::ZeroVector(0))?;
        let b = linalg::normalized(&b).ok_or(Error::ZeroVector(1))?;
        Ok(Self { a, b })
    }

    /// Build from ket labels, e.g. `from_kets((4, 3), "2-4", "1")`.
    pub fn from_kets(dims: (usize, usize), a: &str, b: &str) -> Result<Self> {
        Self::new(ket(dims.0, a)?, ket(dims.1, b)?)
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.a.len(), self.b.len())
    }

    /// The full vector in the `d₁·d₂`-dimensional space.
    pub fn full(&self) -> Vec<f64> {
        kron_vec(&self.a, &self.b)
    }

    /// `⟨self|other⟩ = ⟨α|α′⟩⟨β|β′⟩`.
    pub fn overlap(&self, other: &Self) -> f64 {
        dot(&self.a, &other.a) * dot(&self.b, &other.b)
    }

    pub fn projector(&self) -> Matrix {
        Matrix::outer(&self.full())
    }

    /// Flip factor signs so the largest-magnitude entry of each factor is
    /// positive. The full vector changes by at most an overall sign.
    pub fn canonical(&self) -> Self {
        fn fix(v: &[f64]) -> Vec<f64> {
            let mut best = 0;
            for (i, x) in v.iter().enumerate() {
                if x.abs() > v[best].abs() + 1e-12 {
                    best = i;
                }
            }
            if v[best] < 0.0 {
                v.iter().map(|x| -x).collect()
            } else {
                v.to_vec()
            }
        }
        Self {
            a: fix(&self.a),
            b: fix(&self.b),
        }
    }

    /// Embed party A into a larger space by zero padding.
    pub fn pad_a(&self, d1: usize) -> Result<Self> {
        if d1 < self.a.len() {
            return Err(Error::invalid("cannot shrink party A"));
        }
        let mut a = self.a.clone();
        a.resize(d1, 0.0);
        Ok(Self {
            a,
            b: self.b.clone(),
        })
    }
}

/// An ordered set of mutually orthogonal product vectors.
#[derive(Debug, Clone)]
pub struct ProductBasis {
    vectors: Vec<ProductVector>,
    dims: (usize, usize),
    stopper: Option<usize>,
    label: String,
}

impl ProductBasis {
    /// `stopper` is a 0-based index into `vectors`.
    pub fn new(
        label: impl Into<String>,
        dims: (usize, usize),
        vectors: Vec<ProductVector>,
        stopper: Option<usize>,
    ) -> Result<Self> {
        for v in &vectors {
            if v.dims() != dims {
                return Err(Error::dims(format!("{dims:?}"), format!("{:?}", v.dims())));
            }
        }
        if vectors.len() > dims.0 * dims.1 {
            return Err(Error::invalid(format!(
                "{} vectors exceed dimension {}",
                vectors.len(),
                dims.0 * dims.1
            )));
        }
        for i in 0..vectors.len() {
            for j in i + 1..vectors.len() {
                let o = vectors[i].overlap(&vectors[j]);
                if o.abs() > ORTHOGONALITY_TOL {
                    return Err(Error::invalid(format!(
                        "vectors {} and {} are not orthogonal (overlap {o:e})",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        if let Some(s) = stopper {
            if s >= vectors.len() {
                return Err(Error::invalid(format!("stopper index {s} out of range")));
            }
        }
        Ok(Self {
            vectors,
            dims,
            stopper,
            label: label.into(),
        })
    }

    pub fn vectors(&self) -> &[ProductVector] {
        &self.vectors
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn dims(&self) -> (usize, usize) {
        self.dims
    }

    pub fn total_dim(&self) -> usize {
        self.dims.0 * self.dims.1
    }

    pub fn stopper(&self) -> Option<usize> {
        self.stopper
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn full_vectors(&self) -> Vec<Vec<f64>> {
        self.vectors.iter().map(ProductVector::full).collect()
    }

    /// `Σᵢ |φᵢ⟩⟨φᵢ|`.
    pub fn projector_sum(&self) -> Matrix {
        let d = self.total_dim();
        self.vectors.iter().fold(Matrix::zeros(d, d), |acc, v| {
            acc.add(&v.projector()).unwrap()
        })
    }

    /// Projector onto the span, built by orthonormalization.
    pub fn span_projector(&self) -> Result<Matrix> {
        linalg::projector_onto_span(&self.full_vectors())
    }

    /// Gram matrix `⟨φᵢ|φⱼ⟩`.
    pub fn gram(&self) -> Matrix {
        let n = self.len();
        let mut g = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                g[(i, j)] = self.vectors[i].overlap(&self.vectors[j]);
            }
        }
        g
    }

    /// Keep the listed members (0-based), in the given order. The stopper is
    /// carried over when it survives.
    pub fn subset(&self, indices: &[usize], label: impl Into<String>) -> Result<Self> {
        let mut vectors = Vec::with_capacity(indices.len());
        let mut stopper = None;
        for (pos, &i) in indices.iter().enumerate() {
            let v = self
                .vectors
                .get(i)
                .ok_or_else(|| Error::invalid(format!("index {i} out of range")))?;
            if indices[..pos].contains(&i) {
                return Err(Error::invalid(format!("duplicate index {i}")));
            }
            if Some(i) == self.stopper {
                stopper = Some(pos);
            }
            vectors.push(v.clone());
        }
        Self::new(label, self.dims, vectors, stopper)
    }

    /// Drop one member (0-based).
    pub fn without(&self, index: usize) -> Result<Self> {
        let keep: Vec<usize> = (0..self.len()).filter(|&i| i != index).collect();
        if keep.len() == self.len() {
            return Err(Error::invalid(format!("index {index} out of range")));
        }
        self.subset(&keep, format!("{} minus #{}", self.label, index + 1))
    }

    /// Append vectors, checking orthogonality against the whole set.
    pub fn extended(&self, extra: &[ProductVector], label: impl Into<String>) -> Result<Self> {
        let mut vectors = self.vectors.clone();
        vectors.extend_from_slice(extra);
        Self::new(label, self.dims, vectors, self.stopper)
    }
}

/// Real symmetric, unit-trace, positive semidefinite matrix on `d₁ ⊗ d₂`.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    mat: Matrix,
    dims: (usize, usize),
}

impl DensityMatrix {
    /// Validates shape, symmetry, trace and positivity.
    pub fn new(mat: Matrix, dims: (usize, usize)) -> Result<Self> {
        let d = dims.0 * dims.1;
        if mat.rows() != d || mat.cols() != d {
            return Err(Error::dims(
                format!("{d}x{d}"),
                format!("{}x{}", mat.rows(), mat.cols()),
            ));
        }
        mat.check_symmetric(linalg::SYMMETRY_TOL)?;
        let mat = if mat.asymmetry() == 0.0 {
            mat
        } else {
            mat.symmetrized()
        };
        let tr = mat.trace();
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::NotDensityMatrix(format!("trace {tr} ≠ 1")));
        }
        let m = linalg::min_eig(&mat)?;
        if m < -PSD_TOL {
            return Err(Error::NotDensityMatrix(format!(
                "negative eigenvalue {m:e}"
            )));
        }
        Ok(Self { mat, dims })
    }

    /// `I / D`.
    pub fn maximally_mixed(dims: (usize, usize)) -> Self {
        let d = dims.0 * dims.1;
        Self {
            mat: Matrix::identity(d).scale(1.0 / d as f64),
            dims,
        }
    }

    pub fn pure(v: &ProductVector) -> Self {
        Self {
            mat: v.projector(),
            dims: v.dims(),
        }
    }

    /// Normalized projector `P / Tr P`.
    pub fn from_projector(p: &Matrix, dims: (usize, usize)) -> Result<Self> {
        let tr = p.trace();
        if tr <= 0.5 {
            return Err(Error::invalid("projector has empty range"));
        }
        Self::new(p.scale(1.0 / tr), dims)
    }

    pub fn matrix(&self) -> &Matrix {
        &self.mat
    }

    pub fn dims(&self) -> (usize, usize) {
        self.dims
    }

    pub fn dim(&self) -> usize {
        self.dims.0 * self.dims.1
    }

    pub fn rank(&self) -> usize {
        self.rank_with_tol(DEFAULT_RANK_TOL)
    }

    pub fn rank_with_tol(&self, tol: f64) -> usize {
        // the eigensolver already succeeded on this matrix at construction
        linalg::rank(&self.mat, tol).expect("validated density matrix")
    }

    pub fn trace(&self) -> f64 {
        self.mat.trace()
    }

    /// Zero-pad party A up to `d1`.
    pub fn pad_a(&self, d1: usize) -> Result<Self> {
        let (a, b) = self.dims;
        if d1 < a {
            return Err(Error::invalid("cannot shrink party A"));
        }
        let d = d1 * b;
        let mut m = Matrix::zeros(d, d);
        for i in 0..a * b {
            for j in 0..a * b {
                m[(i, j)] = self.mat[(i, j)];
            }
        }
        Ok(Self {
            mat: m,
            dims: (d1, b),
        })
    }

    pub(crate) fn from_parts_unchecked(mat: Matrix, dims: (usize, usize)) -> Self {
        Self { mat, dims }
    }
}

/// The 3⊗3 Tiles UPB; the fifth member, the uniform superposition, is the
/// stopper.
pub fn tiles_upb() -> ProductBasis {
    let d = (3, 3);
    let pv = |a, b| ProductVector::from_kets(d, a, b).unwrap();
    let vectors = vec![
        pv("1", "1-2"),
        pv("1-2", "3"),
        pv("3", "2-3"),
        pv("2-3", "1"),
        pv("1+2+3", "1+2+3"),
    ];
    ProductBasis::new("tiles", d, vectors, Some(4)).unwrap()
}

/// The real GenTiles2 UPB in 4⊗3 with seven members; `|φ₇⟩` is the stopper.
pub fn gentiles2_4x3_upb() -> ProductBasis {
    let d = (4, 3);
    let pv = |a, b| ProductVector::from_kets(d, a, b).unwrap();
    let vectors = vec![
        pv("1", "1-2"),
        pv("2", "2-3"),
        pv("3", "3-1"),
        pv("2-4", "1"),
        pv("3-4", "2"),
        pv("1-4", "3"),
        pv("1+2+3+4", "1+2+3"),
    ];
    ProductBasis::new("gentiles2", d, vectors, Some(6)).unwrap()
}

/// The six "plus partners" of the first six GenTiles2 members. They span the
/// complement of `{|φ₁⟩ … |φ₆⟩}`, i.e. the range of the σ₁ family.
pub fn tiles_plus_partners() -> Vec<ProductVector> {
    let d = (4, 3);
    let pv = |a, b| ProductVector::from_kets(d, a, b).unwrap();
    vec![
        pv("1", "1+2"),
        pv("2", "2+3"),
        pv("3", "3+1"),
        pv("2+4", "1"),
        pv("3+4", "2"),
        pv("1+4", "3"),
    ]
}

/// Five product vectors completing the Tiles UPB without its stopper to an
/// orthonormal product basis of 3⊗3.
pub fn tiles_completion() -> Vec<ProductVector> {
    let d = (3, 3);
    let pv = |a, b| ProductVector::from_kets(d, a, b).unwrap();
    vec![
        pv("1", "1+2"),
        pv("1+2", "3"),
        pv("3", "2+3"),
        pv("2+3", "1"),
        pv("2", "2"),
    ]
}

/// Tiles embedded in 4⊗3 plus `|41⟩, |42⟩, |43⟩`.
pub fn extended_tiles_4x3_upb() -> ProductBasis {
    let mut vectors: Vec<ProductVector> = tiles_upb()
        .vectors()
        .iter()
        .map(|v| v.pad_a(4).unwrap())
        .collect();
    for b in ["1", "2", "3"] {
        vectors.push(ProductVector::from_kets((4, 3), "4", b).unwrap());
    }
    ProductBasis::new("extended-tiles", (4, 3), vectors, Some(4)).unwrap()
}

/// Normalized projector onto the orthogonal complement of the basis span,
/// `(I − Σ|φᵢ⟩⟨φᵢ|)/(D − n)`.
pub fn edge_state(basis: &ProductBasis) -> Result<DensityMatrix> {
    let d = basis.total_dim();
    let n = basis.len();
    if n >= d {
        return Err(Error::invalid("basis is complete; the complement is empty"));
    }
    let comp = Matrix::identity(d).sub(&basis.projector_sum())?;
    DensityMatrix::new(comp.scale(1.0 / (d - n) as f64), basis.dims())
}

/// `λ·a + (1 − λ)·b`.
pub fn mix(a: &DensityMatrix, b: &DensityMatrix, lambda: f64) -> Result<DensityMatrix> {
    if a.dims != b.dims {
        return Err(Error::dims(
            format!("{:?}", a.dims),
            format!("{:?}", b.dims),
        ));
    }
    check_lambda(lambda)?;
    if lambda == 0.0 {
        return Ok(b.clone());
    }
    if lambda == 1.0 {
        return Ok(a.clone());
    }
    // a convex combination of validated states stays valid
    Ok(DensityMatrix::from_parts_unchecked(
        a.mat.affine(lambda, &b.mat, 1.0 - lambda)?,
        a.dims,
    ))
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::invalid(format!("lambda {lambda} outside [0, 1]")));
    }
    Ok(())
}

/// A one-parameter family `λ·noise + (1 − λ)·edge`.
///
/// Keeping the two endpoints around lets a sweep evaluate hundreds of grid
/// points without rebuilding the edge state.
#[derive(Debug, Clone)]
pub struct NoisyFamily {
    pub label: String,
    pub edge: DensityMatrix,
    pub noise: DensityMatrix,
}

impl NoisyFamily {
    pub fn new(
        label: impl Into<String>,
        edge: DensityMatrix,
        noise: DensityMatrix,
    ) -> Result<Self> {
        if edge.dims != noise.dims {
            return Err(Error::dims(
                format!("{:?}", edge.dims),
                format!("{:?}", noise.dims),
            ));
        }
        Ok(Self {
            label: label.into(),
            edge,
            noise,
        })
    }

    pub fn at(&self, lambda: f64) -> Result<DensityMatrix> {
        mix(&self.noise, &self.edge, lambda)
    }

    pub fn dims(&self) -> (usize, usize) {
        self.edge.dims
    }
}

/// The family `λ·P + (1 − λ)·σ₂` where `P` is the normalized projector onto
/// the span of a stopper-containing subset of the UPB and `σ₂` its edge
/// state. Subset indices are 0-based.
pub fn sigma2_noisy_family(upb: &ProductBasis, subset: &[usize]) -> Result<NoisyFamily> {
    let stopper = upb.stopper().ok_or_else(|| {
        Error::invalid(format!("basis {:?} has no declared stopper", upb.label()))
    })?;
    if subset.is_empty() {
        return Err(Error::invalid("subset must be nonempty"));
    }
    if !subset.contains(&stopper) {
        return Err(Error::invalid(format!(
            "subset must contain the stopper (member {})",
            stopper + 1
        )));
    }
    let sub = upb.subset(subset, "subset")?;
    let p = sub.span_projector()?;
    let noise = DensityMatrix::from_projector(&p, upb.dims())?;
    let edge = edge_state(upb)?;
    let mut members: Vec<usize> = subset.iter().map(|i| i + 1).collect();
    members.sort_unstable();
    let label = format!(
        "sigma2:{}",
        members
            .iter()
            .map(usize::to_string)
            .collect::<Vec<_>>()
            .join(",")
    );
    NoisyFamily::new(label, edge, noise)
}

pub fn sigma2_family(upb: &ProductBasis, subset: &[usize], lambda: f64) -> Result<DensityMatrix> {
    check_lambda(lambda)?;
    sigma2_noisy_family(upb, subset)?.at(lambda)
}

/// Selector for the Tiles-based families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RhoVariant {
    /// `λ|ψᵢ⟩⟨ψᵢ| + (1 − λ)ρ`, `i` in 1..=5.
    Rho1(usize),
    /// `λ·I/9 + (1 − λ)ρ`.
    Rho2,
    /// `λ|4b⟩⟨4b| + (1 − λ)ρ` in 4⊗3, `b` in 1..=3.
    Rho3(usize),
}

pub fn rho_noisy_family(variant: RhoVariant) -> Result<NoisyFamily> {
    let tiles = tiles_upb();
    let rho = edge_state(&tiles)?;
    match variant {
        RhoVariant::Rho1(i) => {
            let v = (1..=5)
                .contains(&i)
                .then(|| &tiles.vectors()[i - 1])
                .ok_or_else(|| Error::invalid(format!("rho1 index {i} not in 1..=5")))?;
            NoisyFamily::new(format!("rho1:{i}"), rho, DensityMatrix::pure(v))
        }
        RhoVariant::Rho2 => NoisyFamily::new("rho2", rho, DensityMatrix::maximally_mixed((3, 3))),
        RhoVariant::Rho3(b) => {
            if !(1..=3).contains(&b) {
                return Err(Error::invalid(format!(
                    "rho3 needs |4b⟩ with b in 1..=3, got {b}"
                )));
            }
            let ab = ProductVector::from_kets((4, 3), "4", &b.to_string())?;
            NoisyFamily::new(
                format!("rho3:4{b}"),
                rho.pad_a(4)?,
                DensityMatrix::pure(&ab),
            )
        }
    }
}

pub fn rho_families(lambda: f64, variant: RhoVariant) -> Result<DensityMatrix> {
    check_lambda(lambda)?;
    rho_noisy_family(variant)?.at(lambda)
}

/// Normalized complement projector of a UCPB prefix, with its split into an
/// edge state and separable noise.
#[derive(Debug, Clone)]
pub struct UcpbComplement {
    pub state: DensityMatrix,
    /// `((D − n)/(D − n′), (n − n′)/(D − n′))`.
    pub weights: (f64, f64),
    pub edge: DensityMatrix,
    /// Uniform mixture of the members not in the prefix.
    pub remainder: DensityMatrix,
}

const DECOMPOSITION_TOL: f64 = 1e-12;

/// `(I − Σ_{i ≤ n′}|φᵢ⟩⟨φᵢ|)/(D − n′)` for the first `n′` members of `upb`,
/// verified against `w₁·edge_state(upb) + w₂·(remaining members mixed)`.
pub fn ucpb_complement(upb: &ProductBasis, prefix_count: usize) -> Result<UcpbComplement> {
    let n = upb.len();
    if prefix_count == 0 || prefix_count >= n {
        return Err(Error::invalid(format!(
            "prefix count {prefix_count} must lie strictly between 0 and {n}"
        )));
    }
    let d = upb.total_dim();
    let prefix = upb.subset(&(0..prefix_count).collect::<Vec<_>>(), "prefix")?;
    let rest = upb.subset(&(prefix_count..n).collect::<Vec<_>>(), "remainder")?;
    let state = edge_state(&prefix)?;
    let edge = edge_state(upb)?;
    let remainder = DensityMatrix::new(
        rest.projector_sum().scale(1.0 / (n - prefix_count) as f64),
        upb.dims(),
    )?;
    let w1 = (d - n) as f64 / (d - prefix_count) as f64;
    let w2 = (n - prefix_count) as f64 / (d - prefix_count) as f64;
    let recombined = edge.matrix().affine(w1, remainder.matrix(), w2)?;
    let err = recombined.max_abs_diff(state.matrix());
    if err > DECOMPOSITION_TOL {
        return Err(Error::invalid(format!(
            "complement decomposition mismatch {err:e}; basis is not orthonormal?"
        )));
    }
    Ok(UcpbComplement {
        state,
        weights: (w1, w2),
        edge,
        remainder,
    })
}

/// `λ·δ₁ + (1 − λ)·σ₃′` for a UCPB whose complement holds the product
/// vectors `remainder`. Together they must form a UPB; `σ₃′` is its edge
/// state and `δ₁` the uniform mixture of the remainder.
///
/// Whether the complement projector of `ucpb` is separable has to be known
/// by the caller; it is not checked here.
pub fn sigma3_family(ucpb: &ProductBasis, remainder: &[ProductVector]) -> Result<NoisyFamily> {
    if remainder.is_empty() {
        return Err(Error::invalid("remainder must be nonempty"));
    }
    let full = ucpb.extended(remainder, format!("{} + remainder", ucpb.label()))?;
    let c = ucpb_complement(&full, ucpb.len())?;
    NoisyFamily::new(format!("sigma3[{}]", ucpb.label()), c.edge, c.remainder)
}

/// `λ·δ₂ + (1 − λ)·σ₄′` for an arbitrary separable state `δ₂` and edge state
/// `σ₄′`. ρ₃ is the built-in instance of this form.
pub fn sigma4_family(separable: DensityMatrix, edge: DensityMatrix) -> Result<NoisyFamily> {
    NoisyFamily::new("sigma4", edge, separable)
}

/// Named families available to the command line and the sweeps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Family {
    Rho(RhoVariant),
    Sigma1,
    /// 1-based member indices of GenTiles2.
    Sigma2(Vec<usize>),
}

impl Family {
    pub fn build(&self) -> Result<NoisyFamily> {
        match self {
            Family::Rho(v) => rho_noisy_family(*v),
            Family::Sigma1 => {
                let mut f = sigma2_noisy_family(&gentiles2_4x3_upb(), &[6])?;
                f.label = "sigma1".into();
                Ok(f)
            }
            Family::Sigma2(members) => {
                let idx: Vec<usize> = members.iter().map(|m| m.wrapping_sub(1)).collect();
                sigma2_noisy_family(&gentiles2_4x3_upb(), &idx)
            }
        }
    }

    /// The UPB whose span projector gives the natural witness for this family.
    pub fn upb(&self) -> ProductBasis {
        match self {
            Family::Rho(RhoVariant::Rho3(_)) => extended_tiles_4x3_upb(),
            Family::Rho(_) => tiles_upb(),
            Family::Sigma1 | Family::Sigma2(_) => gentiles2_4x3_upb(),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Rho(RhoVariant::Rho1(i)) => write!(f, "rho1:{i}"),
            Family::Rho(RhoVariant::Rho2) => write!(f, "rho2"),
            Family::Rho(RhoVariant::Rho3(b)) => write!(f, "rho3:4{b}"),
            Family::Sigma1 => write!(f, "sigma1"),
            Family::Sigma2(m) => write!(
                f,
                "sigma2:{}",
                m.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
            ),
        }
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (s, None),
        };
        let bad = || Error::invalid(format!("unknown family {s:?}"));
        match (head, arg) {
            ("rho1", Some(i)) => {
                let i: usize = i.parse().map_err(|_| bad())?;
                if !(1..=5).contains(&i) {
                    return Err(Error::invalid(format!("rho1 index {i} not in 1..=5")));
                }
                Ok(Family::Rho(RhoVariant::Rho1(i)))
            }
            ("rho2", None) => Ok(Family::Rho(RhoVariant::Rho2)),
            ("rho3", Some(ab)) => match ab {
                "41" | "42" | "43" => Ok(Family::Rho(RhoVariant::Rho3(
                    ab[1..].parse().map_err(|_| bad())?,
                ))),
                _ => Err(Error::invalid(format!(
                    "rho3 needs one of 41, 42, 43, got {ab:?}"
                ))),
            },
            ("sigma1", None) => Ok(Family::Sigma1),
            ("sigma2", Some(list)) => {
                let members = list
                    .split(',')
                    .map(|t| t.trim().parse::<usize>().map_err(|_| bad()))
                    .collect::<Result<Vec<_>>>()?;
                if members.iter().any(|&m| m == 0 || m > 7) {
                    return Err(Error::invalid("sigma2 members must lie in 1..=7"));
                }
                Ok(Family::Sigma2(members))
            }
            _ => Err(bad()),
        }
    }
}
