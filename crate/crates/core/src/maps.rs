//! Single-party linear maps and their lift to the bipartite space.
//!
//! A state on `d₁ ⊗ d₂` is viewed in block form `ρ = Σᵢⱼ |i⟩⟨j| ⊗ ρᵢⱼ` with
//! `d₂×d₂` blocks. Partial transpose and the lifted maps act blockwise on
//! party B.

use crate::catalog::DensityMatrix;
use crate::error::{Error, Result};
use crate::linalg::{self, kron, Matrix};

/// Negative values below `-DETECTION_TOL` count as detection.
pub const DETECTION_TOL: f64 = 1e-10;
const ORTHOGONAL_TOL: f64 = 1e-12;
const LIFT_ASYMMETRY_TOL: f64 = 1e-10;

fn block(m: &Matrix, d2: usize, i: usize, j: usize) -> Matrix {
    let mut b = Matrix::zeros(d2, d2);
    for k in 0..d2 {
        for l in 0..d2 {
            b[(k, l)] = m[(i * d2 + k, j * d2 + l)];
        }
    }
    b
}

fn set_block(m: &mut Matrix, d2: usize, i: usize, j: usize, b: &Matrix) {
    for k in 0..d2 {
        for l in 0..d2 {
            m[(i * d2 + k, j * d2 + l)] = b[(k, l)];
        }
    }
}

/// Transpose on party B: every `d₂×d₂` block is transposed in place.
pub fn partial_transpose(rho: &DensityMatrix) -> Matrix {
    partial_transpose_raw(rho.matrix(), rho.dims())
}

pub(crate) fn partial_transpose_raw(m: &Matrix, (d1, d2): (usize, usize)) -> Matrix {
    let mut out = m.clone();
    for i in 0..d1 {
        for j in 0..d1 {
            for k in 0..d2 {
                for l in 0..d2 {
                    out[(i * d2 + k, j * d2 + l)] = m[(i * d2 + l, j * d2 + k)];
                }
            }
        }
    }
    out
}

/// `max |ρ − ρ^Γ|`.
pub fn pt_deviation(rho: &DensityMatrix) -> f64 {
    partial_transpose(rho).max_abs_diff(rho.matrix())
}

pub fn pt_min_eig(rho: &DensityMatrix) -> Result<f64> {
    linalg::min_eig(&partial_transpose(rho))
}

pub fn is_ppt(rho: &DensityMatrix, tol: f64) -> Result<bool> {
    if tol <= 0.0 {
        return Err(Error::invalid("tolerance must be positive"));
    }
    Ok(pt_min_eig(rho)? >= -tol)
}

/// The Choi map on 3×3 matrices:
///
/// ```text
///        ⎡ a₁₁+a₂₂   −a₁₂     −a₁₃   ⎤
/// ½ ·    ⎢  −a₂₁    a₂₂+a₃₃   −a₂₃   ⎥
///        ⎣  −a₃₁     −a₃₂    a₃₃+a₁₁ ⎦
/// ```
pub fn choi_map(x: &Matrix) -> Result<Matrix> {
    if x.rows() != 3 || x.cols() != 3 {
        return Err(Error::dims("3x3", format!("{}x{}", x.rows(), x.cols())));
    }
    let mut out = x.scale(-0.5);
    out[(0, 0)] = 0.5 * (x[(0, 0)] + x[(1, 1)]);
    out[(1, 1)] = 0.5 * (x[(1, 1)] + x[(2, 2)]);
    out[(2, 2)] = 0.5 * (x[(2, 2)] + x[(0, 0)]);
    Ok(out)
}

/// A linear map on `d×d` real matrices, stored as its `d²×d²` transfer
/// matrix acting on row-major vectorizations: `vec(Λ(X)) = T·vec(X)`.
#[derive(Debug, Clone)]
pub struct SingleSiteMap {
    arity: usize,
    transfer: Matrix,
    name: String,
}

impl SingleSiteMap {
    pub fn from_transfer(name: impl Into<String>, arity: usize, transfer: Matrix) -> Result<Self> {
        let n = arity * arity;
        if transfer.rows() != n || transfer.cols() != n {
            return Err(Error::dims(
                format!("{n}x{n}"),
                format!("{}x{}", transfer.rows(), transfer.cols()),
            ));
        }
        Ok(Self {
            arity,
            transfer,
            name: name.into(),
        })
    }

    /// Tabulate `f` on the matrix units `E_kl`.
    pub fn from_fn(
        name: impl Into<String>,
        arity: usize,
        f: impl Fn(&Matrix) -> Result<Matrix>,
    ) -> Result<Self> {
        let n = arity * arity;
        let mut t = Matrix::zeros(n, n);
        for k in 0..arity {
            for l in 0..arity {
                let mut unit = Matrix::zeros(arity, arity);
                unit[(k, l)] = 1.0;
                let img = f(&unit)?;
                if img.rows() != arity || img.cols() != arity {
                    return Err(Error::dims(arity, img.rows()));
                }
                for (r, &x) in img.as_slice().iter().enumerate() {
                    t[(r, k * arity + l)] = x;
                }
            }
        }
        Self::from_transfer(name, arity, t)
    }

    pub fn identity(arity: usize) -> Self {
        Self::from_transfer("identity", arity, Matrix::identity(arity * arity)).unwrap()
    }

    pub fn transpose(arity: usize) -> Self {
        Self::from_fn("transpose", arity, |x| Ok(x.transpose())).unwrap()
    }

    pub fn choi() -> Self {
        Self::from_fn("choi", 3, choi_map).unwrap()
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn transfer(&self) -> &Matrix {
        &self.transfer
    }

    pub fn apply(&self, x: &Matrix) -> Result<Matrix> {
        if x.rows() != self.arity || x.cols() != self.arity {
            return Err(Error::dims(self.arity, x.rows()));
        }
        let y = self.transfer.matvec(x.as_slice())?;
        Matrix::from_row_major(self.arity, self.arity, y)
    }
}

/// A real orthogonal matrix acting on party B.
#[derive(Debug, Clone)]
pub struct LocalUnitary {
    u: Matrix,
}

impl LocalUnitary {
    pub fn new(u: Matrix) -> Result<Self> {
        if !u.is_square() {
            return Err(Error::dims("square", format!("{}x{}", u.rows(), u.cols())));
        }
        let err = u
            .transpose()
            .matmul(&u)?
            .max_abs_diff(&Matrix::identity(u.rows()));
        if err > ORTHOGONAL_TOL {
            return Err(Error::invalid(format!("uᵀu deviates from I by {err:e}")));
        }
        Ok(Self { u })
    }

    pub fn identity(d: usize) -> Self {
        Self {
            u: Matrix::identity(d),
        }
    }

    /// Rotation by −π/3 in the (|1⟩, |2⟩) plane, fixing `|3⟩`; the partner of
    /// the Choi map in [`choi_u_detect`].
    pub fn detector_rotation() -> Self {
        let h = 3f64.sqrt() / 2.0;
        let u = Matrix::from_rows(&[vec![0.5, h, 0.0], vec![-h, 0.5, 0.0], vec![0.0, 0.0, 1.0]])
            .unwrap();
        Self::new(u).unwrap()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.u
    }

    pub fn dim(&self) -> usize {
        self.u.rows()
    }
}

/// `(I ⊗ u) ρ (I ⊗ u)ᵀ`.
pub fn conjugate_local(rho: &DensityMatrix, u: &LocalUnitary) -> Result<DensityMatrix> {
    let (d1, d2) = rho.dims();
    if u.dim() != d2 {
        return Err(Error::dims(d2, u.dim()));
    }
    let big = kron(&Matrix::identity(d1), u.matrix());
    let out = big.matmul(rho.matrix())?.matmul(&big.transpose())?;
    // orthogonal conjugation preserves trace and spectrum
    Ok(DensityMatrix::from_parts_unchecked(
        out.symmetrized(),
        rho.dims(),
    ))
}

/// `(I ⊗ Λ)ρ`: the `(i, j)` block of the result is `Λ(ρᵢⱼ)`.
pub fn lift_map(m: &SingleSiteMap, rho: &DensityMatrix) -> Result<Matrix> {
    lift_map_raw(m, rho.matrix(), rho.dims())
}

/// [`lift_map`] on any symmetric operator with the given bipartite dims.
pub fn lift_map_raw(m: &SingleSiteMap, mat: &Matrix, (d1, d2): (usize, usize)) -> Result<Matrix> {
    if m.arity() != d2 {
        return Err(Error::dims(format!("map arity {d2}"), m.arity()));
    }
    let mut out = Matrix::zeros(d1 * d2, d1 * d2);
    for i in 0..d1 {
        for j in 0..d1 {
            let img = m.apply(&block(mat, d2, i, j))?;
            set_block(&mut out, d2, i, j, &img);
        }
    }
    let asym = out.asymmetry();
    if asym > LIFT_ASYMMETRY_TOL {
        return Err(Error::NotSymmetric { asymmetry: asym });
    }
    Ok(out.symmetrized())
}

/// Smallest eigenvalue of `(I ⊗ Λ)(I ⊗ u)ρ(I ⊗ u)ᵀ` with Λ the Choi map and
/// `u` the [`LocalUnitary::detector_rotation`].
///
/// Λ is positive, so this is non-negative for every separable `ρ`; a value
/// below `-DETECTION_TOL` certifies entanglement.
pub fn choi_u_detect(rho: &DensityMatrix) -> Result<f64> {
    if rho.dims().1 != 3 {
        return Err(Error::invalid(format!(
            "the Choi detector acts on a 3-dimensional party B, got d₂ = {}",
            rho.dims().1
        )));
    }
    let rotated = conjugate_local(rho, &LocalUnitary::detector_rotation())?;
    linalg::min_eig(&lift_map(&SingleSiteMap::choi(), &rotated)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{edge_state, gentiles2_4x3_upb, tiles_upb, ProductVector};

    fn bell() -> DensityMatrix {
        let s = 0.5f64.sqrt();
        DensityMatrix::new(Matrix::outer(&[s, 0.0, 0.0, s]), (2, 2)).unwrap()
    }

    #[test]
    fn partial_transpose_cases() {
        let p = ProductVector::new(vec![0.3, -1.0, 2.0], vec![1.0, 0.5, -0.2]).unwrap();
        let rho = DensityMatrix::pure(&p);
        assert_eq!(partial_transpose(&rho), *rho.matrix());

        let tiles = edge_state(&tiles_upb()).unwrap();
        assert_eq!(pt_deviation(&tiles), 0.0);

        let pt = partial_transpose(&bell());
        assert!((linalg::min_eig(&pt).unwrap() + 0.5).abs() < 1e-15);
        assert_eq!(partial_transpose_raw(&pt, (2, 2)), *bell().matrix());
        assert_eq!(pt.trace(), bell().trace());
    }

    #[test]
    fn ppt_flags() {
        assert!(is_ppt(&edge_state(&tiles_upb()).unwrap(), DETECTION_TOL).unwrap());
        assert!(!is_ppt(&bell(), DETECTION_TOL).unwrap());
        assert!(is_ppt(&DensityMatrix::maximally_mixed((3, 3)), DETECTION_TOL).unwrap());
        assert!(is_ppt(&bell(), 0.0).is_err());
    }

    #[test]
    fn choi_map_entries() {
        assert_eq!(choi_map(&Matrix::identity(3)).unwrap(), Matrix::identity(3));
        assert_eq!(
            choi_map(&Matrix::from_diag(&[2.0, 0.0, 0.0])).unwrap(),
            Matrix::from_diag(&[1.0, 0.0, 1.0])
        );
        let mut e12 = Matrix::zeros(3, 3);
        e12[(0, 1)] = 1.0;
        assert_eq!(choi_map(&e12).unwrap(), e12.scale(-0.5));
        assert!(choi_map(&Matrix::identity(2)).is_err());
    }

    #[test]
    fn tabulated_choi_matches_formula() {
        let m = SingleSiteMap::choi();
        let x = Matrix::from_rows(&[
            vec![0.7, -0.2, 0.4],
            vec![1.1, 0.3, -0.9],
            vec![0.05, 2.0, -1.5],
        ])
        .unwrap();
        assert!(m.apply(&x).unwrap().max_abs_diff(&choi_map(&x).unwrap()) < 1e-15);
    }

    #[test]
    fn rotation_is_orthogonal() {
        let u = LocalUnitary::detector_rotation();
        let utu = u.matrix().transpose().matmul(u.matrix()).unwrap();
        assert!(utu.max_abs_diff(&Matrix::identity(3)) < 1e-15);
        assert!(LocalUnitary::new(Matrix::from_diag(&[1.0, 2.0])).is_err());
    }

    #[test]
    fn conjugation() {
        let rho = edge_state(&tiles_upb()).unwrap();
        let same = conjugate_local(&rho, &LocalUnitary::identity(3)).unwrap();
        assert_eq!(same.matrix(), rho.matrix());

        let rot = conjugate_local(&rho, &LocalUnitary::detector_rotation()).unwrap();
        let a = linalg::eig_sym(rho.matrix()).unwrap().eigenvalues;
        let b = linalg::eig_sym(rot.matrix()).unwrap().eigenvalues;
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-12);
        }
        assert!(conjugate_local(&rho, &LocalUnitary::identity(2)).is_err());
    }

    #[test]
    fn lift_simple_maps() {
        let rho = edge_state(&gentiles2_4x3_upb()).unwrap();
        assert_eq!(
            lift_map(&SingleSiteMap::identity(3), &rho).unwrap(),
            *rho.matrix()
        );
        assert_eq!(
            lift_map(&SingleSiteMap::transpose(3), &rho).unwrap(),
            partial_transpose(&rho)
        );
        let mixed = DensityMatrix::maximally_mixed((3, 3));
        let lifted = lift_map(&SingleSiteMap::choi(), &mixed).unwrap();
        assert!(lifted.max_abs_diff(mixed.matrix()) < 1e-16);
        assert!(lift_map(&SingleSiteMap::identity(2), &rho).is_err());
    }

    #[test]
    fn detector_requires_qutrit_b() {
        assert!(choi_u_detect(&bell()).is_err());
    }

    #[test]
    fn detector_on_edge_states_is_negative() {
        assert!(choi_u_detect(&edge_state(&tiles_upb()).unwrap()).unwrap() < -1e-6);
        assert!(choi_u_detect(&edge_state(&gentiles2_4x3_upb()).unwrap()).unwrap() < -1e-6);
    }
}
