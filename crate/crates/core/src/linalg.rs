//! Dense real matrix kernel.
//!
//! Everything in this crate is real: the product bases, the states built from
//! them, the Choi map and the local rotation. Matrices are small (at most
//! 12×12 for the built-in catalog), so storage is a flat row-major `Vec<f64>`
//! and the symmetric eigensolver is a cyclic Jacobi iteration.

use std::fmt;
use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};

/// Tolerance used when a matrix must be symmetric on entry.
pub const SYMMETRY_TOL: f64 = 1e-12;
/// Default threshold separating zero from non-zero eigenvalues in [`rank`].
pub const DEFAULT_RANK_TOL: f64 = 1e-8;
/// Vectors whose residual after orthogonalization falls below this fraction
/// of their norm are treated as linearly dependent.
pub const SPAN_TOL: f64 = 1e-10;

const JACOBI_TOL: f64 = 1e-12;
const JACOBI_MAX_SWEEPS: usize = 100;

/// Dense row-major real matrix.
#[derive(Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::dims(rows * cols, data.len()));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::invalid("ragged rows"));
        }
        Ok(Self {
            rows: r,
            cols: c,
            data: rows.concat(),
        })
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    /// `v vᵀ`, exactly symmetric.
    pub fn outer(v: &[f64]) -> Self {
        let n = v.len();
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m.data[i * n + j] = v[i] * v[j];
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    /// `a·self + b·other`.
    pub fn affine(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        self.zip_with(other, |x, y| a * x + b * y)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::dims(
                format!("{}x{}", self.rows, self.cols),
                format!("{}x{}", other.rows, other.cols),
            ));
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&x, &y)| f(x, y))
                .collect(),
        })
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::dims(
                format!("inner dimension {}", self.cols),
                other.rows,
            ));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                let orow = other.row(k);
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, &b) in dst.iter_mut().zip(orow) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.cols {
            return Err(Error::dims(self.cols, v.len()));
        }
        Ok((0..self.rows).map(|i| dot(self.row(i), v)).collect())
    }

    /// `vᵀ A v`.
    pub fn quadratic_form(&self, v: &[f64]) -> Result<f64> {
        Ok(dot(v, &self.matvec(v)?))
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// `max |A − B|` entrywise; infinite on shape mismatch.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.rows != other.rows || self.cols != other.cols {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// `max |A − Aᵀ|`; infinite for non-square input.
    pub fn asymmetry(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i + 1..n {
                worst = worst.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        worst
    }

    /// `(A + Aᵀ)/2`.
    pub fn symmetrized(&self) -> Self {
        let n = self.rows;
        let mut out = self.clone();
        for i in 0..n {
            for j in i + 1..n {
                let m = 0.5 * (self[(i, j)] + self[(j, i)]);
                out[(i, j)] = m;
                out[(j, i)] = m;
            }
        }
        out
    }

    pub fn check_symmetric(&self, tol: f64) -> Result<()> {
        let asym = self.asymmetry();
        if asym > tol * self.max_abs().max(1.0) {
            return Err(Error::NotSymmetric { asymmetry: asym });
        }
        Ok(())
    }

    /// `max |P² − P|`.
    pub fn idempotency_defect(&self) -> f64 {
        match self.matmul(self) {
            Ok(sq) => sq.max_abs_diff(self),
            Err(_) => f64::INFINITY,
        }
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for x in self.row(i) {
                write!(f, "{x:>10.6} ")?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

pub fn normalized(v: &[f64]) -> Option<Vec<f64>> {
    let n = norm(v);
    (n > 0.0).then(|| v.iter().map(|x| x / n).collect())
}

/// Kronecker product of vectors.
pub fn kron_vec(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter()
        .flat_map(|&x| b.iter().map(move |&y| x * y))
        .collect()
}

/// Kronecker product: `(a⊗b)[i·rb + k, j·cb + l] = a[i,j]·b[k,l]`.
pub fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    let (rb, cb) = (b.rows, b.cols);
    let mut out = Matrix::zeros(a.rows * rb, a.cols * cb);
    for i in 0..a.rows {
        for j in 0..a.cols {
            let x = a[(i, j)];
            if x == 0.0 {
                continue;
            }
            for k in 0..rb {
                for l in 0..cb {
                    out[(i * rb + k, j * cb + l)] = x * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Spectrum of a real symmetric matrix.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Column `k` is the unit eigenvector for `eigenvalues[k]`.
    pub eigenvectors: Matrix,
}

impl EigenDecomposition {
    pub fn eigenvector(&self, k: usize) -> Vec<f64> {
        self.eigenvectors.column(k)
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    /// `V diag(λ) Vᵀ`.
    pub fn reconstruct(&self) -> Matrix {
        let n = self.eigenvalues.len();
        let v = &self.eigenvectors;
        let mut out = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] = (0..n)
                    .map(|k| v[(i, k)] * self.eigenvalues[k] * v[(j, k)])
                    .sum();
            }
        }
        out
    }
}

fn off_diagonal_norm(a: &Matrix) -> f64 {
    let n = a.rows;
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)] * a[(i, j)];
            }
        }
    }
    s.sqrt()
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
///
/// Sweeps over all (p, q) pairs in row order until the off-diagonal Frobenius
/// norm drops below `1e-12·max(1, ‖A‖_F)`. Output is sorted ascending, ties
/// kept in diagonal order, so the result is a deterministic function of `a`.
pub fn eig_sym(a: &Matrix) -> Result<EigenDecomposition> {
    if !a.is_square() {
        return Err(Error::dims(
            "square matrix",
            format!("{}x{}", a.rows, a.cols),
        ));
    }
    a.check_symmetric(SYMMETRY_TOL)?;
    let n = a.rows;
    let mut m = a.symmetrized();
    let mut v = Matrix::identity(n);
    let threshold = JACOBI_TOL * a.frobenius_norm().max(1.0);

    let mut converged = off_diagonal_norm(&m) < threshold;
    let mut sweeps = 0;
    while !converged && sweeps < JACOBI_MAX_SWEEPS {
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let app = m[(p, p)];
                let aqq = m[(q, q)];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                m[(p, q)] = 0.0;
                m[(q, p)] = 0.0;

                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
        sweeps += 1;
        converged = off_diagonal_norm(&m) < threshold;
    }
    if !converged {
        return Err(Error::NoConvergence {
            sweeps,
            off_norm: off_diagonal_norm(&m),
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].total_cmp(&m[(j, j)]).then(i.cmp(&j)));
    let eigenvalues = order.iter().map(|&i| m[(i, i)]).collect();
    let mut eigenvectors = Matrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        for k in 0..n {
            eigenvectors[(k, dst)] = v[(k, src)];
        }
    }
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

pub fn min_eig(a: &Matrix) -> Result<f64> {
    Ok(eig_sym(a)?.min())
}

/// Number of eigenvalues with `|λ| > tol`.
pub fn rank(a: &Matrix, tol: f64) -> Result<usize> {
    if tol <= 0.0 {
        return Err(Error::invalid("rank tolerance must be positive"));
    }
    Ok(eig_sym(a)?
        .eigenvalues
        .iter()
        .filter(|x| x.abs() > tol)
        .count())
}

/// Orthonormal basis of `span(vectors)` by modified Gram–Schmidt with one
/// reorthogonalization pass. Vectors whose residual is below
/// [`SPAN_TOL`] times their norm are dropped as dependent.
pub fn orthonormal_basis(vectors: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let len = match vectors.first() {
        Some(v) => v.len(),
        None => return Err(Error::invalid("span of an empty vector list")),
    };
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for (idx, v) in vectors.iter().enumerate() {
        if v.len() != len {
            return Err(Error::dims(len, v.len()));
        }
        let n0 = norm(v);
        if n0 == 0.0 {
            return Err(Error::ZeroVector(idx));
        }
        let mut w = v.clone();
        for _ in 0..2 {
            for q in &basis {
                let c = dot(q, &w);
                for (wi, qi) in w.iter_mut().zip(q) {
                    *wi -= c * qi;
                }
            }
        }
        let n1 = norm(&w);
        if n1 > SPAN_TOL * n0 {
            basis.push(w.into_iter().map(|x| x / n1).collect());
        }
    }
    Ok(basis)
}

/// Orthogonal projector onto `span(vectors)`.
pub fn projector_onto_span(vectors: &[Vec<f64>]) -> Result<Matrix> {
    let basis = orthonormal_basis(vectors)?;
    let n = vectors[0].len();
    let mut p = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let s: f64 = basis.iter().map(|q| q[i] * q[j]).sum();
            p[(i, j)] = s;
            p[(j, i)] = s;
        }
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(n: usize, k: usize) -> Vec<f64> {
        let mut v = vec![0.0; n];
        v[k] = 1.0;
        v
    }

    #[test]
    fn kron_identities() {
        assert_eq!(
            kron(&Matrix::identity(2), &Matrix::identity(3)),
            Matrix::identity(6)
        );
        let k = kron(&Matrix::outer(&e(2, 0)), &Matrix::outer(&e(2, 1)));
        let mut expected = Matrix::zeros(4, 4);
        expected[(1, 1)] = 1.0;
        assert_eq!(k, expected);
        let big = kron(&Matrix::identity(4), &Matrix::identity(3));
        assert_eq!((big.rows(), big.cols()), (12, 12));
    }

    #[test]
    fn kron_vec_matches_matrix_kron() {
        let a = [0.3, -1.0];
        let b = [2.0, 0.5, 1.0];
        let v = kron_vec(&a, &b);
        let m = kron(&Matrix::outer(&a), &Matrix::outer(&b));
        assert_eq!(Matrix::outer(&v), m);
    }

    #[test]
    fn eig_small_cases() {
        let d = eig_sym(&Matrix::identity(3)).unwrap();
        assert_eq!(d.eigenvalues, vec![1.0, 1.0, 1.0]);

        let d = eig_sym(&Matrix::from_diag(&[3.0, 1.0, 2.0])).unwrap();
        assert_eq!(d.eigenvalues, vec![1.0, 2.0, 3.0]);
        assert_eq!(d.eigenvector(0), e(3, 1));

        let swap = Matrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let d = eig_sym(&swap).unwrap();
        assert!((d.eigenvalues[0] + 1.0).abs() < 1e-15);
        assert!((d.eigenvalues[1] - 1.0).abs() < 1e-15);
        assert!(d.reconstruct().max_abs_diff(&swap) < 1e-15);
    }

    #[test]
    fn eig_rejects_asymmetric() {
        let m = Matrix::from_rows(&[vec![0.0, 1.0], vec![0.5, 0.0]]).unwrap();
        assert!(matches!(eig_sym(&m), Err(Error::NotSymmetric { .. })));
        assert!(eig_sym(&Matrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn empty_matrix_has_empty_spectrum() {
        let d = eig_sym(&Matrix::zeros(0, 0)).unwrap();
        assert!(d.eigenvalues.is_empty());
    }

    #[test]
    fn min_eig_and_rank() {
        assert!(
            (min_eig(&Matrix::identity(9).scale(1.0 / 9.0)).unwrap() - 1.0 / 9.0).abs() < 1e-15
        );
        let p = projector_onto_span(&[e(4, 0), e(4, 2)]).unwrap();
        assert_eq!(min_eig(&p).unwrap(), 0.0);
        assert_eq!(rank(&Matrix::identity(4), DEFAULT_RANK_TOL).unwrap(), 4);
        assert_eq!(rank(&Matrix::zeros(5, 5), DEFAULT_RANK_TOL).unwrap(), 0);
        assert!(rank(&Matrix::identity(2), 0.0).is_err());
    }

    #[test]
    fn projector_cases() {
        let p = projector_onto_span(&[e(3, 0)]).unwrap();
        assert_eq!(p, Matrix::outer(&e(3, 0)));

        let p = projector_onto_span(&[e(3, 0), vec![1.0, 1.0, 0.0]]).unwrap();
        let expected = Matrix::from_diag(&[1.0, 1.0, 0.0]);
        assert!(p.max_abs_diff(&expected) < 1e-15);

        // dependent vector is pruned
        let p = projector_onto_span(&[e(3, 0), e(3, 1), vec![2.0, -3.0, 0.0]]).unwrap();
        assert!((p.trace() - 2.0).abs() < 1e-12);
        assert_eq!(p.asymmetry(), 0.0);
    }

    #[test]
    fn projector_rejects_bad_input() {
        assert!(matches!(
            projector_onto_span(&[e(3, 0), vec![0.0; 3]]),
            Err(Error::ZeroVector(1))
        ));
        assert!(projector_onto_span(&[]).is_err());
        assert!(projector_onto_span(&[e(3, 0), e(2, 0)]).is_err());
    }

    #[test]
    fn matmul_shape_mismatch() {
        assert!(Matrix::zeros(2, 3).matmul(&Matrix::zeros(2, 3)).is_err());
        assert!(Matrix::zeros(2, 2).add(&Matrix::zeros(3, 3)).is_err());
    }
}
