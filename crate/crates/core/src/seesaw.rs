//! Alternating optimization of `⟨α⊗β|P|α⊗β⟩` over real unit vectors.
//!
//! With one factor fixed the objective is a quadratic form in the other, so
//! each half-step is an exact eigenvector solve on a `d×d` compressed matrix.
//! The objective is monotone along the iteration and every restart ends in a
//! local optimum.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::catalog::ProductVector;
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};

pub const MAX_ITERATIONS: usize = 500;
pub const CONVERGENCE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Goal {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone)]
pub(crate) struct Run {
    pub value: f64,
    pub vector: ProductVector,
}

/// `M[i][j] = Σₖₗ P[(i,k),(j,l)] βₖ βₗ`.
pub(crate) fn compress_b(p: &Matrix, (d1, d2): (usize, usize), beta: &[f64]) -> Matrix {
    let mut m = Matrix::zeros(d1, d1);
    for i in 0..d1 {
        for j in i..d1 {
            let mut s = 0.0;
            for k in 0..d2 {
                for l in 0..d2 {
                    s += p[(i * d2 + k, j * d2 + l)] * beta[k] * beta[l];
                }
            }
            m[(i, j)] = s;
            m[(j, i)] = s;
        }
    }
    m
}

/// `N[k][l] = Σᵢⱼ P[(i,k),(j,l)] αᵢ αⱼ`.
pub(crate) fn compress_a(p: &Matrix, (d1, d2): (usize, usize), alpha: &[f64]) -> Matrix {
    let mut m = Matrix::zeros(d2, d2);
    for k in 0..d2 {
        for l in k..d2 {
            let mut s = 0.0;
            for i in 0..d1 {
                for j in 0..d1 {
                    s += p[(i * d2 + k, j * d2 + l)] * alpha[i] * alpha[j];
                }
            }
            m[(k, l)] = s;
            m[(l, k)] = s;
        }
    }
    m
}

fn extremal(m: &Matrix, goal: Goal) -> Result<(f64, Vec<f64>)> {
    let eig = linalg::eig_sym(m)?;
    let k = match goal {
        Goal::Minimize => 0,
        Goal::Maximize => eig.eigenvalues.len() - 1,
    };
    Ok((eig.eigenvalues[k], eig.eigenvector(k)))
}

pub(crate) fn random_unit(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
        if let Some(u) = linalg::normalized(&v) {
            return u;
        }
    }
}

/// Generator for restart `index`: one ChaCha stream per restart.
pub(crate) fn restart_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

pub(crate) fn run(p: &Matrix, dims: (usize, usize), goal: Goal, start_b: Vec<f64>) -> Result<Run> {
    let mut beta = start_b;
    let mut alpha = vec![0.0; dims.0];
    let mut value = match goal {
        Goal::Minimize => f64::INFINITY,
        Goal::Maximize => f64::NEG_INFINITY,
    };
    let mut iterations = 0;
    while iterations < MAX_ITERATIONS {
        iterations += 1;
        alpha = extremal(&compress_b(p, dims, &beta), goal)?.1;
        let (v, b) = extremal(&compress_a(p, dims, &alpha), goal)?;
        beta = b;
        let delta = (v - value).abs();
        value = v;
        if delta < CONVERGENCE_TOL {
            break;
        }
    }
    let vector = ProductVector::new(alpha, beta)?;
    // report the objective at the returned vector, not the last eigenvalue
    let value = p.quadratic_form(&vector.full())?;
    Ok(Run { value, vector })
}

/// Independent restarts, evaluated in parallel, returned in restart order.
pub(crate) fn multistart(
    p: &Matrix,
    dims: (usize, usize),
    goal: Goal,
    restarts: usize,
    seed: u64,
) -> Result<Vec<Run>> {
    if restarts == 0 {
        return Err(Error::invalid("restarts must be at least 1"));
    }
    let d = dims.0 * dims.1;
    if p.rows() != d || p.cols() != d {
        return Err(Error::dims(
            format!("{d}x{d}"),
            format!("{}x{}", p.rows(), p.cols()),
        ));
    }
    (0..restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = restart_rng(seed, r);
            run(p, dims, goal, random_unit(&mut rng, dims.1))
        })
        .collect()
}
