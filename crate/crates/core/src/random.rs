//! Seeded random ensembles used by tests, the acceptance suite and the CLI.
//!
//! All ensembles draw from [`ChaCha8Rng`], so a seed fixes every sample
//! across platforms.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::mps::MatrixProductState;
use crate::state::PureState;
use crate::{CMatrix, CVector, C64};

/// Default seed for reproducible ensembles.
pub const DEFAULT_SEED: u64 = 20_070_101;

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im)
}

/// Matrix with i.i.d. standard complex Gaussian entries.
pub fn random_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// Haar-random unitary (QR of a Ginibre matrix with the phase of `R`'s
/// diagonal divided out).
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> CMatrix {
    let qr = random_matrix(rng, dim, dim).qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..dim {
        let d = r[(j, j)];
        if d.norm() > 0.0 {
            let phase = d / d.norm();
            let mut col = q.column_mut(j);
            col *= phase;
        }
    }
    q
}

/// Uniformly random normalized state on a register with the given local dims.
pub fn random_state<R: Rng + ?Sized>(rng: &mut R, dims: &[usize]) -> PureState {
    let len = dims.iter().product();
    let v = CVector::from_fn(len, |_, _| gaussian(rng));
    PureState::from_unnormalized(dims.to_vec(), v).expect("Gaussian vector is nonzero").0
}

pub fn random_qubit_state<R: Rng + ?Sized>(rng: &mut R, n: usize) -> PureState {
    random_state(rng, &vec![2; n])
}

/// Random open-boundary MPS on `n` sites of local dimension `d` whose bond
/// `k` has dimension `min(max_bond, d^k, d^(n-k))`, with unit boundary
/// vectors. Tensors are Gaussian, so the result is generically unnormalized.
pub fn random_mps<R: Rng + ?Sized>(rng: &mut R, n: usize, d: usize, max_bond: usize) -> MatrixProductState {
    let bonds: Vec<usize> = (0..=n)
        .map(|k| {
            let left = d.checked_pow(k as u32).unwrap_or(usize::MAX);
            let right = d.checked_pow((n - k) as u32).unwrap_or(usize::MAX);
            max_bond.min(left).min(right)
        })
        .collect();
    let sites = (0..n)
        .map(|k| (0..d).map(|_| random_matrix(rng, bonds[k + 1], bonds[k])).collect())
        .collect();
    let one = CVector::from_element(1, C64::new(1.0, 0.0));
    MatrixProductState::new(sites, one.clone(), one).expect("consistent random MPS")
}

/// Random angle in `[0, 2π)`.
pub fn random_angle<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.random::<f64>() * std::f64::consts::TAU
}
