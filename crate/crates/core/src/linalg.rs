//! Small dense linear-algebra helpers shared by the state, compiler and
//! physics modules.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::{CMatrix, CVector};

/// Entries with modulus below this are treated as zero when fixing gauges.
const GAUGE_EPS: f64 = 1e-13;

/// Thin SVD with singular values sorted in descending order.
///
/// `u` is `rows × k` and `v_t` is `k × cols` with `k = min(rows, cols)`. The
/// phase of every left singular vector is fixed so that its first entry with
/// modulus above `1e-13` is real and positive; the matching row of `v_t`
/// carries the compensating phase, so `u · diag(sigma) · v_t` is unchanged.
#[derive(Clone, Debug)]
pub struct Svd {
    pub u: CMatrix,
    pub sigma: Vec<f64>,
    pub v_t: CMatrix,
}

impl Svd {
    pub fn new(m: &CMatrix) -> Svd {
        let (rows, cols) = m.shape();
        let k = rows.min(cols);
        if k == 0 {
            return Svd { u: CMatrix::zeros(rows, 0), sigma: Vec::new(), v_t: CMatrix::zeros(0, cols) };
        }
        let svd = to_faer(m).thin_svd().expect("SVD of a finite matrix converges");
        let (u_raw, v_raw) = (svd.U(), svd.V());
        let values: Vec<f64> = (0..k).map(|j| svd.S().column_vector()[j].re).collect();
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));

        let mut u = CMatrix::zeros(rows, k);
        let mut v_t = CMatrix::zeros(k, cols);
        let mut sigma = Vec::with_capacity(k);
        for (dst, &src) in order.iter().enumerate() {
            let mut col = CVector::from_fn(rows, |r, _| u_raw[(r, src)]);
            let mut row = nalgebra::RowDVector::from_fn(cols, |_, c| v_raw[(c, src)].conj());
            if let Some(first) = col.iter().find(|z| z.norm() > GAUGE_EPS).copied() {
                let phase = first / first.norm();
                col /= phase;
                row *= phase;
            }
            u.set_column(dst, &col);
            v_t.set_row(dst, &row);
            sigma.push(values[src]);
        }
        Svd { u, sigma, v_t }
    }

    /// Number of singular values strictly above `rel_tol · σ_max`.
    pub fn rank(&self, rel_tol: f64) -> usize {
        let max = self.sigma.first().copied().unwrap_or(0.0);
        if max == 0.0 {
            return 0;
        }
        self.sigma.iter().filter(|&&s| s > rel_tol * max).count()
    }
}

/// Extends a matrix with orthonormal columns to `target_cols` columns.
///
/// Candidates are the canonical basis vectors in index order; each is
/// orthogonalised twice against the columns collected so far and accepted
/// when its residual norm is at least `0.5/√rows`. Some canonical vector always
/// clears that bar while the span is incomplete, so the result is
/// deterministic and well conditioned.
pub fn complete_orthonormal(m: &CMatrix, target_cols: usize) -> Result<CMatrix> {
    let (rows, cols) = m.shape();
    if target_cols > rows {
        return Err(Error::ShapeMismatch(format!(
            "cannot complete {rows}×{cols} to {target_cols} orthonormal columns"
        )));
    }
    if target_cols <= cols {
        return Ok(m.columns(0, target_cols).into_owned());
    }
    let threshold = 0.5 / (rows as f64).sqrt();
    let mut basis: Vec<CVector> = (0..cols).map(|j| m.column(j).into_owned()).collect();
    for e in 0..rows {
        if basis.len() == target_cols {
            break;
        }
        let mut v = CVector::zeros(rows);
        v[e] = C64::new(1.0, 0.0);
        for _ in 0..2 {
            for b in &basis {
                let overlap = b.dotc(&v);
                v -= b * overlap;
            }
        }
        let norm = v.norm();
        if norm >= threshold {
            basis.push(v / C64::new(norm, 0.0));
        }
    }
    debug_assert_eq!(basis.len(), target_cols);
    Ok(CMatrix::from_columns(&basis))
}

/// Kronecker product `a ⊗ b` (the first factor is the slow index).
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Maximum elementwise modulus.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `max |A − B|` over all entries; shapes must agree.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "max_abs_diff shape mismatch");
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// `max |W†W − I|`.
pub fn isometry_residual(w: &CMatrix) -> f64 {
    let gram = w.adjoint() * w;
    max_abs_diff(&gram, &CMatrix::identity(w.ncols(), w.ncols()))
}

/// `max |U†U − I|` for a square matrix, `∞` otherwise.
pub fn unitarity_residual(u: &CMatrix) -> f64 {
    if !u.is_square() {
        return f64::INFINITY;
    }
    isometry_residual(u)
}

/// `max |H − H†|` for a square matrix, `∞` otherwise.
pub fn hermiticity_residual(h: &CMatrix) -> f64 {
    if !h.is_square() {
        return f64::INFINITY;
    }
    max_abs_diff(h, &h.adjoint())
}

/// Eigen-decomposition of a Hermitian matrix: `(eigenvalues, eigenvectors)`.
pub fn hermitian_eigen(h: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = h.nrows();
    let eig = to_faer(h).self_adjoint_eigen(faer::Side::Lower).expect("Hermitian eigensolver converges");
    let values = (0..n).map(|j| eig.S().column_vector()[j].re).collect();
    let vectors = CMatrix::from_fn(n, n, |r, c| eig.U()[(r, c)]);
    (values, vectors)
}

fn to_faer(m: &CMatrix) -> faer::Mat<C64> {
    faer::Mat::from_fn(m.nrows(), m.ncols(), |r, c| m[(r, c)])
}

/// `exp(i·s·H)` for Hermitian `H`, through its eigen-decomposition.
pub fn exp_i_hermitian(h: &CMatrix, s: f64) -> Result<CMatrix> {
    let residual = hermiticity_residual(h);
    if residual > 1e-10 {
        return Err(Error::NotHermitian(residual));
    }
    let (values, vectors) = hermitian_eigen(h);
    let phases = DVector::from_iterator(values.len(), values.iter().map(|&l| C64::from_polar(1.0, s * l)));
    let mut scaled = vectors.clone();
    for (j, mut col) in scaled.column_iter_mut().enumerate() {
        col *= phases[j];
    }
    Ok(scaled * vectors.adjoint())
}

/// Single-qubit Pauli matrices.
pub fn pauli_x() -> CMatrix {
    real_matrix(2, 2, &[0.0, 1.0, 1.0, 0.0])
}

pub fn pauli_y() -> CMatrix {
    let i = C64::new(0.0, 1.0);
    CMatrix::from_row_slice(2, 2, &[C64::new(0.0, 0.0), -i, i, C64::new(0.0, 0.0)])
}

pub fn pauli_z() -> CMatrix {
    real_matrix(2, 2, &[1.0, 0.0, 0.0, -1.0])
}

/// Builds a complex matrix from real row-major entries.
pub fn real_matrix(rows: usize, cols: usize, entries: &[f64]) -> CMatrix {
    CMatrix::from_row_slice(rows, cols, &entries.iter().map(|&x| C64::new(x, 0.0)).collect::<Vec<_>>())
}

/// Canonical basis vector `e_index` of length `dim`.
pub fn basis_vector(dim: usize, index: usize) -> CVector {
    let mut v = CVector::zeros(dim);
    v[index] = C64::new(1.0, 0.0);
    v
}

/// Leading eigenvector of a Hermitian positive semidefinite matrix with the
/// first significant entry made real-positive.
pub fn principal_vector(rho: &CMatrix) -> CVector {
    let (values, vectors) = hermitian_eigen(rho);
    let best = values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let mut v = vectors.column(best).into_owned();
    if let Some(first) = v.iter().find(|z| z.norm() > GAUGE_EPS).copied() {
        v /= first / first.norm();
    }
    v
}

/// Reshapes a flat row-major vector into a `rows × cols` matrix.
pub fn row_major(rows: usize, cols: usize, flat: &CVector) -> CMatrix {
    assert_eq!(rows * cols, flat.len());
    DMatrix::from_fn(rows, cols, |r, c| flat[r * cols + c])
}

/// Flattens a matrix row-major.
pub fn flatten_row_major(m: &CMatrix) -> CVector {
    let (rows, cols) = m.shape();
    DVector::from_fn(rows * cols, |k, _| m[(k / cols, k % cols)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_matrix, seeded};

    #[test]
    fn svd_reconstructs_and_is_sorted() {
        let mut rng = seeded(3);
        for &(r, c) in &[(4, 2), (2, 5), (6, 6), (1, 3)] {
            let m = random_matrix(&mut rng, r, c);
            let svd = Svd::new(&m);
            assert!(svd.sigma.windows(2).all(|w| w[0] >= w[1]));
            let s = CMatrix::from_diagonal(&CVector::from_iterator(
                svd.sigma.len(),
                svd.sigma.iter().map(|&x| C64::new(x, 0.0)),
            ));
            let back = &svd.u * s * &svd.v_t;
            assert!(max_abs_diff(&back, &m) < 1e-12);
            for col in svd.u.column_iter() {
                let first = col.iter().find(|z| z.norm() > GAUGE_EPS).unwrap();
                assert!(first.im.abs() < 1e-14 && first.re > 0.0);
            }
        }
    }

    #[test]
    fn svd_of_wide_rank_one_matrices() {
        // Outer products of random vectors: one singular value, exact recomposition.
        let mut rng = crate::random::seeded(7);
        for cols in [8, 32, 64] {
            let a = crate::random::random_matrix(&mut rng, 4, 1);
            let b = crate::random::random_matrix(&mut rng, 1, cols);
            let m = &a * &b;
            let svd = Svd::new(&m);
            let sigma = CMatrix::from_diagonal(&CVector::from_iterator(4, svd.sigma.iter().map(|&x| C64::new(x, 0.0))));
            let rebuilt = &svd.u * sigma * &svd.v_t;
            assert!(max_abs_diff(&rebuilt, &m) < 1e-13 * m.norm());
            assert!((svd.sigma[0] - m.norm()).abs() < 1e-13 * m.norm());
            assert_eq!(svd.rank(1e-10), 1);
        }
    }

    #[test]
    fn completion_is_orthonormal_and_keeps_prefix() {
        let mut rng = seeded(5);
        let q = random_matrix(&mut rng, 6, 2).qr().q();
        let full = complete_orthonormal(&q, 5).unwrap();
        assert_eq!(full.shape(), (6, 5));
        assert!(isometry_residual(&full) < 1e-14);
        assert!(max_abs_diff(&full.columns(0, 2).into_owned(), &q) == 0.0);
        assert!(complete_orthonormal(&q, 7).is_err());
    }

    #[test]
    fn exp_of_pauli_x() {
        let u = exp_i_hermitian(&pauli_x(), std::f64::consts::FRAC_PI_2).unwrap();
        let expected = &pauli_x() * C64::new(0.0, 1.0);
        assert!(max_abs_diff(&u, &expected) < 1e-15);
        assert!(exp_i_hermitian(&pauli_y().map(|z| z * C64::new(0.0, 1.0)), 1.0).is_err());
    }
}
