//! Open-boundary matrix-product states.
//!
//! Site `k` carries one matrix `A^i_[k]` per physical index `i`, of shape
//! `r_k × r_{k-1}`, so that the amplitude of `|i_1 … i_n⟩` is
//!
//! ```text
//! ⟨φ_F| A^{i_n}_[n] ⋯ A^{i_1}_[1] |φ_I⟩
//! ```
//!
//! The maps are arbitrary; contraction normalizes and reports the raw norm.

use crate::error::{Error, Result};
use crate::linalg::{flatten_row_major, row_major, Svd};
use crate::state::PureState;
use crate::{CMatrix, CVector, C64};

/// Default relative truncation threshold for [`mps_from_dense`].
pub const DEFAULT_TOL: f64 = 1e-12;

/// Bond dimensions `r_0 … r_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BondProfile {
    pub dims: Vec<usize>,
}

impl BondProfile {
    pub fn max(&self) -> usize {
        self.dims.iter().copied().max().unwrap_or(1)
    }

    /// Internal bonds `r_1 … r_{n-1}`.
    pub fn internal(&self) -> &[usize] {
        let n = self.dims.len();
        if n <= 2 {
            &[]
        } else {
            &self.dims[1..n - 1]
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MatrixProductState {
    sites: Vec<Vec<CMatrix>>,
    phi_i: CVector,
    phi_f: CVector,
}

impl MatrixProductState {
    /// `sites[k][i]` is `A^i_[k+1]`. All matrices of a site must share a
    /// shape, and adjacent shapes and boundary vectors must chain.
    pub fn new(sites: Vec<Vec<CMatrix>>, phi_i: CVector, phi_f: CVector) -> Result<Self> {
        if sites.is_empty() {
            return Err(Error::InvalidParameter("an MPS needs at least one site".into()));
        }
        let mut left = phi_i.len();
        if left == 0 {
            return Err(Error::BondMismatch { site: 1, detail: "empty phi_I".into() });
        }
        for (k, site) in sites.iter().enumerate() {
            let first = site.first().ok_or_else(|| Error::BondMismatch {
                site: k + 1,
                detail: "no physical index".into(),
            })?;
            let (rows, cols) = first.shape();
            if rows == 0 || site.iter().any(|m| m.shape() != (rows, cols)) {
                return Err(Error::BondMismatch {
                    site: k + 1,
                    detail: "matrices of one site differ in shape".into(),
                });
            }
            if cols != left {
                return Err(Error::BondMismatch {
                    site: k + 1,
                    detail: format!("expects left bond {cols}, previous bond is {left}"),
                });
            }
            left = rows;
        }
        if phi_f.len() != left {
            return Err(Error::BondMismatch {
                site: sites.len(),
                detail: format!("phi_F has length {}, last bond is {left}", phi_f.len()),
            });
        }
        Ok(MatrixProductState { sites, phi_i, phi_f })
    }

    pub fn n_sites(&self) -> usize {
        self.sites.len()
    }

    pub fn local_dims(&self) -> Vec<usize> {
        self.sites.iter().map(Vec::len).collect()
    }

    pub fn sites(&self) -> &[Vec<CMatrix>] {
        &self.sites
    }

    /// `A^i_[k]` with 1-based `k`.
    pub fn tensor(&self, k: usize, i: usize) -> &CMatrix {
        &self.sites[k - 1][i]
    }

    pub fn phi_i(&self) -> &CVector {
        &self.phi_i
    }

    pub fn phi_f(&self) -> &CVector {
        &self.phi_f
    }

    pub fn bond_profile(&self) -> BondProfile {
        let mut dims = vec![self.phi_i.len()];
        dims.extend(self.sites.iter().map(|s| s[0].nrows()));
        BondProfile { dims }
    }

    /// Unnormalized amplitudes in register order.
    pub fn contract(&self) -> CVector {
        // Columns are partial products A^{i_k}…A^{i_1}|φ_I⟩, indexed by the
        // digits emitted so far with site 1 slowest.
        let mut partial = CMatrix::from_column_slice(self.phi_i.len(), 1, self.phi_i.as_slice());
        for site in &self.sites {
            let d = site.len();
            let mut next = CMatrix::zeros(site[0].nrows(), partial.ncols() * d);
            for (i, a) in site.iter().enumerate() {
                let prod = a * &partial;
                for c in 0..partial.ncols() {
                    next.set_column(c * d + i, &prod.column(c));
                }
            }
            partial = next;
        }
        (self.phi_f.adjoint() * partial).transpose()
    }

    /// Replaces `A_[k]` by `X·A_[k]` and `A_[k+1]` by `A_[k+1]·X⁻¹` on the
    /// internal bond `k` (1-based), leaving the state unchanged.
    pub fn insert_gauge(&mut self, bond: usize, x: &CMatrix) -> Result<()> {
        let n = self.n_sites();
        if bond == 0 || bond >= n {
            return Err(Error::CutOutOfRange { cut: bond, n });
        }
        let r = self.sites[bond - 1][0].nrows();
        if x.shape() != (r, r) {
            return Err(Error::ShapeMismatch(format!("gauge {:?} on bond of dimension {r}", x.shape())));
        }
        let inv = x
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::InvalidParameter("gauge matrix is singular".into()))?;
        for a in &mut self.sites[bond - 1] {
            *a = x * &*a;
        }
        for a in &mut self.sites[bond] {
            *a = &*a * &inv;
        }
        Ok(())
    }
}

/// Contracts the MPS into a normalized dense state and returns the norm of
/// the raw contraction.
pub fn mps_to_dense(mps: &MatrixProductState) -> Result<(PureState, f64)> {
    PureState::from_unnormalized(mps.local_dims(), mps.contract())
}

/// Left-to-right SVD sweep.
///
/// At each cut, singular values at or below `tol · σ_max` are discarded
/// (at least one is always kept). The resulting site tensors satisfy
/// `Σ_i A^i A^{i†} = I`, `φ_I = (1)`, and the final one-dimensional remainder
/// is absorbed into `φ_F`.
pub fn mps_from_dense(state: &PureState, tol: f64) -> Result<MatrixProductState> {
    if !(tol >= 0.0 && tol.is_finite()) {
        return Err(Error::InvalidTolerance(tol));
    }
    let dims = state.dims().to_vec();
    let mut remainder = CMatrix::from_row_slice(1, state.dim(), state.amplitudes().as_slice());
    if remainder.iter().all(|z| *z == C64::new(0.0, 0.0)) {
        return Err(Error::ZeroNorm);
    }
    let mut sites = Vec::with_capacity(dims.len());
    for &d in &dims {
        let (r, cols) = remainder.shape();
        let rest = cols / d;
        // Rows (α·d + i), columns the remaining sites.
        let reshaped = row_major(r * d, rest, &flatten_row_major(&remainder));
        let svd = Svd::new(&reshaped);
        let keep = svd.rank(tol).max(1);
        let site = (0..d)
            .map(|i| CMatrix::from_fn(keep, r, |beta, alpha| svd.u[(alpha * d + i, beta)]))
            .collect();
        sites.push(site);
        remainder = CMatrix::from_fn(keep, rest, |beta, c| svd.v_t[(beta, c)] * svd.sigma[beta]);
    }
    debug_assert_eq!(remainder.shape(), (1, 1));
    let phi_f = CVector::from_element(1, remainder[(0, 0)].conj());
    MatrixProductState::new(sites, CVector::from_element(1, C64::new(1.0, 0.0)), phi_f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs_diff;
    use crate::random::{random_mps, random_qubit_state, seeded};
    use crate::state::{fidelity, schmidt_rank_at_cut};

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn single_site_identity_contraction() {
        let mps = MatrixProductState::new(
            vec![vec![CMatrix::from_element(1, 1, c(1.0)), CMatrix::from_element(1, 1, c(0.0))]],
            CVector::from_element(1, c(1.0)),
            CVector::from_element(1, c(1.0)),
        )
        .unwrap();
        let (s, norm) = mps_to_dense(&mps).unwrap();
        assert_eq!(norm, 1.0);
        assert_eq!(s, PureState::zeros(1));
    }

    #[test]
    fn product_state_has_unit_bonds() {
        let mps = mps_from_dense(&PureState::zeros(5), DEFAULT_TOL).unwrap();
        assert_eq!(mps.bond_profile().dims, vec![1; 6]);
    }

    #[test]
    fn random_six_qubits_roundtrip_exactly() {
        let mut rng = seeded(11);
        let psi = random_qubit_state(&mut rng, 6);
        let mps = mps_from_dense(&psi, 0.0).unwrap();
        assert_eq!(mps.bond_profile().dims, vec![1, 2, 4, 8, 4, 2, 1]);
        let (back, _) = mps_to_dense(&mps).unwrap();
        assert!(fidelity(&psi, &back).unwrap() > 1.0 - 1e-10);
        assert!(max_abs_diff(
            &CMatrix::from_column_slice(64, 1, back.amplitudes().as_slice()),
            &CMatrix::from_column_slice(64, 1, psi.amplitudes().as_slice())
        ) < 1e-12);
    }

    #[test]
    fn sweep_tensors_are_left_isometric() {
        let mut rng = seeded(12);
        let psi = random_qubit_state(&mut rng, 5);
        let mps = mps_from_dense(&psi, 0.0).unwrap();
        for site in mps.sites() {
            let r = site[0].nrows();
            let sum = site.iter().fold(CMatrix::zeros(r, r), |acc, a| acc + a * a.adjoint());
            assert!(max_abs_diff(&sum, &CMatrix::identity(r, r)) < 1e-12);
        }
    }

    #[test]
    fn bonds_match_dense_schmidt_ranks() {
        let mut rng = seeded(13);
        let random = random_mps(&mut rng, 7, 2, 3);
        let (psi, _) = mps_to_dense(&random).unwrap();
        let mps = mps_from_dense(&psi, DEFAULT_TOL).unwrap();
        let bonds = mps.bond_profile();
        for cut in 1..7 {
            assert_eq!(bonds.dims[cut], schmidt_rank_at_cut(&psi, cut, DEFAULT_TOL).unwrap());
        }
    }

    #[test]
    fn inconsistent_shapes_are_rejected() {
        let one = CVector::from_element(1, c(1.0));
        let bad = MatrixProductState::new(
            vec![vec![CMatrix::zeros(2, 1); 2], vec![CMatrix::zeros(1, 3); 2]],
            one.clone(),
            one.clone(),
        );
        assert!(matches!(bad, Err(Error::BondMismatch { site: 2, .. })));
        let bad_f = MatrixProductState::new(vec![vec![CMatrix::zeros(2, 1); 2]], one.clone(), one);
        assert!(matches!(bad_f, Err(Error::BondMismatch { .. })));
    }

    #[test]
    fn zero_state_and_bad_tolerance() {
        let zero = MatrixProductState::new(
            vec![vec![CMatrix::zeros(1, 1); 2]],
            CVector::from_element(1, c(1.0)),
            CVector::from_element(1, c(1.0)),
        )
        .unwrap();
        assert!(matches!(mps_to_dense(&zero), Err(Error::ZeroNorm)));
        assert!(matches!(mps_from_dense(&PureState::zeros(2), -1e-3), Err(Error::InvalidTolerance(_))));
    }

    #[test]
    fn gauge_insertion_preserves_state() {
        let mut rng = seeded(14);
        let mut mps = random_mps(&mut rng, 4, 2, 2);
        let before = mps.contract();
        let x = crate::random::random_matrix(&mut rng, 2, 2);
        mps.insert_gauge(2, &x).unwrap();
        let after = mps.contract();
        assert!((before - after).norm() < 1e-10 * mps.contract().norm().max(1.0));
    }
}
