//! Normalized pure states on registers of qudits.

use crate::error::{Error, Result};
use crate::linalg::{row_major, Svd};
use crate::{CMatrix, CVector, C64};

/// Normalization tolerance enforced at construction.
pub const NORM_TOL: f64 = 1e-12;

/// A normalized amplitude vector over an ordered register.
///
/// Site 1 (index 0 here) is the first generated qudit and the slowest-varying
/// amplitude index.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    dims: Vec<usize>,
    amps: CVector,
}

impl PureState {
    /// Validates length and normalization; unnormalized input is rejected.
    pub fn new(dims: Vec<usize>, amps: CVector) -> Result<PureState> {
        check_dims(&dims, amps.len())?;
        let norm = amps.norm();
        if norm == 0.0 {
            return Err(Error::ZeroNorm);
        }
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(PureState { dims, amps })
    }

    /// Qubit register built from a slice of amplitudes.
    pub fn qubits(amps: &[C64]) -> Result<PureState> {
        let n = amps.len().trailing_zeros() as usize;
        if amps.len() != 1 << n || n == 0 {
            return Err(Error::LengthMismatch { expected: 1 << n.max(1), got: amps.len() });
        }
        PureState::new(vec![2; n], CVector::from_column_slice(amps))
    }

    /// Normalizes `amps` and returns the state together with the original
    /// norm. A zero vector is an error.
    pub fn from_unnormalized(dims: Vec<usize>, amps: CVector) -> Result<(PureState, f64)> {
        check_dims(&dims, amps.len())?;
        let norm = amps.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::ZeroNorm);
        }
        let amps = amps / C64::new(norm, 0.0);
        Ok((PureState { dims, amps }, norm))
    }

    /// Computational basis state with the given per-site digits.
    pub fn basis(dims: Vec<usize>, digits: &[usize]) -> Result<PureState> {
        let len = check_dims(&dims, dims.iter().product())?;
        let index = digits_to_index(&dims, digits)?;
        let mut amps = CVector::zeros(len);
        amps[index] = C64::new(1.0, 0.0);
        Ok(PureState { dims, amps })
    }

    /// `|0…0⟩` on `n` qubits.
    pub fn zeros(n: usize) -> PureState {
        PureState::basis(vec![2; n], &vec![0; n]).expect("valid qubit register")
    }

    /// Tensor product of single-site states, site 1 first.
    pub fn product(factors: &[CVector]) -> Result<PureState> {
        if factors.is_empty() {
            return Err(Error::InvalidParameter("empty product".into()));
        }
        let dims: Vec<usize> = factors.iter().map(|f| f.len()).collect();
        let mut amps = CVector::from_element(1, C64::new(1.0, 0.0));
        for f in factors {
            amps = amps.kronecker(f);
        }
        PureState::from_unnormalized(dims, amps).map(|(s, _)| s)
    }

    pub fn n_sites(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amps
    }

    pub fn into_amplitudes(self) -> CVector {
        self.amps
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    /// Amplitude of the basis state with the given per-site digits.
    pub fn amplitude(&self, digits: &[usize]) -> Result<C64> {
        Ok(self.amps[digits_to_index(&self.dims, digits)?])
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &PureState) -> Result<C64> {
        if self.dims != other.dims {
            return Err(Error::ShapeMismatch(format!(
                "register dims {:?} vs {:?}",
                self.dims, other.dims
            )));
        }
        Ok(self.amps.dotc(&other.amps))
    }

    /// Amplitudes reshaped as a `(first cut sites) × (rest)` matrix.
    pub fn cut_matrix(&self, cut: usize) -> Result<CMatrix> {
        let n = self.n_sites();
        if cut == 0 || cut >= n {
            return Err(Error::CutOutOfRange { cut, n });
        }
        let rows: usize = self.dims[..cut].iter().product();
        Ok(row_major(rows, self.dim() / rows, &self.amps))
    }

    /// Schmidt coefficients across `cut`, descending.
    pub fn schmidt_values(&self, cut: usize) -> Result<Vec<f64>> {
        Ok(Svd::new(&self.cut_matrix(cut)?).sigma)
    }

    /// Bond profile `r_0 … r_n` of Schmidt ranks with `r_0 = r_n = 1`.
    pub fn schmidt_profile(&self, tol: f64) -> Result<Vec<usize>> {
        let n = self.n_sites();
        let mut out = vec![1];
        for cut in 1..n {
            out.push(schmidt_rank_at_cut(self, cut, tol)?);
        }
        out.push(1);
        Ok(out)
    }

    /// Expectation value of a product of single-site operators. Sites not
    /// listed carry the identity.
    pub fn expectation(&self, ops: &[(usize, CMatrix)]) -> Result<C64> {
        let mut v = self.amps.clone();
        for (site, op) in ops {
            v = apply_local(&self.dims, &v, *site, op)?;
        }
        Ok(self.amps.dotc(&v))
    }

    /// Applies a single-site operator (not necessarily unitary) and returns
    /// the unnormalized amplitudes.
    pub fn apply_local(&self, site: usize, op: &CMatrix) -> Result<CVector> {
        apply_local(&self.dims, &self.amps, site, op)
    }

    /// Multiplies every amplitude by a unit-modulus phase.
    pub fn with_phase(&self, phase: C64) -> PureState {
        PureState { dims: self.dims.clone(), amps: &self.amps * phase }
    }
}

fn check_dims(dims: &[usize], len: usize) -> Result<usize> {
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::InvalidParameter(format!("invalid register dims {dims:?}")));
    }
    let expected: usize = dims.iter().product();
    if expected != len {
        return Err(Error::LengthMismatch { expected, got: len });
    }
    Ok(expected)
}

fn digits_to_index(dims: &[usize], digits: &[usize]) -> Result<usize> {
    if digits.len() != dims.len() || digits.iter().zip(dims).any(|(&x, &d)| x >= d) {
        return Err(Error::ShapeMismatch(format!("digits {digits:?} for dims {dims:?}")));
    }
    Ok(digits.iter().zip(dims).fold(0, |acc, (&x, &d)| acc * d + x))
}

/// Applies `op` to one site of a flat register vector.
pub(crate) fn apply_local(dims: &[usize], amps: &CVector, site: usize, op: &CMatrix) -> Result<CVector> {
    let d = *dims
        .get(site)
        .ok_or_else(|| Error::ShapeMismatch(format!("site {site} outside register of {}", dims.len())))?;
    if op.shape() != (d, d) {
        return Err(Error::ShapeMismatch(format!("operator {:?} on site of dim {d}", op.shape())));
    }
    let inner: usize = dims[site + 1..].iter().product();
    let outer = amps.len() / (d * inner);
    let mut out = CVector::zeros(amps.len());
    for o in 0..outer {
        for r in 0..inner {
            let base = o * d * inner + r;
            for row in 0..d {
                let mut acc = C64::new(0.0, 0.0);
                for col in 0..d {
                    acc += op[(row, col)] * amps[base + col * inner];
                }
                out[base + row * inner] = acc;
            }
        }
    }
    Ok(out)
}

/// `|⟨a|b⟩|²`, clamped to `[0, 1]`.
pub fn fidelity(a: &PureState, b: &PureState) -> Result<f64> {
    Ok(a.inner(b)?.norm_sqr().min(1.0))
}

/// Number of Schmidt coefficients above `tol · σ_max` across the cut between
/// sites `cut` and `cut + 1` (1-based), i.e. after the first `cut` sites.
pub fn schmidt_rank_at_cut(state: &PureState, cut: usize, tol: f64) -> Result<usize> {
    if !(tol >= 0.0 && tol.is_finite()) {
        return Err(Error::InvalidTolerance(tol));
    }
    Ok(Svd::new(&state.cut_matrix(cut)?).rank(tol))
}
