//! Cavity-QED Hamiltonians behind the atom–photon √ISWAP.
//!
//! A Λ atom with ground levels `a`, `b` and excited level `e` couples `a ↔ e`
//! through a laser (Rabi frequency `Ω`, detuning `Δ + δ`) and `b ↔ e` through
//! the cavity mode (coupling `g`). Far from resonance the excited level can be
//! eliminated, leaving a Jaynes–Cummings coupling `|a,n−1⟩ ↔ |b,n⟩` with Rabi
//! frequency `√n·gΩ/2Δ`; with the laser tuned to the `n = 1` resonance only
//! `|a,0⟩ ↔ |b,1⟩` is resonant.
//!
//! Basis conventions: the atom is the slow index, Fock states `0 … n_max` the
//! fast one. Atomic levels are ordered `b, a, e` (`b ≡ 0`, `a ≡ 1`), so the
//! two-qubit block of the truncated model is `{|b,0⟩, |b,1⟩, |a,0⟩, |a,1⟩}`.
//!
//! The full Hamiltonian is written with the excited level above the ground
//! manifolds by `Δ`; eliminating `e` from it yields the *negative* of the
//! effective Hamiltonians below. Effective Hamiltonians are therefore
//! propagated as `exp(+iHt)` and the full one as `exp(−iHt)`; both then
//! reproduce `√ISWAP = exp[iπ(|a,0⟩⟨b,1| + h.c.)/4]` for `gΩ/Δ > 0`.

use std::f64::consts::FRAC_PI_4;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::{exp_i_hermitian, kron, max_abs_diff, pauli_x, pauli_y};
use crate::{CMatrix, CVector, C64};

/// Atomic level indices of the full model.
pub const LEVEL_B: usize = 0;
pub const LEVEL_A: usize = 1;
pub const LEVEL_E: usize = 2;

/// Default Fock cutoff.
pub const DEFAULT_N_MAX: usize = 4;

/// Cavity and laser parameters, in units of `g`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CavityModel {
    pub g: f64,
    pub omega: f64,
    /// Large detuning `Δ`.
    pub detuning: f64,
    /// Small detuning `δ`.
    pub small_detuning: f64,
    pub n_max: usize,
}

impl CavityModel {
    /// Model with `δ` set to the resonance condition `Ω²/4Δ − g²/Δ`.
    pub fn new(g: f64, omega: f64, detuning: f64, n_max: usize) -> Result<CavityModel> {
        if !(detuning.is_finite() && detuning != 0.0) {
            return Err(Error::InvalidParameter(format!("detuning must be nonzero and finite, got {detuning}")));
        }
        if !(g.is_finite() && omega.is_finite()) {
            return Err(Error::InvalidParameter("couplings must be finite".into()));
        }
        if n_max < 1 {
            return Err(Error::InvalidParameter("Fock cutoff must be at least 1".into()));
        }
        let small = resonant_small_detuning(g, omega, detuning);
        Ok(CavityModel { g, omega, detuning, small_detuning: small, n_max })
    }

    pub fn with_small_detuning(mut self, delta: f64) -> CavityModel {
        self.small_detuning = delta;
        self
    }

    /// `|Δ| / max(g, Ω)`; large in the adiabatic regime.
    pub fn adiabatic_ratio(&self) -> f64 {
        self.detuning.abs() / self.g.abs().max(self.omega.abs())
    }

    /// `(g²/|Δ|) / (|gΩ|/2|Δ|) = 2|g|/|Ω|`; large in the selective regime.
    pub fn selective_ratio(&self) -> f64 {
        2.0 * self.g.abs() / self.omega.abs()
    }

    /// Effective Rabi frequency `gΩ/2Δ`.
    pub fn effective_coupling(&self) -> f64 {
        self.g * self.omega / (2.0 * self.detuning)
    }

    fn fock(&self) -> usize {
        self.n_max + 1
    }

    /// Index of `|level, n⟩` in the full (three-level) basis.
    pub fn full_index(&self, level: usize, n: usize) -> usize {
        level * self.fock() + n
    }

    /// Index of `|level, n⟩` in the two-level basis (`level` is `LEVEL_B` or
    /// `LEVEL_A`).
    pub fn reduced_index(&self, level: usize, n: usize) -> usize {
        level * self.fock() + n
    }
}

/// `δ = Ω²/4Δ − g²/Δ`.
pub fn resonant_small_detuning(g: f64, omega: f64, detuning: f64) -> f64 {
    omega * omega / (4.0 * detuning) - g * g / detuning
}

fn annihilation(fock: usize) -> CMatrix {
    CMatrix::from_fn(fock, fock, |r, c| if c == r + 1 { C64::new((c as f64).sqrt(), 0.0) } else { C64::new(0.0, 0.0) })
}

fn number(fock: usize) -> CMatrix {
    CMatrix::from_fn(fock, fock, |r, c| if r == c { C64::new(r as f64, 0.0) } else { C64::new(0.0, 0.0) })
}

fn sigma(dim: usize, k: usize, l: usize) -> CMatrix {
    let mut m = CMatrix::zeros(dim, dim);
    m[(k, l)] = C64::new(1.0, 0.0);
    m
}

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Full Hamiltonian on (b, a, e) ⊗ Fock(`n_max`) in the frame rotating with
/// `δσ_aa`, where the laser term is static:
///
/// `H = −Δ(σ_aa + a†a) + δσ_aa + g(σ_eb a + a†σ_be) + (Ω/2)(σ_ea + σ_ae)`.
pub fn full_hamiltonian(model: &CavityModel) -> Result<CMatrix> {
    if model.n_max < 1 {
        return Err(Error::InvalidParameter("Fock cutoff must be at least 1".into()));
    }
    let f = model.fock();
    let a = annihilation(f);
    let id_f = CMatrix::identity(f, f);
    let id_3 = CMatrix::identity(3, 3);
    let s_aa = sigma(3, LEVEL_A, LEVEL_A);
    let s_eb = sigma(3, LEVEL_E, LEVEL_B);
    let s_ea = sigma(3, LEVEL_E, LEVEL_A);
    let free = (kron(&s_aa, &id_f) + kron(&id_3, &number(f))) * real(-model.detuning);
    let frame = kron(&s_aa, &id_f) * real(model.small_detuning);
    let cavity = kron(&s_eb, &a);
    let laser = kron(&s_ea, &id_f);
    let h = free
        + frame
        + (&cavity + cavity.adjoint()) * real(model.g)
        + (&laser + laser.adjoint()) * real(model.omega / 2.0);
    Ok(h)
}

/// Adiabatically eliminated Hamiltonian on (b, a) ⊗ Fock(`n_max`), static,
/// with the energy of the `a` manifold as reference:
///
/// `H_ad = (g²/Δ) a†a σ_bb − (Ω²/4Δ − δ) σ_bb + (gΩ/2Δ)(σ_ab a + a†σ_ba)`.
///
/// With the resonant `δ` the `{|a,0⟩, |b,1⟩}` block equals the selective
/// Hamiltonian.
pub fn adiabatic_hamiltonian(model: &CavityModel) -> Result<CMatrix> {
    let (g, omega, d) = (model.g, model.omega, model.detuning);
    if d == 0.0 {
        return Err(Error::InvalidParameter("detuning must be nonzero".into()));
    }
    let f = model.fock();
    let a = annihilation(f);
    let id_f = CMatrix::identity(f, f);
    let s_bb = sigma(2, LEVEL_B, LEVEL_B);
    let s_ab = sigma(2, LEVEL_A, LEVEL_B);
    let stark = kron(&s_bb, &number(f)) * real(g * g / d);
    let shift = kron(&s_bb, &id_f) * real(-(omega * omega / (4.0 * d) - model.small_detuning));
    let jc = kron(&s_ab, &a);
    Ok(stark + shift + (&jc + jc.adjoint()) * real(g * omega / (2.0 * d)))
}

/// `H_sel = (gΩ/2Δ)(|a,0⟩⟨b,1| + |b,1⟩⟨a,0|)` on `{|b,0⟩, |b,1⟩, |a,0⟩, |a,1⟩}`.
pub fn selective_hamiltonian(model: &CavityModel) -> Result<CMatrix> {
    if model.detuning == 0.0 {
        return Err(Error::InvalidParameter("detuning must be nonzero".into()));
    }
    let c = model.effective_coupling();
    let mut h = CMatrix::zeros(4, 4);
    h[(2, 1)] = real(c);
    h[(1, 2)] = real(c);
    Ok(h)
}

/// `(gΩ/4Δ)(σ_x ⊗ σ_x + σ_y ⊗ σ_y)`.
pub fn selective_hamiltonian_pauli(model: &CavityModel) -> Result<CMatrix> {
    if model.detuning == 0.0 {
        return Err(Error::InvalidParameter("detuning must be nonzero".into()));
    }
    let (x, y) = (pauli_x(), pauli_y());
    Ok((kron(&x, &x) + kron(&y, &y)) * real(model.g * model.omega / (4.0 * model.detuning)))
}

/// `exp(−iHt) ψ0`.
pub fn evolve(h: &CMatrix, t: f64, psi0: &CVector) -> Result<CVector> {
    if !t.is_finite() {
        return Err(Error::InvalidParameter(format!("duration must be finite, got {t}")));
    }
    if h.nrows() != psi0.len() {
        return Err(Error::ShapeMismatch(format!("{}-dim Hamiltonian, {}-dim state", h.nrows(), psi0.len())));
    }
    Ok(exp_i_hermitian(h, -t)? * psi0)
}

/// The target gate `exp[iπ(|a,0⟩⟨b,1| + h.c.)/4]` on `{|b,0⟩, |b,1⟩, |a,0⟩, |a,1⟩}`.
pub fn ideal_sqrt_iswap() -> CMatrix {
    crate::recipes::gates::sqrt_iswap()
}

#[derive(Clone, Debug)]
pub struct Pulse {
    /// `t*` with `(gΩ/2Δ)·t* = π/4`.
    pub duration: f64,
    /// `exp(+i H_sel t*)`.
    pub gate: CMatrix,
}

/// Pulse duration and the gate it realises under the selective Hamiltonian.
pub fn sqrt_iswap_pulse(model: &CavityModel) -> Result<Pulse> {
    let c = model.effective_coupling();
    if !c.is_finite() || c <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "effective coupling gΩ/2Δ must be positive, got {c}"
        )));
    }
    let duration = FRAC_PI_4 / c;
    if !duration.is_finite() {
        return Err(Error::InvalidParameter("pulse duration overflows".into()));
    }
    let gate = exp_i_hermitian(&selective_hamiltonian(model)?, duration)?;
    Ok(Pulse { duration, gate })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Level {
    Full,
    Adiabatic,
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Level::Full => "FULL",
            Level::Adiabatic => "ADIABATIC",
        })
    }
}

impl FromStr for Level {
    type Err = Error;
    fn from_str(s: &str) -> Result<Level> {
        match s.to_ascii_uppercase().as_str() {
            "FULL" => Ok(Level::Full),
            "ADIABATIC" => Ok(Level::Adiabatic),
            other => Err(Error::InvalidParameter(format!("unknown level {other:?}"))),
        }
    }
}

/// Gate error of one pulse.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SelectivityReport {
    pub infidelity: f64,
    /// Largest population found in Fock level `n_max` after the pulse, over
    /// the four two-qubit basis inputs.
    pub leakage: f64,
    pub duration: f64,
}

/// Subspace-average fidelity `(|tr(U_ideal† B)|² + m)/(m² + m)` for an
/// `m × m` block.
pub fn average_fidelity(ideal: &CMatrix, block: &CMatrix) -> f64 {
    let m = ideal.nrows() as f64;
    let overlap = (ideal.adjoint() * block).trace().norm_sqr();
    (overlap + m) / (m * m + m)
}

/// Propagates the chosen model for the pulse duration and compares its
/// `{|a,0⟩, |b,1⟩}` block with the ideal √ISWAP block.
pub fn selectivity_error(model: &CavityModel, level: Level) -> Result<SelectivityReport> {
    if model.n_max < 3 {
        return Err(Error::InvalidParameter(format!("selectivity runs need n_max >= 3, got {}", model.n_max)));
    }
    let pulse = sqrt_iswap_pulse(model)?;
    let t = pulse.duration;
    let (u, levels) = match level {
        Level::Full => (exp_i_hermitian(&full_hamiltonian(model)?, -t)?, 3),
        Level::Adiabatic => (exp_i_hermitian(&adiabatic_hamiltonian(model)?, t)?, 2),
    };
    let logical = [model.full_index(LEVEL_A, 0), model.full_index(LEVEL_B, 1)];
    let block = CMatrix::from_fn(2, 2, |r, c| u[(logical[r], logical[c])]);
    let ideal_full = ideal_sqrt_iswap();
    // Same ordering (|a,0⟩, |b,1⟩) as `block`: indices 2 and 1 of the 4×4 gate.
    let ideal = CMatrix::from_fn(2, 2, |r, c| ideal_full[([2, 1][r], [2, 1][c])]);
    let infidelity = (1.0 - average_fidelity(&ideal, &block)).max(0.0);

    let f = model.fock();
    let inputs = [(LEVEL_B, 0), (LEVEL_B, 1), (LEVEL_A, 0), (LEVEL_A, 1)];
    let mut leakage: f64 = 0.0;
    for (lvl, n) in inputs {
        let col = u.column(lvl * f + n);
        let top: f64 = (0..levels).map(|l| col[l * f + model.n_max].norm_sqr()).sum();
        leakage = leakage.max(top);
    }
    Ok(SelectivityReport { infidelity, leakage, duration: t })
}

/// One row of a parameter sweep.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepRow {
    pub delta_over_g: f64,
    pub omega_over_g: f64,
    pub n_max: usize,
    pub level: Level,
    pub infidelity: f64,
    pub leakage: f64,
}

/// Evaluates one grid point with `g = 1`.
pub fn sweep_point(delta_over_g: f64, omega_over_g: f64, n_max: usize, level: Level) -> Result<SweepRow> {
    let model = CavityModel::new(1.0, omega_over_g, delta_over_g, n_max)?;
    let r = selectivity_error(&model, level)?;
    Ok(SweepRow { delta_over_g, omega_over_g, n_max, level, infidelity: r.infidelity, leakage: r.leakage })
}

/// `true` when `values` never increases.
pub fn is_non_increasing(values: &[f64]) -> bool {
    values.windows(2).all(|w| w[1] <= w[0])
}

/// `max |H_ad − H_sel|` over the `{|a,0⟩, |b,1⟩}` block.
pub fn resonant_block_deviation(model: &CavityModel) -> Result<f64> {
    let had = adiabatic_hamiltonian(model)?;
    let hsel = selective_hamiltonian(model)?;
    let idx_ad = [model.reduced_index(LEVEL_A, 0), model.reduced_index(LEVEL_B, 1)];
    let idx_sel = [2, 1];
    let a = CMatrix::from_fn(2, 2, |r, c| had[(idx_ad[r], idx_ad[c])]);
    let b = CMatrix::from_fn(2, 2, |r, c| hsel[(idx_sel[r], idx_sel[c])]);
    Ok(max_abs_diff(&a, &b))
}
