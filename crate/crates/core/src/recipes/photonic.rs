//! Photonic targets and source recipes: the W cascade of a two-level
//! emitter and the adiabatic-passage recipes of a three-level atom.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;

use crate::compiler::GenerationPlan;
use crate::error::{Error, Result};
use crate::linalg::{basis_vector, unitarity_residual};
use crate::sim::{run_plan, standard_map_unitary_for, RunOutcome, UNITARY_TOL};
use crate::state::PureState;
use crate::{CMatrix, CVector, C64};

/// Angles of a W-type state on `n = thetas.len() + 1` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct WParams {
    pub thetas: Vec<f64>,
    pub phis: Vec<f64>,
}

impl WParams {
    pub fn new(thetas: Vec<f64>, phis: Vec<f64>) -> Result<WParams> {
        if thetas.is_empty() || thetas.len() != phis.len() {
            return Err(Error::InvalidParameter(format!(
                "W parameters need n-1 >= 1 thetas and phis, got {} and {}",
                thetas.len(),
                phis.len()
            )));
        }
        if thetas.iter().chain(&phis).any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter("W angles must be finite".into()));
        }
        Ok(WParams { thetas, phis })
    }

    /// Angles giving every excitation amplitude `1/√n`:
    /// `Θ_k = arcsin(1/√(n−k+1))`, `Φ = 0`.
    pub fn uniform(n: usize) -> Result<WParams> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!("W state needs n >= 2, got {n}")));
        }
        let thetas = (1..n).map(|k| (1.0 / ((n - k + 1) as f64).sqrt()).asin()).collect();
        WParams::new(thetas, vec![0.0; n - 1])
    }

    pub fn n(&self) -> usize {
        self.thetas.len() + 1
    }

    /// Emission amplitudes `(c_i, s_i)` for steps `1 … n`, with
    /// `c_i = cos Θ_i`, `s_i = e^{iΦ_i} sin Θ_i` and `(c_n, s_n) = (0, 1)`.
    pub fn source_amplitudes(&self) -> Vec<(C64, C64)> {
        let mut out: Vec<(C64, C64)> = self
            .thetas
            .iter()
            .zip(&self.phis)
            .map(|(&t, &p)| (C64::new(t.cos(), 0.0), C64::from_polar(t.sin(), p)))
            .collect();
        out.push((C64::new(0.0, 0.0), C64::new(1.0, 0.0)));
        out
    }
}

/// W-type target: site `k < n` excited with amplitude
/// `cos Θ_1 ⋯ cos Θ_{k−1} e^{iΦ_k} sin Θ_k`, site `n` with `∏ cos Θ`.
pub fn target_w_state(params: &WParams) -> Result<PureState> {
    let n = params.n();
    let mut amps = CVector::zeros(1 << n);
    let mut prefix = 1.0;
    for (k, (&t, &p)) in params.thetas.iter().zip(&params.phis).enumerate() {
        amps[1 << (n - 1 - k)] = C64::from_polar(prefix * t.sin(), p);
        prefix *= t.cos();
    }
    amps[1] = C64::new(prefix, 0.0);
    PureState::new(vec![2; n], amps)
}

/// Two-level emitter `{a, b}`: step `i` maps
/// `|a⟩ → c_i|a⟩|0⟩ + s_i|b⟩|1⟩` and `|b⟩ → |b⟩|0⟩`.
pub fn w_source_isometry(c: C64, s: C64) -> CMatrix {
    let mut v = CMatrix::zeros(4, 2);
    v[(0, 0)] = c;
    v[(3, 0)] = s;
    v[(2, 1)] = C64::new(1.0, 0.0);
    v
}

/// Emitter plan for the W cascade, from `|a⟩` to `|b⟩`.
pub fn w_source_plan(params: &WParams) -> Result<GenerationPlan> {
    let steps = params.source_amplitudes().into_iter().map(|(c, s)| w_source_isometry(c, s)).collect();
    GenerationPlan::new(2, 2, steps, basis_vector(2, 0), basis_vector(2, 1))
}

/// Emitter unitaries realising the W cascade under the standard map with a
/// two-level ancilla.
pub fn w_standard_map_unitaries(params: &WParams) -> Result<Vec<CMatrix>> {
    params
        .source_amplitudes()
        .into_iter()
        .map(|(c, s)| standard_map_unitary_for(&w_source_isometry(c, s)))
        .collect()
}

/// GHZ state `(|0…0⟩ + |1…1⟩)/√2`.
pub fn ghz_state(n: usize) -> Result<PureState> {
    if n < 1 {
        return Err(Error::InvalidParameter("GHZ state needs n >= 1".into()));
    }
    let mut amps = CVector::zeros(1 << n);
    amps[0] = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    amps[(1 << n) - 1] = amps[0];
    PureState::new(vec![2; n], amps)
}

/// Product form `⊗_i (O^0_{i−1}|0⟩_i + O^1_{i−1}|1⟩_i)` with
/// `O^0 = cos Θ_i|0⟩⟨0| − e^{−iΦ_i} sin Θ_i|1⟩⟨1|`,
/// `O^1 = e^{iΦ_i} sin Θ_i|0⟩⟨0| + cos Θ_i|1⟩⟨1|` acting on qubit `i−1`, and
/// `cos Θ_1`, `e^{iΦ_1} sin Θ_1` for the first qubit.
///
/// At `Θ = π/4`, `Φ = 0` this is `2^{−n/2} ⊗_i (σ^z_{i−1}|0⟩_i + |1⟩_i)`, which
/// equals `Z_1 ⋯ Z_{n−1}` applied to the graph state of a linear chain. Its
/// stabilizers therefore read `⟨X_1 Z_2⟩ = −1`, `⟨Z_{i−1} X_i Z_{i+1}⟩ = −1` for
/// `1 < i < n`, and `⟨Z_{n−1} X_n⟩ = +1`.
pub fn cluster_state(n: usize, thetas: &[f64], phis: &[f64]) -> Result<PureState> {
    if n < 1 || thetas.len() != n || phis.len() != n {
        return Err(Error::InvalidParameter(format!(
            "cluster state on {n} qubits needs {n} thetas and phis, got {} and {}",
            thetas.len(),
            phis.len()
        )));
    }
    let amps = CVector::from_fn(1 << n, |idx, _| {
        let bit = |k: usize| (idx >> (n - 1 - k)) & 1;
        let (t, p) = (thetas[0], phis[0]);
        let mut amp = if bit(0) == 0 { C64::new(t.cos(), 0.0) } else { C64::from_polar(t.sin(), p) };
        for k in 1..n {
            let (t, p) = (thetas[k], phis[k]);
            amp *= match (bit(k - 1), bit(k)) {
                (0, 0) => C64::new(t.cos(), 0.0),
                (1, 0) => -C64::from_polar(t.sin(), -p),
                (0, 1) => C64::from_polar(t.sin(), p),
                _ => C64::new(t.cos(), 0.0),
            };
        }
        amp
    });
    PureState::new(vec![2; n], amps)
}

/// [`cluster_state`] with `Θ = π/4`, `Φ = 0` everywhere.
pub fn uniform_cluster_state(n: usize) -> Result<PureState> {
    cluster_state(n, &vec![std::f64::consts::FRAC_PI_4; n], &vec![0.0; n])
}

// ---------------------------------------------------------------------------
// Three-level atom with adiabatic-passage emission

/// Atomic levels, in basis order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Level {
    A = 0,
    B1 = 1,
    B2 = 2,
}

/// `M_AB`: `|a⟩ → |b_1⟩|1⟩`, `|b_1⟩ → |b_1⟩|0⟩`, `|b_2⟩ → |b_2⟩|0⟩`, as a
/// 6×3 isometry with rows `level·2 + photon`.
pub fn emission_map() -> CMatrix {
    let mut m = CMatrix::zeros(6, 3);
    let one = C64::new(1.0, 0.0);
    m[(Level::B1 as usize * 2 + 1, Level::A as usize)] = one;
    m[(Level::B1 as usize * 2, Level::B1 as usize)] = one;
    m[(Level::B2 as usize * 2, Level::B2 as usize)] = one;
    m
}

/// `U_kl^m(Φ, Θ) = cos Θ(|k⟩⟨k| + |l⟩⟨l|) + e^{iΦ} sin Θ|k⟩⟨l|
/// − e^{−iΦ} sin Θ|l⟩⟨k| + |m⟩⟨m|`.
pub fn rotation_u(k: Level, l: Level, m: Level, phi: f64, theta: f64) -> Result<CMatrix> {
    if k == l || l == m || k == m {
        return Err(Error::InvalidParameter(format!("levels {k:?}, {l:?}, {m:?} must be distinct")));
    }
    let (k, l, m) = (k as usize, l as usize, m as usize);
    let mut u = CMatrix::zeros(3, 3);
    u[(k, k)] = C64::new(theta.cos(), 0.0);
    u[(l, l)] = C64::new(theta.cos(), 0.0);
    u[(k, l)] = C64::from_polar(theta.sin(), phi);
    u[(l, k)] = -C64::from_polar(theta.sin(), -phi);
    u[(m, m)] = C64::new(1.0, 0.0);
    Ok(u)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RecipeKind {
    W,
    Ghz,
    Cluster,
}

impl fmt::Display for RecipeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RecipeKind::W => "w",
            RecipeKind::Ghz => "ghz",
            RecipeKind::Cluster => "cluster",
        })
    }
}

impl FromStr for RecipeKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<RecipeKind> {
        match s.to_ascii_lowercase().as_str() {
            "w" => Ok(RecipeKind::W),
            "ghz" => Ok(RecipeKind::Ghz),
            "cluster" => Ok(RecipeKind::Cluster),
            other => Err(Error::InvalidParameter(format!("unknown recipe kind {other:?}"))),
        }
    }
}

/// Three-level atom recipe: initial level and one atomic unitary per photon.
/// Step `i` applies `U_A^{[i]}` and then the emission map.
#[derive(Clone, Debug, PartialEq)]
pub struct AtomicRecipe {
    pub kind: RecipeKind,
    pub initial: Level,
    pub unitaries: Vec<CMatrix>,
}

impl AtomicRecipe {
    pub fn new(kind: RecipeKind, initial: Level, unitaries: Vec<CMatrix>) -> Result<AtomicRecipe> {
        for u in &unitaries {
            if u.shape() != (3, 3) {
                return Err(Error::ShapeMismatch(format!("atomic unitary is {:?}", u.shape())));
            }
            let r = unitarity_residual(u);
            if r > UNITARY_TOL {
                return Err(Error::NotUnitary(r));
            }
        }
        Ok(AtomicRecipe { kind, initial, unitaries })
    }

    pub fn n(&self) -> usize {
        self.unitaries.len()
    }

    /// Plan with steps `M_AB · U_A^{[i]}`, ending in `|b_1⟩`.
    pub fn plan(&self) -> Result<GenerationPlan> {
        let m = emission_map();
        let steps = self.unitaries.iter().map(|u| &m * u).collect();
        GenerationPlan::new(3, 2, steps, basis_vector(3, self.initial as usize), basis_vector(3, Level::B1 as usize))
    }

    pub fn run(&self) -> Result<RunOutcome> {
        run_plan(&self.plan()?)
    }
}

/// The adiabatic-passage recipes.
///
/// * `W`: `φ_I = b_2`, `U^{[i]} = U_{a b2}^{b1}(Φ_i, Θ_i)` for `i < n`, then
///   `U_{a b2}^{b1}(0, π/2)`; `n − 1` angles.
/// * `Ghz`: `φ_I = a`, `U^{[1]} = U_{a b2}^{b1}(Φ_1, Θ_1)`, middle steps
///   `U_{a b1}^{b2}(0, π/2)`, last `U_{b1 b2}^{a}(0, π/2) U_{a b1}^{b2}(0, π/2)`;
///   one angle. The output is `−e^{−iΦ_1} sin Θ_1|0…0⟩ + cos Θ_1|1…1⟩`, so
///   `Θ_1 = π/4`, `Φ_1 = π` gives the GHZ state.
/// * `Cluster`: `φ_I = b_2`, `U^{[i]} = U_{a b2}^{b1}(Φ_i, Θ_i) U_{a b1}^{b2}(0, π/2)`
///   for `i < n`, last `U_{a b1}^{b2}(Φ_n, Θ_n) U_{b1 b2}^{a}(0, π/2) U_{a b1}^{b2}(0, π/2)`;
///   `n` angles.
pub fn adiabatic_recipe(kind: RecipeKind, n: usize, thetas: &[f64], phis: &[f64]) -> Result<AtomicRecipe> {
    use Level::{A, B1, B2};
    if n < 2 {
        return Err(Error::InvalidParameter(format!("recipes need n >= 2, got {n}")));
    }
    let expected = match kind {
        RecipeKind::W => n - 1,
        RecipeKind::Ghz => 1,
        RecipeKind::Cluster => n,
    };
    if thetas.len() != expected || phis.len() != expected {
        return Err(Error::InvalidParameter(format!(
            "{kind} recipe on {n} qubits needs {expected} thetas and phis, got {} and {}",
            thetas.len(),
            phis.len()
        )));
    }
    let swap_ab1 = rotation_u(A, B1, B2, 0.0, FRAC_PI_2)?;
    let (initial, unitaries) = match kind {
        RecipeKind::W => {
            let mut us = (0..n - 1)
                .map(|i| rotation_u(A, B2, B1, phis[i], thetas[i]))
                .collect::<Result<Vec<_>>>()?;
            us.push(rotation_u(A, B2, B1, 0.0, FRAC_PI_2)?);
            (B2, us)
        }
        RecipeKind::Ghz => {
            let mut us = vec![rotation_u(A, B2, B1, phis[0], thetas[0])?];
            us.extend(std::iter::repeat_n(swap_ab1.clone(), n - 2));
            us.push(rotation_u(B1, B2, A, 0.0, FRAC_PI_2)? * &swap_ab1);
            (A, us)
        }
        RecipeKind::Cluster => {
            let mut us = (0..n - 1)
                .map(|i| Ok(rotation_u(A, B2, B1, phis[i], thetas[i])? * &swap_ab1))
                .collect::<Result<Vec<_>>>()?;
            us.push(rotation_u(A, B1, B2, phis[n - 1], thetas[n - 1])? * rotation_u(B1, B2, A, 0.0, FRAC_PI_2)? * &swap_ab1);
            (B2, us)
        }
    };
    AtomicRecipe::new(kind, initial, unitaries)
}
