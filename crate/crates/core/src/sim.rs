//! Simulation of the generation scenarios.
//!
//! * [`run_plan`]: a `D`-level ancilla applies one isometry per emitted qudit.
//! * [`run_standard_map`]: a `2D`-level emitter (ancilla ⊗ tag qubit) applies
//!   arbitrary unitaries, and the fixed emission map swaps the tag into a fresh
//!   time-bin qubit.
//! * [`run_qubit_chain`]: nearest-neighbour two-qubit gates on a dense register.
//!
//! Joint ancilla/register states keep the ancilla as the slowest index.

use crate::compiler::GenerationPlan;
use crate::error::{Error, Result};
use crate::linalg::{basis_vector, complete_orthonormal, isometry_residual, kron, principal_vector, unitarity_residual};
use crate::state::{PureState, NORM_TOL};
use crate::{CMatrix, CVector, C64};

/// Isometry tolerance enforced while running plans.
pub const RUN_ISOMETRY_TOL: f64 = 1e-10;
/// Unitarity tolerance for gates and emitter unitaries.
pub const UNITARY_TOL: f64 = 1e-12;
/// The ancilla counts as decoupled when its purity is at least `1 − 1e-10`.
pub const DECOUPLING_TOL: f64 = 1e-10;
/// Largest tag-qubit weight accepted after the standard map.
pub const TAG_TOL: f64 = 1e-10;
/// Outcome probabilities at or below this are treated as zero.
pub const ZERO_PROBABILITY: f64 = 1e-20;

/// Ancilla ⊗ emitted register, ancilla slowest.
#[derive(Clone, Debug, PartialEq)]
pub struct JointState {
    pub ancilla_dim: usize,
    /// Local dimensions of the emitted register.
    pub register_dims: Vec<usize>,
    pub amplitudes: CVector,
}

impl JointState {
    pub fn new(ancilla_dim: usize, register_dims: Vec<usize>, amplitudes: CVector) -> Result<JointState> {
        let expected = ancilla_dim * register_dims.iter().product::<usize>();
        if amplitudes.len() != expected {
            return Err(Error::LengthMismatch { expected, got: amplitudes.len() });
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(JointState { ancilla_dim, register_dims, amplitudes })
    }

    pub fn n_emitted(&self) -> usize {
        self.register_dims.len()
    }

    /// Amplitudes as an `ancilla × register` matrix.
    pub fn matrix(&self) -> CMatrix {
        let cols = self.amplitudes.len() / self.ancilla_dim;
        CMatrix::from_fn(self.ancilla_dim, cols, |a, q| self.amplitudes[a * cols + q])
    }

    /// Reduced ancilla density matrix.
    pub fn ancilla_density(&self) -> CMatrix {
        let j = self.matrix();
        &j * j.adjoint()
    }

    /// `tr ρ_A²`.
    pub fn ancilla_purity(&self) -> f64 {
        let rho = self.ancilla_density();
        (&rho * &rho).trace().re
    }

    /// The register conditioned on the ancilla being found in `v`,
    /// `(⟨v| ⊗ 1)|joint⟩`, normalized, with the probability of that outcome.
    pub fn project_ancilla(&self, v: &CVector) -> Result<(PureState, f64)> {
        if v.len() != self.ancilla_dim {
            return Err(Error::ShapeMismatch(format!(
                "ancilla vector of length {} for ancilla dimension {}",
                v.len(),
                self.ancilla_dim
            )));
        }
        let row = v.adjoint() * self.matrix();
        let projected = row.transpose();
        let probability = projected.norm_squared();
        if probability <= ZERO_PROBABILITY {
            return Err(Error::ZeroProbability);
        }
        let (state, _) = PureState::from_unnormalized(self.register_dims.clone(), projected)?;
        Ok((state, probability))
    }
}

/// Result of running a plan or standard-map sequence.
#[derive(Clone, Debug)]
pub struct RunOutcome {
    /// Register conditioned on the final ancilla state `φ_F`.
    pub qubits: PureState,
    /// Principal eigenvector of the final ancilla density matrix.
    pub ancilla_out: CVector,
    pub decoupled: bool,
    pub purity: f64,
    /// `⟨φ_F|ρ_A|φ_F⟩`.
    pub final_overlap: f64,
    pub joint: JointState,
}

/// Applies a `d·D × D` isometry to the ancilla factor of a `D × Q` joint
/// matrix, emitting one qudit: `J'[β, q·d + i] = (W J)[β·d + i, q]`.
fn emit(w: &CMatrix, joint: &CMatrix, d: usize) -> CMatrix {
    let dim = w.ncols();
    let grown = w * joint;
    let q = joint.ncols();
    CMatrix::from_fn(dim, q * d, |beta, col| grown[(beta * d + col % d, col / d)])
}

fn finish(joint: CMatrix, dims: Vec<usize>, phi_f: Option<&CVector>) -> Result<RunOutcome> {
    let ancilla_dim = joint.nrows();
    let flat = CVector::from_iterator(joint.len(), joint.transpose().iter().copied());
    let norm = flat.norm();
    let joint = JointState { ancilla_dim, register_dims: dims, amplitudes: flat / C64::new(norm, 0.0) };
    let rho = joint.ancilla_density();
    let purity = (&rho * &rho).trace().re;
    let ancilla_out = principal_vector(&rho);
    let reference = phi_f.cloned().unwrap_or_else(|| ancilla_out.clone());
    let final_overlap = (reference.adjoint() * &rho * &reference)[(0, 0)].re;
    let (qubits, _) = joint.project_ancilla(&reference)?;
    Ok(RunOutcome {
        qubits,
        ancilla_out,
        decoupled: purity >= 1.0 - DECOUPLING_TOL,
        purity,
        final_overlap,
        joint,
    })
}

/// Runs an ancilla plan.
///
/// The register output is `(⟨φ_F| ⊗ 1)` applied to the final joint state,
/// i.e. `Σ ⟨φ_F|V^{i_n}⋯V^{i_1}|φ_I⟩ |i_1 … i_n⟩`, normalized.
pub fn run_plan(plan: &GenerationPlan) -> Result<RunOutcome> {
    plan.check_shapes()?;
    let d = plan.local_dim;
    let mut joint = CMatrix::from_column_slice(plan.ancilla_dim, 1, plan.phi_i.as_slice());
    for (k, w) in plan.steps.iter().enumerate() {
        let residual = isometry_residual(w);
        if residual > RUN_ISOMETRY_TOL {
            return Err(Error::NotIsometric { step: k + 1, residual });
        }
        joint = emit(w, &joint, d);
    }
    finish(joint, vec![d; plan.n_steps()], Some(&plan.phi_f))
}

/// Result of a projective measurement on a two-level ancilla.
#[derive(Clone, Debug)]
pub struct Measurement {
    pub probability: f64,
    /// `None` when the outcome has zero probability.
    pub post_state: Option<PureState>,
}

impl Measurement {
    /// The post-measurement register; an error for a zero-probability outcome.
    pub fn state(&self) -> Result<&PureState> {
        self.post_state.as_ref().ok_or(Error::ZeroProbability)
    }
}

/// Measures the ancilla of `joint` in the orthonormal `basis` and returns the
/// probability and register post-state of `outcome`.
pub fn measure_ancilla(joint: &JointState, basis: [&CVector; 2], outcome: usize) -> Result<Measurement> {
    if joint.ancilla_dim != 2 {
        return Err(Error::ShapeMismatch(format!("ancilla dimension {} is not 2", joint.ancilla_dim)));
    }
    if outcome > 1 {
        return Err(Error::InvalidParameter(format!("outcome {outcome} is not 0 or 1")));
    }
    if basis.iter().any(|v| v.len() != 2) {
        return Err(Error::ShapeMismatch("measurement basis vectors must have length 2".into()));
    }
    let residual = isometry_residual(&CMatrix::from_columns(&[basis[0].clone(), basis[1].clone()]));
    if residual > NORM_TOL {
        return Err(Error::InvalidParameter(format!("measurement basis is not orthonormal ({residual:e})")));
    }
    match joint.project_ancilla(basis[outcome]) {
        Ok((state, probability)) => Ok(Measurement { probability, post_state: Some(state) }),
        Err(Error::ZeroProbability) => {
            Ok(Measurement { probability: outcome_probability(joint, basis[outcome]), post_state: None })
        }
        Err(e) => Err(e),
    }
}

/// Outcome probability of measuring the ancilla in state `v` (zero allowed).
pub fn outcome_probability(joint: &JointState, v: &CVector) -> f64 {
    (v.adjoint() * joint.matrix()).norm_squared()
}

// ---------------------------------------------------------------------------
// Standard map

/// The standard map on ancilla′ ⊗ tag ⊗ time-bin, basis index
/// `(a′·2 + t)·2 + b`: identity on the ancilla and SWAP of tag and bin.
pub fn standard_map_t(ancilla_dim: usize) -> CMatrix {
    let mut swap = CMatrix::zeros(4, 4);
    for t in 0..2 {
        for b in 0..2 {
            swap[(b * 2 + t, t * 2 + b)] = C64::new(1.0, 0.0);
        }
    }
    kron(&CMatrix::identity(ancilla_dim, ancilla_dim), &swap)
}

/// Isometry induced by an emitter unitary: the tag enters in `|0⟩`, the map
/// moves the tag into the time bin, so `V[(a′·2 + b), β] = U[(a′·2 + b), β·2]`.
pub fn standard_map_isometry(u: &CMatrix) -> Result<CMatrix> {
    let (rows, cols) = u.shape();
    if rows != cols || rows % 2 != 0 {
        return Err(Error::ShapeMismatch(format!("emitter unitary must be 2D×2D, got {rows}×{cols}")));
    }
    let dim = rows / 2;
    Ok(CMatrix::from_fn(rows, dim, |r, beta| u[(r, beta * 2)]))
}

/// An emitter unitary whose induced isometry is `v`: column `β·2` of the
/// result is column `β` of `v`, the odd columns complete it to a unitary.
pub fn standard_map_unitary_for(v: &CMatrix) -> Result<CMatrix> {
    let (rows, dim) = v.shape();
    if rows != 2 * dim {
        return Err(Error::ShapeMismatch(format!("isometry must be 2D×D, got {rows}×{dim}")));
    }
    let full = complete_orthonormal(v, rows)?;
    let mut u = CMatrix::zeros(rows, rows);
    for beta in 0..dim {
        u.set_column(beta * 2, &full.column(beta));
        u.set_column(beta * 2 + 1, &full.column(dim + beta));
    }
    Ok(u)
}

/// Runs the emitter with ancilla dimension `ancilla_dim`.
///
/// Each step applies `U_A` to ancilla′ ⊗ tag with the tag in `|0⟩`, appends a
/// time-bin qubit in `|0⟩` and applies [`standard_map_t`]; the tag must come
/// back in `|0⟩` before it is dropped. The register is conditioned on `phi_f`
/// when given, otherwise on the dominant ancilla state.
pub fn run_standard_map(
    ancilla_dim: usize,
    unitaries: &[CMatrix],
    phi_i: &CVector,
    phi_f: Option<&CVector>,
) -> Result<RunOutcome> {
    if ancilla_dim == 0 || unitaries.is_empty() {
        return Err(Error::InvalidParameter("empty emitter sequence".into()));
    }
    if phi_i.len() != ancilla_dim || phi_f.is_some_and(|f| f.len() != ancilla_dim) {
        return Err(Error::ShapeMismatch("boundary vector length differs from ancilla dimension".into()));
    }
    let t = standard_map_t(ancilla_dim);
    let mut joint = CMatrix::from_column_slice(ancilla_dim, 1, phi_i.as_slice());
    joint /= C64::new(phi_i.norm(), 0.0);
    for (k, u) in unitaries.iter().enumerate() {
        if u.shape() != (2 * ancilla_dim, 2 * ancilla_dim) {
            return Err(Error::ShapeMismatch(format!("emitter unitary {} is {:?}", k + 1, u.shape())));
        }
        let residual = unitarity_residual(u);
        if residual > UNITARY_TOL {
            return Err(Error::NotUnitary(residual));
        }
        let q = joint.ncols();
        // Ancilla′ ⊗ tag with tag in |0⟩.
        let mut with_tag = CMatrix::zeros(2 * ancilla_dim, q);
        for a in 0..ancilla_dim {
            with_tag.set_row(a * 2, &joint.row(a));
        }
        let rotated = u * with_tag;
        // Append the time bin in |0⟩ and apply T.
        let mut with_bin = CMatrix::zeros(4 * ancilla_dim, q);
        for r in 0..2 * ancilla_dim {
            with_bin.set_row(r * 2, &rotated.row(r));
        }
        let mapped = &t * with_bin;
        let mut tag_weight = 0.0;
        let mut next = CMatrix::zeros(ancilla_dim, q * 2);
        for a in 0..ancilla_dim {
            for tag in 0..2 {
                for bin in 0..2 {
                    let row = mapped.row((a * 2 + tag) * 2 + bin);
                    if tag == 1 {
                        tag_weight += row.norm_squared();
                    } else {
                        for c in 0..q {
                            next[(a, c * 2 + bin)] = row[c];
                        }
                    }
                }
            }
        }
        if tag_weight > TAG_TOL {
            return Err(Error::TagNotReset(tag_weight));
        }
        joint = next;
    }
    finish(joint, vec![2; unitaries.len()], phi_f)
}

// ---------------------------------------------------------------------------
// Gate chains

/// A two-qudit gate on sites `(first, second)` (0-based). The matrix acts on
/// `first ⊗ second` with `first` as the slow index.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoSiteGate {
    pub first: usize,
    pub second: usize,
    pub matrix: CMatrix,
}

impl TwoSiteGate {
    pub fn new(first: usize, second: usize, matrix: CMatrix) -> Result<TwoSiteGate> {
        if first == second {
            return Err(Error::InvalidParameter(format!("gate acts twice on site {first}")));
        }
        let residual = unitarity_residual(&matrix);
        if residual > UNITARY_TOL {
            return Err(Error::NotUnitary(residual));
        }
        Ok(TwoSiteGate { first, second, matrix })
    }
}

/// One sequential sweep of nearest-neighbour gates `(k, k+1)`, with `k`
/// strictly increasing, optionally followed by a gate coupling the last and
/// the first site.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct GateLayer {
    pub gates: Vec<TwoSiteGate>,
    /// Gate on `(n−1, 0)` applied after the sweep.
    pub wrap: Option<CMatrix>,
}

impl GateLayer {
    pub fn new(gates: Vec<TwoSiteGate>) -> GateLayer {
        GateLayer { gates, wrap: None }
    }

    /// A full sweep `(0,1), (1,2), …, (n−2, n−1)` from a list of `n−1` gates.
    pub fn sweep(matrices: Vec<CMatrix>) -> Result<GateLayer> {
        let gates = matrices
            .into_iter()
            .enumerate()
            .map(|(k, m)| TwoSiteGate::new(k, k + 1, m))
            .collect::<Result<Vec<_>>>()?;
        Ok(GateLayer::new(gates))
    }

    pub fn with_wrap(mut self, gate: CMatrix) -> GateLayer {
        self.wrap = Some(gate);
        self
    }

    fn validate(&self, n: usize) -> Result<()> {
        let mut last: Option<usize> = None;
        for g in &self.gates {
            if g.second != g.first + 1 || g.second >= n {
                return Err(Error::GateOrder(format!(
                    "gate on ({}, {}) is not a nearest-neighbour pair of a {n}-site chain",
                    g.first, g.second
                )));
            }
            if last.is_some_and(|l| g.first <= l) {
                return Err(Error::GateOrder(format!("gate on ({}, {}) out of order", g.first, g.second)));
            }
            last = Some(g.first);
        }
        if let Some(w) = &self.wrap {
            let residual = unitarity_residual(w);
            if residual > UNITARY_TOL {
                return Err(Error::NotUnitary(residual));
            }
            if n < 3 {
                return Err(Error::GateOrder("wrap gate needs at least three sites".into()));
            }
        }
        Ok(())
    }
}

/// Applies a gate on an arbitrary pair of sites of a flat register vector.
pub fn apply_two_site(dims: &[usize], amps: &CVector, first: usize, second: usize, gate: &CMatrix) -> Result<CVector> {
    let n = dims.len();
    if first >= n || second >= n || first == second {
        return Err(Error::ShapeMismatch(format!("gate sites ({first}, {second}) on {n} sites")));
    }
    let (d1, d2) = (dims[first], dims[second]);
    if gate.shape() != (d1 * d2, d1 * d2) {
        return Err(Error::ShapeMismatch(format!("gate {:?} on sites of dims {d1}, {d2}", gate.shape())));
    }
    let strides: Vec<usize> = (0..n).map(|k| dims[k + 1..].iter().product()).collect();
    let (s1, s2) = (strides[first], strides[second]);
    let mut out = CVector::zeros(amps.len());
    for idx in 0..amps.len() {
        let x1 = (idx / s1) % d1;
        let x2 = (idx / s2) % d2;
        if x1 != 0 || x2 != 0 {
            continue;
        }
        // `idx` is a base index with both target digits zero.
        for r1 in 0..d1 {
            for r2 in 0..d2 {
                let mut acc = C64::new(0.0, 0.0);
                for c1 in 0..d1 {
                    for c2 in 0..d2 {
                        acc += gate[(r1 * d2 + r2, c1 * d2 + c2)] * amps[idx + c1 * s1 + c2 * s2];
                    }
                }
                out[idx + r1 * s1 + r2 * s2] = acc;
            }
        }
    }
    Ok(out)
}

/// Applies `gates` in order without ordering constraints.
pub fn run_gate_sequence(initial: &PureState, gates: &[TwoSiteGate]) -> Result<PureState> {
    let dims = initial.dims().to_vec();
    let mut amps = initial.amplitudes().clone();
    for g in gates {
        amps = apply_two_site(&dims, &amps, g.first, g.second, &g.matrix)?;
    }
    PureState::from_unnormalized(dims, amps).map(|(s, _)| s)
}

/// Applies each layer's sweep, then its wrap gate, to a dense `n`-site
/// register.
pub fn run_qubit_chain(n: usize, layers: &[GateLayer], initial: &PureState) -> Result<PureState> {
    if initial.n_sites() != n {
        return Err(Error::ShapeMismatch(format!("initial state has {} sites, chain has {n}", initial.n_sites())));
    }
    let dims = initial.dims().to_vec();
    let mut amps = initial.amplitudes().clone();
    for layer in layers {
        layer.validate(n)?;
        for g in &layer.gates {
            amps = apply_two_site(&dims, &amps, g.first, g.second, &g.matrix)?;
        }
        if let Some(w) = &layer.wrap {
            amps = apply_two_site(&dims, &amps, n - 1, 0, w)?;
        }
    }
    PureState::from_unnormalized(dims, amps).map(|(s, _)| s)
}

/// The same sweep simulated with a qubit ancilla: gate `k` acts on
/// (qubit k, ancilla) and is followed by SWAP(ancilla, qubit k+1). The
/// ancilla and qubits `2 … n` start in `|0⟩`; `first` is qubit 1.
///
/// Returns the register, after checking that the ancilla ends in `|0⟩`.
pub fn run_ancilla_swap_chain(gates: &[CMatrix], first: &CVector) -> Result<PureState> {
    let n = gates.len() + 1;
    let zero = basis_vector(2, 0);
    let mut factors = vec![first.clone()];
    factors.extend(std::iter::repeat_n(zero.clone(), n));
    let joint = PureState::product(&factors)?;
    let dims = joint.dims().to_vec();
    let ancilla = n;
    let swap = crate::recipes::gates::swap();
    let mut amps = joint.into_amplitudes();
    for (k, g) in gates.iter().enumerate() {
        let residual = unitarity_residual(g);
        if residual > UNITARY_TOL {
            return Err(Error::NotUnitary(residual));
        }
        amps = apply_two_site(&dims, &amps, k, ancilla, g)?;
        amps = apply_two_site(&dims, &amps, ancilla, k + 1, &swap)?;
    }
    // Ancilla is the fastest index: keep the even entries.
    let register = CVector::from_iterator(amps.len() / 2, amps.iter().step_by(2).copied());
    let weight = register.norm_squared();
    if (weight - 1.0).abs() > DECOUPLING_TOL {
        return Err(Error::UnexpectedForm(format!("ancilla not returned to |0⟩ (weight {weight})")));
    }
    PureState::from_unnormalized(vec![2; n], register).map(|(s, _)| s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs_diff, real_matrix};
    use crate::random::{random_qubit_state, random_unitary, seeded};
    use crate::state::fidelity;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn single_emission_to_excited_level() {
        // |a⟩ → c|a⟩|0⟩ + s|b⟩|1⟩, |b⟩ → |b⟩|0⟩ with c = 0, s = 1.
        let v = real_matrix(4, 2, &[0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 0.0]);
        let plan = GenerationPlan::new(2, 2, vec![v], basis_vector(2, 0), basis_vector(2, 1)).unwrap();
        let out = run_plan(&plan).unwrap();
        assert_eq!(out.qubits, PureState::basis(vec![2], &[1]).unwrap());
        assert!(out.decoupled);
        assert!(max_abs_diff(
            &CMatrix::from_column_slice(2, 1, out.ancilla_out.as_slice()),
            &real_matrix(2, 1, &[0.0, 1.0])
        ) < 1e-14);
    }

    #[test]
    fn trivial_plan_emits_zeros() {
        let v = real_matrix(2, 1, &[1.0, 0.0]);
        let one = basis_vector(1, 0);
        let plan = GenerationPlan::new(1, 2, vec![v; 4], one.clone(), one).unwrap();
        let out = run_plan(&plan).unwrap();
        assert_eq!(out.qubits, PureState::zeros(4));
        assert!(out.decoupled && (out.purity - 1.0).abs() < 1e-15);
    }

    #[test]
    fn non_isometric_step_is_rejected() {
        let v = real_matrix(2, 1, &[1.0, 0.5]);
        let one = basis_vector(1, 0);
        let plan = GenerationPlan::new(1, 2, vec![v], one.clone(), one).unwrap();
        assert!(matches!(run_plan(&plan), Err(Error::NotIsometric { step: 1, .. })));
    }

    #[test]
    fn identity_emitter_emits_zeros() {
        let u = CMatrix::identity(4, 4);
        let out = run_standard_map(2, &vec![u; 3], &basis_vector(2, 1), None).unwrap();
        assert_eq!(fidelity(&out.qubits, &PureState::zeros(3)).unwrap(), 1.0);
        assert!(out.decoupled);
    }

    #[test]
    fn t_is_a_permutation_fixing_bin_zero_tag_zero() {
        let t = standard_map_t(2);
        assert!(unitarity_residual(&t) == 0.0);
        // |a′=1, tag=1, bin=0⟩ → |a′=1, tag=0, bin=1⟩.
        assert_eq!(t[((1 * 2) * 2 + 1, (1 * 2 + 1) * 2)], c(1.0));
    }

    #[test]
    fn emitter_and_induced_plan_agree() {
        let mut rng = seeded(31);
        for dim in [1, 2, 3] {
            let us: Vec<CMatrix> = (0..5).map(|_| random_unitary(&mut rng, 2 * dim)).collect();
            let phi_i = basis_vector(dim, 0);
            let direct = run_standard_map(dim, &us, &phi_i, None).unwrap();
            let steps: Vec<CMatrix> = us.iter().map(|u| standard_map_isometry(u).unwrap()).collect();
            let phi_f = direct.ancilla_out.clone();
            let plan = GenerationPlan::new(dim, 2, steps, phi_i, phi_f).unwrap();
            let via_plan = run_plan(&plan).unwrap();
            assert!(fidelity(&direct.qubits, &via_plan.qubits).unwrap() > 1.0 - 1e-10);
        }
    }

    #[test]
    fn unitary_for_isometry_roundtrips() {
        let mut rng = seeded(32);
        let v = random_unitary(&mut rng, 4).columns(0, 2).into_owned();
        let u = standard_map_unitary_for(&v).unwrap();
        assert!(unitarity_residual(&u) < 1e-14);
        assert!(max_abs_diff(&standard_map_isometry(&u).unwrap(), &v) == 0.0);
    }

    #[test]
    fn swap_layer_moves_first_qubit_to_the_end() {
        let mut rng = seeded(33);
        let q = random_qubit_state(&mut rng, 1);
        let mut factors = vec![q.amplitudes().clone()];
        factors.extend(std::iter::repeat_n(basis_vector(2, 0), 4));
        let initial = PureState::product(&factors).unwrap();
        let layer = GateLayer::sweep(vec![crate::recipes::gates::swap(); 4]).unwrap();
        let out = run_qubit_chain(5, &[layer], &initial).unwrap();
        let mut expected = vec![basis_vector(2, 0); 4];
        expected.push(q.amplitudes().clone());
        let expected = PureState::product(&expected).unwrap();
        assert!(fidelity(&out, &expected).unwrap() > 1.0 - 1e-14);
    }

    #[test]
    fn gate_order_is_enforced() {
        let id = CMatrix::identity(4, 4);
        let bad = GateLayer::new(vec![
            TwoSiteGate::new(1, 2, id.clone()).unwrap(),
            TwoSiteGate::new(0, 1, id.clone()).unwrap(),
        ]);
        assert!(matches!(run_qubit_chain(3, &[bad], &PureState::zeros(3)), Err(Error::GateOrder(_))));
        let far = GateLayer::new(vec![TwoSiteGate::new(0, 2, id).unwrap()]);
        assert!(matches!(run_qubit_chain(3, &[far], &PureState::zeros(3)), Err(Error::GateOrder(_))));
        assert!(matches!(TwoSiteGate::new(0, 1, CMatrix::zeros(4, 4)), Err(Error::NotUnitary(_))));
    }

    #[test]
    fn chain_equals_ancilla_swap_simulation() {
        let mut rng = seeded(34);
        for n in 2..=6 {
            let gates: Vec<CMatrix> = (0..n - 1).map(|_| random_unitary(&mut rng, 4)).collect();
            let q = random_qubit_state(&mut rng, 1);
            let mut factors = vec![q.amplitudes().clone()];
            factors.extend(std::iter::repeat_n(basis_vector(2, 0), n - 1));
            let initial = PureState::product(&factors).unwrap();
            let direct = run_qubit_chain(n, &[GateLayer::sweep(gates.clone()).unwrap()], &initial).unwrap();
            let via_ancilla = run_ancilla_swap_chain(&gates, q.amplitudes()).unwrap();
            assert!(fidelity(&direct, &via_ancilla).unwrap() > 1.0 - 1e-10);
        }
    }

    #[test]
    fn measurement_of_product_joint() {
        let mut rng = seeded(35);
        let psi = random_qubit_state(&mut rng, 3);
        let joint = JointState::new(2, vec![2; 3], basis_vector(2, 0).kronecker(psi.amplitudes())).unwrap();
        let h = 0.5f64.sqrt();
        let plus = CVector::from_vec(vec![c(h), c(h)]);
        let minus = CVector::from_vec(vec![c(h), c(-h)]);
        let m = measure_ancilla(&joint, [&plus, &minus], 0).unwrap();
        assert!((m.probability - 0.5).abs() < 1e-14);
        assert!(fidelity(m.post_state.as_ref().unwrap(), &psi).unwrap() > 1.0 - 1e-14);

        let one = JointState::new(2, vec![2; 3], basis_vector(2, 1).kronecker(psi.amplitudes())).unwrap();
        let (e0, e1) = (basis_vector(2, 0), basis_vector(2, 1));
        let zero = measure_ancilla(&one, [&e0, &e1], 0).unwrap();
        assert_eq!(zero.probability, 0.0);
        assert!(matches!(zero.state(), Err(Error::ZeroProbability)));
        assert_eq!(outcome_probability(&one, &e0), 0.0);
        assert!(measure_ancilla(&one, [&e0, &e0], 1).is_err());
    }
}
