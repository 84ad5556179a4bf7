//! Atomic registers built by atoms crossing a cavity one at a time.
//!
//! Atomic qubits use `|a⟩ ≡ |0⟩`, `|b⟩ ≡ |1⟩`; the cavity qubit is its Fock
//! state `|0⟩` or `|1⟩`.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};

use super::gates::{cnot, iswap, pauli_x, pauli_z, rz, sqrt_iswap, swap};
use crate::error::{Error, Result};
use crate::linalg::{basis_vector, kron};
use crate::sim::{apply_two_site, run_gate_sequence, GateLayer, JointState, TwoSiteGate};
use crate::state::PureState;
use crate::{CMatrix, CVector, C64};

fn check_n(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("sequence needs n >= 2, got {n}")));
    }
    Ok(())
}

fn plus() -> CVector {
    CVector::from_element(2, C64::new(FRAC_1_SQRT_2, 0.0))
}

/// The √ISWAP on (atom, cavity) in the atomic encoding `a ≡ 0`: it couples
/// `|a,0⟩ ↔ |b,1⟩` and fixes `|a,1⟩`, `|b,0⟩`.
pub fn atom_cavity_sqrt_iswap() -> CMatrix {
    let x = kron(&pauli_x(), &CMatrix::identity(2, 2));
    &x * sqrt_iswap() * &x
}

/// Cavity (ancilla, initially empty) and `n − 1` atoms in `|a⟩`; atom `k`
/// crosses the cavity and undergoes the √ISWAP. Amplitude `1/√2^{n−1}` stays
/// on `|0⟩|a…a⟩` and atom `k` carries the excitation with amplitude
/// `i/√2^k` next to a one-photon cavity.
///
/// The joint state has the cavity as ancilla and atoms `1 … n−1` as the
/// register.
pub fn atomic_w_cascade(n: usize) -> Result<JointState> {
    check_n(n)?;
    let atoms = n - 1;
    let dims = vec![2; n];
    let mut amps = CVector::zeros(1 << n);
    amps[0] = C64::new(1.0, 0.0);
    let gate = atom_cavity_sqrt_iswap();
    for k in 1..=atoms {
        amps = apply_two_site(&dims, &amps, k, 0, &gate)?;
    }
    JointState::new(2, vec![2; atoms], amps)
}

/// Closed-form cascade amplitudes, indexed like [`atomic_w_cascade`].
pub fn atomic_w_cascade_closed_form(n: usize) -> Result<JointState> {
    check_n(n)?;
    let atoms = n - 1;
    let mut amps = CVector::zeros(1 << n);
    amps[0] = C64::new(0.5f64.powf(atoms as f64 / 2.0), 0.0);
    for k in 1..=atoms {
        let idx = (1 << atoms) | (1 << (atoms - k));
        amps[idx] = C64::new(0.0, 0.5f64.powf(k as f64 / 2.0));
    }
    JointState::new(2, vec![2; atoms], amps)
}

/// Direct atom–atom sequence for a GHZ state: atom 1 in `(|a⟩+|b⟩)/√2`, the
/// others in `|a⟩`, and `SWAP·CNOT` on each neighbouring pair.
pub fn atomic_ghz_sequence(n: usize) -> Result<(PureState, GateLayer)> {
    check_n(n)?;
    let mut factors = vec![plus()];
    factors.extend(std::iter::repeat_n(basis_vector(2, 0), n - 1));
    let initial = PureState::product(&factors)?;
    let layer = GateLayer::sweep(vec![swap() * cnot(); n - 1])?;
    Ok((initial, layer))
}

/// Cavity-mediated cluster sequence on `n` atoms.
///
/// System 0 is the cavity, systems `1 … n` the atoms. The cavity and atoms
/// `1 … n−1` start in `|+⟩`, atom `n` in `|0⟩`; the ISWAP acts on
/// (cavity, atom k) for `k = 1 … n`, after which the cavity is back in `|0⟩`.
/// The local phases of the ISWAP are then removed from the atoms alone.
#[derive(Clone, Debug)]
pub struct AtomicClusterSequence {
    pub initial: PureState,
    pub gates: Vec<TwoSiteGate>,
    /// Single-atom corrections `(system, unitary)` applied at the end.
    pub compensation: Vec<(usize, CMatrix)>,
}

impl AtomicClusterSequence {
    pub fn n_atoms(&self) -> usize {
        self.initial.n_sites() - 1
    }

    /// Runs the gates, optionally the compensation, and returns the atomic
    /// register after checking that the cavity ended empty.
    pub fn run(&self, compensate: bool) -> Result<PureState> {
        let mut state = run_gate_sequence(&self.initial, &self.gates)?;
        if compensate {
            for (site, u) in &self.compensation {
                let amps = state.apply_local(*site, u)?;
                state = PureState::from_unnormalized(state.dims().to_vec(), amps)?.0;
            }
        }
        let joint = JointState::new(2, vec![2; self.n_atoms()], state.into_amplitudes())?;
        let (atoms, p) = joint.project_ancilla(&basis_vector(2, 0))?;
        if (p - 1.0).abs() > 1e-10 {
            return Err(Error::UnexpectedForm(format!("cavity left with photon weight {}", 1.0 - p)));
        }
        Ok(atoms)
    }
}

pub fn atomic_cluster_sequence(n: usize) -> Result<AtomicClusterSequence> {
    check_n(n)?;
    let mut factors = vec![plus(); n];
    factors.push(basis_vector(2, 0));
    let initial = PureState::product(&factors)?;
    let gates = (1..=n).map(|k| TwoSiteGate::new(0, k, iswap())).collect::<Result<Vec<_>>>()?;
    let z = pauli_z();
    let compensation = (1..=n)
        .map(|k| {
            let u = if k == 1 {
                &z * rz(-FRAC_PI_2)
            } else if k < n {
                &z * rz(-PI)
            } else {
                rz(-PI)
            };
            (k, u)
        })
        .collect();
    Ok(AtomicClusterSequence { initial, gates, compensation })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::recipes::photonic::{ghz_state, uniform_cluster_state};
    use crate::sim::run_qubit_chain;
    use crate::state::fidelity;

    #[test]
    fn w_cascade_two_and_three() {
        let h = FRAC_1_SQRT_2;
        let two = atomic_w_cascade(2).unwrap();
        // |0⟩|a⟩ and |1⟩|b⟩.
        assert!((two.amplitudes[0] - C64::new(h, 0.0)).norm() < 1e-15);
        assert!((two.amplitudes[3] - C64::new(0.0, h)).norm() < 1e-15);
        let three = atomic_w_cascade(3).unwrap();
        // Register order: atom 1, atom 2.
        assert!((three.amplitudes[0] - C64::new(0.5, 0.0)).norm() < 1e-15);
        assert!((three.amplitudes[0b101] - C64::new(0.0, 0.5)).norm() < 1e-15);
        assert!((three.amplitudes[0b110] - C64::new(0.0, h)).norm() < 1e-15);
    }

    #[test]
    fn ghz_sequence() {
        for n in 2..=5 {
            let (initial, layer) = atomic_ghz_sequence(n).unwrap();
            let out = run_qubit_chain(n, &[layer], &initial).unwrap();
            assert!(fidelity(&out, &ghz_state(n).unwrap()).unwrap() > 1.0 - 1e-12);
        }
        let (_, layer) = atomic_ghz_sequence(3).unwrap();
        let flat = run_qubit_chain(3, &[layer], &PureState::zeros(3)).unwrap();
        assert_eq!(flat, PureState::zeros(3));
    }

    #[test]
    fn cluster_sequence() {
        for n in 2..=5 {
            let seq = atomic_cluster_sequence(n).unwrap();
            let out = seq.run(true).unwrap();
            assert!(fidelity(&out, &uniform_cluster_state(n).unwrap()).unwrap() > 1.0 - 1e-10);
            let raw = seq.run(false).unwrap();
            assert!(fidelity(&raw, &uniform_cluster_state(n).unwrap()).unwrap() < 1.0 - 1e-3);
        }
    }
}
