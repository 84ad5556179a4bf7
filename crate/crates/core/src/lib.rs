//! Sequential generation of matrix-product states.
//!
//! The crate turns an arbitrary pure multi-qubit state into a matrix-product
//! state, compiles that MPS into a sequence of `dD × D` source isometries
//! whose ancilla decouples after the last emission, and simulates the
//! generation scenarios that realise such sequences:
//!
//! * an ancilla driven by arbitrary isometries ([`sim::run_plan`]),
//! * a `2D`-level emitter restricted to the fixed standard emission map
//!   ([`sim::run_standard_map`]),
//! * nearest-neighbour gate chains without an ancilla ([`sim::run_qubit_chain`]).
//!
//! [`recipes`] holds closed-form W, GHZ and cluster targets together with the
//! explicit source, adiabatic-passage and atom/cavity gate sequences that
//! produce them. [`physics`] and [`polarization`] check that the cavity-QED
//! Hamiltonians behind those gates do what the recipes assume.
//!
//! # Ordering conventions
//!
//! Registers are stored with site 1 (the first generated qubit) as the
//! slowest-varying index. A ket written right-to-left in generation order,
//! `|i_n … i_1⟩`, therefore has amplitude index `i_1 i_2 … i_n` read as a
//! big-endian number. Site tensors `A^i_[k]` map bond `k-1` to bond `k`, so the
//! amplitude of `i_1 … i_n` is `⟨φ_F| A^{i_n}_[n] ⋯ A^{i_1}_[1] |φ_I⟩`.
//! Isometry rows are indexed `(α, i)` as `α·d + i`: ancilla slow, qubit fast.

pub mod compiler;
pub mod error;
pub mod io;
pub mod linalg;
pub mod mps;
pub mod physics;
pub mod polarization;
pub mod random;
pub mod recipes;
pub mod sim;
pub mod state;

pub use compiler::{
    compile, compile_plan, compile_with_ancilla, embed_isometry, isometry_dims, verify_plan,
    Compilation, GenerationPlan, Isometry, PlanVerification,
};
pub use error::{Error, Result};
pub use mps::{mps_from_dense, mps_to_dense, BondProfile, MatrixProductState};
pub use num_complex::Complex64 as C64;
pub use sim::{
    measure_ancilla, run_plan, run_qubit_chain, run_standard_map, GateLayer, JointState,
    RunOutcome, TwoSiteGate,
};
pub use state::{fidelity, schmidt_rank_at_cut, PureState};

/// Dense complex matrix used throughout the crate.
pub type CMatrix = nalgebra::DMatrix<C64>;
/// Dense complex column vector.
pub type CVector = nalgebra::DVector<C64>;
