//! Named entangled states and the explicit sequences that generate them.

pub mod atomic;
pub mod gates;
pub mod photonic;

pub use atomic::{atomic_cluster_sequence, atomic_ghz_sequence, atomic_w_cascade, AtomicClusterSequence};
pub use gates::{gate, verify_decomposition, Decomposition, GateName, TwoQubitGate};
pub use photonic::{
    adiabatic_recipe, cluster_state, ghz_state, rotation_u, target_w_state, uniform_cluster_state,
    w_source_plan, AtomicRecipe, Level, RecipeKind, WParams,
};
