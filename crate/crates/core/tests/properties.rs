use proptest::prelude::*;

use seqgen::compiler::compile;
use seqgen::linalg::{basis_vector, hermiticity_residual, isometry_residual, kron, pauli_x, pauli_z};
use seqgen::physics::{
    adiabatic_hamiltonian, evolve, full_hamiltonian, resonant_block_deviation, selective_hamiltonian, CavityModel,
};
use seqgen::random::{random_matrix, random_mps, random_qubit_state, random_unitary, seeded};
use seqgen::recipes::gates::{iswap, sqrt_iswap};
use seqgen::recipes::{adiabatic_recipe, target_w_state, w_source_plan, RecipeKind, WParams};
use seqgen::sim::{outcome_probability, run_ancilla_swap_chain, run_standard_map, standard_map_isometry};
use seqgen::{
    fidelity, isometry_dims, mps_from_dense, mps_to_dense, run_plan, run_qubit_chain, schmidt_rank_at_cut, CMatrix,
    GateLayer, GenerationPlan, PureState, C64,
};

fn config() -> ProptestConfig {
    ProptestConfig { cases: 48, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn dense_roundtrip(seed in any::<u64>(), n in 1usize..=8) {
        let psi = random_qubit_state(&mut seeded(seed), n);
        let mps = mps_from_dense(&psi, 0.0).unwrap();
        let (back, _) = mps_to_dense(&mps).unwrap();
        prop_assert!(fidelity(&back, &psi).unwrap() >= 1.0 - 1e-10);
    }

    #[test]
    fn bond_profile_bounded(seed in any::<u64>(), n in 1usize..=8) {
        let psi = random_qubit_state(&mut seeded(seed), n);
        let bonds = mps_from_dense(&psi, 1e-12).unwrap().bond_profile();
        for (k, &r) in bonds.dims.iter().enumerate() {
            prop_assert!(r <= (1usize << k).min(1 << (n - k)));
        }
    }

    #[test]
    fn fidelity_symmetric_and_phase_blind(seed in any::<u64>(), n in 1usize..=5, phase in 0.0f64..6.3) {
        let mut rng = seeded(seed);
        let a = random_qubit_state(&mut rng, n);
        let b = random_qubit_state(&mut rng, n);
        let f = fidelity(&a, &b).unwrap();
        prop_assert!((f - fidelity(&b, &a).unwrap()).abs() < 1e-14);
        let rotated = a.with_phase(C64::from_polar(1.0, phase));
        prop_assert!((f - fidelity(&rotated, &b).unwrap()).abs() < 1e-13);
    }

    #[test]
    fn bonds_equal_schmidt_ranks(seed in any::<u64>(), n in 2usize..=7, bond in 1usize..=4) {
        // Low-rank states from random MPS so ranks are nontrivial.
        let (psi, _) = mps_to_dense(&random_mps(&mut seeded(seed), n, 2, bond)).unwrap();
        let bonds = mps_from_dense(&psi, 1e-10).unwrap().bond_profile();
        for cut in 1..n {
            prop_assert_eq!(bonds.dims[cut], schmidt_rank_at_cut(&psi, cut, 1e-10).unwrap());
        }
    }

    #[test]
    fn compiled_plans_regenerate(seed in any::<u64>(), n in 2usize..=7, bond in 1usize..=4) {
        let mps = random_mps(&mut seeded(seed), n, 2, bond);
        let c = compile(&mps, 1e-12).unwrap();
        let out = run_plan(&c.plan).unwrap();
        let (target, _) = mps_to_dense(&mps).unwrap();
        prop_assert!(fidelity(&out.qubits, &target).unwrap() >= 1.0 - 1e-10);
        prop_assert!(out.purity >= 1.0 - 1e-10);
        prop_assert!(out.final_overlap >= 1.0 - 1e-10);
        for step in &c.plan.steps {
            prop_assert!(isometry_residual(step) <= 1e-12);
        }
        let shapes: Vec<_> = c.raw_steps.iter().map(|v| v.matrix.shape()).collect();
        prop_assert_eq!(shapes, isometry_dims(n, c.plan.ancilla_dim));
    }

    #[test]
    fn compilation_is_gauge_independent(seed in any::<u64>(), n in 3usize..=6) {
        let mut rng = seeded(seed);
        let mps = random_mps(&mut rng, n, 2, 2);
        let bond = 1 + (seed as usize) % (n - 1);
        let dim = mps.bond_profile().dims[bond];
        let x = random_matrix(&mut rng, dim, dim);
        let mut gauged = mps.clone();
        gauged.insert_gauge(bond, &x).unwrap();
        let a = run_plan(&compile(&mps, 1e-12).unwrap().plan).unwrap();
        let b = run_plan(&compile(&gauged, 1e-12).unwrap().plan).unwrap();
        prop_assert!(fidelity(&a.qubits, &b.qubits).unwrap() >= 1.0 - 1e-10);
    }

    #[test]
    fn standard_map_matches_induced_plan(seed in any::<u64>(), dim in 1usize..=3, n in 1usize..=6) {
        let mut rng = seeded(seed);
        let us: Vec<CMatrix> = (0..n).map(|_| random_unitary(&mut rng, 2 * dim)).collect();
        let phi_i = basis_vector(dim, 0);
        let direct = run_standard_map(dim, &us, &phi_i, None).unwrap();
        let steps = us.iter().map(|u| standard_map_isometry(u).unwrap()).collect();
        let plan = GenerationPlan::new(dim, 2, steps, phi_i, direct.ancilla_out.clone()).unwrap();
        prop_assert!(fidelity(&direct.qubits, &run_plan(&plan).unwrap().qubits).unwrap() >= 1.0 - 1e-10);
    }

    #[test]
    fn ancilla_swap_matches_chain(seed in any::<u64>(), n in 2usize..=6) {
        let mut rng = seeded(seed);
        let gates: Vec<CMatrix> = (0..n - 1).map(|_| random_unitary(&mut rng, 4)).collect();
        let first = random_qubit_state(&mut rng, 1);
        let mut factors = vec![first.amplitudes().clone()];
        factors.extend(std::iter::repeat_n(basis_vector(2, 0), n - 1));
        let initial = PureState::product(&factors).unwrap();
        let chain = run_qubit_chain(n, &[GateLayer::sweep(gates.clone()).unwrap()], &initial).unwrap();
        let via = run_ancilla_swap_chain(&gates, first.amplitudes()).unwrap();
        prop_assert!(fidelity(&chain, &via).unwrap() >= 1.0 - 1e-10);
    }

    #[test]
    fn layers_bound_schmidt_rank(seed in any::<u64>(), n in 2usize..=7, m in 1usize..=2) {
        let mut rng = seeded(seed);
        let layers: Vec<GateLayer> = (0..m)
            .map(|_| GateLayer::sweep((0..n - 1).map(|_| random_unitary(&mut rng, 4)).collect()).unwrap())
            .collect();
        let out = run_qubit_chain(n, &layers, &PureState::zeros(n)).unwrap();
        for cut in 1..n {
            prop_assert!(schmidt_rank_at_cut(&out, cut, 1e-10).unwrap() <= 1 << (2 * m - 1));
        }
    }

    #[test]
    fn measurement_is_complete(seed in any::<u64>(), dim in 1usize..=2, n in 1usize..=4) {
        let mut rng = seeded(seed);
        let us: Vec<CMatrix> = (0..n).map(|_| random_unitary(&mut rng, 2 * dim)).collect();
        let out = run_standard_map(dim, &us, &basis_vector(dim, 0), None).unwrap();
        let basis = random_unitary(&mut rng, dim);
        let total: f64 = (0..dim).map(|k| outcome_probability(&out.joint, &basis.column(k).into_owned())).sum();
        prop_assert!((total - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn hamiltonians_hermitian_and_evolution_unitary(
        g in 0.1f64..2.0, omega in 0.1f64..2.0, delta in 5.0f64..300.0, small in -0.1f64..0.1, t in 0.0f64..50.0,
    ) {
        let model = CavityModel::new(g, omega, delta, 4).unwrap().with_small_detuning(small);
        let full = full_hamiltonian(&model).unwrap();
        prop_assert!(hermiticity_residual(&full) <= 1e-14);
        prop_assert!(hermiticity_residual(&adiabatic_hamiltonian(&model).unwrap()) <= 1e-14);
        prop_assert!(hermiticity_residual(&selective_hamiltonian(&model).unwrap()) <= 1e-14);
        let psi = basis_vector(full.nrows(), model.full_index(1, 0));
        let out = evolve(&full, t, &psi).unwrap();
        prop_assert!((out.norm() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn resonant_block_is_exact(g in 0.1f64..2.0, omega in 0.1f64..2.0, delta in 5.0f64..300.0) {
        let model = CavityModel::new(g, omega, delta, 4).unwrap();
        prop_assert!(resonant_block_deviation(&model).unwrap() <= 1e-14);
    }

    #[test]
    fn w_routes_agree(seed in any::<u64>(), n in 2usize..=7) {
        let mut rng = seeded(seed);
        use rand::Rng;
        let thetas: Vec<f64> = (1..n).map(|_| rng.random_range(0.05..1.5)).collect();
        let phis: Vec<f64> = (1..n).map(|_| rng.random_range(-3.0..3.0)).collect();
        let p = WParams::new(thetas.clone(), phis.clone()).unwrap();
        let target = target_w_state(&p).unwrap();
        let source = run_plan(&w_source_plan(&p).unwrap()).unwrap().qubits;
        let adiabatic = adiabatic_recipe(RecipeKind::W, n, &thetas, &phis).unwrap().run().unwrap().qubits;
        prop_assert!(fidelity(&source, &target).unwrap() >= 1.0 - 1e-10);
        prop_assert!(fidelity(&adiabatic, &target).unwrap() >= 1.0 - 1e-10);
        prop_assert!(fidelity(&adiabatic, &source).unwrap() >= 1.0 - 1e-10);
    }
}

#[test]
fn sqrt_iswap_acts_trivially_outside_the_swap_block() {
    let sq = sqrt_iswap();
    for k in [0, 3] {
        let e = basis_vector(4, k);
        assert!(((&sq * &e) - &e).norm() <= 1e-15);
    }
    let twice = &sq * &sq;
    for r in 1..3 {
        for c in 1..3 {
            assert!((twice[(r, c)] - iswap()[(r, c)]).norm() <= 1e-12);
        }
    }
}

#[test]
fn pauli_strings_via_kron() {
    // Local expectation helper agrees with the dense operator.
    let psi = random_qubit_state(&mut seeded(8), 2);
    let op = kron(&pauli_x(), &pauli_z());
    let dense = (psi.amplitudes().adjoint() * &op * psi.amplitudes())[(0, 0)];
    let local = psi.expectation(&[(0, pauli_x()), (1, pauli_z())]).unwrap();
    assert!((dense - local).norm() < 1e-14);
}
