//! Compilation of matrix-product states into sequential generation plans.
//!
//! A plan is a `D`-level ancilla, an initial ancilla state `φ_I`, and one
//! isometry per emitted qudit mapping ancilla → ancilla ⊗ qudit. Isometry rows
//! are indexed `(α, i) ↦ α·d + i` (ancilla slow, emitted qudit fast) and
//! columns by the incoming ancilla level.
//!
//! The construction runs backwards from the last site. With `M_[n+1] = ⟨φ_F|`,
//! each step forms `(M_[k+1] ⊗ 1) A_[k]`, takes its SVD `U Σ W†`, keeps the
//! left factor (completed to the scheduled width) as `V'_[k]` and carries
//! `M_[k] = V'_[k]† (M_[k+1] ⊗ 1) A_[k]` to the next step. Finally
//! `φ_I ∝ M_[1] |φ̃_I⟩` and `φ_F = |0⟩`.

use crate::error::{Error, Result};
use crate::linalg::{basis_vector, complete_orthonormal, isometry_residual, Svd};
use crate::mps::{mps_to_dense, MatrixProductState};
use crate::sim::{run_plan, RunOutcome};
use crate::state::{fidelity, PureState};
use crate::{CMatrix, CVector};

/// Isometry tolerance enforced on compiled steps.
pub const ISOMETRY_TOL: f64 = 1e-12;

/// Relative singular-value cutoff used when counting ranks during compilation.
pub const RANK_TOL: f64 = 1e-12;

/// A single compiled step before embedding.
#[derive(Clone, Debug, PartialEq)]
pub struct Isometry {
    pub matrix: CMatrix,
    /// 1-based index of the site this step emits.
    pub step_index: usize,
}

impl Isometry {
    pub fn new(matrix: CMatrix, step_index: usize) -> Result<Isometry> {
        if matrix.nrows() < matrix.ncols() {
            return Err(Error::ShapeMismatch(format!("isometry cannot be {:?}", matrix.shape())));
        }
        let residual = isometry_residual(&matrix);
        if residual > ISOMETRY_TOL {
            return Err(Error::NotIsometric { step: step_index, residual });
        }
        Ok(Isometry { matrix, step_index })
    }

    pub fn shape(&self) -> (usize, usize) {
        self.matrix.shape()
    }
}

/// Ancilla-driven generation plan with `d·D × D` steps.
#[derive(Clone, Debug, PartialEq)]
pub struct GenerationPlan {
    pub ancilla_dim: usize,
    pub local_dim: usize,
    pub steps: Vec<CMatrix>,
    pub phi_i: CVector,
    pub phi_f: CVector,
    /// Product over the compilation of the retained squared singular-value
    /// weight; 1 for exact compilations.
    pub declared_fidelity: f64,
}

impl GenerationPlan {
    /// Checks shapes only; isometry is checked when the plan runs.
    pub fn new(ancilla_dim: usize, local_dim: usize, steps: Vec<CMatrix>, phi_i: CVector, phi_f: CVector) -> Result<Self> {
        let plan = GenerationPlan { ancilla_dim, local_dim, steps, phi_i, phi_f, declared_fidelity: 1.0 };
        plan.check_shapes()?;
        Ok(plan)
    }

    pub fn check_shapes(&self) -> Result<()> {
        let (d, dim) = (self.local_dim, self.ancilla_dim);
        if d == 0 || dim == 0 {
            return Err(Error::InvalidParameter("plan dimensions must be positive".into()));
        }
        if self.steps.is_empty() {
            return Err(Error::InvalidParameter("plan has no steps".into()));
        }
        for (k, step) in self.steps.iter().enumerate() {
            if step.shape() != (d * dim, dim) {
                return Err(Error::ShapeMismatch(format!(
                    "step {} is {:?}, expected ({}, {dim})",
                    k + 1,
                    step.shape(),
                    d * dim
                )));
            }
        }
        for (name, v) in [("phi_I", &self.phi_i), ("phi_F", &self.phi_f)] {
            if v.len() != dim {
                return Err(Error::ShapeMismatch(format!("{name} has length {}, ancilla has {dim}", v.len())));
            }
            let norm = v.norm();
            if (norm - 1.0).abs() > crate::state::NORM_TOL {
                return Err(Error::NotNormalized(norm));
            }
        }
        Ok(())
    }

    pub fn n_steps(&self) -> usize {
        self.steps.len()
    }

    /// `max |V†V − I|` per step.
    pub fn isometry_residuals(&self) -> Vec<f64> {
        self.steps.iter().map(isometry_residual).collect()
    }
}

/// Output of a compilation: the plan and the un-embedded steps.
#[derive(Clone, Debug)]
pub struct Compilation {
    pub plan: GenerationPlan,
    /// `V'_[1] … V'_[n]` in emission order.
    pub raw_steps: Vec<Isometry>,
    /// Norm of `M_[1] |φ̃_I⟩` before normalization.
    pub raw_norm: f64,
}

/// Pre-embedding step shapes, listed for steps `1 … n`.
///
/// Step `n − k` has shape `d·min(D, d^k) × min(D, d^{k+1})` with `d = 2`.
pub fn isometry_dims(n: usize, ancilla_dim: usize) -> Vec<(usize, usize)> {
    isometry_dims_local(n, ancilla_dim, 2)
}

/// [`isometry_dims`] for local dimension `d`.
pub fn isometry_dims_local(n: usize, ancilla_dim: usize, d: usize) -> Vec<(usize, usize)> {
    let capped_pow = |k: usize| -> usize {
        let mut v = 1usize;
        for _ in 0..k {
            v = v.saturating_mul(d);
            if v >= ancilla_dim {
                return ancilla_dim;
            }
        }
        v.min(ancilla_dim)
    };
    (1..=n).map(|step| {
        let k = n - step;
        (d * capped_pow(k), capped_pow(k + 1))
    })
    .collect()
}

/// Compiles with `D` equal to the largest bond dimension of `mps`.
pub fn compile_plan(mps: &MatrixProductState, tol: f64) -> Result<GenerationPlan> {
    compile(mps, tol).map(|c| c.plan)
}

/// Compiles with `D` equal to the largest bond dimension of `mps`.
pub fn compile(mps: &MatrixProductState, tol: f64) -> Result<Compilation> {
    let bonds = mps.bond_profile();
    compile_with_ancilla(mps, bonds.max(), tol)
}

/// Compiles onto an ancilla of dimension `ancilla_dim`.
///
/// Fails with [`Error::RankExceedsAncilla`] when an intermediate rank (counted
/// with relative cutoff `tol`) exceeds the scheduled width.
pub fn compile_with_ancilla(mps: &MatrixProductState, ancilla_dim: usize, tol: f64) -> Result<Compilation> {
    if !(tol >= 0.0 && tol.is_finite()) {
        return Err(Error::InvalidTolerance(tol));
    }
    if ancilla_dim == 0 {
        return Err(Error::InvalidParameter("ancilla dimension must be positive".into()));
    }
    let dims = mps.local_dims();
    let d = dims[0];
    if dims.iter().any(|&x| x != d) {
        return Err(Error::InvalidParameter(format!("plans need a uniform local dimension, got {dims:?}")));
    }
    let n = mps.n_sites();

    let mut m = CMatrix::from_row_slice(1, mps.phi_f().len(), &mps.phi_f().iter().map(|z| z.conj()).collect::<Vec<_>>());
    let mut raw_rev = Vec::with_capacity(n);
    let mut declared = 1.0;
    for k in (1..=n).rev() {
        let a = &mps.sites()[k - 1];
        let rows = m.nrows() * d;
        let cols = a[0].ncols();
        let mut lhs = CMatrix::zeros(rows, cols);
        for (i, ai) in a.iter().enumerate() {
            let prod = &m * ai;
            for g in 0..m.nrows() {
                lhs.set_row(g * d + i, &prod.row(g));
            }
        }
        let svd = Svd::new(&lhs);
        let rank = svd.rank(tol);
        let width = ancilla_dim.min(rows);
        if rank > width {
            return Err(Error::RankExceedsAncilla { step: k, rank, ancilla_dim: width });
        }
        let total: f64 = svd.sigma.iter().map(|s| s * s).sum();
        if total > 0.0 {
            let kept: f64 = svd.sigma[..rank].iter().map(|s| s * s).sum();
            declared *= kept / total;
        }
        let v = complete_orthonormal(&svd.u.columns(0, rank).into_owned(), width)?;
        m = v.adjoint() * &lhs;
        raw_rev.push(Isometry::new(v, k)?);
    }
    let raw_steps: Vec<Isometry> = raw_rev.into_iter().rev().collect();

    let start = &m * mps.phi_i();
    let raw_norm = start.norm();
    if raw_norm == 0.0 || !raw_norm.is_finite() {
        return Err(Error::ZeroNorm);
    }
    let mut phi_i = CVector::zeros(ancilla_dim);
    for (j, z) in start.iter().enumerate() {
        phi_i[j] = z / raw_norm;
    }
    let steps = raw_steps
        .iter()
        .map(|v| embed_isometry_local(&v.matrix, ancilla_dim, d))
        .collect::<Result<Vec<_>>>()?;
    let mut plan = GenerationPlan::new(ancilla_dim, d, steps, phi_i, basis_vector(ancilla_dim, 0))?;
    plan.declared_fidelity = declared;
    Ok(Compilation { plan, raw_steps, raw_norm })
}

/// Embeds an `r × c` isometry as the top-left block of a `2D × D` isometry.
pub fn embed_isometry(v: &CMatrix, ancilla_dim: usize) -> Result<CMatrix> {
    embed_isometry_local(v, ancilla_dim, 2)
}

/// [`embed_isometry`] for local dimension `d` (`d·D × D` output).
///
/// Because rows are ordered ancilla-slow, an input whose first `r/d` ancilla
/// levels are populated lands exactly in the top `r` rows. Missing columns
/// are completed by Gram–Schmidt over canonical basis vectors.
pub fn embed_isometry_local(v: &CMatrix, ancilla_dim: usize, d: usize) -> Result<CMatrix> {
    let (r, c) = v.shape();
    let rows = d * ancilla_dim;
    if r > rows || c > ancilla_dim {
        return Err(Error::ShapeMismatch(format!("cannot embed {r}×{c} into {rows}×{ancilla_dim}")));
    }
    let residual = isometry_residual(v);
    if residual > ISOMETRY_TOL {
        return Err(Error::NotIsometric { step: 0, residual });
    }
    let mut padded = CMatrix::zeros(rows, c);
    padded.view_mut((0, 0), (r, c)).copy_from(v);
    complete_orthonormal(&padded, ancilla_dim)
}

/// Result of running a plan against a target state.
#[derive(Clone, Debug)]
pub struct PlanVerification {
    pub fidelity: f64,
    pub decoupled: bool,
    pub purity: f64,
    /// `|⟨φ_F|ancilla_out⟩|²`.
    pub final_overlap: f64,
    pub isometry_residuals: Vec<f64>,
    pub outcome: RunOutcome,
}

/// Runs `plan` and compares its register output with `target`.
pub fn verify_plan(plan: &GenerationPlan, target: &PureState) -> Result<PlanVerification> {
    if plan.n_steps() != target.n_sites() || target.dims().iter().any(|&x| x != plan.local_dim) {
        return Err(Error::ShapeMismatch(format!(
            "plan emits {} qudits of dimension {}, target has dims {:?}",
            plan.n_steps(),
            plan.local_dim,
            target.dims()
        )));
    }
    let outcome = run_plan(plan)?;
    Ok(PlanVerification {
        fidelity: fidelity(&outcome.qubits, target)?,
        decoupled: outcome.decoupled,
        purity: outcome.purity,
        final_overlap: outcome.final_overlap,
        isometry_residuals: plan.isometry_residuals(),
        outcome,
    })
}

/// Fidelity between the plan output and the dense contraction of `mps`.
pub fn plan_fidelity(plan: &GenerationPlan, mps: &MatrixProductState) -> Result<f64> {
    let (target, _) = mps_to_dense(mps)?;
    Ok(verify_plan(plan, &target)?.fidelity)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs_diff, real_matrix};
    use crate::mps::{mps_from_dense, DEFAULT_TOL};
    use crate::random::{random_matrix, random_mps, random_qubit_state, seeded};

    #[test]
    fn dimension_schedule_examples() {
        assert_eq!(isometry_dims(4, 2), vec![(4, 2), (4, 2), (4, 2), (2, 2)]);
        assert_eq!(isometry_dims(3, 8), vec![(8, 8), (4, 4), (2, 2)]);
        assert_eq!(isometry_dims(5, 4), vec![(8, 4), (8, 4), (8, 4), (4, 4), (2, 2)]);
        assert_eq!(isometry_dims(3, 1), vec![(2, 1); 3]);
    }

    #[test]
    fn product_state_compiles_to_trivial_columns() {
        let mps = mps_from_dense(&PureState::zeros(3), DEFAULT_TOL).unwrap();
        let c = compile(&mps, RANK_TOL).unwrap();
        assert_eq!(c.plan.ancilla_dim, 1);
        for step in &c.plan.steps {
            assert_eq!(step.shape(), (2, 1));
            assert!((step[(0, 0)].norm() - 1.0).abs() < 1e-14);
            assert!(step[(1, 0)].norm() < 1e-14);
        }
        let v = verify_plan(&c.plan, &PureState::zeros(3)).unwrap();
        assert!(v.decoupled && (v.fidelity - 1.0).abs() < 1e-12);
    }

    #[test]
    fn random_mps_compile_and_run() {
        let mut rng = seeded(21);
        for (n, dim) in [(3, 2), (5, 3), (6, 4), (8, 2)] {
            let mps = random_mps(&mut rng, n, 2, dim);
            let c = compile(&mps, RANK_TOL).unwrap();
            let shapes: Vec<_> = c.raw_steps.iter().map(Isometry::shape).collect();
            assert_eq!(shapes, isometry_dims(n, dim));
            for step in &c.plan.steps {
                assert!(isometry_residual(step) < ISOMETRY_TOL);
            }
            assert!(plan_fidelity(&c.plan, &mps).unwrap() > 1.0 - 1e-10);
            assert!((c.plan.declared_fidelity - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn too_small_ancilla_is_rejected() {
        let mut rng = seeded(22);
        let psi = random_qubit_state(&mut rng, 4);
        let mps = mps_from_dense(&psi, 0.0).unwrap();
        assert!(matches!(
            compile_with_ancilla(&mps, 2, RANK_TOL),
            Err(Error::RankExceedsAncilla { .. })
        ));
        assert!(compile_with_ancilla(&mps, 4, RANK_TOL).is_ok());
    }

    #[test]
    fn embedding_examples() {
        let e = embed_isometry(&CMatrix::identity(2, 2), 2).unwrap();
        assert_eq!(e.shape(), (4, 2));
        assert_eq!(e.rows(0, 2).into_owned(), CMatrix::identity(2, 2));

        let (c, s) = (0.6, 0.8);
        let col = real_matrix(2, 1, &[c, s]);
        let e = embed_isometry(&col, 2).unwrap();
        assert!(isometry_residual(&e) < 1e-15);
        assert_eq!(e.view((0, 0), (2, 1)).into_owned(), col);

        let mut rng = seeded(23);
        let v = random_matrix(&mut rng, 4, 2).qr().q();
        let e = embed_isometry(&v, 3).unwrap();
        assert_eq!(e.shape(), (6, 3));
        assert!(isometry_residual(&e) < 1e-14);
        assert!(max_abs_diff(&e.view((0, 0), (4, 2)).into_owned(), &v) == 0.0);

        assert!(embed_isometry(&CMatrix::identity(5, 2), 2).is_err());
        assert!(embed_isometry(&CMatrix::identity(3, 3), 2).is_err());
    }

    #[test]
    fn orthogonal_target_gives_zero() {
        let mps = mps_from_dense(&PureState::zeros(3), DEFAULT_TOL).unwrap();
        let plan = compile_plan(&mps, RANK_TOL).unwrap();
        let ones = PureState::basis(vec![2; 3], &[1, 1, 1]).unwrap();
        assert!(verify_plan(&plan, &ones).unwrap().fidelity < 1e-24);
        assert!(verify_plan(&plan, &PureState::zeros(4)).is_err());
    }
}
