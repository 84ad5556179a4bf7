//! JSON interchange for states, MPS and generation plans.
//!
//! Complex numbers are `[re, im]` pairs of full-precision doubles; matrices
//! are lists of rows. Formats:
//!
//! * state: `{"n", "dims", "amps"}`
//! * MPS: `{"n", "dims", "sites", "phi_I", "phi_F"}` with `sites[k][i]` the
//!   matrix `A^i_[k+1]`
//! * plan: `{"D", "local_dim", "steps", "phi_I", "phi_F", "declared_fidelity"}`

use serde::{Deserialize, Serialize};

use crate::compiler::GenerationPlan;
use crate::error::{Error, Result};
use crate::mps::MatrixProductState;
use crate::state::PureState;
use crate::{CMatrix, CVector, C64};

type Pair = [f64; 2];

#[derive(Serialize, Deserialize)]
struct StateDoc {
    n: usize,
    dims: Vec<usize>,
    amps: Vec<Pair>,
}

#[derive(Serialize, Deserialize)]
struct MpsDoc {
    n: usize,
    dims: Vec<usize>,
    sites: Vec<Vec<Vec<Vec<Pair>>>>,
    #[serde(rename = "phi_I")]
    phi_i: Vec<Pair>,
    #[serde(rename = "phi_F")]
    phi_f: Vec<Pair>,
}

#[derive(Serialize, Deserialize)]
struct PlanDoc {
    #[serde(rename = "D")]
    ancilla_dim: usize,
    local_dim: usize,
    steps: Vec<Vec<Vec<Pair>>>,
    #[serde(rename = "phi_I")]
    phi_i: Vec<Pair>,
    #[serde(rename = "phi_F")]
    phi_f: Vec<Pair>,
    declared_fidelity: f64,
}

fn pair(z: &C64) -> Pair {
    [z.re, z.im]
}

fn complex(p: &Pair) -> Result<C64> {
    if !(p[0].is_finite() && p[1].is_finite()) {
        return Err(Error::InvalidParameter("non-finite amplitude".into()));
    }
    Ok(C64::new(p[0], p[1]))
}

fn vector_out(v: &CVector) -> Vec<Pair> {
    v.iter().map(pair).collect()
}

fn vector_in(v: &[Pair]) -> Result<CVector> {
    Ok(CVector::from_vec(v.iter().map(complex).collect::<Result<Vec<_>>>()?))
}

fn matrix_out(m: &CMatrix) -> Vec<Vec<Pair>> {
    m.row_iter().map(|row| row.iter().map(pair).collect()).collect()
}

fn matrix_in(rows: &[Vec<Pair>]) -> Result<CMatrix> {
    let cols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != cols) {
        return Err(Error::ShapeMismatch("ragged matrix rows".into()));
    }
    let mut m = CMatrix::zeros(rows.len(), cols);
    for (r, row) in rows.iter().enumerate() {
        for (c, p) in row.iter().enumerate() {
            m[(r, c)] = complex(p)?;
        }
    }
    Ok(m)
}

fn check_n(n: usize, dims: &[usize]) -> Result<()> {
    if n != dims.len() {
        return Err(Error::ShapeMismatch(format!("n = {n} but {} dims given", dims.len())));
    }
    Ok(())
}

pub fn state_to_json(state: &PureState) -> String {
    let doc = StateDoc { n: state.n_sites(), dims: state.dims().to_vec(), amps: vector_out(state.amplitudes()) };
    serde_json::to_string_pretty(&doc).expect("state serializes")
}

/// Parses a state; the amplitudes must already be normalized.
pub fn state_from_json(text: &str) -> Result<PureState> {
    let doc: StateDoc = serde_json::from_str(text)?;
    check_n(doc.n, &doc.dims)?;
    PureState::new(doc.dims, vector_in(&doc.amps)?)
}

pub fn mps_to_json(mps: &MatrixProductState) -> String {
    let doc = MpsDoc {
        n: mps.n_sites(),
        dims: mps.local_dims(),
        sites: mps.sites().iter().map(|site| site.iter().map(matrix_out).collect()).collect(),
        phi_i: vector_out(mps.phi_i()),
        phi_f: vector_out(mps.phi_f()),
    };
    serde_json::to_string_pretty(&doc).expect("mps serializes")
}

pub fn mps_from_json(text: &str) -> Result<MatrixProductState> {
    let doc: MpsDoc = serde_json::from_str(text)?;
    check_n(doc.n, &doc.dims)?;
    if doc.sites.len() != doc.n {
        return Err(Error::ShapeMismatch(format!("n = {} but {} sites given", doc.n, doc.sites.len())));
    }
    let mut sites = Vec::with_capacity(doc.n);
    for (k, site) in doc.sites.iter().enumerate() {
        if site.len() != doc.dims[k] {
            return Err(Error::ShapeMismatch(format!("site {} has {} matrices, dim {}", k + 1, site.len(), doc.dims[k])));
        }
        sites.push(site.iter().map(|m| matrix_in(m)).collect::<Result<Vec<_>>>()?);
    }
    MatrixProductState::new(sites, vector_in(&doc.phi_i)?, vector_in(&doc.phi_f)?)
}

pub fn plan_to_json(plan: &GenerationPlan) -> String {
    let doc = PlanDoc {
        ancilla_dim: plan.ancilla_dim,
        local_dim: plan.local_dim,
        steps: plan.steps.iter().map(matrix_out).collect(),
        phi_i: vector_out(&plan.phi_i),
        phi_f: vector_out(&plan.phi_f),
        declared_fidelity: plan.declared_fidelity,
    };
    serde_json::to_string_pretty(&doc).expect("plan serializes")
}

pub fn plan_from_json(text: &str) -> Result<GenerationPlan> {
    let doc: PlanDoc = serde_json::from_str(text)?;
    let steps = doc.steps.iter().map(|m| matrix_in(m)).collect::<Result<Vec<_>>>()?;
    let mut plan = GenerationPlan::new(doc.ancilla_dim, doc.local_dim, steps, vector_in(&doc.phi_i)?, vector_in(&doc.phi_f)?)?;
    if !(0.0..=1.0 + 1e-12).contains(&doc.declared_fidelity) {
        return Err(Error::InvalidParameter(format!("declared_fidelity {} outside [0, 1]", doc.declared_fidelity)));
    }
    plan.declared_fidelity = doc.declared_fidelity;
    Ok(plan)
}
