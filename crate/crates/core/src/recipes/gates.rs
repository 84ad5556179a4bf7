//! Two-qubit gate library and ISWAP decompositions.
//!
//! Two-qubit matrices act on `first ⊗ second` with the first qubit as the
//! slow index. For atom ⊗ cavity this is the basis
//! `{|b,0⟩, |b,1⟩, |a,0⟩, |a,1⟩}`, i.e. `b ≡ 0`, `a ≡ 1` for the atom.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::{kron, max_abs_diff, real_matrix};
use crate::{CMatrix, C64};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GateName {
    Iswap,
    SqrtIswap,
    Swap,
    Cz,
    Cnot,
    Hadamard,
    /// `1 ⊗ H`.
    IdHadamard,
    Rz(f64),
}

impl fmt::Display for GateName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GateName::Iswap => write!(f, "iswap"),
            GateName::SqrtIswap => write!(f, "sqrt-iswap"),
            GateName::Swap => write!(f, "swap"),
            GateName::Cz => write!(f, "cz"),
            GateName::Cnot => write!(f, "cnot"),
            GateName::Hadamard => write!(f, "h"),
            GateName::IdHadamard => write!(f, "id-h"),
            GateName::Rz(phi) => write!(f, "rz({phi})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TwoQubitGate {
    pub name: GateName,
    /// 4×4, or 2×2 for single-qubit gates.
    pub matrix: CMatrix,
}

/// Looks up a gate by name; `rz` requires an angle.
pub fn gate(name: &str, angle: Option<f64>) -> Result<TwoQubitGate> {
    let name = match name.to_ascii_lowercase().as_str() {
        "iswap" => GateName::Iswap,
        "sqrt-iswap" | "sqrt_iswap" | "sqrtiswap" => GateName::SqrtIswap,
        "swap" => GateName::Swap,
        "cz" => GateName::Cz,
        "cnot" | "cx" => GateName::Cnot,
        "h" | "hadamard" => GateName::Hadamard,
        "id-h" | "1xh" => GateName::IdHadamard,
        "rz" => GateName::Rz(angle.ok_or_else(|| Error::InvalidParameter("rz needs an angle".into()))?),
        other => return Err(Error::InvalidParameter(format!("unknown gate {other:?}"))),
    };
    Ok(TwoQubitGate { name, matrix: matrix_of(name) })
}

pub fn matrix_of(name: GateName) -> CMatrix {
    match name {
        GateName::Iswap => iswap(),
        GateName::SqrtIswap => sqrt_iswap(),
        GateName::Swap => swap(),
        GateName::Cz => cz(),
        GateName::Cnot => cnot(),
        GateName::Hadamard => hadamard(),
        GateName::IdHadamard => kron(&CMatrix::identity(2, 2), &hadamard()),
        GateName::Rz(phi) => rz(phi),
    }
}

impl FromStr for GateName {
    type Err = Error;
    fn from_str(s: &str) -> Result<GateName> {
        gate(s, None).map(|g| g.name)
    }
}

fn i() -> C64 {
    C64::new(0.0, 1.0)
}

pub fn iswap() -> CMatrix {
    let mut m = CMatrix::identity(4, 4);
    m[(1, 1)] = C64::new(0.0, 0.0);
    m[(2, 2)] = C64::new(0.0, 0.0);
    m[(1, 2)] = i();
    m[(2, 1)] = i();
    m
}

/// `exp[iπ(|01⟩⟨10| + |10⟩⟨01|)/4]`.
pub fn sqrt_iswap() -> CMatrix {
    let mut m = CMatrix::identity(4, 4);
    m[(1, 1)] = C64::new(FRAC_1_SQRT_2, 0.0);
    m[(2, 2)] = C64::new(FRAC_1_SQRT_2, 0.0);
    m[(1, 2)] = C64::new(0.0, FRAC_PI_4.sin());
    m[(2, 1)] = C64::new(0.0, FRAC_PI_4.sin());
    m
}

pub fn swap() -> CMatrix {
    real_matrix(4, 4, &[1., 0., 0., 0., 0., 0., 1., 0., 0., 1., 0., 0., 0., 0., 0., 1.])
}

pub fn cz() -> CMatrix {
    real_matrix(4, 4, &[1., 0., 0., 0., 0., 1., 0., 0., 0., 0., 1., 0., 0., 0., 0., -1.])
}

/// Controlled NOT with the first qubit as control.
pub fn cnot() -> CMatrix {
    real_matrix(4, 4, &[1., 0., 0., 0., 0., 1., 0., 0., 0., 0., 0., 1., 0., 0., 1., 0.])
}

pub fn hadamard() -> CMatrix {
    real_matrix(2, 2, &[1., 1., 1., -1.]) * C64::new(FRAC_1_SQRT_2, 0.0)
}

/// `R_z(φ) = diag(e^{−iφ/2}, e^{iφ/2})`.
pub fn rz(phi: f64) -> CMatrix {
    let mut m = CMatrix::zeros(2, 2);
    m[(0, 0)] = C64::from_polar(1.0, -phi / 2.0);
    m[(1, 1)] = C64::from_polar(1.0, phi / 2.0);
    m
}

pub fn pauli_x() -> CMatrix {
    crate::linalg::pauli_x()
}

pub fn pauli_z() -> CMatrix {
    crate::linalg::pauli_z()
}

/// Known ISWAP decompositions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Decomposition {
    /// `ISWAP = i·SWAP·CZ·[R_z(π/2) ⊗ R_z(π/2)]`.
    CzForm,
    /// `ISWAP = i·SWAP·[R_z(π/2) ⊗ R_z(π/2)]·(1 ⊗ H)·CNOT·(1 ⊗ H)`.
    CnotForm,
}

/// Right-hand side of a decomposition with `R_z(φ)` in place of `R_z(π/2)`.
pub fn decomposition_rhs(id: Decomposition, phi: f64) -> CMatrix {
    let locals = kron(&rz(phi), &rz(phi));
    let ih = kron(&CMatrix::identity(2, 2), &hadamard());
    let core = match id {
        Decomposition::CzForm => cz() * locals,
        Decomposition::CnotForm => locals * &ih * cnot() * &ih,
    };
    swap() * core * i()
}

/// `max |ISWAP − RHS|` for the decomposition as stated.
pub fn verify_decomposition(id: Decomposition) -> f64 {
    max_abs_diff(&iswap(), &decomposition_rhs(id, FRAC_PI_2))
}

/// Block of a two-qubit matrix on `span{|01⟩, |10⟩}`.
pub fn swap_block(m: &CMatrix) -> CMatrix {
    CMatrix::from_fn(2, 2, |r, c| m[(r + 1, c + 1)])
}
