//! Poisson and Dirac brackets as gradient contractions with a constant
//! antisymmetric kernel, plus the Jacobi cyclic sum.

use num_traits::Zero;

use crate::constraint::DiracStructure;
use crate::error::AlgebraError;
use crate::matrix::QMatrix;
use crate::scalar::Scalar;
use crate::star::moyal;
use crate::symbol::Symbol;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BracketKind {
    Poisson,
    Dirac,
    Moyal,
}

impl std::str::FromStr for BracketKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "poisson" => Ok(BracketKind::Poisson),
            "dirac" => Ok(BracketKind::Dirac),
            "moyal" => Ok(BracketKind::Moyal),
            other => Err(format!("unknown bracket kind `{other}`")),
        }
    }
}

pub(crate) fn check_dim(s: &Symbol, dim: usize) -> Result<(), AlgebraError> {
    if s.dim() == dim {
        Ok(())
    } else {
        Err(AlgebraError::SpaceMismatch { left: dim, right: s.dim() })
    }
}

/// `Σ_ij K_ij ∂_i A ∂_j B` for a constant kernel `K`.
pub fn contract(a: &Symbol, b: &Symbol, kernel: &QMatrix) -> Result<Symbol, AlgebraError> {
    a.check_same_space(b)?;
    check_dim(a, kernel.rows())?;
    let dim = a.dim();
    let grad_a = a.gradient();
    let grad_b = b.gradient();
    let mut out = Symbol::zero(dim);
    for (i, da) in grad_a.iter().enumerate() {
        if da.is_zero() {
            continue;
        }
        for (j, db) in grad_b.iter().enumerate() {
            let k = &kernel[(i, j)];
            if k.is_zero() || db.is_zero() {
                continue;
            }
            out = out + (da * db).scale(&Scalar::real(k.clone()));
        }
    }
    Ok(out)
}

/// Canonical Poisson bracket, `{q_k, p_k} = 1`.
pub fn poisson(a: &Symbol, b: &Symbol) -> Result<Symbol, AlgebraError> {
    a.check_same_space(b)?;
    if !a.dim().is_multiple_of(2) {
        return Err(AlgebraError::SpaceMismatch { left: a.dim() + 1, right: a.dim() });
    }
    contract(a, b, &QMatrix::symplectic(a.dim() / 2))
}

/// Dirac bracket via the precomputed kernel `J^D`.
pub fn dirac(a: &Symbol, b: &Symbol, ds: &DiracStructure) -> Result<Symbol, AlgebraError> {
    contract(a, b, ds.jd())
}

pub fn bracket(kind: BracketKind, a: &Symbol, b: &Symbol, ds: &DiracStructure) -> Result<Symbol, AlgebraError> {
    check_dim(a, ds.space().dim())?;
    match kind {
        BracketKind::Poisson => poisson(a, b),
        BracketKind::Dirac => dirac(a, b, ds),
        BracketKind::Moyal => moyal(a, b, ds),
    }
}

/// `{{A,B},C} + {{C,A},B} + {{B,C},A}`.
pub fn jacobi_defect(
    kind: BracketKind,
    a: &Symbol,
    b: &Symbol,
    c: &Symbol,
    ds: &DiracStructure,
) -> Result<Symbol, AlgebraError> {
    let br = |x: &Symbol, y: &Symbol| bracket(kind, x, y, ds);
    Ok(br(&br(a, b)?, c)? + br(&br(c, a)?, b)? + br(&br(b, c)?, a)?)
}
