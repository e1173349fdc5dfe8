use thiserror::Error;

/// Errors from symbol and scalar arithmetic.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("phase-space mismatch: {left} vs {right} coordinates")]
    SpaceMismatch { left: usize, right: usize },
    #[error("coordinate index {index} out of range for {dim} coordinates")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("substitution for coordinate {index} has degree {degree}, expected at most 1")]
    NonLinearSubstitution { index: usize, degree: u32 },
    #[error("expected a point with {expected} components, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

/// Expression parse failures. `pos` is a byte offset into the input.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown variable `{name}` at {pos}")]
    UnknownVariable { pos: usize, name: String },
    #[error("divisor at {pos} is not a nonzero constant")]
    BadDivisor { pos: usize },
    #[error("exponent at {pos} is not a nonnegative integer")]
    BadExponent { pos: usize },
}

impl ParseError {
    pub fn pos(&self) -> usize {
        match self {
            ParseError::Syntax { pos, .. }
            | ParseError::UnknownVariable { pos, .. }
            | ParseError::BadDivisor { pos }
            | ParseError::BadExponent { pos } => *pos,
        }
    }
}

/// Violations of the constraint-set requirements.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructureError {
    #[error("bad constraint shape: {0}")]
    BadShape(String),
    #[error("constraint matrix has rank {rank}, expected {expected}")]
    RankDeficient { rank: usize, expected: usize },
    #[error("constraint bracket matrix C is singular (constraints are not second class)")]
    SecondClassViolation,
    #[error("transform does not preserve the symplectic form")]
    SymplecticViolation,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DynamicsError {
    #[error("initial point is off the constraint surface (residual {residual:e})")]
    InitialConditionOffM { residual: f64 },
    #[error("quantum evolution needs a hamiltonian of degree at most 2, got {degree}")]
    DegreeUnsupported { degree: u32 },
    #[error("hamiltonian must be hbar-free with real coefficients")]
    NonClassicalHamiltonian,
    #[error("invalid integration parameters: {0}")]
    BadStep(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}
