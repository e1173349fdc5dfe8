//! JSON problem files.
//!
//! ```json
//! {
//!   "name": "S1",
//!   "n": 2,
//!   "constraints": [["0", "0", "1", "0"], ["0", "0", "0", "1"]],
//!   "hamiltonian": "(p1^2 + p2^2 + q1^2 + q2^2)/2"
//! }
//! ```
//!
//! Constraint entries are rational strings; JSON numbers are refused so
//! that every input stays exact.

use std::path::Path;

use serde::Deserialize;

use crate::matrix::QMatrix;
use crate::parse::{parse_rational, parse_symbol};
use crate::symbol::{PhaseSpace, Symbol};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub n: usize,
    pub constraints: Vec<Vec<String>>,
    #[serde(default)]
    pub hamiltonian: Option<String>,
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub description: Option<String>,
}

/// A problem file whose entries have been parsed. Rank and second-class
/// conditions are not checked here.
#[derive(Debug, Clone)]
pub struct Problem {
    pub name: Option<String>,
    pub space: PhaseSpace,
    pub alpha: QMatrix,
    pub hamiltonian: Option<Symbol>,
}

#[derive(Debug)]
pub enum LoadError {
    Io(String),
    Invalid(String),
}

impl std::fmt::Display for LoadError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LoadError::Io(m) | LoadError::Invalid(m) => f.write_str(m),
        }
    }
}

pub fn load_problem(path: &Path) -> Result<Problem, LoadError> {
    let text = std::fs::read_to_string(path).map_err(|e| LoadError::Io(format!("{}: {e}", path.display())))?;
    parse_problem(&text).map_err(|e| match e {
        LoadError::Invalid(m) => LoadError::Invalid(format!("{}: {m}", path.display())),
        other => other,
    })
}

pub fn parse_problem(text: &str) -> Result<Problem, LoadError> {
    let file: ProblemFile = serde_json::from_str(text).map_err(|e| LoadError::Invalid(e.to_string()))?;
    if file.n == 0 {
        return Err(LoadError::Invalid("`n` must be positive".into()));
    }
    let space = PhaseSpace::new(file.n);
    let dim = space.dim();
    let mut rows = Vec::with_capacity(file.constraints.len());
    for (r, row) in file.constraints.iter().enumerate() {
        if row.len() != dim {
            return Err(LoadError::Invalid(format!("constraints[{r}] has {} entries, expected {dim}", row.len())));
        }
        let parsed = row
            .iter()
            .enumerate()
            .map(|(c, s)| {
                parse_rational(s)
                    .ok_or_else(|| LoadError::Invalid(format!("constraints[{r}][{c}]: malformed rational `{s}`")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(parsed);
    }
    if rows.is_empty() {
        return Err(LoadError::Invalid("no constraints given".into()));
    }
    let hamiltonian = file
        .hamiltonian
        .as_deref()
        .map(|h| parse_symbol(h, space).map_err(|e| LoadError::Invalid(format!("hamiltonian: {e}"))))
        .transpose()?;
    Ok(Problem { name: file.name, space, alpha: QMatrix::from_rows(rows), hamiltonian })
}
