//! Linear second-class constraint sets and the derived Dirac structure.
//!
//! Constraints are homogeneous linear forms `Φ_μ = Σ_i α_μi z_i`. For such
//! constraints every bracket matrix is constant, so all conditions are
//! checked once, globally, at construction.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::StructureError;
use crate::matrix::QMatrix;
use crate::symbol::{PhaseSpace, Symbol};

/// A validated `2m × 2n` constraint matrix of full row rank, `0 < 2m < 2n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstraintSet {
    space: PhaseSpace,
    alpha: QMatrix,
}

impl ConstraintSet {
    pub fn new(space: PhaseSpace, alpha: QMatrix) -> Result<Self, StructureError> {
        let (rows, cols) = (alpha.rows(), alpha.cols());
        if cols != space.dim() {
            return Err(StructureError::BadShape(format!(
                "constraint rows have {cols} entries, phase space has {} coordinates",
                space.dim()
            )));
        }
        if rows == 0 || rows % 2 != 0 {
            return Err(StructureError::BadShape(format!("need a positive even number of constraints, got {rows}")));
        }
        if rows >= cols {
            return Err(StructureError::BadShape(format!(
                "{rows} constraints leave no reduced phase space in {cols} dimensions"
            )));
        }
        let rank = alpha.rank();
        if rank < rows {
            return Err(StructureError::RankDeficient { rank, expected: rows });
        }
        Ok(ConstraintSet { space, alpha })
    }

    pub fn space(&self) -> PhaseSpace {
        self.space
    }

    pub fn alpha(&self) -> &QMatrix {
        &self.alpha
    }

    /// Number of constraints, `2m`.
    pub fn len(&self) -> usize {
        self.alpha.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `C = α J αᵀ`, the Poisson brackets `{Φ_μ, Φ_ν}`.
    pub fn bracket_matrix(&self) -> QMatrix {
        let j = QMatrix::symplectic(self.space.pairs());
        &(&self.alpha * &j) * &self.alpha.transpose()
    }

    pub fn symbols(&self) -> Vec<Symbol> {
        (0..self.len()).map(|mu| Symbol::linear(self.alpha.row(mu))).collect()
    }
}

/// Exact data for Dirac brackets on a linearly constrained phase space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiracStructure {
    constraints: ConstraintSet,
    c: QMatrix,
    c_inv: QMatrix,
    jd: QMatrix,
    pivot_columns: Vec<usize>,
    dependent_solution: BTreeMap<usize, Symbol>,
}

/// Validates `alpha` and builds the Dirac structure over `space`.
pub fn build_dirac_structure(space: PhaseSpace, alpha: QMatrix) -> Result<DiracStructure, StructureError> {
    DiracStructure::new(ConstraintSet::new(space, alpha)?)
}

impl DiracStructure {
    pub fn new(constraints: ConstraintSet) -> Result<Self, StructureError> {
        let space = constraints.space();
        let alpha = constraints.alpha();
        let j = QMatrix::symplectic(space.pairs());
        let c = constraints.bracket_matrix();
        let c_inv = c.inverse().ok_or(StructureError::SecondClassViolation)?;

        // JD = J - (J αᵀ) C⁻¹ (α J)
        let j_at = &j * &alpha.transpose();
        let a_j = alpha * &j;
        let jd = &j - &(&(&j_at * &c_inv) * &a_j);

        let echelon = alpha.echelon();
        let dim = space.dim();
        let mut dependent_solution = BTreeMap::new();
        for (r, &p) in echelon.pivots.iter().enumerate() {
            // z_p = -Σ_{free f} R[r][f] z_f
            let coeffs: Vec<BigRational> =
                (0..dim)
                    .map(|f| {
                        if echelon.pivots.contains(&f) {
                            BigRational::zero()
                        } else {
                            -echelon.reduced[(r, f)].clone()
                        }
                    })
                    .collect();
            dependent_solution.insert(p, Symbol::linear(&coeffs));
        }

        Ok(DiracStructure { pivot_columns: echelon.pivots, constraints, c, c_inv, jd, dependent_solution })
    }

    pub fn space(&self) -> PhaseSpace {
        self.constraints.space()
    }

    pub fn constraints(&self) -> &ConstraintSet {
        &self.constraints
    }

    pub fn alpha(&self) -> &QMatrix {
        self.constraints.alpha()
    }

    pub fn c(&self) -> &QMatrix {
        &self.c
    }

    pub fn c_inv(&self) -> &QMatrix {
        &self.c_inv
    }

    /// The Dirac kernel `J^D_ij = {z_i, z_j}_D`.
    pub fn jd(&self) -> &QMatrix {
        &self.jd
    }

    /// Coordinates eliminated when solving `α z = 0`, ascending.
    pub fn pivot_columns(&self) -> &[usize] {
        &self.pivot_columns
    }

    /// Each pivot coordinate as a linear form in the free coordinates.
    pub fn dependent_solution(&self) -> &BTreeMap<usize, Symbol> {
        &self.dependent_solution
    }

    pub fn free_columns(&self) -> Vec<usize> {
        (0..self.space().dim()).filter(|c| !self.pivot_columns.contains(c)).collect()
    }

    pub fn constraint_symbols(&self) -> Vec<Symbol> {
        self.constraints.symbols()
    }

    /// `JD · αᵀ`; zero for every valid structure.
    pub fn nullspace_defect(&self) -> QMatrix {
        &self.jd * &self.alpha().transpose()
    }

    pub fn jd_rank(&self) -> usize {
        self.jd.rank()
    }

    /// Rebuilds the structure in coordinates `z' = S z`, i.e. with
    /// constraints `α' = α S⁻¹`. `S` must preserve `J` exactly.
    pub fn apply_symplectic_transform(&self, s: &QMatrix) -> Result<DiracStructure, StructureError> {
        let dim = self.space().dim();
        if s.rows() != dim || s.cols() != dim || !is_symplectic(s) {
            return Err(StructureError::SymplecticViolation);
        }
        let s_inv = s.inverse().ok_or(StructureError::SymplecticViolation)?;
        let alpha = self.alpha() * &s_inv;
        build_dirac_structure(self.space(), alpha)
    }
}

/// `S J Sᵀ = J`.
pub fn is_symplectic(s: &QMatrix) -> bool {
    if !s.is_square() || !s.rows().is_multiple_of(2) {
        return false;
    }
    let j = QMatrix::symplectic(s.rows() / 2);
    &(s * &j) * &s.transpose() == j
}

fn small_rational(rng: &mut ChaCha8Rng, nonzero: bool) -> BigRational {
    loop {
        let num: i64 = rng.random_range(-3..=3);
        let den: i64 = rng.random_range(1..=3);
        if !nonzero || num != 0 {
            return BigRational::new(BigInt::from(num), BigInt::from(den));
        }
    }
}

/// Deterministic pseudo-random symplectic matrix: a product of 5 to 15
/// elementary generators (rational pair rotations, `q_k += c p_k` shears,
/// pair swaps and two-pair mixing shears).
pub fn random_symplectic(space: PhaseSpace, seed: u64) -> QMatrix {
    let n = space.pairs();
    let dim = space.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let count = rng.random_range(5..=15);
    let mut s = QMatrix::identity(dim);
    for _ in 0..count {
        let mut g = QMatrix::identity(dim);
        let k = rng.random_range(0..n);
        let kind = if n >= 2 { rng.random_range(0..4) } else { rng.random_range(0..2) };
        match kind {
            0 => {
                // Cayley-parametrized rotation: cos = (1-t²)/(1+t²), sin = 2t/(1+t²).
                let t = small_rational(&mut rng, false);
                let d = BigRational::one() + &t * &t;
                let cos = (BigRational::one() - &t * &t) / &d;
                let sin = (BigRational::from_integer(2.into()) * &t) / &d;
                g[(2 * k, 2 * k)] = cos.clone();
                g[(2 * k, 2 * k + 1)] = sin.clone();
                g[(2 * k + 1, 2 * k)] = -sin;
                g[(2 * k + 1, 2 * k + 1)] = cos;
            }
            1 => {
                g[(2 * k, 2 * k + 1)] = small_rational(&mut rng, true);
            }
            2 => {
                let l = (k + rng.random_range(1..n)) % n;
                for a in [2 * k, 2 * k + 1] {
                    let b = a - 2 * k + 2 * l;
                    g[(a, a)] = BigRational::zero();
                    g[(b, b)] = BigRational::zero();
                    g[(a, b)] = BigRational::one();
                    g[(b, a)] = BigRational::one();
                }
            }
            _ => {
                // q_k += c p_l, q_l += c p_k
                let l = (k + rng.random_range(1..n)) % n;
                let c = small_rational(&mut rng, true);
                g[(2 * k, 2 * l + 1)] = c.clone();
                g[(2 * l, 2 * k + 1)] = c;
            }
        }
        s = &g * &s;
    }
    assert!(is_symplectic(&s), "generator product lost the symplectic form");
    s
}
