//! The bidifferential star product with a constant kernel, the Moyal
//! bracket, and reduction of symbols to class representatives on the
//! constraint surface.
//!
//! For polynomial symbols the exponential series
//! `Σ_k (iħ/2)^k / k! · P_k(A, B)`, with
//! `P_k = (Σ_ij K_ij ∂_i ⊗ ∂_j)^k (A ⊗ B)` evaluated on the diagonal,
//! terminates at `k = min(deg A, deg B)`, so every result here is exact.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::bracket::{check_dim, dirac};
use crate::constraint::DiracStructure;
use crate::error::AlgebraError;
use crate::matrix::QMatrix;
use crate::scalar::Scalar;
use crate::symbol::{HbarPoly, Monomial, Symbol};

/// Sparse element of `Poly ⊗ Poly`, keyed by (left, right) monomial pairs.
struct Tensor {
    terms: BTreeMap<(Monomial, Monomial), HbarPoly>,
}

impl Tensor {
    fn pair(a: &Symbol, b: &Symbol) -> Tensor {
        let mut terms = BTreeMap::new();
        for (ma, pa) in a.iter() {
            for (mb, pb) in b.iter() {
                terms.insert((ma.clone(), mb.clone()), pa.mul(pb));
            }
        }
        Tensor { terms }
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Applies `Σ K_ij ∂_i ⊗ ∂_j` once.
    fn apply(&self, kernel: &[(usize, usize, Scalar)]) -> Tensor {
        let mut terms: BTreeMap<(Monomial, Monomial), HbarPoly> = BTreeMap::new();
        for ((ml, mr), poly) in &self.terms {
            for (i, j, k) in kernel {
                let (Some((el, dl)), Some((er, dr))) = (ml.derivative(*i), mr.derivative(*j)) else {
                    continue;
                };
                let factor = k * &Scalar::from((el * er) as i64);
                let entry = terms.entry((dl, dr)).or_default();
                for (h, c) in poly.iter() {
                    entry.add_term(h, &factor * c);
                }
            }
        }
        terms.retain(|_, p| !p.is_zero());
        Tensor { terms }
    }

    /// Multiplies the factors back together (`ζ = ξ = z`).
    fn diagonal(&self, dim: usize) -> Symbol {
        let mut out = Symbol::zero(dim);
        for ((ml, mr), poly) in &self.terms {
            let m = ml.mul(mr);
            for (h, c) in poly.iter() {
                out.add_term(m.clone(), h, c.clone());
            }
        }
        out
    }
}

fn kernel_entries(kernel: &QMatrix) -> Vec<(usize, usize, Scalar)> {
    let mut out = Vec::new();
    for i in 0..kernel.rows() {
        for j in 0..kernel.cols() {
            let v = &kernel[(i, j)];
            if !v.is_zero() {
                out.push((i, j, Scalar::real(v.clone())));
            }
        }
    }
    out
}

/// Star product for an arbitrary constant kernel.
pub fn star_with_kernel(a: &Symbol, b: &Symbol, kernel: &QMatrix) -> Result<Symbol, AlgebraError> {
    a.check_same_space(b)?;
    check_dim(a, kernel.rows())?;
    let dim = a.dim();
    let entries = kernel_entries(kernel);
    let half_i = &Scalar::ratio(1, 2) * &Scalar::i();

    let mut out = Symbol::zero(dim);
    let mut term = Tensor::pair(a, b);
    // (iħ/2)^k / k!, the ħ^k factor applied by shifting.
    let mut weight = Scalar::from_int(1);
    let mut k: u32 = 0;
    while !term.is_zero() {
        let pk = term.diagonal(dim).scale(&weight).mul_hbar_power(k);
        out = out + pk;
        term = term.apply(&entries);
        k += 1;
        let inv_k = Scalar::real(BigRational::new(BigInt::from(1), BigInt::from(k)));
        weight = &(&weight * &half_i) * &inv_k;
    }
    Ok(out)
}

/// Star product with the Dirac kernel `J^D`.
pub fn star(a: &Symbol, b: &Symbol, ds: &DiracStructure) -> Result<Symbol, AlgebraError> {
    star_with_kernel(a, b, ds.jd())
}

/// Ordinary Moyal star product on an unconstrained phase space.
pub fn star_standard(a: &Symbol, b: &Symbol) -> Result<Symbol, AlgebraError> {
    star_with_kernel(a, b, &QMatrix::symplectic(a.dim() / 2))
}

/// `(A*B - B*A) / (iħ)`.
pub fn moyal_with_kernel(a: &Symbol, b: &Symbol, kernel: &QMatrix) -> Result<Symbol, AlgebraError> {
    let commutator = star_with_kernel(a, b, kernel)? - star_with_kernel(b, a, kernel)?;
    let shifted = commutator.div_hbar_power(1).expect("star commutator has no hbar^0 part");
    Ok(shifted.scale(&-Scalar::i()))
}

pub fn moyal(a: &Symbol, b: &Symbol, ds: &DiracStructure) -> Result<Symbol, AlgebraError> {
    moyal_with_kernel(a, b, ds.jd())
}

pub fn moyal_standard(a: &Symbol, b: &Symbol) -> Result<Symbol, AlgebraError> {
    moyal_with_kernel(a, b, &QMatrix::symplectic(a.dim() / 2))
}

/// `moyal(A, B) - dirac(A, B)`.
pub fn moyal_dirac_defect(a: &Symbol, b: &Symbol, ds: &DiracStructure) -> Result<Symbol, AlgebraError> {
    Ok(moyal(a, b, ds)? - dirac(a, b, ds)?)
}

/// A symbol class on the constraint surface, held by its canonical
/// representative (no pivot coordinates).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivalenceClass<'a> {
    representative: Symbol,
    ds: &'a DiracStructure,
}

impl<'a> EquivalenceClass<'a> {
    pub fn representative(&self) -> &Symbol {
        &self.representative
    }

    pub fn into_representative(self) -> Symbol {
        self.representative
    }

    pub fn structure(&self) -> &'a DiracStructure {
        self.ds
    }
}

/// Eliminates pivot coordinates using the structure's dependent solution.
pub fn reduce_to_canonical<'a>(a: &Symbol, ds: &'a DiracStructure) -> Result<EquivalenceClass<'a>, AlgebraError> {
    check_dim(a, ds.space().dim())?;
    let representative = a.substitute_linear(ds.dependent_solution())?;
    Ok(EquivalenceClass { representative, ds })
}

/// Whether `A` and `B` agree on the constraint surface.
pub fn class_equal(a: &Symbol, b: &Symbol, ds: &DiracStructure) -> Result<bool, AlgebraError> {
    a.check_same_space(b)?;
    Ok(reduce_to_canonical(&(a - b), ds)?.representative.is_zero())
}
