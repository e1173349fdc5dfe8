//! Seeded generators of random symbols and constraint systems, used by the
//! property and acceptance tests.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::constraint::{build_dirac_structure, DiracStructure};
use crate::matrix::QMatrix;
use crate::scalar::Scalar;
use crate::symbol::{Monomial, PhaseSpace, Symbol};

pub type SampleRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Shape of generated symbols.
#[derive(Debug, Clone, Copy)]
pub struct SymbolShape {
    pub max_degree: u32,
    pub max_terms: usize,
    /// Highest `hbar` power; 0 for `hbar`-free symbols.
    pub max_hbar: u32,
    pub complex: bool,
}

impl SymbolShape {
    /// Real, `hbar`-free, degree ≤ `max_degree`.
    pub fn classical(max_degree: u32) -> Self {
        SymbolShape { max_degree, max_terms: 5, max_hbar: 0, complex: false }
    }
}

pub fn rational(rng: &mut SampleRng) -> BigRational {
    let num: i64 = rng.random_range(-5..=5);
    let den: i64 = rng.random_range(1..=4);
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

fn scalar(rng: &mut SampleRng, complex: bool) -> Scalar {
    let re = rational(rng);
    if complex && rng.random_bool(0.5) {
        Scalar::new(re, rational(rng))
    } else {
        Scalar::real(re)
    }
}

pub fn monomial(rng: &mut SampleRng, dim: usize, degree: u32) -> Monomial {
    let mut e = vec![0u32; dim];
    for _ in 0..degree {
        e[rng.random_range(0..dim)] += 1;
    }
    Monomial::from_exponents(e)
}

pub fn symbol(rng: &mut SampleRng, space: PhaseSpace, shape: SymbolShape) -> Symbol {
    let dim = space.dim();
    let count = rng.random_range(1..=shape.max_terms.max(1));
    let terms: Vec<_> = (0..count)
        .map(|_| {
            let deg = rng.random_range(0..=shape.max_degree);
            let h = rng.random_range(0..=shape.max_hbar);
            (monomial(rng, dim, deg), h, scalar(rng, shape.complex))
        })
        .collect();
    Symbol::from_terms(dim, terms)
}

/// Random `2m × 2n` integer constraint matrix that passes validation.
pub fn system(rng: &mut SampleRng, n: usize, m: usize) -> DiracStructure {
    let space = PhaseSpace::new(n);
    loop {
        let rows: Vec<Vec<BigRational>> = (0..2 * m)
            .map(|_| (0..2 * n).map(|_| BigRational::from_integer(BigInt::from(rng.random_range(-2i64..=2)))).collect())
            .collect();
        if let Ok(ds) = build_dirac_structure(space, QMatrix::from_rows(rows)) {
            return ds;
        }
    }
}

/// The two reference systems on `n = 2`: `S1` constrains `(q2, p2)` to
/// zero, `S2` imposes `q2 = q1`, `p2 = 0`.
pub fn reference_systems() -> [DiracStructure; 2] {
    let space = PhaseSpace::new(2);
    [
        build_dirac_structure(space, QMatrix::from_i64(&[&[0, 0, 1, 0], &[0, 0, 0, 1]])).expect("S1 is valid"),
        build_dirac_structure(space, QMatrix::from_i64(&[&[-1, 0, 1, 0], &[0, 0, 0, 1]])).expect("S2 is valid"),
    ]
}
