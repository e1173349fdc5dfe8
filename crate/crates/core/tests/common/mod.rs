//! Independent reference computations. None of these go through the
//! production star/Dirac code paths.

#![allow(dead_code)]

use std::path::PathBuf;

use dirac_moyal::bracket::poisson;
use dirac_moyal::sample::{self, SymbolShape};
use dirac_moyal::{DiracStructure, QMatrix, Scalar, Symbol};
use num_rational::BigRational;
use num_traits::Zero;

pub fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests").join("data").join(name)
}

fn multi_indices(dim: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|v| {
                (0..dim).map(move |i| {
                    let mut w = v.clone();
                    w.push(i);
                    w
                })
            })
            .collect();
    }
    out
}

fn partials(a: &Symbol, idx: &[usize]) -> Symbol {
    idx.iter().fold(a.clone(), |acc, &i| acc.partial(i).unwrap())
}

/// `P_k(A, B) = Σ_{i_1..i_k, j_1..j_k} Π_l K_{i_l j_l} ∂_{i_1..i_k} A ∂_{j_1..j_k} B`,
/// expanded over every index tuple.
pub fn bidifferential_power(a: &Symbol, b: &Symbol, kernel: &QMatrix, k: usize) -> Symbol {
    let dim = a.dim();
    let mut out = Symbol::zero(dim);
    let tuples = multi_indices(dim, k);
    for is in &tuples {
        let da = partials(a, is);
        if da.is_zero() {
            continue;
        }
        for js in &tuples {
            let mut w = BigRational::from_integer(1.into());
            for (i, j) in is.iter().zip(js) {
                w *= &kernel[(*i, *j)];
            }
            if w.is_zero() {
                continue;
            }
            let db = partials(b, js);
            out = out + (&da * &db).scale(&Scalar::real(w));
        }
    }
    out
}

fn factorial(k: usize) -> i64 {
    (1..=k as i64).product()
}

/// Exponential series `Σ_k (iħ/2)^k / k! P_k`, summed up to the degree bound.
pub fn star_oracle(a: &Symbol, b: &Symbol, kernel: &QMatrix) -> Symbol {
    let bound = a.degree().min(b.degree()) as usize;
    let mut out = Symbol::zero(a.dim());
    let mut half_i_pow = Scalar::from_int(1);
    let half_i = &Scalar::ratio(1, 2) * &Scalar::i();
    for k in 0..=bound {
        let w = &half_i_pow * &Scalar::ratio(1, factorial(k));
        out = out + bidifferential_power(a, b, kernel, k).scale(&w).mul_hbar_power(k as u32);
        half_i_pow = &half_i_pow * &half_i;
    }
    out
}

/// Sine series `(2/ħ) sin(ħ/2 · D)`: odd `k` only,
/// `(-1)^((k-1)/2) (1/2)^(k-1) / k! · ħ^(k-1) P_k`.
pub fn moyal_sin_oracle(a: &Symbol, b: &Symbol, kernel: &QMatrix) -> Symbol {
    let bound = a.degree().min(b.degree()) as usize;
    let mut out = Symbol::zero(a.dim());
    for k in (1..=bound).step_by(2) {
        let sign = if (k - 1) / 2 % 2 == 0 { 1 } else { -1 };
        let w = Scalar::ratio(sign, factorial(k) * (1i64 << (k - 1)));
        out = out + bidifferential_power(a, b, kernel, k).scale(&w).mul_hbar_power(k as u32 - 1);
    }
    out
}

/// `{A,B} - Σ {A,Φ_μ} C⁻¹_μν {Φ_ν,B}` with every bracket canonical.
pub fn dirac_explicit(a: &Symbol, b: &Symbol, ds: &DiracStructure) -> Symbol {
    let phis = ds.constraint_symbols();
    let left: Vec<Symbol> = phis.iter().map(|phi| poisson(a, phi).unwrap()).collect();
    let right: Vec<Symbol> = phis.iter().map(|phi| poisson(phi, b).unwrap()).collect();
    let mut out = poisson(a, b).unwrap();
    for (mu, l) in left.iter().enumerate() {
        for (nu, r) in right.iter().enumerate() {
            let c = &ds.c_inv()[(mu, nu)];
            if !c.is_zero() {
                out = out - (l * r).scale(&Scalar::real(c.clone()));
            }
        }
    }
    out
}

/// `J^D` evaluated entrywise from the explicit Dirac formula.
pub fn jd_explicit(ds: &DiracStructure) -> QMatrix {
    let dim = ds.space().dim();
    let mut jd = QMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            let v = dirac_explicit(&Symbol::coordinate(dim, i), &Symbol::coordinate(dim, j), ds);
            jd[(i, j)] = v.as_constant().expect("constant bracket").re().clone();
        }
    }
    jd
}

pub fn classical_triple(seed: u64, space: dirac_moyal::PhaseSpace, deg: u32) -> [Symbol; 3] {
    let mut rng = sample::rng(seed);
    let shape = SymbolShape::classical(deg);
    [
        sample::symbol(&mut rng, space, shape),
        sample::symbol(&mut rng, space, shape),
        sample::symbol(&mut rng, space, shape),
    ]
}

fn arb_rational() -> impl proptest::strategy::Strategy<Value = BigRational> {
    use proptest::prelude::*;
    (-6i64..=6, 1i64..=5).prop_map(|(n, d)| BigRational::new(n.into(), d.into()))
}

/// Symbols with up to `max_terms` terms, total degree ≤ `max_degree` and
/// `hbar` powers ≤ `max_hbar`.
pub fn arb_symbol(
    dim: usize,
    max_degree: u32,
    max_terms: usize,
    max_hbar: u32,
    complex: bool,
) -> impl proptest::strategy::Strategy<Value = Symbol> {
    use proptest::prelude::*;
    let term =
        (proptest::collection::vec(0..dim, 0..=max_degree as usize), 0..=max_hbar, arb_rational(), arb_rational());
    proptest::collection::vec(term, 0..=max_terms).prop_map(move |terms| {
        Symbol::from_terms(
            dim,
            terms.into_iter().map(|(vars, h, re, im)| {
                let mut e = vec![0u32; dim];
                for v in vars {
                    e[v] += 1;
                }
                let im = if complex { im } else { BigRational::zero() };
                (dirac_moyal::symbol::Monomial::from_exponents(e), h, Scalar::new(re, im))
            }),
        )
    })
}

pub fn arb_point(dim: usize) -> impl proptest::strategy::Strategy<Value = Vec<BigRational>> {
    proptest::collection::vec(arb_rational(), dim)
}
