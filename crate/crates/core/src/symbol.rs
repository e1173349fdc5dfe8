//! Weyl symbols as sparse polynomials in the phase-space coordinates with
//! coefficients that are polynomials in a formal, central `hbar`.
//!
//! Coordinates are indexed from 0 in the interleaved order
//! `(q1, p1, q2, p2, ..., qn, pn)`, so index `2k` is `q{k+1}` and `2k + 1`
//! is `p{k+1}`.

use std::cmp::Reverse;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::AlgebraError;
use crate::scalar::Scalar;

/// Phase space with `n` canonical pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PhaseSpace {
    n: usize,
}

impl PhaseSpace {
    /// Panics if `n == 0`.
    pub fn new(n: usize) -> Self {
        assert!(n > 0, "phase space needs at least one canonical pair");
        PhaseSpace { n }
    }

    /// Number of canonical pairs.
    pub fn pairs(&self) -> usize {
        self.n
    }

    /// Number of coordinates, `2n`.
    pub fn dim(&self) -> usize {
        2 * self.n
    }

    pub fn coordinate_name(&self, index: usize) -> String {
        coordinate_name(index)
    }

    /// Index of a coordinate name such as `q2` or `p1`.
    pub fn coordinate_index(&self, name: &str) -> Option<usize> {
        let (kind, digits) = name.split_at(name.find(|c: char| c.is_ascii_digit())?);
        if digits.starts_with('0') || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let k: usize = digits.parse().ok()?;
        if k == 0 || k > self.n {
            return None;
        }
        match kind {
            "q" => Some(2 * (k - 1)),
            "p" => Some(2 * (k - 1) + 1),
            _ => None,
        }
    }

    pub fn coordinate(&self, index: usize) -> Symbol {
        Symbol::coordinate(self.dim(), index)
    }

    pub fn zero(&self) -> Symbol {
        Symbol::zero(self.dim())
    }

    pub fn one(&self) -> Symbol {
        Symbol::one(self.dim())
    }

    pub fn hbar(&self) -> Symbol {
        Symbol::hbar(self.dim())
    }

    pub fn constant(&self, c: Scalar) -> Symbol {
        Symbol::constant(self.dim(), c)
    }
}

pub(crate) fn coordinate_name(index: usize) -> String {
    let k = index / 2 + 1;
    if index.is_multiple_of(2) {
        format!("q{k}")
    } else {
        format!("p{k}")
    }
}

/// Exponent vector over the `2n` coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn one(dim: usize) -> Self {
        Monomial(vec![0; dim])
    }

    pub fn var(dim: usize, index: usize) -> Self {
        let mut e = vec![0; dim];
        e[index] = 1;
        Monomial(e)
    }

    pub fn from_exponents(exponents: Vec<u32>) -> Self {
        Monomial(exponents)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `∂/∂z_index` applied to the monomial: `(factor, monomial)`, or `None`
    /// if the variable is absent.
    pub fn derivative(&self, index: usize) -> Option<(u32, Monomial)> {
        let e = self.0[index];
        if e == 0 {
            return None;
        }
        let mut m = self.0.clone();
        m[index] -= 1;
        Some((e, Monomial(m)))
    }

    fn print_key(&self) -> (Reverse<u32>, Reverse<&[u32]>) {
        (Reverse(self.degree()), Reverse(&self.0[..]))
    }
}

/// Polynomial in `hbar` with scalar coefficients; no zero coefficients stored.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct HbarPoly(BTreeMap<u32, Scalar>);

impl HbarPoly {
    pub fn constant(c: Scalar) -> Self {
        let mut p = HbarPoly::default();
        p.add_term(0, c);
        p
    }

    pub fn monomial(power: u32, c: Scalar) -> Self {
        let mut p = HbarPoly::default();
        p.add_term(power, c);
        p
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn coefficient(&self, power: u32) -> Scalar {
        self.0.get(&power).cloned().unwrap_or_else(Scalar::zero)
    }

    /// `(power, coefficient)` pairs in ascending power.
    pub fn iter(&self) -> impl Iterator<Item = (u32, &Scalar)> {
        self.0.iter().map(|(&k, v)| (k, v))
    }

    pub fn degree(&self) -> Option<u32> {
        self.0.keys().next_back().copied()
    }

    pub fn add_term(&mut self, power: u32, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.0.entry(power) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += &c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn add_scaled(&mut self, other: &HbarPoly, factor: &Scalar, shift: u32) {
        for (k, c) in &other.0 {
            self.add_term(k + shift, factor * c);
        }
    }

    pub fn mul(&self, other: &HbarPoly) -> HbarPoly {
        let mut out = HbarPoly::default();
        for (k, c) in &self.0 {
            out.add_scaled(other, c, *k);
        }
        out
    }

    /// Value at a rational `hbar`.
    pub fn eval(&self, hbar: &BigRational) -> Scalar {
        let mut acc = Scalar::zero();
        for (&k, c) in &self.0 {
            let hk = Scalar::real(num_traits::pow(hbar.clone(), k as usize));
            acc += &(c * &hk);
        }
        acc
    }
}

/// How `hbar` is treated by [`Symbol::evaluate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HbarValue {
    Formal,
    Value(BigRational),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Evaluation {
    Number(Scalar),
    Formal(HbarPoly),
}

/// A polynomial Weyl symbol in canonical sparse form.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Symbol {
    dim: usize,
    terms: BTreeMap<Monomial, HbarPoly>,
}

impl Symbol {
    pub fn zero(dim: usize) -> Self {
        Symbol { dim, terms: BTreeMap::new() }
    }

    pub fn one(dim: usize) -> Self {
        Symbol::constant(dim, Scalar::one())
    }

    pub fn constant(dim: usize, c: Scalar) -> Self {
        let mut s = Symbol::zero(dim);
        s.add_term(Monomial::one(dim), 0, c);
        s
    }

    pub fn hbar(dim: usize) -> Self {
        let mut s = Symbol::zero(dim);
        s.add_term(Monomial::one(dim), 1, Scalar::one());
        s
    }

    /// Panics if `index >= dim`.
    pub fn coordinate(dim: usize, index: usize) -> Self {
        assert!(index < dim, "coordinate {index} out of range for {dim} coordinates");
        let mut s = Symbol::zero(dim);
        s.add_term(Monomial::var(dim, index), 0, Scalar::one());
        s
    }

    /// Linear form `Σ coeffs[i] z_i`.
    pub fn linear(coeffs: &[BigRational]) -> Self {
        let dim = coeffs.len();
        let mut s = Symbol::zero(dim);
        for (i, c) in coeffs.iter().enumerate() {
            s.add_term(Monomial::var(dim, i), 0, Scalar::real(c.clone()));
        }
        s
    }

    pub fn from_terms<I>(dim: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Monomial, u32, Scalar)>,
    {
        let mut s = Symbol::zero(dim);
        for (m, k, c) in terms {
            assert_eq!(m.0.len(), dim, "monomial length does not match dimension");
            s.add_term(m, k, c);
        }
        s
    }

    /// Number of coordinates this symbol lives over.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Number of stored `(monomial, hbar power)` terms.
    pub fn len(&self) -> usize {
        self.terms.values().map(|p| p.0.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Monomial, &HbarPoly)> {
        self.terms.iter()
    }

    /// Flat `(monomial, hbar power, coefficient)` view.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, u32, &Scalar)> {
        self.terms.iter().flat_map(|(m, p)| p.iter().map(move |(k, c)| (m, k, c)))
    }

    pub fn coefficient(&self, m: &Monomial, hbar_power: u32) -> Scalar {
        self.terms.get(m).map(|p| p.coefficient(hbar_power)).unwrap_or_else(Scalar::zero)
    }

    /// Total degree in the coordinates (`hbar` not counted); 0 for the zero symbol.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn hbar_degree(&self) -> u32 {
        self.terms.values().filter_map(HbarPoly::degree).max().unwrap_or(0)
    }

    pub fn is_hbar_free(&self) -> bool {
        self.terms.values().all(|p| p.degree() == Some(0))
    }

    pub fn is_real(&self) -> bool {
        self.terms().all(|(_, _, c)| c.is_real())
    }

    /// The constant value if the symbol has no coordinate or `hbar` dependence.
    pub fn as_constant(&self) -> Option<Scalar> {
        match self.terms.len() {
            0 => Some(Scalar::zero()),
            1 => {
                let (m, p) = self.terms.iter().next()?;
                (m.is_one() && p.degree() == Some(0)).then(|| p.coefficient(0))
            }
            _ => None,
        }
    }

    pub(crate) fn add_term(&mut self, m: Monomial, hbar_power: u32, c: Scalar) {
        if c.is_zero() {
            return;
        }
        let poly = self.terms.entry(m.clone()).or_default();
        poly.add_term(hbar_power, c);
        if poly.is_zero() {
            self.terms.remove(&m);
        }
    }

    fn add_poly(&mut self, m: Monomial, poly: HbarPoly) {
        if poly.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(poly);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                o.get_mut().add_scaled(&poly, &Scalar::one(), 0);
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn check_same_space(&self, other: &Symbol) -> Result<(), AlgebraError> {
        if self.dim == other.dim {
            Ok(())
        } else {
            Err(AlgebraError::SpaceMismatch { left: self.dim, right: other.dim })
        }
    }

    fn assert_same_space(&self, other: &Symbol) {
        if let Err(e) = self.check_same_space(other) {
            panic!("{e}");
        }
    }

    pub fn scale(&self, c: &Scalar) -> Symbol {
        if c.is_zero() {
            return Symbol::zero(self.dim);
        }
        let terms = self
            .terms
            .iter()
            .map(|(m, p)| (m.clone(), HbarPoly(p.0.iter().map(|(k, v)| (*k, v * c)).collect())))
            .collect();
        Symbol { dim: self.dim, terms }
    }

    /// Multiplies by `hbar^k`.
    pub fn mul_hbar_power(&self, k: u32) -> Symbol {
        let terms = self
            .terms
            .iter()
            .map(|(m, p)| (m.clone(), HbarPoly(p.0.iter().map(|(j, v)| (j + k, v.clone())).collect())))
            .collect();
        Symbol { dim: self.dim, terms }
    }

    /// Divides by `hbar^k` if every term carries at least that power.
    pub fn div_hbar_power(&self, k: u32) -> Option<Symbol> {
        let mut terms = BTreeMap::new();
        for (m, p) in &self.terms {
            let mut q = BTreeMap::new();
            for (j, v) in &p.0 {
                q.insert(j.checked_sub(k)?, v.clone());
            }
            terms.insert(m.clone(), HbarPoly(q));
        }
        Some(Symbol { dim: self.dim, terms })
    }

    /// The `hbar`-free symbol multiplying `hbar^r`.
    pub fn hbar_coefficient(&self, r: u32) -> Symbol {
        let mut out = Symbol::zero(self.dim);
        for (m, p) in &self.terms {
            if let Some(c) = p.0.get(&r) {
                out.add_term(m.clone(), 0, c.clone());
            }
        }
        out
    }

    /// Exact `∂/∂z_index`. `hbar` is a constant.
    pub fn partial(&self, index: usize) -> Result<Symbol, AlgebraError> {
        if index >= self.dim {
            return Err(AlgebraError::IndexOutOfRange { index, dim: self.dim });
        }
        let mut out = Symbol::zero(self.dim);
        for (m, p) in &self.terms {
            if let Some((e, dm)) = m.derivative(index) {
                let f = Scalar::from(e as i64);
                let scaled = HbarPoly(p.0.iter().map(|(k, v)| (*k, v * &f)).collect());
                out.add_poly(dm, scaled);
            }
        }
        Ok(out)
    }

    /// All first partials, `∇_i A` for `i = 0..dim`.
    pub fn gradient(&self) -> Vec<Symbol> {
        (0..self.dim).map(|i| self.partial(i).expect("index in range")).collect()
    }

    /// Replaces selected coordinates by symbols of degree at most 1.
    pub fn substitute_linear(&self, assignment: &BTreeMap<usize, Symbol>) -> Result<Symbol, AlgebraError> {
        let mut images = Vec::with_capacity(self.dim);
        for i in 0..self.dim {
            images.push(Symbol::coordinate(self.dim, i));
        }
        for (&i, s) in assignment {
            if i >= self.dim {
                return Err(AlgebraError::IndexOutOfRange { index: i, dim: self.dim });
            }
            self.check_same_space(s)?;
            images[i] = s.clone();
        }
        self.compose_linear(&images)
    }

    /// Substitutes `z_i := images[i]` for every coordinate. The images may
    /// live in a phase space of a different dimension, which becomes the
    /// dimension of the result.
    pub fn compose_linear(&self, images: &[Symbol]) -> Result<Symbol, AlgebraError> {
        if images.len() != self.dim {
            return Err(AlgebraError::DimensionMismatch { expected: self.dim, got: images.len() });
        }
        let target = images.first().map(Symbol::dim).unwrap_or(0);
        for (i, s) in images.iter().enumerate() {
            if s.dim != target {
                return Err(AlgebraError::SpaceMismatch { left: target, right: s.dim });
            }
            let degree = s.degree();
            if degree > 1 {
                return Err(AlgebraError::NonLinearSubstitution { index: i, degree });
            }
        }
        // Powers of each image are cached per exponent.
        let mut powers: Vec<Vec<Symbol>> = images.iter().map(|s| vec![Symbol::one(s.dim), s.clone()]).collect();
        let mut out = Symbol::zero(target);
        for (m, p) in &self.terms {
            let mut acc = Symbol::zero(target);
            acc.add_poly(Monomial::one(target), p.clone());
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let cache = &mut powers[i];
                while cache.len() <= e as usize {
                    let next = &cache[cache.len() - 1] * &cache[1];
                    cache.push(next);
                }
                acc = &acc * &cache[e as usize];
                if acc.is_zero() {
                    break;
                }
            }
            out = out + acc;
        }
        Ok(out)
    }

    pub fn evaluate(&self, point: &[BigRational], hbar: &HbarValue) -> Result<Evaluation, AlgebraError> {
        if point.len() != self.dim {
            return Err(AlgebraError::DimensionMismatch { expected: self.dim, got: point.len() });
        }
        let mut total = HbarPoly::default();
        for (m, p) in &self.terms {
            let mut v = BigRational::one();
            for (x, &e) in point.iter().zip(&m.0) {
                for _ in 0..e {
                    v *= x;
                }
            }
            total.add_scaled(p, &Scalar::real(v), 0);
        }
        Ok(match hbar {
            HbarValue::Formal => Evaluation::Formal(total),
            HbarValue::Value(h) => Evaluation::Number(total.eval(h)),
        })
    }

    /// Terms in printing order: graded lexicographic with `z_1 > z_2 > ...`,
    /// higher degree first, ascending `hbar` powers within a monomial.
    pub fn sorted_terms(&self) -> Vec<(&Monomial, u32, &Scalar)> {
        let mut monos: Vec<(&Monomial, &HbarPoly)> = self.terms.iter().collect();
        monos.sort_by(|a, b| a.0.print_key().cmp(&b.0.print_key()));
        monos.into_iter().flat_map(|(m, p)| p.iter().map(move |(k, c)| (m, k, c))).collect()
    }
}

fn write_term(out: &mut String, m: &Monomial, hbar_power: u32, c: &Scalar) {
    let mut factors: Vec<String> = Vec::new();
    if let Some(f) = c.factor_string() {
        factors.push(f);
    }
    for (i, &e) in m.0.iter().enumerate() {
        match e {
            0 => {}
            1 => factors.push(coordinate_name(i)),
            _ => factors.push(format!("{}^{e}", coordinate_name(i))),
        }
    }
    match hbar_power {
        0 => {}
        1 => factors.push("hbar".into()),
        k => factors.push(format!("hbar^{k}")),
    }
    if factors.is_empty() {
        factors.push("1".into());
    }
    out.push_str(&factors.join("*"));
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut out = String::new();
        for (idx, (m, k, c)) in self.sorted_terms().into_iter().enumerate() {
            let negative = c.is_negative_looking();
            match (idx, negative) {
                (0, false) => {}
                (0, true) => out.push('-'),
                (_, false) => out.push_str(" + "),
                (_, true) => out.push_str(" - "),
            }
            if negative {
                write_term(&mut out, m, k, &-c);
            } else {
                write_term(&mut out, m, k, c);
            }
        }
        f.write_str(&out)
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Symbol[{}]({self})", self.dim)
    }
}

impl<'a> Add<&'a Symbol> for &'a Symbol {
    type Output = Symbol;
    fn add(self, rhs: &Symbol) -> Symbol {
        self.clone() + rhs.clone()
    }
}

/// Panics if the operands live in different phase spaces.
impl Add for Symbol {
    type Output = Symbol;
    fn add(mut self, rhs: Symbol) -> Symbol {
        self.assert_same_space(&rhs);
        for (m, p) in rhs.terms {
            self.add_poly(m, p);
        }
        self
    }
}

impl<'a> Sub<&'a Symbol> for &'a Symbol {
    type Output = Symbol;
    fn sub(self, rhs: &Symbol) -> Symbol {
        self.clone() + -rhs
    }
}

impl Sub for Symbol {
    type Output = Symbol;
    fn sub(self, rhs: Symbol) -> Symbol {
        self + -rhs
    }
}

impl Neg for &Symbol {
    type Output = Symbol;
    fn neg(self) -> Symbol {
        self.scale(&Scalar::from_int(-1))
    }
}

impl Neg for Symbol {
    type Output = Symbol;
    fn neg(self) -> Symbol {
        -&self
    }
}

/// Pointwise (commutative) product. Panics on a phase-space mismatch.
impl<'a> Mul<&'a Symbol> for &'a Symbol {
    type Output = Symbol;
    fn mul(self, rhs: &Symbol) -> Symbol {
        self.assert_same_space(rhs);
        let mut out = Symbol::zero(self.dim);
        for (ma, pa) in &self.terms {
            for (mb, pb) in &rhs.terms {
                out.add_poly(ma.mul(mb), pa.mul(pb));
            }
        }
        out
    }
}

impl Mul for Symbol {
    type Output = Symbol;
    fn mul(self, rhs: Symbol) -> Symbol {
        &self * &rhs
    }
}
