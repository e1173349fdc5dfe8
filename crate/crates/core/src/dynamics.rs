//! Classical Dirac-Hamilton flow and Heisenberg-picture Moyal evolution.
//!
//! All algebra is exact; conversion to `f64` happens only when a vector
//! field or generator matrix is handed to the fixed-step RK4 integrator.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};

use crate::bracket::{dirac, poisson};
use crate::constraint::DiracStructure;
use crate::error::{AlgebraError, DynamicsError};
use crate::matrix::QMatrix;
use crate::scalar::Scalar;
use crate::star::moyal;
use crate::symbol::{coordinate_name, Monomial, Symbol};

/// Tolerance on `|α z0|` accepted as lying on the constraint surface.
pub const ON_SURFACE_TOLERANCE: f64 = 1e-12;

/// A Dirac structure with an `hbar`-free, real canonical hamiltonian.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HamiltonianSystem {
    ds: DiracStructure,
    hamiltonian: Symbol,
}

impl HamiltonianSystem {
    pub fn new(ds: DiracStructure, hamiltonian: Symbol) -> Result<Self, DynamicsError> {
        if hamiltonian.dim() != ds.space().dim() {
            return Err(AlgebraError::SpaceMismatch { left: ds.space().dim(), right: hamiltonian.dim() }.into());
        }
        if !hamiltonian.is_real() || hamiltonian.hbar_degree() > 0 {
            return Err(DynamicsError::NonClassicalHamiltonian);
        }
        Ok(HamiltonianSystem { ds, hamiltonian })
    }

    pub fn structure(&self) -> &DiracStructure {
        &self.ds
    }

    pub fn hamiltonian(&self) -> &Symbol {
        &self.hamiltonian
    }

    /// `λ_μ = -Σ_ν C⁻¹_μν {Φ_ν, H}`.
    pub fn lagrange_multipliers(&self) -> Vec<Symbol> {
        let phis = self.ds.constraint_symbols();
        let brackets: Vec<Symbol> =
            phis.iter().map(|phi| poisson(phi, &self.hamiltonian).expect("same space")).collect();
        let c_inv = self.ds.c_inv();
        (0..phis.len())
            .map(|mu| {
                let mut acc = Symbol::zero(self.hamiltonian.dim());
                for (nu, b) in brackets.iter().enumerate() {
                    let c = &c_inv[(mu, nu)];
                    if !c.is_zero() {
                        acc = acc - b.scale(&Scalar::real(c.clone()));
                    }
                }
                acc
            })
            .collect()
    }

    /// `ż_i = {z_i, H}_D`.
    pub fn dirac_vector_field(&self) -> Vec<Symbol> {
        let dim = self.hamiltonian.dim();
        (0..dim).map(|i| dirac(&Symbol::coordinate(dim, i), &self.hamiltonian, &self.ds).expect("same space")).collect()
    }

    /// `ż_i = Σ_j J_ij ∇_j H + Σ_j J_ij Σ_μ λ_μ ∇_j Φ_μ` with the multipliers
    /// substituted; the total-hamiltonian form of the flow.
    pub fn total_hamiltonian_field(&self) -> Vec<Symbol> {
        let dim = self.hamiltonian.dim();
        let j = QMatrix::symplectic(dim / 2);
        let grad_h = self.hamiltonian.gradient();
        let lambdas = self.lagrange_multipliers();
        let alpha = self.ds.alpha();
        // Σ_μ λ_μ ∇_j Φ_μ, with ∇_j Φ_μ = α_μj.
        let constraint_force: Vec<Symbol> = (0..dim)
            .map(|jdx| {
                lambdas
                    .iter()
                    .enumerate()
                    .fold(Symbol::zero(dim), |acc, (mu, l)| acc + l.scale(&Scalar::real(alpha[(mu, jdx)].clone())))
            })
            .collect();
        (0..dim)
            .map(|i| {
                let mut acc = Symbol::zero(dim);
                for jdx in 0..dim {
                    let jij = &j[(i, jdx)];
                    if jij.is_zero() {
                        continue;
                    }
                    let s = Scalar::real(jij.clone());
                    acc = acc + grad_h[jdx].scale(&s) + constraint_force[jdx].scale(&s);
                }
                acc
            })
            .collect()
    }

    /// Fixed-step classical RK4. The step is adjusted down so the last step
    /// lands exactly on `t_end`.
    pub fn integrate_classical(&self, z0: &[f64], t_end: f64, dt: f64) -> Result<Trajectory, DynamicsError> {
        let dim = self.hamiltonian.dim();
        if z0.len() != dim {
            return Err(AlgebraError::DimensionMismatch { expected: dim, got: z0.len() }.into());
        }
        let steps = step_count(t_end, dt)?;
        let alpha = self.ds.alpha().to_f64();
        let residual = max_abs(&apply(&alpha, z0));
        if residual.is_nan() || residual > ON_SURFACE_TOLERANCE {
            return Err(DynamicsError::InitialConditionOffM { residual });
        }
        let field: Vec<FloatPoly> = self.dirac_vector_field().iter().map(FloatPoly::compile).collect();
        let energy = FloatPoly::compile(&self.hamiltonian);
        let eval_field = |z: &[f64]| -> Vec<f64> { field.iter().map(|f| f.eval(z)).collect() };

        let mut traj = Trajectory::default();
        let mut z = z0.to_vec();
        let h = if steps == 0 { 0.0 } else { t_end / steps as f64 };
        traj.record(0.0, &z, &alpha, &energy);
        for s in 0..steps {
            z = rk4_step(&z, h, &eval_field);
            let t = if s + 1 == steps { t_end } else { (s + 1) as f64 * h };
            traj.record(t, &z, &alpha, &energy);
        }
        Ok(traj)
    }

    /// Heisenberg evolution `dA/dt = {A, H}_M` of a polynomial observable.
    /// For `deg H ≤ 2` the bracket preserves the degree of `A`, so the flow
    /// is a linear ODE on the coefficients of monomials up to `deg A0`.
    pub fn evolve_symbol_moyal(&self, a0: &Symbol, t_end: f64, dt: f64) -> Result<FloatSymbol, DynamicsError> {
        let degree = self.hamiltonian.degree();
        if degree > 2 {
            return Err(DynamicsError::DegreeUnsupported { degree });
        }
        let dim = self.hamiltonian.dim();
        if a0.dim() != dim {
            return Err(AlgebraError::SpaceMismatch { left: dim, right: a0.dim() }.into());
        }
        let steps = step_count(t_end, dt)?;

        let hbar_powers: Vec<u32> = {
            let mut v: Vec<u32> = a0.terms().map(|(_, k, _)| k).collect();
            v.sort_unstable();
            v.dedup();
            v
        };
        let monos = monomials_up_to(dim, a0.degree());
        let basis: Vec<(Monomial, u32)> =
            hbar_powers.iter().flat_map(|&k| monos.iter().map(move |m| (m.clone(), k))).collect();
        let index: BTreeMap<(Monomial, u32), usize> =
            basis.iter().cloned().enumerate().map(|(i, key)| (key, i)).collect();

        // Column j holds the image of basis element j.
        let mut columns: Vec<Vec<(usize, Complex64)>> = Vec::with_capacity(basis.len());
        for (m, k) in &basis {
            let b = Symbol::from_terms(dim, [(m.clone(), *k, Scalar::from_int(1))]);
            let image = moyal(&b, &self.hamiltonian, &self.ds)?;
            let col = image
                .terms()
                .map(|(im, ik, c)| {
                    let row = *index
                        .get(&(im.clone(), ik))
                        .expect("bracket with a quadratic hamiltonian left the degree-bounded space");
                    (row, c.to_complex64())
                })
                .collect();
            columns.push(col);
        }
        let generator = |c: &[Complex64]| -> Vec<Complex64> {
            let mut out = vec![Complex64::new(0.0, 0.0); c.len()];
            for (j, col) in columns.iter().enumerate() {
                if c[j] == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for (row, v) in col {
                    out[*row] += v * c[j];
                }
            }
            out
        };

        let mut c: Vec<Complex64> = basis.iter().map(|(m, k)| a0.coefficient(m, *k).to_complex64()).collect();
        let h = if steps == 0 { 0.0 } else { t_end / steps as f64 };
        for _ in 0..steps {
            c = rk4_step(&c, h, &generator);
        }
        let terms = basis
            .into_iter()
            .zip(c)
            .filter(|(_, v)| *v != Complex64::new(0.0, 0.0))
            .map(|((m, k), v)| (m, k, v))
            .collect();
        Ok(FloatSymbol { dim, terms })
    }
}

/// Euclidean projection of `z` onto `ker α`, using the exact projector
/// `N (NᵀN)⁻¹ Nᵀ` built from a rational null-space basis `N`.
pub fn project_to_m(z: &[f64], ds: &DiracStructure) -> Vec<f64> {
    let n = ds.alpha().nullspace();
    let nt = n.transpose();
    let gram_inv = (&nt * &n).inverse().expect("null-space basis is independent");
    let projector = &(&n * &gram_inv) * &nt;
    apply(&projector.to_f64(), z)
}

fn step_count(t_end: f64, dt: f64) -> Result<usize, DynamicsError> {
    if !dt.is_finite() || dt <= 0.0 {
        return Err(DynamicsError::BadStep(format!("dt must be positive and finite, got {dt}")));
    }
    if !t_end.is_finite() || t_end < 0.0 {
        return Err(DynamicsError::BadStep(format!("t_end must be nonnegative and finite, got {t_end}")));
    }
    let n = (t_end / dt - 1e-9).ceil().max(0.0);
    n.to_usize().ok_or_else(|| DynamicsError::BadStep("too many steps".into()))
}

fn apply(m: &[Vec<f64>], z: &[f64]) -> Vec<f64> {
    m.iter().map(|row| row.iter().zip(z).map(|(a, b)| a * b).sum()).collect()
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn rk4_step<T, F>(y: &[T], h: f64, f: &F) -> Vec<T>
where
    T: Copy + std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T>,
    F: Fn(&[T]) -> Vec<T>,
{
    let shift = |k: &[T], s: f64| -> Vec<T> { y.iter().zip(k).map(|(a, b)| *a + *b * s).collect() };
    let k1 = f(y);
    let k2 = f(&shift(&k1, h / 2.0));
    let k3 = f(&shift(&k2, h / 2.0));
    let k4 = f(&shift(&k3, h));
    (0..y.len()).map(|i| y[i] + (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (h / 6.0)).collect()
}

fn monomials_up_to(dim: usize, degree: u32) -> Vec<Monomial> {
    fn rec(dim: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if cur.len() == dim {
            out.push(Monomial::from_exponents(cur.clone()));
            return;
        }
        for e in 0..=left {
            cur.push(e);
            rec(dim, left - e, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(dim, degree, &mut Vec::with_capacity(dim), &mut out);
    out
}

/// An `hbar`-free real symbol compiled for fast `f64` evaluation.
#[derive(Debug, Clone)]
struct FloatPoly {
    terms: Vec<(Vec<(usize, i32)>, f64)>,
}

impl FloatPoly {
    fn compile(s: &Symbol) -> FloatPoly {
        let terms = s
            .terms()
            .map(|(m, _, c)| {
                let vars =
                    m.exponents().iter().enumerate().filter(|(_, &e)| e > 0).map(|(i, &e)| (i, e as i32)).collect();
                (vars, c.re().to_f64().unwrap_or(f64::NAN))
            })
            .collect();
        FloatPoly { terms }
    }

    fn eval(&self, z: &[f64]) -> f64 {
        self.terms.iter().map(|(vars, c)| vars.iter().fold(*c, |acc, &(i, e)| acc * z[i].powi(e))).sum()
    }
}

/// Sampled classical trajectory.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub points: Vec<Vec<f64>>,
    /// `α · z(t)` at each sample.
    pub constraint_residuals: Vec<Vec<f64>>,
    pub energy: Vec<f64>,
}

impl Trajectory {
    fn record(&mut self, t: f64, z: &[f64], alpha: &[Vec<f64>], energy: &FloatPoly) {
        self.times.push(t);
        self.points.push(z.to_vec());
        self.constraint_residuals.push(apply(alpha, z));
        self.energy.push(energy.eval(z));
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last_point(&self) -> Option<&[f64]> {
        self.points.last().map(Vec::as_slice)
    }

    pub fn max_constraint_residual(&self) -> f64 {
        self.constraint_residuals.iter().map(|r| max_abs(r)).fold(0.0, f64::max)
    }

    /// `max_t |H(z(t)) - H(z0)| / |H(z0)|`.
    pub fn relative_energy_drift(&self) -> f64 {
        let Some(&e0) = self.energy.first() else {
            return 0.0;
        };
        let scale = if e0 == 0.0 { 1.0 } else { e0.abs() };
        self.energy.iter().map(|e| (e - e0).abs() / scale).fold(0.0, f64::max)
    }
}

/// A symbol with complex floating-point coefficients, the output of
/// numerical symbol evolution.
#[derive(Debug, Clone, PartialEq)]
pub struct FloatSymbol {
    dim: usize,
    terms: Vec<(Monomial, u32, Complex64)>,
}

impl FloatSymbol {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[(Monomial, u32, Complex64)] {
        &self.terms
    }

    pub fn coefficient(&self, m: &Monomial, hbar_power: u32) -> Complex64 {
        self.terms.iter().find(|(tm, tk, _)| tm == m && *tk == hbar_power).map(|t| t.2).unwrap_or_default()
    }

    /// Value at a real point with a numeric `hbar`.
    pub fn eval(&self, z: &[f64], hbar: f64) -> Complex64 {
        self.terms
            .iter()
            .map(|(m, k, c)| {
                let v = m.exponents().iter().zip(z).fold(hbar.powi(*k as i32), |acc, (&e, x)| acc * x.powi(e as i32));
                c * v
            })
            .sum()
    }

    /// Largest coefficient difference against an exact symbol.
    pub fn max_abs_diff(&self, exact: &Symbol) -> f64 {
        let mut keys: BTreeMap<(Monomial, u32), Complex64> = BTreeMap::new();
        for (m, k, c) in &self.terms {
            *keys.entry((m.clone(), *k)).or_default() += c;
        }
        for (m, k, c) in exact.terms() {
            *keys.entry((m.clone(), k)).or_default() -= c.to_complex64();
        }
        keys.values().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

pub(crate) fn monomial_text(m: &Monomial, hbar_power: u32) -> String {
    let mut factors: Vec<String> = Vec::new();
    for (i, &e) in m.exponents().iter().enumerate() {
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
        "1".into()
    } else {
        factors.join("*")
    }
}

/// Terms as `(re + im*i)*monomial`, 17 significant digits, joined by ` + `.
impl fmt::Display for FloatSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut sorted: Vec<&(Monomial, u32, Complex64)> = self.terms.iter().collect();
        sorted.sort_by(|a, b| {
            (std::cmp::Reverse(a.0.degree()), std::cmp::Reverse(a.0.exponents()), a.1).cmp(&(
                std::cmp::Reverse(b.0.degree()),
                std::cmp::Reverse(b.0.exponents()),
                b.1,
            ))
        });
        let parts: Vec<String> = sorted
            .iter()
            .map(|(m, k, c)| format!("({:.16e} + {:.16e}*i)*{}", c.re, c.im, monomial_text(m, *k)))
            .collect();
        f.write_str(&parts.join(" + "))
    }
}
