//! Darboux charts for a Dirac structure and transport of symbols to the
//! reduced phase space.

use num_rational::BigRational;
use num_traits::Zero;

use crate::constraint::DiracStructure;
use crate::error::AlgebraError;
use crate::matrix::QMatrix;
use crate::star::{star, star_standard};
use crate::symbol::{PhaseSpace, Symbol};

/// Linear chart `w = T z` with `w = (y_1, ..., y_{2(n-m)}, Φ_1, ..., Φ_{2m})`,
/// in which the Dirac kernel is `block-diag(J, 0)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducedChart {
    t: QMatrix,
    t_inv: QMatrix,
    reduced_space: PhaseSpace,
}

impl ReducedChart {
    pub fn t(&self) -> &QMatrix {
        &self.t
    }

    pub fn t_inv(&self) -> &QMatrix {
        &self.t_inv
    }

    pub fn reduced_space(&self) -> PhaseSpace {
        self.reduced_space
    }

    /// `T J^D Tᵀ`.
    pub fn gram(&self, ds: &DiracStructure) -> QMatrix {
        &(&self.t * ds.jd()) * &self.t.transpose()
    }
}

fn form(jd: &QMatrix, u: &[BigRational], v: &[BigRational]) -> BigRational {
    u.iter().zip(jd.mul_vec(v)).map(|(a, b)| a * b).sum()
}

fn unit(dim: usize, i: usize) -> Vec<BigRational> {
    let mut e = vec![BigRational::zero(); dim];
    e[i] = BigRational::from_integer(1.into());
    e
}

fn axpy(y: &mut [BigRational], a: &BigRational, x: &[BigRational]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

/// Makes `v` orthogonal to every `(e, f)` pair under the form, assuming
/// `ω(e, f) = 1`: `v - ω(v, f) e + ω(v, e) f`.
fn orthogonalize(
    jd: &QMatrix,
    mut v: Vec<BigRational>,
    pairs: &[(Vec<BigRational>, Vec<BigRational>)],
) -> Vec<BigRational> {
    for (e, f) in pairs {
        let vf = form(jd, &v, f);
        let ve = form(jd, &v, e);
        axpy(&mut v, &-vf, e);
        axpy(&mut v, &ve, f);
    }
    v
}

/// Symplectic Gram-Schmidt on the `J^D` form over a complement of the
/// constraint rows. At each step the lowest-index coordinate vector outside
/// the span so far starts a pair; its partner is the lowest-index coordinate
/// vector with nonzero pairing, rescaled so the pairing is exactly 1.
pub fn darboux_basis(ds: &DiracStructure) -> ReducedChart {
    let space = ds.space();
    let dim = space.dim();
    let jd = ds.jd();
    let alpha = ds.alpha();
    let reduced_pairs = space.pairs() - alpha.rows() / 2;

    let mut pairs: Vec<(Vec<BigRational>, Vec<BigRational>)> = Vec::new();
    for _ in 0..reduced_pairs {
        let mut rows: Vec<Vec<BigRational>> = pairs.iter().flat_map(|(e, f)| [e.clone(), f.clone()]).collect();
        rows.extend(alpha.row_vecs());
        let base_rank = rows.len();
        let start = (0..dim)
            .find(|&i| {
                let mut probe = rows.clone();
                probe.push(unit(dim, i));
                QMatrix::from_rows(probe).rank() > base_rank
            })
            .expect("span of pairs and constraints is not yet full");
        let e = orthogonalize(jd, unit(dim, start), &pairs);
        let partner = (0..dim)
            .find(|&j| !form(jd, &e, &unit(dim, j)).is_zero())
            .expect("Dirac kernel rank below 2n - 2m: no Darboux partner");
        let v = orthogonalize(jd, unit(dim, partner), &pairs);
        let scale = form(jd, &e, &v).recip();
        let f: Vec<BigRational> = v.iter().map(|x| x * &scale).collect();
        pairs.push((e, f));
    }

    let mut rows: Vec<Vec<BigRational>> = pairs.into_iter().flat_map(|(e, f)| [e, f]).collect();
    rows.extend(alpha.row_vecs());
    let t = QMatrix::from_rows(rows);
    let t_inv = t.inverse().expect("Darboux chart is invertible");
    ReducedChart { t, t_inv, reduced_space: PhaseSpace::new(reduced_pairs) }
}

/// Rewrites `A` in chart coordinates and drops the constraint directions,
/// yielding a symbol over the reduced space.
pub fn push_to_reduced(a: &Symbol, chart: &ReducedChart) -> Result<Symbol, AlgebraError> {
    let dim = chart.t.rows();
    if a.dim() != dim {
        return Err(AlgebraError::SpaceMismatch { left: dim, right: a.dim() });
    }
    let rdim = chart.reduced_space.dim();
    let images: Vec<Symbol> = (0..dim).map(|i| Symbol::linear(&chart.t_inv.row(i)[..rdim])).collect();
    a.compose_linear(&images)
}

/// `push(A * B) - push(A) *_std push(B)`; identically zero.
pub fn reduced_star_consistency(
    a: &Symbol,
    b: &Symbol,
    chart: &ReducedChart,
    ds: &DiracStructure,
) -> Result<Symbol, AlgebraError> {
    let lhs = push_to_reduced(&star(a, b, ds)?, chart)?;
    let rhs = star_standard(&push_to_reduced(a, chart)?, &push_to_reduced(b, chart)?)?;
    Ok(lhs - rhs)
}
