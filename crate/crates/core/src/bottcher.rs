//! Böttcher coordinates at infinity, handled through the chart `w = 1/z`.
//!
//! For a polynomial `P` of degree `n` with leading coefficient `a`, its germ
//! at infinity becomes `p(w) = 1/P(1/w) = w^n / a + ...` at the origin, and
//! the Böttcher function becomes `psi(w) = 1/beta(1/w)`, a series of order 1
//! with `psi(p(w)) = psi(w)^n`. Its linear coefficient `b_1` satisfies
//! `b_1^(n-1) = 1/a`, so `beta(z) = z / b_1 + O(1)`.

use serde::Serialize;
use thiserror::Error;

use crate::polynomial::Polynomial;
use crate::scalar::{default_tolerance, FieldKind, Scalar};
use crate::series::{mul_upto, SeriesError, TruncatedSeries};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BottcherError {
    #[error("degree {0} is below 2")]
    DegreeTooLow(usize),
    #[error("truncation order must be at least 2")]
    TruncTooShort,
    #[error("the required {0}-th root of the leading coefficient is not in the field")]
    RootNotInField(u32),
    #[error("functional-equation residual {residual:e} exceeds tolerance {tolerance:e}")]
    ResidualTooLarge { residual: f64, tolerance: f64 },
    #[error("horizon {horizon} is shorter than twice the order {ord}; monomiality undecided")]
    HorizonTooShort { horizon: usize, ord: usize },
    #[error("series vanishes within tolerance up to its horizon")]
    Vanishing,
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// Böttcher series of one polynomial in the chart at 0.
#[derive(Clone, Debug)]
pub struct BottcherData<S> {
    pub base: Polynomial<S>,
    pub psi: TruncatedSeries<S>,
    pub branch_index: u32,
    /// Largest coefficient magnitude of `psi(p) - psi^n` up to index
    /// `n + N - 1`.
    pub residual: f64,
    pub tolerance: f64,
}

impl<S: Scalar> BottcherData<S> {
    pub fn degree(&self) -> usize {
        self.base.degree()
    }

    /// The linear coefficient `b_1` of `psi`.
    pub fn psi_leading(&self) -> &S {
        &self.psi.coeffs()[1]
    }

    /// Leading coefficient `c_{-1} = 1/b_1` of `beta` at infinity.
    pub fn beta_leading(&self) -> S {
        self.psi_leading().inv().expect("psi has order 1")
    }
}

/// Tolerance used when none is given: 0 for exact fields.
pub fn default_tol_for(kind: FieldKind) -> f64 {
    match kind {
        FieldKind::BigComplex { precision } => default_tolerance(precision),
        _ => 0.0,
    }
}

/// Böttcher series of `p` up to `w^trunc`, using branch `branch` of the
/// `(n-1)`-th root for `b_1`. Fails when the residual exceeds the default
/// tolerance of the field.
pub fn bottcher_series<S: Scalar>(
    p: &Polynomial<S>,
    trunc: usize,
    branch: u32,
) -> Result<BottcherData<S>, BottcherError> {
    bottcher_series_tol(p, trunc, branch, default_tol_for(p.kind()))
}

pub fn bottcher_series_tol<S: Scalar>(
    p: &Polynomial<S>,
    trunc: usize,
    branch: u32,
    tolerance: f64,
) -> Result<BottcherData<S>, BottcherError> {
    let n = p.degree();
    if n < 2 {
        return Err(BottcherError::DegreeTooLow(n));
    }
    if trunc < 2 {
        return Err(BottcherError::TruncTooShort);
    }
    // Float coefficients of psi grow geometrically, and conjugation loses
    // roughly three times their size in bits; work with guard bits sized
    // from a first pass.
    let mut guard = 32 + trunc as u32;
    let mut psi = bottcher_core(&p.map(|c| c.promote(guard)), trunc, branch)?;
    if !p.leading().is_exact() {
        let size = psi.max_magnitude(0, trunc).max(1.0).log2().ceil() as u32;
        let needed = 64 + 3 * size;
        if needed > guard {
            guard = needed;
            psi = bottcher_core(&p.map(|c| c.promote(guard)), trunc, branch)?;
        }
    }
    let work = p.map(|c| c.promote(guard));
    let avatar = work.to_zero_coordinate(n + trunc - 1);
    let residual = functional_residual(&psi, &avatar, n)?;
    if residual > tolerance {
        return Err(BottcherError::ResidualTooLarge {
            residual,
            tolerance,
        });
    }
    Ok(BottcherData {
        base: p.clone(),
        psi,
        branch_index: branch,
        residual,
        tolerance,
    })
}

fn bottcher_core<S: Scalar>(
    p: &Polynomial<S>,
    trunc: usize,
    branch: u32,
) -> Result<TruncatedSeries<S>, BottcherError> {
    let n = p.degree();
    let horizon = n + trunc - 1;
    let avatar = p.to_zero_coordinate(horizon);
    let zero = p.zero_scalar();
    let a_inv = avatar.coeffs()[n].clone();
    let b1 = a_inv
        .nth_root((n - 1) as u32, branch)
        .ok_or(BottcherError::RootNotInField((n - 1) as u32))?;

    let kmax = 1 + (trunc - 1) / n;
    let mut powers = vec![avatar.clone()];
    for _ in 1..kmax {
        let next = mul_upto(powers.last().unwrap(), &avatar, horizon);
        powers.push(next);
    }

    let b1n = b1.pow(n as u64);
    let b1n_inv = b1n.inv().expect("b_1 is nonzero");
    let n_inv = zero.from_i64_like(n as i64).inv().unwrap();
    let mut b = vec![zero.clone(); trunc + 1];
    b[1] = b1.clone();
    // c_i = b_{i+1} / b_1 and g = (1 + sum c_i w^i)^n.
    let mut c = vec![zero.clone(); trunc];
    let mut g = vec![zero.clone(); trunc];
    c[0] = zero.one_like();
    g[0] = zero.one_like();
    for j in 2..=trunc {
        let idx = n + j - 1;
        let mut lhs = zero.clone();
        for k in 1..j.min(kmax + 1) {
            let pk = &powers[k - 1].coeffs()[idx];
            if pk.is_zero() || b[k].is_zero() {
                continue;
            }
            lhs = lhs.add(&b[k].mul(pk));
        }
        let k = j - 1;
        let mut partial = zero.clone();
        for i in 1..k {
            if c[i].is_zero() || g[k - i].is_zero() {
                continue;
            }
            let w = zero.from_i64_like(((n + 1) * i) as i64 - k as i64);
            partial = partial.add(&w.mul(&c[i]).mul(&g[k - i]));
        }
        let k_inv = zero.from_i64_like(k as i64).inv().unwrap();
        partial = partial.mul(&k_inv);
        c[k] = lhs.mul(&b1n_inv).sub(&partial).mul(&n_inv);
        g[k] = partial.add(&zero.from_i64_like(n as i64).mul(&c[k]));
        b[j] = c[k].mul(&b1);
    }
    Ok(TruncatedSeries::new(b, trunc))
}

/// `max |[w^i] (psi(p) - psi^n)|` over the indices both sides determine.
pub fn functional_residual<S: Scalar>(
    psi: &TruncatedSeries<S>,
    avatar: &TruncatedSeries<S>,
    n: usize,
) -> Result<f64, BottcherError> {
    let lhs = TruncatedSeries::compose(psi, avatar)?;
    // psi has order 1, so psi^n is determined up to N + n - 1.
    let horizon = (psi.trunc_order() + n - 1).min(lhs.trunc_order());
    let mut rhs = psi.clone();
    for _ in 1..n {
        rhs = mul_upto(&rhs, psi, horizon);
    }
    let diff = lhs.truncate(horizon).sub(&rhs.truncate(horizon))?;
    Ok(diff.max_magnitude(0, horizon))
}

/// `psi o p o psi^-1` in the chart at 0: the conjugate of `p` by the
/// Böttcher coordinate of `bd.base`. Determined up to `w^(N + m - 1)`
/// with `m = deg p`.
pub fn conjugate_generator<S: Scalar>(
    bd: &BottcherData<S>,
    p: &Polynomial<S>,
) -> Result<TruncatedSeries<S>, BottcherError> {
    let m = p.degree();
    if m < 2 {
        return Err(BottcherError::DegreeTooLow(m));
    }
    let n_psi = bd.psi.trunc_order();
    let like = &bd.psi.coeffs()[1];
    let p = p.map(|c| c.with_precision_of(like));
    let inv = bd.psi.comp_inverse()?;
    let avatar = p.to_zero_coordinate(n_psi + m - 1);
    let inner = TruncatedSeries::compose(&avatar, &inv)?;
    Ok(TruncatedSeries::compose(&bd.psi, &inner)?)
}

#[derive(Clone, Debug, Serialize)]
pub struct MonomialityReport<S> {
    pub is_monomial: bool,
    pub ord: usize,
    #[serde(skip)]
    pub leading: S,
    /// Largest magnitude among coefficients above the order.
    pub max_tail: f64,
    pub horizon: usize,
}

/// Decides whether `q` is a monomial up to its horizon, treating
/// coefficients of magnitude at most `tol` as zero.
pub fn monomiality_test<S: Scalar>(
    q: &TruncatedSeries<S>,
    tol: f64,
) -> Result<MonomialityReport<S>, BottcherError> {
    let ord = q.order_tol(tol).ok_or(BottcherError::Vanishing)?;
    let horizon = q.trunc_order();
    if horizon < 2 * ord {
        return Err(BottcherError::HorizonTooShort { horizon, ord });
    }
    let max_tail = q.max_magnitude(ord + 1, horizon);
    let tail_clear = if q.coeffs()[0].is_exact() {
        q.coeffs()[ord + 1..].iter().all(Scalar::is_zero)
    } else {
        max_tail <= tol
    };
    Ok(MonomialityReport {
        is_monomial: tail_clear,
        ord,
        leading: q.coeffs()[ord].clone(),
        max_tail,
        horizon,
    })
}

/// Least `l <= max_order` with `s^l = 1` (within `tol` for floats).
pub fn root_of_unity_test<S: Scalar>(s: &S, max_order: u32, tol: f64) -> Option<u32> {
    s.root_of_unity_order(max_order, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{BigComplex, GaussianRational as G};

    fn big(v: &[f64], prec: u32) -> Polynomial<BigComplex> {
        Polynomial::new(v.iter().map(|&x| BigComplex::from_f64(prec, x, 0.0)).collect()).unwrap()
    }

    #[test]
    fn pure_power_has_identity_coordinate() {
        let p = Polynomial::monomial(G::real(1), 3);
        let bd = bottcher_series(&p, 20, 0).unwrap();
        assert_eq!(bd.psi, TruncatedSeries::identity(&G::real(1), 20));
        assert_eq!(bd.residual, 0.0);
    }

    #[test]
    fn scaled_power() {
        // a z^2 with a = 4: psi = w / 4, beta = 4 z.
        let p = Polynomial::monomial(G::real(4), 2);
        let bd = bottcher_series(&p, 10, 0).unwrap();
        assert_eq!(bd.psi_leading(), &G::real(rug::Rational::from((1, 4))));
        assert_eq!(bd.beta_leading(), G::real(4));
        assert!(bd.psi.coeffs()[2..].iter().all(|c| c.is_zero()));
    }

    #[test]
    fn exact_quadratic_residual_is_zero() {
        let p = Polynomial::new(vec![G::real(1), G::real(0), G::real(1)]).unwrap();
        let bd = bottcher_series(&p, 24, 0).unwrap();
        assert_eq!(bd.residual, 0.0);
    }

    #[test]
    fn chebyshev_quadratic_numeric() {
        let p = big(&[-2.0, 0.0, 1.0], 128);
        let bd = bottcher_series(&p, 64, 0).unwrap();
        assert!(bd.residual < 1e-20, "residual {}", bd.residual);
        let q = conjugate_generator(&bd, &big(&[0.0, -3.0, 0.0, 1.0], 128)).unwrap();
        let rep = monomiality_test(&q, 1e-20).unwrap();
        assert!(rep.is_monomial, "tail {}", rep.max_tail);
        assert_eq!(rep.ord, 3);
    }

    #[test]
    fn conjugating_the_base_gives_a_power() {
        let p = big(&[0.5, 1.0, 0.0, 1.0], 128);
        let bd = bottcher_series(&p, 40, 0).unwrap();
        let q = conjugate_generator(&bd, &p).unwrap();
        let rep = monomiality_test(&q, 1e-20).unwrap();
        assert!(rep.is_monomial);
        assert!(rep.leading.near(&rep.leading.one_like(), 1e-20));
    }

    #[test]
    fn leading_two_is_not_a_root_of_unity() {
        let p = Polynomial::monomial(G::real(1), 2);
        let bd = bottcher_series(&p, 10, 0).unwrap();
        let q = conjugate_generator(&bd, &Polynomial::monomial(G::real(2), 3)).unwrap();
        let rep = monomiality_test(&q, 0.0).unwrap();
        assert!(rep.is_monomial);
        // In the chart at 0 the leading coefficient is 1/2.
        assert_eq!(rep.leading, G::real(rug::Rational::from((1, 2))));
        assert_eq!(root_of_unity_test(&rep.leading, 100, 0.0), None);
    }

    #[test]
    fn monomiality_examples() {
        let w3 = TruncatedSeries::monomial(G::real(1), 3, 12);
        let r = monomiality_test(&w3, 0.0).unwrap();
        assert!(r.is_monomial && r.max_tail == 0.0);
        let mut v = vec![BigComplex::new(128); 11];
        v[2] = BigComplex::from_f64(128, 1.0, 0.0);
        v[5] = BigComplex::from_f64(128, 1e-30, 0.0);
        let s = TruncatedSeries::new(v, 10);
        assert!(monomiality_test(&s, 1e-20).unwrap().is_monomial);
        let t = TruncatedSeries::new(vec![G::real(0), G::real(0), G::real(1), G::real(1)], 8);
        let r = monomiality_test(&t, 0.0).unwrap();
        assert!(!r.is_monomial && r.max_tail == 1.0);
    }

    #[test]
    fn unity_examples() {
        assert_eq!(root_of_unity_test(&G::real(-1), 10, 0.0), Some(2));
        assert_eq!(root_of_unity_test(&G::real(2), 10, 0.0), None);
        let s = BigComplex::root_of_unity(128, 7, 3);
        assert_eq!(root_of_unity_test(&s, 100, 1e-30), Some(7));
    }
}
