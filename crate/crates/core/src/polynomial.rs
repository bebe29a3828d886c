//! Polynomials of positive degree and affine maps.

use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

use crate::scalar::{BigComplex, FieldKind, Scalar};
use crate::series::TruncatedSeries;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolyError {
    #[error("polynomial has no coefficients")]
    Empty,
    #[error("degree {0} is below the minimum of 1")]
    Constant(usize),
    #[error("scalar field mismatch: {0} vs {1}")]
    FieldMismatch(FieldKind, FieldKind),
    #[error("affine map with vanishing linear coefficient")]
    SingularAffine,
}

/// Polynomial with coefficients stored from the constant term up.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial<S> {
    coeffs: Vec<S>,
}

impl<S: Scalar> Polynomial<S> {
    /// Drops trailing zeros; the result must have degree at least 1.
    pub fn new(mut coeffs: Vec<S>) -> Result<Self, PolyError> {
        if coeffs.is_empty() {
            return Err(PolyError::Empty);
        }
        let kind = coeffs[0].kind();
        if let Some(bad) = coeffs.iter().find(|c| !c.kind().compatible(kind)) {
            return Err(PolyError::FieldMismatch(kind, bad.kind()));
        }
        while coeffs.len() > 1 && coeffs.last().is_some_and(Scalar::is_zero) {
            coeffs.pop();
        }
        if coeffs.len() < 2 {
            return Err(PolyError::Constant(0));
        }
        Ok(Polynomial { coeffs })
    }

    /// `c z^n`, `n >= 1`, `c != 0`.
    pub fn monomial(c: S, n: usize) -> Self {
        assert!(n >= 1 && !c.is_zero());
        let mut coeffs = vec![c.zero_like(); n + 1];
        coeffs[n] = c;
        Polynomial { coeffs }
    }

    pub fn identity(like: &S) -> Self {
        Self::monomial(like.one_like(), 1)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> S {
        self.coeffs
            .get(i)
            .cloned()
            .unwrap_or_else(|| self.coeffs[0].zero_like())
    }

    pub fn leading(&self) -> &S {
        &self.coeffs[self.degree()]
    }

    pub fn kind(&self) -> FieldKind {
        self.coeffs[0].kind()
    }

    pub fn zero_scalar(&self) -> S {
        self.coeffs[0].zero_like()
    }

    /// True when only the leading coefficient is nonzero.
    pub fn is_monomial(&self) -> bool {
        self.coeffs[..self.degree()].iter().all(Scalar::is_zero)
    }

    pub fn eval(&self, x: &S) -> S {
        let mut acc = self.leading().clone();
        for c in self.coeffs[..self.degree()].iter().rev() {
            acc = acc.mul(x).add(c);
        }
        acc
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Polynomial<T> {
        Polynomial {
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }

    pub fn to_big(&self, precision: u32) -> Polynomial<BigComplex> {
        self.map(|c| c.to_big(precision))
    }

    pub fn to_c64(&self) -> Vec<Complex64> {
        self.coeffs.iter().map(Scalar::to_c64).collect()
    }

    pub fn scale(&self, c: &S) -> Self {
        Polynomial {
            coeffs: self.coeffs.iter().map(|x| x.mul(c)).collect(),
        }
    }

    /// `self(inner(z))`.
    pub fn compose(&self, inner: &Self) -> Self {
        let raw = compose_raw(&self.coeffs, &inner.coeffs);
        Polynomial { coeffs: raw }
    }

    /// Like [`compose`](Self::compose), giving up (`None`) once more than
    /// `budget` scalar multiplications would be spent.
    pub fn compose_within(&self, inner: &Self, budget: &mut u64) -> Option<Self> {
        compose_budgeted(&self.coeffs, &inner.coeffs, budget).map(|coeffs| Polynomial { coeffs })
    }

    /// Number of nonzero coefficients.
    pub fn support_size(&self) -> usize {
        self.coeffs.iter().filter(|c| !c.is_zero()).count()
    }

    /// The germ of `w -> 1/p(1/w)` at `w = 0`, up to `w^trunc`.
    ///
    /// With `Rev(p)(w) = w^n p(1/w)` this is `w^n / Rev(p)(w)`, which has
    /// order `n` and leading coefficient `1/a_n`.
    pub fn to_zero_coordinate(&self, trunc: usize) -> TruncatedSeries<S> {
        let n = self.degree();
        let zero = self.zero_scalar();
        let mut out = vec![zero.clone(); trunc + 1];
        if trunc < n {
            return TruncatedSeries::new(out, trunc);
        }
        // Reciprocal of rev(w) = sum_k a_{n-k} w^k up to w^(trunc - n).
        let m = trunc - n;
        let rev: Vec<&S> = (0..=n).map(|k| &self.coeffs[n - k]).collect();
        let inv0 = rev[0].inv().expect("leading coefficient is nonzero");
        let mut r = vec![zero.clone(); m + 1];
        r[0] = inv0.clone();
        for j in 1..=m {
            let mut acc = zero.clone();
            for k in 1..=j.min(n) {
                if rev[k].is_zero() || r[j - k].is_zero() {
                    continue;
                }
                acc = acc.add(&rev[k].mul(&r[j - k]));
            }
            r[j] = acc.mul(&inv0).neg();
        }
        for (j, c) in r.into_iter().enumerate() {
            out[n + j] = c;
        }
        TruncatedSeries::new(out, trunc)
    }

    /// Exact equality for exact fields; coefficientwise `near` for floats.
    pub fn near(&self, other: &Self, tol: f64) -> bool {
        self.degree() == other.degree()
            && self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .all(|(a, b)| a.near(b, tol))
    }

    /// Largest coefficientwise difference magnitude.
    pub fn max_difference(&self, other: &Self) -> f64 {
        let n = self.coeffs.len().max(other.coeffs.len());
        (0..n)
            .map(|i| self.coeff(i).sub(&other.coeff(i)).magnitude())
            .fold(0.0, f64::max)
    }
}

/// Coefficients of `outer(inner)`.
pub(crate) fn compose_raw<S: Scalar>(outer: &[S], inner: &[S]) -> Vec<S> {
    let mut budget = u64::MAX;
    compose_budgeted(outer, inner, &mut budget).expect("unbounded budget")
}

/// Product of coefficient vectors, charging `nnz(a) * nnz(b)` scalar
/// multiplications, weighted by operand size, against `budget`. `None`
/// when the budget is exhausted.
pub(crate) fn mul_budgeted<S: Scalar>(a: &[S], b: &[S], budget: &mut u64) -> Option<Vec<S>> {
    let sa: Vec<(usize, &S)> = a.iter().enumerate().filter(|(_, c)| !c.is_zero()).collect();
    let sb: Vec<(usize, &S)> = b.iter().enumerate().filter(|(_, c)| !c.is_zero()).collect();
    let weight = |v: &[(usize, &S)]| v.iter().map(|(_, c)| c.cost_weight()).max().unwrap_or(1);
    let cost = (sa.len() as u64)
        .saturating_mul(sb.len() as u64)
        .saturating_mul(weight(&sa))
        .saturating_mul(weight(&sb));
    if cost > *budget {
        return None;
    }
    *budget -= cost;
    let zero = a[0].zero_like();
    let mut out = vec![zero; a.len() + b.len() - 1];
    for &(i, x) in &sa {
        for &(j, y) in &sb {
            out[i + j] = out[i + j].add(&x.mul(y));
        }
    }
    Some(out)
}

fn pow_budgeted<S: Scalar>(x: &[S], mut e: usize, budget: &mut u64) -> Option<Vec<S>> {
    let mut acc: Option<Vec<S>> = None;
    let mut base = x.to_vec();
    while e > 0 {
        if e & 1 == 1 {
            acc = Some(match acc {
                None => base.clone(),
                Some(a) => mul_budgeted(&a, &base, budget)?,
            });
        }
        e >>= 1;
        if e > 0 {
            base = mul_budgeted(&base, &base, budget)?;
        }
    }
    Some(acc.unwrap_or_else(|| vec![x[0].one_like()]))
}

/// `outer(inner)` by Horner's rule over the nonzero coefficients of
/// `outer`, jumping gaps with binary powers of `inner`.
pub(crate) fn compose_budgeted<S: Scalar>(
    outer: &[S],
    inner: &[S],
    budget: &mut u64,
) -> Option<Vec<S>> {
    let support: Vec<usize> = (0..outer.len()).filter(|&k| !outer[k].is_zero()).collect();
    let zero = outer[0].zero_like();
    let Some(&top) = support.last() else {
        return Some(vec![zero]);
    };
    let mut acc = vec![outer[top].clone()];
    let mut current = top;
    for &k in support.iter().rev().skip(1) {
        let step = pow_budgeted(inner, current - k, budget)?;
        acc = mul_budgeted(&acc, &step, budget)?;
        acc[0] = acc[0].add(&outer[k]);
        current = k;
    }
    if current > 0 {
        let step = pow_budgeted(inner, current, budget)?;
        acc = mul_budgeted(&acc, &step, budget)?;
    }
    while acc.len() > 1 && acc.last().is_some_and(Scalar::is_zero) {
        acc.pop();
    }
    Some(acc)
}

impl<S: Scalar> fmt::Display for Polynomial<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "({c})")?,
                1 => write!(f, "({c})*z")?,
                _ => write!(f, "({c})*z^{i}")?,
            }
        }
        Ok(())
    }
}

/// `z -> a z + b` with `a != 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineMap<S> {
    pub a: S,
    pub b: S,
}

impl<S: Scalar> AffineMap<S> {
    pub fn new(a: S, b: S) -> Result<Self, PolyError> {
        if a.is_zero() {
            return Err(PolyError::SingularAffine);
        }
        Ok(AffineMap { a, b })
    }

    pub fn identity(like: &S) -> Self {
        AffineMap {
            a: like.one_like(),
            b: like.zero_like(),
        }
    }

    pub fn apply(&self, z: &S) -> S {
        self.a.mul(z).add(&self.b)
    }

    pub fn as_polynomial(&self) -> Polynomial<S> {
        Polynomial {
            coeffs: vec![self.b.clone(), self.a.clone()],
        }
    }

    pub fn inverse(&self) -> Self {
        let ai = self.a.inv().expect("affine map is invertible");
        AffineMap {
            b: self.b.mul(&ai).neg(),
            a: ai,
        }
    }

    /// `self(other(z))`.
    pub fn then_after(&self, other: &Self) -> Self {
        AffineMap {
            a: self.a.mul(&other.a),
            b: self.a.mul(&other.b).add(&self.b),
        }
    }

    /// `self^-1 o p o self`.
    pub fn conjugate(&self, p: &Polynomial<S>) -> Polynomial<S> {
        let inner = p.compose(&self.as_polynomial());
        self.inverse().as_polynomial().compose(&inner)
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> AffineMap<T> {
        AffineMap {
            a: f(&self.a),
            b: f(&self.b),
        }
    }
}

impl<S: Scalar> fmt::Display for AffineMap<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "z -> ({})*z + ({})", self.a, self.b)
    }
}
