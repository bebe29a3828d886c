//! Truncated power series at the origin.
//!
//! A [`TruncatedSeries`] stores the coefficients of `z^0 .. z^N`; everything
//! above `N` is unknown. Every operation returns a series whose truncation
//! order is the largest index at which its coefficients are determined by the
//! inputs.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::scalar::{FieldKind, Scalar};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SeriesError {
    #[error("scalar field mismatch: {0} vs {1}")]
    FieldMismatch(FieldKind, FieldKind),
    #[error("inner series has a nonzero constant term")]
    NonzeroConstant,
    #[error("series vanishes up to order {0}: order and gap are indeterminate")]
    Indeterminate(usize),
    #[error("compositional inverse needs order exactly 1 (found {0})")]
    NotInvertible(String),
}

/// Gap between the first two nonzero coefficients.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Gap {
    Finite(usize),
    Infinite,
}

impl Gap {
    pub fn finite(self) -> Option<usize> {
        match self {
            Gap::Finite(l) => Some(l),
            Gap::Infinite => None,
        }
    }
}

impl fmt::Display for Gap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gap::Finite(l) => write!(f, "{l}"),
            Gap::Infinite => write!(f, "inf"),
        }
    }
}

/// Order of vanishing at 0 and the gap `l0` to the next nonzero term.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct OrdL0 {
    pub ord: usize,
    pub l0: Gap,
    /// False when the truncation leaves room for a later nonzero term.
    pub certain: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedSeries<S> {
    coeffs: Vec<S>,
    trunc: usize,
}

impl<S: Scalar> TruncatedSeries<S> {
    /// Pads with zeros or drops terms so that exactly `0..=trunc` is stored.
    /// `coeffs` must be non-empty so the field is known.
    pub fn new(mut coeffs: Vec<S>, trunc: usize) -> Self {
        assert!(!coeffs.is_empty(), "series needs at least one coefficient");
        let zero = coeffs[0].zero_like();
        coeffs.resize(trunc + 1, zero);
        TruncatedSeries { coeffs, trunc }
    }

    pub fn zero(like: &S, trunc: usize) -> Self {
        Self::new(vec![like.zero_like()], trunc)
    }

    /// `c z^n`.
    pub fn monomial(c: S, n: usize, trunc: usize) -> Self {
        let mut s = Self::zero(&c, trunc);
        if n <= trunc {
            s.coeffs[n] = c;
        }
        s
    }

    /// The identity series `z`.
    pub fn identity(like: &S, trunc: usize) -> Self {
        Self::monomial(like.one_like(), 1, trunc)
    }

    pub fn trunc_order(&self) -> usize {
        self.trunc
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Option<&S> {
        self.coeffs.get(i)
    }

    pub fn kind(&self) -> FieldKind {
        self.coeffs[0].kind()
    }

    pub fn zero_scalar(&self) -> S {
        self.coeffs[0].zero_like()
    }

    /// Explicitly lowers the truncation order.
    pub fn truncate(&self, trunc: usize) -> Self {
        let trunc = trunc.min(self.trunc);
        TruncatedSeries {
            coeffs: self.coeffs[..=trunc].to_vec(),
            trunc,
        }
    }

    fn check(&self, other: &Self) -> Result<(), SeriesError> {
        if self.kind().compatible(other.kind()) {
            Ok(())
        } else {
            Err(SeriesError::FieldMismatch(self.kind(), other.kind()))
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check(other)?;
        let n = self.trunc.min(other.trunc);
        let coeffs = (0..=n).map(|i| self.coeffs[i].add(&other.coeffs[i])).collect();
        Ok(TruncatedSeries { coeffs, trunc: n })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check(other)?;
        let n = self.trunc.min(other.trunc);
        let coeffs = (0..=n).map(|i| self.coeffs[i].sub(&other.coeffs[i])).collect();
        Ok(TruncatedSeries { coeffs, trunc: n })
    }

    pub fn neg(&self) -> Self {
        TruncatedSeries {
            coeffs: self.coeffs.iter().map(Scalar::neg).collect(),
            trunc: self.trunc,
        }
    }

    pub fn scale(&self, c: &S) -> Self {
        TruncatedSeries {
            coeffs: self.coeffs.iter().map(|x| x.mul(c)).collect(),
            trunc: self.trunc,
        }
    }

    /// Cauchy product truncated at `min(N_a, N_b)`.
    pub fn mul(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check(other)?;
        Ok(mul_upto(self, other, self.trunc.min(other.trunc)))
    }

    /// `self^e`, truncated at `N`.
    pub fn pow(&self, mut e: u64) -> Self {
        let n = self.trunc;
        let mut acc = Self::monomial(self.coeffs[0].one_like(), 0, n);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = mul_upto(&acc, &base, n);
            }
            e >>= 1;
            if e > 0 {
                base = mul_upto(&base, &base, n);
            }
        }
        acc
    }

    /// Index of the first coefficient that is not negligible at `tol`.
    pub fn order_tol(&self, tol: f64) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.negligible(tol))
    }

    pub fn ord_l0(&self) -> Result<OrdL0, SeriesError> {
        self.ord_l0_tol(0.0)
    }

    /// Like [`ord_l0`](Self::ord_l0), treating coefficients of magnitude at
    /// most `tol` as zero (only affects floats).
    pub fn ord_l0_tol(&self, tol: f64) -> Result<OrdL0, SeriesError> {
        let ord = self
            .order_tol(tol)
            .ok_or(SeriesError::Indeterminate(self.trunc))?;
        let next = self.coeffs[ord + 1..]
            .iter()
            .position(|c| !c.negligible(tol));
        Ok(match next {
            Some(gap) => OrdL0 {
                ord,
                l0: Gap::Finite(gap + 1),
                certain: true,
            },
            None => OrdL0 {
                ord,
                l0: Gap::Infinite,
                certain: false,
            },
        })
    }

    /// The sound horizon of `outer(inner)` for the given orders of the
    /// inputs: `min(q (N_o + 1) - 1, N_i + (max(r, 1) - 1) q)` where
    /// `q = Ord(inner)` and `r = Ord(outer)`.
    pub fn compose_horizon(outer: &Self, inner: &Self) -> Option<usize> {
        let q = inner.order_tol(0.0)?;
        let r = outer.order_tol(0.0).unwrap_or(outer.trunc + 1);
        let from_outer = q * (outer.trunc + 1) - 1;
        let from_inner = inner.trunc + (r.max(1) - 1) * q;
        Some(from_outer.min(from_inner))
    }

    /// `outer(inner(z))` at its sound horizon (see
    /// [`compose_horizon`](Self::compose_horizon)).
    pub fn compose(outer: &Self, inner: &Self) -> Result<Self, SeriesError> {
        Self::compose_capped(outer, inner, usize::MAX)
    }

    /// Composition with the horizon additionally capped at `cap`.
    pub fn compose_capped(outer: &Self, inner: &Self, cap: usize) -> Result<Self, SeriesError> {
        outer.check(inner)?;
        if !inner.coeffs[0].is_zero() {
            return Err(SeriesError::NonzeroConstant);
        }
        let Some(q) = inner.order_tol(0.0) else {
            // Inner is zero as far as it is known: only the constant survives.
            let m = inner.trunc.min(cap);
            return Ok(Self::monomial(outer.coeffs[0].clone(), 0, m));
        };
        let m = Self::compose_horizon(outer, inner)
            .expect("inner has a nonzero coefficient")
            .min(cap);
        // Degree of outer that can reach index <= m.
        let top = outer
            .coeffs
            .iter()
            .rposition(|c| !c.is_zero())
            .unwrap_or(0)
            .min(m / q);
        let zero = outer.zero_scalar();
        // Horner from the top: at level k only indices <= m - k q matter.
        let mut acc: Vec<S> = vec![outer.coeffs[top].clone()];
        let sparse_inner: Vec<(usize, &S)> = inner
            .coeffs
            .iter()
            .enumerate()
            .take(m + 1)
            .filter(|(_, c)| !c.is_zero())
            .collect();
        for k in (0..top).rev() {
            let limit = m - k * q;
            let mut next = vec![zero.clone(); limit + 1];
            for (i, a) in acc.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                for &(j, b) in &sparse_inner {
                    if i + j > limit {
                        break;
                    }
                    next[i + j] = next[i + j].add(&a.mul(b));
                }
            }
            next[0] = next[0].add(&outer.coeffs[k]);
            acc = next;
        }
        Ok(Self::new(acc, m))
    }

    /// Compositional inverse of a series with `Ord = 1` and invertible
    /// linear coefficient; same truncation order.
    pub fn comp_inverse(&self) -> Result<Self, SeriesError> {
        let n = self.trunc;
        if !self.coeffs[0].is_zero() {
            return Err(SeriesError::NotInvertible("nonzero constant term".into()));
        }
        if n == 0 {
            return Err(SeriesError::NotInvertible("truncation order 0".into()));
        }
        let s1_inv = self.coeffs[1]
            .inv()
            .ok_or_else(|| SeriesError::NotInvertible("vanishing linear term".into()))?;
        let zero = self.zero_scalar();
        // pw[k][i] = [z^i] t^k for k >= 1, filled column by column.
        let mut pw: Vec<Vec<S>> = vec![vec![zero.clone(); n + 1]; n + 1];
        pw[1][1] = s1_inv.clone();
        for k in 2..=n {
            pw[k][k] = pw[k - 1][k - 1].mul(&s1_inv);
        }
        let mut t = vec![zero.clone(); n + 1];
        t[1] = s1_inv.clone();
        for j in 2..=n {
            for k in 2..j {
                // [z^j] t^k = sum_a t_a [z^(j-a)] t^(k-1), a in 1..=j-k+1
                let mut acc = zero.clone();
                for a in 1..=j + 1 - k {
                    if t[a].is_zero() || pw[k - 1][j - a].is_zero() {
                        continue;
                    }
                    acc = acc.add(&t[a].mul(&pw[k - 1][j - a]));
                }
                pw[k][j] = acc;
            }
            let mut sum = zero.clone();
            for k in 2..=j {
                if self.coeffs[k].is_zero() {
                    continue;
                }
                sum = sum.add(&self.coeffs[k].mul(&pw[k][j]));
            }
            t[j] = sum.mul(&s1_inv).neg();
            pw[1][j] = t[j].clone();
        }
        Ok(TruncatedSeries { coeffs: t, trunc: n })
    }

    /// Largest magnitude among coefficients with index in `from..=to`
    /// (clamped to the horizon).
    pub fn max_magnitude(&self, from: usize, to: usize) -> f64 {
        let to = to.min(self.trunc);
        if from > to {
            return 0.0;
        }
        self.coeffs[from..=to]
            .iter()
            .map(Scalar::magnitude)
            .fold(0.0, f64::max)
    }
}

/// Cauchy product up to index `n`, which the caller has checked is sound.
pub(crate) fn mul_upto<S: Scalar>(a: &TruncatedSeries<S>, b: &TruncatedSeries<S>, n: usize) -> TruncatedSeries<S> {
    let zero = a.zero_scalar();
    let mut out = vec![zero; n + 1];
    let bs: Vec<(usize, &S)> = b
        .coeffs
        .iter()
        .enumerate()
        .take(n + 1)
        .filter(|(_, c)| !c.is_zero())
        .collect();
    for (i, x) in a.coeffs.iter().enumerate().take(n + 1) {
        if x.is_zero() {
            continue;
        }
        for &(j, y) in &bs {
            if i + j > n {
                break;
            }
            out[i + j] = out[i + j].add(&x.mul(y));
        }
    }
    TruncatedSeries { coeffs: out, trunc: n }
}

impl<S: Scalar> fmt::Display for TruncatedSeries<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
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
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(z^{})", self.trunc + 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::GaussianRational as G;

    fn s(v: &[i64], n: usize) -> TruncatedSeries<G> {
        TruncatedSeries::new(v.iter().map(|&x| G::real(x)).collect(), n)
    }

    #[test]
    fn add_cancels_and_takes_min_trunc() {
        let a = s(&[0, 1], 10);
        let b = s(&[0, -1], 20);
        let c = a.add(&b).unwrap();
        assert_eq!(c.trunc_order(), 10);
        assert!(c.coeffs().iter().all(|x| x.is_zero()));
        let d = s(&[0, 0, 1, 0, 0, 1], 8).add(&s(&[0, 0, 0, 1], 8)).unwrap();
        assert_eq!(d, s(&[0, 0, 1, 1, 0, 1], 8));
    }

    #[test]
    fn products() {
        assert_eq!(s(&[0, 1], 5).mul(&s(&[0, 1], 5)).unwrap(), s(&[0, 0, 1], 5));
        assert_eq!(s(&[1, 1], 5).mul(&s(&[1, -1], 5)).unwrap(), s(&[1, 0, -1], 5));
        let x = s(&[0, 0, 1, 1], 10);
        assert_eq!(x.mul(&x).unwrap(), s(&[0, 0, 0, 0, 1, 2, 1], 10));
    }

    #[test]
    fn composition_examples() {
        let x = s(&[0, 1, 1], 10);
        let sq = TruncatedSeries::compose(&s(&[0, 0, 1], 10), &x).unwrap();
        assert_eq!(sq.truncate(10), s(&[0, 0, 1, 2, 1], 10));

        let t = s(&[0, 0, 1, 0, 1], 20);
        let x = s(&[0, 0, 1, 1], 20);
        let c = TruncatedSeries::compose(&t, &x).unwrap();
        assert_eq!(&c.coeffs()[..7], s(&[0, 0, 0, 0, 1, 2, 1], 6).coeffs());
        let o = c.ord_l0().unwrap();
        assert_eq!((o.ord, o.l0), (4, Gap::Finite(1)));

        let id = TruncatedSeries::identity(&G::real(1), 20);
        assert_eq!(TruncatedSeries::compose(&t, &id).unwrap(), t);
    }

    #[test]
    fn horizon_is_sound() {
        // z^2 known to 3 composed with z^2 + O(z^4): true coefficients are
        // only known up to min(2*4-1, 3+2) = 5.
        let outer = s(&[0, 0, 1], 3);
        let inner = s(&[0, 0, 1], 3);
        let c = TruncatedSeries::compose(&outer, &inner).unwrap();
        assert_eq!(c.trunc_order(), 5);
    }

    #[test]
    fn nonzero_constant_inner_rejected() {
        let e = TruncatedSeries::compose(&s(&[0, 1], 5), &s(&[1, 1], 5));
        assert_eq!(e, Err(SeriesError::NonzeroConstant));
    }

    #[test]
    fn inverse_examples() {
        let id = s(&[0, 1], 12);
        assert_eq!(id.comp_inverse().unwrap(), id);
        let two = s(&[0, 2], 12);
        let half = TruncatedSeries::new(
            vec![G::real(0), G::real(rug::Rational::from((1, 2)))],
            12,
        );
        assert_eq!(two.comp_inverse().unwrap(), half);
        let t = s(&[0, 1, 1], 8).comp_inverse().unwrap();
        assert_eq!(t, s(&[0, 1, -1, 2, -5, 14, -42, 132, -429], 8));
        let back = TruncatedSeries::compose(&s(&[0, 1, 1], 8), &t).unwrap();
        assert_eq!(back.truncate(8), id.truncate(8));
    }

    #[test]
    fn ord_l0_examples() {
        let o = s(&[0, 0, 0, 1, 0, 0, 0, 2], 10).ord_l0().unwrap();
        assert_eq!(o, OrdL0 { ord: 3, l0: Gap::Finite(4), certain: true });
        let m = TruncatedSeries::monomial(G::real(1), 5, 40).ord_l0().unwrap();
        assert_eq!(m, OrdL0 { ord: 5, l0: Gap::Infinite, certain: false });
        let o = s(&[0, 0, 1, 1], 10).ord_l0().unwrap();
        assert_eq!((o.ord, o.l0), (2, Gap::Finite(1)));
        assert_eq!(s(&[0], 10).ord_l0(), Err(SeriesError::Indeterminate(10)));
    }
}
