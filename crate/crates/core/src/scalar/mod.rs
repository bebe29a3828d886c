//! Coefficient fields.
//!
//! Three fields are supported: Gaussian rationals `Q(i)`, cyclotomic fields
//! `Q(zeta_m)` in the power basis reduced modulo the `m`-th cyclotomic
//! polynomial, and arbitrary-precision complex floats. Elements carry enough
//! context (the cyclotomic order, the float precision) to build zeros and ones
//! of the same field, so there is no separate "ring" object to thread around.

mod bigcomplex;
mod cyclotomic;
mod gaussian;
pub(crate) mod modular;

use std::fmt;

use num_complex::Complex64;
use rug::Rational;
use serde::Serialize;

pub use bigcomplex::{default_tolerance, BigComplex};
pub use cyclotomic::{cyclotomic_polynomial, totient, Cyclotomic};
pub use gaussian::GaussianRational;
pub use modular::{Embedding, ModularImage};

/// Which field a scalar lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "field", rename_all = "snake_case")]
pub enum FieldKind {
    GaussianRational,
    Cyclotomic { order: u32 },
    BigComplex { precision: u32 },
}

impl FieldKind {
    /// Two scalars may be combined when this holds. Floats of different
    /// precision are compatible; the result is rounded to the lower one.
    pub fn compatible(self, other: FieldKind) -> bool {
        match (self, other) {
            (FieldKind::GaussianRational, FieldKind::GaussianRational) => true,
            (FieldKind::Cyclotomic { order: a }, FieldKind::Cyclotomic { order: b }) => a == b,
            (FieldKind::BigComplex { .. }, FieldKind::BigComplex { .. }) => true,
            _ => false,
        }
    }

    pub fn is_exact(self) -> bool {
        !matches!(self, FieldKind::BigComplex { .. })
    }
}

impl fmt::Display for FieldKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldKind::GaussianRational => write!(f, "Q(i)"),
            FieldKind::Cyclotomic { order } => write!(f, "Q(zeta_{order})"),
            FieldKind::BigComplex { precision } => write!(f, "C[{precision} bits]"),
        }
    }
}

/// Field operations shared by every coefficient type.
///
/// Arithmetic between elements of incompatible fields is a logic error; the
/// series and polynomial layers check [`FieldKind::compatible`] before they
/// combine values and report a mismatch as an error.
pub trait Scalar:
    Clone + fmt::Debug + fmt::Display + PartialEq + ModularImage + Send + Sync + 'static
{
    fn kind(&self) -> FieldKind;
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn from_rational_like(&self, q: &Rational) -> Self;

    fn from_i64_like(&self, n: i64) -> Self {
        self.from_rational_like(&Rational::from(n))
    }

    /// Exact test, also for floats.
    fn is_zero(&self) -> bool;

    fn is_one(&self) -> bool {
        *self == self.one_like()
    }

    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;

    /// `None` for zero.
    fn inv(&self) -> Option<Self>;

    fn div(&self, rhs: &Self) -> Option<Self> {
        rhs.inv().map(|r| self.mul(&r))
    }

    fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = self.one_like();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Complex absolute value, rounded to `f64`.
    fn magnitude(&self) -> f64;

    fn to_c64(&self) -> Complex64;

    /// Numerical image at the given precision (the principal embedding for
    /// cyclotomic fields, `zeta_m = exp(2 pi i / m)`).
    fn to_big(&self, precision: u32) -> BigComplex;

    /// An `n`-th root, when one exists in the field. Branch `k` is the one
    /// whose numerical value is `|a|^(1/n) exp(i (arg a + 2 pi k) / n)`.
    fn nth_root(&self, n: u32, branch: u32) -> Option<Self>;

    /// Least `l <= max_order` with `self^l = 1`. Exact fields ignore `tol`.
    fn root_of_unity_order(&self, max_order: u32, tol: f64) -> Option<u32>;

    /// For exact fields, an integer `M` such that every root of unity in the
    /// field has order dividing `M`. `None` for floats.
    fn unity_order_bound(&self) -> Option<u32>;

    /// Equality for exact fields; `|a - b| <= tol * max(1, |a|, |b|)` for floats.
    fn near(&self, other: &Self, tol: f64) -> bool;

    /// `is_zero` for exact fields; `|a| <= tol` for floats.
    fn negligible(&self, tol: f64) -> bool;

    fn is_exact(&self) -> bool {
        self.kind().is_exact()
    }

    /// Rough cost of one multiplication operand, in machine words. Exact
    /// coefficients grow under composition, so budgets scale by this.
    fn cost_weight(&self) -> u64 {
        1
    }

    /// Same value carried at `extra` more bits; exact fields are unchanged.
    fn promote(&self, _extra: u32) -> Self {
        self.clone()
    }

    /// Same value carried at the precision of `like`.
    fn with_precision_of(&self, _like: &Self) -> Self {
        self.clone()
    }
}

pub fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn lcm_u64(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        return 0;
    }
    a / gcd_u64(a, b) * b
}
