use std::fmt;

use num_complex::Complex64;
use rug::float::Constant;
use rug::ops::Pow;
use rug::{Complex, Float, Rational};

use super::{FieldKind, Scalar};

/// Arbitrary-precision complex float.
#[derive(Clone, Debug, PartialEq)]
pub struct BigComplex(pub Complex);

impl BigComplex {
    pub fn new(precision: u32) -> Self {
        BigComplex(Complex::new(precision))
    }

    pub fn from_f64(precision: u32, re: f64, im: f64) -> Self {
        BigComplex(Complex::with_val(precision, (re, im)))
    }

    pub fn from_c64(precision: u32, z: Complex64) -> Self {
        Self::from_f64(precision, z.re, z.im)
    }

    pub fn precision(&self) -> u32 {
        self.0.prec().0
    }

    /// `exp(2 pi i k / n)`.
    pub fn root_of_unity(precision: u32, n: u32, k: u32) -> Self {
        BigComplex(Complex::with_val(precision, Complex::root_of_unity(n, k % n)))
    }

    pub fn abs_float(&self) -> Float {
        Float::with_val(self.precision(), self.0.abs_ref())
    }

    /// Argument in `(-pi, pi]`.
    pub fn arg_float(&self) -> Float {
        Float::with_val(self.precision(), self.0.arg_ref())
    }

    pub fn real(&self) -> &Float {
        self.0.real()
    }

    pub fn imag(&self) -> &Float {
        self.0.imag()
    }

    /// Rounds to a lower (or higher) precision.
    pub fn with_precision(&self, precision: u32) -> Self {
        BigComplex(Complex::with_val(precision, &self.0))
    }

    fn joint(&self, rhs: &Self) -> u32 {
        self.precision().min(rhs.precision())
    }
}

impl fmt::Display for BigComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = ((self.precision() as f64) * std::f64::consts::LOG10_2).ceil() as usize + 1;
        let re = self.real().to_string_radix(10, Some(digits));
        if self.imag().is_zero() {
            return write!(f, "{re}");
        }
        let im = self.imag().to_string_radix(10, Some(digits));
        if self.real().is_zero() {
            return write!(f, "{im} i");
        }
        if im.starts_with('-') {
            write!(f, "{re}{im} i")
        } else {
            write!(f, "{re}+{im} i")
        }
    }
}

impl Scalar for BigComplex {
    fn kind(&self) -> FieldKind {
        FieldKind::BigComplex {
            precision: self.precision(),
        }
    }

    fn zero_like(&self) -> Self {
        BigComplex::new(self.precision())
    }

    fn one_like(&self) -> Self {
        BigComplex(Complex::with_val(self.precision(), 1))
    }

    fn from_rational_like(&self, q: &Rational) -> Self {
        BigComplex(Complex::with_val(self.precision(), q))
    }

    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    fn add(&self, rhs: &Self) -> Self {
        BigComplex(Complex::with_val(self.joint(rhs), &self.0 + &rhs.0))
    }

    fn sub(&self, rhs: &Self) -> Self {
        BigComplex(Complex::with_val(self.joint(rhs), &self.0 - &rhs.0))
    }

    fn mul(&self, rhs: &Self) -> Self {
        BigComplex(Complex::with_val(self.joint(rhs), &self.0 * &rhs.0))
    }

    fn neg(&self) -> Self {
        BigComplex(Complex::with_val(self.precision(), -&self.0))
    }

    fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        Some(BigComplex(Complex::with_val(
            self.precision(),
            self.0.recip_ref(),
        )))
    }

    fn magnitude(&self) -> f64 {
        self.abs_float().to_f64()
    }

    fn to_c64(&self) -> Complex64 {
        Complex64::new(self.real().to_f64(), self.imag().to_f64())
    }

    fn to_big(&self, precision: u32) -> BigComplex {
        self.with_precision(precision)
    }

    fn nth_root(&self, n: u32, branch: u32) -> Option<Self> {
        if n == 0 {
            return None;
        }
        let prec = self.precision();
        if self.is_zero() {
            return Some(self.clone());
        }
        let work = prec + 32;
        let r = Float::with_val(work, self.0.abs_ref());
        let r = Float::with_val(work, r.root_ref(n));
        let mut theta = Float::with_val(work, self.0.arg_ref());
        let two_pi = Float::with_val(work, Constant::Pi) * 2u32;
        theta += two_pi * (branch % n);
        theta /= n;
        let (s, c) = theta.sin_cos(Float::new(work));
        let z = Complex::with_val(prec, (r.clone() * c, r * s));
        Some(BigComplex(z))
    }

    fn root_of_unity_order(&self, max_order: u32, tol: f64) -> Option<u32> {
        if max_order == 0 || self.is_zero() {
            return None;
        }
        let prec = self.precision();
        let one = Float::with_val(prec, 1);
        let modulus_gap = Float::with_val(prec, self.abs_float() - &one).abs().to_f64();
        if modulus_gap > tol {
            return None;
        }
        let two_pi = Float::with_val(prec, Constant::Pi) * 2u32;
        let mut theta = Float::with_val(prec, self.arg_float() / &two_pi);
        if theta < 0 {
            theta += 1;
        }
        let lands = |q: u32| -> bool {
            let p = self.pow(q as u64);
            let d = p.sub(&self.one_like()).magnitude();
            d <= tol * q as f64
        };
        // Denominators of the continued-fraction convergents of theta.
        let x = match theta.to_rational() {
            Some(x) => x,
            None => return None,
        };
        let (mut k_prev, mut k) = (rug::Integer::from(1), rug::Integer::from(0));
        let mut rest = x;
        for _ in 0..128 {
            let a = rest.clone().floor().numer().clone();
            let k_next = a.clone() * &k + &k_prev;
            k_prev = std::mem::replace(&mut k, k_next);
            let q = match k.to_u32() {
                Some(q) if q <= max_order => q,
                _ => break,
            };
            if q >= 1 && lands(q) {
                return Some(q);
            }
            let frac = rest.clone() - Rational::from(a);
            if frac == 0 {
                break;
            }
            rest = frac.recip();
        }
        None
    }

    fn unity_order_bound(&self) -> Option<u32> {
        None
    }

    fn near(&self, other: &Self, tol: f64) -> bool {
        let d = self.sub(other).magnitude();
        let scale = 1f64.max(self.magnitude()).max(other.magnitude());
        d <= tol * scale
    }

    fn negligible(&self, tol: f64) -> bool {
        self.magnitude() <= tol
    }

    fn promote(&self, extra: u32) -> Self {
        self.with_precision(self.precision() + extra)
    }

    fn with_precision_of(&self, like: &Self) -> Self {
        self.with_precision(like.precision())
    }
}

/// `2^(-precision/2)`, the default numerical tolerance at a precision.
pub fn default_tolerance(precision: u32) -> f64 {
    Float::with_val(64, 2).pow(-((precision / 2) as i32)).to_f64()
}
