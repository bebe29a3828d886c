use std::fmt;

use num_complex::Complex64;
use rug::{Complex, Float, Integer, Rational};

use super::{BigComplex, FieldKind, Scalar};

/// Exact element `re + im i` of `Q(i)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct GaussianRational {
    pub re: Rational,
    pub im: Rational,
}

impl GaussianRational {
    pub fn new(re: impl Into<Rational>, im: impl Into<Rational>) -> Self {
        GaussianRational {
            re: re.into(),
            im: im.into(),
        }
    }

    pub fn real(re: impl Into<Rational>) -> Self {
        Self::new(re, 0)
    }

    pub fn i() -> Self {
        Self::new(0, 1)
    }

    pub fn conj(&self) -> Self {
        GaussianRational {
            re: self.re.clone(),
            im: Rational::from(-&self.im),
        }
    }

    /// `re^2 + im^2`.
    pub fn norm(&self) -> Rational {
        Rational::from(&self.re * &self.re) + Rational::from(&self.im * &self.im)
    }

    /// Least common denominator of both parts.
    pub fn denominator(&self) -> Integer {
        self.re.denom().clone().lcm(self.im.denom())
    }
}

fn write_rational(f: &mut fmt::Formatter<'_>, q: &Rational) -> fmt::Result {
    if *q.denom() == 1 {
        write!(f, "{}", q.numer())
    } else {
        write!(f, "{}/{}", q.numer(), q.denom())
    }
}

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im == 0 {
            return write_rational(f, &self.re);
        }
        if self.re != 0 {
            write_rational(f, &self.re)?;
            if self.im > 0 {
                write!(f, "+")?;
            }
        }
        if self.im == 1 {
            write!(f, "i")
        } else if self.im == -1 {
            write!(f, "-i")
        } else {
            write_rational(f, &self.im)?;
            write!(f, " i")
        }
    }
}

impl Scalar for GaussianRational {
    fn cost_weight(&self) -> u64 {
        let bits = [&self.re, &self.im]
            .iter()
            .map(|q| q.numer().significant_bits().max(q.denom().significant_bits()))
            .max()
            .unwrap_or(0);
        1 + bits as u64 / 64
    }

    fn kind(&self) -> FieldKind {
        FieldKind::GaussianRational
    }

    fn zero_like(&self) -> Self {
        GaussianRational::default()
    }

    fn one_like(&self) -> Self {
        GaussianRational::real(1)
    }

    fn from_rational_like(&self, q: &Rational) -> Self {
        GaussianRational::real(q.clone())
    }

    fn is_zero(&self) -> bool {
        self.re == 0 && self.im == 0
    }

    fn add(&self, rhs: &Self) -> Self {
        GaussianRational {
            re: Rational::from(&self.re + &rhs.re),
            im: Rational::from(&self.im + &rhs.im),
        }
    }

    fn sub(&self, rhs: &Self) -> Self {
        GaussianRational {
            re: Rational::from(&self.re - &rhs.re),
            im: Rational::from(&self.im - &rhs.im),
        }
    }

    fn mul(&self, rhs: &Self) -> Self {
        if self.im == 0 && rhs.im == 0 {
            return GaussianRational::real(Rational::from(&self.re * &rhs.re));
        }
        let re = Rational::from(&self.re * &rhs.re) - Rational::from(&self.im * &rhs.im);
        let im = Rational::from(&self.re * &rhs.im) + Rational::from(&self.im * &rhs.re);
        GaussianRational { re, im }
    }

    fn neg(&self) -> Self {
        GaussianRational {
            re: Rational::from(-&self.re),
            im: Rational::from(-&self.im),
        }
    }

    fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm();
        Some(GaussianRational {
            re: Rational::from(&self.re / &n),
            im: Rational::from(-&self.im) / n,
        })
    }

    fn magnitude(&self) -> f64 {
        self.to_c64().norm()
    }

    fn to_c64(&self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    fn to_big(&self, precision: u32) -> BigComplex {
        BigComplex(Complex::with_val(
            precision,
            (
                Float::with_val(precision, &self.re),
                Float::with_val(precision, &self.im),
            ),
        ))
    }

    fn nth_root(&self, n: u32, branch: u32) -> Option<Self> {
        if n == 0 {
            return None;
        }
        if n == 1 || self.is_zero() {
            return Some(self.clone());
        }
        // If x^n = X / D with X a Gaussian integer then (D x)^n = D^(n-1) X is
        // integral, so D x is a Gaussian integer and rounding recovers it.
        let d = self.denominator();
        let size = self.re.numer().significant_bits().max(self.im.numer().significant_bits())
            + d.significant_bits();
        let precision = 2 * size + 64;
        let approx = self.to_big(precision).nth_root(n, branch)?;
        let scale = Float::with_val(precision, &d);
        let round = |v: &Float| -> Option<Integer> {
            Float::with_val(precision, v * &scale).round().to_integer()
        };
        let re = round(approx.real())?;
        let im = round(approx.imag())?;
        let candidate = GaussianRational {
            re: Rational::from((re, d.clone())),
            im: Rational::from((im, d)),
        };
        if candidate.pow(n as u64) == *self {
            Some(candidate)
        } else {
            None
        }
    }

    fn root_of_unity_order(&self, max_order: u32, _tol: f64) -> Option<u32> {
        let one = self.one_like();
        let mut p = self.clone();
        for l in 1..=max_order.min(4) {
            if p == one {
                return if 4 % l == 0 { Some(l) } else { None };
            }
            p = p.mul(self);
        }
        None
    }

    fn unity_order_bound(&self) -> Option<u32> {
        Some(4)
    }

    fn near(&self, other: &Self, _tol: f64) -> bool {
        self == other
    }

    fn negligible(&self, _tol: f64) -> bool {
        self.is_zero()
    }
}
