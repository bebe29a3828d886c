use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rug::{Complex, Integer, Rational};

use super::{lcm_u64, BigComplex, FieldKind, GaussianRational, Scalar};

/// The `m`-th cyclotomic polynomial, coefficients low to high.
pub fn cyclotomic_polynomial(m: u32) -> Arc<Vec<Integer>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<Vec<Integer>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(p) = cache.lock().unwrap().get(&m) {
        return p.clone();
    }
    assert!(m >= 1, "cyclotomic order must be positive");
    // x^m - 1 divided by every Phi_d with d | m, d < m.
    let mut num = vec![Integer::new(); m as usize + 1];
    num[0] = Integer::from(-1);
    num[m as usize] = Integer::from(1);
    for d in 1..m {
        if m % d == 0 {
            let phi = cyclotomic_polynomial(d);
            num = exact_monic_div(&num, &phi);
        }
    }
    let p = Arc::new(num);
    cache.lock().unwrap().insert(m, p.clone());
    p
}

fn exact_monic_div(num: &[Integer], den: &[Integer]) -> Vec<Integer> {
    let dn = den.len() - 1;
    let mut rem = num.to_vec();
    let qlen = num.len() - dn;
    let mut q = vec![Integer::new(); qlen];
    for i in (0..qlen).rev() {
        let c = rem[i + dn].clone();
        if c != 0 {
            for (j, dj) in den.iter().enumerate() {
                rem[i + j] -= Integer::from(&c * dj);
            }
        }
        q[i] = c;
    }
    debug_assert!(rem.iter().all(|c| *c == 0));
    q
}

/// Euler's totient.
pub fn totient(m: u32) -> u32 {
    let mut n = m;
    let mut out = m;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            out -= out / p;
        }
        p += 1;
    }
    if n > 1 {
        out -= out / n;
    }
    out
}

/// Element of `Q(zeta_m)` in the power basis `1, zeta, ..., zeta^(phi(m)-1)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Cyclotomic {
    order: u32,
    coeffs: Vec<Rational>,
}

impl Cyclotomic {
    pub fn zero(order: u32) -> Self {
        Cyclotomic {
            order,
            coeffs: vec![Rational::new(); totient(order) as usize],
        }
    }

    pub fn rational(order: u32, q: Rational) -> Self {
        let mut c = Self::zero(order);
        c.coeffs[0] = q;
        c
    }

    /// `zeta_m^j` for any integer `j`.
    pub fn zeta_power(order: u32, j: i64) -> Self {
        let e = j.rem_euclid(order as i64) as usize;
        let mut raw = vec![Rational::new(); e.max(1) + 1];
        raw[e] = Rational::from(1);
        Self::from_raw(order, raw)
    }

    /// Reduces an arbitrary coefficient vector modulo `Phi_m`.
    pub fn from_raw(order: u32, mut raw: Vec<Rational>) -> Self {
        let phi = cyclotomic_polynomial(order);
        let d = phi.len() - 1;
        if raw.len() > d {
            for top in (d..raw.len()).rev() {
                let c = std::mem::take(&mut raw[top]);
                if c != 0 {
                    for (j, pj) in phi.iter().enumerate().take(d) {
                        if *pj != 0 {
                            raw[top - d + j] -= Rational::from(&c * pj);
                        }
                    }
                }
            }
        }
        raw.resize(d, Rational::new());
        Cyclotomic { order, coeffs: raw }
    }

    /// Embeds a Gaussian rational; needs `4 | order`.
    pub fn from_gaussian(order: u32, g: &GaussianRational) -> Option<Self> {
        if order % 4 != 0 {
            return None;
        }
        let i = Self::zeta_power(order, (order / 4) as i64);
        let re = Self::rational(order, g.re.clone());
        let im = Self::rational(order, g.im.clone());
        Some(re.add(&im.mul(&i)))
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// The rational value when the element lies in `Q`.
    pub fn as_rational(&self) -> Option<&Rational> {
        if self.coeffs[1..].iter().all(|c| *c == 0) {
            Some(&self.coeffs[0])
        } else {
            None
        }
    }

    /// All roots of unity of the field, as `(element, numeric exponent t)`
    /// with numeric value `exp(2 pi i t / M)`, `M = lcm(2, m)`.
    fn units_of_finite_order(&self) -> Vec<(Cyclotomic, u32)> {
        let m = self.order;
        let big_m = lcm_u64(2, m as u64) as u32;
        let step = big_m / m;
        let mut out = Vec::with_capacity(big_m as usize);
        for t in 0..m {
            let z = Self::zeta_power(m, t as i64);
            out.push((z.clone(), (t * step) % big_m));
            if step == 2 {
                out.push((z.neg(), (t * step + m) % big_m));
            }
        }
        out
    }
}

fn poly_trim(p: &mut Vec<Rational>) {
    while p.last().is_some_and(|c| *c == 0) {
        p.pop();
    }
}

fn poly_divrem(a: &[Rational], b: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
    let mut rem = a.to_vec();
    poly_trim(&mut rem);
    let db = b.len() - 1;
    let lead_inv = Rational::from(b[db].recip_ref());
    if rem.len() <= db {
        return (Vec::new(), rem);
    }
    let mut q = vec![Rational::new(); rem.len() - db];
    for i in (0..q.len()).rev() {
        let c = Rational::from(&rem[i + db] * &lead_inv);
        if c != 0 {
            for (j, bj) in b.iter().enumerate() {
                rem[i + j] -= Rational::from(&c * bj);
            }
        }
        q[i] = c;
    }
    poly_trim(&mut rem);
    (q, rem)
}

fn poly_mul(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Rational::new(); a.len() + b.len() - 1];
    for (i, ai) in a.iter().enumerate() {
        if *ai == 0 {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            if *bj != 0 {
                out[i + j] += Rational::from(ai * bj);
            }
        }
    }
    out
}

fn poly_sub(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let n = a.len().max(b.len());
    let mut out = vec![Rational::new(); n];
    for (i, c) in a.iter().enumerate() {
        out[i] += c;
    }
    for (i, c) in b.iter().enumerate() {
        out[i] -= c;
    }
    poly_trim(&mut out);
    out
}

impl fmt::Display for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (j, c) in self.coeffs.iter().enumerate() {
            if *c == 0 {
                continue;
            }
            let negative = *c < 0;
            let abs = Rational::from(c.abs_ref());
            if negative {
                write!(f, "-")?;
            } else if !first {
                write!(f, "+")?;
            }
            first = false;
            let unit = j > 0 && abs == 1;
            if !unit {
                if *abs.denom() == 1 {
                    write!(f, "{}", abs.numer())?;
                } else {
                    write!(f, "{}/{}", abs.numer(), abs.denom())?;
                }
            }
            if j > 0 {
                if !unit {
                    write!(f, " ")?;
                }
                write!(f, "zeta({})^{}", self.order, j)?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl Scalar for Cyclotomic {
    fn cost_weight(&self) -> u64 {
        let bits = self
            .coeffs
            .iter()
            .map(|q| q.numer().significant_bits().max(q.denom().significant_bits()))
            .max()
            .unwrap_or(0);
        self.coeffs.len() as u64 * (1 + bits as u64 / 64)
    }

    fn kind(&self) -> FieldKind {
        FieldKind::Cyclotomic { order: self.order }
    }

    fn zero_like(&self) -> Self {
        Self::zero(self.order)
    }

    fn one_like(&self) -> Self {
        Self::rational(self.order, Rational::from(1))
    }

    fn from_rational_like(&self, q: &Rational) -> Self {
        Self::rational(self.order, q.clone())
    }

    fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == 0)
    }

    fn add(&self, rhs: &Self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .zip(&rhs.coeffs)
            .map(|(a, b)| Rational::from(a + b))
            .collect();
        Cyclotomic {
            order: self.order,
            coeffs,
        }
    }

    fn sub(&self, rhs: &Self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .zip(&rhs.coeffs)
            .map(|(a, b)| Rational::from(a - b))
            .collect();
        Cyclotomic {
            order: self.order,
            coeffs,
        }
    }

    fn mul(&self, rhs: &Self) -> Self {
        if let Some(q) = self.as_rational() {
            let coeffs = rhs.coeffs.iter().map(|c| Rational::from(c * q)).collect();
            return Cyclotomic {
                order: self.order,
                coeffs,
            };
        }
        if rhs.as_rational().is_some() {
            return rhs.mul(self);
        }
        Self::from_raw(self.order, poly_mul(&self.coeffs, &rhs.coeffs))
    }

    fn neg(&self) -> Self {
        Cyclotomic {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| Rational::from(-c)).collect(),
        }
    }

    fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        if let Some(q) = self.as_rational() {
            return Some(Self::rational(self.order, Rational::from(q.recip_ref())));
        }
        // Extended Euclid: s * a + t * Phi = 1.
        let phi: Vec<Rational> = cyclotomic_polynomial(self.order)
            .iter()
            .map(Rational::from)
            .collect();
        let mut a = self.coeffs.clone();
        poly_trim(&mut a);
        let (mut r0, mut r1) = (phi, a);
        let (mut s0, mut s1): (Vec<Rational>, Vec<Rational>) =
            (Vec::new(), vec![Rational::from(1)]);
        while !r1.is_empty() {
            let (q, r) = poly_divrem(&r0, &r1);
            let s2 = poly_sub(&s0, &poly_mul(&q, &s1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s2);
        }
        // r0 is a nonzero constant since Phi is irreducible.
        debug_assert_eq!(r0.len(), 1);
        let c = Rational::from(r0[0].recip_ref());
        let s: Vec<Rational> = s0.into_iter().map(|x| x * &c).collect();
        Some(Self::from_raw(self.order, s))
    }

    fn magnitude(&self) -> f64 {
        self.to_big(64).magnitude()
    }

    fn to_c64(&self) -> Complex64 {
        self.to_big(64).to_c64()
    }

    fn to_big(&self, precision: u32) -> BigComplex {
        let zeta = Complex::with_val(precision, Complex::root_of_unity(self.order, 1));
        let mut acc = Complex::new(precision);
        for c in self.coeffs.iter().rev() {
            acc *= &zeta;
            acc += c;
        }
        BigComplex(acc)
    }

    fn nth_root(&self, n: u32, branch: u32) -> Option<Self> {
        if n == 0 {
            return None;
        }
        if n == 1 || self.is_zero() {
            return Some(self.clone());
        }
        // Only elements of the form (rational) * (root of unity) are handled.
        let units = self.units_of_finite_order();
        for (u, _) in &units {
            let c = self.mul(&u.inv()?);
            let Some(q) = c.as_rational() else { continue };
            if *q <= 0 {
                continue;
            }
            let (Some(num), Some(den)) = (exact_root(q.numer(), n), exact_root(q.denom(), n))
            else {
                return None;
            };
            let r = Self::rational(self.order, Rational::from((num, den)));
            let target = self.to_big(128).nth_root(n, branch)?;
            let mut best: Option<(f64, Cyclotomic)> = None;
            for (v, _) in &units {
                if v.pow(n as u64) != *u {
                    continue;
                }
                let cand = r.mul(v);
                let d = cand.to_big(128).sub(&target).magnitude();
                if best.as_ref().is_none_or(|(bd, _)| d < *bd) {
                    best = Some((d, cand));
                }
            }
            let (d, cand) = best?;
            let scale = target.magnitude().max(1e-300);
            return if d <= 1e-20 * scale.max(1.0) { Some(cand) } else { None };
        }
        None
    }

    fn root_of_unity_order(&self, max_order: u32, _tol: f64) -> Option<u32> {
        let big_m = self.unity_order_bound()?;
        if self.pow(big_m as u64) != self.one_like() {
            return None;
        }
        (1..=big_m.min(max_order))
            .filter(|l| big_m % l == 0)
            .find(|&l| self.pow(l as u64).is_one())
    }

    fn unity_order_bound(&self) -> Option<u32> {
        Some(lcm_u64(2, self.order as u64) as u32)
    }

    fn near(&self, other: &Self, _tol: f64) -> bool {
        self == other
    }

    fn negligible(&self, _tol: f64) -> bool {
        self.is_zero()
    }
}

fn exact_root(x: &Integer, n: u32) -> Option<Integer> {
    let (root, rem) = x.clone().root_rem(Integer::new(), n);
    if rem == 0 {
        Some(root)
    } else {
        None
    }
}
