//! Reduction of exact scalars modulo word-sized primes.
//!
//! An [`Embedding`] fixes a prime `p` together with an element of `F_p` of
//! the field's root-of-unity order, so that `Q(i)` or `Q(zeta_m)` maps into
//! `F_p` as a ring homomorphism (away from denominators divisible by `p`).

use rand::Rng;
use rug::{Integer, Rational};

use super::{BigComplex, Cyclotomic, GaussianRational};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Embedding {
    pub p: u64,
    /// Image of `i` (order 4) or of `zeta_m` (order `m`).
    pub root: u64,
    pub order: u32,
}

pub fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub fn add_mod(a: u64, b: u64, p: u64) -> u64 {
    let s = a as u128 + b as u128;
    (s % p as u128) as u64
}

pub fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    acc
}

pub fn inv_mod(a: u64, p: u64) -> Option<u64> {
    if a % p == 0 {
        None
    } else {
        Some(pow_mod(a, p - 2, p))
    }
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for b in BASES {
        if n % b == 0 {
            return n == b;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut f = 2;
    while f * f <= n {
        if n % f == 0 {
            out.push(f);
            while n % f == 0 {
                n /= f;
            }
        }
        f += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

impl Embedding {
    /// A random prime `p < 2^62` with `p = 1 mod order` and an element of
    /// exact multiplicative order `order` in `F_p`.
    pub fn random<R: Rng>(order: u32, rng: &mut R) -> Self {
        let q = order.max(1) as u64;
        let factors = prime_factors(q);
        loop {
            let k: u64 = rng.gen_range((1u64 << 60) / q..(1u64 << 61) / q);
            let p = k * q + 1;
            if !is_prime_u64(p) {
                continue;
            }
            for _ in 0..64 {
                let g = rng.gen_range(2..p - 1);
                let h = pow_mod(g, (p - 1) / q, p);
                if factors.iter().all(|&r| pow_mod(h, q / r, p) != 1) {
                    return Embedding {
                        p,
                        root: h,
                        order: order.max(1),
                    };
                }
            }
        }
    }

    pub fn reduce_rational(&self, q: &Rational) -> Option<u64> {
        let pi = Integer::from(self.p);
        let n = q.numer().clone().modulo(&pi).to_u64()?;
        let d = q.denom().clone().modulo(&pi).to_u64()?;
        Some(mul_mod(n, inv_mod(d, self.p)?, self.p))
    }
}

/// Exact scalars with a ring homomorphism into `F_p`.
pub trait ModularImage {
    /// Root-of-unity order the embedding must provide; `None` when the field
    /// has no modular image.
    fn modular_order(&self) -> Option<u32>;

    /// `None` when a denominator vanishes mod `p` or the field has no image.
    fn reduce(&self, emb: &Embedding) -> Option<u64>;
}

impl ModularImage for GaussianRational {
    fn modular_order(&self) -> Option<u32> {
        Some(4)
    }

    fn reduce(&self, emb: &Embedding) -> Option<u64> {
        let re = emb.reduce_rational(&self.re)?;
        let im = emb.reduce_rational(&self.im)?;
        Some(add_mod(re, mul_mod(im, emb.root, emb.p), emb.p))
    }
}

impl ModularImage for Cyclotomic {
    fn modular_order(&self) -> Option<u32> {
        Some(self.order())
    }

    fn reduce(&self, emb: &Embedding) -> Option<u64> {
        let mut acc = 0u64;
        for c in self.coeffs().iter().rev() {
            acc = add_mod(mul_mod(acc, emb.root, emb.p), emb.reduce_rational(c)?, emb.p);
        }
        Some(acc)
    }
}

impl ModularImage for BigComplex {
    fn modular_order(&self) -> Option<u32> {
        None
    }

    fn reduce(&self, _emb: &Embedding) -> Option<u64> {
        None
    }
}
