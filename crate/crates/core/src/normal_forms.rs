//! Chebyshev polynomials, affine conjugacy to powers or Chebyshev
//! polynomials, and the `omega_i T^(l_i)` normal form.

use rug::Rational;
use serde::Serialize;

use crate::polynomial::{AffineMap, Polynomial};
use crate::scalar::{lcm_u64, Scalar};

/// `T_n` with `T_n(cos x) = cos(n x)`, from `T_{n+1} = 2 z T_n - T_{n-1}`.
pub fn chebyshev<S: Scalar>(n: usize, like: &S) -> Option<Polynomial<S>> {
    if n == 0 {
        return None;
    }
    let zero = like.zero_like();
    let one = like.one_like();
    let two = like.from_i64_like(2);
    let mut prev = vec![one.clone()];
    let mut cur = vec![zero.clone(), one];
    for _ in 1..n {
        let mut next = vec![zero.clone(); cur.len() + 1];
        for (i, c) in cur.iter().enumerate() {
            next[i + 1] = next[i + 1].add(&c.mul(&two));
        }
        for (i, c) in prev.iter().enumerate() {
            next[i] = next[i].sub(c);
        }
        prev = std::mem::replace(&mut cur, next);
    }
    Polynomial::new(cur).ok()
}

/// Coefficientwise `a == b` (exact) or agreement within `tol` relative to
/// the largest coefficient (floats).
fn coeffs_near<S: Scalar>(a: &[S], b: &[S], tol: f64) -> bool {
    let n = a.len().max(b.len());
    let zero = a.first().or(b.first()).map(Scalar::zero_like);
    let Some(zero) = zero else { return true };
    let at = |v: &[S], i: usize| v.get(i).cloned().unwrap_or_else(|| zero.clone());
    let scale = a
        .iter()
        .chain(b)
        .map(Scalar::magnitude)
        .fold(1.0, f64::max);
    (0..n).all(|i| at(a, i).sub(&at(b, i)).negligible(tol * scale))
}

fn center<S: Scalar>(p: &Polynomial<S>) -> S {
    let n = p.degree();
    let lead = p.leading().mul(&p.zero_scalar().from_i64_like(n as i64));
    p.coeff(n - 1).div(&lead).expect("nonzero leading coefficient").neg()
}

/// Affine `lambda` with `lambda^-1 o P_i o lambda = a_i z^{n_i}` for all `i`.
///
/// Monomials are fixed by scalings, so only the translation matters, and it
/// is pinned down by the center `-p_{n-1} / (n p_n)` of `P_1`.
pub fn detect_power_conjugacy<S: Scalar>(gens: &[Polynomial<S>], tol: f64) -> Option<AffineMap<S>> {
    let first = gens.first()?;
    if gens.iter().any(|g| g.degree() < 2) {
        return None;
    }
    let lambda = AffineMap::new(first.leading().one_like(), center(first)).ok()?;
    for g in gens {
        let q = lambda.conjugate(g);
        let mono = Polynomial::monomial(q.leading().clone(), q.degree());
        if !coeffs_near(q.coeffs(), mono.coeffs(), tol) {
            return None;
        }
    }
    Some(lambda)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChebyshevConjugacy<S> {
    /// `z -> a z + b`; absent when `a` itself is not in the field (then only
    /// `a^2` is known, which suffices for the check when every degree is odd).
    pub lambda: Option<AffineMap<S>>,
    pub center: S,
    pub a_squared: S,
    /// `lambda^-1 o P_i o lambda = signs[i] T_{n_i}`.
    pub signs: Vec<i8>,
}

fn sign_of<S: Scalar>(s: &S, tol: f64) -> Option<i8> {
    let one = s.one_like();
    if s.near(&one, tol) {
        Some(1)
    } else if s.near(&one.neg(), tol) {
        Some(-1)
    } else {
        None
    }
}

/// Affine `lambda = a z + b` with `lambda^-1 o P_i o lambda = +-T_{n_i}`.
///
/// With `c_j` the coefficients of `P(z + b) - b`, the conjugate has
/// coefficients `c_j a^(j-1)`. Matching parity forces `b` to be the center,
/// the ratio of the top two surviving coefficients gives `A = a^2`, and the
/// remaining conditions `c_j t_n = c_n t_j A^((n-j)/2)` involve `A` only.
/// `a` is then read off an even-degree generator, or taken as a square root
/// of `A` when all degrees are odd.
pub fn detect_chebyshev_conjugacy<S: Scalar>(
    gens: &[Polynomial<S>],
    tol: f64,
) -> Option<ChebyshevConjugacy<S>> {
    let first = gens.first()?;
    if gens.iter().any(|g| g.degree() < 2) {
        return None;
    }
    let one = first.leading().one_like();
    let b = center(first);
    let shift = AffineMap::new(one.clone(), b.clone()).ok()?;
    let shifted: Vec<Polynomial<S>> = gens.iter().map(|g| shift.conjugate(g)).collect();
    let cheb: Vec<Polynomial<S>> = gens
        .iter()
        .map(|g| chebyshev(g.degree(), &one))
        .collect::<Option<_>>()?;

    let (c, t) = (shifted[0].coeffs(), cheb[0].coeffs());
    let n = first.degree();
    if c[n - 2].negligible(tol * shifted[0].leading().magnitude().max(1.0)) {
        return None;
    }
    let big_a = c[n - 2].mul(&t[n]).div(&c[n].mul(&t[n - 2]))?;

    for (q, tn) in shifted.iter().zip(&cheb) {
        let n = q.degree();
        let (c, t) = (q.coeffs(), tn.coeffs());
        let lhs: Vec<S> = (0..=n).map(|j| c[j].mul(&t[n])).collect();
        let rhs: Vec<S> = (0..=n)
            .map(|j| {
                if (n - j) % 2 == 1 {
                    one.zero_like()
                } else {
                    c[n].mul(&t[j]).mul(&big_a.pow(((n - j) / 2) as u64))
                }
            })
            .collect();
        if !coeffs_near(&lhs, &rhs, tol) {
            return None;
        }
    }

    let mut a: Option<S> = None;
    let mut signs = Vec::with_capacity(gens.len());
    for (q, tn) in shifted.iter().zip(&cheb) {
        let n = q.degree();
        let cn = q.leading();
        let tl = tn.leading();
        if n % 2 == 1 {
            let s = cn.mul(&big_a.pow(((n - 1) / 2) as u64)).div(tl)?;
            signs.push(sign_of(&s, tol)?);
        } else {
            let x = tl.div(&cn.mul(&big_a.pow(((n - 2) / 2) as u64)))?;
            if !x.mul(&x).near(&big_a, tol) {
                return None;
            }
            match &a {
                None => {
                    a = Some(x);
                    signs.push(1);
                }
                Some(a0) => signs.push(sign_of(&x.div(a0)?, tol)?),
            }
        }
    }
    let a = a.or_else(|| big_a.nth_root(2, 0));
    let lambda = match a {
        Some(a) => {
            let lambda = AffineMap::new(a, b.clone()).ok()?;
            for ((g, tn), &s) in gens.iter().zip(&cheb).zip(&signs) {
                let target = tn.scale(&one.from_i64_like(s as i64));
                if !coeffs_near(lambda.conjugate(g).coeffs(), target.coeffs(), tol) {
                    return None;
                }
            }
            Some(lambda)
        }
        None => None,
    };
    Some(ChebyshevConjugacy {
        lambda,
        center: b,
        a_squared: big_a,
        signs,
    })
}

/// `P_i = omega_i T^(l_i)` with `T = z^r R(z^l)` and `omega_i^l = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct TPowerForm<S> {
    pub t: Polynomial<S>,
    pub omegas: Vec<S>,
    pub exponents: Vec<u32>,
    pub l: u32,
    pub r: usize,
    /// Coefficients of `R`, constant term first.
    pub r_coeffs: Vec<S>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum NormalForm<S> {
    Power(AffineMap<S>),
    Chebyshev(ChebyshevConjugacy<S>),
    TPower(TPowerForm<S>),
    None { reason: String },
}

/// Serializable summary with scalars rendered as strings.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NormalFormReport {
    PowerFamily {
        lambda: String,
    },
    ChebyshevFamily {
        lambda: Option<String>,
        center: String,
        a_squared: String,
        signs: Vec<i8>,
    },
    TPowerForm {
        t: String,
        l: u32,
        r: usize,
        r_coeffs: Vec<String>,
        omegas: Vec<String>,
        exponents: Vec<u32>,
    },
    None {
        reason: String,
    },
}

impl<S: Scalar> NormalForm<S> {
    pub fn report(&self) -> NormalFormReport {
        match self {
            NormalForm::Power(l) => NormalFormReport::PowerFamily {
                lambda: l.to_string(),
            },
            NormalForm::Chebyshev(c) => NormalFormReport::ChebyshevFamily {
                lambda: c.lambda.as_ref().map(|l| l.to_string()),
                center: c.center.to_string(),
                a_squared: c.a_squared.to_string(),
                signs: c.signs.clone(),
            },
            NormalForm::TPower(f) => NormalFormReport::TPowerForm {
                t: f.t.to_string(),
                l: f.l,
                r: f.r,
                r_coeffs: f.r_coeffs.iter().map(|c| c.to_string()).collect(),
                omegas: f.omegas.iter().map(|c| c.to_string()).collect(),
                exponents: f.exponents.clone(),
            },
            NormalForm::None { reason } => NormalFormReport::None {
                reason: reason.clone(),
            },
        }
    }
}

/// Smallest `t >= 2` with every degree a power of `t`, and the exponents.
pub fn common_base(degrees: &[usize]) -> Option<(usize, Vec<u32>)> {
    common_bases(degrees).into_iter().next()
}

/// Every `t >= 2` with each degree a power of `t`, smallest first.
pub fn common_bases(degrees: &[usize]) -> Vec<(usize, Vec<u32>)> {
    let Some(&min) = degrees.iter().min() else {
        return Vec::new();
    };
    let mut out = Vec::new();
    'outer: for t in 2..=min {
        let mut exps = Vec::with_capacity(degrees.len());
        for &n in degrees {
            let (mut m, mut e) = (n, 0u32);
            while m > 1 && m % t == 0 {
                m /= t;
                e += 1;
            }
            if m != 1 {
                continue 'outer;
            }
            exps.push(e);
        }
        out.push((t, exps));
    }
    out
}

/// Remainder and quotient of `p` divided by the monic `h`.
fn divmod_monic<S: Scalar>(p: &[S], h: &[S]) -> (Vec<S>, Vec<S>) {
    let dh = h.len() - 1;
    let mut rem = p.to_vec();
    if rem.len() <= dh {
        return (Vec::new(), rem);
    }
    let mut quot = vec![p[0].zero_like(); rem.len() - dh];
    for i in (0..quot.len()).rev() {
        let c = rem[i + dh].clone();
        if c.is_zero() {
            continue;
        }
        for (j, hj) in h.iter().enumerate() {
            rem[i + j] = rem[i + j].sub(&c.mul(hj));
        }
        quot[i] = c;
    }
    rem.truncate(dh);
    (quot, rem)
}

/// Writes `p = g o h` with `h` monic of degree `t` and `h(0) = 0`.
///
/// The top `t` coefficients of `h` are those of `(p / p_n)^(1/m)` at
/// infinity, `m = n / t`; `g` comes from the `h`-adic expansion of `p`, whose
/// digits must all be constants.
pub fn right_factor<S: Scalar>(p: &Polynomial<S>, t: usize, tol: f64) -> Option<(Vec<S>, Vec<S>)> {
    let n = p.degree();
    if t < 1 || n % t != 0 {
        return None;
    }
    let m = n / t;
    let zero = p.zero_scalar();
    let lead = p.leading().clone();
    let f: Vec<S> = (0..t).map(|k| p.coeff(n - k).div(&lead).unwrap()).collect();
    let alpha = zero.from_rational_like(&Rational::from((1, m as i64)));
    let one = zero.one_like();
    let mut g = vec![one.clone()];
    for k in 1..t {
        let mut acc = zero.clone();
        for i in 1..=k {
            let w = alpha
                .add(&one)
                .mul(&zero.from_i64_like(i as i64))
                .sub(&zero.from_i64_like(k as i64));
            acc = acc.add(&w.mul(&f[i]).mul(&g[k - i]));
        }
        g.push(acc.div(&zero.from_i64_like(k as i64))?);
    }
    let mut h = vec![zero.clone(); t + 1];
    for k in 0..t {
        h[t - k] = g[k].clone();
    }
    let scale = p.coeffs().iter().map(Scalar::magnitude).fold(1.0, f64::max);
    let mut digits = Vec::with_capacity(m + 1);
    let mut rem = p.coeffs().to_vec();
    while rem.len() > 1 {
        if rem.len() <= t {
            return None;
        }
        let (q, r) = divmod_monic(&rem, &h);
        if r.iter().skip(1).any(|c| !c.negligible(tol * scale)) {
            return None;
        }
        digits.push(r[0].clone());
        rem = q;
        while rem.len() > 1 && rem.last().is_some_and(|c| c.negligible(tol * scale)) {
            rem.pop();
        }
    }
    digits.push(rem[0].clone());
    Some((h, digits))
}

fn iterate<S: Scalar>(t: &Polynomial<S>, times: u32) -> Polynomial<S> {
    let mut acc = t.clone();
    for _ in 1..times {
        acc = t.compose(&acc);
    }
    acc
}

/// Tries to write `P_i = omega_i T^(l_i)` with `T` monic, trying each common
/// base of the degrees as `deg T`, smallest first. Best effort: every way
/// this can fail is reported as [`NormalForm::None`] with a reason.
pub fn extract_t_power_form<S: Scalar>(
    gens: &[Polynomial<S>],
    tol: f64,
    max_unity_order: u32,
) -> NormalForm<S> {
    let none = |reason: &str| NormalForm::None {
        reason: reason.to_string(),
    };
    if gens.is_empty() || gens.iter().any(|g| g.degree() < 2) {
        return none("generators of degree at least 2 are required");
    }
    let degrees: Vec<usize> = gens.iter().map(Polynomial::degree).collect();
    let mut last = none("degrees are not powers of a common base");
    for (t, exps) in common_bases(&degrees) {
        match t_power_with_base(gens, t, exps, tol, max_unity_order) {
            found @ NormalForm::TPower(_) => return found,
            other => last = other,
        }
    }
    last
}

fn t_power_with_base<S: Scalar>(
    gens: &[Polynomial<S>],
    t: usize,
    exps: Vec<u32>,
    tol: f64,
    max_unity_order: u32,
) -> NormalForm<S> {
    let none = |reason: &str| NormalForm::None {
        reason: reason.to_string(),
    };
    let mut h: Option<Vec<S>> = None;
    for g in gens {
        let Some((hi, _)) = right_factor(g, t, tol) else {
            return none("a generator has no right factor of the base degree");
        };
        match &h {
            None => h = Some(hi),
            Some(h0) if coeffs_near(h0, &hi, tol) => {}
            Some(_) => return none("generators have different right factors"),
        }
    }
    let h = h.unwrap();
    let omegas: Vec<S> = gens.iter().map(|g| g.leading().clone()).collect();
    let beta = if let Some(i) = exps.iter().position(|&e| e == 1) {
        gens[i].coeff(0).div(&omegas[i]).unwrap()
    } else {
        // g(z) = T^(l - 1)(z + beta); its normalized right factor is
        // h(z + beta) - h(beta), whose z^(t-1) coefficient is h_{t-1} + t beta.
        let i = 0;
        let Some((_, g)) = right_factor(&gens[i], t, tol) else {
            return none("right factor expansion failed");
        };
        let g = g
            .iter()
            .map(|c| c.div(&omegas[i]).unwrap())
            .collect::<Vec<_>>();
        let Ok(g) = Polynomial::new(g) else {
            return none("right factor expansion is constant");
        };
        let Some((h2, _)) = right_factor(&g, t, tol) else {
            return none("iterate has no right factor of the base degree");
        };
        let tt = h[0].from_i64_like(t as i64);
        h2[t - 1].sub(&h[t - 1]).div(&tt).unwrap()
    };
    let mut tc = h.clone();
    tc[0] = tc[0].add(&beta);
    let Ok(tpoly) = Polynomial::new(tc) else {
        return none("candidate T is constant");
    };
    for ((g, w), &e) in gens.iter().zip(&omegas).zip(&exps) {
        let candidate = iterate(&tpoly, e).scale(w);
        if !coeffs_near(g.coeffs(), candidate.coeffs(), tol) {
            return none("generator is not omega T^(l_i) for the extracted T");
        }
    }
    let mut l: u64 = 1;
    for w in &omegas {
        match w.root_of_unity_order(max_unity_order, tol) {
            Some(o) => l = lcm_u64(l, o as u64),
            None => return none("a leading coefficient is not a root of unity"),
        }
    }
    let l = l as usize;
    let support: Vec<usize> = (0..=tpoly.degree())
        .filter(|&j| !tpoly.coeff(j).is_zero())
        .collect();
    let r = support[0] % l;
    if support.iter().any(|&j| j % l != r) {
        return none("T is not of the form z^r R(z^l) for the unity order l");
    }
    let r_coeffs = (r..=tpoly.degree())
        .step_by(l)
        .map(|j| tpoly.coeff(j))
        .collect();
    NormalForm::TPower(TPowerForm {
        t: tpoly,
        omegas,
        exponents: exps,
        l: l as u32,
        r,
        r_coeffs,
    })
}

/// Special-family classification: power family first, then Chebyshev.
pub fn classify<S: Scalar>(gens: &[Polynomial<S>], tol: f64) -> NormalForm<S> {
    if let Some(l) = detect_power_conjugacy(gens, tol) {
        return NormalForm::Power(l);
    }
    if let Some(c) = detect_chebyshev_conjugacy(gens, tol) {
        return NormalForm::Chebyshev(c);
    }
    NormalForm::None {
        reason: "not simultaneously conjugate to powers or Chebyshev polynomials".into(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::GaussianRational as G;

    fn p(v: &[i64]) -> Polynomial<G> {
        Polynomial::new(v.iter().map(|&x| G::real(x)).collect()).unwrap()
    }

    #[test]
    fn chebyshev_small() {
        let one = G::real(1);
        assert_eq!(chebyshev(1, &one).unwrap(), p(&[0, 1]));
        assert_eq!(chebyshev(2, &one).unwrap(), p(&[-1, 0, 2]));
        assert_eq!(chebyshev(3, &one).unwrap(), p(&[0, -3, 0, 4]));
        assert!(chebyshev(0, &one).is_none());
    }

    #[test]
    fn power_conjugacy() {
        let gens = vec![p(&[0, 0, 1]), p(&[0, 0, 0, 1])];
        assert_eq!(detect_power_conjugacy(&gens, 0.0), Some(AffineMap::identity(&G::real(1))));
        let lam = AffineMap::new(G::real(1), G::real(1)).unwrap();
        let inv = lam.inverse();
        let moved: Vec<_> = gens.iter().map(|g| inv.conjugate(g)).collect();
        assert_eq!(detect_power_conjugacy(&moved, 0.0), Some(lam));
        assert_eq!(detect_power_conjugacy(&[p(&[-2, 0, 1]), p(&[0, 0, 0, 1])], 0.0), None);
    }

    #[test]
    fn chebyshev_conjugacy() {
        let c = detect_chebyshev_conjugacy(&[p(&[-1, 0, 2])], 0.0).unwrap();
        assert_eq!(c.lambda, Some(AffineMap::identity(&G::real(1))));
        assert_eq!(c.signs, vec![1]);
        let c = detect_chebyshev_conjugacy(&[p(&[-2, 0, 1]), p(&[0, -3, 0, 1])], 0.0).unwrap();
        assert_eq!(c.lambda.unwrap(), AffineMap::new(G::real(2), G::real(0)).unwrap());
        assert_eq!(c.signs, vec![1, 1]);
        assert!(detect_chebyshev_conjugacy(&[p(&[0, 0, 1]), p(&[0, 0, 0, 1])], 0.0).is_none());
    }

    #[test]
    fn t_power_examples() {
        match extract_t_power_form(&[p(&[0, 0, 0, 0, 1]), p(&[0, 0, 1])], 0.0, 4) {
            NormalForm::TPower(f) => {
                assert_eq!(f.t, p(&[0, 0, 1]));
                assert_eq!(f.exponents, vec![2, 1]);
                assert_eq!(f.l, 1);
            }
            other => panic!("{other:?}"),
        }
        let t = p(&[-2, 0, 1]);
        match extract_t_power_form(&[t.compose(&t)], 0.0, 4) {
            NormalForm::TPower(f) => {
                assert_eq!(f.t, t);
                assert_eq!(f.exponents, vec![2]);
            }
            other => panic!("{other:?}"),
        }
        match extract_t_power_form(&[p(&[0, 0, -1]), p(&[0, 0, 0, 0, 1])], 0.0, 4) {
            NormalForm::TPower(f) => {
                assert_eq!(f.t, p(&[0, 0, 1]));
                assert_eq!(f.omegas, vec![G::real(-1), G::real(1)]);
                assert_eq!((f.l, f.r), (2, 0));
                assert_eq!(f.r_coeffs, vec![G::real(0), G::real(1)]);
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            extract_t_power_form(&[p(&[0, 0, 1]), p(&[0, 0, 0, 1])], 0.0, 4),
            NormalForm::None { .. }
        ));
    }
}
