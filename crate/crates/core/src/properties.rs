//! Randomized checks of how the gap `l0` behaves under composition.
//!
//! Used by the test suites and by `polysemi selftest`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::scalar::{GaussianRational, Scalar};
use crate::series::TruncatedSeries;

type G = GaussianRational;

#[derive(Clone, Debug, Default, Serialize)]
pub struct PropertyReport {
    pub name: String,
    pub cases: usize,
    pub checks: usize,
    pub violations: usize,
    /// Checks the truncation horizon was too short to settle.
    pub undetermined: usize,
    /// First few violations, for diagnostics.
    pub failures: Vec<String>,
}

impl PropertyReport {
    fn new(name: &str) -> Self {
        PropertyReport {
            name: name.to_string(),
            ..Default::default()
        }
    }

    pub fn passed(&self) -> bool {
        self.checks > 0 && self.violations == 0 && self.undetermined == 0
    }

    fn record(&mut self, outcome: Option<bool>, what: impl FnOnce() -> String) {
        self.checks += 1;
        match outcome {
            Some(true) => {}
            Some(false) => {
                self.violations += 1;
                if self.failures.len() < 8 {
                    self.failures.push(what());
                }
            }
            None => self.undetermined += 1,
        }
    }
}

/// What the coefficients after `ord` show, looking `limit` terms ahead.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Observed {
    /// First nonzero coefficient after `ord` sits at `ord + j`, `j <= limit`.
    Gap(usize),
    /// `ord + 1 ..= ord + limit` all vanish.
    Beyond,
}

fn observe(s: &TruncatedSeries<G>, ord: usize, limit: usize) -> Option<Observed> {
    if s.coeff(ord).map_or(true, |c| c.is_zero()) {
        return None;
    }
    for j in 1..=limit {
        match s.coeff(ord + j) {
            Some(c) if !c.is_zero() => return Some(Observed::Gap(j)),
            Some(_) => {}
            None => return None,
        }
    }
    Some(Observed::Beyond)
}

fn nonzero(rng: &mut ChaCha8Rng) -> G {
    loop {
        let re: i64 = rng.gen_range(-3..=3);
        let im: i64 = rng.gen_range(-2..=2);
        if re != 0 || im != 0 {
            return G::new(re, im);
        }
    }
}

/// Random series with order `ord`, gap `gap` (`None`: a monomial) and a
/// random tail, known up to `trunc`.
pub fn random_series(
    rng: &mut ChaCha8Rng,
    ord: usize,
    gap: Option<usize>,
    trunc: usize,
) -> TruncatedSeries<G> {
    let mut c = vec![G::real(0); trunc + 1];
    c[ord] = nonzero(rng);
    if let Some(l) = gap {
        if ord + l <= trunc {
            c[ord + l] = nonzero(rng);
        }
        for x in c.iter_mut().skip(ord + l + 1) {
            if rng.gen_bool(0.5) {
                *x = G::new(rng.gen_range(-3i64..=3), rng.gen_range(-1i64..=1));
            }
        }
    }
    TruncatedSeries::new(c, trunc)
}

/// For random `X`, `T` vanishing at 0 with finite gaps:
/// `l0(T o X) >= min(l0(X), Ord(X) l0(T))` with equality unless the two
/// sides tie. For a monomial `T`: `l0(X o T) = Ord(T) l0(X)` and
/// `l0(T o X) = l0(X)`.
///
/// Compositions are only expanded as far as the checked coefficients.
pub fn l0_composition_suite(cases: usize, seed: u64, trunc: usize) -> PropertyReport {
    let mut rep = PropertyReport::new("l0 of compositions");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..cases {
        rep.cases += 1;
        let q = rng.gen_range(1..=6);
        let r = rng.gen_range(1..=6);
        let lt = rng.gen_range(1..=8);
        let lx = if rng.gen_bool(0.25) && q * lt <= 8 {
            q * lt
        } else {
            rng.gen_range(1..=8)
        };
        let x = random_series(&mut rng, q, Some(lx), trunc);
        let t = random_series(&mut rng, r, Some(lt), trunc);
        let b = lx.min(q * lt);
        match TruncatedSeries::compose_capped(&t, &x, r * q + b + 1) {
            Ok(tx) => {
                let seen = observe(&tx, r * q, b);
                rep.record(
                    seen.map(|o| o == Observed::Beyond || o == Observed::Gap(b)),
                    || format!("inequality: X = {x}, T = {t}, T o X = {tx}"),
                );
                if lx != q * lt {
                    rep.record(seen.map(|o| o == Observed::Gap(b)), || {
                        format!("equality: X = {x}, T = {t}, T o X = {tx}")
                    });
                }
            }
            Err(e) => rep.record(Some(false), || format!("compose failed: {e}")),
        }
        let m = TruncatedSeries::monomial(nonzero(&mut rng), r, trunc);
        match TruncatedSeries::compose_capped(&x, &m, q * r + r * lx + 1) {
            Ok(xm) => rep.record(
                observe(&xm, q * r, r * lx).map(|o| o == Observed::Gap(r * lx)),
                || format!("X o monomial: X = {x}, T = {m}, X o T = {xm}"),
            ),
            Err(e) => rep.record(Some(false), || format!("compose failed: {e}")),
        }
        match TruncatedSeries::compose_capped(&m, &x, q * r + lx + 1) {
            Ok(mx) => rep.record(
                observe(&mx, q * r, lx).map(|o| o == Observed::Gap(lx)),
                || format!("monomial o X: X = {x}, T = {m}, T o X = {mx}"),
            ),
            Err(e) => rep.record(Some(false), || format!("compose failed: {e}")),
        }
    }
    rep
}

/// For random `T_1..T_k` of order at least 2 with `l = l0(T_1)` finite and
/// no larger than any other `l0(T_i)`, a random word `A` of length at most
/// `max_len` and random `X` of order at least 2: `l0(A X) = l` when
/// `l0(X) = l`, and `l0(A X) > l` when `l0(X) > l`.
pub fn word_l0_suite(cases: usize, seed: u64, max_k: usize, max_len: usize) -> PropertyReport {
    let mut rep = PropertyReport::new("l0 of words applied to a series");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..cases {
        rep.cases += 1;
        let k = rng.gen_range(1..=max_k.max(1));
        let l = rng.gen_range(1..=4);
        let gens: Vec<TruncatedSeries<G>> = (0..k)
            .map(|i| {
                let ord = rng.gen_range(2..=3);
                let gap = if i == 0 {
                    Some(l)
                } else if rng.gen_bool(0.3) {
                    None
                } else {
                    Some(rng.gen_range(l..=l + 3))
                };
                random_series(&mut rng, ord, gap, 24)
            })
            .collect();
        let len = rng.gen_range(0..=max_len);
        let word: Vec<usize> = (0..len).map(|_| rng.gen_range(0..k)).collect();
        let equal_case = rng.gen_bool(0.5);
        let xgap = if equal_case {
            Some(l)
        } else if rng.gen_bool(0.3) {
            None
        } else {
            Some(rng.gen_range(l + 1..=l + 4))
        };
        let xord = rng.gen_range(2..=3);
        let x = random_series(&mut rng, xord, xgap, xord + l + 12);
        let mut ax = x.clone();
        let mut ord = xord;
        let mut failed = None;
        for &i in word.iter().rev() {
            match TruncatedSeries::compose(&gens[i], &ax) {
                Ok(s) => ax = s,
                Err(e) => {
                    failed = Some(e);
                    break;
                }
            }
            ord *= gens[i].ord_l0().map(|o| o.ord).unwrap_or(0);
        }
        if let Some(e) = failed {
            rep.record(Some(false), || format!("compose failed: {e}"));
            continue;
        }
        let seen = observe(&ax, ord, l);
        let ok = if equal_case {
            seen.map(|o| o == Observed::Gap(l))
        } else {
            seen.map(|o| o == Observed::Beyond)
        };
        rep.record(ok, || {
            format!(
                "k = {k}, l = {l}, word = {word:?}, l0(X) = {xgap:?}, result order {ord}: observed {seen:?}"
            )
        });
    }
    rep
}
