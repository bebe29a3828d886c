//! Words in the generators, relation checking and witness certificates.
//!
//! A word `[i_1, ..., i_m]` denotes `P_{i_1} o ... o P_{i_m}`: the last
//! letter is applied first. Letters are 1-based.

mod monomial;
mod search;

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::polynomial::Polynomial;
use crate::scalar::modular::mul_mod;
use crate::scalar::{BigComplex, Embedding, Scalar};

pub use monomial::{
    extract_coefficient_identity, verify_monomial_relation, witness_zu, CoefficientIdentity,
    MonomialElement,
};
pub use search::{search_witness, SearchOptions, SearchOutcome};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WordError {
    #[error("letter {letter} is outside 1..={k}")]
    LetterOutOfRange { letter: usize, k: usize },
    #[error("generator {index} has degree {degree}; degree at least 2 is required")]
    DegreeTooLow { index: usize, degree: usize },
    #[error("composite degree {degree} exceeds the cap {cap}")]
    DegreeCap { degree: u128, cap: u128 },
    #[error("degree overflow")]
    Overflow,
    #[error("empty word")]
    EmptyWord,
    #[error("at least {needed} generators are required, got {got}")]
    TooFewGenerators { needed: usize, got: usize },
    #[error("relation {index} has t = 0")]
    ZeroPower { index: usize },
    #[error("generators live in incompatible fields")]
    FieldMismatch,
    #[error("invariant violated: {0}")]
    Invariant(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Word(pub Vec<usize>);

impl Word {
    pub fn new(letters: Vec<usize>) -> Self {
        Word(letters)
    }

    pub fn letter(i: usize) -> Self {
        Word(vec![i])
    }

    /// `w` repeated `times` times.
    pub fn power(&self, times: usize) -> Self {
        Word(self.0.repeat(times))
    }

    /// `self o other`: the letters of `self` followed by those of `other`.
    pub fn then(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn letters(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The letter applied first.
    pub fn last(&self) -> Option<usize> {
        self.0.last().copied()
    }

    pub fn degree(&self, degrees: &[usize]) -> Result<u128, WordError> {
        let mut d: u128 = 1;
        for &l in &self.0 {
            let n = *degrees.get(l.wrapping_sub(1)).ok_or(WordError::LetterOutOfRange {
                letter: l,
                k: degrees.len(),
            })?;
            d = d.checked_mul(n as u128).ok_or(WordError::Overflow)?;
        }
        Ok(d)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, "]")
    }
}

/// How a claimed equality of compositions was checked.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Verification {
    /// Exact comparison of the composed polynomials (or of exact monomial
    /// arithmetic for monomial generators).
    Exact,
    /// Coefficientwise agreement of float compositions, relative residual.
    Numeric { residual: f64 },
    /// Agreement of values at random points modulo random primes; the
    /// bound is the chance that unequal polynomials agree at all of them.
    Probabilistic { failure_bound: f64 },
    Unverified { reason: String },
}

impl Verification {
    /// Combines two checks of parts of one certificate.
    pub fn weaker(self, other: Verification) -> Verification {
        use Verification::*;
        match (self, other) {
            (Unverified { reason }, _) | (_, Unverified { reason }) => Unverified { reason },
            (Probabilistic { failure_bound: a }, Probabilistic { failure_bound: b }) => {
                Probabilistic {
                    failure_bound: a + b,
                }
            }
            (p @ Probabilistic { .. }, _) | (_, p @ Probabilistic { .. }) => p,
            (Numeric { residual: a }, Numeric { residual: b }) => Numeric {
                residual: a.max(b),
            },
            (n @ Numeric { .. }, Exact) | (Exact, n @ Numeric { .. }) => n,
            (Exact, Exact) => Exact,
        }
    }
}

/// `k` words, the `i`-th ending in letter `i`, all composing to one
/// polynomial.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WitnessCertificate {
    pub words: Vec<Word>,
    pub composite_degree: u128,
    pub verification: Verification,
}

impl WitnessCertificate {
    /// Checks that word `i` ends in letter `i` and all degrees agree.
    pub fn check_shape(&self, degrees: &[usize]) -> Result<(), WordError> {
        for (i, w) in self.words.iter().enumerate() {
            if w.last() != Some(i + 1) {
                return Err(WordError::Invariant(format!(
                    "word {} = {w} does not end in letter {}",
                    i + 1,
                    i + 1
                )));
            }
            if w.degree(degrees)? != self.composite_degree {
                return Err(WordError::Invariant(format!(
                    "word {w} has the wrong degree"
                )));
            }
        }
        Ok(())
    }
}

/// Limits for word compositions and verification.
#[derive(Clone, Debug)]
pub struct WordOptions {
    /// Largest composite degree any operation will build.
    pub degree_cap: u128,
    /// Scalar multiplications allowed for an exact composition before
    /// falling back to evaluation at random points.
    pub exact_budget: u64,
    /// Number of random evaluation probes for fallbacks.
    pub probes: usize,
    pub seed: u64,
    /// Relative tolerance for float comparisons.
    pub tol: f64,
}

impl Default for WordOptions {
    fn default() -> Self {
        WordOptions {
            degree_cap: 1_000_000,
            exact_budget: 20_000_000,
            probes: 3,
            seed: 0x5eed,
            tol: 1e-20,
        }
    }
}

pub(crate) fn check_generators<S: Scalar>(gens: &[Polynomial<S>]) -> Result<Vec<usize>, WordError> {
    let mut degrees = Vec::with_capacity(gens.len());
    for (i, g) in gens.iter().enumerate() {
        if g.degree() < 2 {
            return Err(WordError::DegreeTooLow {
                index: i + 1,
                degree: g.degree(),
            });
        }
        if !g.kind().compatible(gens[0].kind()) {
            return Err(WordError::FieldMismatch);
        }
        degrees.push(g.degree());
    }
    Ok(degrees)
}

fn check_letters(w: &Word, k: usize) -> Result<(), WordError> {
    if w.is_empty() {
        return Err(WordError::EmptyWord);
    }
    for &l in w.letters() {
        if l == 0 || l > k {
            return Err(WordError::LetterOutOfRange { letter: l, k });
        }
    }
    Ok(())
}

/// The composition denoted by `w`, exactly in the coefficient field.
pub fn compose_word<S: Scalar>(
    gens: &[Polynomial<S>],
    w: &Word,
    degree_cap: u128,
) -> Result<Polynomial<S>, WordError> {
    let degrees = check_generators(gens)?;
    check_letters(w, gens.len())?;
    let d = w.degree(&degrees)?;
    if d > degree_cap {
        return Err(WordError::DegreeCap {
            degree: d,
            cap: degree_cap,
        });
    }
    let mut acc = gens[w.last().unwrap() - 1].clone();
    for &l in w.letters().iter().rev().skip(1) {
        acc = gens[l - 1].compose(&acc);
    }
    Ok(acc)
}

/// Like [`compose_word`] but gives up after `budget` scalar multiplications.
pub(crate) fn compose_word_within<S: Scalar>(
    gens: &[Polynomial<S>],
    w: &Word,
    budget: &mut u64,
) -> Option<Polynomial<S>> {
    let mut acc = gens[w.last()? - 1].clone();
    for &l in w.letters().iter().rev().skip(1) {
        acc = gens[l - 1].compose_within(&acc, budget)?;
    }
    Some(acc)
}

/// Result of comparing two words.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum RelationStatus {
    Exact,
    Numeric { residual: f64 },
    Probabilistic { failure_bound: f64 },
    Unequal,
}

impl RelationStatus {
    pub fn holds(&self) -> bool {
        !matches!(self, RelationStatus::Unequal)
    }

    pub fn to_verification(&self) -> Option<Verification> {
        match self {
            RelationStatus::Exact => Some(Verification::Exact),
            RelationStatus::Numeric { residual } => Some(Verification::Numeric {
                residual: *residual,
            }),
            RelationStatus::Probabilistic { failure_bound } => Some(Verification::Probabilistic {
                failure_bound: *failure_bound,
            }),
            RelationStatus::Unequal => None,
        }
    }
}

/// Decides whether the words `lhs` and `rhs` compose to the same
/// polynomial.
///
/// Exact fields compare the compositions exactly when they fit in the
/// multiplication budget, and otherwise compare values at random points
/// modulo random primes (a mismatch is still a proof of inequality).
/// Floats compare coefficients relative to their size.
pub fn verify_relation<S: Scalar>(
    gens: &[Polynomial<S>],
    lhs: &Word,
    rhs: &Word,
    opts: &WordOptions,
) -> Result<RelationStatus, WordError> {
    let degrees = check_generators(gens)?;
    check_letters(lhs, gens.len())?;
    check_letters(rhs, gens.len())?;
    let dl = lhs.degree(&degrees)?;
    let dr = rhs.degree(&degrees)?;
    if dl != dr {
        return Ok(RelationStatus::Unequal);
    }
    if dl > opts.degree_cap {
        return Err(WordError::DegreeCap {
            degree: dl,
            cap: opts.degree_cap,
        });
    }
    if lhs == rhs {
        return Ok(RelationStatus::Exact);
    }
    let exact = gens[0].leading().is_exact();
    let mut budget = opts.exact_budget;
    let composed = compose_word_within(gens, lhs, &mut budget)
        .and_then(|a| compose_word_within(gens, rhs, &mut budget).map(|b| (a, b)));
    if let Some((a, b)) = composed {
        if exact {
            return Ok(if a == b {
                RelationStatus::Exact
            } else {
                RelationStatus::Unequal
            });
        }
        let residual = relative_difference(&a, &b);
        return Ok(if residual <= opts.tol {
            RelationStatus::Numeric { residual }
        } else {
            RelationStatus::Unequal
        });
    }
    if exact {
        Ok(modular_compare(gens, lhs, rhs, dl, opts))
    } else {
        Ok(numeric_point_compare(gens, lhs, rhs, opts))
    }
}

/// `max |a_i - b_i| / max(1, max |a_i|, max |b_i|)`.
pub fn relative_difference<S: Scalar>(a: &Polynomial<S>, b: &Polynomial<S>) -> f64 {
    let scale = a
        .coeffs()
        .iter()
        .chain(b.coeffs())
        .map(Scalar::magnitude)
        .fold(1.0, f64::max);
    a.max_difference(b) / scale
}

/// Value of a word at `x` modulo `emb.p`, given reduced generators.
pub(crate) fn eval_word_mod(reduced: &[Vec<u64>], w: &Word, x: u64, p: u64) -> u64 {
    let mut v = x;
    for &l in w.letters().iter().rev() {
        v = horner_mod(&reduced[l - 1], v, p);
    }
    v
}

pub(crate) fn horner_mod(coeffs: &[u64], x: u64, p: u64) -> u64 {
    let mut acc = 0u64;
    for &c in coeffs.iter().rev() {
        acc = ((mul_mod(acc, x, p) as u128 + c as u128) % p as u128) as u64;
    }
    acc
}

/// Random embeddings under which every generator coefficient reduces.
pub(crate) fn modular_embeddings<S: Scalar>(
    gens: &[Polynomial<S>],
    count: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<(Embedding, Vec<Vec<u64>>)> {
    let order = gens[0].leading().modular_order().unwrap_or(1);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let emb = Embedding::random(order, rng);
        let reduced: Option<Vec<Vec<u64>>> = gens
            .iter()
            .map(|g| g.coeffs().iter().map(|c| c.reduce(&emb)).collect())
            .collect();
        if let Some(r) = reduced {
            out.push((emb, r));
        }
    }
    out
}

fn modular_compare<S: Scalar>(
    gens: &[Polynomial<S>],
    lhs: &Word,
    rhs: &Word,
    degree: u128,
    opts: &WordOptions,
) -> RelationStatus {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x9e37_79b9_7f4a_7c15);
    let probes = opts.probes.max(1);
    let mut bound = 1.0f64;
    for (emb, reduced) in modular_embeddings(gens, probes, &mut rng) {
        let x = rng.gen_range(0..emb.p);
        if eval_word_mod(&reduced, lhs, x, emb.p) != eval_word_mod(&reduced, rhs, x, emb.p) {
            return RelationStatus::Unequal;
        }
        bound *= degree as f64 / emb.p as f64;
    }
    RelationStatus::Probabilistic {
        failure_bound: bound,
    }
}

fn numeric_point_compare<S: Scalar>(
    gens: &[Polynomial<S>],
    lhs: &Word,
    rhs: &Word,
    opts: &WordOptions,
) -> RelationStatus {
    let precision = match gens[0].kind() {
        crate::scalar::FieldKind::BigComplex { precision } => precision,
        _ => 128,
    };
    let big: Vec<Polynomial<BigComplex>> = gens.iter().map(|g| g.to_big(precision)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x51_7cc1_b727_220a);
    let mut residual = 0.0f64;
    for _ in 0..opts.probes.max(1) {
        let x = BigComplex::from_f64(precision, rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let a = eval_word_big(&big, lhs, &x);
        let b = eval_word_big(&big, rhs, &x);
        let scale = a.magnitude().max(b.magnitude()).max(1.0);
        residual = residual.max(a.sub(&b).magnitude() / scale);
    }
    if residual <= opts.tol {
        RelationStatus::Numeric { residual }
    } else {
        RelationStatus::Unequal
    }
}

pub(crate) fn eval_word_big(gens: &[Polynomial<BigComplex>], w: &Word, x: &BigComplex) -> BigComplex {
    let mut v = x.clone();
    for &l in w.letters().iter().rev() {
        v = gens[l - 1].eval(&v);
    }
    v
}

/// Verifies every word of a certificate against the first.
pub fn verify_certificate<S: Scalar>(
    gens: &[Polynomial<S>],
    words: &[Word],
    opts: &WordOptions,
) -> Result<Option<Verification>, WordError> {
    let mut status = Verification::Exact;
    for w in &words[1..] {
        match verify_relation(gens, &words[0], w, opts)?.to_verification() {
            Some(v) => status = status.weaker(v),
            None => return Ok(None),
        }
    }
    Ok(Some(status))
}

/// The words of the combined relation
/// `P_1^K = (P_1^{r_i} o P_i^{s_i})^{K / t_i}` with `K = t_2 ... t_k`,
/// given relations `P_1^{t_i} = P_1^{r_i} o P_i^{s_i}` for `i = 2..k`.
/// Word `i` ends in letter `i`; the first is `P_1^K`.
pub fn combine_pairwise(relations: &[(u64, u64, u64)]) -> Result<Vec<Word>, WordError> {
    let mut big_k: u64 = 1;
    for (idx, &(t, _, s)) in relations.iter().enumerate() {
        if t == 0 {
            return Err(WordError::ZeroPower { index: idx + 2 });
        }
        if s == 0 {
            return Err(WordError::Invariant(format!("relation {} has s = 0", idx + 2)));
        }
        big_k = big_k.checked_mul(t).ok_or(WordError::Overflow)?;
    }
    let mut words = vec![Word::letter(1).power(big_k as usize)];
    for (idx, &(t, r, s)) in relations.iter().enumerate() {
        let i = idx + 2;
        let block = Word::letter(1)
            .power(r as usize)
            .then(&Word::letter(i).power(s as usize));
        words.push(block.power((big_k / t) as usize));
    }
    Ok(words)
}

/// Searches for a relation `P_1^t = P_1^r o P_i^s` with `t <= max_t`,
/// `r < t`, `s >= 1`, checked by [`verify_relation`].
pub fn find_pairwise_relation<S: Scalar>(
    gens: &[Polynomial<S>],
    i: usize,
    max_t: u64,
    opts: &WordOptions,
) -> Result<Option<(u64, u64, u64)>, WordError> {
    let degrees = check_generators(gens)?;
    let n1 = degrees[0] as u128;
    let ni = degrees[i - 1] as u128;
    for t in 1..=max_t {
        for r in 0..t {
            // n1^(t - r) = ni^s
            let target = n1.checked_pow((t - r) as u32).ok_or(WordError::Overflow)?;
            let mut s = 0u32;
            let mut acc: u128 = 1;
            while acc < target {
                acc = acc.saturating_mul(ni);
                s += 1;
            }
            if acc != target || s == 0 {
                continue;
            }
            let lhs = Word::letter(1).power(t as usize);
            let rhs = Word::letter(1)
                .power(r as usize)
                .then(&Word::letter(i).power(s as usize));
            if lhs.degree(&degrees)? > opts.degree_cap {
                continue;
            }
            if verify_relation(gens, &lhs, &rhs, opts)?.holds() {
                return Ok(Some((t, r, s as u64)));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::GaussianRational as G;

    fn p(v: &[i64]) -> Polynomial<G> {
        Polynomial::new(v.iter().map(|&x| G::real(x)).collect()).unwrap()
    }

    #[test]
    fn compose_word_examples() {
        let gens = vec![p(&[0, 0, 1]), p(&[0, 0, 0, 1])];
        let w = compose_word(&gens, &Word::new(vec![2, 1]), 1_000_000).unwrap();
        assert_eq!(w, p(&[0, 0, 0, 0, 0, 0, 1]));
        let gens = vec![p(&[1, 0, 1]), p(&[0, 0, 0, 1])];
        let w = compose_word(&gens, &Word::new(vec![1, 2]), 1_000_000).unwrap();
        assert_eq!(w, p(&[1, 0, 0, 0, 0, 0, 1]));
        let e = compose_word(&gens, &Word::new(vec![1; 30]), 1_000_000);
        assert!(matches!(e, Err(WordError::DegreeCap { .. })));
        let lin = vec![p(&[0, 1])];
        assert!(matches!(
            compose_word(&lin, &Word::letter(1), 10),
            Err(WordError::DegreeTooLow { .. })
        ));
    }

    #[test]
    fn verify_examples() {
        let gens = vec![p(&[0, 0, 1]), p(&[0, 0, 0, 1])];
        let o = WordOptions::default();
        let s = verify_relation(&gens, &Word::new(vec![1, 1]), &Word::new(vec![2, 2]), &o).unwrap();
        assert_eq!(s, RelationStatus::Unequal);
        let s = verify_relation(&gens, &Word::new(vec![1, 2]), &Word::new(vec![2, 1]), &o).unwrap();
        assert_eq!(s, RelationStatus::Exact);
    }

    #[test]
    fn probabilistic_fallback_detects_both_outcomes() {
        let gens = vec![p(&[1, 1, 1]), p(&[0, 0, 1])];
        let o = WordOptions {
            exact_budget: 10,
            ..WordOptions::default()
        };
        let a = Word::new(vec![1, 1, 2]);
        let b = Word::new(vec![1, 2, 1]);
        assert_eq!(verify_relation(&gens, &a, &b, &o).unwrap(), RelationStatus::Unequal);
        match verify_relation(&gens, &a, &a.clone(), &o).unwrap() {
            RelationStatus::Exact => {}
            other => panic!("{other:?}"),
        }
        let c = Word::new(vec![2, 2, 2]);
        let d = Word::new(vec![2, 2, 2]);
        assert!(verify_relation(&gens, &c, &d, &o).unwrap().holds());
    }

    #[test]
    fn combine_examples() {
        let w = combine_pairwise(&[(1, 0, 1)]).unwrap();
        assert_eq!(w, vec![Word::new(vec![1]), Word::new(vec![2])]);
        let w = combine_pairwise(&[(2, 1, 1), (2, 1, 1)]).unwrap();
        assert_eq!(w[0], Word::new(vec![1, 1, 1, 1]));
        assert_eq!(w[1], Word::new(vec![1, 2, 1, 2]));
        assert_eq!(w[2], Word::new(vec![1, 3, 1, 3]));
        assert!(matches!(combine_pairwise(&[(0, 0, 1)]), Err(WordError::ZeroPower { index: 2 })));
    }
}
