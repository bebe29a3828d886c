//! Arithmetic of monomials `omega z^d` with `omega` a root of unity, and the
//! witness construction through cyclic compositions.

use serde::Serialize;

use super::{Verification, WitnessCertificate, Word, WordError};

/// `zeta_l^e z^d` with `zeta_l = exp(2 pi i / l)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct MonomialElement {
    pub unity_exponent: u64,
    pub modulus: u64,
    pub degree: u128,
}

impl MonomialElement {
    pub fn new(unity_exponent: u64, modulus: u64, degree: u128) -> Self {
        let modulus = modulus.max(1);
        MonomialElement {
            unity_exponent: unity_exponent % modulus,
            modulus,
            degree,
        }
    }

    /// `self o other = (e1 + d1 e2 mod l, d1 d2)`.
    pub fn compose(&self, other: &Self) -> Result<Self, WordError> {
        debug_assert_eq!(self.modulus, other.modulus);
        let l = self.modulus as u128;
        let e = (self.unity_exponent as u128 + (self.degree % l) * other.unity_exponent as u128) % l;
        let degree = self
            .degree
            .checked_mul(other.degree)
            .ok_or(WordError::Overflow)?;
        Ok(MonomialElement {
            unity_exponent: e as u64,
            modulus: self.modulus,
            degree,
        })
    }

    pub fn iterate(&self, times: usize) -> Result<Self, WordError> {
        let mut acc = MonomialElement::new(0, self.modulus, 1);
        for _ in 0..times {
            acc = acc.compose(self)?;
        }
        Ok(acc)
    }
}

/// Value of a word over monomial generators.
pub fn evaluate_monomial_word(
    elements: &[MonomialElement],
    w: &Word,
) -> Result<MonomialElement, WordError> {
    let l = elements.first().map_or(1, |e| e.modulus);
    let mut acc = MonomialElement::new(0, l, 1);
    for &letter in w.letters() {
        let e = elements.get(letter.wrapping_sub(1)).ok_or(WordError::LetterOutOfRange {
            letter,
            k: elements.len(),
        })?;
        acc = acc.compose(e)?;
    }
    Ok(acc)
}

pub fn verify_monomial_relation(
    elements: &[MonomialElement],
    lhs: &Word,
    rhs: &Word,
) -> Result<bool, WordError> {
    Ok(evaluate_monomial_word(elements, lhs)? == evaluate_monomial_word(elements, rhs)?)
}

fn check_elements(elements: &[MonomialElement]) -> Result<u64, WordError> {
    let l = elements.first().map_or(1, |e| e.modulus);
    for (i, e) in elements.iter().enumerate() {
        if e.modulus != l {
            return Err(WordError::Invariant(format!(
                "element {} uses modulus {} instead of {l}",
                i + 1,
                e.modulus
            )));
        }
        if e.degree < 2 {
            return Err(WordError::DegreeTooLow {
                index: i + 1,
                degree: e.degree as usize,
            });
        }
    }
    Ok(l)
}

/// Witness for monomial generators with root-of-unity coefficients.
///
/// With the cyclic compositions `F_1 = Q_1 o ... o Q_k`,
/// `F_i = Q_i o ... o Q_k o Q_1 o ... o Q_{i-1}`, looks for the first
/// `j_2` (then the first `j_1 < j_2`) such that
/// `F_1^{j_2} = F_1^{j_1} o F_i^{j_2 - j_1}` for every `i`. The ratios of
/// `F_1^j` to `F_i^j` take at most `l^(k-1)` values, so `j_2 <= l^(k-1) + 1`.
pub fn witness_zu(elements: &[MonomialElement]) -> Result<WitnessCertificate, WordError> {
    let l = check_elements(elements)?;
    let k = elements.len();
    if k == 0 {
        return Err(WordError::TooFewGenerators { needed: 1, got: 0 });
    }
    if k == 1 {
        return Ok(WitnessCertificate {
            words: vec![Word::letter(1)],
            composite_degree: elements[0].degree,
            verification: Verification::Exact,
        });
    }
    let cyclic: Vec<Word> = (1..=k)
        .map(|i| Word::new((0..k).map(|t| (i - 1 + t) % k + 1).collect()))
        .collect();
    let f: Vec<MonomialElement> = cyclic
        .iter()
        .map(|w| evaluate_monomial_word(elements, w))
        .collect::<Result<_, _>>()?;
    let limit = (l as u128).saturating_pow((k - 1) as u32).saturating_add(1);
    let mut j2 = 2usize;
    loop {
        if j2 as u128 > limit {
            return Err(WordError::Invariant(format!(
                "no collision up to j2 = {limit}, contradicting the pigeonhole bound"
            )));
        }
        let f1_j2 = f[0].iterate(j2)?;
        for j1 in 1..j2 {
            let f1_j1 = f[0].iterate(j1)?;
            let mut all = true;
            for fi in &f[1..] {
                if f1_j1.compose(&fi.iterate(j2 - j1)?)? != f1_j2 {
                    all = false;
                    break;
                }
            }
            if all {
                return Ok(assemble(elements, &cyclic, j1, j2, f1_j2.degree)?);
            }
        }
        j2 += 1;
    }
}

fn assemble(
    elements: &[MonomialElement],
    cyclic: &[Word],
    j1: usize,
    j2: usize,
    degree: u128,
) -> Result<WitnessCertificate, WordError> {
    let k = elements.len();
    // F_1^{j2} ends in letter k; F_1^{j1} o F_i^{j2 - j1} ends in letter i - 1.
    let mut words = vec![Word::default_empty(); k];
    words[k - 1] = cyclic[0].power(j2);
    for i in 2..=k {
        words[i - 2] = cyclic[0].power(j1).then(&cyclic[i - 1].power(j2 - j1));
    }
    let reference = evaluate_monomial_word(elements, &words[0])?;
    for w in &words[1..] {
        if evaluate_monomial_word(elements, w)? != reference {
            return Err(WordError::Invariant(format!("certificate word {w} disagrees")));
        }
    }
    Ok(WitnessCertificate {
        words,
        composite_degree: degree,
        verification: Verification::Exact,
    })
}

impl Word {
    fn default_empty() -> Self {
        Word(Vec::new())
    }
}

/// Exponents of the leading-coefficient symbols in each certificate word.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoefficientIdentity {
    /// `exponents[j][i]`: degree in `a_{i+1}` of the leading coefficient of
    /// word `j + 1` over generators `a_i z^{n_i}`.
    pub exponents: Vec<Vec<u128>>,
    /// The same after dividing every word by the common factor.
    pub cancelled: Vec<Vec<u128>>,
    /// `s_i = exponents[i][i] - max_{j != i} exponents[j][i]`.
    pub reduced: Vec<i128>,
}

/// Leading-coefficient bookkeeping for a certificate over monomial
/// generators `a_i z^{n_i}` with symbolic `a_i`.
///
/// Composing `a z^n` after a word with coefficient `U` gives `a U^n`, so
/// reading letters from the right, `exps <- n_letter * exps + e_letter`.
/// Every `s_i` must be at least 1; a smaller value is reported as an
/// invariant violation.
pub fn extract_coefficient_identity(
    degrees: &[usize],
    words: &[Word],
) -> Result<CoefficientIdentity, WordError> {
    let k = degrees.len();
    if k < 2 {
        return Err(WordError::TooFewGenerators { needed: 2, got: k });
    }
    if words.len() != k {
        return Err(WordError::Invariant(format!(
            "{} words for {k} generators",
            words.len()
        )));
    }
    let mut composite = None;
    let mut exponents = Vec::with_capacity(k);
    for (j, w) in words.iter().enumerate() {
        if w.last() != Some(j + 1) {
            return Err(WordError::Invariant(format!(
                "word {} does not end in letter {}",
                j + 1,
                j + 1
            )));
        }
        let d = w.degree(degrees)?;
        if *composite.get_or_insert(d) != d {
            return Err(WordError::Invariant("words have different degrees".into()));
        }
        let mut exps = vec![0u128; k];
        for &letter in w.letters().iter().rev() {
            let n = degrees[letter - 1] as u128;
            for e in exps.iter_mut() {
                *e = e.checked_mul(n).ok_or(WordError::Overflow)?;
            }
            exps[letter - 1] += 1;
        }
        exponents.push(exps);
    }
    let mut cancelled = exponents.clone();
    let mut reduced = Vec::with_capacity(k);
    for i in 0..k {
        let min = (0..k).map(|j| exponents[j][i]).min().unwrap();
        for row in cancelled.iter_mut() {
            row[i] -= min;
        }
        let other = (0..k)
            .filter(|&j| j != i)
            .map(|j| exponents[j][i])
            .max()
            .unwrap();
        reduced.push(exponents[i][i] as i128 - other as i128);
    }
    if let Some(i) = reduced.iter().position(|&s| s < 1) {
        return Err(WordError::Invariant(format!(
            "reduced exponent s_{} = {} is not positive",
            i + 1,
            reduced[i]
        )));
    }
    Ok(CoefficientIdentity {
        exponents,
        cancelled,
        reduced,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn composition_law() {
        let a = MonomialElement::new(1, 4, 2);
        let b = MonomialElement::new(3, 4, 3);
        // i z^2 o (-i) z^3 = i (-i)^2 z^6 = -i z^6
        let c = a.compose(&b).unwrap();
        assert_eq!(c, MonomialElement::new(3, 4, 6));
    }

    #[test]
    fn trivial_unity_pair() {
        let e = [MonomialElement::new(0, 1, 2), MonomialElement::new(0, 1, 3)];
        let c = witness_zu(&e).unwrap();
        assert_eq!(c.composite_degree, 36);
        assert_eq!(c.words[1], Word::new(vec![1, 2, 1, 2]));
        assert_eq!(c.words[0], Word::new(vec![1, 2, 2, 1]));
    }

    #[test]
    fn signed_pair() {
        let e = [MonomialElement::new(1, 2, 2), MonomialElement::new(0, 2, 3)];
        let c = witness_zu(&e).unwrap();
        assert!(verify_monomial_relation(&e, &c.words[0], &c.words[1]).unwrap());
        let id = extract_coefficient_identity(&[2, 3], &c.words).unwrap();
        assert!(id.reduced.iter().all(|&s| s >= 1));
    }

    #[test]
    fn identity_for_commuting_powers() {
        // (a1 z^2) o (a2 z^3) = a1 a2^2 z^6 and (a2 z^3) o (a1 z^2) = a2 a1^3 z^6.
        let words = [Word::new(vec![2, 1]), Word::new(vec![1, 2])];
        let id = extract_coefficient_identity(&[2, 3], &words).unwrap();
        assert_eq!(id.exponents, vec![vec![3, 1], vec![1, 2]]);
        assert_eq!(id.reduced, vec![2, 1]);
    }

    #[test]
    fn single_generator_rejected() {
        let e = extract_coefficient_identity(&[2], &[Word::letter(1)]);
        assert!(matches!(e, Err(WordError::TooFewGenerators { .. })));
    }
}
