//! Brute-force search for words of equal value ending in every letter.

use std::collections::{BTreeMap, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{
    check_generators, horner_mod, modular_embeddings, verify_certificate, WitnessCertificate,
    Word, WordError, WordOptions,
};
use crate::polynomial::Polynomial;
use crate::scalar::{BigComplex, FieldKind, Scalar};

#[derive(Clone, Debug)]
pub struct SearchOptions {
    pub max_degree: u128,
    pub max_word_len: usize,
    pub word: WordOptions,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            max_degree: 10_000,
            max_word_len: 12,
            word: WordOptions::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum SearchOutcome {
    Found(WitnessCertificate),
    /// Nothing up to the caps; `examined` counts distinct word values kept.
    Exhausted {
        max_degree: u128,
        max_word_len: usize,
        examined: usize,
    },
}

impl SearchOutcome {
    pub fn certificate(&self) -> Option<&WitnessCertificate> {
        match self {
            SearchOutcome::Found(c) => Some(c),
            SearchOutcome::Exhausted { .. } => None,
        }
    }
}

#[derive(Clone, Debug)]
enum Fingerprint {
    Modular(Vec<u64>),
    Float(Vec<BigComplex>),
}

struct Node {
    word: Word,
    fp: Fingerprint,
}

/// Values of the generators at the probe points, in the representation used
/// for fingerprints.
enum Probes {
    /// `(prime, reduced generators, point)` per probe.
    Modular(Vec<(u64, Vec<Vec<u64>>, u64)>),
    Float {
        gens: Vec<Polynomial<BigComplex>>,
        points: Vec<BigComplex>,
        tol: f64,
    },
}

impl Probes {
    fn new<S: Scalar>(gens: &[Polynomial<S>], opts: &WordOptions) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x0123_4567_89ab_cdef);
        let exact = gens[0].leading().is_exact();
        if exact {
            let probes = modular_embeddings(gens, 2, &mut rng)
                .into_iter()
                .map(|(emb, reduced)| {
                    let x = rng.gen_range(0..emb.p);
                    (emb.p, reduced, x)
                })
                .collect();
            return Probes::Modular(probes);
        }
        let precision = match gens[0].kind() {
            FieldKind::BigComplex { precision } => precision,
            _ => 128,
        };
        let big: Vec<_> = gens.iter().map(|g| g.to_big(precision)).collect();
        let points = (0..2)
            .map(|_| {
                let theta: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
                BigComplex::from_f64(precision, 0.5 * theta.cos(), 0.5 * theta.sin())
            })
            .collect();
        Probes::Float {
            gens: big,
            points,
            tol: opts.tol.sqrt(),
        }
    }

    fn identity(&self) -> Fingerprint {
        match self {
            Probes::Modular(p) => Fingerprint::Modular(p.iter().map(|(_, _, x)| *x).collect()),
            Probes::Float { points, .. } => Fingerprint::Float(points.clone()),
        }
    }

    /// Fingerprint of `P_letter o w` from that of `w`.
    fn extend(&self, fp: &Fingerprint, letter: usize) -> Fingerprint {
        match (self, fp) {
            (Probes::Modular(p), Fingerprint::Modular(v)) => Fingerprint::Modular(
                p.iter()
                    .zip(v)
                    .map(|((prime, reduced, _), &x)| horner_mod(&reduced[letter - 1], x, *prime))
                    .collect(),
            ),
            (Probes::Float { gens, .. }, Fingerprint::Float(v)) => {
                Fingerprint::Float(v.iter().map(|x| gens[letter - 1].eval(x)).collect())
            }
            _ => unreachable!("fingerprint kinds are fixed per search"),
        }
    }

    fn float_near(&self, a: &[BigComplex], b: &[BigComplex]) -> bool {
        let tol = match self {
            Probes::Float { tol, .. } => *tol,
            Probes::Modular(_) => 0.0,
        };
        a.iter().zip(b).all(|(x, y)| {
            let scale = x.magnitude().max(y.magnitude()).max(1.0);
            x.sub(y).magnitude() <= tol * scale
        })
    }
}

/// Enumerates words by composite degree (then lexicographically) and
/// returns the first certificate: `k` words with one value, the `i`-th
/// ending in letter `i`.
///
/// Words are grown by adding letters on the left, which keeps the last
/// letter. Two words with the same value and the same last letter have the
/// same left extensions, so only the lexicographically first is expanded.
/// Values are compared through fingerprints (random points modulo primes for
/// exact fields, high-precision values for floats) and every candidate is
/// re-verified with [`verify_certificate`].
pub fn search_witness<S: Scalar>(
    gens: &[Polynomial<S>],
    opts: &SearchOptions,
) -> Result<SearchOutcome, WordError> {
    let degrees = check_generators(gens)?;
    let k = gens.len();
    if k < 2 {
        return Err(WordError::TooFewGenerators { needed: 2, got: k });
    }
    if opts.max_degree > opts.word.degree_cap {
        return Err(WordError::DegreeCap {
            degree: opts.max_degree,
            cap: opts.word.degree_cap,
        });
    }
    let probes = Probes::new(gens, &opts.word);
    let start = probes.identity();
    let mut frontier: BTreeMap<u128, Vec<Node>> = BTreeMap::new();
    for (i, &d) in degrees.iter().enumerate() {
        if d as u128 <= opts.max_degree {
            frontier.entry(d as u128).or_default().push(Node {
                word: Word::letter(i + 1),
                fp: probes.extend(&start, i + 1),
            });
        }
    }
    let mut examined = 0usize;
    while let Some((degree, mut bucket)) = frontier.pop_first() {
        bucket.sort_by(|a, b| a.word.cmp(&b.word));
        let (kept, groups) = group_bucket(&probes, bucket);
        examined += kept.len();
        for group in groups {
            let mut by_letter: Vec<Option<&Word>> = vec![None; k];
            for &idx in &group {
                let w = &kept[idx].word;
                by_letter[w.last().unwrap() - 1].get_or_insert(w);
            }
            if by_letter.iter().all(Option::is_some) {
                let words: Vec<Word> = by_letter.into_iter().map(|w| w.unwrap().clone()).collect();
                if let Some(verification) = verify_certificate(gens, &words, &opts.word)? {
                    return Ok(SearchOutcome::Found(WitnessCertificate {
                        words,
                        composite_degree: degree,
                        verification,
                    }));
                }
            }
        }
        let children: Vec<(u128, Node)> = kept
            .par_iter()
            .filter(|n| n.word.len() < opts.max_word_len)
            .flat_map_iter(|n| {
                let probes = &probes;
                degrees.iter().enumerate().filter_map(move |(i, &d)| {
                    let cd = degree.checked_mul(d as u128)?;
                    if cd > opts.max_degree {
                        return None;
                    }
                    let mut letters = Vec::with_capacity(n.word.len() + 1);
                    letters.push(i + 1);
                    letters.extend_from_slice(n.word.letters());
                    Some((
                        cd,
                        Node {
                            word: Word::new(letters),
                            fp: probes.extend(&n.fp, i + 1),
                        },
                    ))
                })
            })
            .collect();
        for (d, node) in children {
            frontier.entry(d).or_default().push(node);
        }
    }
    Ok(SearchOutcome::Exhausted {
        max_degree: opts.max_degree,
        max_word_len: opts.max_word_len,
        examined,
    })
}

/// Drops words repeating the (value, last letter) of an earlier word and
/// groups the rest by value. Returns the kept nodes and index groups.
fn group_bucket(probes: &Probes, bucket: Vec<Node>) -> (Vec<Node>, Vec<Vec<usize>>) {
    let mut kept: Vec<Node> = Vec::with_capacity(bucket.len());
    let mut groups: Vec<Vec<usize>> = Vec::new();
    match probes {
        Probes::Modular(_) => {
            let mut index: HashMap<Vec<u64>, usize> = HashMap::new();
            for node in bucket {
                let Fingerprint::Modular(v) = &node.fp else {
                    unreachable!()
                };
                let g = *index.entry(v.clone()).or_insert_with(|| {
                    groups.push(Vec::new());
                    groups.len() - 1
                });
                let last = node.word.last();
                if groups[g].iter().any(|&j| kept[j].word.last() == last) {
                    continue;
                }
                groups[g].push(kept.len());
                kept.push(node);
            }
        }
        Probes::Float { .. } => {
            for node in bucket {
                let Fingerprint::Float(v) = &node.fp else {
                    unreachable!()
                };
                let found = groups.iter().position(|grp| {
                    let Fingerprint::Float(r) = &kept[grp[0]].fp else {
                        unreachable!()
                    };
                    probes.float_near(r, v)
                });
                match found {
                    Some(g) => {
                        let last = node.word.last();
                        if groups[g].iter().any(|&j| kept[j].word.last() == last) {
                            continue;
                        }
                        groups[g].push(kept.len());
                        kept.push(node);
                    }
                    None => {
                        groups.push(vec![kept.len()]);
                        kept.push(node);
                    }
                }
            }
        }
    }
    groups.retain(|g| g.len() > 1);
    (kept, groups)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::GaussianRational as G;

    fn p(v: &[i64]) -> Polynomial<G> {
        Polynomial::new(v.iter().map(|&x| G::real(x)).collect()).unwrap()
    }

    #[test]
    fn commuting_powers() {
        let gens = vec![p(&[0, 0, 1]), p(&[0, 0, 0, 1])];
        let opts = SearchOptions {
            max_degree: 10,
            ..SearchOptions::default()
        };
        let c = match search_witness(&gens, &opts).unwrap() {
            SearchOutcome::Found(c) => c,
            other => panic!("{other:?}"),
        };
        assert_eq!(c.words, vec![Word::new(vec![2, 1]), Word::new(vec![1, 2])]);
        assert_eq!(c.composite_degree, 6);
    }

    #[test]
    fn scaled_cube_is_free() {
        let gens = vec![p(&[0, 0, 1]), p(&[0, 0, 0, 2])];
        let out = search_witness(&gens, &SearchOptions::default()).unwrap();
        assert!(matches!(out, SearchOutcome::Exhausted { max_degree: 10_000, .. }));
    }
}
