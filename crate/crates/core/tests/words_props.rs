use polysemi_core::normal_forms::chebyshev;
use polysemi_core::polynomial::Polynomial;
use polysemi_core::scalar::{Cyclotomic, GaussianRational as G};
use polysemi_core::words::*;
use proptest::prelude::*;

fn p(v: &[i64]) -> Polynomial<G> {
    Polynomial::new(v.iter().map(|&x| G::real(x)).collect()).unwrap()
}

fn found(out: SearchOutcome) -> WitnessCertificate {
    match out {
        SearchOutcome::Found(c) => c,
        other => panic!("expected a certificate, got {other:?}"),
    }
}

fn search(gens: &[Polynomial<G>], max_degree: u128) -> SearchOutcome {
    let opts = SearchOptions {
        max_degree,
        ..SearchOptions::default()
    };
    search_witness(gens, &opts).unwrap()
}

fn random_poly() -> impl Strategy<Value = Polynomial<G>> {
    (2usize..=3)
        .prop_flat_map(|d| (prop::collection::vec(-2i64..=2, d), prop_oneof![-2i64..=-1, 1i64..=2]))
        .prop_map(|(mut v, lead)| {
            v.push(lead);
            p(&v)
        })
}

fn word(k: usize, max_len: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec(1..=k, 1..=max_len).prop_map(Word::new)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn degree_is_multiplicative(
        gens in prop::collection::vec(random_poly(), 2..=3),
        a in word(2, 3), b in word(2, 3)
    ) {
        let ab = a.then(&b);
        let deg = |w: &Word| compose_word(&gens, w, 1_000_000).unwrap().degree() as u128;
        prop_assert_eq!(deg(&ab), deg(&a) * deg(&b));
        let degrees: Vec<usize> = gens.iter().map(Polynomial::degree).collect();
        prop_assert_eq!(ab.degree(&degrees).unwrap(), deg(&ab));
    }

    /// u w = v w forces u = v: composition on the right by a nonconstant
    /// polynomial is injective.
    #[test]
    fn right_cancellative(
        gens in prop::collection::vec(random_poly(), 2..=3),
        u in word(2, 2), v in word(2, 2), w in word(2, 2)
    ) {
        let c = |x: &Word| compose_word(&gens, x, 1_000_000).unwrap();
        if c(&u.then(&w)) == c(&v.then(&w)) {
            prop_assert_eq!(c(&u), c(&v));
        }
    }

    #[test]
    fn witness_zu_is_exact_and_identity_positive(
        l in 1u64..=4,
        elems in prop::collection::vec((0u64..4, 2u128..=3), 2..=3)
    ) {
        let elements: Vec<MonomialElement> =
            elems.iter().map(|&(e, d)| MonomialElement::new(e, l, d)).collect();
        let cert = witness_zu(&elements).unwrap();
        let degrees: Vec<usize> = elements.iter().map(|e| e.degree as usize).collect();
        cert.check_shape(&degrees).unwrap();
        for w in &cert.words[1..] {
            prop_assert!(verify_monomial_relation(&elements, &cert.words[0], w).unwrap());
        }
        let id = extract_coefficient_identity(&degrees, &cert.words).unwrap();
        prop_assert!(id.reduced.iter().all(|&s| s >= 1));
    }
}

#[test]
fn search_agrees_with_witness_zu_on_unity_monomials() {
    // Generators zeta_l^e z^d over Q(zeta_l); whenever the constructive
    // certificate fits under the cap, the search finds one too.
    let cases: &[(u32, &[(i64, usize)])] = &[
        (1, &[(0, 2), (0, 3)]),
        (2, &[(1, 2), (0, 3)]),
        (2, &[(1, 2), (1, 3)]),
        (4, &[(1, 2), (0, 2)]),
        (3, &[(1, 2), (0, 3), (2, 2)]),
    ];
    for &(l, elems) in cases {
        let elements: Vec<MonomialElement> = elems
            .iter()
            .map(|&(e, d)| MonomialElement::new(e as u64, l as u64, d as u128))
            .collect();
        let cert = witness_zu(&elements).unwrap();
        let m = if l % 4 == 0 { l } else { l.max(1) };
        let gens: Vec<Polynomial<Cyclotomic>> = elems
            .iter()
            .map(|&(e, d)| {
                Polynomial::monomial(Cyclotomic::zeta_power(m.max(1), e), d)
            })
            .collect();
        assert_eq!(verify_certificate(&gens, &cert.words, &WordOptions::default()).unwrap(), Some(Verification::Exact));
        let cap = cert.composite_degree.max(10);
        let opts = SearchOptions {
            max_degree: cap,
            max_word_len: 24,
            ..SearchOptions::default()
        };
        let out = search_witness(&gens, &opts).unwrap();
        let c = found(out);
        assert!(c.composite_degree <= cert.composite_degree);
        c.check_shape(&gens.iter().map(Polynomial::degree).collect::<Vec<_>>()).unwrap();
    }
}

#[test]
fn compose_word_intro_relation() {
    // P1 = R o z^2, P2 = X, P3 = -X with R = z^2 + 1, X = z^2 + z + 1.
    let r = p(&[1, 0, 1]);
    let x = p(&[1, 1, 1]);
    let p1 = r.compose(&p(&[0, 0, 1]));
    let p3 = x.scale(&G::real(-1));
    let gens = vec![p1, x, p3];
    let a = compose_word(&gens, &Word::new(vec![1, 2]), 1_000_000).unwrap();
    let b = compose_word(&gens, &Word::new(vec![1, 3]), 1_000_000).unwrap();
    assert_eq!(a, b);
    let s = verify_relation(&gens, &Word::new(vec![1, 2]), &Word::new(vec![1, 3]), &WordOptions::default()).unwrap();
    assert_eq!(s, RelationStatus::Exact);
}

#[test]
fn chebyshev_commute_under_verify() {
    let one = G::real(1);
    let gens = vec![chebyshev(2, &one).unwrap(), chebyshev(3, &one).unwrap()];
    let s = verify_relation(&gens, &Word::new(vec![1, 2]), &Word::new(vec![2, 1]), &WordOptions::default()).unwrap();
    assert_eq!(s, RelationStatus::Exact);
    assert_eq!(compose_word(&gens, &Word::new(vec![1, 2]), 100).unwrap(), chebyshev(6, &one).unwrap());
}

#[test]
fn search_examples() {
    let c = found(search(&[p(&[0, 0, 1]), p(&[0, 0, 0, 1])], 10));
    assert_eq!(c.words, vec![Word::new(vec![2, 1]), Word::new(vec![1, 2])]);
    assert_eq!(c.composite_degree, 6);

    let out = search(&[p(&[0, 0, 1]), p(&[0, 0, 0, 2])], 10_000);
    assert!(matches!(out, SearchOutcome::Exhausted { .. }));

    // Recorded from running the search: -z^2 o -z^3 o -z^2 = -z^2 o -z^2 o -z^3 = -z^12.
    let gens = [p(&[0, 0, -1]), p(&[0, 0, 0, -1])];
    let c = found(search(&gens, 10_000));
    assert_eq!(c.composite_degree, 12);
    assert_eq!(c.words, vec![Word::new(vec![1, 2, 1]), Word::new(vec![1, 1, 2])]);
    let a = compose_word(&gens, &c.words[0], 100).unwrap();
    assert_eq!(a, Polynomial::monomial(G::real(-1), 12));
}

#[test]
fn search_rejects_degree_cap_overrun() {
    let opts = SearchOptions {
        max_degree: 10_000_000,
        ..SearchOptions::default()
    };
    let e = search_witness(&[p(&[0, 0, 1]), p(&[0, 0, 0, 1])], &opts);
    assert!(matches!(e, Err(WordError::DegreeCap { .. })));
}

#[test]
fn witness_zu_examples() {
    let e = [MonomialElement::new(0, 1, 2), MonomialElement::new(0, 1, 3)];
    let c = witness_zu(&e).unwrap();
    // j1 = 1, j2 = 2: F1^2 = F1 o F2 with F1 = F2 = z^6.
    assert_eq!(c.composite_degree, 36);
    assert_eq!(c.words[1], Word::new(vec![1, 2]).power(2));

    let e = [MonomialElement::new(1, 2, 2), MonomialElement::new(0, 2, 3)];
    let c = witness_zu(&e).unwrap();
    let d = c.composite_degree;
    let mut x = d;
    while x % 6 == 0 {
        x /= 6;
    }
    assert_eq!(x, 1, "degree {d} is a power of 6");
    assert!(verify_monomial_relation(&e, &c.words[0], &c.words[1]).unwrap());

    let e = [
        MonomialElement::new(1, 3, 2),
        MonomialElement::new(0, 3, 3),
        MonomialElement::new(2, 3, 2),
    ];
    let c = witness_zu(&e).unwrap();
    let v = |w: &Word| {
        let mut acc = MonomialElement::new(0, 3, 1);
        for &l in w.letters() {
            acc = acc.compose(&e[l - 1]).unwrap();
        }
        acc
    };
    assert_eq!(v(&c.words[0]), v(&c.words[1]));
    assert_eq!(v(&c.words[1]), v(&c.words[2]));
}

#[test]
fn combine_chebyshev_relations() {
    // T6 o T6 = T6 o T2 o T3: relations P1^2 = P1 o P2 o P3 do not fit the
    // pairwise shape, so use T4 = T2 o T2 with generators (T4, T2, T16).
    let one = G::real(1);
    let gens = vec![
        chebyshev(4, &one).unwrap(),
        chebyshev(2, &one).unwrap(),
        chebyshev(16, &one).unwrap(),
    ];
    let opts = WordOptions::default();
    let r2 = find_pairwise_relation(&gens, 2, 4, &opts).unwrap().unwrap();
    let r3 = find_pairwise_relation(&gens, 3, 4, &opts).unwrap().unwrap();
    let words = combine_pairwise(&[r2, r3]).unwrap();
    for (i, w) in words.iter().enumerate() {
        assert_eq!(w.last(), Some(i + 1));
    }
    assert_eq!(verify_certificate(&gens, &words, &opts).unwrap(), Some(Verification::Exact));
}

#[test]
fn coefficient_identity_examples() {
    let id = extract_coefficient_identity(&[2, 3], &[Word::new(vec![2, 1]), Word::new(vec![1, 2])]).unwrap();
    // a1 a2^2 z^6 vs a2 a1^3 z^6, i.e. a1^2 = a2.
    assert_eq!(id.exponents, vec![vec![3, 1], vec![1, 2]]);
    assert_eq!(id.cancelled, vec![vec![2, 0], vec![0, 1]]);
    assert_eq!(id.reduced, vec![2, 1]);

    let c = witness_zu(&[MonomialElement::new(1, 2, 2), MonomialElement::new(0, 2, 3)]).unwrap();
    let id = extract_coefficient_identity(&[2, 3], &c.words).unwrap();
    assert!(id.reduced.iter().all(|&s| s >= 1));

    assert!(matches!(
        extract_coefficient_identity(&[2], &[Word::letter(1)]),
        Err(WordError::TooFewGenerators { .. })
    ));
}
