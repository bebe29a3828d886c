use polysemi_core::polynomial::Polynomial;
use polysemi_core::properties::{l0_composition_suite, word_l0_suite};
use polysemi_core::scalar::{GaussianRational as G, Scalar};
use polysemi_core::series::{Gap, TruncatedSeries};
use proptest::prelude::*;

fn series(v: &[i64], trunc: usize) -> TruncatedSeries<G> {
    TruncatedSeries::new(v.iter().map(|&x| G::real(x)).collect(), trunc)
}

fn small_vec(len: usize) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-3i64..=3, len)
}

/// `[0, 0.., c, rest..]` with a nonzero coefficient at `ord`.
fn admissible(ord: usize, len: usize) -> impl Strategy<Value = Vec<i64>> {
    (prop_oneof![-3i64..=-1, 1i64..=3], small_vec(len)).prop_map(move |(c, tail)| {
        let mut v = vec![0; ord];
        v.push(c);
        v.extend(tail);
        v
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn compose_is_associative(
        a in admissible(1, 8), b in admissible(1, 8), c in admissible(2, 8)
    ) {
        let (a, b, c) = (series(&a, 9), series(&b, 9), series(&c, 10));
        let left = TruncatedSeries::compose(&TruncatedSeries::compose(&a, &b).unwrap(), &c).unwrap();
        let right = TruncatedSeries::compose(&a, &TruncatedSeries::compose(&b, &c).unwrap()).unwrap();
        let h = left.trunc_order().min(right.trunc_order());
        prop_assert_eq!(left.truncate(h), right.truncate(h));
    }

    #[test]
    fn inverse_is_two_sided(s in admissible(1, 10)) {
        let s = series(&s, 11);
        let t = s.comp_inverse().unwrap();
        let id = TruncatedSeries::identity(&G::real(1), 11);
        prop_assert_eq!(TruncatedSeries::compose(&s, &t).unwrap().truncate(11), id.clone());
        prop_assert_eq!(TruncatedSeries::compose(&t, &s).unwrap().truncate(11), id);
    }

    /// The composed series agrees with exact polynomial composition on
    /// every index it claims to know.
    #[test]
    fn compose_matches_polynomial_composition(
        outer in admissible(1, 5), inner in admissible(1, 4)
    ) {
        let so = series(&outer, outer.len() + 3);
        let si = series(&inner, inner.len() + 3);
        let c = TruncatedSeries::compose(&so, &si).unwrap();
        let po = Polynomial::new(outer.iter().map(|&x| G::real(x)).collect()).unwrap();
        let pi = Polynomial::new(inner.iter().map(|&x| G::real(x)).collect()).unwrap();
        let exact = po.compose(&pi);
        for i in 0..=c.trunc_order() {
            prop_assert_eq!(c.coeff(i).unwrap().clone(), exact.coeff(i));
        }
    }

    #[test]
    fn add_and_mul_take_the_smaller_horizon(a in small_vec(6), b in small_vec(9)) {
        let (sa, sb) = (series(&a, 5), series(&b, 8));
        prop_assert_eq!(sa.add(&sb).unwrap().trunc_order(), 5);
        prop_assert_eq!(sa.mul(&sb).unwrap().trunc_order(), 5);
        let back = sa.add(&sb).unwrap().sub(&sb).unwrap();
        prop_assert_eq!(back, sa);
    }
}

#[test]
fn ord_l0_reads_the_definition() {
    let s = series(&[0, 0, 0, 1, 0, 0, 0, 2], 10);
    let o = s.ord_l0().unwrap();
    assert_eq!((o.ord, o.l0, o.certain), (3, Gap::Finite(4), true));
    let m = TruncatedSeries::monomial(G::real(1), 5, 40);
    let o = m.ord_l0().unwrap();
    assert_eq!((o.ord, o.l0, o.certain), (5, Gap::Infinite, false));
    assert!(TruncatedSeries::zero(&G::real(0), 5).ord_l0().is_err());
}

#[test]
fn l0_suites_at_full_size() {
    let a = l0_composition_suite(1000, 11, 64);
    assert!(a.passed(), "{a:?}");
    assert_eq!(a.cases, 1000);
    let b = word_l0_suite(500, 12, 4, 6);
    assert!(b.passed(), "{b:?}");
}

#[test]
fn catalan_inverse_against_closed_form() {
    // z + z^2 inverts to sum (-1)^(n+1) C_(n-1) z^n with Catalan numbers C.
    let s = series(&[0, 1, 1], 12);
    let t = s.comp_inverse().unwrap();
    let mut catalan = vec![1i64];
    for n in 1..12 {
        let c: i64 = (0..n).map(|i| catalan[i] * catalan[n - 1 - i]).sum();
        catalan.push(c);
    }
    for n in 1..=12 {
        let sign = if n % 2 == 1 { 1 } else { -1 };
        assert_eq!(t.coeff(n).unwrap(), &G::real(sign * catalan[n - 1]), "index {n}");
    }
    assert!(t.coeff(0).unwrap().is_zero());
}
