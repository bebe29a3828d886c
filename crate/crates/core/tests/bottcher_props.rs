use polysemi_core::bottcher::*;
use polysemi_core::decide::{decide, DecideOptions};
use polysemi_core::polynomial::{AffineMap, Polynomial};
use polysemi_core::scalar::{BigComplex, GaussianRational as G, Scalar};
use proptest::prelude::*;

fn big(v: &[(f64, f64)], prec: u32) -> Polynomial<BigComplex> {
    Polynomial::new(v.iter().map(|&(re, im)| BigComplex::from_f64(prec, re, im)).collect()).unwrap()
}

fn p(v: &[i64]) -> Polynomial<G> {
    Polynomial::new(v.iter().map(|&x| G::real(x)).collect()).unwrap()
}

#[test]
fn residual_weakly_decreases_with_precision() {
    let inputs: [&[(f64, f64)]; 3] = [
        &[(0.3, 0.1), (0.0, 0.0), (1.0, 0.0)],
        &[(0.25, 0.0), (-0.5, 0.0), (0.0, 0.0), (1.0, 0.0)],
        &[(-0.1, 0.2), (0.0, 0.0), (1.5, -0.5)],
    ];
    for v in inputs {
        let r: Vec<f64> = [64, 128, 256]
            .iter()
            .map(|&prec| bottcher_series_tol(&big(v, prec), 48, 0, 1.0).unwrap().residual)
            .collect();
        assert!(r[1] <= r[0] && r[2] <= r[1], "residuals {r:?}");
        assert!(r[1] < 1e-20, "residuals {r:?}");
    }
}

#[test]
fn base_conjugate_is_the_power() {
    for v in [
        &[(0.0, 0.0), (0.0, 0.0), (1.0, 0.0)][..],
        &[(1.0, 0.0), (0.0, 0.0), (1.0, 0.0)],
        &[(0.0, 0.0), (-3.0, 0.0), (0.0, 0.0), (1.0, 0.0)],
        &[(0.5, 0.5), (1.0, 0.0), (0.0, 0.0), (0.0, 0.0), (1.0, 0.0)],
    ] {
        let q = big(v, 128);
        let bd = bottcher_series(&q, 64, 0).unwrap();
        let c = conjugate_generator(&bd, &q).unwrap();
        let rep = monomiality_test(&c, default_tol_for(q.kind())).unwrap();
        assert!(rep.is_monomial, "tail {}", rep.max_tail);
        assert!(rep.max_tail < 1e-20);
        assert_eq!(rep.ord, q.degree());
        assert!(rep.leading.near(&rep.leading.one_like(), 1e-20));
    }
}

#[test]
fn verdict_is_branch_independent() {
    let cases = vec![
        vec![p(&[0, 0, 0, 1]), p(&[0, 0, 0, 0, 0, 0, 0, 0, 0, -1])],
        vec![p(&[0, 0, 0, 2]), p(&[0, 0, 1])],
        vec![p(&[1, 0, 0, 1]), p(&[0, 0, 1])],
        vec![p(&[0, 1, 0, 1]), p(&[0, -1, 0, -1])],
    ];
    for gens in cases {
        let base = decide(&gens, &DecideOptions::default()).unwrap();
        let other = decide(
            &gens,
            &DecideOptions {
                branch: 1,
                ..DecideOptions::default()
            },
        )
        .unwrap();
        assert_eq!(base.outcome, other.outcome);
        assert_eq!(base.ideal_intersection, other.ideal_intersection);
    }
}

fn monomial_verdicts(gens: &[Polynomial<BigComplex>]) -> Vec<bool> {
    let bd = bottcher_series(&gens[0], 48, 0).unwrap();
    let tol = default_tol_for(gens[0].kind()).sqrt();
    gens.iter()
        .map(|g| monomiality_test(&conjugate_generator(&bd, g).unwrap(), tol).unwrap().is_monomial)
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    /// Conjugating the whole family by an affine map only moves the
    /// Böttcher coordinate, so each generator keeps its verdict.
    #[test]
    fn monomiality_is_affine_covariant(
        re in -2.0f64..2.0, im in -2.0f64..2.0, b in -1.0f64..1.0, sign in prop::bool::ANY
    ) {
        prop_assume!(re.hypot(im) > 0.3);
        let tt = [(0.0, 0.0), (1.0, 0.0), (0.0, 0.0), (1.0, 0.0)];
        let t = big(&tt, 128);
        let s = if sign { -1.0 } else { 1.0 };
        let gens = vec![
            t.clone(),
            t.compose(&t).scale(&BigComplex::from_f64(128, s, 0.0)),
            big(&[(0.5, 0.0), (0.0, 0.0), (1.0, 0.0)], 128),
        ];
        let lambda = AffineMap::new(BigComplex::from_f64(128, re, im), BigComplex::from_f64(128, b, 0.0)).unwrap();
        let moved: Vec<_> = gens.iter().map(|g| lambda.conjugate(g)).collect();
        let v = monomial_verdicts(&gens);
        prop_assert_eq!(&v, &vec![true, true, false]);
        prop_assert_eq!(monomial_verdicts(&moved), v);
    }
}
