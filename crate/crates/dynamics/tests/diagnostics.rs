use num_complex::Complex64;
use polysemi_dynamics::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn poly(v: &[f64]) -> DPoly {
    DPoly::from_real(v).unwrap()
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn circle_from_backward_orbits() {
    let cloud = julia_inverse_iteration(&poly(&[0.0, 0.0, 1.0]), 10_000, 50, 1).unwrap();
    let worst = cloud.points.iter().map(|z| (z.norm() - 1.0).abs()).fold(0.0, f64::max);
    println!("z^2: max ||z| - 1| = {worst:e}");
    assert!(worst < 1e-6);
    assert_eq!(cloud.len(), 10_000);
    assert_eq!(cloud.source, CloudSource::InverseIteration);
}

#[test]
fn segment_from_backward_orbits() {
    let cloud = julia_inverse_iteration(&poly(&[-2.0, 0.0, 1.0]), 10_000, 50, 2).unwrap();
    let im = cloud.points.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    let re = cloud.points.iter().map(|z| z.re.abs()).fold(0.0, f64::max);
    println!("z^2 - 2: max |Im| = {im:e}, max |Re| = {re}");
    assert!(im < 1e-6);
    assert!(re <= 2.0 + 1e-9);
}

#[test]
fn clouds_are_deterministic() {
    let p = poly(&[0.25, 0.5, 0.0, 1.0]);
    let a = julia_inverse_iteration(&p, 3000, 30, 7).unwrap();
    let b = julia_inverse_iteration(&p, 3000, 30, 7).unwrap();
    assert_eq!(a.points, b.points);
    let d = julia_inverse_iteration(&p, 3000, 30, 8).unwrap();
    assert_ne!(a.points, d.points);
}

#[test]
fn distances_between_known_sets() {
    let sq = poly(&[0.0, 0.0, 1.0]);
    let seg = poly(&[-2.0, 0.0, 1.0]);
    let a = julia_inverse_iteration(&sq, 10_000, 50, 3).unwrap();
    let b = julia_inverse_iteration(&sq, 10_000, 50, 4).unwrap();
    let s = julia_inverse_iteration(&seg, 10_000, 50, 5).unwrap();
    assert_eq!(julia_distance(&a, &a).unwrap(), 0.0);
    let ab = julia_distance(&a, &b).unwrap();
    let as_ = julia_distance(&a, &s).unwrap();
    println!("circle/circle {ab}, circle/segment {as_}");
    assert!(ab < 0.02);
    assert!(as_ > 0.5);
    assert_eq!(julia_distance(&a, &s).unwrap(), julia_distance(&s, &a).unwrap());
}

#[test]
fn pullback_invariance_examples() {
    let sq = poly(&[0.0, 0.0, 1.0]);
    let seg = poly(&[-2.0, 0.0, 1.0]);
    let circle = julia_inverse_iteration(&sq, 10_000, 50, 6).unwrap();
    let segment = julia_inverse_iteration(&seg, 10_000, 50, 7).unwrap();
    let a = check_pullback_invariance(&sq, &circle).unwrap();
    let b = check_pullback_invariance(&seg, &segment).unwrap();
    let x = check_pullback_invariance(&sq, &segment).unwrap();
    println!("circle {a:e}, segment {b:e}, mismatch {x}");
    assert!(a < 1e-6);
    assert!(b < 1e-3);
    assert!(x > 0.5);
}

#[test]
fn pullback_invariance_of_random_julia_sets() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for case in 0..20 {
        let deg = rng.gen_range(2..=4);
        let mut v: Vec<Complex64> = (0..deg).map(|_| c(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5))).collect();
        v.push(c(1.0, 0.0));
        let p = DPoly::new(v).unwrap();
        let j = julia_inverse_iteration(&p, 4000, 60, case).unwrap();
        let tol = 3.0 * sampling_resolution(&j, &j);
        let d = check_pullback_invariance(&p, &j).unwrap();
        assert!(d <= tol, "case {case}: {d} > {tol}");
        assert!(j.max_modulus() <= p.escape_radius());
    }
}

#[test]
fn pullback_measure_of_the_square() {
    let p = poly(&[0.0, 0.0, 1.0]);
    let spec = GridSpec::escape_square(&p, 256);
    let (m, rep) = mme_pullback(&p, 12, c(0.3, 0.4), spec, DEFAULT_PREIMAGE_CAP, 0).unwrap();
    assert_eq!(rep.preimages, 4096);
    assert!((m.total() - 1.0).abs() < 1e-12);
    let uniform = circle_measure(spec, c(0.0, 0.0), 1.0, 1 << 22);
    let tv = total_variation(&m, &uniform).unwrap();
    println!("z^2 depth 12: total variation {tv}");
    assert!(tv < 0.05);
    let again = mme_pullback(&p, 12, c(0.3, 0.4), spec, DEFAULT_PREIMAGE_CAP, 0).unwrap().0;
    assert_eq!(m, again);
}

#[test]
fn pullback_measure_of_the_segment() {
    let p = poly(&[-2.0, 0.0, 1.0]);
    let spec = GridSpec::escape_square(&p, 256);
    let (m, _) = mme_pullback(&p, 12, c(0.3, 0.4), spec, DEFAULT_PREIMAGE_CAP, 0).unwrap();
    let h = spec.cell_width().max(spec.cell_height());
    let outside = m.mass_where(|z| z.im.abs() > h || z.re.abs() > 2.0 + h);
    println!("z^2 - 2: mass off the segment {outside:e}");
    assert!(outside < 1e-3);
}

#[test]
fn exceptional_start_is_replaced() {
    let p = poly(&[0.0, 0.0, 1.0]);
    let spec = GridSpec::escape_square(&p, 64);
    let (m, rep) = mme_pullback(&p, 4, c(0.0, 0.0), spec, DEFAULT_PREIMAGE_CAP, 5).unwrap();
    assert_eq!(rep.rejected_starts, vec![c(0.0, 0.0)]);
    assert_ne!(rep.start, c(0.0, 0.0));
    assert!((m.total() - 1.0).abs() < 1e-12);
    assert!(matches!(
        mme_pullback(&p, 30, c(0.5, 0.0), spec, DEFAULT_PREIMAGE_CAP, 0),
        Err(DynamicsError::PreimageCap { .. })
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn pullback_mass_is_conserved(depth in 1u32..=8, re in -1.0f64..1.0, im in -1.0f64..1.0, c0 in -1.0f64..0.3) {
        let p = poly(&[c0, 0.0, 1.0]);
        let spec = GridSpec::escape_square(&p, 64);
        let (m, rep) = mme_pullback(&p, depth, c(re, im), spec, DEFAULT_PREIMAGE_CAP, 1).unwrap();
        prop_assert!((m.total() - 1.0).abs() < 1e-12);
        prop_assert!(m.mass.iter().all(|&x| x >= 0.0));
        prop_assert_eq!(rep.preimages, 1 << depth);
    }
}

#[test]
fn exports_have_the_expected_shape() {
    let p = poly(&[0.0, 0.0, 1.0]);
    let spec = GridSpec::escape_square(&p, 8);
    let (m, _) = mme_pullback(&p, 3, c(0.3, 0.1), spec, DEFAULT_PREIMAGE_CAP, 0).unwrap();
    let mut pgm = Vec::new();
    m.write_pgm(&mut pgm).unwrap();
    let header = b"P5\n8 8\n65535\n";
    assert_eq!(&pgm[..header.len()], header);
    assert_eq!(pgm.len(), header.len() + 2 * 64);
    let mut csv = Vec::new();
    m.write_csv(&mut csv).unwrap();
    assert_eq!(String::from_utf8(csv).unwrap().lines().count(), 8);
    let cloud = julia_inverse_iteration(&p, 10, 20, 0).unwrap();
    let mut out = Vec::new();
    cloud.write_csv(&mut out).unwrap();
    assert_eq!(String::from_utf8(out).unwrap().lines().count(), 11);
}

#[test]
fn escape_boundary_of_the_square_hugs_the_circle() {
    let p = poly(&[0.0, 0.0, 1.0]);
    let spec = GridSpec::escape_square(&p, 200);
    let b = escape_boundary(&p, spec, 60);
    assert_eq!(b.source, CloudSource::EscapeBoundary);
    let h = spec.cell_width();
    assert!(b.points.iter().all(|z| (z.norm() - 1.0).abs() < 2.0 * h));
}
