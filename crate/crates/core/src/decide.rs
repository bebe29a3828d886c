//! The decision pipeline: special families, then the Böttcher test.
//!
//! Conjugating every generator by the Böttcher coordinate `beta` of `P_1`
//! turns the semigroup into one generated by power series `Q_i`. The right
//! ideals intersect exactly when every `Q_i` is `omega_i z^{n_i}` with
//! `omega_i` a root of unity, and then [`witness_zu`] builds the words.

use serde::Serialize;
use thiserror::Error;

use crate::bottcher::{bottcher_series_tol, conjugate_generator, monomiality_test, BottcherError};
use crate::normal_forms::{classify, extract_t_power_form, NormalForm, NormalFormReport};
use crate::polynomial::{AffineMap, Polynomial};
use crate::scalar::{default_tolerance, lcm_u64, BigComplex, Scalar};
use crate::words::{
    verify_certificate, witness_zu, MonomialElement, Verification, WitnessCertificate, WordError,
    WordOptions,
};

#[derive(Clone, Debug)]
pub struct DecideOptions {
    /// Working precision of the Böttcher stage, in bits.
    pub precision: u32,
    pub trunc: usize,
    /// Tail tolerance; `2^(-precision/2)` when absent.
    pub tol: Option<f64>,
    /// Largest root-of-unity order tried; `4 * prod(n_i)` when absent.
    pub max_unity_order: Option<u32>,
    pub branch: u32,
    pub word: WordOptions,
}

impl Default for DecideOptions {
    fn default() -> Self {
        DecideOptions {
            precision: 128,
            trunc: 64,
            tol: None,
            max_unity_order: None,
            branch: 0,
            word: WordOptions::default(),
        }
    }
}

#[derive(Debug, Error)]
pub enum DecideError {
    #[error("invalid input: {0}")]
    Input(String),
    #[error("{stage}: {message}")]
    Stage { stage: &'static str, message: String },
    #[error("invariant violated: {0}")]
    Invariant(String),
}

impl From<WordError> for DecideError {
    fn from(e: WordError) -> Self {
        match e {
            WordError::Invariant(m) => DecideError::Invariant(m),
            other => DecideError::Stage {
                stage: "words",
                message: other.to_string(),
            },
        }
    }
}

fn stage(stage: &'static str) -> impl Fn(BottcherError) -> DecideError {
    move |e| DecideError::Stage {
        stage,
        message: e.to_string(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Answer {
    Yes,
    No,
    Inconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Power,
    Chebyshev,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", content = "family", rename_all = "snake_case")]
pub enum Outcome {
    Yes,
    No,
    SpecialCase(Family),
    Inconclusive,
}

/// Leading coefficient of a conjugated generator.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConjugatedLeading {
    pub omega: String,
    pub degree: usize,
    /// Order of `omega` as a root of unity, if it is one.
    pub unity_order: Option<u32>,
    /// `omega = exp(2 pi i e / l)` with `l` the common order.
    pub unity_exponent: Option<u64>,
    /// `| |omega| - 1 |`.
    pub modulus_gap: f64,
    /// Largest coefficient above the order of the conjugated series.
    pub tail: f64,
    /// For exact inputs: `a_i^(n_1-1) / a_1^(n_i-1)` is a root of unity.
    pub exact_unity: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Margins {
    pub precision: u32,
    pub trunc: usize,
    pub tolerance: f64,
    /// Tails at or above this bound count as clearly nonzero.
    pub clear_bound: f64,
    pub bottcher_residual: Option<f64>,
    pub max_unity_order: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    #[serde(flatten)]
    pub outcome: Outcome,
    /// Whether the principal right ideals intersect, answered by the
    /// Böttcher test for every input, special families included.
    pub ideal_intersection: Answer,
    pub certificate: Option<WitnessCertificate>,
    /// Common order `l` used for the unity exponents.
    pub unity_modulus: Option<u64>,
    pub conjugated_leading: Vec<ConjugatedLeading>,
    pub normal_form: NormalFormReport,
    pub margins: Margins,
    pub notes: Vec<String>,
}

impl Verdict {
    /// The ideal-intersection answer, which is the outcome outside the
    /// special families.
    pub fn answer(&self) -> Answer {
        self.ideal_intersection
    }
}

/// Runs the full pipeline on `gens`.
pub fn decide<S: Scalar>(gens: &[Polynomial<S>], opts: &DecideOptions) -> Result<Verdict, DecideError> {
    if gens.is_empty() {
        return Err(DecideError::Input("no generators".into()));
    }
    for (i, g) in gens.iter().enumerate() {
        if g.degree() < 2 {
            return Err(DecideError::Input(format!(
                "generator {} has degree {}; degree at least 2 is required",
                i + 1,
                g.degree()
            )));
        }
        if !g.kind().compatible(gens[0].kind()) {
            return Err(DecideError::Input("generators live in different fields".into()));
        }
    }
    let exact = gens[0].leading().is_exact();
    let family_tol = if exact {
        0.0
    } else {
        match gens[0].kind() {
            crate::scalar::FieldKind::BigComplex { precision } => default_tolerance(precision),
            _ => 0.0,
        }
    };
    let family = classify(gens, family_tol);
    let mut test = bottcher_test(gens, opts)?;
    let outcome = match family {
        NormalForm::Power(_) => Outcome::SpecialCase(Family::Power),
        NormalForm::Chebyshev(_) => Outcome::SpecialCase(Family::Chebyshev),
        _ => match test.answer {
            Answer::Yes => Outcome::Yes,
            Answer::No => Outcome::No,
            Answer::Inconclusive => Outcome::Inconclusive,
        },
    };
    let normal_form = match (&family, test.answer) {
        (NormalForm::Power(_) | NormalForm::Chebyshev(_), _) => family.report(),
        (_, Answer::Yes) => {
            let max = test.margins.max_unity_order;
            extract_t_power_form(gens, family_tol, max).report()
        }
        _ => NormalFormReport::None {
            reason: "no common normal form: the ideals do not provably intersect".into(),
        },
    };
    if matches!(outcome, Outcome::SpecialCase(_)) {
        test.notes.push(
            "special family: the ideal-intersection answer is reported separately".into(),
        );
    }
    Ok(Verdict {
        outcome,
        ideal_intersection: test.answer,
        certificate: test.certificate,
        unity_modulus: test.unity_modulus,
        conjugated_leading: test.leading,
        normal_form,
        margins: test.margins,
        notes: test.notes,
    })
}

struct TestResult {
    answer: Answer,
    certificate: Option<WitnessCertificate>,
    unity_modulus: Option<u64>,
    leading: Vec<ConjugatedLeading>,
    margins: Margins,
    notes: Vec<String>,
}

/// `lambda^-1 o P o lambda` is monic and centered for `lambda = alpha z + c`
/// with `alpha^(n-1) = 1/a_n` and `c` the center of `P`.
fn normalizer(p: &Polynomial<BigComplex>) -> Option<AffineMap<BigComplex>> {
    let n = p.degree();
    let lead = p.leading();
    let nn = lead.from_i64_like(n as i64);
    let c = p.coeff(n - 1).div(&lead.mul(&nn))?.neg();
    let alpha = lead.inv()?.nth_root((n - 1) as u32, 0)?;
    AffineMap::new(alpha, c).ok()
}

fn bottcher_test<S: Scalar>(gens: &[Polynomial<S>], opts: &DecideOptions) -> Result<TestResult, DecideError> {
    let k = gens.len();
    let degrees: Vec<usize> = gens.iter().map(Polynomial::degree).collect();
    let tol = opts.tol.unwrap_or_else(|| default_tolerance(opts.precision));
    let clear = tol.sqrt();
    let prod: u64 = degrees.iter().map(|&d| d as u64).product();
    let exact = gens[0].leading().is_exact();
    let n1 = degrees[0] as u64;

    // Exact unity data: omega_i^(n_1 - 1) = a_i^(n_1 - 1) / a_1^(n_i - 1).
    let mut exact_unity: Vec<Option<bool>> = vec![None; k];
    let mut order_hint: u64 = 1;
    if exact {
        let a1 = gens[0].leading();
        for (i, g) in gens.iter().enumerate() {
            let delta = g
                .leading()
                .pow(n1 - 1)
                .div(&a1.pow(degrees[i] as u64 - 1))
                .expect("nonzero leading coefficient");
            let bound = delta.unity_order_bound().unwrap_or(4);
            let ord = delta.root_of_unity_order(bound, 0.0);
            exact_unity[i] = Some(ord.is_some());
            if let Some(o) = ord {
                order_hint = lcm_u64(order_hint, (n1 - 1) * o as u64);
            }
        }
    }
    let max_order = opts
        .max_unity_order
        .unwrap_or_else(|| (4 * prod).max(order_hint).min(u32::MAX as u64) as u32);
    let mut margins = Margins {
        precision: opts.precision,
        trunc: opts.trunc,
        tolerance: tol,
        clear_bound: clear,
        bottcher_residual: None,
        max_unity_order: max_order,
    };
    let mut notes = Vec::new();

    if k == 1 {
        notes.push("a single generator: the ideal is its own intersection".into());
        return Ok(TestResult {
            answer: Answer::Yes,
            certificate: Some(WitnessCertificate {
                words: vec![crate::words::Word::letter(1)],
                composite_degree: degrees[0] as u128,
                verification: Verification::Exact,
            }),
            unity_modulus: None,
            leading: Vec::new(),
            margins,
            notes,
        });
    }

    let big: Vec<Polynomial<BigComplex>> = gens.iter().map(|g| g.to_big(opts.precision)).collect();
    let lambda = normalizer(&big[0]).ok_or_else(|| DecideError::Stage {
        stage: "normalize",
        message: "could not normalize the first generator".into(),
    })?;
    let normalized: Vec<Polynomial<BigComplex>> = big.iter().map(|g| lambda.conjugate(g)).collect();

    let bd = match bottcher_series_tol(&normalized[0], opts.trunc, opts.branch, tol) {
        Ok(bd) => bd,
        Err(BottcherError::ResidualTooLarge { residual, tolerance }) => {
            margins.bottcher_residual = Some(residual);
            notes.push(format!(
                "Böttcher residual {residual:e} exceeds {tolerance:e}; raise the precision"
            ));
            return Ok(TestResult {
                answer: Answer::Inconclusive,
                certificate: None,
                unity_modulus: None,
                leading: Vec::new(),
                margins,
                notes,
            });
        }
        Err(e) => return Err(stage("bottcher")(e)),
    };
    margins.bottcher_residual = Some(bd.residual);

    let mut leading = Vec::with_capacity(k);
    let mut any_clear_no = false;
    let mut any_thin = false;
    let mut omegas = Vec::with_capacity(k);
    for (i, g) in normalized.iter().enumerate() {
        let q = conjugate_generator(&bd, g).map_err(stage("conjugate"))?;
        let rep = match monomiality_test(&q, tol) {
            Ok(r) => r,
            Err(BottcherError::HorizonTooShort { horizon, ord }) => {
                notes.push(format!(
                    "generator {}: horizon {horizon} below 2 x order {ord}; raise trunc",
                    i + 1
                ));
                any_thin = true;
                leading.push(ConjugatedLeading {
                    omega: String::new(),
                    degree: degrees[i],
                    unity_order: None,
                    unity_exponent: None,
                    modulus_gap: f64::NAN,
                    tail: f64::NAN,
                    exact_unity: exact_unity[i],
                });
                omegas.push(None);
                continue;
            }
            Err(e) => return Err(stage("monomiality")(e)),
        };
        if rep.ord != degrees[i] {
            return Err(DecideError::Invariant(format!(
                "conjugate of generator {} has order {} instead of {}",
                i + 1,
                rep.ord,
                degrees[i]
            )));
        }
        // In the chart at 0, omega z^n becomes w^n / omega.
        let omega = rep.leading.inv().expect("nonzero leading coefficient");
        let gap = (omega.magnitude() - 1.0).abs();
        let order = omega.root_of_unity_order(max_order, clear);
        let tail = rep.max_tail;
        let numeric_unity_clear_no = gap >= clear;
        if tail >= clear || numeric_unity_clear_no || exact_unity[i] == Some(false) {
            any_clear_no = true;
        } else if tail > tol || order.is_none() || gap > tol {
            any_thin = true;
        }
        if exact_unity[i] == Some(true) && order.is_none() {
            any_thin = true;
            notes.push(format!(
                "generator {}: exact data says root of unity but the numeric order was not found",
                i + 1
            ));
        }
        leading.push(ConjugatedLeading {
            omega: omega.to_c64().to_string(),
            degree: degrees[i],
            unity_order: order,
            unity_exponent: None,
            modulus_gap: gap,
            tail,
            exact_unity: exact_unity[i],
        });
        omegas.push(Some((omega, order)));
    }

    if any_clear_no {
        return Ok(TestResult {
            answer: Answer::No,
            certificate: None,
            unity_modulus: None,
            leading,
            margins,
            notes,
        });
    }
    if any_thin {
        notes.push("margins too thin for a verdict; raise precision or trunc".into());
        return Ok(TestResult {
            answer: Answer::Inconclusive,
            certificate: None,
            unity_modulus: None,
            leading,
            margins,
            notes,
        });
    }

    let l = omegas
        .iter()
        .map(|o| o.as_ref().and_then(|(_, ord)| *ord).unwrap_or(1) as u64)
        .fold(1u64, lcm_u64);
    let mut elements = Vec::with_capacity(k);
    for (i, o) in omegas.iter().enumerate() {
        let (omega, _) = o.as_ref().expect("all generators passed");
        let z = omega.to_c64();
        let turns = z.arg() / std::f64::consts::TAU;
        let e = ((turns * l as f64).round() as i64).rem_euclid(l as i64) as u64;
        leading[i].unity_exponent = Some(e);
        elements.push(MonomialElement::new(e, l, degrees[i] as u128));
    }
    let mut cert = witness_zu(&elements)?;
    let verification = if cert.composite_degree > opts.word.degree_cap {
        Verification::Unverified {
            reason: format!(
                "composite degree {} exceeds the cap {}",
                cert.composite_degree, opts.word.degree_cap
            ),
        }
    } else {
        match verify_certificate(gens, &cert.words, &opts.word) {
            Ok(Some(v)) => v,
            Ok(None) => {
                notes.push(
                    "the certificate built from the conjugated data fails on the generators"
                        .into(),
                );
                return Ok(TestResult {
                    answer: Answer::Inconclusive,
                    certificate: None,
                    unity_modulus: Some(l),
                    leading,
                    margins,
                    notes,
                });
            }
            Err(e) => Verification::Unverified {
                reason: e.to_string(),
            },
        }
    };
    cert.verification = verification;
    Ok(TestResult {
        answer: Answer::Yes,
        certificate: Some(cert),
        unity_modulus: Some(l),
        leading,
        margins,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{Cyclotomic, GaussianRational as G};

    fn p(v: &[i64]) -> Polynomial<G> {
        Polynomial::new(v.iter().map(|&x| G::real(x)).collect()).unwrap()
    }

    #[test]
    fn scaled_cube_is_no() {
        let v = decide(&[p(&[1, 0, 1]), p(&[0, 0, 0, 2])], &DecideOptions::default()).unwrap();
        assert_eq!(v.outcome, Outcome::No);
    }

    #[test]
    fn unity_cube_is_yes() {
        let z = |j| Cyclotomic::zeta_power(3, j);
        let zero = Cyclotomic::rational(3, 0.into());
        let one = Cyclotomic::rational(3, 1.into());
        let g1 = Polynomial::new(vec![zero.clone(), zero.clone(), one.clone()]).unwrap();
        let g2 = Polynomial::new(vec![zero.clone(), zero.clone(), zero, z(1)]).unwrap();
        let v = decide(&[g1, g2], &DecideOptions::default()).unwrap();
        assert_eq!(v.outcome, Outcome::SpecialCase(Family::Power));
        assert_eq!(v.ideal_intersection, Answer::Yes);
        assert_eq!(v.certificate.unwrap().verification, Verification::Exact);
    }

    #[test]
    fn chebyshev_pair_is_special() {
        let v = decide(&[p(&[-2, 0, 1]), p(&[0, -3, 0, 1])], &DecideOptions::default()).unwrap();
        assert_eq!(v.outcome, Outcome::SpecialCase(Family::Chebyshev));
        assert_eq!(v.ideal_intersection, Answer::Yes);
    }

    #[test]
    fn linear_rejected() {
        assert!(matches!(
            decide(&[p(&[0, 1])], &DecideOptions::default()),
            Err(DecideError::Input(_))
        ));
    }
}
