//! JSON input: generators as lists of coefficient strings.
//!
//! ```json
//! { "generators": [["1", "0", "1"], ["0", "0", "0", "zeta(3)"]],
//!   "precision": 128, "trunc": 64 }
//! ```
//!
//! Coefficients are listed from the constant term up. Accepted forms:
//! rationals `"-3/4"`, Gaussian rationals `"1/2-3i"`, `"i"`, sums of
//! multiples of `zeta(m)^j` (`"1/2 zeta(5)^2 - zeta(5)"`), and decimals
//! `"0.25-1.5e-3i"`.
//!
//! The field is inferred from all coefficients together: any `zeta(m)`
//! selects the cyclotomic field of order `lcm` of the `m` seen (and 4 when
//! `i` also appears); otherwise any decimal selects high-precision complex
//! floats; otherwise Gaussian rationals. Mixing decimals with `zeta`
//! evaluates everything numerically.

use rug::{Complex, Float, Rational};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::polynomial::Polynomial;
use crate::scalar::{lcm_u64, BigComplex, Cyclotomic, GaussianRational};

#[derive(Debug, Error)]
pub enum InputError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("generator {generator}, coefficient {index} ({text:?}): {reason}")]
    Coefficient {
        generator: usize,
        index: usize,
        text: String,
        reason: String,
    },
    #[error("no generators given")]
    Empty,
    #[error("generator {generator} has degree {degree}; degree at least 2 is required")]
    Degree { generator: usize, degree: usize },
}

/// Raw document as read from disk.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputDocument {
    pub generators: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precision: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trunc: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_degree: Option<u128>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_unity_order: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Free-form expectation used by the corpus (`"yes"`, `"no"`, ...).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect: Option<String>,
}

/// Generators in their inferred field.
#[derive(Clone, Debug)]
pub enum Generators {
    Gaussian(Vec<Polynomial<GaussianRational>>),
    Cyclotomic(Vec<Polynomial<Cyclotomic>>),
    Big(Vec<Polynomial<BigComplex>>),
}

impl Generators {
    pub fn len(&self) -> usize {
        match self {
            Generators::Gaussian(g) => g.len(),
            Generators::Cyclotomic(g) => g.len(),
            Generators::Big(g) => g.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn degrees(&self) -> Vec<usize> {
        match self {
            Generators::Gaussian(g) => g.iter().map(Polynomial::degree).collect(),
            Generators::Cyclotomic(g) => g.iter().map(Polynomial::degree).collect(),
            Generators::Big(g) => g.iter().map(Polynomial::degree).collect(),
        }
    }

    pub fn field_name(&self) -> String {
        match self {
            Generators::Gaussian(_) => "Q(i)".into(),
            Generators::Cyclotomic(g) => format!("Q(zeta_{})", g[0].leading().order()),
            Generators::Big(g) => format!("C[{} bits]", g[0].leading().precision()),
        }
    }

    pub fn to_big(&self, precision: u32) -> Vec<Polynomial<BigComplex>> {
        match self {
            Generators::Gaussian(g) => g.iter().map(|p| p.to_big(precision)).collect(),
            Generators::Cyclotomic(g) => g.iter().map(|p| p.to_big(precision)).collect(),
            Generators::Big(g) => g.iter().map(|p| p.to_big(precision)).collect(),
        }
    }
}

/// Applies a generic expression to the generators whatever their field.
#[macro_export]
macro_rules! with_generators {
    ($gens:expr, |$g:ident| $body:expr) => {
        match $gens {
            $crate::input::Generators::Gaussian($g) => $body,
            $crate::input::Generators::Cyclotomic($g) => $body,
            $crate::input::Generators::Big($g) => $body,
        }
    };
}

#[derive(Clone, Debug, PartialEq)]
enum Unit {
    One,
    I,
    Zeta(u32, i64),
}

#[derive(Clone, Debug, PartialEq)]
enum Amount {
    Exact(Rational),
    Decimal(String),
}

#[derive(Clone, Debug, PartialEq)]
struct Term {
    amount: Amount,
    unit: Unit,
}

/// Splits at top-level `+`/`-`, keeping signs, and not at exponent signs
/// such as `1e-3`.
fn split_terms(s: &str) -> Vec<String> {
    let chars: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut depth = 0i32;
    for (idx, &c) in chars.iter().enumerate() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            _ => {}
        }
        let is_sign = (c == '+' || c == '-') && depth == 0;
        let after_exp = idx > 0
            && matches!(chars[idx - 1], 'e' | 'E')
            && idx >= 2
            && chars[idx - 2].is_ascii_digit() | (chars[idx - 2] == '.');
        if is_sign && !after_exp && !cur.is_empty() && cur != "+" && cur != "-" {
            out.push(std::mem::take(&mut cur));
        }
        cur.push(c);
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

fn parse_amount(s: &str) -> Result<Amount, String> {
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    if body.is_empty() {
        let one = Rational::from(if neg { -1 } else { 1 });
        return Ok(Amount::Exact(one));
    }
    if body.contains(['.', 'e', 'E']) {
        Float::parse(body).map_err(|e| format!("bad decimal {body:?}: {e}"))?;
        return Ok(Amount::Decimal(if neg { format!("-{body}") } else { body.to_string() }));
    }
    let q: Rational = body
        .parse()
        .map_err(|_| format!("bad rational {body:?}"))?;
    Ok(Amount::Exact(if neg { -q } else { q }))
}

fn parse_term(t: &str) -> Result<Term, String> {
    let t = t.replace('*', "");
    if let Some(pos) = t.find("zeta(") {
        let (amount, unit) = t.split_at(pos);
        let inner = &unit[5..];
        let close = inner.find(')').ok_or("unclosed zeta(")?;
        let m: u32 = inner[..close]
            .parse()
            .map_err(|_| format!("bad zeta order {:?}", &inner[..close]))?;
        if m == 0 {
            return Err("zeta order must be positive".into());
        }
        let rest = &inner[close + 1..];
        let j: i64 = if rest.is_empty() {
            1
        } else {
            rest.strip_prefix('^')
                .ok_or_else(|| format!("unexpected {rest:?} after zeta"))?
                .parse()
                .map_err(|_| format!("bad exponent in {rest:?}"))?
        };
        return Ok(Term {
            amount: parse_amount(amount)?,
            unit: Unit::Zeta(m, j),
        });
    }
    if let Some(amount) = t.strip_suffix('i') {
        return Ok(Term {
            amount: parse_amount(amount)?,
            unit: Unit::I,
        });
    }
    Ok(Term {
        amount: parse_amount(&t)?,
        unit: Unit::One,
    })
}

fn parse_coefficient(s: &str) -> Result<Vec<Term>, String> {
    if s.trim().is_empty() {
        return Err("empty coefficient".into());
    }
    split_terms(s).iter().map(|t| parse_term(t)).collect()
}

enum Inferred {
    Gaussian,
    Cyclotomic(u32),
    Big,
}

fn infer(terms: &[Vec<Vec<Term>>]) -> Inferred {
    let mut m: u64 = 1;
    let mut zeta = false;
    let mut has_i = false;
    let mut decimal = false;
    for t in terms.iter().flatten().flatten() {
        match t.unit {
            Unit::Zeta(order, _) => {
                zeta = true;
                m = lcm_u64(m, order as u64);
            }
            Unit::I => has_i = true,
            Unit::One => {}
        }
        if matches!(t.amount, Amount::Decimal(_)) {
            decimal = true;
        }
    }
    if decimal {
        Inferred::Big
    } else if zeta {
        if has_i {
            m = lcm_u64(m, 4);
        }
        Inferred::Cyclotomic(m as u32)
    } else {
        Inferred::Gaussian
    }
}

fn exact(a: &Amount) -> Rational {
    match a {
        Amount::Exact(q) => q.clone(),
        Amount::Decimal(_) => unreachable!("decimal amounts select the float field"),
    }
}

fn to_gaussian(terms: &[Term]) -> GaussianRational {
    let mut re = Rational::new();
    let mut im = Rational::new();
    for t in terms {
        match t.unit {
            Unit::One => re += exact(&t.amount),
            Unit::I => im += exact(&t.amount),
            Unit::Zeta(..) => unreachable!(),
        }
    }
    GaussianRational::new(re, im)
}

fn to_cyclotomic(terms: &[Term], m: u32) -> Cyclotomic {
    let mut acc = Cyclotomic::zero(m);
    for t in terms {
        let unit = match t.unit {
            Unit::One => Cyclotomic::rational(m, Rational::from(1)),
            Unit::I => Cyclotomic::zeta_power(m, (m / 4) as i64),
            Unit::Zeta(order, j) => Cyclotomic::zeta_power(m, j * (m / order) as i64),
        };
        let c = Cyclotomic::rational(m, exact(&t.amount));
        acc = crate::scalar::Scalar::add(&acc, &crate::scalar::Scalar::mul(&c, &unit));
    }
    acc
}

fn to_big(terms: &[Term], precision: u32) -> BigComplex {
    let mut acc = Complex::new(precision);
    for t in terms {
        let amount = match &t.amount {
            Amount::Exact(q) => Float::with_val(precision, q),
            Amount::Decimal(s) => Float::with_val(precision, Float::parse(s).expect("validated")),
        };
        let unit = match t.unit {
            Unit::One => Complex::with_val(precision, 1),
            Unit::I => Complex::with_val(precision, (0, 1)),
            Unit::Zeta(order, j) => BigComplex::root_of_unity(
                precision,
                order,
                j.rem_euclid(order as i64) as u32,
            )
            .0,
        };
        acc += Complex::with_val(precision, &unit * &amount);
    }
    BigComplex(acc)
}

/// Default working precision for float input.
pub const DEFAULT_PRECISION: u32 = 128;

pub fn parse_document(doc: &InputDocument) -> Result<Generators, InputError> {
    if doc.generators.is_empty() {
        return Err(InputError::Empty);
    }
    let mut terms = Vec::with_capacity(doc.generators.len());
    for (gi, g) in doc.generators.iter().enumerate() {
        let mut gt = Vec::with_capacity(g.len());
        for (ci, text) in g.iter().enumerate() {
            gt.push(parse_coefficient(text).map_err(|reason| InputError::Coefficient {
                generator: gi + 1,
                index: ci,
                text: text.clone(),
                reason,
            })?);
        }
        terms.push(gt);
    }
    let precision = doc.precision.unwrap_or(DEFAULT_PRECISION);
    fn build<S: crate::scalar::Scalar>(
        terms: &[Vec<Vec<Term>>],
        conv: impl Fn(&[Term]) -> S,
    ) -> Result<Vec<Polynomial<S>>, InputError> {
        terms
            .iter()
            .enumerate()
            .map(|(gi, g)| {
                let coeffs: Vec<S> = g.iter().map(|t| conv(t)).collect();
                Polynomial::new(coeffs).map_err(|_| InputError::Degree {
                    generator: gi + 1,
                    degree: 0,
                })
            })
            .collect()
    }
    let gens = match infer(&terms) {
        Inferred::Gaussian => Generators::Gaussian(build(&terms, to_gaussian)?),
        Inferred::Cyclotomic(m) => Generators::Cyclotomic(build(&terms, |t| to_cyclotomic(t, m))?),
        Inferred::Big => Generators::Big(build(&terms, |t| to_big(t, precision))?),
    };
    for (i, d) in gens.degrees().into_iter().enumerate() {
        if d < 2 {
            return Err(InputError::Degree {
                generator: i + 1,
                degree: d,
            });
        }
    }
    Ok(gens)
}

pub fn parse_str(json: &str) -> Result<(InputDocument, Generators), InputError> {
    let doc: InputDocument = serde_json::from_str(json)?;
    let gens = parse_document(&doc)?;
    Ok((doc, gens))
}

/// Coefficient strings that parse back to the same polynomial.
pub fn coefficient_strings<S: crate::scalar::Scalar>(p: &Polynomial<S>) -> Vec<String> {
    p.coeffs().iter().map(|c| c.to_string()).collect()
}
