//! `polysemi`: command-line front end.
//!
//! Exit codes: 0 yes / success / special family, 1 no / unequal /
//! exhausted search, 2 inconclusive, 3 input error, 4 internal error.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use polysemi_core::bottcher::{bottcher_series_tol, default_tol_for};
use polysemi_core::decide::{decide, DecideError, DecideOptions, Outcome};
use polysemi_core::input::{parse_str, Generators, InputDocument, DEFAULT_PRECISION};
use polysemi_core::normal_forms::{classify, extract_t_power_form, NormalForm};
use polysemi_core::properties::{l0_composition_suite, word_l0_suite};
use polysemi_core::scalar::{default_tolerance, Scalar};
use polysemi_core::with_generators;
use polysemi_core::words::{search_witness, verify_relation, SearchOptions, SearchOutcome, Word, WordError, WordOptions};
use polysemi_dynamics::{
    escape_boundary, julia_inverse_iteration, mme_pullback, render_cloud, write_pgm16, DPoly, GridSpec,
    DEFAULT_PREIMAGE_CAP,
};
use serde_json::json;
use thiserror::Error;

#[derive(Parser)]
#[command(name = "polysemi", version, about = "Relations and ideal intersections in polynomial composition semigroups")]
struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Numeric {
    /// Working precision in bits.
    #[arg(long)]
    precision: Option<u32>,
    /// Truncation order of the Böttcher series.
    #[arg(long)]
    trunc: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether the principal right ideals intersect.
    Decide {
        file: PathBuf,
        #[command(flatten)]
        numeric: Numeric,
        #[arg(long)]
        branch: Option<u32>,
        #[arg(long)]
        max_unity_order: Option<u32>,
    },
    /// Search for words, one ending in each generator, with equal compositions.
    Witness {
        file: PathBuf,
        #[arg(long)]
        max_degree: Option<u128>,
        #[arg(long, default_value_t = 12)]
        max_len: usize,
    },
    /// Check whether two words compose to the same polynomial.
    Verify {
        file: PathBuf,
        /// Letters such as `1,2,2`; the rightmost is applied first.
        #[arg(long)]
        lhs: String,
        #[arg(long)]
        rhs: String,
    },
    /// Print the Böttcher series of one generator.
    Bottcher {
        file: PathBuf,
        #[arg(long, default_value_t = 1)]
        gen: usize,
        #[arg(long, default_value_t = 16)]
        order: usize,
        #[arg(long)]
        precision: Option<u32>,
        #[arg(long, default_value_t = 0)]
        branch: u32,
    },
    /// Special-family and T-power normal forms.
    NormalForm { file: PathBuf },
    /// Sample the Julia set of one generator and write a 16-bit PGM.
    Julia {
        file: PathBuf,
        #[arg(long, default_value_t = 1)]
        gen: usize,
        #[arg(long, alias = "png")]
        out: Option<PathBuf>,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long, default_value_t = 20_000)]
        points: usize,
        #[arg(long, default_value_t = 50)]
        burn_in: usize,
        #[arg(long, default_value_t = 512)]
        size: usize,
        /// Render the boundary of the bounded set by escape time instead.
        #[arg(long)]
        escape: bool,
    },
    /// Pull back a point to approximate the measure of maximal entropy.
    Measure {
        file: PathBuf,
        #[arg(long, default_value_t = 1)]
        gen: usize,
        #[arg(long, default_value_t = 10)]
        depth: u32,
        #[arg(long, default_value_t = 256)]
        size: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long, default_value_t = 0.3)]
        start_re: f64,
        #[arg(long, default_value_t = 0.4)]
        start_im: f64,
    },
    /// Run the order-gap property suites.
    Selftest {
        #[arg(long, default_value_t = 1000)]
        cases: usize,
    },
}

#[derive(Debug, Error)]
#[error("{0}")]
struct InputFailure(String);

#[derive(Debug, Error)]
#[error("internal invariant violated: {0}")]
struct InvariantFailure(String);

fn input_err(e: impl std::fmt::Display) -> anyhow::Error {
    InputFailure(e.to_string()).into()
}

fn load(path: &Path) -> Result<(InputDocument, Generators)> {
    let text = std::fs::read_to_string(path).map_err(|e| input_err(format!("{}: {e}", path.display())))?;
    parse_str(&text).map_err(|e| input_err(format!("{}: {e}", path.display())))
}

fn word_err(e: WordError) -> anyhow::Error {
    match e {
        WordError::Invariant(m) => InvariantFailure(m).into(),
        WordError::DegreeCap { .. } | WordError::Overflow => anyhow!(e),
        other => input_err(other),
    }
}

fn decide_err(e: DecideError) -> anyhow::Error {
    match e {
        DecideError::Input(m) => input_err(m),
        DecideError::Invariant(m) => InvariantFailure(m).into(),
        other => anyhow!(other),
    }
}

fn parse_word(s: &str) -> Result<Word> {
    let letters: Result<Vec<usize>, _> = s
        .trim_matches(|c| c == '[' || c == ']')
        .split(',')
        .map(|t| t.trim().parse::<usize>())
        .collect();
    let letters = letters.map_err(|e| input_err(format!("word {s:?}: {e}")))?;
    if letters.is_empty() || letters.contains(&0) {
        return Err(input_err(format!("word {s:?}: letters start at 1")));
    }
    Ok(Word::new(letters))
}

fn word_options(doc: &InputDocument, seed: Option<u64>) -> WordOptions {
    let mut w = WordOptions::default();
    if let Some(s) = seed.or(doc.seed) {
        w.seed = s;
    }
    w
}

fn emit(value: &serde_json::Value) -> Result<()> {
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(
        File::create(path).with_context(|| format!("cannot create {}", path.display()))?,
    ))
}

fn generator(gens: &Generators, gen: usize) -> Result<DPoly> {
    if gen == 0 || gen > gens.len() {
        return Err(input_err(format!("--gen {gen} is out of range 1..={}", gens.len())));
    }
    let p = with_generators!(gens, |g| DPoly::from_polynomial(&g[gen - 1]));
    p.map_err(input_err)
}

fn run(cli: Cli) -> Result<u8> {
    let seed = cli.seed;
    match cli.command {
        Command::Decide {
            file,
            numeric,
            branch,
            max_unity_order,
        } => {
            let (doc, gens) = load(&file)?;
            let opts = DecideOptions {
                precision: numeric.precision.or(doc.precision).unwrap_or(DEFAULT_PRECISION),
                trunc: numeric.trunc.or(doc.trunc).unwrap_or(64),
                tol: numeric.tol.or(doc.tol),
                max_unity_order: max_unity_order.or(doc.max_unity_order),
                branch: branch.unwrap_or(0),
                word: word_options(&doc, seed),
            };
            let verdict = with_generators!(&gens, |g| decide(g, &opts)).map_err(decide_err)?;
            let mut value = serde_json::to_value(&verdict)?;
            value["field"] = json!(gens.field_name());
            if let Some(name) = &doc.name {
                value["name"] = json!(name);
            }
            emit(&value)?;
            Ok(match verdict.outcome {
                Outcome::Yes | Outcome::SpecialCase(_) => 0,
                Outcome::No => 1,
                Outcome::Inconclusive => 2,
            })
        }
        Command::Witness {
            file,
            max_degree,
            max_len,
        } => {
            let (doc, gens) = load(&file)?;
            let opts = SearchOptions {
                max_degree: max_degree.or(doc.max_degree).unwrap_or(10_000),
                max_word_len: max_len,
                word: word_options(&doc, seed),
            };
            let outcome = with_generators!(&gens, |g| search_witness(g, &opts)).map_err(word_err)?;
            let mut value = serde_json::to_value(&outcome)?;
            let code = match outcome {
                SearchOutcome::Found(_) => 0,
                SearchOutcome::Exhausted { .. } => {
                    value["note"] = json!("search exhausted at cap");
                    1
                }
            };
            emit(&value)?;
            Ok(code)
        }
        Command::Verify { file, lhs, rhs } => {
            let (doc, gens) = load(&file)?;
            let (l, r) = (parse_word(&lhs)?, parse_word(&rhs)?);
            let opts = word_options(&doc, seed);
            let status = with_generators!(&gens, |g| verify_relation(g, &l, &r, &opts)).map_err(word_err)?;
            let mut value = serde_json::to_value(&status)?;
            value["lhs"] = json!(l.to_string());
            value["rhs"] = json!(r.to_string());
            emit(&value)?;
            Ok(if status.holds() { 0 } else { 1 })
        }
        Command::Bottcher {
            file,
            gen,
            order,
            precision,
            branch,
        } => {
            let (doc, gens) = load(&file)?;
            if gen == 0 || gen > gens.len() {
                return Err(input_err(format!("--gen {gen} is out of range 1..={}", gens.len())));
            }
            let precision = precision.or(doc.precision).unwrap_or(DEFAULT_PRECISION);
            let big = gens.to_big(precision);
            let p = &big[gen - 1];
            let tol = doc.tol.unwrap_or_else(|| default_tolerance(precision));
            let bd = bottcher_series_tol(p, order, branch, tol).map_err(|e| anyhow!("bottcher: {e}"))?;
            let coeffs: Vec<String> = bd.psi.coeffs().iter().map(|c| c.to_c64().to_string()).collect();
            emit(&json!({
                "generator": gen,
                "degree": bd.degree(),
                "chart": "w = 1/z",
                "branch": bd.branch_index,
                "psi": coeffs,
                "trunc": bd.psi.trunc_order(),
                "residual": bd.residual,
                "tolerance": bd.tolerance,
            }))?;
            Ok(0)
        }
        Command::NormalForm { file } => {
            let (_, gens) = load(&file)?;
            let report = with_generators!(&gens, |g| {
                let tol = default_tol_for(g[0].kind());
                match classify(g, tol) {
                    NormalForm::None { .. } => extract_t_power_form(g, tol, 1 << 12).report(),
                    found => found.report(),
                }
            });
            emit(&serde_json::to_value(&report)?)?;
            Ok(0)
        }
        Command::Julia {
            file,
            gen,
            out,
            csv,
            points,
            burn_in,
            size,
            escape,
        } => {
            let (doc, gens) = load(&file)?;
            let p = generator(&gens, gen)?;
            let spec = GridSpec::escape_square(&p, size);
            let cloud = if escape {
                escape_boundary(&p, spec, 200)
            } else {
                julia_inverse_iteration(&p, points, burn_in, seed.or(doc.seed).unwrap_or(0))?
            };
            if let Some(path) = &out {
                let img = render_cloud(&cloud, spec);
                write_pgm16(create(path)?, spec.nx, spec.ny, &img)?;
            }
            if let Some(path) = &csv {
                cloud.write_csv(create(path)?)?;
            }
            emit(&json!({
                "generator": gen,
                "points": cloud.len(),
                "source": format!("{:?}", cloud.source),
                "escape_radius": p.escape_radius(),
                "max_modulus": cloud.max_modulus(),
                "bounds": [[spec.lo.re, spec.lo.im], [spec.hi.re, spec.hi.im]],
                "size": [spec.nx, spec.ny],
            }))?;
            Ok(0)
        }
        Command::Measure {
            file,
            gen,
            depth,
            size,
            out,
            csv,
            start_re,
            start_im,
        } => {
            let (doc, gens) = load(&file)?;
            let p = generator(&gens, gen)?;
            let spec = GridSpec::escape_square(&p, size);
            let (grid, rep) = mme_pullback(
                &p,
                depth,
                Complex64::new(start_re, start_im),
                spec,
                DEFAULT_PREIMAGE_CAP,
                seed.or(doc.seed).unwrap_or(0),
            )?;
            if let Some(path) = &out {
                grid.write_pgm(create(path)?)?;
            }
            if let Some(path) = &csv {
                grid.write_csv(create(path)?)?;
            }
            emit(&json!({
                "generator": gen,
                "depth": depth,
                "preimages": rep.preimages,
                "start": [rep.start.re, rep.start.im],
                "rejected_starts": rep.rejected_starts.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
                "outside_fraction": rep.outside,
                "total_mass": grid.total(),
                "bounds": [[spec.lo.re, spec.lo.im], [spec.hi.re, spec.hi.im]],
                "size": [spec.nx, spec.ny],
            }))?;
            Ok(0)
        }
        Command::Selftest { cases } => {
            let s = seed.unwrap_or(0);
            let a = l0_composition_suite(cases, s, 64);
            let b = word_l0_suite(cases.div_ceil(2), s.wrapping_add(1), 4, 6);
            let passed = a.passed() && b.passed();
            emit(&json!({ "passed": passed, "suites": [a, b] }))?;
            if !passed {
                bail!(InvariantFailure("property suite reported violations".into()));
            }
            Ok(0)
        }
    }
}

fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var("POLYSEMI_THREADS") {
        let n: usize = v
            .parse()
            .map_err(|_| input_err(format!("POLYSEMI_THREADS={v:?} is not a number")))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|()| run(cli));
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<InputFailure>().is_some() {
                ExitCode::from(3)
            } else {
                ExitCode::from(4)
            }
        }
    }
}
