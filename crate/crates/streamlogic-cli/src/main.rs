//! Command-line front end: every library layer behind one binary.
//!
//! Exit codes: 0 = verdict true / check passed, 1 = verdict false / check
//! failed, 2 = usage or parse error, 3 = internal invariant failure (a
//! budget or agreement defect, never caused by bad input).

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use streamlogic::acceptance::{all_passed, run_all};
use streamlogic::deduction::{check, derivation_from_json, theory_from_json, CheckError};
use streamlogic::filter::{
    any_letter, filter_spec_check, limit_filter, phi_k, psi_nk, psi_p, witness_n, FilterError,
    Predicate,
};
use streamlogic::geometry::{format_theory, geom_sat, theory_to_json, PrintCaps, Valuation};
use streamlogic::ltl::LtlFormula;
use streamlogic::stream::UPStream;
use streamlogic::translation::{
    holds_via_geometry, lasso_budget, t_translate, TranslateError,
};

#[derive(Parser)]
#[command(name = "streamlogic", version, about = "Temporal logic over partial streams")]
struct Cli {
    /// Emit machine-readable JSON instead of plain text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a formula on an ultimately periodic stream.
    Eval {
        /// Formula, e.g. 'G F a'.
        #[arg(short = 'f', long)]
        formula: String,
        /// Stream literal PREFIX|CYCLE, e.g. 'a_|b'.
        #[arg(short = 's', long)]
        stream: String,
    },
    /// Print the smallest fragment containing the formula.
    Classify {
        #[arg(short = 'f', long)]
        formula: String,
    },
    /// Translate a negation-free formula into a geometric theory.
    Translate {
        #[arg(short = 'f', long)]
        formula: String,
        /// How many members of each indexed family to show.
        #[arg(long, default_value_t = PrintCaps::default().depth)]
        depth: usize,
        /// How many disjuncts or sequents to show per node.
        #[arg(long, default_value_t = PrintCaps::default().width)]
        width: usize,
    },
    /// Decide satisfaction both directly and through the translation,
    /// reporting whether the answers agree.
    GeomCheck {
        #[arg(short = 'f', long)]
        formula: String,
        #[arg(short = 's', long)]
        stream: String,
    },
    /// Check a derivation file against a theory file (both JSON).
    Prove {
        /// Derivation to check.
        #[arg(long)]
        check: PathBuf,
        /// Theory whose sequents the Th rule may cite.
        #[arg(long)]
        theory: PathBuf,
    },
    /// Run the stream filter end to end on one predicate and stream.
    FilterDemo {
        /// Predicate table, e.g. 'a=tt,b=ff'.
        #[arg(long)]
        pred: String,
        /// Input stream literal.
        #[arg(long)]
        stream: String,
        /// Largest output length whose witness is tabulated.
        #[arg(long, default_value_t = 4)]
        kmax: usize,
    },
    /// Run the full acceptance suite (STREAMLOGIC_SEED overrides the seed).
    Selftest,
}

/// Usage errors exit 2, internal invariant failures exit 3.
enum CliError {
    Usage(String),
    Internal(String),
}

impl CliError {
    fn report(&self) -> ExitCode {
        match self {
            CliError::Usage(m) => {
                eprintln!("error: {m}");
                ExitCode::from(2)
            }
            CliError::Internal(m) => {
                eprintln!("internal error: {m}");
                ExitCode::from(3)
            }
        }
    }
}

fn usage<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Usage(e.to_string())
}

/// Splits translation failures into bad-input versus broken-invariant.
fn translate_err(e: TranslateError) -> CliError {
    match e {
        TranslateError::NotAGFormula
        | TranslateError::NegationPresent
        | TranslateError::UnsupportedShape => CliError::Usage(e.to_string()),
        TranslateError::BudgetInsufficient { .. } | TranslateError::Geom(_) => {
            CliError::Internal(e.to_string())
        }
    }
}

fn filter_err(e: FilterError) -> CliError {
    match e {
        FilterError::Translate(t) => translate_err(t),
        other => CliError::Usage(other.to_string()),
    }
}

fn parse_formula(text: &str) -> Result<LtlFormula, CliError> {
    LtlFormula::parse(text).map_err(usage)
}

fn parse_stream(text: &str) -> Result<UPStream, CliError> {
    UPStream::parse(text).map_err(usage)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => e.report(),
    }
}

fn run(cli: &Cli) -> Result<ExitCode, CliError> {
    match &cli.command {
        Command::Eval { formula, stream } => {
            let f = parse_formula(formula)?;
            let s = parse_stream(stream)?;
            let verdict = f.evaluate(&s);
            if cli.json {
                println!("{}", json!({ "verdict": verdict }));
            } else {
                println!("{verdict}");
            }
            Ok(verdict_code(verdict))
        }
        Command::Classify { formula } => {
            let f = parse_formula(formula)?;
            let stratum = f.classify();
            if cli.json {
                println!("{}", json!({ "stratum": stratum.to_string() }));
            } else {
                println!("{stratum}");
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Translate { formula, depth, width } => {
            let f = parse_formula(formula)?;
            let theory = t_translate(&f).map_err(translate_err)?;
            let caps = PrintCaps { depth: *depth, width: *width };
            if cli.json {
                println!("{}", theory_to_json(&theory, caps));
            } else {
                println!("{}", format_theory(&theory, caps));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::GeomCheck { formula, stream } => {
            let f = parse_formula(formula)?;
            let s = parse_stream(stream)?;
            let ltl = f.evaluate(&s);
            let geom = holds_via_geometry(&f, &s).map_err(translate_err)?;
            let agree = ltl == geom;
            if cli.json {
                println!("{}", json!({ "ltl": ltl, "geom": geom, "agree": agree }));
            } else {
                println!(
                    "ltl={ltl} geom={geom} {}",
                    if agree { "agree" } else { "disagree" }
                );
            }
            if !agree {
                return Err(CliError::Internal(
                    "translation disagrees with the evaluator".into(),
                ));
            }
            Ok(verdict_code(ltl))
        }
        Command::Prove { check: derivation_path, theory: theory_path } => {
            let derivation = read_json(derivation_path)
                .and_then(|v| derivation_from_json(&v).map_err(CliError::Usage))?;
            let theory = read_json(theory_path)
                .and_then(|v| theory_from_json(&v).map_err(CliError::Usage))?;
            match check(&derivation, &theory) {
                Ok(()) => {
                    if cli.json {
                        println!("{}", json!({ "ok": true }));
                    } else {
                        println!("ok");
                    }
                    Ok(ExitCode::SUCCESS)
                }
                Err(CheckError::Violation(v)) => {
                    if cli.json {
                        println!(
                            "{}",
                            json!({ "ok": false, "path": v.path, "reason": v.reason })
                        );
                    } else {
                        println!("rejected at {:?}: {}", v.path, v.reason);
                    }
                    Ok(ExitCode::from(1))
                }
                Err(other) => Err(CliError::Usage(other.to_string())),
            }
        }
        Command::FilterDemo { pred, stream, kmax } => filter_demo(cli, pred, stream, *kmax),
        Command::Selftest => selftest(cli),
    }
}

fn verdict_code(verdict: bool) -> ExitCode {
    if verdict {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn read_json(path: &PathBuf) -> Result<Value, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn filter_demo(cli: &Cli, pred: &str, stream: &str, kmax: usize) -> Result<ExitCode, CliError> {
    let p = Predicate::parse(pred).map_err(usage)?;
    let s = parse_stream(stream)?;
    let psi = psi_p(&p).map_err(filter_err)?;
    let filtered = limit_filter(&p, &s).map_err(filter_err)?;
    let defined = any_letter(p.alphabet());
    let v_in = Valuation::stream(s.clone());
    let v_out = Valuation::stream(filtered.clone());

    // (k, witness n, hits verdict on the input, defined verdict on the
    // output); no witness leaves the row's verdicts empty.
    type WitnessRow = (usize, Option<usize>, Option<bool>, Option<bool>);
    let mut rows: Vec<WitnessRow> = Vec::new();
    for k in 0..=kmax {
        match witness_n(&s, &psi, k).map_err(filter_err)? {
            None => rows.push((k, None, None, None)),
            Some(n) => {
                let budget = lasso_budget(&s) + n;
                let hits = psi_nk(&psi, n, k).map_err(filter_err)?;
                let keeps = phi_k(&defined, k).map_err(filter_err)?;
                let hits_ok = geom_sat(&v_in, &hits, budget)
                    .map_err(|e| CliError::Internal(e.to_string()))?
                    .is_holds();
                let keeps_ok = geom_sat(&v_out, &keeps, budget)
                    .map_err(|e| CliError::Internal(e.to_string()))?
                    .is_holds();
                rows.push((k, Some(n), Some(hits_ok), Some(keeps_ok)));
            }
        }
    }
    let spec = filter_spec_check(&p, &s, kmax).map_err(filter_err)?;

    if cli.json {
        let table: Vec<Value> = rows
            .iter()
            .map(|(k, n, hits, defined)| {
                json!({ "k": k, "n": n, "hits": hits, "defined": defined })
            })
            .collect();
        println!(
            "{}",
            json!({
                "kept_letter_formula": psi.to_string(),
                "input": s.to_string(),
                "filtered": filtered.to_string(),
                "witnesses": table,
                "spec": spec,
            })
        );
    } else {
        println!("kept-letter formula: {psi}");
        println!("input:    {s}");
        println!("filtered: {filtered}");
        println!("k  n  hits  defined");
        for (k, n, hits, defined) in &rows {
            match n {
                None => println!("{k}  -  -     -"),
                Some(n) => println!(
                    "{k}  {n}  {}  {}",
                    verdict_word(hits.unwrap()),
                    verdict_word(defined.unwrap())
                ),
            }
        }
        println!("spec: {}", if spec { "holds" } else { "fails" });
    }
    Ok(verdict_code(spec))
}

fn verdict_word(v: bool) -> &'static str {
    if v {
        "holds"
    } else {
        "fails"
    }
}

fn selftest(cli: &Cli) -> Result<ExitCode, CliError> {
    let seed = match std::env::var("STREAMLOGIC_SEED") {
        Ok(text) => text
            .parse::<u64>()
            .map_err(|_| CliError::Usage(format!("STREAMLOGIC_SEED must be a u64, got {text:?}")))?,
        Err(_) => 0x5eed,
    };
    let results = run_all(seed);
    let ok = all_passed(&results);
    if cli.json {
        let criteria: Vec<Value> = results
            .iter()
            .map(|r| {
                json!({
                    "id": r.id,
                    "name": r.name,
                    "passed": r.passed,
                    "detail": r.detail,
                    "seconds": r.seconds,
                })
            })
            .collect();
        println!(
            "{}",
            json!({ "seed": seed, "criteria": criteria, "all_passed": ok })
        );
    } else {
        println!("seed {seed:#x}");
        for r in &results {
            println!(
                "criterion {:02} [{}] {}: {} ({:.1}s)",
                r.id,
                if r.passed { "pass" } else { "FAIL" },
                r.name,
                r.detail,
                r.seconds
            );
        }
        println!("{}", if ok { "all criteria passed" } else { "FAILURES" });
    }
    Ok(verdict_code(ok))
}
