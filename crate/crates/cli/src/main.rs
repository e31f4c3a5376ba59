use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use qact::checks::{
    coaction_checks, fixed_point_checks, freeness_checks, index_checks, index_report, irreps_json, isotypic_checks,
    projectivity_checks, qg_checks, Check,
};
use qact::input::{load, read_json, Loaded};
use qact::report::{InputInfo, Report};
use qact::suite::{run_suite, Suite};
use qact::{examples, CliError, Settings, DEFAULT_ASSERT_TOL, DEFAULT_SEED, DEFAULT_TOL, DEFAULT_TRUNCATION};
use qact_core::galois::{projectivity_witness, verify_witness, ProjectivityWitness};

#[derive(Parser)]
#[command(name = "qact", version, about = "Checks for compact quantum group actions on finite-dimensional algebras")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// JSON file describing a quantum group or an action.
    #[arg(long, visible_alias = "action", global = true, conflicts_with = "example")]
    input: Option<PathBuf>,
    /// Built-in example (see `qact examples`).
    #[arg(long, global = true)]
    example: Option<String>,
    /// Irreducible label; several may be joined with `+` for `index`.
    #[arg(long, global = true)]
    pi: Option<String>,
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Rank cutoff for linear algebra.
    #[arg(long, global = true, env = "QACT_TOL", default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Bound on reported residuals.
    #[arg(long, global = true, default_value_t = DEFAULT_ASSERT_TOL)]
    assert_tol: f64,
    /// Ambient PBW degree for presented quantum groups.
    #[arg(long, global = true)]
    truncation: Option<usize>,
    /// Write the JSON report here.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    /// Print JSON instead of a summary.
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Quantum group checks.
    Qg {
        #[command(subcommand)]
        what: QgCommand,
    },
    /// Action checks.
    Action {
        #[command(subcommand)]
        what: ActionCommand,
    },
    /// Localized Galois maps and saturation.
    Freeness,
    /// Projectivity witnesses for the isotypical components.
    Projectivity {
        /// Write the witness (needs --pi).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-check a stored witness.
    VerifyWitness {
        #[arg(long)]
        witness: PathBuf,
    },
    /// Index of the conditional expectation onto the fixed points of the amplified action.
    Index {
        /// Write the quasi-basis (needs --pi).
        #[arg(long)]
        emit_quasi_basis: Option<PathBuf>,
    },
    /// Run a check suite.
    Suite {
        #[arg(long, default_value = "all")]
        suite: Suite,
        /// Write stage timings here.
        #[arg(long)]
        timings: Option<PathBuf>,
    },
    /// List built-in examples.
    Examples,
}

#[derive(Subcommand)]
enum QgCommand {
    Check,
    Irreps,
}

#[derive(Subcommand)]
enum ActionCommand {
    Verify,
    FixedPoints,
    Isotypic,
}

fn settings(g: &Global) -> Settings {
    Settings { seed: g.seed, tol: g.tol, assert_tol: g.assert_tol, truncation: g.truncation.unwrap_or(DEFAULT_TRUNCATION) }
}

fn loaded(g: &Global, s: &Settings) -> Result<Loaded, CliError> {
    load(g.input.as_deref(), g.example.as_deref(), s, g.truncation.is_some())
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Parse(format!("cannot write {}: {e}", path.display())))
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json serializes");
    s.push('\n');
    s
}

/// Prints (and optionally stores) a report; the exit code reflects its verdict.
fn emit(g: &Global, r: &Report) -> Result<ExitCode, CliError> {
    let text = r.to_json_string();
    if let Some(p) = &g.report {
        write(p, &text)?;
    }
    if g.json {
        print!("{text}");
    } else {
        print!("{}", r.summary());
    }
    Ok(if r.pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn checks_report(g: &Global, l: &Loaded, s: Settings, name: &str, checks: Vec<Check>, verdicts: Value) -> Result<ExitCode, CliError> {
    emit(g, &Report::new(name, InputInfo { source: l.source.clone(), digest: l.digest.clone() }, s, checks, verdicts))
}

fn pi_index(l: &Loaded, g: &Global) -> Result<Option<usize>, CliError> {
    g.pi.as_deref().map(|p| l.group.qg.irrep_index(p).map_err(CliError::from)).transpose()
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    let g = &cli.global;
    let s = settings(g);
    match &cli.command {
        Command::Examples => {
            if g.json {
                print!("{}", pretty(&examples::catalog_json()));
            } else {
                for e in examples::CATALOG {
                    let verdict = if e.expected_free { "free" } else { "not free" };
                    println!("{:<22} {:<9} {}", e.name, verdict, e.summary);
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Qg { what: QgCommand::Check } => {
            let l = loaded(g, &s)?;
            checks_report(g, &l, s, "qg-check", qg_checks(&l.group, &s), json!({}))
        }
        Command::Qg { what: QgCommand::Irreps } => {
            let l = loaded(g, &s)?;
            print!("{}", pretty(&irreps_json(&l.group)));
            Ok(ExitCode::SUCCESS)
        }
        Command::Action { what } => {
            let l = loaded(g, &s)?;
            let c = l.coaction()?;
            let (name, checks) = match what {
                ActionCommand::Verify => ("action-verify", coaction_checks(c, &s)),
                ActionCommand::FixedPoints => ("action-fixed-points", fixed_point_checks(c, &s)),
                ActionCommand::Isotypic => ("action-isotypic", isotypic_checks(c, pi_index(&l, g)?, &s)),
            };
            checks_report(g, &l, s, name, checks, json!({}))
        }
        Command::Freeness => {
            let l = loaded(g, &s)?;
            let c = l.coaction()?;
            let (checks, v) = freeness_checks(&l, c, &s);
            if g.json {
                if let Some(v) = &v {
                    let out = json!({
                        "ellwood": serde_json::to_value(&v.ellwood).unwrap_or(Value::Null),
                        "saturation": serde_json::to_value(&v.saturation).unwrap_or(Value::Null),
                        "agree": v.agree,
                        "free": v.free,
                    });
                    print!("{}", pretty(&out));
                }
                let pass = checks.iter().all(|c| c.pass);
                if let Some(p) = &g.report {
                    let r = Report::new("freeness", InputInfo { source: l.source.clone(), digest: l.digest.clone() }, s, checks, json!({}));
                    write(p, &r.to_json_string())?;
                }
                return Ok(if pass { ExitCode::SUCCESS } else { ExitCode::from(1) });
            }
            let verdicts = v.as_ref().map(qact::checks::verdicts_json).unwrap_or(json!({}));
            checks_report(g, &l, s, "freeness", checks, verdicts)
        }
        Command::Projectivity { out } => {
            let l = loaded(g, &s)?;
            let c = l.coaction()?;
            let pi = pi_index(&l, g)?;
            if let Some(path) = out {
                let pi = pi.ok_or_else(|| CliError::Parse("--out needs --pi".into()))?;
                let w = projectivity_witness(c, pi, s.tol)?;
                write(path, &pretty(&w.to_json()))?;
            }
            checks_report(g, &l, s, "projectivity", projectivity_checks(c, None, pi, &s), json!({}))
        }
        Command::VerifyWitness { witness } => {
            let l = loaded(g, &s)?;
            let c = l.coaction()?;
            let v = read_json(witness)?;
            let w = ProjectivityWitness::from_json(c, &v, s.tol)?;
            let r = verify_witness(c, &w, s.tol)?;
            let check = Check::bounded(
                format!("witness[{}]", w.label),
                r.max_residual(),
                s.assert_tol,
                serde_json::to_value(&r).unwrap_or(Value::Null),
            );
            checks_report(g, &l, s, "verify-witness", vec![check], json!({}))
        }
        Command::Index { emit_quasi_basis } => {
            let l = loaded(g, &s)?;
            let c = l.coaction()?;
            match &g.pi {
                Some(label) => {
                    let (v, pass, qb) = index_report(c, label, &s)?;
                    if let Some(p) = emit_quasi_basis {
                        write(p, &pretty(&qb))?;
                    }
                    if let Some(p) = &g.report {
                        write(p, &pretty(&v))?;
                    }
                    if g.json {
                        print!("{}", pretty(&v));
                    } else {
                        println!(
                            "Index(E_{}) ≈ {} (qdim² = {:.12}, residual {:.3e}): {}",
                            label,
                            v["index_scalar"].as_f64().map_or("non-scalar".into(), |x| format!("{x:.12}")),
                            v["qdim_sq"].as_f64().unwrap_or(f64::NAN),
                            v["residual"].as_f64().unwrap_or(f64::NAN),
                            if pass { "PASS" } else { "FAIL" }
                        );
                    }
                    Ok(if pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
                }
                None => {
                    if emit_quasi_basis.is_some() {
                        return Err(CliError::Parse("--emit-quasi-basis needs --pi".into()));
                    }
                    checks_report(g, &l, s, "index", index_checks(c, None, None, &s), json!({}))
                }
            }
        }
        Command::Suite { suite, timings } => {
            let l = loaded(g, &s)?;
            let (r, t) = run_suite(&l, *suite, &s)?;
            if let Some(p) = timings {
                write(p, &pretty(&serde_json::to_value(&t).unwrap_or(Value::Null)))?;
            }
            emit(g, &r)
        }
    }
}

fn main() -> ExitCode {
    qact_core::fdlin::linalg::sequential();
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("qact: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
