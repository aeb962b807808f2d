//! `trifill` command-line front end.
//!
//! Structured results are JSON, written to `--out` or stdout; a one-line
//! human summary goes to stderr unless `--quiet`. Exit status: 0 on success
//! or a confirmed claim, 1 when a claim is not confirmed, 2 on invalid input.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use trifill::formats::{PovmSpec, Sig17, StateSpec};
use trifill::search::{extended_precision_gap, CaseReport, PhiScan, TOOL_VERSION};
use trifill::suites::Suite;
use trifill::{
    average_gap, evaluate, reproduce_case, search_violation, verify_certificate, Error, MeasureId, PaperCase, Party,
    SearchConfig, State, ViolationCertificate,
};

const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Parser)]
#[command(name = "trifill", version, about = "Tripartite entanglement measures and LOCC-monotonicity checks")]
struct Cli {
    /// Write the JSON result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Base seed for search and suites.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Suppress the summary line on stderr.
    #[arg(long, global = true)]
    quiet: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate measures on a state.
    Measure {
        /// State spec: inline JSON or a path to a JSON file.
        #[arg(long)]
        state: String,
        /// Measure ids such as `fill`, `fill^1/2`, `g:BC`, `concurrence:A|BC`.
        #[arg(long = "measure", short = 'm', required = true, num_args = 1..)]
        measures: Vec<String>,
    },
    /// Average gap of a measure under a binary POVM.
    Gap {
        #[arg(long)]
        state: String,
        /// POVM spec: inline JSON or a path to a JSON file.
        #[arg(long)]
        povm: String,
        #[arg(long)]
        measure: String,
        #[arg(long, default_value = "A")]
        party: String,
    },
    /// Recompute one of the published counterexamples.
    Reproduce {
        /// fill_main, g_bc, fill_sqrt or fill_quartic.
        case: String,
        /// Also scan the state phase over [0, pi] in steps of 1e-3.
        #[arg(long)]
        phi_scan: bool,
    },
    /// Search for a monotonicity violation.
    Search {
        #[arg(long)]
        measure: String,
        #[arg(long, default_value = "A")]
        party: String,
        #[arg(long, default_value_t = trifill::search::DEFAULT_RESTARTS)]
        restarts: usize,
        #[arg(long, default_value_t = trifill::search::DEFAULT_MAX_ITERS)]
        max_iters: usize,
        /// Only gaps below this are reported.
        #[arg(long, default_value_t = -1e-6, allow_hyphen_values = true)]
        threshold: f64,
    },
    /// Re-verify a certificate file.
    Verify { certificate: PathBuf },
    /// Run a property suite: identities, monotones, diagonal or violations.
    Suite {
        suite: String,
        #[arg(long)]
        samples: Option<usize>,
    },
}

/// Outcome of a command: the record to emit and whether the claim held.
struct Outcome {
    json: String,
    summary: String,
    confirmed: bool,
}

#[derive(Debug)]
enum Failure {
    /// Malformed input: exit 2.
    Invalid(String),
    /// Well-formed input whose claim does not hold: exit 1, with a record.
    Rejected(Outcome),
}

impl std::fmt::Debug for Outcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.summary)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Invalid(e.to_string())
    }
}

fn to_json<T: Serialize>(v: &T) -> Result<String, Failure> {
    serde_json::to_string_pretty(v).map_err(|e| Failure::Invalid(format!("cannot encode result: {e}")))
}

/// Inline JSON when the argument starts with `{`, otherwise a file path.
fn read_spec(arg: &str) -> Result<String, Failure> {
    if arg.trim_start().starts_with('{') {
        return Ok(arg.to_string());
    }
    fs::read_to_string(arg).map_err(|e| Failure::Invalid(format!("cannot read `{arg}`: {e}")))
}

fn parse_party(s: &str) -> Result<Party, Failure> {
    let p: Party = s.parse()?;
    if p.0 >= 3 {
        return Err(Failure::Invalid(format!("party `{s}` does not exist in a 3-qubit state")));
    }
    Ok(p)
}

/// Measure ids and values in the order requested.
struct ValueMap(Vec<(String, Sig17)>);

impl Serialize for ValueMap {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            m.serialize_entry(k, v)?;
        }
        m.end()
    }
}

fn cmd_measure(state: &str, ids: &[String]) -> Result<Outcome, Failure> {
    let s: State = StateSpec::from_json(&read_spec(state)?)?.build()?;
    let mut values = Vec::with_capacity(ids.len());
    for raw in ids {
        let id: MeasureId = raw.parse()?;
        values.push((raw.clone(), Sig17(evaluate(&id, &s)?)));
    }
    let summary = values.iter().map(|(k, v)| format!("{k} = {:.6}", v.0)).collect::<Vec<_>>().join(", ");
    Ok(Outcome {
        json: to_json(&ValueMap(values))?,
        summary,
        confirmed: true,
    })
}

fn cmd_gap(state: &str, povm: &str, measure: &str, party: &str) -> Result<Outcome, Failure> {
    let s: State = StateSpec::from_json(&read_spec(state)?)?.build()?;
    let povm = PovmSpec::from_json(&read_spec(povm)?)?.build()?;
    let m: MeasureId = measure.parse()?;
    let report = average_gap(&m, &s, &povm, parse_party(party)?)?;
    Ok(Outcome {
        summary: format!("{m} on {party}: gap {:.6e}", report.gap),
        json: to_json(&report)?,
        confirmed: true,
    })
}

#[derive(Serialize)]
struct ScanRecord {
    step: Sig17,
    closest_phi: Sig17,
    closest_gap: Sig17,
    min_phi: Sig17,
    min_gap: Sig17,
    window_runs: Vec<[Sig17; 2]>,
}

impl From<&PhiScan> for ScanRecord {
    fn from(s: &PhiScan) -> Self {
        Self {
            step: Sig17(s.step),
            closest_phi: Sig17(s.closest_phi),
            closest_gap: Sig17(s.closest_gap),
            min_phi: Sig17(s.min_phi),
            min_gap: Sig17(s.min_gap),
            window_runs: s.window_runs.iter().map(|&(a, b)| [Sig17(a), Sig17(b)]).collect(),
        }
    }
}

#[derive(Serialize)]
struct CaseRecord<'a> {
    case: String,
    measure: String,
    phi: Sig17,
    gap: Sig17,
    extended_gap: Sig17,
    paper_value: Sig17,
    window: [Sig17; 2],
    in_window: bool,
    confirmed: bool,
    report: &'a trifill::Report,
    scan: Option<ScanRecord>,
}

fn case_record(r: &CaseReport) -> CaseRecord<'_> {
    CaseRecord {
        case: r.case.to_string(),
        measure: r.case.measure().to_string(),
        phi: Sig17(r.phi),
        gap: Sig17(r.report.gap),
        extended_gap: Sig17(r.extended_gap),
        paper_value: Sig17(r.paper_value),
        window: [Sig17(r.window.0), Sig17(r.window.1)],
        in_window: r.in_window,
        confirmed: r.confirmed(),
        report: &r.report,
        scan: r.scan.as_ref().map(ScanRecord::from),
    }
}

fn cmd_reproduce(case: &str, phi_scan: bool) -> Result<Outcome, Failure> {
    let case: PaperCase = case.parse()?;
    let r = reproduce_case(case, phi_scan)?;
    let mut summary = format!(
        "{case}: gap {:.6e} (double-double {:.6e}), paper {:.1e}, window [{:e}, {:e}]",
        r.report.gap, r.extended_gap, r.paper_value, r.window.0, r.window.1
    );
    if let Some(scan) = &r.scan {
        summary.push_str(&format!(
            "; phase scan: closest phi {:.3} gap {:.3e}, {} in-window run(s)",
            scan.closest_phi,
            scan.closest_gap,
            scan.window_runs.len()
        ));
    }
    summary.push_str(if r.confirmed() { " -> confirmed" } else { " -> NOT confirmed" });
    let out = Outcome {
        json: to_json(&case_record(&r))?,
        summary,
        confirmed: r.confirmed(),
    };
    if out.confirmed {
        Ok(out)
    } else {
        Err(Failure::Rejected(out))
    }
}

#[derive(Serialize)]
struct NoViolation {
    violation: bool,
    measure: String,
    party: String,
    restarts: usize,
    seed: u64,
    best_gap: Sig17,
    best_restart: usize,
    report_threshold: Sig17,
    tool_version: &'static str,
}

fn cmd_search(cfg: SearchConfig) -> Result<Outcome, Failure> {
    let outcome = search_violation(&cfg)?;
    match outcome.certificate {
        Some(cert) => Ok(Outcome {
            summary: format!(
                "{}: violation with gap {:.6e} (restart {}, {} evaluations)",
                cfg.measure, cert.claimed_gap, outcome.best.index, outcome.evaluations
            ),
            json: cert.to_json()?,
            confirmed: true,
        }),
        None => Err(Failure::Rejected(Outcome {
            summary: format!(
                "{}: no violation below {:e}; best gap {:.3e} over {} restarts",
                cfg.measure, cfg.report_threshold, outcome.best.gap, cfg.restarts
            ),
            json: to_json(&NoViolation {
                violation: false,
                measure: cfg.measure.to_string(),
                party: cfg.party.to_string(),
                restarts: cfg.restarts,
                seed: cfg.seed,
                best_gap: Sig17(outcome.best.gap),
                best_restart: outcome.best.index,
                report_threshold: Sig17(cfg.report_threshold),
                tool_version: TOOL_VERSION,
            })?,
            confirmed: false,
        })),
    }
}

#[derive(Serialize)]
struct Verification<'a> {
    accepted: bool,
    claimed_gap: Sig17,
    recomputed_gap: Sig17,
    extended_gap: Option<Sig17>,
    report: Option<&'a trifill::Report>,
}

fn cmd_verify(path: &Path) -> Result<Outcome, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Invalid(format!("cannot read `{}`: {e}", path.display())))?;
    let cert = ViolationCertificate::from_json(&text)?;
    let extended = extended_precision_gap(&cert).ok().filter(|g| g.is_finite()).map(Sig17);
    match verify_certificate(&cert) {
        Ok(report) => Ok(Outcome {
            summary: format!("certificate accepted: gap {:.6e}", report.gap),
            json: to_json(&Verification {
                accepted: true,
                claimed_gap: Sig17(cert.claimed_gap),
                recomputed_gap: Sig17(report.gap),
                extended_gap: extended,
                report: Some(&report),
            })?,
            confirmed: true,
        }),
        Err(Error::CertificateRejected { claimed, recomputed }) => {
            let recomputed_gap = if recomputed.is_finite() { recomputed } else { f64::MAX };
            Err(Failure::Rejected(Outcome {
                summary: format!("certificate rejected: claimed {claimed:.6e}, recomputed {recomputed:.6e}"),
                json: to_json(&Verification {
                    accepted: false,
                    claimed_gap: Sig17(claimed),
                    recomputed_gap: Sig17(recomputed_gap),
                    extended_gap: extended,
                    report: None,
                })?,
                confirmed: false,
            }))
        }
        Err(e) => Err(e.into()),
    }
}

fn cmd_suite(suite: &str, samples: Option<usize>, seed: u64) -> Result<Outcome, Failure> {
    let suite: Suite = suite.parse()?;
    let samples = samples.unwrap_or_else(|| suite.default_samples());
    let report = suite.run(samples, seed)?;
    let failed: Vec<&str> = report.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
    let summary = if failed.is_empty() {
        format!("{suite}: {} checks passed over {} samples", report.checks.len(), report.samples)
    } else {
        format!("{suite}: FAILED {}", failed.join(", "))
    };
    let out = Outcome {
        json: to_json(&report)?,
        summary,
        confirmed: report.passed,
    };
    if out.confirmed {
        Ok(out)
    } else {
        Err(Failure::Rejected(out))
    }
}

fn run(cli: &Cli) -> Result<Outcome, Failure> {
    let seed = cli.seed.unwrap_or(DEFAULT_SEED);
    match &cli.command {
        Command::Measure { state, measures } => cmd_measure(state, measures),
        Command::Gap {
            state,
            povm,
            measure,
            party,
        } => cmd_gap(state, povm, measure, party),
        Command::Reproduce { case, phi_scan } => cmd_reproduce(case, *phi_scan),
        Command::Search {
            measure,
            party,
            restarts,
            max_iters,
            threshold,
        } => {
            let cfg = SearchConfig {
                party: parse_party(party)?,
                restarts: *restarts,
                max_iters_per_restart: *max_iters,
                seed,
                report_threshold: *threshold,
                ..SearchConfig::new(measure.parse()?)
            };
            cfg.validate()?;
            cmd_search(cfg)
        }
        Command::Verify { certificate } => cmd_verify(certificate),
        Command::Suite { suite, samples } => cmd_suite(suite, *samples, seed),
    }
}

fn emit(cli: &Cli, out: &Outcome) -> Result<(), String> {
    match &cli.out {
        Some(path) => fs::write(path, format!("{}\n", out.json)).map_err(|e| format!("cannot write `{}`: {e}", path.display()))?,
        None => {
            let mut stdout = std::io::stdout().lock();
            writeln!(stdout, "{}", out.json).map_err(|e| e.to_string())?;
        }
    }
    if !cli.quiet {
        eprintln!("{}", out.summary);
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let (outcome, code) = match run(&cli) {
        Ok(o) => (o, 0),
        Err(Failure::Rejected(o)) => (o, 1),
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    if let Err(msg) = emit(&cli, &outcome) {
        eprintln!("error: {msg}");
        return ExitCode::from(2);
    }
    debug_assert_eq!(outcome.confirmed, code == 0);
    ExitCode::from(code)
}
