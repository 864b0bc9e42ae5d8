// SPDX-License-Identifier: Apache-2.0

//! `covpovm` command line.
//!
//! Every command writes one JSON report to stdout and a short summary to
//! stderr. Exit codes: 0 completed, 2 invalid input or violated precondition,
//! 3 I/O failure. A completed analysis exits 0 whatever its verdict.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::constructions::{
    build_pic3, build_pic3_unchecked, build_rank1_pic3, build_weyl_heisenberg, default_wh_seed,
    minimal_pic_outcomes, prime_index_obstruction, all_min_outcome_records, Pic3Params, Provenance, WhParams,
};
use crate::error::Error;
use crate::exec::Execution;
use crate::group::{build_group, coset_space, GroupKind, Subgroup};
use crate::io::vector_to_json;
use crate::linalg::{orthogonal_complement, C64};
use crate::povm::{check_pic, operator_span, FalsifierSettings, Povm, PovmJson};
use crate::rep::irreps_of;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "covpovm", version, about = "Covariant quantum observables and pure-state informational completeness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a named observable and write it as POVM JSON.
    Construct(ConstructArgs),
    /// Validate a POVM file and decide IC / PIC.
    Analyze(AnalyzeArgs),
    /// Inspect a finite group: irreps, cosets, prime-index obstruction.
    Group(GroupArgs),
    /// Print known minimal outcome counts of PIC observables.
    Tables(TablesArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Kind {
    Wh,
    Quat3,
    Dihedral3,
    Rank1,
}

#[derive(clap::Args, Debug)]
struct ConstructArgs {
    kind: Kind,
    /// Use the default parameters (flags given explicitly still override).
    #[arg(long = "default")]
    use_default: bool,
    /// Hilbert space dimension (wh).
    #[arg(long, default_value_t = 2)]
    dim: usize,
    #[arg(long, default_value_t = 0)]
    rng_seed: u64,
    #[arg(long)]
    lambda: Option<f64>,
    /// Comma-separated a1,a2,a3.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    alpha: Option<Vec<f64>>,
    /// Comma-separated v1,v2 (real) or re1,im1,re2,im2.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    v: Option<Vec<f64>>,
    /// Phase of the rank-one family, in [0, 2π).
    #[arg(long, default_value_t = 0.0)]
    gamma: f64,
    /// Skip the parameter conditions (the result must still be an observable).
    #[arg(long)]
    bypass_checks: bool,
    #[arg(short = 'o', long = "output")]
    output: PathBuf,
}

#[derive(clap::Args, Debug)]
struct AnalyzeArgs {
    file: PathBuf,
    #[arg(long)]
    pic: bool,
    #[arg(long)]
    ic: bool,
    #[arg(long, default_value_t = 0)]
    rng_seed: u64,
    #[arg(long, default_value_t = 64)]
    falsifier_restarts: usize,
    /// Worker threads for falsifier restarts; 1 runs sequentially.
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(clap::Args, Debug)]
struct GroupArgs {
    /// e.g. quaternion, dihedral8, cyclic:8, cyclic:2xcyclic:4.
    kind: String,
    /// Comma-separated element names of a subgroup H.
    #[arg(long, allow_hyphen_values = true)]
    cosets: Option<String>,
    /// Report the prime-index obstruction for G/H.
    #[arg(long)]
    obstruction: bool,
}

#[derive(clap::Args, Debug)]
struct TablesArgs {
    #[arg(long)]
    dim: Option<usize>,
}

#[derive(Debug, Serialize)]
struct Report {
    command: String,
    inputs: Value,
    verdicts: Value,
    provenance: Option<Provenance>,
    tool_version: &'static str,
}

/// A failed command: exit code plus message.
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure { code: EXIT_INVALID, message: e.to_string() }
    }
}

fn invalid(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_INVALID, message: message.into() }
}

struct Outcome {
    report: Report,
    summary: String,
}

/// Runs the CLI on `args` (including the program name) and returns the exit
/// code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            if e.use_stderr() {
                let _ = write!(stderr, "{}", e.render());
            } else {
                let _ = write!(stdout, "{}", e.render());
            }
            return code;
        }
    };
    let (name, result) = match &cli.command {
        Command::Construct(a) => ("construct", construct(a)),
        Command::Analyze(a) => ("analyze", analyze(a)),
        Command::Group(a) => ("group", group(a)),
        Command::Tables(a) => ("tables", tables(a)),
    };
    match result {
        Ok(out) => {
            let text = serde_json::to_string_pretty(&out.report).expect("report serializes");
            if writeln!(stdout, "{text}").is_err() {
                return EXIT_IO;
            }
            let _ = writeln!(stderr, "{}", out.summary);
            EXIT_OK
        }
        Err(f) => {
            let body = json!({
                "command": name,
                "error": { "exit_code": f.code, "message": f.message },
                "tool_version": env!("CARGO_PKG_VERSION"),
            });
            let _ = writeln!(stdout, "{}", serde_json::to_string_pretty(&body).expect("serializes"));
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}

fn report(command: &str, inputs: Value, verdicts: Value, provenance: Option<Provenance>) -> Report {
    Report {
        command: command.into(),
        inputs,
        verdicts,
        provenance,
        tool_version: env!("CARGO_PKG_VERSION"),
    }
}

fn parse_v(raw: &[f64]) -> Result<[C64; 2], Failure> {
    match raw {
        [a, b] => Ok([C64::new(*a, 0.0), C64::new(*b, 0.0)]),
        [a, b, c, d] => Ok([C64::new(*a, *b), C64::new(*c, *d)]),
        _ => Err(invalid("--v takes 2 real or 4 (re,im,re,im) numbers")),
    }
}

fn parse_alpha(raw: &[f64]) -> Result<[f64; 3], Failure> {
    <[f64; 3]>::try_from(raw).map_err(|_| invalid("--alpha takes exactly 3 numbers"))
}

fn construct(a: &ConstructArgs) -> Result<Outcome, Failure> {
    let (povm, provenance, inputs) = match a.kind {
        Kind::Wh => {
            let seed = default_wh_seed(a.dim, a.rng_seed)?;
            let params = WhParams { d: a.dim, seed, require_ic: true };
            let (povm, _) = build_weyl_heisenberg(&params)?;
            let mut prov = params.provenance();
            prov.parameters["rng_seed"] = json!(a.rng_seed);
            (povm, prov, json!({ "kind": "wh", "dim": a.dim, "rng_seed": a.rng_seed }))
        }
        Kind::Quat3 | Kind::Dihedral3 => {
            let mut p = if a.kind == Kind::Quat3 {
                Pic3Params::default_quaternion()
            } else {
                Pic3Params::default_dihedral()
            };
            if let Some(l) = a.lambda {
                p.lambda = l;
            }
            if let Some(al) = &a.alpha {
                p.alpha = parse_alpha(al)?;
            }
            if let Some(v) = &a.v {
                p.v = parse_v(v)?;
            }
            let obs = if a.bypass_checks { build_pic3_unchecked(&p)? } else { build_pic3(&p)? };
            let kind = if a.kind == Kind::Quat3 { "quat3" } else { "dihedral3" };
            let inputs = json!({
                "kind": kind,
                "lambda": p.lambda,
                "alpha": p.alpha,
                "v": vector_to_json(&p.v),
                "bypass_checks": a.bypass_checks,
            });
            (obs.povm, obs.provenance, inputs)
        }
        Kind::Rank1 => {
            let alpha = match &a.alpha {
                Some(al) => parse_alpha(al)?,
                None => [1.0 / 192f64.sqrt(); 3],
            };
            let obs = build_rank1_pic3(a.gamma, alpha)?;
            (obs.povm, obs.provenance, json!({ "kind": "rank1", "gamma": a.gamma, "alpha": alpha }))
        }
    };
    let validation = povm.validate();
    let mut file = serde_json::to_value(povm.to_json()).expect("serializes");
    file["provenance"] = serde_json::to_value(&provenance).expect("serializes");
    let text = serde_json::to_string_pretty(&file).expect("serializes") + "\n";
    std::fs::write(&a.output, text).map_err(|e| Failure {
        code: EXIT_IO,
        message: format!("cannot write {}: {e}", a.output.display()),
    })?;
    let mut inputs = inputs;
    inputs["output"] = json!(a.output.display().to_string());
    let summary = format!(
        "wrote {} outcomes on C^{} to {}",
        povm.len(),
        povm.dim(),
        a.output.display()
    );
    let verdicts = json!({ "outcomes": povm.len(), "dim": povm.dim(), "validation": validation });
    Ok(Outcome { report: report("construct", inputs, verdicts, Some(provenance)), summary })
}

/// Reads and validates a POVM file. Exit 3 if unreadable, 2 if malformed or
/// not an observable.
pub fn load_povm(path: &Path) -> Result<Povm, (i32, String)> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| (EXIT_IO, format!("cannot read {}: {e}", path.display())))?;
    let json: PovmJson = serde_json::from_str(&text)
        .map_err(|e| (EXIT_INVALID, format!("malformed POVM JSON in {}: {e}", path.display())))?;
    let povm = Povm::from_json(&json).map_err(|e| (EXIT_INVALID, e.to_string()))?;
    let validation = povm.validate();
    if let Some(first) = validation.failures.first() {
        return Err((EXIT_INVALID, format!("invalid POVM: {first}")));
    }
    Ok(povm)
}

fn with_jobs<T: Send>(jobs: Option<usize>, f: impl FnOnce(Execution) -> T + Send) -> Result<T, Failure> {
    match jobs {
        Some(0) => Err(invalid("--jobs must be at least 1")),
        Some(1) => Ok(f(Execution::Sequential)),
        #[cfg(feature = "parallel")]
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| invalid(format!("cannot start {n} worker threads: {e}")))?;
            Ok(pool.install(|| f(Execution::Parallel)))
        }
        _ => Ok(f(Execution::default())),
    }
}

fn analyze(a: &AnalyzeArgs) -> Result<Outcome, Failure> {
    let povm = load_povm(&a.file).map_err(|(code, message)| Failure { code, message })?;
    let (want_ic, want_pic) = if a.ic || a.pic { (a.ic, a.pic) } else { (true, true) };
    if a.falsifier_restarts == 0 {
        return Err(invalid("--falsifier-restarts must be at least 1"));
    }
    let span = operator_span(&povm)?;
    let complement_dim = orthogonal_complement(&span).dim();
    let mut verdicts = json!({
        "outcomes": povm.len(),
        "dim": povm.dim(),
        "validation": povm.validate(),
        "span_dim": span.dim(),
        "complement_dim": complement_dim,
    });
    let mut summary = format!(
        "{} outcomes on C^{}: span {} of {}",
        povm.len(),
        povm.dim(),
        span.dim(),
        povm.dim() * povm.dim()
    );
    if want_ic {
        let ic = span.dim() == povm.dim() * povm.dim();
        verdicts["ic"] = json!(ic);
        summary += &format!(", IC {ic}");
    }
    if want_pic {
        let verdict = with_jobs(a.jobs, |execution| {
            let settings = FalsifierSettings {
                restarts: a.falsifier_restarts,
                seed: a.rng_seed,
                execution,
                ..FalsifierSettings::default()
            };
            check_pic(&povm, &settings)
        })??;
        let vj = verdict.to_json();
        summary += &format!(", {}", serde_json::to_value(vj.status).expect("serializes").as_str().unwrap_or(""));
        verdicts["pic"] = serde_json::to_value(vj).expect("serializes");
    }
    let inputs = json!({
        "file": a.file.display().to_string(),
        "ic": want_ic,
        "pic": want_pic,
        "rng_seed": a.rng_seed,
        "falsifier_restarts": a.falsifier_restarts,
    });
    Ok(Outcome { report: report("analyze", inputs, verdicts, None), summary })
}

fn group(a: &GroupArgs) -> Result<Outcome, Failure> {
    let kind: GroupKind = a.kind.parse()?;
    let g = build_group(&kind)?;
    let irreps = irreps_of(&g)?;
    let irrep_json: Vec<Value> = irreps
        .iter()
        .map(|p| json!({ "name": p.name, "dim": p.dim, "character": vector_to_json(&p.character) }))
        .collect();
    let mut verdicts = json!({
        "order": g.order(),
        "abelian": g.is_abelian(),
        "elements": g.names(),
        "irreps": irrep_json,
    });
    let dims: Vec<String> = irreps.iter().map(|p| p.dim.to_string()).collect();
    let mut summary = format!(
        "{kind}: order {}, {} irreps of dims {}",
        g.order(),
        irreps.len(),
        dims.join(",")
    );
    match (&a.cosets, a.obstruction) {
        (None, true) => return Err(invalid("--obstruction requires --cosets")),
        (None, false) => {}
        (Some(list), obstruction) => {
            let members = list
                .split(',')
                .map(|n| {
                    let n = n.trim();
                    g.index_of(n).ok_or_else(|| invalid(format!("unknown element '{n}' of {kind}")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let h = Subgroup::new(&g, members)?;
            let space = coset_space(&g, &h)?;
            let cosets: Vec<Vec<&str>> = space
                .cosets()
                .iter()
                .map(|c| c.iter().map(|&x| g.name(x)).collect())
                .collect();
            verdicts["cosets"] = json!(cosets);
            summary += &format!("; {} cosets", space.len());
            if obstruction {
                let rep = prime_index_obstruction(&g, &h)?;
                summary += &format!("; {}", rep.conclusion);
                verdicts["obstruction"] = serde_json::to_value(rep).expect("serializes");
            }
        }
    }
    let inputs = json!({ "kind": a.kind, "cosets": a.cosets, "obstruction": a.obstruction });
    Ok(Outcome { report: report("group", inputs, verdicts, None), summary })
}

fn tables(a: &TablesArgs) -> Result<Outcome, Failure> {
    let (verdicts, summary) = match a.dim {
        None => {
            let records = all_min_outcome_records();
            let n = records.len();
            (json!({ "records": records }), format!("{n} tabulated dimensions"))
        }
        Some(d) => match minimal_pic_outcomes(d) {
            Ok(r) => (json!({ "record": r }), format!("d = {d}: {:?}", r.min_outcomes.values())),
            Err(Error::UnknownDimension { d, lower, upper }) => (
                json!({ "record": null, "band": [lower, upper] }),
                format!("d = {d} is not tabulated; minimal count lies in [{lower}, {upper}]"),
            ),
            Err(e) => return Err(e.into()),
        },
    };
    Ok(Outcome {
        report: report("tables", json!({ "dim": a.dim }), verdicts, None),
        summary,
    })
}
