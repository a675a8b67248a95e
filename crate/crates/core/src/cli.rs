//! Command-line front end.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails, 2 for usage
//! and input errors.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::Path;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use serde_json::{json, Value};

use crate::conjecture::{
    conjecture_with, ConjectureOptions, ConjectureStatus, ConjecturedIdentity, GeneratedSequence,
    DEFAULT_MAX_ORDER,
};
use crate::dsl::{self, SpecSource};
use crate::error::Error;
use crate::expansion::{expansion, sum_expansions};
use crate::output::{csv_table, Format, OutputRecord};
use crate::sequences::{eval_range, SequenceSpec};
use crate::verify::{IdentityVerifier, Row};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "fibconv",
    version,
    about = "Exact expand-collect-sum identities for linear recurrences"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "plain")]
    format: Format,

    /// Worker threads for range checks (output is identical for any value).
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    jobs: Option<u16>,

    /// Suppress standard output; the exit code and error stream still report failures.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate a sequence at one index or over a range.
    Eval(EvalArgs),
    /// Print the expansion after `depth - 1` substitutions.
    Expand {
        #[arg(long)]
        spec: String,
        #[arg(long)]
        depth: usize,
    },
    /// Sum the expansions for target index `n` and print the collected weights.
    Collect {
        #[arg(long)]
        spec: String,
        #[arg(long, allow_hyphen_values = true)]
        n: i64,
    },
    /// Check (n-1)F(n) = sum L(k)F(n-k) over a range.
    Verify(VerifyArgs),
    /// Discover and verify the analogous identity for a sequence.
    Conjecture {
        #[arg(long)]
        spec: String,
        #[arg(long)]
        probe_n: i64,
        #[arg(long)]
        verify_to: i64,
        #[arg(long, default_value_t = DEFAULT_MAX_ORDER)]
        max_order: usize,
    },
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[arg(long)]
    spec: String,
    #[arg(
        long,
        allow_hyphen_values = true,
        required_unless_present = "range",
        conflicts_with = "range"
    )]
    n: Option<i64>,
    #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
    range: Option<(i64, i64)>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long, value_parser = parse_range)]
    range: (i64, i64),
    /// Also replay the inductive step at every m with m+1 in range.
    #[arg(long)]
    inductive: bool,
    /// Sequence used in place of F (defaults to builtin:fib).
    #[arg(long)]
    fib_spec: Option<String>,
    /// Sequence used in place of L (defaults to builtin:lucas).
    #[arg(long)]
    lucas_spec: Option<String>,
}

fn parse_range(s: &str) -> Result<(i64, i64), String> {
    let (lo, hi) = s
        .split_once("..")
        .ok_or_else(|| format!("expected LO..HI, got `{s}`"))?;
    let lo = lo
        .trim()
        .parse()
        .map_err(|e| format!("bad range start: {e}"))?;
    let hi = hi
        .trim()
        .parse()
        .map_err(|e| format!("bad range end: {e}"))?;
    if lo > hi {
        return Err(format!("empty range {lo}..{hi}"));
    }
    Ok((lo, hi))
}

/// Everything a run produced; `main` forwards it to the process streams.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn usage(message: impl Into<String>) -> Self {
        let mut stderr = message.into();
        if !stderr.ends_with('\n') {
            stderr.push('\n');
        }
        Self {
            code: EXIT_USAGE,
            stdout: String::new(),
            stderr,
        }
    }
}

/// Resolves `builtin:NAME` or reads and parses a spec file.
pub fn load_spec(arg: &str) -> Result<SequenceSpec, String> {
    if let Some(name) = arg.strip_prefix("builtin:") {
        return match name {
            "fib" | "fibonacci" => Ok(SequenceSpec::fibonacci()),
            "lucas" => Ok(SequenceSpec::lucas()),
            "trib" | "tribonacci" => Ok(SequenceSpec::tribonacci()),
            _ => Err(format!(
                "unknown builtin `{name}` (expected fib, lucas or tribonacci)"
            )),
        };
    }
    let path = Path::new(arg);
    let text = std::fs::read_to_string(path).map_err(|e| format!("{arg}: {e}"))?;
    dsl::parse(&SpecSource::file(path, text)).map_err(|e| format!("{arg}:{e}"))
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Outcome {
                    code: EXIT_OK,
                    stdout: e.to_string(),
                    stderr: String::new(),
                },
                _ => Outcome::usage(e.render().to_string()),
            };
        }
    };
    let jobs = cli.jobs.map(usize::from);
    let result = match &cli.command {
        Command::Eval(args) => eval_cmd(args, cli.format),
        Command::Expand { spec, depth } => expand_cmd(spec, *depth, cli.format),
        Command::Collect { spec, n } => collect_cmd(spec, *n, cli.format),
        Command::Verify(args) => verify_cmd(args, jobs, cli.format),
        Command::Conjecture {
            spec,
            probe_n,
            verify_to,
            max_order,
        } => conjecture_cmd(spec, *probe_n, *verify_to, *max_order, jobs, cli.format),
    };
    match result {
        Ok(mut outcome) => {
            if cli.quiet {
                outcome.stdout.clear();
            }
            outcome
        }
        Err(message) => Outcome::usage(format!("error: {message}")),
    }
}

type CmdResult = Result<Outcome, String>;

fn err(e: Error) -> String {
    e.to_string()
}

fn params(pairs: &[(&str, String)]) -> BTreeMap<String, String> {
    pairs
        .iter()
        .map(|(k, v)| ((*k).to_string(), v.clone()))
        .collect()
}

fn record(
    command: &str,
    parameters: BTreeMap<String, String>,
    results: Value,
    code: i32,
) -> String {
    OutputRecord {
        command: command.to_string(),
        parameters,
        results,
        status: if code == EXIT_OK { "pass" } else { "fail" }.to_string(),
        exit_code: code,
    }
    .to_json()
}

fn ok(stdout: String) -> CmdResult {
    Ok(Outcome {
        code: EXIT_OK,
        stdout,
        stderr: String::new(),
    })
}

fn join(values: &[BigInt]) -> String {
    values
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(" ")
}

fn eval_cmd(args: &EvalArgs, format: Format) -> CmdResult {
    let spec = load_spec(&args.spec)?;
    let (lo, hi, single) = match (args.n, args.range) {
        (Some(n), _) => (n, n, true),
        (None, Some((lo, hi))) => (lo, hi, false),
        (None, None) => unreachable!("clap requires --n or --range"),
    };
    let values = eval_range(&spec, lo, hi).map_err(err)?;
    let stdout = match format {
        Format::Plain if single => format!("{}\n", values[0]),
        Format::Plain => (lo..)
            .zip(&values)
            .map(|(i, v)| format!("{i} {v}\n"))
            .collect(),
        Format::Json => {
            let mut p = vec![("spec", args.spec.clone())];
            if single {
                p.push(("n", lo.to_string()));
            } else {
                p.push(("range", format!("{lo}..{hi}")));
            }
            let rows: Vec<Value> = (lo..)
                .zip(&values)
                .map(|(i, v)| json!({"index": i, "value": v.to_string()}))
                .collect();
            record("eval", params(&p), json!({ "values": rows }), EXIT_OK)
        }
        Format::Csv => csv_table(
            &["index", "value"],
            (lo..)
                .zip(&values)
                .map(|(i, v)| [i.to_string(), v.to_string()]),
        ),
    };
    ok(stdout)
}

fn expand_cmd(spec_arg: &str, depth: usize, format: Format) -> CmdResult {
    let spec = load_spec(spec_arg)?;
    let form = expansion(&spec, depth).map_err(err)?;
    let stdout = match format {
        Format::Plain => format!("E({depth}): {form}\n"),
        Format::Json => {
            let terms: Vec<Value> = form
                .terms()
                .iter()
                .map(|(k, c)| json!({"shift": k, "coefficient": c.to_string()}))
                .collect();
            record(
                "expand",
                params(&[("spec", spec_arg.to_string()), ("depth", depth.to_string())]),
                json!({"depth": depth, "terms": terms}),
                EXIT_OK,
            )
        }
        Format::Csv => csv_table(
            &["shift", "coefficient"],
            form.terms()
                .iter()
                .map(|(k, c)| [k.to_string(), c.to_string()]),
        ),
    };
    ok(stdout)
}

fn collect_cmd(spec_arg: &str, n: i64, format: Format) -> CmdResult {
    let spec = load_spec(spec_arg)?;
    let w = sum_expansions(&spec, n).map_err(err)?;
    let stdout = match format {
        Format::Plain => {
            let mut s = format!(
                "n: {n}\nmultiplicity: {}\nweights: {}\n",
                w.multiplicity(),
                join(w.weights())
            );
            if w.residual().is_empty() {
                s.push_str("residual: none\n");
            } else {
                s.push_str("residual:\n");
                for (k, c) in w.residual() {
                    s.push_str(&format!("shift {k}: {c}\n"));
                }
            }
            s
        }
        Format::Json => {
            let weights: Vec<String> = w.weights().iter().map(ToString::to_string).collect();
            let residual: Vec<Value> = w
                .residual()
                .iter()
                .map(|(k, c)| json!({"shift": k, "coefficient": c.to_string()}))
                .collect();
            record(
                "collect",
                params(&[("spec", spec_arg.to_string()), ("n", n.to_string())]),
                json!({
                    "n": n,
                    "multiplicity": w.multiplicity(),
                    "weights": weights,
                    "residual": residual,
                }),
                EXIT_OK,
            )
        }
        Format::Csv => {
            let weights = w
                .weights()
                .iter()
                .zip(1usize..)
                .map(|(c, k)| ["weight".to_string(), k.to_string(), c.to_string()]);
            let residual = w
                .residual()
                .iter()
                .map(|(k, c)| ["residual".to_string(), k.to_string(), c.to_string()]);
            csv_table(&["kind", "shift", "coefficient"], weights.chain(residual))
        }
    };
    ok(stdout)
}

fn row_line(r: &Row) -> String {
    format!(
        "n={}: S={} (n-1)F={} {}\n",
        r.n,
        r.sum,
        r.scaled,
        if r.passed() { "PASS" } else { "FAIL" }
    )
}

fn verify_cmd(args: &VerifyArgs, jobs: Option<usize>, format: Format) -> CmdResult {
    let (lo, hi) = args.range;
    let fib = args
        .fib_spec
        .as_deref()
        .map_or_else(|| Ok(SequenceSpec::fibonacci()), load_spec)?;
    let lucas = args
        .lucas_spec
        .as_deref()
        .map_or_else(|| Ok(SequenceSpec::lucas()), load_spec)?;
    let verifier = IdentityVerifier::new(fib, lucas).with_jobs(jobs);
    let rows = verifier.rows(lo, hi).map_err(err)?;

    let steps: Vec<(i64, bool)> = if args.inductive {
        (lo.max(4) - 1..hi)
            .map(|m| Ok((m, verifier.inductive_step_check(m)?)))
            .collect::<Result<_, Error>>()
            .map_err(err)?
    } else {
        Vec::new()
    };

    let first_failure = rows.iter().find(|r| !r.passed());
    let failed_step = steps.iter().find(|(_, pass)| !pass);
    let code = if first_failure.is_some() || failed_step.is_some() {
        EXIT_CHECK_FAILED
    } else {
        EXIT_OK
    };

    let mut stderr = String::new();
    if let Some(r) = first_failure {
        stderr.push_str(&format!(
            "first failure at n={}: S={} (n-1)F={} difference={}\n",
            r.n,
            r.sum,
            r.scaled,
            &r.sum - &r.scaled
        ));
        if r.sum == r.scaled {
            stderr.push_str(&format!("S is not (n-1) times F({})\n", r.n));
        }
    }
    if let Some((m, _)) = failed_step {
        stderr.push_str(&format!("inductive step fails at m={m}\n"));
    }

    let step_label = |pass: bool| if pass { "PASS" } else { "FAIL" };
    let stdout = match format {
        Format::Plain => {
            let mut s: String = rows.iter().map(row_line).collect();
            for (m, pass) in &steps {
                s.push_str(&format!("step m={m}: {}\n", step_label(*pass)));
            }
            s
        }
        Format::Json => {
            let rows_json: Vec<Value> = rows
                .iter()
                .map(|r| {
                    json!({
                        "n": r.n,
                        "s": r.sum.to_string(),
                        "scaled": r.scaled.to_string(),
                        "f": r.term.to_string(),
                        "quotient": r.quotient.as_ref().map(ToString::to_string),
                        "pass": r.passed(),
                    })
                })
                .collect();
            let steps_json: Vec<Value> = steps
                .iter()
                .map(|(m, pass)| json!({"m": m, "pass": pass}))
                .collect();
            let failure = first_failure.map(|r| {
                json!({
                    "n": r.n,
                    "s": r.sum.to_string(),
                    "scaled": r.scaled.to_string(),
                    "difference": (&r.sum - &r.scaled).to_string(),
                })
            });
            let mut p = vec![
                ("range", format!("{lo}..{hi}")),
                ("inductive", args.inductive.to_string()),
            ];
            if let Some(f) = &args.fib_spec {
                p.push(("fib_spec", f.clone()));
            }
            if let Some(l) = &args.lucas_spec {
                p.push(("lucas_spec", l.clone()));
            }
            record(
                "verify",
                params(&p),
                json!({"rows": rows_json, "steps": steps_json, "first_failure": failure}),
                code,
            )
        }
        Format::Csv => {
            let identity = rows.iter().map(|r| {
                [
                    "identity".to_string(),
                    r.n.to_string(),
                    r.sum.to_string(),
                    r.scaled.to_string(),
                    step_label(r.passed()).to_string(),
                ]
            });
            let step_rows = steps.iter().map(|(m, pass)| {
                [
                    "step".to_string(),
                    m.to_string(),
                    String::new(),
                    String::new(),
                    step_label(*pass).to_string(),
                ]
            });
            csv_table(
                &["kind", "n", "s", "scaled", "status"],
                identity.chain(step_rows),
            )
        }
    };
    Ok(Outcome {
        code,
        stdout,
        stderr,
    })
}

fn sequence_plain(label: &str, g: &GeneratedSequence) -> String {
    let last = g.start + g.initial.len() as i64 - 1;
    format!(
        "{}; {label}({}..{}) = {}",
        g.recurrence.render(label),
        g.start,
        last,
        join(&g.initial)
    )
}

fn status_text(c: &ConjecturedIdentity) -> String {
    match (&c.status, c.verified_range) {
        (ConjectureStatus::Verified, Some((lo, hi))) => {
            format!("verified for {lo} <= n <= {hi} (finite range only)")
        }
        (ConjectureStatus::Verified, None) => "verified".to_string(),
        (ConjectureStatus::Refuted { n }, _) => format!("refuted at n={n}"),
        (ConjectureStatus::Undetermined { reason }, _) => format!("undetermined: {reason}"),
    }
}

fn conjecture_cmd(
    spec_arg: &str,
    probe_n: i64,
    verify_to: i64,
    max_order: usize,
    jobs: Option<usize>,
    format: Format,
) -> CmdResult {
    let spec = load_spec(spec_arg)?;
    let options = ConjectureOptions { max_order, jobs };
    let c = conjecture_with(&spec, probe_n, verify_to, options).map_err(err)?;
    let code = if c.is_verified() {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    };
    let mut stderr = String::new();
    if let Some(f) = c.report.as_ref().and_then(|r| r.first_failure.as_ref()) {
        stderr.push_str(&format!(
            "first failure at n={}: lhs={} rhs={} difference={}\n",
            f.n,
            f.lhs,
            f.rhs,
            f.difference()
        ));
    }
    let status_word = c.status_word();
    let stdout = match format {
        Format::Plain => {
            let mut s = format!(
                "spec: {}\nidentity: {}\n",
                dsl::format(&spec),
                c.statement()
            );
            if let Some(w) = &c.weights {
                s.push_str(&format!("weights: {}\n", sequence_plain("a", w)));
            }
            for t in &c.residual {
                let label = format!("r{}", t.offset);
                s.push_str(&format!(
                    "residual: {}\n",
                    sequence_plain(&label, &t.coefficients)
                ));
            }
            s.push_str(&format!("status: {}\n", status_text(&c)));
            s
        }
        Format::Json => record(
            "conjecture",
            params(&[
                ("spec", spec_arg.to_string()),
                ("probe_n", probe_n.to_string()),
                ("verify_to", verify_to.to_string()),
                ("max_order", max_order.to_string()),
            ]),
            c.to_json(),
            code,
        ),
        Format::Csv => {
            let mut rows: Vec<[String; 5]> = Vec::new();
            let mut push = |series: &str, g: &GeneratedSequence| {
                for (i, v) in g.initial.iter().enumerate() {
                    rows.push([
                        series.to_string(),
                        "initial".to_string(),
                        (g.start + i as i64).to_string(),
                        v.to_string(),
                        status_word.to_string(),
                    ]);
                }
                for (j, c) in g.recurrence.coeffs.iter().enumerate() {
                    rows.push([
                        series.to_string(),
                        "coefficient".to_string(),
                        (j + 1).to_string(),
                        c.to_string(),
                        status_word.to_string(),
                    ]);
                }
            };
            if let Some(w) = &c.weights {
                push("a", w);
            }
            for t in &c.residual {
                push(&format!("r{}", t.offset), &t.coefficients);
            }
            csv_table(&["series", "kind", "position", "value", "status"], rows)
        }
    };
    Ok(Outcome {
        code,
        stdout,
        stderr,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> Outcome {
        run(std::iter::once("fibconv").chain(args.iter().copied()))
    }

    #[test]
    fn range_parsing() {
        assert_eq!(parse_range("2..6"), Ok((2, 6)));
        assert_eq!(parse_range("-3..-1"), Ok((-3, -1)));
        assert!(parse_range("6..2").is_err());
        assert!(parse_range("6").is_err());
        assert!(parse_range("a..2").is_err());
    }

    #[test]
    fn builtins() {
        assert_eq!(load_spec("builtin:fib").unwrap(), SequenceSpec::fibonacci());
        assert_eq!(load_spec("builtin:lucas").unwrap(), SequenceSpec::lucas());
        assert!(load_spec("builtin:nope").is_err());
        assert!(load_spec("/definitely/not/here.seq").is_err());
    }

    #[test]
    fn usage_errors_exit_two() {
        for args in [
            &["eval", "--spec", "builtin:fib"][..],
            &[
                "eval",
                "--spec",
                "builtin:fib",
                "--n",
                "1",
                "--range",
                "1..2",
            ],
            &["verify", "--range", "2..6", "--bogus"],
            &["frobnicate"],
            &["verify", "--range", "1..6"],
            &["verify", "--range", "2..6", "--jobs", "0"],
        ] {
            let out = run_args(args);
            assert_eq!(out.code, EXIT_USAGE, "{args:?}");
            assert!(out.stdout.is_empty());
            assert!(!out.stderr.is_empty());
        }
    }

    #[test]
    fn help_exits_zero() {
        let out = run_args(&["--help"]);
        assert_eq!(out.code, EXIT_OK);
        assert!(out.stdout.contains("verify"));
    }

    #[test]
    fn quiet_keeps_exit_code() {
        let out = run_args(&["--quiet", "verify", "--range", "2..6"]);
        assert_eq!(out.code, EXIT_OK);
        assert!(out.stdout.is_empty());
    }
}
