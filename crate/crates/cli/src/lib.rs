//! Command-line surface of the `fipp` workbench.
//!
//! [`run`] parses an argument vector, dispatches, prints a text or JSON
//! result and returns the process exit code:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | decided / verified |
//! | 1 | a negative verdict: fails, violated, refuted |
//! | 2 | unknown or budget exhausted |
//! | 64 | usage error |

use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use serde::Serialize;
use serde_json::json;

use fipp::codec::{canon_code, decode_seq, set_of, FinSet, SeqCode};
use fipp::cub::{
    fan_bound, nocont_demo, pi01_bound_search, verify_nocont, FanResult, Fipp2Secure, Fipp3Secure,
    FormulaSecure, NoContinuity, Pi01Budgets, Pi01Result, SecurePrefix,
};
use fipp::fipp::{
    fipp2_check_with, fipp2_threshold, fipp3_check, fipp3_threshold, verify_fipp1_ce, FippReport,
    Strategy, Threshold,
};
use fipp::setfn::{
    asnis_witness_parity, limit_value, probe_as, probe_asnis, stability_point, SetFunction,
    StabilityPoint, StabilityVerdict,
};
use fipp::sigma00::{compile_bar, eval, modulus, parse, Env};
use fipp::streams::{prefix_code, CodeSequence, EvPeriodic, InfiniteSet};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_UNKNOWN: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

/// Codes longer than this many bits are printed as `null`.
const CODE_BITS: u64 = 4096;

#[derive(Debug, Parser)]
#[command(name = "fipp", version, about = "Finitary pigeonhole workbench")]
struct Cli {
    /// Print results as JSON.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Pigeonhole principles over finite colorings.
    #[command(subcommand)]
    Fipp(FippCmd),
    /// Set functions and their stability.
    #[command(subcommand)]
    Setfn(SetfnCmd),
    /// Bounded formulas in one set parameter f.
    #[command(subcommand)]
    Sigma00(SigmaCmd),
    /// Uniform bound searches.
    #[command(subcommand)]
    Cub(CubCmd),
    /// Sequence codes.
    #[command(subcommand)]
    Codec(CodecCmd),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum StrategyArg {
    Enumerate,
    Fan,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Enumerate => Strategy::Enumerate,
            StrategyArg::Fan => Strategy::Fan,
        }
    }
}

#[derive(Debug, Args)]
struct PrincipleArgs {
    /// 2 for monochromatic subsets, 3 for whole color classes.
    #[arg(long, value_parser = clap::value_parser!(u8).range(2..=3))]
    principle: u8,
    /// n: colors are 0..=n.
    #[arg(long)]
    colors: u64,
    /// const:<c>, parity or coloring:<prefix;period>:<n>.
    #[arg(long)]
    setfn: String,
    #[arg(long, value_enum, default_value = "enumerate")]
    strategy: StrategyArg,
    /// Refutation budget for cylinder questions without an exact oracle.
    #[arg(long, default_value_t = 8)]
    budget: u64,
}

#[derive(Debug, Subcommand)]
enum FippCmd {
    /// Verify the FIPP1 counterexample for every k up to --max-k.
    VerifyCe {
        #[arg(long)]
        max_k: u64,
    },
    /// Decide the principle at one k.
    Check {
        #[command(flatten)]
        p: PrincipleArgs,
        #[arg(long)]
        k: u64,
    },
    /// Least k at which the principle holds.
    Threshold {
        #[command(flatten)]
        p: PrincipleArgs,
        #[arg(long)]
        max_k: u64,
    },
}

#[derive(Debug, Subcommand)]
enum SetfnCmd {
    /// F at a finite set.
    Eval {
        #[arg(long)]
        setfn: String,
        /// Elements, e.g. "1,2" or "{1,2}".
        #[arg(long)]
        set: String,
    },
    /// Probe along the canonical chain of an infinite set.
    ProbeAs {
        #[arg(long)]
        setfn: String,
        /// Characteristic function "prefix;period", e.g. ";1,0" for the evens.
        #[arg(long)]
        set: String,
        #[arg(long, default_value_t = 20)]
        depth: u64,
    },
    /// Probe along a weakly convergent sequence.
    ProbeAsnis {
        #[arg(long)]
        setfn: String,
        /// Canonical chain of this set; omit for the parity witness sequence.
        #[arg(long)]
        set: Option<String>,
        #[arg(long, default_value_t = 20)]
        depth: u64,
    },
    /// Search for a stability point.
    StabilityPoint {
        #[arg(long)]
        setfn: String,
        #[arg(long)]
        set: String,
        #[arg(long, default_value_t = 8)]
        budget: u64,
    },
}

#[derive(Debug, Subcommand)]
enum SigmaCmd {
    /// Truth value at an eventually periodic f.
    Eval {
        #[arg(long)]
        formula: String,
        /// "prefix;period".
        #[arg(long)]
        f: String,
        /// Free variable values, name=value.
        #[arg(long = "var", value_parser = parse_binding)]
        vars: Vec<(String, u64)>,
    },
    /// Modulus of continuity for parameters up to z.
    Modulus {
        #[arg(long)]
        formula: String,
        #[arg(long)]
        z: u64,
    },
    /// Bar form threshold; with --f, the values C(f̄m) up to the certified bound.
    CompileBar {
        #[arg(long)]
        formula: String,
        #[arg(long)]
        f: Option<String>,
        #[arg(long = "var", value_parser = parse_binding)]
        vars: Vec<(String, u64)>,
    },
}

#[derive(Debug, Subcommand)]
enum CubCmd {
    /// Uniform bound for a pigeonhole adapter or a formula.
    FanBound {
        /// Pigeonhole adapter: 2 or 3.
        #[arg(long, value_parser = clap::value_parser!(u8).range(2..=3), conflicts_with = "formula")]
        principle: Option<u8>,
        #[arg(long)]
        setfn: Option<String>,
        /// Formula in the variable given by --var-name, secured at the least true x.
        #[arg(long)]
        formula: Option<String>,
        #[arg(long, default_value = "x")]
        var_name: String,
        #[arg(long, default_value_t = 16)]
        x_max: u64,
        #[arg(long)]
        colors: u64,
        #[arg(long)]
        depth: u64,
        #[arg(long, default_value_t = 8)]
        budget: u64,
    },
    /// Budgeted bound search for ∀y (f(y) = 0 → f(x) = 0).
    Pi01Search {
        #[arg(long)]
        x_max: u64,
        #[arg(long)]
        w_max: u64,
        #[arg(long)]
        depth: u64,
        #[arg(long, default_value_t = 1)]
        colors: u64,
    },
    /// The function refuting the candidate bound z.
    NocontDemo {
        #[arg(long)]
        z: u64,
    },
}

#[derive(Debug, Subcommand)]
enum CodecCmd {
    /// Code of a sequence.
    Encode {
        /// e.g. "1,2" or "<1,2>".
        #[arg(long)]
        seq: String,
    },
    /// Sequence of a code.
    Decode {
        #[arg(long)]
        code: String,
    },
}

fn parse_binding(s: &str) -> Result<(String, u64), String> {
    let (k, v) = s.split_once('=').ok_or("expected name=value")?;
    let v = v
        .trim()
        .parse()
        .map_err(|_| format!("{v:?} is not a natural"))?;
    Ok((k.trim().to_string(), v))
}

/// A failure turned into an exit code.
struct Failure {
    code: i32,
    message: String,
}

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: e.to_string(),
    }
}

fn negative(e: impl std::fmt::Display) -> Failure {
    Failure {
        code: EXIT_NEGATIVE,
        message: e.to_string(),
    }
}

/// Result of a subcommand: exit code, JSON value and text rendering.
struct Outcome {
    code: i32,
    json: serde_json::Value,
    text: String,
}

fn outcome(code: i32, json: impl Serialize, text: impl Into<String>) -> Result<Outcome, Failure> {
    Ok(Outcome {
        code,
        json: serde_json::to_value(json).map_err(negative)?,
        text: text.into(),
    })
}

fn setfn(spec: &str) -> Result<SetFunction, Failure> {
    spec.parse().map_err(usage)
}

fn infinite_set(spec: &str) -> Result<InfiniteSet, Failure> {
    spec.parse().map_err(usage)
}

fn ev(spec: &str) -> Result<EvPeriodic, Failure> {
    spec.parse().map_err(usage)
}

fn code_string(l: &SeqCode) -> Option<String> {
    l.value_within(CODE_BITS).map(|v| v.to_string())
}

fn verdict_code(v: &StabilityVerdict) -> i32 {
    match v {
        StabilityVerdict::Stable { .. } => EXIT_OK,
        StabilityVerdict::Violated { .. } => EXIT_NEGATIVE,
        StabilityVerdict::Inconclusive { .. } => EXIT_UNKNOWN,
    }
}

fn threshold_code(t: &Threshold) -> i32 {
    match t {
        Threshold::Least(_) => EXIT_OK,
        _ => EXIT_UNKNOWN,
    }
}

fn fipp_cmd(cmd: FippCmd) -> Result<Outcome, Failure> {
    match cmd {
        FippCmd::VerifyCe { max_k } => {
            let report = verify_fipp1_ce(max_k).map_err(negative)?;
            let mut text = String::from("k  |class0| F  |class1| F\n");
            for pair in report.witnesses.chunks(2) {
                text += &format!(
                    "{:<3}{:>8} {:<3}{:>8} {}\n",
                    pair[0].k, pair[0].card, pair[0].value, pair[1].card, pair[1].value
                );
            }
            text += "every class has |A| <= F(A)";
            outcome(EXIT_OK, &report, text)
        }
        FippCmd::Check { p, k } => {
            let f = setfn(&p.setfn)?;
            let report = if p.principle == 2 {
                let o = fipp2_check_with(p.colors, &f, k, p.strategy.into()).map_err(usage)?;
                FippReport::fipp2(p.colors, &f, k, &o)
            } else {
                let o = fipp3_check(p.colors, &f, k, p.budget).map_err(usage)?;
                FippReport::fipp3(p.colors, &f, k, &o)
            };
            let code = match report.verdict.as_str() {
                "holds" => EXIT_OK,
                "fails" => EXIT_NEGATIVE,
                _ => EXIT_UNKNOWN,
            };
            let text = match &report.counterexample {
                Some(c) => format!("{} at k = {}: coloring {:?}", report.verdict, k, c),
                None => format!(
                    "{} at k = {} ({} witnesses)",
                    report.verdict,
                    k,
                    report.witnesses.len()
                ),
            };
            outcome(code, &report, text)
        }
        FippCmd::Threshold { p, max_k } => {
            let f = setfn(&p.setfn)?;
            let strategy: Strategy = p.strategy.into();
            let t = if p.principle == 2 {
                fipp2_threshold(p.colors, &f, max_k, strategy).map_err(usage)?
            } else {
                fipp3_threshold(p.colors, &f, max_k, p.budget).map_err(usage)?
            };
            let json = json!({
                "principle": format!("FIPP{}", p.principle),
                "n": p.colors,
                "setfn": f.name(),
                "strategy": if p.principle == 2 { json!(strategy) } else { json!("enumerate") },
                "max_k": max_k,
                "threshold": t,
            });
            outcome(threshold_code(&t), json, format!("{t:?}"))
        }
    }
}

fn setfn_cmd(cmd: SetfnCmd) -> Result<Outcome, Failure> {
    match cmd {
        SetfnCmd::Eval { setfn: spec, set } => {
            let f = setfn(&spec)?;
            let a: FinSet = set.parse().map_err(usage)?;
            let value = f.eval_set(&a);
            let json = json!({
                "setfn": f.name(),
                "set": a.elements(),
                "code": code_string(&canon_code(&a)),
                "value": value,
                "big": a.card() as u64 > value,
            });
            outcome(EXIT_OK, json, format!("F({a}) = {value}"))
        }
        SetfnCmd::ProbeAs {
            setfn: spec,
            set,
            depth,
        } => {
            let f = setfn(&spec)?;
            let chain = CodeSequence::canonical(&infinite_set(&set)?);
            let v = probe_as(&f, &chain, depth).map_err(usage)?;
            probe_outcome(&f, &chain, depth, v)
        }
        SetfnCmd::ProbeAsnis {
            setfn: spec,
            set,
            depth,
        } => {
            let f = setfn(&spec)?;
            let seq = match set {
                Some(s) => CodeSequence::canonical(&infinite_set(&s)?),
                None => asnis_witness_parity(),
            };
            let v = probe_asnis(&f, &seq, depth).map_err(usage)?;
            probe_outcome(&f, &seq, depth, v)
        }
        SetfnCmd::StabilityPoint {
            setfn: spec,
            set,
            budget,
        } => {
            let f = setfn(&spec)?;
            let a = infinite_set(&set)?;
            let p = stability_point(&f, &a, budget);
            let limit = limit_value(&f, &a, 2 * budget + 20);
            let json = json!({
                "setfn": f.name(),
                "set": a.chi().to_string(),
                "budget": budget,
                "stability_point": p,
                "limit_value": limit,
            });
            let code = match p {
                StabilityPoint::Point { .. } => EXIT_OK,
                StabilityPoint::NotFoundUpTo { .. } => EXIT_UNKNOWN,
            };
            outcome(code, json, format!("{p:?}"))
        }
    }
}

fn probe_outcome(
    f: &SetFunction,
    seq: &CodeSequence,
    depth: u64,
    v: StabilityVerdict,
) -> Result<Outcome, Failure> {
    let values: Vec<u64> = (0..=depth).map(|m| f.eval(&seq.at(m))).collect();
    let json = json!({
        "setfn": f.name(),
        "sequence": seq.label(),
        "depth": depth,
        "values": values,
        "result": v,
    });
    outcome(verdict_code(&v), json, format!("{v:?}\nvalues {values:?}"))
}

fn env_of(vars: Vec<(String, u64)>) -> Env {
    vars.into_iter().collect()
}

fn sigma_cmd(cmd: SigmaCmd) -> Result<Outcome, Failure> {
    match cmd {
        SigmaCmd::Eval { formula, f, vars } => {
            let phi = parse(&formula).map_err(usage)?;
            let f = ev(&f)?;
            let env = env_of(vars);
            let value = eval(&phi, &env, &f).map_err(usage)?;
            let json =
                json!({"formula": phi.to_string(), "f": f.to_string(), "env": env, "value": value});
            outcome(EXIT_OK, json, value.to_string())
        }
        SigmaCmd::Modulus { formula, z } => {
            let phi = parse(&formula).map_err(usage)?;
            let y = modulus(&phi, z).map_err(usage)?;
            let json = json!({"formula": phi.to_string(), "z": z, "modulus": y});
            outcome(EXIT_OK, json, y.to_string())
        }
        SigmaCmd::CompileBar { formula, f, vars } => {
            let phi = parse(&formula).map_err(usage)?;
            let env = env_of(vars);
            let bar = compile_bar(&phi);
            let bound = bar.certified_bound(&env).map_err(usage)?;
            let mut json = json!({
                "formula": phi.to_string(),
                "threshold": bar.threshold_term().to_string(),
                "threshold_value": bar.threshold_term().eval(&env).map_err(usage)?,
                "certified_bound": bound,
            });
            let mut text = format!(
                "C(a) := lh a >= {} -> A'(a); bound {bound}",
                bar.threshold_term()
            );
            if let Some(f) = f {
                let f = ev(&f)?;
                let cs = (0..=bound)
                    .map(|m| bar.decide(&prefix_code(&f, m), &env))
                    .collect::<Result<Vec<bool>, _>>()
                    .map_err(usage)?;
                let holds = cs.iter().all(|&c| c);
                json["f"] = json!(f.to_string());
                json["c_values"] = json!(cs);
                json["holds"] = json!(holds);
                text += &format!("\nC(f̄m) for m <= {bound}: {cs:?}\nA(f) = {holds}");
            }
            outcome(EXIT_OK, json, text)
        }
    }
}

fn fan_outcome(
    label: String,
    colors: u64,
    depth: u64,
    pred: &dyn SecurePrefix,
) -> Result<Outcome, Failure> {
    let report = fan_bound(pred, depth).map_err(negative)?;
    let code = match report.result {
        FanResult::AllSecured { .. } => EXIT_OK,
        FanResult::BudgetExceeded { .. } => EXIT_UNKNOWN,
    };
    let text = format!("{:?}\n{:?}", report.result, report.telemetry);
    let json = json!({
        "predicate": label,
        "n": colors,
        "depth_budget": depth,
        "result": report.result,
        "telemetry": report.telemetry,
    });
    outcome(code, json, text)
}

fn cub_cmd(cmd: CubCmd) -> Result<Outcome, Failure> {
    match cmd {
        CubCmd::FanBound {
            principle,
            setfn: spec,
            formula,
            var_name,
            x_max,
            colors,
            depth,
            budget,
        } => match (principle, formula) {
            (Some(p), None) => {
                let spec = spec.ok_or_else(|| usage("--principle needs --setfn"))?;
                let f = setfn(&spec)?;
                let label = format!("FIPP{p} {}", f.name());
                if p == 2 {
                    fan_outcome(label, colors, depth, &Fipp2Secure::new(colors, f))
                } else {
                    fan_outcome(label, colors, depth, &Fipp3Secure::new(colors, f, budget))
                }
            }
            (None, Some(text)) => {
                let phi = parse(&text).map_err(usage)?;
                let label = phi.to_string();
                fan_outcome(
                    label,
                    colors,
                    depth,
                    &FormulaSecure::new(phi, &var_name, colors, x_max),
                )
            }
            _ => Err(usage("give exactly one of --principle or --formula")),
        },
        CubCmd::Pi01Search {
            x_max,
            w_max,
            depth,
            colors,
        } => {
            let budgets = Pi01Budgets {
                x_max,
                w_max,
                depth,
            };
            let r = pi01_bound_search(&NoContinuity, colors, budgets);
            let code = match r {
                Pi01Result::Found { .. } => EXIT_OK,
                Pi01Result::Refuted { .. } => EXIT_NEGATIVE,
                Pi01Result::Unknown { .. } => EXIT_UNKNOWN,
            };
            let note = match r {
                Pi01Result::Found { .. } => "budget-relative, not a proof",
                _ => "",
            };
            let json = json!({
                "predicate": "forall y (f(y) = 0 -> f(x) = 0)",
                "n": colors,
                "budgets": budgets,
                "result": r,
                "note": note,
            });
            let text = format!("{r:?} {note}");
            outcome(code, json, text)
        }
        CubCmd::NocontDemo { z } => {
            let f = nocont_demo(z);
            let check = verify_nocont(&f, z);
            let json = json!({"f": f.to_string(), "check": check});
            let code = if check.refutes {
                EXIT_NEGATIVE
            } else {
                EXIT_OK
            };
            let zero = check
                .zero_at
                .map_or("nowhere".to_string(), |y| format!("at y = {y}"));
            let text = format!(
                "f = {f}: least zero {zero}; bound {z} refuted: {}",
                check.refutes
            );
            outcome(code, json, text)
        }
    }
}

fn codec_cmd(cmd: CodecCmd) -> Result<Outcome, Failure> {
    match cmd {
        CodecCmd::Encode { seq } => {
            let l: SeqCode = seq.parse().map_err(usage)?;
            let value = l.value_within(CODE_BITS).ok_or_else(|| {
                negative(format!("the code of {l} has more than {CODE_BITS} bits"))
            })?;
            let json = json!({"seq": l, "code": value.to_string(), "set": set_of(&l).elements()});
            outcome(EXIT_OK, json, value.to_string())
        }
        CodecCmd::Decode { code } => {
            let v: BigUint = code
                .trim()
                .parse()
                .map_err(|_| usage(format!("{code:?} is not a natural")))?;
            let seq = decode_seq(&v).map_err(usage)?;
            let l = SeqCode::from_seq(seq);
            let json = json!({"code": v.to_string(), "seq": l, "set": set_of(&l).elements(), "len": l.len()});
            outcome(EXIT_OK, json, l.to_string())
        }
    }
}

fn dispatch(cli: Cli) -> Result<Outcome, Failure> {
    match cli.command {
        Command::Fipp(c) => fipp_cmd(c),
        Command::Setfn(c) => setfn_cmd(c),
        Command::Sigma00(c) => sigma_cmd(c),
        Command::Cub(c) => cub_cmd(c),
        Command::Codec(c) => codec_cmd(c),
    }
}

/// Thread count from `FIPP_THREADS`, if set to a positive number.
pub fn threads_from_env() -> Option<usize> {
    std::env::var("FIPP_THREADS")
        .ok()?
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
}

/// Runs with the thread count from `FIPP_THREADS`.
pub fn run(argv: &[String], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    run_with_threads(argv, threads_from_env(), out, err)
}

/// Runs on a dedicated pool of `threads` workers (rayon's default when
/// `None`).
pub fn run_with_threads(
    argv: &[String],
    threads: Option<usize>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    let json = cli.json;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let result = match builder.build() {
        Ok(pool) => pool.install(|| dispatch(cli)),
        Err(e) => Err(negative(format!("cannot start worker pool: {e}"))),
    };
    match result {
        Ok(o) => {
            let written = if json {
                serde_json::to_string_pretty(&o.json)
                    .map_err(std::io::Error::other)
                    .and_then(|s| writeln!(out, "{s}"))
            } else {
                writeln!(out, "{}", o.text)
            };
            if written.is_err() {
                return EXIT_NEGATIVE;
            }
            o.code
        }
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}
