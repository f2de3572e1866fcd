use std::io::{IsTerminal, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use aca_core::aca::evolve;
use aca_core::constructions::{
    construction1_initial, construction1_with, construction2, construction3_initial, construction3_with, ClauseTable,
    CompiledAca, ScatterMap,
};
use aca_core::export::{rule_manifest, trace_json};
use aca_core::render::{render_ascii, RenderOptions};
use aca_core::sequences::{analyze, UpdateSequence};
use aca_core::tm::{builtin, parse_tm, TuringMachine};
use aca_core::verifier::{
    verify_scattered_with, verify_strict_with, BoundFormula, MatchMode, SimulationReport, Verdict, VerifyOptions,
};
use anyhow::{bail, Context, Result};
use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

#[derive(Parser)]
#[command(name = "aca", version, about = "Compile, run and verify asynchronous automata that simulate Turing machines")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write the JSON rule manifest of a compiled machine
    Compile {
        #[command(flatten)]
        rule: RuleArgs,
        /// Number of random neighborhoods added to the test vectors
        #[arg(long, default_value_t = 64)]
        vectors: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Evolve the automaton and print the space-time diagram or trace
    Run {
        #[command(flatten)]
        rule: RuleArgs,
        #[arg(long, default_value = "")]
        input: String,
        #[arg(long, default_value = "quadratic")]
        seq: String,
        #[arg(long)]
        steps: u64,
        #[arg(long, value_enum, default_value_t = Format::Ascii)]
        format: Format,
        /// Cell range `a..b` to draw
        #[arg(long, allow_hyphen_values = true)]
        window: Option<String>,
    },
    /// Check the simulation conditions; exit 0 on PASS, 2 on FAIL, 3 on BUDGET_EXCEEDED
    Verify {
        #[command(flatten)]
        rule: RuleArgs,
        #[command(flatten)]
        budget: BudgetArgs,
        #[arg(long, default_value = "")]
        input: String,
        #[arg(long, default_value = "quadratic")]
        seq: String,
        #[arg(long)]
        tm_steps: usize,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Measure t'_T against the closed-form bound for a range of T
    Bench {
        #[command(flatten)]
        rule: RuleArgs,
        #[command(flatten)]
        budget: BudgetArgs,
        #[arg(long, default_value = "")]
        input: String,
        #[arg(long, default_value = "quadratic")]
        seq: String,
        /// Range `a..b` of machine steps
        #[arg(long, default_value = "1..30")]
        range: String,
    },
    /// Tally a sequence prefix over a window of cells
    Analyze {
        #[arg(long)]
        seq: String,
        #[arg(long, default_value_t = 1000)]
        prefix: u64,
        #[arg(long, allow_hyphen_values = true, default_value = "-10..10")]
        window: String,
        #[arg(long, value_enum, default_value_t = Format::Ascii)]
        format: Format,
    },
}

#[derive(Args)]
struct RuleArgs {
    /// Builtin machine name or path to a machine description
    #[arg(long)]
    tm: String,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=3))]
    construction: u8,
    /// Support gap p for construction 3
    #[arg(long)]
    gap: Option<usize>,
    #[arg(long, value_enum, default_value_t = Table::Guarded)]
    rule: Table,
}

#[derive(Args)]
struct BudgetArgs {
    /// Update budget; defaults to the construction's bound formula
    #[arg(long)]
    budget: Option<u64>,
    /// Multiplier applied to the default budget
    #[arg(long, default_value_t = 1.0)]
    slack: f64,
    #[arg(long = "match", value_enum, default_value_t = Matching::Encoded)]
    matching: Matching,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Ascii,
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Table {
    Guarded,
    Published,
}

#[derive(Clone, Copy, ValueEnum)]
enum Matching {
    Encoded,
    Tape,
}

fn usage_error(msg: &str) -> ! {
    Cli::command().error(clap::error::ErrorKind::ArgumentConflict, msg).exit()
}

fn load_tm(name: &str) -> Result<TuringMachine> {
    if let Some(tm) = builtin(name) {
        return Ok(tm);
    }
    let src = std::fs::read_to_string(name).with_context(|| format!("no builtin machine or file named `{name}`"))?;
    parse_tm(&src).with_context(|| format!("parsing {name}"))
}

struct Setup {
    tm: TuringMachine,
    rule: CompiledAca,
}

impl RuleArgs {
    fn setup(&self) -> Result<Setup> {
        let tm = load_tm(&self.tm)?;
        let table = match self.rule {
            Table::Guarded => ClauseTable::Guarded,
            Table::Published => ClauseTable::AsPublished,
        };
        let rule = match (self.construction, self.gap) {
            (1, None) => construction1_with(&tm, table),
            (2, None) => construction2(&tm),
            (3, Some(p)) => construction3_with(&tm, p, table)?,
            (3, None) => usage_error("construction 3 requires --gap"),
            (_, Some(_)) => usage_error("--gap only applies to construction 3"),
            _ => unreachable!("clap restricts the construction id"),
        };
        Ok(Setup { tm, rule })
    }

    fn formula(&self) -> BoundFormula {
        match self.construction {
            1 => BoundFormula::Quadratic,
            2 => BoundFormula::Sweep,
            _ => BoundFormula::Scattered { p: self.gap.unwrap_or(1) as u64 },
        }
    }
}

fn parse_range(s: &str) -> Result<(i64, i64)> {
    let (a, b) = s.split_once("..").with_context(|| format!("expected a..b, got `{s}`"))?;
    let a: i64 = a.trim().parse().with_context(|| format!("bad range start in `{s}`"))?;
    let b: i64 = b.trim().parse().with_context(|| format!("bad range end in `{s}`"))?;
    if a > b {
        bail!("empty range `{s}`");
    }
    Ok((a, b))
}

fn color_enabled() -> bool {
    std::env::var("ACA_COLOR").map_or(true, |v| v != "0") && std::io::stdout().is_terminal()
}

fn verify(s: &Setup, args: &RuleArgs, b: &BudgetArgs, input: &str, seq: &UpdateSequence, t: usize) -> Result<SimulationReport> {
    let x = s.tm.parse_word(input)?;
    let budget = match b.budget {
        Some(n) => n,
        None => (args.formula().value(t as u64) as f64 * b.slack).ceil() as u64,
    };
    let opts = VerifyOptions {
        mode: match b.matching {
            Matching::Encoded => MatchMode::Encoded,
            Matching::Tape => MatchMode::TapeOnly,
        },
        bound: None,
    };
    Ok(match s.rule.gap() {
        Some(p) => {
            let psi = ScatterMap::arithmetic(p as i64)?;
            verify_scattered_with(&s.tm, &x, &s.rule, &psi, seq, t, budget.max(1), &opts)?
        }
        None => verify_strict_with(&s.tm, &x, &s.rule, seq, t, budget.max(1), &opts)?,
    })
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) if e.downcast_ref::<std::io::Error>().is_some_and(|e| e.kind() == std::io::ErrorKind::BrokenPipe) => {
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let mut out = std::io::stdout().lock();
    match cli.cmd {
        Cmd::Compile { rule, vectors, output } => {
            let s = rule.setup()?;
            let text = serde_json::to_string_pretty(&rule_manifest(&s.rule, vectors))?;
            match output {
                Some(path) => std::fs::write(&path, text + "\n").with_context(|| format!("writing {}", path.display()))?,
                None => writeln!(out, "{text}")?,
            }
        }
        Cmd::Run { rule, input, seq, steps, format, window } => {
            let s = rule.setup()?;
            let seq = UpdateSequence::parse(&seq)?;
            let x = s.tm.parse_word(&input)?;
            let start = match s.rule.gap() {
                Some(p) => construction3_initial(&s.tm, &x, &ScatterMap::arithmetic(p as i64)?)?,
                None => construction1_initial(&s.tm, &x)?,
            };
            let trace = evolve(&start, &s.rule, seq.iter(), steps)?;
            match format {
                Format::Json => writeln!(out, "{}", serde_json::to_string(&trace_json(&s.tm, &trace))?)?,
                Format::Ascii => {
                    let window = match window {
                        Some(w) => parse_range(&w)?,
                        None => {
                            let (lo, hi) = start.window().unwrap_or((0, 0));
                            trace.updates.iter().fold((lo, hi), |(a, b), u| (a.min(u.pos), b.max(u.pos)))
                        }
                    };
                    let opts = RenderOptions { window, color: color_enabled() };
                    write!(out, "{}", render_ascii(&s.tm, &trace, &opts))?;
                }
                Format::Csv => bail!("run supports --format ascii or json"),
            }
        }
        Cmd::Verify { rule, budget, input, seq, tm_steps, format } => {
            let s = rule.setup()?;
            let seq = UpdateSequence::parse(&seq)?;
            let report = verify(&s, &rule, &budget, &input, &seq, tm_steps)?;
            match format {
                Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&report.to_json())?)?,
                _ => {
                    writeln!(out, "{}", report.verdict.label())?;
                    for (t, k) in &report.matches {
                        writeln!(out, "t={t} t'={k}")?;
                    }
                }
            }
            return Ok(ExitCode::from(match report.verdict {
                Verdict::Pass => 0,
                Verdict::Fail(_) => 2,
                Verdict::BudgetExceeded { .. } => 3,
            }));
        }
        Cmd::Bench { rule, budget, input, seq, range } => {
            let s = rule.setup()?;
            let seq_spec = seq;
            let seq = UpdateSequence::parse(&seq_spec)?;
            let (a, b) = parse_range(&range)?;
            if a < 0 {
                bail!("machine steps must be non-negative");
            }
            let rows = (a..=b)
                .into_par_iter()
                .map(|t| verify(&s, &rule, &budget, &input, &seq, t as usize).map(|r| (t, r)))
                .collect::<Result<Vec<_>>>()?;
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["T", "tprime", "bound", "construction", "seq", "ok"])?;
            for (t, r) in rows {
                let tprime = r.tprime(t as usize).map(|k| k.to_string()).unwrap_or_default();
                let bound = rule.formula().value(t as u64);
                let ok = r.verdict.is_pass() && r.tprime(t as usize).is_some_and(|k| k <= bound);
                w.write_record([
                    t.to_string(),
                    tprime,
                    bound.to_string(),
                    rule.construction.to_string(),
                    seq_spec.clone(),
                    ok.to_string(),
                ])?;
            }
            w.flush()?;
        }
        Cmd::Analyze { seq, prefix, window, format } => {
            let seq = UpdateSequence::parse(&seq)?;
            let a = analyze(&seq, prefix, parse_range(&window)?)?;
            match format {
                Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&a)?)?,
                _ => {
                    writeln!(out, "prefix {} window {}..{}", a.prefix_len, a.window.0, a.window.1)?;
                    for (cell, n) in &a.per_cell_counts {
                        writeln!(out, "{cell:>6} {n}")?;
                    }
                    writeln!(out, "min_count {}", a.min_count)?;
                    match a.support_gap {
                        Some(g) => writeln!(out, "support_gap {g}")?,
                        None => writeln!(out, "support_gap -")?,
                    }
                }
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}
