//! Command-line front end and the end-to-end solving pipeline.

use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::formula::closure::{decide_by_order, Closure, FormulaId};
use crate::formula::{
    alpha_rename, check_wellformed, delta_bound, increment_bound, nnf, simplify, Diagnostic, Formula, Fresh,
    Logic,
};
use crate::model::{extract_model, TimedLassoModel};
use crate::shift::{guarded_bounds, window, Shifter, Variant};
use crate::syntax::{parse, Span};
use crate::tableau::{export_dot, solve, ChildOrder, Outcome, SolverConfig, Verdict};
use crate::translate::to_gtptlp;

pub const EXIT_SAT: u8 = 10;
pub const EXIT_UNSAT: u8 = 20;
pub const EXIT_EXHAUSTED: u8 = 30;
pub const EXIT_INPUT: u8 = 1;

/// A formula ready for the tableau: the normalised source, the engine
/// formula (translated when bounded), and the interned root `z.phi`.
pub struct Prepared {
    pub source: Formula,
    pub engine: Formula,
    pub closure: Closure,
    pub shifter: Shifter,
    pub root: FormulaId,
    /// Largest time increment a model needs to use.
    pub delta: u64,
}

/// Well-formedness check, renaming, negation normal form, simplification,
/// translation of bounded formulas and interning of the root.
pub fn prepare(f: &Formula, logic: Logic, spans: Option<&[Span]>) -> Result<Prepared, Vec<Diagnostic>> {
    check_wellformed(f, logic, spans)?;
    let source = simplify(&decide_by_order(&nnf(&alpha_rename(f)), true));
    let delta = increment_bound(&source);
    let (engine, variant) = match logic {
        Logic::Tptl => (source.clone(), Variant::Tptl),
        Logic::Tptlbp => {
            let w = window(&guarded_bounds(&source), delta_bound(&source));
            (nnf(&to_gtptlp(&source)), Variant::Gtptlp { window: w })
        }
        Logic::Gtptlp => {
            // Guards are plain constraints here; every offset counts as a bound.
            let offsets: Vec<u64> = source
                .preorder()
                .into_iter()
                .filter_map(|g| match g {
                    Formula::Rel { c, .. } => Some(c.unsigned_abs()),
                    _ => None,
                })
                .collect();
            let w = window(&offsets, delta_bound(&source));
            (source.clone(), Variant::Gtptlp { window: w })
        }
    };
    let z = Fresh::new(engine.all_vars()).make("z");
    let closure = Closure::new();
    let root = closure.intern(&Formula::Freeze(z, engine.clone().into()));
    Ok(Prepared { source, engine, closure, shifter: Shifter::new(variant), root, delta })
}

#[derive(Clone, Debug)]
pub struct Options {
    pub logic: Logic,
    pub delta_override: Option<u64>,
    pub max_nodes: usize,
    pub order: ChildOrder,
    pub threads: usize,
    pub record_tree: bool,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            logic: Logic::Tptlbp,
            delta_override: None,
            max_nodes: 1_000_000,
            order: ChildOrder::Ascending,
            threads: 1,
            record_tree: false,
        }
    }
}

pub struct Report {
    pub prepared: Prepared,
    pub verdict: Verdict,
    pub model: Option<TimedLassoModel>,
}

pub fn check_prepared(prepared: Prepared, opts: &Options) -> Report {
    let cfg = SolverConfig {
        delta: opts.delta_override.unwrap_or(prepared.delta).max(1),
        max_nodes: opts.max_nodes,
        order: opts.order,
        threads: opts.threads.max(1),
        record_tree: opts.record_tree,
    };
    let verdict = solve(&prepared.closure, &prepared.shifter, prepared.root, &cfg);
    let model = match &verdict.outcome {
        Outcome::Sat(w) => Some(extract_model(w, &prepared.closure)),
        _ => None,
    };
    Report { prepared, verdict, model }
}

/// Full pipeline on an already parsed formula.
pub fn check(f: &Formula, opts: &Options) -> Result<Report, Vec<Diagnostic>> {
    Ok(check_prepared(prepare(f, opts.logic, None)?, opts))
}

/// Parses and solves a formula given as text.
pub fn check_text(text: &str, opts: &Options) -> Result<Report, Vec<Diagnostic>> {
    let src = parse(text).map_err(|e| {
        vec![Diagnostic { message: e.to_string(), span: Some(Span { start: e.offset, end: e.offset }) }]
    })?;
    let prepared = prepare(&src.root, opts.logic, Some(&src.spans))?;
    Ok(check_prepared(prepared, opts))
}

#[derive(Parser, Debug)]
#[command(name = "tptl", version, about = "Satisfiability checking for TPTL and bounded TPTL with past")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide satisfiability of the formula in FILE (`-` reads standard input).
    Solve(SolveArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum LogicArg {
    Tptl,
    Tptlbp,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OrderArg {
    AscDelta,
    DescDelta,
}

#[derive(clap::Args, Debug)]
struct SolveArgs {
    file: PathBuf,
    #[arg(long, value_enum, default_value = "tptlbp")]
    logic: LogicArg,
    /// Largest time increment explored by STEP (defaults to the formula's bound).
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    delta: Option<u64>,
    #[arg(long, default_value_t = 1_000_000)]
    max_nodes: usize,
    #[arg(long, value_enum, default_value = "asc-delta")]
    order: OrderArg,
    /// Print the witness model as JSON.
    #[arg(long)]
    model: bool,
    /// Write the explored tableau in Graphviz format.
    #[arg(long, value_name = "PATH")]
    dot: Option<PathBuf>,
    /// Print verdict, statistics and model as a single JSON document.
    #[arg(long)]
    json: bool,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    threads: u64,
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, col)
}

fn report_diagnostics(path: &str, text: &str, diags: &[Diagnostic]) {
    for d in diags {
        match d.span {
            Some(s) => {
                let (line, col) = line_col(text, s.start);
                eprintln!("{path}:{line}:{col}: error: {}", d.message);
                if let Some(src) = text.lines().nth(line - 1) {
                    let width = text[s.start.min(text.len())..s.end.min(text.len())]
                        .lines()
                        .next()
                        .map_or(1, |l| l.chars().count().max(1));
                    eprintln!("  {src}");
                    eprintln!("  {}{}", " ".repeat(col - 1), "^".repeat(width));
                }
            }
            None => eprintln!("{path}: error: {}", d.message),
        }
    }
}

fn read_input(path: &PathBuf) -> std::io::Result<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        std::fs::read_to_string(path)
    }
}

fn solve_cmd(args: SolveArgs) -> u8 {
    let path = args.file.display().to_string();
    let text = match read_input(&args.file) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("{path}: error: {e}");
            return EXIT_INPUT;
        }
    };
    let opts = Options {
        logic: match args.logic {
            LogicArg::Tptl => Logic::Tptl,
            LogicArg::Tptlbp => Logic::Tptlbp,
        },
        delta_override: args.delta,
        max_nodes: args.max_nodes,
        order: match args.order {
            OrderArg::AscDelta => ChildOrder::Ascending,
            OrderArg::DescDelta => ChildOrder::Descending,
        },
        threads: args.threads as usize,
        record_tree: args.dot.is_some(),
    };
    let report = match check_text(&text, &opts) {
        Ok(r) => r,
        Err(diags) => {
            report_diagnostics(&path, &text, &diags);
            return EXIT_INPUT;
        }
    };
    if let (Some(dot), Some(tree)) = (&args.dot, &report.verdict.tree) {
        if let Err(e) = std::fs::write(dot, export_dot(tree, &report.prepared.closure)) {
            eprintln!("{}: error: {e}", dot.display());
            return EXIT_INPUT;
        }
    }
    let (word, code) = match report.verdict.outcome {
        Outcome::Sat(_) => ("SAT", EXIT_SAT),
        Outcome::Unsat => ("UNSAT", EXIT_UNSAT),
        Outcome::Exhausted => ("UNKNOWN", EXIT_EXHAUSTED),
    };
    let model = report.model.as_ref().map(TimedLassoModel::to_json);
    if args.json {
        let doc = json!({
            "verdict": word,
            "stats": report.verdict.stats,
            "model": model,
        });
        println!("{}", serde_json::to_string_pretty(&doc).expect("report serializes"));
    } else {
        println!("{word}");
        if args.model {
            if let Some(m) = model {
                println!("{}", serde_json::to_string_pretty(&m).expect("model serializes"));
            }
        }
    }
    code
}

/// Runs the command line given in `args` (program name first).
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match cli.command {
        Command::Solve(a) => solve_cmd(a),
    }
}

pub fn main() -> ExitCode {
    ExitCode::from(run(std::env::args_os()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn verdict(text: &str, logic: Logic) -> &'static str {
        let opts = Options { logic, ..Options::default() };
        match check_text(text, &opts).unwrap().verdict.outcome {
            Outcome::Sat(_) => "SAT",
            Outcome::Unsat => "UNSAT",
            Outcome::Exhausted => "UNKNOWN",
        }
    }

    #[test]
    fn pipeline_verdicts() {
        assert_eq!(verdict("x. G y. (p -> y <= x + 2)", Logic::Tptl), "SAT");
        assert_eq!(verdict("p & !p", Logic::Tptlbp), "UNSAT");
        assert_eq!(verdict("Y[1] p", Logic::Tptlbp), "UNSAT");
        assert_eq!(verdict("X[2] (p & Y[1] q)", Logic::Tptlbp), "SAT");
    }

    #[test]
    fn diagnostics_carry_spans() {
        let err = check_text("p & x <= 3", &Options::default()).err().unwrap();
        assert!(err[0].message.contains("absolute constraints unsupported"));
        assert_eq!(err[0].span.map(|s| s.start), Some(4));
        assert_eq!(line_col("ab\ncd", 4), (2, 2));
    }
}
