//! `necklace`: classify positions, find winning moves, run sweeps and serve
//! the play API.

mod input;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::net::SocketAddr;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use necklace_core::characterizations::{
    closed_form, closed_form_name, in_s_ell, necklace_coverage, p_cn_small, p_nn_n_minus_1,
    p_nn_n_minus_2, p_path, Coverage,
};
use necklace_core::oracle::{Budget, Oracle, BUDGET_ENV};
use necklace_core::reductions::{reduce_pipeline, ReductionKind};
use necklace_core::strategy::{delta_alg, small_delta, two_delta, unit_adjust, winning_move};
use necklace_core::{Error, GameSpec, Outcome, Position};

use input::{PosArgs, SpecArgs};

const EXIT_DISAGREEMENT: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_BUDGET: u8 = 3;

#[derive(Parser)]
#[command(name = "necklace", version, about = "NecklaceNim and SetNim engine")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Outcome of a position: closed form when there is one, else the oracle.
    Classify {
        #[command(flatten)]
        spec: SpecArgs,
        #[command(flatten)]
        pos: PosArgs,
        /// Classify by exhaustive search even when a closed form exists.
        #[arg(long)]
        oracle: bool,
        #[arg(long)]
        json: bool,
    },
    /// Winning move from an N-position, as JSON.
    Move {
        #[command(flatten)]
        spec: SpecArgs,
        #[command(flatten)]
        pos: PosArgs,
        /// Include the algorithm traces.
        #[arg(long)]
        trace: bool,
    },
    /// P-positions with every stack at most `cap`.
    Enumerate {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long)]
        cap: u64,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        #[arg(long)]
        json: bool,
    },
    /// Closed form against the oracle over the box `[0, cap]^n`.
    Verify {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long)]
        cap: u64,
        #[arg(long, value_enum, default_value_t = PredicateName::ClosedForm)]
        predicate: PredicateName,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        /// JSON-lines file for counterexamples.
        #[arg(long, value_name = "FILE")]
        report: Option<PathBuf>,
        /// Check this many random positions instead of the whole box.
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Zero and merge reductions of a position.
    Reduce {
        #[command(flatten)]
        spec: SpecArgs,
        #[command(flatten)]
        pos: PosArgs,
        #[arg(long)]
        json: bool,
    },
    /// Step table of one of the NN(2l,l) algorithms.
    Trace {
        #[command(flatten)]
        spec: SpecArgs,
        #[command(flatten)]
        pos: PosArgs,
        #[arg(long, value_enum)]
        alg: Algorithm,
        #[arg(long)]
        json: bool,
    },
    /// Which NN(n,k) have a closed form.
    Coverage {
        #[arg(long, default_value_t = 12)]
        max_n: usize,
        #[arg(long)]
        json: bool,
    },
    /// Start the HTTP play API.
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: SocketAddr,
        /// Directory for per-session JSON snapshots.
        #[arg(long, value_name = "DIR")]
        snapshots: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PredicateName {
    ClosedForm,
    SEll,
    #[value(name = "nn-n-minus-1")]
    NnNMinus1,
    #[value(name = "nn-n-minus-2")]
    NnNMinus2,
    Path,
    CnSmall,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Algorithm {
    TwoDelta,
    Delta,
    SmallDelta,
}

/// Failure with an exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Resource(_) => EXIT_BUDGET,
            Error::Inconsistent(_) => EXIT_DISAGREEMENT,
            _ => EXIT_USAGE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: e.to_string(),
        }
    }
}

type Run = Result<u8, Failure>;

fn budget() -> Result<Budget, Error> {
    match std::env::var(BUDGET_ENV) {
        Ok(s) => Budget::parse(&s),
        Err(_) => Ok(Budget::default()),
    }
}

fn oracle(spec: &GameSpec) -> Result<Oracle, Error> {
    Ok(Oracle::with_budget(spec.clone(), budget()?))
}

type Predicate = fn(&GameSpec, &Position) -> necklace_core::Result<bool>;

fn predicate(name: PredicateName) -> Predicate {
    match name {
        PredicateName::ClosedForm => |spec, pos| {
            closed_form(spec, pos)?
                .map(|r| r.holds)
                .ok_or_else(|| Error::Domain(format!("no closed form covers {}", spec.family())))
        },
        PredicateName::SEll => |spec, pos| Ok(in_s_ell(spec, pos)?.holds),
        PredicateName::NnNMinus1 => p_nn_n_minus_1,
        PredicateName::NnNMinus2 => p_nn_n_minus_2,
        PredicateName::Path => p_path,
        PredicateName::CnSmall => p_cn_small,
    }
}

fn classify(spec: SpecArgs, pos: PosArgs, force_oracle: bool, as_json: bool) -> Run {
    let (positions, descriptor) = pos.read()?;
    let spec = spec.build(descriptor.as_ref())?;
    let oracle = oracle(&spec)?;
    for p in positions {
        spec.check_position(&p)?;
        let report = if force_oracle { None } else { closed_form(&spec, &p)? };
        let (outcome, source) = match &report {
            Some(r) => (if r.holds { Outcome::P } else { Outcome::N }, "closed_form"),
            None => (oracle.classify(&p)?, "oracle"),
        };
        if as_json {
            println!(
                "{}",
                json!({"pos": p, "outcome": outcome, "source": source, "predicate": report})
            );
        } else {
            match report {
                Some(r) => println!("{outcome} ({r})"),
                None => println!("{outcome} (oracle)"),
            }
        }
    }
    Ok(0)
}

fn best_move(spec: SpecArgs, pos: PosArgs, with_trace: bool) -> Run {
    let (p, descriptor) = pos.read_one()?;
    let spec = spec.build(descriptor.as_ref())?;
    let oracle = oracle(&spec)?;
    let out = match winning_move(&spec, &p, Some(&oracle))? {
        Some(mut m) => {
            if !with_trace {
                m.traces.clear();
            }
            serde_json::to_value(m).map_err(|e| Error::Inconsistent(e.to_string()))?
        }
        None => json!({"outcome": "P", "move": null, "message": "no winning move exists"}),
    };
    println!("{out}");
    Ok(0)
}

fn enumerate(spec: SpecArgs, cap: u64, workers: usize, as_json: bool) -> Run {
    let spec = spec.build(None)?;
    let table = oracle(&spec)?.solve_box_with_workers(cap, workers)?;
    let stdout = std::io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    if as_json {
        table.write_json_lines(&mut out, true)?;
    } else {
        for p in table.p_positions() {
            writeln!(out, "{p}")?;
        }
    }
    out.flush()?;
    eprintln!("{} P-positions", table.p_positions().len());
    Ok(0)
}

/// Report lines `{"pos":[...],"oracle":"P","predicate":"N"}` for every mismatch.
fn disagreements(
    spec: &GameSpec,
    checked: &[(Position, Outcome)],
    pred: Predicate,
) -> Result<Vec<serde_json::Value>, Error> {
    let mut bad = Vec::new();
    for (p, outcome) in checked {
        let holds = pred(spec, p)?;
        if holds != (*outcome == Outcome::P) {
            let said = if holds { Outcome::P } else { Outcome::N };
            bad.push(json!({"pos": p, "oracle": outcome, "predicate": said}));
        }
    }
    Ok(bad)
}

fn verify(
    spec: SpecArgs,
    cap: u64,
    name: PredicateName,
    workers: usize,
    report: Option<PathBuf>,
    samples: Option<usize>,
    seed: u64,
) -> Run {
    let spec = spec.build(None)?;
    let pred = predicate(name);
    // reject predicates that do not apply before any search starts
    pred(&spec, &Position::zeros(spec.n()))?;
    let label = match name {
        PredicateName::ClosedForm => closed_form_name(&spec).unwrap_or("closed form").to_string(),
        other => other.to_possible_value().expect("named").get_name().to_string(),
    };
    let oracle = oracle(&spec)?;
    let started = Instant::now();

    let checked: Vec<(Position, Outcome)> = match samples {
        None => oracle.solve_box_with_workers(cap, workers)?.iter().collect(),
        Some(count) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..count)
                .map(|_| {
                    let p = Position::new((0..spec.n()).map(|_| rng.gen_range(0..=cap)).collect());
                    let o = oracle.classify(&p)?;
                    Ok((p, o))
                })
                .collect::<Result<_, Error>>()?
        }
    };
    let bad = disagreements(&spec, &checked, pred)?;
    if let Some(path) = report {
        let mut f = BufWriter::new(File::create(path)?);
        for line in &bad {
            writeln!(f, "{line}")?;
        }
        f.flush()?;
    }
    for line in bad.iter().take(10) {
        println!("{line}");
    }
    println!(
        "{} cap {cap} vs {label}: {} positions, {} disagreements",
        spec.family(),
        checked.len(),
        bad.len()
    );
    eprintln!("{:.2}s", started.elapsed().as_secs_f64());
    Ok(if bad.is_empty() { 0 } else { EXIT_DISAGREEMENT })
}

fn reduce(spec: SpecArgs, pos: PosArgs, as_json: bool) -> Run {
    let (p, descriptor) = pos.read_one()?;
    let spec = spec.build(descriptor.as_ref())?;
    let pipeline = reduce_pipeline(&spec, &p)?;
    if as_json {
        println!("{}", serde_json::to_string_pretty(&pipeline).expect("serializable"));
        return Ok(0);
    }
    println!("start  {} {p}", spec.family());
    for step in &pipeline.steps {
        let what = match step.kind {
            ReductionKind::Zero if step.removed.is_empty() => "zero   nothing removed".to_string(),
            ReductionKind::Zero => format!("zero   removed {:?}", step.removed),
            ReductionKind::Merge => format!("merge  {:?}", step.merged),
            other => format!("{other:?}"),
        };
        println!("{what}");
        println!("       move sets {:?}", step.move_sets);
    }
    println!("result {} on {} stacks, position {}", pipeline.spec.family(), pipeline.spec.n(), pipeline.position);
    match &pipeline.identified {
        Some((family, order)) => println!("is     {family} with vertex order {order:?}"),
        None => println!("is     no named family"),
    }
    Ok(0)
}

fn trace(spec: SpecArgs, pos: PosArgs, alg: Algorithm, as_json: bool) -> Run {
    let (p, descriptor) = pos.read_one()?;
    if spec.family.is_some() || descriptor.is_some() || spec.spec.is_some() {
        spec.build(descriptor.as_ref())?.check_position(&p)?;
    }
    let (trace, tail) = match alg {
        Algorithm::TwoDelta => {
            let out = two_delta(&p)?;
            let tail = format!("ends at {} with Δ={}, δ={}", out.r, out.delta_sum, out.delta_me);
            (out.trace, tail)
        }
        Algorithm::Delta => {
            let (r, trace) = delta_alg(&p)?;
            (trace, format!("ends at {r}"))
        }
        Algorithm::SmallDelta => {
            let out = small_delta(&p)?;
            let mut tail = format!("ends at {} with δ={}", out.r, out.delta_me);
            if out.delta_me == 1 {
                if let Ok(u) = unit_adjust(&out.r, out.x, out.y) {
                    tail.push_str(&format!("; unit adjustment gives {u}"));
                }
            }
            (out.trace, tail)
        }
    };
    if as_json {
        println!("{}", serde_json::to_string_pretty(&trace).expect("serializable"));
    } else {
        print!("{}", trace.render());
        println!("{tail}");
    }
    Ok(0)
}

fn coverage(max_n: usize, as_json: bool) -> Run {
    if as_json {
        let cells: Vec<_> = (3..=max_n)
            .flat_map(|n| (2..=n).map(move |k| json!({"n": n, "k": k, "coverage": necklace_coverage(n, k)})))
            .collect();
        println!("{}", serde_json::to_string_pretty(&cells).expect("serializable"));
        return Ok(0);
    }
    let width = max_n.to_string().len().max(2);
    let mut header = format!("{:>width$} |", "n\\k");
    for k in 2..=max_n {
        header.push_str(&format!(" {k:>width$}"));
    }
    println!("{header}");
    println!("{}", "-".repeat(header.len()));
    for n in 3..=max_n {
        let mut row = format!("{n:>w$} |", w = width.max(3));
        for k in 2..=n {
            row.push_str(&format!(" {:>width$}", necklace_coverage(n, k).label()));
        }
        println!("{row}");
    }
    println!();
    for c in [Coverage::SEll, Coverage::Anchor, Coverage::SingleSet, Coverage::Open] {
        let text = match c {
            Coverage::SEll => "k = ceil(n/2), S_ell",
            Coverage::Anchor => "ceil(n/2) < k < n, reduced to the anchor game",
            Coverage::SingleSet => "k = n, one move set",
            _ => "open, oracle only",
        };
        println!("{}  {text}", c.label());
    }
    Ok(0)
}

fn serve(addr: SocketAddr, snapshots: Option<PathBuf>) -> Run {
    tracing_subscriber::fmt().with_writer(std::io::stderr).init();
    let mut state = necklace_server::AppState::new().with_budget(budget()?);
    if let Some(dir) = snapshots {
        state = state.with_snapshots(dir)?;
    }
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(necklace_server::serve(addr, state))?;
    Ok(0)
}

fn run(cli: Cli) -> Run {
    match cli.command {
        Command::Classify { spec, pos, oracle, json } => classify(spec, pos, oracle, json),
        Command::Move { spec, pos, trace } => best_move(spec, pos, trace),
        Command::Enumerate { spec, cap, workers, json } => enumerate(spec, cap, workers, json),
        Command::Verify {
            spec,
            cap,
            predicate,
            workers,
            report,
            samples,
            seed,
        } => verify(spec, cap, predicate, workers, report, samples, seed),
        Command::Reduce { spec, pos, json } => reduce(spec, pos, json),
        Command::Trace { spec, pos, alg, json } => trace(spec, pos, alg, json),
        Command::Coverage { max_n, json } => coverage(max_n, json),
        Command::Serve { addr, snapshots } => serve(addr, snapshots),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use necklace_core::Family;

    #[test]
    fn mismatches_become_report_lines() {
        let spec = GameSpec::build(Family::Necklace { n: 4, k: 2 }).unwrap();
        let table = Oracle::new(spec.clone()).solve_box(2).unwrap();
        let checked: Vec<_> = table.iter().collect();
        let always_p: Predicate = |_, _| Ok(true);
        let bad = disagreements(&spec, &checked, always_p).unwrap();
        let n_count = checked.iter().filter(|(_, o)| *o == Outcome::N).count();
        assert_eq!(bad.len(), n_count);
        assert_eq!(bad[0], json!({"pos": [0, 0, 0, 1], "oracle": "N", "predicate": "P"}));
        assert!(disagreements(&spec, &checked, predicate(PredicateName::SEll)).unwrap().is_empty());
    }

    #[test]
    fn predicates_outside_their_domain_are_rejected() {
        let spec = GameSpec::build(Family::Necklace { n: 5, k: 2 }).unwrap();
        let zero = Position::zeros(5);
        for name in [PredicateName::ClosedForm, PredicateName::SEll, PredicateName::Path] {
            assert!(predicate(name)(&spec, &zero).is_err());
        }
    }
}
