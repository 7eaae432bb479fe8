//! Batch front-end for the rayless library: solving, checking,
//! instantiating, and cross-validating, with machine-readable output.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use rayless::error::{Error, Result};
use rayless::finite;
use rayless::graph::{FiniteGraph, Partition};
use rayless::presentation::{self, Presentation};
use rayless::rank::{self, BaseFamily, DEFAULT_RANK_CEILING};
use rayless::symbolic::{self, SolveConfig, SymbolicPartition};
use rayless::xval;

#[derive(Parser)]
#[command(name = "rayless", version, about = "Unfriendly-partition workbench")]
struct Cli {
    /// Partition file seeding solve-finite, or pinning vertices (by
    /// address) for solve.
    #[arg(long, global = true)]
    seed_partition: Option<PathBuf>,

    /// Largest leaf enumerated exhaustively by the symbolic solver.
    #[arg(long, global = true, default_value_t = 6)]
    max_leaf: usize,

    /// Exception budget per family.
    #[arg(long, global = true, default_value_t = 8)]
    max_exceptions: usize,

    /// Emit machine-readable JSON on stdout.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Find an unfriendly partition of a finite graph by local search.
    SolveFinite {
        graph: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Extend a partial partition so every unfixed vertex is happy.
    Extend {
        graph: PathBuf,
        /// Partition file with the fixed assignments.
        fixed: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Bounded elimination rank of a finite graph.
    Rank {
        graph: PathBuf,
        /// Base family: edgeless, order:<p>, maxdeg:<d>, or all-finite.
        #[arg(long, default_value = "edgeless")]
        base: String,
        /// Separator size bound.
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = DEFAULT_RANK_CEILING)]
        ceiling: usize,
        /// Use the unmemoized reference recursion instead.
        #[arg(long)]
        naive: bool,
    },
    /// Structural rank of a presentation.
    Srank { presentation: PathBuf },
    /// Degree atlas of a presentation, with the class-W verdict.
    Atlas { presentation: PathBuf },
    /// Symbolic unfriendly partition of a presentation.
    Solve {
        presentation: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Verify a symbolic partition position by position.
    Check { presentation: PathBuf, sigma: PathBuf },
    /// Replace omega multiplicities by n and emit the finite graph.
    Instantiate {
        presentation: PathBuf,
        n: u64,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Cross-validate a symbolic partition over a range of n.
    Xval {
        presentation: PathBuf,
        sigma: PathBuf,
        /// Range "1..8" (inclusive) or list "1,3,5".
        #[arg(long, default_value = "1..8")]
        ns: String,
    },
}

fn log_level() -> Result<u8> {
    match std::env::var("WORKBENCH_LOG") {
        Err(_) => Ok(0),
        Ok(v) => match v.as_str() {
            "quiet" => Ok(0),
            "info" => Ok(1),
            "trace" => Ok(2),
            other => Err(Error::Input(format!(
                "WORKBENCH_LOG must be quiet, info, or trace, got {other:?}"
            ))),
        },
    }
}

fn info(level: u8, msg: &str) {
    if level >= 1 {
        eprintln!("[info] {msg}");
    }
}

fn trace(level: u8, msg: &str) {
    if level >= 2 {
        eprintln!("[trace] {msg}");
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path, what: &str) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Input(format!("cannot read {what} file {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Error::Input(format!("malformed {what} in {}: {e}", path.display())))
}

fn emit<T: Serialize>(value: &T, out: Option<&Path>, json: bool, human: &str) -> Result<()> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::Invariant(format!("serialization failed: {e}")))?;
    if let Some(path) = out {
        std::fs::write(path, format!("{text}\n"))
            .map_err(|e| Error::Input(format!("cannot write {}: {e}", path.display())))?;
    }
    if json {
        println!("{text}");
    } else {
        println!("{human}");
    }
    Ok(())
}

fn parse_ns(text: &str) -> Result<Vec<u64>> {
    if let Some((lo, hi)) = text.split_once("..") {
        let lo: u64 = lo
            .trim()
            .parse()
            .map_err(|_| Error::Input(format!("bad range start in {text:?}")))?;
        let hi: u64 = hi
            .trim()
            .parse()
            .map_err(|_| Error::Input(format!("bad range end in {text:?}")))?;
        if hi < lo {
            return Err(Error::Input(format!("empty range {text:?}")));
        }
        return Ok((lo..=hi).collect());
    }
    text.split(',')
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|_| Error::Input(format!("bad n value {s:?} in {text:?}")))
        })
        .collect()
}

fn run(cli: &Cli, level: u8) -> Result<ExitCode> {
    let cfg = SolveConfig { max_leaf: cli.max_leaf, max_exceptions: cli.max_exceptions };
    match &cli.cmd {
        Cmd::SolveFinite { graph, out } => {
            let g: FiniteGraph = read_json(graph, "graph")?;
            let seed: Option<Partition> = match &cli.seed_partition {
                Some(p) => Some(read_json(p, "seed partition")?),
                None => None,
            };
            info(level, &format!("solving graph with {} vertices", g.num_vertices()));
            let (pi, solve_trace) = finite::unfriendly_partition(&g, seed)?;
            trace(level, &format!("{} improvement steps", solve_trace.steps.len()));
            #[derive(Serialize)]
            struct Out {
                partition: Partition,
                trace: rayless::finite::SolveTrace,
            }
            let report = rayless::graph::happiness(&g, &pi, g.vertex_set())?;
            let human = format!(
                "unfriendly partition found in {} flips; cut size {}",
                solve_trace.steps.len(),
                g.cut_size(&pi)?
            );
            assert!(report.unhappy.is_empty());
            emit(&Out { partition: pi, trace: solve_trace }, out.as_deref(), cli.json, &human)?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Extend { graph, fixed, out } => {
            let g: FiniteGraph = read_json(graph, "graph")?;
            let fixed: Partition = read_json(fixed, "fixed partition")?;
            let (pi, solve_trace) = finite::extend_pre_partition(&g, &fixed)?;
            #[derive(Serialize)]
            struct Out {
                partition: Partition,
                trace: rayless::finite::SolveTrace,
            }
            let human = format!(
                "extension found in {} flips; every unfixed vertex happy",
                solve_trace.steps.len()
            );
            emit(&Out { partition: pi, trace: solve_trace }, out.as_deref(), cli.json, &human)?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Rank { graph, base, k, ceiling, naive } => {
            let g: FiniteGraph = read_json(graph, "graph")?;
            let base = BaseFamily::parse(base)?;
            if *naive {
                if g.num_vertices() > *ceiling {
                    return Err(Error::Capacity(format!(
                        "graph has {} vertices, ceiling is {ceiling}",
                        g.num_vertices()
                    )));
                }
                return match rank::naive_bounded_rank(&g, base, *k) {
                    Some(r) => {
                        println!("{r}");
                        Ok(ExitCode::SUCCESS)
                    }
                    None => {
                        eprintln!("no rank with separators of size <= {k}");
                        Ok(ExitCode::from(1))
                    }
                };
            }
            match rank::bounded_rank(&g, base, *k, *ceiling)? {
                Some(result) => {
                    if cli.json {
                        emit(&result, None, true, "")?;
                    } else {
                        println!("{}", result.rank);
                    }
                    Ok(ExitCode::SUCCESS)
                }
                None => {
                    eprintln!("no rank with separators of size <= {k}");
                    Ok(ExitCode::from(1))
                }
            }
        }
        Cmd::Srank { presentation } => {
            let p: Presentation = read_json(presentation, "presentation")?;
            validate(&p)?;
            println!("{}", presentation::structural_rank(&p));
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Atlas { presentation } => {
            let p: Presentation = read_json(presentation, "presentation")?;
            validate(&p)?;
            let atlas = presentation::degree_atlas(&p);
            let in_w = presentation::is_in_w(&p);
            #[derive(Serialize)]
            struct Out {
                atlas: presentation::DegreeAtlas,
                in_w: bool,
                structural_rank: u64,
            }
            let human = format!(
                "{} positions; |V*| = {}; in W: {in_w}; structural rank {}",
                atlas.positions.len(),
                atlas.v_star_size,
                presentation::structural_rank(&p)
            );
            let out = Out { in_w, structural_rank: presentation::structural_rank(&p), atlas };
            emit(&out, None, cli.json, &human)?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Solve { presentation, out } => {
            let p: Presentation = read_json(presentation, "presentation")?;
            let (sigma, state) = match &cli.seed_partition {
                Some(path) => {
                    let fixed: BTreeMap<String, rayless::graph::Side> = {
                        let part: Partition = read_json(path, "seed partition")?;
                        part.iter().map(|(v, s)| (v.to_owned(), s)).collect()
                    };
                    info(level, &format!("{} fixed vertices", fixed.len()));
                    symbolic::solve_pre_partition(&p, &fixed, &cfg)?
                }
                None => symbolic::solve_unfriendly(&p, &cfg)?,
            };
            #[derive(Serialize)]
            struct Out {
                sigma: SymbolicPartition,
                state: symbolic::SolverState,
            }
            let human = format!(
                "solved: |S0| = {}, |S1| = {}, exceptions used: {}",
                state.s0.len(),
                state.s1.len(),
                state.exceptions_used
            );
            // The partition alone goes to the output file so it can feed
            // check and xval directly.
            if let Some(path) = out {
                let text = serde_json::to_string_pretty(&sigma)
                    .map_err(|e| Error::Invariant(format!("serialization failed: {e}")))?;
                std::fs::write(path, format!("{text}\n"))
                    .map_err(|e| Error::Input(format!("cannot write {}: {e}", path.display())))?;
            }
            emit(&Out { sigma, state }, None, cli.json, &human)?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Check { presentation, sigma } => {
            let p: Presentation = read_json(presentation, "presentation")?;
            validate(&p)?;
            let sigma: SymbolicPartition = read_json(sigma, "partition")?;
            let report = symbolic::check_symbolic(&p, &sigma)?;
            let human = if report.all_happy() {
                format!("all {} positions happy", report.positions_checked)
            } else {
                let names: Vec<&str> =
                    report.unhappy.iter().map(|u| u.position.as_str()).collect();
                format!("unhappy positions: {}", names.join(", "))
            };
            let happy = report.all_happy();
            emit(&report, None, cli.json, &human)?;
            Ok(if happy { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Cmd::Instantiate { presentation, n, out } => {
            let p: Presentation = read_json(presentation, "presentation")?;
            validate(&p)?;
            let (g, _) = presentation::instantiate(&p, *n)?;
            let human =
                format!("instantiated at n={n}: {} vertices, {} edges", g.num_vertices(), g.num_edges());
            emit(&g, out.as_deref(), cli.json, &human)?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Xval { presentation, sigma, ns } => {
            let p: Presentation = read_json(presentation, "presentation")?;
            validate(&p)?;
            let sigma: SymbolicPartition = read_json(sigma, "partition")?;
            let ns = parse_ns(ns)?;
            info(level, &format!("cross-validating over {} values of n", ns.len()));
            let report = xval::cross_validate(&p, &sigma, &ns)?;
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            let human = if report.passed {
                format!("pass: {} positions over n in {ns:?}", report.verdicts.len())
            } else {
                format!("FAIL: {}", report.failures.join("; "))
            };
            let passed = report.passed;
            emit(&report, None, cli.json, &human)?;
            Ok(if passed { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
    }
}

fn validate(p: &Presentation) -> Result<()> {
    let diags = presentation::validate(p);
    if diags.is_empty() {
        Ok(())
    } else {
        Err(Error::Input(format!("invalid presentation: {}", diags.join("; "))))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match log_level() {
        Ok(l) => l,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match run(&cli, level) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
