//! Command-line front end: build decompositions, verify files, run the
//! exhaustive oracle, and check feasibility.
//!
//! Exit codes: 0 success, 1 hypotheses or feasibility rejection, 2
//! verification or internal transform failure, 3 usage or parse error.

use clap::{Args, Parser, Subcommand};
use evencycles::builders::{
    check_feasibility, decompose_bipartite, decompose_hole, decompose_multipartite, BuildCtx,
    BuildOptions, FeasibilityVerdict,
};
use evencycles::error::Error;
use evencycles::model::format::{parse_claim, parse_host_tokens, write_packing};
use evencycles::model::{Cycle, Edge, HostGraph, LengthList, Packing};
use evencycles::oracle::{brute_force_decompose, verify, BruteForceResult};
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

#[derive(Parser)]
#[command(
    name = "evencycles",
    about = "Cycle decompositions of complete bipartite and multipartite graphs",
    version
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build a decomposition.
    Decompose {
        #[command(subcommand)]
        what: DecomposeCmd,
    },
    /// Verify a decomposition file.
    Verify {
        /// Input decomposition file.
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Exhaustive search on hosts of at most 40 edges.
    Oracle {
        /// Host spec, e.g. "bipartite 4 4", "bipartite-minus-matching 5",
        /// "hole 9 5", "multipartite 4,4,4".
        #[arg(long)]
        host: String,
        /// Cycle lengths; LxN means N copies of L (e.g. 4x7,8).
        #[arg(long)]
        lengths: String,
    },
    /// Print the feasibility verdict for a host and length list.
    Check {
        #[arg(long)]
        host: String,
        #[arg(long)]
        lengths: String,
    },
}

#[derive(Subcommand)]
enum DecomposeCmd {
    /// Complete bipartite host (equal odd parts need --minus-matching).
    Bipartite {
        #[arg(long)]
        a: usize,
        #[arg(long)]
        b: usize,
        /// Decompose the graph minus a perfect matching (equal odd parts).
        #[arg(long)]
        minus_matching: bool,
        /// Cycle lengths; LxN means N copies of L (e.g. 4x7,8).
        #[arg(long)]
        lengths: String,
        #[command(flatten)]
        common: Common,
    },
    /// Complete graph of order v minus a clique of order u.
    Hole {
        #[arg(long)]
        v: usize,
        #[arg(long)]
        u: usize,
        /// Uniform cycle length.
        #[arg(long)]
        m: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Complete multipartite host with the given part sizes.
    Multipartite {
        /// Comma-separated part sizes, e.g. 6,6,6.
        #[arg(long)]
        parts: String,
        /// Uniform cycle length.
        #[arg(long)]
        m: usize,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    /// Seed for search fallbacks and randomized choices.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the decomposition here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Log one line per applied operation to stderr.
    #[arg(long)]
    provenance: bool,
    /// Parallel workers for search fallbacks.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Make free vertex choices at random (seeded) instead of canonically.
    #[arg(long)]
    random_choices: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help and version are successful exits
            if e.use_stderr() {
                eprint!("{e}");
                return ExitCode::from(3);
            }
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(classify_error(&e))
        }
    }
}

fn classify_error(e: &Error) -> u8 {
    match e {
        Error::Parse(_) | Error::InvalidParameters(_) => 3,
        Error::HypothesesViolated(_)
        | Error::InfeasibleCounts(_)
        | Error::InfeasibleParameters(_)
        | Error::Unsupported(_)
        | Error::PreconditionViolated(_)
        | Error::NotGood(_)
        | Error::TooLarge(_)
        | Error::EmptyInput => 1,
        _ => 2,
    }
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.cmd {
        Cmd::Decompose { what } => {
            let (packing, common) = match what {
                DecomposeCmd::Bipartite {
                    a,
                    b,
                    minus_matching,
                    lengths,
                    common,
                } => {
                    let list = LengthList::new(parse_lengths(&lengths)?)?;
                    let mut ctx = ctx_of(&common);
                    let p = decompose_bipartite(a, b, minus_matching, &list, &mut ctx)?;
                    drain_provenance(&ctx);
                    (p, common)
                }
                DecomposeCmd::Hole { v, u, m, common } => {
                    let mut ctx = ctx_of(&common);
                    let p = decompose_hole(v, u, m, &mut ctx)?;
                    drain_provenance(&ctx);
                    (p, common)
                }
                DecomposeCmd::Multipartite { parts, m, common } => {
                    let sizes = parse_sizes(&parts)?;
                    let mut ctx = ctx_of(&common);
                    let p = decompose_multipartite(&sizes, m, &mut ctx)?;
                    drain_provenance(&ctx);
                    (p, common)
                }
            };
            let text = write_packing(&packing);
            // final gate: the output must verify as a decomposition
            let claim = parse_claim(&text)?;
            let report = verify(&claim, true);
            if !report.pass {
                eprint!("{}", report.render());
                return Err(Error::InternalTransformFailure(
                    "built decomposition failed verification".into(),
                ));
            }
            match &common.out {
                Some(path) => std::fs::write(path, text)
                    .map_err(|e| Error::InternalTransformFailure(e.to_string()))?,
                None => print!("{text}"),
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Verify { input } => {
            let text = std::fs::read_to_string(&input).map_err(|e| Error::Parse(e.to_string()))?;
            let claim = parse_claim(&text)?;
            let report = verify(&claim, true);
            print!("{}", report.render());
            if report.pass {
                Ok(ExitCode::SUCCESS)
            } else {
                Ok(ExitCode::from(2))
            }
        }
        Cmd::Oracle { host, lengths } => {
            let host = parse_host(&host)?;
            let lens = parse_lengths(&lengths)?;
            match brute_force_decompose(host.kind(), &lens)? {
                BruteForceResult::Found { cycles, matching } => {
                    let host = Arc::new(host);
                    let cycles: Result<Vec<Cycle>, Error> =
                        cycles.into_iter().map(Cycle::new).collect();
                    let matching = matching
                        .map(|m| m.into_iter().map(|(x, y)| Edge::new(x, y)).collect());
                    let packing = Packing::new(host, cycles?, matching)?;
                    print!("{}", write_packing(&packing));
                    Ok(ExitCode::SUCCESS)
                }
                BruteForceResult::ProvedNone => {
                    println!("# proved: no decomposition with these lengths exists");
                    Ok(ExitCode::from(1))
                }
            }
        }
        Cmd::Check { host, lengths } => {
            let host = parse_host(&host)?;
            let list = LengthList::new(parse_lengths(&lengths)?)?;
            let verdict = check_feasibility(host.kind(), &list);
            println!("{verdict}");
            match verdict {
                FeasibilityVerdict::SatisfiesTheorem => Ok(ExitCode::SUCCESS),
                _ => Ok(ExitCode::from(1)),
            }
        }
    }
}

fn ctx_of(common: &Common) -> BuildCtx {
    BuildCtx::new(&BuildOptions {
        seed: common.seed,
        jobs: common.jobs,
        randomized: common.random_choices,
        provenance: common.provenance,
    })
}

fn drain_provenance(ctx: &BuildCtx) {
    if let Some(lines) = ctx.provenance() {
        for line in lines {
            eprintln!("# {line}");
        }
    }
}

fn parse_host(spec: &str) -> Result<HostGraph, Error> {
    let tokens: Vec<&str> = spec.split_whitespace().collect();
    parse_host_tokens(&tokens)
}

/// Lengths with run-length shorthand: `4x7,8` is seven 4s and one 8.
fn parse_lengths(spec: &str) -> Result<Vec<usize>, Error> {
    let mut out = Vec::new();
    for token in spec.split(',') {
        let token = token.trim();
        if token.is_empty() {
            continue;
        }
        if let Some((len, count)) = token.split_once('x') {
            let len: usize = len
                .parse()
                .map_err(|_| Error::Parse(format!("bad length `{token}`")))?;
            let count: usize = count
                .parse()
                .map_err(|_| Error::Parse(format!("bad count `{token}`")))?;
            out.extend(std::iter::repeat(len).take(count));
        } else {
            let len: usize = token
                .parse()
                .map_err(|_| Error::Parse(format!("bad length `{token}`")))?;
            out.push(len);
        }
    }
    if out.is_empty() {
        return Err(Error::Parse("no lengths given".into()));
    }
    Ok(out)
}

fn parse_sizes(spec: &str) -> Result<Vec<usize>, Error> {
    spec.split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| Error::Parse(format!("bad part size `{t}`")))
        })
        .collect()
}
