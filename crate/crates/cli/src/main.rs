use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gbs_core::autver::{verify_presentation, BsGroup, GroupWord, PinchOrder};
use gbs_core::bspq::{self, BspqParams};
use gbs_core::explorer::{infinite_dim_witness, star_in_K, star_in_W};
use gbs_core::invariants::InvariantSummary;
use gbs_core::moves::{self, collapsible_edges, MoveDescriptor};
use gbs_core::retract::{in_W, retract_h, shelters, surviving_edges};
use gbs_core::{canonical, canonical_form, LabeledGraph};
use num_bigint::BigInt;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use serde_json::{json, Value};
use thiserror::Error;

#[derive(Parser)]
#[command(name = "gbs", version, about = "Labeled graphs of generalized Baumslag-Solitar groups")]
struct Cli {
    /// Machine-readable JSON on stdout.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for randomized choices.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for exploration and verification.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Input {
    /// Graph JSON file.
    #[arg(long, short)]
    input: PathBuf,
}

#[derive(Args)]
struct Family {
    #[arg(long, allow_hyphen_values = true)]
    p: BigInt,
    #[arg(long, allow_hyphen_values = true)]
    q: BigInt,
}

#[derive(Args)]
struct StarArgs {
    #[command(flatten)]
    input: Input,
    #[arg(long, default_value_t = 2)]
    depth: usize,
    #[arg(long, default_value_t = 4)]
    max_d: u64,
    /// Write the Hasse diagram as DOT.
    #[arg(long)]
    dot: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Check a graph and print its invariants.
    Validate(Input),
    /// Canonical certificate and representative.
    Canon(Input),
    /// Applicable moves: reduced moves at a reduced graph, collapses otherwise.
    Moves(Input),
    /// Apply one move given as JSON.
    Apply {
        #[command(flatten)]
        input: Input,
        #[arg(long = "move")]
        mv: String,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Collapse to a reduced graph; first collapsible end unless `--seed` is given.
    Reduce {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    Survivors(Input),
    Retract {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    InW(Input),
    Shelters(Input),
    Star(StarArgs),
    Wstar(StarArgs),
    /// The chain of graphs witnessing an infinite-dimensional retract.
    Infdim {
        #[arg(long)]
        k: u32,
    },
    Classify {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        family: Family,
    },
    Level {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        family: Family,
    },
    Xball {
        #[command(flatten)]
        family: Family,
        #[arg(long)]
        radius: usize,
        #[arg(long, default_value_t = 0)]
        root_level: u32,
        #[arg(long)]
        max_children: Option<u64>,
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    Nonfg {
        #[command(flatten)]
        family: Family,
        #[arg(long)]
        k: u32,
    },
    QuotientCheck {
        #[command(flatten)]
        family: Family,
        #[arg(long, default_value_t = 8)]
        radius: usize,
    },
    VerifyPresentation {
        #[command(flatten)]
        family: Family,
        #[arg(long, default_value_t = 5)]
        kmax: u32,
    },
    WordReduce {
        #[command(flatten)]
        family: Family,
        #[arg(allow_hyphen_values = true)]
        word: String,
        /// Use the rescanning reducer.
        #[arg(long)]
        naive: bool,
    },
    Dot(Input),
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Domain(String),
}

impl CliError {
    fn domain(e: impl std::fmt::Display) -> Self {
        CliError::Domain(e.to_string())
    }
}

struct Output {
    json: Value,
    text: String,
}

fn out(json: Value, text: impl Into<String>) -> Result<Output, CliError> {
    Ok(Output { json, text: text.into() })
}

fn read_graph(input: &Input) -> Result<LabeledGraph, CliError> {
    let text = fs::read_to_string(&input.input)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", input.input.display())))?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("{}: malformed JSON: {e}", input.input.display())))?;
    let g: LabeledGraph = serde_json::from_value(value)
        .map_err(|e| CliError::Usage(format!("{}: not a graph: {e}", input.input.display())))?;
    g.validate().map_err(CliError::domain)?;
    Ok(g)
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))
}

fn emit_graph(g: &LabeledGraph, output: &Option<PathBuf>) -> Result<Output, CliError> {
    if let Some(path) = output {
        write_file(path, &g.to_json_pretty())?;
    }
    out(serde_json::to_value(g).expect("graph serializes"), g.to_json_pretty())
}

fn params(f: &Family) -> Result<BspqParams, CliError> {
    BspqParams::new(f.p.clone(), f.q.clone()).map_err(CliError::domain)
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

fn run(cli: &Cli) -> Result<Output, CliError> {
    match &cli.command {
        Command::Validate(i) => {
            let g = read_graph(i)?;
            let inv = InvariantSummary::of(&g);
            let text = format!(
                "valid: {} vertices, {} edges\nbetti {}\neuler {}\nmodulus {}",
                g.vertex_count(),
                g.edge_count(),
                inv.betti,
                inv.euler,
                inv.modulus
            );
            out(json!({ "valid": true, "invariants": to_value(&inv) }), text)
        }
        Command::Canon(i) => {
            let (cert, rep) = canonical_form(&read_graph(i)?);
            out(json!({ "certificate": cert.as_str(), "graph": to_value(&rep) }), cert.as_str())
        }
        Command::Moves(i) => {
            let g = read_graph(i)?;
            let listed: Vec<(MoveDescriptor, String)> = if moves::is_reduced(&g) {
                moves::reduced_neighbors(&g)
                    .map_err(CliError::domain)?
                    .into_iter()
                    .map(|(mv, h)| (mv, canonical(&h).as_str().to_string()))
                    .collect()
            } else {
                collapsible_edges(&g)
                    .into_iter()
                    .map(|end| MoveDescriptor::Collapse { end })
                    .filter_map(|mv| mv.apply_raw(&g).ok().map(|h| (mv, canonical(&h).as_str().to_string())))
                    .collect()
            };
            let json =
                Value::Array(listed.iter().map(|(mv, c)| json!({ "move": to_value(mv), "result": c })).collect());
            let text = listed
                .iter()
                .map(|(mv, c)| format!("{}\t{c}", serde_json::to_string(mv).expect("move")))
                .collect::<Vec<_>>()
                .join("\n");
            out(json, text)
        }
        Command::Apply { input, mv, output } => {
            let g = read_graph(input)?;
            let mv: MoveDescriptor =
                serde_json::from_str(mv).map_err(|e| CliError::Usage(format!("malformed move: {e}")))?;
            let h = moves::apply(&g, &mv).map_err(CliError::domain)?;
            emit_graph(&h, output)
        }
        Command::Reduce { input, output } => {
            let mut g = read_graph(input)?;
            let mut rng = cli.seed.map(StdRng::seed_from_u64);
            loop {
                let ends = collapsible_edges(&g);
                let end = match rng.as_mut() {
                    Some(r) => ends.choose(r),
                    None => ends.first(),
                };
                let Some(end) = end else { break };
                g = moves::collapse(&g, end).map_err(CliError::domain)?;
            }
            emit_graph(&g, output)
        }
        Command::Survivors(i) => {
            let s = surviving_edges(&read_graph(i)?);
            out(to_value(&s), s.iter().map(ToString::to_string).collect::<Vec<_>>().join("\n"))
        }
        Command::Retract { input, output } => {
            let h = retract_h(&read_graph(input)?).map_err(CliError::domain)?;
            emit_graph(&h, output)
        }
        Command::InW(i) => {
            let b = in_W(&read_graph(i)?);
            out(json!(b), b.to_string())
        }
        Command::Shelters(i) => {
            let d = shelters(&read_graph(i)?);
            let text = d
                .shelters
                .iter()
                .map(|s| {
                    format!("{:?}\t{}", s.kind, s.path.iter().map(ToString::to_string).collect::<Vec<_>>().join(" "))
                })
                .collect::<Vec<_>>()
                .join("\n");
            out(to_value(&d), text)
        }
        Command::Star(a) => {
            let star = star_in_K(&read_graph(&a.input)?, a.depth, a.max_d);
            if let Some(path) = &a.dot {
                write_file(path, &star.to_dot())?;
            }
            let text = star
                .vertices
                .iter()
                .map(|v| format!("layer {}\tmult {}\t{}", v.layer, v.multiplicity, v.certificate))
                .collect::<Vec<_>>()
                .join("\n");
            out(to_value(&star), format!("{text}\nmarked vertices: {}", star.marked_vertex_count()))
        }
        Command::Wstar(a) => {
            let w = star_in_W(&read_graph(&a.input)?, a.depth, a.max_d);
            if let Some(path) = &a.dot {
                write_file(path, &w.complex.to_dot())?;
            }
            let mut lines: Vec<String> = w
                .complex
                .vertices
                .iter()
                .map(|v| format!("layer {}\tmult {}\t{}", v.layer, v.multiplicity, v.certificate))
                .collect();
            lines.extend(w.excluded.iter().map(|(c, img)| format!("excluded {c} -> {img}")));
            out(to_value(&w), lines.join("\n"))
        }
        Command::Infdim { k } => {
            let chain = infinite_dim_witness(*k).map_err(CliError::domain)?;
            let text = chain
                .iter()
                .enumerate()
                .map(|(i, g)| format!("T_{k}^{i}\t{}", canonical(g)))
                .collect::<Vec<_>>()
                .join("\n");
            out(to_value(&chain), text)
        }
        Command::Classify { input, family } => {
            let g = read_graph(input)?;
            let params = params(family)?;
            let value = if moves::is_reduced(&g) {
                to_value(&bspq::classify_reduced(&g, &params).map_err(CliError::domain)?)
            } else {
                to_value(&bspq::classify_W(&g, &params).map_err(CliError::domain)?)
            };
            let text = value.to_string();
            out(value, text)
        }
        Command::Level { input, family } => {
            let lvl = bspq::level(&read_graph(input)?, &params(family)?).map_err(CliError::domain)?;
            out(json!(lvl), lvl.map_or("not in X".to_string(), |k| k.to_string()))
        }
        Command::Xball { family, radius, root_level, max_children, dot } => {
            let ball = bspq::x_ball(&params(family)?, *root_level, *radius, *max_children);
            if let Some(path) = dot {
                write_file(path, &ball.to_dot())?;
            }
            let text = ball
                .profile()
                .iter()
                .map(|((d, l), c)| format!("depth {d}\tlevel {l}\t{c}"))
                .collect::<Vec<_>>()
                .join("\n");
            out(to_value(&ball), text)
        }
        Command::Nonfg { family, k } => {
            let w = bspq::nonfg_witness(&params(family)?, *k).map_err(CliError::domain)?;
            let levels = w.levels.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ");
            out(to_value(&w), format!("nodes {} {}\nlevels {levels}\nmax level {}", w.u, w.v, w.max_level))
        }
        Command::QuotientCheck { family, radius } => {
            let params = params(family)?;
            let report = bspq::quotient_ray_check(&bspq::x_ball(&params, 0, *radius, None), &params);
            let ok = report.ok;
            let text = format!("{report:?}");
            if !ok {
                return Err(CliError::Domain(format!("quotient check failed: {text}")));
            }
            out(to_value(&report), text)
        }
        Command::VerifyPresentation { family, kmax } => {
            let _ = params(family)?;
            let report = verify_presentation(&BsGroup::new(family.p.clone(), family.q.clone()), *kmax);
            let mut lines: Vec<String> = report
                .checks
                .iter()
                .map(|c| format!("{}\t{}", if c.passed { "pass" } else { "FAIL" }, c.name))
                .collect();
            lines.push(format!("max exponent bits: {}", report.max_exponent_bits));
            if !report.all_passed {
                return Err(CliError::Domain(lines.join("\n")));
            }
            out(to_value(&report), lines.join("\n"))
        }
        Command::WordReduce { family, word, naive } => {
            if family.p == BigInt::from(0) || family.q == BigInt::from(0) {
                return Err(CliError::Usage("p and q must be nonzero".into()));
            }
            let w: GroupWord = word.parse().map_err(|e| CliError::Usage(format!("bad word: {e}")))?;
            let group = BsGroup::new(family.p.clone(), family.q.clone());
            let r = if *naive { group.reduce_naive(&w, PinchOrder::Leftmost) } else { group.reduce(&w) };
            out(json!({ "word": r.to_string(), "t_length": r.t_length(), "identity": r.is_empty() }), r.to_string())
        }
        Command::Dot(i) => {
            let dot = read_graph(i)?.to_dot();
            out(Value::String(dot.clone()), dot)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.jobs.max(1)).build_global() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    match run(&cli) {
        Ok(o) => {
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&o.json).expect("json"));
            } else {
                println!("{}", o.text);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                CliError::Usage(_) => 2,
                CliError::Domain(_) => 1,
            })
        }
    }
}
