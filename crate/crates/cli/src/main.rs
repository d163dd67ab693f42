//! `ckgraph`: classify row-finite directed graphs and k-graphs, inspect
//! paths and shift equivalence, verify factorization squares, desourcify,
//! and profile counting-measure multiplicities of the built-in families.
//!
//! Inputs are JSON documents (finite graphs, column templates, k-graphs) or
//! built-in names such as `loop_plus_edge`, `thesis:2times`, `omega:2:3,2`,
//! `robertson`. Reports are written as JSON to stdout (or `--out`).
//!
//! Exit codes: 0 for decided reports, 2 when a report is dominated by
//! Unknown or uncertified entries, 1 on input errors. The environment
//! variable `CKGRAPH_BUDGET` overrides the default stage budget.

use std::fs;
use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use ckgraph::classify::{
    classify_digraph, classify_kgraph, classify_staged_digraph, classify_staged_kgraph,
    frequently_divertable_finite, frequently_divertable_staged, BoundaryPath, FdOutcome,
};
use ckgraph::desourcify::{fragment_to_graph, materialize_truncation, BoundaryCtx};
use ckgraph::doc::{parse_input, parse_path_literal, InputKind, ParsedPath};
use ckgraph::families::{
    builtin_digraph, builtin_kgraph, builtin_staged, builtin_staged_kgraph, SequenceFamily,
};
use ckgraph::graph::GraphDoc;
use ckgraph::groupoid::{
    default_escape_cover, k_times_witness_check, multiplicity_profile, WitnessChoice,
};
use ckgraph::kgraph::{omega, Degree};
use ckgraph::paths::{shift_equivalent, NoRays};

#[derive(Parser)]
#[command(name = "ckgraph", version, about = "Graph-algebra classification toolkit")]
struct Cli {
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a graph, staged family or k-graph.
    Classify {
        /// File path or built-in name.
        input: String,
        /// Stage/search budget (default 8; env CKGRAPH_BUDGET overrides).
        #[arg(long)]
        budget: Option<usize>,
    },
    /// Path operations: segments, shifts, shift equivalence, boundary
    /// membership and frequent divertability.
    Paths {
        input: String,
        #[arg(long, value_enum)]
        op: PathOp,
        /// First path literal (see README for the syntax).
        #[arg(long)]
        x: String,
        /// Second path literal, for binary operations.
        #[arg(long)]
        y: Option<String>,
        #[arg(long, default_value_t = 0)]
        m: usize,
        #[arg(long, default_value_t = 0)]
        n: usize,
        #[arg(long)]
        budget: Option<usize>,
    },
    /// Validate the factorization squares of a k-graph.
    KgraphValidate {
        /// File path, built-in name, or `omega` together with `--m`.
        input: String,
        /// Grid bounds for the omega builder, e.g. `3,2`.
        #[arg(long)]
        m: Option<String>,
    },
    /// Materialize a truncation of the desourcification.
    Desourcify {
        input: String,
        /// Offset bound per coordinate, e.g. `3,3`.
        #[arg(long)]
        truncate: String,
        /// Column window for parametric k-graphs.
        #[arg(long, default_value_t = 4)]
        columns: u32,
        #[arg(long)]
        budget: Option<usize>,
    },
    /// Cylinder-count table and relative multiplicities of a built-in
    /// convergence family.
    GroupoidProfile {
        #[arg(long)]
        family: String,
        #[arg(long, default_value_t = 6)]
        cylinders: usize,
        #[arg(long, default_value_t = 16)]
        window: usize,
        #[arg(long, default_value_t = 0)]
        target: usize,
        #[arg(long)]
        budget: Option<usize>,
    },
    /// Check the three conditions of k-times convergence for a family's
    /// witness sequences.
    WitnessCheck {
        #[arg(long)]
        family: String,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, value_enum, default_value_t = WitnessArg::Canonical)]
        witnesses: WitnessArg,
        #[arg(long, default_value_t = 0)]
        target: usize,
        #[arg(long, default_value_t = 16)]
        window: usize,
        #[arg(long, default_value_t = 6)]
        cylinders: usize,
        #[arg(long)]
        budget: Option<usize>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum PathOp {
    Segment,
    Shift,
    ShiftEquivalent,
    Boundary,
    FrequentlyDivertable,
}

#[derive(Clone, Copy, ValueEnum, PartialEq)]
enum WitnessArg {
    Canonical,
    Duplicated,
}

fn default_budget(cli_budget: Option<usize>) -> usize {
    cli_budget
        .or_else(|| std::env::var("CKGRAPH_BUDGET").ok().and_then(|v| v.parse().ok()))
        .unwrap_or(8)
}

enum Resolved {
    Digraph(ckgraph::graph::DirectedGraph),
    Staged(ckgraph::staged::StagedDigraph),
    KGraph(ckgraph::kgraph::KGraph),
    StagedK(ckgraph::kstaged::StagedKGraph),
}

fn resolve(input: &str) -> Result<Resolved> {
    if let Some(f) = builtin_staged(input) {
        return Ok(Resolved::Staged(f));
    }
    if let Some(g) = builtin_digraph(input) {
        return Ok(Resolved::Digraph(g));
    }
    if let Some(kg) = builtin_kgraph(input) {
        return Ok(Resolved::KGraph(kg));
    }
    if let Some(f) = builtin_staged_kgraph(input) {
        return Ok(Resolved::StagedK(f));
    }
    let body = fs::read_to_string(input)
        .with_context(|| format!("`{input}` is not a built-in name or readable file"))?;
    match parse_input(input, &body)? {
        InputKind::Digraph(g) => Ok(Resolved::Digraph(g)),
        InputKind::Staged(f) => Ok(Resolved::Staged(f)),
        InputKind::KGraph(kg) => Ok(Resolved::KGraph(kg)),
    }
}

fn emit(out: &Option<PathBuf>, doc: &Value) -> Result<()> {
    let body = serde_json::to_string_pretty(doc)?;
    match out {
        Some(path) => fs::write(path, body + "\n")?,
        None => println!("{body}"),
    }
    Ok(())
}

/// 0 when the report is decided, 2 when Unknown entries dominate.
fn report_exit(doc: &Value) -> i32 {
    let mut unknown = 0usize;
    let mut decided = 0usize;
    fn walk(v: &Value, unknown: &mut usize, decided: &mut usize) {
        match v {
            Value::Object(map) => {
                for (k, val) in map {
                    if k == "verdict" {
                        match val.as_str() {
                            Some("unknown") => *unknown += 1,
                            Some("yes") | Some("no") => *decided += 1,
                            _ => {}
                        }
                    }
                    walk(val, unknown, decided);
                }
            }
            Value::Array(items) => {
                items.iter().for_each(|x| walk(x, unknown, decided));
            }
            _ => {}
        }
    }
    walk(doc, &mut unknown, &mut decided);
    if unknown > 0 && unknown >= decided {
        2
    } else if doc.get("certified").and_then(Value::as_bool) == Some(false) {
        2
    } else {
        0
    }
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::exit(1);
        }
    }
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Classify { input, budget } => {
            let budget = default_budget(budget);
            let report = match resolve(&input)? {
                Resolved::Digraph(g) => classify_digraph(&g),
                Resolved::Staged(f) => classify_staged_digraph(&f, budget),
                Resolved::KGraph(kg) => classify_kgraph(&kg, budget as u32),
                Resolved::StagedK(f) => classify_staged_kgraph(&f, budget as u32),
            };
            let doc = serde_json::to_value(&report)?;
            emit(&cli.out, &doc)?;
            Ok(report_exit(&doc))
        }
        Command::Paths { input, op, x, y, m, n, budget } => {
            let budget = default_budget(budget);
            let resolved = resolve(&input)?;
            let (graph, staged) = match &resolved {
                Resolved::Digraph(g) => (g.clone(), None),
                Resolved::Staged(f) => (f.stage(budget.max(8)), Some(f)),
                _ => bail!("the paths command works on directed graphs"),
            };
            let px = parse_path_literal(&graph, staged, &x)?;
            let doc = match op {
                PathOp::Segment => {
                    let seg = match &px {
                        ParsedPath::Infinite(p) => match staged {
                            Some(f) => p.segment(&graph, f, m, n)?,
                            None => p.segment(&graph, &NoRays, m, n)?,
                        },
                        ParsedPath::Finite(p) => {
                            if n > p.len() || m > n {
                                bail!("segment ({m},{n}) out of range for |x| = {}", p.len());
                            }
                            ckgraph::paths::FinitePath {
                                at: p.vertex_at(&graph, m),
                                edges: p.edges[m..n].to_vec(),
                            }
                        }
                    };
                    json!({"segment": seg.edges, "at": seg.at})
                }
                PathOp::Shift => match &px {
                    ParsedPath::Infinite(p) => {
                        let shifted = match staged {
                            Some(f) => p.shift(&graph, f, n),
                            None => p.shift(&graph, &NoRays, n),
                        };
                        json!({"shift": format!("{shifted:?}")})
                    }
                    ParsedPath::Finite(_) => bail!("shift applies to infinite paths"),
                },
                PathOp::ShiftEquivalent => {
                    let ylit = y.ok_or_else(|| anyhow!("--y is required"))?;
                    let py = parse_path_literal(&graph, staged, &ylit)?;
                    match (&px, &py) {
                        (ParsedPath::Infinite(a), ParsedPath::Infinite(b)) => {
                            json!({"lag_set": serde_json::to_value(shift_equivalent(a, b))?})
                        }
                        (ParsedPath::Finite(a), ParsedPath::Finite(b)) => {
                            let equiv = a.source_name(&graph) == b.source_name(&graph);
                            let lag = a.len() as i64 - b.len() as i64;
                            json!({"lag_set": if equiv { json!({"Finite": [lag]}) } else { json!("Empty") }})
                        }
                        _ => json!({"lag_set": "Empty"}),
                    }
                }
                PathOp::Boundary => match &px {
                    ParsedPath::Infinite(_) => json!({"verdict": "yes"}),
                    ParsedPath::Finite(p) => {
                        let s = p.source_name(&graph);
                        let v = graph.vertex(&s).unwrap();
                        match staged {
                            None => {
                                json!({"verdict": if graph.is_source(v) { "yes" } else { "no" }})
                            }
                            Some(f) => {
                                if !f.is_interior(budget.max(8), &s) {
                                    json!({
                                        "verdict": "unknown",
                                        "reason": "source vertex lies on the stage frontier"
                                    })
                                } else {
                                    json!({"verdict": if graph.is_source(v) { "yes" } else { "no" }})
                                }
                            }
                        }
                    }
                },
                PathOp::FrequentlyDivertable => {
                    let ylit = y.ok_or_else(|| anyhow!("--y is required"))?;
                    let py = parse_path_literal(&graph, staged, &ylit)?;
                    let outcome = match staged {
                        Some(f) => match (&px, &py) {
                            (ParsedPath::Infinite(a), ParsedPath::Infinite(b)) => {
                                frequently_divertable_staged(f, a, b, budget)
                            }
                            _ => bail!("staged divertability works on infinite paths"),
                        },
                        None => {
                            let wrap = |p: &ParsedPath| match p {
                                ParsedPath::Finite(q) => BoundaryPath::Finite(q.clone()),
                                ParsedPath::Infinite(q) => BoundaryPath::Infinite(q.clone()),
                            };
                            frequently_divertable_finite(&graph, &wrap(&px), &wrap(&py))
                        }
                    };
                    match outcome {
                        FdOutcome::Yes => json!({"verdict": "yes"}),
                        FdOutcome::No { stuck_vertex } => {
                            json!({"verdict": "no", "certificate": {"stuck_vertex": stuck_vertex}})
                        }
                        FdOutcome::Unknown { reason } => {
                            json!({"verdict": "unknown", "reason": reason})
                        }
                    }
                }
            };
            emit(&cli.out, &doc)?;
            Ok(report_exit(&doc))
        }
        Command::KgraphValidate { input, m } => {
            let kg = if input == "omega" {
                let bounds = m.ok_or_else(|| anyhow!("omega needs --m, e.g. --m 3,2"))?;
                let parts: Vec<u32> = bounds
                    .split(',')
                    .map(|c| c.parse().map_err(|_| anyhow!("bad bound {c}")))
                    .collect::<Result<_>>()?;
                omega(parts.len(), &parts)
            } else {
                match resolve(&input)? {
                    Resolved::KGraph(kg) => kg,
                    _ => bail!("kgraph-validate expects a k-graph"),
                }
            };
            let report = kg.validate();
            let doc = json!({
                "valid": report.is_valid(),
                "findings": report.findings,
                "locally_convex":
                    if report.is_valid() { Value::from(kg.locally_convex()) } else { Value::Null },
            });
            emit(&cli.out, &doc)?;
            Ok(if report.is_valid() { 0 } else { 2 })
        }
        Command::Desourcify { input, truncate, columns, budget } => {
            let budget = default_budget(budget);
            let bound: Vec<u32> = truncate
                .split(',')
                .map(|c| c.parse().map_err(|_| anyhow!("bad truncation bound {c}")))
                .collect::<Result<_>>()?;
            let (frag, k) = match resolve(&input)? {
                Resolved::KGraph(kg) => {
                    if bound.len() != kg.k {
                        bail!("--truncate must give {} coordinates", kg.k);
                    }
                    let ctx = BoundaryCtx::finite(&kg, budget as u32);
                    let roots: Vec<String> = kg
                        .skeleton()
                        .vertices()
                        .map(|v| kg.vertex_name(v).to_string())
                        .collect();
                    (materialize_truncation(&ctx, &roots, &Degree(bound.clone()))?, kg.k)
                }
                Resolved::StagedK(f) => {
                    if bound.len() != f.k {
                        bail!("--truncate must give {} coordinates", f.k);
                    }
                    let ctx = BoundaryCtx::staged(&f, columns + 4);
                    let stage = f.stage(columns);
                    let roots: Vec<String> = stage
                        .skeleton()
                        .vertices()
                        .map(|v| stage.vertex_name(v).to_string())
                        .collect();
                    (materialize_truncation(&ctx, &roots, &Degree(bound.clone()))?, f.k)
                }
                _ => bail!("desourcify expects a k-graph"),
            };
            let as_graph = fragment_to_graph(&frag);
            let gdoc = GraphDoc::from_graph(&as_graph);
            let doc = json!({
                "k": k,
                "bound": frag.bound,
                "vertices": gdoc.vertices,
                "edges": frag.edges.iter().enumerate().map(|(i, e)| json!({
                    "id": format!("c{i}"),
                    "r": format!("[{};{:?}]", e.r.base, e.r.excess),
                    "s": format!("[{};{:?}]", e.s.base, e.s.excess),
                    "color": e.color + 1,
                    "segment": e.key.segment,
                    "entry_excess": e.key.entry_excess,
                })).collect::<Vec<_>>(),
                "iota": {
                    "vertices": frag.iota_vertices.iter().map(|(v, key)| json!({
                        "from": v, "to": format!("[{};{:?}]", key.base, key.excess)
                    })).collect::<Vec<_>>(),
                    "edges": frag.iota_edges.iter().map(|(e, key)| json!({
                        "from": e, "segment": key.segment, "degree": key.degree
                    })).collect::<Vec<_>>(),
                },
            });
            emit(&cli.out, &doc)?;
            Ok(0)
        }
        Command::GroupoidProfile { family, cylinders, window, target, budget } => {
            let budget = default_budget(budget);
            let fam = SequenceFamily::new(&family)
                .ok_or_else(|| anyhow!("unknown family `{family}`"))?;
            if target >= fam.targets().len() {
                bail!("family `{family}` has {} target(s)", fam.targets().len());
            }
            let profile = multiplicity_profile(&fam, target, cylinders, window, budget);
            let doc = serde_json::to_value(&profile)?;
            emit(&cli.out, &doc)?;
            Ok(report_exit(&doc))
        }
        Command::WitnessCheck { family, k, witnesses, target, window, cylinders, budget } => {
            let budget = default_budget(budget);
            let fam = SequenceFamily::new(&family)
                .ok_or_else(|| anyhow!("unknown family `{family}`"))?;
            if target >= fam.targets().len() {
                bail!("family `{family}` has {} target(s)", fam.targets().len());
            }
            let k = k.unwrap_or_else(|| fam.min_parallel());
            let choice = match witnesses {
                WitnessArg::Canonical => WitnessChoice::Canonical,
                WitnessArg::Duplicated => WitnessChoice::Duplicated,
            };
            let cover = default_escape_cover(&fam, cylinders, budget);
            let report =
                k_times_witness_check(&fam, target, k, choice, window, cylinders, &cover, budget);
            let doc = serde_json::to_value(&report)?;
            emit(&cli.out, &doc)?;
            let certified = report.sources.certified
                && report.convergence.certified
                && report.escape.certified;
            Ok(if certified { 0 } else { 2 })
        }
    }
}
