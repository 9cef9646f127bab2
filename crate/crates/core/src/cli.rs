//! The `geocycle` command line.
//!
//! Graph verbs (`distances`, `geodetic-check`, `decompose`, `census`) read a
//! graph JSON document; family verbs (`truncate`, `pipeline`, `diagnose`) take
//! a family spec, given inline, as a file, or as `family/lengths` shorthand
//! such as `ladder/nst`.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Read as _;
use std::path::Path as FsPath;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::cycle::Cycle;
use crate::decompose::Decomposer;
use crate::edgeset::EdgeSet;
use crate::error::{Error, Result};
use crate::experiments::{
    self, figure4_chain, geodetic_census, ladder_counterexample, peripheral_rank, search_peripheral_lengths,
    strip_hierarchy, DEFAULT_CENSUS_CAP,
};
use crate::geodesy::{all_pairs, find_shortcut_with};
use crate::graph::{EdgeId, Graph, VertexId};
use crate::length::Length;
use crate::pipeline::{
    build_levels, chain_union, generate_gamma, verify_thinness, CircuitStream, EmptyStream, RungElement,
    SquareStream, WalkStream,
};
use crate::truncation::{
    build_truncation, metric_diagnostic, restrict_cycle, Budget, FamilySpec, Hierarchy, Ladder,
    LengthScheme, Walk,
};

/// Exit status of a check verb that found a violation.
pub const VIOLATION: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "geocycle", version, about = "Geodetic cycle decompositions and truncation hierarchies")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    /// Index of the truncation, stage count, or probe depth (verb specific).
    #[arg(long, global = true)]
    pub depth: Option<usize>,

    /// Extra BFS layers explored when certifying distances.
    #[arg(long, global = true, env = "GEOCYCLE_HORIZON")]
    pub horizon: Option<usize>,

    /// Largest accepted width of a distance interval, as "p/q".
    #[arg(long, global = true)]
    pub tol: Option<String>,

    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Worker threads; defaults to one per core.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Shortest distances, all pairs or one pair with its witness path.
    Distances {
        graph: String,
        #[arg(long)]
        from: Option<String>,
        #[arg(long)]
        to: Option<String>,
    },
    /// Is the cycle geodetic? Exits 4 with a shortcut when it is not.
    GeodeticCheck {
        graph: String,
        /// Comma separated edge ids; defaults to every edge of the graph.
        #[arg(long)]
        cycle: Option<String>,
    },
    /// Splits a cycle (or an even edge set) into geodetic cycles.
    Decompose {
        graph: String,
        #[arg(long)]
        cycle: Option<String>,
        /// Bound parts by 5 * eps instead of the cycle length.
        #[arg(long)]
        eps: Option<String>,
        #[arg(long)]
        trace: bool,
    },
    /// Builds the truncation at index `--depth`.
    Truncate { family: String },
    /// Runs the generating stages 0..=depth for a circuit stream.
    Pipeline {
        family: String,
        /// `rungs`, `square:N`, `empty`, or a JSON file of closed walks.
        #[arg(long, default_value = "rungs")]
        stream: String,
        /// Truncation every chain reaches; defaults to depth + 4.
        #[arg(long)]
        host: Option<usize>,
        /// Edge whose thinness is checked; exits 4 when it fails.
        #[arg(long)]
        thin: Option<String>,
    },
    /// Reproduces one of the bundled experiments; exits 4 if its claim fails.
    Experiment {
        #[arg(value_enum)]
        name: ExperimentName,
        /// Graph for `peripheral` and `search`; defaults to K4, W5 and the prism.
        graph: Option<String>,
        #[arg(long, default_value_t = 200)]
        iterations: usize,
    },
    /// Every cycle of a graph with its geodesy verdict.
    Census {
        graph: String,
        #[arg(long, default_value_t = DEFAULT_CENSUS_CAP)]
        cap: usize,
    },
    /// Epsilon bounds of a family and the metric verdict.
    Diagnose { family: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Dot,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ExperimentName {
    Ladder,
    Figure4,
    Peripheral,
    Search,
    Divergence,
}

/// A finished command: its report in every format it supports.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub json: Value,
    pub text: String,
    pub dot: Option<String>,
    pub status: i32,
}

impl Outcome {
    fn new(json: Value, text: String) -> Self {
        Outcome { json, text, dot: None, status: 0 }
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Json => Ok(serde_json::to_string_pretty(&self.json).expect("json value") + "\n"),
            Format::Text => Ok(self.text.clone()),
            Format::Dot => self.dot.clone().ok_or_else(|| Error::input("this command has no DOT rendering")),
        }
    }
}

/// Parses `args`, runs the command, prints the report and returns the exit
/// status.
pub fn main_with(args: impl IntoIterator<Item = impl Into<OsString> + Clone>) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match run(&cli).and_then(|o| Ok((o.render(cli.format)?, o.status))) {
        Ok((out, status)) => {
            print!("{out}");
            status
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    let budget = budget(cli)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs.unwrap_or(0))
        .build()
        .map_err(|e| Error::input(format!("thread pool: {e}")))?;
    pool.install(|| dispatch(cli, budget))
}

fn budget(cli: &Cli) -> Result<Budget> {
    let mut b = Budget::default();
    if let Some(h) = cli.horizon {
        b.horizon = h;
    }
    if let Some(t) = &cli.tol {
        b.tol = t.parse()?;
        if b.tol.is_negative() {
            return Err(Error::input("tolerance must be nonnegative"));
        }
    }
    Ok(b)
}

fn dispatch(cli: &Cli, budget: Budget) -> Result<Outcome> {
    match &cli.command {
        Command::Distances { graph, from, to } => distances(&load_graph(graph)?, from.as_deref(), to.as_deref()),
        Command::GeodeticCheck { graph, cycle } => geodetic_check(&load_graph(graph)?, cycle.as_deref()),
        Command::Decompose { graph, cycle, eps, trace } => {
            decompose(&load_graph(graph)?, cycle.as_deref(), eps.as_deref(), *trace)
        }
        Command::Truncate { family } => truncate(&load_family(family)?, cli.depth.unwrap_or(2), &budget),
        Command::Pipeline { family, stream, host, thin } => {
            let depth = cli.depth.unwrap_or(3);
            pipeline(&load_family(family)?, stream, depth, host.unwrap_or(depth + 4), thin.as_deref(), budget)
        }
        Command::Experiment { name, graph, iterations } => {
            experiment(*name, graph.as_deref(), cli.depth, cli.seed, *iterations, budget)
        }
        Command::Census { graph, cap } => census(&load_graph(graph)?, *cap),
        Command::Diagnose { family } => diagnose(&load_family(family)?, cli.depth.unwrap_or(6), &budget),
    }
}

fn read_input(path: &str) -> Result<String> {
    if path == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| Error::input(format!("stdin: {e}")))?;
        return Ok(s);
    }
    std::fs::read_to_string(path).map_err(|e| Error::input(format!("{path}: {e}")))
}

pub fn load_graph(path: &str) -> Result<Graph> {
    Graph::from_json(&read_input(path)?)
}

/// Inline JSON, a JSON file, or `family[/lengths]`.
pub fn load_family(arg: &str) -> Result<FamilySpec> {
    if arg.trim_start().starts_with('{') {
        return FamilySpec::from_json(arg);
    }
    if arg == "-" || FsPath::new(arg).is_file() {
        return FamilySpec::from_json(&read_input(arg)?);
    }
    let (family, lengths) = arg.split_once('/').unwrap_or((arg, "unit"));
    Ok(FamilySpec::new(family, lengths))
}

fn parse_cycle(g: &Graph, spec: Option<&str>) -> Result<Cycle> {
    let set: EdgeSet = match spec {
        Some(s) => s.split(',').map(str::trim).filter(|e| !e.is_empty()).map(EdgeId::from).collect(),
        None => g.edges().iter().map(|e| e.id.clone()).collect(),
    };
    for e in &set {
        g.edge(e)?;
    }
    Cycle::from_edge_set(g, &set)
}

fn edge_list<'a>(edges: impl IntoIterator<Item = &'a EdgeId>) -> String {
    edges.into_iter().map(EdgeId::as_str).collect::<Vec<_>>().join(" ")
}

const PALETTE: [&str; 6] = ["red", "blue", "darkgreen", "orange", "purple", "brown"];

/// DOT of `g` with each group of edges drawn in its own colour.
fn graph_dot(name: &str, g: &Graph, groups: &[&EdgeSet]) -> String {
    let mut out = format!("graph \"{name}\" {{\n");
    for v in g.vertices() {
        let _ = writeln!(out, "  \"{v}\";");
    }
    for e in g.edges() {
        let colours: Vec<&str> = groups
            .iter()
            .enumerate()
            .filter(|(_, s)| s.contains(&e.id))
            .map(|(k, _)| PALETTE[k % PALETTE.len()])
            .collect();
        let style = if colours.is_empty() {
            String::new()
        } else {
            format!(", color=\"{}\", penwidth=2", colours.join(":"))
        };
        let _ = writeln!(out, "  \"{}\" -- \"{}\" [label=\"{} ({})\"{style}];", e.u, e.v, e.id, e.length);
    }
    out.push_str("}\n");
    out
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report serializes")
}

fn distances(g: &Graph, from: Option<&str>, to: Option<&str>) -> Result<Outcome> {
    let oracle = all_pairs(g);
    match (from, to) {
        (Some(x), Some(y)) => {
            let p = oracle.path(&VertexId::from(x), &VertexId::from(y))?;
            let text = format!("d({x}, {y}) = {}\npath: {}\n", p.length, edge_list(&p.edges));
            let mut o = Outcome::new(json!({"from": x, "to": y, "distance": p.length, "path": p}), text);
            o.dot = Some(graph_dot("distance", g, &[&p.edge_set()]));
            Ok(o)
        }
        (None, None) => {
            let mut table = BTreeMap::new();
            let mut text = String::new();
            for (a, x) in g.vertices().iter().enumerate() {
                let mut row = BTreeMap::new();
                for (b, y) in g.vertices().iter().enumerate() {
                    let d = oracle.distance_idx(a, b).cloned();
                    if a < b {
                        let shown = d.as_ref().map_or("unreachable".to_string(), Length::to_string);
                        let _ = writeln!(text, "{x} {y} {shown}");
                    }
                    row.insert(y.to_string(), d);
                }
                table.insert(x.to_string(), row);
            }
            Ok(Outcome::new(json!({"distances": table}), text))
        }
        _ => Err(Error::input("--from and --to go together")),
    }
}

fn geodetic_check(g: &Graph, cycle: Option<&str>) -> Result<Outcome> {
    let c = parse_cycle(g, cycle)?;
    let oracle = all_pairs(g);
    let shortcut = find_shortcut_with(&oracle, &c)?;
    let length = c.length(g)?;
    let geodetic = shortcut.is_none();
    let mut text = format!("cycle: {}\nlength: {length}\ngeodetic: {geodetic}\n", edge_list(c.edges()));
    let mut groups = vec![c.edge_set()];
    if let Some(s) = &shortcut {
        let _ = writeln!(
            text,
            "shortcut {}-{} of length {} beats arcs of {} and {}: {}",
            s.x,
            s.y,
            s.path.length,
            s.arc_forward_length,
            s.arc_backward_length,
            edge_list(&s.path.edges)
        );
        groups.push(s.path.edge_set());
    }
    let group_refs: Vec<&EdgeSet> = groups.iter().collect();
    let mut o = Outcome::new(json!({"cycle": c, "length": length, "geodetic": geodetic, "shortcut": shortcut}), text);
    o.dot = Some(graph_dot("geodetic_check", g, &group_refs));
    o.status = if geodetic { 0 } else { VIOLATION };
    Ok(o)
}

fn decompose(g: &Graph, cycle: Option<&str>, eps: Option<&str>, trace: bool) -> Result<Outcome> {
    let dec = Decomposer::new(g);
    let mut d = match (cycle, eps) {
        (_, Some(eps)) => {
            let c = parse_cycle(g, cycle)?;
            let eps: Length = eps.parse()?;
            dec.short(&c, &eps, &c.edge_set())?
        }
        (Some(_), None) => dec.geodetic(&parse_cycle(g, cycle)?)?,
        (None, None) => dec.generating_set(&g.edges().iter().map(|e| e.id.clone()).collect())?,
    };
    if !trace {
        d.trace.clear();
    }
    let mut text = format!("{} parts, bound {}\n", d.parts.len(), d.bound);
    for (p, l) in d.parts.iter().zip(&d.part_lengths) {
        let _ = writeln!(text, "  {l}: {}", edge_list(p.edges()));
    }
    for step in &d.trace {
        let _ = writeln!(text, "  trace {}", serde_json::to_string(step).expect("trace step"));
    }
    let sets: Vec<EdgeSet> = d.parts.iter().map(Cycle::edge_set).collect();
    let refs: Vec<&EdgeSet> = sets.iter().collect();
    let mut o = Outcome::new(to_value(&d), text);
    o.dot = Some(graph_dot("decomposition", g, &refs));
    Ok(o)
}

fn census(g: &Graph, cap: usize) -> Result<Outcome> {
    let entries = geodetic_census(g, cap)?;
    let geodetic = entries.iter().filter(|e| e.geodetic).count();
    let mut text = format!("{} cycles, {geodetic} geodetic\n", entries.len());
    let mut dot = String::new();
    for (k, e) in entries.iter().enumerate() {
        let _ = writeln!(text, "  {} {}: {}", if e.geodetic { "G" } else { "-" }, e.length, edge_list(e.cycle.edges()));
        if e.geodetic {
            dot += &graph_dot(&format!("geodetic_{k}"), g, &[&e.cycle.edge_set()]);
        }
    }
    let mut o = Outcome::new(json!({"cycles": entries.len(), "geodetic": geodetic, "entries": entries}), text);
    o.dot = Some(dot);
    Ok(o)
}

fn truncate(spec: &FamilySpec, i: usize, budget: &Budget) -> Result<Outcome> {
    let f = spec.build()?;
    let t = build_truncation(f.as_ref(), i, budget)?;
    let mut text = format!(
        "{} truncation {i}: |S_i| = {}, |S_i+1| = {}, {} edges ({} outer), {} boundary classes\n",
        f.name(),
        t.inner.len(),
        t.vertices.len(),
        t.hat.edge_count(),
        t.outer.len(),
        t.boundary_classes.len()
    );
    for o in t.outer.values() {
        let _ = writeln!(text, "  {} [{}, {}]", o.id, o.length.lo, o.length.hi);
    }
    let json: Value = serde_json::from_str(&t.to_json()).expect("truncation json");
    let mut o = Outcome::new(json, text);
    o.dot = Some(t.to_dot());
    Ok(o)
}

fn diagnose(spec: &FamilySpec, depth: usize, budget: &Budget) -> Result<Outcome> {
    let f = spec.build()?;
    let r = metric_diagnostic(f.as_ref(), depth, budget)?;
    let mut text = format!("{}: {}\n", r.family, r.verdict);
    for b in &r.bounds {
        let hi = b.hi.as_ref().map_or("none".to_string(), Length::to_string);
        let _ = writeln!(text, "  eps_{}: [{}, {hi}]", b.index, b.lo);
    }
    Ok(Outcome::new(to_value(&r), text))
}

#[derive(Deserialize)]
struct WalkDoc {
    vertices: Vec<VertexId>,
    edges: Vec<EdgeId>,
}

fn stream_for(spec: &FamilySpec, arg: &str) -> Result<Box<dyn CircuitStream>> {
    if arg == "empty" {
        return Ok(Box::new(EmptyStream));
    }
    if arg == "rungs" {
        return Ok(Box::new(RungElement { ladder: spec.ladder()? }));
    }
    if let Some(n) = arg.strip_prefix("square:") {
        let n: u64 = n.parse().map_err(|_| Error::input(format!("bad square index {n:?}")))?;
        if n == 0 {
            return Err(Error::input("squares are numbered from 1"));
        }
        return Ok(Box::new(SquareStream { ladder: spec.ladder()?, n }));
    }
    let docs: Vec<WalkDoc> =
        serde_json::from_str(&read_input(arg)?).map_err(|e| Error::input(format!("stream {arg}: {e}")))?;
    let walks = docs.into_iter().map(|d| Walk { vertices: d.vertices, edges: d.edges, closed: true }).collect();
    Ok(Box::new(WalkStream { label: arg.to_string(), walks }))
}

fn pipeline(
    spec: &FamilySpec,
    stream: &str,
    depth: usize,
    host: usize,
    thin: Option<&str>,
    budget: Budget,
) -> Result<Outcome> {
    let h = Hierarchy::new(spec.build()?, budget);
    let stream = stream_for(spec, stream)?;
    let report = generate_gamma(&h, stream.as_ref(), depth, host)?;
    let mut text = format!("{} / {}: stages 0..={depth}, host {host}\n", report.family, report.stream);
    for s in &report.stages {
        let lengths: Vec<String> = s.circles.iter().map(|c| c.top().length.to_string()).collect();
        let _ = writeln!(text, "  stage {}: eps {}, {} circles [{}]", s.index, s.epsilon_hi, s.circles.len(), lengths.join(", "));
    }
    let mut json = to_value(&report);
    let mut status = 0;
    if let Some(e) = thin {
        let e = EdgeId::from(e);
        let length = h.truncation(host)?.hat.length_of(&e)?.clone();
        let t = verify_thinness(&report.stages, &e, &length);
        let _ = writeln!(text, "thinness of {}: {}", t.edge, if t.holds { "holds" } else { "fails" });
        if !t.holds {
            status = VIOLATION;
        }
        json["thinness"] = to_value(&t);
    }
    Ok(Outcome { json, text, dot: None, status })
}

fn experiment(
    name: ExperimentName,
    graph: Option<&str>,
    depth: Option<usize>,
    seed: u64,
    iterations: usize,
    budget: Budget,
) -> Result<Outcome> {
    let graphs = || -> Result<Vec<(String, Graph)>> {
        Ok(match graph {
            Some(p) => vec![(p.to_string(), load_graph(p)?)],
            None => vec![
                ("K4".into(), experiments::k4()),
                ("W5".into(), experiments::wheel(5)),
                ("prism".into(), experiments::triangular_prism()),
            ],
        })
    };
    let (json, text, holds) = match name {
        ExperimentName::Ladder => {
            let r = ladder_counterexample(6, depth.unwrap_or(8), &budget)?;
            let mut text = String::new();
            let mut holds = r.verdict == crate::truncation::Verdict::Refuted;
            for (n, len, _) in &r.rungs {
                holds &= *len == Length::integer(2 * *n as i64 - 1);
                let _ = writeln!(text, "d(x{n}, y{n}) = {len}");
            }
            for l in &r.levels {
                holds &= l.ladder_cycles_without_rung == 0;
                let _ = writeln!(
                    text,
                    "S^_{}: {} cycles, {} geodetic, {} avoid the first rung (all through outer edges: {})",
                    l.index,
                    l.cycles,
                    l.geodetic,
                    l.geodetic_without_rung,
                    l.ladder_cycles_without_rung == 0
                );
            }
            let _ = writeln!(text, "unit metric verdict: {}", r.verdict);
            (to_value(&r), text, holds)
        }
        ExperimentName::Figure4 => {
            let to = depth.unwrap_or(7).max(3);
            let h = strip_hierarchy(budget)?;
            let chain = figure4_chain(&h, 3, to)?;
            let levels = build_levels(&h, to)?;
            let mut compatible = true;
            for w in chain.levels.windows(2) {
                compatible &= restrict_cycle(&w[1].cycle, &levels[w[0].index])?.as_ref() == Some(&w[0].cycle);
            }
            let u = chain_union(&chain, &levels)?;
            let twice = u.degrees.get(&4) == Some(&1);
            let text = format!(
                "chain 3..={to}: restrictions compatible: {compatible}; union degrees {:?}; circle: {}\n",
                u.degrees, u.is_circle
            );
            let json = json!({"chain": chain, "compatible": compatible, "union": u});
            (json, text, compatible && twice && !u.is_circle)
        }
        ExperimentName::Peripheral => {
            let mut rows = Vec::new();
            let mut text = String::new();
            let mut holds = true;
            for (name, g) in graphs()? {
                let r = peripheral_rank(&g)?;
                holds &= r.rank == r.cyclomatic;
                let _ = writeln!(text, "{name}: {} peripheral cycles, rank {} of {}", r.peripheral, r.rank, r.cyclomatic);
                rows.push(json!({"graph": name, "report": r}));
            }
            (Value::Array(rows), text, holds)
        }
        ExperimentName::Search => {
            let mut rows = Vec::new();
            let mut text = String::new();
            let mut holds = true;
            for (name, g) in graphs()? {
                let s = search_peripheral_lengths(&g, iterations, seed)?;
                holds &= s.found.is_some();
                let _ = writeln!(
                    text,
                    "{name}: {} after {} iterations (best violation count {})",
                    if s.found.is_some() { "found" } else { "not found" },
                    s.iterations,
                    s.best_violations
                );
                rows.push(json!({"graph": name, "search": s}));
            }
            (Value::Array(rows), text, holds)
        }
        ExperimentName::Divergence => {
            let depth = depth.unwrap_or(30);
            let ladder = Ladder::new(LengthScheme::DyadicHarmonic);
            let lower = experiments::divergence_probe(&ladder, depth)?;
            let upper = experiments::upper_ray_prefix(&ladder, depth);
            let holds = upper < Length::one() && lower > Length::integer(3);
            let text = format!(
                "first {depth} edges: lower ray {:.6}, upper ray {:.6}\n",
                lower.to_f64_lossy(),
                upper.to_f64_lossy()
            );
            (json!({"depth": depth, "lower_ray": lower, "upper_ray": upper}), text, holds)
        }
    };
    let mut json = json;
    if let Value::Array(rows) = json {
        json = json!({ "results": rows });
    }
    json["holds"] = Value::Bool(holds);
    let text = text + if holds { "claim holds\n" } else { "claim FAILS\n" };
    Ok(Outcome { json, text, dot: None, status: if holds { 0 } else { VIOLATION } })
}
