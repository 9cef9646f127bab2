//! Reproductions of the worked examples: the subdivided ladder, the
//! dyadic/harmonic ladder, and the search for lengths making every geodetic
//! cycle peripheral.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::cycle::Cycle;
use crate::edgeset::{gf2_rank, EdgeSet};
use crate::error::{Error, Result};
use crate::geodesy::{all_pairs, is_geodetic_with, shortest_path};
use crate::graph::{Edge, EdgeId, Graph, VertexId};
use crate::length::Length;
use crate::pipeline::{Chain, ChainLevel};
use crate::truncation::{
    ball_graph, build_truncation, metric_diagnostic, outer_edge_id, Budget, GraphFamily, Hierarchy, Ladder,
    LengthScheme, Strip, Truncation, Verdict,
};

pub const DEFAULT_CENSUS_CAP: usize = 100_000;

/// Every cycle of `g` in canonical order, or `CapExceeded` past `cap`.
pub fn all_cycles(g: &Graph, cap: usize) -> Result<Vec<Cycle>> {
    let found = AtomicUsize::new(0);
    let per_start: Vec<Vec<Cycle>> = (0..g.vertex_count())
        .into_par_iter()
        .map(|s| cycles_from(g, s, cap, &found))
        .collect::<Result<_>>()?;
    let mut all: Vec<Cycle> = per_start.into_iter().flatten().collect();
    all.sort();
    Ok(all)
}

/// Cycles whose least vertex index is `s`, each found in one direction only:
/// the first edge id is below the closing edge id.
fn cycles_from(g: &Graph, s: usize, cap: usize, found: &AtomicUsize) -> Result<Vec<Cycle>> {
    let mut out = Vec::new();
    let bump = |out: &mut Vec<Cycle>, c: Cycle| -> Result<()> {
        if found.fetch_add(1, Ordering::Relaxed) >= cap {
            return Err(Error::CapExceeded { cap });
        }
        out.push(c);
        Ok(())
    };
    for &e in g.incident(s) {
        if g.opposite(e, s) == s {
            let c = Cycle::from_walk(g, &[g.vertex_at(s).clone()], &[g.edge_at(e).id.clone()])?;
            bump(&mut out, c)?;
        }
    }
    let mut on_path = vec![false; g.vertex_count()];
    on_path[s] = true;
    let mut vpath = vec![s];
    let mut epath: Vec<usize> = Vec::new();
    // Explicit stack of (vertex, next incidence position).
    let mut stack: Vec<(usize, usize)> = vec![(s, 0)];
    while let Some(&mut (x, ref mut pos)) = stack.last_mut() {
        let inc = g.incident(x);
        if *pos >= inc.len() {
            stack.pop();
            on_path[x] = false;
            vpath.pop();
            epath.pop();
            if stack.is_empty() {
                on_path[s] = true;
            }
            continue;
        }
        let e = inc[*pos];
        *pos += 1;
        let y = g.opposite(e, x);
        if y == x {
            continue;
        }
        if y == s {
            if let Some(&first) = epath.first() {
                if first != e && g.edge_at(first).id < g.edge_at(e).id {
                    let vs: Vec<VertexId> = vpath.iter().map(|&v| g.vertex_at(v).clone()).collect();
                    let mut es: Vec<EdgeId> = epath.iter().map(|&k| g.edge_at(k).id.clone()).collect();
                    es.push(g.edge_at(e).id.clone());
                    bump(&mut out, Cycle::from_walk(g, &vs, &es)?)?;
                }
            }
            continue;
        }
        if y < s || on_path[y] {
            continue;
        }
        on_path[y] = true;
        vpath.push(y);
        epath.push(e);
        stack.push((y, 0));
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CensusEntry {
    pub cycle: Cycle,
    pub length: Length,
    pub geodetic: bool,
}

/// All cycles of `g` with their geodesy verdicts.
pub fn geodetic_census(g: &Graph, cap: usize) -> Result<Vec<CensusEntry>> {
    let cycles = all_cycles(g, cap)?;
    let oracle = all_pairs(g);
    cycles
        .into_par_iter()
        .map(|cycle| {
            let geodetic = is_geodetic_with(&oracle, &cycle)?;
            let length = cycle.length(g)?;
            Ok(CensusEntry { cycle, length, geodetic })
        })
        .collect()
}

/// No chord (including loops and parallel edges on the cycle's vertices) and
/// `g` minus the cycle's vertices is connected.
pub fn is_peripheral(g: &Graph, c: &Cycle) -> bool {
    let on: BTreeSet<&VertexId> = c.vertices().iter().collect();
    let own: BTreeSet<&EdgeId> = c.edges().iter().collect();
    let chord = g.edges().iter().any(|e| !own.contains(&e.id) && on.contains(&e.u) && on.contains(&e.v));
    if chord {
        return false;
    }
    let rest: BTreeSet<VertexId> = g.vertices().iter().filter(|v| !on.contains(v)).cloned().collect();
    rest.is_empty() || g.induced(&rest).is_connected()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PeripheralRank {
    pub peripheral: usize,
    pub rank: usize,
    pub cyclomatic: usize,
}

/// GF(2) rank of the peripheral cycles against `m - n + c`.
pub fn peripheral_rank(g: &Graph) -> Result<PeripheralRank> {
    let cycles = all_cycles(g, DEFAULT_CENSUS_CAP)?;
    let sets: Vec<EdgeSet> = cycles.iter().filter(|c| is_peripheral(g, c)).map(Cycle::edge_set).collect();
    Ok(PeripheralRank {
        peripheral: sets.len(),
        rank: gf2_rank(&sets),
        cyclomatic: g.edge_count() + g.component_count() - g.vertex_count(),
    })
}

/// Number of geodetic cycles that are not peripheral under `lengths`.
pub fn peripheral_violations(g: &Graph, lengths: &BTreeMap<EdgeId, Length>) -> Result<usize> {
    let h = g.with_lengths(lengths)?;
    Ok(geodetic_census(&h, DEFAULT_CENSUS_CAP)?
        .iter()
        .filter(|e| e.geodetic && !is_peripheral(&h, &e.cycle))
        .count())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PeripheralSearch {
    pub seed: u64,
    pub iterations: usize,
    /// Lengths under which every geodetic cycle is peripheral.
    pub found: Option<BTreeMap<EdgeId, Length>>,
    pub best_violations: usize,
    pub best_lengths: BTreeMap<EdgeId, Length>,
}

fn random_length(rng: &mut ChaCha8Rng) -> Length {
    Length::ratio(rng.gen_range(1..=9), rng.gen_range(1..=4))
}

/// Randomised local search, from unit lengths, for lengths making every
/// geodetic cycle peripheral. Each step re-draws one edge length and keeps
/// the change unless the violation count rises; every 25th step re-draws
/// all lengths from the best assignment so far.
pub fn search_peripheral_lengths(g: &Graph, budget: usize, seed: u64) -> Result<PeripheralSearch> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cycles = all_cycles(g, DEFAULT_CENSUS_CAP)?;
    let suspects: Vec<Cycle> = cycles.into_iter().filter(|c| !is_peripheral(g, c)).collect();
    let count = |lengths: &BTreeMap<EdgeId, Length>| -> Result<usize> {
        let h = g.with_lengths(lengths)?;
        let oracle = all_pairs(&h);
        let mut n = 0;
        for c in &suspects {
            n += usize::from(is_geodetic_with(&oracle, c)?);
        }
        Ok(n)
    };
    let ids: Vec<EdgeId> = g.edges().iter().map(|e| e.id.clone()).collect();
    let mut current: BTreeMap<EdgeId, Length> = ids.iter().map(|e| (e.clone(), Length::one())).collect();
    let mut current_v = count(&current)?;
    let mut best = (current_v, current.clone());
    let mut iterations = 0;
    while best.0 > 0 && iterations < budget && !ids.is_empty() {
        iterations += 1;
        let mut proposal = current.clone();
        if iterations % 25 == 0 {
            proposal = best.1.clone();
            for e in &ids {
                if rng.gen_bool(0.5) {
                    proposal.insert(e.clone(), random_length(&mut rng));
                }
            }
        } else {
            let e = ids.choose(&mut rng).expect("nonempty");
            proposal.insert(e.clone(), random_length(&mut rng));
        }
        let v = count(&proposal)?;
        if v <= current_v || iterations % 25 == 0 {
            current = proposal;
            current_v = v;
        }
        if current_v < best.0 {
            best = (current_v, current.clone());
        }
    }
    let found = (best.0 == 0).then(|| best.1.clone());
    Ok(PeripheralSearch { seed, iterations, found, best_violations: best.0, best_lengths: best.1 })
}

/// Length of the first `depth` edges of the lower ray `y1 y2 ..` of a ladder.
pub fn divergence_probe(ladder: &Ladder, depth: usize) -> Result<Length> {
    if ladder.scheme() != LengthScheme::DyadicHarmonic {
        return Err(Error::input("divergence probe needs the dyadic_harmonic ladder"));
    }
    Ok(ray_prefix(ladder, 'y', depth))
}

/// Length of the first `depth` edges of the upper ray `x1 x2 ..`.
pub fn upper_ray_prefix(ladder: &Ladder, depth: usize) -> Length {
    ray_prefix(ladder, 'x', depth)
}

fn ray_prefix(ladder: &Ladder, rail: char, depth: usize) -> Length {
    (1..=depth)
        .map(|n| {
            let here = VertexId(format!("{rail}{n}"));
            let next = VertexId(format!("{rail}{}", n + 1));
            ladder.neighbors(&here).into_iter().find(|fe| fe.other == next).expect("rail edge").length
        })
        .sum()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LadderLevel {
    pub index: usize,
    pub cycles: usize,
    pub geodetic: usize,
    /// Geodetic cycles avoiding the first rung. These all run through outer
    /// edges: they are restrictions of ladder cycles that are not geodetic.
    pub geodetic_without_rung: usize,
    /// Geodetic cycles avoiding both the first rung and every outer edge,
    /// i.e. finite cycles of the ladder itself.
    pub ladder_cycles_without_rung: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LadderReport {
    /// `(n, shortest x_n-y_n length, edges on rung n)`.
    pub rungs: Vec<(u64, Length, u64)>,
    pub levels: Vec<LadderLevel>,
    pub verdict: Verdict,
}

/// The first rung of the ladders.
pub fn first_rung() -> EdgeId {
    EdgeId::from("x1-y1")
}

/// Truncations `1..=depth` of the unit-length subdivided ladder.
pub fn subdivided_ladder(depth: usize, budget: &Budget) -> Result<Vec<Truncation>> {
    let ladder = Ladder::subdivided(LengthScheme::Unit)?;
    (1..=depth).map(|i| build_truncation(&ladder, i, budget)).collect()
}

/// Rung distances, the per-truncation census, and the metric verdict of the
/// unit subdivided ladder.
pub fn ladder_counterexample(rungs: u64, depth: usize, budget: &Budget) -> Result<LadderReport> {
    let ladder = Ladder::subdivided(LengthScheme::Unit)?;
    let g = ball_graph(&ladder, 3 * rungs as usize + 2);
    let mut rows = Vec::new();
    for n in 2..=rungs {
        let p = shortest_path(&g, &VertexId(format!("x{n}")), &VertexId(format!("y{n}")))?;
        rows.push((n, p.length, ladder.rung_edge_count(n)));
    }
    let e = first_rung();
    let levels = subdivided_ladder(depth, budget)?
        .into_iter()
        .skip(1)
        .map(|t| {
            let census = geodetic_census(&t.hat, DEFAULT_CENSUS_CAP)?;
            let without: Vec<&CensusEntry> =
                census.iter().filter(|c| c.geodetic && !c.cycle.edges().contains(&e)).collect();
            Ok(LadderLevel {
                index: t.index,
                cycles: census.len(),
                geodetic: census.iter().filter(|c| c.geodetic).count(),
                geodetic_without_rung: without.len(),
                ladder_cycles_without_rung: without
                    .iter()
                    .filter(|c| !c.cycle.edges().iter().any(|x| t.is_outer(x)))
                    .count(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let verdict = metric_diagnostic(&ladder, depth.max(4), budget)?.verdict;
    Ok(LadderReport { rungs: rows, levels, verdict })
}

/// A chain on the width-4 strip whose cycles run up rails 0 and 2, across
/// the top by an outer edge, and likewise for rails 3 and 1, joined at the
/// bottom by rungs. Its union passes the end twice.
pub fn figure4_chain(h: &Hierarchy, from: usize, to: usize) -> Result<Chain> {
    if from < 2 || to < from {
        return Err(Error::input("figure-4 chain needs 2 <= from <= to"));
    }
    let mut levels = Vec::new();
    for j in from..=to {
        let t = h.truncation(j)?;
        let top = |r: u64| j as u64 + 2 - r;
        let mut vs = Vec::new();
        let mut es = Vec::new();
        let climb = |r: u64, up: bool, vs: &mut Vec<VertexId>, es: &mut Vec<EdgeId>| {
            let levels: Vec<u64> = if up { (1..=top(r)).collect() } else { (1..=top(r)).rev().collect() };
            for (k, &n) in levels.iter().enumerate() {
                vs.push(Strip::vertex(r, n));
                if k + 1 < levels.len() {
                    es.push(Strip::rail_edge(r, n.min(levels[k + 1])));
                }
            }
        };
        climb(0, true, &mut vs, &mut es);
        es.push(outer_edge_id(&Strip::vertex(0, top(0)), &Strip::vertex(2, top(2))));
        climb(2, false, &mut vs, &mut es);
        es.push(Strip::rung_edge(2, 1));
        climb(3, true, &mut vs, &mut es);
        es.push(outer_edge_id(&Strip::vertex(3, top(3)), &Strip::vertex(1, top(1))));
        climb(1, false, &mut vs, &mut es);
        es.push(Strip::rung_edge(0, 1));
        let cycle = Cycle::from_walk(&t.hat, &vs, &es)?;
        let length = cycle.length(&t.hat)?;
        levels.push(ChainLevel { index: j, cycle, length });
    }
    Ok(Chain { levels })
}

/// The width-4 strip hierarchy used by [`figure4_chain`].
pub fn strip_hierarchy(budget: Budget) -> Result<Hierarchy> {
    Ok(Hierarchy::new(Arc::new(Strip::new(4)?), budget))
}

pub fn k4() -> Graph {
    complete_graph(4)
}

pub fn complete_graph(n: usize) -> Graph {
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            edges.push((format!("v{a}"), format!("v{b}")));
        }
    }
    unit_graph(&(0..n).map(|k| format!("v{k}")).collect::<Vec<_>>(), &edges)
}

/// Hub `h` joined to every vertex of a rim cycle `r0 .. r{n-1}`.
pub fn wheel(rim: usize) -> Graph {
    let mut vs = vec!["h".to_string()];
    vs.extend((0..rim).map(|k| format!("r{k}")));
    let mut edges = Vec::new();
    for k in 0..rim {
        edges.push(("h".to_string(), format!("r{k}")));
        edges.push((format!("r{k}"), format!("r{}", (k + 1) % rim)));
    }
    unit_graph(&vs, &edges)
}

/// Two triangles `a0 a1 a2`, `b0 b1 b2` joined by `ak bk`.
pub fn triangular_prism() -> Graph {
    let mut vs = Vec::new();
    let mut edges = Vec::new();
    for k in 0..3 {
        vs.push(format!("a{k}"));
        vs.push(format!("b{k}"));
        edges.push((format!("a{k}"), format!("a{}", (k + 1) % 3)));
        edges.push((format!("b{k}"), format!("b{}", (k + 1) % 3)));
        edges.push((format!("a{k}"), format!("b{k}")));
    }
    unit_graph(&vs, &edges)
}

pub fn cycle_graph(n: usize) -> Graph {
    let vs: Vec<String> = (0..n).map(|k| format!("v{k}")).collect();
    let edges: Vec<(String, String)> = (0..n).map(|k| (vs[k].clone(), vs[(k + 1) % n].clone())).collect();
    unit_graph(&vs, &edges)
}

/// Unit-length graph; edge ids are `u-v`, with `#k` appended to repeats.
pub fn unit_graph(vertices: &[String], edges: &[(String, String)]) -> Graph {
    let mut g = Graph::new();
    for v in vertices {
        g.ensure_vertex(v.as_str());
    }
    let mut seen: BTreeMap<String, usize> = BTreeMap::new();
    for (u, v) in edges {
        let base = format!("{u}-{v}");
        let k = seen.entry(base.clone()).or_default();
        let id = if *k == 0 { base } else { format!("{base}#{k}") };
        *k += 1;
        g.ensure_vertex(u.as_str());
        g.ensure_vertex(v.as_str());
        g.add_edge(Edge::new(id, u.as_str(), v.as_str(), Length::one())).expect("fresh edge");
    }
    g
}

/// Random connected graph: a random spanning tree plus `extra` further
/// edges (parallel edges allowed, no loops), lengths `p/q` with `p` in
/// `1..=9` and `q` in `1..=4`, or all 1 when `unit`.
pub fn random_connected_graph(rng: &mut impl Rng, n: usize, extra: usize, unit: bool) -> Graph {
    let mut g = Graph::new();
    for k in 0..n {
        g.ensure_vertex(format!("v{k}"));
    }
    let len = |rng: &mut dyn rand::RngCore| {
        if unit {
            Length::one()
        } else {
            Length::ratio(rng.gen_range(1..=9), rng.gen_range(1..=4))
        }
    };
    let mut next = 0;
    for k in 1..n {
        let p = rng.gen_range(0..k);
        let l = len(rng);
        g.add_edge(Edge::new(format!("e{next:02}"), format!("v{p}"), format!("v{k}"), l)).expect("tree edge");
        next += 1;
    }
    if n >= 2 {
        for _ in 0..extra {
            let a = rng.gen_range(0..n);
            let mut b = rng.gen_range(0..n - 1);
            if b >= a {
                b += 1;
            }
            let l = len(rng);
            g.add_edge(Edge::new(format!("e{next:02}"), format!("v{a}"), format!("v{b}"), l)).expect("extra edge");
            next += 1;
        }
    }
    g
}
