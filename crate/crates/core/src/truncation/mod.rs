//! Finite approximations of a locally finite graph around a root.
//!
//! For the ball `S_i` of radius `i`, the truncation at `i` consists of
//! `tilde`, the graph on `S_{i+1}` of all edges meeting `S_i`, and `hat`,
//! which adds an outer edge between every two vertices of `S_{i+1} - S_i` in a
//! common component of `G - S_i`. Outer edges carry a certified interval for
//! the distance between their ends; `hat` uses the upper end.

pub mod estimate;
pub mod family;
pub mod ladders;
pub mod spec;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::sync::{Arc, RwLock};

use serde::{Deserialize, Serialize};

use crate::cycle::{Cycle, Path};
use crate::error::{Error, Result};
use crate::graph::{Edge, EdgeId, Graph, VertexId};
use crate::length::Length;

pub use estimate::{
    components_outside, distance_estimate, epsilon_estimate, metric_diagnostic, pair_intervals, Budget,
    EpsilonBound, Interval, MetricReport, Verdict,
};
pub use family::{ball, bfs_order, FamilyEdge, FiniteFamily, GraphFamily};
pub use ladders::{Ladder, LengthScheme, Strip};
pub use spec::FamilySpec;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OuterEdge {
    pub id: EdgeId,
    pub u: VertexId,
    pub v: VertexId,
    pub length: Interval,
}

/// Id of the outer edge joining `u` and `v`.
pub fn outer_edge_id(u: &VertexId, v: &VertexId) -> EdgeId {
    let (a, b) = if u <= v { (u, v) } else { (v, u) };
    EdgeId(format!("outer:{a}~{b}"))
}

#[derive(Clone, Debug)]
pub struct Truncation {
    pub index: usize,
    /// `S_i`.
    pub inner: BTreeSet<VertexId>,
    /// `S_{i+1}`.
    pub vertices: BTreeSet<VertexId>,
    /// `S_{i+1} - S_i`, grouped by component of `G - S_i`.
    pub boundary_classes: Vec<BTreeSet<VertexId>>,
    pub tilde: Graph,
    pub hat: Graph,
    pub outer: BTreeMap<EdgeId, OuterEdge>,
}

impl Truncation {
    pub fn boundary(&self) -> impl Iterator<Item = &VertexId> {
        self.boundary_classes.iter().flatten()
    }

    pub fn is_outer(&self, e: &EdgeId) -> bool {
        self.outer.contains_key(e)
    }

    /// Length interval of an edge of `hat`.
    pub fn edge_interval(&self, e: &EdgeId) -> Result<Interval> {
        match self.outer.get(e) {
            Some(o) => Ok(o.length.clone()),
            None => Ok(Interval::exact(self.tilde.length_of(e)?.clone())),
        }
    }

    /// Length interval of a set of `hat` edges.
    pub fn interval_length<'a>(&self, edges: impl IntoIterator<Item = &'a EdgeId>) -> Result<Interval> {
        let mut acc = Interval::zero();
        for e in edges {
            acc = &acc + &self.edge_interval(e)?;
        }
        Ok(acc)
    }

    /// Graph-core JSON with outer edges flagged and their intervals spelled out.
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Doc<'a> {
            index: usize,
            vertices: &'a [VertexId],
            edges: Vec<serde_json::Value>,
        }
        let edges = self
            .hat
            .edges()
            .iter()
            .map(|e| match self.outer.get(&e.id) {
                Some(o) => serde_json::json!({
                    "id": e.id, "u": e.u, "v": e.v, "outer": true,
                    "len": [o.length.lo.to_string(), o.length.hi.to_string()],
                }),
                None => serde_json::json!({"id": e.id, "u": e.u, "v": e.v, "len": e.length.to_string()}),
            })
            .collect();
        let doc = Doc { index: self.index, vertices: self.hat.vertices(), edges };
        serde_json::to_string_pretty(&doc).expect("serializable")
    }

    /// DOT rendering; outer edges are dashed and labelled with their interval.
    pub fn to_dot(&self) -> String {
        let mut out = format!("graph truncation_{} {{\n", self.index);
        for v in self.hat.vertices() {
            let shape = if self.inner.contains(v) { "circle" } else { "box" };
            let _ = writeln!(out, "  \"{v}\" [shape={shape}];");
        }
        for e in self.hat.edges() {
            match self.outer.get(&e.id) {
                Some(o) => {
                    let label = if o.length.is_exact() {
                        o.length.hi.to_string()
                    } else {
                        format!("[{}, {}]", o.length.lo, o.length.hi)
                    };
                    let _ = writeln!(out, "  \"{}\" -- \"{}\" [style=dashed, label=\"{label}\"];", e.u, e.v);
                }
                None => {
                    let _ = writeln!(out, "  \"{}\" -- \"{}\" [label=\"{}\"];", e.u, e.v, e.length);
                }
            }
        }
        out.push_str("}\n");
        out
    }
}

/// Builds the truncation at `i`.
pub fn build_truncation(f: &dyn GraphFamily, i: usize, budget: &Budget) -> Result<Truncation> {
    let order = bfs_order(f, i + 1);
    let inner = ball(f, i);
    let vertices: BTreeSet<VertexId> = order.iter().cloned().collect();
    let tilde = family::materialize(f, &order, |u, v| inner.contains(u) || inner.contains(v));

    let boundary: BTreeSet<VertexId> = vertices.difference(&inner).cloned().collect();
    let boundary_classes =
        if boundary.is_empty() { Vec::new() } else { components_outside(f, i, &boundary, budget)? };

    let mut pairs = Vec::new();
    for class in &boundary_classes {
        for (k, u) in class.iter().enumerate() {
            for v in class.iter().skip(k + 1) {
                pairs.push((u.clone(), v.clone()));
            }
        }
    }
    let lengths = pair_intervals(f, &pairs, budget)?;

    let mut hat = tilde.clone();
    let mut outer = BTreeMap::new();
    for ((u, v), length) in pairs.into_iter().zip(lengths) {
        if !length.lo.is_positive() {
            return Err(Error::certification(format!("outer edge {u}~{v} has no positive lower bound")));
        }
        let id = outer_edge_id(&u, &v);
        hat.add_edge(Edge::new(id.clone(), u.clone(), v.clone(), length.hi.clone()))?;
        outer.insert(id.clone(), OuterEdge { id, u, v, length });
    }
    Ok(Truncation { index: i, inner, vertices, boundary_classes, tilde, hat, outer })
}

/// The induced subgraph of `G` on the ball of radius `r`, for hosting cycles
/// of the family itself.
pub fn ball_graph(f: &dyn GraphFamily, r: usize) -> Graph {
    let order = bfs_order(f, r);
    family::materialize(f, &order, |_, _| true)
}

/// A closed walk or path in some host graph, given by its vertex and edge
/// sequences. For a closed walk the last edge returns to the first vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Walk {
    pub vertices: Vec<VertexId>,
    pub edges: Vec<EdgeId>,
    pub closed: bool,
}

impl From<&Cycle> for Walk {
    fn from(c: &Cycle) -> Walk {
        Walk { vertices: c.vertices().to_vec(), edges: c.edges().to_vec(), closed: true }
    }
}

impl From<&Path> for Walk {
    fn from(p: &Path) -> Walk {
        Walk { vertices: p.vertices.clone(), edges: p.edges.clone(), closed: false }
    }
}

/// Restriction of a walk to `t.hat`: edges of `hat` between consecutive
/// vertices of `S_{i+1}` are kept and every excursion between two such
/// vertices is replaced by their outer edge. `None` when the walk avoids
/// `S_i`. The result is a walk of `t.hat` (vertices, edges).
fn restrict_walk(w: &Walk, t: &Truncation) -> Result<Option<(Vec<VertexId>, Vec<EdgeId>)>> {
    if !w.vertices.iter().any(|v| t.inner.contains(v)) {
        return Ok(None);
    }
    let n = w.vertices.len();
    let anchors: Vec<usize> = (0..n).filter(|&k| t.vertices.contains(&w.vertices[k])).collect();
    let mut vertices = Vec::new();
    let mut edges = Vec::new();
    let segments = if w.closed { anchors.len() } else { anchors.len() - 1 };
    for s in 0..segments {
        let a = anchors[s];
        let b = anchors[(s + 1) % anchors.len()];
        let steps = if b > a { b - a } else { b + n - a };
        let (va, vb) = (&w.vertices[a], &w.vertices[b]);
        vertices.push(va.clone());
        if steps == 1 && t.hat.has_edge(&w.edges[a]) {
            edges.push(w.edges[a].clone());
            continue;
        }
        let id = outer_edge_id(va, vb);
        if va == vb || !t.outer.contains_key(&id) {
            return Err(Error::contract(format!(
                "malformed host: excursion from {va} to {vb} has no outer edge in truncation {}",
                t.index
            )));
        }
        edges.push(id);
    }
    if !w.closed {
        vertices.push(w.vertices[*anchors.last().expect("meets S_i")].clone());
    }
    Ok(Some((vertices, edges)))
}

/// Restriction of a cycle to the truncation; a cycle restricts to a cycle.
pub fn restrict_cycle(c: &Cycle, t: &Truncation) -> Result<Option<Cycle>> {
    restrict_closed_walk(&Walk::from(c), t)
}

/// Restriction of a cycle given as a closed walk of any host, for instance a
/// cycle of the family itself.
pub fn restrict_closed_walk(w: &Walk, t: &Truncation) -> Result<Option<Cycle>> {
    if !w.closed {
        return Err(Error::input("expected a closed walk"));
    }
    let Some((vertices, edges)) = restrict_walk(w, t)? else { return Ok(None) };
    Cycle::from_walk(&t.hat, &vertices, &edges)
        .map(Some)
        .map_err(|e| Error::contract(format!("restriction is not a cycle: {e}")))
}

/// Restriction of a path; leading and trailing excursions beyond `S_{i+1}`
/// are dropped.
pub fn restrict_path(p: &Path, t: &Truncation) -> Result<Option<Path>> {
    let Some((vertices, edges)) = restrict_walk(&Walk::from(p), t)? else { return Ok(None) };
    let length = t.interval_length(&edges)?.hi;
    Ok(Some(Path { vertices, edges, length }))
}

/// Length interval of a set of edges living in `host`, which is either the
/// family itself (edges exact) or a truncation (outer edges as intervals).
pub fn host_interval<'a>(
    host: Option<&Truncation>,
    g: &Graph,
    edges: impl IntoIterator<Item = &'a EdgeId>,
) -> Result<Interval> {
    let mut acc = Interval::zero();
    for e in edges {
        let iv = match host {
            Some(t) => t.edge_interval(e)?,
            None => Interval::exact(g.length_of(e)?.clone()),
        };
        acc = &acc + &iv;
    }
    Ok(acc)
}

/// Truncations of one family built on demand and shared between readers.
pub struct Hierarchy {
    family: Arc<dyn GraphFamily>,
    budget: Budget,
    cache: RwLock<BTreeMap<usize, Arc<Truncation>>>,
    epsilons: RwLock<BTreeMap<usize, EpsilonBound>>,
}

impl Hierarchy {
    pub fn new(family: Arc<dyn GraphFamily>, budget: Budget) -> Self {
        Hierarchy { family, budget, cache: RwLock::new(BTreeMap::new()), epsilons: RwLock::new(BTreeMap::new()) }
    }

    pub fn family(&self) -> &dyn GraphFamily {
        self.family.as_ref()
    }

    pub fn budget(&self) -> &Budget {
        &self.budget
    }

    pub fn truncation(&self, i: usize) -> Result<Arc<Truncation>> {
        if let Some(t) = self.cache.read().expect("cache lock").get(&i) {
            return Ok(Arc::clone(t));
        }
        let built = Arc::new(build_truncation(self.family.as_ref(), i, &self.budget)?);
        let mut cache = self.cache.write().expect("cache lock");
        Ok(Arc::clone(cache.entry(i).or_insert(built)))
    }

    pub fn epsilon(&self, i: usize) -> Result<EpsilonBound> {
        if let Some(b) = self.epsilons.read().expect("cache lock").get(&i) {
            return Ok(b.clone());
        }
        let b = epsilon_estimate(self.family.as_ref(), i, &self.budget)?;
        self.epsilons.write().expect("cache lock").insert(i, b.clone());
        Ok(b)
    }

    /// Finite upper bound on ε_i, required by the short decomposition.
    pub fn epsilon_hi(&self, i: usize) -> Result<Length> {
        self.epsilon(i)?
            .hi
            .ok_or_else(|| Error::certification(format!("no finite upper bound on epsilon_{i} for {}", self.family.name())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(set: &BTreeSet<VertexId>) -> Vec<&str> {
        set.iter().map(VertexId::as_str).collect()
    }

    #[test]
    fn ball_zero_is_root() {
        let l = Ladder::new(LengthScheme::Unit);
        assert_eq!(names(&ball(&l, 0)), ["x1"]);
    }

    #[test]
    fn ladder_level_two_has_one_outer_edge() {
        let l = Ladder::new(LengthScheme::Unit);
        let t = build_truncation(&l, 2, &Budget::default()).unwrap();
        assert_eq!(t.boundary_classes.len(), 1);
        assert_eq!(t.outer.len(), 1);
        let o = t.outer.values().next().unwrap();
        assert_eq!((o.u.as_str(), o.v.as_str()), ("x4", "y3"));
        assert_eq!(o.length, Interval::exact(Length::integer(2)));
    }

    #[test]
    fn finite_exhaustion_has_no_outer_edges() {
        let mut g = Graph::new();
        for (id, u, v) in [("ab", "a", "b"), ("bc", "b", "c"), ("ca", "c", "a"), ("cd", "c", "d")] {
            g.ensure_vertex(u);
            g.ensure_vertex(v);
            g.add_edge(Edge::new(id, u, v, Length::one())).unwrap();
        }
        let f = FiniteFamily::new(g.clone(), "a".into()).unwrap();
        let t = build_truncation(&f, 3, &Budget::default()).unwrap();
        assert!(t.outer.is_empty());
        assert_eq!(t.hat, t.tilde);
        assert_eq!(t.hat.edge_count(), 4);
    }

    #[test]
    fn nst_outer_edge_uses_closed_form() {
        let l = Ladder::new(LengthScheme::Nst);
        let t = build_truncation(&l, 3, &Budget::default()).unwrap();
        for o in t.outer.values() {
            assert!(o.length.is_exact());
            assert_eq!(Some(o.length.hi.clone()), l.analytic_distance(&o.u, &o.v));
        }
        assert!(!t.outer.is_empty());
    }

    #[test]
    fn cycle_inside_tilde_restricts_to_itself() {
        let l = Ladder::new(LengthScheme::Unit);
        let t = build_truncation(&l, 2, &Budget::default()).unwrap();
        let sq = Cycle::from_edge_set(&t.tilde, &l.square(1).into_iter().collect()).unwrap();
        assert_eq!(restrict_cycle(&sq, &t).unwrap(), Some(sq));
    }

    #[test]
    fn far_cycle_restricts_to_nothing() {
        let l = Ladder::new(LengthScheme::Unit);
        let g = ball_graph(&l, 12);
        let t = build_truncation(&l, 2, &Budget::default()).unwrap();
        let sq = Cycle::from_edge_set(&g, &l.square(8).into_iter().collect()).unwrap();
        assert_eq!(restrict_cycle(&sq, &t).unwrap(), None);
    }
}
