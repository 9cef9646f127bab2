//! Exact shortest paths, geodetic testing and shortcut extraction.
//!
//! Witness paths are deterministic: among all shortest paths the one whose
//! edge-id sequence is lexicographically least is returned.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use serde::Serialize;

use crate::cycle::{Cycle, Path};
use crate::error::{Error, Result};
use crate::graph::{EdgeId, Graph, VertexId};
use crate::length::Length;

/// Single-source exact distances by vertex index; `None` marks unreachable.
pub fn single_source(g: &Graph, source: usize) -> Vec<Option<Length>> {
    let mut dist: Vec<Option<Length>> = vec![None; g.vertex_count()];
    let mut heap = BinaryHeap::new();
    dist[source] = Some(Length::zero());
    heap.push(Reverse((Length::zero(), source)));
    while let Some(Reverse((d, x))) = heap.pop() {
        if dist[x].as_ref().is_some_and(|best| &d > best) {
            continue;
        }
        for &e in g.incident(x) {
            let y = g.opposite(e, x);
            let cand = &d + &g.edge_at(e).length;
            if dist[y].as_ref().is_none_or(|cur| &cand < cur) {
                dist[y] = Some(cand.clone());
                heap.push(Reverse((cand, y)));
            }
        }
    }
    dist
}

/// Greedy reconstruction of the lexicographically least shortest path, given
/// distances from `x` and to `y`.
fn least_path(
    g: &Graph,
    x: usize,
    y: usize,
    from_x: &[Option<Length>],
    to_y: &[Option<Length>],
) -> Path {
    let total = from_x[y].clone().expect("reachable");
    let mut vertices = vec![g.vertex_at(x).clone()];
    let mut edges = Vec::new();
    let mut cur = x;
    while cur != y {
        let dc = from_x[cur].as_ref().expect("on a shortest path");
        let (e, next) = g
            .incident(cur)
            .iter()
            .copied()
            .map(|e| (e, g.opposite(e, cur)))
            .find(|&(e, w)| {
                w != cur
                    && from_x[w].as_ref() == Some(&(dc + &g.edge_at(e).length))
                    && to_y[w].as_ref().is_some_and(|t| from_x[w].as_ref().map(|f| f + t).as_ref() == Some(&total))
            })
            .expect("shortest path continues");
        edges.push(g.edge_at(e).id.clone());
        vertices.push(g.vertex_at(next).clone());
        cur = next;
    }
    Path { vertices, edges, length: total }
}

/// Shortest `x`–`y` path with lexicographically least edge-id sequence among
/// all shortest paths.
pub fn shortest_path(g: &Graph, x: &VertexId, y: &VertexId) -> Result<Path> {
    let xi = g.vertex_idx(x)?;
    let yi = g.vertex_idx(y)?;
    let from_x = single_source(g, xi);
    if from_x[yi].is_none() {
        return Err(Error::NoPath { from: x.to_string(), to: y.to_string() });
    }
    let to_y = single_source(g, yi);
    Ok(least_path(g, xi, yi, &from_x, &to_y))
}

/// All-pairs exact distances of a finite graph; witness paths are rebuilt on
/// demand from the distance table.
#[derive(Clone, Debug)]
pub struct DistanceOracle<'g> {
    graph: &'g Graph,
    table: Vec<Vec<Option<Length>>>,
}

pub fn all_pairs(g: &Graph) -> DistanceOracle<'_> {
    let table = (0..g.vertex_count()).map(|s| single_source(g, s)).collect();
    DistanceOracle { graph: g, table }
}

impl<'g> DistanceOracle<'g> {
    pub fn graph(&self) -> &'g Graph {
        self.graph
    }

    pub fn distance_idx(&self, x: usize, y: usize) -> Option<&Length> {
        self.table[x][y].as_ref()
    }

    pub fn distance(&self, x: &VertexId, y: &VertexId) -> Result<Option<&Length>> {
        Ok(self.distance_idx(self.graph.vertex_idx(x)?, self.graph.vertex_idx(y)?))
    }

    pub fn path(&self, x: &VertexId, y: &VertexId) -> Result<Path> {
        let xi = self.graph.vertex_idx(x)?;
        let yi = self.graph.vertex_idx(y)?;
        if self.table[xi][yi].is_none() {
            return Err(Error::NoPath { from: x.to_string(), to: y.to_string() });
        }
        Ok(least_path(self.graph, xi, yi, &self.table[xi], &self.table[yi]))
    }
}

/// Arc lengths of a cycle: `prefix[k]` is the length walked from
/// `vertices[0]` to `vertices[k]`, and `total` the cycle length.
struct Arcs {
    index: Vec<usize>,
    prefix: Vec<Length>,
    total: Length,
}

impl Arcs {
    fn new(g: &Graph, c: &Cycle) -> Result<Arcs> {
        let index = c.vertices().iter().map(|v| g.vertex_idx(v)).collect::<Result<Vec<_>>>()?;
        let mut prefix = Vec::with_capacity(c.len() + 1);
        let mut acc = Length::zero();
        prefix.push(acc.clone());
        for e in c.edges() {
            acc += g.length_of(e)?;
            prefix.push(acc.clone());
        }
        let total = prefix.pop().expect("nonempty");
        Ok(Arcs { index, prefix, total })
    }

    /// The two arc lengths between positions `a < b`.
    fn between(&self, a: usize, b: usize) -> (Length, Length) {
        let forward = &self.prefix[b] - &self.prefix[a];
        let backward = &self.total - &forward;
        (forward, backward)
    }
}

/// Vertex-pair geodesy test against a prebuilt oracle.
pub fn is_geodetic_with(oracle: &DistanceOracle<'_>, c: &Cycle) -> Result<bool> {
    let arcs = Arcs::new(oracle.graph(), c)?;
    let n = arcs.index.len();
    for a in 0..n {
        for b in a + 1..n {
            let (f, r) = arcs.between(a, b);
            let shorter = if f <= r { f } else { r };
            match oracle.distance_idx(arcs.index[a], arcs.index[b]) {
                Some(d) if *d < shorter => return Ok(false),
                _ => {}
            }
        }
    }
    Ok(true)
}

pub fn is_geodetic(g: &Graph, c: &Cycle) -> Result<bool> {
    is_geodetic_with(&all_pairs(g), c)
}

/// A path between two cycle vertices, internally disjoint from the cycle and
/// strictly shorter than both arcs of the cycle between its ends.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Shortcut {
    pub x: VertexId,
    pub y: VertexId,
    pub path: Path,
    /// Arc from `x` to `y` in the cycle's stored orientation.
    pub arc_forward: Vec<EdgeId>,
    pub arc_backward: Vec<EdgeId>,
    pub arc_forward_length: Length,
    pub arc_backward_length: Length,
}

pub fn find_shortcut(g: &Graph, c: &Cycle) -> Result<Option<Shortcut>> {
    find_shortcut_with(&all_pairs(g), c)
}

/// Shortcut search: scan vertex pairs by increasing positive gap between the
/// shorter arc and the distance, take the witness path of the first pair, cut
/// it at its cycle vertices and return the first piece beating both arcs.
pub fn find_shortcut_with(oracle: &DistanceOracle<'_>, c: &Cycle) -> Result<Option<Shortcut>> {
    let g = oracle.graph();
    let arcs = Arcs::new(g, c)?;
    let n = arcs.index.len();
    let mut best: Option<(Length, usize, usize)> = None;
    for a in 0..n {
        for b in a + 1..n {
            let (f, r) = arcs.between(a, b);
            let shorter = if f <= r { f } else { r };
            if let Some(d) = oracle.distance_idx(arcs.index[a], arcs.index[b]) {
                if d < &shorter {
                    let gap = &shorter - d;
                    if best.as_ref().is_none_or(|(bg, _, _)| &gap < bg) {
                        best = Some((gap, a, b));
                    }
                }
            }
        }
    }
    let Some((_, a, b)) = best else { return Ok(None) };
    let witness = oracle.path(&c.vertices()[a], &c.vertices()[b])?;
    let position: HashMap<&VertexId, usize> = c.vertices().iter().enumerate().map(|(k, v)| (v, k)).collect();

    let mut seg_start = 0usize;
    for k in 1..witness.vertices.len() {
        let Some(&q) = position.get(&witness.vertices[k]) else { continue };
        let p = position[&witness.vertices[seg_start]];
        let seg_edges = witness.edges[seg_start..k].to_vec();
        let seg_len = seg_edges.iter().map(|e| g.length_of(e).cloned()).sum::<Result<Length>>()?;
        let (lo, hi) = if p < q { (p, q) } else { (q, p) };
        let (f, r) = arcs.between(lo, hi);
        if seg_len < f && seg_len < r {
            return Ok(Some(build_shortcut(c, p, q, witness.vertices[seg_start..=k].to_vec(), seg_edges, seg_len, &arcs)));
        }
        seg_start = k;
    }
    Err(Error::contract("no witness segment beats its arcs; distance table inconsistent"))
}

fn build_shortcut(
    c: &Cycle,
    p: usize,
    q: usize,
    vertices: Vec<VertexId>,
    edges: Vec<EdgeId>,
    length: Length,
    arcs: &Arcs,
) -> Shortcut {
    let n = c.len();
    // Forward arc walks the stored orientation from position p to q.
    let forward: Vec<EdgeId> = (0..(q + n - p) % n).map(|k| c.edges()[(p + k) % n].clone()).collect();
    let backward: Vec<EdgeId> = (0..(p + n - q) % n).map(|k| c.edges()[(q + k) % n].clone()).collect();
    let (lo, hi) = if p < q { (p, q) } else { (q, p) };
    let (f, r) = arcs.between(lo, hi);
    let (fl, bl) = if p < q { (f, r) } else { (r, f) };
    Shortcut {
        x: c.vertices()[p].clone(),
        y: c.vertices()[q].clone(),
        path: Path { vertices, edges, length },
        arc_forward: forward,
        arc_backward: backward,
        arc_forward_length: fl,
        arc_backward_length: bl,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::edgeset::EdgeSet;
    use crate::graph::Edge;

    fn graph(edges: &[(&str, &str, &str, Length)]) -> Graph {
        let mut g = Graph::new();
        for (id, u, v, l) in edges {
            g.ensure_vertex(*u);
            g.ensure_vertex(*v);
            g.add_edge(Edge::new(*id, *u, *v, l.clone())).unwrap();
        }
        g
    }

    fn one() -> Length {
        Length::one()
    }

    fn k4_unit() -> Graph {
        graph(&[
            ("ab", "a", "b", one()), ("ac", "a", "c", one()), ("ad", "a", "d", one()),
            ("bc", "b", "c", one()), ("bd", "b", "d", one()), ("cd", "c", "d", one()),
        ])
    }

    fn cyc(g: &Graph, ids: &[&str]) -> Cycle {
        Cycle::from_edge_set(g, &ids.iter().copied().collect::<EdgeSet>()).unwrap()
    }

    #[test]
    fn path_graph_distances() {
        let g = graph(&[("ab", "a", "b", one()), ("bc", "b", "c", Length::integer(2))]);
        let o = all_pairs(&g);
        assert_eq!(o.distance(&"a".into(), &"c".into()).unwrap(), Some(&Length::integer(3)));
        assert_eq!(o.distance(&"b".into(), &"b".into()).unwrap(), Some(&Length::zero()));
    }

    #[test]
    fn ties_break_lexicographically() {
        // Two shortest a-d routes: via b (edges "a1","b1") and via c ("a0","c9").
        let g = graph(&[
            ("a1", "a", "b", one()), ("b1", "b", "d", one()),
            ("a0", "a", "c", one()), ("c9", "c", "d", one()),
        ]);
        let p = shortest_path(&g, &"a".into(), &"d".into()).unwrap();
        assert_eq!(p.edges, vec![EdgeId::from("a0"), EdgeId::from("c9")]);
        let q = all_pairs(&g).path(&"a".into(), &"d".into()).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn disconnected_pair_errors() {
        let mut g = graph(&[("ab", "a", "b", one())]);
        g.add_vertex("z").unwrap();
        assert!(matches!(shortest_path(&g, &"a".into(), &"z".into()), Err(Error::NoPath { .. })));
    }

    #[test]
    fn triangle_is_geodetic_without_shortcut() {
        let g = graph(&[("ab", "a", "b", one()), ("bc", "b", "c", one()), ("ca", "c", "a", one())]);
        let c = cyc(&g, &["ab", "bc", "ca"]);
        assert!(is_geodetic(&g, &c).unwrap());
        assert_eq!(find_shortcut(&g, &c).unwrap(), None);
        assert_eq!(shortest_path(&g, &"a".into(), &"b".into()).unwrap().length, one());
    }

    #[test]
    fn k4_four_cycle_has_chord_shortcut() {
        let g = k4_unit();
        let c = cyc(&g, &["ab", "bc", "cd", "ad"]);
        assert!(!is_geodetic(&g, &c).unwrap());
        let s = find_shortcut(&g, &c).unwrap().unwrap();
        assert_eq!(s.path.edges.len(), 1);
        assert!(["ac", "bd"].contains(&s.path.edges[0].as_str()));
        assert_eq!(s.path.length, one());
        assert_eq!(s.arc_forward_length, Length::integer(2));
        assert_eq!(s.arc_backward_length, Length::integer(2));
    }

    #[test]
    fn shorter_parallel_edge_is_a_shortcut() {
        let g = graph(&[
            ("e1", "a", "b", Length::integer(3)),
            ("e2", "b", "c", one()),
            ("e3", "c", "a", one()),
            ("p", "a", "b", one()),
        ]);
        let c = cyc(&g, &["e1", "e2", "e3"]);
        let s = find_shortcut(&g, &c).unwrap().unwrap();
        assert_eq!(s.path.edges, vec![EdgeId::from("p")]);
    }
}
