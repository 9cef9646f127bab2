//! Cycles, paths, and the cycle space of a finite multigraph.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::edgeset::EdgeSet;
use crate::error::{Error, Result};
use crate::graph::{EdgeId, Graph, VertexId};
use crate::length::Length;

/// A cycle stored as a cyclic sequence: `edges[k]` joins `vertices[k]` and
/// `vertices[(k + 1) % n]`.
///
/// Cycles are kept in canonical form (least edge id first, then the direction
/// whose second edge is smaller), so two cycles are equal exactly when their
/// edge sets are.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Cycle {
    vertices: Vec<VertexId>,
    edges: Vec<EdgeId>,
}

impl Cycle {
    /// Builds the cycle whose edge set is `set`. Fails unless the edges form
    /// one connected 2-regular subgraph (a loop or a parallel pair count).
    pub fn from_edge_set(g: &Graph, set: &EdgeSet) -> Result<Cycle> {
        if set.is_empty() {
            return Err(Error::input("empty edge set is not a cycle"));
        }
        let idx: Vec<usize> = set.iter().map(|e| g.edge_idx(e)).collect::<Result<_>>()?;
        if idx.len() == 1 {
            let (u, v) = g.ends_at(idx[0]);
            if u != v {
                return Err(Error::input(format!("edge {} alone is not a cycle", g.edge_at(idx[0]).id)));
            }
            return Ok(Cycle {
                vertices: vec![g.vertex_at(u).clone()],
                edges: vec![g.edge_at(idx[0]).id.clone()],
            });
        }
        let mut by_vertex: HashMap<usize, Vec<usize>> = HashMap::new();
        for &e in &idx {
            let (u, v) = g.ends_at(e);
            if u == v {
                return Err(Error::input("a loop cannot be part of a longer cycle"));
            }
            by_vertex.entry(u).or_default().push(e);
            by_vertex.entry(v).or_default().push(e);
        }
        if by_vertex.values().any(|es| es.len() != 2) {
            return Err(Error::input("edge set is not 2-regular"));
        }
        let start_edge = idx[0];
        let (start, _) = g.ends_at(start_edge);
        let mut vertices = vec![start];
        let mut edges = vec![start_edge];
        let mut cur = g.opposite(start_edge, start);
        let mut last = start_edge;
        while cur != start {
            let next = by_vertex[&cur].iter().copied().find(|&e| e != last).expect("degree two");
            vertices.push(cur);
            edges.push(next);
            last = next;
            cur = g.opposite(next, cur);
        }
        if edges.len() != idx.len() {
            return Err(Error::input("edge set is not connected"));
        }
        Ok(Cycle::canonical(g, vertices, edges))
    }

    /// Builds a cycle from a closed walk given as vertex and edge sequences,
    /// validating incidence and that no vertex repeats.
    pub fn from_walk(g: &Graph, vertices: &[VertexId], edges: &[EdgeId]) -> Result<Cycle> {
        if vertices.len() != edges.len() || edges.is_empty() {
            return Err(Error::input("closed walk needs as many vertices as edges"));
        }
        let vi: Vec<usize> = vertices.iter().map(|v| g.vertex_idx(v)).collect::<Result<_>>()?;
        let ei: Vec<usize> = edges.iter().map(|e| g.edge_idx(e)).collect::<Result<_>>()?;
        let n = vi.len();
        let mut seen = std::collections::HashSet::new();
        if !vi.iter().all(|v| seen.insert(*v)) {
            return Err(Error::input("closed walk repeats a vertex"));
        }
        let mut eseen = std::collections::HashSet::new();
        if !ei.iter().all(|e| eseen.insert(*e)) {
            return Err(Error::input("closed walk repeats an edge"));
        }
        for k in 0..n {
            let (a, b) = g.ends_at(ei[k]);
            let (x, y) = (vi[k], vi[(k + 1) % n]);
            if !((a == x && b == y) || (a == y && b == x)) {
                return Err(Error::input(format!("edge {} does not join {} and {}", edges[k], vertices[k], vertices[(k + 1) % n])));
            }
        }
        Ok(Cycle::canonical(g, vi, ei))
    }

    fn canonical(g: &Graph, vertices: Vec<usize>, edges: Vec<usize>) -> Cycle {
        let n = edges.len();
        let ids: Vec<&EdgeId> = edges.iter().map(|&e| &g.edge_at(e).id).collect();
        let first = (0..n).min_by_key(|&k| ids[k]).expect("nonempty");
        let forward = n <= 2 || ids[(first + 1) % n] < ids[(first + n - 1) % n];
        let (vs, es): (Vec<usize>, Vec<usize>) = if n == 2 {
            // Both orientations use the same edge order; start at the lesser vertex.
            let (a, b) = (vertices[0], vertices[1]);
            let (s, t) = if g.vertex_at(a) <= g.vertex_at(b) { (a, b) } else { (b, a) };
            (vec![s, t], vec![edges[first], edges[(first + 1) % 2]])
        } else if forward {
            ((0..n).map(|k| vertices[(first + k) % n]).collect(), (0..n).map(|k| edges[(first + k) % n]).collect())
        } else {
            // Reverse traversal: edge `first` is walked from vertices[first + 1].
            (
                (0..n).map(|k| vertices[(first + 1 + n - k) % n]).collect(),
                (0..n).map(|k| edges[(first + n - k) % n]).collect(),
            )
        };
        Cycle {
            vertices: vs.into_iter().map(|v| g.vertex_at(v).clone()).collect(),
            edges: es.into_iter().map(|e| g.edge_at(e).id.clone()).collect(),
        }
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn edges(&self) -> &[EdgeId] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn edge_set(&self) -> EdgeSet {
        self.edges.iter().cloned().collect()
    }

    pub fn contains_vertex(&self, v: &VertexId) -> bool {
        self.vertices.contains(v)
    }

    pub fn length(&self, g: &Graph) -> Result<Length> {
        self.edges.iter().map(|e| g.length_of(e).cloned()).sum::<Result<Length>>()
    }

    /// Re-validates the cycle against a (possibly different) host graph.
    pub fn check_in(&self, g: &Graph) -> Result<()> {
        Cycle::from_walk(g, &self.vertices, &self.edges).map(|_| ())
    }
}

/// A path as a vertex sequence with the edges between consecutive vertices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Path {
    pub vertices: Vec<VertexId>,
    pub edges: Vec<EdgeId>,
    pub length: Length,
}

impl Path {
    pub fn trivial(v: VertexId) -> Path {
        Path { vertices: vec![v], edges: Vec::new(), length: Length::zero() }
    }

    pub fn start(&self) -> &VertexId {
        &self.vertices[0]
    }

    pub fn end(&self) -> &VertexId {
        self.vertices.last().expect("nonempty path")
    }

    pub fn edge_set(&self) -> EdgeSet {
        self.edges.iter().cloned().collect()
    }

    pub fn reversed(&self) -> Path {
        let mut p = self.clone();
        p.vertices.reverse();
        p.edges.reverse();
        p
    }
}

/// Even-degree test: every vertex meets an even number of edges of `x`,
/// loops counting twice.
pub fn is_cycle_space_member(g: &Graph, x: &EdgeSet) -> Result<bool> {
    let mut parity: BTreeMap<usize, bool> = BTreeMap::new();
    for e in x {
        let (u, v) = g.ends_at(g.edge_idx(e)?);
        if u != v {
            *parity.entry(u).or_default() ^= true;
            *parity.entry(v).or_default() ^= true;
        }
    }
    Ok(parity.values().all(|odd| !odd))
}

/// Splits an element of the cycle space into pairwise edge-disjoint cycles.
///
/// Walks start at the first vertex (in graph order) still carrying unused
/// edges and always leave by the least unused edge id; the walk closes a
/// cycle at the first repeated vertex, after which it restarts.
pub fn decompose_into_circuits(g: &Graph, x: &EdgeSet) -> Result<Vec<Cycle>> {
    if !is_cycle_space_member(g, x)? {
        return Err(Error::contract("edge set is not an element of the cycle space"));
    }
    let mut unused = vec![false; g.edge_count()];
    let mut remaining = 0usize;
    for e in x {
        unused[g.edge_idx(e)?] = true;
        remaining += 1;
    }
    let mut cycles = Vec::new();
    while remaining > 0 {
        let start = (0..g.vertex_count())
            .find(|&v| g.incident(v).iter().any(|&e| unused[e]))
            .expect("an unused edge has an endpoint");
        let mut walk_vertices = vec![start];
        let mut walk_edges: Vec<usize> = Vec::new();
        let mut position: HashMap<usize, usize> = HashMap::from([(start, 0)]);
        loop {
            let cur = *walk_vertices.last().expect("nonempty walk");
            let last = walk_edges.last().copied();
            let e = g
                .incident(cur)
                .iter()
                .copied()
                .find(|&e| unused[e] && Some(e) != last)
                .ok_or_else(|| Error::contract("walk stuck; parity invariant broken"))?;
            let next = g.opposite(e, cur);
            walk_edges.push(e);
            if let Some(&p) = position.get(&next) {
                let vs: Vec<usize> = walk_vertices[p..].to_vec();
                let es: Vec<usize> = walk_edges[p..].to_vec();
                for &c in &es {
                    unused[c] = false;
                    remaining -= 1;
                }
                cycles.push(Cycle::canonical(g, vs, es));
                break;
            }
            position.insert(next, walk_vertices.len());
            walk_vertices.push(next);
        }
    }
    Ok(cycles)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::edgeset::symmetric_sum;
    use crate::graph::Edge;

    fn unit(edges: &[(&str, &str, &str)]) -> Graph {
        let mut g = Graph::new();
        for (id, u, v) in edges {
            g.ensure_vertex(*u);
            g.ensure_vertex(*v);
            g.add_edge(Edge::new(*id, *u, *v, Length::one())).unwrap();
        }
        g
    }

    fn set(ids: &[&str]) -> EdgeSet {
        ids.iter().copied().collect()
    }

    #[test]
    fn triangle_is_member_theta_is_not() {
        let k3 = unit(&[("ab", "a", "b"), ("bc", "b", "c"), ("ca", "c", "a")]);
        assert!(is_cycle_space_member(&k3, &set(&["ab", "bc", "ca"])).unwrap());
        let theta = unit(&[("p1", "s", "t"), ("p2a", "s", "m"), ("p2b", "m", "t"), ("p3a", "s", "n"), ("p3b", "n", "t")]);
        assert!(!is_cycle_space_member(&theta, &set(&["p1", "p2a", "p2b", "p3a", "p3b"])).unwrap());
    }

    #[test]
    fn unknown_edge_is_input_error() {
        let k3 = unit(&[("ab", "a", "b")]);
        assert!(matches!(is_cycle_space_member(&k3, &set(&["zz"])), Err(Error::Input(_))));
    }

    #[test]
    fn loops_count_twice() {
        let g = unit(&[("l", "a", "a"), ("ab", "a", "b")]);
        assert!(is_cycle_space_member(&g, &set(&["l"])).unwrap());
        let parts = decompose_into_circuits(&g, &set(&["l"])).unwrap();
        assert_eq!(parts.len(), 1);
        assert_eq!(parts[0].edges(), &[EdgeId::from("l")]);
    }

    #[test]
    fn figure_eight_splits_into_triangles() {
        let g = unit(&[
            ("a1", "o", "p"), ("a2", "p", "q"), ("a3", "q", "o"),
            ("b1", "o", "r"), ("b2", "r", "s"), ("b3", "s", "o"),
        ]);
        let x = set(&["a1", "a2", "a3", "b1", "b2", "b3"]);
        let parts = decompose_into_circuits(&g, &x).unwrap();
        let sets: Vec<EdgeSet> = parts.iter().map(Cycle::edge_set).collect();
        assert_eq!(sets, vec![set(&["a1", "a2", "a3"]), set(&["b1", "b2", "b3"])]);
    }

    #[test]
    fn disjoint_triangles() {
        let g = unit(&[
            ("a1", "a", "b"), ("a2", "b", "c"), ("a3", "c", "a"),
            ("b1", "d", "e"), ("b2", "e", "f"), ("b3", "f", "d"),
        ]);
        let x = set(&["a1", "a2", "a3", "b1", "b2", "b3"]);
        let parts = decompose_into_circuits(&g, &x).unwrap();
        assert_eq!(parts.len(), 2);
        let sum = symmetric_sum(parts.iter().map(Cycle::edge_set).collect::<Vec<_>>().iter());
        assert_eq!(sum, x);
    }

    #[test]
    fn non_member_is_contract_violation() {
        let g = unit(&[("ab", "a", "b")]);
        assert!(matches!(decompose_into_circuits(&g, &set(&["ab"])), Err(Error::Contract(_))));
    }

    #[test]
    fn parallel_pair_is_a_cycle() {
        let g = unit(&[("e1", "a", "b"), ("e2", "b", "a")]);
        let c = Cycle::from_edge_set(&g, &set(&["e2", "e1"])).unwrap();
        assert_eq!(c.edges(), &[EdgeId::from("e1"), EdgeId::from("e2")]);
        assert_eq!(c.vertices(), &[VertexId::from("a"), VertexId::from("b")]);
    }

    #[test]
    fn canonical_form_ignores_rotation_and_direction() {
        let g = unit(&[("w", "a", "b"), ("x", "b", "c"), ("y", "c", "d"), ("z", "d", "a")]);
        let c1 = Cycle::from_walk(&g, &["c", "d", "a", "b"].map(VertexId::from), &["y", "z", "w", "x"].map(EdgeId::from)).unwrap();
        let c2 = Cycle::from_walk(&g, &["b", "a", "d", "c"].map(VertexId::from), &["w", "z", "y", "x"].map(EdgeId::from)).unwrap();
        assert_eq!(c1, c2);
        assert_eq!(c1.edges()[0].as_str(), "w");
        assert_eq!(c1.edges()[1].as_str(), "x");
        assert_eq!(c1.vertices()[0].as_str(), "a");
    }

    #[test]
    fn from_edge_set_rejects_non_cycles() {
        let g = unit(&[("ab", "a", "b"), ("bc", "b", "c"), ("ca", "c", "a"), ("cd", "c", "d")]);
        assert!(Cycle::from_edge_set(&g, &set(&["ab", "bc"])).is_err());
        assert!(Cycle::from_edge_set(&g, &set(&["ab", "bc", "ca", "cd"])).is_err());
    }

    #[test]
    fn set_length_examples() {
        let mut g = Graph::new();
        for v in ["a", "b", "c"] {
            g.add_vertex(v).unwrap();
        }
        g.add_edge(Edge::new("p", "a", "b", Length::ratio(1, 2))).unwrap();
        g.add_edge(Edge::new("q", "b", "c", Length::ratio(1, 3))).unwrap();
        g.add_edge(Edge::new("r", "c", "a", Length::ratio(1, 6))).unwrap();
        assert_eq!(crate::edgeset::set_length(&g, &set(&["p", "q", "r"])).unwrap(), Length::one());
        assert_eq!(crate::edgeset::set_length(&g, &EdgeSet::new()).unwrap(), Length::zero());
    }
}
