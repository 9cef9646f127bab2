//! Finite multigraphs with exact positive edge lengths.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::length::Length;

macro_rules! string_id {
    ($name:ident) => {
        #[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(pub String);

        impl $name {
            pub fn new(s: impl Into<String>) -> Self {
                $name(s.into())
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                $name(s.to_owned())
            }
        }

        impl From<String> for $name {
            fn from(s: String) -> Self {
                $name(s)
            }
        }
    };
}

string_id!(VertexId);
string_id!(EdgeId);

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub id: EdgeId,
    pub u: VertexId,
    pub v: VertexId,
    #[serde(rename = "len")]
    pub length: Length,
}

impl Edge {
    pub fn new(id: impl Into<EdgeId>, u: impl Into<VertexId>, v: impl Into<VertexId>, length: Length) -> Self {
        Edge { id: id.into(), u: u.into(), v: v.into(), length }
    }

    pub fn is_loop(&self) -> bool {
        self.u == self.v
    }

    /// The endpoint opposite `x`; for a loop this is `x` itself.
    pub fn other(&self, x: &VertexId) -> Option<&VertexId> {
        if &self.u == x {
            Some(&self.v)
        } else if &self.v == x {
            Some(&self.u)
        } else {
            None
        }
    }
}

/// Finite undirected multigraph. Loops and parallel edges are allowed; every
/// edge length is strictly positive.
///
/// Vertices keep their insertion order, which is the order used whenever an
/// algorithm needs "the least vertex". Adjacency lists are sorted by edge id.
#[derive(Clone, Debug)]
pub struct Graph {
    vertices: Vec<VertexId>,
    vertex_index: HashMap<VertexId, usize>,
    edges: Vec<Edge>,
    edge_index: HashMap<EdgeId, usize>,
    ends: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices && self.edges == other.edges
    }
}

impl Eq for Graph {}

impl Default for Graph {
    fn default() -> Self {
        Graph::new()
    }
}

impl Graph {
    pub fn new() -> Self {
        Graph {
            vertices: Vec::new(),
            vertex_index: HashMap::new(),
            edges: Vec::new(),
            edge_index: HashMap::new(),
            ends: Vec::new(),
            adjacency: Vec::new(),
        }
    }

    pub fn from_parts(vertices: impl IntoIterator<Item = VertexId>, edges: impl IntoIterator<Item = Edge>) -> Result<Self> {
        let mut g = Graph::new();
        for v in vertices {
            g.add_vertex(v)?;
        }
        for e in edges {
            g.add_edge(e)?;
        }
        Ok(g)
    }

    /// Adds a vertex; duplicates are an input error.
    pub fn add_vertex(&mut self, v: impl Into<VertexId>) -> Result<usize> {
        let v = v.into();
        if self.vertex_index.contains_key(&v) {
            return Err(Error::input(format!("duplicate vertex {v}")));
        }
        let idx = self.vertices.len();
        self.vertex_index.insert(v.clone(), idx);
        self.vertices.push(v);
        self.adjacency.push(Vec::new());
        Ok(idx)
    }

    /// Adds the vertex unless it already exists.
    pub fn ensure_vertex(&mut self, v: impl Into<VertexId>) -> usize {
        let v = v.into();
        match self.vertex_index.get(&v) {
            Some(&i) => i,
            None => self.add_vertex(v).expect("fresh vertex"),
        }
    }

    pub fn add_edge(&mut self, e: Edge) -> Result<usize> {
        if !e.length.is_positive() {
            return Err(Error::input(format!("edge {} has non-positive length {}", e.id, e.length)));
        }
        if self.edge_index.contains_key(&e.id) {
            return Err(Error::input(format!("duplicate edge id {}", e.id)));
        }
        let u = self.vertex_idx(&e.u)?;
        let v = self.vertex_idx(&e.v)?;
        let idx = self.edges.len();
        self.edge_index.insert(e.id.clone(), idx);
        self.edges.push(e);
        self.ends.push((u, v));
        insert_sorted(&mut self.adjacency[u], idx, &self.edges);
        if u != v {
            insert_sorted(&mut self.adjacency[v], idx, &self.edges);
        }
        Ok(idx)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn has_vertex(&self, v: &VertexId) -> bool {
        self.vertex_index.contains_key(v)
    }

    pub fn has_edge(&self, e: &EdgeId) -> bool {
        self.edge_index.contains_key(e)
    }

    pub fn vertex_idx(&self, v: &VertexId) -> Result<usize> {
        self.vertex_index
            .get(v)
            .copied()
            .ok_or_else(|| Error::input(format!("unknown vertex {v}")))
    }

    pub fn edge_idx(&self, e: &EdgeId) -> Result<usize> {
        self.edge_index
            .get(e)
            .copied()
            .ok_or_else(|| Error::input(format!("unknown edge {e}")))
    }

    pub fn edge(&self, e: &EdgeId) -> Result<&Edge> {
        Ok(&self.edges[self.edge_idx(e)?])
    }

    pub fn edge_at(&self, idx: usize) -> &Edge {
        &self.edges[idx]
    }

    pub fn vertex_at(&self, idx: usize) -> &VertexId {
        &self.vertices[idx]
    }

    /// Endpoint indices of the edge at `idx`.
    pub fn ends_at(&self, idx: usize) -> (usize, usize) {
        self.ends[idx]
    }

    /// Edge indices incident with vertex `v`, sorted by edge id. A loop is
    /// listed once.
    pub fn incident(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    /// Index of the endpoint of edge `e` opposite to vertex `v`.
    pub fn opposite(&self, e: usize, v: usize) -> usize {
        let (a, b) = self.ends[e];
        if a == v {
            b
        } else {
            a
        }
    }

    pub fn length_of(&self, e: &EdgeId) -> Result<&Length> {
        Ok(&self.edge(e)?.length)
    }

    pub fn total_length(&self) -> Length {
        self.edges.iter().map(|e| &e.length).sum()
    }

    /// Number of connected components (0 for the empty graph).
    pub fn component_count(&self) -> usize {
        let mut seen = vec![false; self.vertices.len()];
        let mut count = 0;
        for s in 0..self.vertices.len() {
            if seen[s] {
                continue;
            }
            count += 1;
            seen[s] = true;
            let mut queue = VecDeque::from([s]);
            while let Some(x) = queue.pop_front() {
                for &e in &self.adjacency[x] {
                    let y = self.opposite(e, x);
                    if !seen[y] {
                        seen[y] = true;
                        queue.push_back(y);
                    }
                }
            }
        }
        count
    }

    pub fn is_connected(&self) -> bool {
        self.component_count() <= 1
    }

    /// Subgraph on the given vertices with every edge among them.
    pub fn induced(&self, keep: &BTreeSet<VertexId>) -> Graph {
        let mut g = Graph::new();
        for v in self.vertices.iter().filter(|v| keep.contains(*v)) {
            g.add_vertex(v.clone()).expect("unique");
        }
        for e in &self.edges {
            if keep.contains(&e.u) && keep.contains(&e.v) {
                g.add_edge(e.clone()).expect("valid edge");
            }
        }
        g
    }

    /// Copy of the graph with edge lengths replaced from `lengths`; edges not
    /// named keep their length.
    pub fn with_lengths(&self, lengths: &BTreeMap<EdgeId, Length>) -> Result<Graph> {
        let mut g = Graph::new();
        for v in &self.vertices {
            g.add_vertex(v.clone())?;
        }
        for e in &self.edges {
            let mut e = e.clone();
            if let Some(l) = lengths.get(&e.id) {
                e.length = l.clone();
            }
            g.add_edge(e)?;
        }
        Ok(g)
    }

    pub fn to_document(&self) -> GraphDocument {
        GraphDocument {
            vertices: self.vertices.clone(),
            edges: self.edges.clone(),
        }
    }

    pub fn from_json(text: &str) -> Result<Graph> {
        let doc: GraphDocument =
            serde_json::from_str(text).map_err(|e| Error::input(format!("graph JSON: {e}")))?;
        doc.into_graph()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("graph serializes")
    }
}

fn insert_sorted(list: &mut Vec<usize>, idx: usize, edges: &[Edge]) {
    let pos = list
        .binary_search_by(|&probe| edges[probe].id.cmp(&edges[idx].id))
        .unwrap_or_else(|p| p);
    list.insert(pos, idx);
}

/// `{"vertices":[...], "edges":[{"id":..,"u":..,"v":..,"len":"p/q"}]}`
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphDocument {
    pub vertices: Vec<VertexId>,
    pub edges: Vec<Edge>,
}

impl GraphDocument {
    pub fn into_graph(self) -> Result<Graph> {
        Graph::from_parts(self.vertices, self.edges)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> Graph {
        Graph::from_parts(
            ["a", "b", "c"].map(VertexId::from),
            [
                Edge::new("ab", "a", "b", Length::one()),
                Edge::new("bc", "b", "c", Length::one()),
                Edge::new("ca", "c", "a", Length::one()),
            ],
        )
        .unwrap()
    }

    #[test]
    fn rejects_nonpositive_and_dangling_edges() {
        let mut g = triangle();
        assert!(g.add_edge(Edge::new("z", "a", "b", Length::zero())).is_err());
        assert!(g.add_edge(Edge::new("y", "a", "q", Length::one())).is_err());
        assert!(g.add_edge(Edge::new("ab", "a", "c", Length::one())).is_err());
    }

    #[test]
    fn loops_and_parallels_allowed() {
        let mut g = triangle();
        g.add_edge(Edge::new("loop", "a", "a", Length::one())).unwrap();
        g.add_edge(Edge::new("ab2", "a", "b", Length::ratio(1, 2))).unwrap();
        let a = g.vertex_idx(&"a".into()).unwrap();
        let ids: Vec<_> = g.incident(a).iter().map(|&e| g.edge_at(e).id.as_str()).collect();
        assert_eq!(ids, ["ab", "ab2", "ca", "loop"]);
    }

    #[test]
    fn json_accepts_decimals_and_round_trips() {
        let text = r#"{"vertices":["a","b"],"edges":[{"id":"e","u":"a","v":"b","len":"0.25"}]}"#;
        let g = Graph::from_json(text).unwrap();
        assert_eq!(g.edge(&"e".into()).unwrap().length, Length::ratio(1, 4));
        let again = Graph::from_json(&g.to_json()).unwrap();
        assert_eq!(g, again);
        assert!(g.to_json().contains("\"1/4\""));
    }

    #[test]
    fn connectivity() {
        let mut g = triangle();
        assert!(g.is_connected());
        g.add_vertex("lonely").unwrap();
        assert_eq!(g.component_count(), 2);
    }
}
