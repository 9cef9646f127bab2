//! Locally finite graphs given by a root and a neighbour function.

use std::collections::{BTreeSet, HashMap, VecDeque};

use crate::graph::{Edge, EdgeId, Graph, VertexId};
use crate::length::Length;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyEdge {
    pub id: EdgeId,
    pub other: VertexId,
    pub length: Length,
}

/// A connected, locally finite graph presented lazily.
///
/// Implementations must be pure: the same vertex always yields the same
/// neighbour list, sorted by edge id, and an edge reports the same id and
/// length from both of its endpoints.
pub trait GraphFamily: Send + Sync {
    fn name(&self) -> String;

    fn root(&self) -> VertexId;

    fn neighbors(&self, v: &VertexId) -> Vec<FamilyEdge>;

    fn is_finite(&self) -> bool {
        false
    }

    /// Declares that the graph has exactly one end, which lets component
    /// detection merge every component that keeps growing.
    fn one_ended(&self) -> bool {
        false
    }

    /// A radius from which every component of `G - S_i` that still reaches
    /// the edge of the explored ball is infinite. Together with
    /// [`GraphFamily::one_ended`] this makes component detection exact.
    fn settled_radius(&self, _i: usize) -> Option<usize> {
        None
    }

    /// Exact distance in the end-compactified graph, when known in closed form.
    fn analytic_distance(&self, _u: &VertexId, _v: &VertexId) -> Option<Length> {
        None
    }

    /// Closed-form upper bound on the supremum of distances between points
    /// joined by an arc avoiding the ball `prev_ball` (the radius `i - 1` ball).
    fn analytic_epsilon_upper(&self, _i: usize, _prev_ball: &BTreeSet<VertexId>) -> Option<Length> {
        None
    }
}

/// Breadth-first distances from the root, up to `radius` inclusive. The map
/// iterates in no particular order; [`bfs_order`] gives a deterministic one.
pub fn bfs_layers(f: &dyn GraphFamily, radius: usize) -> (Vec<VertexId>, HashMap<VertexId, usize>) {
    let root = f.root();
    let mut order = vec![root.clone()];
    let mut depth = HashMap::from([(root.clone(), 0usize)]);
    let mut queue = VecDeque::from([root]);
    while let Some(v) = queue.pop_front() {
        let d = depth[&v];
        if d == radius {
            continue;
        }
        for fe in f.neighbors(&v) {
            if !depth.contains_key(&fe.other) {
                depth.insert(fe.other.clone(), d + 1);
                order.push(fe.other.clone());
                queue.push_back(fe.other);
            }
        }
    }
    (order, depth)
}

/// Vertices within graph distance `radius` of the root, in BFS order.
pub fn bfs_order(f: &dyn GraphFamily, radius: usize) -> Vec<VertexId> {
    bfs_layers(f, radius).0
}

/// The ball of edge-count radius `i` around the root.
pub fn ball(f: &dyn GraphFamily, i: usize) -> BTreeSet<VertexId> {
    bfs_order(f, i).into_iter().collect()
}

/// Materializes the subgraph on `vertices` (kept in the given order) with
/// the edges selected by `keep_edge(u_in, v_in)`-style filtering.
pub(crate) fn materialize(
    f: &dyn GraphFamily,
    vertices: &[VertexId],
    mut keep: impl FnMut(&VertexId, &VertexId) -> bool,
) -> Graph {
    let members: BTreeSet<&VertexId> = vertices.iter().collect();
    let mut g = Graph::new();
    for v in vertices {
        g.add_vertex(v.clone()).expect("distinct vertices");
    }
    let mut seen: BTreeSet<EdgeId> = BTreeSet::new();
    for v in vertices {
        for fe in f.neighbors(v) {
            if !members.contains(&fe.other) || seen.contains(&fe.id) || !keep(v, &fe.other) {
                continue;
            }
            seen.insert(fe.id.clone());
            g.add_edge(Edge::new(fe.id, v.clone(), fe.other, fe.length)).expect("valid family edge");
        }
    }
    g
}

/// A finite graph seen as a family.
#[derive(Clone, Debug)]
pub struct FiniteFamily {
    graph: Graph,
    root: VertexId,
}

impl FiniteFamily {
    pub fn new(graph: Graph, root: VertexId) -> crate::Result<Self> {
        graph.vertex_idx(&root)?;
        if !graph.is_connected() {
            return Err(crate::Error::input("finite family graph must be connected"));
        }
        Ok(FiniteFamily { graph, root })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }
}

impl GraphFamily for FiniteFamily {
    fn name(&self) -> String {
        "finite".into()
    }

    fn root(&self) -> VertexId {
        self.root.clone()
    }

    fn neighbors(&self, v: &VertexId) -> Vec<FamilyEdge> {
        let Ok(vi) = self.graph.vertex_idx(v) else { return Vec::new() };
        self.graph
            .incident(vi)
            .iter()
            .map(|&e| {
                let edge = self.graph.edge_at(e);
                FamilyEdge {
                    id: edge.id.clone(),
                    other: self.graph.vertex_at(self.graph.opposite(e, vi)).clone(),
                    length: edge.length.clone(),
                }
            })
            .collect()
    }

    fn is_finite(&self) -> bool {
        true
    }
}
