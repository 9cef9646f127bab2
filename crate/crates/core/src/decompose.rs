//! Decomposing cycles into geodetic cycles.
//!
//! [`geodetic_decomposition`] splits a cycle along a shortcut into two shorter
//! cycles until every piece is geodetic, so every part is at most as long as
//! the input. [`short_decomposition`] works on a truncation graph and produces
//! geodetic parts no longer than `5 * eps`, where `eps` bounds the distance
//! between any two points of the region the cycle lives in.

use serde::Serialize;

use crate::cycle::{decompose_into_circuits, Cycle};
use crate::edgeset::{symmetric_sum, EdgeSet};
use crate::error::{Error, Result};
use crate::geodesy::{all_pairs, find_shortcut_with, is_geodetic_with, DistanceOracle};
use crate::graph::{EdgeId, Graph, VertexId};
use crate::length::Length;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Decomposition {
    pub input: EdgeSet,
    pub parts: Vec<Cycle>,
    pub part_lengths: Vec<Length>,
    /// Certified upper bound on every part length.
    pub bound: Length,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub trace: Vec<TraceStep>,
}

impl Decomposition {
    pub fn sum(&self) -> EdgeSet {
        let sets: Vec<EdgeSet> = self.parts.iter().map(Cycle::edge_set).collect();
        symmetric_sum(&sets)
    }

    pub fn max_part_length(&self) -> Option<&Length> {
        self.part_lengths.iter().max()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TraceStep {
    /// A non-geodetic cycle split along a shortcut between `x` and `y`.
    Split { depth: usize, length: Length, x: VertexId, y: VertexId, shortcut_length: Length },
    /// A sector longer than `5 * eps` cut at `pivot`.
    Sector { length: Length, pivot: VertexId, target: VertexId, connector_length: Length },
}

/// Oracle-backed decomposer; reuse it for many cycles of one graph.
pub struct Decomposer<'g> {
    oracle: DistanceOracle<'g>,
}

impl<'g> Decomposer<'g> {
    pub fn new(g: &'g Graph) -> Self {
        Decomposer { oracle: all_pairs(g) }
    }

    pub fn from_oracle(oracle: DistanceOracle<'g>) -> Self {
        Decomposer { oracle }
    }

    pub fn oracle(&self) -> &DistanceOracle<'g> {
        &self.oracle
    }

    pub fn graph(&self) -> &'g Graph {
        self.oracle.graph()
    }

    pub fn is_geodetic(&self, c: &Cycle) -> Result<bool> {
        is_geodetic_with(&self.oracle, c)
    }

    /// Parts are emitted depth first, the piece containing the forward arc
    /// before the one containing the backward arc.
    pub fn geodetic(&self, c: &Cycle) -> Result<Decomposition> {
        let g = self.graph();
        let bound = c.length(g)?;
        let mut parts = Vec::new();
        let mut trace = Vec::new();
        let mut stack = vec![(c.clone(), 0usize)];
        while let Some((cycle, depth)) = stack.pop() {
            let Some(s) = find_shortcut_with(&self.oracle, &cycle)? else {
                parts.push(cycle);
                continue;
            };
            trace.push(TraceStep::Split {
                depth,
                length: cycle.length(g)?,
                x: s.x.clone(),
                y: s.y.clone(),
                shortcut_length: s.path.length.clone(),
            });
            let mut first: EdgeSet = s.path.edges.iter().cloned().collect();
            let mut second = first.clone();
            first.extend_from(&s.arc_forward);
            second.extend_from(&s.arc_backward);
            let d1 = Cycle::from_edge_set(g, &first)?;
            let d2 = Cycle::from_edge_set(g, &second)?;
            stack.push((d2, depth + 1));
            stack.push((d1, depth + 1));
        }
        let part_lengths = parts.iter().map(|p| p.length(g)).collect::<Result<Vec<_>>>()?;
        Ok(Decomposition { input: c.edge_set(), parts, part_lengths, bound, trace })
    }

    pub fn generating_set(&self, x: &EdgeSet) -> Result<Decomposition> {
        let g = self.graph();
        let circuits = decompose_into_circuits(g, x)?;
        let mut parts = Vec::new();
        let mut part_lengths = Vec::new();
        let mut trace = Vec::new();
        let mut bound = Length::zero();
        for circuit in &circuits {
            let d = self.geodetic(circuit)?;
            if d.bound > bound {
                bound = d.bound.clone();
            }
            parts.extend(d.parts);
            part_lengths.extend(d.part_lengths);
            trace.extend(d.trace);
        }
        Ok(Decomposition { input: x.clone(), parts, part_lengths, bound, trace })
    }

    /// Splits `c` into geodetic cycles of length at most `5 * eps`.
    ///
    /// `c_part` is the part of `c` lying on the reference cycle; the rest of
    /// `c` must be a path of length at most `eps`. Passing every edge of `c`
    /// treats `c` itself as the reference.
    pub fn short(&self, c: &Cycle, eps: &Length, c_part: &EdgeSet) -> Result<Decomposition> {
        let g = self.graph();
        let bound = eps * 5;
        let mut pending = vec![Sector::initial(g, c, c_part, eps)?];
        let mut short_cycles: Vec<EdgeSet> = Vec::new();
        let mut trace = Vec::new();
        while let Some(sector) = pending.pop() {
            let length = sector.length(g)?;
            if length <= bound {
                short_cycles.push(sector.edge_set());
                continue;
            }
            let step = self.split_sector(&sector, length, eps, &mut pending, &mut short_cycles)?;
            trace.push(step);
        }
        let mut parts = Vec::new();
        let mut part_lengths = Vec::new();
        for set in &short_cycles {
            let cycle = Cycle::from_edge_set(g, set)?;
            let d = self.geodetic(&cycle)?;
            for (p, l) in d.parts.into_iter().zip(d.part_lengths) {
                if l > bound {
                    return Err(Error::contract(format!("part of length {l} exceeds {bound}")));
                }
                parts.push(p);
                part_lengths.push(l);
            }
            trace.extend(d.trace);
        }
        Ok(Decomposition { input: c.edge_set(), parts, part_lengths, bound, trace })
    }

    fn split_sector(
        &self,
        sector: &Sector,
        length: Length,
        eps: &Length,
        pending: &mut Vec<Sector>,
        short_cycles: &mut Vec<EdgeSet>,
    ) -> Result<TraceStep> {
        let g = self.graph();
        let twice = eps * 2;
        let thrice = eps * 3;
        for e in &sector.q_edges {
            let l = g.length_of(e)?;
            if l > &twice {
                return Err(Error::certification(format!(
                    "edge {e} of length {l} exceeds twice the epsilon bound {eps}"
                )));
            }
        }
        let mut walked = Length::zero();
        let mut pivot = None;
        for (k, e) in sector.q_edges.iter().enumerate() {
            walked += g.length_of(e)?;
            if &walked > eps {
                pivot = Some(k + 1);
                break;
            }
        }
        let z = pivot.ok_or_else(|| Error::certification("no pivot vertex past epsilon on the reference part"))?;
        if walked > thrice || z >= sector.q_vertices.len() - 1 {
            return Err(Error::certification("pivot vertex lies beyond three times epsilon"));
        }
        let z_vertex = &sector.q_vertices[z];
        let y_vertex = sector.q_vertices.last().expect("nonempty");
        let connector = self.oracle.path(z_vertex, y_vertex)?;
        if &connector.length > eps {
            return Err(Error::certification(format!(
                "shortest {z_vertex}-{y_vertex} path has length {} above epsilon {eps}",
                connector.length
            )));
        }
        let p_set = connector.edge_set();

        // Q2 + P: the z-x part of the reference path, the return path, and P.
        let mut q2_plus_p: EdgeSet = sector.q_edges[..z].iter().cloned().collect();
        for e in &sector.r_edges {
            q2_plus_p.toggle(e.clone());
        }
        q2_plus_p += &p_set;
        for cycle in decompose_into_circuits(g, &q2_plus_p)? {
            short_cycles.push(cycle.edge_set());
        }

        // Q1 + P as a sum of sectors, walking P through its Q1 vertices.
        let q1_vertices = &sector.q_vertices[z..];
        let q1_edges = &sector.q_edges[z..];
        let on_q1 = |v: &VertexId| q1_vertices.iter().position(|w| w == v);
        let mut prev: Option<(usize, usize)> = None; // (position on P, position on Q1)
        for (i, v) in connector.vertices.iter().enumerate() {
            let Some(a) = on_q1(v) else { continue };
            if let Some((pi, pa)) = prev {
                let p_edges = &connector.edges[pi..i];
                let (lo, hi) = if pa < a { (pa, a) } else { (a, pa) };
                let q_edges = &q1_edges[lo..hi];
                if !(p_edges.len() == 1 && q_edges.len() == 1 && p_edges[0] == q_edges[0]) {
                    let mut ret: Vec<EdgeId> = p_edges.to_vec();
                    let mut ret_vertices: Vec<VertexId> = connector.vertices[pi..=i].to_vec();
                    if pa < a {
                        ret.reverse();
                        ret_vertices.reverse();
                    }
                    let child = Sector {
                        q_vertices: q1_vertices[lo..=hi].to_vec(),
                        q_edges: q_edges.to_vec(),
                        r_edges: ret,
                    };
                    debug_assert_eq!(ret_vertices.first(), child.q_vertices.last());
                    pending.push(child);
                }
            }
            prev = Some((i, a));
        }
        Ok(TraceStep::Sector {
            length,
            pivot: z_vertex.clone(),
            target: y_vertex.clone(),
            connector_length: connector.length,
        })
    }
}

/// A cycle made of a reference path `q` (from `q_vertices[0]` to the last
/// entry) and a return path `r` of length at most eps back to the start.
#[derive(Clone, Debug)]
struct Sector {
    q_vertices: Vec<VertexId>,
    q_edges: Vec<EdgeId>,
    r_edges: Vec<EdgeId>,
}

impl Sector {
    fn initial(g: &Graph, c: &Cycle, c_part: &EdgeSet, eps: &Length) -> Result<Sector> {
        let n = c.len();
        let inside: Vec<bool> = c.edges().iter().map(|e| c_part.contains(e)).collect();
        if c_part.iter().any(|e| !c.edges().contains(e)) {
            return Err(Error::input("reference part contains edges outside the cycle"));
        }
        if inside.iter().all(|&b| b) {
            let mut q_vertices = c.vertices().to_vec();
            q_vertices.push(c.vertices()[0].clone());
            return Ok(Sector { q_vertices, q_edges: c.edges().to_vec(), r_edges: Vec::new() });
        }
        if inside.iter().all(|&b| !b) {
            return Err(Error::input("reference part is empty"));
        }
        // Start of the single run of reference edges.
        let starts: Vec<usize> = (0..n).filter(|&k| inside[k] && !inside[(k + n - 1) % n]).collect();
        if starts.len() != 1 {
            return Err(Error::input("reference part is not a single arc of the cycle"));
        }
        let s = starts[0];
        let run = (0..n).take_while(|&k| inside[(s + k) % n]).count();
        let q_edges: Vec<EdgeId> = (0..run).map(|k| c.edges()[(s + k) % n].clone()).collect();
        let q_vertices: Vec<VertexId> = (0..=run).map(|k| c.vertices()[(s + k) % n].clone()).collect();
        let r_edges: Vec<EdgeId> = (run..n).map(|k| c.edges()[(s + k) % n].clone()).collect();
        let r_len = r_edges.iter().map(|e| g.length_of(e).cloned()).sum::<Result<Length>>()?;
        if &r_len > eps {
            return Err(Error::certification(format!("return path of length {r_len} exceeds epsilon {eps}")));
        }
        Ok(Sector { q_vertices, q_edges, r_edges })
    }

    fn edge_set(&self) -> EdgeSet {
        self.q_edges.iter().chain(&self.r_edges).cloned().collect()
    }

    fn length(&self, g: &Graph) -> Result<Length> {
        self.q_edges.iter().chain(&self.r_edges).map(|e| g.length_of(e).cloned()).sum()
    }
}

pub fn geodetic_decomposition(g: &Graph, c: &Cycle) -> Result<Decomposition> {
    Decomposer::new(g).geodetic(c)
}

pub fn geodetic_generating_set(g: &Graph, x: &EdgeSet) -> Result<Decomposition> {
    Decomposer::new(g).generating_set(x)
}

pub fn short_decomposition(g: &Graph, c: &Cycle, eps: &Length, c_part: &EdgeSet) -> Result<Decomposition> {
    Decomposer::new(g).short(c, eps, c_part)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::k4;

    #[test]
    fn square_of_k4_has_two_short_parts() {
        let g = k4();
        let set: EdgeSet = ["v0-v1", "v1-v2", "v2-v3", "v0-v3"].into_iter().map(EdgeId::from).collect();
        let c = Cycle::from_edge_set(&g, &set).unwrap();
        let d = Decomposer::new(&g).geodetic(&c).unwrap();
        assert_eq!(d.sum(), set);
        assert_eq!(d.max_part_length(), Some(&Length::integer(3)));
        assert!(d.max_part_length().unwrap() <= &d.bound);
    }

    #[test]
    fn empty_generating_set_has_no_parts() {
        let d = Decomposer::new(&k4()).generating_set(&EdgeSet::new()).unwrap();
        assert!(d.parts.is_empty());
        assert_eq!(d.max_part_length(), None);
    }
}
