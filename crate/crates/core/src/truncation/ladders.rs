//! Built-in one-ended families: the infinite ladder, its subdivided variant,
//! and wider strips.
//!
//! Ladder vertices are `x{n}` and `y{n}` for `n >= 1`, with rails
//! `x{n}-x{n+1}`, `y{n}-y{n+1}` and rungs `x{n}-y{n}`. In the subdivided
//! ladder rung `n >= 2` becomes a path of `2n` edges `r{n}.{k}` through the
//! interior vertices `r{n}_1 .. r{n}_{2n-1}` (numbered from the `x` side).
//! The root is `x1`.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::family::{FamilyEdge, GraphFamily};
use super::Walk;
use crate::error::{Error, Result};
use crate::graph::{EdgeId, VertexId};
use crate::length::Length;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LengthScheme {
    Unit,
    /// Lengths from a normal spanning tree: `1/2^depth` on tree edges,
    /// tree-path sums on the other edges.
    Nst,
    /// Upper rail `1/2, 1/4, ..`, lower rail `1/2, 1/3, 1/4, ..`, rungs `1/2, 1/4, ..`.
    DyadicHarmonic,
}

impl fmt::Display for LengthScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LengthScheme::Unit => "unit",
            LengthScheme::Nst => "nst",
            LengthScheme::DyadicHarmonic => "dyadic_harmonic",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum LadderVertex {
    X(u64),
    Y(u64),
    /// Interior vertex `k` of rung `n`.
    R(u64, u64),
}

impl LadderVertex {
    fn parse(v: &VertexId) -> Option<LadderVertex> {
        let s = v.as_str();
        let num = |t: &str| t.parse::<u64>().ok().filter(|&n| n >= 1);
        if let Some(rest) = s.strip_prefix('x') {
            return num(rest).map(LadderVertex::X);
        }
        if let Some(rest) = s.strip_prefix('y') {
            return num(rest).map(LadderVertex::Y);
        }
        let rest = s.strip_prefix('r')?;
        let (n, k) = rest.split_once('_')?;
        Some(LadderVertex::R(num(n)?, num(k)?))
    }

    fn id(self) -> VertexId {
        VertexId(match self {
            LadderVertex::X(n) => format!("x{n}"),
            LadderVertex::Y(n) => format!("y{n}"),
            LadderVertex::R(n, k) => format!("r{n}_{k}"),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum LadderEdge {
    XRail(u64),
    YRail(u64),
    Rung(u64),
    /// Segment `k` (0-based from the `x` side) of subdivided rung `n`.
    Segment(u64, u64),
}

impl LadderEdge {
    fn id(self) -> EdgeId {
        EdgeId(match self {
            LadderEdge::XRail(n) => format!("x{n}-x{}", n + 1),
            LadderEdge::YRail(n) => format!("y{n}-y{}", n + 1),
            LadderEdge::Rung(n) => format!("x{n}-y{n}"),
            LadderEdge::Segment(n, k) => format!("r{n}.{k}"),
        })
    }
}

/// The infinite ladder, optionally with rung `n >= 2` subdivided into `2n` edges.
#[derive(Clone, Debug)]
pub struct Ladder {
    subdivided: bool,
    scheme: LengthScheme,
}

impl Ladder {
    pub fn new(scheme: LengthScheme) -> Self {
        Ladder { subdivided: false, scheme }
    }

    pub fn subdivided(scheme: LengthScheme) -> Result<Self> {
        if scheme == LengthScheme::DyadicHarmonic {
            return Err(Error::input("dyadic_harmonic lengths are defined for the plain ladder only"));
        }
        Ok(Ladder { subdivided: true, scheme })
    }

    pub fn scheme(&self) -> LengthScheme {
        self.scheme
    }

    pub fn is_subdivided(&self) -> bool {
        self.subdivided
    }

    /// Interior vertex count of rung `n`.
    fn interior(&self, n: u64) -> u64 {
        if self.subdivided && n >= 2 {
            2 * n - 1
        } else {
            0
        }
    }

    /// Number of edges of rung `n`.
    pub fn rung_edge_count(&self, n: u64) -> u64 {
        self.interior(n) + 1
    }

    /// Edge ids of rung `n`, from `x{n}` to `y{n}`.
    pub fn rung_edges(&self, n: u64) -> Vec<EdgeId> {
        if self.interior(n) == 0 {
            vec![LadderEdge::Rung(n).id()]
        } else {
            (0..=self.interior(n)).map(|k| LadderEdge::Segment(n, k).id()).collect()
        }
    }

    /// Vertices of rung `n` from `x{n}` to `y{n}`.
    pub fn rung_vertices(&self, n: u64) -> Vec<VertexId> {
        let mut out = vec![LadderVertex::X(n).id()];
        out.extend((1..=self.interior(n)).map(|k| LadderVertex::R(n, k).id()));
        out.push(LadderVertex::Y(n).id());
        out
    }

    /// Edge set of the square between rungs `n` and `n + 1`.
    pub fn square(&self, n: u64) -> Vec<EdgeId> {
        let mut out = self.rung_edges(n);
        out.extend(self.rung_edges(n + 1));
        out.push(LadderEdge::XRail(n).id());
        out.push(LadderEdge::YRail(n).id());
        out
    }

    /// The square between rungs `n` and `n + 1` as a closed walk starting at
    /// `x{n}`: down rung `n`, along the `y` rail, back up rung `n + 1`.
    pub fn square_walk(&self, n: u64) -> Walk {
        let mut vertices = self.rung_vertices(n);
        let mut up = self.rung_vertices(n + 1);
        up.reverse();
        vertices.extend(up);
        let mut edges = self.rung_edges(n);
        edges.push(LadderEdge::YRail(n).id());
        let mut back = self.rung_edges(n + 1);
        back.reverse();
        edges.extend(back);
        edges.push(LadderEdge::XRail(n).id());
        Walk { vertices, edges, closed: true }
    }

    /// Position of a vertex along the spanning ray
    /// `x1 y1 y2 [rung 2] x2 x3 [rung 3] y3 y4 [rung 4] x4 ..`, which is a
    /// normal spanning tree rooted at `x1`.
    fn ray_position(&self, v: LadderVertex) -> u64 {
        let block_start = |n: u64| -> u64 {
            // 2 + sum over k in 2..n of (interior(k) + 2)
            if self.subdivided {
                n * n - 2
            } else {
                2 * n - 2
            }
        };
        match v {
            LadderVertex::X(1) => 0,
            LadderVertex::Y(1) => 1,
            LadderVertex::X(n) | LadderVertex::Y(n) => {
                let entry_is_x = n % 2 == 1;
                let is_x = matches!(v, LadderVertex::X(_));
                if is_x == entry_is_x {
                    block_start(n)
                } else {
                    block_start(n) + self.interior(n) + 1
                }
            }
            LadderVertex::R(n, k) => {
                if n % 2 == 1 {
                    block_start(n) + k
                } else {
                    block_start(n) + 2 * n - k
                }
            }
        }
    }

    fn position_of(&self, v: &VertexId) -> Option<u64> {
        self.valid(v).then(|| self.ray_position(LadderVertex::parse(v).expect("valid")))
    }

    fn valid(&self, v: &VertexId) -> bool {
        match LadderVertex::parse(v) {
            Some(LadderVertex::R(n, k)) => k <= self.interior(n),
            Some(_) => true,
            None => false,
        }
    }

    fn edge_length(&self, e: LadderEdge, a: LadderVertex, b: LadderVertex) -> Length {
        match self.scheme {
            LengthScheme::Unit => Length::one(),
            LengthScheme::Nst => {
                let pa = self.ray_position(a) as u32;
                let pb = self.ray_position(b) as u32;
                Length::dyadic(pa).abs_diff(&Length::dyadic(pb))
            }
            LengthScheme::DyadicHarmonic => match e {
                LadderEdge::XRail(n) | LadderEdge::Rung(n) => Length::dyadic(n as u32),
                LadderEdge::YRail(n) => Length::ratio(1, n as i64 + 1),
                LadderEdge::Segment(..) => unreachable!("plain ladder only"),
            },
        }
    }
}

type RailMakers = (fn(u64) -> LadderEdge, fn(u64) -> LadderVertex);

impl GraphFamily for Ladder {
    fn name(&self) -> String {
        let base = if self.subdivided { "subdivided_ladder" } else { "ladder" };
        format!("{base}/{}", self.scheme)
    }

    fn root(&self) -> VertexId {
        LadderVertex::X(1).id()
    }

    fn neighbors(&self, v: &VertexId) -> Vec<FamilyEdge> {
        if !self.valid(v) {
            return Vec::new();
        }
        let me = LadderVertex::parse(v).expect("valid");
        let mut out: Vec<(LadderEdge, LadderVertex)> = Vec::new();
        match me {
            LadderVertex::X(n) | LadderVertex::Y(n) => {
                let is_x = matches!(me, LadderVertex::X(_));
                let (rail, mk): RailMakers = if is_x {
                    (LadderEdge::XRail, LadderVertex::X)
                } else {
                    (LadderEdge::YRail, LadderVertex::Y)
                };
                if n >= 2 {
                    out.push((rail(n - 1), mk(n - 1)));
                }
                out.push((rail(n), mk(n + 1)));
                let m = self.interior(n);
                if m == 0 {
                    let other = if is_x { LadderVertex::Y(n) } else { LadderVertex::X(n) };
                    out.push((LadderEdge::Rung(n), other));
                } else if is_x {
                    out.push((LadderEdge::Segment(n, 0), LadderVertex::R(n, 1)));
                } else {
                    out.push((LadderEdge::Segment(n, m), LadderVertex::R(n, m)));
                }
            }
            LadderVertex::R(n, k) => {
                let m = self.interior(n);
                let before = if k == 1 { LadderVertex::X(n) } else { LadderVertex::R(n, k - 1) };
                let after = if k == m { LadderVertex::Y(n) } else { LadderVertex::R(n, k + 1) };
                out.push((LadderEdge::Segment(n, k - 1), before));
                out.push((LadderEdge::Segment(n, k), after));
            }
        }
        let mut edges: Vec<FamilyEdge> = out
            .into_iter()
            .map(|(e, w)| FamilyEdge { id: e.id(), other: w.id(), length: self.edge_length(e, me, w) })
            .collect();
        edges.sort_by(|a, b| a.id.cmp(&b.id));
        edges
    }

    fn one_ended(&self) -> bool {
        true
    }

    fn settled_radius(&self, i: usize) -> Option<usize> {
        // The middle of a subdivided rung whose two ends lie in the ball is a
        // finite component; rung n reaches depth at most 2n - 1.
        Some(if self.subdivided { 2 * i + 1 } else { i + 1 })
    }

    fn analytic_distance(&self, u: &VertexId, v: &VertexId) -> Option<Length> {
        if self.scheme != LengthScheme::Nst {
            return None;
        }
        let pu = self.position_of(u)? as u32;
        let pv = self.position_of(v)? as u32;
        Some(Length::dyadic(pu).abs_diff(&Length::dyadic(pv)))
    }

    fn analytic_epsilon_upper(&self, _i: usize, prev_ball: &BTreeSet<VertexId>) -> Option<Length> {
        if self.scheme != LengthScheme::Nst {
            return None;
        }
        // Every point outside the ball lies within 2^-a of the end, where a is
        // the least ray position of a ball vertex with a neighbour outside.
        let a = if prev_ball.is_empty() {
            0
        } else {
            prev_ball
                .iter()
                .filter(|v| self.neighbors(v).iter().any(|fe| !prev_ball.contains(&fe.other)))
                .filter_map(|v| self.position_of(v))
                .min()?
        };
        Some(Length::dyadic(a as u32) * 2)
    }
}

/// `width` parallel rays `v{r}_{n}` (rail `r`, level `n >= 1`) with rungs
/// between neighbouring rails at every level; unit lengths, root `v0_1`.
#[derive(Clone, Debug)]
pub struct Strip {
    width: u64,
}

impl Strip {
    pub fn new(width: u64) -> Result<Self> {
        if width < 2 {
            return Err(Error::input("strip width must be at least 2"));
        }
        Ok(Strip { width })
    }

    pub fn vertex(rail: u64, level: u64) -> VertexId {
        VertexId(format!("v{rail}_{level}"))
    }

    pub fn rail_edge(rail: u64, level: u64) -> EdgeId {
        EdgeId(format!("v{rail}_{level}-v{rail}_{}", level + 1))
    }

    pub fn rung_edge(rail: u64, level: u64) -> EdgeId {
        EdgeId(format!("v{rail}_{level}-v{}_{level}", rail + 1))
    }

    fn parse(&self, v: &VertexId) -> Option<(u64, u64)> {
        let (r, n) = v.as_str().strip_prefix('v')?.split_once('_')?;
        let (r, n) = (r.parse().ok()?, n.parse().ok()?);
        (r < self.width && n >= 1).then_some((r, n))
    }
}

impl GraphFamily for Strip {
    fn name(&self) -> String {
        format!("strip{}/unit", self.width)
    }

    fn root(&self) -> VertexId {
        Strip::vertex(0, 1)
    }

    fn neighbors(&self, v: &VertexId) -> Vec<FamilyEdge> {
        let Some((r, n)) = self.parse(v) else { return Vec::new() };
        let mut out = Vec::new();
        if n >= 2 {
            out.push((Strip::rail_edge(r, n - 1), Strip::vertex(r, n - 1)));
        }
        out.push((Strip::rail_edge(r, n), Strip::vertex(r, n + 1)));
        if r >= 1 {
            out.push((Strip::rung_edge(r - 1, n), Strip::vertex(r - 1, n)));
        }
        if r + 1 < self.width {
            out.push((Strip::rung_edge(r, n), Strip::vertex(r + 1, n)));
        }
        let mut edges: Vec<FamilyEdge> = out
            .into_iter()
            .map(|(id, other)| FamilyEdge { id, other, length: Length::one() })
            .collect();
        edges.sort_by(|a, b| a.id.cmp(&b.id));
        edges
    }

    fn one_ended(&self) -> bool {
        true
    }

    fn settled_radius(&self, i: usize) -> Option<usize> {
        Some(i + 1)
    }
}
