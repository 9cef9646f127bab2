//! Certified distance and ε bounds for families, plus component detection
//! outside a ball.
//!
//! Upper bounds come from shortest paths inside a finite ball. Lower bounds
//! come from the same ball with every frontier vertex (a vertex on the outer
//! layer with a neighbour outside) joined to one hub at zero cost: any route
//! that leaves the ball, including one through an end, must pass the frontier.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap, HashMap};

use serde::{Deserialize, Serialize};

use super::family::{bfs_layers, GraphFamily};
use crate::error::{Error, Result};
use crate::graph::VertexId;
use crate::length::Length;

/// A closed interval `[lo, hi]` of lengths.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: Length,
    pub hi: Length,
}

impl Interval {
    pub fn new(lo: Length, hi: Length) -> Result<Interval> {
        if lo > hi {
            return Err(Error::contract(format!("interval [{lo}, {hi}] is empty")));
        }
        Ok(Interval { lo, hi })
    }

    pub fn exact(x: Length) -> Interval {
        Interval { lo: x.clone(), hi: x }
    }

    pub fn zero() -> Interval {
        Interval::exact(Length::zero())
    }

    pub fn width(&self) -> Length {
        &self.hi - &self.lo
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: &Length) -> bool {
        &self.lo <= x && x <= &self.hi
    }
}

impl std::ops::Add<&Interval> for &Interval {
    type Output = Interval;
    fn add(self, rhs: &Interval) -> Interval {
        Interval { lo: &self.lo + &rhs.lo, hi: &self.hi + &rhs.hi }
    }
}

/// Exploration limits: outer lengths must be pinned to within `tol`, and at
/// most `horizon` layers beyond the region of interest are explored.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    pub tol: Length,
    pub horizon: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { tol: Length::ratio(1, 1000), horizon: 16 }
    }
}

/// The ball of radius `radius` with its edges, indexed for Dijkstra.
pub(crate) struct LocalBall {
    pub order: Vec<VertexId>,
    index: HashMap<VertexId, usize>,
    adj: Vec<Vec<(usize, Length)>>,
    frontier: Vec<bool>,
}

impl LocalBall {
    pub fn new(f: &dyn GraphFamily, radius: usize) -> LocalBall {
        let (order, _) = bfs_layers(f, radius);
        let index: HashMap<VertexId, usize> = order.iter().enumerate().map(|(k, v)| (v.clone(), k)).collect();
        let mut adj = vec![Vec::new(); order.len()];
        let mut frontier = vec![false; order.len()];
        for (k, v) in order.iter().enumerate() {
            for fe in f.neighbors(v) {
                match index.get(&fe.other) {
                    Some(&w) => adj[k].push((w, fe.length)),
                    None => frontier[k] = true,
                }
            }
        }
        LocalBall { order, index, adj, frontier }
    }

    /// The whole (finite) graph fits in the ball.
    pub fn exhausted(&self) -> bool {
        !self.frontier.iter().any(|&b| b)
    }

    pub fn contains_all<'a>(&self, vs: impl IntoIterator<Item = &'a VertexId>) -> bool {
        vs.into_iter().all(|v| self.index.contains_key(v))
    }

    pub fn idx(&self, v: &VertexId) -> Option<usize> {
        self.index.get(v).copied()
    }

    pub fn neighbours(&self, k: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj[k].iter().map(|(w, _)| *w)
    }

    /// Distances from `src` inside the ball; with `hub` the frontier is
    /// contracted to a single zero-cost vertex.
    pub fn distances(&self, src: usize, hub: bool) -> Vec<Option<Length>> {
        let n = self.order.len();
        let hub_idx = n;
        let mut dist: Vec<Option<Length>> = vec![None; n + 1];
        let mut heap = BinaryHeap::new();
        dist[src] = Some(Length::zero());
        heap.push(Reverse((Length::zero(), src)));
        while let Some(Reverse((d, x))) = heap.pop() {
            if dist[x].as_ref().is_some_and(|best| &d > best) {
                continue;
            }
            let mut relax = |y: usize, w: &Length, heap: &mut BinaryHeap<_>| {
                let cand = &d + w;
                if dist[y].as_ref().is_none_or(|cur| &cand < cur) {
                    dist[y] = Some(cand.clone());
                    heap.push(Reverse((cand, y)));
                }
            };
            if x == hub_idx {
                let zero = Length::zero();
                for y in (0..n).filter(|&y| self.frontier[y]) {
                    relax(y, &zero, &mut heap);
                }
                continue;
            }
            for (y, w) in &self.adj[x] {
                relax(*y, w, &mut heap);
            }
            if hub && self.frontier[x] {
                relax(hub_idx, &Length::zero(), &mut heap);
            }
        }
        dist.truncate(n);
        dist
    }

    /// Partition of `members` (vertices of the ball outside `inner`) into the
    /// components of the ball minus `inner`. The flag marks classes that reach
    /// the frontier and so may still merge further out.
    pub fn classes_outside(
        &self,
        inner: &BTreeSet<VertexId>,
        members: &BTreeSet<VertexId>,
    ) -> Vec<(BTreeSet<VertexId>, bool)> {
        let n = self.order.len();
        let mut comp = vec![usize::MAX; n];
        let mut out = Vec::new();
        for start in 0..n {
            if comp[start] != usize::MAX || inner.contains(&self.order[start]) {
                continue;
            }
            let id = out.len();
            let mut stack = vec![start];
            comp[start] = id;
            let mut class = BTreeSet::new();
            let mut open = false;
            while let Some(x) = stack.pop() {
                open |= self.frontier[x];
                if members.contains(&self.order[x]) {
                    class.insert(self.order[x].clone());
                }
                for y in self.neighbours(x) {
                    if comp[y] == usize::MAX && !inner.contains(&self.order[y]) {
                        comp[y] = id;
                        stack.push(y);
                    }
                }
            }
            out.push((class, open));
        }
        out.into_iter().filter(|(c, _)| !c.is_empty()).collect()
    }
}

/// Partition of `members` by the components of `G - S_r` they lie in.
///
/// Classes that reach the frontier of the explored ball are merged for
/// one-ended families once the family's settled radius is reached; for other
/// families the partition must stay unchanged for `horizon` extra layers.
pub fn components_outside(
    f: &dyn GraphFamily,
    r: usize,
    members: &BTreeSet<VertexId>,
    budget: &Budget,
) -> Result<Vec<BTreeSet<VertexId>>> {
    let inner = super::family::ball(f, r);
    if let Some(v) = members.iter().find(|v| inner.contains(*v)) {
        return Err(Error::contract(format!("vertex {v} lies inside the ball")));
    }
    for v in members {
        check_member(f, v)?;
    }
    // First radius whose ball holds every member.
    let mut start = r + 1;
    while !LocalBall::new(f, start).contains_all(members) {
        if LocalBall::new(f, start).exhausted() {
            return Err(Error::input("member vertex is not in the family"));
        }
        start += 1;
    }
    let settled = if f.one_ended() { f.settled_radius(r) } else { None };
    let mut previous: Option<Vec<BTreeSet<VertexId>>> = None;
    let mut stable = 0;
    for radius in start..=start + 2 * budget.horizon.max(1) {
        let ball = LocalBall::new(f, radius);
        let classes = ball.classes_outside(&inner, members);
        let open = classes.iter().filter(|(_, o)| *o).count();
        if open <= 1 || settled.is_some_and(|s| radius >= s) {
            return Ok(merge_classes(classes, true));
        }
        let partition = merge_classes(classes, false);
        if previous.as_ref() == Some(&partition) {
            stable += 1;
            if stable >= budget.horizon {
                return Ok(partition);
            }
        } else {
            stable = 0;
        }
        previous = Some(partition);
    }
    Err(Error::budget(format!(
        "components of {} outside radius {r} did not stabilise within {} layers",
        f.name(),
        2 * budget.horizon.max(1)
    )))
}

/// Families are connected, so only a lone root lacks neighbours. Catches
/// unknown names before an unbounded ball search on an infinite family.
fn check_member(f: &dyn GraphFamily, v: &VertexId) -> Result<()> {
    if *v != f.root() && f.neighbors(v).is_empty() {
        return Err(Error::input(format!("vertex {v} is not in family {}", f.name())));
    }
    Ok(())
}

fn merge_classes(classes: Vec<(BTreeSet<VertexId>, bool)>, merge: bool) -> Vec<BTreeSet<VertexId>> {
    let mut out: Vec<BTreeSet<VertexId>> = Vec::new();
    let mut open_class: BTreeSet<VertexId> = BTreeSet::new();
    for (c, open) in classes {
        if merge && open {
            open_class.extend(c);
        } else {
            out.push(c);
        }
    }
    if !open_class.is_empty() {
        out.push(open_class);
    }
    out.sort();
    out
}

/// Distances from one source, `None` when unreachable.
type Row = Vec<Option<Length>>;

/// Certified intervals for the distances of several vertex pairs.
pub fn pair_intervals(
    f: &dyn GraphFamily,
    pairs: &[(VertexId, VertexId)],
    budget: &Budget,
) -> Result<Vec<Interval>> {
    let mut result: Vec<Option<Interval>> = vec![None; pairs.len()];
    for (k, (u, v)) in pairs.iter().enumerate() {
        if u == v {
            result[k] = Some(Interval::zero());
        } else if let Some(d) = f.analytic_distance(u, v) {
            result[k] = Some(Interval::exact(d));
        }
    }
    if result.iter().all(Option::is_some) {
        return Ok(result.into_iter().map(Option::unwrap).collect());
    }
    // Smallest radius containing every endpoint.
    let needed: BTreeSet<&VertexId> = pairs.iter().flat_map(|(u, v)| [u, v]).collect();
    for v in &needed {
        check_member(f, v)?;
    }
    let mut radius = 0;
    loop {
        let ball = LocalBall::new(f, radius);
        if needed.iter().all(|v| ball.idx(v).is_some()) {
            break;
        }
        if ball.exhausted() {
            let missing = needed.iter().find(|v| ball.idx(v).is_none()).expect("some missing");
            return Err(Error::input(format!("vertex {missing} is not in family {}", f.name())));
        }
        radius += 1;
    }
    let last = radius + budget.horizon;
    for r in radius..=last {
        let ball = LocalBall::new(f, r);
        let mut cache: BTreeMap<usize, (Row, Row)> = BTreeMap::new();
        let mut done = true;
        for (k, (u, v)) in pairs.iter().enumerate() {
            if result[k].as_ref().is_some_and(|iv| iv.width() <= budget.tol) {
                continue;
            }
            let (ui, vi) = (ball.idx(u).expect("in ball"), ball.idx(v).expect("in ball"));
            let (plain, hub) =
                cache.entry(ui).or_insert_with(|| (ball.distances(ui, false), ball.distances(ui, true)));
            let lo = hub[vi].clone().unwrap_or_else(Length::zero);
            match plain[vi].clone() {
                Some(hi) if ball.exhausted() => result[k] = Some(Interval::exact(hi)),
                Some(hi) => {
                    let iv = Interval::new(lo, hi)?;
                    done &= iv.width() <= budget.tol;
                    result[k] = Some(iv);
                }
                None => {
                    if ball.exhausted() {
                        return Err(Error::NoPath { from: u.to_string(), to: v.to_string() });
                    }
                    done = false;
                }
            }
        }
        if done {
            return Ok(result.into_iter().map(|iv| iv.expect("settled")).collect());
        }
    }
    Err(Error::budget(format!(
        "distance bounds in {} wider than {} after {} extra layers",
        f.name(),
        budget.tol,
        budget.horizon
    )))
}

/// Certified interval for the distance between `u` and `v`.
pub fn distance_estimate(f: &dyn GraphFamily, u: &VertexId, v: &VertexId, budget: &Budget) -> Result<Interval> {
    Ok(pair_intervals(f, &[(u.clone(), v.clone())], budget)?.remove(0))
}

/// Bounds on ε_i; `hi` is `None` when no finite upper bound is available.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EpsilonBound {
    pub index: usize,
    pub lo: Length,
    pub hi: Option<Length>,
}

/// Bounds on the largest distance between points joined by an arc avoiding
/// the ball of radius `i - 1` (for `i = 0`, between any two points). The lower bound uses vertex pairs of the next
/// two layers only.
pub fn epsilon_estimate(f: &dyn GraphFamily, i: usize, budget: &Budget) -> Result<EpsilonBound> {
    // With i = 0 nothing is removed and the bound is on the diameter.
    let prev = if i == 0 { BTreeSet::new() } else { super::family::ball(f, i - 1) };
    let hi = if let Some(h) = f.analytic_epsilon_upper(i, &prev) {
        Some(h)
    } else if f.is_finite() {
        Some(finite_region_length(f, &prev))
    } else {
        None
    };

    let near: BTreeSet<VertexId> =
        super::family::ball(f, i + 1).into_iter().filter(|v| !prev.contains(v)).collect();
    if near.is_empty() {
        return Ok(EpsilonBound { index: i, lo: Length::zero(), hi });
    }
    let classes = if i == 0 { vec![near] } else { components_outside(f, i - 1, &near, budget)? };
    let mut lo = Length::zero();
    let mut ball: Option<LocalBall> = None;
    for class in &classes {
        for u in class {
            let mut hub_dist: Option<Vec<Option<Length>>> = None;
            for v in class.iter().filter(|v| *v > u) {
                let d = match f.analytic_distance(u, v) {
                    Some(d) => Some(d),
                    None => {
                        let b = ball.get_or_insert_with(|| LocalBall::new(f, i + 1 + budget.horizon));
                        let dist = hub_dist.get_or_insert_with(|| {
                            b.distances(b.idx(u).expect("in ball"), !b.exhausted())
                        });
                        dist[b.idx(v).expect("in ball")].clone()
                    }
                };
                if let Some(d) = d.filter(|d| d > &lo) {
                    lo = d;
                }
            }
        }
    }
    if let Some(h) = &hi {
        if &lo > h {
            return Err(Error::certification(format!("epsilon bounds crossed at i={i}: {lo} > {h}")));
        }
    }
    Ok(EpsilonBound { index: i, lo, hi })
}

/// Largest total length of a component of a finite graph outside `prev`,
/// counting the edges that join it to `prev`.
fn finite_region_length(f: &dyn GraphFamily, prev: &BTreeSet<VertexId>) -> Length {
    let (order, _) = bfs_layers(f, usize::MAX);
    let mut comp: HashMap<VertexId, usize> = HashMap::new();
    let mut totals: Vec<Length> = Vec::new();
    for start in order.iter().filter(|v| !prev.contains(*v)) {
        if comp.contains_key(start) {
            continue;
        }
        let id = totals.len();
        let mut total = Length::zero();
        let mut seen_edges = BTreeSet::new();
        let mut stack = vec![start.clone()];
        comp.insert(start.clone(), id);
        while let Some(x) = stack.pop() {
            for fe in f.neighbors(&x) {
                if seen_edges.insert(fe.id.clone()) {
                    total += &fe.length;
                }
                if !prev.contains(&fe.other) && !comp.contains_key(&fe.other) {
                    comp.insert(fe.other.clone(), id);
                    stack.push(fe.other);
                }
            }
        }
        totals.push(total);
    }
    totals.into_iter().max().unwrap_or_else(Length::zero)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Consistent,
    Refuted,
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Consistent => "CONSISTENT",
            Verdict::Refuted => "REFUTED",
            Verdict::Inconclusive => "INCONCLUSIVE",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetricReport {
    pub family: String,
    pub depth: usize,
    pub bounds: Vec<EpsilonBound>,
    pub verdict: Verdict,
}

/// ε bounds for `i = 1..=depth` and a verdict on whether they can tend to 0.
///
/// CONSISTENT: every upper bound is finite, the sequence never increases and
/// the last bound is at most a quarter of the first (or zero).
/// REFUTED: the lower bounds over the second half stay positive and never
/// drop below the least lower bound of the first half.
pub fn metric_diagnostic(f: &dyn GraphFamily, depth: usize, budget: &Budget) -> Result<MetricReport> {
    let bounds = (1..=depth.max(1)).map(|i| epsilon_estimate(f, i, budget)).collect::<Result<Vec<_>>>()?;
    let his: Option<Vec<&Length>> = bounds.iter().map(|b| b.hi.as_ref()).collect();
    let consistent = his.is_some_and(|h| {
        let first = h[0];
        let last = h[h.len() - 1];
        h.windows(2).all(|w| w[1] <= w[0]) && (last.is_zero() || &(last * 4) <= first)
    });
    let half = bounds.len() / 2;
    let refuted = !consistent && half > 0 && {
        let first = bounds[..half].iter().map(|b| &b.lo).min().expect("nonempty");
        let second = bounds[half..].iter().map(|b| &b.lo).min().expect("nonempty");
        second.is_positive() && second >= first
    };
    let verdict = if consistent {
        Verdict::Consistent
    } else if refuted {
        Verdict::Refuted
    } else {
        Verdict::Inconclusive
    };
    Ok(MetricReport { family: f.name(), depth, bounds, verdict })
}
