//! Stage-wise generation of geodetic circles for an element of the cycle
//! space of a locally finite graph, run to a finite depth.
//!
//! A circle is represented by a chain `X_i, .., X_N` of geodetic cycles, one
//! per truncation, each the restriction of the next. Stage `i` turns the
//! residual element into chains of length at most `5 * eps_i` so that the new
//! residual has no edge meeting `S_i`. All residuals are carried as even edge
//! sets of the deepest truncation `N`, the host.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::cycle::{decompose_into_circuits, Cycle};
use crate::decompose::Decomposer;
use crate::edgeset::{symmetric_sum, EdgeSet};
use crate::error::{Error, Result};
use crate::graph::{EdgeId, VertexId};
use crate::length::Length;
use crate::truncation::{ball, restrict_closed_walk, restrict_cycle, Hierarchy, Ladder, Truncation, Walk};

/// An element of the cycle space given as a thin family of finite circuits.
pub trait CircuitStream: Send + Sync {
    fn name(&self) -> String;

    /// Every member circuit meeting the ball of radius `i`, as closed walks
    /// of the family. Members further out may be included as well.
    fn members(&self, i: usize) -> Vec<Walk>;
}

pub struct EmptyStream;

impl CircuitStream for EmptyStream {
    fn name(&self) -> String {
        "empty".into()
    }

    fn members(&self, _i: usize) -> Vec<Walk> {
        Vec::new()
    }
}

/// A fixed finite list of circuits.
pub struct WalkStream {
    pub label: String,
    pub walks: Vec<Walk>,
}

impl CircuitStream for WalkStream {
    fn name(&self) -> String {
        self.label.clone()
    }

    fn members(&self, _i: usize) -> Vec<Walk> {
        self.walks.clone()
    }
}

/// The square between rungs `n` and `n + 1` of a ladder.
pub struct SquareStream {
    pub ladder: Ladder,
    pub n: u64,
}

impl CircuitStream for SquareStream {
    fn name(&self) -> String {
        format!("square{}", self.n)
    }

    fn members(&self, _i: usize) -> Vec<Walk> {
        vec![self.ladder.square_walk(self.n)]
    }
}

/// The sum of the squares `Q_1, Q_3, Q_5, ..` of a ladder: it contains every
/// rung and alternate rail edges.
pub struct RungElement {
    pub ladder: Ladder,
}

impl CircuitStream for RungElement {
    fn name(&self) -> String {
        "rungs".into()
    }

    fn members(&self, i: usize) -> Vec<Walk> {
        // Square n first meets the ball of radius n - 1.
        (1..=i as u64 + 2).step_by(2).map(|n| self.ladder.square_walk(n)).collect()
    }
}

/// One cycle of a chain.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChainLevel {
    pub index: usize,
    pub cycle: Cycle,
    pub length: Length,
}

/// Geodetic cycles `X_start .. X_N`, each the restriction of the next.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Chain {
    pub levels: Vec<ChainLevel>,
}

impl Chain {
    pub fn start(&self) -> usize {
        self.levels[0].index
    }

    pub fn top(&self) -> &ChainLevel {
        self.levels.last().expect("nonempty chain")
    }

    pub fn at(&self, j: usize) -> Option<&ChainLevel> {
        j.checked_sub(self.start()).and_then(|k| self.levels.get(k))
    }

    pub fn contains_edge(&self, e: &EdgeId) -> bool {
        self.levels.iter().any(|l| l.cycle.edges().contains(e))
    }
}

/// Truncations `0..=N` with a decomposer for each.
pub struct Levels<'a> {
    pub hierarchy: &'a Hierarchy,
    pub truncations: &'a [Arc<Truncation>],
    pub decomposers: Vec<Decomposer<'a>>,
}

impl<'a> Levels<'a> {
    pub fn new(hierarchy: &'a Hierarchy, truncations: &'a [Arc<Truncation>]) -> Levels<'a> {
        let decomposers = truncations.par_iter().map(|t| Decomposer::new(&t.hat)).collect();
        Levels { hierarchy, truncations, decomposers }
    }

    pub fn depth(&self) -> usize {
        self.truncations.len() - 1
    }

    fn tilde_edges(&self, i: usize) -> EdgeSet {
        self.truncations[i].tilde.edges().iter().map(|e| e.id.clone()).collect()
    }
}

/// Builds truncations `0..=depth` of the hierarchy.
pub fn build_levels(h: &Hierarchy, depth: usize) -> Result<Vec<Arc<Truncation>>> {
    (0..=depth).map(|j| h.truncation(j)).collect()
}

/// A family of cycles of one truncation, kept sorted.
type Family = Vec<Cycle>;

/// Picks one candidate per level so that each is the restriction of the next.
///
/// `parents[j][c]` is the index at level `j - 1` of the restriction of
/// candidate `c` of level `j` (`None` when it has no valid restriction;
/// `parents[0]` is ignored). At each level the candidate with the most
/// descendants on the deepest level wins, ties going to the lower index.
pub fn koenig_select(level_sizes: &[usize], parents: &[Vec<Option<usize>>]) -> Result<Vec<usize>> {
    let n = level_sizes.len();
    if n == 0 {
        return Err(Error::NoSequence("no levels".into()));
    }
    if let Some(j) = level_sizes.iter().position(|&s| s == 0) {
        return Err(Error::NoSequence(format!("level {j} has no candidates")));
    }
    let mut counts: Vec<Vec<u64>> = level_sizes.iter().map(|&s| vec![0; s]).collect();
    counts[n - 1].iter_mut().for_each(|c| *c = 1);
    for j in (1..n).rev() {
        for c in 0..level_sizes[j] {
            if let Some(p) = parents[j][c] {
                counts[j - 1][p] += counts[j][c];
            }
        }
    }
    let best = |cands: &mut dyn Iterator<Item = usize>, level: &[u64]| -> Option<usize> {
        cands.filter(|&c| level[c] > 0).fold(None, |acc, c| match acc {
            Some(a) if level[a] >= level[c] => Some(a),
            _ => Some(c),
        })
    };
    let first = best(&mut (0..level_sizes[0]), &counts[0])
        .ok_or_else(|| Error::NoSequence("no candidate reaches the deepest level".into()))?;
    let mut picked = vec![first];
    for j in 1..n {
        let prev = picked[j - 1];
        let next = best(&mut (0..level_sizes[j]).filter(|&c| parents[j][c] == Some(prev)), &counts[j])
            .expect("positive count has a child");
        picked.push(next);
    }
    Ok(picked)
}

fn cancel_pairs(parts: Vec<Cycle>) -> Vec<Cycle> {
    let mut parity: BTreeMap<Cycle, bool> = BTreeMap::new();
    for p in parts {
        *parity.entry(p).or_insert(false) ^= true;
    }
    parity.into_iter().filter(|(_, odd)| *odd).map(|(c, _)| c).collect()
}

fn sum_on(family: &[Cycle], area: &EdgeSet) -> EdgeSet {
    let sets: Vec<EdgeSet> = family.iter().map(|c| c.edge_set().intersection(area)).collect();
    symmetric_sum(&sets)
}

/// Drops members, first to last, while the sum still agrees with `target` on `area`.
fn prune(mut family: Vec<Cycle>, area: &EdgeSet, target: &EdgeSet) -> Vec<Cycle> {
    let mut k = 0;
    while k < family.len() {
        let removed = family.remove(k);
        if &sum_on(&family, area) == target {
            continue;
        }
        family.insert(k, removed);
        k += 1;
    }
    family
}

/// Splits a circuit `d` of the host (meeting `S_i`, avoiding `S_{i-1}`) into
/// chains from level `i` to the host level whose sum agrees with `d` on the
/// edges meeting `S_i`. Every chain member is geodetic in its truncation and
/// no longer than `5 * eps`.
pub fn decompose_meeting_circle(levels: &Levels<'_>, d: &Cycle, i: usize, eps: &Length) -> Result<Vec<Chain>> {
    let n = levels.depth();
    if i >= n {
        return Err(Error::input(format!("stage {i} needs a host deeper than {n}")));
    }
    let bound = eps * 5;
    let area = levels.tilde_edges(i);
    let target = d.edge_set().intersection(&area);
    if i > 0 && d.vertices().iter().any(|v| levels.truncations[i - 1].inner.contains(v)) {
        return Err(Error::contract(format!("circuit meets the ball of radius {}", i - 1)));
    }

    // Own family at every level.
    let own: Vec<Family> = (i..=n)
        .into_par_iter()
        .map(|j| -> Result<Family> {
            let t = &levels.truncations[j];
            let dj = restrict_cycle(d, t)?.ok_or_else(|| Error::contract("circuit does not meet S_i"))?;
            let dec = levels.decomposers[j].short(&dj, eps, &dj.edge_set())?;
            let mut fam = prune(cancel_pairs(dec.parts), &area, &target);
            fam.sort();
            Ok(fam)
        })
        .collect::<Result<_>>()?;

    // Candidates per level, deepest first, with restriction links.
    let valid = |fam: &Family, j: usize| -> Result<bool> {
        let g = &levels.truncations[j].hat;
        for c in fam {
            if c.length(g)? > bound || !levels.decomposers[j].is_geodetic(c)? {
                return Ok(false);
            }
        }
        Ok(sum_on(fam, &area) == target)
    };
    let mut cands: Vec<Vec<Family>> = vec![Vec::new(); n - i + 1];
    let mut links: Vec<Vec<Option<Family>>> = vec![Vec::new(); n - i + 1];
    cands[n - i] = vec![own[n - i].clone()];
    for j in (i..n).rev() {
        let t = &levels.truncations[j];
        let mut here: BTreeSet<Family> = BTreeSet::from([own[j - i].clone()]);
        let mut down = Vec::new();
        for fam in &cands[j + 1 - i] {
            let mut r = Vec::new();
            for c in fam {
                match restrict_cycle(c, t)? {
                    Some(rc) => r.push(rc),
                    None => break,
                }
            }
            r.sort();
            let ok = r.len() == fam.len() && r.windows(2).all(|w| w[0] != w[1]) && valid(&r, j)?;
            if ok {
                here.insert(r.clone());
                down.push(Some(r));
            } else {
                down.push(None);
            }
        }
        links[j + 1 - i] = down;
        cands[j - i] = here.into_iter().collect();
    }
    let parents: Vec<Vec<Option<usize>>> = (0..=n - i)
        .map(|k| {
            links[k]
                .iter()
                .map(|r| r.as_ref().and_then(|r| cands[k - 1].iter().position(|c| c == r)))
                .collect()
        })
        .collect();
    let sizes: Vec<usize> = cands.iter().map(Vec::len).collect();
    let picked = koenig_select(&sizes, &parents)?;

    // One chain per member of the deepest family, restricted level by level.
    let top = &cands[n - i][picked[n - i]];
    let mut chains = Vec::new();
    for x in top {
        let mut cycles = vec![x.clone()];
        for j in (i..n).rev() {
            let r = restrict_cycle(cycles.last().expect("nonempty"), &levels.truncations[j])?
                .expect("validated restriction");
            cycles.push(r);
        }
        cycles.reverse();
        let levels_out = cycles
            .into_iter()
            .enumerate()
            .map(|(k, cycle)| {
                let length = cycle.length(&levels.truncations[i + k].hat)?;
                Ok(ChainLevel { index: i + k, cycle, length })
            })
            .collect::<Result<Vec<_>>>()?;
        chains.push(Chain { levels: levels_out });
    }
    for (k, &p) in picked.iter().enumerate() {
        let at_level: BTreeSet<&Cycle> = chains.iter().map(|c| &c.levels[k].cycle).collect();
        let chosen: BTreeSet<&Cycle> = cands[k][p].iter().collect();
        if at_level != chosen {
            return Err(Error::contract(format!("chains disagree with the selected family at level {}", i + k)));
        }
    }
    Ok(chains)
}

#[derive(Clone, Debug, Serialize)]
pub struct GammaStage {
    pub index: usize,
    pub epsilon_hi: Length,
    /// `5 * epsilon_hi`, the certified bound on every circle of the stage.
    pub bound: Length,
    pub circles: Vec<Chain>,
    /// Edges meeting `S_i` left in the residual after this stage (always 0).
    pub residual_on_tilde: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct PipelineReport {
    pub family: String,
    pub stream: String,
    pub depth: usize,
    pub host: usize,
    pub stages: Vec<GammaStage>,
}

/// The element restricted to the host truncation, as an even edge set.
pub fn host_element(stream: &dyn CircuitStream, host: &Truncation) -> Result<EdgeSet> {
    let mut sum = EdgeSet::new();
    for w in stream.members(host.index) {
        if let Some(c) = restrict_closed_walk(&w, host)? {
            sum += &c.edge_set();
        }
    }
    Ok(sum)
}

/// Runs stages `0..=depth` with every chain reaching the host level `host`.
pub fn generate_gamma(h: &Hierarchy, stream: &dyn CircuitStream, depth: usize, host: usize) -> Result<PipelineReport> {
    if depth >= host {
        return Err(Error::input(format!("host level {host} must exceed depth {depth}")));
    }
    let truncations = build_levels(h, host)?;
    let levels = Levels::new(h, &truncations);
    let host_t = &truncations[host];
    let mut residual = host_element(stream, host_t)?;
    let mut stages = Vec::new();
    for i in 0..=depth {
        let eps = h.epsilon_hi(i)?;
        let inner = ball(h.family(), i);
        let meeting: Vec<Cycle> = decompose_into_circuits(&host_t.hat, &residual)?
            .into_iter()
            .filter(|c| c.vertices().iter().any(|v| inner.contains(v)))
            .collect();
        let per_circuit: Vec<Vec<Chain>> = meeting
            .par_iter()
            .map(|d| decompose_meeting_circle(&levels, d, i, &eps))
            .collect::<Result<_>>()?;
        let circles: Vec<Chain> = per_circuit.into_iter().flatten().collect();
        for ch in &circles {
            residual += &ch.top().cycle.edge_set();
        }
        let left = residual.intersection(&levels.tilde_edges(i)).len();
        if left != 0 {
            return Err(Error::contract(format!("stage {i} leaves {left} residual edges meeting S_{i}")));
        }
        stages.push(GammaStage { index: i, bound: &eps * 5, epsilon_hi: eps, circles, residual_on_tilde: left });
    }
    Ok(PipelineReport { family: h.family().name(), stream: stream.name(), depth, host, stages })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ThinnessReport {
    pub edge: EdgeId,
    pub length: Length,
    /// Last stage with a circle through the edge.
    pub last_stage: Option<usize>,
    /// First stage whose bound `5 * eps` is below the edge length.
    pub cutoff: Option<usize>,
    pub holds: bool,
}

/// Checks that no circle of a stage at or past the cutoff uses `e`.
pub fn verify_thinness(stages: &[GammaStage], e: &EdgeId, length: &Length) -> ThinnessReport {
    let last_stage = stages.iter().filter(|s| s.circles.iter().any(|c| c.contains_edge(e))).map(|s| s.index).max();
    let cutoff = stages.iter().find(|s| &s.bound < length).map(|s| s.index);
    let holds = match (last_stage, cutoff) {
        (Some(l), Some(c)) => l < c,
        _ => true,
    };
    ThinnessReport { edge: e.clone(), length: length.clone(), last_stage, cutoff, holds }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChainUnion {
    pub edges: EdgeSet,
    /// Number of vertices of each degree once every boundary class of the
    /// top truncation is contracted to one end vertex.
    pub degrees: BTreeMap<usize, usize>,
    pub is_circle: bool,
}

/// Union of `X_j ∩ S̃_j` over the chain, with a census telling whether it
/// closes up into a single circle through the ends.
pub fn chain_union(ch: &Chain, levels: &[Arc<Truncation>]) -> Result<ChainUnion> {
    let mut edges = EdgeSet::new();
    for l in &ch.levels {
        let t = levels.get(l.index).ok_or_else(|| Error::input(format!("missing truncation {}", l.index)))?;
        for e in l.cycle.edges() {
            if t.tilde.has_edge(e) {
                edges.insert(e.clone());
            }
        }
    }
    let top = &levels[ch.top().index];
    let end_of: BTreeMap<&VertexId, usize> =
        top.boundary_classes.iter().enumerate().flat_map(|(k, c)| c.iter().map(move |v| (v, k))).collect();
    let node = |v: &VertexId| match end_of.get(v) {
        Some(k) => format!("end:{k}"),
        None => v.to_string(),
    };
    let mut degree: BTreeMap<String, usize> = BTreeMap::new();
    let mut adj: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for e in &edges {
        let edge = top.tilde.edge(e)?;
        let (a, b) = (node(&edge.u), node(&edge.v));
        *degree.entry(a.clone()).or_default() += 1;
        *degree.entry(b.clone()).or_default() += 1;
        adj.entry(a.clone()).or_default().push(b.clone());
        adj.entry(b).or_default().push(a);
    }
    let mut degrees: BTreeMap<usize, usize> = BTreeMap::new();
    for d in degree.values() {
        *degrees.entry(*d).or_default() += 1;
    }
    let connected = match adj.keys().next() {
        None => false,
        Some(start) => {
            let mut seen = BTreeSet::from([start.clone()]);
            let mut stack = vec![start.clone()];
            while let Some(x) = stack.pop() {
                for y in &adj[&x] {
                    if seen.insert(y.clone()) {
                        stack.push(y.clone());
                    }
                }
            }
            seen.len() == adj.len()
        }
    };
    let is_circle = connected && degrees.keys().all(|&d| d == 2);
    Ok(ChainUnion { edges, degrees, is_circle })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn koenig_single_candidates() {
        assert_eq!(koenig_select(&[1, 1, 1], &[vec![], vec![Some(0)], vec![Some(0)]]).unwrap(), [0, 0, 0]);
    }

    #[test]
    fn koenig_follows_surviving_branch() {
        // Level 0: a, b. Level 1: a' -> a, b' -> b. Level 2: only a'' -> a'.
        let picked = koenig_select(&[2, 2, 1], &[vec![], vec![Some(0), Some(1)], vec![Some(0)]]).unwrap();
        assert_eq!(picked, [0, 0, 0]);
        let picked = koenig_select(&[2, 2, 1], &[vec![], vec![Some(0), Some(1)], vec![Some(1)]]).unwrap();
        assert_eq!(picked, [1, 1, 0]);
    }

    #[test]
    fn koenig_prefers_more_descendants() {
        let picked =
            koenig_select(&[2, 3, 3], &[vec![], vec![Some(0), Some(1), Some(1)], vec![Some(0), Some(1), Some(2)]])
                .unwrap();
        assert_eq!(picked[0], 1);
    }

    #[test]
    fn koenig_empty_level_errors() {
        assert!(matches!(koenig_select(&[1, 0], &[vec![], vec![]]), Err(Error::NoSequence(_))));
        assert!(matches!(koenig_select(&[1, 1], &[vec![], vec![None]]), Err(Error::NoSequence(_))));
    }
}
