//! Brute-force oracles shared by the integration tests. They only read
//! graphs through their vertex and edge lists and never call the library's
//! shortest-path, geodesy or cycle code.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use geocycle::{Cycle, EdgeId, Graph, Length};
use num_rational::BigRational;
use num_traits::Zero;

pub type Table = Vec<Vec<Option<BigRational>>>;

/// Floyd-Warshall over exact rationals.
pub fn floyd(g: &Graph) -> (BTreeMap<String, usize>, Table) {
    let idx: BTreeMap<String, usize> = g.vertices().iter().enumerate().map(|(k, v)| (v.to_string(), k)).collect();
    let n = idx.len();
    let mut d: Table = vec![vec![None; n]; n];
    for (k, row) in d.iter_mut().enumerate() {
        row[k] = Some(BigRational::zero());
    }
    for e in g.edges() {
        let (a, b) = (idx[e.u.as_str()], idx[e.v.as_str()]);
        let l = e.length.as_rational().clone();
        for (x, y) in [(a, b), (b, a)] {
            if d[x][y].as_ref().is_none_or(|cur| &l < cur) {
                d[x][y] = Some(l.clone());
            }
        }
    }
    for m in 0..n {
        for x in 0..n {
            let Some(dxm) = d[x][m].clone() else { continue };
            let through = d[m].clone();
            for (cell, dmy) in d[x].iter_mut().zip(&through) {
                if let Some(dmy) = dmy {
                    let via = &dxm + dmy;
                    if cell.as_ref().is_none_or(|cur| &via < cur) {
                        *cell = Some(via);
                    }
                }
            }
        }
    }
    (idx, d)
}

pub fn edge_len(g: &Graph, e: &EdgeId) -> BigRational {
    g.edges().iter().find(|x| &x.id == e).expect("edge of graph").length.as_rational().clone()
}

/// Vertex-pair geodesy: for every pair on the cycle the shorter arc equals
/// the distance.
pub fn geodetic_by_floyd(g: &Graph, oracle: &(BTreeMap<String, usize>, Table), c: &Cycle) -> bool {
    let (idx, d) = oracle;
    let lens: Vec<BigRational> = c.edges().iter().map(|e| edge_len(g, e)).collect();
    let total: BigRational = lens.iter().cloned().sum();
    let n = c.vertices().len();
    let mut prefix = vec![BigRational::zero()];
    for l in &lens {
        let next = prefix.last().unwrap() + l;
        prefix.push(next);
    }
    for a in 0..n {
        for b in a + 1..n {
            let arc = &prefix[b] - &prefix[a];
            let other = &total - &arc;
            let short = if arc < other { arc } else { other };
            let x = idx[c.vertices()[a].as_str()];
            let y = idx[c.vertices()[b].as_str()];
            match &d[x][y] {
                Some(dist) if dist < &short => return false,
                _ => {}
            }
        }
    }
    true
}

pub fn length_of(g: &Graph, edges: &[EdgeId]) -> BigRational {
    edges.iter().map(|e| edge_len(g, e)).sum()
}

pub fn xor<'a>(sets: impl IntoIterator<Item = &'a [EdgeId]>) -> BTreeSet<EdgeId> {
    let mut acc = BTreeSet::new();
    for s in sets {
        for e in s {
            if !acc.remove(e) {
                acc.insert(e.clone());
            }
        }
    }
    acc
}

/// Every cycle as an edge-id set, by testing each edge subset for being
/// connected and 2-regular (a loop counts once). Only for small graphs.
pub fn cycles_by_subsets(g: &Graph) -> Vec<BTreeSet<EdgeId>> {
    let m = g.edge_count();
    assert!(m <= 20, "subset enumeration is for small graphs");
    let edges = g.edges();
    let mut out = Vec::new();
    for mask in 1u32..(1 << m) {
        let chosen: Vec<usize> = (0..m).filter(|k| mask >> k & 1 == 1).collect();
        let mut deg: BTreeMap<&str, usize> = BTreeMap::new();
        for &k in &chosen {
            *deg.entry(edges[k].u.as_str()).or_default() += 1;
            *deg.entry(edges[k].v.as_str()).or_default() += 1;
        }
        if deg.values().any(|&x| x != 2) {
            continue;
        }
        // connected?
        let verts: Vec<&str> = deg.keys().copied().collect();
        let mut seen: BTreeSet<&str> = BTreeSet::from([verts[0]]);
        let mut grew = true;
        while grew {
            grew = false;
            for &k in &chosen {
                let (u, v) = (edges[k].u.as_str(), edges[k].v.as_str());
                if seen.contains(u) != seen.contains(v) {
                    seen.insert(u);
                    seen.insert(v);
                    grew = true;
                }
            }
        }
        if seen.len() == verts.len() {
            out.push(chosen.iter().map(|&k| edges[k].id.clone()).collect());
        }
    }
    out
}

/// Induced (no chord) and non-separating.
pub fn peripheral_by_definition(g: &Graph, cycle: &BTreeSet<EdgeId>) -> bool {
    let on: BTreeSet<&str> = g
        .edges()
        .iter()
        .filter(|e| cycle.contains(&e.id))
        .flat_map(|e| [e.u.as_str(), e.v.as_str()])
        .collect();
    if g.edges().iter().any(|e| !cycle.contains(&e.id) && on.contains(e.u.as_str()) && on.contains(e.v.as_str())) {
        return false;
    }
    let rest: Vec<&str> = g.vertices().iter().map(|v| v.as_str()).filter(|v| !on.contains(v)).collect();
    if rest.is_empty() {
        return true;
    }
    let mut seen: BTreeSet<&str> = BTreeSet::from([rest[0]]);
    let mut grew = true;
    while grew {
        grew = false;
        for e in g.edges() {
            let (u, v) = (e.u.as_str(), e.v.as_str());
            if on.contains(u) || on.contains(v) {
                continue;
            }
            if seen.contains(u) != seen.contains(v) {
                seen.insert(u);
                seen.insert(v);
                grew = true;
            }
        }
    }
    seen.len() == rest.len()
}

/// Rank over GF(2) by Gaussian elimination on bit rows.
pub fn rank_gf2(g: &Graph, sets: &[BTreeSet<EdgeId>]) -> usize {
    let pos: BTreeMap<&EdgeId, usize> = g.edges().iter().enumerate().map(|(k, e)| (&e.id, k)).collect();
    let mut rows: Vec<u128> = sets.iter().map(|s| s.iter().fold(0u128, |acc, e| acc | 1 << pos[e])).collect();
    let mut rank = 0;
    for bit in 0..g.edge_count() {
        let Some(p) = (rank..rows.len()).find(|&r| rows[r] >> bit & 1 == 1) else { continue };
        rows.swap(rank, p);
        for r in 0..rows.len() {
            if r != rank && rows[r] >> bit & 1 == 1 {
                rows[r] ^= rows[rank];
            }
        }
        rank += 1;
    }
    rank
}

pub fn ratio(p: i64, q: i64) -> BigRational {
    Length::ratio(p, q).as_rational().clone()
}
