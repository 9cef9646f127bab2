//! Edge sets as vectors over GF(2).

use std::collections::BTreeSet;
use std::ops::{Add, AddAssign};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::graph::{EdgeId, Graph};
use crate::length::Length;

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EdgeSet(BTreeSet<EdgeId>);

impl EdgeSet {
    pub fn new() -> Self {
        EdgeSet(BTreeSet::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, e: &EdgeId) -> bool {
        self.0.contains(e)
    }

    pub fn insert(&mut self, e: EdgeId) -> bool {
        self.0.insert(e)
    }

    pub fn remove(&mut self, e: &EdgeId) -> bool {
        self.0.remove(e)
    }

    /// Adds `e` if absent, removes it if present.
    pub fn toggle(&mut self, e: EdgeId) {
        if !self.0.remove(&e) {
            self.0.insert(e);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = &EdgeId> {
        self.0.iter()
    }

    pub fn as_set(&self) -> &BTreeSet<EdgeId> {
        &self.0
    }

    pub fn is_disjoint(&self, other: &EdgeSet) -> bool {
        self.0.is_disjoint(&other.0)
    }

    pub fn is_subset(&self, other: &EdgeSet) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn intersection(&self, other: &EdgeSet) -> EdgeSet {
        EdgeSet(self.0.intersection(&other.0).cloned().collect())
    }

    pub fn extend_from<'a>(&mut self, edges: impl IntoIterator<Item = &'a EdgeId>) {
        self.0.extend(edges.into_iter().cloned());
    }

    /// Members kept by the predicate.
    pub fn filter(&self, mut keep: impl FnMut(&EdgeId) -> bool) -> EdgeSet {
        EdgeSet(self.0.iter().filter(|e| keep(e)).cloned().collect())
    }
}

impl FromIterator<EdgeId> for EdgeSet {
    fn from_iter<I: IntoIterator<Item = EdgeId>>(iter: I) -> Self {
        EdgeSet(iter.into_iter().collect())
    }
}

impl<'a> FromIterator<&'a str> for EdgeSet {
    fn from_iter<I: IntoIterator<Item = &'a str>>(iter: I) -> Self {
        EdgeSet(iter.into_iter().map(EdgeId::from).collect())
    }
}

impl IntoIterator for EdgeSet {
    type Item = EdgeId;
    type IntoIter = std::collections::btree_set::IntoIter<EdgeId>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.into_iter()
    }
}

impl<'a> IntoIterator for &'a EdgeSet {
    type Item = &'a EdgeId;
    type IntoIter = std::collections::btree_set::Iter<'a, EdgeId>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl AddAssign<&EdgeSet> for EdgeSet {
    fn add_assign(&mut self, rhs: &EdgeSet) {
        for e in &rhs.0 {
            if !self.0.remove(e) {
                self.0.insert(e.clone());
            }
        }
    }
}

impl Add<&EdgeSet> for &EdgeSet {
    type Output = EdgeSet;
    fn add(self, rhs: &EdgeSet) -> EdgeSet {
        EdgeSet(self.0.symmetric_difference(&rhs.0).cloned().collect())
    }
}

/// Edges lying in an odd number of members.
pub fn symmetric_sum<'a>(family: impl IntoIterator<Item = &'a EdgeSet>) -> EdgeSet {
    let mut acc = EdgeSet::new();
    for member in family {
        acc += member;
    }
    acc
}

/// Sum of the member edge lengths; every member must be an edge of `g`.
pub fn set_length(g: &Graph, x: &EdgeSet) -> Result<Length> {
    let mut total = Length::zero();
    for e in x {
        total += g.length_of(e)?;
    }
    Ok(total)
}

/// Rank over GF(2) of a family of edge sets.
pub fn gf2_rank<'a>(family: impl IntoIterator<Item = &'a EdgeSet>) -> usize {
    // Reduced rows keyed by their leading (least) edge id.
    let mut pivots: Vec<EdgeSet> = Vec::new();
    for member in family {
        let mut row = member.clone();
        loop {
            let Some(lead) = row.iter().next().cloned() else { break };
            match pivots.iter().find(|p| p.iter().next() == Some(&lead)) {
                Some(p) => row += p,
                None => {
                    pivots.push(row);
                    break;
                }
            }
        }
    }
    pivots.len()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(ids: &[&str]) -> EdgeSet {
        ids.iter().copied().collect()
    }

    #[test]
    fn overlapping_pair() {
        assert_eq!(symmetric_sum([&set(&["e1", "e2"]), &set(&["e2", "e3"])]), set(&["e1", "e3"]));
    }

    #[test]
    fn single_member_and_empty() {
        let x = set(&["a", "b"]);
        assert_eq!(symmetric_sum([&x]), x);
        assert_eq!(symmetric_sum(std::iter::empty()), EdgeSet::new());
    }

    #[test]
    fn rank_of_dependent_family() {
        let a = set(&["1", "2"]);
        let b = set(&["2", "3"]);
        let c = set(&["1", "3"]);
        assert_eq!(gf2_rank([&a, &b, &c]), 2);
        assert_eq!(gf2_rank([&a, &a]), 1);
        assert_eq!(gf2_rank([&EdgeSet::new()]), 0);
    }
}
