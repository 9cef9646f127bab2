mod common;

use std::collections::BTreeSet;
use std::sync::Arc;

use common::{floyd, ratio};
use geocycle::experiments::{cycle_graph, k4, wheel};
use geocycle::truncation::{
    ball, build_truncation, distance_estimate, epsilon_estimate, metric_diagnostic, restrict_cycle, restrict_path,
    Budget, FamilySpec, FiniteFamily, GraphFamily, Hierarchy, Interval, Ladder, LengthScheme, Strip, Verdict,
};
use geocycle::{Cycle, EdgeId, Length, Path, VertexId};
use num_rational::BigRational;

fn ids(set: &BTreeSet<VertexId>) -> Vec<&str> {
    set.iter().map(VertexId::as_str).collect()
}

fn edges(ids: &[&str]) -> Vec<EdgeId> {
    ids.iter().map(|s| EdgeId::from(*s)).collect()
}

fn wheel_family() -> FiniteFamily {
    FiniteFamily::new(wheel(5), "r0".into()).unwrap()
}

#[test]
fn balls_of_the_ladder_and_finite_graphs() {
    let ladder = Ladder::new(LengthScheme::Unit);
    assert_eq!(ids(&ball(&ladder, 0)), ["x1"]);
    assert_eq!(ids(&ball(&ladder, 1)), ["x1", "x2", "y1"]);
    let f = wheel_family();
    let all: BTreeSet<VertexId> = f.graph().vertices().iter().cloned().collect();
    assert_eq!(ball(&f, 2), all);
    assert_eq!(ball(&f, 9), all);
}

#[test]
fn boundary_of_the_ladder_is_one_class() {
    let ladder = Ladder::new(LengthScheme::Unit);
    for i in 1..=6 {
        let t = build_truncation(&ladder, i, &Budget::default()).unwrap();
        assert_eq!(t.boundary_classes.len(), 1);
        assert_eq!(t.outer.len(), 1);
        let o = t.outer.values().next().unwrap();
        let ends: BTreeSet<String> = [o.u.to_string(), o.v.to_string()].into();
        assert_eq!(ends, [format!("x{}", i + 2), format!("y{}", i + 1)].into());
    }
}

/// Vertices of the ladder in the order of its snake-shaped spanning ray.
fn snake(len: usize) -> Vec<String> {
    let mut out = Vec::new();
    let mut n = 1;
    while out.len() < len {
        if n % 2 == 1 {
            out.push(format!("x{n}"));
            out.push(format!("y{n}"));
        } else {
            out.push(format!("y{n}"));
            out.push(format!("x{n}"));
        }
        n += 1;
    }
    out.truncate(len);
    out
}

/// Tree-path length between two vertices of the NST ladder: the k-th ray
/// edge has length 2^-k.
fn tree_path(u: &str, v: &str) -> BigRational {
    let ray = snake(200);
    let p = ray.iter().position(|x| x == u).unwrap();
    let q = ray.iter().position(|x| x == v).unwrap();
    let (a, b) = if p < q { (p, q) } else { (q, p) };
    (a + 1..=b).map(|k| BigRational::new(1.into(), num_bigint::BigInt::from(2).pow(k as u32))).sum()
}

#[test]
fn nst_edge_lengths_are_tree_path_sums() {
    let ladder = Ladder::new(LengthScheme::Nst);
    for v in snake(30) {
        for e in ladder.neighbors(&v.as_str().into()) {
            assert_eq!(e.length.as_rational(), &tree_path(&v, e.other.as_str()), "{v} {}", e.id);
        }
    }
}

#[test]
fn nst_outer_edges_carry_exact_distances() {
    let ladder = Ladder::new(LengthScheme::Nst);
    for i in 1..=6 {
        let t = build_truncation(&ladder, i, &Budget::default()).unwrap();
        for o in t.outer.values() {
            assert!(o.length.is_exact());
            assert_eq!(o.length.hi.as_rational(), &tree_path(o.u.as_str(), o.v.as_str()));
        }
    }
    let x5y4 = distance_estimate(&ladder, &"x5".into(), &"y4".into(), &Budget::default()).unwrap();
    assert_eq!(x5y4, Interval::exact(Length::ratio(3, 256)));
}

#[test]
fn distance_estimates() {
    let budget = Budget::default();
    let unit = Ladder::new(LengthScheme::Unit);
    assert_eq!(distance_estimate(&unit, &"x3".into(), &"x3".into(), &budget).unwrap(), Interval::zero());
    assert_eq!(distance_estimate(&unit, &"x3".into(), &"x4".into(), &budget).unwrap(), Interval::exact(Length::one()));
    let harmonic = Ladder::new(LengthScheme::DyadicHarmonic);
    let d = distance_estimate(&harmonic, &"x1".into(), &"y1".into(), &budget).unwrap();
    assert!(d.contains(&Length::ratio(1, 2)), "{d:?}");
    assert!(d.width() <= budget.tol);
}

#[test]
fn distance_estimate_on_subdivided_ladder_matches_brute_force() {
    let ladder = Ladder::subdivided(LengthScheme::Unit).unwrap();
    let big = geocycle::truncation::ball_graph(&ladder, 30);
    let (idx, d) = floyd(&big);
    for (u, v) in [("x3", "y3"), ("x4", "y3"), ("r3_2", "y4"), ("x5", "y5")] {
        let got = distance_estimate(&ladder, &u.into(), &v.into(), &Budget::default()).unwrap();
        assert!(got.is_exact());
        assert_eq!(Some(got.hi.as_rational().clone()), d[idx[u]][idx[v]], "{u} {v}");
    }
}

#[test]
fn epsilon_vanishes_past_a_finite_graph() {
    let f = wheel_family();
    let b = epsilon_estimate(&f, 4, &Budget::default()).unwrap();
    assert!(b.lo.is_zero());
    assert_eq!(b.hi, Some(Length::zero()));
    let b = epsilon_estimate(&f, 1, &Budget::default()).unwrap();
    assert!(b.lo.is_positive());
    assert!(b.lo <= b.hi.unwrap());
}

#[test]
fn epsilon_bounds_of_the_ladders() {
    let budget = Budget::default();
    let nst = Ladder::new(LengthScheme::Nst);
    let his: Vec<Length> = (1..=8).map(|i| epsilon_estimate(&nst, i, &budget).unwrap().hi.unwrap()).collect();
    assert!(his.windows(2).all(|w| w[1] < w[0]), "{his:?}");
    let unit = Ladder::new(LengthScheme::Unit);
    for i in 1..=6 {
        let b = epsilon_estimate(&unit, i, &budget).unwrap();
        assert!(b.lo >= Length::one());
        assert_eq!(b.hi, None);
    }
}

#[test]
fn metric_verdicts() {
    let budget = Budget::default();
    assert_eq!(metric_diagnostic(&Ladder::new(LengthScheme::Nst), 10, &budget).unwrap().verdict, Verdict::Consistent);
    assert_eq!(metric_diagnostic(&Ladder::new(LengthScheme::Unit), 6, &budget).unwrap().verdict, Verdict::Refuted);
    assert_eq!(metric_diagnostic(&wheel_family(), 4, &budget).unwrap().verdict, Verdict::Consistent);
    let strip = Strip::new(3).unwrap();
    assert_eq!(metric_diagnostic(&strip, 5, &budget).unwrap().verdict, Verdict::Refuted);
}

#[test]
fn restriction_of_square_three_to_level_two() {
    let ladder = Ladder::new(LengthScheme::Unit);
    let t2 = build_truncation(&ladder, 2, &Budget::default()).unwrap();
    let t4 = build_truncation(&ladder, 6, &Budget::default()).unwrap();
    let q3 = Cycle::from_edge_set(&t4.hat, &ladder.square(3).into_iter().collect()).unwrap();
    let r = restrict_cycle(&q3, &t2).unwrap().unwrap();
    let got: BTreeSet<EdgeId> = r.edges().iter().cloned().collect();
    assert_eq!(got, edges(&["x3-x4", "outer:x4~y3", "x3-y3"]).into_iter().collect());
    assert_eq!(t2.edge_interval(&"outer:x4~y3".into()).unwrap(), Interval::exact(Length::integer(2)));
    // Q5 avoids S_2 entirely.
    let q5 = Cycle::from_edge_set(&t4.hat, &ladder.square(5).into_iter().collect()).unwrap();
    assert_eq!(restrict_cycle(&q5, &t2).unwrap(), None);
    // Q1 lies inside the tilde graph and restricts to itself.
    let q1 = Cycle::from_edge_set(&t4.hat, &ladder.square(1).into_iter().collect()).unwrap();
    assert_eq!(restrict_cycle(&q1, &t2).unwrap(), Some(q1));
}

#[test]
fn restriction_of_a_path() {
    let ladder = Ladder::new(LengthScheme::Unit);
    let t1 = build_truncation(&ladder, 1, &Budget::default()).unwrap();
    let p = Path {
        vertices: ["y1", "y2", "y3", "x3", "x4"].iter().map(|v| VertexId::from(*v)).collect(),
        edges: edges(&["y1-y2", "y2-y3", "x3-y3", "x3-x4"]),
        length: Length::integer(4),
    };
    let r = restrict_path(&p, &t1).unwrap().unwrap();
    assert_eq!(r.edges, edges(&["y1-y2", "outer:x3~y2"]));
    assert_eq!(r.length, Length::integer(3));
}

#[test]
fn exports_flag_outer_edges() {
    let t = build_truncation(&Ladder::new(LengthScheme::Unit), 2, &Budget::default()).unwrap();
    let doc: serde_json::Value = serde_json::from_str(&t.to_json()).unwrap();
    let outer: Vec<&serde_json::Value> =
        doc["edges"].as_array().unwrap().iter().filter(|e| e["outer"] == serde_json::Value::Bool(true)).collect();
    assert_eq!(outer.len(), 1);
    assert_eq!(outer[0]["len"], serde_json::json!(["2/1", "2/1"]));
    let dot = t.to_dot();
    assert_eq!(dot.matches("style=dashed").count(), 1);
    assert!(dot.starts_with("graph truncation_2 {"));
}

#[test]
fn hierarchy_caches_truncations() {
    let h = Hierarchy::new(Arc::new(Ladder::new(LengthScheme::Nst)), Budget::default());
    let a = h.truncation(3).unwrap();
    let b = h.truncation(3).unwrap();
    assert!(Arc::ptr_eq(&a, &b));
    assert_eq!(h.epsilon_hi(3).unwrap(), Length::ratio(1, 2));
    let unit = Hierarchy::new(Arc::new(Ladder::new(LengthScheme::Unit)), Budget::default());
    assert!(matches!(unit.epsilon_hi(2), Err(geocycle::Error::Certification(_))));
}

#[test]
fn finite_spec_matches_direct_construction() {
    let doc = serde_json::json!({
        "family": "finite", "lengths": "explicit",
        "params": {"graph": serde_json::from_str::<serde_json::Value>(&k4().to_json()).unwrap(), "root": "v2"}
    });
    let f = FamilySpec::from_json(&doc.to_string()).unwrap().build().unwrap();
    assert_eq!(f.root().as_str(), "v2");
    let t = build_truncation(f.as_ref(), 0, &Budget::default()).unwrap();
    assert_eq!(t.vertices.len(), 4);
    assert!(t.outer.values().all(|o| o.length.lo == o.length.hi));
    assert_eq!(t.outer.len(), 3);
    let exhausted = build_truncation(f.as_ref(), 1, &Budget::default()).unwrap();
    assert_eq!(exhausted.hat.edge_count(), 6);
    assert!(exhausted.outer.is_empty());
}

#[test]
fn budget_exhaustion_is_reported() {
    let ladder = Ladder::subdivided(LengthScheme::Unit).unwrap();
    let short = Budget { horizon: 2, ..Budget::default() };
    let r = build_truncation(&ladder, 8, &short);
    assert!(matches!(r, Err(geocycle::Error::Budget(_))), "{:?}", r.map(|t| t.index));
    assert!(build_truncation(&ladder, 8, &Budget::default()).is_ok());
}

#[test]
fn cycle_graph_family_distances_are_exact() {
    let f = FiniteFamily::new(cycle_graph(7), "v0".into()).unwrap();
    let d = distance_estimate(&f, &"v0".into(), &"v4".into(), &Budget::default()).unwrap();
    assert_eq!(d, Interval::exact(Length::integer(3)));
    assert_eq!(ratio(3, 1), d.lo.as_rational().clone());
}
