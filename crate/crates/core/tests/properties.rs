mod common;

use common::{floyd, geodetic_by_floyd, length_of};
use geocycle::decompose::{geodetic_decomposition, geodetic_generating_set};
use geocycle::experiments::{all_cycles, random_connected_graph, DEFAULT_CENSUS_CAP};
use geocycle::geodesy::{all_pairs, find_shortcut};
use geocycle::{decompose_into_circuits, is_cycle_space_member, symmetric_sum, Cycle, EdgeSet, Graph};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn arb_graph() -> impl Strategy<Value = Graph> {
    (any::<u64>(), 3usize..8, 0usize..7, any::<bool>()).prop_map(|(seed, n, extra, unit)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        random_connected_graph(&mut rng, n, extra, unit)
    })
}

/// A graph together with a random selection of its cycles.
fn graph_and_cycles() -> impl Strategy<Value = (Graph, Vec<Cycle>)> {
    arb_graph().prop_flat_map(|g| {
        let cycles = all_cycles(&g, DEFAULT_CENSUS_CAP).unwrap();
        let n = cycles.len();
        (Just(g), prop::collection::vec(any::<bool>(), n).prop_map(move |pick| {
            cycles.iter().zip(pick).filter(|(_, p)| *p).map(|(c, _)| c.clone()).collect()
        }))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn graph_json_round_trip(g in arb_graph()) {
        let back = Graph::from_json(&g.to_json()).unwrap();
        prop_assert_eq!(back.to_json(), g.to_json());
    }

    #[test]
    fn sums_of_cycles_are_even((g, cycles) in graph_and_cycles()) {
        let sets: Vec<EdgeSet> = cycles.iter().map(Cycle::edge_set).collect();
        let x = symmetric_sum(&sets);
        prop_assert!(is_cycle_space_member(&g, &x).unwrap());

        let circuits = decompose_into_circuits(&g, &x).unwrap();
        let mut seen = EdgeSet::new();
        for c in &circuits {
            prop_assert!(seen.is_disjoint(&c.edge_set()));
            seen.extend_from(c.edges());
        }
        prop_assert_eq!(&seen, &x);

        let d = geodetic_generating_set(&g, &x).unwrap();
        let parts: Vec<EdgeSet> = d.parts.iter().map(Cycle::edge_set).collect();
        prop_assert_eq!(symmetric_sum(&parts), x);
        let oracle = floyd(&g);
        for p in &d.parts {
            prop_assert!(geodetic_by_floyd(&g, &oracle, p));
        }
    }

    #[test]
    fn decomposition_parts_are_short_and_geodetic((g, cycles) in graph_and_cycles()) {
        let oracle = floyd(&g);
        for c in cycles.iter().take(4) {
            let d = geodetic_decomposition(&g, c).unwrap();
            let whole = length_of(&g, c.edges());
            let parts: Vec<EdgeSet> = d.parts.iter().map(Cycle::edge_set).collect();
            prop_assert_eq!(symmetric_sum(&parts), c.edge_set());
            for p in &d.parts {
                prop_assert!(geodetic_by_floyd(&g, &oracle, p));
                prop_assert!(length_of(&g, p.edges()) <= whole);
            }
        }
    }

    #[test]
    fn distances_match_floyd(g in arb_graph()) {
        let (idx, table) = floyd(&g);
        let oracle = all_pairs(&g);
        for x in g.vertices() {
            for y in g.vertices() {
                let got = oracle.distance(x, y).unwrap().map(|l| l.as_rational().clone());
                prop_assert_eq!(got.as_ref(), table[idx[x.as_str()]][idx[y.as_str()]].as_ref());
                let p = oracle.path(x, y).unwrap();
                prop_assert_eq!(Some(&length_of(&g, &p.edges)), got.as_ref());
                for z in g.vertices() {
                    let (xy, xz, zy) = (
                        oracle.distance(x, y).unwrap().unwrap(),
                        oracle.distance(x, z).unwrap().unwrap(),
                        oracle.distance(z, y).unwrap().unwrap(),
                    );
                    prop_assert!(xy <= &(xz + zy));
                }
            }
        }
    }

    #[test]
    fn shortcuts_beat_both_arcs((g, cycles) in graph_and_cycles()) {
        let oracle = floyd(&g);
        for c in &cycles {
            match find_shortcut(&g, c).unwrap() {
                Some(s) => {
                    let via = length_of(&g, &s.path.edges);
                    prop_assert!(via < *s.arc_forward_length.as_rational());
                    prop_assert!(via < *s.arc_backward_length.as_rational());
                    prop_assert_eq!(&length_of(&g, &s.arc_forward), s.arc_forward_length.as_rational());
                    prop_assert!(!geodetic_by_floyd(&g, &oracle, c));
                    // Internally disjoint from the cycle.
                    let inner = &s.path.vertices[1..s.path.vertices.len() - 1];
                    prop_assert!(inner.iter().all(|v| !c.contains_vertex(v)));
                }
                None => prop_assert!(geodetic_by_floyd(&g, &oracle, c)),
            }
        }
    }

    #[test]
    fn cycles_are_canonical((g, cycles) in graph_and_cycles(), shift in 0usize..16) {
        for c in &cycles {
            let n = c.len();
            let (mut vs, mut es) = (c.vertices().to_vec(), c.edges().to_vec());
            vs.rotate_left(shift % n);
            es.rotate_left(shift % n);
            prop_assert_eq!(&Cycle::from_walk(&g, &vs, &es).unwrap(), c);
            vs.reverse();
            es.truncate(n - 1);
            es.reverse();
            es.push(c.edges()[(shift + n - 1) % n].clone());
            prop_assert_eq!(&Cycle::from_walk(&g, &vs, &es).unwrap(), c);
            prop_assert_eq!(&Cycle::from_edge_set(&g, &c.edge_set()).unwrap(), c);
        }
    }
}
