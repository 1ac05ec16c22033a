use std::collections::VecDeque;

use proptest::prelude::*;
use skeleton_nav::field::{generate_field, hop_bfs, multi_source_bfs, nearest_node, CommGraph, NodeId, Point, SensorField};

fn brute_adjacency(field: &SensorField) -> Vec<Vec<NodeId>> {
    let r = field.radio_range();
    let pts = field.positions();
    (0..pts.len())
        .map(|i| {
            (0..pts.len())
                .filter(|&j| j != i && pts[i].dist(pts[j]) <= r)
                .map(|j| NodeId(j as u32))
                .collect()
        })
        .collect()
}

#[test]
fn adjacency_matches_brute_force() {
    for (n, r, seed) in [(200, 1.5, 1), (400, 3.0, 2), (576, 2.0, 3), (1024, 3.0, 4)] {
        let g = CommGraph::build(generate_field(n, r, seed).unwrap());
        let want = brute_adjacency(g.field());
        for id in g.field().ids() {
            assert_eq!(g.neighbors(id), want[id.index()].as_slice(), "node {id}, n {n}");
        }
        assert_eq!(g.edge_count() * 2, want.iter().map(Vec::len).sum::<usize>());
    }
}

#[test]
fn range_is_inclusive() {
    let f = SensorField::from_positions(vec![Point::new(1.0, 1.0), Point::new(4.0, 1.0), Point::new(7.5, 1.0)], 10.0, 3.0).unwrap();
    let g = CommGraph::build(f);
    assert_eq!(g.neighbors(NodeId(0)), &[NodeId(1)]);
    assert!(g.neighbors(NodeId(2)).is_empty());
}

#[test]
fn seeds_reproduce() {
    let a = CommGraph::build(generate_field(512, 3.0, 11).unwrap());
    let b = CommGraph::build(generate_field(512, 3.0, 11).unwrap());
    let c = CommGraph::build(generate_field(512, 3.0, 12).unwrap());
    assert_eq!(a.to_bytes(), b.to_bytes());
    assert_ne!(a.to_bytes(), c.to_bytes());
}

fn oracle_bfs(g: &CommGraph, sources: &[NodeId]) -> Vec<Option<u32>> {
    let mut d = vec![None; g.n()];
    let mut q = VecDeque::new();
    for &s in sources {
        d[s.index()] = Some(0);
        q.push_back(s);
    }
    while let Some(u) = q.pop_front() {
        for &v in g.neighbors(u) {
            if d[v.index()].is_none() {
                d[v.index()] = Some(d[u.index()].unwrap() + 1);
                q.push_back(v);
            }
        }
    }
    d
}

#[test]
fn bfs_matches_oracle_and_parents_are_lowest() {
    let g = CommGraph::build(generate_field(900, 2.5, 5).unwrap());
    let t = hop_bfs(&g, NodeId(17), |_| false);
    let want = oracle_bfs(&g, &[NodeId(17)]);
    for id in g.field().ids() {
        assert_eq!(t.distance(id), want[id.index()]);
        if let Some(path) = t.path_to(id) {
            assert_eq!(path.len() as u32, want[id.index()].unwrap() + 1);
            for w in path.windows(2) {
                assert!(g.neighbors(w[0]).contains(&w[1]));
                let lowest = g.neighbors(w[1]).iter().copied().find(|u| want[u.index()] == want[w[0].index()]).unwrap();
                assert_eq!(lowest, w[0]);
            }
        }
    }
}

#[test]
fn multi_source_bfs_matches_oracle() {
    let g = CommGraph::build(generate_field(900, 3.0, 6).unwrap());
    let roots = [NodeId(3), NodeId(400), NodeId(899)];
    let t = multi_source_bfs(&g, &roots, |_| false, Some(4));
    let want = oracle_bfs(&g, &roots);
    for id in g.field().ids() {
        assert_eq!(t.distance(id), want[id.index()].filter(|&d| d <= 4));
    }
}

#[test]
fn nearest_node_breaks_ties_by_id() {
    let f = SensorField::from_positions(vec![Point::new(2.0, 1.0), Point::new(0.0, 1.0), Point::new(1.0, 2.0)], 4.0, 3.0).unwrap();
    assert_eq!(nearest_node(&f, Point::new(1.0, 1.0), |_| true).unwrap(), NodeId(0));
    assert_eq!(nearest_node(&f, Point::new(1.0, 1.0), |id| id != NodeId(0)).unwrap(), NodeId(1));
}

proptest! {
    #[test]
    fn adjacency_is_symmetric_and_loop_free(pts in prop::collection::vec((0.0f64..12.0, 0.0f64..12.0), 2..60), r in 0.5f64..4.0) {
        let field = SensorField::from_positions(pts.iter().map(|&(x, y)| Point::new(x, y)).collect(), 12.0, r).unwrap();
        let g = CommGraph::build(field);
        let want = brute_adjacency(g.field());
        for id in g.field().ids() {
            prop_assert!(!g.neighbors(id).contains(&id));
            prop_assert_eq!(g.neighbors(id), want[id.index()].as_slice());
            for &v in g.neighbors(id) {
                prop_assert!(g.neighbors(v).contains(&id));
            }
        }
    }
}
