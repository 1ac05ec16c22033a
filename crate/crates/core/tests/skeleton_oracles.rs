use std::collections::VecDeque;

use proptest::prelude::*;
use skeleton_nav::danger::{zone_mask, DangerZone};
use skeleton_nav::distsim::{run_potential_phase, SimOptions, Subgraph};
use skeleton_nav::field::{generate_field, CommGraph, NodeId, Point};
use skeleton_nav::harness::{load_zones, ZoneSpec};
use skeleton_nav::skeleton::adaptive::{build_adaptive_skeleton, build_quadtree, detect_voronoi_nodes, SnapPolicy};
use skeleton_nav::skeleton::uniform::{
    attach_offstreet_endpoints, build_perimeter_streets, build_uniform_skeleton, excluded_nodes, prune_street, shift_streets,
    UniformStreetConfig,
};
use skeleton_nav::skeleton::{repair_gaps, Provenance};
use skeleton_nav::{NodeSet, PotentialModel};

fn graph(n: usize, seed: u64) -> CommGraph {
    CommGraph::build(generate_field(n, 3.0, seed).unwrap())
}

fn zone(spec: ZoneSpec, n: usize) -> DangerZone {
    load_zones(&spec, n, (n as f64).sqrt(), 1).unwrap().remove(0)
}

#[test]
fn grid_streets_match_strip_oracle() {
    let g = graph(4096, 2);
    for (eps, shift) in [(0.05, 0.0), (0.2, 0.0), (0.2, 3.5)] {
        let cfg = shift_streets(&UniformStreetConfig::new(4096, eps, 1.0).unwrap(), shift).unwrap();
        let sk = build_uniform_skeleton(&g, &[], &cfg).unwrap();
        let s = 64f64.powf(1.0 - 2.0 * eps);
        let mut lines = vec![0.0, 64.0];
        lines.extend((0..).map(|k| k as f64 * s + shift).take_while(|&v| v < 64.0).filter(|&v| v > 0.0));
        for id in g.field().ids() {
            let p = g.position(id);
            let want = lines.iter().any(|&l| (p.x - l).abs() <= 0.5 || (p.y - l).abs() <= 0.5);
            assert_eq!(sk.is_awake(id), want, "eps {eps} shift {shift} node {id} at {p:?}");
        }
    }
}

/// Boundary nodes of the zone plus everything within `hops` of them
/// outside the zone, by plain BFS.
fn perimeter_oracle(g: &CommGraph, inside: &NodeSet, hops: u32) -> NodeSet {
    let mut dist = vec![None; g.n()];
    let mut q = VecDeque::new();
    for id in g.field().ids() {
        if inside.contains(id) && g.neighbors(id).iter().any(|&v| !inside.contains(v)) {
            dist[id.index()] = Some(0);
            q.push_back(id);
        }
    }
    while let Some(u) = q.pop_front() {
        let d: u32 = dist[u.index()].unwrap();
        if d == hops {
            continue;
        }
        for &v in g.neighbors(u) {
            if !inside.contains(v) && dist[v.index()].is_none() {
                dist[v.index()] = Some(d + 1);
                q.push_back(v);
            }
        }
    }
    NodeSet::from_fn(g.n(), |id| dist[id.index()].is_some())
}

#[test]
fn perimeter_streets_are_a_ball_around_the_boundary() {
    let g = graph(4096, 3);
    for spec in [ZoneSpec::Simple, ZoneSpec::Complex] {
        let z = zone(spec, 4096);
        let inside = zone_mask(&g, &z);
        for w in [1.0, 2.0] {
            let got = build_perimeter_streets(&g, &z, w).unwrap();
            assert_eq!(got, perimeter_oracle(&g, &inside, w as u32));
        }
    }
}

#[test]
fn awake_nodes_stay_outside_zones() {
    let g = graph(4096, 4);
    for spec in [ZoneSpec::Simple, ZoneSpec::Complex] {
        let z = zone(spec, 4096);
        let cfg = UniformStreetConfig::new(4096, 0.2, 1.0).unwrap();
        let sk = build_uniform_skeleton(&g, std::slice::from_ref(&z), &cfg).unwrap();
        let (sk, _) = repair_gaps(&g, &sk, Provenance::GridStreet);
        let inside = zone_mask(&g, &z);
        assert!(sk.awake().iter().all(|id| !inside.contains(id)));
        assert!(sk.count_by(Provenance::PerimeterStreet) > 0);
    }
}

#[test]
fn adaptive_nodes_sit_on_their_leaf_boundary() {
    let g = graph(4096, 5);
    let z = zone(ZoneSpec::Complex, 4096);
    let tree = build_quadtree(std::slice::from_ref(&z), 64.0, SnapPolicy::Outward).unwrap();
    let sk = build_adaptive_skeleton(&g, std::slice::from_ref(&z), &tree, 1.0);
    let leaves = tree.leaf_keys();
    let inside = zone_mask(&g, &z);
    for id in g.field().ids() {
        let p = g.position(id);
        // closed containment: a point on a shared edge is 0 from both leaves
        let leaf = leaves
            .iter()
            .map(|k| k.rect())
            .find(|r| p.x >= r.x0 && p.x <= r.x1 && p.y >= r.y0 && p.y <= r.y1)
            .unwrap();
        let d = (p.x - leaf.x0).min(leaf.x1 - p.x).min(p.y - leaf.y0).min(leaf.y1 - p.y);
        assert_eq!(sk.is_awake(id), d <= 0.5 && !inside.contains(id), "node {id} at {p:?}");
    }
}

#[test]
fn voronoi_nodes_lie_near_the_bisector() {
    let g = graph(4096, 6);
    let dangers = vec![Point::new(16.0, 20.0), Point::new(48.0, 44.0)];
    let model = PotentialModel::new(2.0, 1.0, dangers.clone()).unwrap();
    let all = NodeSet::full(g.n());
    let phase = run_potential_phase(Subgraph::new(&g, &all), &dangers, &model, SimOptions::default()).unwrap();
    let v = detect_voronoi_nodes(&phase.sources, &phase.distances).unwrap();
    assert!(!v.degenerate && !v.nodes.is_empty());
    let gap = |id: NodeId| {
        let p = g.position(id);
        (p.dist(dangers[0]) - p.dist(dangers[1])).abs()
    };
    // one hop of slack is up to r = 3 on either side
    let near = v.nodes.iter().filter(|&id| gap(id) <= 6.0).count();
    assert!(near as f64 >= 0.95 * v.nodes.len() as f64, "{near} of {}", v.nodes.len());
    // and the bisector itself is covered
    for t in [0.2, 0.5, 0.8] {
        let mid = Point::new(32.0 + (t - 0.5) * 40.0, 32.0 - (t - 0.5) * 40.0 * 32.0 / 24.0);
        assert!(v.nodes.iter().any(|id| g.position(id).dist(mid) <= 3.0), "no Voronoi node near {mid:?}");
    }
}

#[test]
fn half_shift_moves_most_streets() {
    let g = graph(4096, 7);
    let base = UniformStreetConfig::new(4096, 0.2, 1.0).unwrap();
    let s0 = build_uniform_skeleton(&g, &[], &base).unwrap();
    let same = build_uniform_skeleton(&g, &[], &shift_streets(&base, 0.0).unwrap()).unwrap();
    assert_eq!(s0, same);
    let half = build_uniform_skeleton(&g, &[], &shift_streets(&base, base.separation / 2.0).unwrap()).unwrap();
    let overlap = s0.awake().intersection_len(half.awake()) as f64 / s0.size() as f64;
    assert!(overlap < 0.3, "overlap {overlap}");
    assert!(shift_streets(&base, base.separation).is_err());
}

#[test]
fn pruned_street_is_a_shortest_path() {
    let g = graph(1024, 8);
    let street = NodeSet::from_fn(g.n(), |id| (g.position(id).y - 16.0).abs() <= 1.5);
    let ids = street.to_vec();
    let a = *ids.iter().min_by(|x, y| g.position(**x).x.total_cmp(&g.position(**y).x)).unwrap();
    let b = *ids.iter().max_by(|x, y| g.position(**x).x.total_cmp(&g.position(**y).x)).unwrap();
    let out = prune_street(&g, &street, (a, b));
    let bfs = skeleton_nav::field::hop_bfs(&g, a, |v| !street.contains(v));
    if out.disconnected {
        assert_eq!(out.nodes, street);
    } else {
        assert_eq!(out.nodes.len() as u32, bfs.distance(b).unwrap() + 1);
        let path = bfs.path_to(b).unwrap();
        assert!(path.iter().all(|&id| out.nodes.contains(id)));
    }
}

#[test]
fn attachment_connects_whenever_the_graph_does() {
    let g = graph(1024, 9);
    let z = zone(ZoneSpec::Simple, 1024);
    let cfg = UniformStreetConfig::new(1024, 0.05, 1.0).unwrap();
    let sk = build_uniform_skeleton(&g, std::slice::from_ref(&z), &cfg).unwrap();
    let (sk, _) = repair_gaps(&g, &sk, Provenance::GridStreet);
    let excluded = excluded_nodes(&g, std::slice::from_ref(&z));
    let safe: Vec<NodeId> = g.field().ids().filter(|&id| !excluded.contains(id)).collect();
    for k in 0..50 {
        let (a, b) = (safe[(k * 37) % safe.len()], safe[(k * 101 + 13) % safe.len()]);
        let att = attach_offstreet_endpoints(&g, &sk, a, b);
        let full = skeleton_nav::field::hop_bfs(&g, a, |v| excluded.contains(v)).distance(b).is_some();
        let joined = att.src_attached && att.dst_attached && {
            let t = skeleton_nav::field::hop_bfs(&g, a, |v| !att.skeleton.is_awake(v) && v != a);
            t.distance(b).is_some()
        };
        assert_eq!(full, joined, "pair {a} {b}");
        if sk.is_awake(a) {
            assert!(att.src_connector.is_empty());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]
    #[test]
    fn repair_only_adds_safe_nodes_and_joins_fragments(seed in 0u64..1000, eps in 0.02f64..0.3) {
        let g = graph(1024, seed);
        let z = zone(ZoneSpec::Complex, 1024);
        let cfg = UniformStreetConfig::new(1024, eps, 1.0).unwrap();
        let sk = build_uniform_skeleton(&g, std::slice::from_ref(&z), &cfg).unwrap();
        let (fixed, woken) = repair_gaps(&g, &sk, Provenance::GridStreet);
        prop_assert_eq!(fixed.size(), sk.size() + woken);
        prop_assert!(sk.awake().iter().all(|id| fixed.is_awake(id)));
        prop_assert!(fixed.awake().iter().all(|id| !fixed.excluded().contains(id)));
        // every safe component holding awake nodes holds exactly one skeleton component
        let safe = |v: NodeId| !fixed.excluded().contains(v);
        let mut seen = NodeSet::empty(g.n());
        for id in fixed.awake().iter() {
            if seen.contains(id) {
                continue;
            }
            let skel = skeleton_nav::field::hop_bfs(&g, id, |v| !fixed.is_awake(v));
            let full = skeleton_nav::field::hop_bfs(&g, id, |v| !safe(v));
            for other in fixed.awake().iter() {
                prop_assert_eq!(skel.distance(other).is_some(), full.distance(other).is_some());
                if skel.distance(other).is_some() {
                    seen.insert(other);
                }
            }
        }
    }
}
