//! Uniform skeleton: a square grid of streets with separation
//! `s = n^(1/2 - epsilon)`, each embedded as a strip of width `w`, plus
//! perimeter streets hugging every region zone.

use log::{debug, warn};

use super::{Construction, Provenance, Rect, SkeletonError, SkeletonGraph};
use crate::danger::{boundary_nodes, well_behaved_check, zone_mask, DangerZone, ZoneKind};
use crate::field::{multi_source_bfs, CommGraph, NodeId, Point};
use crate::nodeset::NodeSet;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformStreetConfig {
    pub epsilon: f64,
    /// Street separation `s`.
    pub separation: f64,
    /// Total strip width `w`; a node joins a street within `w / 2` of its line.
    pub width: f64,
    /// Diagonal offset of every grid line, in `[0, s)`.
    pub shift: f64,
    pub prune: bool,
}

/// `max(1, 2 / r)`, which keeps `w * r > 1`.
pub fn default_width(radio_range: f64) -> f64 {
    (2.0 / radio_range).max(1.0)
}

impl UniformStreetConfig {
    pub fn new(n: usize, epsilon: f64, width: f64) -> Result<Self, SkeletonError> {
        if !(epsilon > 0.0 && epsilon < 0.5) {
            return Err(SkeletonError::BadEpsilon(epsilon));
        }
        let side = (n as f64).sqrt();
        let separation = side.powf(1.0 - 2.0 * epsilon);
        let cfg = UniformStreetConfig { epsilon, separation, width, shift: 0.0, prune: false };
        cfg.check_separation(side)?;
        Ok(cfg)
    }

    /// Config with an explicit separation; `epsilon` is back-computed.
    pub fn with_separation(n: usize, separation: f64, width: f64) -> Result<Self, SkeletonError> {
        let side = (n as f64).sqrt();
        let epsilon = 0.5 - separation.ln() / (n as f64).ln();
        let cfg = UniformStreetConfig { epsilon, separation, width, shift: 0.0, prune: false };
        cfg.check_separation(side)?;
        Ok(cfg)
    }

    pub fn with_prune(mut self, prune: bool) -> Self {
        self.prune = prune;
        self
    }

    fn check_separation(&self, side: f64) -> Result<(), SkeletonError> {
        if !(self.separation > 1.0 && self.separation < side) {
            return Err(SkeletonError::DegenerateSeparation { separation: self.separation, side });
        }
        Ok(())
    }

    pub fn validate(&self, side: f64, radio_range: f64) -> Result<(), SkeletonError> {
        self.check_separation(side)?;
        if !(self.width * radio_range > 1.0) {
            return Err(SkeletonError::WidthTooSmall { width: self.width, radio_range });
        }
        if !(self.shift >= 0.0 && self.shift < self.separation) {
            return Err(SkeletonError::ShiftOutOfRange { delta: self.shift, separation: self.separation });
        }
        Ok(())
    }

    /// Line coordinates on one axis: the field borders plus every
    /// `k * s + shift` strictly inside the field, ascending.
    pub fn grid_lines(&self, side: f64) -> Vec<f64> {
        let mut lines = vec![0.0];
        let mut k = 0usize;
        loop {
            let v = k as f64 * self.separation + self.shift;
            if v >= side {
                break;
            }
            if v > 0.0 {
                lines.push(v);
            }
            k += 1;
        }
        lines.push(side);
        lines
    }

    /// Whether `p` lies in some street strip.
    pub fn on_street(&self, lines: &[f64], p: Point) -> bool {
        let half = self.width / 2.0;
        lines.iter().any(|&l| (p.x - l).abs() <= half || (p.y - l).abs() <= half)
    }
}

/// Moves every grid line to `k * s + delta`.
pub fn shift_streets(cfg: &UniformStreetConfig, delta: f64) -> Result<UniformStreetConfig, SkeletonError> {
    if !(delta >= 0.0 && delta < cfg.separation) {
        return Err(SkeletonError::ShiftOutOfRange { delta, separation: cfg.separation });
    }
    Ok(UniformStreetConfig { shift: delta, ..*cfg })
}

/// Box sides used when measuring a zone's well-behavedness.
pub(crate) fn probe_sizes(side: f64) -> Vec<f64> {
    let mut sizes = Vec::new();
    let mut x = 1.0;
    while x <= side / 2.0 {
        sizes.push(x);
        x *= 2.0;
    }
    sizes
}

pub(crate) fn log_well_behavedness(zones: &[DangerZone], side: f64) {
    for zone in zones {
        if let Ok(ratio) = well_behaved_check(zone, &probe_sizes(side)) {
            if ratio > zone.c {
                warn!("zone boundary ratio {ratio:.3} exceeds well-behavedness constant {}", zone.c);
            } else {
                debug!("zone boundary ratio {ratio:.3} (c = {})", zone.c);
            }
        }
    }
}

/// Union of the in-zone masks of every region zone.
pub fn excluded_nodes(graph: &CommGraph, zones: &[DangerZone]) -> NodeSet {
    let mut excluded = NodeSet::empty(graph.n());
    for z in zones {
        excluded.union_with(&zone_mask(graph, z));
    }
    excluded
}

/// Boundary nodes of a region zone plus every node reachable from them in
/// at most `ceil(w)` hops without entering the zone.
pub fn build_perimeter_streets(graph: &CommGraph, zone: &DangerZone, w: f64) -> Result<NodeSet, SkeletonError> {
    let inside = zone_mask(graph, zone);
    let boundary = boundary_nodes(graph, zone)?;
    let sources = boundary.to_vec();
    let hops = w.max(0.0).ceil() as u32;
    let tree = multi_source_bfs(graph, &sources, |v| inside.contains(v), Some(hops));
    Ok(NodeSet::from_fn(graph.n(), |id| tree.dist[id.index()].is_some()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PruneOutcome {
    pub nodes: NodeSet,
    /// The street did not connect its end nodes; `nodes` is the unpruned street.
    pub disconnected: bool,
}

/// Keeps only one shortest hop path (lowest-id tie-break) between the two
/// end nodes of a street, searching inside the street only.
pub fn prune_street(graph: &CommGraph, street: &NodeSet, endpoints: (NodeId, NodeId)) -> PruneOutcome {
    let (a, b) = endpoints;
    let tree = multi_source_bfs(graph, &[a], |v| !street.contains(v), None);
    match tree.path_to(b) {
        Some(path) => PruneOutcome { nodes: NodeSet::from_ids(graph.n(), path), disconnected: false },
        None => {
            warn!("street between {a} and {b} is disconnected; keeping it unpruned");
            PruneOutcome { nodes: street.clone(), disconnected: true }
        }
    }
}

pub fn build_uniform_skeleton(
    graph: &CommGraph,
    zones: &[DangerZone],
    cfg: &UniformStreetConfig,
) -> Result<SkeletonGraph, SkeletonError> {
    let field = graph.field();
    let side = field.side();
    cfg.validate(side, field.radio_range())?;
    log_well_behavedness(zones, side);

    let excluded = excluded_nodes(graph, zones);
    let mut skeleton = SkeletonGraph::new(Construction::Uniform, excluded.clone());
    let lines = cfg.grid_lines(side);

    if cfg.prune {
        for street in street_components(graph, &lines, cfg.width / 2.0, &excluded) {
            let ends = street_ends(graph, &street.nodes, street.vertical);
            for id in prune_street(graph, &street.nodes, ends).nodes.iter() {
                skeleton.insert(id, Provenance::GridStreet);
            }
        }
    } else {
        for id in field.ids() {
            if cfg.on_street(&lines, field.position(id)) {
                skeleton.insert(id, Provenance::GridStreet);
            }
        }
    }

    for zone in zones.iter().filter(|z| matches!(z.kind, ZoneKind::Region(_))) {
        for id in build_perimeter_streets(graph, zone, cfg.width)?.iter() {
            skeleton.insert(id, Provenance::PerimeterStreet);
        }
    }

    let mut cells = Vec::new();
    for ys in lines.windows(2) {
        for xs in lines.windows(2) {
            cells.push(Rect { x0: xs[0], y0: ys[0], x1: xs[1], y1: ys[1] });
        }
    }
    skeleton.set_cells(cells);
    Ok(skeleton)
}

struct Street {
    nodes: NodeSet,
    vertical: bool,
}

/// Connected pieces of every line's strip.
fn street_components(graph: &CommGraph, lines: &[f64], half: f64, excluded: &NodeSet) -> Vec<Street> {
    let field = graph.field();
    let mut out = Vec::new();
    for vertical in [true, false] {
        for &l in lines {
            let strip = NodeSet::from_fn(graph.n(), |id| {
                let p = field.position(id);
                let coord = if vertical { p.x } else { p.y };
                !excluded.contains(id) && (coord - l).abs() <= half
            });
            let mut seen = NodeSet::empty(graph.n());
            for start in strip.iter() {
                if seen.contains(start) {
                    continue;
                }
                let tree = multi_source_bfs(graph, &[start], |v| !strip.contains(v), None);
                let comp = NodeSet::from_fn(graph.n(), |id| tree.dist[id.index()].is_some());
                seen.union_with(&comp);
                out.push(Street { nodes: comp, vertical });
            }
        }
    }
    out
}

/// The nodes furthest toward each end of the street's line.
fn street_ends(graph: &CommGraph, street: &NodeSet, vertical: bool) -> (NodeId, NodeId) {
    let along = |id: NodeId| {
        let p = graph.position(id);
        if vertical {
            p.y
        } else {
            p.x
        }
    };
    let mut lo = None::<NodeId>;
    let mut hi = None::<NodeId>;
    for id in street.iter() {
        if lo.is_none_or(|l| along(id) < along(l)) {
            lo = Some(id);
        }
        if hi.is_none_or(|h| along(id) > along(h)) {
            hi = Some(id);
        }
    }
    (lo.unwrap(), hi.unwrap())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Attachment {
    pub skeleton: SkeletonGraph,
    /// Packets spent by the expanding-ring search at the source and the
    /// cell flood at the destination.
    pub packets: u64,
    pub src_connector: Vec<NodeId>,
    pub dst_connector: Vec<NodeId>,
    pub src_attached: bool,
    pub dst_attached: bool,
    /// Nearest awake node to each endpoint (the endpoint itself when awake).
    pub src_entry: Option<NodeId>,
    pub dst_entry: Option<NodeId>,
}

/// Connects off-street endpoints to the skeleton.
///
/// The source runs an expanding-ring search with TTL 1, 2, ... until a ring
/// reaches an awake node; a ring of TTL `t` costs one transmission per node
/// closer than `t` hops. The destination is found by flooding its enclosing
/// street cell, one transmission per safe node in the cell. Each endpoint is
/// joined to its nearest awake node by a shortest hop path whose nodes wake
/// with provenance [`Provenance::Endpoint`].
pub fn attach_offstreet_endpoints(graph: &CommGraph, skeleton: &SkeletonGraph, src: NodeId, dst: NodeId) -> Attachment {
    let mut out = skeleton.clone();
    let mut packets = 0u64;

    let (src_connector, src_entry, ring_cost) = connector(graph, skeleton, src);
    packets += ring_cost;
    let (dst_connector, dst_entry, dst_ring_cost) = connector(graph, skeleton, dst);
    if !dst_connector.is_empty() {
        packets += match skeleton.enclosing_cell(graph.position(dst)) {
            Some(cell) => graph
                .field()
                .ids()
                .filter(|&id| !skeleton.excluded().contains(id) && cell.contains(graph.position(id)))
                .count() as u64,
            None => dst_ring_cost,
        };
    }

    for &id in src_connector.iter().chain(&dst_connector) {
        out.insert(id, Provenance::Endpoint);
    }
    Attachment {
        skeleton: out,
        packets,
        src_connector,
        dst_connector,
        src_attached: src_entry.is_some(),
        dst_attached: dst_entry.is_some(),
        src_entry,
        dst_entry,
    }
}

/// Nodes to wake so that `from` reaches the skeleton, the awake node it
/// reaches, and the expanding-ring cost of finding it.
fn connector(graph: &CommGraph, skeleton: &SkeletonGraph, from: NodeId) -> (Vec<NodeId>, Option<NodeId>, u64) {
    if skeleton.is_awake(from) {
        return (Vec::new(), Some(from), 0);
    }
    if skeleton.excluded().contains(from) {
        return (Vec::new(), None, 0);
    }
    let tree = multi_source_bfs(graph, &[from], |v| skeleton.excluded().contains(v), None);
    let hit = skeleton
        .awake()
        .iter()
        .filter_map(|id| tree.dist[id.index()].map(|d| (d, id)))
        .min();
    let Some((hops, target)) = hit else {
        return (Vec::new(), None, 0);
    };
    let mut per_distance = vec![0u64; hops as usize + 1];
    for d in tree.dist.iter().flatten() {
        if *d <= hops {
            per_distance[*d as usize] += 1;
        }
    }
    // TTL t: every node at distance < t forwards once
    let mut cost = 0u64;
    let mut inner = 0u64;
    for count in per_distance.iter().take(hops as usize) {
        inner += count;
        cost += inner;
    }
    let mut path = tree.path_to(target).expect("target was reached");
    path.pop();
    (path, Some(target), cost)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::danger::Polygon;
    use crate::field::{generate_field, hop_bfs, SensorField};

    fn line_graph(xs: &[(f64, f64)], side: f64, r: f64) -> CommGraph {
        let pts = xs.iter().map(|&(x, y)| Point::new(x, y)).collect();
        CommGraph::build(SensorField::from_positions(pts, side, r).unwrap())
    }

    #[test]
    fn config_bounds() {
        let cfg = UniformStreetConfig::new(4096, 0.05, 1.0).unwrap();
        assert!((cfg.separation - 4096f64.powf(0.45)).abs() < 1e-9);
        assert!(matches!(UniformStreetConfig::new(4096, 0.0, 1.0), Err(SkeletonError::BadEpsilon(_))));
        assert!(matches!(UniformStreetConfig::new(4096, 0.5, 1.0), Err(SkeletonError::BadEpsilon(_))));
        assert!(matches!(
            UniformStreetConfig::with_separation(4096, 64.0, 1.0),
            Err(SkeletonError::DegenerateSeparation { .. })
        ));
        assert!(matches!(
            UniformStreetConfig::with_separation(4096, 1.0, 1.0),
            Err(SkeletonError::DegenerateSeparation { .. })
        ));
        assert!(matches!(cfg.validate(64.0, 0.9), Err(SkeletonError::WidthTooSmall { .. })));
        assert_eq!(default_width(3.0), 1.0);
        assert_eq!(default_width(1.5), 2.0 / 1.5);
    }

    #[test]
    fn tiny_epsilon_leaves_one_street_per_axis() {
        let cfg = UniformStreetConfig::new(4096, 1e-6, 1.0).unwrap();
        let lines = cfg.grid_lines(64.0);
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[0], 0.0);
        assert_eq!(lines[2], 64.0);
    }

    #[test]
    fn shift_moves_lines() {
        let cfg = UniformStreetConfig::with_separation(1024, 10.0, 1.0).unwrap();
        assert_eq!(cfg.grid_lines(32.0), vec![0.0, 10.0, 20.0, 30.0, 32.0]);
        let shifted = shift_streets(&cfg, 5.0).unwrap();
        assert_eq!(shifted.grid_lines(32.0), vec![0.0, 5.0, 15.0, 25.0, 32.0]);
        assert_eq!(shift_streets(&cfg, 0.0).unwrap(), cfg);
        assert!(matches!(shift_streets(&cfg, 10.0), Err(SkeletonError::ShiftOutOfRange { .. })));
        assert!(matches!(shift_streets(&cfg, -1.0), Err(SkeletonError::ShiftOutOfRange { .. })));
    }

    #[test]
    fn perimeter_street_edge_cases() {
        let g = CommGraph::build(generate_field(256, 3.0, 5).unwrap());
        let nowhere = DangerZone::region(Polygon::rect(0.0, 0.0, 0.001, 0.001).unwrap());
        assert!(build_perimeter_streets(&g, &nowhere, 2.0).unwrap().is_empty());

        let zone = DangerZone::region(Polygon::rect(5.0, 5.0, 10.0, 10.0).unwrap());
        let at_zero = build_perimeter_streets(&g, &zone, 0.0).unwrap();
        assert_eq!(at_zero, boundary_nodes(&g, &zone).unwrap());
    }

    #[test]
    fn pruning_simple_path_is_identity() {
        let g = line_graph(&[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0)], 2.0, 1.0);
        let street = NodeSet::full(3);
        let out = prune_street(&g, &street, (NodeId(0), NodeId(2)));
        assert_eq!(out.nodes, street);
        assert!(!out.disconnected);
    }

    #[test]
    fn pruning_drops_dangling_node() {
        let g = line_graph(&[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0), (1.0, 0.9)], 2.0, 1.0);
        let out = prune_street(&g, &NodeSet::full(4), (NodeId(0), NodeId(2)));
        assert_eq!(out.nodes.to_vec(), vec![NodeId(0), NodeId(1), NodeId(2)]);
    }

    #[test]
    fn pruning_disconnected_strip_keeps_everything() {
        let g = line_graph(&[(0.0, 0.0), (1.0, 0.0), (5.0, 0.0)], 5.0, 1.0);
        let out = prune_street(&g, &NodeSet::full(3), (NodeId(0), NodeId(2)));
        assert!(out.disconnected);
        assert_eq!(out.nodes.len(), 3);
    }

    #[test]
    fn pruned_random_strip_is_a_shortest_path() {
        let g = CommGraph::build(generate_field(1024, 3.0, 17).unwrap());
        let strip = NodeSet::from_fn(g.n(), |id| (g.position(id).y - 16.0).abs() <= 1.0);
        let ends = street_ends(&g, &strip, false);
        let out = prune_street(&g, &strip, ends);
        assert!(!out.disconnected);
        let oracle = hop_bfs(&g, ends.0, |v| !strip.contains(v));
        assert_eq!(out.nodes.len() as u32, oracle.distance(ends.1).unwrap() + 1);
        // connected inside itself
        let inner = hop_bfs(&g, ends.0, |v| !out.nodes.contains(v));
        assert!(out.nodes.iter().all(|id| inner.distance(id).is_some()));
    }

    #[test]
    fn on_street_source_needs_no_connector() {
        let g = CommGraph::build(generate_field(1024, 3.0, 3).unwrap());
        let cfg = UniformStreetConfig::with_separation(1024, 10.0, 1.0).unwrap();
        let sk = build_uniform_skeleton(&g, &[], &cfg).unwrap();
        let on = sk.awake().iter().next().unwrap();
        let att = attach_offstreet_endpoints(&g, &sk, on, on);
        assert!(att.src_connector.is_empty() && att.dst_connector.is_empty());
        assert_eq!(att.packets, 0);
        assert_eq!(att.skeleton, sk);
    }

    #[test]
    fn one_hop_source_gets_one_connector() {
        // street strip along y = 0; node 2 sits one hop above it
        let g = line_graph(&[(0.0, 0.0), (2.0, 0.0), (2.0, 2.5)], 10.0, 3.0);
        let mut sk = SkeletonGraph::new(Construction::Uniform, NodeSet::empty(3));
        sk.insert(NodeId(0), Provenance::GridStreet);
        sk.insert(NodeId(1), Provenance::GridStreet);
        let att = attach_offstreet_endpoints(&g, &sk, NodeId(2), NodeId(0));
        assert_eq!(att.src_connector, vec![NodeId(2)]);
        assert_eq!(att.skeleton.provenance(NodeId(2)), Some(Provenance::Endpoint));
        assert_eq!(att.packets, 1);
        assert!(att.src_attached && att.dst_attached);
    }
}
