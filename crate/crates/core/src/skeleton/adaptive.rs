//! Adaptive skeleton: streets along the boundaries of quadtree leaves,
//! refined until no leaf is touched by a danger-zone boundary, plus
//! optional Voronoi streets between point dangers.
//!
//! Quadtree arithmetic runs on the integer grid. The field side is padded
//! up to a power of two, and every zone is snapped onto unit cells before
//! refinement: axis-aligned integer polygons are used as given, anything
//! else is replaced by the union of unit cells it touches (an outward,
//! conservative approximation). A point danger snaps to the unit cell that
//! holds it.

use std::collections::{HashMap, HashSet};
use std::io::Write;

use super::uniform::{excluded_nodes, log_well_behavedness};
use super::{Construction, Provenance, Rect, SkeletonError, SkeletonGraph};
use crate::danger::{DangerZone, Polygon, Segment, ZoneKind};
use crate::field::{CommGraph, NodeId, Point};
use crate::nodeset::NodeSet;

/// Axis-aligned segment on the integer grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct GridSegment {
    x0: i64,
    y0: i64,
    x1: i64,
    y1: i64,
}

impl GridSegment {
    fn new(a: (i64, i64), b: (i64, i64)) -> Self {
        GridSegment { x0: a.0.min(b.0), y0: a.1.min(b.1), x1: a.0.max(b.0), y1: a.1.max(b.1) }
    }

    /// Closed segment against the closed square at `(x, y)` of side `s`.
    fn touches(&self, x: i64, y: i64, s: i64) -> bool {
        self.x1 >= x && self.x0 <= x + s && self.y1 >= y && self.y0 <= y + s
    }
}

#[derive(Debug, Clone)]
enum SnappedInterior {
    Polygon(Polygon),
    Cells(HashSet<(i64, i64)>),
}

/// A zone moved onto the integer grid.
#[derive(Debug, Clone)]
pub struct SnappedZone {
    boundary: Vec<GridSegment>,
    interior: SnappedInterior,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SnapPolicy {
    /// Require an axis-aligned polygon with integer vertices.
    Strict,
    /// Over-approximate anything else by the unit cells it touches.
    Outward,
}

impl SnappedZone {
    pub fn new(zone: &DangerZone, policy: SnapPolicy) -> Result<SnappedZone, SkeletonError> {
        match &zone.kind {
            ZoneKind::Region(poly) if poly.is_axis_aligned() => {
                let boundary = poly
                    .edges()
                    .map(|e| GridSegment::new((e.a.x as i64, e.a.y as i64), (e.b.x as i64, e.b.y as i64)))
                    .collect();
                Ok(SnappedZone { boundary, interior: SnappedInterior::Polygon(poly.clone()) })
            }
            ZoneKind::Region(_) if policy == SnapPolicy::Strict => Err(SkeletonError::NotAxisAligned),
            ZoneKind::Region(poly) => Ok(Self::from_cells(raster_cells(poly))),
            ZoneKind::PointSet(points) => {
                let cells = points.iter().map(|p| (p.x.floor() as i64, p.y.floor() as i64)).collect();
                Ok(Self::from_cells(cells))
            }
        }
    }

    fn from_cells(cells: HashSet<(i64, i64)>) -> SnappedZone {
        let mut boundary = Vec::new();
        for &(i, j) in &cells {
            let sides = [
                ((i - 1, j), ((i, j), (i, j + 1))),
                ((i + 1, j), ((i + 1, j), (i + 1, j + 1))),
                ((i, j - 1), ((i, j), (i + 1, j))),
                ((i, j + 1), ((i, j + 1), (i + 1, j + 1))),
            ];
            for (nbr, (a, b)) in sides {
                if !cells.contains(&nbr) {
                    boundary.push(GridSegment::new(a, b));
                }
            }
        }
        boundary.sort_by_key(|s| (s.x0, s.y0, s.x1, s.y1));
        SnappedZone { boundary, interior: SnappedInterior::Cells(cells) }
    }

    fn crosses(&self, x: i64, y: i64, s: i64) -> bool {
        self.boundary.iter().any(|seg| seg.touches(x, y, s))
    }

    /// Whether an uncrossed square lies inside the zone.
    fn covers(&self, x: i64, y: i64, s: i64) -> bool {
        let centre = Point::new(x as f64 + s as f64 / 2.0, y as f64 + s as f64 / 2.0);
        match &self.interior {
            SnappedInterior::Polygon(p) => p.contains(centre),
            SnappedInterior::Cells(c) => c.contains(&(centre.x.floor() as i64, centre.y.floor() as i64)),
        }
    }

    pub fn boundary_length(&self) -> f64 {
        self.boundary.iter().map(|s| ((s.x1 - s.x0) + (s.y1 - s.y0)) as f64).sum()
    }
}

/// Unit cells whose closed square meets the polygon.
fn raster_cells(poly: &Polygon) -> HashSet<(i64, i64)> {
    let (lo, hi) = poly.bounding_box();
    let mut cells = HashSet::new();
    let edges: Vec<Segment> = poly.edges().collect();
    for j in (lo.y.floor() as i64 - 1)..=(hi.y.ceil() as i64) {
        for i in (lo.x.floor() as i64 - 1)..=(hi.x.ceil() as i64) {
            let (x, y) = (i as f64, j as f64);
            let corner_in = [(x, y), (x + 1.0, y), (x, y + 1.0), (x + 1.0, y + 1.0), (x + 0.5, y + 0.5)]
                .iter()
                .any(|&(cx, cy)| poly.contains(Point::new(cx, cy)));
            let edge_in = edges.iter().any(|e| e.clipped_length(x, y, 1.0) > 0.0);
            let vertex_in = poly.vertices().iter().any(|v| v.x >= x && v.x <= x + 1.0 && v.y >= y && v.y <= y + 1.0);
            if corner_in || edge_in || vertex_in {
                cells.insert((i, j));
            }
        }
    }
    cells
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CellKey {
    pub level: u32,
    pub x0: i64,
    pub y0: i64,
}

impl CellKey {
    pub fn side(&self) -> i64 {
        1 << self.level
    }

    pub fn rect(&self) -> Rect {
        let s = self.side() as f64;
        Rect { x0: self.x0 as f64, y0: self.y0 as f64, x1: self.x0 as f64 + s, y1: self.y0 as f64 + s }
    }

    pub fn children(&self) -> [CellKey; 4] {
        let h = self.side() / 2;
        let l = self.level - 1;
        [
            CellKey { level: l, x0: self.x0, y0: self.y0 },
            CellKey { level: l, x0: self.x0 + h, y0: self.y0 },
            CellKey { level: l, x0: self.x0, y0: self.y0 + h },
            CellKey { level: l, x0: self.x0 + h, y0: self.y0 + h },
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub key: CellKey,
    pub children: Option<[usize; 4]>,
    /// A snapped zone boundary meets the closed square.
    pub crossed: bool,
}

/// Quadtree over the padded field; a cell of level `k` has side `2^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Quadtree {
    cells: Vec<Cell>,
    root_level: u32,
}

/// Smallest power of two that is at least `side`.
pub fn padded_side(side: f64) -> i64 {
    let mut p = 1i64;
    while (p as f64) < side {
        p *= 2;
    }
    p
}

/// Splits a cell iff a snapped zone boundary meets its closed square and
/// its level is above 0.
pub fn build_quadtree(zones: &[DangerZone], side: f64, policy: SnapPolicy) -> Result<Quadtree, SkeletonError> {
    let snapped = zones.iter().map(|z| SnappedZone::new(z, policy)).collect::<Result<Vec<_>, _>>()?;
    Ok(Quadtree::from_snapped(&snapped, side))
}

impl Quadtree {
    pub fn from_snapped(zones: &[SnappedZone], side: f64) -> Quadtree {
        let root_side = padded_side(side);
        let root_level = root_side.trailing_zeros();
        let mut tree = Quadtree { cells: Vec::new(), root_level };
        let mut stack = vec![(CellKey { level: root_level, x0: 0, y0: 0 }, None::<(usize, usize)>)];
        while let Some((key, slot)) = stack.pop() {
            let crossed = zones.iter().any(|z| z.crosses(key.x0, key.y0, key.side()));
            let idx = tree.cells.len();
            tree.cells.push(Cell { key, children: None, crossed });
            if let Some((parent, k)) = slot {
                tree.cells[parent].children.get_or_insert([usize::MAX; 4])[k] = idx;
            }
            if crossed && key.level > 0 {
                for (k, child) in key.children().into_iter().enumerate().rev() {
                    stack.push((child, Some((idx, k))));
                }
            }
        }
        tree
    }

    pub fn root_level(&self) -> u32 {
        self.root_level
    }

    pub fn root_side(&self) -> i64 {
        1 << self.root_level
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn leaves(&self) -> impl Iterator<Item = &Cell> + '_ {
        self.cells.iter().filter(|c| c.children.is_none())
    }

    pub fn leaf_keys(&self) -> Vec<CellKey> {
        let mut keys: Vec<CellKey> = self.leaves().map(|c| c.key).collect();
        keys.sort();
        keys
    }

    pub fn depth(&self) -> u32 {
        self.cells.iter().map(|c| self.root_level - c.key.level).max().unwrap_or(0) + 1
    }

    /// Crossed cells per level, indexed by level.
    pub fn crossed_per_level(&self) -> Vec<usize> {
        let mut counts = vec![0; self.root_level as usize + 1];
        for c in self.cells.iter().filter(|c| c.crossed) {
            counts[c.key.level as usize] += 1;
        }
        counts
    }

    /// Total length of the union of leaf boundaries. Interior edges border
    /// exactly two leaves, the root border one.
    pub fn street_length(&self) -> f64 {
        let perimeters: i64 = self.leaves().map(|c| 4 * c.key.side()).sum();
        (perimeters + 4 * self.root_side()) as f64 / 2.0
    }

    /// Leaf containing `p` (the first one met on descent for boundary points).
    pub fn leaf_at(&self, p: Point) -> &Cell {
        let mut cur = &self.cells[0];
        while let Some(children) = cur.children {
            let h = (cur.key.side() / 2) as f64;
            let right = p.x >= cur.key.x0 as f64 + h;
            let top = p.y >= cur.key.y0 as f64 + h;
            cur = &self.cells[children[right as usize + 2 * top as usize]];
        }
        cur
    }

    /// `level x0 y0 side crossed` per leaf.
    pub fn dump<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for key in self.leaf_keys() {
            let cell = self.cells.iter().find(|c| c.key == key).unwrap();
            writeln!(out, "{} {} {} {} {}", key.level, key.x0, key.y0, key.side(), cell.crossed as u8)?;
        }
        Ok(())
    }
}

/// Awake iff within `w / 2` of the boundary of the leaf holding the node
/// and outside every zone.
pub fn build_adaptive_skeleton(graph: &CommGraph, zones: &[DangerZone], tree: &Quadtree, w: f64) -> SkeletonGraph {
    log_well_behavedness(zones, graph.field().side());
    let excluded = excluded_nodes(graph, zones);
    let mut skeleton = SkeletonGraph::new(Construction::Adaptive, excluded);
    let half = w / 2.0;
    for id in graph.field().ids() {
        let p = graph.position(id);
        if tree.leaf_at(p).key.rect().boundary_distance(p) <= half {
            skeleton.insert(id, Provenance::QuadtreeEdge);
        }
    }
    skeleton.set_cells(tree.leaf_keys().iter().map(CellKey::rect).collect());
    skeleton
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cluster {
    pub cell: CellKey,
    /// Nodes within `w / 2` of the cell boundary, ascending.
    pub members: Vec<NodeId>,
    /// Lowest member id.
    pub leader: Option<NodeId>,
}

/// Clusters of every cell of the complete quadtree down to level 0, keyed
/// by cell. A node near a shared edge belongs to several clusters.
pub fn form_clusters(graph: &CommGraph, root_level: u32, w: f64) -> HashMap<CellKey, Cluster> {
    let half = w / 2.0;
    let mut clusters: HashMap<CellKey, Cluster> = HashMap::new();
    for level in 0..=root_level {
        let s = 1i64 << level;
        let cells_per_axis = (1i64 << root_level) / s;
        for id in graph.field().ids() {
            let p = graph.position(id);
            let ci = ((p.x / s as f64).floor() as i64).min(cells_per_axis - 1);
            let cj = ((p.y / s as f64).floor() as i64).min(cells_per_axis - 1);
            for j in (cj - 1).max(0)..=(cj + 1).min(cells_per_axis - 1) {
                for i in (ci - 1).max(0)..=(ci + 1).min(cells_per_axis - 1) {
                    let key = CellKey { level, x0: i * s, y0: j * s };
                    if key.rect().boundary_distance(p) <= half {
                        clusters
                            .entry(key)
                            .or_insert_with(|| Cluster { cell: key, members: Vec::new(), leader: None })
                            .members
                            .push(id);
                    }
                }
            }
        }
    }
    for c in clusters.values_mut() {
        c.members.sort_unstable();
        c.leader = c.members.first().copied();
    }
    clusters
}

#[derive(Debug, Clone, PartialEq)]
pub struct RetirementReport {
    /// Boundary walks plus parent notifications.
    pub messages: u64,
    /// Cells whose children were sent to sleep.
    pub retirements: usize,
    pub leaves: Vec<CellKey>,
    pub skeleton: SkeletonGraph,
}

/// Bottom-up cluster retirement over the complete quadtree.
///
/// A cluster is danger-free when its square neither meets a snapped zone
/// boundary nor lies inside a zone. Starting from level 0, every cluster
/// walks its boundary once (one message per member) and danger-free ones
/// notify their parent (one message). A parent whose four children are
/// danger-free retires them and becomes a leaf. The message count is this
/// accounting model, not a measured protocol trace.
pub fn simulate_cluster_retirement(
    graph: &CommGraph,
    zones: &[DangerZone],
    side: f64,
    w: f64,
    policy: SnapPolicy,
) -> Result<RetirementReport, SkeletonError> {
    let snapped = zones.iter().map(|z| SnappedZone::new(z, policy)).collect::<Result<Vec<_>, _>>()?;
    let root_level = padded_side(side).trailing_zeros();
    let clusters = form_clusters(graph, root_level, w);
    let root = CellKey { level: root_level, x0: 0, y0: 0 };

    let danger_free = |k: &CellKey| {
        let s = k.side();
        !snapped.iter().any(|z| z.crosses(k.x0, k.y0, s) || z.covers(k.x0, k.y0, s))
    };

    let mut tally = Tally::default();
    visit(root, root, &clusters, &danger_free, &mut tally);
    let Tally { messages, retirements, mut leaves } = tally;
    leaves.sort();

    let excluded = excluded_nodes(graph, zones);
    let mut skeleton = SkeletonGraph::new(Construction::Adaptive, excluded);
    for key in &leaves {
        if let Some(c) = clusters.get(key) {
            for &id in &c.members {
                // only clusters of the leaf holding the node count
                let p = graph.position(id);
                if key.rect().contains(p) {
                    skeleton.insert(id, Provenance::QuadtreeEdge);
                }
            }
        }
    }
    skeleton.set_cells(leaves.iter().map(CellKey::rect).collect());
    Ok(RetirementReport { messages, retirements, leaves, skeleton })
}

#[derive(Default)]
struct Tally {
    messages: u64,
    retirements: usize,
    leaves: Vec<CellKey>,
}

/// Post-order pass; returns whether `key` collapsed into a danger-free cell.
fn visit(
    key: CellKey,
    root: CellKey,
    clusters: &HashMap<CellKey, Cluster>,
    danger_free: &dyn Fn(&CellKey) -> bool,
    tally: &mut Tally,
) -> bool {
    let free = if key.level == 0 {
        let free = danger_free(&key);
        if !free {
            tally.leaves.push(key);
        }
        free
    } else {
        let children = key.children();
        let child_free = children.map(|c| visit(c, root, clusters, danger_free, tally));
        if child_free.iter().all(|&f| f) {
            tally.retirements += 1;
        } else {
            tally.leaves.extend(children.iter().zip(child_free).filter(|(_, f)| *f).map(|(c, _)| *c));
        }
        child_free.iter().all(|&f| f) && danger_free(&key)
    };
    tally.messages += clusters.get(&key).map_or(0, |c| c.members.len() as u64);
    if free && key != root {
        tally.messages += 1;
    }
    if free && key == root {
        tally.leaves.push(key);
    }
    free
}

/// Result of the discrete equidistance test.
#[derive(Debug, Clone, PartialEq)]
pub struct VoronoiDetection {
    pub nodes: NodeSet,
    /// Two danger sources share a node, so every distance ties.
    pub degenerate: bool,
}

/// Nodes whose two smallest per-source hop distances differ by at most one.
/// `distances[i][v]` is the hop distance of node `v` from source `i`.
pub fn detect_voronoi_nodes(source_nodes: &[NodeId], distances: &[Vec<Option<u32>>]) -> Result<VoronoiDetection, SkeletonError> {
    if distances.len() < 2 {
        return Err(SkeletonError::TooFewSources(distances.len()));
    }
    let n = distances[0].len();
    let mut uniq: Vec<NodeId> = source_nodes.to_vec();
    uniq.sort_unstable();
    uniq.dedup();
    let degenerate = uniq.len() < source_nodes.len();
    let nodes = NodeSet::from_fn(n, |id| {
        let mut best = [u32::MAX; 2];
        for table in distances {
            if let Some(d) = table[id.index()] {
                if d < best[0] {
                    best = [d, best[0]];
                } else if d < best[1] {
                    best[1] = d;
                }
            }
        }
        best[1] != u32::MAX && best[1] - best[0] <= 1
    });
    Ok(VoronoiDetection { nodes, degenerate })
}

/// Adds Voronoi nodes to a skeleton with provenance [`Provenance::VoronoiEdge`].
pub fn embed_voronoi_streets(skeleton: &SkeletonGraph, voronoi: &NodeSet) -> SkeletonGraph {
    let mut out = skeleton.clone();
    for id in voronoi.iter() {
        out.insert(id, Provenance::VoronoiEdge);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{generate_field, SensorField};

    fn rect_zone(x0: f64, y0: f64, x1: f64, y1: f64) -> DangerZone {
        DangerZone::region(Polygon::rect(x0, y0, x1, y1).unwrap())
    }

    #[test]
    fn no_zone_is_single_leaf() {
        let t = build_quadtree(&[], 32.0, SnapPolicy::Strict).unwrap();
        assert_eq!(t.cells().len(), 1);
        assert_eq!(t.root_level(), 5);
        assert_eq!(t.street_length(), 128.0);
    }

    #[test]
    fn unit_cell_zone_refines_one_spine() {
        let t = build_quadtree(&[rect_zone(0.0, 0.0, 1.0, 1.0)], 4.0, SnapPolicy::Strict).unwrap();
        assert_eq!(t.depth(), 3);
        assert!(t.depth() <= 4);
        // root and one level-1 cell split: 1 + 4 + 4 cells
        assert_eq!(t.cells().len(), 9);
        let split: Vec<_> = t.cells().iter().filter(|c| c.children.is_some()).map(|c| c.key).collect();
        assert_eq!(split, vec![CellKey { level: 2, x0: 0, y0: 0 }, CellKey { level: 1, x0: 0, y0: 0 }]);
    }

    #[test]
    fn strict_policy_rejects_slanted_zone() {
        let tri = DangerZone::region(Polygon::new(vec![Point::new(1.0, 1.0), Point::new(5.0, 1.5), Point::new(2.0, 4.0)]).unwrap());
        assert_eq!(build_quadtree(&[tri.clone()], 8.0, SnapPolicy::Strict), Err(SkeletonError::NotAxisAligned));
        let t = build_quadtree(&[tri], 8.0, SnapPolicy::Outward).unwrap();
        assert!(t.leaves().count() > 1);
    }

    #[test]
    fn padding_to_power_of_two() {
        assert_eq!(padded_side(32.0), 32);
        assert_eq!(padded_side(30.0), 32);
        assert_eq!(padded_side(33.0), 64);
    }

    #[test]
    fn leaves_tile_the_root() {
        let t = build_quadtree(&[rect_zone(3.0, 5.0, 11.0, 9.0)], 16.0, SnapPolicy::Strict).unwrap();
        let area: i64 = t.leaves().map(|c| c.key.side() * c.key.side()).sum();
        assert_eq!(area, 256);
        // no leaf above level 0 is touched by the boundary
        assert!(t.leaves().all(|c| !c.crossed || c.key.level == 0));
    }

    #[test]
    fn no_zone_skeleton_hugs_border() {
        let g = CommGraph::build(generate_field(1024, 3.0, 2).unwrap());
        let t = build_quadtree(&[], 32.0, SnapPolicy::Strict).unwrap();
        let sk = build_adaptive_skeleton(&g, &[], &t, 1.0);
        for id in g.field().ids() {
            let p = g.position(id);
            let near = p.x <= 0.5 || p.y <= 0.5 || p.x >= 31.5 || p.y >= 31.5;
            assert_eq!(sk.is_awake(id), near);
        }
    }

    #[test]
    fn retirement_without_zone_retires_everything() {
        let g = CommGraph::build(generate_field(64, 3.0, 1).unwrap());
        let r = simulate_cluster_retirement(&g, &[], 8.0, 1.0, SnapPolicy::Strict).unwrap();
        assert_eq!(r.leaves, vec![CellKey { level: 3, x0: 0, y0: 0 }]);
        // one retirement per internal cell: 1 + 4 + 16
        assert_eq!(r.retirements, 21);
        let clusters = form_clusters(&g, 3, 1.0);
        let walks: u64 = clusters.values().map(|c| c.members.len() as u64).sum();
        // 85 cells, all but the root notify
        assert_eq!(r.messages, walks + 84);
    }

    #[test]
    fn retirement_with_covering_zone_retires_nothing() {
        let g = CommGraph::build(generate_field(64, 3.0, 1).unwrap());
        let r = simulate_cluster_retirement(&g, &[rect_zone(0.0, 0.0, 8.0, 8.0)], 8.0, 1.0, SnapPolicy::Strict).unwrap();
        assert_eq!(r.retirements, 0);
        assert_eq!(r.leaves.len(), 64);
        assert_eq!(r.skeleton.size(), 0);
    }

    #[test]
    fn cluster_leader_is_lowest_member() {
        let g = CommGraph::build(generate_field(256, 3.0, 4).unwrap());
        for c in form_clusters(&g, 4, 1.0).values() {
            assert_eq!(c.leader, c.members.iter().min().copied());
            assert!(c.members.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn voronoi_needs_two_sources() {
        let d = vec![vec![Some(0), Some(1)]];
        assert_eq!(detect_voronoi_nodes(&[NodeId(0)], &d), Err(SkeletonError::TooFewSources(1)));
    }

    #[test]
    fn voronoi_band_and_degeneracy() {
        let d = vec![vec![Some(0), Some(1), Some(2), Some(3)], vec![Some(3), Some(2), Some(1), Some(0)]];
        let v = detect_voronoi_nodes(&[NodeId(0), NodeId(3)], &d).unwrap();
        assert_eq!(v.nodes.to_vec(), vec![NodeId(1), NodeId(2)]);
        assert!(!v.degenerate);

        let same = vec![d[0].clone(), d[0].clone()];
        let v = detect_voronoi_nodes(&[NodeId(0), NodeId(0)], &same).unwrap();
        assert!(v.degenerate);
        assert_eq!(v.nodes.len(), 4);
    }

    #[test]
    fn voronoi_embedding_adds_sizes() {
        let pts = (0..6).map(|i| Point::new(i as f64, 0.0)).collect();
        let g = CommGraph::build(SensorField::from_positions(pts, 6.0, 1.0).unwrap());
        let mut sk = SkeletonGraph::new(Construction::Adaptive, NodeSet::empty(g.n()));
        sk.insert(NodeId(0), Provenance::QuadtreeEdge);
        sk.insert(NodeId(1), Provenance::QuadtreeEdge);
        assert_eq!(embed_voronoi_streets(&sk, &NodeSet::empty(6)), sk);
        let v = NodeSet::from_ids(6, [NodeId(3), NodeId(4)]);
        let out = embed_voronoi_streets(&sk, &v);
        assert_eq!(out.size(), 4);
        assert_eq!(out.count_by(Provenance::VoronoiEdge), 2);
    }

    #[test]
    fn point_dangers_refine_their_cells() {
        let z = DangerZone::points(vec![Point::new(5.5, 5.5)]);
        let t = build_quadtree(&[z], 16.0, SnapPolicy::Outward).unwrap();
        let leaf = t.leaf_at(Point::new(5.5, 5.5));
        assert_eq!(leaf.key.level, 0);
    }
}
