//! Skeleton graphs: the sparse awake subsets path search runs on.

pub mod adaptive;
pub mod uniform;

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::fmt;
use std::io::Write;

use thiserror::Error;

use crate::danger::DangerError;
use crate::field::{CommGraph, NodeId, Point};
use crate::nodeset::NodeSet;

#[derive(Debug, Error, PartialEq)]
pub enum SkeletonError {
    #[error("street separation {separation} must lie strictly between 1 and {side}")]
    DegenerateSeparation { separation: f64, side: f64 },
    #[error("epsilon {0} must lie strictly between 0 and 1/2")]
    BadEpsilon(f64),
    #[error("strip width {width} times radio range {radio_range} must exceed 1")]
    WidthTooSmall { width: f64, radio_range: f64 },
    #[error("shift {delta} must lie in [0, {separation})")]
    ShiftOutOfRange { delta: f64, separation: f64 },
    #[error("zone boundary is not axis-aligned on the integer grid")]
    NotAxisAligned,
    #[error("voronoi detection needs at least 2 danger sources, got {0}")]
    TooFewSources(usize),
    #[error(transparent)]
    Danger(#[from] DangerError),
}

/// Why a node is awake.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Provenance {
    GridStreet,
    PerimeterStreet,
    QuadtreeEdge,
    VoronoiEdge,
    Endpoint,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::GridStreet => "grid",
            Provenance::PerimeterStreet => "perimeter",
            Provenance::QuadtreeEdge => "quadtree",
            Provenance::VoronoiEdge => "voronoi",
            Provenance::Endpoint => "endpoint",
        }
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Construction {
    /// Every safe node; the reference the skeletons are measured against.
    Full,
    Uniform,
    Adaptive,
}

/// Axis-aligned rectangle `[x0, x1] x [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Rect {
    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.x0 && p.x <= self.x1 && p.y >= self.y0 && p.y <= self.y1
    }

    /// Distance from a point inside the rectangle to its boundary, or from
    /// a point outside to the rectangle.
    pub fn boundary_distance(&self, p: Point) -> f64 {
        if self.contains(p) {
            (p.x - self.x0).min(self.x1 - p.x).min(p.y - self.y0).min(self.y1 - p.y)
        } else {
            let dx = (self.x0 - p.x).max(p.x - self.x1).max(0.0);
            let dy = (self.y0 - p.y).max(p.y - self.y1).max(0.0);
            (dx * dx + dy * dy).sqrt()
        }
    }
}

/// Awake node subset plus per-node provenance. Nodes in `excluded` (inside
/// a danger zone) are never awake.
#[derive(Debug, Clone, PartialEq)]
pub struct SkeletonGraph {
    construction: Construction,
    awake: NodeSet,
    provenance: Vec<Option<Provenance>>,
    excluded: NodeSet,
    /// Street cells: the squares bounded by streets, used to flood for an
    /// off-street destination.
    cells: Vec<Rect>,
}

impl SkeletonGraph {
    pub fn new(construction: Construction, excluded: NodeSet) -> Self {
        let n = excluded.universe();
        SkeletonGraph { construction, awake: NodeSet::empty(n), provenance: vec![None; n], excluded, cells: Vec::new() }
    }

    /// Every node outside the excluded set.
    pub fn full(excluded: NodeSet) -> Self {
        let n = excluded.universe();
        let mut s = SkeletonGraph::new(Construction::Full, excluded);
        for i in 0..n {
            // provenance stays unset for the full construction
            s.insert(NodeId::from(i), Provenance::Endpoint);
        }
        s
    }

    /// Wakes a node; the first provenance assigned sticks. Excluded nodes
    /// are refused.
    pub fn insert(&mut self, id: NodeId, why: Provenance) -> bool {
        if self.excluded.contains(id) {
            return false;
        }
        if self.awake.insert(id) {
            if self.construction != Construction::Full {
                self.provenance[id.index()] = Some(why);
            }
            true
        } else {
            false
        }
    }

    pub fn construction(&self) -> Construction {
        self.construction
    }

    pub fn awake(&self) -> &NodeSet {
        &self.awake
    }

    pub fn excluded(&self) -> &NodeSet {
        &self.excluded
    }

    pub fn size(&self) -> usize {
        self.awake.len()
    }

    pub fn is_awake(&self, id: NodeId) -> bool {
        self.awake.contains(id)
    }

    pub fn provenance(&self, id: NodeId) -> Option<Provenance> {
        self.provenance[id.index()]
    }

    pub fn count_by(&self, why: Provenance) -> usize {
        self.provenance.iter().filter(|p| **p == Some(why)).count()
    }

    pub fn set_cells(&mut self, cells: Vec<Rect>) {
        self.cells = cells;
    }

    pub fn cells(&self) -> &[Rect] {
        &self.cells
    }

    /// First street cell containing `p`.
    pub fn enclosing_cell(&self, p: Point) -> Option<Rect> {
        self.cells.iter().copied().find(|c| c.contains(p))
    }

    /// Awake neighbours of an awake node.
    pub fn neighbors<'g>(&'g self, graph: &'g CommGraph, id: NodeId) -> impl Iterator<Item = NodeId> + 'g {
        graph.neighbors(id).iter().copied().filter(move |&j| self.awake.contains(j))
    }

    /// `id provenance` lines in id order. Full skeletons print `full`.
    pub fn dump<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for id in self.awake.iter() {
            match self.provenance(id) {
                Some(p) => writeln!(out, "{id} {p}")?,
                None => writeln!(out, "{id} full")?,
            }
        }
        Ok(())
    }
}

/// Hop radius of the local pass of [`repair_gaps`].
pub const REPAIR_HOPS: u32 = 4;
/// Largest skeleton detour the local pass tolerates, as a multiple of the
/// safe-graph hop distance.
pub const REPAIR_STRETCH: u32 = 2;

/// Closes breaks in thin streets.
///
/// Strips break wherever consecutive strip nodes are out of radio range.
/// Local pass: for each awake node `u` in id order and each awake `v`
/// reached in `h <= REPAIR_HOPS` hops through sleeping safe nodes, if the
/// skeleton needs more than `REPAIR_STRETCH * h` hops from `u` to `v`, the
/// sleeping path wakes. Global pass: fragments still apart (smallest,
/// lowest id first) wake a path to the nearest awake node outside them,
/// until every connected piece of the safe graph holds one connected
/// skeleton piece. Returns the repaired skeleton and the number of nodes
/// woken.
pub fn repair_gaps(graph: &CommGraph, skeleton: &SkeletonGraph, why: Provenance) -> (SkeletonGraph, usize) {
    let mut out = skeleton.clone();
    let n = graph.n();
    let safe_comp = components(graph, |id| !out.excluded.contains(id));
    let mut woken = 0;

    for u in skeleton.awake.iter() {
        for (v, h, path) in sleeping_neighbourhood(graph, &out, u) {
            if skeleton_distance(graph, &out, u, v, REPAIR_STRETCH * h).is_none() {
                for id in path {
                    if out.insert(id, why) {
                        woken += 1;
                    }
                }
            }
        }
    }

    loop {
        let comp = components(graph, |id| out.awake.contains(id));
        // skeleton fragments per safe component
        let mut frags: Vec<(usize, u32, Vec<NodeId>)> = Vec::new();
        let mut index = HashMap::new();
        for id in out.awake.iter() {
            let c = comp[id.index()].unwrap();
            let k = *index.entry(c).or_insert_with(|| {
                frags.push((safe_comp[id.index()].unwrap() as usize, c, Vec::new()));
                frags.len() - 1
            });
            frags[k].2.push(id);
        }
        let mut per_safe: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (k, f) in frags.iter().enumerate() {
            per_safe.entry(f.0).or_default().push(k);
        }
        let mut bridged = false;
        for ks in per_safe.values().filter(|ks| ks.len() > 1) {
            // smallest fragment first; ties to the lowest member id
            let k = *ks.iter().min_by_key(|&&k| (frags[k].2.len(), frags[k].2[0])).unwrap();
            let (_, c, members) = &frags[k];
            let path = bridge(graph, &out, members, |id| comp[id.index()] == Some(*c));
            for id in path {
                if out.insert(id, why) {
                    woken += 1;
                }
            }
            bridged = true;
        }
        if !bridged {
            break;
        }
        debug_assert!(out.awake.len() <= n);
    }
    (out, woken)
}

/// Awake nodes reachable from `u` within [`REPAIR_HOPS`] hops through
/// sleeping safe nodes, with hop count and the sleeping nodes in between.
/// Ordered by hops, then id.
fn sleeping_neighbourhood(graph: &CommGraph, skeleton: &SkeletonGraph, u: NodeId) -> Vec<(NodeId, u32, Vec<NodeId>)> {
    let mut parent: HashMap<NodeId, NodeId> = HashMap::new();
    let mut seen: HashSet<NodeId> = [u].into_iter().collect();
    let mut frontier = vec![u];
    let mut found = Vec::new();
    for h in 1..=REPAIR_HOPS {
        let mut next = Vec::new();
        let mut hits = Vec::new();
        for &x in &frontier {
            for &v in graph.neighbors(x) {
                if skeleton.excluded.contains(v) || !seen.insert(v) {
                    continue;
                }
                parent.insert(v, x);
                if skeleton.awake.contains(v) {
                    hits.push(v);
                } else {
                    next.push(v);
                }
            }
        }
        hits.sort_unstable();
        for v in hits {
            let mut path = Vec::new();
            let mut cur = parent[&v];
            while cur != u {
                path.push(cur);
                cur = parent[&cur];
            }
            found.push((v, h, path));
        }
        frontier = next;
    }
    found
}

/// Hop distance from `a` to `b` inside the skeleton, if at most `limit`.
fn skeleton_distance(graph: &CommGraph, skeleton: &SkeletonGraph, a: NodeId, b: NodeId, limit: u32) -> Option<u32> {
    let mut seen: HashSet<NodeId> = [a].into_iter().collect();
    let mut frontier = vec![a];
    for d in 0..=limit {
        if frontier.contains(&b) {
            return Some(d);
        }
        let mut next = Vec::new();
        for &x in &frontier {
            for &v in graph.neighbors(x) {
                if skeleton.awake.contains(v) && seen.insert(v) {
                    next.push(v);
                }
            }
        }
        frontier = next;
    }
    None
}

/// Component label per node of the subgraph induced by `keep`.
fn components(graph: &CommGraph, keep: impl Fn(NodeId) -> bool) -> Vec<Option<u32>> {
    let mut label = vec![None; graph.n()];
    let mut next = 0u32;
    let mut queue = VecDeque::new();
    for start in 0..graph.n() {
        let s = NodeId::from(start);
        if label[start].is_some() || !keep(s) {
            continue;
        }
        label[start] = Some(next);
        queue.push_back(s);
        while let Some(u) = queue.pop_front() {
            for &v in graph.neighbors(u) {
                if label[v.index()].is_none() && keep(v) {
                    label[v.index()] = Some(next);
                    queue.push_back(v);
                }
            }
        }
        next += 1;
    }
    label
}

/// Interior nodes of a shortest safe path from `members` to the nearest
/// awake node outside the fragment (lowest id among the nearest).
fn bridge(graph: &CommGraph, skeleton: &SkeletonGraph, members: &[NodeId], inside: impl Fn(NodeId) -> bool) -> Vec<NodeId> {
    let mut parent: Vec<Option<NodeId>> = vec![None; graph.n()];
    let mut seen = NodeSet::from_ids(graph.n(), members.iter().copied());
    let mut frontier: Vec<NodeId> = members.to_vec();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        let mut hit: Option<NodeId> = None;
        for &u in &frontier {
            for &v in graph.neighbors(u) {
                if seen.contains(v) || skeleton.excluded.contains(v) {
                    continue;
                }
                seen.insert(v);
                parent[v.index()] = Some(u);
                if skeleton.awake.contains(v) && !inside(v) {
                    hit = Some(hit.map_or(v, |h| h.min(v)));
                }
                next.push(v);
            }
        }
        if let Some(target) = hit {
            let mut path = Vec::new();
            let mut cur = parent[target.index()];
            while let Some(p) = cur {
                if inside(p) {
                    break;
                }
                path.push(p);
                cur = parent[p.index()];
            }
            return path;
        }
        frontier = next;
    }
    Vec::new()
}

#[cfg(test)]
mod tests {
    use super::*;

    use crate::field::SensorField;

    /// Nodes on the line y = 1 at the given x positions, radio range 2.5.
    fn line(xs: &[f64]) -> CommGraph {
        let pts = xs.iter().map(|&x| Point::new(x, 1.0)).collect();
        CommGraph::build(SensorField::from_positions(pts, 40.0, 2.5).unwrap())
    }

    fn awake(n: usize, ids: &[usize], excluded: &[usize]) -> SkeletonGraph {
        let mut s = SkeletonGraph::new(Construction::Uniform, NodeSet::from_ids(n, excluded.iter().map(|&i| NodeId(i as u32))));
        for &i in ids {
            s.insert(NodeId(i as u32), Provenance::GridStreet);
        }
        s
    }

    #[test]
    fn short_gap_is_bridged() {
        let g = line(&(0..10).map(|i| 2.0 * i as f64).collect::<Vec<_>>());
        let (out, woken) = repair_gaps(&g, &awake(10, &[0, 1, 2, 5, 6, 7, 8, 9], &[]), Provenance::GridStreet);
        assert_eq!(woken, 2);
        assert!(out.is_awake(NodeId(3)) && out.is_awake(NodeId(4)));
        assert_eq!(out.provenance(NodeId(3)), Some(Provenance::GridStreet));
    }

    #[test]
    fn intact_street_is_untouched() {
        let g = line(&(0..10).map(|i| 2.0 * i as f64).collect::<Vec<_>>());
        let s = awake(10, &[0, 1, 2, 3, 4], &[]);
        let (out, woken) = repair_gaps(&g, &s, Provenance::GridStreet);
        assert_eq!(woken, 0);
        assert_eq!(out, s);
    }

    #[test]
    fn long_gap_uses_the_global_pass() {
        let g = line(&(0..16).map(|i| 2.0 * i as f64).collect::<Vec<_>>());
        let (out, woken) = repair_gaps(&g, &awake(16, &[0, 1, 15], &[]), Provenance::QuadtreeEdge);
        assert_eq!(woken, 13);
        assert_eq!(out.size(), 16);
    }

    #[test]
    fn excluded_nodes_block_repair() {
        let g = line(&(0..10).map(|i| 2.0 * i as f64).collect::<Vec<_>>());
        let (out, woken) = repair_gaps(&g, &awake(10, &[0, 1, 2, 5, 6], &[3]), Provenance::GridStreet);
        assert_eq!(woken, 0);
        assert!(!out.is_awake(NodeId(3)) && !out.is_awake(NodeId(4)));
    }

    #[test]
    fn long_detour_gets_a_shortcut() {
        // a U of awake nodes whose tips sit one sleeping node apart
        let mut pts = vec![Point::new(1.0, 14.0), Point::new(5.0, 14.0), Point::new(3.0, 14.0)];
        for k in 1..=6 {
            pts.push(Point::new(1.0, 14.0 - 2.0 * k as f64));
            pts.push(Point::new(5.0, 14.0 - 2.0 * k as f64));
        }
        pts.push(Point::new(3.0, 2.0));
        let n = pts.len();
        let g = CommGraph::build(SensorField::from_positions(pts, 20.0, 2.5).unwrap());
        let ids: Vec<usize> = (0..n).filter(|&i| i != 2).collect();
        let (out, woken) = repair_gaps(&g, &awake(n, &ids, &[]), Provenance::GridStreet);
        assert_eq!(woken, 1);
        assert!(out.is_awake(NodeId(2)));
    }

    #[test]
    fn excluded_nodes_never_wake() {
        let excluded = NodeSet::from_ids(4, [NodeId(1)]);
        let mut s = SkeletonGraph::new(Construction::Uniform, excluded.clone());
        assert!(!s.insert(NodeId(1), Provenance::GridStreet));
        assert!(s.insert(NodeId(2), Provenance::GridStreet));
        assert!(!s.insert(NodeId(2), Provenance::PerimeterStreet));
        assert_eq!(s.provenance(NodeId(2)), Some(Provenance::GridStreet));
        assert_eq!(s.size(), 1);

        let full = SkeletonGraph::full(excluded);
        assert_eq!(full.size(), 3);
        let mut buf = Vec::new();
        full.dump(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "0 full\n2 full\n3 full\n");
    }

    #[test]
    fn rect_distances() {
        let r = Rect { x0: 0.0, y0: 0.0, x1: 4.0, y1: 4.0 };
        assert_eq!(r.boundary_distance(Point::new(1.0, 2.0)), 1.0);
        assert_eq!(r.boundary_distance(Point::new(5.0, 2.0)), 1.0);
        assert_eq!(r.boundary_distance(Point::new(7.0, 8.0)), 5.0);
    }
}
