//! Sensor placement, the radio-range communication graph and the graph
//! primitives every other module builds on.
//!
//! Length units are chosen so that the field is `sqrt(n) x sqrt(n)`, which
//! puts one sensor per unit area on average. Positions are drawn from
//! [`ChaCha8Rng`] seeded with the 64-bit field seed; ChaCha8 output is
//! specified independently of platform and word size, so a seed names the
//! same field everywhere.

use std::collections::VecDeque;
use std::fmt;
use std::io::{BufRead, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FieldError {
    #[error("node count must be at least 4, got {0}")]
    TooFewNodes(usize),
    #[error("radio range must be positive and finite, got {0}")]
    BadRadioRange(f64),
    #[error("position {index} ({x}, {y}) lies outside [0, {side}]^2")]
    OutOfBounds { index: usize, x: f64, y: f64, side: f64 },
    #[error("no candidate node matches the predicate")]
    NoCandidate,
    #[error("malformed field file, line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Index of a sensor. Ordering is the global tie-break everywhere.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<usize> for NodeId {
    fn from(i: usize) -> Self {
        NodeId(i as u32)
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn dist2(self, other: Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    pub fn dist(self, other: Point) -> f64 {
        self.dist2(other).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SensorField {
    side: f64,
    radio_range: f64,
    seed: u64,
    positions: Vec<Point>,
}

/// Places `n` sensors uniformly at random in `[0, sqrt(n)]^2`.
pub fn generate_field(n: usize, radio_range: f64, seed: u64) -> Result<SensorField, FieldError> {
    check_params(n, radio_range)?;
    let side = (n as f64).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let positions = (0..n)
        .map(|_| Point::new(rng.gen::<f64>() * side, rng.gen::<f64>() * side))
        .collect();
    Ok(SensorField { side, radio_range, seed, positions })
}

fn check_params(n: usize, radio_range: f64) -> Result<(), FieldError> {
    if n < 4 {
        return Err(FieldError::TooFewNodes(n));
    }
    if !(radio_range > 0.0 && radio_range.is_finite()) {
        return Err(FieldError::BadRadioRange(radio_range));
    }
    Ok(())
}

impl SensorField {
    /// Field with explicit positions, for fixtures and hand-built tests.
    /// The node-count floor of [`generate_field`] does not apply here.
    pub fn from_positions(positions: Vec<Point>, side: f64, radio_range: f64) -> Result<Self, FieldError> {
        if !(radio_range > 0.0 && radio_range.is_finite()) {
            return Err(FieldError::BadRadioRange(radio_range));
        }
        for (index, p) in positions.iter().enumerate() {
            if !(0.0..=side).contains(&p.x) || !(0.0..=side).contains(&p.y) {
                return Err(FieldError::OutOfBounds { index, x: p.x, y: p.y, side });
            }
        }
        Ok(SensorField { side, radio_range, seed: 0, positions })
    }

    pub fn n(&self) -> usize {
        self.positions.len()
    }

    pub fn side(&self) -> f64 {
        self.side
    }

    pub fn radio_range(&self) -> f64 {
        self.radio_range
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn positions(&self) -> &[Point] {
        &self.positions
    }

    pub fn position(&self, id: NodeId) -> Point {
        self.positions[id.index()]
    }

    pub fn ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.positions.len()).map(NodeId::from)
    }

    /// Writes the `n side r seed` header and one `id x y` line per node.
    /// Coordinates carry 17 significant digits so reading them back is exact.
    pub fn write_to<W: Write>(&self, mut out: W) -> Result<(), FieldError> {
        writeln!(out, "{} {:.16e} {:.16e} {}", self.n(), self.side, self.radio_range, self.seed)?;
        for (i, p) in self.positions.iter().enumerate() {
            writeln!(out, "{} {:.16e} {:.16e}", i, p.x, p.y)?;
        }
        Ok(())
    }

    pub fn read_from<R: BufRead>(input: R) -> Result<Self, FieldError> {
        let mut lines = input.lines().enumerate();
        let parse_err = |line: usize, reason: &str| FieldError::Parse { line: line + 1, reason: reason.to_string() };

        let (hl, header) = lines.next().ok_or_else(|| parse_err(0, "empty input"))?;
        let header = header?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 4 {
            return Err(parse_err(hl, "header must be `n side r seed`"));
        }
        let n: usize = fields[0].parse().map_err(|_| parse_err(hl, "bad n"))?;
        let side: f64 = fields[1].parse().map_err(|_| parse_err(hl, "bad side"))?;
        let r: f64 = fields[2].parse().map_err(|_| parse_err(hl, "bad radio range"))?;
        let seed: u64 = fields[3].parse().map_err(|_| parse_err(hl, "bad seed"))?;

        let mut positions = Vec::with_capacity(n);
        for (ln, line) in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 3 {
                return Err(parse_err(ln, "expected `id x y`"));
            }
            let id: usize = parts[0].parse().map_err(|_| parse_err(ln, "bad id"))?;
            if id != positions.len() {
                return Err(parse_err(ln, "ids must be consecutive from 0"));
            }
            let x: f64 = parts[1].parse().map_err(|_| parse_err(ln, "bad x"))?;
            let y: f64 = parts[2].parse().map_err(|_| parse_err(ln, "bad y"))?;
            positions.push(Point::new(x, y));
        }
        if positions.len() != n {
            return Err(parse_err(hl, "node count does not match header"));
        }
        let mut field = SensorField::from_positions(positions, side, r)?;
        field.seed = seed;
        Ok(field)
    }
}

/// Unit-disk graph over a [`SensorField`]: `i ~ j` iff `i != j` and
/// `dist(i, j) <= r`. Adjacency lists are sorted ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct CommGraph {
    field: SensorField,
    adjacency: Vec<Vec<NodeId>>,
}

impl CommGraph {
    /// Bucketed construction; equal to the all-pairs definition.
    pub fn build(field: SensorField) -> CommGraph {
        let n = field.n();
        let r = field.radio_range;
        let r2 = r * r;
        let cell = r.max(1e-9);
        let cols = ((field.side / cell).floor() as usize + 1).max(1);
        let bucket_of = |p: Point| {
            let cx = ((p.x / cell) as usize).min(cols - 1);
            let cy = ((p.y / cell) as usize).min(cols - 1);
            (cx, cy)
        };
        let mut buckets: Vec<Vec<u32>> = vec![Vec::new(); cols * cols];
        for (i, &p) in field.positions.iter().enumerate() {
            let (cx, cy) = bucket_of(p);
            buckets[cy * cols + cx].push(i as u32);
        }

        let mut adjacency = vec![Vec::new(); n];
        for (i, &p) in field.positions.iter().enumerate() {
            let (cx, cy) = bucket_of(p);
            let nbrs = &mut adjacency[i];
            for by in cy.saturating_sub(1)..=(cy + 1).min(cols - 1) {
                for bx in cx.saturating_sub(1)..=(cx + 1).min(cols - 1) {
                    for &j in &buckets[by * cols + bx] {
                        if j as usize != i && p.dist2(field.positions[j as usize]) <= r2 {
                            nbrs.push(NodeId(j));
                        }
                    }
                }
            }
            nbrs.sort_unstable();
        }
        CommGraph { field, adjacency }
    }

    pub fn field(&self) -> &SensorField {
        &self.field
    }

    pub fn n(&self) -> usize {
        self.adjacency.len()
    }

    pub fn neighbors(&self, id: NodeId) -> &[NodeId] {
        &self.adjacency[id.index()]
    }

    pub fn position(&self, id: NodeId) -> Point {
        self.field.position(id)
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Canonical byte form: one `id: n1 n2 ...` line per node.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        for (i, nbrs) in self.adjacency.iter().enumerate() {
            write!(out, "{i}:").unwrap();
            for j in nbrs {
                write!(out, " {j}").unwrap();
            }
            out.push(b'\n');
        }
        out
    }

    /// Union-find connectivity over the whole graph.
    pub fn is_connected(&self) -> bool {
        let n = self.n();
        if n == 0 {
            return true;
        }
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        let mut components = n;
        for (i, nbrs) in self.adjacency.iter().enumerate() {
            for j in nbrs {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j.index()));
                if a != b {
                    parent[a] = b;
                    components -= 1;
                }
            }
        }
        components == 1
    }
}

/// Hop distances and the lowest-id-parent shortest-path tree of a BFS.
#[derive(Debug, Clone, PartialEq)]
pub struct HopTree {
    pub dist: Vec<Option<u32>>,
    pub parent: Vec<Option<NodeId>>,
}

impl HopTree {
    pub fn distance(&self, id: NodeId) -> Option<u32> {
        self.dist[id.index()]
    }

    /// Path from the root to `target`, or `None` if unreachable.
    pub fn path_to(&self, target: NodeId) -> Option<Vec<NodeId>> {
        self.dist[target.index()]?;
        let mut path = vec![target];
        let mut cur = target;
        while let Some(p) = self.parent[cur.index()] {
            path.push(p);
            cur = p;
        }
        path.reverse();
        Some(path)
    }
}

/// Single-source BFS that never enters blocked nodes.
pub fn hop_bfs(graph: &CommGraph, source: NodeId, blocked: impl Fn(NodeId) -> bool) -> HopTree {
    multi_source_bfs(graph, &[source], blocked, None)
}

/// BFS from a set of roots (all at distance 0), optionally stopping at
/// `max_hops`. Each reached non-root node gets the lowest-id neighbour one
/// hop closer as parent.
pub fn multi_source_bfs(
    graph: &CommGraph,
    sources: &[NodeId],
    blocked: impl Fn(NodeId) -> bool,
    max_hops: Option<u32>,
) -> HopTree {
    let n = graph.n();
    let mut dist: Vec<Option<u32>> = vec![None; n];
    let mut queue = VecDeque::new();
    for &s in sources {
        if dist[s.index()].is_none() {
            dist[s.index()] = Some(0);
            queue.push_back(s);
        }
    }
    while let Some(u) = queue.pop_front() {
        let du = dist[u.index()].unwrap();
        if max_hops.is_some_and(|m| du >= m) {
            continue;
        }
        for &v in graph.neighbors(u) {
            if dist[v.index()].is_none() && !blocked(v) {
                dist[v.index()] = Some(du + 1);
                queue.push_back(v);
            }
        }
    }
    let parent = (0..n)
        .map(|v| {
            let dv = dist[v]?;
            if dv == 0 {
                return None;
            }
            // adjacency is sorted, so the first hit is the lowest id
            graph.adjacency[v].iter().copied().find(|u| dist[u.index()] == Some(dv - 1))
        })
        .collect();
    HopTree { dist, parent }
}

/// Candidate closest to `point`; equal distances go to the lowest id.
pub fn nearest_node(field: &SensorField, point: Point, candidates: impl Fn(NodeId) -> bool) -> Result<NodeId, FieldError> {
    let mut best: Option<(f64, NodeId)> = None;
    for id in field.ids() {
        if !candidates(id) {
            continue;
        }
        let d = field.position(id).dist2(point);
        if best.is_none_or(|(bd, _)| d < bd) {
            best = Some((d, id));
        }
    }
    best.map(|(_, id)| id).ok_or(FieldError::NoCandidate)
}

/// Fraction of `seeds` seeds (starting at `first_seed`) whose graph is
/// connected. A diagnostic for the "no large holes" regime.
pub fn connectivity_census(n: usize, radio_range: f64, first_seed: u64, seeds: usize) -> Result<f64, FieldError> {
    check_params(n, radio_range)?;
    let connected = (0..seeds as u64)
        .map(|k| generate_field(n, radio_range, first_seed + k).map(|f| CommGraph::build(f).is_connected()))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .filter(|&c| c)
        .count();
    Ok(connected as f64 / seeds.max(1) as f64)
}
