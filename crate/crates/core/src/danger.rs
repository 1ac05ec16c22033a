//! Danger zones, inverse-power potentials and path exposure.
//!
//! A zone is either a region (a simple polygon whose interior is unsafe) or
//! a set of point dangers that radiate a potential `1 / R^beta`. Potentials
//! of several points superpose by summation. Exposure of a node path is the
//! sum of the potentials at its nodes, which is the discrete form the
//! distributed search accumulates hop by hop.

use std::fmt;

use thiserror::Error;

use crate::field::{CommGraph, NodeId, Point};
use crate::nodeset::NodeSet;

const ON_EDGE_EPS: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum DangerError {
    #[error("polygon needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("polygon has zero area")]
    Degenerate,
    #[error("polygon edges {0} and {1} intersect")]
    SelfIntersecting(usize, usize),
    #[error("operation needs a region zone")]
    NotARegion,
    #[error("operation needs a point-set zone")]
    NotAPointSet,
    #[error("potential exponent must exceed 1, got {0}")]
    BetaTooSmall(f64),
    #[error("clamp radius must be positive, got {0}")]
    BadClamp(f64),
    #[error("well-behavedness constant must exceed 1, got {0}")]
    BadWellBehavedConstant(f64),
    #[error("{count} dangerous entities exceed the limit of {limit}")]
    TooManyEntities { count: usize, limit: usize },
    #[error("zone file line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub a: Point,
    pub b: Point,
}

impl Segment {
    pub fn length(&self) -> f64 {
        self.a.dist(self.b)
    }

    /// Length of the part of this segment inside the closed box
    /// `[x0, x0+size] x [y0, y0+size]` (Liang-Barsky).
    pub fn clipped_length(&self, x0: f64, y0: f64, size: f64) -> f64 {
        let dx = self.b.x - self.a.x;
        let dy = self.b.y - self.a.y;
        let (mut t0, mut t1) = (0.0f64, 1.0f64);
        let checks = [
            (-dx, self.a.x - x0),
            (dx, x0 + size - self.a.x),
            (-dy, self.a.y - y0),
            (dy, y0 + size - self.a.y),
        ];
        for (p, q) in checks {
            if p == 0.0 {
                if q < 0.0 {
                    return 0.0;
                }
            } else {
                let t = q / p;
                if p < 0.0 {
                    t0 = t0.max(t);
                } else {
                    t1 = t1.min(t);
                }
            }
        }
        if t1 <= t0 {
            0.0
        } else {
            (t1 - t0) * self.length()
        }
    }

    pub fn distance_to(&self, p: Point) -> f64 {
        let dx = self.b.x - self.a.x;
        let dy = self.b.y - self.a.y;
        let len2 = dx * dx + dy * dy;
        if len2 == 0.0 {
            return self.a.dist(p);
        }
        let t = (((p.x - self.a.x) * dx + (p.y - self.a.y) * dy) / len2).clamp(0.0, 1.0);
        Point::new(self.a.x + t * dx, self.a.y + t * dy).dist(p)
    }
}

fn cross(o: Point, a: Point, b: Point) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

fn on_segment(p: Point, s: &Segment) -> bool {
    s.distance_to(p) <= ON_EDGE_EPS
}

fn segments_touch(s: &Segment, t: &Segment) -> bool {
    let d1 = cross(t.a, t.b, s.a);
    let d2 = cross(t.a, t.b, s.b);
    let d3 = cross(s.a, s.b, t.a);
    let d4 = cross(s.a, s.b, t.b);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    on_segment(s.a, t) || on_segment(s.b, t) || on_segment(t.a, s) || on_segment(t.b, s)
}

/// Simple polygon stored counter-clockwise.
#[derive(Debug, Clone, PartialEq)]
pub struct Polygon {
    vertices: Vec<Point>,
    axis_aligned: bool,
}

impl Polygon {
    pub fn new(mut vertices: Vec<Point>) -> Result<Self, DangerError> {
        if vertices.len() > 1 && vertices.first() == vertices.last() {
            vertices.pop();
        }
        if vertices.len() < 3 {
            return Err(DangerError::TooFewVertices(vertices.len()));
        }
        let area = signed_area(&vertices);
        if area.abs() < 1e-12 {
            return Err(DangerError::Degenerate);
        }
        if area < 0.0 {
            vertices.reverse();
        }
        let poly = Polygon { axis_aligned: false, vertices };
        poly.check_simple()?;
        let axis_aligned = poly.edges().all(|e| e.a.x == e.b.x || e.a.y == e.b.y)
            && poly.vertices.iter().all(|v| v.x.fract() == 0.0 && v.y.fract() == 0.0);
        Ok(Polygon { axis_aligned, ..poly })
    }

    /// Axis-aligned rectangle `[x0, x1] x [y0, y1]`.
    pub fn rect(x0: f64, y0: f64, x1: f64, y1: f64) -> Result<Self, DangerError> {
        Polygon::new(vec![Point::new(x0, y0), Point::new(x1, y0), Point::new(x1, y1), Point::new(x0, y1)])
    }

    fn check_simple(&self) -> Result<(), DangerError> {
        let edges: Vec<Segment> = self.edges().collect();
        let m = edges.len();
        for i in 0..m {
            for j in (i + 1)..m {
                let adjacent = j == i + 1 || (i == 0 && j == m - 1);
                if adjacent {
                    // neighbours share exactly one endpoint; reject fold-backs
                    let (shared, a_other, b_other) = if j == i + 1 {
                        (edges[i].b, edges[i].a, edges[j].b)
                    } else {
                        (edges[i].a, edges[i].b, edges[j].a)
                    };
                    let c = cross(shared, a_other, b_other);
                    let dot = (a_other.x - shared.x) * (b_other.x - shared.x) + (a_other.y - shared.y) * (b_other.y - shared.y);
                    if c.abs() < 1e-12 && dot > 0.0 {
                        return Err(DangerError::SelfIntersecting(i, j));
                    }
                } else if segments_touch(&edges[i], &edges[j]) {
                    return Err(DangerError::SelfIntersecting(i, j));
                }
            }
        }
        Ok(())
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    /// True when every edge is horizontal or vertical and every vertex has
    /// integer coordinates.
    pub fn is_axis_aligned(&self) -> bool {
        self.axis_aligned
    }

    pub fn edges(&self) -> impl Iterator<Item = Segment> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| Segment { a: self.vertices[i], b: self.vertices[(i + 1) % n] })
    }

    pub fn area(&self) -> f64 {
        signed_area(&self.vertices)
    }

    pub fn perimeter(&self) -> f64 {
        self.edges().map(|e| e.length()).sum()
    }

    /// Closed point-in-polygon: points on an edge count as inside.
    pub fn contains(&self, p: Point) -> bool {
        if self.edges().any(|e| on_segment(p, &e)) {
            return true;
        }
        let mut inside = false;
        for e in self.edges() {
            let (a, b) = (e.a, e.b);
            if (a.y > p.y) != (b.y > p.y) {
                let x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
                if p.x < x {
                    inside = !inside;
                }
            }
        }
        inside
    }

    pub fn bounding_box(&self) -> (Point, Point) {
        let mut lo = Point::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for v in &self.vertices {
            lo.x = lo.x.min(v.x);
            lo.y = lo.y.min(v.y);
            hi.x = hi.x.max(v.x);
            hi.y = hi.y.max(v.y);
        }
        (lo, hi)
    }

    pub fn scaled(&self, factor: f64) -> Polygon {
        let vertices = self.vertices.iter().map(|v| Point::new(v.x * factor, v.y * factor)).collect();
        Polygon::new(vertices).expect("scaling preserves simplicity")
    }
}

fn signed_area(v: &[Point]) -> f64 {
    let n = v.len();
    (0..n).map(|i| v[i].x * v[(i + 1) % n].y - v[(i + 1) % n].x * v[i].y).sum::<f64>() / 2.0
}

#[derive(Debug, Clone, PartialEq)]
pub enum ZoneKind {
    Region(Polygon),
    PointSet(Vec<Point>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DangerZone {
    pub kind: ZoneKind,
    /// Well-behavedness constant the constructions compare measurements to.
    pub c: f64,
    pub threshold: Option<f64>,
}

pub const DEFAULT_WELL_BEHAVED_C: f64 = 4.0;

impl DangerZone {
    pub fn region(polygon: Polygon) -> Self {
        DangerZone { kind: ZoneKind::Region(polygon), c: DEFAULT_WELL_BEHAVED_C, threshold: None }
    }

    pub fn points(points: Vec<Point>) -> Self {
        DangerZone { kind: ZoneKind::PointSet(points), c: DEFAULT_WELL_BEHAVED_C, threshold: None }
    }

    pub fn with_c(mut self, c: f64) -> Result<Self, DangerError> {
        if !(c > 1.0) {
            return Err(DangerError::BadWellBehavedConstant(c));
        }
        self.c = c;
        Ok(self)
    }

    pub fn polygon(&self) -> Result<&Polygon, DangerError> {
        match &self.kind {
            ZoneKind::Region(p) => Ok(p),
            ZoneKind::PointSet(_) => Err(DangerError::NotARegion),
        }
    }

    pub fn danger_points(&self) -> Result<&[Point], DangerError> {
        match &self.kind {
            ZoneKind::PointSet(p) => Ok(p),
            ZoneKind::Region(_) => Err(DangerError::NotAPointSet),
        }
    }

    /// Number of distinct dangerous entities: 1 for a region, the point count otherwise.
    pub fn entity_count(&self) -> usize {
        match &self.kind {
            ZoneKind::Region(_) => 1,
            ZoneKind::PointSet(p) => p.len(),
        }
    }

    /// Enforces `entities <= sqrt(n) / divisor` (the default divisor is 4).
    pub fn check_entity_limit(&self, n: usize, divisor: f64) -> Result<(), DangerError> {
        let limit = ((n as f64).sqrt() / divisor).floor().max(1.0) as usize;
        let count = self.entity_count();
        if count > limit {
            return Err(DangerError::TooManyEntities { count, limit });
        }
        Ok(())
    }

    /// True when `p` lies on or inside a region zone. Point sets have no
    /// interior, so every position is outside them.
    pub fn is_unsafe(&self, p: Point) -> bool {
        match &self.kind {
            ZoneKind::Region(poly) => poly.contains(p),
            ZoneKind::PointSet(_) => false,
        }
    }

    pub fn scaled(&self, factor: f64) -> DangerZone {
        let kind = match &self.kind {
            ZoneKind::Region(p) => ZoneKind::Region(p.scaled(factor)),
            ZoneKind::PointSet(pts) => ZoneKind::PointSet(pts.iter().map(|p| Point::new(p.x * factor, p.y * factor)).collect()),
        };
        DangerZone { kind, ..self.clone() }
    }
}

pub fn node_in_zone(zone: &DangerZone, position: Point) -> Result<bool, DangerError> {
    Ok(zone.polygon()?.contains(position))
}

/// Per-node in-zone flags; empty mask for point-set zones.
pub fn zone_mask(graph: &CommGraph, zone: &DangerZone) -> NodeSet {
    NodeSet::from_fn(graph.n(), |id| zone.is_unsafe(graph.position(id)))
}

/// In-zone nodes that have at least one neighbour outside the zone.
pub fn boundary_nodes(graph: &CommGraph, zone: &DangerZone) -> Result<NodeSet, DangerError> {
    zone.polygon()?;
    let inside = zone_mask(graph, zone);
    Ok(NodeSet::from_fn(graph.n(), |id| {
        inside.contains(id) && graph.neighbors(id).iter().any(|&j| !inside.contains(j))
    }))
}

pub fn perimeter_length(zone: &DangerZone) -> Result<f64, DangerError> {
    Ok(zone.polygon()?.perimeter())
}

/// Largest `(curve length inside box) / x` over a sliding grid of boxes of
/// each side `x`. Box origins step by `x / 4` across the curve's extent.
pub fn well_behaved_ratio(curve: &[Segment], box_sizes: &[f64]) -> f64 {
    if curve.is_empty() {
        return 0.0;
    }
    let mut lo = Point::new(f64::INFINITY, f64::INFINITY);
    let mut hi = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for s in curve {
        for p in [s.a, s.b] {
            lo.x = lo.x.min(p.x);
            lo.y = lo.y.min(p.y);
            hi.x = hi.x.max(p.x);
            hi.y = hi.y.max(p.y);
        }
    }
    let mut best = 0.0f64;
    for &size in box_sizes {
        let stride = size / 4.0;
        let steps_x = ((hi.x - lo.x + size) / stride).ceil() as usize + 1;
        let steps_y = ((hi.y - lo.y + size) / stride).ceil() as usize + 1;
        for iy in 0..steps_y {
            let y0 = lo.y - size + iy as f64 * stride;
            for ix in 0..steps_x {
                let x0 = lo.x - size + ix as f64 * stride;
                let inside: f64 = curve.iter().map(|s| s.clipped_length(x0, y0, size)).sum();
                best = best.max(inside / size);
            }
        }
    }
    best
}

pub fn well_behaved_check(zone: &DangerZone, box_sizes: &[f64]) -> Result<f64, DangerError> {
    let edges: Vec<Segment> = zone.polygon()?.edges().collect();
    Ok(well_behaved_ratio(&edges, box_sizes))
}

/// Inverse-power potential of a set of point dangers.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialModel {
    beta: f64,
    clamp_radius: f64,
    sources: Vec<Point>,
}

pub const DEFAULT_BETA: f64 = 2.0;
pub const DEFAULT_CLAMP: f64 = 1.0;

impl PotentialModel {
    pub fn new(beta: f64, clamp_radius: f64, sources: Vec<Point>) -> Result<Self, DangerError> {
        if !(beta > 1.0 && beta.is_finite()) {
            return Err(DangerError::BetaTooSmall(beta));
        }
        if !(clamp_radius > 0.0 && clamp_radius.is_finite()) {
            return Err(DangerError::BadClamp(clamp_radius));
        }
        Ok(PotentialModel { beta, clamp_radius, sources })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn clamp_radius(&self) -> f64 {
        self.clamp_radius
    }

    pub fn sources(&self) -> &[Point] {
        &self.sources
    }

    /// Single-source potential at distance `r`, clamped below at the clamp radius.
    pub fn at_distance(&self, r: f64) -> f64 {
        r.max(self.clamp_radius).powf(-self.beta)
    }

    pub fn potential_at(&self, p: Point) -> f64 {
        self.sources.iter().map(|s| self.at_distance(s.dist(p))).sum()
    }
}

/// Accumulated potential along a path.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct Exposure(pub f64);

impl Exposure {
    pub fn value(self) -> f64 {
        self.0
    }
}

impl std::ops::Add for Exposure {
    type Output = Exposure;
    fn add(self, rhs: Exposure) -> Exposure {
        Exposure(self.0 + rhs.0)
    }
}

impl fmt::Display for Exposure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Sum of geometric potentials at the path's node positions.
pub fn path_exposure(model: &PotentialModel, path: &[Point]) -> Exposure {
    Exposure(path.iter().map(|&p| model.potential_at(p)).sum())
}

/// Sum of precomputed per-node potentials along a node path.
pub fn node_path_exposure(potentials: &[f64], path: &[NodeId]) -> Exposure {
    Exposure(path.iter().map(|id| potentials[id.index()]).sum())
}

/// Parsed zone file: the zone plus optional potential parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct ZoneFile {
    pub zone: DangerZone,
    pub beta: Option<f64>,
    pub clamp: Option<f64>,
    /// Coordinates are fractions of the field side and must be scaled.
    pub relative: bool,
}

impl ZoneFile {
    /// Zone in field coordinates for a field of the given side.
    pub fn instantiate(&self, side: f64) -> DangerZone {
        if self.relative {
            self.zone.scaled(side)
        } else {
            self.zone.clone()
        }
    }

    pub fn potential_model(&self, sources: Vec<Point>) -> Result<PotentialModel, DangerError> {
        PotentialModel::new(self.beta.unwrap_or(DEFAULT_BETA), self.clamp.unwrap_or(DEFAULT_CLAMP), sources)
    }

    /// Reads the zone text format:
    ///
    /// ```text
    /// # comment
    /// c = 3
    /// beta = 2
    /// clamp = 1
    /// threshold = 0.5
    /// units = relative
    /// region
    /// 10 10
    /// 20 10
    /// 20 20
    /// ```
    ///
    /// `points` instead of `region` reads point dangers.
    pub fn parse(text: &str) -> Result<ZoneFile, DangerError> {
        let err = |line: usize, reason: &str| DangerError::Parse { line: line + 1, reason: reason.to_string() };
        let mut c = DEFAULT_WELL_BEHAVED_C;
        let (mut beta, mut clamp, mut threshold) = (None, None, None);
        let mut relative = false;
        let mut body: Option<(bool, Vec<Point>)> = None;

        for (ln, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            if let Some((_, pts)) = body.as_mut() {
                let nums: Vec<&str> = line.split_whitespace().collect();
                if nums.len() != 2 {
                    return Err(err(ln, "expected `x y`"));
                }
                let x = nums[0].parse().map_err(|_| err(ln, "bad x"))?;
                let y = nums[1].parse().map_err(|_| err(ln, "bad y"))?;
                pts.push(Point::new(x, y));
                continue;
            }
            match line {
                "region" => body = Some((true, Vec::new())),
                "points" => body = Some((false, Vec::new())),
                _ => {
                    let (key, value) = line
                        .split_once('=')
                        .or_else(|| line.split_once(char::is_whitespace))
                        .ok_or_else(|| err(ln, "expected `key = value`"))?;
                    let (key, value) = (key.trim(), value.trim());
                    let num = || value.parse::<f64>().map_err(|_| err(ln, "bad number"));
                    match key {
                        "c" => c = num()?,
                        "beta" => beta = Some(num()?),
                        "clamp" => clamp = Some(num()?),
                        "threshold" => threshold = Some(num()?),
                        "units" => match value {
                            "relative" => relative = true,
                            "absolute" => relative = false,
                            _ => return Err(err(ln, "units must be `relative` or `absolute`")),
                        },
                        _ => return Err(err(ln, &format!("unknown key `{key}`"))),
                    }
                }
            }
        }
        let (is_region, pts) = body.ok_or_else(|| err(0, "missing `region` or `points` section"))?;
        let zone = if is_region { DangerZone::region(Polygon::new(pts)?) } else { DangerZone::points(pts) };
        let mut zone = zone.with_c(c)?;
        zone.threshold = threshold;
        if let Some(b) = beta {
            PotentialModel::new(b, clamp.unwrap_or(DEFAULT_CLAMP), Vec::new())?;
        }
        Ok(ZoneFile { zone, beta, clamp, relative })
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("c = {}\n", self.zone.c);
        if let Some(b) = self.beta {
            out += &format!("beta = {b}\n");
        }
        if let Some(cl) = self.clamp {
            out += &format!("clamp = {cl}\n");
        }
        if let Some(t) = self.zone.threshold {
            out += &format!("threshold = {t}\n");
        }
        if self.relative {
            out += "units = relative\n";
        }
        let pts = match &self.zone.kind {
            ZoneKind::Region(p) => {
                out += "region\n";
                p.vertices()
            }
            ZoneKind::PointSet(p) => {
                out += "points\n";
                p.as_slice()
            }
        };
        for p in pts {
            out += &format!("{} {}\n", p.x, p.y);
        }
        out
    }
}
