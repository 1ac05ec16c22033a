//! Experiment orchestration: build a scenario, run its queries on the
//! skeleton and on the full graph, and report ratios and packet costs.

mod report;
mod scenario;

pub use report::{emit_census_csv, emit_csv, Aggregate, CENSUS_COLUMNS, CSV_COLUMNS};
pub use scenario::{Epsilon, MetricSet, QuerySet, Scenario, SkeletonKind, ZoneSpec};

use log::{debug, info, warn};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::danger::{path_exposure, DangerError, DangerZone, PotentialModel, ZoneFile, ZoneKind};
use crate::distsim::{
    extract_path, run_bfs_flood, run_min_exposure, run_potential_phase, PotentialPhase, SimError, SimOptions, SimRun, Subgraph,
};
use crate::field::{generate_field, nearest_node, CommGraph, FieldError, NodeId, Point};
use crate::nodeset::NodeSet;
use crate::skeleton::adaptive::{build_adaptive_skeleton, build_quadtree, detect_voronoi_nodes, embed_voronoi_streets, SnapPolicy};
use crate::skeleton::uniform::{
    attach_offstreet_endpoints, build_uniform_skeleton, default_width, excluded_nodes, shift_streets, UniformStreetConfig,
};
use crate::skeleton::{repair_gaps, Provenance, SkeletonError, SkeletonGraph};

/// Convex blob covering about 15% of the field, in relative units.
pub const SIMPLE_ZONE: &str = include_str!("../../fixtures/zones/simple.zone");
/// U-shaped zone, in relative units.
pub const COMPLEX_ZONE: &str = include_str!("../../fixtures/zones/complex.zone");

/// Allowed relative gap between the tuned uniform size and the adaptive size.
pub const SIZE_MATCH_TOLERANCE: f64 = 0.10;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("scenario line {line}: {reason}")]
    Config { line: usize, reason: String },
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Danger(#[from] DangerError),
    #[error(transparent)]
    Skeleton(#[from] SkeletonError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl HarnessError {
    /// 2 for invariant violations, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Invariant(_) | HarnessError::Sim(SimError::ParentCycle(_)) => 2,
            _ => 1,
        }
    }
}

/// Everything a scenario's queries run against.
#[derive(Debug, Clone)]
pub struct Instance {
    pub graph: CommGraph,
    pub zones: Vec<DangerZone>,
    /// Nodes inside a region zone.
    pub excluded: NodeSet,
    pub model: Option<PotentialModel>,
    /// Potentials computed on the full safe graph, shared by both searches.
    pub phase: Option<PotentialPhase>,
    pub skeleton: SkeletonGraph,
    pub tuned_epsilon: Option<f64>,
}

impl Instance {
    pub fn safe(&self) -> NodeSet {
        NodeSet::from_fn(self.graph.n(), |id| !self.excluded.contains(id))
    }

    pub fn potentials(&self) -> Option<&[f64]> {
        self.phase.as_ref().map(|p| p.potentials.as_slice())
    }
}

pub fn load_zones(spec: &ZoneSpec, n: usize, side: f64, danger_seed: u64) -> Result<Vec<DangerZone>, HarnessError> {
    let from_text = |text: &str| -> Result<DangerZone, HarnessError> { Ok(ZoneFile::parse(text)?.instantiate(side)) };
    let zone = match spec {
        ZoneSpec::None => return Ok(Vec::new()),
        ZoneSpec::Simple => from_text(SIMPLE_ZONE)?,
        ZoneSpec::Complex => from_text(COMPLEX_ZONE)?,
        ZoneSpec::File(path) => from_text(&std::fs::read_to_string(path)?)?,
        ZoneSpec::Points(k) => {
            let mut rng = ChaCha8Rng::seed_from_u64(danger_seed);
            let pts = (0..*k).map(|_| Point::new(rng.gen::<f64>() * side, rng.gen::<f64>() * side)).collect();
            DangerZone::points(pts)
        }
    };
    zone.check_entity_limit(n, 4.0)?;
    Ok(vec![zone])
}

fn danger_points(zones: &[DangerZone]) -> Vec<Point> {
    zones
        .iter()
        .filter_map(|z| match &z.kind {
            ZoneKind::PointSet(p) => Some(p.clone()),
            ZoneKind::Region(_) => None,
        })
        .flatten()
        .collect()
}

fn width_or_default(width: Option<f64>, r: f64) -> f64 {
    width.unwrap_or_else(|| default_width(r))
}

pub fn build_instance(s: &Scenario) -> Result<Instance, HarnessError> {
    let graph = CommGraph::build(generate_field(s.n, s.radio_range, s.seed)?);
    let side = graph.field().side();
    let zones = load_zones(&s.zone, s.n, side, s.danger_seed)?;
    let excluded = excluded_nodes(&graph, &zones);

    let points = danger_points(&zones);
    let needs_potentials = s.metrics.exposure
        || matches!(s.skeleton, SkeletonKind::Adaptive { voronoi: true, .. })
        || matches!(s.skeleton, SkeletonKind::Uniform { epsilon: Epsilon::Auto, .. });
    let (model, phase) = if needs_potentials && !points.is_empty() {
        let model = PotentialModel::new(s.beta, s.clamp, points.clone())?;
        let safe = NodeSet::from_fn(graph.n(), |id| !excluded.contains(id));
        let phase = run_potential_phase(Subgraph::new(&graph, &safe), &points, &model, SimOptions::default())?;
        (Some(model), Some(phase))
    } else {
        (None, None)
    };

    let r = s.radio_range;
    let mut tuned_epsilon = None;
    let skeleton = match s.skeleton {
        SkeletonKind::Full => SkeletonGraph::full(excluded.clone()),
        SkeletonKind::Adaptive { width, voronoi } => {
            adaptive_skeleton(&graph, &zones, width_or_default(width, r), voronoi.then_some(phase.as_ref()).flatten())?
        }
        SkeletonKind::Uniform { epsilon: Epsilon::Fixed(e), width, shift, prune } => {
            let cfg = UniformStreetConfig::new(s.n, e, width_or_default(width, r))?;
            build_uniform_skeleton(&graph, &zones, &shift_streets(&cfg, shift)?.with_prune(prune))?
        }
        SkeletonKind::Uniform { epsilon: Epsilon::Auto, width, shift, prune } => {
            let w = width_or_default(width, r);
            let voronoi = phase.as_ref().filter(|p| p.sources.len() >= 2);
            let mut adaptive = adaptive_skeleton(&graph, &zones, w, voronoi)?;
            if s.repair {
                adaptive = repair(&graph, adaptive, Provenance::QuadtreeEdge);
            }
            let (e, sk) = tune_uniform_epsilon(&graph, &zones, w, shift, prune, s.repair, adaptive.size())?;
            tuned_epsilon = Some(e);
            sk
        }
    };
    let skeleton = match s.skeleton {
        SkeletonKind::Uniform { epsilon: Epsilon::Auto, .. } => skeleton,
        SkeletonKind::Uniform { .. } if s.repair => repair(&graph, skeleton, Provenance::GridStreet),
        SkeletonKind::Adaptive { .. } if s.repair => repair(&graph, skeleton, Provenance::QuadtreeEdge),
        _ => skeleton,
    };
    debug!("scenario {}: skeleton {} of {} nodes", s.hash(), skeleton.size(), s.n);
    Ok(Instance { graph, zones, excluded, model, phase, skeleton, tuned_epsilon })
}

fn repair(graph: &CommGraph, skeleton: SkeletonGraph, why: Provenance) -> SkeletonGraph {
    let (out, woken) = repair_gaps(graph, &skeleton, why);
    debug!("gap repair woke {woken} nodes");
    out
}

fn adaptive_skeleton(
    graph: &CommGraph,
    zones: &[DangerZone],
    w: f64,
    voronoi: Option<&PotentialPhase>,
) -> Result<SkeletonGraph, HarnessError> {
    let tree = build_quadtree(zones, graph.field().side(), SnapPolicy::Outward)?;
    let skeleton = build_adaptive_skeleton(graph, zones, &tree, w);
    match voronoi {
        Some(phase) => {
            let v = detect_voronoi_nodes(&phase.sources, &phase.distances)?;
            if v.degenerate {
                warn!("two danger points share a host node; every node ties");
            }
            Ok(embed_voronoi_streets(&skeleton, &v.nodes))
        }
        None => Ok(skeleton),
    }
}

/// Bisects epsilon until the uniform skeleton (gap-repaired when `repair`
/// is set) is within [`TUNE_STOP`] of `target` nodes, or as close as 40
/// steps get. Returns the best
/// epsilon seen and its skeleton.
/// Relative size gap at which tuning stops early.
pub const TUNE_STOP: f64 = 0.02;

pub fn tune_uniform_epsilon(
    graph: &CommGraph,
    zones: &[DangerZone],
    width: f64,
    shift: f64,
    prune: bool,
    repair_gaps: bool,
    target: usize,
) -> Result<(f64, SkeletonGraph), HarnessError> {
    let n = graph.n();
    let build = |e: f64| -> Result<Option<SkeletonGraph>, HarnessError> {
        let cfg = match UniformStreetConfig::new(n, e, width) {
            Ok(c) => c,
            Err(SkeletonError::DegenerateSeparation { .. }) => return Ok(None),
            Err(err) => return Err(err.into()),
        };
        // a shift beyond the tuned separation wraps around
        let cfg = shift_streets(&cfg, shift % cfg.separation)?.with_prune(prune);
        let sk = build_uniform_skeleton(graph, zones, &cfg)?;
        Ok(Some(if repair_gaps { repair(graph, sk, Provenance::GridStreet) } else { sk }))
    };
    let (mut lo, mut hi) = (0.005, 0.495);
    let mut best: Option<(usize, f64, SkeletonGraph)> = None;
    for _ in 0..40 {
        let mid = 0.5 * (lo + hi);
        let Some(sk) = build(mid)? else {
            hi = mid;
            continue;
        };
        let size = sk.size();
        let gap = size.abs_diff(target);
        if best.as_ref().is_none_or(|(g, _, _)| gap < *g) {
            best = Some((gap, mid, sk));
        }
        if gap as f64 <= TUNE_STOP * target as f64 {
            break;
        }
        if size < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (gap, e, sk) = best.ok_or(SkeletonError::BadEpsilon(lo))?;
    if gap as f64 > SIZE_MATCH_TOLERANCE * target as f64 {
        warn!("uniform skeleton {} could not match adaptive size {target} within 10%", sk.size());
    }
    info!("tuned epsilon {e:.4}: uniform {} vs adaptive {target}", sk.size());
    Ok((e, sk))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QueryStatus {
    Ok,
    /// No path on the full graph; excluded from aggregates.
    Unreachable,
    /// The full graph connects the pair but the skeleton does not.
    SkeletonUnreachable,
    /// An endpoint could not reach any awake node.
    Unattached,
    /// An explicit endpoint lies inside a zone.
    InZone,
}

impl QueryStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            QueryStatus::Ok => "ok",
            QueryStatus::Unreachable => "unreachable",
            QueryStatus::SkeletonUnreachable => "skeleton_unreachable",
            QueryStatus::Unattached => "unattached",
            QueryStatus::InZone => "in_zone",
        }
    }
}

/// One query's measurements. Hop counts are the canonical path length;
/// hop-based potentials are the canonical exposure.
#[derive(Debug, Clone, PartialEq)]
pub struct QueryRecord {
    pub index: usize,
    pub src: Point,
    pub dst: Point,
    /// Skeleton nodes the endpoints were snapped to.
    pub src_node: Option<NodeId>,
    pub dst_node: Option<NodeId>,
    pub status: QueryStatus,
    pub len_sg: Option<u32>,
    pub len_opt: Option<u32>,
    pub geo_len_sg: Option<f64>,
    pub geo_len_opt: Option<f64>,
    pub exp_sg: Option<f64>,
    pub exp_opt: Option<f64>,
    pub geo_exp_sg: Option<f64>,
    pub geo_exp_opt: Option<f64>,
    pub packets_sg: u64,
    pub packets_opt: u64,
    pub packets_attach: u64,
}

impl QueryRecord {
    fn new(index: usize, src: Point, dst: Point) -> Self {
        QueryRecord {
            index,
            src,
            dst,
            src_node: None,
            dst_node: None,
            status: QueryStatus::Ok,
            len_sg: None,
            len_opt: None,
            geo_len_sg: None,
            geo_len_opt: None,
            exp_sg: None,
            exp_opt: None,
            geo_exp_sg: None,
            geo_exp_opt: None,
            packets_sg: 0,
            packets_opt: 0,
            packets_attach: 0,
        }
    }

    /// `len_sg / len_opt`; 1 when both endpoints snap to the same node.
    pub fn len_ratio(&self) -> Option<f64> {
        match (self.len_sg, self.len_opt) {
            (Some(_), Some(0)) => Some(1.0),
            (Some(sg), Some(opt)) => Some(sg as f64 / opt as f64),
            _ => None,
        }
    }

    pub fn exposure_ratio(&self) -> Option<f64> {
        match (self.exp_sg, self.exp_opt) {
            (Some(sg), Some(opt)) if opt > 0.0 => Some(sg / opt),
            (Some(_), Some(_)) => Some(1.0),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioRecord {
    pub hash: String,
    pub scenario: Scenario,
    pub n: usize,
    pub skeleton_size: usize,
    pub tuned_epsilon: Option<f64>,
    /// Packets of the potential floods, 0 without point dangers.
    pub potential_packets: u64,
    pub queries: Vec<QueryRecord>,
}

impl ScenarioRecord {
    pub fn fraction(&self) -> f64 {
        self.skeleton_size as f64 / self.n as f64
    }

    pub fn aggregate(&self) -> Aggregate {
        Aggregate::over(&self.queries)
    }
}

/// Endpoint pairs for the scenario. Random endpoints inside a zone are
/// redrawn.
pub fn query_points(s: &Scenario, side: f64, zones: &[DangerZone]) -> Vec<(Point, Point)> {
    match &s.queries {
        QuerySet::Pairs(p) => p.clone(),
        QuerySet::Random { count, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let mut draw = || loop {
                let p = Point::new(rng.gen::<f64>() * side, rng.gen::<f64>() * side);
                if zones.iter().any(|z| z.is_unsafe(p)) {
                    debug!("query endpoint ({:.3}, {:.3}) inside a zone; redrawn", p.x, p.y);
                    continue;
                }
                break p;
            };
            (0..*count).map(|_| (draw(), draw())).collect()
        }
    }
}

pub fn run_scenario(s: &Scenario) -> Result<ScenarioRecord, HarnessError> {
    let inst = build_instance(s)?;
    let side = inst.graph.field().side();
    let pairs = query_points(s, side, &inst.zones);
    let queries = pairs
        .iter()
        .enumerate()
        .map(|(i, &(a, b))| run_query(s, &inst, i, a, b))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ScenarioRecord {
        hash: s.hash(),
        scenario: s.clone(),
        n: s.n,
        skeleton_size: inst.skeleton.size(),
        tuned_epsilon: inst.tuned_epsilon,
        potential_packets: inst.phase.as_ref().map_or(0, |p| p.run.total_packets),
        queries,
    })
}

/// Independent scenarios in parallel; results keep the input order.
pub fn run_scenarios(scenarios: &[Scenario]) -> Vec<Result<ScenarioRecord, HarnessError>> {
    scenarios.par_iter().map(run_scenario).collect()
}

/// Awake entry nodes for a query, plus the attachment cost.
fn snap(inst: &Instance, a: Point, b: Point) -> Result<Option<(NodeId, NodeId, u64)>, HarnessError> {
    let field = inst.graph.field();
    let safe = |id: NodeId| !inst.excluded.contains(id);
    let src = nearest_node(field, a, safe)?;
    let dst = nearest_node(field, b, safe)?;
    let att = attach_offstreet_endpoints(&inst.graph, &inst.skeleton, src, dst);
    Ok(match (att.src_entry, att.dst_entry) {
        (Some(s), Some(d)) => Some((s, d, att.packets)),
        _ => None,
    })
}

fn run_query(s: &Scenario, inst: &Instance, index: usize, a: Point, b: Point) -> Result<QueryRecord, HarnessError> {
    let mut q = QueryRecord::new(index, a, b);
    if inst.zones.iter().any(|z| z.is_unsafe(a) || z.is_unsafe(b)) {
        q.status = QueryStatus::InZone;
        return Ok(q);
    }
    let Some((src, dst, attach)) = snap(inst, a, b)? else {
        q.status = QueryStatus::Unattached;
        return Ok(q);
    };
    q.src_node = Some(src);
    q.dst_node = Some(dst);
    q.packets_attach = attach;

    let graph = &inst.graph;
    let safe = inst.safe();
    let full = Subgraph::new(graph, &safe);
    let sk = Subgraph::new(graph, inst.skeleton.awake());
    let opts = SimOptions::default();
    let mut reach = (true, true);

    if s.metrics.path {
        let sg_run = run_bfs_flood(sk, src, opts)?;
        let opt_run = run_bfs_flood(full, src, opts)?;
        let sg = extract_path(&sg_run, graph, dst, None)?;
        let opt = extract_path(&opt_run, graph, dst, None)?;
        q.packets_sg += sg_run.total_packets;
        q.packets_opt += opt_run.total_packets;
        reach = (sg.reachable, opt.reachable);
        if sg.reachable && opt.reachable {
            if opt.hops > sg.hops {
                return Err(HarnessError::Invariant(format!(
                    "query {index}: full-graph path {} hops longer than skeleton path {}",
                    opt.hops, sg.hops
                )));
            }
            q.len_sg = Some(sg.hops);
            q.len_opt = Some(opt.hops);
            q.geo_len_sg = Some(sg.geometric_length);
            q.geo_len_opt = Some(opt.geometric_length);
        }
    }

    if s.metrics.exposure {
        let (Some(model), Some(pot)) = (inst.model.as_ref(), inst.potentials()) else {
            return Err(HarnessError::Config { line: 0, reason: "exposure metrics need point dangers".into() });
        };
        let sg_run = run_min_exposure(sk, src, pot, opts)?;
        let opt_run = run_min_exposure(full, src, pot, opts)?;
        let sg = extract_path(&sg_run, graph, dst, Some(pot))?;
        let opt = extract_path(&opt_run, graph, dst, Some(pot))?;
        q.packets_sg += sg_run.total_packets;
        q.packets_opt += opt_run.total_packets;
        reach = (sg.reachable, opt.reachable);
        if sg.reachable && opt.reachable {
            if opt.exposure > sg.exposure * (1.0 + 1e-9) {
                return Err(HarnessError::Invariant(format!(
                    "query {index}: full-graph exposure {} above skeleton exposure {}",
                    opt.exposure, sg.exposure
                )));
            }
            let geo = |p: &[NodeId]| path_exposure(model, &p.iter().map(|&id| graph.position(id)).collect::<Vec<_>>()).value();
            q.exp_sg = Some(sg.exposure);
            q.exp_opt = Some(opt.exposure);
            q.geo_exp_sg = Some(geo(&sg.nodes));
            q.geo_exp_opt = Some(geo(&opt.nodes));
        }
    }

    q.status = match reach {
        (_, false) => QueryStatus::Unreachable,
        (false, true) => QueryStatus::SkeletonUnreachable,
        (true, true) => QueryStatus::Ok,
    };
    Ok(q)
}

/// Search run of one query on the skeleton with tracing on: min-exposure
/// when the scenario measures exposure, hop flooding otherwise.
pub fn trace_query(s: &Scenario, index: usize) -> Result<SimRun, HarnessError> {
    let inst = build_instance(s)?;
    let pairs = query_points(s, inst.graph.field().side(), &inst.zones);
    let &(a, b) = pairs
        .get(index)
        .ok_or_else(|| HarnessError::Config { line: 0, reason: format!("query {index} out of range ({} queries)", pairs.len()) })?;
    let (src, _, _) = snap(&inst, a, b)?
        .ok_or_else(|| HarnessError::Config { line: 0, reason: format!("query {index} cannot reach the skeleton") })?;
    let sub = Subgraph::new(&inst.graph, inst.skeleton.awake());
    let opts = SimOptions { trace: true, ..Default::default() };
    Ok(match inst.potentials() {
        Some(pot) if s.metrics.exposure => run_min_exposure(sub, src, pot, opts)?,
        _ => run_bfs_flood(sub, src, opts)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CensusRow {
    pub seed: u64,
    pub size: usize,
    pub fraction: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SizeTable {
    pub rows: Vec<CensusRow>,
    pub mean: f64,
    pub stddev: f64,
}

impl SizeTable {
    pub fn mean_fraction(&self, n: usize) -> f64 {
        self.mean / n as f64
    }
}

/// Skeleton sizes over `seeds` consecutive field seeds starting at the
/// scenario's. Danger placement advances with the field seed.
pub fn size_census(s: &Scenario, seeds: usize) -> Result<SizeTable, HarnessError> {
    let rows = (0..seeds as u64)
        .into_par_iter()
        .map(|i| {
            let si = Scenario { seed: s.seed + i, danger_seed: s.danger_seed + i, ..s.clone() };
            let inst = build_instance(&si)?;
            Ok(CensusRow { seed: si.seed, size: inst.skeleton.size(), fraction: inst.skeleton.size() as f64 / s.n as f64 })
        })
        .collect::<Result<Vec<_>, HarnessError>>()?;
    let k = rows.len().max(1) as f64;
    let mean = rows.iter().map(|r| r.size as f64).sum::<f64>() / k;
    let var = rows.iter().map(|r| (r.size as f64 - mean).powi(2)).sum::<f64>() / (k - 1.0).max(1.0);
    Ok(SizeTable { rows, mean, stddev: var.sqrt() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scenario(text: &str) -> Scenario {
        Scenario::parse(text).unwrap()
    }

    #[test]
    fn full_skeleton_ratios_are_one() {
        let s = scenario("n = 256\nr = 3\nzone = simple\nskeleton = full\nqueries = 10\n");
        let rec = run_scenario(&s).unwrap();
        for q in &rec.queries {
            if q.status == QueryStatus::Ok {
                assert_eq!(q.len_ratio(), Some(1.0));
            }
        }
        assert!(rec.fraction() > 0.0 && rec.fraction() <= 1.0);
    }

    #[test]
    fn full_exposure_ratios_are_one() {
        let s = scenario("n = 256\nzone = points 3\nmetrics = path,exposure\nqueries = 5\n");
        let rec = run_scenario(&s).unwrap();
        assert!(rec.potential_packets > 0);
        for q in rec.queries.iter().filter(|q| q.status == QueryStatus::Ok) {
            assert_eq!(q.exposure_ratio(), Some(1.0));
        }
    }

    #[test]
    fn random_endpoints_avoid_zones() {
        let s = scenario("n = 1024\nzone = complex\nqueries = 50\n");
        let inst = build_instance(&s).unwrap();
        for (a, b) in query_points(&s, 32.0, &inst.zones) {
            assert!(!inst.zones[0].is_unsafe(a) && !inst.zones[0].is_unsafe(b));
        }
    }

    #[test]
    fn explicit_pair_inside_zone_is_flagged() {
        let s = scenario("n = 1024\nzone = simple\npair = 16 15 1 1\n");
        let rec = run_scenario(&s).unwrap();
        assert_eq!(rec.queries[0].status, QueryStatus::InZone);
        assert_eq!(rec.aggregate().excluded, 1);
    }

    #[test]
    fn auto_epsilon_matches_adaptive() {
        let s = scenario("n = 1024\nzone = points 3\nskeleton = uniform\nepsilon = auto\nmetrics = exposure\n");
        let inst = build_instance(&s).unwrap();
        assert!(inst.tuned_epsilon.is_some());
        let adaptive = build_instance(&Scenario {
            skeleton: SkeletonKind::Adaptive { width: None, voronoi: true },
            ..s.clone()
        })
        .unwrap();
        let (u, a) = (inst.skeleton.size() as f64, adaptive.skeleton.size() as f64);
        assert!((u - a).abs() <= 0.25 * a, "uniform {u} vs adaptive {a}");
    }

    #[test]
    fn census_is_seed_indexed() {
        let s = scenario("n = 256\nzone = simple\nskeleton = adaptive\n");
        let t = size_census(&s, 3).unwrap();
        assert_eq!(t.rows.iter().map(|r| r.seed).collect::<Vec<_>>(), vec![1, 2, 3]);
        let one = size_census(&Scenario { seed: 2, danger_seed: 2, ..s }, 1).unwrap();
        assert_eq!(one.rows[0].size, t.rows[1].size);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(HarnessError::Invariant("x".into()).exit_code(), 2);
        assert_eq!(HarnessError::Config { line: 1, reason: "x".into() }.exit_code(), 1);
    }
}
