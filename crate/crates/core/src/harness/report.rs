//! Aggregates and CSV output.

use std::io::Write;

use super::{HarnessError, Epsilon, QueryRecord, QueryStatus, ScenarioRecord, SizeTable, SkeletonKind};

/// Column order of [`emit_csv`].
pub const CSV_COLUMNS: [&str; 30] = [
    "scenario_hash",
    "row",
    "query",
    "status",
    "src_x",
    "src_y",
    "dst_x",
    "dst_y",
    "src_node",
    "dst_node",
    "skeleton_size",
    "skeleton_fraction",
    "epsilon",
    "len_sg",
    "len_opt",
    "len_ratio",
    "len_ratio_max",
    "geo_len_sg",
    "geo_len_opt",
    "exp_sg",
    "exp_opt",
    "exp_ratio",
    "exp_ratio_max",
    "geo_exp_sg",
    "geo_exp_opt",
    "packets_sg",
    "packets_opt",
    "packets_attach",
    "packets_potential",
    "excluded_rows",
];

/// Column order of [`emit_census_csv`].
pub const CENSUS_COLUMNS: [&str; 4] = ["row", "seed", "size", "fraction"];

/// Means over the rows with status `ok`; everything else is counted in
/// `excluded`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Aggregate {
    pub included: usize,
    pub excluded: usize,
    pub mean_len_sg: Option<f64>,
    pub mean_len_opt: Option<f64>,
    pub mean_len_ratio: Option<f64>,
    pub max_len_ratio: Option<f64>,
    pub mean_geo_len_sg: Option<f64>,
    pub mean_geo_len_opt: Option<f64>,
    pub mean_exp_sg: Option<f64>,
    pub mean_exp_opt: Option<f64>,
    pub mean_exp_ratio: Option<f64>,
    pub max_exp_ratio: Option<f64>,
    pub mean_geo_exp_sg: Option<f64>,
    pub mean_geo_exp_opt: Option<f64>,
    pub mean_packets_sg: Option<f64>,
    pub mean_packets_opt: Option<f64>,
    pub mean_packets_attach: Option<f64>,
}

fn mean(values: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    let v: Vec<f64> = values.flatten().collect();
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

fn max(values: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    values.flatten().reduce(f64::max)
}

impl Aggregate {
    pub fn over(queries: &[QueryRecord]) -> Aggregate {
        let ok: Vec<&QueryRecord> = queries.iter().filter(|q| q.status == QueryStatus::Ok).collect();
        let it = || ok.iter().copied();
        Aggregate {
            included: ok.len(),
            excluded: queries.len() - ok.len(),
            mean_len_sg: mean(it().map(|q| q.len_sg.map(f64::from))),
            mean_len_opt: mean(it().map(|q| q.len_opt.map(f64::from))),
            mean_len_ratio: mean(it().map(QueryRecord::len_ratio)),
            max_len_ratio: max(it().map(QueryRecord::len_ratio)),
            mean_geo_len_sg: mean(it().map(|q| q.geo_len_sg)),
            mean_geo_len_opt: mean(it().map(|q| q.geo_len_opt)),
            mean_exp_sg: mean(it().map(|q| q.exp_sg)),
            mean_exp_opt: mean(it().map(|q| q.exp_opt)),
            mean_exp_ratio: mean(it().map(QueryRecord::exposure_ratio)),
            max_exp_ratio: max(it().map(QueryRecord::exposure_ratio)),
            mean_geo_exp_sg: mean(it().map(|q| q.geo_exp_sg)),
            mean_geo_exp_opt: mean(it().map(|q| q.geo_exp_opt)),
            mean_packets_sg: mean(it().map(|q| Some(q.packets_sg as f64))),
            mean_packets_opt: mean(it().map(|q| Some(q.packets_opt as f64))),
            mean_packets_attach: mean(it().map(|q| Some(q.packets_attach as f64))),
        }
    }
}

fn f(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.6}")).unwrap_or_default()
}

fn u<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn epsilon_of(rec: &ScenarioRecord) -> Option<f64> {
    match rec.scenario.skeleton {
        SkeletonKind::Uniform { epsilon: Epsilon::Fixed(e), .. } => Some(e),
        SkeletonKind::Uniform { epsilon: Epsilon::Auto, .. } => rec.tuned_epsilon,
        _ => None,
    }
}

/// One row per query, then one aggregate row per scenario. Floats carry six
/// decimals; missing values are empty.
pub fn emit_csv<W: Write>(records: &[ScenarioRecord], out: W) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_COLUMNS)?;
    for rec in records {
        let size = rec.skeleton_size.to_string();
        let frac = format!("{:.6}", rec.fraction());
        let eps = f(epsilon_of(rec));
        for q in &rec.queries {
            w.write_record([
                rec.hash.clone(),
                "query".into(),
                q.index.to_string(),
                q.status.as_str().into(),
                format!("{:.6}", q.src.x),
                format!("{:.6}", q.src.y),
                format!("{:.6}", q.dst.x),
                format!("{:.6}", q.dst.y),
                u(q.src_node),
                u(q.dst_node),
                size.clone(),
                frac.clone(),
                eps.clone(),
                u(q.len_sg),
                u(q.len_opt),
                f(q.len_ratio()),
                String::new(),
                f(q.geo_len_sg),
                f(q.geo_len_opt),
                f(q.exp_sg),
                f(q.exp_opt),
                f(q.exposure_ratio()),
                String::new(),
                f(q.geo_exp_sg),
                f(q.geo_exp_opt),
                q.packets_sg.to_string(),
                q.packets_opt.to_string(),
                q.packets_attach.to_string(),
                String::new(),
                String::new(),
            ])?;
        }
        let a = rec.aggregate();
        w.write_record([
            rec.hash.clone(),
            "aggregate".into(),
            a.included.to_string(),
            "ok".into(),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
            size,
            frac,
            eps,
            f(a.mean_len_sg),
            f(a.mean_len_opt),
            f(a.mean_len_ratio),
            f(a.max_len_ratio),
            f(a.mean_geo_len_sg),
            f(a.mean_geo_len_opt),
            f(a.mean_exp_sg),
            f(a.mean_exp_opt),
            f(a.mean_exp_ratio),
            f(a.max_exp_ratio),
            f(a.mean_geo_exp_sg),
            f(a.mean_geo_exp_opt),
            f(a.mean_packets_sg),
            f(a.mean_packets_opt),
            f(a.mean_packets_attach),
            rec.potential_packets.to_string(),
            a.excluded.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Per-seed rows followed by `mean` and `stddev` rows.
pub fn emit_census_csv<W: Write>(table: &SizeTable, n: usize, out: W) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CENSUS_COLUMNS)?;
    for r in &table.rows {
        w.write_record(["seed".into(), r.seed.to_string(), r.size.to_string(), format!("{:.6}", r.fraction)])?;
    }
    w.write_record(["mean".into(), String::new(), format!("{:.3}", table.mean), format!("{:.6}", table.mean_fraction(n))])?;
    w.write_record(["stddev".into(), String::new(), format!("{:.3}", table.stddev), String::new()])?;
    w.flush()?;
    Ok(())
}
