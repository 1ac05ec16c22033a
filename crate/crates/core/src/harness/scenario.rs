//! Scenario files: a flat `key = value` format.
//!
//! ```text
//! # 200 random pairs around the simple zone
//! n = 4096
//! r = 3
//! seed = 1
//! zone = simple           # none | simple | complex | points <k> | file <path>
//! danger_seed = 1         # placement of point dangers
//! skeleton = uniform      # full | uniform | adaptive
//! epsilon = 0.05          # or `auto`: match the adaptive skeleton's size
//! width = 1               # default max(1, 2 / r)
//! shift = 0
//! prune = false
//! voronoi = false
//! repair = true          # bridge broken streets through the safe graph
//! queries = 200
//! query_seed = 11
//! pair = 1.5 2.5 60 61    # explicit pairs replace random ones
//! metrics = path          # path | exposure | path,exposure
//! beta = 2
//! clamp = 1
//! ```

use std::fmt::Write as _;
use std::path::PathBuf;

use sha2::{Digest, Sha256};

use super::HarnessError;
use crate::danger::{DEFAULT_BETA, DEFAULT_CLAMP};
use crate::field::Point;

#[derive(Debug, Clone, PartialEq)]
pub enum ZoneSpec {
    None,
    Simple,
    Complex,
    /// `k` point dangers placed uniformly at random.
    Points(usize),
    File(PathBuf),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Epsilon {
    Fixed(f64),
    /// Tuned until the uniform skeleton is within 10% of the adaptive one.
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SkeletonKind {
    Full,
    Uniform { epsilon: Epsilon, width: Option<f64>, shift: f64, prune: bool },
    Adaptive { width: Option<f64>, voronoi: bool },
}

#[derive(Debug, Clone, PartialEq)]
pub enum QuerySet {
    Pairs(Vec<(Point, Point)>),
    Random { count: usize, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MetricSet {
    pub path: bool,
    pub exposure: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub n: usize,
    pub radio_range: f64,
    pub seed: u64,
    pub zone: ZoneSpec,
    pub danger_seed: u64,
    pub skeleton: SkeletonKind,
    /// Reconnect skeleton fragments after construction.
    pub repair: bool,
    pub queries: QuerySet,
    pub metrics: MetricSet,
    pub beta: f64,
    pub clamp: f64,
}

impl Default for Scenario {
    fn default() -> Self {
        Scenario {
            n: 1024,
            radio_range: 3.0,
            seed: 1,
            zone: ZoneSpec::None,
            danger_seed: 1,
            skeleton: SkeletonKind::Full,
            repair: true,
            queries: QuerySet::Random { count: 0, seed: 1 },
            metrics: MetricSet { path: true, exposure: false },
            beta: DEFAULT_BETA,
            clamp: DEFAULT_CLAMP,
        }
    }
}

fn parse_bool(s: &str) -> Option<bool> {
    match s {
        "true" | "yes" | "1" | "on" => Some(true),
        "false" | "no" | "0" | "off" => Some(false),
        _ => None,
    }
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Scenario, HarnessError> {
        let mut s = Scenario::default();
        let mut kind = "full".to_string();
        let mut epsilon = Epsilon::Fixed(0.05);
        let mut width = None;
        let mut shift = 0.0;
        let mut prune = false;
        let mut voronoi = false;
        let mut count = 0usize;
        let mut query_seed = None;
        let mut danger_seed = None;
        let mut pairs = Vec::new();

        for (ln, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let bad = |reason: String| HarnessError::Config { line: ln + 1, reason };
            let (key, value) = line.split_once('=').ok_or_else(|| bad("expected `key = value`".into()))?;
            let (key, value) = (key.trim(), value.trim());
            let float = || value.parse::<f64>().map_err(|_| bad(format!("`{key}` needs a number, got `{value}`")));
            let int = || value.parse::<u64>().map_err(|_| bad(format!("`{key}` needs an integer, got `{value}`")));
            let flag = || parse_bool(value).ok_or_else(|| bad(format!("`{key}` needs true or false, got `{value}`")));
            match key {
                "n" => s.n = int()? as usize,
                "r" => s.radio_range = float()?,
                "seed" => s.seed = int()?,
                "zone" => {
                    let mut parts = value.split_whitespace();
                    s.zone = match (parts.next(), parts.next()) {
                        (Some("none"), None) => ZoneSpec::None,
                        (Some("simple"), None) => ZoneSpec::Simple,
                        (Some("complex"), None) => ZoneSpec::Complex,
                        (Some("points"), Some(k)) => {
                            ZoneSpec::Points(k.parse().map_err(|_| bad(format!("bad point count `{k}`")))?)
                        }
                        (Some("file"), Some(p)) => ZoneSpec::File(PathBuf::from(p)),
                        _ => return Err(bad(format!("unknown zone `{value}`"))),
                    };
                }
                "danger_seed" => danger_seed = Some(int()?),
                "skeleton" => match value {
                    "full" | "uniform" | "adaptive" => kind = value.to_string(),
                    _ => return Err(bad(format!("unknown skeleton `{value}`"))),
                },
                "epsilon" => epsilon = if value == "auto" { Epsilon::Auto } else { Epsilon::Fixed(float()?) },
                "width" => width = Some(float()?),
                "shift" => shift = float()?,
                "prune" => prune = flag()?,
                "voronoi" => voronoi = flag()?,
                "repair" => s.repair = flag()?,
                "queries" => count = int()? as usize,
                "query_seed" => query_seed = Some(int()?),
                "pair" => {
                    let v: Vec<f64> = value
                        .split_whitespace()
                        .map(|t| t.parse::<f64>())
                        .collect::<Result<_, _>>()
                        .map_err(|_| bad("pair needs four numbers".into()))?;
                    if v.len() != 4 {
                        return Err(bad("pair needs four numbers".into()));
                    }
                    pairs.push((Point::new(v[0], v[1]), Point::new(v[2], v[3])));
                }
                "metrics" => {
                    let mut m = MetricSet { path: false, exposure: false };
                    for part in value.split(',').map(str::trim) {
                        match part {
                            "path" => m.path = true,
                            "exposure" => m.exposure = true,
                            _ => return Err(bad(format!("unknown metric `{part}`"))),
                        }
                    }
                    s.metrics = m;
                }
                "beta" => s.beta = float()?,
                "clamp" => s.clamp = float()?,
                _ => return Err(bad(format!("unknown key `{key}`"))),
            }
        }
        s.danger_seed = danger_seed.unwrap_or(s.seed);
        s.skeleton = match kind.as_str() {
            "uniform" => SkeletonKind::Uniform { epsilon, width, shift, prune },
            "adaptive" => SkeletonKind::Adaptive { width, voronoi },
            _ => SkeletonKind::Full,
        };
        s.queries = if pairs.is_empty() {
            QuerySet::Random { count, seed: query_seed.unwrap_or(s.seed) }
        } else {
            QuerySet::Pairs(pairs)
        };
        if s.metrics.exposure && !matches!(s.zone, ZoneSpec::Points(_)) {
            return Err(HarnessError::Config { line: 0, reason: "exposure metrics need `zone = points <k>`".into() });
        }
        Ok(s)
    }

    /// Every field spelled out in a fixed order; parses back to `self`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "n = {}", self.n);
        let _ = writeln!(out, "r = {}", self.radio_range);
        let _ = writeln!(out, "seed = {}", self.seed);
        let zone = match &self.zone {
            ZoneSpec::None => "none".to_string(),
            ZoneSpec::Simple => "simple".to_string(),
            ZoneSpec::Complex => "complex".to_string(),
            ZoneSpec::Points(k) => format!("points {k}"),
            ZoneSpec::File(p) => format!("file {}", p.display()),
        };
        let _ = writeln!(out, "zone = {zone}");
        let _ = writeln!(out, "danger_seed = {}", self.danger_seed);
        match self.skeleton {
            SkeletonKind::Full => out.push_str("skeleton = full\n"),
            SkeletonKind::Uniform { epsilon, width, shift, prune } => {
                out.push_str("skeleton = uniform\n");
                match epsilon {
                    Epsilon::Fixed(e) => {
                        let _ = writeln!(out, "epsilon = {e}");
                    }
                    Epsilon::Auto => out.push_str("epsilon = auto\n"),
                }
                if let Some(w) = width {
                    let _ = writeln!(out, "width = {w}");
                }
                let _ = writeln!(out, "shift = {shift}");
                let _ = writeln!(out, "prune = {prune}");
            }
            SkeletonKind::Adaptive { width, voronoi } => {
                out.push_str("skeleton = adaptive\n");
                if let Some(w) = width {
                    let _ = writeln!(out, "width = {w}");
                }
                let _ = writeln!(out, "voronoi = {voronoi}");
            }
        }
        let _ = writeln!(out, "repair = {}", self.repair);
        match &self.queries {
            QuerySet::Random { count, seed } => {
                let _ = writeln!(out, "queries = {count}");
                let _ = writeln!(out, "query_seed = {seed}");
            }
            QuerySet::Pairs(pairs) => {
                for (a, b) in pairs {
                    let _ = writeln!(out, "pair = {} {} {} {}", a.x, a.y, b.x, b.y);
                }
            }
        }
        let metrics = match (self.metrics.path, self.metrics.exposure) {
            (true, true) => "path,exposure",
            (false, true) => "exposure",
            _ => "path",
        };
        let _ = writeln!(out, "metrics = {metrics}");
        let _ = writeln!(out, "beta = {}", self.beta);
        let _ = writeln!(out, "clamp = {}", self.clamp);
        out
    }

    /// First 16 hex digits of the SHA-256 of [`Scenario::to_text`].
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.to_text().as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}
