use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use spectra1d::one_body::TrapSpec;
use spectra1d::weak_coupling::Statistics;

use crate::Failure;

pub const DEFAULT_SEED: u64 = 2024;
pub const DEFAULT_GRID_POINTS: usize = 4096;
pub const MAX_PARTICLES: usize = 8;

/// Contents of a `--config` file. Every field is optional; flags win.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub trap: Option<TrapChoice>,
    pub grid_points: Option<usize>,
    pub levels: Option<usize>,
    #[serde(alias = "N")]
    pub n: Option<usize>,
    #[serde(alias = "J")]
    pub components: Option<usize>,
    pub statistics: Option<Statistics>,
    pub g: Option<Couplings>,
    pub e_cut: Option<f64>,
    pub index_sum: Option<usize>,
    pub cutoff: Option<usize>,
    pub t: Option<Vec<f64>>,
    pub k: Option<usize>,
    pub samples: Option<usize>,
    pub merge: Option<bool>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
}

/// A trap by name (`harmonic`, `well`, `quartic`) or a full trap object.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TrapChoice {
    Named(String),
    Spec(TrapSpec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Couplings {
    One(f64),
    Many(Vec<f64>),
}

impl Couplings {
    pub fn into_vec(self) -> Vec<f64> {
        match self {
            Couplings::One(g) => vec![g],
            Couplings::Many(g) => g,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<RunConfig, Failure> {
        let Some(path) = path else {
            return Ok(RunConfig::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Usage(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("bad config {}: {e}", path.display())))
    }
}

impl TrapChoice {
    pub fn resolve(&self, grid_points: usize) -> Result<TrapSpec, Failure> {
        match self {
            TrapChoice::Spec(spec) => Ok(spec.clone()),
            TrapChoice::Named(name) => match name.as_str() {
                "harmonic" => Ok(TrapSpec::Harmonic),
                "well" | "infinite_well" => Ok(TrapSpec::InfiniteWell),
                "quartic" => Ok(TrapSpec::grid_from_fn(-4.5, 4.5, grid_points, |x| x.powi(4))),
                other => Err(Failure::Usage(format!(
                    "unknown trap `{other}` (expected harmonic, well or quartic)"
                ))),
            },
        }
    }

    /// Whether the grid size matters for this choice.
    pub fn uses_grid_points(&self) -> bool {
        matches!(self, TrapChoice::Named(n) if n == "quartic")
    }
}

pub fn check_particles(n: usize) -> Result<usize, Failure> {
    if !(1..=MAX_PARTICLES).contains(&n) {
        return Err(Failure::Usage(format!("particle number {n} outside 1..={MAX_PARTICLES}")));
    }
    Ok(n)
}

pub fn check_components(j: usize) -> Result<usize, Failure> {
    if j == 0 {
        return Err(Failure::Usage("component count must be at least 1".into()));
    }
    Ok(j)
}

pub fn check_e_cut(e_cut: f64) -> Result<f64, Failure> {
    if !(e_cut.is_finite() && e_cut > 0.0) {
        return Err(Failure::Usage(format!("e_cut must be positive, got {e_cut}")));
    }
    Ok(e_cut)
}

/// Worker count: flag, then config, then `SPECTRA1D_THREADS`, which also
/// caps the result.
pub fn worker_count(flag: Option<usize>, config: Option<usize>) -> Result<Option<usize>, Failure> {
    let cap = match std::env::var("SPECTRA1D_THREADS") {
        Ok(v) => Some(
            v.trim()
                .parse::<usize>()
                .ok()
                .filter(|&n| n > 0)
                .ok_or_else(|| Failure::Usage(format!("SPECTRA1D_THREADS must be a positive integer, got `{v}`")))?,
        ),
        Err(_) => None,
    };
    let requested = flag.or(config);
    if requested == Some(0) {
        return Err(Failure::Usage("thread count must be positive".into()));
    }
    Ok(match (requested, cap) {
        (Some(r), Some(c)) => Some(r.min(c)),
        (r, c) => r.or(c),
    })
}
