//! Experiment configuration (JSON) and the assembled working set derived
//! from it.

use crate::descent::LineSearchParams;
use crate::error::{Error, Result};
use crate::extremal::SolveOptions;
use crate::field::ScalarField;
use crate::geometry::{build_domain, distance_field, Domain, DomainShape};
use crate::kernel::KernelTable;
use crate::limit::LimitOptions;
use crate::weight::{normalize_weight, Weight};
use crate::xi::{build_xi, XiConstruction};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub domain: DomainConfig,
    #[serde(default)]
    pub weight: WeightConfig,
    pub s: f64,
    #[serde(default = "default_p_list")]
    pub p_list: Vec<f64>,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub limit: LimitConfig,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_true")]
    pub deterministic: bool,
    #[serde(default = "default_n_random")]
    pub n_random_audit: usize,
    #[serde(default)]
    pub output_dir: Option<String>,
}

fn default_p_list() -> Vec<f64> {
    vec![4.0, 8.0, 16.0, 32.0, 64.0, 128.0]
}
fn default_seed() -> u64 {
    42
}
fn default_true() -> bool {
    true
}
fn default_n_random() -> usize {
    200
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainConfig {
    pub shape: ShapeConfig,
    pub n_per_axis: usize,
    /// defaults to one domain diameter
    #[serde(default)]
    pub collar_width: Option<f64>,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShapeConfig {
    Interval { a: f64, b: f64 },
    Rectangle { x0: f64, x1: f64, y0: f64, y1: f64 },
}

#[derive(Clone, Debug, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum WeightConfig {
    #[default]
    Uniform,
    /// omega proportional to delta^alpha
    Power { alpha: f64 },
    Gaussian { center: Vec<f64>, width: f64 },
    Values { values: Vec<f64> },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    #[serde(default)]
    pub init: InitConfig,
    #[serde(default)]
    pub grad_tol: Option<f64>,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default = "default_ls_c1")]
    pub ls_c1: f64,
    #[serde(default = "default_ls_shrink")]
    pub ls_shrink: f64,
}

fn default_max_iter() -> usize {
    50_000
}
fn default_ls_c1() -> f64 {
    1e-4
}
fn default_ls_shrink() -> f64 {
    0.5
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            init: InitConfig::default(),
            grad_tol: None,
            max_iter: default_max_iter(),
            ls_c1: default_ls_c1(),
            ls_shrink: default_ls_shrink(),
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, Default, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum InitConfig {
    #[default]
    Xi,
    DeltaS,
    /// reuse the previous solution across a sweep (first solve falls back
    /// to xi)
    Warm,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LimitConfig {
    #[serde(default = "default_q_ladder")]
    pub q_ladder: Vec<f64>,
    #[serde(default)]
    pub init: LimitInitConfig,
    #[serde(default = "default_limit_grad_tol")]
    pub grad_tol: f64,
    #[serde(default = "default_limit_max_iter")]
    pub max_iter_per_stage: usize,
}

fn default_q_ladder() -> Vec<f64> {
    vec![16.0, 32.0, 64.0, 128.0, 256.0]
}
fn default_limit_grad_tol() -> f64 {
    1e-9
}
fn default_limit_max_iter() -> usize {
    30_000
}

impl Default for LimitConfig {
    fn default() -> Self {
        Self {
            q_ladder: default_q_ladder(),
            init: LimitInitConfig::default(),
            grad_tol: default_limit_grad_tol(),
            max_iter_per_stage: default_limit_max_iter(),
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, Default, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum LimitInitConfig {
    /// seed with the last extremal of the sweep
    #[default]
    UPFinal,
    Xi,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::Config(format!("cannot read config {}: {e}", path.display()))
        })?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.s > 0.0 && self.s < 1.0) {
            return Err(Error::Config(format!("s must lie in (0,1), got {}", self.s)));
        }
        if self.p_list.is_empty() {
            return Err(Error::Config("p_list must not be empty".into()));
        }
        for p in &self.p_list {
            if !(*p > 1.0) {
                return Err(Error::Config(format!("p values must exceed 1, got {p}")));
            }
        }
        for pair in self.p_list.windows(2) {
            if pair[1] <= pair[0] {
                return Err(Error::Config("p_list must be strictly increasing".into()));
            }
        }
        if self.limit.q_ladder.is_empty() {
            return Err(Error::Config("q_ladder must not be empty".into()));
        }
        Ok(())
    }

    pub fn solve_options(&self) -> SolveOptions {
        SolveOptions {
            grad_tol: self.solver.grad_tol,
            max_iter: self.solver.max_iter,
            ls: LineSearchParams {
                c1: self.solver.ls_c1,
                shrink: self.solver.ls_shrink,
                ..LineSearchParams::default()
            },
        }
    }

    pub fn limit_options(&self) -> LimitOptions {
        LimitOptions {
            q_ladder: self.limit.q_ladder.clone(),
            grad_tol: self.limit.grad_tol,
            max_iter_per_stage: self.limit.max_iter_per_stage,
            ls: LineSearchParams::default(),
        }
    }
}

/// Everything assembled from a config: the lattice, kernel cache, normalized
/// weight, distance field, and the admissible starting field.
pub struct Prepared {
    pub domain: Domain,
    pub table: KernelTable,
    pub weight: Weight,
    pub delta: ScalarField,
    pub xi: XiConstruction,
}

pub fn prepare(cfg: &ExperimentConfig) -> Result<Prepared> {
    cfg.validate()?;
    let shape = match cfg.domain.shape {
        ShapeConfig::Interval { a, b } => DomainShape::Interval { a, b },
        ShapeConfig::Rectangle { x0, x1, y0, y1 } => DomainShape::Rectangle { x0, x1, y0, y1 },
    };
    let probe = build_domain(shape, cfg.domain.n_per_axis, 1.0)?;
    let collar = cfg.domain.collar_width.unwrap_or(probe.diameter());
    let domain = build_domain(shape, cfg.domain.n_per_axis, collar)?;
    let delta = distance_field(&domain);
    let raw = match &cfg.weight {
        WeightConfig::Uniform => ScalarField::constant(&domain, 1.0),
        WeightConfig::Power { alpha } => {
            ScalarField::new(&domain, delta.values().iter().map(|t| t.powf(*alpha)).collect())?
        }
        WeightConfig::Gaussian { center, width } => {
            if center.len() != domain.dimension() {
                return Err(Error::Config(format!(
                    "gaussian center has {} coordinates for a {}D domain",
                    center.len(),
                    domain.dimension()
                )));
            }
            if !(*width > 0.0) {
                return Err(Error::Config("gaussian width must be positive".into()));
            }
            let cx = center[0];
            let cy = center.get(1).copied().unwrap_or(0.0);
            ScalarField::from_fn(&domain, |p| {
                let dx = p[0] - cx;
                let dy = p[1] - cy;
                (-(dx * dx + dy * dy) / (2.0 * width * width)).exp()
            })?
        }
        WeightConfig::Values { values } => ScalarField::new(&domain, values.clone())?,
    };
    let weight = normalize_weight(&raw, &domain)?;
    let table = KernelTable::build(&domain);
    let xi = build_xi(&weight, &delta, &domain)?;
    Ok(Prepared {
        domain,
        table,
        weight,
        delta,
        xi,
    })
}
