//! Replicated simulation study comparing PPL with Takacs-Fiksel estimation.

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimation::{
    build_quadrature, fit_ppl_multi, fit_tf, hardcore_adaptive_grid, LossId, LossSpec, ParamGrid, PplOptions,
    TestFunctionSpec, WeightScheme, DEFAULT_DUMMY, DEFAULT_K_PRIME, HARD_CORE_TRUNCATION,
};
use crate::geometry::Window;
use crate::models::{Family, ModelSpec};
use crate::rng::RngStream;
use crate::sampling::{simulate, CvConfig, McmcConfig};

use super::mse::mse_decompose;

/// Number of values per axis of the adaptive hard-core grid.
pub const ADAPTIVE_GRID_SIZE: usize = 41;

/// Largest tolerated share of failed replications.
pub const MAX_FAILURE_SHARE: f64 = 0.2;

/// Parameter grid of a study: fixed, or rebuilt from each hard-core pattern.
#[derive(Debug, Clone, PartialEq)]
pub enum GridChoice {
    Explicit(ParamGrid),
    Adaptive { n_values: usize },
}

impl Serialize for GridChoice {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            GridChoice::Explicit(g) => g.serialize(s),
            GridChoice::Adaptive { n_values: ADAPTIVE_GRID_SIZE } => s.serialize_str("adaptive"),
            GridChoice::Adaptive { n_values } => {
                use serde::ser::SerializeMap;
                let mut m = s.serialize_map(Some(1))?;
                m.serialize_entry("adaptive", n_values)?;
                m.end()
            }
        }
    }
}

impl<'de> Deserialize<'de> for GridChoice {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let v = serde_json::Value::deserialize(d)?;
        match &v {
            serde_json::Value::String(s) if s == "adaptive" => {
                Ok(GridChoice::Adaptive { n_values: ADAPTIVE_GRID_SIZE })
            }
            serde_json::Value::Object(m) if m.len() == 1 && m.contains_key("adaptive") => {
                let n =
                    m["adaptive"].as_u64().ok_or_else(|| D::Error::custom("adaptive grid size must be an integer"))?;
                Ok(GridChoice::Adaptive { n_values: n as usize })
            }
            _ => serde_json::from_value::<ParamGrid>(v).map(GridChoice::Explicit).map_err(D::Error::custom),
        }
    }
}

fn default_scenario() -> String {
    "custom".into()
}
fn default_n() -> usize {
    50
}
fn default_k() -> usize {
    25
}
fn default_p_values() -> Vec<f64> {
    ParamGrid::arange(0.1, 0.9, 0.1)
}
fn default_weights() -> Vec<WeightScheme> {
    vec![WeightScheme::FixedP, WeightScheme::FixedPOverOneMinusP, WeightScheme::Estimated { k_prime: DEFAULT_K_PRIME }]
}
fn default_losses() -> Vec<LossSpec> {
    vec![LossSpec::new(LossId::L1), LossSpec::new(LossId::L2), LossSpec::new(LossId::L3)]
}
fn default_alpha() -> f64 {
    1.0
}
fn default_dummy() -> usize {
    DEFAULT_DUMMY
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyConfig {
    #[serde(default = "default_scenario")]
    pub scenario: String,
    /// Family and true parameter vector.
    pub model: ModelSpec,
    #[serde(default = "default_n")]
    pub n_replications: usize,
    #[serde(default = "default_k")]
    pub k: usize,
    #[serde(default = "default_p_values")]
    pub p_values: Vec<f64>,
    #[serde(default = "default_weights")]
    pub weight_schemes: Vec<WeightScheme>,
    #[serde(default = "default_losses")]
    pub losses: Vec<LossSpec>,
    #[serde(default = "default_alpha")]
    pub tf_alpha: f64,
    pub grid: GridChoice,
    #[serde(default)]
    pub mcmc: McmcConfig,
    pub seed: u64,
    #[serde(default = "default_dummy")]
    pub dummy_resolution: usize,
    /// Worker threads; `None` uses every available core. Results do not
    /// depend on it.
    #[serde(default)]
    pub workers: Option<usize>,
}

impl StudyConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if self.n_replications < 2 {
            return bad(format!("n_replications must be at least 2, got {}", self.n_replications));
        }
        if self.k == 0 {
            return bad("k must be positive".into());
        }
        if let Some(p) = self.p_values.iter().find(|p| !(**p > 0.0 && **p < 1.0)) {
            return bad(format!("p = {p} is outside (0, 1)"));
        }
        for w in &self.weight_schemes {
            w.validate()?;
        }
        if !(self.tf_alpha >= 0.0 && self.tf_alpha.is_finite()) {
            return bad(format!("tf_alpha must be finite and nonnegative, got {}", self.tf_alpha));
        }
        if self.dummy_resolution == 0 {
            return bad("dummy_resolution must be positive".into());
        }
        if self.workers == Some(0) {
            return bad("workers must be positive".into());
        }
        self.mcmc.validate()?;
        match &self.grid {
            GridChoice::Explicit(g) => g.check_family(self.model.family())?,
            GridChoice::Adaptive { n_values } => {
                if self.model.family() != Family::HardCore {
                    return bad(format!("the adaptive grid is defined for hardcore only, not {}", self.model.family()));
                }
                if *n_values < 2 {
                    return bad("adaptive grid needs at least 2 values per axis".into());
                }
            }
        }
        Ok(())
    }

    /// Stoyan-Grabarnik style test function with exponent `tf_alpha`,
    /// truncated for the hard-core family.
    pub fn test_function(&self) -> TestFunctionSpec {
        let truncation = (self.model.family() == Family::HardCore).then_some(HARD_CORE_TRUNCATION);
        TestFunctionSpec { alpha: self.tf_alpha, truncation }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Tf,
    Ppl,
}

impl Method {
    pub fn label(&self) -> &'static str {
        match self {
            Method::Tf => "tf",
            Method::Ppl => "ppl",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudyRow {
    pub scenario: String,
    pub parameter: String,
    pub method: Method,
    pub p: Option<f64>,
    pub weight: Option<WeightScheme>,
    pub loss: Option<LossId>,
    pub mse: f64,
    pub bias_sq: f64,
    pub variance: f64,
    pub n_effective: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudyResult {
    pub rows: Vec<StudyRow>,
    /// Indices of replications dropped because a simulation or fit failed.
    pub failed: Vec<usize>,
}

pub const CSV_HEADER: [&str; 10] =
    ["scenario", "parameter", "method", "p", "weight", "loss", "mse", "bias_sq", "variance", "n_effective"];

impl StudyResult {
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(CSV_HEADER)?;
        let na = || "NA".to_string();
        for r in &self.rows {
            out.write_record([
                r.scenario.clone(),
                r.parameter.clone(),
                r.method.label().to_string(),
                r.p.map_or_else(na, |p| p.to_string()),
                r.weight.map_or_else(na, |w| w.label().to_string()),
                r.loss.map_or_else(na, |l| l.to_string()),
                r.mse.to_string(),
                r.bias_sq.to_string(),
                r.variance.to_string(),
                r.n_effective.to_string(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        std::fs::write(path, buf)?;
        Ok(())
    }

    /// The row for one parameter and method setting, if present.
    pub fn find(
        &self,
        parameter: &str,
        method: Method,
        p: Option<f64>,
        weight: Option<WeightScheme>,
        loss: Option<LossId>,
    ) -> Option<&StudyRow> {
        self.rows.iter().find(|r| {
            r.parameter == parameter && r.method == method && r.p == p && r.weight == weight && r.loss == loss
        })
    }
}

/// Parameter estimates of one replication: the TF fit, then PPL fits indexed
/// `[p][weight][loss]`.
#[derive(Debug, Clone)]
pub struct ReplicationEstimates {
    pub tf: Vec<f64>,
    pub ppl: Vec<Vec<Vec<Vec<f64>>>>,
}

/// Fits every method to replication `r`. Replication `r` draws from the
/// stream `(seed, r)`, so the result does not depend on execution order.
pub fn run_replication(cfg: &StudyConfig, r: usize) -> Result<ReplicationEstimates> {
    let family = cfg.model.family();
    let stream = RngStream::new(cfg.seed, r as u64);
    let window = Window::unit();
    let x = simulate(&cfg.model, &window, &cfg.mcmc, &stream.derive(0))?;
    let grid = match &cfg.grid {
        GridChoice::Explicit(g) => g.clone(),
        GridChoice::Adaptive { n_values } => {
            hardcore_adaptive_grid(&x, *n_values, &build_quadrature(&window, &x, cfg.dummy_resolution))?
        }
    };
    let tf = cfg.test_function();
    let tf_fit = fit_tf(&x, family, &grid, &tf, cfg.dummy_resolution)?;
    let ppl_stream = stream.derive(1);
    let mut ppl = Vec::with_capacity(cfg.p_values.len());
    for (i, &p) in cfg.p_values.iter().enumerate() {
        let opts = PplOptions {
            cv: CvConfig::MonteCarlo { p, k: cfg.k },
            weights: cfg.weight_schemes.clone(),
            losses: cfg.losses.clone(),
            tf,
            dummy: cfg.dummy_resolution,
        };
        let fits = fit_ppl_multi(&x, family, &grid, &opts, &ppl_stream.derive(i as u64))?;
        let per_weight = fits
            .into_iter()
            .map(|per_loss| per_loss.into_iter().map(|f| f.map(|o| o.spec.params().0)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        ppl.push(per_weight);
    }
    Ok(ReplicationEstimates { tf: tf_fit.spec.params().0, ppl })
}

/// Progress of one finished replication.
#[derive(Debug)]
pub struct ReplicationStatus<'a> {
    pub index: usize,
    pub outcome: std::result::Result<(), &'a Error>,
}

pub fn run_study(cfg: &StudyConfig) -> Result<StudyResult> {
    run_study_with_progress(cfg, |_| {})
}

/// Runs every replication in parallel and reduces them in index order.
pub fn run_study_with_progress<F>(cfg: &StudyConfig, progress: F) -> Result<StudyResult>
where
    F: Fn(ReplicationStatus<'_>) + Sync,
{
    cfg.validate()?;
    let run = || -> Vec<Result<ReplicationEstimates>> {
        (0..cfg.n_replications)
            .into_par_iter()
            .map(|r| {
                let res = run_replication(cfg, r);
                progress(ReplicationStatus { index: r, outcome: res.as_ref().map(|_| ()) });
                res
            })
            .collect()
    };
    let results = match cfg.workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::InvalidParameter(format!("cannot start {n} workers: {e}")))?
            .install(run),
        None => run(),
    };
    aggregate(cfg, &results)
}

/// Builds the result table from per-replication outcomes. Failed
/// replications are dropped; more than 20% failures abort the study.
pub fn aggregate(cfg: &StudyConfig, results: &[Result<ReplicationEstimates>]) -> Result<StudyResult> {
    let failed: Vec<usize> = results.iter().enumerate().filter(|(_, r)| r.is_err()).map(|(i, _)| i).collect();
    let total = results.len();
    if failed.len() as f64 > MAX_FAILURE_SHARE * total as f64 {
        return Err(Error::StudyAborted { failed: failed.len(), total });
    }
    let ok: Vec<&ReplicationEstimates> = results.iter().filter_map(|r| r.as_ref().ok()).collect();
    let n_eff = ok.len();
    let truth = cfg.model.params().0;
    let names = cfg.model.family().param_names();
    let mut rows = Vec::new();
    for (j, name) in names.iter().enumerate() {
        let row = |method, p, weight, loss, est: Vec<f64>| -> Result<StudyRow> {
            let m = mse_decompose(&est, truth[j])?;
            Ok(StudyRow {
                scenario: cfg.scenario.clone(),
                parameter: name.to_string(),
                method,
                p,
                weight,
                loss,
                mse: m.mse,
                bias_sq: m.bias_sq,
                variance: m.variance,
                n_effective: n_eff,
            })
        };
        rows.push(row(Method::Tf, None, None, None, ok.iter().map(|e| e.tf[j]).collect())?);
        for (pi, &p) in cfg.p_values.iter().enumerate() {
            for (wi, &w) in cfg.weight_schemes.iter().enumerate() {
                for (li, l) in cfg.losses.iter().enumerate() {
                    let est = ok.iter().map(|e| e.ppl[pi][wi][li][j]).collect();
                    rows.push(row(Method::Ppl, Some(p), Some(w), Some(l.id), est)?);
                }
            }
        }
    }
    Ok(StudyResult { rows, failed })
}
