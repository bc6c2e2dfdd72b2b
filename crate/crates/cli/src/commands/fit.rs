use std::path::PathBuf;

use ppl_core::estimation::{
    build_quadrature, fit_ppl, fit_tf, hardcore_adaptive_grid, LossId, LossSpec, TestFunctionSpec, WeightScheme,
    DEFAULT_DUMMY, DEFAULT_K_PRIME, HARD_CORE_TRUNCATION,
};
use ppl_core::experiments::GridChoice;
use ppl_core::sampling::CvConfig;
use ppl_core::{Family, PointPattern, RngStream};
use serde::{Deserialize, Serialize};

use super::{load_config, print_json, require, require_seed};
use crate::args::FitArgs;
use crate::error::{CliError, CliResult, FlagContext, RuntimeContext};

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FitFile {
    pattern: Option<PathBuf>,
    family: Option<String>,
    method: Option<String>,
    p: Option<f64>,
    k: Option<usize>,
    weight: Option<String>,
    loss: Option<String>,
    alpha: Option<f64>,
    grid: Option<GridChoice>,
    seed: Option<u64>,
    dummy_resolution: Option<usize>,
}

/// Parameter values keyed by name, in the family's parameter order.
#[derive(Debug)]
struct Named(Vec<(&'static str, f64)>);

impl Serialize for Named {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut m = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            m.serialize_entry(k, v)?;
        }
        m.end()
    }
}

#[derive(Debug, Serialize)]
struct FitReport {
    theta_hat: Named,
    objective: f64,
    method: &'static str,
}

fn parse_grid(s: &str) -> CliResult<GridChoice> {
    if s == "adaptive" {
        return Ok(GridChoice::Adaptive { n_values: ppl_core::experiments::ADAPTIVE_GRID_SIZE });
    }
    serde_json::from_str(s).flag("--grid")
}

pub fn run(args: FitArgs) -> CliResult<()> {
    let file: FitFile = load_config(args.config.as_deref())?;
    let family: Family = require(args.family.or(file.family), "--family")?.parse().flag("--family")?;
    let method = args.method.or(file.method).unwrap_or_else(|| "ppl".into());
    let use_ppl = match method.as_str() {
        "ppl" => true,
        "tf" => false,
        other => return Err(CliError::usage("--method", format!("expected ppl or tf, got '{other}'"))),
    };
    let p = args.p.or(file.p).unwrap_or(0.5);
    if !(p > 0.0 && p < 1.0) {
        return Err(CliError::usage("--p", format!("{p} is outside (0, 1)")));
    }
    let k = args.k.or(file.k).unwrap_or(25);
    if k == 0 {
        return Err(CliError::usage("--k", "must be at least 1"));
    }
    let weight = WeightScheme::parse(&args.weight.or(file.weight).unwrap_or_else(|| "p".into()), DEFAULT_K_PRIME)
        .flag("--weight")?;
    let loss_id: LossId = args.loss.or(file.loss).unwrap_or_else(|| "l1".into()).parse().flag("--loss")?;
    let alpha = args.alpha.or(file.alpha).unwrap_or(1.0);
    let truncation = (family == Family::HardCore).then_some(HARD_CORE_TRUNCATION);
    let tf = TestFunctionSpec::new(alpha, truncation).flag("--alpha")?;
    let grid = match args.grid {
        Some(s) => parse_grid(&s)?,
        None => require(file.grid, "--grid")?,
    };
    match &grid {
        GridChoice::Explicit(g) => g.check_family(family).flag("--grid")?,
        GridChoice::Adaptive { .. } if family != Family::HardCore => {
            return Err(CliError::usage("--grid", "adaptive grids are available for hardcore only"));
        }
        GridChoice::Adaptive { .. } => {}
    }
    let seed = require_seed(args.seed.or(file.seed))?;
    let dummy = file.dummy_resolution.unwrap_or(DEFAULT_DUMMY);
    if dummy == 0 {
        return Err(CliError::usage("--config", "dummy_resolution must be positive"));
    }
    let path = require(args.pattern.or(file.pattern), "--pattern")?;
    let x = PointPattern::load(&path).flag("--pattern")?;

    let grid = match grid {
        GridChoice::Explicit(g) => g,
        GridChoice::Adaptive { n_values } => {
            hardcore_adaptive_grid(&x, n_values, &build_quadrature(&x.window(), &x, dummy)).runtime()?
        }
    };
    let fit = if use_ppl {
        let cv = CvConfig::MonteCarlo { p, k };
        let rng = RngStream::new(seed, 0);
        fit_ppl(&x, family, &grid, &cv, &weight, &tf, &LossSpec::new(loss_id), dummy, &rng).runtime()?
    } else {
        fit_tf(&x, family, &grid, &tf, dummy).runtime()?
    };
    let theta_hat = Named(family.param_names().iter().copied().zip(fit.spec.params().0).collect());
    print_json(&FitReport { theta_hat, objective: fit.objective, method: if use_ppl { "ppl" } else { "tf" } });
    Ok(())
}
