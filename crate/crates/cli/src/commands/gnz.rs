use ppl_core::estimation::{TestFunctionSpec, HARD_CORE_TRUNCATION};
use ppl_core::experiments::{gnz_check, GNZ_DUMMY, GNZ_MIN_REPS};
use ppl_core::sampling::McmcConfig;
use ppl_core::{Family, RngStream};
use serde::{Deserialize, Serialize};

use super::{check_mcmc, load_config, print_json, require_seed, scenario};
use crate::args::GnzArgs;
use crate::error::{CliError, CliResult, FlagContext, RuntimeContext};

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct GnzFile {
    scenario: Option<String>,
    reps: Option<usize>,
    seed: Option<u64>,
    /// Test function exponent; 1 for Poisson and 0 otherwise by default.
    alpha: Option<f64>,
    mcmc: Option<McmcConfig>,
    dummy_resolution: Option<usize>,
}

#[derive(Debug, Serialize)]
struct GnzReport {
    scenario: &'static str,
    alpha: f64,
    mean: f64,
    se: f64,
    n_reps: usize,
}

pub fn run(args: GnzArgs) -> CliResult<()> {
    let file: GnzFile = load_config(args.config.as_deref())?;
    let sc = scenario(args.scenario.as_deref().or(file.scenario.as_deref()))?;
    let reps = args.reps.or(file.reps).unwrap_or(100);
    if reps < GNZ_MIN_REPS {
        return Err(CliError::usage("--reps", format!("must be at least {GNZ_MIN_REPS}")));
    }
    let seed = require_seed(args.seed.or(file.seed))?;
    let model = sc.model();
    let family = model.family();
    let alpha = file.alpha.unwrap_or(if family == Family::Poisson { 1.0 } else { 0.0 });
    let truncation = (family == Family::HardCore).then_some(HARD_CORE_TRUNCATION);
    let tf = TestFunctionSpec::new(alpha, truncation).flag("--config")?;
    let mcmc = file.mcmc.unwrap_or_default();
    check_mcmc(&mcmc, "--config")?;
    let dummy = file.dummy_resolution.unwrap_or(GNZ_DUMMY);
    if dummy == 0 {
        return Err(CliError::usage("--config", "dummy_resolution must be positive"));
    }

    let s = gnz_check(&model, &tf, reps, &mcmc, dummy, &RngStream::new(seed, 0)).runtime()?;
    print_json(&GnzReport { scenario: sc.name(), alpha, mean: s.mean, se: s.se, n_reps: s.n_reps });
    Ok(())
}
