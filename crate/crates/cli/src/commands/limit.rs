use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use ppl_core::estimation::{
    check_k_list, tf_limit_experiment, LimitMode, TestFunctionSpec, DEFAULT_DUMMY, HARD_CORE_TRUNCATION,
};
use ppl_core::sampling::McmcConfig;
use ppl_core::{Family, RngStream};
use serde::Deserialize;

use super::{check_mcmc, check_output_file, load_config, require, require_seed, scenario};
use crate::args::TfLimitArgs;
use crate::error::{CliError, CliResult, FlagContext, RuntimeContext};

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct LimitFile {
    scenario: Option<String>,
    k_list: Option<Vec<usize>>,
    mode: Option<LimitMode>,
    reps: Option<usize>,
    out: Option<PathBuf>,
    seed: Option<u64>,
    /// Test function exponent; 0 by default.
    alpha: Option<f64>,
    mcmc: Option<McmcConfig>,
    dummy_resolution: Option<usize>,
}

pub fn run(args: TfLimitArgs) -> CliResult<()> {
    let file: LimitFile = load_config(args.config.as_deref())?;
    let sc = scenario(args.scenario.as_deref().or(file.scenario.as_deref()))?;
    let k_values = require(args.k_list.or(file.k_list), "--k-list")?;
    let mode = match args.mode {
        Some(s) => s.parse().flag("--mode")?,
        None => file.mode.unwrap_or(LimitMode::MonteCarlo),
    };
    let reps = args.reps.or(file.reps).unwrap_or(50);
    if reps == 0 {
        return Err(CliError::usage("--reps", "must be at least 1"));
    }
    let seed = require_seed(args.seed.or(file.seed))?;
    let out = args.out.or(file.out);
    if let Some(path) = &out {
        check_output_file(path, "--out")?;
    }
    let model = sc.model();
    let truncation = (model.family() == Family::HardCore).then_some(HARD_CORE_TRUNCATION);
    let tf = TestFunctionSpec::new(file.alpha.unwrap_or(0.0), truncation).flag("--config")?;
    let mcmc = file.mcmc.unwrap_or_default();
    check_mcmc(&mcmc, "--config")?;
    let dummy = file.dummy_resolution.unwrap_or(DEFAULT_DUMMY);
    if dummy == 0 {
        return Err(CliError::usage("--config", "dummy_resolution must be positive"));
    }
    check_k_list(&k_values, mode).flag("--k-list")?;

    let rows =
        tf_limit_experiment(&model, &tf, &k_values, reps, mode, &mcmc, dummy, &RngStream::new(seed, 0)).runtime()?;
    let mut csv = String::from("k,median_abs_d,n_reps\n");
    for r in &rows {
        writeln!(csv, "{},{},{}", r.k, r.median_abs_d, r.n_reps).expect("write to string");
    }
    match out {
        Some(path) => fs::write(&path, csv).map_err(CliError::runtime)?,
        None => print!("{csv}"),
    }
    Ok(())
}
