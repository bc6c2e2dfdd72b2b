use std::fs;
use std::path::PathBuf;

use ppl_core::sampling::{simulate, McmcConfig};
use ppl_core::{ModelSpec, RngStream, Window};
use serde::{Deserialize, Serialize};

use super::{check_mcmc, load_config, require, require_seed};
use crate::args::SimulateArgs;
use crate::error::{CliError, CliResult, FlagContext, RuntimeContext};

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SimulateFile {
    model: Option<ModelSpec>,
    window: Option<Window>,
    n: Option<usize>,
    seed: Option<u64>,
    mcmc_steps: Option<u64>,
    burn_in: Option<u64>,
    out: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
struct Manifest {
    version: &'static str,
    model: ModelSpec,
    window: Window,
    n: usize,
    seed: u64,
    mcmc: McmcConfig,
    files: Vec<ManifestEntry>,
}

#[derive(Debug, Serialize)]
struct ManifestEntry {
    file: String,
    n_points: usize,
}

pub fn run(args: SimulateArgs) -> CliResult<()> {
    let file: SimulateFile = load_config(args.config.as_deref())?;
    let model = match args.model {
        Some(s) => serde_json::from_str(&s).flag("--model")?,
        None => require(file.model, "--model")?,
    };
    let window = match args.window {
        Some(s) => serde_json::from_str(&s).flag("--window")?,
        None => file.window.unwrap_or_else(Window::unit),
    };
    let n = args.n.or(file.n).unwrap_or(1);
    if n == 0 {
        return Err(CliError::usage("--n", "must be at least 1"));
    }
    let seed = require_seed(args.seed.or(file.seed))?;
    let n_steps = args.mcmc_steps.or(file.mcmc_steps).unwrap_or(McmcConfig::default().n_steps);
    let burn_in = args.burn_in.or(file.burn_in).unwrap_or(n_steps / 2);
    let mcmc = McmcConfig { n_steps, burn_in, ..McmcConfig::default() };
    if n_steps == 0 {
        return Err(CliError::usage("--mcmc-steps", "must be positive"));
    }
    check_mcmc(&mcmc, "--burn-in")?;
    let out = args.out.or(file.out).unwrap_or_else(|| PathBuf::from("."));
    if out.exists() && !out.is_dir() {
        return Err(CliError::usage("--out", format!("{} is not a directory", out.display())));
    }

    let patterns = (0..n)
        .map(|r| simulate(&model, &window, &mcmc, &RngStream::new(seed, r as u64)))
        .collect::<ppl_core::Result<Vec<_>>>()
        .runtime()?;

    fs::create_dir_all(&out).map_err(CliError::runtime)?;
    let width = n.to_string().len().max(4);
    let mut files = Vec::with_capacity(n);
    for (r, x) in patterns.iter().enumerate() {
        let name = format!("pattern_{r:0width$}.csv");
        x.save(&out.join(&name)).runtime()?;
        files.push(ManifestEntry { file: name, n_points: x.len() });
    }
    let manifest = Manifest { version: env!("CARGO_PKG_VERSION"), model, window, n, seed, mcmc, files };
    let text = serde_json::to_string_pretty(&manifest).map_err(CliError::runtime)?;
    fs::write(out.join("manifest.json"), text + "\n").map_err(CliError::runtime)?;
    eprintln!("wrote {n} pattern(s) to {}", out.display());
    Ok(())
}
