use std::fs;
use std::path::Path;

use ppl_core::experiments::Scenario;
use ppl_core::sampling::McmcConfig;
use serde::de::DeserializeOwned;

use crate::error::{CliError, CliResult, FlagContext};

pub mod fit;
pub mod gnz;
pub mod limit;
pub mod simulate;
pub mod study;

/// Reads the `--config` file, or the defaults when no file is given.
pub fn load_config<T: DeserializeOwned + Default>(path: Option<&Path>) -> CliResult<T> {
    match path {
        None => Ok(T::default()),
        Some(p) => {
            let text = fs::read_to_string(p).flag("--config")?;
            serde_json::from_str(&text).flag("--config")
        }
    }
}

pub fn require_seed(seed: Option<u64>) -> CliResult<u64> {
    seed.ok_or_else(|| CliError::usage("--seed", "is required"))
}

pub fn require<T>(value: Option<T>, flag: &str) -> CliResult<T> {
    value.ok_or_else(|| CliError::usage(flag, "is required"))
}

pub fn scenario(name: Option<&str>) -> CliResult<Scenario> {
    require(name, "--scenario")?.parse().flag("--scenario")
}

pub fn check_mcmc(mcmc: &McmcConfig, flag: &str) -> CliResult<()> {
    mcmc.validate().flag(flag)
}

/// The file's directory must already exist, so that a run never fails at
/// the very end for want of somewhere to write.
pub fn check_output_file(path: &Path, flag: &str) -> CliResult<()> {
    if path.is_dir() {
        return Err(CliError::usage(flag, format!("{} is a directory", path.display())));
    }
    let parent = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    if !parent.is_dir() {
        return Err(CliError::usage(flag, format!("directory {} does not exist", parent.display())));
    }
    Ok(())
}

pub fn print_json<T: serde::Serialize>(value: &T) {
    println!("{}", serde_json::to_string(value).expect("output serialises"));
}
