use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};

use ppl_core::experiments::{run_study_with_progress, ReplicationStatus, Scenario, StudyConfig};
use serde_json::{Map, Value};

use super::check_output_file;
use crate::args::StudyArgs;
use crate::error::{CliError, CliResult, FlagContext, RuntimeContext};

/// Preset or file configuration as a JSON object, before flag overrides.
fn base_config(scenario: &str) -> CliResult<Map<String, Value>> {
    let value = match scenario.parse::<Scenario>() {
        Ok(s) => {
            let mut v = serde_json::to_value(s.config(0)).expect("preset serialises");
            v.as_object_mut().expect("config is an object").remove("seed");
            v
        }
        Err(_) if Path::new(scenario).is_file() => {
            let text = fs::read_to_string(scenario).flag("--scenario")?;
            serde_json::from_str(&text).flag("--scenario")?
        }
        Err(_) => {
            return Err(CliError::usage(
                "--scenario",
                format!("'{scenario}' is neither poisson, hardcore, strauss, geyer nor an existing config file"),
            ))
        }
    };
    match value {
        Value::Object(m) => Ok(m),
        _ => Err(CliError::usage("--scenario", "config file must hold a JSON object")),
    }
}

pub fn resolve(args: &StudyArgs) -> CliResult<StudyConfig> {
    let mut m = base_config(&args.scenario)?;
    if let Some(n) = args.n {
        if n < 2 {
            return Err(CliError::usage("--n", "must be at least 2"));
        }
        m.insert("n_replications".into(), n.into());
    }
    if let Some(k) = args.k {
        if k == 0 {
            return Err(CliError::usage("--k", "must be at least 1"));
        }
        m.insert("k".into(), k.into());
    }
    if let Some(w) = args.workers {
        if w == 0 {
            return Err(CliError::usage("--workers", "must be at least 1"));
        }
        m.insert("workers".into(), w.into());
    }
    if let Some(seed) = args.seed {
        m.insert("seed".into(), seed.into());
    }
    if !m.contains_key("seed") {
        return Err(CliError::usage("--seed", "is required"));
    }
    let cfg: StudyConfig = serde_json::from_value(Value::Object(m)).flag("--scenario")?;
    cfg.validate().flag("--scenario")?;
    Ok(cfg)
}

pub fn run(args: StudyArgs) -> CliResult<()> {
    let cfg = resolve(&args)?;
    let out = args.out.clone().unwrap_or_else(|| PathBuf::from("results.csv"));
    check_output_file(&out, "--out")?;

    let total = cfg.n_replications;
    let done = AtomicUsize::new(0);
    let result = run_study_with_progress(&cfg, |status: ReplicationStatus<'_>| {
        let d = done.fetch_add(1, Ordering::Relaxed) + 1;
        match status.outcome {
            Ok(()) => eprintln!("[{d}/{total}] replication {} ok", status.index),
            Err(e) => eprintln!("[{d}/{total}] replication {} failed: {e}", status.index),
        }
    })
    .runtime()?;
    result.save(&out).runtime()?;
    eprintln!("wrote {} rows to {}", result.rows.len(), out.display());
    Ok(())
}
