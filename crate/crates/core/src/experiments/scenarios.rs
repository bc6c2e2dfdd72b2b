//! The four bundled study scenarios.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::estimation::{LossId, LossSpec, ParamGrid, WeightScheme, DEFAULT_DUMMY};
use crate::models::ModelSpec;
use crate::sampling::McmcConfig;

use super::study::{GridChoice, StudyConfig, ADAPTIVE_GRID_SIZE};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    Poisson,
    HardCore,
    Strauss,
    Geyer,
}

impl Scenario {
    pub const ALL: [Scenario; 4] = [Scenario::Poisson, Scenario::HardCore, Scenario::Strauss, Scenario::Geyer];

    pub fn name(&self) -> &'static str {
        match self {
            Scenario::Poisson => "poisson",
            Scenario::HardCore => "hardcore",
            Scenario::Strauss => "strauss",
            Scenario::Geyer => "geyer",
        }
    }

    pub fn model(&self) -> ModelSpec {
        match self {
            Scenario::Poisson => ModelSpec::poisson(2.0, 4.0),
            Scenario::HardCore => ModelSpec::hard_core(100.0, 0.05),
            Scenario::Strauss => ModelSpec::strauss(100.0, 0.05, 0.5),
            Scenario::Geyer => ModelSpec::geyer(60.0, 0.05, 1.5f64.sqrt(), 2.0),
        }
        .expect("preset parameters are valid")
    }

    pub fn grid(&self) -> GridChoice {
        let axes = match self {
            Scenario::Poisson => vec![ParamGrid::arange(-1.0, 3.0, 0.1), ParamGrid::arange(-2.0, 10.0, 0.3)],
            Scenario::HardCore => return GridChoice::Adaptive { n_values: ADAPTIVE_GRID_SIZE },
            Scenario::Strauss => vec![
                ParamGrid::arange(50.0, 150.0, 5.0),
                ParamGrid::arange(0.035, 0.065, 0.0015),
                ParamGrid::arange(0.1, 0.9, 0.04),
            ],
            Scenario::Geyer => vec![
                ParamGrid::arange(40.0, 80.0, 5.0),
                ParamGrid::arange(0.035, 0.065, 0.00375),
                ParamGrid::arange(0.5, 2.0, 0.1875),
                ParamGrid::arange(1.0, 3.0, 0.25),
            ],
        };
        GridChoice::Explicit(ParamGrid::new(axes).expect("preset grids are valid"))
    }

    /// Full study configuration. Only the weight `p` is used for the
    /// Poisson model, where it is the exact weight.
    pub fn config(&self, seed: u64) -> StudyConfig {
        let weight_schemes = match self {
            Scenario::Poisson => vec![WeightScheme::FixedP],
            _ => vec![
                WeightScheme::FixedP,
                WeightScheme::FixedPOverOneMinusP,
                WeightScheme::Estimated { k_prime: crate::estimation::DEFAULT_K_PRIME },
            ],
        };
        StudyConfig {
            scenario: self.name().into(),
            model: self.model(),
            n_replications: 50,
            k: 25,
            p_values: ParamGrid::arange(0.1, 0.9, 0.1),
            weight_schemes,
            losses: vec![LossSpec::new(LossId::L1), LossSpec::new(LossId::L2), LossSpec::new(LossId::L3)],
            tf_alpha: 1.0,
            grid: self.grid(),
            mcmc: McmcConfig::default(),
            seed,
            dummy_resolution: DEFAULT_DUMMY,
            workers: None,
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Scenario::ALL.into_iter().find(|c| c.name() == s).ok_or_else(|| {
            Error::InvalidParameter(format!("unknown scenario '{s}', expected poisson, hardcore, strauss or geyer"))
        })
    }
}
