use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LossId {
    L1,
    L2,
    L3,
}

/// Loss over per-fold prediction errors. With `exclude_empty`, folds whose
/// training or validation set is empty are dropped before averaging.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LossSpec {
    pub id: LossId,
    #[serde(default = "default_exclude")]
    pub exclude_empty: bool,
}

fn default_exclude() -> bool {
    true
}

impl LossSpec {
    pub fn new(id: LossId) -> Self {
        Self { id, exclude_empty: true }
    }
}

impl fmt::Display for LossId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LossId::L1 => "L1",
            LossId::L2 => "L2",
            LossId::L3 => "L3",
        })
    }
}

impl FromStr for LossId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "l1" => Ok(LossId::L1),
            "l2" => Ok(LossId::L2),
            "l3" => Ok(LossId::L3),
            other => Err(Error::InvalidParameter(format!("unknown loss '{other}'"))),
        }
    }
}

/// Returns `+inf` when no fold survives the filter.
pub fn loss(ls: &LossSpec, errors: &[f64], fold_nonempty: &[bool]) -> f64 {
    assert_eq!(errors.len(), fold_nonempty.len(), "one mask entry per fold");
    let kept = errors.iter().zip(fold_nonempty).filter(|(_, &ok)| ok || !ls.exclude_empty).map(|(e, _)| *e);
    let (mut n, mut s1, mut sa, mut s2) = (0usize, 0.0, 0.0, 0.0);
    for e in kept {
        n += 1;
        s1 += e;
        sa += e.abs();
        s2 += e * e;
    }
    if n == 0 {
        return f64::INFINITY;
    }
    let n = n as f64;
    match ls.id {
        LossId::L1 => sa / n,
        LossId::L2 => s2 / n,
        LossId::L3 => (s1 / n).powi(2),
    }
}
