//! Gibbs model families through their Papangelou conditional intensities
//! `lambda(u | x) = exp(phi1(u) + phi2(u, x))`.
//!
//! Interaction terms are evaluated against a [`Neighbourhood`] (the sorted
//! distances from the query point to nearby pattern points) together with a
//! [`NeighbourCounts`] source for the neighbour counts of pattern points, which
//! the Geyer saturation term needs. The one-shot functions at the bottom of the
//! module build both by brute force; the estimation code caches them.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::conventions::log_pow;
use crate::error::{Error, Result};
use crate::geometry::{distance, Point, Window};
use crate::pattern::PointPattern;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Poisson,
    #[serde(rename = "hardcore")]
    HardCore,
    Strauss,
    Geyer,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::Poisson, Family::HardCore, Family::Strauss, Family::Geyer];

    /// Parameter names in the order used by [`ParamVector`].
    pub fn param_names(&self) -> &'static [&'static str] {
        match self {
            Family::Poisson => &["alpha", "beta"],
            Family::HardCore => &["beta", "R"],
            Family::Strauss => &["beta", "R", "gamma"],
            Family::Geyer => &["beta", "R", "gamma", "s"],
        }
    }

    pub fn arity(&self) -> usize {
        self.param_names().len()
    }

    pub fn name(&self) -> &'static str {
        match self {
            Family::Poisson => "poisson",
            Family::HardCore => "hardcore",
            Family::Strauss => "strauss",
            Family::Geyer => "geyer",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "poisson" => Ok(Family::Poisson),
            "hardcore" | "hard-core" | "hard_core" => Ok(Family::HardCore),
            "strauss" => Ok(Family::Strauss),
            "geyer" => Ok(Family::Geyer),
            other => Err(Error::InvalidParameter(format!("unknown model family '{other}'"))),
        }
    }
}

/// Parameter values ordered as [`Family::param_names`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamVector(pub Vec<f64>);

impl ParamVector {
    pub fn values(&self) -> &[f64] {
        &self.0
    }
}

/// Whether the conditional intensity is monotone under inclusion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Interaction {
    None,
    Repulsive,
    /// No monotonicity guarantee (Geyer, for any `gamma`).
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
enum RawSpec {
    Poisson {
        alpha: f64,
        beta: f64,
    },
    #[serde(rename = "hardcore")]
    HardCore {
        beta: f64,
        #[serde(rename = "R")]
        r: f64,
    },
    Strauss {
        beta: f64,
        #[serde(rename = "R")]
        r: f64,
        gamma: f64,
    },
    Geyer {
        beta: f64,
        #[serde(rename = "R")]
        r: f64,
        gamma: f64,
        s: f64,
    },
}

/// A fully parameterised model. Serialises as e.g.
/// `{"family":"strauss","beta":100,"R":0.05,"gamma":0.5}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec", into = "RawSpec")]
pub struct ModelSpec(RawSpec);

impl TryFrom<RawSpec> for ModelSpec {
    type Error = Error;
    fn try_from(raw: RawSpec) -> Result<Self> {
        let spec = ModelSpec(raw);
        spec.validate()?;
        Ok(spec)
    }
}

impl From<ModelSpec> for RawSpec {
    fn from(s: ModelSpec) -> Self {
        s.0
    }
}

impl ModelSpec {
    /// Log-linear Poisson intensity `exp(alpha + beta * u_x)`.
    pub fn poisson(alpha: f64, beta: f64) -> Result<Self> {
        RawSpec::Poisson { alpha, beta }.try_into()
    }
    pub fn hard_core(beta: f64, r: f64) -> Result<Self> {
        RawSpec::HardCore { beta, r }.try_into()
    }
    pub fn strauss(beta: f64, r: f64, gamma: f64) -> Result<Self> {
        RawSpec::Strauss { beta, r, gamma }.try_into()
    }
    pub fn geyer(beta: f64, r: f64, gamma: f64, s: f64) -> Result<Self> {
        RawSpec::Geyer { beta, r, gamma, s }.try_into()
    }

    pub fn from_params(family: Family, params: &[f64]) -> Result<Self> {
        if params.len() != family.arity() {
            return Err(Error::InvalidParameter(format!(
                "{family} takes {} parameters, got {}",
                family.arity(),
                params.len()
            )));
        }
        let p = params;
        match family {
            Family::Poisson => Self::poisson(p[0], p[1]),
            Family::HardCore => Self::hard_core(p[0], p[1]),
            Family::Strauss => Self::strauss(p[0], p[1], p[2]),
            Family::Geyer => Self::geyer(p[0], p[1], p[2], p[3]),
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        let finite = self.params().0.iter().all(|v| v.is_finite());
        if !finite {
            return bad(format!("non-finite parameter in {:?}", self.0));
        }
        match self.0 {
            RawSpec::Poisson { .. } => Ok(()),
            RawSpec::HardCore { beta, r } | RawSpec::Strauss { beta, r, .. } | RawSpec::Geyer { beta, r, .. }
                if beta <= 0.0 || r <= 0.0 =>
            {
                bad(format!("beta and R must be positive, got beta={beta}, R={r}"))
            }
            RawSpec::Strauss { gamma, .. } if !(0.0..=1.0).contains(&gamma) => {
                bad(format!("Strauss gamma must lie in [0, 1], got {gamma}"))
            }
            RawSpec::Geyer { gamma, .. } if gamma <= 0.0 => bad(format!("Geyer gamma must be positive, got {gamma}")),
            RawSpec::Geyer { s, .. } if s < 0.0 => bad(format!("Geyer s must be non-negative, got {s}")),
            _ => Ok(()),
        }
    }

    pub fn family(&self) -> Family {
        match self.0 {
            RawSpec::Poisson { .. } => Family::Poisson,
            RawSpec::HardCore { .. } => Family::HardCore,
            RawSpec::Strauss { .. } => Family::Strauss,
            RawSpec::Geyer { .. } => Family::Geyer,
        }
    }

    pub fn params(&self) -> ParamVector {
        ParamVector(match self.0 {
            RawSpec::Poisson { alpha, beta } => vec![alpha, beta],
            RawSpec::HardCore { beta, r } => vec![beta, r],
            RawSpec::Strauss { beta, r, gamma } => vec![beta, r, gamma],
            RawSpec::Geyer { beta, r, gamma, s } => vec![beta, r, gamma, s],
        })
    }

    /// Interaction radius, `None` for Poisson.
    pub fn interaction_radius(&self) -> Option<f64> {
        match self.0 {
            RawSpec::Poisson { .. } => None,
            RawSpec::HardCore { r, .. } | RawSpec::Strauss { r, .. } | RawSpec::Geyer { r, .. } => Some(r),
        }
    }

    /// True when `phi2` can be `-inf`, i.e. the intensity can vanish.
    pub fn can_vanish(&self) -> bool {
        matches!(self.0, RawSpec::HardCore { .. } | RawSpec::Strauss { gamma: 0.0, .. })
    }

    pub fn interaction(&self) -> Interaction {
        match self.0 {
            RawSpec::Poisson { .. } => Interaction::None,
            RawSpec::HardCore { .. } | RawSpec::Strauss { .. } => Interaction::Repulsive,
            RawSpec::Geyer { .. } => Interaction::Unknown,
        }
    }

    /// `exp(phi1(u))`, exact for the constant-intensity families.
    pub fn base_intensity(&self, u: Point) -> f64 {
        match self.0 {
            RawSpec::Poisson { alpha, beta } => (alpha + beta * u.x).exp(),
            RawSpec::HardCore { beta, .. } | RawSpec::Strauss { beta, .. } | RawSpec::Geyer { beta, .. } => beta,
        }
    }

    pub fn phi1(&self, u: Point) -> f64 {
        match self.0 {
            RawSpec::Poisson { alpha, beta } => alpha + beta * u.x,
            RawSpec::HardCore { beta, .. } | RawSpec::Strauss { beta, .. } | RawSpec::Geyer { beta, .. } => beta.ln(),
        }
    }

    /// Interaction exponent at the query point of `nb`. `counts` supplies
    /// neighbour counts of pattern points and is only consulted for Geyer.
    ///
    /// When the query point is itself a pattern point (`nb.self_index`), the
    /// pattern is treated as having that point removed.
    pub fn phi2_local<C: NeighbourCounts + ?Sized>(&self, nb: &Neighbourhood, counts: &C) -> f64 {
        match self.0 {
            RawSpec::Poisson { .. } => 0.0,
            RawSpec::HardCore { r, .. } => {
                if nb.count_within(r) > 0 {
                    f64::NEG_INFINITY
                } else {
                    0.0
                }
            }
            RawSpec::Strauss { r, gamma, .. } => log_pow(gamma, nb.count_within(r) as f64),
            RawSpec::Geyer { r, gamma, s, .. } => {
                let near = nb.count_within(r);
                // y in b(u, R) gains the neighbour u: min(s, D + 1) - min(s, D)
                // with D = D_R(y, x), which is fractional when D < s < D + 1.
                let removed = usize::from(nb.self_index.is_some());
                let gained: f64 = nb.idx[..near]
                    .iter()
                    .map(|&j| {
                        let d = (counts.count_within(j, r) - removed) as f64;
                        (d + 1.0).min(s) - d.min(s)
                    })
                    .sum();
                log_pow(gamma, (near as f64).min(s) + gained)
            }
        }
    }

    /// `exp(phi1 + phi2)` given a precomputed neighbourhood.
    pub fn intensity_local<C: NeighbourCounts + ?Sized>(&self, u: Point, nb: &Neighbourhood, counts: &C) -> f64 {
        self.base_intensity(u) * self.phi2_local(nb, counts).exp()
    }

    /// Upper bound on `lambda(u | x)` over all configurations `x`.
    ///
    /// For Geyer the exponent is at most `s + 6 * ceil(s)`: split `b(u, R)`
    /// into six 60-degree sectors; points sharing a sector are mutual
    /// R-neighbours, so at most `ceil(s)` unsaturated points fit in each.
    pub fn local_stability_bound(&self, u: Point) -> f64 {
        match self.0 {
            RawSpec::Poisson { .. } | RawSpec::HardCore { .. } | RawSpec::Strauss { .. } => self.base_intensity(u),
            RawSpec::Geyer { beta, gamma, s, .. } => beta * gamma.max(1.0).powf(s + 6.0 * s.ceil()),
        }
    }

    /// Supremum of [`Self::local_stability_bound`] over the window.
    pub fn window_bound(&self, window: &Window) -> f64 {
        match self.0 {
            RawSpec::Poisson { alpha, beta } => (alpha + (beta * window.x_min()).max(beta * window.x_max())).exp(),
            _ => self.local_stability_bound(Point { x: window.x_min(), y: window.y_min() }),
        }
    }
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.family())?;
        for (i, (n, v)) in self.family().param_names().iter().zip(self.params().0).enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{n}={v}")?;
        }
        write!(f, ")")
    }
}

/// Pattern points near a query location, sorted by distance.
#[derive(Debug, Clone, Default)]
pub struct Neighbourhood {
    dists: Vec<f64>,
    idx: Vec<usize>,
    /// Index of the pattern point coinciding with the query location, which
    /// is excluded from `dists`.
    pub self_index: Option<usize>,
}

impl Neighbourhood {
    /// Neighbours of `u` among `pts` within `r_max`. A point at exactly the
    /// location of `u` is treated as `u` itself and left out.
    pub fn build(u: Point, pts: &[Point], r_max: f64) -> Self {
        let key = u.key();
        let mut self_index = None;
        let mut pairs: Vec<(f64, usize)> = Vec::new();
        for (j, q) in pts.iter().enumerate() {
            if self_index.is_none() && q.key() == key {
                self_index = Some(j);
                continue;
            }
            let d = distance(u, *q);
            if d <= r_max {
                pairs.push((d, j));
            }
        }
        Self::from_pairs(pairs, self_index)
    }

    /// From `(distance, index)` pairs, which need not be sorted.
    pub(crate) fn from_pairs(mut pairs: Vec<(f64, usize)>, self_index: Option<usize>) -> Self {
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        Self { dists: pairs.iter().map(|p| p.0).collect(), idx: pairs.iter().map(|p| p.1).collect(), self_index }
    }

    /// Number of neighbours at distance `<= r`.
    #[inline]
    pub fn count_within(&self, r: f64) -> usize {
        self.dists.partition_point(|&d| d <= r)
    }

    /// Distance to the closest neighbour.
    pub fn nearest(&self) -> Option<f64> {
        self.dists.first().copied()
    }

    pub fn len(&self) -> usize {
        self.dists.len()
    }
    pub fn is_empty(&self) -> bool {
        self.dists.is_empty()
    }

    /// Keeps only neighbours whose pattern index passes `keep`, re-indexing
    /// them through `remap`. Used to restrict a neighbourhood to a sub-pattern.
    pub fn restrict(&self, keep: impl Fn(usize) -> Option<usize>) -> Self {
        let mut dists = Vec::new();
        let mut idx = Vec::new();
        for (&d, &j) in self.dists.iter().zip(&self.idx) {
            if let Some(k) = keep(j) {
                dists.push(d);
                idx.push(k);
            }
        }
        Self { dists, idx, self_index: self.self_index.and_then(&keep) }
    }
}

/// Source of `D_R(y, x)`: the number of other pattern points within `r` of
/// pattern point `j`.
pub trait NeighbourCounts {
    fn count_within(&self, j: usize, r: f64) -> usize;
}

/// Brute-force counts over a slice of points.
pub struct BruteCounts<'a>(pub &'a [Point]);

impl NeighbourCounts for BruteCounts<'_> {
    fn count_within(&self, j: usize, r: f64) -> usize {
        let y = self.0[j];
        self.0.iter().enumerate().filter(|&(i, q)| i != j && distance(y, *q) <= r).count()
    }
}

/// Counts that are never consulted (non-Geyer families).
pub struct NoCounts;

impl NeighbourCounts for NoCounts {
    fn count_within(&self, _j: usize, _r: f64) -> usize {
        unreachable!("neighbour counts requested for a family without saturation")
    }
}

/// Per-point sorted neighbour distances within a cut-off, for repeated
/// neighbour counts at varying radii.
#[derive(Debug, Clone)]
pub struct PatternGraph {
    r_max: f64,
    adj: Vec<Vec<f64>>,
}

impl PatternGraph {
    pub fn new(pts: &[Point], r_max: f64) -> Self {
        let n = pts.len();
        let mut adj = vec![Vec::new(); n];
        for i in 0..n {
            for j in (i + 1)..n {
                let d = distance(pts[i], pts[j]);
                if d <= r_max {
                    adj[i].push(d);
                    adj[j].push(d);
                }
            }
        }
        for a in &mut adj {
            a.sort_by(f64::total_cmp);
        }
        Self { r_max, adj }
    }
}

impl NeighbourCounts for PatternGraph {
    fn count_within(&self, j: usize, r: f64) -> usize {
        debug_assert!(r <= self.r_max);
        self.adj[j].partition_point(|&d| d <= r)
    }
}

/// `D_R(u; x)`: points of `x` other than `u` within closed distance `r`.
pub fn neighbor_count(u: Point, x: &PointPattern, r: f64) -> usize {
    Neighbourhood::build(u, x.points(), r).count_within(r)
}

/// Interaction exponent `phi2(u, x)` on raw points, with `u` removed from
/// `pts` if present.
pub fn phi2_points(spec: &ModelSpec, u: Point, pts: &[Point]) -> f64 {
    match spec.interaction_radius() {
        None => 0.0,
        Some(r) => {
            let nb = Neighbourhood::build(u, pts, r);
            spec.phi2_local(&nb, &BruteCounts(pts))
        }
    }
}

pub fn phi2(spec: &ModelSpec, u: Point, x: &PointPattern) -> f64 {
    phi2_points(spec, u, x.points())
}

/// Papangelou conditional intensity `lambda(u | x \ {u})`.
pub fn cond_intensity(spec: &ModelSpec, u: Point, x: &PointPattern) -> f64 {
    cond_intensity_points(spec, u, x.points())
}

pub fn cond_intensity_points(spec: &ModelSpec, u: Point, pts: &[Point]) -> f64 {
    spec.base_intensity(u) * phi2_points(spec, u, pts).exp()
}

pub fn local_stability_bound(spec: &ModelSpec, u: Point) -> f64 {
    spec.local_stability_bound(u)
}
