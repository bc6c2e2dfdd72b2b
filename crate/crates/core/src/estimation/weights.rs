use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::conventions::exp_diff_zero;
use crate::error::{Error, Result};
use crate::models::{Family, ModelSpec, NeighbourCounts, Neighbourhood, NoCounts, PatternGraph};
use crate::pattern::{thinning_mask, PointPattern};
use crate::rng::RngStream;

use super::engine::Master;
use super::quadrature::QuadratureScheme;

/// Default number of thinnings for the estimated weight.
pub const DEFAULT_K_PRIME: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightScheme {
    FixedP,
    FixedPOverOneMinusP,
    Estimated { k_prime: usize },
}

impl WeightScheme {
    pub fn validate(&self) -> Result<()> {
        match self {
            WeightScheme::Estimated { k_prime: 0 } => Err(Error::InvalidParameter("k_prime must be at least 1".into())),
            _ => Ok(()),
        }
    }

    /// The weight for the two fixed schemes, `None` when estimated.
    pub fn fixed(&self, p: f64) -> Option<f64> {
        match self {
            WeightScheme::FixedP => Some(p),
            WeightScheme::FixedPOverOneMinusP => Some(p / (1.0 - p)),
            WeightScheme::Estimated { .. } => None,
        }
    }

    /// Short label used in tables and on the command line.
    pub fn label(&self) -> &'static str {
        match self {
            WeightScheme::FixedP => "p",
            WeightScheme::FixedPOverOneMinusP => "p-over-1mp",
            WeightScheme::Estimated { .. } => "estimate",
        }
    }

    pub fn parse(s: &str, k_prime: usize) -> Result<Self> {
        match s {
            "p" => Ok(WeightScheme::FixedP),
            "p-over-1mp" => Ok(WeightScheme::FixedPOverOneMinusP),
            "estimate" => Ok(WeightScheme::Estimated { k_prime }),
            other => Err(Error::InvalidParameter(format!("unknown weight scheme '{other}'"))),
        }
    }
}

impl fmt::Display for WeightScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Spatial average over quadrature nodes `u` of
/// `p / k' * sum_i lambda(u | x) / lambda(u | z_i)`, where the `z_i` are
/// independent thinnings of `x` with retention `1 - p`. Ratios are computed as
/// `exp(phi2(u, x) - phi2(u, z_i))` with `0/0 = 0`.
pub(crate) struct WeightEstimator {
    p: f64,
    weights: Vec<f64>,
    total: f64,
    full: Vec<Neighbourhood>,
    full_graph: Option<PatternGraph>,
    thinned: Vec<(Vec<Neighbourhood>, Option<PatternGraph>)>,
    memo: HashMap<Vec<u64>, f64>,
}

impl WeightEstimator {
    pub(crate) fn new(
        master: &Master,
        family: Family,
        r_max: Option<f64>,
        p: f64,
        k_prime: usize,
        rng: &RngStream,
    ) -> Result<Self> {
        let all: Vec<usize> = (0..master.n_data()).collect();
        let (nodes, weights) = master.quadrature(&all);
        let everything = vec![true; master.n_data()];
        let (full, pts) = master.restricted(&nodes, &everything);
        let graph = |pts: &[crate::geometry::Point]| {
            (family == Family::Geyer).then(|| PatternGraph::new(pts, r_max.unwrap_or(0.0)))
        };
        let full_graph = graph(&pts);
        let x = PointPattern::new(pts, master.window())?;
        let mut thinned = Vec::with_capacity(k_prime);
        for i in 0..k_prime {
            let keep = thinning_mask(&x, |_| 1.0 - p, &rng.derive(i as u64))?;
            let (nbs, sub) = master.restricted(&nodes, &keep);
            let g = graph(&sub);
            thinned.push((nbs, g));
        }
        let total = weights.iter().sum();
        Ok(Self { p, weights, total, full, full_graph, thinned, memo: HashMap::new() })
    }

    pub(crate) fn weight(&mut self, spec: &ModelSpec) -> f64 {
        if spec.family() == Family::Poisson {
            return self.p;
        }
        // phi2 does not involve beta, so the memo key drops it
        let key: Vec<u64> = spec.params().0[1..].iter().map(|v| v.to_bits()).collect();
        if let Some(&v) = self.memo.get(&key) {
            return v;
        }
        let v = self.compute(spec);
        self.memo.insert(key, v);
        v
    }

    fn compute(&self, spec: &ModelSpec) -> f64 {
        let k = self.thinned.len() as f64;
        let mut acc = 0.0;
        for (u, w) in self.weights.iter().enumerate() {
            let a = phi2_with(spec, &self.full[u], &self.full_graph);
            let mut s = 0.0;
            for (nbs, g) in &self.thinned {
                s += exp_diff_zero(a, phi2_with(spec, &nbs[u], g));
            }
            acc += w * (s / k);
        }
        // the ratio is formed before multiplying by p so that a unit ratio gives p exactly
        self.p * (acc / self.total)
    }
}

fn phi2_with(spec: &ModelSpec, nb: &Neighbourhood, g: &Option<PatternGraph>) -> f64 {
    match g {
        Some(g) => spec.phi2_local(nb, g as &dyn NeighbourCounts),
        None => spec.phi2_local(nb, &NoCounts),
    }
}

/// PPL weight for retention probability `p`. The estimated scheme averages
/// over the nodes of `quad`, which must contain every point of `x`.
pub fn ppl_weight(
    ws: &WeightScheme,
    p: f64,
    spec: &ModelSpec,
    x: &PointPattern,
    quad: &QuadratureScheme,
    rng: &RngStream,
) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidParameter(format!("p must lie in (0, 1), got {p}")));
    }
    ws.validate()?;
    if let Some(w) = ws.fixed(p) {
        return Ok(w);
    }
    let WeightScheme::Estimated { k_prime } = *ws else { unreachable!() };
    let k = k_prime as f64;
    let r = spec.interaction_radius();
    let full: Vec<Neighbourhood> = match r {
        Some(r) => quad.nodes().iter().map(|&u| Neighbourhood::build(u, x.points(), r)).collect(),
        None => vec![Neighbourhood::default(); quad.len()],
    };
    let geyer = spec.family() == Family::Geyer;
    let full_graph = geyer.then(|| PatternGraph::new(x.points(), r.unwrap_or(0.0)));
    let mut sums = vec![0.0; quad.len()];
    for i in 0..k_prime {
        let keep = thinning_mask(x, |_| 1.0 - p, &rng.derive(i as u64))?;
        let (z, _) = x.split_mask(&keep);
        let graph = geyer.then(|| PatternGraph::new(z.points(), r.unwrap_or(0.0)));
        for (u, &node) in quad.nodes().iter().enumerate() {
            let nb_z = match r {
                Some(r) => Neighbourhood::build(node, z.points(), r),
                None => Neighbourhood::default(),
            };
            sums[u] += exp_diff_zero(phi2_with(spec, &full[u], &full_graph), phi2_with(spec, &nb_z, &graph));
        }
    }
    let acc: f64 = quad.weights().iter().zip(&sums).map(|(w, s)| w * (s / k)).sum();
    Ok(p * (acc / quad.total_weight()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimation::quadrature::build_quadrature;
    use crate::geometry::Window;

    fn x() -> PointPattern {
        let pts: Vec<(f64, f64)> =
            (0..40).map(|i| ((i as f64 * 0.6180339) % 1.0, (i as f64 * 0.4142135) % 1.0)).collect();
        PointPattern::from_xy(&pts, Window::unit()).unwrap()
    }

    #[test]
    fn fixed_schemes() {
        let s = ModelSpec::strauss(100.0, 0.05, 0.5).unwrap();
        let q = build_quadrature(&Window::unit(), &x(), 8);
        let r = RngStream::new(0, 0);
        assert_eq!(ppl_weight(&WeightScheme::FixedP, 0.3, &s, &x(), &q, &r).unwrap(), 0.3);
        assert_eq!(ppl_weight(&WeightScheme::FixedPOverOneMinusP, 0.5, &s, &x(), &q, &r).unwrap(), 1.0);
        assert!(ppl_weight(&WeightScheme::FixedP, 1.0, &s, &x(), &q, &r).is_err());
    }

    #[test]
    fn poisson_estimate_is_exactly_p() {
        let s = ModelSpec::poisson(2.0, 4.0).unwrap();
        let q = build_quadrature(&Window::unit(), &x(), 8);
        for p in [0.1, 0.37, 0.9] {
            let w =
                ppl_weight(&WeightScheme::Estimated { k_prime: 5 }, p, &s, &x(), &q, &RngStream::new(4, 1)).unwrap();
            assert_eq!(w, p);
        }
    }

    #[test]
    fn cached_estimator_matches_direct() {
        let x = x();
        let q = build_quadrature(&Window::unit(), &x, 8);
        let rng = RngStream::new(11, 2);
        for spec in [
            ModelSpec::strauss(100.0, 0.12, 0.4).unwrap(),
            ModelSpec::hard_core(100.0, 0.1).unwrap(),
            ModelSpec::geyer(60.0, 0.12, 1.8, 1.5).unwrap(),
        ] {
            let direct = ppl_weight(&WeightScheme::Estimated { k_prime: 6 }, 0.4, &spec, &x, &q, &rng).unwrap();
            let master = Master::new(&x, 8, spec.interaction_radius());
            let mut est =
                WeightEstimator::new(&master, spec.family(), spec.interaction_radius(), 0.4, 6, &rng).unwrap();
            let cached = est.weight(&spec);
            assert!((direct - cached).abs() < 1e-12, "{spec}: {direct} vs {cached}");
        }
    }
}
