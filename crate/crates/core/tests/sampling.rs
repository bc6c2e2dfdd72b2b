//! Distributional checks of the samplers and CV splitters against
//! closed-form targets.

use ppl_core::sampling::{
    block_partition, cv_block, cv_monte_carlo, cv_multinomial_kfold, sample_gibbs, sample_gibbs_series, sample_poisson,
    simulate, McmcConfig,
};
use ppl_core::{thin_independent, ModelSpec, PointPattern, RngStream, Window};
use statrs::distribution::{DiscreteCDF, Poisson};

fn grid_pattern(n: usize) -> PointPattern {
    let pts: Vec<(f64, f64)> =
        (0..n * n).map(|i| ((i % n) as f64 / n as f64 + 0.01, (i / n) as f64 / n as f64 + 0.01)).collect();
    PointPattern::from_xy(&pts, Window::unit()).unwrap()
}

fn mean_sd(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, var.sqrt())
}

/// Largest gap between the empirical CDF of `sample` and `cdf`.
fn ks_distance(mut sample: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    sample.sort_by(f64::total_cmp);
    let n = sample.len() as f64;
    sample
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max((f - (i + 1) as f64 / n).abs())
        })
        .fold(0.0, f64::max)
}

/// Largest gap between the empirical CDF of integer `counts` and a Poisson
/// CDF, over the whole support.
fn poisson_ks(counts: &[f64], mean: f64) -> f64 {
    let law = Poisson::new(mean).unwrap();
    let n = counts.len() as f64;
    let top = counts.iter().cloned().fold(0.0, f64::max) as u64 + 1;
    (0..=top)
        .map(|c| {
            let emp = counts.iter().filter(|&&v| v <= c as f64).count() as f64 / n;
            (emp - law.cdf(c)).abs()
        })
        .fold(0.0, f64::max)
}

#[test]
fn thinning_retains_expected_share() {
    let x = grid_pattern(10);
    let root = RngStream::new(1, 0);
    let counts: Vec<f64> =
        (0..2000).map(|i| thin_independent(&x, |_| 0.3, &root.derive(i)).unwrap().0.len() as f64).collect();
    let (m, sd) = mean_sd(&counts);
    let se = sd / (counts.len() as f64).sqrt();
    assert!((m - 30.0).abs() <= 3.0 * se, "mean {m}, se {se}");
    // binomial(100, 0.3) has sd sqrt(21)
    assert!((sd - 21f64.sqrt()).abs() < 0.3, "sd {sd}");
}

#[test]
fn location_dependent_thinning() {
    let x = grid_pattern(20);
    let root = RngStream::new(2, 0);
    let (mut left, mut right) = (0.0f64, 0.0f64);
    for i in 0..500 {
        let (val, _) = thin_independent(&x, |u| if u.x < 0.5 { 0.8 } else { 0.1 }, &root.derive(i)).unwrap();
        for p in val.points() {
            if p.x < 0.5 {
                left += 1.0;
            } else {
                right += 1.0;
            }
        }
    }
    assert!((left / 500.0 - 160.0).abs() < 2.0);
    assert!((right / 500.0 - 20.0).abs() < 1.0);
}

#[test]
fn poisson_counts_follow_poisson_law() {
    let beta = 50.0;
    let root = RngStream::new(3, 0);
    let counts: Vec<f64> = (0..1000)
        .map(|i| sample_poisson(|_| beta, beta, &Window::unit(), &root.derive(i)).unwrap().len() as f64)
        .collect();
    let d = poisson_ks(&counts, beta);
    assert!(d < 1.63 / (1000f64).sqrt(), "KS distance {d}");
}

#[test]
fn inhomogeneous_poisson_marginal() {
    // intensity exp(2 + 4 x): the x coordinates have CDF (e^{4x} - 1) / (e^4 - 1)
    let spec = ModelSpec::poisson(2.0, 4.0).unwrap();
    let w = Window::unit();
    let root = RngStream::new(4, 0);
    let mut xs = Vec::new();
    let mut counts = Vec::new();
    for i in 0..300 {
        let x = simulate(&spec, &w, &McmcConfig::default(), &root.derive(i)).unwrap();
        counts.push(x.len() as f64);
        xs.extend(x.points().iter().map(|p| p.x));
    }
    let expected = (2f64.exp()) * (4f64.exp() - 1.0) / 4.0;
    let (m, sd) = mean_sd(&counts);
    assert!((m - expected).abs() <= 3.0 * sd / (300f64).sqrt(), "mean {m} vs {expected}");
    let d = ks_distance(xs.clone(), |x| ((4.0 * x).exp() - 1.0) / (4f64.exp() - 1.0));
    assert!(d < 1.63 / (xs.len() as f64).sqrt(), "KS distance {d}");
}

#[test]
fn strauss_with_unit_gamma_is_poisson() {
    let beta = 40.0;
    let spec = ModelSpec::strauss(beta, 0.05, 1.0).unwrap();
    let cfg = McmcConfig { n_steps: 20_000, burn_in: 10_000, ..McmcConfig::default() };
    let root = RngStream::new(5, 0);
    let counts: Vec<f64> =
        (0..500).map(|i| sample_gibbs(&spec, &Window::unit(), &cfg, &root.derive(i)).unwrap().len() as f64).collect();
    let d = poisson_ks(&counts, beta);
    assert!(d < 1.63 / (500f64).sqrt(), "KS distance {d}");
}

#[test]
fn strauss_is_thinner_than_poisson() {
    let cfg = McmcConfig::default();
    let root = RngStream::new(6, 0);
    let mean = |spec: ModelSpec| {
        (0..40).map(|i| sample_gibbs(&spec, &Window::unit(), &cfg, &root.derive(i)).unwrap().len() as f64).sum::<f64>()
            / 40.0
    };
    let strong = mean(ModelSpec::strauss(100.0, 0.05, 0.1).unwrap());
    let weak = mean(ModelSpec::strauss(100.0, 0.05, 0.9).unwrap());
    assert!(strong < weak && weak < 100.0, "{strong} {weak}");
}

#[test]
fn hard_core_series_respects_radius() {
    let spec = ModelSpec::hard_core(100.0, 0.05).unwrap();
    let draws =
        sample_gibbs_series(&spec, &Window::unit(), &McmcConfig::default(), 50, 2_000, &RngStream::new(7, 0)).unwrap();
    assert_eq!(draws.len(), 50);
    for x in &draws {
        assert!(x.min_pairwise_distance().unwrap_or(1.0) >= 0.05);
    }
    let mean = draws.iter().map(|x| x.len() as f64).sum::<f64>() / 50.0;
    assert!((48.0..=72.0).contains(&mean), "{mean}");
}

#[test]
fn sampler_is_reproducible() {
    let spec = ModelSpec::geyer(60.0, 0.05, 1.5f64.sqrt(), 2.0).unwrap();
    let cfg = McmcConfig { n_steps: 20_000, burn_in: 10_000, ..McmcConfig::default() };
    let a = sample_gibbs(&spec, &Window::unit(), &cfg, &RngStream::new(8, 3)).unwrap();
    let b = sample_gibbs(&spec, &Window::unit(), &cfg, &RngStream::new(8, 3)).unwrap();
    let c = sample_gibbs(&spec, &Window::unit(), &cfg, &RngStream::new(8, 4)).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, c);
}

#[test]
fn cv_rounds_cover_the_pattern() {
    let x = grid_pattern(12);
    let rng = RngStream::new(9, 0);
    let kf = cv_multinomial_kfold(&x, 5, &rng).unwrap();
    let mut seen = vec![0; x.len()];
    for pair in &kf.pairs {
        assert_eq!(pair.training.len() + pair.validation.len(), x.len());
        for (i, &m) in pair.validation_mask.iter().enumerate() {
            seen[i] += m as usize;
        }
    }
    assert!(seen.iter().all(|&s| s == 1));

    let blocks = cv_block(&x, &block_partition(&Window::unit(), 3)).unwrap();
    assert_eq!(blocks.k(), 9);
    assert_eq!(blocks.pairs.iter().map(|p| p.validation.len()).sum::<usize>(), x.len());

    let mc = cv_monte_carlo(&x, 0.25, 400, &rng).unwrap();
    let mean = mc.pairs.iter().map(|p| p.validation.len() as f64).sum::<f64>() / 400.0;
    assert!((mean - 36.0).abs() < 1.0, "{mean}");
}

#[test]
fn pattern_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("x.csv");
    let w = Window::new(0.0, 2.0, -1.0, 1.0).unwrap();
    let x = PointPattern::from_xy(&[(0.1, 0.2), (1.9, -0.7), (1.0 / 3.0, 0.0)], w).unwrap();
    x.save(&path).unwrap();
    let back = PointPattern::load(&path).unwrap();
    assert_eq!(back, x);
    assert_eq!(back.window(), w);
}
