//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails. Pass criterion numbers as arguments to run a subset.

use std::process::ExitCode;
use std::time::Instant;

use ppl_core::estimation::{
    build_quadrature, ppl_weight, prediction_error, prediction_error_terms, tf_limit_experiment, LimitMode, LimitRow,
    LossId, LossSpec, ParamGrid, TestFunctionSpec, WeightScheme,
};
use ppl_core::experiments::{
    aggregate, gnz_check, run_replication, run_study, GridChoice, Method, Scenario, StudyConfig, StudyResult, GNZ_DUMMY,
};
use ppl_core::sampling::{sample_gibbs, McmcConfig};
use ppl_core::{cond_intensity, phi2, ModelSpec, Point, PointPattern, RngStream, Window};
use rand::Rng;

type Check = Result<String, String>;

fn ensure(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn uniform_pattern(rng: &mut impl Rng, n: usize) -> PointPattern {
    let pts: Vec<(f64, f64)> = (0..n).map(|_| (rng.random::<f64>(), rng.random::<f64>())).collect();
    PointPattern::from_xy(&pts, Window::unit()).unwrap()
}

fn c1_sg_integral() -> Check {
    let spec = ModelSpec::poisson(2.0, 4.0).unwrap();
    let tf = TestFunctionSpec::stoyan_grabarnik();
    let mut rng = RngStream::new(101, 0).rng();
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let train = {
            let n = rng.random_range(0..60);
            uniform_pattern(&mut rng, n)
        };
        let val = {
            let n = rng.random_range(0..60);
            uniform_pattern(&mut rng, n)
        };
        let w = 10f64.powf(rng.random_range(-3.0..3.0));
        let dummy = rng.random_range(4..40);
        let q = build_quadrature(&Window::unit(), &val, dummy);
        let t = prediction_error_terms(&spec, &tf, w, &train, &val, &q).map_err(|e| e.to_string())?;
        worst = worst.max((t.integral - 1.0).abs());
    }
    ensure(worst <= 1e-10, format!("max |integral - 1| = {worst:.3e} over 200 cases"))
}

fn small_study(seed: u64) -> StudyConfig {
    let model = ModelSpec::strauss(100.0, 0.05, 0.5).unwrap();
    StudyConfig {
        scenario: "strauss-small".into(),
        model,
        n_replications: 8,
        k: 10,
        p_values: vec![0.2, 0.5, 0.8],
        weight_schemes: vec![
            WeightScheme::FixedP,
            WeightScheme::FixedPOverOneMinusP,
            WeightScheme::Estimated { k_prime: 5 },
        ],
        losses: vec![LossSpec::new(LossId::L1), LossSpec::new(LossId::L2), LossSpec::new(LossId::L3)],
        tf_alpha: 1.0,
        grid: GridChoice::Explicit(
            ParamGrid::new(vec![
                ParamGrid::arange(60.0, 140.0, 10.0),
                ParamGrid::arange(0.04, 0.06, 0.005),
                ParamGrid::arange(0.1, 0.9, 0.1),
            ])
            .unwrap(),
        ),
        mcmc: McmcConfig { n_steps: 40_000, burn_in: 20_000, ..McmcConfig::default() },
        seed,
        dummy_resolution: 24,
        workers: None,
    }
}

fn c2_mse_identity() -> Check {
    let mut rows = 0;
    let mut worst: f64 = 0.0;
    let mut hc = Scenario::HardCore.config(202);
    hc.n_replications = 6;
    hc.p_values = vec![0.3, 0.7];
    hc.mcmc = McmcConfig { n_steps: 40_000, burn_in: 20_000, ..McmcConfig::default() };
    for cfg in [small_study(201), hc] {
        let res = run_study(&cfg).map_err(|e| e.to_string())?;
        for r in &res.rows {
            rows += 1;
            let rel = (r.mse - (r.variance + r.bias_sq)).abs() / r.mse.max(f64::MIN_POSITIVE);
            worst = worst.max(rel);
        }
    }
    ensure(worst <= 1e-12, format!("max relative deviation {worst:.3e} over {rows} rows"))
}

fn c3_poisson_weight() -> Check {
    let mut rng = RngStream::new(303, 0).rng();
    let ws = WeightScheme::Estimated { k_prime: 25 };
    for i in 0..100 {
        let spec = ModelSpec::poisson(rng.random_range(-1.0..3.0), rng.random_range(-2.0..10.0)).unwrap();
        let x = {
            let n = rng.random_range(0..120);
            uniform_pattern(&mut rng, n)
        };
        let p: f64 = rng.random_range(0.01..0.99);
        let q = build_quadrature(&Window::unit(), &x, 16);
        let w = ppl_weight(&ws, p, &spec, &x, &q, &RngStream::new(303, i)).map_err(|e| e.to_string())?;
        if w != p {
            return Err(format!("case {i}: weight {w} differs from p = {p}"));
        }
    }
    Ok("100 of 100 cases returned p exactly".into())
}

fn c4_repulsive_bound() -> Check {
    let mut rng = RngStream::new(404, 0).rng();
    let ws = WeightScheme::Estimated { k_prime: 10 };
    let mut min_gap = f64::INFINITY;
    for i in 0..100 {
        let beta = rng.random_range(20.0..200.0);
        let r = rng.random_range(0.01..0.15);
        let spec = if i % 2 == 0 {
            ModelSpec::hard_core(beta, r).unwrap()
        } else {
            ModelSpec::strauss(beta, r, rng.random_range(0.0..1.0)).unwrap()
        };
        let x = {
            let n = rng.random_range(1..100);
            uniform_pattern(&mut rng, n)
        };
        let p: f64 = rng.random_range(0.05..0.95);
        let q = build_quadrature(&Window::unit(), &x, 12);
        let w = ppl_weight(&ws, p, &spec, &x, &q, &RngStream::new(404, i)).map_err(|e| e.to_string())?;
        if w > p {
            return Err(format!("case {i} ({spec}): weight {w} exceeds p = {p}"));
        }
        min_gap = min_gap.min(p - w);
    }
    ensure(true, format!("100 of 100 cases satisfy weight <= p (smallest margin {min_gap:.3e})"))
}

fn c5_hard_core_support() -> Check {
    let spec = ModelSpec::hard_core(100.0, 0.05).unwrap();
    let cfg = McmcConfig::default();
    let root = RngStream::new(505, 0);
    let mut total = 0usize;
    for i in 0..200 {
        let x = sample_gibbs(&spec, &Window::unit(), &cfg, &root.derive(i)).map_err(|e| e.to_string())?;
        if let Some(d) = x.min_pairwise_distance() {
            if d < 0.05 {
                return Err(format!("draw {i} has pair at distance {d}"));
            }
        }
        total += x.len();
    }
    let mean = total as f64 / 200.0;
    ensure((48.0..=72.0).contains(&mean), format!("all 200 draws respect R; mean count {mean:.2}"))
}

fn c6_gnz() -> Check {
    let cfg = McmcConfig::default();
    let poisson = gnz_check(
        &ModelSpec::poisson(2.0, 4.0).unwrap(),
        &TestFunctionSpec::stoyan_grabarnik(),
        500,
        &cfg,
        GNZ_DUMMY,
        &RngStream::new(606, 0),
    )
    .map_err(|e| e.to_string())?;
    let strauss = gnz_check(
        &ModelSpec::strauss(100.0, 0.05, 0.5).unwrap(),
        &TestFunctionSpec::new(0.0, None).unwrap(),
        500,
        &cfg,
        GNZ_DUMMY,
        &RngStream::new(606, 1),
    )
    .map_err(|e| e.to_string())?;
    let detail = format!(
        "poisson mean {:.4} (se {:.4}); strauss mean {:.4} (se {:.4})",
        poisson.mean, poisson.se, strauss.mean, strauss.se
    );
    ensure(poisson.mean.abs() <= 3.0 * poisson.se && strauss.mean.abs() <= 3.0 * strauss.se, detail)
}

fn limit_detail(rows: &[LimitRow]) -> String {
    rows.iter().map(|r| format!("k={}: {:.4}", r.k, r.median_abs_d)).collect::<Vec<_>>().join(", ")
}

fn strictly_decreasing(rows: &[LimitRow]) -> bool {
    rows.windows(2).all(|w| w[1].median_abs_d < w[0].median_abs_d)
}

fn c7_mc_limit() -> Check {
    let spec = ModelSpec::strauss(100.0, 0.05, 0.5).unwrap();
    let tf = TestFunctionSpec::new(0.0, None).unwrap();
    let rows = tf_limit_experiment(
        &spec,
        &tf,
        &[16, 64, 256],
        100,
        LimitMode::MonteCarlo,
        &McmcConfig::default(),
        32,
        &RngStream::new(707, 0),
    )
    .map_err(|e| e.to_string())?;
    ensure(strictly_decreasing(&rows), format!("median |D|: {}", limit_detail(&rows)))
}

fn c8_block_limit() -> Check {
    let spec = ModelSpec::strauss(100.0, 0.05, 0.5).unwrap();
    let tf = TestFunctionSpec::new(0.0, None).unwrap();
    let rows = tf_limit_experiment(
        &spec,
        &tf,
        &[4, 16, 64],
        100,
        LimitMode::Block,
        &McmcConfig::default(),
        32,
        &RngStream::new(808, 0),
    )
    .map_err(|e| e.to_string())?;
    ensure(strictly_decreasing(&rows), format!("median |D|: {}", limit_detail(&rows)))
}

/// Dense midpoint-rule evaluation of a Strauss prediction error, written
/// without the library's intensity or quadrature code.
fn oracle_strauss(beta: f64, r: f64, gamma: f64, w: f64, alpha: f64, train: &[(f64, f64)], val: &[(f64, f64)]) -> f64 {
    let lambda = |u: (f64, f64)| {
        let close = train.iter().filter(|t| ((t.0 - u.0).powi(2) + (t.1 - u.1).powi(2)).sqrt() <= r).count();
        beta * gamma.powi(close as i32)
    };
    let sum: f64 = val.iter().map(|&v| (w * lambda(v)).powf(-alpha)).sum();
    let n = 400;
    let h = 1.0 / n as f64;
    let mut integral = 0.0;
    for i in 0..n {
        for j in 0..n {
            let u = ((i as f64 + 0.5) * h, (j as f64 + 0.5) * h);
            integral += (w * lambda(u)).powf(1.0 - alpha) * h * h;
        }
    }
    sum - integral
}

fn c9_oracle() -> Check {
    let train = [(0.3, 0.4), (0.55, 0.45), (0.7, 0.8)];
    let val = [(0.35, 0.5), (0.62, 0.43)];
    let tp = PointPattern::from_xy(&train, Window::unit()).unwrap();
    let vp = PointPattern::from_xy(&val, Window::unit()).unwrap();
    let q = build_quadrature(&Window::unit(), &vp, 256);
    let mut notes = Vec::new();
    let mut ok = true;
    // the stated configuration, then a wider radius with a non-SG test function
    for (beta, r, gamma, w, alpha) in [(100.0, 0.05, 0.5, 0.2, 1.0), (100.0, 0.12, 0.4, 0.3, 0.5)] {
        let spec = ModelSpec::strauss(beta, r, gamma).unwrap();
        let tf = TestFunctionSpec::new(alpha, None).unwrap();
        let got = prediction_error(&spec, &tf, w, &tp, &vp, &q).map_err(|e| e.to_string())?;
        let want = oracle_strauss(beta, r, gamma, w, alpha, &train, &val);
        let rel = (got - want).abs() / want.abs();
        ok &= rel <= 1e-3;
        notes.push(format!("R={r}, alpha={alpha}: library {got:.6}, oracle {want:.6}, relative difference {rel:.2e}"));
    }
    ensure(ok, notes.join("; "))
}

fn mse_of(res: &StudyResult, param: &str, method: Method, p: Option<f64>) -> f64 {
    let (w, l) = match method {
        Method::Tf => (None, None),
        Method::Ppl => (Some(WeightScheme::FixedP), Some(LossId::L1)),
    };
    res.find(param, method, p, w, l).expect("row present").mse
}

fn desk_study(s: Scenario, p_values: Vec<f64>, seed: u64) -> Result<StudyResult, String> {
    let mut cfg = s.config(seed);
    cfg.n_replications = 50;
    cfg.k = 25;
    cfg.p_values = p_values;
    cfg.weight_schemes = vec![WeightScheme::FixedP];
    cfg.losses = vec![LossSpec::new(LossId::L1)];
    run_study(&cfg).map_err(|e| e.to_string())
}

fn c10_directional() -> Check {
    let mut notes = Vec::new();
    let mut ok = true;
    let ps = ParamGrid::arange(0.1, 0.9, 0.1);
    let res = desk_study(Scenario::Poisson, ps.clone(), 1010)?;
    for param in ["alpha", "beta"] {
        let tf = mse_of(&res, param, Method::Tf, None);
        let losing: Vec<f64> =
            ps.iter().copied().filter(|&p| mse_of(&res, param, Method::Ppl, Some(p)) >= tf).collect();
        ok &= losing.is_empty();
        notes.push(format!("(a) {param}: TF {tf:.3}, PPL not lower at p = {losing:?}"));
    }
    for (tag, s, p) in [("(b)", Scenario::HardCore, 0.2), ("(c)", Scenario::Strauss, 0.5)] {
        let res = desk_study(s, vec![p], 1010)?;
        let tf = mse_of(&res, "beta", Method::Tf, None);
        let ppl = mse_of(&res, "beta", Method::Ppl, Some(p));
        ok &= ppl < tf;
        notes.push(format!("{tag} {s} beta: PPL {ppl:.2} vs TF {tf:.2}"));
    }
    ensure(ok, notes.join("; "))
}

fn c11_geyer_counterexample() -> Check {
    let w = Window::unit();
    let eta = Point::new(0.5, 0.5).unwrap();
    let zeta = Point::new(0.53, 0.5).unwrap();
    let xi = Point::new(0.515, 0.52).unwrap();
    let one = PointPattern::new(vec![eta], w).unwrap();
    let two = PointPattern::new(vec![eta, zeta], w).unwrap();
    let gamma: f64 = 1.5;
    let spec = ModelSpec::geyer(60.0, 0.05, gamma, 1.0).unwrap();
    let e1 = phi2(&spec, xi, &two) / gamma.ln();
    let e2 = phi2(&spec, xi, &one) / gamma.ln();
    let l1 = cond_intensity(&spec, xi, &one);
    let l2 = cond_intensity(&spec, xi, &two);
    ensure(
        (e1 - 1.0).abs() < 1e-12 && (e2 - 2.0).abs() < 1e-12 && l1 > l2,
        format!("exponents {e1} and {e2}; intensities {l1:.4} > {l2:.4}"),
    )
}

fn c12_determinism() -> Check {
    let cfg = small_study(1212);
    let csv = |res: &StudyResult| {
        let mut buf = Vec::new();
        res.write_csv(&mut buf).unwrap();
        buf
    };
    let a = csv(&run_study(&cfg).map_err(|e| e.to_string())?);
    let b = csv(&run_study(&cfg).map_err(|e| e.to_string())?);
    let mut reversed: Vec<_> = (0..cfg.n_replications).rev().map(|r| (r, run_replication(&cfg, r))).collect();
    reversed.sort_by_key(|(r, _)| *r);
    let results: Vec<_> = reversed.into_iter().map(|(_, res)| res).collect();
    let c = csv(&aggregate(&cfg, &results).map_err(|e| e.to_string())?);
    ensure(
        a == b && a == c,
        format!("{} bytes; repeat identical: {}; reversed order identical: {}", a.len(), a == b, a == c),
    )
}

type Criterion = (u32, &'static str, fn() -> Check);

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        (1, "SG integral identity", c1_sg_integral),
        (2, "MSE identity", c2_mse_identity),
        (3, "Poisson weight exactness", c3_poisson_weight),
        (4, "repulsive weight bound", c4_repulsive_bound),
        (5, "hard-core support", c5_hard_core_support),
        (6, "GNZ unbiasedness", c6_gnz),
        (7, "Monte-Carlo CV limit", c7_mc_limit),
        (8, "block CV limit", c8_block_limit),
        (9, "dense-grid oracle", c9_oracle),
        (10, "directional study", c10_directional),
        (11, "Geyer counterexample", c11_geyer_counterexample),
        (12, "determinism", c12_determinism),
    ];
    let wanted: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (id, name, run) in criteria {
        if !wanted.is_empty() && !wanted.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(d) => println!("PASS {id:>2} {name}: {d} [{secs:.1}s]"),
            Err(d) => {
                failed += 1;
                println!("FAIL {id:>2} {name}: {d} [{secs:.1}s]");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
