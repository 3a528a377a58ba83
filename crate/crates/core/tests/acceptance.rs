//! The acceptance gate. Each test prints one PASS/FAIL line with its
//! runtime and then asserts.

mod common;

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{bl_oracle, median, prohorov_oracle, random_measure, report};
use qrboot::bootstrap::{block_schedule, resample, resample_indices, BootstrapScheme};
use qrboot::estimators::EstimatorSpec;
use qrboot::measures::{
    dn_distance, empirical_measure, product_measure, uniform_mixture, BoxSpace, DiscreteMeasure, Point, ProductNorm,
    ProductSpace,
};
use qrboot::prob_metrics::{bl_distance, bl_distance_with, prohorov_distance, BlOptions, BlSolver};
use qrboot::processes::{
    exact_alpha_markov, generate, varadarajan_diagnostic, weak_bi_mixing_average, BaseLaw, ContaminationSpec,
    ProcessKind, ProcessSpec,
};
use qrboot::robustness::{run_experiment, ExperimentConfig, Method, NRecord};

fn simplex_only() -> BlOptions {
    BlOptions {
        solver: BlSolver::Simplex,
        ..BlOptions::default()
    }
}

fn line() -> BoxSpace {
    BoxSpace::unit(1)
}

#[test]
fn c01_bl_matches_grid_oracle() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let p = random_measure(&mut rng, 6, 1);
        let q = random_measure(&mut rng, 6, 1);
        let oracle = bl_oracle(&p, &q);
        let exact = bl_distance(&p, &q, &line()).unwrap().0;
        let lp = bl_distance_with(&p, &q, &line(), &simplex_only()).unwrap().0;
        worst = worst.max((exact - oracle).abs()).max((lp - oracle).abs());
    }
    let fast = t0.elapsed() < Duration::from_secs(60);
    let pass = worst <= 1e-4 && fast;
    report(1, "d_BL vs grid oracle", pass, &format!("max |diff| = {worst:.2e} over 50 pairs"), t0);
    assert!(pass);
}

#[test]
fn c02_dirac_closed_form() {
    let t0 = Instant::now();
    let mut worst: f64 = 0.0;
    for t in [0.1, 0.5, 1.0] {
        let p = DiscreteMeasure::dirac(Point::scalar(0.0));
        let q = DiscreteMeasure::dirac(Point::scalar(t));
        let want = 2.0 * t / (2.0 + t);
        let exact = bl_distance(&p, &q, &line()).unwrap().0;
        let lp = bl_distance_with(&p, &q, &line(), &simplex_only()).unwrap().0;
        worst = worst.max((exact - want).abs()).max((lp - want).abs());
    }
    let pass = worst <= 1e-6;
    report(2, "dirac closed form 2t/(2+t)", pass, &format!("max |diff| = {worst:.2e}"), t0);
    assert!(pass);
}

#[test]
fn c03_prohorov_matches_subset_oracle() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let plane = BoxSpace::unit(2);
    let mut worst: f64 = 0.0;
    for _ in 0..30 {
        let p = random_measure(&mut rng, 5, 2);
        let q = random_measure(&mut rng, 5, 2);
        let got = prohorov_distance(&p, &q, &plane).unwrap();
        worst = worst.max((got - prohorov_oracle(&p, &q)).abs());
    }
    let mut dirac_worst: f64 = 0.0;
    for t in [0.05, 0.3, 0.99, 1.0, 1.7] {
        let space = BoxSpace::interval(0.0, 2.0);
        let p = DiscreteMeasure::dirac(Point::scalar(0.0));
        let q = DiscreteMeasure::dirac(Point::scalar(t));
        let got = prohorov_distance(&p, &q, &space).unwrap();
        dirac_worst = dirac_worst.max((got - f64::min(t, 1.0)).abs());
    }
    let pass = worst <= 1e-6 && dirac_worst <= 1e-9;
    report(
        3,
        "Prohorov vs subset oracle",
        pass,
        &format!("max |diff| = {worst:.2e}, dirac max |diff| = {dirac_worst:.2e}"),
        t0,
    );
    assert!(pass);
}

#[test]
fn c04_metric_axioms() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let plane = BoxSpace::unit(2);
    let tol = 1e-6;
    let mut failures = Vec::new();
    for k in 0..200 {
        let [a, b, c] = [0, 1, 2].map(|_| random_measure(&mut rng, 4, 2));
        let bl = |x: &DiscreteMeasure<Point>, y: &DiscreteMeasure<Point>| bl_distance(x, y, &plane).unwrap().0;
        let pr = |x: &DiscreteMeasure<Point>, y: &DiscreteMeasure<Point>| prohorov_distance(x, y, &plane).unwrap();
        for (name, d) in [("d_BL", &bl as &dyn Fn(_, _) -> f64), ("prohorov", &pr)] {
            let (ab, ba, bc, ac) = (d(&a, &b), d(&b, &a), d(&b, &c), d(&a, &c));
            if (ab - ba).abs() > tol || ac > ab + bc + tol {
                failures.push(format!("{name} triple {k}"));
            }
        }
        let n = rng.random_range(1..=8);
        let [x, y, z]: [Vec<Point>; 3] =
            [0, 1, 2].map(|_| (0..n).map(|_| Point::scalar(rng.random::<f64>())).collect());
        let dn = |u: &[Point], v: &[Point]| dn_distance(u, v, &line()).unwrap();
        let (xy, yx, yz, xz) = (dn(&x, &y), dn(&y, &x), dn(&y, &z), dn(&x, &z));
        if (xy - yx).abs() > tol || xz > xy + yz + tol {
            failures.push(format!("d_n triple {k}"));
        }
    }
    let pass = failures.is_empty();
    let detail = if pass {
        "600 checks hold".to_string()
    } else {
        format!("violations: {}", failures.join(", "))
    };
    report(4, "metric axioms for d_BL, Prohorov, d_n", pass, &detail, t0);
    assert!(pass);
}

#[test]
fn c05_mixture_below_product_distance() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = f64::NEG_INFINITY;
    for k in 0..50 {
        let n = 2 + k % 2;
        let ps: Vec<_> = (0..n).map(|_| random_measure(&mut rng, 3, 1)).collect();
        let qs: Vec<_> = (0..n).map(|_| random_measure(&mut rng, 3, 1)).collect();
        let joint = bl_distance(
            &product_measure(&ps).unwrap(),
            &product_measure(&qs).unwrap(),
            &ProductSpace::new(line(), n, ProductNorm::Max),
        )
        .unwrap()
        .0;
        let mixed = bl_distance(&uniform_mixture(&ps).unwrap(), &uniform_mixture(&qs).unwrap(), &line())
            .unwrap()
            .0;
        worst = worst.max(mixed - joint);
    }
    let pass = worst <= 1e-7;
    report(
        5,
        "mixture distance below product distance",
        pass,
        &format!("max (mixture - product) = {worst:.2e} over 50 pairs"),
        t0,
    );
    assert!(pass);
}

fn two_state(p: f64, q: f64) -> ProcessSpec {
    ProcessSpec::new(
        ProcessKind::MarkovChain {
            transition: vec![vec![1.0 - p, p], vec![q, 1.0 - q]],
            states: None,
        },
        line(),
    )
}

#[test]
fn c06_exact_alpha_coefficients() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let p: f64 = rng.random_range(0.01..0.99);
        let q: f64 = rng.random_range(0.01..0.99);
        let chain = vec![vec![1.0 - p, p], vec![q, 1.0 - q]];
        let (pi0, pi1) = (q / (p + q), p / (p + q));
        for lag in 1..=10 {
            let want = pi0 * pi1 * (1.0 - p - q).abs().powi(lag as i32);
            worst = worst.max((exact_alpha_markov(&chain, lag).unwrap() - want).abs());
        }
    }
    let mut decays = true;
    for (p, q) in [(0.2, 0.3), (0.5, 0.5), (0.05, 0.1), (0.9, 0.7)] {
        let spec = two_state(p, q);
        let a10 = weak_bi_mixing_average(&spec, 10).unwrap();
        let a100 = weak_bi_mixing_average(&spec, 100).unwrap();
        decays &= a100 < a10;
    }
    let pass = worst <= 1e-12 && decays;
    report(
        6,
        "exact alpha coefficients",
        pass,
        &format!("max |diff| = {worst:.2e}, bi-mixing average decays: {decays}"),
        t0,
    );
    assert!(pass);
}

#[test]
fn c07_block_schedule() {
    let t0 = Instant::now();
    let mut ok = true;
    for e in [0.1, 0.25, 0.3, 0.33] {
        ok &= block_schedule(100, e).unwrap().b == block_schedule(127, e).unwrap().b;
        let mut last = 0;
        for n in 2..=(1usize << 20) {
            let b = block_schedule(n, e).unwrap().b;
            ok &= b >= last;
            last = b;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for k in 0..100 {
        let n = rng.random_range(1..5000);
        let e = rng.random_range(0.01..0.333);
        let idx = resample_indices(n, &BootstrapScheme::moving_block(e), k).unwrap();
        ok &= idx.len() == n && idx.iter().all(|&i| i < n);
    }
    report(7, "dyadic block schedule", ok, "b(100) = b(127), monotone to 2^20, resample length n", t0);
    assert!(ok);
}

#[test]
fn c08_varadarajan_decay() {
    let t0 = Instant::now();
    let grid: Vec<Point> = (0..10).map(|k| Point::scalar((k as f64 + 0.5) / 10.0)).collect();
    let target = DiscreteMeasure::uniform(grid).unwrap();
    let spec = ProcessSpec::new(ProcessKind::Iid(BaseLaw::Discrete { measure: target.clone() }), line());
    let rows = varadarajan_diagnostic(&spec, &target, &[100, 1600], 50, 8).unwrap();
    let (m100, m1600) = (rows[0].median, rows[1].median);
    let pass = m1600 <= 0.6 * m100 && t0.elapsed() < Duration::from_secs(120);
    report(
        8,
        "Varadarajan decay",
        pass,
        &format!("median d_BL {m100:.4} at n=100, {m1600:.4} at n=1600"),
        t0,
    );
    assert!(pass);
}

fn base_config(estimator: &str, fraction: f64, n: usize, seed: u64) -> ExperimentConfig {
    let p = ProcessSpec::new(
        ProcessKind::Iid(BaseLaw::UniformOn { lo: 0.0, hi: 1.0 }),
        BoxSpace::interval(0.0, 4.0),
    );
    let mut c = ExperimentConfig::new(p, BootstrapScheme::efron(), EstimatorSpec::named(estimator), vec![n], seed);
    c.contamination_q = Some(ContaminationSpec::gross_error(fraction, None));
    c
}

/// The fixed seed of the published contrast configs.
const CONTRAST_SEED: u64 = 20240601;

fn single(c: &ExperimentConfig) -> NRecord {
    let mut r = run_experiment(c).unwrap();
    r.records.remove(0)
}

#[test]
fn c09_identical_arms_give_zero() {
    let t0 = Instant::now();
    let mut ok = true;
    let mut seen = Vec::new();
    for (est, scheme) in [("mean", BootstrapScheme::efron()), ("median", BootstrapScheme::moving_block(0.25))] {
        let p = ProcessSpec::iid_uniform(line());
        let mut c = ExperimentConfig::new(p, scheme, EstimatorSpec::named(est), vec![20, 60], 9);
        c.outer_reps = 16;
        c.inner_reps = 100;
        for r in run_experiment(&c).unwrap().records {
            ok &= r.nested == Some(0.0) && r.coupled == Some(0.0);
            seen.push(format!("{est} n={}: {:?}/{:?}", r.n, r.nested, r.coupled));
        }
    }
    report(9, "zero-contamination null", ok, &seen.join("; "), t0);
    assert!(ok);
}

#[test]
fn c10_median_beats_mean_under_gross_errors() {
    let t0 = Instant::now();
    let med = single(&base_config("median", 0.05, 200, CONTRAST_SEED));
    let mean = single(&base_config("mean", 0.05, 200, CONTRAST_SEED));
    let (dm, em) = (med.nested.unwrap(), med.err_nested.unwrap());
    let (dx, ex) = (mean.nested.unwrap(), mean.err_nested.unwrap());
    let pass = dm < dx - em - ex && t0.elapsed() < Duration::from_secs(300);
    report(
        10,
        "robustness contrast",
        pass,
        &format!("median {dm:.4} +- {em:.4}, mean {dx:.4} +- {ex:.4}"),
        t0,
    );
    assert!(pass);
}

#[test]
fn c11_monotone_contamination_sweep() {
    let t0 = Instant::now();
    let runs: Vec<(f64, f64, f64)> = [0.2, 0.1, 0.05, 0.0]
        .into_iter()
        .map(|f| {
            let r = single(&base_config("median", f, 200, CONTRAST_SEED));
            (f, r.nested.unwrap(), r.err_nested.unwrap())
        })
        .collect();
    let pass = runs.windows(2).all(|w| w[1].1 <= w[0].1 + w[0].2 + w[1].2);
    let detail = runs
        .iter()
        .map(|(f, d, e)| format!("{f}: {d:.4}+-{e:.4}"))
        .collect::<Vec<_>>()
        .join(", ");
    report(11, "monotone contamination sweep", pass, &detail, t0);
    assert!(pass);
}

#[test]
fn c12_block_resample_approaches_path() {
    let t0 = Instant::now();
    let spec = two_state(0.2, 0.3);
    let scheme = BootstrapScheme::moving_block(0.25);
    let med_at = |n: usize| {
        let path = generate(&spec, n, 12).unwrap();
        let emp = empirical_measure(&path).unwrap();
        let d: Vec<f64> = (0..50)
            .map(|r| {
                let star = resample(&path, &scheme, qrboot::rng::derive(12, r)).unwrap();
                bl_distance(&empirical_measure(&star).unwrap(), &emp, &line()).unwrap().0
            })
            .collect();
        median(&d)
    };
    let (small, large) = (med_at(1 << 8), med_at(1 << 12));
    let pass = large <= 0.6 * small;
    report(
        12,
        "moving block resample converges",
        pass,
        &format!("median d_BL {small:.4} at 2^8, {large:.4} at 2^12"),
        t0,
    );
    assert!(pass);
}

#[test]
fn c13_coupled_dominates_nested() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut worst = f64::NEG_INFINITY;
    for k in 0..20 {
        let est = ["mean", "median", "trimmed_mean"][k % 3];
        let n = rng.random_range(10..40);
        let mut c = base_config(est, rng.random_range(0.0..0.3), n, rng.random());
        c.outer_reps = 8;
        c.inner_reps = 60;
        c.method = Method::Both;
        if k % 2 == 1 {
            c.scheme = BootstrapScheme::moving_block(0.25);
        }
        let r = single(&c);
        worst = worst.max(r.nested.unwrap() - r.coupled.unwrap() - r.err_coupled.unwrap());
    }
    let pass = worst <= 0.0;
    report(
        13,
        "coupled expectation dominates nested distance",
        pass,
        &format!("max (nested - coupled - err) = {worst:.2e}"),
        t0,
    );
    assert!(pass);
}
