//! Cross-check against an independent COBYLA implementation and the fitting
//! driver's contract.

use qwalk_core::objective::{LabelKind, TargetDistribution};
use qwalk_core::optimize::{cobyla_minimize, cobyla_minimize_constrained, OptimizerOptions};
use qwalk_core::{fit, FitSettings, MultiSsqwConfig};

type Cons = fn(&[f64], &mut ()) -> f64;

fn reference(f: impl Fn(&[f64]) -> f64, x0: &[f64], cons: &[Cons], budget: usize) -> f64 {
    let bounds: Vec<(f64, f64)> = x0.iter().map(|_| (-1e6, 1e6)).collect();
    match cobyla::minimize(
        |x: &[f64], _: &mut ()| f(x),
        x0,
        &bounds,
        cons,
        (),
        budget,
        cobyla::RhoBeg::All(0.5),
        None,
    ) {
        Ok((_, _, f)) => f,
        Err((_, _, f)) => f,
    }
}

fn budget(max_evaluations: usize) -> OptimizerOptions {
    OptimizerOptions {
        max_evaluations,
        ..OptimizerOptions::default()
    }
}

fn sphere(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

fn rosenbrock(x: &[f64]) -> f64 {
    100.0 * (x[1] - x[0] * x[0]).powi(2) + (1.0 - x[0]).powi(2)
}

#[test]
fn sphere_agrees_with_reference() {
    for x0 in [vec![1.0, 1.0], vec![0.5, -2.0, 1.5, 0.3, -0.7]] {
        let ours = cobyla_minimize(sphere, &x0, &budget(1000)).unwrap();
        let theirs = reference(sphere, &x0, &[], 1000);
        assert!(ours.f < 1e-6);
        assert!((ours.f - theirs).abs() < 1e-2, "{} vs {theirs}", ours.f);
    }
}

#[test]
fn rosenbrock_agrees_with_reference() {
    let ours = cobyla_minimize(rosenbrock, &[-1.2, 1.0], &budget(5000)).unwrap();
    let theirs = reference(rosenbrock, &[-1.2, 1.0], &[], 5000);
    assert!(ours.f < 1e-2);
    assert!((ours.f - theirs).abs() < 1e-2, "{} vs {theirs}", ours.f);
}

#[test]
fn constrained_quadratic_agrees_with_reference() {
    let f = |x: &[f64]| (x[0] - 1.0).powi(2) + (x[1] - 2.0).powi(2);
    let cons: [Cons; 1] = [|x, _| 1.0 - x[0] - x[1]];
    let ours = cobyla_minimize_constrained(
        |x: &[f64], c: &mut [f64]| {
            c[0] = 1.0 - x[0] - x[1];
            f(x)
        },
        1,
        &[0.0, 0.0],
        &budget(1000),
    )
    .unwrap();
    let theirs = reference(f, &[0.0, 0.0], &cons, 1000);
    assert!(ours.max_violation < 1e-6);
    assert!((ours.f - 2.0).abs() < 1e-4);
    assert!((ours.f - theirs).abs() < 1e-2, "{} vs {theirs}", ours.f);
}

#[test]
fn trace_is_monotone_and_bounded_by_budget() {
    for b in [10, 57, 300] {
        let out = cobyla_minimize(rosenbrock, &[-1.2, 1.0], &budget(b)).unwrap();
        assert!(out.evaluations <= b);
        assert_eq!(out.trace.len(), out.evaluations);
        assert!(out.trace.windows(2).all(|w| w[1] <= w[0]));
    }
}

fn delta(n: usize, at: usize) -> TargetDistribution {
    let mut probs = vec![0.0; 1 << n];
    probs[at] = 1.0;
    TargetDistribution::new(
        "delta",
        LabelKind::TrialCount,
        probs,
        (0..1 << n).map(|i| i as f64).collect(),
    )
    .unwrap()
}

#[test]
fn fit_recovers_reachable_delta() {
    let cfg = MultiSsqwConfig::new(4, 2, 2, 5).unwrap();
    let r = fit(&cfg, &delta(4, 9), &FitSettings::new(5, 2024)).unwrap();
    assert!(r.best_loss.combined < 1e-4, "{:?}", r.best_loss);
}

#[test]
fn fit_is_deterministic_and_independent_of_thread_count() {
    let cfg = MultiSsqwConfig::new(3, 2, 2, 3).unwrap();
    let target = TargetDistribution::new(
        "t",
        LabelKind::TrialCount,
        vec![0.05, 0.1, 0.2, 0.3, 0.2, 0.1, 0.05, 0.0],
        (0..8).map(f64::from).collect(),
    )
    .unwrap();
    let settings = FitSettings::new(4, 17);
    let one = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();
    let three = rayon::ThreadPoolBuilder::new()
        .num_threads(3)
        .build()
        .unwrap();
    let a = one.install(|| fit(&cfg, &target, &settings)).unwrap();
    let b = three.install(|| fit(&cfg, &target, &settings)).unwrap();
    assert_eq!(a.best_params, b.best_params);
    assert_eq!(a.best_trace, b.best_trace);
    assert_eq!(a.restart_final_losses, b.restart_final_losses);
    let min = a
        .restart_final_losses
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    assert_eq!(a.best_loss.combined, min);
}
