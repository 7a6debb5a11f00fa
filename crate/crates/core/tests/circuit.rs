mod common;

use std::f64::consts::TAU;

use num_complex::Complex64;
use proptest::prelude::*;
use qwalk_core::objective::{evaluate, LabelKind, TargetDistribution};
use qwalk_core::walk::{
    apply_decrement, apply_increment, dtqw_distribution, run_multi_ssqw, Coin, DtqwCoin,
    InitialCoinState, MultiSsqwCircuit,
};
use qwalk_core::{MultiSsqwConfig, ParamVector, StateVector};

fn angles(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0..TAU, len)
}

fn small_circuit() -> impl Strategy<Value = (MultiSsqwConfig, Vec<f64>)> {
    (1usize..=3, 1usize..=4, 1usize..=4)
        .prop_flat_map(|(n, num, t)| (Just((n, num, t)), 0..1usize << n, angles(3 + 6 * num)))
        .prop_map(|((n, num, t), x0, p)| (MultiSsqwConfig::new(n, num, t, x0).unwrap(), p))
}

fn random_state(n_qubits: usize, seed: &[f64]) -> StateVector {
    let amps: Vec<Complex64> = (0..1usize << n_qubits)
        .map(|i| {
            Complex64::new(
                seed[(2 * i) % seed.len()] - 3.0,
                seed[(2 * i + 1) % seed.len()] - 3.0,
            )
        })
        .collect();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    StateVector::from_amplitudes(amps.into_iter().map(|a| a / norm).collect()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn matches_dense_operator((cfg, p) in small_circuit()) {
        let sim = MultiSsqwCircuit::new(&cfg, &ParamVector(p.clone())).unwrap().final_state().unwrap();
        let n = cfg.position_qubits;
        let u = common::evolution(&p, cfg.num_walkers, cfg.steps, n)
            * common::coin_operator(common::coin(p[0], p[1], p[2]), n);
        let col = common::index(0, cfg.initial_position);
        for (i, a) in sim.amplitudes().iter().enumerate() {
            prop_assert!((a - u[(i, col)]).norm() < 1e-12, "amplitude {i}: {a} vs {}", u[(i, col)]);
        }
        let expected = common::distribution(&p, cfg.num_walkers, cfg.steps, n, cfg.initial_position);
        let got = run_multi_ssqw(&cfg, &ParamVector(p)).unwrap();
        for (a, b) in got.iter().zip(&expected) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn walker_operator_is_unitary(p in angles(6), n in 1usize..=3) {
        prop_assert!(common::unitarity_error(&common::walker(&p, n)) < 1e-12);
    }

    #[test]
    fn norm_is_preserved(n in 1usize..=5, num in 1usize..=4, t in 1usize..=4, p in angles(27), x in 0usize..32) {
        let cfg = MultiSsqwConfig::new(n, num, t, x % (1 << n)).unwrap();
        let params = ParamVector(p[..3 + 6 * num].to_vec());
        let state = MultiSsqwCircuit::new(&cfg, &params).unwrap().final_state().unwrap();
        prop_assert!((state.norm_sqr() - 1.0).abs() < 1e-10);
        let probs = run_multi_ssqw(&cfg, &params).unwrap();
        prop_assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn evolution_is_linear((cfg, p) in small_circuit(), s1 in angles(8), s2 in angles(8), a in -2.0f64..2.0, b in -2.0f64..2.0) {
        let circ = MultiSsqwCircuit::new(&cfg, &ParamVector(p)).unwrap();
        let q = cfg.position_qubits + 1;
        let (psi1, psi2) = (random_state(q, &s1), random_state(q, &s2));
        let (ca, cb) = (Complex64::new(a, 0.3), Complex64::new(b, -0.7));
        let mix: Vec<Complex64> = psi1.amplitudes().iter().zip(psi2.amplitudes()).map(|(x, y)| ca * x + cb * y).collect();
        let scale = mix.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        prop_assume!(scale > 1e-6);
        let (ca, cb) = (ca / scale, cb / scale);
        let mut mixed = StateVector::from_amplitudes(mix.iter().map(|v| v / scale).collect()).unwrap();
        let (mut e1, mut e2) = (psi1.clone(), psi2.clone());
        circ.apply_evolution(&mut e1).unwrap();
        circ.apply_evolution(&mut e2).unwrap();
        circ.apply_evolution(&mut mixed).unwrap();
        for i in 0..mixed.dim() {
            let expect = ca * e1.amplitudes()[i] + cb * e2.amplitudes()[i];
            prop_assert!((mixed.amplitudes()[i] - expect).norm() < 1e-12);
        }
    }

    #[test]
    fn loss_is_periodic_in_every_angle((cfg, p) in small_circuit(), which in 0usize..27, sign in prop::bool::ANY) {
        let m = cfg.num_positions();
        let probs = vec![1.0 / m as f64; m];
        let labels = (0..m).map(|i| i as f64).collect();
        let target = TargetDistribution::new("flat", LabelKind::TrialCount, probs, labels).unwrap();
        let mut shifted = p.clone();
        let k = which % p.len();
        shifted[k] += if sign { TAU } else { -TAU };
        let a = evaluate(&ParamVector(p), &cfg, &target, 1.0).unwrap();
        let b = evaluate(&ParamVector(shifted), &cfg, &target, 1.0).unwrap();
        prop_assert!((a.combined - b.combined).abs() < 1e-12);
    }

    #[test]
    fn shifts_are_cyclic_inverses(n in 1usize..=5, seed in angles(8)) {
        let mut s = random_state(n + 1, &seed);
        let orig = s.clone();
        for coin in [Coin::Up, Coin::Down] {
            apply_increment(&mut s, coin).unwrap();
            apply_decrement(&mut s, coin).unwrap();
        }
        for (a, b) in s.amplitudes().iter().zip(orig.amplitudes()) {
            prop_assert!((a - b).norm() < 1e-15);
        }
        for _ in 0..1usize << n {
            apply_increment(&mut s, Coin::Down).unwrap();
        }
        for (a, b) in s.amplitudes().iter().zip(orig.amplitudes()) {
            prop_assert!((a - b).norm() < 1e-15);
        }
    }
}

#[test]
fn zero_coins_translate_deterministically() {
    for n in 1..=5usize {
        for num in 1..=10usize {
            for t in 1..=10usize {
                let x0 = (3 * num + t) % (1 << n);
                let cfg = MultiSsqwConfig::new(n, num, t, x0).unwrap();
                let probs = run_multi_ssqw(&cfg, &ParamVector::zeros(num)).unwrap();
                let end = (x0 + num * t) % (1 << n);
                assert!((probs[end] - 1.0).abs() < 1e-12, "n={n} num={num} t={t}");
            }
        }
    }
}

#[test]
fn hadamard_walk_from_symmetric_coin_is_symmetric() {
    for t in 1..=50 {
        let n = qwalk_core::walk::min_dtqw_qubits(t);
        let p = dtqw_distribution(DtqwCoin::H, InitialCoinState::Symmetric, t, n).unwrap();
        let c = 1usize << (n - 1);
        for d in 1..=t.min(c - 1) {
            assert!((p[c + d] - p[c - d]).abs() < 1e-10, "t={t} d={d}");
        }
    }
}

#[test]
fn hadamard_walk_two_steps() {
    let p = dtqw_distribution(DtqwCoin::H, InitialCoinState::Up, 2, 3).unwrap();
    let c = 4;
    assert!((p[c - 2] - 0.25).abs() < 1e-15);
    assert!((p[c] - 0.5).abs() < 1e-15);
    assert!((p[c + 2] - 0.25).abs() < 1e-15);
}
