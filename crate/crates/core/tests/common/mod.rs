//! Reference models shared by the integration tests. They are written from
//! the operator definitions directly and share no code with the simulator.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Coin operator for angles (θ, φ, λ), written out from its definition.
pub fn coin(theta: f64, phi: f64, lambda: f64) -> [[Complex64; 2]; 2] {
    let (s, co) = ((theta / 2.0).sin(), (theta / 2.0).cos());
    [
        [c(co, 0.0), -Complex64::from_polar(s, lambda)],
        [
            Complex64::from_polar(s, phi),
            Complex64::from_polar(co, lambda + phi),
        ],
    ]
}

/// Basis index of |coin⟩ ⊗ |x⟩ (coin is the least significant bit).
pub fn index(coin_bit: usize, x: usize) -> usize {
    (x << 1) | coin_bit
}

/// `C ⊗ I` on a register of `2^n` positions.
pub fn coin_operator(g: [[Complex64; 2]; 2], n: usize) -> CMatrix {
    let m = 1usize << n;
    let mut u = CMatrix::zeros(2 * m, 2 * m);
    for x in 0..m {
        for r in 0..2 {
            for col in 0..2 {
                u[(index(r, x), index(col, x))] = g[r][col];
            }
        }
    }
    u
}

/// Moves the walker by `delta` sites (cyclically) when the coin reads `coin_bit`.
pub fn conditional_shift(coin_bit: usize, delta: i64, n: usize) -> CMatrix {
    let m = 1i64 << n;
    let mut u = CMatrix::zeros(2 * m as usize, 2 * m as usize);
    for x in 0..m {
        for b in 0..2usize {
            let y = if b == coin_bit {
                (x + delta).rem_euclid(m)
            } else {
                x
            };
            u[(index(b, y as usize), index(b, x as usize))] = c(1.0, 0.0);
        }
    }
    u
}

/// Split-step walker `S₋ C₂ S₊ C₁` from six angles.
pub fn walker(angles: &[f64], n: usize) -> CMatrix {
    let c1 = coin_operator(coin(angles[0], angles[1], angles[2]), n);
    let c2 = coin_operator(coin(angles[3], angles[4], angles[5]), n);
    conditional_shift(1, -1, n) * c2 * conditional_shift(0, 1, n) * c1
}

/// Full evolution (without the initial coin) of a multi-walker circuit.
pub fn evolution(params: &[f64], num_walkers: usize, steps: usize, n: usize) -> CMatrix {
    let dim = 2usize << n;
    let mut layer = CMatrix::identity(dim, dim);
    for w in 0..num_walkers {
        layer = walker(&params[3 + 6 * w..9 + 6 * w], n) * layer;
    }
    let mut u = CMatrix::identity(dim, dim);
    for _ in 0..steps {
        u = &layer * u;
    }
    u
}

/// Final position distribution of the circuit from |↑⟩ ⊗ |x₀⟩.
pub fn distribution(
    params: &[f64],
    num_walkers: usize,
    steps: usize,
    n: usize,
    x0: usize,
) -> Vec<f64> {
    let dim = 2usize << n;
    let mut psi = DVector::from_element(dim, c(0.0, 0.0));
    psi[index(0, x0)] = c(1.0, 0.0);
    let init = coin_operator(coin(params[0], params[1], params[2]), n);
    let out = evolution(params, num_walkers, steps, n) * init * psi;
    (0..1usize << n)
        .map(|x| out[index(0, x)].norm_sqr() + out[index(1, x)].norm_sqr())
        .collect()
}

/// Largest entry of `|U†U - I|`.
pub fn unitarity_error(u: &CMatrix) -> f64 {
    let p = u.adjoint() * u;
    let mut worst: f64 = 0.0;
    for r in 0..p.nrows() {
        for col in 0..p.ncols() {
            let expect = if r == col { 1.0 } else { 0.0 };
            worst = worst.max((p[(r, col)] - c(expect, 0.0)).norm());
        }
    }
    worst
}

/// Exact binomial coefficient.
pub fn choose(n: u64, k: u64) -> u128 {
    let mut r: u128 = 1;
    for i in 0..k {
        r = r * (n - i) as u128 / (i + 1) as u128;
    }
    r
}

/// `B(n, p)` by convolving `n` Bernoulli trials.
pub fn bernoulli_convolution(n: usize, p: f64) -> Vec<f64> {
    let mut dist = vec![1.0];
    for _ in 0..n {
        let mut next = vec![0.0; dist.len() + 1];
        for (k, &q) in dist.iter().enumerate() {
            next[k] += q * (1.0 - p);
            next[k + 1] += q * p;
        }
        dist = next;
    }
    dist
}

/// `E[max(S_T - K, 0)]` for `ln S_T ~ N(mu, sigma²)` by composite Simpson
/// integration over the normal variable.
pub fn lognormal_call_integral(mu: f64, sigma: f64, strike: f64) -> f64 {
    let steps = 200_000;
    let (lo, hi) = (-12.0, 12.0);
    let h = (hi - lo) / steps as f64;
    let f = |z: f64| {
        let s = (mu + sigma * z).exp();
        (s - strike).max(0.0) * (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt()
    };
    let mut sum = f(lo) + f(hi);
    for i in 1..steps {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(lo + i as f64 * h);
    }
    sum * h / 3.0
}
