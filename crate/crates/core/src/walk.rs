//! Discrete-time, split-step and multi-walker split-step quantum walks.
//!
//! The coin is qubit 0 with `|↑⟩ = |0⟩` and `|↓⟩ = |1⟩`; the position register
//! occupies qubits `1..=N` and is cyclic on `2^N` sites.

use std::f64::consts::{FRAC_1_SQRT_2, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::statevector::{Gate2x2, StateVector};

/// Internal state of the walker.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Coin {
    Up,
    Down,
}

impl Coin {
    /// Value of the coin qubit encoding this state.
    pub fn bit(self) -> bool {
        matches!(self, Coin::Down)
    }
}

/// Angles of the general single-qubit coin.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CoinParams {
    pub theta: f64,
    pub phi: f64,
    pub lambda: f64,
}

impl CoinParams {
    pub const ZERO: CoinParams = CoinParams {
        theta: 0.0,
        phi: 0.0,
        lambda: 0.0,
    };

    pub fn new(theta: f64, phi: f64, lambda: f64) -> Self {
        CoinParams { theta, phi, lambda }
    }

    /// Same angles reduced into `[0, 2π)`.
    pub fn canonical(&self) -> Self {
        CoinParams {
            theta: wrap_angle(self.theta),
            phi: wrap_angle(self.phi),
            lambda: wrap_angle(self.lambda),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.theta.is_finite() && self.phi.is_finite() && self.lambda.is_finite()
    }

    pub fn matrix(&self) -> Result<Gate2x2> {
        coin_matrix(self)
    }
}

/// Reduces an angle into `[0, 2π)`.
pub fn wrap_angle(a: f64) -> f64 {
    let w = a.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// `[[cos(θ/2), -e^{iλ} sin(θ/2)], [e^{iφ} sin(θ/2), e^{i(λ+φ)} cos(θ/2)]]`
pub fn coin_matrix(p: &CoinParams) -> Result<Gate2x2> {
    if !p.is_finite() {
        return Err(domain(format!("non-finite coin angles {p:?}")));
    }
    let (s, c) = (p.theta / 2.0).sin_cos();
    let e_lambda = Complex64::from_polar(1.0, p.lambda);
    let e_phi = Complex64::from_polar(1.0, p.phi);
    let e_both = Complex64::from_polar(1.0, p.lambda + p.phi);
    Ok(Gate2x2([
        [Complex64::new(c, 0.0), -e_lambda * s],
        [e_phi * s, e_both * c],
    ]))
}

/// The two coins of one split-step walker.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct WalkerParams {
    pub coin1: CoinParams,
    pub coin2: CoinParams,
}

impl WalkerParams {
    pub fn new(coin1: CoinParams, coin2: CoinParams) -> Self {
        WalkerParams { coin1, coin2 }
    }
}

/// Shape of a multi-walker split-step circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiSsqwConfig {
    pub position_qubits: usize,
    pub num_walkers: usize,
    pub steps: usize,
    pub initial_position: usize,
}

impl MultiSsqwConfig {
    pub fn new(
        position_qubits: usize,
        num_walkers: usize,
        steps: usize,
        initial_position: usize,
    ) -> Result<Self> {
        let config = MultiSsqwConfig {
            position_qubits,
            num_walkers,
            steps,
            initial_position,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.position_qubits == 0 || self.position_qubits >= StateVector::MAX_QUBITS {
            return Err(domain(format!(
                "position_qubits must be in 1..{}, got {}",
                StateVector::MAX_QUBITS,
                self.position_qubits
            )));
        }
        if self.num_walkers == 0 {
            return Err(domain("num_walkers must be at least 1"));
        }
        if self.steps == 0 {
            return Err(domain("steps must be at least 1"));
        }
        if self.initial_position >= self.num_positions() {
            return Err(domain(format!(
                "initial_position {} out of range for {} positions",
                self.initial_position,
                self.num_positions()
            )));
        }
        Ok(())
    }

    pub fn num_positions(&self) -> usize {
        1 << self.position_qubits
    }

    pub fn num_params(&self) -> usize {
        ParamVector::len_for(self.num_walkers)
    }

    /// Largest displacement reachable from the start, `num_walkers · steps`.
    pub fn max_displacement(&self) -> usize {
        self.num_walkers * self.steps
    }

    /// Whether position `x` can carry amplitude after the full circuit.
    pub fn is_reachable(&self, x: usize) -> bool {
        let m = self.num_positions();
        let reach = self.max_displacement();
        if 2 * reach + 1 >= m {
            return true;
        }
        let forward = (x + m - self.initial_position) % m;
        forward <= reach || m - forward <= reach
    }

    /// Total probability that `probs` places on unreachable positions; logs a
    /// warning when it is nonzero.
    pub fn unreachable_mass(&self, probs: &[f64]) -> f64 {
        let lost: f64 = probs
            .iter()
            .enumerate()
            .filter(|&(x, _)| !self.is_reachable(x))
            .map(|(_, p)| p)
            .sum();
        if lost > 0.0 {
            log::warn!(
                "target places {lost:.4} probability outside x0={} ± {}",
                self.initial_position,
                self.max_displacement()
            );
        }
        lost
    }
}

/// Flat trainable parameters: the initial coin followed by six angles per walker.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ParamVector(pub Vec<f64>);

impl ParamVector {
    pub fn len_for(num_walkers: usize) -> usize {
        3 + 6 * num_walkers
    }

    pub fn zeros(num_walkers: usize) -> Self {
        ParamVector(vec![0.0; Self::len_for(num_walkers)])
    }

    pub fn pack(initial_coin: &CoinParams, walkers: &[WalkerParams]) -> Self {
        let mut v = Vec::with_capacity(Self::len_for(walkers.len()));
        let mut push = |c: &CoinParams| v.extend_from_slice(&[c.theta, c.phi, c.lambda]);
        push(initial_coin);
        for w in walkers {
            push(&w.coin1);
            push(&w.coin2);
        }
        ParamVector(v)
    }

    pub fn unpack(&self, num_walkers: usize) -> Result<(CoinParams, Vec<WalkerParams>)> {
        let expected = Self::len_for(num_walkers);
        if self.0.len() != expected {
            return Err(domain(format!(
                "parameter vector has length {}, expected {expected} for {num_walkers} walkers",
                self.0.len()
            )));
        }
        let coin = |s: &[f64]| CoinParams::new(s[0], s[1], s[2]);
        let walkers = self.0[3..]
            .chunks_exact(6)
            .map(|w| WalkerParams::new(coin(&w[..3]), coin(&w[3..])))
            .collect();
        Ok((coin(&self.0[..3]), walkers))
    }

    pub fn canonical(&self) -> Self {
        ParamVector(self.0.iter().map(|&a| wrap_angle(a)).collect())
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

fn position_qubits_of(state: &StateVector) -> Result<usize> {
    match state.num_qubits() {
        n if n >= 2 => Ok(n - 1),
        _ => Err(domain(
            "walk state needs a coin qubit and at least one position qubit",
        )),
    }
}

/// `x ↦ x + 1 (mod 2^N)` on the slice where the coin reads `coin`; built as an
/// MCX cascade from the most significant position bit down.
pub fn apply_increment(state: &mut StateVector, coin: Coin) -> Result<()> {
    apply_shift_cascade(state, coin, true)
}

/// `x ↦ x - 1 (mod 2^N)` on the slice where the coin reads `coin`.
pub fn apply_decrement(state: &mut StateVector, coin: Coin) -> Result<()> {
    apply_shift_cascade(state, coin, false)
}

fn apply_shift_cascade(state: &mut StateVector, coin: Coin, increment: bool) -> Result<()> {
    let n = position_qubits_of(state)?;
    // Bit k flips when every lower bit is 1 (increment) or 0 (decrement).
    let mut controls = Vec::with_capacity(n);
    for k in (0..n).rev() {
        controls.clear();
        controls.push((0, coin.bit()));
        controls.extend((0..k).map(|j| (1 + j, increment)));
        state.apply_mcx(&controls, 1 + k)?;
    }
    Ok(())
}

/// One DTQW step: coin on qubit 0, then `|↑⟩` moves right and `|↓⟩` moves left.
pub fn dtqw_step(state: &mut StateVector, coin: &Gate2x2) -> Result<()> {
    state.apply_1q(coin, 0)?;
    apply_increment(state, Coin::Up)?;
    apply_decrement(state, Coin::Down)
}

/// Coin choices for the DTQW demonstration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DtqwCoin {
    Z,
    X,
    H,
}

impl DtqwCoin {
    pub fn gate(self) -> Gate2x2 {
        match self {
            DtqwCoin::Z => Gate2x2::Z,
            DtqwCoin::X => Gate2x2::X,
            DtqwCoin::H => Gate2x2::hadamard(),
        }
    }
}

/// Initial coin states for the DTQW demonstration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InitialCoinState {
    Up,
    Down,
    /// `(|↑⟩ + i|↓⟩)/√2`
    Symmetric,
}

impl InitialCoinState {
    fn amplitudes(self) -> [Complex64; 2] {
        let (z, o) = (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0));
        match self {
            InitialCoinState::Up => [o, z],
            InitialCoinState::Down => [z, o],
            InitialCoinState::Symmetric => [
                Complex64::new(FRAC_1_SQRT_2, 0.0),
                Complex64::new(0.0, FRAC_1_SQRT_2),
            ],
        }
    }
}

/// Smallest register with `2^N ≥ 2·steps + 1`.
pub fn min_dtqw_qubits(steps: usize) -> usize {
    let needed = 2 * steps + 1;
    (usize::BITS - (needed - 1).leading_zeros()).max(1) as usize
}

/// Position distribution of a DTQW started at the register centre `2^(N-1)`.
pub fn dtqw_distribution(
    coin: DtqwCoin,
    initial: InitialCoinState,
    steps: usize,
    position_qubits: usize,
) -> Result<Vec<f64>> {
    let min_n = min_dtqw_qubits(steps);
    if position_qubits < min_n {
        return Err(domain(format!(
            "{steps} DTQW steps need at least {min_n} position qubits, got {position_qubits}"
        )));
    }
    if position_qubits >= StateVector::MAX_QUBITS {
        return Err(domain(format!(
            "{position_qubits} position qubits is too many"
        )));
    }
    let center = 1usize << (position_qubits - 1);
    let dim = 1usize << (position_qubits + 1);
    let mut amps = vec![Complex64::new(0.0, 0.0); dim];
    let [up, down] = initial.amplitudes();
    amps[center << 1] = up;
    amps[(center << 1) | 1] = down;
    let mut state = StateVector::from_amplitudes(amps)?;
    let gate = coin.gate();
    for _ in 0..steps {
        dtqw_step(&mut state, &gate)?;
    }
    state.marginal_probs(&position_register(position_qubits))
}

/// `Ŵ = Ŝ₋ Ĉ₂ Ŝ₊ Ĉ₁`, applied right to left.
pub fn ssqw_step(state: &mut StateVector, walker: &WalkerParams) -> Result<()> {
    let gates = CompiledWalker::new(walker)?;
    gates.apply(state)
}

#[derive(Debug, Clone, Copy)]
struct CompiledWalker {
    coin1: Gate2x2,
    coin2: Gate2x2,
}

impl CompiledWalker {
    fn new(w: &WalkerParams) -> Result<Self> {
        Ok(CompiledWalker {
            coin1: coin_matrix(&w.coin1)?,
            coin2: coin_matrix(&w.coin2)?,
        })
    }

    fn apply(&self, state: &mut StateVector) -> Result<()> {
        state.apply_1q(&self.coin1, 0)?;
        apply_increment(state, Coin::Up)?;
        state.apply_1q(&self.coin2, 0)?;
        apply_decrement(state, Coin::Down)
    }
}

/// Qubit indices of an `n`-qubit position register.
pub fn position_register(n: usize) -> Vec<usize> {
    (1..=n).collect()
}

/// A multi-walker circuit with its coin matrices evaluated once.
#[derive(Debug, Clone)]
pub struct MultiSsqwCircuit {
    config: MultiSsqwConfig,
    initial_coin: Gate2x2,
    walkers: Vec<CompiledWalker>,
}

impl MultiSsqwCircuit {
    pub fn new(config: &MultiSsqwConfig, params: &ParamVector) -> Result<Self> {
        config.validate()?;
        let (init, walkers) = params.unpack(config.num_walkers)?;
        Ok(MultiSsqwCircuit {
            config: *config,
            initial_coin: coin_matrix(&init)?,
            walkers: walkers
                .iter()
                .map(CompiledWalker::new)
                .collect::<Result<_>>()?,
        })
    }

    /// Applies the walker layers only (no state preparation): walkers in
    /// ascending order within each step, `steps` times.
    pub fn apply_evolution(&self, state: &mut StateVector) -> Result<()> {
        for _ in 0..self.config.steps {
            for w in &self.walkers {
                w.apply(state)?;
            }
        }
        Ok(())
    }

    /// Full circuit on `|↑⟩ ⊗ |x₀⟩`: the initial coin gate then the evolution.
    pub fn final_state(&self) -> Result<StateVector> {
        let mut state = StateVector::new(
            self.config.position_qubits + 1,
            self.config.initial_position << 1,
        )?;
        state.apply_1q(&self.initial_coin, 0)?;
        self.apply_evolution(&mut state)?;
        Ok(state)
    }

    pub fn position_distribution(&self) -> Result<Vec<f64>> {
        self.final_state()?
            .marginal_probs(&position_register(self.config.position_qubits))
    }
}

/// Position distribution produced by the multi-walker circuit for `params`.
pub fn run_multi_ssqw(config: &MultiSsqwConfig, params: &ParamVector) -> Result<Vec<f64>> {
    MultiSsqwCircuit::new(config, params)?.position_distribution()
}
