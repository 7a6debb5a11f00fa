//! Dense statevector engine.
//!
//! Amplitudes are indexed little-endian: bit `q` of a basis index is the value
//! of qubit `q`. The walk modules reserve qubit 0 for the coin and qubits
//! `1..=N` for the position register, so the position of basis index `i` is
//! simply `i >> 1`.

use std::ops::Mul;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Tolerance used when checking that a gate is unitary or a state is normalized.
pub const UNIT_TOLERANCE: f64 = 1e-10;

/// A 2x2 complex matrix stored row-major.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gate2x2(pub [[Complex64; 2]; 2]);

impl Gate2x2 {
    pub const IDENTITY: Gate2x2 = Gate2x2([[ONE, ZERO], [ZERO, ONE]]);
    pub const X: Gate2x2 = Gate2x2([[ZERO, ONE], [ONE, ZERO]]);
    pub const Z: Gate2x2 = Gate2x2([[ONE, ZERO], [ZERO, Complex64::new(-1.0, 0.0)]]);

    pub fn hadamard() -> Self {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Gate2x2([[h, h], [h, -h]])
    }

    /// Builds a gate and rejects it unless `G†G = I` within [`UNIT_TOLERANCE`].
    pub fn unitary(rows: [[Complex64; 2]; 2]) -> Result<Self> {
        let gate = Gate2x2(rows);
        let dev = gate.unitarity_deviation();
        if dev.is_nan() || dev > UNIT_TOLERANCE {
            return Err(Error::Validation(format!(
                "gate is not unitary (max |G†G - I| = {dev:e})"
            )));
        }
        Ok(gate)
    }

    pub fn dagger(&self) -> Self {
        let m = &self.0;
        Gate2x2([
            [m[0][0].conj(), m[1][0].conj()],
            [m[0][1].conj(), m[1][1].conj()],
        ])
    }

    /// Largest entrywise deviation of `G†G` from the identity.
    pub fn unitarity_deviation(&self) -> f64 {
        let p = self.dagger() * *self;
        let mut dev: f64 = 0.0;
        for (r, row) in p.0.iter().enumerate() {
            for (c, v) in row.iter().enumerate() {
                let expected = if r == c { ONE } else { ZERO };
                dev = dev.max((v - expected).norm());
            }
        }
        dev
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_deviation() <= tol
    }
}

impl Mul for Gate2x2 {
    type Output = Gate2x2;

    fn mul(self, rhs: Gate2x2) -> Gate2x2 {
        let (a, b) = (&self.0, &rhs.0);
        let mut out = [[ZERO; 2]; 2];
        for (r, row) in out.iter_mut().enumerate() {
            for (c, v) in row.iter_mut().enumerate() {
                *v = a[r][0] * b[0][c] + a[r][1] * b[1][c];
            }
        }
        Gate2x2(out)
    }
}

/// Dense amplitude vector over `num_qubits` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
    strict: bool,
}

impl StateVector {
    /// Largest register this engine accepts; 2^24 amplitudes is ~256 MiB.
    pub const MAX_QUBITS: usize = 24;

    /// Computational basis state `|basis_index⟩`.
    pub fn new(num_qubits: usize, basis_index: usize) -> Result<Self> {
        if num_qubits == 0 || num_qubits > Self::MAX_QUBITS {
            return Err(domain(format!(
                "num_qubits must be in 1..={}, got {num_qubits}",
                Self::MAX_QUBITS
            )));
        }
        let dim = 1usize << num_qubits;
        if basis_index >= dim {
            return Err(domain(format!(
                "basis index {basis_index} out of range for {num_qubits} qubits"
            )));
        }
        let mut amplitudes = vec![ZERO; dim];
        amplitudes[basis_index] = ONE;
        Ok(StateVector {
            num_qubits,
            amplitudes,
            strict: false,
        })
    }

    /// Wraps an explicit amplitude vector, which must have power-of-two length and unit norm.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(domain(format!(
                "amplitude vector length must be a power of two >= 2, got {len}"
            )));
        }
        let num_qubits = len.trailing_zeros() as usize;
        if num_qubits > Self::MAX_QUBITS {
            return Err(domain(format!(
                "{num_qubits} qubits exceeds the engine limit"
            )));
        }
        let state = StateVector {
            num_qubits,
            amplitudes,
            strict: false,
        };
        let norm_err = (state.norm_sqr() - 1.0).abs();
        if !(norm_err <= UNIT_TOLERANCE) {
            return Err(Error::Validation(format!(
                "state is not normalized (|norm² - 1| = {norm_err:e})"
            )));
        }
        Ok(state)
    }

    /// In strict mode every applied gate is checked for unitarity first.
    pub fn with_strict(mut self, strict: bool) -> Self {
        self.strict = strict;
        self
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.num_qubits {
            return Err(domain(format!(
                "qubit {q} out of range for {} qubits",
                self.num_qubits
            )));
        }
        Ok(())
    }

    fn check_gate(&self, gate: &Gate2x2) -> Result<()> {
        if self.strict && !gate.is_unitary(UNIT_TOLERANCE) {
            return Err(Error::Validation(format!(
                "gate is not unitary (max |G†G - I| = {:e})",
                gate.unitarity_deviation()
            )));
        }
        Ok(())
    }

    /// Applies `gate` on amplitude pairs differing in `target` whose bits under
    /// `mask` equal `value`.
    fn apply_masked(&mut self, gate: &Gate2x2, target: usize, mask: usize, value: usize) {
        let [[g00, g01], [g10, g11]] = gate.0;
        let tbit = 1usize << target;
        for i in 0..self.amplitudes.len() {
            if i & tbit != 0 || i & mask != value {
                continue;
            }
            let j = i | tbit;
            let (a, b) = (self.amplitudes[i], self.amplitudes[j]);
            self.amplitudes[i] = g00 * a + g01 * b;
            self.amplitudes[j] = g10 * a + g11 * b;
        }
    }

    pub fn apply_1q(&mut self, gate: &Gate2x2, target: usize) -> Result<()> {
        self.check_qubit(target)?;
        self.check_gate(gate)?;
        self.apply_masked(gate, target, 0, 0);
        Ok(())
    }

    /// Applies `gate` to `target` on the slice where qubit `control` reads `control_value`.
    pub fn apply_controlled_1q(
        &mut self,
        gate: &Gate2x2,
        control: usize,
        control_value: bool,
        target: usize,
    ) -> Result<()> {
        self.check_qubit(control)?;
        self.check_qubit(target)?;
        if control == target {
            return Err(domain(format!(
                "control and target are both qubit {target}"
            )));
        }
        self.check_gate(gate)?;
        let mask = 1usize << control;
        let value = if control_value { mask } else { 0 };
        self.apply_masked(gate, target, mask, value);
        Ok(())
    }

    /// Multi-controlled X: flips `target` wherever every `(qubit, bit)` control matches.
    pub fn apply_mcx(&mut self, controls: &[(usize, bool)], target: usize) -> Result<()> {
        self.check_qubit(target)?;
        let mut mask = 0usize;
        let mut value = 0usize;
        for &(q, bit) in controls {
            self.check_qubit(q)?;
            let m = 1usize << q;
            if q == target || mask & m != 0 {
                return Err(domain(format!(
                    "qubit {q} appears more than once in an MCX"
                )));
            }
            mask |= m;
            if bit {
                value |= m;
            }
        }
        let tbit = 1usize << target;
        for i in 0..self.amplitudes.len() {
            if i & tbit == 0 && i & mask == value {
                self.amplitudes.swap(i, i | tbit);
            }
        }
        Ok(())
    }

    /// Marginal distribution over `qubits`; the first listed qubit is the least
    /// significant bit of the outcome index.
    pub fn marginal_probs(&self, qubits: &[usize]) -> Result<Vec<f64>> {
        if qubits.is_empty() {
            return Err(domain("marginal over an empty qubit subset"));
        }
        let mut seen = 0usize;
        for &q in qubits {
            self.check_qubit(q)?;
            if seen & (1 << q) != 0 {
                return Err(domain(format!("qubit {q} repeated in marginal subset")));
            }
            seen |= 1 << q;
        }
        let mut probs = vec![0.0; 1 << qubits.len()];
        for (i, amp) in self.amplitudes.iter().enumerate() {
            let mut j = 0usize;
            for (k, &q) in qubits.iter().enumerate() {
                j |= ((i >> q) & 1) << k;
            }
            probs[j] += amp.norm_sqr();
        }
        Ok(probs)
    }

    /// Shot-sampling measurement of `qubits`: returns outcome counts.
    pub fn sample_counts<R: Rng + ?Sized>(
        &self,
        qubits: &[usize],
        shots: usize,
        rng: &mut R,
    ) -> Result<Vec<u64>> {
        let probs = self.marginal_probs(qubits)?;
        let mut cumulative = Vec::with_capacity(probs.len());
        let mut acc = 0.0;
        for p in &probs {
            acc += p;
            cumulative.push(acc);
        }
        let mut counts = vec![0u64; probs.len()];
        for _ in 0..shots {
            let u: f64 = rng.gen::<f64>() * acc;
            let idx = cumulative.partition_point(|&c| c <= u).min(probs.len() - 1);
            counts[idx] += 1;
        }
        Ok(counts)
    }
}
