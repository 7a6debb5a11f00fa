//! Target distributions: return histograms, binomial PMFs and discretized
//! log-normal price laws.

use serde::{Deserialize, Serialize};
use statrs::distribution::{Continuous, LogNormal};

use crate::error::{domain, Result};
use crate::objective::{LabelKind, TargetDistribution};

/// Default bin count for return histograms.
pub const DEFAULT_RETURN_BINS: usize = 16;

/// Default half-width of the log-normal price grid, in standard deviations of
/// the price. Narrower grids clip enough right tail to bias call payoffs low.
pub const DEFAULT_TRUNCATION_SIGMAS: f64 = 4.5;

/// Inputs of a European call on one underlying.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PricingParams {
    pub spot: f64,
    pub strike: f64,
    /// Continuously compounded, per annum.
    pub rate: f64,
    /// Per annum.
    pub volatility: f64,
    /// Calendar days; the year fraction is `maturity_days / 365`.
    pub maturity_days: f64,
}

impl PricingParams {
    pub fn new(
        spot: f64,
        strike: f64,
        rate: f64,
        volatility: f64,
        maturity_days: f64,
    ) -> Result<Self> {
        let pp = PricingParams {
            spot,
            strike,
            rate,
            volatility,
            maturity_days,
        };
        pp.validate()?;
        Ok(pp)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.spot > 0.0 && self.spot.is_finite()) {
            return Err(domain(format!("spot must be positive, got {}", self.spot)));
        }
        if !(self.strike > 0.0 && self.strike.is_finite()) {
            return Err(domain(format!(
                "strike must be positive, got {}",
                self.strike
            )));
        }
        if !self.rate.is_finite() {
            return Err(domain(format!("rate must be finite, got {}", self.rate)));
        }
        if !(self.volatility >= 0.0 && self.volatility.is_finite()) {
            return Err(domain(format!(
                "volatility must be nonnegative, got {}",
                self.volatility
            )));
        }
        if !(self.maturity_days > 0.0 && self.maturity_days.is_finite()) {
            return Err(domain(format!(
                "maturity_days must be positive, got {}",
                self.maturity_days
            )));
        }
        Ok(())
    }

    pub fn year_fraction(&self) -> f64 {
        self.maturity_days / 365.0
    }

    /// Mean and standard deviation of `ln S_T`.
    pub fn log_moments(&self) -> (f64, f64) {
        let tau = self.year_fraction();
        let v = self.volatility;
        (
            self.spot.ln() + (self.rate - 0.5 * v * v) * tau,
            v * tau.sqrt(),
        )
    }

    /// Expected terminal price `S₀ e^{rτ}`.
    pub fn forward(&self) -> f64 {
        self.spot * (self.rate * self.year_fraction()).exp()
    }
}

fn check_qubits(position_qubits: usize) -> Result<usize> {
    if position_qubits == 0 || position_qubits > 24 {
        return Err(domain(format!(
            "position_qubits must be in 1..=24, got {position_qubits}"
        )));
    }
    Ok(1 << position_qubits)
}

/// Equal-width histogram of `returns` (in %) spanning the sample range. Bin
/// `i` covers `[lo + i·w, lo + (i+1)·w)`, the last bin is closed on the
/// right, and labels are bin centers. A zero-width range is padded by 0.5 on
/// each side.
pub fn histogram_from_returns(returns: &[f64], num_bins: usize) -> Result<TargetDistribution> {
    if returns.len() < 2 {
        return Err(domain(format!(
            "need at least 2 returns for a histogram, got {}",
            returns.len()
        )));
    }
    if num_bins < 2 || !num_bins.is_power_of_two() {
        return Err(domain(format!(
            "bin count must be a power of two >= 2, got {num_bins}"
        )));
    }
    if let Some(r) = returns.iter().find(|r| !r.is_finite()) {
        return Err(domain(format!("non-finite return {r}")));
    }
    let mut lo = returns.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut hi = returns.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if hi == lo {
        lo -= 0.5;
        hi += 0.5;
    }
    let width = (hi - lo) / num_bins as f64;
    let mut counts = vec![0usize; num_bins];
    for &r in returns {
        let k = ((r - lo) / width).floor() as usize;
        counts[k.min(num_bins - 1)] += 1;
    }
    let total = returns.len() as f64;
    let probs = counts.iter().map(|&c| c as f64 / total).collect();
    let labels = (0..num_bins)
        .map(|i| lo + (i as f64 + 0.5) * width)
        .collect();
    TargetDistribution::new("daily returns", LabelKind::ReturnPercent, probs, labels)
}

/// `B(n, p)` on `2^N` bins, zero-padded above `n`. Terms are built in log
/// space so large `n` does not overflow.
pub fn binomial_target(n: usize, p: f64, position_qubits: usize) -> Result<TargetDistribution> {
    let bins = check_qubits(position_qubits)?;
    if n + 1 > bins {
        return Err(domain(format!(
            "{} outcomes do not fit in {bins} bins",
            n + 1
        )));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(domain(format!(
            "success probability must be in [0, 1], got {p}"
        )));
    }
    let mut probs = vec![0.0; bins];
    if p == 0.0 {
        probs[0] = 1.0;
    } else if p == 1.0 {
        probs[n] = 1.0;
    } else {
        let (lp, lq) = (p.ln(), (-p).ln_1p());
        let mut ln_choose = 0.0;
        for k in 0..=n {
            probs[k] = (ln_choose + k as f64 * lp + (n - k) as f64 * lq).exp();
            if k < n {
                ln_choose += ((n - k) as f64).ln() - ((k + 1) as f64).ln();
            }
        }
        let total: f64 = probs.iter().sum();
        probs.iter_mut().for_each(|v| *v /= total);
    }
    let labels = (0..bins).map(|k| k as f64).collect();
    TargetDistribution::new(format!("B({n}, {p})"), LabelKind::TrialCount, probs, labels)
}

/// Terminal price law under geometric Brownian motion, sampled at `2^N`
/// equally spaced prices within `truncation_sigmas` price standard
/// deviations of the mean and renormalized.
pub fn lognormal_target(
    pp: &PricingParams,
    position_qubits: usize,
    truncation_sigmas: f64,
) -> Result<TargetDistribution> {
    pp.validate()?;
    let bins = check_qubits(position_qubits)?;
    if !(truncation_sigmas > 0.0 && truncation_sigmas.is_finite()) {
        return Err(domain(format!(
            "truncation_sigmas must be positive, got {truncation_sigmas}"
        )));
    }
    if pp.volatility == 0.0 {
        return Err(domain("log-normal target needs positive volatility"));
    }
    let (mu, sigma) = pp.log_moments();
    let law = LogNormal::new(mu, sigma).map_err(|e| domain(e.to_string()))?;
    let mean = (mu + 0.5 * sigma * sigma).exp();
    let sd = mean * (sigma * sigma).exp_m1().sqrt();
    let lo = (mean - truncation_sigmas * sd).max(0.0);
    let hi = mean + truncation_sigmas * sd;
    let step = (hi - lo) / (bins - 1) as f64;
    let labels: Vec<f64> = (0..bins).map(|i| lo + i as f64 * step).collect();
    let mut probs: Vec<f64> = labels
        .iter()
        .map(|&x| if x > 0.0 { law.pdf(x) } else { 0.0 })
        .collect();
    let total: f64 = probs.iter().sum();
    if !(total > 0.0 && total.is_finite()) {
        return Err(domain("log-normal grid carries no probability mass"));
    }
    probs.iter_mut().for_each(|v| *v /= total);
    TargetDistribution::new("log-normal", LabelKind::Price, probs, labels)
}
