//! European call payoffs over discrete price laws, and the Black-Scholes price.

use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{domain, Result};
use crate::objective::{LabelKind, TargetDistribution};
use crate::targets::PricingParams;

/// `Σ p_i · max(S_i - K, 0)` over the price labels of `dist`. With
/// `discount = Some((rate, maturity_days))` the result is multiplied by
/// `e^{-rate · maturity_days / 365}`.
pub fn call_payoff_expectation(
    dist: &TargetDistribution,
    strike: f64,
    discount: Option<(f64, f64)>,
) -> Result<f64> {
    if dist.kind != LabelKind::Price {
        return Err(domain(format!(
            "payoff needs price labels, got {:?}",
            dist.kind
        )));
    }
    if !(strike > 0.0 && strike.is_finite()) {
        return Err(domain(format!("strike must be positive, got {strike}")));
    }
    let undiscounted: f64 = dist
        .probs
        .iter()
        .zip(&dist.bin_labels)
        .map(|(p, s)| p * (s - strike).max(0.0))
        .sum();
    Ok(match discount {
        None => undiscounted,
        Some((rate, days)) => undiscounted * (-rate * days / 365.0).exp(),
    })
}

/// Black-Scholes price of a European call. Zero volatility gives the
/// deterministic limit `max(S₀ - K e^{-rτ}, 0)`.
pub fn black_scholes_call(pp: &PricingParams) -> Result<f64> {
    pp.validate()?;
    let tau = pp.year_fraction();
    let discounted_strike = pp.strike * (-pp.rate * tau).exp();
    if pp.volatility == 0.0 {
        return Ok((pp.spot - discounted_strike).max(0.0));
    }
    let sd = pp.volatility * tau.sqrt();
    let d1 =
        ((pp.spot / pp.strike).ln() + (pp.rate + 0.5 * pp.volatility * pp.volatility) * tau) / sd;
    let d2 = d1 - sd;
    let phi = Normal::new(0.0, 1.0).expect("standard normal");
    Ok(pp.spot * phi.cdf(d1) - discounted_strike * phi.cdf(d2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn prices(probs: Vec<f64>, labels: Vec<f64>) -> TargetDistribution {
        TargetDistribution::new("p", LabelKind::Price, probs, labels).unwrap()
    }

    #[test]
    fn payoff_examples() {
        let delta = prices(vec![0.0, 1.0], vec![6.0, 8.0]);
        assert_eq!(call_payoff_expectation(&delta, 7.0, None).unwrap(), 1.0);
        let below = prices(vec![0.5, 0.5], vec![5.0, 6.0]);
        assert_eq!(call_payoff_expectation(&below, 7.0, None).unwrap(), 0.0);
        let d = call_payoff_expectation(&delta, 7.0, Some((0.04, 365.0))).unwrap();
        assert_abs_diff_eq!(d, (-0.04f64).exp(), epsilon = 1e-15);
        let counts =
            TargetDistribution::new("c", LabelKind::TrialCount, vec![0.5, 0.5], vec![0.0, 1.0])
                .unwrap();
        assert!(call_payoff_expectation(&counts, 7.0, None).is_err());
    }

    #[test]
    fn black_scholes_limits() {
        let deep = PricingParams::new(10.0, 1.0, 0.0, 0.0, 30.0).unwrap();
        assert_abs_diff_eq!(black_scholes_call(&deep).unwrap(), 9.0, epsilon = 1e-12);
        let atm = PricingParams::new(5.0, 5.0, 0.0, 0.0, 30.0).unwrap();
        assert_eq!(black_scholes_call(&atm).unwrap(), 0.0);
        let tiny = PricingParams::new(10.0, 1.0, 0.0, 1e-8, 30.0).unwrap();
        assert_abs_diff_eq!(black_scholes_call(&tiny).unwrap(), 9.0, epsilon = 1e-9);
    }
}
