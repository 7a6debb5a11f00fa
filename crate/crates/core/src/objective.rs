//! Losses between trained and target distributions.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::walk::{run_multi_ssqw, MultiSsqwConfig, ParamVector};

/// Floor applied to trained probabilities inside the KL logarithm.
pub const KL_EPSILON: f64 = 1e-10;

/// Default weight of the KL term in the combined loss.
pub const DEFAULT_KL_WEIGHT: f64 = 1.0;

/// What the bin labels of a [`TargetDistribution`] measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LabelKind {
    ReturnPercent,
    TrialCount,
    Price,
}

/// A normalized probability vector over `2^N` labelled bins.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetDistribution {
    pub name: String,
    pub kind: LabelKind,
    pub probs: Vec<f64>,
    pub bin_labels: Vec<f64>,
}

impl TargetDistribution {
    pub fn new(
        name: impl Into<String>,
        kind: LabelKind,
        probs: Vec<f64>,
        bin_labels: Vec<f64>,
    ) -> Result<Self> {
        let t = TargetDistribution {
            name: name.into(),
            kind,
            probs,
            bin_labels,
        };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.probs.len();
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::Validation(format!(
                "target needs a power-of-two number of bins >= 2, got {n}"
            )));
        }
        if self.bin_labels.len() != n {
            return Err(Error::Validation(format!(
                "{} labels for {n} bins",
                self.bin_labels.len()
            )));
        }
        if let Some(p) = self.probs.iter().find(|p| !(**p >= 0.0) || !p.is_finite()) {
            return Err(Error::Validation(format!("invalid probability {p}")));
        }
        let total: f64 = self.probs.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::Validation(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        if self
            .bin_labels
            .windows(2)
            .any(|w| !(w[0] < w[1]) || !w[1].is_finite())
        {
            return Err(Error::Validation(
                "bin labels must be finite and strictly increasing".into(),
            ));
        }
        Ok(())
    }

    pub fn num_bins(&self) -> usize {
        self.probs.len()
    }

    /// `log2` of the bin count, i.e. the position register width.
    pub fn position_qubits(&self) -> usize {
        self.probs.len().trailing_zeros() as usize
    }

    /// Index of the most probable bin (first one on ties).
    pub fn mode(&self) -> usize {
        let mut best = 0;
        for (i, &p) in self.probs.iter().enumerate() {
            if p > self.probs[best] {
                best = i;
            }
        }
        best
    }

    /// The same bins with probabilities replaced, e.g. by a trained distribution.
    pub fn with_probs(&self, name: impl Into<String>, probs: Vec<f64>) -> Result<Self> {
        TargetDistribution::new(name, self.kind, probs, self.bin_labels.clone())
    }
}

/// Both losses and their weighted sum `mse + kl_weight · kl`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossReport {
    pub mse: f64,
    pub kl: f64,
    pub combined: f64,
}

fn check_lengths(a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != b.len() {
        return Err(domain(format!(
            "distribution lengths differ: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    if a.is_empty() {
        return Err(domain("empty distributions"));
    }
    Ok(())
}

/// Mean squared error `(1/M) Σ (p_i - q_i)²`.
pub fn mse(p: &[f64], q: &[f64]) -> Result<f64> {
    check_lengths(p, q)?;
    let sum: f64 = p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok(sum / p.len() as f64)
}

/// `D(target ‖ trained) = Σ target_i ln(target_i / max(trained_i, ε))` over
/// bins where the target is positive.
pub fn kl_divergence(target: &[f64], trained: &[f64], epsilon: f64) -> Result<f64> {
    check_lengths(target, trained)?;
    if !(epsilon > 0.0) {
        return Err(domain(format!(
            "KL epsilon must be positive, got {epsilon}"
        )));
    }
    Ok(target
        .iter()
        .zip(trained)
        .filter(|(t, _)| **t > 0.0)
        .map(|(t, q)| t * (t / q.max(epsilon)).ln())
        .sum())
}

/// `(1/2) Σ |p_i - q_i|`
pub fn total_variation(p: &[f64], q: &[f64]) -> Result<f64> {
    check_lengths(p, q)?;
    Ok(0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>())
}

/// Loss of a trained distribution against the target.
pub fn loss_report(
    target: &[f64],
    trained: &[f64],
    kl_weight: f64,
    epsilon: f64,
) -> Result<LossReport> {
    let mse = mse(target, trained)?;
    let kl = kl_divergence(target, trained, epsilon)?;
    Ok(LossReport {
        mse,
        kl,
        combined: mse + kl_weight * kl,
    })
}

/// Runs the circuit for `params` and scores it against `target`.
pub fn evaluate(
    params: &ParamVector,
    config: &MultiSsqwConfig,
    target: &TargetDistribution,
    kl_weight: f64,
) -> Result<LossReport> {
    if target.num_bins() != config.num_positions() {
        return Err(domain(format!(
            "target has {} bins but the register has {} positions",
            target.num_bins(),
            config.num_positions()
        )));
    }
    let trained = run_multi_ssqw(config, params)?;
    loss_report(&target.probs, &trained, kl_weight, KL_EPSILON)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn mse_examples() {
        assert_eq!(mse(&[0.2, 0.8], &[0.2, 0.8]).unwrap(), 0.0);
        assert_eq!(mse(&[1.0, 0.0], &[0.5, 0.5]).unwrap(), 0.25);
        assert!(mse(&[1.0], &[0.5, 0.5]).is_err());
    }

    #[test]
    fn kl_examples() {
        assert_eq!(
            kl_divergence(&[0.3, 0.7], &[0.3, 0.7], KL_EPSILON).unwrap(),
            0.0
        );
        assert_abs_diff_eq!(
            kl_divergence(&[1.0, 0.0], &[0.5, 0.5], KL_EPSILON).unwrap(),
            std::f64::consts::LN_2,
            epsilon = 1e-15
        );
        let v = kl_divergence(&[0.5, 0.5], &[1.0, 0.0], 1e-10).unwrap();
        assert!(v.is_finite());
        assert_abs_diff_eq!(
            v,
            0.5 * (0.5f64).ln() + 0.5 * (0.5e10f64).ln(),
            epsilon = 1e-12
        );
        assert!(kl_divergence(&[1.0], &[1.0], 0.0).is_err());
    }

    #[test]
    fn evaluate_examples() {
        let cfg = MultiSsqwConfig::new(4, 2, 3, 4).unwrap();
        let mut probs = vec![0.0; 16];
        probs[10] = 1.0;
        let labels = (0..16).map(f64::from).collect();
        let target =
            TargetDistribution::new("delta", LabelKind::TrialCount, probs, labels).unwrap();
        let r = evaluate(&ParamVector::zeros(2), &cfg, &target, 1.0).unwrap();
        assert_eq!(r.combined, 0.0);

        let mut far = target.probs.clone();
        far.swap(10, 12);
        let far = target.with_probs("far", far).unwrap();
        assert!(!cfg.is_reachable(12));
        let r = evaluate(&ParamVector::zeros(2), &cfg, &far, 0.0).unwrap();
        assert!(r.combined > 0.0);
        assert_eq!(r.combined, r.mse);
    }

    #[test]
    fn target_validation() {
        let labels: Vec<f64> = (0..4).map(f64::from).collect();
        assert!(TargetDistribution::new(
            "x",
            LabelKind::TrialCount,
            vec![0.5, 0.5, 0.0, 0.1],
            labels.clone()
        )
        .is_err());
        assert!(TargetDistribution::new(
            "x",
            LabelKind::TrialCount,
            vec![0.5, 0.5, 0.0],
            labels[..3].to_vec()
        )
        .is_err());
        assert!(TargetDistribution::new(
            "x",
            LabelKind::TrialCount,
            vec![0.5, 0.5, 0.0, 0.0],
            vec![0.0, 1.0, 1.0, 2.0]
        )
        .is_err());
        let t =
            TargetDistribution::new("x", LabelKind::TrialCount, vec![0.1, 0.5, 0.4, 0.0], labels)
                .unwrap();
        assert_eq!(t.mode(), 1);
        assert_eq!(t.position_qubits(), 2);
    }
}
