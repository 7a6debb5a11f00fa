//! JSON documents written by the subcommands. Each has a schema under
//! `schema/`.

use serde::{Deserialize, Serialize};

use qwalk_core::optimize::FitSettings;
use qwalk_core::{FitResult, LossReport, MultiSsqwConfig, TargetDistribution};

use crate::args::RunCommand;

pub const RESULT_FILE: &str = "result.json";
pub const DIST_SVG: &str = "dist.svg";
pub const TRACE_SVG: &str = "trace.svg";
pub const BOXPLOT_FILE: &str = "boxplot.json";
pub const TIMING_FILE: &str = "timing.json";
pub const PAYOFFS_FILE: &str = "payoffs.json";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const TARGET_FILE: &str = "target.json";
pub const DTQW_FILE: &str = "dtqw.json";
pub const DTQW_SVG: &str = "dtqw.svg";

/// Distribution produced by the trained circuit, on the target's bins.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainedDistribution {
    pub probs: Vec<f64>,
    pub bin_labels: Vec<f64>,
    pub loss: LossReport,
    pub total_variation: f64,
}

/// `result.json` for the fit subcommands.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitReport {
    pub subcommand: String,
    pub config: MultiSsqwConfig,
    pub settings: FitSettings,
    pub target: TargetDistribution,
    pub trained: TrainedDistribution,
    pub fit: FitResult,
}

/// `boxplot.json`: five-number summary of the final restart losses.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoxplotSummary {
    pub count: usize,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

impl BoxplotSummary {
    /// Quartiles by linear interpolation between order statistics.
    pub fn from_values(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        let q = |p: f64| {
            let h = p * (v.len() - 1) as f64;
            let (lo, hi) = (h.floor() as usize, h.ceil() as usize);
            v[lo] + (h - lo as f64) * (v[hi] - v[lo])
        };
        Some(BoxplotSummary {
            count: v.len(),
            min: v[0],
            q1: q(0.25),
            median: q(0.5),
            q3: q(0.75),
            max: v[v.len() - 1],
        })
    }
}

/// `timing.json`: wall-clock times. Not reproducible by nature, so it is
/// kept out of every other document.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TimingReport {
    pub threads: usize,
    pub total_seconds: f64,
    pub restart_seconds: Vec<f64>,
    pub mean_restart_seconds: f64,
}

/// `payoffs.json`: call payoff expectations on the target and trained laws.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PayoffReport {
    pub strike: f64,
    pub discounted: bool,
    pub targeted_payoff: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trained_payoff: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub absolute_gap: Option<f64>,
    /// Black-Scholes price, discounted or carried forward to match `discounted`.
    pub black_scholes: f64,
    pub forward: f64,
}

/// `dtqw.json`: DTQW position distribution, offsets relative to the start.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DtqwReport {
    pub coin: String,
    pub init: String,
    pub steps: usize,
    pub position_qubits: usize,
    pub start: usize,
    pub offsets: Vec<i64>,
    pub probs: Vec<f64>,
}

/// `manifest.json`: enough to rerun the command bit for bit.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub tool_version: String,
    pub seed: u64,
    pub run: RunCommand,
    /// Values filled in at run time (register size, start position, ...).
    pub resolved: serde_json::Value,
    /// Artifact file names, relative to the manifest's directory.
    pub artifacts: Vec<String>,
}
