//! Quantum-walk state preparation for financial distributions: a statevector
//! simulator for split-step walks, a derivative-free fitting engine, and the
//! targets and payoff calculations built on top of them.

pub mod error;
pub mod ingest;
pub mod objective;
pub mod optimize;
pub mod pricing;
pub mod statevector;
pub mod targets;
pub mod walk;

pub use error::{Error, Result};
pub use objective::{LabelKind, LossReport, TargetDistribution};
pub use optimize::{fit, FitResult, FitSettings, OptimizerOptions};
pub use statevector::{Gate2x2, StateVector};
pub use walk::{MultiSsqwConfig, ParamVector};
