//! Density-matrix simulation of two-qudit Bell tests under noise.
//!
//! The pipeline prepares an entangled pair of d-level systems, runs it through
//! a depolarizing, dephasing or amplitude-damping channel a configurable number
//! of times, rotates each half into one of two measurement bases, and scores
//! the four resulting joint distributions with the CGLMP parameter `I_d`
//! (classical bound 2) and the Zohren-Gill sum (classical bound 1). On top of
//! that sit threshold searches over the channel strength and a simulator for
//! the circuit that reads a `2^n`-level resonator out through `n` qubits.
//!
//! ```
//! use qudit_bell::{run_experiment, NoiseSpec, NoiseKind, IterationPolicy, Protocol};
//!
//! let noiseless = NoiseSpec::new(NoiseKind::Depolarizing, 1.0, IterationPolicy::Single).unwrap();
//! let result = run_experiment(2, &noiseless, &Protocol::default()).unwrap();
//! assert!((result.i_d - 2.0 * 2f64.sqrt()).abs() < 1e-12);
//! assert!(result.cglmp_violated);
//! ```

pub mod circuit;
pub mod error;
pub mod gates;
pub mod inequalities;
pub mod linalg;
pub mod noise;
pub mod states;
pub mod thresholds;

pub use error::{CircuitError, LinalgError, QuditError, ThresholdError};
pub use gates::{Choice, MeasurementSetting, Party, PhaseConvention, Reversal};
pub use inequalities::{
    run_experiment, BellResult, OffsetConvention, ProbabilityTable, Protocol, SettingTables,
};
pub use linalg::{ComplexMatrix, StateVector, C64};
pub use noise::{IterationPolicy, KrausSet, NoiseKind, NoiseSpec};
pub use states::{DensityMatrix, StateVariant};
pub use thresholds::{Inequality, ThresholdQuery, ThresholdResult};
