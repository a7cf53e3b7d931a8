//! Simulator and closed-form cost model for a two-stage image sensor pipeline.
//!
//! Stage 1 averages `k×k` pixel blocks (and optionally the three colour
//! channels) in the analog domain before conversion, so the processor receives
//! a small frame on which it locates regions of interest. Stage 2 converts and
//! transfers only those regions at full resolution.
//!
//! The crate is split into:
//!
//! - [`analog_sensor`]: pixel array, resistor-network averaging circuit,
//!   analog pooling, ADC quantization and ROI cropping.
//! - [`roi_protocol`]: the sensor/processor message exchange with a
//!   per-session transfer ledger.
//! - [`cost_model`]: closed-form data-transfer, memory, conversion and energy
//!   accounting.
//! - [`workload`]: annotation loading, synthetic scenes and design sweeps.
//! - [`validate`]: randomized cross-check of the ledger against the formulas.

pub mod analog_sensor;
pub mod cost_model;
pub mod error;
pub mod roi_protocol;
pub mod validate;
pub mod workload;

pub use error::{Result, SimError};
