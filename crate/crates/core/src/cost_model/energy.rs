use serde::{Deserialize, Serialize};

use super::CostReport;
use crate::error::{Result, SimError};

/// Joules per conversion that makes a full 2560×1920 RGB 8-bit frame cost
/// 1.85 mJ.
pub const DEFAULT_E_ADC: f64 = 1.85e-3 / 14_745_600.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyParams {
    /// Joules per ADC conversion.
    pub e_adc: f64,
    /// Joules spent by the pooling circuit per frame (1.71 nJ to 91.4 nJ for
    /// the reported circuit; zero by default).
    #[serde(default)]
    pub e_pool_per_frame: f64,
    /// Joules per bit moved over the link.
    #[serde(default)]
    pub e_transfer_per_bit: f64,
}

impl Default for EnergyParams {
    fn default() -> Self {
        Self {
            e_adc: DEFAULT_E_ADC,
            e_pool_per_frame: 0.0,
            e_transfer_per_bit: 0.0,
        }
    }
}

impl EnergyParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("e_adc", self.e_adc),
            ("e_pool_per_frame", self.e_pool_per_frame),
            ("e_transfer_per_bit", self.e_transfer_per_bit),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(SimError::config(format!("{name} must be >= 0, got {v}")));
            }
        }
        Ok(())
    }
}

/// Energy per frame in joules.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub e_stage1: f64,
    pub e_stage2: f64,
    pub e_pooling: f64,
    pub e_total: f64,
    pub e_baseline: f64,
    pub reduction_factor: f64,
}

/// Conversion energy per stage plus link energy when `e_transfer_per_bit`
/// is set. Pooling energy is kept as its own term.
pub fn energy(rep: &CostReport, p: &EnergyParams) -> EnergyReport {
    let link = |bytes: u64| bytes as f64 * 8.0 * p.e_transfer_per_bit;
    let e_stage1 = rep.c1_sp as f64 * p.e_adc + link(rep.d1_sp + rep.d1_ps);
    let e_stage2 = rep.c2_sp as f64 * p.e_adc + link(rep.d2_sp);
    let e_pooling = p.e_pool_per_frame;
    let e_total = e_stage1 + e_stage2 + e_pooling;
    let e_baseline = rep.c_old as f64 * p.e_adc + link(rep.d_old);
    EnergyReport {
        e_stage1,
        e_stage2,
        e_pooling,
        e_total,
        e_baseline,
        reduction_factor: if e_total > 0.0 {
            e_baseline / e_total
        } else {
            f64::INFINITY
        },
    }
}
