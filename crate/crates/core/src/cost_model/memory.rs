use serde::{Deserialize, Serialize};

use super::CostReport;

/// Measured footprint of one network, supplied as input data.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MemoryProfile {
    pub name: String,
    /// Peak activation memory in bytes.
    pub peak_activation_sram: u64,
    /// Weight storage in bytes.
    #[serde(default)]
    pub weight_flash: u64,
}

impl MemoryProfile {
    pub fn new(name: impl Into<String>, peak_activation_sram: u64, weight_flash: u64) -> Self {
        Self {
            name: name.into(),
            peak_activation_sram,
            weight_flash,
        }
    }

    /// A placeholder for a stage with no network.
    pub fn empty() -> Self {
        Self::new("none", 0, 0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SramMode {
    Baseline,
    TwoStage,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SramBudget {
    pub total_sram: u64,
    pub flash: u64,
}

/// Peak SRAM: the larger model's activations plus resident image data.
///
/// The two-stage image term is the larger of the pooled frame and the
/// resident stage-2 crop(s) (`rep.mem_new`).
pub fn peak_sram(
    stage1: &MemoryProfile,
    stage2: &MemoryProfile,
    rep: &CostReport,
    mode: SramMode,
) -> SramBudget {
    let act = stage1.peak_activation_sram.max(stage2.peak_activation_sram);
    let image = match mode {
        SramMode::Baseline => rep.mem_old,
        SramMode::TwoStage => rep.m1_sp.max(rep.m2_sp),
    };
    SramBudget {
        total_sram: act + image,
        flash: stage1.weight_flash + stage2.weight_flash,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost_model::{analytical_costs, CostInputs};
    use crate::roi_protocol::RoiBox;

    #[test]
    fn largest_row_totals() {
        let rep = analytical_costs(&CostInputs::new(2560, 1920, 8).with_rois(vec![
            RoiBox::new(
                0, 0, 112, 112
            );
            16
        ]))
        .unwrap();
        let mcu = MemoryProfile::new("mcunetv2", 167_500, 976_000);
        let none = MemoryProfile::empty();
        let two = peak_sram(&none, &mcu, &rep, SramMode::TwoStage);
        assert_eq!(two.total_sram, 397_900);
        assert_eq!(two.flash, 976_000);
        let base = peak_sram(&none, &mcu, &rep, SramMode::Baseline);
        assert_eq!(base.total_sram, 14_913_100);
    }

    #[test]
    fn zero_image_is_activation_only() {
        let p = MemoryProfile::new("x", 1234, 0);
        let b = peak_sram(
            &p,
            &MemoryProfile::empty(),
            &CostReport::default(),
            SramMode::TwoStage,
        );
        assert_eq!(b.total_sram, 1234);
    }
}
