//! Closed-form data-transfer, memory and conversion accounting for the
//! baseline (convert everything) and two-stage pipelines.
//!
//! All byte and conversion counts are exact integers. Bit totals are rounded
//! up to whole bytes once per message, the same way the simulated link does
//! it. Display units use decimal kilobytes (1 kB = 1000 B).

mod energy;
mod memory;
mod union;

pub use energy::{energy, EnergyParams, EnergyReport, DEFAULT_E_ADC};
pub use memory::{peak_sram, MemoryProfile, SramBudget, SramMode};
pub use union::union_area;

use serde::{Deserialize, Serialize};

use crate::analog_sensor::{bits_to_bytes, check_pool_geometry, SensorConfig};
use crate::error::{Result, SimError};
use crate::roi_protocol::RoiBox;

/// How stage-2 crops occupy processor memory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MemoryMode {
    /// One crop resident at a time.
    #[default]
    Streamed,
    /// All crops resident together.
    Batched,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostInputs {
    pub n: u32,
    pub m: u32,
    pub k: u32,
    pub adc_bits: u32,
    pub word_bits: u32,
    /// Channels of the pooled frame, 1 (gray) or 3 (RGB).
    pub stage1_channels: u32,
    /// Full-resolution boxes transferred in stage 2.
    pub rois: Vec<RoiBox>,
    #[serde(default)]
    pub memory_mode: MemoryMode,
    /// Count overlapping box pixels once instead of once per box.
    #[serde(default)]
    pub dedup_union: bool,
}

impl CostInputs {
    /// 8-bit ADC, 16-bit words, RGB stage 1, no boxes.
    pub fn new(n: u32, m: u32, k: u32) -> Self {
        Self {
            n,
            m,
            k,
            adc_bits: 8,
            word_bits: 16,
            stage1_channels: 3,
            rois: Vec::new(),
            memory_mode: MemoryMode::Streamed,
            dedup_union: false,
        }
    }

    pub fn from_config(cfg: &SensorConfig, rois: Vec<RoiBox>) -> Self {
        Self {
            n: cfg.n,
            m: cfg.m,
            k: cfg.k,
            adc_bits: cfg.adc_bits,
            word_bits: cfg.word_bits,
            stage1_channels: cfg.color_mode.channels(),
            rois,
            memory_mode: MemoryMode::Streamed,
            dedup_union: false,
        }
    }

    pub fn with_rois(mut self, rois: Vec<RoiBox>) -> Self {
        self.rois = rois;
        self
    }

    pub fn with_stage1_channels(mut self, c: u32) -> Self {
        self.stage1_channels = c;
        self
    }

    pub fn validate(&self) -> Result<()> {
        check_pool_geometry(self.n, self.m, self.k)?;
        if !(1..=16).contains(&self.adc_bits) {
            return Err(SimError::config("ADC precision must be 1..=16 bits"));
        }
        if ![8, 16, 32].contains(&self.word_bits) {
            return Err(SimError::config("word size must be 8, 16 or 32 bits"));
        }
        if ![1, 3].contains(&self.stage1_channels) {
            return Err(SimError::config("stage-1 channels must be 1 or 3"));
        }
        Ok(())
    }
}

/// Data transfer (`d_*`, bytes), memory (`mem_*`/`m*`, bytes) and conversion
/// (`c_*`, ADC operations) terms for one frame.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostReport {
    pub d_old: u64,
    pub d1_sp: u64,
    pub d1_ps: u64,
    pub d2_sp: u64,
    pub d_new: u64,
    pub mem_old: u64,
    pub m1_sp: u64,
    pub m1_ps: u64,
    pub m2_sp: u64,
    pub mem_new: u64,
    pub c_old: u64,
    pub c1_sp: u64,
    pub c2_sp: u64,
    pub c_new: u64,
}

impl CostReport {
    pub const FIELDS: [&'static str; 14] = [
        "d_old", "d1_sp", "d1_ps", "d2_sp", "d_new", "mem_old", "m1_sp", "m1_ps", "m2_sp",
        "mem_new", "c_old", "c1_sp", "c2_sp", "c_new",
    ];

    pub fn values(&self) -> [u64; 14] {
        [
            self.d_old,
            self.d1_sp,
            self.d1_ps,
            self.d2_sp,
            self.d_new,
            self.mem_old,
            self.m1_sp,
            self.m1_ps,
            self.m2_sp,
            self.mem_new,
            self.c_old,
            self.c1_sp,
            self.c2_sp,
            self.c_new,
        ]
    }

    /// Field-by-field differences as `(name, self, other)`.
    pub fn diff(&self, other: &CostReport) -> Vec<(&'static str, u64, u64)> {
        Self::FIELDS
            .iter()
            .zip(self.values().into_iter().zip(other.values()))
            .filter(|(_, (a, b))| a != b)
            .map(|(name, (a, b))| (*name, a, b))
            .collect()
    }
}

/// Evaluates every transfer, memory and conversion term.
pub fn analytical_costs(input: &CostInputs) -> Result<CostReport> {
    input.validate()?;
    let p = input.adc_bits as u64;
    let pixels = input.n as u64 * input.m as u64;
    let k2 = input.k as u64 * input.k as u64;

    let c_old = pixels * 3;
    let d_old = bits_to_bytes(c_old * p);

    let c1_sp = pixels * input.stage1_channels as u64 / k2;
    let d1_sp = bits_to_bytes(c1_sp * p);
    let d1_ps = input.rois.len() as u64 * 4 * (input.word_bits as u64 / 8);

    let roi_pixels = if input.dedup_union {
        union_area(&input.rois)
    } else {
        input.rois.iter().map(RoiBox::area).sum()
    };
    let c2_sp = 3 * roi_pixels;
    let d2_sp = bits_to_bytes(c2_sp * p);
    let m2_sp = match input.memory_mode {
        MemoryMode::Streamed => input
            .rois
            .iter()
            .map(|b| bits_to_bytes(3 * b.area() * p))
            .max()
            .unwrap_or(0),
        MemoryMode::Batched => d2_sp,
    };

    Ok(CostReport {
        d_old,
        d1_sp,
        d1_ps,
        d2_sp,
        d_new: d1_sp + d1_ps + d2_sp,
        mem_old: d_old,
        m1_sp: d1_sp,
        m1_ps: d1_ps,
        m2_sp,
        mem_new: d1_sp.max(m2_sp),
        c_old,
        c1_sp,
        c2_sp,
        c_new: c1_sp + c2_sp,
    })
}

/// `old / new` kept as an exact pair of integers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ratio {
    pub old: u64,
    pub new: u64,
}

impl Ratio {
    pub fn value(&self) -> f64 {
        self.old as f64 / self.new as f64
    }

    /// The two-stage pipeline needs strictly less than the baseline.
    pub fn satisfied(&self) -> bool {
        self.old > self.new
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Reductions {
    pub data: Ratio,
    pub memory: Ratio,
    pub conversions: Ratio,
}

impl Reductions {
    pub fn all_satisfied(&self) -> bool {
        self.data.satisfied() && self.memory.satisfied() && self.conversions.satisfied()
    }
}

pub fn reduction_factors(rep: &CostReport) -> Result<Reductions> {
    if rep.d_new == 0 {
        return Err(SimError::RatioUndefined("d_new"));
    }
    if rep.mem_new == 0 {
        return Err(SimError::RatioUndefined("mem_new"));
    }
    if rep.c_new == 0 {
        return Err(SimError::RatioUndefined("c_new"));
    }
    Ok(Reductions {
        data: Ratio {
            old: rep.d_old,
            new: rep.d_new,
        },
        memory: Ratio {
            old: rep.mem_old,
            new: rep.mem_new,
        },
        conversions: Ratio {
            old: rep.c_old,
            new: rep.c_new,
        },
    })
}

/// Share of the two-stage transfer spent on each part.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StageFractions {
    pub stage1: f64,
    pub stage2: f64,
    pub request: f64,
}

pub fn stage_fractions(rep: &CostReport) -> Result<StageFractions> {
    if rep.d_new == 0 {
        return Err(SimError::RatioUndefined("d_new"));
    }
    let total = rep.d_new as f64;
    Ok(StageFractions {
        stage1: rep.d1_sp as f64 / total,
        stage2: rep.d2_sp as f64 / total,
        request: rep.d1_ps as f64 / total,
    })
}

/// Boxes realising a stage-2 load of `s·n·m` pixels (rounded to the nearest
/// pixel): full-width rows from the top, then one partial row.
pub fn load_boxes(n: u32, m: u32, s: f64) -> Result<Vec<RoiBox>> {
    if !(0.0..=1.0).contains(&s) {
        return Err(SimError::config(format!("ROI load {s} outside [0, 1]")));
    }
    let pixels = (s * n as f64 * m as f64).round() as u64;
    let rows = (pixels / n as u64) as u32;
    let rest = (pixels % n as u64) as u32;
    let mut boxes = Vec::with_capacity(2);
    if rows > 0 {
        boxes.push(RoiBox::new(0, 0, n, rows));
    }
    if rest > 0 {
        boxes.push(RoiBox::new(0, rows, rest, 1));
    }
    Ok(boxes)
}

/// Flat per-frame row with the stable CSV column set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostRow {
    pub d_old: u64,
    pub d1_sp: u64,
    pub d1_ps: u64,
    pub d2_sp: u64,
    pub d_new: u64,
    pub mem_new: u64,
    pub c_old: u64,
    pub c_new: u64,
    pub e_stage1: f64,
    pub e_stage2: f64,
    pub e_total: f64,
    pub e_baseline: f64,
}

impl CostRow {
    pub fn new(rep: &CostReport, e: &EnergyReport) -> Self {
        Self {
            d_old: rep.d_old,
            d1_sp: rep.d1_sp,
            d1_ps: rep.d1_ps,
            d2_sp: rep.d2_sp,
            d_new: rep.d_new,
            mem_new: rep.mem_new,
            c_old: rep.c_old,
            c_new: rep.c_new,
            e_stage1: e.e_stage1,
            e_stage2: e.e_stage2,
            e_total: e.e_total,
            e_baseline: e.e_baseline,
        }
    }
}

/// Decimal kilobytes.
pub fn kb(bytes: u64) -> f64 {
    bytes as f64 / 1000.0
}
