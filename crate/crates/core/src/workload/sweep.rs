//! Design-space sweeps: every (array size, pool factor, colour mode)
//! configuration is costed over a set of frames and summarised in one row.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{tile_boxes, AnnotatedFrame, Summary};
use crate::analog_sensor::{ppm, ColorMode, PixelArray, SensorConfig};
use crate::cost_model::{
    analytical_costs, energy, load_boxes, peak_sram, CostInputs, CostReport, EnergyParams,
    EnergyReport, MemoryMode, MemoryProfile, SramMode,
};
use crate::error::{Result, SimError};
use crate::roi_protocol::{oracle_detector, run_baseline, run_two_stage, RoiBox};
use crate::validate::observed_costs;

/// Where the stage-2 boxes of each frame come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RoiModel {
    /// The annotated boxes of each frame.
    FromAnnotations,
    /// `count` boxes of a fixed size.
    FixedBox { w: u32, h: u32, count: usize },
    /// `count` boxes whose size grows with the pool factor (`w_per_k · k`).
    ScaledBox {
        w_per_k: u32,
        h_per_k: u32,
        count: usize,
    },
    /// Boxes covering a fraction `s` of the array.
    ScaledLoad { s: f64 },
}

/// Network memory footprints for one array size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileEntry {
    pub size: [u32; 2],
    #[serde(default)]
    pub stage1: Option<MemoryProfile>,
    pub stage2: MemoryProfile,
}

fn default_colors() -> Vec<ColorMode> {
    vec![ColorMode::Rgb]
}

fn default_roi() -> RoiModel {
    RoiModel::FromAnnotations
}

fn default_adc_bits() -> u32 {
    8
}

fn default_word_bits() -> u32 {
    16
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    #[serde(default)]
    pub name: String,
    /// `[n, m]` array sizes. Empty with `from_annotations` means "each
    /// frame's own size".
    #[serde(default)]
    pub sizes: Vec<[u32; 2]>,
    #[serde(default)]
    pub pool_k: Vec<u32>,
    /// Derive `k` per size so the pooled frame has this size.
    #[serde(default)]
    pub pooled_size: Option<[u32; 2]>,
    #[serde(default = "default_colors")]
    pub color_modes: Vec<ColorMode>,
    #[serde(default = "default_roi")]
    pub roi_model: RoiModel,
    #[serde(default = "default_adc_bits")]
    pub adc_bits: u32,
    #[serde(default = "default_word_bits")]
    pub word_bits: u32,
    #[serde(default)]
    pub memory_mode: MemoryMode,
    #[serde(default)]
    pub dedup_union: bool,
    /// Overrides the energy parameters passed to [`run_sweep`].
    #[serde(default)]
    pub energy: Option<EnergyParams>,
    #[serde(default)]
    pub profiles: Vec<ProfileEntry>,
    /// Also run the protocol simulation per frame and check it against the
    /// formulas.
    #[serde(default)]
    pub simulate: bool,
}

impl SweepSpec {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| SimError::Parse(format!("sweep spec: {e}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameResult {
    pub frame_id: String,
    pub cost: CostReport,
    pub energy: EnergyReport,
}

/// Summary row for one configuration; integer and energy columns hold the
/// per-frame (lower) median. When `error` is non-empty the numbers are zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub config: String,
    pub n: u32,
    pub m: u32,
    pub k: u32,
    pub color_mode: String,
    pub frames: usize,
    pub error: String,
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
    pub d_new_mean: f64,
    pub d_new_p95: f64,
    pub c_new_mean: f64,
    pub c_new_p95: f64,
    pub e_total_mean: f64,
    pub e_total_p95: f64,
    pub data_reduction: f64,
    pub conversion_reduction: f64,
    pub energy_reduction: f64,
    pub stage1_fraction: f64,
    pub sram_baseline: Option<u64>,
    pub sram_two_stage: Option<u64>,
    pub flash: Option<u64>,
    pub validated: Option<bool>,
}

impl AggregateRow {
    pub const COLUMNS: [&'static str; 33] = [
        "config",
        "n",
        "m",
        "k",
        "color_mode",
        "frames",
        "error",
        "d_old",
        "d1_sp",
        "d1_ps",
        "d2_sp",
        "d_new",
        "mem_new",
        "c_old",
        "c_new",
        "e_stage1",
        "e_stage2",
        "e_total",
        "e_baseline",
        "d_new_mean",
        "d_new_p95",
        "c_new_mean",
        "c_new_p95",
        "e_total_mean",
        "e_total_p95",
        "data_reduction",
        "conversion_reduction",
        "energy_reduction",
        "stage1_fraction",
        "sram_baseline",
        "sram_two_stage",
        "flash",
        "validated",
    ];

    fn failed(cfg: &ConfigKey, error: String) -> Self {
        Self {
            config: cfg.label(),
            n: cfg.n,
            m: cfg.m,
            k: cfg.k,
            color_mode: color_name(cfg.color),
            frames: 0,
            error,
            d_old: 0,
            d1_sp: 0,
            d1_ps: 0,
            d2_sp: 0,
            d_new: 0,
            mem_new: 0,
            c_old: 0,
            c_new: 0,
            e_stage1: 0.0,
            e_stage2: 0.0,
            e_total: 0.0,
            e_baseline: 0.0,
            d_new_mean: 0.0,
            d_new_p95: 0.0,
            c_new_mean: 0.0,
            c_new_p95: 0.0,
            e_total_mean: 0.0,
            e_total_p95: 0.0,
            data_reduction: 0.0,
            conversion_reduction: 0.0,
            energy_reduction: 0.0,
            stage1_fraction: 0.0,
            sram_baseline: None,
            sram_two_stage: None,
            flash: None,
            validated: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigResult {
    pub summary: AggregateRow,
    pub per_frame: Vec<FrameResult>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AggregateReport {
    pub name: String,
    pub configs: Vec<ConfigResult>,
}

impl AggregateReport {
    pub fn rows(&self) -> impl Iterator<Item = &AggregateRow> {
        self.configs.iter().map(|c| &c.summary)
    }

    /// One row per configuration, header always present.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new()
            .has_headers(false)
            .from_writer(out);
        w.write_record(AggregateRow::COLUMNS).map_err(csv_err)?;
        for row in self.rows() {
            w.serialize(row).map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Long format `config,metric,value` for plotting tools.
    pub fn write_long_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["config", "metric", "value"])
            .map_err(csv_err)?;
        for row in self.rows() {
            let value = serde_json::to_value(row).expect("row serializes");
            for column in AggregateRow::COLUMNS {
                if let Some(v) = value.get(column).filter(|v| v.is_number()) {
                    w.write_record([row.config.as_str(), column, &v.to_string()])
                        .map_err(csv_err)?;
                }
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn csv_err(e: csv::Error) -> SimError {
    SimError::Io(std::io::Error::other(e))
}

fn color_name(c: ColorMode) -> String {
    match c {
        ColorMode::Rgb => "rgb".into(),
        ColorMode::Gray => "gray".into(),
    }
}

#[derive(Debug, Clone, Copy)]
struct ConfigKey {
    n: u32,
    m: u32,
    k: u32,
    color: ColorMode,
}

impl ConfigKey {
    fn label(&self) -> String {
        format!(
            "{}x{}_k{}_{}",
            self.n,
            self.m,
            self.k,
            color_name(self.color)
        )
    }
}

fn configurations(
    spec: &SweepSpec,
    frames: &[AnnotatedFrame],
) -> Vec<std::result::Result<ConfigKey, Box<AggregateRow>>> {
    let mut sizes: Vec<[u32; 2]> = spec.sizes.clone();
    if sizes.is_empty() && spec.roi_model == RoiModel::FromAnnotations {
        sizes = frames.iter().map(|f| [f.width, f.height]).collect();
        sizes.sort_unstable();
        sizes.dedup();
    }
    let mut out = Vec::new();
    for [n, m] in sizes {
        let ks: std::result::Result<Vec<u32>, String> = match spec.pooled_size {
            Some([pn, pm]) => {
                if pn > 0 && pm > 0 && n % pn == 0 && m % pm == 0 && n / pn == m / pm {
                    Ok(vec![n / pn])
                } else {
                    Err(format!(
                        "GeometryError: {n}x{m} is not a square multiple of {pn}x{pm}"
                    ))
                }
            }
            None if spec.pool_k.is_empty() => Ok(vec![1]),
            None => Ok(spec.pool_k.clone()),
        };
        for &color in &spec.color_modes {
            match &ks {
                Ok(ks) => out.extend(ks.iter().map(|&k| Ok(ConfigKey { n, m, k, color }))),
                Err(e) => out.push(Err(Box::new(AggregateRow::failed(
                    &ConfigKey { n, m, k: 0, color },
                    e.clone(),
                )))),
            }
        }
    }
    out
}

fn frames_for(
    spec: &SweepSpec,
    key: &ConfigKey,
    frames: &[AnnotatedFrame],
) -> Result<Vec<AnnotatedFrame>> {
    let synthetic = |boxes: Vec<RoiBox>| {
        vec![AnnotatedFrame {
            frame_id: "model".into(),
            width: key.n,
            height: key.m,
            boxes,
            image: None,
        }]
    };
    Ok(match &spec.roi_model {
        RoiModel::FromAnnotations => {
            let mut chosen: Vec<AnnotatedFrame> = frames
                .iter()
                .filter(|f| f.width == key.n && f.height == key.m)
                .cloned()
                .collect();
            chosen.sort_by(|a, b| a.frame_id.cmp(&b.frame_id));
            chosen
        }
        RoiModel::FixedBox { w, h, count } => synthetic(tile_boxes(key.n, key.m, *w, *h, *count)?),
        RoiModel::ScaledBox {
            w_per_k,
            h_per_k,
            count,
        } => synthetic(tile_boxes(
            key.n,
            key.m,
            w_per_k * key.k,
            h_per_k * key.k,
            *count,
        )?),
        RoiModel::ScaledLoad { s } => synthetic(load_boxes(key.n, key.m, *s)?),
    })
}

fn simulate_frame(spec: &SweepSpec, key: &ConfigKey, frame: &AnnotatedFrame) -> Result<bool> {
    let mut cfg = SensorConfig::new(key.n, key.m, key.k, key.color)?
        .with_adc_bits(spec.adc_bits)?
        .with_word_bits(spec.word_bits)?;
    cfg.vdd = 1.0;
    let src = match &frame.image {
        Some(path) => ppm::read_ppm(path, cfg.vdd)?,
        None => {
            let mut a = vec![0.2; key.n as usize * key.m as usize * 3];
            for b in &frame.boxes {
                for y in b.y..b.y + b.h {
                    let row = (y as usize * key.n as usize + b.x as usize) * 3;
                    a[row..row + b.w as usize * 3].fill(0.9);
                }
            }
            PixelArray::new(key.n, key.m, cfg.vdd, a)?
        }
    };
    let two = run_two_stage(&src, &cfg, &oracle_detector(&frame.boxes, key.k))?;
    let base = run_baseline(&src, &cfg)?;
    let expected = analytical_costs(&CostInputs::from_config(&cfg, two.roi_boxes.clone()))?;
    Ok(expected == observed_costs(&two, &base))
}

fn median_u64(values: &[u64]) -> u64 {
    let mut v = values.to_vec();
    v.sort_unstable();
    v[(v.len() - 1) / 2]
}

fn evaluate(
    spec: &SweepSpec,
    key: &ConfigKey,
    frames: &[AnnotatedFrame],
    params: &EnergyParams,
) -> Result<ConfigResult> {
    let chosen = frames_for(spec, key, frames)?;
    if chosen.is_empty() {
        return Err(SimError::config(format!("no {}x{} frames", key.n, key.m)));
    }
    let mut per_frame = Vec::with_capacity(chosen.len());
    let mut validated = spec.simulate.then_some(true);
    for f in &chosen {
        let input = CostInputs {
            n: key.n,
            m: key.m,
            k: key.k,
            adc_bits: spec.adc_bits,
            word_bits: spec.word_bits,
            stage1_channels: key.color.channels(),
            rois: f.boxes.clone(),
            memory_mode: spec.memory_mode,
            dedup_union: spec.dedup_union,
        };
        let cost = analytical_costs(&input)?;
        if spec.simulate && !simulate_frame(spec, key, f)? {
            validated = Some(false);
        }
        per_frame.push(FrameResult {
            frame_id: f.frame_id.clone(),
            energy: energy(&cost, params),
            cost,
        });
    }

    let col = |f: fn(&FrameResult) -> u64| median_u64(&per_frame.iter().map(f).collect::<Vec<_>>());
    let stat = |f: fn(&FrameResult) -> f64| {
        Summary::of(&per_frame.iter().map(f).collect::<Vec<_>>()).expect("non-empty")
    };
    let d_new = stat(|r| r.cost.d_new as f64);
    let c_new = stat(|r| r.cost.c_new as f64);
    let e_total = stat(|r| r.energy.e_total);
    let d_old = col(|r| r.cost.d_old);
    let c_old = col(|r| r.cost.c_old);
    let e_baseline = stat(|r| r.energy.e_baseline).median;
    let median_cost = {
        let mut sorted: Vec<&FrameResult> = per_frame.iter().collect();
        sorted.sort_by_key(|r| r.cost.d_new);
        sorted[(sorted.len() - 1) / 2].cost
    };

    let profile = spec.profiles.iter().find(|p| p.size == [key.n, key.m]);
    let (sram_baseline, sram_two_stage, flash) = match profile {
        Some(p) => {
            let s1 = p.stage1.clone().unwrap_or_else(MemoryProfile::empty);
            let base = peak_sram(&s1, &p.stage2, &median_cost, SramMode::Baseline);
            let two = peak_sram(&s1, &p.stage2, &median_cost, SramMode::TwoStage);
            (Some(base.total_sram), Some(two.total_sram), Some(two.flash))
        }
        None => (None, None, None),
    };

    let ratio = |a: f64, b: f64| if b > 0.0 { a / b } else { f64::INFINITY };
    let d_new_med = col(|r| r.cost.d_new);
    let summary = AggregateRow {
        config: key.label(),
        n: key.n,
        m: key.m,
        k: key.k,
        color_mode: color_name(key.color),
        frames: per_frame.len(),
        error: String::new(),
        d_old,
        d1_sp: col(|r| r.cost.d1_sp),
        d1_ps: col(|r| r.cost.d1_ps),
        d2_sp: col(|r| r.cost.d2_sp),
        d_new: d_new_med,
        mem_new: col(|r| r.cost.mem_new),
        c_old,
        c_new: col(|r| r.cost.c_new),
        e_stage1: stat(|r| r.energy.e_stage1).median,
        e_stage2: stat(|r| r.energy.e_stage2).median,
        e_total: e_total.median,
        e_baseline,
        d_new_mean: d_new.mean,
        d_new_p95: d_new.p95,
        c_new_mean: c_new.mean,
        c_new_p95: c_new.p95,
        e_total_mean: e_total.mean,
        e_total_p95: e_total.p95,
        data_reduction: ratio(d_old as f64, d_new.median),
        conversion_reduction: ratio(c_old as f64, c_new.median),
        energy_reduction: ratio(e_baseline, e_total.median),
        stage1_fraction: ratio(median_cost.d1_sp as f64, median_cost.d_new as f64),
        sram_baseline,
        sram_two_stage,
        flash,
        validated,
    };
    Ok(ConfigResult { summary, per_frame })
}

/// Costs every configuration of `spec`. A configuration that fails (bad
/// geometry, no frames) yields a row with its error instead of aborting the
/// sweep.
pub fn run_sweep(
    spec: &SweepSpec,
    frames: &[AnnotatedFrame],
    params: &EnergyParams,
) -> AggregateReport {
    let params = spec.energy.unwrap_or(*params);
    let configs = configurations(spec, frames)
        .into_iter()
        .map(|c| match c {
            Ok(key) => evaluate(spec, &key, frames, &params).unwrap_or_else(|e| ConfigResult {
                summary: AggregateRow::failed(&key, e.to_string()),
                per_frame: Vec::new(),
            }),
            Err(row) => ConfigResult {
                summary: *row,
                per_frame: Vec::new(),
            },
        })
        .collect();
    AggregateReport {
        name: spec.name.clone(),
        configs,
    }
}
