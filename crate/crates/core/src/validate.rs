//! Randomized cross-check: the simulated ledger must reproduce the
//! closed-form cost terms exactly, field by field.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::analog_sensor::{ColorMode, PixelArray, SensorConfig};
use crate::cost_model::{analytical_costs, CostInputs, CostReport};
use crate::error::Result;
use crate::roi_protocol::{
    oracle_detector, run_baseline, run_two_stage, MessageKind, RoiBox, SessionTrace,
};

/// Cost terms read off a two-stage session and its baseline session.
pub fn observed_costs(two_stage: &SessionTrace, baseline: &SessionTrace) -> CostReport {
    let t = two_stage.ledger.totals();
    let b = baseline.ledger.totals();
    let item = |trace: &SessionTrace, kind| {
        trace
            .ledger
            .find(kind)
            .map(|r| r.largest_item_bytes)
            .unwrap_or(0)
    };
    let m1_sp = item(two_stage, MessageKind::CompressedFrame);
    let m2_sp = item(two_stage, MessageKind::RoiPayload);
    CostReport {
        d_old: b.baseline_bytes,
        d1_sp: t.stage1_bytes_s_to_p,
        d1_ps: t.stage1_bytes_p_to_s,
        d2_sp: t.stage2_bytes_s_to_p,
        d_new: t.bytes_s_to_p + t.bytes_p_to_s,
        mem_old: item(baseline, MessageKind::FullFrame),
        m1_sp,
        m1_ps: item(two_stage, MessageKind::RoiRequest),
        m2_sp,
        mem_new: m1_sp.max(m2_sp),
        c_old: b.baseline_conversions,
        c1_sp: t.stage1_conversions,
        c2_sp: t.stage2_conversions,
        c_new: t.total_conversions,
    }
}

/// One randomly drawn small configuration.
#[derive(Debug, Clone, Serialize)]
pub struct Trial {
    pub index: usize,
    pub config: SensorConfig,
    pub annotations: Vec<RoiBox>,
}

fn draw_trial(rng: &mut ChaCha8Rng, index: usize) -> Result<(Trial, PixelArray)> {
    let k = rng.random_range(1..=8u32);
    let n = k * rng.random_range(1..=64 / k);
    let m = k * rng.random_range(1..=64 / k);
    let color = if rng.random_bool(0.5) {
        ColorMode::Rgb
    } else {
        ColorMode::Gray
    };
    let cfg = SensorConfig::new(n, m, k, color)?
        .with_adc_bits(rng.random_range(1..=16))?
        .with_word_bits([8, 16, 32][rng.random_range(0..3)])?;
    let annotations = (0..rng.random_range(0..=8))
        .map(|_| {
            let x = rng.random_range(0..n);
            let y = rng.random_range(0..m);
            RoiBox::new(
                x,
                y,
                rng.random_range(1..=n - x),
                rng.random_range(1..=m - y),
            )
        })
        .collect();
    let data = (0..n * m * 3).map(|_| rng.random::<f64>()).collect();
    let src = PixelArray::new(n, m, cfg.vdd, data)?;
    Ok((
        Trial {
            index,
            config: cfg,
            annotations,
        },
        src,
    ))
}

/// A trial where simulation and formulas disagree.
#[derive(Debug, Clone, Serialize)]
pub struct Divergence {
    pub trial: Trial,
    pub expected: CostReport,
    pub observed: CostReport,
    /// `(field, formula value, ledger value)`
    pub fields: Vec<(&'static str, u64, u64)>,
}

/// Runs one trial: simulates both pipelines and compares with the formulas.
/// `tamper` is applied to the formula side before comparison.
pub fn check_trial(
    trial: &Trial,
    src: &PixelArray,
    tamper: Option<&dyn Fn(&mut CostReport)>,
) -> Result<Option<Divergence>> {
    let cfg = &trial.config;
    let det = oracle_detector(&trial.annotations, cfg.k);
    let two = run_two_stage(src, cfg, &det)?;
    let base = run_baseline(src, cfg)?;
    let observed = observed_costs(&two, &base);
    let mut expected = analytical_costs(&CostInputs::from_config(cfg, two.roi_boxes.clone()))?;
    if let Some(f) = tamper {
        f(&mut expected);
    }
    let fields = expected.diff(&observed);
    Ok((!fields.is_empty()).then(|| Divergence {
        trial: trial.clone(),
        expected,
        observed,
        fields,
    }))
}

/// Runs `trials` seeded trials, stopping at the first divergence.
pub fn run_validation(
    trials: usize,
    seed: u64,
    tamper: Option<&dyn Fn(&mut CostReport)>,
) -> Result<std::result::Result<usize, Box<Divergence>>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..trials {
        let (trial, src) = draw_trial(&mut rng, i)?;
        if let Some(d) = check_trial(&trial, &src, tamper)? {
            return Ok(Err(Box::new(d)));
        }
    }
    Ok(Ok(trials))
}
