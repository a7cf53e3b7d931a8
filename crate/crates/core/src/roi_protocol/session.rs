use serde::{Deserialize, Serialize};

use super::{upscale_and_clamp, Detector, Message, RoiBox, TransferLedger};
use crate::analog_sensor::{
    adc_convert, extract_roi, pool_frame, DigitalFrame, PixelArray, SensorConfig,
};
use crate::error::{Result, SimError};

/// Everything observed during one session.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionTrace {
    #[serde(flatten)]
    pub ledger: TransferLedger,
    /// Boxes returned by the detector, pooled coordinates.
    #[serde(default)]
    pub stage1_boxes: Vec<RoiBox>,
    /// Boxes actually cropped, full-resolution coordinates.
    #[serde(default)]
    pub roi_boxes: Vec<RoiBox>,
    #[serde(skip)]
    pub payload: Vec<DigitalFrame>,
}

impl SessionTrace {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("trace serializes")
    }
}

fn check_dims(src: &PixelArray, cfg: &SensorConfig) -> Result<()> {
    cfg.validate()?;
    if src.width() != cfg.n || src.height() != cfg.m {
        return Err(SimError::geometry(format!(
            "config is {}x{} but array is {}x{}",
            cfg.n,
            cfg.m,
            src.width(),
            src.height()
        )));
    }
    Ok(())
}

/// Runs the pooled-detect-crop exchange for one frame.
///
/// The request is omitted when the detector finds nothing, and the payload
/// when no box survives clipping.
pub fn run_two_stage(
    src: &PixelArray,
    cfg: &SensorConfig,
    det: &dyn Detector,
) -> Result<SessionTrace> {
    check_dims(src, cfg)?;
    let mut ledger = TransferLedger::new(cfg.word_bits);

    let pooled = adc_convert(&pool_frame(src, cfg)?, cfg);
    let stage1_boxes = det.detect(&pooled);
    ledger.record(&Message::CompressedFrame(pooled));

    let mut roi_boxes = Vec::with_capacity(stage1_boxes.len());
    let mut payload = Vec::with_capacity(stage1_boxes.len());
    if !stage1_boxes.is_empty() {
        ledger.record(&Message::RoiRequest(stage1_boxes.clone()));
        for b in &stage1_boxes {
            match upscale_and_clamp(b, cfg.k, cfg.n, cfg.m) {
                Some(full) => {
                    payload.push(adc_convert(&extract_roi(src, &full)?, cfg));
                    roi_boxes.push(full);
                }
                None => ledger.note(format!(
                    "dropped zero-area box ({}, {}, {}, {}) after clamping",
                    b.x, b.y, b.w, b.h
                )),
            }
        }
        if !payload.is_empty() {
            let msg = Message::RoiPayload(payload);
            ledger.record(&msg);
            let Message::RoiPayload(frames) = msg else {
                unreachable!()
            };
            payload = frames;
        }
    }

    Ok(SessionTrace {
        ledger,
        stage1_boxes,
        roi_boxes,
        payload,
    })
}

/// Converts and sends the entire array in one message.
pub fn run_baseline(src: &PixelArray, cfg: &SensorConfig) -> Result<SessionTrace> {
    check_dims(src, cfg)?;
    let mut ledger = TransferLedger::new(cfg.word_bits);
    let full = adc_convert(&extract_roi(src, &src.bounds_box())?, cfg);
    ledger.record(&Message::FullFrame(full));
    Ok(SessionTrace {
        ledger,
        stage1_boxes: Vec::new(),
        roi_boxes: Vec::new(),
        payload: Vec::new(),
    })
}
