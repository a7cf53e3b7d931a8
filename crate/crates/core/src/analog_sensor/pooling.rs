use super::circuit::solve_network;
use super::{check_pool_geometry, AnalogFrame, ColorMode, PixelArray, SensorConfig};
use crate::error::{Result, SimError};
use crate::roi_protocol::RoiBox;

/// Averages `k×k` blocks of `src` through one resistor network per output
/// sample.
///
/// In gray mode a single network integrates all `k·k·3` pixels of a block; in
/// RGB mode each channel has its own `k·k` network.
pub fn pool_frame(src: &PixelArray, cfg: &SensorConfig) -> Result<AnalogFrame> {
    if src.width() != cfg.n || src.height() != cfg.m {
        return Err(SimError::geometry(format!(
            "config is {}x{} but array is {}x{}",
            cfg.n,
            cfg.m,
            src.width(),
            src.height()
        )));
    }
    check_pool_geometry(src.width(), src.height(), cfg.k)?;
    let k = cfg.k;
    let (pw, ph) = (src.width() / k, src.height() / k);
    let channels = cfg.color_mode.channels();
    let vdd = src.vdd();
    let mut values = Vec::with_capacity(pw as usize * ph as usize * channels as usize);
    let mut branch = Vec::with_capacity((k * k * 3) as usize);

    for by in 0..ph {
        for bx in 0..pw {
            let block_id = (by as u64 * pw as u64 + bx as u64) * channels as u64;
            match cfg.color_mode {
                ColorMode::Gray => {
                    branch.clear();
                    for y in by * k..(by + 1) * k {
                        for x in bx * k..(bx + 1) * k {
                            for c in 0..3 {
                                branch.push(src.get(x, y, c));
                            }
                        }
                    }
                    let sol = solve_network(&branch, &cfg.circuit, vdd, block_id)?;
                    values.push(sol.average().clamp(0.0, vdd));
                }
                ColorMode::Rgb => {
                    for c in 0..3 {
                        branch.clear();
                        for y in by * k..(by + 1) * k {
                            for x in bx * k..(bx + 1) * k {
                                branch.push(src.get(x, y, c));
                            }
                        }
                        let sol = solve_network(&branch, &cfg.circuit, vdd, block_id + c as u64)?;
                        values.push(sol.average().clamp(0.0, vdd));
                    }
                }
            }
        }
    }

    Ok(AnalogFrame {
        width: pw,
        height: ph,
        channels,
        vdd,
        values,
    })
}

/// Full-resolution RGB crop. The box must already lie inside the array.
pub fn extract_roi(src: &PixelArray, roi: &RoiBox) -> Result<AnalogFrame> {
    if roi.w == 0 || roi.h == 0 {
        return Err(SimError::geometry("ROI must be at least 1x1"));
    }
    let (x_end, y_end) = (roi.x as u64 + roi.w as u64, roi.y as u64 + roi.h as u64);
    if x_end > src.width() as u64 || y_end > src.height() as u64 {
        return Err(SimError::geometry(format!(
            "ROI ({}, {}, {}, {}) exceeds {}x{} array",
            roi.x,
            roi.y,
            roi.w,
            roi.h,
            src.width(),
            src.height()
        )));
    }
    let row_len = src.width() as usize * 3;
    let mut values = Vec::with_capacity(roi.w as usize * roi.h as usize * 3);
    for y in roi.y..roi.y + roi.h {
        let start = y as usize * row_len + roi.x as usize * 3;
        values.extend_from_slice(&src.data()[start..start + roi.w as usize * 3]);
    }
    Ok(AnalogFrame {
        width: roi.w,
        height: roi.h,
        channels: 3,
        vdd: src.vdd(),
        values,
    })
}
