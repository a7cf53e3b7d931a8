use super::{AnalogFrame, DigitalFrame, SensorConfig};

/// Quantizes one voltage to a `bits`-wide code.
///
/// `round(v / vdd * (2^bits - 1))`, half away from zero, clamped to the code
/// range.
#[inline]
pub fn quantize(v: f64, vdd: f64, bits: u32) -> u16 {
    let full = ((1u32 << bits) - 1) as f64;
    let code = (v / vdd * full).round();
    code.clamp(0.0, full) as u16
}

/// Voltage represented by a code (inverse of [`quantize`] on the grid).
#[inline]
pub fn reconstruct(code: u16, vdd: f64, bits: u32) -> f64 {
    let full = ((1u32 << bits) - 1) as f64;
    code as f64 / full * vdd
}

/// Converts every sample of `frame`, counting one ADC operation per sample.
pub fn adc_convert(frame: &AnalogFrame, cfg: &SensorConfig) -> DigitalFrame {
    let codes: Vec<u16> = frame
        .values
        .iter()
        .map(|&v| quantize(v, cfg.vdd, cfg.adc_bits))
        .collect();
    DigitalFrame {
        width: frame.width,
        height: frame.height,
        channels: frame.channels,
        adc_bits: cfg.adc_bits,
        conversion_count: codes.len() as u64,
        codes,
    }
}
