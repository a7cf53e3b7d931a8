//! Behavioral model of the sensor side: the analog pixel array, the
//! resistor-network averaging circuit, pooling, ADC and ROI cropping.
//!
//! All voltages are in volts and lie in `[0, vdd]`. Frames are stored
//! row-major with interleaved channels (`R, G, B` for colour frames).

mod adc;
mod circuit;
mod pooling;
pub mod ppm;

pub use adc::{adc_convert, quantize, reconstruct};
pub use circuit::{
    analog_average, branch_factors, check_operating_region, resistor_network_node_voltage,
};
pub use pooling::{extract_roi, pool_frame};

use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};
use crate::roi_protocol::RoiBox;

/// Colour handling of the stage-1 (pooled) frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColorMode {
    /// Each channel pooled independently.
    Rgb,
    /// All three channels averaged together with the spatial block.
    Gray,
}

impl ColorMode {
    pub fn channels(self) -> u32 {
        match self {
            ColorMode::Rgb => 3,
            ColorMode::Gray => 1,
        }
    }

    pub fn from_channels(c: u32) -> Result<Self> {
        match c {
            3 => Ok(ColorMode::Rgb),
            1 => Ok(ColorMode::Gray),
            other => Err(SimError::config(format!(
                "stage-1 channels must be 1 or 3, got {other}"
            ))),
        }
    }
}

impl std::str::FromStr for ColorMode {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rgb" => Ok(ColorMode::Rgb),
            "gray" | "grey" => Ok(ColorMode::Gray),
            other => Err(SimError::config(format!("unknown color mode '{other}'"))),
        }
    }
}

/// Electrical parameters of the averaging network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircuitParams {
    /// Base resistance in ohms. Only ratios matter in the ideal network.
    pub resistance: f64,
    /// Transistor threshold voltage in volts.
    pub vth: f64,
    /// Relative standard deviation of each branch resistor (lognormal).
    pub mismatch_sigma: f64,
    pub rng_seed: u64,
}

impl CircuitParams {
    pub fn ideal(vdd: f64) -> Self {
        Self {
            resistance: 10_000.0,
            vth: 0.3 * vdd,
            mismatch_sigma: 0.0,
            rng_seed: 0,
        }
    }

    pub fn validate(&self, vdd: f64) -> Result<()> {
        if !(self.resistance > 0.0 && self.resistance.is_finite()) {
            return Err(SimError::config("circuit resistance must be positive"));
        }
        if !(self.mismatch_sigma >= 0.0 && self.mismatch_sigma.is_finite()) {
            return Err(SimError::config("mismatch sigma must be non-negative"));
        }
        if !(self.vth > 0.0 && self.vth < vdd) {
            return Err(SimError::config("threshold voltage must lie in (0, vdd)"));
        }
        Ok(())
    }
}

impl Default for CircuitParams {
    fn default() -> Self {
        Self::ideal(1.0)
    }
}

/// Sensor geometry, converter precision and circuit parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensorConfig {
    /// Array width in pixels.
    pub n: u32,
    /// Array height in pixels.
    pub m: u32,
    /// Pooling factor; must divide both `n` and `m`.
    pub k: u32,
    pub color_mode: ColorMode,
    pub adc_bits: u32,
    pub vdd: f64,
    /// Bits per coordinate word in ROI requests.
    pub word_bits: u32,
    pub circuit: CircuitParams,
}

impl SensorConfig {
    /// A validated configuration with 8-bit ADC, 1 V supply and 16-bit words.
    pub fn new(n: u32, m: u32, k: u32, color_mode: ColorMode) -> Result<Self> {
        let cfg = Self {
            n,
            m,
            k,
            color_mode,
            adc_bits: 8,
            vdd: 1.0,
            word_bits: 16,
            circuit: CircuitParams::ideal(1.0),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_adc_bits(mut self, bits: u32) -> Result<Self> {
        self.adc_bits = bits;
        self.validate()?;
        Ok(self)
    }

    pub fn with_word_bits(mut self, bits: u32) -> Result<Self> {
        self.word_bits = bits;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        check_pool_geometry(self.n, self.m, self.k)?;
        if !(1..=16).contains(&self.adc_bits) {
            return Err(SimError::config(format!(
                "ADC precision must be 1..=16 bits, got {}",
                self.adc_bits
            )));
        }
        if ![8, 16, 32].contains(&self.word_bits) {
            return Err(SimError::config(format!(
                "word size must be 8, 16 or 32 bits, got {}",
                self.word_bits
            )));
        }
        if !(self.vdd > 0.0 && self.vdd.is_finite()) {
            return Err(SimError::config("vdd must be positive"));
        }
        self.circuit.validate(self.vdd)
    }

    pub fn pooled_dims(&self) -> (u32, u32) {
        (self.n / self.k, self.m / self.k)
    }
}

/// Checks that `k` is a positive divisor of both array dimensions.
pub fn check_pool_geometry(n: u32, m: u32, k: u32) -> Result<()> {
    if n == 0 || m == 0 {
        return Err(SimError::geometry("array dimensions must be at least 1x1"));
    }
    if k == 0 {
        return Err(SimError::geometry("pool factor k must be at least 1"));
    }
    if !n.is_multiple_of(k) {
        return Err(SimError::geometry(format!(
            "k={k} does not divide width {n}"
        )));
    }
    if !m.is_multiple_of(k) {
        return Err(SimError::geometry(format!(
            "k={k} does not divide height {m}"
        )));
    }
    Ok(())
}

/// Full-resolution RGB analog image.
#[derive(Debug, Clone, PartialEq)]
pub struct PixelArray {
    width: u32,
    height: u32,
    vdd: f64,
    data: Vec<f64>,
}

impl PixelArray {
    pub const CHANNELS: u32 = 3;

    pub fn new(width: u32, height: u32, vdd: f64, data: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(SimError::geometry("pixel array must be at least 1x1"));
        }
        let expected = width as usize * height as usize * 3;
        if data.len() != expected {
            return Err(SimError::geometry(format!(
                "pixel data has {} values, expected {expected}",
                data.len()
            )));
        }
        if let Some(v) = data.iter().find(|v| !(**v >= 0.0 && **v <= vdd)) {
            return Err(SimError::config(format!(
                "pixel value {v} outside [0, {vdd}]"
            )));
        }
        Ok(Self {
            width,
            height,
            vdd,
            data,
        })
    }

    /// Array filled with one RGB triple.
    pub fn filled(width: u32, height: u32, vdd: f64, rgb: [f64; 3]) -> Result<Self> {
        let data = rgb
            .iter()
            .copied()
            .cycle()
            .take(width as usize * height as usize * 3)
            .collect();
        Self::new(width, height, vdd, data)
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn vdd(&self) -> f64 {
        self.vdd
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32, c: u32) -> f64 {
        self.data[((y as usize * self.width as usize + x as usize) * 3) + c as usize]
    }

    pub fn bounds_box(&self) -> RoiBox {
        RoiBox::new(0, 0, self.width, self.height)
    }
}

/// Analog frame after pooling or cropping; values clamped to `[0, vdd]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalogFrame {
    pub width: u32,
    pub height: u32,
    pub channels: u32,
    pub vdd: f64,
    pub values: Vec<f64>,
}

/// Converted frame: one `adc_bits`-wide code per sample.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DigitalFrame {
    pub width: u32,
    pub height: u32,
    pub channels: u32,
    pub adc_bits: u32,
    pub codes: Vec<u16>,
    pub conversion_count: u64,
}

impl DigitalFrame {
    pub fn samples(&self) -> u64 {
        self.width as u64 * self.height as u64 * self.channels as u64
    }

    /// Bytes occupied on the link, rounded up to whole bytes.
    pub fn payload_bytes(&self) -> u64 {
        bits_to_bytes(self.samples() * self.adc_bits as u64)
    }
}

/// Whole bytes needed to carry `bits`.
#[inline]
pub fn bits_to_bytes(bits: u64) -> u64 {
    bits.div_ceil(8)
}
