use serde::{Deserialize, Serialize};

/// Order statistics of a sample. Medians of even-length samples take the
/// lower middle element; `p95` is nearest-rank.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub min: f64,
    pub median: f64,
    pub mean: f64,
    pub p95: f64,
    pub max: f64,
}

impl Summary {
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        let n = v.len();
        let rank95 = ((0.95 * n as f64).ceil() as usize).clamp(1, n);
        Some(Self {
            min: v[0],
            median: v[(n - 1) / 2],
            mean: v.iter().sum::<f64>() / n as f64,
            p95: v[rank95 - 1],
            max: v[n - 1],
        })
    }
}
