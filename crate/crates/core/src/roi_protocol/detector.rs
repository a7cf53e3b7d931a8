use super::RoiBox;
use crate::analog_sensor::DigitalFrame;

/// Stage-1 box finder running on the processor.
///
/// Boxes are returned in the coordinates of the pooled frame it is given and
/// must lie within that frame.
pub trait Detector {
    fn detect(&self, frame: &DigitalFrame) -> Vec<RoiBox>;
}

impl<F> Detector for F
where
    F: Fn(&DigitalFrame) -> Vec<RoiBox>,
{
    fn detect(&self, frame: &DigitalFrame) -> Vec<RoiBox> {
        self(frame)
    }
}

/// Detector that ignores the image and replays known annotations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleDetector {
    pooled: Vec<RoiBox>,
}

impl OracleDetector {
    pub fn boxes(&self) -> &[RoiBox] {
        &self.pooled
    }
}

impl Detector for OracleDetector {
    fn detect(&self, frame: &DigitalFrame) -> Vec<RoiBox> {
        self.pooled
            .iter()
            .filter_map(|b| b.clamped(frame.width, frame.height))
            .collect()
    }
}

/// Builds an [`OracleDetector`] from full-resolution annotations.
///
/// Origins are floored and extents rounded up when dividing by `k`, with a
/// minimum extent of one pooled pixel.
pub fn oracle_detector(annotations: &[RoiBox], k: u32) -> OracleDetector {
    let k = k.max(1);
    let pooled = annotations
        .iter()
        .map(|b| RoiBox {
            x: b.x / k,
            y: b.y / k,
            w: b.w.div_ceil(k).max(1),
            h: b.h.div_ceil(k).max(1),
            class_id: b.class_id,
        })
        .collect();
    OracleDetector { pooled }
}

/// Maps a pooled box back to the full array and clips it to `n × m`.
///
/// Returns `None` when the clipped box has zero area.
pub fn upscale_and_clamp(pooled: &RoiBox, k: u32, n: u32, m: u32) -> Option<RoiBox> {
    let scale = |v: u32| v.saturating_mul(k);
    RoiBox {
        x: scale(pooled.x),
        y: scale(pooled.y),
        w: scale(pooled.w),
        h: scale(pooled.h),
        class_id: pooled.class_id,
    }
    .clamped(n, m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn frame(w: u32, h: u32) -> DigitalFrame {
        DigitalFrame {
            width: w,
            height: h,
            channels: 1,
            adc_bits: 8,
            codes: vec![0; (w * h) as usize],
            conversion_count: (w * h) as u64,
        }
    }

    #[test]
    fn scales_annotations() {
        let d = oracle_detector(&[RoiBox::new(100, 200, 56, 56)], 8);
        assert_eq!(d.boxes(), &[RoiBox::new(12, 25, 7, 7)]);
        let d = oracle_detector(&[RoiBox::new(3, 3, 2, 2)], 4);
        assert_eq!(d.boxes(), &[RoiBox::new(0, 0, 1, 1)]);
        let b = RoiBox::new(5, 9, 13, 2);
        assert_eq!(oracle_detector(&[b], 1).boxes(), &[b]);
    }

    #[test]
    fn scaling_matches_hand_rule_on_random_boxes() {
        let mut rng = ChaCha8Rng::seed_from_u64(20);
        for _ in 0..20 {
            let k = rng.random_range(1..=8u32);
            let b = RoiBox::new(
                rng.random_range(0..500),
                rng.random_range(0..500),
                rng.random_range(1..100),
                rng.random_range(1..100),
            );
            let p = oracle_detector(&[b], k).boxes()[0];
            // floor(a / k) and ceil(a / k) by repeated subtraction
            let floor = |a: u32| (0..).take_while(|q| (q + 1) * k <= a).count() as u32;
            let ceil = |a: u32| (0..).take_while(|q| q * k < a).count() as u32;
            assert_eq!(
                p,
                RoiBox::new(floor(b.x), floor(b.y), ceil(b.w).max(1), ceil(b.h).max(1))
            );
        }
    }

    #[test]
    fn detect_clips_to_frame() {
        let d = oracle_detector(&[RoiBox::new(300, 0, 40, 8), RoiBox::new(400, 0, 8, 8)], 1);
        assert_eq!(d.detect(&frame(320, 240)), vec![RoiBox::new(300, 0, 20, 8)]);
    }

    #[test]
    fn upscale_examples() {
        let b = RoiBox::new(12, 25, 7, 7);
        assert_eq!(
            upscale_and_clamp(&b, 8, 2560, 1920),
            Some(RoiBox::new(96, 200, 56, 56))
        );
        assert_eq!(
            upscale_and_clamp(&RoiBox::new(318, 0, 4, 2), 8, 2560, 1920),
            Some(RoiBox::new(2544, 0, 16, 16))
        );
        assert_eq!(upscale_and_clamp(&b, 1, 2560, 1920), Some(b));
        assert_eq!(
            upscale_and_clamp(&RoiBox::new(320, 0, 1, 1), 8, 2560, 1920),
            None
        );
    }
}
