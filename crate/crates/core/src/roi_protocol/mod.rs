//! Two-stage sensor/processor exchange.
//!
//! A session sends a pooled frame to the processor, receives back a list of
//! boxes in pooled coordinates, and answers with full-resolution crops of
//! those boxes. Every message is summarised in a [`TransferLedger`].

mod detector;
mod ledger;
mod session;

pub use detector::{oracle_detector, upscale_and_clamp, Detector, OracleDetector};
pub use ledger::{
    Direction, LedgerTotals, Message, MessageKind, MessageRecord, Stage, TransferLedger,
};
pub use session::{run_baseline, run_two_stage, SessionTrace};

use serde::{Deserialize, Serialize};

/// Axis-aligned box: top-left corner plus extent, in pixels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RoiBox {
    pub x: u32,
    pub y: u32,
    pub w: u32,
    pub h: u32,
    #[serde(default)]
    pub class_id: u32,
}

impl RoiBox {
    pub const fn new(x: u32, y: u32, w: u32, h: u32) -> Self {
        Self {
            x,
            y,
            w,
            h,
            class_id: 0,
        }
    }

    pub fn area(&self) -> u64 {
        self.w as u64 * self.h as u64
    }

    pub fn is_empty(&self) -> bool {
        self.w == 0 || self.h == 0
    }

    /// Right and bottom edges (exclusive).
    pub fn end(&self) -> (u64, u64) {
        (self.x as u64 + self.w as u64, self.y as u64 + self.h as u64)
    }

    pub fn fits_within(&self, width: u32, height: u32) -> bool {
        let (xe, ye) = self.end();
        !self.is_empty() && xe <= width as u64 && ye <= height as u64
    }

    /// Clips the box to `[0, width) × [0, height)`. `None` if nothing remains.
    pub fn clamped(&self, width: u32, height: u32) -> Option<RoiBox> {
        if self.x >= width || self.y >= height {
            return None;
        }
        let w = self.w.min(width - self.x);
        let h = self.h.min(height - self.y);
        let out = RoiBox { w, h, ..*self };
        (!out.is_empty()).then_some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clamp_rules() {
        let b = RoiBox::new(2550, 1900, 56, 56);
        assert_eq!(b.clamped(2560, 1920), Some(RoiBox::new(2550, 1900, 10, 20)));
        assert_eq!(RoiBox::new(2560, 0, 4, 4).clamped(2560, 1920), None);
        assert_eq!(RoiBox::new(0, 0, 0, 4).clamped(2560, 1920), None);
        assert!(RoiBox::new(0, 0, 320, 240).fits_within(320, 240));
        assert!(!RoiBox::new(1, 0, 320, 240).fits_within(320, 240));
    }
}
