use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::AnnotatedFrame;
use crate::analog_sensor::PixelArray;
use crate::error::{Result, SimError};
use crate::roi_protocol::RoiBox;

/// Deterministic scene: `j` bright `box_w × box_h` rectangles at seeded
/// positions over a dim textured background. The annotation boxes are
/// exactly the rectangles.
pub fn synth_scene(
    n: u32,
    m: u32,
    j: usize,
    box_w: u32,
    box_h: u32,
    seed: u64,
) -> Result<(PixelArray, AnnotatedFrame)> {
    if n == 0 || m == 0 {
        return Err(SimError::geometry("scene must be at least 1x1"));
    }
    if j > 0 && (box_w == 0 || box_h == 0 || box_w > n || box_h > m) {
        return Err(SimError::geometry(format!(
            "{box_w}x{box_h} box does not fit a {n}x{m} frame"
        )));
    }
    let vdd = 1.0;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut data: Vec<f64> = (0..n as usize * m as usize * 3)
        .map(|_| 0.05 + 0.25 * rng.random::<f64>())
        .collect();

    let mut boxes = Vec::with_capacity(j);
    for _ in 0..j {
        let x = rng.random_range(0..=n - box_w);
        let y = rng.random_range(0..=m - box_h);
        let color: [f64; 3] = [
            rng.random_range(0.8..=1.0),
            rng.random_range(0.8..=1.0),
            rng.random_range(0.8..=1.0),
        ];
        for yy in y..y + box_h {
            let row = yy as usize * n as usize;
            for xx in x..x + box_w {
                let base = (row + xx as usize) * 3;
                data[base..base + 3].copy_from_slice(&color);
            }
        }
        boxes.push(RoiBox::new(x, y, box_w, box_h));
    }

    let array = PixelArray::new(n, m, vdd, data)?;
    let frame = AnnotatedFrame {
        frame_id: format!("synth-{n}x{m}-s{seed}"),
        width: n,
        height: m,
        boxes,
        image: None,
    };
    Ok((array, frame))
}

/// `count` boxes of `w × h` laid out left to right, top to bottom, wrapping
/// around (and overlapping) once the frame is full.
pub fn tile_boxes(n: u32, m: u32, w: u32, h: u32, count: usize) -> Result<Vec<RoiBox>> {
    if count == 0 {
        return Ok(Vec::new());
    }
    if w == 0 || h == 0 || w > n || h > m {
        return Err(SimError::geometry(format!(
            "{w}x{h} box does not fit a {n}x{m} frame"
        )));
    }
    let cols = (n / w) as usize;
    let rows = (m / h) as usize;
    Ok((0..count)
        .map(|i| {
            let cell = i % (cols * rows);
            RoiBox::new((cell % cols) as u32 * w, (cell / cols) as u32 * h, w, h)
        })
        .collect())
}
