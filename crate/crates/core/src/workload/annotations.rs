//! JSON-lines annotation files, one frame per line:
//!
//! ```text
//! {"id":"f1","w":2560,"h":1920,"boxes":[[96,200,56,56]],"image":"f1.ppm"}
//! ```
//!
//! Boxes are `[x, y, W, H]` (optionally `[x, y, W, H, class]`) in full-resolution
//! pixels. Boxes reaching past the frame are clipped; boxes with no area
//! inside the frame are dropped. Both produce warnings.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::Result;
use crate::roi_protocol::RoiBox;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotatedFrame {
    pub frame_id: String,
    pub width: u32,
    pub height: u32,
    pub boxes: Vec<RoiBox>,
    pub image: Option<PathBuf>,
}

impl AnnotatedFrame {
    /// The frame as one line of the annotation format.
    pub fn to_json_line(&self) -> String {
        let boxes: Vec<Value> = self
            .boxes
            .iter()
            .map(|b| {
                if b.class_id == 0 {
                    serde_json::json!([b.x, b.y, b.w, b.h])
                } else {
                    serde_json::json!([b.x, b.y, b.w, b.h, b.class_id])
                }
            })
            .collect();
        let mut obj = serde_json::json!({
            "id": self.frame_id,
            "w": self.width,
            "h": self.height,
            "boxes": boxes,
        });
        if let Some(img) = &self.image {
            obj["image"] = Value::String(img.display().to_string());
        }
        obj.to_string()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LineError {
    pub line: usize,
    pub message: String,
}

/// Parsed frames plus everything that went wrong along the way.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct AnnotationSet {
    pub frames: Vec<AnnotatedFrame>,
    pub errors: Vec<LineError>,
    pub warnings: Vec<String>,
    /// Lines carrying none of the expected fields.
    pub skipped: usize,
}

const FIELDS: [&str; 4] = ["id", "w", "h", "boxes"];

fn dim(obj: &serde_json::Map<String, Value>, key: &str) -> std::result::Result<u32, String> {
    obj.get(key)
        .and_then(Value::as_u64)
        .filter(|v| *v > 0 && *v <= u32::MAX as u64)
        .map(|v| v as u32)
        .ok_or_else(|| format!("field '{key}' must be a positive integer"))
}

fn coord(v: &Value) -> Option<u32> {
    let f = v.as_f64()?;
    (f >= 0.0 && f <= u32::MAX as f64).then(|| f.round() as u32)
}

fn parse_box(v: &Value) -> Option<RoiBox> {
    let arr = v.as_array()?;
    if arr.len() != 4 && arr.len() != 5 {
        return None;
    }
    let c: Vec<u32> = arr.iter().map(coord).collect::<Option<_>>()?;
    Some(RoiBox {
        x: c[0],
        y: c[1],
        w: c[2],
        h: c[3],
        class_id: c.get(4).copied().unwrap_or(0),
    })
}

fn parse_line(line_no: usize, text: &str, set: &mut AnnotationSet) {
    let value: Value = match serde_json::from_str(text) {
        Ok(v) => v,
        Err(e) => {
            set.errors.push(LineError {
                line: line_no,
                message: format!("invalid JSON: {e}"),
            });
            return;
        }
    };
    let Some(obj) = value.as_object() else {
        set.errors.push(LineError {
            line: line_no,
            message: "expected a JSON object".into(),
        });
        return;
    };
    if !FIELDS.iter().any(|f| obj.contains_key(*f)) {
        set.skipped += 1;
        set.warnings
            .push(format!("line {line_no}: no frame fields, skipped"));
        return;
    }
    let fail = |set: &mut AnnotationSet, message: String| {
        set.errors.push(LineError {
            line: line_no,
            message,
        })
    };
    let Some(id) = obj.get("id").and_then(Value::as_str) else {
        return fail(set, "field 'id' must be a string".into());
    };
    let (w, h) = match (dim(obj, "w"), dim(obj, "h")) {
        (Ok(w), Ok(h)) => (w, h),
        (Err(e), _) | (_, Err(e)) => return fail(set, e),
    };
    let raw_boxes = match obj.get("boxes") {
        None => &[][..],
        Some(Value::Array(a)) => a.as_slice(),
        Some(_) => return fail(set, "field 'boxes' must be an array".into()),
    };

    let mut boxes = Vec::with_capacity(raw_boxes.len());
    for (i, raw) in raw_boxes.iter().enumerate() {
        let Some(b) = parse_box(raw) else {
            set.warnings
                .push(format!("line {line_no}: box {i} is not [x,y,W,H], dropped"));
            continue;
        };
        match b.clamped(w, h) {
            Some(c) if c == b => boxes.push(b),
            Some(c) => {
                set.warnings.push(format!(
                    "line {line_no}: box {i} [{},{},{},{}] clamped to [{},{},{},{}]",
                    b.x, b.y, b.w, b.h, c.x, c.y, c.w, c.h
                ));
                boxes.push(c);
            }
            None => set.warnings.push(format!(
                "line {line_no}: box {i} has no area inside frame, dropped"
            )),
        }
    }

    set.frames.push(AnnotatedFrame {
        frame_id: id.to_string(),
        width: w,
        height: h,
        boxes,
        image: obj.get("image").and_then(Value::as_str).map(PathBuf::from),
    });
}

/// Parses annotation text. Blank lines are ignored.
pub fn parse_annotations(text: &str) -> AnnotationSet {
    let mut set = AnnotationSet::default();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        parse_line(i + 1, line, &mut set);
    }
    set
}

pub fn load_annotations(path: impl AsRef<Path>) -> Result<AnnotationSet> {
    let text = std::fs::read_to_string(path)?;
    Ok(parse_annotations(&text))
}
