//! Binary PPM (`P6`, maxval 255) input, mapped linearly onto `[0, vdd]`.

use std::io::{Read, Write};
use std::path::Path;

use super::PixelArray;
use crate::error::{Result, SimError};

struct Header {
    width: u32,
    height: u32,
    maxval: u32,
    offset: usize,
}

fn parse_header(bytes: &[u8]) -> Result<Header> {
    let mut pos = 0;
    let mut fields = Vec::with_capacity(4);
    while fields.len() < 4 {
        // whitespace and comments
        while pos < bytes.len() {
            if bytes[pos].is_ascii_whitespace() {
                pos += 1;
            } else if bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
            } else {
                break;
            }
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() && bytes[pos] != b'#' {
            pos += 1;
        }
        if start == pos {
            return Err(SimError::Parse("truncated PPM header".into()));
        }
        fields.push(std::str::from_utf8(&bytes[start..pos]).unwrap_or(""));
    }
    if fields[0] != "P6" {
        return Err(SimError::Parse(format!(
            "unsupported image magic '{}', expected P6",
            fields[0]
        )));
    }
    let num = |s: &str, what: &str| {
        s.parse::<u32>()
            .map_err(|_| SimError::Parse(format!("bad PPM {what} '{s}'")))
    };
    let header = Header {
        width: num(fields[1], "width")?,
        height: num(fields[2], "height")?,
        maxval: num(fields[3], "maxval")?,
        offset: pos + 1,
    };
    if header.maxval != 255 {
        return Err(SimError::Parse(format!(
            "only maxval 255 is supported, got {}",
            header.maxval
        )));
    }
    Ok(header)
}

pub fn decode_ppm(bytes: &[u8], vdd: f64) -> Result<PixelArray> {
    let h = parse_header(bytes)?;
    let len = h.width as usize * h.height as usize * 3;
    let body = bytes
        .get(h.offset..h.offset + len)
        .ok_or_else(|| SimError::Parse("PPM pixel data truncated".into()))?;
    let data = body.iter().map(|&b| b as f64 / 255.0 * vdd).collect();
    PixelArray::new(h.width, h.height, vdd, data)
}

pub fn read_ppm(path: impl AsRef<Path>, vdd: f64) -> Result<PixelArray> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut bytes)?;
    decode_ppm(&bytes, vdd)
}

/// Encodes an array as 8-bit P6, rounding each value to the nearest level.
pub fn encode_ppm(array: &PixelArray) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", array.width(), array.height()).into_bytes();
    out.extend(
        array
            .data()
            .iter()
            .map(|v| (v / array.vdd() * 255.0).round().clamp(0.0, 255.0) as u8),
    );
    out
}

pub fn write_ppm(path: impl AsRef<Path>, array: &PixelArray) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    f.write_all(&encode_ppm(array))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decodes_with_comment() {
        let mut bytes = b"P6\n# made by hand\n2 1\n255\n".to_vec();
        bytes.extend([0, 255, 51, 102, 204, 255]);
        let a = decode_ppm(&bytes, 1.0).unwrap();
        assert_eq!((a.width(), a.height()), (2, 1));
        assert_eq!(a.get(0, 0, 1), 1.0);
        assert!((a.get(0, 0, 2) - 0.2).abs() < 1e-12);
    }

    #[test]
    fn round_trip_on_grid() {
        let data: Vec<f64> = (0..12).map(|i| (i * 20) as f64 / 255.0).collect();
        let a = PixelArray::new(2, 2, 1.0, data).unwrap();
        let b = decode_ppm(&encode_ppm(&a), 1.0).unwrap();
        for (x, y) in a.data().iter().zip(b.data()) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_other_formats() {
        assert!(decode_ppm(b"P3\n1 1\n255\n0 0 0", 1.0).is_err());
        assert!(decode_ppm(b"P6\n1 1\n65535\n\0\0\0\0\0\0", 1.0).is_err());
        assert!(decode_ppm(b"P6\n2 2\n255\n\0\0", 1.0).is_err());
        assert!(decode_ppm(b"P6\n2", 1.0).is_err());
    }
}
