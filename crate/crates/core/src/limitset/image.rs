use super::sample::LimitSample;
use crate::error::{Error, Result};

pub const MAX_IMAGE_SCALE: u32 = 12;

/// Binary portable graymap (P5) of `[-1, 1]^2` at pixel size `r = 2^-k`:
/// sample pixels are white, pixels whose centre is within `r` of the sample are
/// grey. Ball samples are projected to the first two coordinates.
pub fn render_pgm(sample: &LimitSample, k: u32) -> Result<Vec<u8>> {
    if !(1..=MAX_IMAGE_SCALE).contains(&k) {
        return Err(Error::usage(format!("image scale k must be in [1, {MAX_IMAGE_SCALE}]")));
    }
    let side = 1usize << (k + 1);
    let r = 2f64.powi(-(k as i32));
    let mut pixels = vec![0u8; side * side];
    for p in sample.vecs() {
        let col = (((p[0] + 1.0) / r).floor() as i64).clamp(0, side as i64 - 1);
        let row = (((1.0 - p[1]) / r).floor() as i64).clamp(0, side as i64 - 1);
        for dr in -2..=2i64 {
            for dc in -2..=2i64 {
                let (rr, cc) = (row + dr, col + dc);
                if rr < 0 || cc < 0 || rr >= side as i64 || cc >= side as i64 {
                    continue;
                }
                let px = -1.0 + (cc as f64 + 0.5) * r;
                let py = 1.0 - (rr as f64 + 0.5) * r;
                let d = ((px - p[0]).powi(2) + (py - p[1]).powi(2)).sqrt();
                let idx = rr as usize * side + cc as usize;
                if d <= r && pixels[idx] == 0 {
                    pixels[idx] = 128;
                }
            }
        }
        pixels[row as usize * side + col as usize] = 255;
    }
    let mut out = format!("P5\n{side} {side}\n255\n").into_bytes();
    out.extend_from_slice(&pixels);
    Ok(out)
}
