//! The log-polar retino-cortical map and raster output.
//!
//! Retinal polar coordinates (r, theta) map to cortical Cartesian
//! coordinates (x1, x2) = (log r, theta); the inverse is r = e^{x1},
//! theta = x2 (mod 2 pi). Retinal images are produced by sampling the
//! cortical field at (log r, theta) for every output pixel.

use crate::error::{Error, Result};
use crate::grid::Field;
use crate::par;
use crate::stimulus::BinaryPattern;
use std::f64::consts::PI;

/// Forward map re^{i theta} -> (log r, theta). Errors for r <= 0.
pub fn retino_cortical(r: f64, theta: f64) -> Result<(f64, f64)> {
    if r <= 0.0 {
        return Err(Error::Invalid(format!(
            "retinal radius must be positive, got {r}"
        )));
    }
    Ok((r.ln(), theta))
}

/// Inverse map (x1, x2) -> (r, theta mod 2 pi).
pub fn cortical_to_retina(x1: f64, x2: f64) -> (f64, f64) {
    (x1.exp(), x2.rem_euclid(2.0 * PI))
}

/// 8-bit grayscale raster.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Raster {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<u8>,
}

impl Raster {
    /// Binary PGM (P5, maxval 255).
    pub fn to_pgm(&self) -> Vec<u8> {
        let mut out = format!("P5\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend_from_slice(&self.pixels);
        out
    }

    pub fn save_pgm(&self, path: &std::path::Path) -> Result<()> {
        std::fs::write(path, self.to_pgm())?;
        Ok(())
    }
}

const BACKGROUND: u8 = 255; // white outside the retinal disk

enum WarpSource<'a> {
    Real(&'a Field),
    Binary(&'a BinaryPattern),
}

fn warp(source: WarpSource<'_>, out_px: usize, r_max: f64) -> Result<Raster> {
    if out_px < 64 {
        return Err(Error::Invalid(format!(
            "out_px must be >= 64, got {out_px}"
        )));
    }
    if !(r_max > 0.0 && r_max.is_finite()) {
        return Err(Error::Invalid(format!(
            "r_max must be positive, got {r_max}"
        )));
    }
    let (l, n, dx) = match &source {
        WarpSource::Real(f) => (f.spec().half_width, f.spec().n, f.spec().dx()),
        WarpSource::Binary(b) => {
            let half = b.half_width();
            (half, b.n(), 2.0 * half / b.n() as f64)
        }
    };
    if matches!(&source, WarpSource::Real(f) if f.spec().dim != 2)
        || matches!(&source, WarpSource::Binary(b) if b.dim() != 2)
    {
        return Err(Error::Invalid(
            "retinal warp needs a 2D cortical source".into(),
        ));
    }

    // symmetric value scale for real fields
    let vmax = match &source {
        WarpSource::Real(f) => f.norm(crate::grid::Norm::Sup).max(1e-300),
        WarpSource::Binary(_) => 1.0,
    };

    let center = (out_px as f64 - 1.0) / 2.0;
    let scale = r_max / center;
    let mut pixels = vec![BACKGROUND; out_px * out_px];
    par::for_each_row_mut(&mut pixels, out_px, |row, line| {
        let v = (center - row as f64) * scale;
        for (col, px) in line.iter_mut().enumerate() {
            let u = (col as f64 - center) * scale;
            let r = (u * u + v * v).sqrt();
            if r <= 0.0 || r > r_max {
                continue;
            }
            let x1 = r.ln();
            if x1 < -l || x1 > l {
                continue;
            }
            let theta = v.atan2(u); // (-pi, pi] subset of [-L, L]
            let g1 = (x1 + l) / dx;
            let g2 = (theta + l) / dx;
            *px = match &source {
                WarpSource::Real(f) => {
                    let val = bilinear(f, n, g1, g2);
                    let t = (val / vmax).clamp(-1.0, 1.0);
                    (127.5 + 127.0 * t).round() as u8
                }
                WarpSource::Binary(b) => {
                    let i1 = (g1.round() as usize).min(n - 1);
                    let i2 = (g2.round() as usize).min(n - 1);
                    if b.white(i1 * n + i2) {
                        255
                    } else {
                        0
                    }
                }
            };
        }
    });
    Ok(Raster {
        width: out_px,
        height: out_px,
        pixels,
    })
}

fn bilinear(f: &Field, n: usize, g1: f64, g2: f64) -> f64 {
    let i1 = (g1.floor() as isize).clamp(0, n as isize - 1) as usize;
    let i2 = (g2.floor() as isize).clamp(0, n as isize - 1) as usize;
    let j1 = (i1 + 1) % n;
    let j2 = (i2 + 1) % n;
    let t1 = (g1 - i1 as f64).clamp(0.0, 1.0);
    let t2 = (g2 - i2 as f64).clamp(0.0, 1.0);
    let a = f.at2(i1, i2) * (1.0 - t2) + f.at2(i1, j2) * t2;
    let b = f.at2(j1, i2) * (1.0 - t2) + f.at2(j1, j2) * t2;
    a * (1.0 - t1) + b * t1
}

/// Retinal raster of a cortical field (bilinear sampling; grayscale with a
/// symmetric scale so sign structure is visible).
pub fn warp_to_retina(field: &Field, out_px: usize, r_max: f64) -> Result<Raster> {
    warp(WarpSource::Real(field), out_px, r_max)
}

/// Retinal raster of a binary pattern (nearest-node sampling; pure
/// black/white output).
pub fn warp_binary_to_retina(pattern: &BinaryPattern, out_px: usize, r_max: f64) -> Result<Raster> {
    warp(WarpSource::Binary(pattern), out_px, r_max)
}

/// PGM render of a cortical field itself (row = x1, column = x2), symmetric
/// grayscale. Used for the cortical-plane panels.
pub fn field_to_pgm(field: &Field) -> Result<Raster> {
    if field.spec().dim != 2 {
        return Err(Error::Invalid("field raster needs a 2D field".into()));
    }
    let n = field.spec().n;
    let vmax = field.norm(crate::grid::Norm::Sup).max(1e-300);
    let mut pixels = vec![0u8; n * n];
    par::for_each_row_mut(&mut pixels, n, |row, line| {
        for (col, px) in line.iter_mut().enumerate() {
            let t = (field.at2(row, col) / vmax).clamp(-1.0, 1.0);
            *px = (127.5 + 127.0 * t).round() as u8;
        }
    });
    Ok(Raster {
        width: n,
        height: n,
        pixels,
    })
}

/// Count black/white transitions along the horizontal ray from the disk
/// center, between radii r_lo and r_hi. The workhorse for ring counting.
pub fn ray_transitions(raster: &Raster, r_lo: f64, r_hi: f64, r_max: f64) -> usize {
    let center = (raster.width as f64 - 1.0) / 2.0;
    let scale = r_max / center;
    let row = (center.round() as usize).min(raster.height - 1);
    let mut transitions = 0;
    let mut prev: Option<bool> = None;
    for col in 0..raster.width {
        let r = (col as f64 - center) * scale;
        if r < r_lo || r > r_hi {
            continue;
        }
        let dark = raster.pixels[row * raster.width + col] < 128;
        if let Some(p) = prev {
            if p != dark {
                transitions += 1;
            }
        }
        prev = Some(dark);
    }
    transitions
}
