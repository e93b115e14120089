//! Spectral convolution and Fourier-multiplier application on periodic grids.
//!
//! Conventions: the continuous transform is u-hat(xi) = integral of
//! u(x) e^{-2 pi i x xi} dx, so DFT bin k represents xi_k = k/(2L). A kernel
//! passed to [`convolve`] is sampled on the same grid as the operand (origin
//! at node n/2 per axis); the half-grid rotation that brings its origin to
//! index 0 is the (-1)^k sign applied in frequency space.

use crate::error::{Error, Result};
use crate::grid::{Field, GridSpec};
use crate::par;
use num_complex::Complex64;
use once_cell::sync::Lazy;
use rustfft::{Fft, FftDirection, FftPlanner};
use std::collections::HashMap;
use std::sync::{Arc, Mutex};

type PlanMap = HashMap<(usize, bool), Arc<dyn Fft<f64>>>;

static PLAN_CACHE: Lazy<Mutex<PlanMap>> = Lazy::new(|| Mutex::new(HashMap::new()));

fn plan(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    let mut cache = PLAN_CACHE.lock().unwrap();
    cache
        .entry((n, inverse))
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            let dir = if inverse {
                FftDirection::Inverse
            } else {
                FftDirection::Forward
            };
            planner.plan_fft(n, dir)
        })
        .clone()
}

/// FFT driver bound to one grid. Holds the plans; all methods are `&self`
/// and thread-safe.
pub struct SpectralEngine {
    spec: GridSpec,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl SpectralEngine {
    pub fn new(spec: GridSpec) -> Self {
        SpectralEngine {
            spec,
            fwd: plan(spec.n, false),
            inv: plan(spec.n, true),
        }
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    fn run_axis(&self, data: &mut [Complex64], fft: &Arc<dyn Fft<f64>>) {
        let n = self.spec.n;
        par::for_each_row_mut(data, n, |_, row| {
            let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
            fft.process_with_scratch(row, &mut scratch);
        });
    }

    fn transpose(data: &[Complex64], n: usize) -> Vec<Complex64> {
        let mut out = vec![Complex64::default(); data.len()];
        par::for_each_row_mut(&mut out, n, |i, row| {
            for (j, v) in row.iter_mut().enumerate() {
                *v = data[j * n + i];
            }
        });
        out
    }

    /// Unnormalized forward DFT of real samples.
    pub fn forward(&self, values: &[f64]) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        match self.spec.dim {
            1 => {
                let mut scratch = vec![Complex64::default(); self.fwd.get_inplace_scratch_len()];
                self.fwd.process_with_scratch(&mut buf, &mut scratch);
            }
            _ => {
                let n = self.spec.n;
                self.run_axis(&mut buf, &self.fwd);
                let mut t = Self::transpose(&buf, n);
                self.run_axis(&mut t, &self.fwd);
                buf = Self::transpose(&t, n);
            }
        }
        buf
    }

    /// Inverse DFT (with 1/n^d normalization), real part.
    pub fn inverse_real(&self, mut freq: Vec<Complex64>) -> Vec<f64> {
        match self.spec.dim {
            1 => {
                let mut scratch = vec![Complex64::default(); self.inv.get_inplace_scratch_len()];
                self.inv.process_with_scratch(&mut freq, &mut scratch);
            }
            _ => {
                let n = self.spec.n;
                self.run_axis(&mut freq, &self.inv);
                let mut t = Self::transpose(&freq, n);
                self.run_axis(&mut t, &self.inv);
                freq = Self::transpose(&t, n);
            }
        }
        let scale = 1.0 / self.spec.len() as f64;
        let mut out = vec![0.0f64; freq.len()];
        par::for_each_indexed_mut(&mut out, |i, v| *v = freq[i].re * scale);
        out
    }

    /// Frequency vector for flat bin index.
    fn bin_frequency(&self, flat: usize) -> Vec<f64> {
        match self.spec.dim {
            1 => vec![self.spec.frequency(flat)],
            _ => vec![
                self.spec.frequency(flat / self.spec.n),
                self.spec.frequency(flat % self.spec.n),
            ],
        }
    }

    /// Grid transform of a sampled kernel: dx^d * (-1)^k * DFT(kernel).
    /// The sign rotates the [-L,L)-sampled kernel so its origin sits at
    /// index 0.
    /// Approximates the continuous kernel-hat at each represented frequency.
    pub fn kernel_transform(&self, kernel: &Field) -> Vec<Complex64> {
        let w = self.spec.cell_volume();
        let mut hat = self.forward(kernel.values());
        let spec = self.spec;
        let n = spec.n;
        par::for_each_indexed_mut(&mut hat, |i, v| {
            let s = match spec.dim {
                1 => i,
                _ => i / n + i % n,
            };
            let sign = if s % 2 == 0 { w } else { -w };
            *v *= sign;
        });
        hat
    }

    /// Pointwise product in frequency space, then inverse transform.
    pub fn apply_transform(&self, multiplier: &[Complex64], u: &Field) -> Field {
        let mut hat = self.forward(u.values());
        par::for_each_indexed_mut(&mut hat, |i, v| *v *= multiplier[i]);
        Field::from_raw(self.spec, self.inverse_real(hat))
    }
}

/// Periodic discrete convolution scaled by dx^d, approximating
/// integral of kernel(x-y) u(y) dy.
pub fn convolve(kernel: &Field, u: &Field) -> Result<Field> {
    if kernel.spec() != u.spec() {
        return Err(Error::GridMismatch {
            left: format!("{:?}", kernel.spec()),
            right: format!("{:?}", u.spec()),
        });
    }
    let engine = SpectralEngine::new(*u.spec());
    let m = engine.kernel_transform(kernel);
    Ok(engine.apply_transform(&m, u))
}

/// Apply a Fourier multiplier m(xi) to u: inverse transform of m * u-hat.
///
/// `m` receives the frequency vector (length d, cycles per unit length).
/// The result's imaginary part is discarded; callers are expected to pass
/// conjugate-symmetric multipliers.
pub fn apply_multiplier<M>(m: M, u: &Field) -> Result<Field>
where
    M: Fn(&[f64]) -> Complex64 + Sync + Send,
{
    let engine = SpectralEngine::new(*u.spec());
    let len = u.spec().len();
    let table: Vec<Complex64> = par::map_indices(len, |i| m(&engine.bin_frequency(i)));
    if let Some(i) = table
        .iter()
        .position(|v| !v.re.is_finite() || !v.im.is_finite())
    {
        return Err(Error::NonFiniteMultiplier {
            xi: engine.bin_frequency(i),
        });
    }
    Ok(engine.apply_transform(&table, u))
}

/// Weighted power spectrum sum: sum over bins of |u-hat(xi_k)|^2 d xi^d,
/// where u-hat = dx^d DFT. Equals norm(u, L2)^2 by Parseval.
pub fn spectral_energy(u: &Field) -> f64 {
    let engine = SpectralEngine::new(*u.spec());
    let hat = engine.forward(u.values());
    let spec = u.spec();
    let dxi = 1.0 / (2.0 * spec.half_width);
    let weight = spec.cell_volume().powi(2) * dxi.powi(spec.dim as i32);
    let s = par::reduce_chunks(
        &hat,
        |c| c.iter().map(|z| z.norm_sqr()).sum::<f64>(),
        |a, b| a + b,
    )
    .unwrap_or(0.0);
    s * weight
}
