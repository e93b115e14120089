//! Stimulus generators and binary-pattern extraction.
//!
//! Cortical representations of the classic patterns: funnel
//! P_F = cos(2 pi lambda x2), tunnel P_T = cos(2 pi lambda x1), and the two
//! MacKay stimuli, which add a Heaviside perturbation breaking the plane
//! symmetry. The jump convention is H(0) = 1 throughout.

use crate::error::{Error, Result};
use crate::grid::{Field, GridSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

/// Heaviside step with the H(0) = 1 convention.
pub fn heaviside(s: f64) -> f64 {
    if s >= 0.0 {
        1.0
    } else {
        0.0
    }
}

/// Declarative stimulus description.
#[derive(Debug, Clone, Copy)]
pub enum Stimulus {
    /// cos(2 pi lambda x2).
    Funnel { lambda: f64 },
    /// cos(2 pi lambda x1).
    Tunnel { lambda: f64 },
    /// Funnel plus epsilon H(theta - x1): the "MacKay rays" representation.
    MackayRays {
        lambda: f64,
        epsilon: f64,
        theta: f64,
    },
    /// Tunnel plus epsilon (H(-x2 - o0) + H(x2 - o1) + H(o2 - |x2|)):
    /// the "MacKay target" representation.
    MackayTarget {
        lambda: f64,
        epsilon: f64,
        offsets: [f64; 3],
    },
    /// Arbitrary pointwise function of position.
    Custom(fn(&[f64]) -> f64),
}

impl Stimulus {
    pub fn mackay_rays_default() -> Self {
        Stimulus::MackayRays {
            lambda: 2.5,
            epsilon: 0.025,
            theta: 2.0,
        }
    }

    pub fn mackay_target_default() -> Self {
        Stimulus::MackayTarget {
            lambda: 2.5,
            epsilon: 0.025,
            offsets: [9.75, 9.75, 0.25],
        }
    }

    /// Pointwise value at a position (x1[, x2]).
    pub fn eval(&self, x: &[f64]) -> f64 {
        let (x1, x2) = (x[0], if x.len() > 1 { x[1] } else { 0.0 });
        match *self {
            Stimulus::Funnel { lambda } => (2.0 * PI * lambda * x2).cos(),
            Stimulus::Tunnel { lambda } => (2.0 * PI * lambda * x1).cos(),
            Stimulus::MackayRays {
                lambda,
                epsilon,
                theta,
            } => (2.0 * PI * lambda * x2).cos() + epsilon * heaviside(theta - x1),
            Stimulus::MackayTarget {
                lambda,
                epsilon,
                offsets,
            } => {
                (2.0 * PI * lambda * x1).cos()
                    + epsilon
                        * (heaviside(-x2 - offsets[0])
                            + heaviside(x2 - offsets[1])
                            + heaviside(offsets[2] - x2.abs()))
            }
            Stimulus::Custom(f) => f(x),
        }
    }
}

/// Evaluate a stimulus on every node of a grid.
pub fn generate(stim: &Stimulus, spec: GridSpec) -> Result<Field> {
    Field::sample(spec, |x| stim.eval(x))
}

/// Sign-thresholded rendering of a field: 0 (black) where h > 0,
/// 1 (white) where h <= 0.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryPattern {
    spec_n: usize,
    spec_dim: usize,
    half_width: f64,
    bits: Vec<bool>,
}

impl BinaryPattern {
    pub fn n(&self) -> usize {
        self.spec_n
    }

    pub fn dim(&self) -> usize {
        self.spec_dim
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    /// true = white (h <= 0), false = black (h > 0).
    pub fn white(&self, flat: usize) -> bool {
        self.bits[flat]
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// Fraction of nodes whose bit differs from `other`.
    pub fn differing_fraction(&self, other: &BinaryPattern) -> Result<f64> {
        if self.bits.len() != other.bits.len() {
            return Err(Error::Invalid("binary patterns differ in size".into()));
        }
        let d = self
            .bits
            .iter()
            .zip(&other.bits)
            .filter(|(a, b)| a != b)
            .count();
        Ok(d as f64 / self.bits.len() as f64)
    }

    /// PBM (P4) serialization, one bit per node, 1 = black per the PBM
    /// convention (so black pixels are where the field is positive).
    pub fn to_pbm(&self) -> Vec<u8> {
        let (w, h) = match self.spec_dim {
            1 => (self.spec_n, 1),
            _ => (self.spec_n, self.spec_n),
        };
        let mut out = format!("P4\n{w} {h}\n").into_bytes();
        for row in 0..h {
            let mut byte = 0u8;
            let mut nbits = 0;
            for col in 0..w {
                let white = self.bits[row * w + col];
                byte = (byte << 1) | u8::from(!white);
                nbits += 1;
                if nbits == 8 {
                    out.push(byte);
                    byte = 0;
                    nbits = 0;
                }
            }
            if nbits > 0 {
                out.push(byte << (8 - nbits));
            }
        }
        out
    }
}

/// Binarize a field: zero maps to white.
pub fn binarize(h: &Field) -> BinaryPattern {
    BinaryPattern {
        spec_n: h.spec().n,
        spec_dim: h.spec().dim,
        half_width: h.spec().half_width,
        bits: h.values().iter().map(|&v| v <= 0.0).collect(),
    }
}

/// Seeded band-limited random field: random Fourier coefficients under a
/// Gaussian envelope, normalized to unit sup norm. Deterministic per seed.
pub fn random_smooth(spec: GridSpec, seed: u64, modes: usize) -> Result<Field> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let l = spec.half_width;
    let mut terms = Vec::with_capacity(modes);
    for _ in 0..modes {
        // grid-commensurate frequencies keep the field exactly periodic
        let k1: i32 = rng.gen_range(-12..=12);
        let k2: i32 = if spec.dim == 2 {
            rng.gen_range(-12..=12)
        } else {
            0
        };
        let amp: f64 = rng.gen_range(-1.0..1.0);
        let phase: f64 = rng.gen_range(0.0..2.0 * PI);
        let envelope = (-0.02 * ((k1 * k1 + k2 * k2) as f64)).exp();
        terms.push((
            k1 as f64 / (2.0 * l),
            k2 as f64 / (2.0 * l),
            amp * envelope,
            phase,
        ));
    }
    let raw = Field::sample(spec, |x| {
        let x2 = if x.len() > 1 { x[1] } else { 0.0 };
        terms
            .iter()
            .map(|(f1, f2, a, p)| a * (2.0 * PI * (f1 * x[0] + f2 * x2) + p).cos())
            .sum()
    })?;
    let sup = raw.norm(crate::grid::Norm::Sup);
    if sup == 0.0 {
        return Ok(raw);
    }
    Ok(raw.scale(1.0 / sup))
}
