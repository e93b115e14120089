//! Firing-rate nonlinearities: value and first derivative.
//!
//! All variants satisfy f(0) = 0, f nondecreasing, f'(0) = 1 = max f'.
//! Every sigmoid is bounded by 1 in absolute value; `Linear` is unbounded.

use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ResponseKind {
    /// f(s) = s.
    Linear,
    /// f(s) = tanh(s).
    Tanh,
    /// f(s) = erf(sqrt(pi) s / 2), normalized so f'(0) = 1.
    ErfSigmoid,
    /// f(s) = s / (1 + |s|).
    Rational,
    /// f(s) = s on [-1, 1], capped at +-1 outside. With `delta > 0` the
    /// corner at |s| = 1 is replaced by an odd, monotone C^2 quintic blend
    /// on [1 - delta, 1 + delta]; delta = 0 is the exact piecewise form.
    CappedLinear { delta: f64 },
}

impl ResponseKind {
    pub const fn capped() -> Self {
        ResponseKind::CappedLinear { delta: 0.0 }
    }

    /// Bounded variants admit the g1 sup-bound construction.
    pub fn is_bounded(&self) -> bool {
        !matches!(self, ResponseKind::Linear)
    }

    pub fn f(&self, s: f64) -> f64 {
        match *self {
            ResponseKind::Linear => s,
            ResponseKind::Tanh => s.tanh(),
            ResponseKind::ErfSigmoid => libm::erf(PI.sqrt() * s / 2.0),
            ResponseKind::Rational => s / (1.0 + s.abs()),
            ResponseKind::CappedLinear { delta } => capped_f(s, delta),
        }
    }

    pub fn f_prime(&self, s: f64) -> f64 {
        match *self {
            ResponseKind::Linear => 1.0,
            ResponseKind::Tanh => {
                let t = s.tanh();
                1.0 - t * t
            }
            ResponseKind::ErfSigmoid => (-PI * s * s / 4.0).exp(),
            ResponseKind::Rational => {
                let d = 1.0 + s.abs();
                1.0 / (d * d)
            }
            ResponseKind::CappedLinear { delta } => capped_f_prime(s, delta),
        }
    }

    /// Upper bound on |f''| where known in closed form (used by the
    /// gamma-Lipschitz estimate); None for the kinked delta = 0 form.
    pub fn f_second_bound(&self) -> Option<f64> {
        match *self {
            ResponseKind::Linear => Some(0.0),
            // max |f''| at s* = atanh(1/sqrt 3): 4/(3 sqrt 3)
            ResponseKind::Tanh => Some(4.0 / (3.0 * 3.0f64.sqrt())),
            // f'' = -(pi s/2) e^{-pi s^2/4}, max at s = sqrt(2/pi)
            ResponseKind::ErfSigmoid => Some((PI / 2.0f64).sqrt() * (-0.5f64).exp()),
            ResponseKind::Rational => Some(2.0),
            ResponseKind::CappedLinear { delta } => {
                if delta > 0.0 {
                    // blend second derivative q''(u)/(2 delta), max |q''| = 3/2
                    Some(3.0 / (4.0 * delta))
                } else {
                    None
                }
            }
        }
    }
}

/// Quintic blend q on [0,1] with q(0)=0, q'(0)=1, q''(0)=0,
/// q(1)=1/2, q'(1)=0, q''(1)=0: q(u) = u^4/2 - u^3 + u.
/// q' = (u-1)^2 (2u+1) >= 0, so the blend is monotone.
fn blend_q(u: f64) -> f64 {
    0.5 * u.powi(4) - u.powi(3) + u
}

fn blend_q_prime(u: f64) -> f64 {
    2.0 * u.powi(3) - 3.0 * u * u + 1.0
}

fn capped_f(s: f64, delta: f64) -> f64 {
    let a = s.abs();
    let v = if delta <= 0.0 {
        a.min(1.0)
    } else if a <= 1.0 - delta {
        a
    } else if a >= 1.0 + delta {
        1.0
    } else {
        let u = (a - (1.0 - delta)) / (2.0 * delta);
        (1.0 - delta) + 2.0 * delta * blend_q(u)
    };
    v.copysign(s)
}

fn capped_f_prime(s: f64, delta: f64) -> f64 {
    let a = s.abs();
    if delta <= 0.0 {
        if a <= 1.0 {
            1.0
        } else {
            0.0
        }
    } else if a <= 1.0 - delta {
        1.0
    } else if a >= 1.0 + delta {
        0.0
    } else {
        blend_q_prime((a - (1.0 - delta)) / (2.0 * delta))
    }
}

pub const ALL_KINDS: [ResponseKind; 5] = [
    ResponseKind::Linear,
    ResponseKind::Tanh,
    ResponseKind::ErfSigmoid,
    ResponseKind::Rational,
    ResponseKind::CappedLinear { delta: 0.0 },
];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalization_at_zero() {
        for k in ALL_KINDS {
            assert_eq!(k.f(0.0), 0.0);
            assert!((k.f_prime(0.0) - 1.0).abs() < 1e-15, "{k:?}");
        }
        let sm = ResponseKind::CappedLinear { delta: 0.25 };
        assert_eq!(sm.f(0.0), 0.0);
        assert_eq!(sm.f_prime(0.0), 1.0);
    }

    #[test]
    fn spot_values() {
        assert_eq!(ResponseKind::Linear.f(3.7), 3.7);
        assert_eq!(ResponseKind::Linear.f_prime(3.7), 1.0);
        assert!((ResponseKind::Rational.f(1.0) - 0.5).abs() < 1e-15);
        assert!((ResponseKind::Rational.f_prime(1.0) - 0.25).abs() < 1e-15);
        let c = ResponseKind::capped();
        assert_eq!(c.f(0.8), 0.8);
        assert_eq!(c.f(2.0), 1.0);
        assert_eq!(c.f(-2.0), -1.0);
    }

    #[test]
    fn smoothed_cap_is_monotone_and_c1() {
        let k = ResponseKind::CappedLinear { delta: 0.2 };
        let mut prev = k.f(-3.0);
        let mut s = -3.0 + 1e-3;
        while s <= 3.0 {
            let v = k.f(s);
            assert!(v >= prev - 1e-14, "monotone at {s}");
            prev = v;
            s += 1e-3;
        }
        // ends of the blend match the linear/flat pieces
        assert!((k.f(0.8) - 0.8).abs() < 1e-15);
        assert!((k.f(1.2) - 1.0).abs() < 1e-15);
        assert!((k.f_prime(0.8) - 1.0).abs() < 1e-15);
        assert!(k.f_prime(1.2).abs() < 1e-15);
    }
}
