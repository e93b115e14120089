//! Complex-analysis toolkit for the reduced 1D problem under the canonical
//! parameters (kappa = mu = 1, 2 pi^2 sigma1^2 = 1, 2 pi^2 sigma2^2 = 2).
//!
//! The resolvent kernel has transform K-hat(z) = omega1-hat(z)/(1 - omega1-hat(z))
//! with omega1-hat(z) = e^{-z^2} - e^{-2z^2}. Its poles are the zeros of the
//! exponential polynomial h(z) = 1 - e^{-z^2} + e^{-2z^2}, a four-fold
//! symmetric lattice p_{k,l} = c_k e^{i pi/4} i^l sqrt(pi/3),
//! q_{k,l} = d_k e^{i pi/4} i^l sqrt(pi/3) with c_k = sqrt(1+6k),
//! d_k = sqrt(6k-1). Summing residues over the upper half plane turns the
//! inverse transform into exponentially convergent cosine/sine series for
//! K and for the stationary response b to a Heaviside input.

use crate::error::{Error, Result};
use crate::grid::{Field, GridSpec};
use crate::quad;
use crate::spectral::apply_multiplier;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Decay/oscillation rate alpha = pi sqrt(2 pi / 3) of every series term.
pub fn alpha() -> f64 {
    PI * (2.0 * PI / 3.0).sqrt()
}

/// 1/alpha * pi = sqrt(3/(2 pi)), the quarter-wavelength unit of the phase
/// lattice; zeros and extrema of the leading cosines sit on multiples of it.
pub fn phase_unit() -> f64 {
    (3.0 / (2.0 * PI)).sqrt()
}

pub fn c_k(k: usize) -> f64 {
    (1.0 + 6.0 * k as f64).sqrt()
}

pub fn d_k(k: usize) -> f64 {
    (6.0 * k as f64 - 1.0).sqrt()
}

/// omega1-hat extended to the complex plane, canonical parameters.
pub fn omega1_hat_complex(z: Complex64) -> Complex64 {
    let z2 = z * z;
    (-z2).exp() - (-2.0 * z2).exp()
}

/// The exponential polynomial h(z) = 1 - e^{-z^2} + e^{-2 z^2} whose zeros
/// are the poles of K-hat.
pub fn h_eval(z: Complex64) -> Complex64 {
    let z2 = z * z;
    Complex64::new(1.0, 0.0) - (-z2).exp() + (-2.0 * z2).exp()
}

/// K-hat(z) = omega1-hat(z) / h(z). Errors when |h(z)| < 1e-12.
pub fn khat_eval(z: Complex64) -> Result<Complex64> {
    let h = h_eval(z);
    if h.norm() < 1e-12 {
        return Err(Error::NearPole {
            z: (z.re, z.im),
            h_abs: h.norm(),
        });
    }
    Ok(omega1_hat_complex(z) / h)
}

/// One pole of K-hat with the residue of K-hat there (the e^{2 i pi x p}
/// factor of the full integrand removed).
#[derive(Debug, Clone, Copy)]
pub struct PoleResidue {
    pub pole: Complex64,
    pub residue: Complex64,
    /// c-family (c_k = sqrt(1+6k)) or d-family (d_k = sqrt(6k-1)).
    pub family_c: bool,
    pub k: usize,
    /// Quarter-turn index l in 0..4.
    pub l: usize,
}

/// All poles p_{k,l}, q_{k,l} for k <= k_max, l in 0..4, with residues.
///
/// Residue closed forms (from h'(p) = 2p(w - 2w^2), w = e^{-p^2}):
///   Res(K-hat, p_{k,l}) = -e^{i pi/4} i^l e^{ i (-1)^l pi/3} / (2 c_k sqrt(pi))
///   Res(K-hat, q_{k,l}) = +e^{i pi/4} i^l e^{-i (-1)^l pi/3} / (2 d_k sqrt(pi))
pub fn poles_and_residues(k_max: usize) -> Vec<PoleResidue> {
    let root = (PI / 3.0).sqrt();
    let e4 = Complex64::from_polar(1.0, PI / 4.0);
    let mut out = Vec::new();
    for l in 0..4usize {
        let il = Complex64::i().powu(l as u32);
        let sign_l = if l % 2 == 0 { 1.0 } else { -1.0 };
        for k in 0..=k_max {
            let pole = e4 * il * (c_k(k) * root);
            let residue = -e4 * il * Complex64::from_polar(1.0, sign_l * PI / 3.0)
                / (2.0 * c_k(k) * PI.sqrt());
            out.push(PoleResidue {
                pole,
                residue,
                family_c: true,
                k,
                l,
            });
        }
        for k in 1..=k_max {
            let pole = e4 * il * (d_k(k) * root);
            let residue = e4 * il * Complex64::from_polar(1.0, -sign_l * PI / 3.0)
                / (2.0 * d_k(k) * PI.sqrt());
            out.push(PoleResidue {
                pole,
                residue,
                family_c: false,
                k,
                l,
            });
        }
    }
    out
}

/// Which residue series a [`SeriesKernel`] represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesKind {
    /// The kernel K itself (term weights 1/c_k, 1/d_k; even in x).
    K,
    /// The Heaviside response b on x > 0 (term weights 1/c_k^2, 1/d_k^2).
    BHeaviside,
}

/// A truncated residue series with its tail certificate.
#[derive(Debug, Clone, Copy)]
pub struct SeriesKernel {
    pub kind: SeriesKind,
    pub n_terms: usize,
}

impl SeriesKernel {
    /// Smallest truncation whose tail bound at `x` is below `tol`.
    pub fn for_tolerance(kind: SeriesKind, x: f64, tol: f64) -> Result<Self> {
        let x = match kind {
            SeriesKind::K => {
                if x == 0.0 {
                    return Err(Error::SeriesDomain {
                        x,
                        reason: "the K series is derived for x != 0",
                    });
                }
                x.abs()
            }
            SeriesKind::BHeaviside => {
                if x <= 0.0 {
                    return Err(Error::SeriesDomain {
                        x,
                        reason: "the b series is derived for x > 0; use the convolution route",
                    });
                }
                x
            }
        };
        let mut n = 1usize;
        let sk = |n| SeriesKernel { kind, n_terms: n };
        while sk(n).tail_bound(x) >= tol {
            n *= 2;
            if n > 1 << 22 {
                return Err(Error::QuadratureFailure {
                    achieved: sk(n / 2).tail_bound(x),
                    requested: tol,
                });
            }
        }
        Ok(sk(n))
    }

    /// Integral majorant of the dropped tail after `n_terms` terms: the term
    /// magnitudes e^{-alpha x d_j} w(d_j) are decreasing in j, so the tail is
    /// below the closed-form integral from j = n_terms. Nonnegative and
    /// decreasing in x for x > 0.
    pub fn tail_bound(&self, x: f64) -> f64 {
        let a = alpha() * x.abs();
        if a <= 0.0 {
            return f64::INFINITY;
        }
        let dn = d_k(self.n_terms);
        match self.kind {
            // sum_{j>n} e^{-a d_j}/d_j <= e^{-a d_n}/(3a); both families, x2,
            // prefactor 2 sqrt(pi)
            SeriesKind::K => 2.0 * PI.sqrt() * 2.0 * (-a * dn).exp() / (3.0 * a),
            // weights 1/d_j^2: integral majorant e^{-a d_n}/(3 a d_n)
            SeriesKind::BHeaviside => (3.0f64.sqrt() / PI) * 2.0 * (-a * dn).exp() / (3.0 * a * dn),
        }
    }

    /// Truncated series value. Callers should construct via
    /// [`SeriesKernel::for_tolerance`] so the truncation is certified.
    pub fn eval(&self, x: f64) -> f64 {
        let a = alpha();
        match self.kind {
            SeriesKind::K => {
                let x = x.abs();
                let mut s = (-a * x).exp() * (PI / 12.0 + a * x).cos();
                for k in 1..=self.n_terms {
                    let (ck, dk) = (c_k(k), d_k(k));
                    s += (-a * ck * x).exp() / ck * (PI / 12.0 + a * ck * x).cos();
                    s += (-a * dk * x).exp() / dk * (PI / 12.0 - a * dk * x).sin();
                }
                2.0 * PI.sqrt() * s
            }
            SeriesKind::BHeaviside => {
                // term-by-term integral of the K series over (x, infinity);
                // note the d-family phase cos(pi/3 - a d_k x)
                let mut s = (-a * x).exp() * (PI / 3.0 + a * x).cos();
                for k in 1..=self.n_terms {
                    let (ck, dk) = (c_k(k), d_k(k));
                    s += (-a * ck * x).exp() / (ck * ck) * (PI / 3.0 + a * ck * x).cos();
                    s -= (-a * dk * x).exp() / (dk * dk) * (PI / 3.0 - a * dk * x).cos();
                }
                3.0f64.sqrt() / PI * s
            }
        }
    }
}

/// K by residue series, truncated so the tail certificate is below `tol`.
/// Falls back to quadrature for 0 < |x| < 0.05, where the series loses its
/// advantage; errors at x = 0.
pub fn k_series_eval(x: f64, tol: f64) -> Result<f64> {
    if x == 0.0 {
        return Err(Error::SeriesDomain {
            x,
            reason: "the K series is derived for x != 0",
        });
    }
    if x.abs() < 0.05 {
        return k_quadrature_eval(x);
    }
    Ok(SeriesKernel::for_tolerance(SeriesKind::K, x, tol)?.eval(x))
}

/// K-hat on the real line, canonical parameters.
pub fn khat_real(xi: f64) -> f64 {
    let w = (-xi * xi).exp() - (-2.0 * xi * xi).exp();
    w / (1.0 - w)
}

/// Direct oscillatory quadrature of K(x) = int e^{2 i pi xi x} K-hat(xi) d xi,
/// cross-validated at two panel resolutions (absolute target 1e-10).
pub fn k_quadrature_eval(x: f64) -> Result<f64> {
    let mut cutoff = 4.0;
    while khat_real(cutoff).abs() >= 1e-14 {
        cutoff += 0.5;
    }
    let f = |xi: f64| (2.0 * PI * xi * x).cos() * khat_real(xi);
    let rate = x.abs().max(0.5);
    let panels = (((cutoff) / (0.25 / rate).min(0.25)).ceil() as usize).max(8);
    let coarse = 2.0 * quad::gauss_panels(&f, 0.0, cutoff, panels);
    let fine = 2.0 * quad::gauss_panels(&f, 0.0, cutoff, 2 * panels);
    if (coarse - fine).abs() > 1e-10 {
        return Err(Error::QuadratureFailure {
            achieved: (coarse - fine).abs(),
            requested: 1e-10,
        });
    }
    Ok(fine)
}

/// The Heaviside stationary response b(x) for x > 0 by residue series.
pub fn b_heaviside_eval(x: f64, tol: f64) -> Result<f64> {
    Ok(SeriesKernel::for_tolerance(SeriesKind::BHeaviside, x, tol)?.eval(x))
}

/// Remainder S(x) of the normalized kernel expansion:
/// e^{alpha x} K(x) / (2 sqrt(pi)) = cos(pi/12 + alpha x) + S(x)/x.
pub fn k_remainder_s(x: f64) -> Result<f64> {
    let k = k_series_eval(x, 1e-16)?;
    let a = alpha() * x.abs();
    Ok(x.abs() * (a.exp() * k / (2.0 * PI.sqrt()) - (PI / 12.0 + a).cos()))
}

/// Remainder T(x) of the derivative expansion:
/// sqrt(3) e^{alpha x} K'(x) / (4 pi^2) = -sin(pi/3 + alpha x) + T(x),
/// with K' differentiated term-by-term (certified by the same tail bound).
pub fn k_derivative_remainder_t(x: f64) -> Result<f64> {
    if x <= 0.0 {
        return Err(Error::SeriesDomain {
            x,
            reason: "derivative expansion stated for x > 0",
        });
    }
    let a = alpha();
    let sk = SeriesKernel::for_tolerance(SeriesKind::K, x, 1e-16)?;
    // each term differentiates to -a sqrt(2) e^{-a c x} sin(pi/3 +- a c x)
    // (cos t + sin t = sqrt(2) sin(t + pi/4), and pi/12 + pi/4 = pi/3)
    let root2 = 2.0f64.sqrt();
    let mut dk_sum = -a * root2 * (-a * x).exp() * (PI / 3.0 + a * x).sin();
    for k in 1..=sk.n_terms {
        let (ck, dkk) = (c_k(k), d_k(k));
        dk_sum -= a * root2 * (-a * ck * x).exp() * (PI / 3.0 + a * ck * x).sin();
        dk_sum -= a * root2 * (-a * dkk * x).exp() * (PI / 3.0 - a * dkk * x).sin();
    }
    let kprime = 2.0 * PI.sqrt() * dk_sum;
    Ok(3.0f64.sqrt() * (a * x).exp() * kprime / (4.0 * PI * PI) + (PI / 3.0 + a * x).sin())
}

/// One certified zero row.
#[derive(Debug, Clone, Copy)]
pub struct ZeroRow {
    pub k: usize,
    pub bracket_lo: f64,
    pub bracket_hi: f64,
    pub zero: f64,
    /// The reference zero of the leading cosine (x_{k+1} for K, theta_{k+1}
    /// for b).
    pub reference: f64,
    /// The arcsin displacement bound for this k.
    pub bound: f64,
    pub pass: bool,
}

/// Zero table for K or b: brackets between consecutive extrema of the
/// leading cosine, one bisected zero per bracket, uniqueness verified by a
/// dense sign scan, displacement checked against the arcsin bound.
#[derive(Debug, Clone)]
pub struct ZeroTable {
    pub kind: SeriesKind,
    pub rows: Vec<ZeroRow>,
}

impl ZeroTable {
    /// CSV with header `k,bracket_lo,bracket_hi,zero,reference,bound,pass`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("k,bracket_lo,bracket_hi,zero,reference,bound,pass\n");
        for r in &self.rows {
            s.push_str(&format!(
                "{},{:.15e},{:.15e},{:.15e},{:.15e},{:.15e},{}\n",
                r.k, r.bracket_lo, r.bracket_hi, r.zero, r.reference, r.bound, r.pass
            ));
        }
        s
    }

    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }
}

fn phase0(kind: SeriesKind) -> f64 {
    match kind {
        SeriesKind::K => PI / 12.0,
        SeriesKind::BHeaviside => PI / 3.0,
    }
}

/// k-th positive extremum of cos(phase0 + alpha x):
/// K: y_k = (k - 1/12) s, b: tau_k = (k - 1/3) s, s = sqrt(3/(2 pi)).
pub fn extremum(kind: SeriesKind, k: usize) -> f64 {
    (k as f64 - phase0(kind) / PI) * phase_unit()
}

/// k-th positive zero of cos(phase0 + alpha x):
/// K: x_k = (k - 7/12) s, b: theta_k = (k - 5/6) s.
pub fn cosine_zero(kind: SeriesKind, k: usize) -> f64 {
    (k as f64 - 0.5 - phase0(kind) / PI) * phase_unit()
}

/// Displacement bound |reference - zero| for row k.
pub fn displacement_bound(kind: SeriesKind, k: usize) -> f64 {
    let kf = k as f64;
    match kind {
        SeriesKind::K => {
            3.0f64.sqrt() / (PI * (2.0 * PI).sqrt()) * (8.0 / (PI * (12.0 * kf - 1.0))).asin()
        }
        SeriesKind::BHeaviside => {
            6.0f64.sqrt() / (2.0 * PI * PI)
                * (2.0 * 5.0f64.sqrt() / (5.0 * PI * (3.0 * kf - 1.0))).asin()
        }
    }
}

/// Certified zero localization for k = 1..k_max.
pub fn locate_zeros(kind: SeriesKind, k_max: usize) -> Result<ZeroTable> {
    if k_max < 1 {
        return Err(Error::Invalid("k_max must be >= 1".into()));
    }
    let rows = crate::par::map_indices(k_max, |i| locate_one(kind, i + 1));
    let rows: Result<Vec<ZeroRow>> = rows.into_iter().collect();
    Ok(ZeroTable { kind, rows: rows? })
}

fn locate_one(kind: SeriesKind, k: usize) -> Result<ZeroRow> {
    let lo = extremum(kind, k);
    let hi = extremum(kind, k + 1);
    let sk = SeriesKernel::for_tolerance(kind, lo, 1e-18 * (-alpha() * lo).exp().max(1e-280))?;
    let f = |x: f64| sk.eval(x);

    let (flo, fhi) = (f(lo), f(hi));
    if flo == 0.0 || fhi == 0.0 || flo.signum() == fhi.signum() {
        return Err(Error::BracketFailure { k, lo, hi });
    }

    // uniqueness: dense sign scan across the bracket must see exactly one change
    let m = 256;
    let mut changes = 0;
    let mut prev = flo;
    for j in 1..=m {
        let x = lo + (hi - lo) * j as f64 / m as f64;
        let v = f(x);
        if v.signum() != prev.signum() && v != 0.0 {
            changes += 1;
        }
        prev = v;
    }
    if changes != 1 {
        return Err(Error::BracketFailure { k, lo, hi });
    }

    let (mut a, mut b) = (lo, hi);
    let mut fa = flo;
    while b - a > 1e-12 {
        let mid = 0.5 * (a + b);
        let fm = f(mid);
        if fm == 0.0 {
            a = mid;
            b = mid;
            break;
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    let zero = 0.5 * (a + b);
    let reference = cosine_zero(kind, k + 1);
    let bound = displacement_bound(kind, k);
    Ok(ZeroRow {
        k,
        bracket_lo: lo,
        bracket_hi: hi,
        zero,
        reference,
        bound,
        pass: (reference - zero).abs() <= bound,
    })
}

/// Outcome of the Gaussian negative control.
#[derive(Debug, Clone)]
pub struct GaussianControlReport {
    /// Sign changes of the DoG resolvent kernel on (0.1, 10).
    pub dog_sign_changes: usize,
    /// Sign changes of the pure-Gaussian resolvent kernel on (0.1, 10).
    pub gaussian_sign_changes: usize,
    /// Scan step used.
    pub step: f64,
    pub pass: bool,
}

/// Repeat the resolvent construction with a pure Gaussian omega1
/// (the kappa = 0 surrogate, mu = 0.9 < 1 = its pattern threshold) and
/// verify the resulting kernel never changes sign on (0.1, 10), in contrast
/// to the oscillatory DoG case (mu = 1) which must show at least 10.
pub fn gaussian_negative_control() -> Result<GaussianControlReport> {
    let spec = GridSpec::new_1d(16.0, 32_768)?;
    let dx = spec.dx();

    // inverse transform of a multiplier = the kernel itself, realized by
    // applying it to a discrete delta
    let mut delta = vec![0.0; spec.len()];
    delta[spec.n / 2] = 1.0 / dx;
    let delta = Field::new(spec, delta)?;

    let k_dog = apply_multiplier(|xi| Complex64::new(khat_real(xi[0]), 0.0), &delta)?;
    let mu_g = 0.9;
    let k_gauss = apply_multiplier(
        |xi| {
            let g = (-xi[0] * xi[0]).exp();
            Complex64::new(g / (1.0 - mu_g * g), 0.0)
        },
        &delta,
    )?;

    let count = |field: &Field| {
        let mut changes = 0usize;
        let mut prev: Option<f64> = None;
        for j in 0..spec.n {
            let x = spec.coord(j);
            if x <= 0.1 || x >= 10.0 {
                continue;
            }
            let v = field.at(j);
            if let Some(p) = prev {
                if p.signum() != v.signum() && v != 0.0 {
                    changes += 1;
                }
            }
            prev = Some(v);
        }
        changes
    };

    let dog_sign_changes = count(&k_dog);
    let gaussian_sign_changes = count(&k_gauss);
    Ok(GaussianControlReport {
        dog_sign_changes,
        gaussian_sign_changes,
        step: dx,
        pass: gaussian_sign_changes == 0 && dog_sign_changes >= 10,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn khat_spot_values() {
        // balanced: K-hat(0) = 0/(1-0) = 0
        let v = khat_eval(Complex64::new(0.0, 0.0)).unwrap();
        assert!(v.norm() < 1e-15);
        // at q_c (omega1-hat = 1/4): K-hat = (1/4)/(3/4) = 1/3
        let qc = 2.0f64.ln().sqrt();
        let v = khat_eval(Complex64::new(qc, 0.0)).unwrap();
        assert!((v.re - 1.0 / 3.0).abs() < 1e-12 && v.im.abs() < 1e-15);
    }

    #[test]
    fn first_pole_annihilates_h() {
        let p = Complex64::from_polar((PI / 3.0).sqrt(), PI / 4.0);
        assert!(h_eval(p).norm() <= 1e-12);
        assert!(khat_eval(p).is_err());
    }

    #[test]
    fn series_domain_errors() {
        assert!(matches!(
            k_series_eval(0.0, 1e-10),
            Err(Error::SeriesDomain { .. })
        ));
        assert!(matches!(
            b_heaviside_eval(-1.0, 1e-10),
            Err(Error::SeriesDomain { .. })
        ));
        assert!(matches!(
            b_heaviside_eval(0.0, 1e-10),
            Err(Error::SeriesDomain { .. })
        ));
    }

    #[test]
    fn series_is_even() {
        for x in [0.25, 0.7, 1.3, 2.9] {
            let a = k_series_eval(x, 1e-12).unwrap();
            let b = k_series_eval(-x, 1e-12).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn ck_dk_interlace() {
        for k in 1..200 {
            assert!(d_k(k) < c_k(k));
            assert!(c_k(k) > c_k(k - 1));
            if k > 1 {
                assert!(d_k(k) > d_k(k - 1));
            }
        }
    }

    #[test]
    fn tail_bound_decreases_in_x() {
        let sk = SeriesKernel {
            kind: SeriesKind::K,
            n_terms: 8,
        };
        let mut prev = f64::INFINITY;
        for i in 1..40 {
            let x = 0.1 * i as f64;
            let t = sk.tail_bound(x);
            assert!(t >= 0.0 && t <= prev);
            prev = t;
        }
    }
}
