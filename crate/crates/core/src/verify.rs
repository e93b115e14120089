//! The verification checks behind `verify` and the acceptance suite.
//!
//! Each criterion is a standalone function returning a [`CriterionResult`]
//! with a pass flag and a one-line detail, so the CLI can emit CSV reports
//! and the test suite can assert. Tolerances are pinned here.

use crate::analytic::{
    self, b_heaviside_eval, gaussian_negative_control, k_quadrature_eval, k_remainder_s,
    k_series_eval, locate_zeros, SeriesKind,
};
use crate::control::{
    linear_control, small_time_control, tau_max, ControlProblem, ShootingOptions,
};
use crate::dynamics::{
    integrate, stationary_state, sup_bound_g1, FieldOperator, IntegrateOptions, SolverOptions,
};
use crate::error::Result;
use crate::euclid::{act, GroupElement};
use crate::grid::{Field, GridSpec, Norm};
use crate::kernel::{constants, l1_norm_quadrature, omega_hat, DogParams};
use crate::response::ResponseKind;
use crate::stimulus::{binarize, generate, random_smooth, Stimulus};
use std::f64::consts::PI;
use std::time::Instant;

#[derive(Debug, Clone)]
pub struct CriterionResult {
    pub id: usize,
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
    pub seconds: f64,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "criterion {:2} {:<22} {}  [{:.1}s] {}",
            self.id,
            self.name,
            if self.pass { "PASS" } else { "FAIL" },
            self.seconds,
            self.detail
        )
    }
}

fn finish(
    id: usize,
    name: &'static str,
    started: Instant,
    outcome: Result<(bool, String)>,
) -> CriterionResult {
    let seconds = started.elapsed().as_secs_f64();
    match outcome {
        Ok((pass, detail)) => CriterionResult {
            id,
            name,
            pass,
            detail,
            seconds,
        },
        Err(e) => CriterionResult {
            id,
            name,
            pass: false,
            detail: format!("error: {e}"),
            seconds,
        },
    }
}

/// Criterion 1: Canonical constants: mu_0 = 2 and mu_c = 4 from the closed forms;
/// closed-form L1 norm matches 2D quadrature within 1e-6.
pub fn criterion_constants() -> CriterionResult {
    let t = Instant::now();
    let run = || -> Result<(bool, String)> {
        let p = DogParams::canonical();
        let c = constants(&p)?;
        let quad = l1_norm_quadrature(&p);
        let ok = (c.mu_0 - 2.0).abs() < 1e-12
            && (c.mu_c - 4.0).abs() < 1e-12
            && (c.l1_norm - quad).abs() < 1e-6;
        Ok((
            ok,
            format!(
                "mu_0={:.12}, mu_c={:.12}, |closed-quad|={:.2e}",
                c.mu_0,
                c.mu_c,
                (c.l1_norm - quad).abs()
            ),
        ))
    };
    finish(1, "constants", t, run())
}

/// Criterion 2: Linear stationary state for I = cos(5 pi x2) on a 512^2 grid equals
/// I/(1 - mu omega-hat(0, 2.5)) within 1e-8 sup norm.
pub fn criterion_linear_stationary() -> CriterionResult {
    let t = Instant::now();
    let run = || -> Result<(bool, String)> {
        let p = DogParams::canonical();
        let spec = GridSpec::new_2d(10.0, 512)?;
        let op = FieldOperator::new(spec, &p)?;
        let input = generate(&Stimulus::Funnel { lambda: 2.5 }, spec)?;
        let (state, report) = stationary_state(
            &op,
            &input,
            1.0,
            ResponseKind::Linear,
            &SolverOptions::default(),
        )?;
        let gain = 1.0 / (1.0 - omega_hat(&p, &[0.0, 2.5]));
        let expected = input.scale(gain);
        let err = state.sup_distance(&expected)?;
        Ok((
            err <= 1e-8,
            format!("sup error {err:.2e} after {} iterations", report.iterations),
        ))
    };
    finish(2, "linear-stationary", t, run())
}

/// Criterion 3: Decay rate: ||a(t) - a_I||_inf / ||a0 - a_I||_inf <= 1.02 e^{-0.5 t}
/// for all logged t in [0, 10], mu = 1, from 10 random initial data.
pub fn criterion_decay_rate() -> CriterionResult {
    let t = Instant::now();
    let run = || -> Result<(bool, String)> {
        let p = DogParams::canonical();
        let spec = GridSpec::new_2d(10.0, 256)?;
        let op = FieldOperator::new(spec, &p)?;
        let mut worst = 0.0f64;
        for run_idx in 0..10u64 {
            let kind = if run_idx % 2 == 0 {
                ResponseKind::Rational
            } else {
                ResponseKind::Linear
            };
            let input = random_smooth(spec, 100 + run_idx, 24)?;
            let a0 = random_smooth(spec, 200 + run_idx, 24)?;
            let evo = integrate(
                &op,
                &a0,
                &input,
                1.0,
                kind,
                &IntegrateOptions {
                    t_final: 10.0,
                    dt: 0.01,
                    log_every: 20,
                    ..Default::default()
                },
            )?;
            let denom = evo.decay_log[0].1;
            if denom == 0.0 {
                continue;
            }
            for &(time, gap) in &evo.decay_log {
                let envelope = 1.02 * (-0.5 * time).exp();
                let ratio = gap / denom;
                worst = worst.max(ratio / envelope);
            }
        }
        Ok((
            worst <= 1.0,
            format!("max ratio/envelope = {worst:.4} (must be <= 1)"),
        ))
    };
    finish(3, "decay-rate", t, run())
}

/// Criterion 4: Residue series vs quadrature at 50 log-spaced x in [0.1, 5] within
/// 1e-8; remainder |S(x)| <= sqrt(6)/(3 pi^2) everywhere.
pub fn criterion_series_vs_quadrature() -> CriterionResult {
    let t = Instant::now();
    let run = || -> Result<(bool, String)> {
        let s_bound = 6.0f64.sqrt() / (3.0 * PI * PI);
        let mut max_gap = 0.0f64;
        let mut max_s = 0.0f64;
        for i in 0..50 {
            let x = 0.1 * (5.0f64 / 0.1).powf(i as f64 / 49.0);
            let series = k_series_eval(x, 1e-12)?;
            let quad = k_quadrature_eval(x)?;
            max_gap = max_gap.max((series - quad).abs());
            max_s = max_s.max(k_remainder_s(x)?.abs());
        }
        let ok = max_gap <= 1e-8 && max_s <= s_bound;
        Ok((
            ok,
            format!("max |series-quad| = {max_gap:.2e}, max |S| = {max_s:.4} (bound {s_bound:.4})"),
        ))
    };
    finish(4, "series-vs-quadrature", t, run())
}

/// Criterion 5: Zero localization: exactly one zero per bracket for k = 1..20 and the
/// arcsin displacement bounds hold, for both K and b.
pub fn criterion_zero_tables() -> CriterionResult {
    let t = Instant::now();
    let run = || -> Result<(bool, String)> {
        let tk = locate_zeros(SeriesKind::K, 20)?;
        let tb = locate_zeros(SeriesKind::BHeaviside, 20)?;
        let worst_k = tk
            .rows
            .iter()
            .map(|r| (r.reference - r.zero).abs() / r.bound)
            .fold(0.0f64, f64::max);
        let worst_b = tb
            .rows
            .iter()
            .map(|r| (r.reference - r.zero).abs() / r.bound)
            .fold(0.0f64, f64::max);
        Ok((
            tk.all_pass() && tb.all_pass(),
            format!("gap/bound: K max {worst_k:.3}, b max {worst_b:.3} (both <= 1)"),
        ))
    };
    finish(5, "zero-tables", t, run())
}

/// Criterion 6: Heaviside response: series b matches the 1D spectral computation of
/// H(-.) + mu K * H(-.) within 1e-6 on x in [0.2, 4].
pub fn criterion_heaviside_oracle() -> CriterionResult {
    let t = Instant::now();
    let run = || -> Result<(bool, String)> {
        let grid = b_heaviside_grid_oracle()?;
        let spec = *grid.spec();
        let mut max_gap = 0.0f64;
        for j in 0..spec.n {
            let x = spec.coord(j);
            if !(0.2..=4.0).contains(&x) {
                continue;
            }
            // compare on every 16th node to keep the series side cheap
            if j % 16 != 0 {
                continue;
            }
            let series = b_heaviside_eval(x, 1e-12)?;
            max_gap = max_gap.max((grid.at(j) - series).abs());
        }
        Ok((
            max_gap <= 1e-6,
            format!("max |grid - series| = {max_gap:.2e}"),
        ))
    };
    finish(6, "heaviside-oracle", t, run())
}

/// The 1D grid route for b: sample K (quadrature near 0, series elsewhere),
/// spectrally convolve with the sampled Heaviside, add H. The jump node
/// carries quadrature weight 1/2 (trapezoid rule at the discontinuity);
/// the H(0) = 1 display convention is unaffected.
pub fn b_heaviside_grid_oracle() -> Result<Field> {
    let spec = GridSpec::new_1d(10.0, 32_768)?;
    let k_field = Field::sample(spec, |x| {
        let xv = x[0];
        if xv.abs() < 0.05 {
            k_quadrature_eval(xv).unwrap_or(f64::NAN)
        } else {
            k_series_eval(xv, 1e-13).unwrap_or(f64::NAN)
        }
    })?;
    let h_quad = Field::sample(spec, |x| {
        if x[0] < 0.0 {
            1.0
        } else if x[0] == 0.0 {
            0.5
        } else {
            0.0
        }
    })?;
    let conv = crate::spectral::convolve(&k_field, &h_quad)?;
    let h_display = Field::sample(spec, |x| crate::stimulus::heaviside(-x[0]))?;
    h_display.add(&conv)
}

/// Criterion 7: Equivariance: ||Psi(T_g I) - T_g Psi(I)||_inf <= 10 x solver tolerance
/// for 5 grid-exact group elements and 5 random inputs.
pub fn criterion_equivariance() -> CriterionResult {
    let t = Instant::now();
    let run = || -> Result<(bool, String)> {
        let p = DogParams::canonical();
        let spec = GridSpec::new_2d(10.0, 256)?;
        let op = FieldOperator::new(spec, &p)?;
        let opts = SolverOptions::default();
        let elements = [
            GroupElement::translation(17, -5),
            GroupElement::reflection_x1(),
            GroupElement::reflection_x2(),
            GroupElement::rotation_quarter_turns(1),
            GroupElement {
                shift_nodes: [40, 64],
                orthogonal: crate::euclid::Orthogonal::Rotate270,
            },
        ];
        let mut worst = 0.0f64;
        for (i, g) in elements.iter().enumerate() {
            let input = random_smooth(spec, 300 + i as u64, 24)?;
            let (psi, _) = stationary_state(&op, &input, 1.0, ResponseKind::Rational, &opts)?;
            let (psi_moved, _) =
                stationary_state(&op, &act(g, &input)?, 1.0, ResponseKind::Rational, &opts)?;
            let gap = psi_moved.sup_distance(&act(g, &psi)?)?;
            worst = worst.max(gap);
        }
        let bound = 10.0 * opts.tol;
        Ok((
            worst <= bound,
            format!("max equivariance gap {worst:.2e} (bound {bound:.1e})"),
        ))
    };
    finish(7, "equivariance", t, run())
}

/// Criterion 8: A-priori negative result: I = P_F with linear and odd sigmoid
/// responses at mu = 0.8 yields a pure horizontal-stripe binarization:
/// x1-variance <= 1e-10 and x2 zero crossings within one cell of the
/// cosine's.
pub fn criterion_funnel_negative() -> CriterionResult {
    let t = Instant::now();
    let run = || -> Result<(bool, String)> {
        let p = DogParams::canonical();
        let spec = GridSpec::new_2d(10.0, 512)?;
        let op = FieldOperator::new(spec, &p)?;
        let input = generate(&Stimulus::Funnel { lambda: 2.5 }, spec)?;
        let mut detail = String::new();
        let mut ok = true;
        for kind in [ResponseKind::Linear, ResponseKind::Tanh] {
            let (state, _) = stationary_state(&op, &input, 0.8, kind, &SolverOptions::default())?;
            // row-wise variance across x1 per fixed x2
            let n = spec.n;
            let mut max_var = 0.0f64;
            for i2 in 0..n {
                let mut mean = 0.0;
                for i1 in 0..n {
                    mean += state.at2(i1, i2);
                }
                mean /= n as f64;
                let mut var = 0.0;
                for i1 in 0..n {
                    let d = state.at2(i1, i2) - mean;
                    var += d * d;
                }
                max_var = max_var.max(var / n as f64);
            }
            // zero crossings along x2 of row 0 vs the cosine's
            let profile: Vec<f64> = (0..n).map(|i2| state.at2(0, i2)).collect();
            let cosine: Vec<f64> = (0..n).map(|i2| (5.0 * PI * spec.coord(i2)).cos()).collect();
            let cross = |v: &[f64]| -> Vec<usize> {
                (1..v.len())
                    .filter(|&i| v[i - 1].signum() != v[i].signum())
                    .collect()
            };
            let ca = cross(&profile);
            let cb = cross(&cosine);
            let aligned = ca.len() == cb.len()
                && ca
                    .iter()
                    .zip(&cb)
                    .all(|(a, b)| (*a as isize - *b as isize).unsigned_abs() <= 1);
            ok = ok && max_var <= 1e-10 && aligned;
            detail.push_str(&format!(
                "{kind:?}: var {max_var:.1e}, crossings {}/{} aligned={aligned}; ",
                ca.len(),
                cb.len()
            ));
        }
        Ok((ok, detail))
    };
    finish(8, "funnel-negative", t, run())
}

/// Criterion 9: MacKay-rays replication: along the row nearest x2 = 0.1, on
/// x1 in [2.5, 6], the rays-minus-funnel difference alternates sign at
/// least 5 times with spacing sqrt(3/(2 pi)) +- 15% (linear response); the
/// retinal warp of the binarized difference shows the matching ring count;
/// the rational rerun preserves the alternation count.
pub fn criterion_mackay_rays() -> CriterionResult {
    let t = Instant::now();
    let run = || -> Result<(bool, String)> {
        let p = DogParams::canonical();
        let spec = GridSpec::new_2d(10.0, 1024)?;
        let op = FieldOperator::new(spec, &p)?;
        let opts = SolverOptions::with_tol(1e-12);
        let rays = generate(&Stimulus::mackay_rays_default(), spec)?;
        let funnel = generate(&Stimulus::Funnel { lambda: 2.5 }, spec)?;

        let mut counts = [0usize; 2];
        let mut spacing_ok = true;
        let mut rings = 0usize;
        for (slot, kind) in [ResponseKind::Linear, ResponseKind::Rational]
            .into_iter()
            .enumerate()
        {
            let (a_rays, _) = stationary_state(&op, &rays, 1.0, kind, &opts)?;
            let (a_funnel, _) = stationary_state(&op, &funnel, 1.0, kind, &opts)?;
            let diff = a_rays.sub(&a_funnel)?;
            let row = spec.nearest_index(0.1);
            let zs = row_zero_positions(&diff, &spec, row, 2.5, 6.0);
            counts[slot] = zs.len();
            if kind == ResponseKind::Linear {
                let target = analytic::phase_unit();
                for w in zs.windows(2) {
                    let gap = w[1] - w[0];
                    if (gap - target).abs() > 0.15 * target {
                        spacing_ok = false;
                    }
                }
                // ring structure in the retinal warp of the binarized difference
                let warped =
                    crate::imaging::warp_binary_to_retina(&binarize(&diff), 768, (6.0f64).exp())?;
                rings = crate::imaging::ray_transitions(
                    &warped,
                    (2.5f64).exp(),
                    (6.0f64).exp(),
                    (6.0f64).exp(),
                );
            }
        }
        let ok = counts[0] >= 5 && spacing_ok && counts[1] == counts[0] && rings >= counts[0];
        Ok((
            ok,
            format!(
                "alternations: linear {}, rational {}; spacing ok: {spacing_ok}; retinal ring transitions {rings}",
                counts[0], counts[1]
            ),
        ))
    };
    finish(9, "mackay-rays", t, run())
}

fn row_zero_positions(
    diff: &Field,
    spec: &GridSpec,
    row_i2: usize,
    x_lo: f64,
    x_hi: f64,
) -> Vec<f64> {
    let mut zs = Vec::new();
    let mut prev: Option<(f64, f64)> = None;
    for i1 in 0..spec.n {
        let x = spec.coord(i1);
        if x < x_lo || x > x_hi {
            continue;
        }
        let v = diff.at2(i1, row_i2);
        if let Some((px, pv)) = prev {
            if pv.signum() != v.signum() && v != 0.0 && pv != 0.0 {
                zs.push(px - pv * (x - px) / (v - pv));
            }
        }
        prev = Some((x, v));
    }
    zs
}

/// Criterion 10: Control: linear endpoint error <= 1e-8 on a random 256^2 problem;
/// nonlinear small-time control endpoint error <= 1e-4 on 64^2 with
/// tau <= tau_max.
pub fn criterion_control() -> CriterionResult {
    let t = Instant::now();
    let run = || -> Result<(bool, String)> {
        let p = DogParams::canonical();

        let spec = GridSpec::new_2d(10.0, 256)?;
        let problem = ControlProblem {
            a0: random_smooth(spec, 900, 24)?,
            a_target: random_smooth(spec, 901, 24)?,
            horizon: 1.0,
            mu: 1.0,
            kind: ResponseKind::Linear,
        };
        let lin = linear_control(&problem, &p)?;

        let spec_s = GridSpec::new_2d(10.0, 64)?;
        let tmax = tau_max(1.0, 2.0);
        let tau = 0.1f64.min(tmax);
        let nonlinear = ControlProblem {
            a0: random_smooth(spec_s, 902, 16)?,
            a_target: random_smooth(spec_s, 903, 16)?,
            horizon: tau,
            mu: 1.0,
            kind: ResponseKind::Rational,
        };
        let shot = small_time_control(&nonlinear, &p, &ShootingOptions::default())?;

        let ok = lin.endpoint_error <= 1e-8 && shot.endpoint_error <= 1e-4;
        Ok((
            ok,
            format!(
                "linear endpoint {:.2e} (256^2); nonlinear endpoint {:.2e} after {} shots (tau = {tau}, tau_max = {tmax:.3})",
                lin.endpoint_error, shot.endpoint_error, shot.iterations
            ),
        ))
    };
    finish(10, "control", t, run())
}

/// Criterion 11: Long-run sup bound: trajectories for unit-sup random inputs with the
/// rational sigmoid stay below g1 + 0.02 in the long run, g1 ~ 1.2808.
pub fn criterion_sup_bound() -> CriterionResult {
    let t = Instant::now();
    let run = || -> Result<(bool, String)> {
        let p = DogParams::canonical();
        let spec = GridSpec::new_2d(10.0, 128)?;
        let op = FieldOperator::new(spec, &p)?;
        let g1 = sup_bound_g1(1.0, 2.0, ResponseKind::Rational)?;
        let oracle = (0.5 + 4.25f64.sqrt()) / 2.0;
        if (g1 - oracle).abs() > 1e-10 {
            return Ok((
                false,
                format!("g1 = {g1} disagrees with the quadratic oracle {oracle}"),
            ));
        }
        let mut worst = 0.0f64;
        for seed in 0..10u64 {
            let input = random_smooth(spec, 400 + seed, 24)?;
            let a0 = random_smooth(spec, 500 + seed, 24)?.scale(1.5);
            let evo = integrate(
                &op,
                &a0,
                &input,
                1.0,
                ResponseKind::Rational,
                &IntegrateOptions {
                    t_final: 25.0,
                    dt: 0.01,
                    log_every: 50,
                    track_decay: false,
                    ..Default::default()
                },
            )?;
            // long-run: the tail of the trajectory
            worst = worst.max(evo.final_state.norm(Norm::Sup));
        }
        Ok((
            worst <= g1 + 0.02,
            format!(
                "max long-run sup {worst:.4} vs g1 + 0.02 = {:.4}",
                g1 + 0.02
            ),
        ))
    };
    finish(11, "sup-bound", t, run())
}

/// Criterion 12: Gaussian negative control: the pure-Gaussian resolvent kernel has no
/// sign change on (0.1, 10); the DoG one has at least 10.
pub fn criterion_gaussian_control() -> CriterionResult {
    let t = Instant::now();
    let run = || -> Result<(bool, String)> {
        let report = gaussian_negative_control()?;
        Ok((
            report.pass,
            format!(
                "DoG sign changes {}, Gaussian {}",
                report.dog_sign_changes, report.gaussian_sign_changes
            ),
        ))
    };
    finish(12, "gaussian-control", t, run())
}

/// Named verification suites exposed by the CLI.
pub fn suite_names() -> &'static [&'static str] {
    &[
        "kernels", "analytic", "dynamics", "control", "symmetry", "figures",
    ]
}

/// Run a named suite. Unknown names yield an empty vector.
pub fn run_suite(name: &str) -> Vec<CriterionResult> {
    match name {
        "kernels" => vec![criterion_constants()],
        "analytic" => vec![
            criterion_series_vs_quadrature(),
            criterion_zero_tables(),
            criterion_heaviside_oracle(),
            criterion_gaussian_control(),
        ],
        "dynamics" => vec![
            criterion_linear_stationary(),
            criterion_decay_rate(),
            criterion_sup_bound(),
        ],
        "control" => vec![criterion_control()],
        "symmetry" => vec![criterion_equivariance(), criterion_funnel_negative()],
        "figures" => vec![criterion_mackay_rays()],
        _ => Vec::new(),
    }
}

/// All twelve acceptance criteria in order.
pub fn run_all() -> Vec<CriterionResult> {
    vec![
        criterion_constants(),
        criterion_linear_stationary(),
        criterion_decay_rate(),
        criterion_series_vs_quadrature(),
        criterion_zero_tables(),
        criterion_heaviside_oracle(),
        criterion_equivariance(),
        criterion_funnel_negative(),
        criterion_mackay_rays(),
        criterion_control(),
        criterion_sup_bound(),
        criterion_gaussian_control(),
    ]
}
