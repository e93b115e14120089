//! Time integration of the field equation and the stationary-state solvers.
//!
//! The equation is da/dt = -a + mu omega * f(a) + I on a periodic grid; a
//! stationary state satisfies a = I + mu omega * f(a). For mu below the
//! contraction threshold mu_0 = 1/||omega||_1 the map
//! u -> I + mu omega * f(u) is a sup-norm contraction with ratio mu/mu_0,
//! and Picard iteration converges geometrically to the unique fixed point.

use crate::error::{Error, Result};
use crate::grid::{Field, GridSpec, Norm};
use crate::kernel::{constants, dog_eval, DogParams};
use crate::par;
use crate::response::ResponseKind;
use crate::spectral::SpectralEngine;
use num_complex::Complex64;

/// Which contraction premise a solve runs under.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContractionMode {
    /// mu < mu_0: contraction in every L^p, the default.
    SupNorm,
    /// mu < mu_c with a balanced kernel (omega-hat(0) = 0): L^2 contraction.
    /// Opt-in; only meaningful for kappa = 1.
    BalancedL2,
}

/// Iteration diagnostics of one fixed-point solve.
#[derive(Debug, Clone)]
pub struct SolverReport {
    pub iterations: usize,
    /// Final sup-norm of successive updates.
    pub residual: f64,
    /// Max observed ratio ||u_{n+1}-u_n|| / ||u_n-u_{n-1}||.
    pub contraction_ratio_estimate: f64,
}

/// Trajectory of one integration run.
#[derive(Debug, Clone)]
pub struct EvolutionResult {
    pub snapshots: Vec<(f64, Field)>,
    /// Stationary state used as the decay reference when mu < mu_0,
    /// otherwise the final state of the run.
    pub stationary: Field,
    /// Final state a(t_final).
    pub final_state: Field,
    /// (t, ||a(t) - a_I||_p) against the stationary state, when available.
    pub decay_log: Vec<(f64, f64)>,
}

/// Solver configuration shared by the fixed-point routines.
#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub mode: ContractionMode,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol: 1e-10,
            max_iter: 500,
            mode: ContractionMode::SupNorm,
        }
    }
}

impl SolverOptions {
    pub fn with_tol(tol: f64) -> Self {
        SolverOptions {
            tol,
            ..Default::default()
        }
    }
}

/// Precomputed spectral machinery for one (grid, params) pair: the sampled
/// kernel's transform table, reused across iterations and solves.
pub struct FieldOperator {
    engine: SpectralEngine,
    omega_hat_grid: Vec<Complex64>,
    mu_0: f64,
    mu_c: f64,
}

impl FieldOperator {
    pub fn new(spec: GridSpec, params: &DogParams) -> Result<Self> {
        let engine = SpectralEngine::new(spec);
        let kernel = Field::sample(spec, |x| dog_eval(params, spec.dim, x))?;
        let omega_hat_grid = engine.kernel_transform(&kernel);
        let c = constants(params)?;
        Ok(FieldOperator {
            engine,
            omega_hat_grid,
            mu_0: c.mu_0,
            mu_c: c.mu_c,
        })
    }

    pub fn spec(&self) -> &GridSpec {
        self.engine.spec()
    }

    pub fn mu_0(&self) -> f64 {
        self.mu_0
    }

    /// omega * u via the cached transform.
    pub fn convolve(&self, u: &Field) -> Field {
        self.engine.apply_transform(&self.omega_hat_grid, u)
    }

    /// omega * f(u).
    fn convolve_response(&self, u: &Field, kind: ResponseKind) -> Field {
        let mut v = u.values().to_vec();
        par::for_each_mut(&mut v, |s| *s = kind.f(*s));
        self.convolve(&Field::from_raw(*self.spec(), v))
    }

    fn check_contraction(&self, mu: f64, mode: ContractionMode) -> Result<()> {
        let threshold = match mode {
            ContractionMode::SupNorm => self.mu_0,
            ContractionMode::BalancedL2 => self.mu_c,
        };
        if mu >= threshold {
            return Err(Error::ContractionViolation { mu, threshold });
        }
        Ok(())
    }
}

fn run_fixed_point<S>(start: Field, step: S, opts: &SolverOptions) -> Result<(Field, SolverReport)>
where
    S: Fn(&Field) -> Field,
{
    let mut u = start;
    let mut prev_delta: Option<f64> = None;
    let mut ratio_max = 0.0f64;
    for it in 1..=opts.max_iter {
        let next = step(&u);
        let delta = next.sup_distance(&u)?;
        if !delta.is_finite() {
            return Err(Error::NonConvergence {
                iterations: it,
                residual: delta,
                tolerance: opts.tol,
            });
        }
        if let Some(p) = prev_delta {
            if p > 0.0 {
                ratio_max = ratio_max.max(delta / p);
            }
        }
        prev_delta = Some(delta);
        u = next;
        if delta <= opts.tol {
            return Ok((
                u,
                SolverReport {
                    iterations: it,
                    residual: delta,
                    contraction_ratio_estimate: ratio_max,
                },
            ));
        }
    }
    Err(Error::NonConvergence {
        iterations: opts.max_iter,
        residual: prev_delta.unwrap_or(f64::INFINITY),
        tolerance: opts.tol,
    })
}

/// Unique stationary state a_I = I + mu omega * f(a_I), by Picard iteration
/// from u_0 = I. Requires mu < mu_0 (or mu < mu_c in balanced L^2 mode).
pub fn stationary_state(
    op: &FieldOperator,
    input: &Field,
    mu: f64,
    kind: ResponseKind,
    opts: &SolverOptions,
) -> Result<(Field, SolverReport)> {
    op.check_contraction(mu, opts.mode)?;
    let step = |u: &Field| {
        let conv = op.convolve_response(u, kind);
        let mut v = conv.into_values();
        par::for_each_indexed_mut(&mut v, |i, w| *w = input.at(i) + mu * *w);
        Field::from_raw(*op.spec(), v)
    };
    run_fixed_point(input.clone(), step, opts)
}

/// Convenience wrapper building the operator internally.
pub fn stationary_state_simple(
    input: &Field,
    mu: f64,
    kind: ResponseKind,
    params: &DogParams,
    opts: &SolverOptions,
) -> Result<(Field, SolverReport)> {
    let op = FieldOperator::new(*input.spec(), params)?;
    stationary_state(&op, input, mu, kind, opts)
}

/// Options for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct IntegrateOptions {
    pub t_final: f64,
    pub dt: f64,
    /// Record a decay-log entry (and snapshot, if kept) every `log_every`
    /// steps; 0 logs only the endpoint.
    pub log_every: usize,
    /// Keep full field snapshots (memory-heavy on large grids).
    pub keep_snapshots: bool,
    /// Norm used for the decay log.
    pub decay_norm: Norm,
    /// Solve for the stationary state of the input and log distances to it.
    /// Skipped automatically when mu >= mu_0.
    pub track_decay: bool,
}

impl Default for IntegrateOptions {
    fn default() -> Self {
        IntegrateOptions {
            t_final: 10.0,
            dt: 0.01,
            log_every: 10,
            keep_snapshots: false,
            decay_norm: Norm::Sup,
            track_decay: true,
        }
    }
}

/// Exponential-Euler integration of the field equation: exact integrating
/// factor on the -a part, the convolution term held over each step,
///
///   a_{n+1} = e^{-dt} a_n + (1 - e^{-dt}) (I + mu omega * f(a_n)).
///
/// A discrete stationary state is preserved exactly. When mu < mu_0 the
/// decay log records distances to the stationary state of `input`,
/// otherwise it stays empty.
pub fn integrate(
    op: &FieldOperator,
    a0: &Field,
    input: &Field,
    mu: f64,
    kind: ResponseKind,
    opts: &IntegrateOptions,
) -> Result<EvolutionResult> {
    if opts.dt <= 0.0 || !opts.dt.is_finite() {
        return Err(Error::Invalid(format!(
            "dt must be positive, got {}",
            opts.dt
        )));
    }
    if a0.spec() != input.spec() {
        return Err(Error::GridMismatch {
            left: format!("{:?}", a0.spec()),
            right: format!("{:?}", input.spec()),
        });
    }

    let reference = if opts.track_decay && mu < op.mu_0 {
        stationary_state(op, input, mu, kind, &SolverOptions::default())
            .ok()
            .map(|(f, _)| f)
    } else {
        None
    };

    let decay = (-opts.dt).exp();
    let gain = 1.0 - decay;
    let steps = (opts.t_final / opts.dt).round().max(1.0) as usize;
    let log_every = if opts.log_every == 0 {
        steps
    } else {
        opts.log_every
    };

    let mut a = a0.clone();
    let mut snapshots = Vec::new();
    let mut decay_log = Vec::new();
    if let Some(r) = &reference {
        decay_log.push((0.0, a0.sub(r)?.norm(opts.decay_norm)));
    }
    if opts.keep_snapshots {
        snapshots.push((0.0, a.clone()));
    }

    for step in 1..=steps {
        let conv = op.convolve_response(&a, kind);
        let mut v = a.into_values();
        par::for_each_indexed_mut(&mut v, |i, w| {
            *w = decay * *w + gain * (input.at(i) + mu * conv.at(i));
        });
        let t = step as f64 * opts.dt;
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::BlowUp {
                last_valid_t: t - opts.dt,
            });
        }
        a = Field::from_raw(*op.spec(), v);
        if step % log_every == 0 || step == steps {
            if let Some(r) = &reference {
                decay_log.push((t, a.sub(r)?.norm(opts.decay_norm)));
            }
            if opts.keep_snapshots {
                snapshots.push((t, a.clone()));
            }
        }
    }

    Ok(EvolutionResult {
        stationary: reference.unwrap_or_else(|| a.clone()),
        final_state: a,
        snapshots,
        decay_log,
    })
}

/// Resolvent of the linearized stationary problem: the fixed point of
/// u = h + mu omega * (f'(a_base) u), i.e. (Id - DPhi_I)^{-1} h evaluated
/// at a_base. With a_base = Psi(I) this is DPsi(I) h.
pub fn linearized_response(
    op: &FieldOperator,
    a_base: &Field,
    h: &Field,
    mu: f64,
    kind: ResponseKind,
    opts: &SolverOptions,
) -> Result<Field> {
    op.check_contraction(mu, opts.mode)?;
    let fp: Vec<f64> = {
        let mut v = a_base.values().to_vec();
        par::for_each_mut(&mut v, |s| *s = kind.f_prime(*s));
        v
    };
    let step = |u: &Field| {
        let mut v = u.values().to_vec();
        par::for_each_indexed_mut(&mut v, |i, w| *w *= fp[i]);
        let conv = op.convolve(&Field::from_raw(*op.spec(), v));
        let mut v = conv.into_values();
        par::for_each_indexed_mut(&mut v, |i, w| *w = h.at(i) + mu * *w);
        Field::from_raw(*op.spec(), v)
    };
    run_fixed_point(h.clone(), step, opts).map(|(f, _)| f)
}

/// The limit g_1 of u_{n+1} = 1 + (mu/mu_0) f(u_n) from u_0 = 1 + mu/mu_0:
/// the smaller fixed point of g(x) = 1 + (mu/mu_0) f(x), bounding the
/// long-run sup norm for unit-sup inputs and bounded f.
pub fn sup_bound_g1(mu: f64, mu_0: f64, kind: ResponseKind) -> Result<f64> {
    if !kind.is_bounded() {
        return Err(Error::Invalid(
            "sup bound g1 requires a bounded (sigmoid) response".into(),
        ));
    }
    if mu >= mu_0 {
        return Err(Error::ContractionViolation {
            mu,
            threshold: mu_0,
        });
    }
    let g = |x: f64| 1.0 + mu / mu_0 * kind.f(x);
    let mut x = 1.0 + mu / mu_0;
    for _ in 0..10_000 {
        let next = g(x);
        if (next - x).abs() < 1e-14 {
            return Ok(next);
        }
        x = next;
    }
    Err(Error::NonConvergence {
        iterations: 10_000,
        residual: (g(x) - x).abs(),
        tolerance: 1e-14,
    })
}

/// Censored estimate of gamma_0 = sup { gamma : ||Psi(gamma' P_F)||_inf <= 1
/// for all gamma' in [0, gamma] }, by bisection of the predicate on
/// [0, gamma_max].
///
/// Returns `(value, censored)`: censored = true means the predicate still
/// held at gamma_max, so gamma_0 >= gamma_max (possibly infinite).
/// P_F depends on x2 only, so a 1D grid suffices.
pub fn gamma0_estimate(
    op: &FieldOperator,
    mu: f64,
    kind: ResponseKind,
    lambda: f64,
    gamma_max: f64,
    tol: f64,
) -> Result<(f64, bool)> {
    use std::f64::consts::PI;
    let spec = *op.spec();
    let pf = Field::sample(spec, |x| (2.0 * PI * lambda * x[x.len() - 1]).cos())?;
    let solver = SolverOptions::with_tol(1e-11);
    let predicate = |gamma: f64| -> Result<bool> {
        let (state, _) = stationary_state(op, &pf.scale(gamma), mu, kind, &solver)?;
        Ok(state.norm(Norm::Sup) <= 1.0)
    };

    if predicate(gamma_max)? {
        if !predicate(gamma_max * 0.5)? {
            log::warn!("gamma0 predicate non-monotone near {gamma_max}; reporting censored value");
        }
        return Ok((gamma_max, true));
    }
    let (mut lo, mut hi) = (0.0f64, gamma_max);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if predicate(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((0.5 * (lo + hi), false))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_input_is_fixed_immediately() {
        let spec = GridSpec::new_1d(10.0, 256).unwrap();
        let op = FieldOperator::new(spec, &DogParams::canonical()).unwrap();
        let zero = Field::zeros(spec);
        let (state, report) = stationary_state(
            &op,
            &zero,
            1.0,
            ResponseKind::Rational,
            &SolverOptions::default(),
        )
        .unwrap();
        assert_eq!(report.iterations, 1);
        assert_eq!(state.norm(Norm::Sup), 0.0);
    }

    #[test]
    fn contraction_violation_detected() {
        let spec = GridSpec::new_1d(10.0, 64).unwrap();
        let op = FieldOperator::new(spec, &DogParams::canonical()).unwrap();
        let zero = Field::zeros(spec);
        let err = stationary_state(
            &op,
            &zero,
            2.5,
            ResponseKind::Linear,
            &SolverOptions::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::ContractionViolation { .. }));
    }

    #[test]
    fn balanced_mode_admits_larger_mu() {
        let spec = GridSpec::new_1d(10.0, 64).unwrap();
        let op = FieldOperator::new(spec, &DogParams::canonical()).unwrap();
        let zero = Field::zeros(spec);
        let opts = SolverOptions {
            mode: ContractionMode::BalancedL2,
            ..Default::default()
        };
        assert!(stationary_state(&op, &zero, 3.0, ResponseKind::Rational, &opts).is_ok());
        assert!(stationary_state(&op, &zero, 4.5, ResponseKind::Rational, &opts).is_err());
    }

    #[test]
    fn integrator_reports_blow_up() {
        // above mu_c the q_c mode grows exponentially; a near-overflow start
        // crosses into infinity within a few steps
        let spec = GridSpec::new_1d(10.0, 128).unwrap();
        let op = FieldOperator::new(spec, &DogParams::canonical()).unwrap();
        let qc = 2.0f64.ln().sqrt();
        // nearest representable mode to q_c so the growth is real
        let k = (qc * 2.0 * spec.half_width).round();
        let mode = Field::sample(spec, |x| {
            1e305 * (std::f64::consts::PI * k / spec.half_width * x[0]).cos()
        })
        .unwrap();
        let err = integrate(
            &op,
            &mode,
            &Field::zeros(spec),
            8.0,
            ResponseKind::Linear,
            &IntegrateOptions {
                t_final: 50.0,
                dt: 1.0,
                log_every: 0,
                track_decay: false,
                ..Default::default()
            },
        )
        .unwrap_err();
        match err {
            Error::BlowUp { last_valid_t } => assert!(last_valid_t >= 0.0),
            e => panic!("expected blow-up, got {e}"),
        }
    }

    #[test]
    fn g1_known_values() {
        // rational: x^2 - 0.5x - 1 = 0, positive root (0.5 + sqrt(4.25))/2
        let g1 = sup_bound_g1(1.0, 2.0, ResponseKind::Rational).unwrap();
        let oracle = (0.5 + 4.25f64.sqrt()) / 2.0;
        assert!((g1 - oracle).abs() < 1e-12, "g1 = {g1}");
        let g = 1.0 + 0.5 * ResponseKind::Rational.f(g1);
        assert!((g - g1).abs() < 1e-12);

        // capped-linear: g(x) = 1 + 0.5 min(x, 1) has fixed point 1.5
        let g1c = sup_bound_g1(1.0, 2.0, ResponseKind::capped()).unwrap();
        assert!((g1c - 1.5).abs() < 1e-12);

        // mu -> 0 gives g1 -> 1
        let g1z = sup_bound_g1(1e-12, 2.0, ResponseKind::Tanh).unwrap();
        assert!((g1z - 1.0).abs() < 1e-9);

        assert!(sup_bound_g1(1.0, 2.0, ResponseKind::Linear).is_err());
    }
}
