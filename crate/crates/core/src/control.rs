//! Exact control synthesis for the linear semigroup system and the
//! nonlinear flow.
//!
//! The linear generator is A u = -u + mu omega * u; its semigroup is the
//! Fourier multiplier e^{t m(xi)} with m = mu omega-hat - 1. For mu < mu_0
//! the operator is dissipative (m < 0 at every frequency), e^{TA} - Id is
//! invertible, and the steering control for any horizon T is
//! I = (e^{TA} - Id)^{-1} A (a_T - e^{TA} a_0). Small horizons admit the
//! Neumann construction I = tau^{-1} (Id + O(tau))^{-1} (a_T - e^{tau A} a_0),
//! which carries over to the nonlinear flow as a shooting iteration.
//!
//! Caveat: the nonlinear small-time argument needs the flow differential to
//! be a bounded operator, which holds on L^p only for p > 1; on L^1 the
//! construction is not justified. Nothing here exercises the L^1 case (the
//! endpoint metric is the sup norm throughout).

use crate::dynamics::{integrate, FieldOperator, IntegrateOptions};
use crate::error::{Error, Result};
use crate::grid::{Field, Norm};
use crate::kernel::{constants, omega_hat, DogParams};
use crate::response::ResponseKind;
use crate::spectral::{apply_multiplier, SpectralEngine};
use num_complex::Complex64;

/// A steering task: drive `a0` to `a_target` in time `horizon`.
#[derive(Debug, Clone)]
pub struct ControlProblem {
    pub a0: Field,
    pub a_target: Field,
    pub horizon: f64,
    pub mu: f64,
    pub kind: ResponseKind,
}

impl ControlProblem {
    fn validate(&self) -> Result<()> {
        if self.a0.spec() != self.a_target.spec() {
            return Err(Error::GridMismatch {
                left: format!("{:?}", self.a0.spec()),
                right: format!("{:?}", self.a_target.spec()),
            });
        }
        if !self.horizon.is_finite() || self.horizon <= 0.0 {
            return Err(Error::Invalid(format!(
                "horizon must be positive, got {}",
                self.horizon
            )));
        }
        Ok(())
    }
}

/// A synthesized time-constant control with its verified endpoint error.
#[derive(Debug, Clone)]
pub struct ControlResult {
    pub control: Field,
    /// Sup-norm endpoint mismatch measured by the verification run.
    pub endpoint_error: f64,
    pub iterations: usize,
    /// True when the endpoint error is at or below the requested tolerance.
    pub converged: bool,
}

/// One segment of a piecewise-constant control schedule.
#[derive(Debug, Clone)]
pub struct ControlSegment {
    pub t_start: f64,
    pub t_end: f64,
    pub input: Field,
}

/// Two-phase (free decay, then small-time correction) schedule.
#[derive(Debug, Clone)]
pub struct PiecewiseControl {
    pub segments: Vec<ControlSegment>,
    pub endpoint_error: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn multiplier_m(params: &DogParams, mu: f64) -> impl Fn(&[f64]) -> f64 + '_ {
    move |xi: &[f64]| mu * omega_hat(params, xi) - 1.0
}

/// Linear flow e^{tA} u via the Fourier multiplier e^{t (mu omega-hat - 1)}.
pub fn semigroup_apply(t: f64, u: &Field, mu: f64, params: &DogParams) -> Result<Field> {
    if t < 0.0 {
        return Err(Error::Invalid(format!("time must be nonnegative, got {t}")));
    }
    let m = multiplier_m(params, mu);
    apply_multiplier(|xi| Complex64::new((t * m(xi)).exp(), 0.0), u)
}

/// Exact steering control for the linear system on any horizon:
/// I = (e^{TA} - Id)^{-1} A (a_target - e^{TA} a_0), assembled per mode
/// from a(T) = e^{TA} a_0 + A^{-1}(e^{TA} - Id) I. As T grows the control
/// tends to A a_target, the input whose stationary state is the target.
/// The endpoint is verified with the same closed-form evolution.
pub fn linear_control(problem: &ControlProblem, params: &DogParams) -> Result<ControlResult> {
    problem.validate()?;
    let c = constants(params)?;
    if problem.mu >= c.mu_0 {
        return Err(Error::ContractionViolation {
            mu: problem.mu,
            threshold: c.mu_0,
        });
    }
    let spec = *problem.a0.spec();
    let engine = SpectralEngine::new(spec);
    let t = problem.horizon;
    let m = multiplier_m(params, problem.mu);

    let a0_hat = engine.forward(problem.a0.values());
    let a1_hat = engine.forward(problem.a_target.values());

    let len = spec.len();
    let mut control_hat = vec![Complex64::default(); len];
    let mut endpoint_hat = vec![Complex64::default(); len];
    for i in 0..len {
        let xi = match spec.dim {
            1 => vec![spec.frequency(i)],
            _ => vec![spec.frequency(i / spec.n), spec.frequency(i % spec.n)],
        };
        let mv = m(&xi);
        let e = (t * mv).exp();
        let gap = (1.0 - e).abs();
        if gap < 1e-14 {
            return Err(Error::NearSingularControl { xi, gap });
        }
        let rhs = a1_hat[i] - e * a0_hat[i];
        let ctrl = rhs * (mv / (e - 1.0));
        control_hat[i] = ctrl;
        // closed-form endpoint for the verification below
        endpoint_hat[i] = e * a0_hat[i] + ctrl * ((e - 1.0) / mv);
    }

    let control = Field::new(spec, engine.inverse_real(control_hat))?;
    let endpoint = Field::new(spec, engine.inverse_real(endpoint_hat))?;
    let endpoint_error = endpoint.sub(&problem.a_target)?.norm(Norm::Sup);
    Ok(ControlResult {
        control,
        endpoint_error,
        iterations: 0,
        converged: endpoint_error <= 1e-8,
    })
}

/// Largest admissible small-time horizon: the tau solving
/// tau (1 + mu/mu_0) e^{(1 + mu/mu_0) tau} = 1, found by bisection.
/// Below this the flow-differential bound guarantees Id + O(tau) is
/// invertible.
pub fn tau_max(mu: f64, mu_0: f64) -> f64 {
    let r = 1.0 + mu / mu_0;
    let h = |tau: f64| tau * r * (r * tau).exp() - 1.0;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while h(hi) < 0.0 {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if h(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Options for the small-time synthesis.
#[derive(Debug, Clone, Copy)]
pub struct ShootingOptions {
    /// Endpoint tolerance the iteration aims for (sup norm).
    pub tol: f64,
    pub max_iterations: usize,
    /// Initial damping on the shooting update; halved whenever the residual
    /// grows.
    pub damping: f64,
    /// Synthesis time step; the verification run uses dt/10.
    pub dt: Option<f64>,
}

impl Default for ShootingOptions {
    fn default() -> Self {
        ShootingOptions {
            tol: 2e-5,
            max_iterations: 60,
            damping: 1.0,
            dt: None,
        }
    }
}

/// Small-time exact control.
///
/// Linear response: Neumann inversion of Id + O(tau) where
/// tau (Id + O(tau)) = A^{-1}(e^{tau A} - Id), all per mode.
/// Nonlinear response: damped shooting
/// I_{n+1} = I_n + tau^{-1} (a_target - a_{I_n}(tau)) with the endpoint
/// simulated by exponential Euler; the returned endpoint error always comes
/// from a re-simulation at dt/10.
pub fn small_time_control(
    problem: &ControlProblem,
    params: &DogParams,
    opts: &ShootingOptions,
) -> Result<ControlResult> {
    problem.validate()?;
    let c = constants(params)?;
    let tau = problem.horizon;
    let t_max = tau_max(problem.mu, c.mu_0);
    if tau > t_max {
        return Err(Error::HorizonTooLong {
            tau,
            tau_max: t_max,
        });
    }

    match problem.kind {
        ResponseKind::Linear => small_time_linear(problem, params, opts),
        _ => small_time_shooting(problem, params, opts),
    }
}

fn small_time_linear(
    problem: &ControlProblem,
    params: &DogParams,
    opts: &ShootingOptions,
) -> Result<ControlResult> {
    let tau = problem.horizon;
    let m = multiplier_m(params, problem.mu);

    // residual r = a_target - e^{tau A} a0
    let flowed = semigroup_apply(tau, &problem.a0, problem.mu, params)?;
    let r = problem.a_target.sub(&flowed)?.scale(1.0 / tau);

    // O(tau) as a multiplier: (e^{tau m} - 1)/(tau m) - 1
    let o_mult = |xi: &[f64]| {
        let mv = m(xi);
        let g = if mv.abs() < 1e-12 {
            // removable limit: (e^x - 1)/x -> 1
            1.0 + 0.5 * tau * mv
        } else {
            ((tau * mv).exp() - 1.0) / (tau * mv)
        };
        Complex64::new(g - 1.0, 0.0)
    };

    // Neumann iteration I <- r/tau - O(I)
    let mut control = r.clone();
    let mut iterations = 0;
    for _ in 0..200 {
        iterations += 1;
        let o_applied = apply_multiplier(o_mult, &control)?;
        let next = r.sub(&o_applied)?;
        let delta = next.sup_distance(&control)?;
        control = next;
        if delta < 1e-14 * (1.0 + control.norm(Norm::Sup)) {
            break;
        }
    }

    // verify: linear closed-form endpoint a(tau) = e^{tau A} a0 + G_tau I
    let g_applied = apply_multiplier(
        |xi| {
            let mv = m(xi);
            let g = if mv.abs() < 1e-12 {
                tau * (1.0 + 0.5 * tau * mv)
            } else {
                ((tau * mv).exp() - 1.0) / mv
            };
            Complex64::new(g, 0.0)
        },
        &control,
    )?;
    let endpoint = flowed.add(&g_applied)?;
    let endpoint_error = endpoint.sub(&problem.a_target)?.norm(Norm::Sup);
    Ok(ControlResult {
        control,
        endpoint_error,
        iterations,
        converged: endpoint_error <= opts.tol.max(1e-8),
    })
}

fn shoot_endpoint(
    op: &FieldOperator,
    problem: &ControlProblem,
    control: &Field,
    dt: f64,
) -> Result<Field> {
    let run = integrate(
        op,
        &problem.a0,
        control,
        problem.mu,
        problem.kind,
        &IntegrateOptions {
            t_final: problem.horizon,
            dt,
            log_every: 0,
            keep_snapshots: false,
            decay_norm: Norm::Sup,
            track_decay: false,
        },
    )?;
    Ok(run.final_state)
}

fn small_time_shooting(
    problem: &ControlProblem,
    params: &DogParams,
    opts: &ShootingOptions,
) -> Result<ControlResult> {
    let spec = *problem.a0.spec();
    let op = FieldOperator::new(spec, params)?;
    let tau = problem.horizon;
    let dt = opts.dt.unwrap_or(tau / 1000.0);

    let mut control = problem.a_target.sub(&problem.a0)?.scale(1.0 / tau);
    let mut damping = opts.damping;
    let mut best: Option<(Field, f64)> = None;
    let mut residual_history: Vec<f64> = Vec::new();
    let mut iterations = 0;

    for _ in 0..opts.max_iterations {
        iterations += 1;
        let endpoint = shoot_endpoint(&op, problem, &control, dt)?;
        let gap = problem.a_target.sub(&endpoint)?;
        let res = gap.norm(Norm::Sup);
        if best.as_ref().is_none_or(|(_, b)| res < *b) {
            best = Some((control.clone(), res));
        } else {
            damping *= 0.5;
        }
        residual_history.push(res);
        if res <= opts.tol {
            break;
        }
        // stagnation: < 1% reduction over the last 10 iterations
        if residual_history.len() >= 11 {
            let old = residual_history[residual_history.len() - 11];
            if res > 0.99 * old {
                break;
            }
        }
        control = control.add(&gap.scale(damping / tau))?;
    }

    let (control, _) = best.expect("at least one shooting iteration ran");
    // decoupled verification at ten times finer resolution
    let fine = shoot_endpoint(&op, problem, &control, dt / 10.0)?;
    let endpoint_error = fine.sub(&problem.a_target)?.norm(Norm::Sup);
    Ok(ControlResult {
        control,
        endpoint_error,
        iterations,
        converged: endpoint_error <= 1e-4,
    })
}

/// Piecewise-constant control for a long horizon: zero input on
/// [0, T - tau] (free decay toward the zero stationary state), then the
/// small-time control over the last tau.
pub fn two_phase_control(
    problem: &ControlProblem,
    params: &DogParams,
    tau: f64,
    opts: &ShootingOptions,
) -> Result<PiecewiseControl> {
    problem.validate()?;
    if tau >= problem.horizon {
        return Err(Error::Invalid(format!(
            "tau = {tau} must be smaller than the horizon {}",
            problem.horizon
        )));
    }
    let spec = *problem.a0.spec();
    let op = FieldOperator::new(spec, params)?;
    let t_free = problem.horizon - tau;
    let zero = Field::zeros(spec);
    let free = integrate(
        &op,
        &problem.a0,
        &zero,
        problem.mu,
        problem.kind,
        &IntegrateOptions {
            t_final: t_free,
            dt: 0.01,
            log_every: 0,
            keep_snapshots: false,
            decay_norm: Norm::Sup,
            track_decay: false,
        },
    )?;

    let tail_problem = ControlProblem {
        a0: free.final_state,
        a_target: problem.a_target.clone(),
        horizon: tau,
        mu: problem.mu,
        kind: problem.kind,
    };
    let tail = small_time_control(&tail_problem, params, opts)?;

    Ok(PiecewiseControl {
        segments: vec![
            ControlSegment {
                t_start: 0.0,
                t_end: t_free,
                input: zero,
            },
            ControlSegment {
                t_start: t_free,
                t_end: problem.horizon,
                input: tail.control,
            },
        ],
        endpoint_error: tail.endpoint_error,
        iterations: tail.iterations,
        converged: tail.converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;

    #[test]
    fn semigroup_at_zero_time_is_identity() {
        let spec = GridSpec::new_1d(10.0, 128).unwrap();
        let p = DogParams::canonical();
        let u = Field::sample(spec, |x| (0.4 * x[0]).sin()).unwrap();
        let v = semigroup_apply(0.0, &u, 1.0, &p).unwrap();
        assert!(v.sup_distance(&u).unwrap() < 1e-13);
        assert!(semigroup_apply(-1.0, &u, 1.0, &p).is_err());
    }

    #[test]
    fn tau_max_solves_the_lemma_equation() {
        let t = tau_max(1.0, 2.0);
        let r = 1.5;
        assert!((t * r * (r * t).exp() - 1.0).abs() < 1e-10);
        assert!((t - 0.378).abs() < 0.01, "tau_max = {t}");
    }

    #[test]
    fn trivial_problem_zero_control() {
        let spec = GridSpec::new_1d(10.0, 64).unwrap();
        let p = DogParams::canonical();
        let zero = Field::zeros(spec);
        let problem = ControlProblem {
            a0: zero.clone(),
            a_target: zero,
            horizon: 1.0,
            mu: 1.0,
            kind: ResponseKind::Linear,
        };
        let r = linear_control(&problem, &p).unwrap();
        assert!(r.control.norm(Norm::Sup) < 1e-14);
        assert!(r.endpoint_error < 1e-14);
    }

    #[test]
    fn horizon_guard() {
        let spec = GridSpec::new_1d(10.0, 64).unwrap();
        let p = DogParams::canonical();
        let zero = Field::zeros(spec);
        let problem = ControlProblem {
            a0: zero.clone(),
            a_target: zero,
            horizon: 1.0,
            mu: 1.0,
            kind: ResponseKind::Rational,
        };
        let err = small_time_control(&problem, &p, &ShootingOptions::default()).unwrap_err();
        assert!(matches!(err, Error::HorizonTooLong { .. }));
    }
}
