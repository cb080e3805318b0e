//! Incremental solver for general square systems.
//!
//! `Ax = b` is rewritten as `A(x + te) = b + tu` with `u = Ae`; for every
//! `t ≥ t_*` the shifted system has a non-negative solution, so the origin lies
//! in `conv{a₁,…,aₙ,-b(t)}`. The solver keeps a single iterate whose point
//! moves affinely with the shift, `p'(t) = p' - t·α_b·u`, alternates Triangle
//! steps with re-optimizing `t` against the recovered residual, and when it
//! meets a witness raises `t` past the first root of the quadratics
//! `gᵢ(t) = ‖p'(t)‖² - 2p'(t)ᵀaᵢ` that certify it.

use crate::bounds::{delta0_lower_bound, tau_star_bounds};
use crate::error::{Error, Result};
use crate::hull::{
    apply_step, check_witness, find_pivot, step_size, HullInstance, InitRule, Iterate, PivotRule, Witness,
};
use crate::linalg::{axpy, dot, norm, norm_sq};
use crate::scalar::Scalar;
use crate::system::LinearSystem;
use crate::trace::TraceRecord;
use crate::two_phase::{
    nonneg_iteration_cap, phase1_witness, recover_from_coeffs, Delta0Policy, SolveConfig, SolveOutcome, SolveStatus,
    ITERATION_CEILING,
};

/// Discriminants within this relative distance of zero use the Cauchy root bound.
const DISCRIMINANT_TOL: f64 = 1e-12;
/// Cap on escalations when no finite shift bound is available.
pub const DEFAULT_MAX_ESCALATIONS: usize = 1_000_000;
/// Full recomputation of the shifted point after this many incremental moves.
const REFRESH_EVERY: usize = 32;

/// How the shift is raised after a witness.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IncrementPolicy {
    /// Smallest root, rounded so the increment is a positive multiple of the quantum.
    Quantized(u32),
    /// Smallest root, unrounded.
    Raw,
    /// `t ← 2t + 1`, ignoring the quadratics.
    DoublePlusOne,
}

impl Default for IncrementPolicy {
    fn default() -> Self {
        Self::Quantized(1)
    }
}

#[derive(Debug, Clone)]
pub struct IncrementalConfig<T> {
    pub base: SolveConfig<T>,
    pub policy: IncrementPolicy,
    /// Defaults to `⌈10·τ'_*⌉ + 1`, or [`DEFAULT_MAX_ESCALATIONS`] when the bound is unavailable.
    pub max_escalations: Option<usize>,
    /// Applied to each re-optimized shift before use; never lowers the shift.
    pub tau_rounding: Option<fn(T) -> T>,
}

impl<T: Scalar> Default for IncrementalConfig<T> {
    fn default() -> Self {
        let base = SolveConfig { delta0_policy: Delta0Policy::SkipPhase1, ..SolveConfig::default() };
        Self { base, policy: IncrementPolicy::default(), max_escalations: None, tau_rounding: None }
    }
}

impl<T: Scalar> IncrementalConfig<T> {
    pub fn with_epsilon0(epsilon0: T) -> Self {
        let mut c = Self::default();
        c.base.epsilon0 = epsilon0;
        c
    }

    pub fn validate(&self) -> Result<()> {
        if self.policy == IncrementPolicy::Quantized(0) {
            return Err(Error::InvalidConfig("increment quantum must be at least 1".into()));
        }
        if self.max_escalations == Some(0) {
            return Err(Error::InvalidConfig("max_escalations must be at least 1".into()));
        }
        self.base.validate()
    }
}

/// `gᵢ(t) = c2·t² + c1·t + c0`, for `i` in `0..=n` (the last one belongs to `-b(t)`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftQuadratic<T> {
    pub index: usize,
    pub c2: T,
    pub c1: T,
    pub c0: T,
}

impl<T: Scalar> ShiftQuadratic<T> {
    pub fn eval(&self, t: T) -> T {
        (self.c2 * t + self.c1) * t + self.c0
    }

    /// Larger real root, or an upper bound on it when the discriminant is negligible.
    pub fn larger_root(&self) -> Option<T> {
        let (a, b, c) = (self.c2, self.c1, self.c0);
        if a == T::zero() {
            return (b != T::zero()).then(|| -c / b);
        }
        let disc = b * b - T::lit(4.0) * a * c;
        let scale = b * b + (T::lit(4.0) * a * c).abs();
        if disc.abs() <= T::lit(DISCRIMINANT_TOL) * scale {
            // Cauchy: every root lies within 1 + max(|c1|, |c0|)/|c2| of the origin.
            return Some(T::one() + (b.abs().max(c.abs()) / a.abs()));
        }
        if disc < T::zero() {
            return None;
        }
        let sd = disc.sqrt();
        let q = T::lit(-0.5) * (b + if b >= T::zero() { sd } else { -sd });
        let r1 = q / a;
        let r2 = if q != T::zero() { c / q } else { r1 };
        Some(r1.max(r2))
    }
}

/// Shift, shifted hull and the iterate living in it.
#[derive(Debug)]
pub struct ShiftState<T> {
    t0: T,
    instance: HullInstance<T>,
    iterate: Iterate<T>,
    moves_since_refresh: usize,
}

impl<T: Scalar> Clone for ShiftState<T> {
    fn clone(&self) -> Self {
        Self {
            t0: self.t0,
            instance: self.instance.clone(),
            iterate: self.iterate.clone(),
            moves_since_refresh: self.moves_since_refresh,
        }
    }
}

impl<T: Scalar> ShiftState<T> {
    pub fn new(system: &LinearSystem<T>, t0: T, init: &InitRule<T>) -> Result<Self> {
        let instance = HullInstance::new(system.hull_points(t0), vec![T::zero(); system.dim()])?;
        let iterate = Iterate::initial(&instance, init, false)?;
        Ok(Self { t0, instance, iterate, moves_since_refresh: 0 })
    }

    pub fn from_coeffs(system: &LinearSystem<T>, t0: T, coeffs: Vec<T>) -> Result<Self> {
        Self::new(system, t0, &InitRule::Given(coeffs))
    }

    pub fn t0(&self) -> T {
        self.t0
    }

    pub fn iterate(&self) -> &Iterate<T> {
        &self.iterate
    }

    pub fn instance(&self) -> &HullInstance<T> {
        &self.instance
    }

    /// Weight on `-b(t₀)`.
    pub fn alpha_b(&self) -> T {
        *self.iterate.coeffs().last().expect("non-empty")
    }

    /// `p'(t₀)`
    pub fn point(&self) -> &[T] {
        self.iterate.point()
    }

    /// The shift-independent part `p' = p'(t₀) + t₀·α_b·u`.
    pub fn p_prime_base(&self, system: &LinearSystem<T>) -> Vec<T> {
        let mut p = self.iterate.point().to_vec();
        axpy(self.t0 * self.alpha_b(), system.shift_dir(), &mut p);
        p
    }

    /// `p'(t)` for an arbitrary shift, without moving the state.
    pub fn point_at(&self, system: &LinearSystem<T>, t: T) -> Vec<T> {
        let mut p = self.iterate.point().to_vec();
        axpy(-(t - self.t0) * self.alpha_b(), system.shift_dir(), &mut p);
        p
    }

    /// Moves the hull to `-b(t)` and the iterate with it, keeping the coefficients.
    pub fn set_shift(&mut self, system: &LinearSystem<T>, t: T) -> Result<()> {
        if t == self.t0 {
            return Ok(());
        }
        let n = system.dim();
        let delta: Vec<T> = system.shift_dir().iter().map(|&u| -(t - self.t0) * self.alpha_b() * u).collect();
        self.instance.replace_point(n, system.rhs_at(t).into_iter().map(|v| -v).collect())?;
        self.t0 = t;
        self.moves_since_refresh += 1;
        if self.moves_since_refresh >= REFRESH_EVERY {
            self.iterate.refresh(&self.instance);
            self.moves_since_refresh = 0;
        } else {
            self.iterate.translate(&self.instance, &delta);
        }
        Ok(())
    }

    pub fn find_pivot(&self, rule: PivotRule) -> Option<usize> {
        find_pivot(&self.instance, &self.iterate, rule)
    }

    pub fn check_witness(&self) -> Option<Witness<T>> {
        check_witness(&self.instance, &self.iterate)
    }

    /// One Triangle step toward point `j`; returns the step size.
    pub fn step(&mut self, j: usize) -> Result<T> {
        let alpha = step_size(self.instance.target(), &self.iterate, self.instance.point(j))?;
        apply_step(&self.instance, &mut self.iterate, j, alpha);
        Ok(alpha)
    }

    /// `½·p'(t₀) + ½·(-b(t₀))`: restores positive weight on `-b`.
    pub fn reseed(&mut self) {
        let n = self.instance.len() - 1;
        apply_step(&self.instance, &mut self.iterate, n, T::lit(0.5));
    }

    /// `x₀ = α/α_b`, the non-negative candidate for the shifted system.
    pub fn recover(&self, alpha_floor: T) -> Result<Vec<T>> {
        recover_from_coeffs(self.iterate.coeffs(), alpha_floor)
    }

    /// `E(t₀) = ‖p'(t₀)‖/α_b`, equal to `‖Ax₀ - b(t₀)‖` in exact arithmetic.
    pub fn residual_estimate(&self) -> T {
        self.iterate.gap() / self.alpha_b()
    }

    /// `(τ₀, E(τ₀))` minimizing the recovered residual over `t ≥ t_floor`, in `O(n)`.
    pub fn optimal_shift(&self, system: &LinearSystem<T>, t_floor: T) -> (T, T) {
        let u = system.shift_dir();
        let ab = self.alpha_b();
        // Ax₀ - b = p'/α_b with p' the shift-free part.
        let r: Vec<T> = self.p_prime_base(system).into_iter().map(|v| v / ab).collect();
        minimize_shift(&r, u, t_floor)
    }
}

fn minimize_shift<T: Scalar>(r: &[T], u: &[T], t_floor: T) -> (T, T) {
    let t_hat = dot(u, r) / norm_sq(u);
    let tau = t_floor.max(t_hat);
    let mut e = r.to_vec();
    axpy(-tau, u, &mut e);
    (tau, norm(&e))
}

/// `τ₀ = max(t_floor, uᵀ(Ax₀ - b)/‖u‖²)` and `E(τ₀) = ‖Ax₀ - b(τ₀)‖`.
pub fn optimize_shift_tau0<T: Scalar>(system: &LinearSystem<T>, x0: &[T], t_floor: T) -> (T, T) {
    minimize_shift(&system.residual(x0), system.shift_dir(), t_floor)
}

/// The `n + 1` quadratics `gᵢ(t)` of the current iterate, in absolute `t`.
pub fn build_quadratics<T: Scalar>(
    state: &ShiftState<T>,
    system: &LinearSystem<T>,
    alpha_floor: T,
) -> Result<Vec<ShiftQuadratic<T>>> {
    let ab = state.alpha_b();
    if !(ab >= alpha_floor) || ab == T::zero() {
        return Err(Error::AlphaBVanishes { alpha_b: ab.to_f64_lossy(), floor: alpha_floor.to_f64_lossy() });
    }
    let two = T::lit(2.0);
    let u = system.shift_dir();
    let p = state.p_prime_base(system);
    let uu = norm_sq(u);
    let pp = norm_sq(&p);
    let pu = dot(&p, u);
    let mut out: Vec<ShiftQuadratic<T>> = (0..system.dim())
        .map(|i| {
            let a = system.column(i);
            ShiftQuadratic { index: i, c2: ab * ab * uu, c1: -two * ab * (pu - dot(a, u)), c0: pp - two * dot(&p, a) }
        })
        .collect();
    let b = system.rhs();
    out.push(ShiftQuadratic {
        index: system.dim(),
        c2: ab * (ab - two) * uu,
        c1: two * (T::one() - ab) * pu - two * ab * dot(u, b),
        c0: pp + two * dot(&p, b),
    });
    Ok(out)
}

/// Next shift after a witness at `t₀`.
///
/// The candidate is the smallest larger-root over the column quadratics; the
/// quadratic of `-b(t)` never takes part.
pub fn next_shift<T: Scalar>(quadratics: &[ShiftQuadratic<T>], t0: T, policy: IncrementPolicy) -> Result<T> {
    if policy == IncrementPolicy::DoublePlusOne {
        return Ok(T::lit(2.0) * t0 + T::one());
    }
    let cols = quadratics.split_last().map_or(&[][..], |(_, head)| head);
    let raw = cols
        .iter()
        .filter(|q| q.c2 > T::zero())
        .filter_map(|q| q.larger_root())
        .filter(|&r| r > t0)
        .fold(None, |m: Option<T>, r| Some(m.map_or(r, |m| m.min(r))))
        .ok_or(Error::NoPositiveQuadratic)?;
    Ok(match policy {
        IncrementPolicy::Raw => raw,
        IncrementPolicy::Quantized(q) => {
            let q = T::from_count(q as usize);
            let steps = ((raw - t0) / q).ceil().max(T::one());
            t0 + q * steps
        }
        IncrementPolicy::DoublePlusOne => unreachable!(),
    })
}

/// Proof that `Ax = b + t₀u` has no non-negative solution.
#[derive(Debug, Clone)]
pub struct ShiftCertificate<T> {
    pub shift: T,
    pub witness: Witness<T>,
    /// `gᵢ(t₀)` for every point: twice the witness margins, all negative.
    pub g_values: Vec<T>,
}

pub fn shift_solvability_certificate<T: Scalar>(state: &ShiftState<T>) -> Option<ShiftCertificate<T>> {
    state.check_witness().map(|witness| {
        let g_values = witness.margins.iter().map(|&m| T::lit(2.0) * m).collect();
        ShiftCertificate { shift: state.t0(), witness, g_values }
    })
}

fn default_max_escalations<T: Scalar>(system: &LinearSystem<T>) -> usize {
    match tau_star_bounds(system) {
        Ok(t) => match t.tau_star_prime {
            Some(v) => {
                let e = (T::lit(10.0) * v).ceil().to_f64_lossy() + 1.0;
                e.clamp(1.0, DEFAULT_MAX_ESCALATIONS as f64) as usize
            }
            None => DEFAULT_MAX_ESCALATIONS,
        },
        Err(_) => DEFAULT_MAX_ESCALATIONS,
    }
}

fn resolve_delta0<T: Scalar>(system: &LinearSystem<T>, config: &SolveConfig<T>) -> Result<(Option<T>, usize)> {
    Ok(match config.delta0_policy {
        Delta0Policy::FromPhase1Witness => {
            let p1 = phase1_witness(system, config)?;
            (Some(p1.delta0_prime), p1.iterations)
        }
        Delta0Policy::UserSupplied(d) => (Some(d), 0),
        Delta0Policy::SkipPhase1 => (delta0_lower_bound(system).ok(), 0),
    })
}

/// Incremental Triangle Algorithm for `Ax = b` with no sign information.
pub fn solve_incremental<T: Scalar>(
    system: &LinearSystem<T>,
    config: &IncrementalConfig<T>,
) -> Result<SolveOutcome<T>> {
    config.validate()?;
    let base = &config.base;
    let n = system.dim();
    let rho = system.rho();
    let floor = base.alpha_floor;
    let target = base.epsilon0 * rho;
    let every = base.residual_interval(n);
    let (delta0_prime, phase1_iterations) = resolve_delta0(system, base)?;
    let global_cap = base.hull.max_iterations.unwrap_or(ITERATION_CEILING);
    let max_escalations = config.max_escalations.unwrap_or_else(|| default_max_escalations(system));
    let shift_cap = |t: T| -> usize {
        match delta0_prime {
            Some(d) if base.hull.max_iterations.is_none() => {
                nonneg_iteration_cap(base.epsilon0, system.rho_at(t), d).min(ITERATION_CEILING)
            }
            _ => global_cap,
        }
    };

    let mut state = ShiftState::new(system, T::zero(), &base.hull.init_rule)?;
    let mut trace = base.hull.record_trace.then(Vec::new);
    let mut diagnostics = Vec::new();
    let mut iterations = 0usize;
    let mut steps_at_shift = 0usize;
    let mut escalations = 0usize;
    let mut reseeds = 0usize;
    let mut need_step1 = true;

    let finish = |status: SolveStatus<T>,
                  state: &ShiftState<T>,
                  iterations: usize,
                  escalations: usize,
                  reseeds: usize,
                  trace: Option<Vec<TraceRecord<T>>>,
                  diagnostics: Vec<String>| {
        let t0 = state.t0();
        let x: Option<Vec<T>> = state.recover(floor).ok().map(|x0| x0.into_iter().map(|v| v - t0).collect());
        let residual_norm = x.as_ref().map(|x| system.residual_norm(x));
        let mut trace = trace;
        if let Some(tr) = trace.as_mut() {
            tr.push(TraceRecord {
                iteration: iterations,
                shift: t0,
                value: residual_norm.unwrap_or_else(|| state.iterate().gap()),
                alpha_b: Some(state.alpha_b()),
                pivot: None,
                step: None,
                witness: false,
            });
        }
        SolveOutcome {
            status,
            x,
            residual_norm,
            relative_residual: residual_norm.map(|r| r / rho),
            shift_t: t0,
            delta0_prime,
            inner_epsilon: None,
            epsilon_prime: None,
            iterations: iterations + phase1_iterations,
            phase1_iterations,
            iteration_cap: global_cap,
            shift_escalations: escalations,
            reseeds,
            trace,
            diagnostics,
            sensitivity: None,
        }
    };

    loop {
        // Step 1: re-optimize the shift against the recovered candidate and test it.
        if need_step1 && state.alpha_b() >= floor && state.alpha_b() > T::zero() {
            let t_floor = state.t0();
            let (tau, _) = state.optimal_shift(system, t_floor);
            let tau = match config.tau_rounding {
                Some(round) => round(tau).max(t_floor),
                None => tau,
            };
            state.set_shift(system, tau)?;
            let estimate = state.residual_estimate();
            if iterations.is_multiple_of(every) || estimate <= target {
                let t0 = state.t0();
                let x: Vec<T> = state.recover(floor)?.into_iter().map(|v| v - t0).collect();
                if system.residual_norm(&x) <= target {
                    return Ok(finish(
                        SolveStatus::Converged,
                        &state,
                        iterations,
                        escalations,
                        reseeds,
                        trace,
                        diagnostics,
                    ));
                }
            }
        }

        // Step 2: pivot or witness at the current shift.
        if let Some(j) = state.find_pivot(base.hull.pivot_rule) {
            if iterations >= global_cap || steps_at_shift >= shift_cap(state.t0()) {
                diagnostics.push(format!("iteration cap reached at shift {}", state.t0()));
                return Ok(finish(
                    SolveStatus::CapExceeded,
                    &state,
                    iterations,
                    escalations,
                    reseeds,
                    trace,
                    diagnostics,
                ));
            }
            let alpha = match state.step(j) {
                Ok(a) => a,
                Err(e) => {
                    diagnostics.push(e.to_string());
                    return Ok(finish(
                        SolveStatus::CapExceeded,
                        &state,
                        iterations,
                        escalations,
                        reseeds,
                        trace,
                        diagnostics,
                    ));
                }
            };
            iterations += 1;
            steps_at_shift += 1;
            need_step1 = true;
            if let Some(tr) = trace.as_mut() {
                let ab = state.alpha_b();
                tr.push(TraceRecord {
                    iteration: iterations,
                    shift: state.t0(),
                    value: if ab > T::zero() { state.residual_estimate() } else { state.iterate().gap() },
                    alpha_b: Some(ab),
                    pivot: Some(j),
                    step: Some(alpha),
                    witness: false,
                });
            }
            continue;
        }

        // Step 3: witness; raise the shift (or reseed when -b carries no weight).
        need_step1 = false;
        let t0 = state.t0();
        let quadratics = match build_quadratics(&state, system, floor) {
            Ok(q) => Some(q),
            Err(Error::AlphaBVanishes { .. }) => None,
            Err(e) => return Err(e),
        };
        let next = match &quadratics {
            Some(q) => next_shift(q, t0, config.policy),
            None => Err(Error::NoPositiveQuadratic),
        };
        let t_next = match next {
            Ok(t) => t,
            Err(Error::NoPositiveQuadratic) => {
                reseeds += 1;
                if reseeds > max_escalations {
                    diagnostics.push("reseed limit reached".into());
                    return Ok(finish(
                        SolveStatus::CapExceeded,
                        &state,
                        iterations,
                        escalations,
                        reseeds,
                        trace,
                        diagnostics,
                    ));
                }
                diagnostics.push(format!("reseeded at shift {t0}: weight on -b vanished"));
                state.reseed();
                need_step1 = true;
                continue;
            }
            Err(e) => return Err(e),
        };
        if escalations >= max_escalations {
            diagnostics.push(format!("escalation cap {max_escalations} reached"));
            return Ok(finish(SolveStatus::CapExceeded, &state, iterations, escalations, reseeds, trace, diagnostics));
        }
        escalations += 1;
        steps_at_shift = 0;
        if let Some(tr) = trace.as_mut() {
            tr.push(TraceRecord {
                iteration: iterations,
                shift: t0,
                value: state.residual_estimate(),
                alpha_b: Some(state.alpha_b()),
                pivot: None,
                step: None,
                witness: true,
            });
        }
        state.set_shift(system, t_next)?;
    }
}
