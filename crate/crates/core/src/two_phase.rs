//! Two-phase solver for systems whose solution is non-negative.
//!
//! `Ax = b` has a solution `x ≥ 0` exactly when the origin lies in
//! `conv{a₁,…,aₙ,-b}`. Phase 1 runs the Triangle Algorithm on the columns
//! alone to obtain a witness `p'` for `0 ∉ conv{aᵢ}`, whence `Δ'₀ = ½‖p'‖` is a
//! lower bound on that distance. Phase 2 adds `-b` and drives an iterate toward
//! the origin; any iterate with weight `α_b > 0` on `-b` yields the candidate
//! `x₀ = α/α_b`, whose residual is exactly `‖p'‖/α_b`.

use crate::bounds::delta0_lower_bound;
use crate::error::{Error, Result};
use crate::hull::{
    apply_step, check_witness, find_pivot, iteration_cap_from_bound, run_hull, step_size, HullConfig, HullInstance,
    HullOutcomeKind, InitRule, Iterate, Witness,
};
use crate::linalg::norm;
use crate::scalar::Scalar;
use crate::system::LinearSystem;
use crate::trace::TraceRecord;

/// Weight on `-b` below which recovery is refused.
pub const ALPHA_FLOOR: f64 = 1e-12;
/// Hard ceiling on bound-derived iteration caps; explicit caps are not clamped.
pub const ITERATION_CEILING: usize = 10_000_000;
/// Above this dimension the direct residual is only recomputed every `⌈n/512⌉` steps.
const RESIDUAL_BLOCK: usize = 512;

/// Where the lower bound `Δ'₀` on `dist(0, conv{aᵢ})` comes from.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Delta0Policy<T> {
    /// Run Phase 1 and use half the witness norm.
    #[default]
    FromPhase1Witness,
    UserSupplied(T),
    /// No Phase 1; the eigenvalue bound stands in for `Δ'₀`.
    SkipPhase1,
}

/// When Phase 2 declares success.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StopRule {
    /// As soon as the recovered `x₀` satisfies `‖Ax₀ - b‖ ≤ ε₀ρ`.
    #[default]
    ResidualFirst,
    /// Only once `‖p'‖ ≤ ερ` with the inner tolerance `ε`.
    HullGap,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveConfig<T> {
    pub epsilon0: T,
    pub delta0_policy: Delta0Policy<T>,
    /// Pivot and init rules, trace switch, Phase 1 tolerance and an explicit iteration cap.
    pub hull: HullConfig<T>,
    pub alpha_floor: T,
    pub stop_rule: StopRule,
    /// Override for the direct-residual cadence.
    pub residual_check_every: Option<usize>,
}

impl<T: Scalar> Default for SolveConfig<T> {
    fn default() -> Self {
        Self {
            epsilon0: T::lit(1e-6),
            delta0_policy: Delta0Policy::default(),
            hull: HullConfig::default(),
            alpha_floor: T::lit(ALPHA_FLOOR),
            stop_rule: StopRule::default(),
            residual_check_every: None,
        }
    }
}

impl<T: Scalar> SolveConfig<T> {
    pub fn with_epsilon0(epsilon0: T) -> Self {
        Self { epsilon0, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon0 > T::zero() && self.epsilon0 < T::one()) {
            return Err(Error::InvalidConfig(format!("epsilon0 must lie in (0,1), got {}", self.epsilon0)));
        }
        if let Delta0Policy::UserSupplied(d) = self.delta0_policy {
            if !(d > T::zero() && d.is_finite()) {
                return Err(Error::InvalidConfig(format!("supplied delta0 must be positive, got {d}")));
            }
        }
        if !(self.alpha_floor >= T::zero()) {
            return Err(Error::InvalidConfig("alpha_floor must be non-negative".into()));
        }
        if self.residual_check_every == Some(0) {
            return Err(Error::InvalidConfig("residual_check_every must be at least 1".into()));
        }
        self.hull.validate()
    }

    pub(crate) fn residual_interval(&self, n: usize) -> usize {
        self.residual_check_every.unwrap_or_else(|| if n <= RESIDUAL_BLOCK { 1 } else { n.div_ceil(RESIDUAL_BLOCK) })
    }
}

#[derive(Debug, Clone)]
pub enum SolveStatus<T> {
    Converged,
    /// `0 ∉ conv{a₁,…,aₙ,-b}`: no non-negative solution, with certificate.
    InfeasibleNonneg(Witness<T>),
    CapExceeded,
}

/// Record of the first iterate meeting the inner hull tolerance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensitivityCheck<T> {
    pub iteration: usize,
    pub hull_gap: T,
    pub epsilon: T,
    pub epsilon_prime: T,
    pub residual: T,
    pub rho: T,
    /// `residual ≤ ε'ρ`
    pub holds: bool,
}

#[derive(Debug, Clone)]
pub struct SolveOutcome<T> {
    pub status: SolveStatus<T>,
    /// Present whenever the final iterate carries weight on `-b`.
    pub x: Option<Vec<T>>,
    pub residual_norm: Option<T>,
    pub relative_residual: Option<T>,
    pub shift_t: T,
    pub delta0_prime: Option<T>,
    pub inner_epsilon: Option<T>,
    pub epsilon_prime: Option<T>,
    /// Pivot steps across all phases.
    pub iterations: usize,
    pub phase1_iterations: usize,
    pub iteration_cap: usize,
    pub shift_escalations: usize,
    pub reseeds: usize,
    pub trace: Option<Vec<TraceRecord<T>>>,
    pub diagnostics: Vec<String>,
    pub sensitivity: Option<SensitivityCheck<T>>,
}

impl<T> SolveOutcome<T> {
    pub fn is_converged(&self) -> bool {
        matches!(self.status, SolveStatus::Converged)
    }

    pub fn witness(&self) -> Option<&Witness<T>> {
        match &self.status {
            SolveStatus::InfeasibleNonneg(w) => Some(w),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Phase1<T> {
    pub witness: Witness<T>,
    /// `½‖p'‖`
    pub delta0_prime: T,
    pub iterations: usize,
}

fn columns<T: Scalar>(system: &LinearSystem<T>) -> Vec<Vec<T>> {
    system.matrix().columns().map(<[T]>::to_vec).collect()
}

fn phase1_hull_config<T: Scalar>(config: &SolveConfig<T>) -> HullConfig<T> {
    let mut hull = config.hull.clone();
    hull.record_trace = false;
    hull.max_iterations = Some(
        config.hull.max_iterations.unwrap_or_else(|| iteration_cap_from_bound(hull.epsilon).min(ITERATION_CEILING)),
    );
    hull
}

/// Phase 1: a witness for `0 ∉ conv{a₁,…,aₙ}` and `Δ'₀ = ½‖p'‖`.
pub fn phase1_witness<T: Scalar>(system: &LinearSystem<T>, config: &SolveConfig<T>) -> Result<Phase1<T>> {
    let instance = HullInstance::new(columns(system), vec![T::zero(); system.dim()])?;
    let hull = phase1_hull_config(config);
    let out = run_hull(&instance, &hull)?;
    match out.kind {
        HullOutcomeKind::NotInHull(witness) => {
            let delta0_prime = T::lit(0.5) * norm(witness.iterate.point());
            Ok(Phase1 { witness, delta0_prime, iterations: out.iterations })
        }
        HullOutcomeKind::InHullApprox(_) => Err(Error::ZeroInColumnHull),
        HullOutcomeKind::CapExceeded(_) => Err(Error::CapExceeded { cap: hull.iteration_cap() }),
    }
}

/// Inner hull tolerance `ε = (Δ'₀/2)·min{1/ρ, ε₀/(Δ'₀ + ‖b‖)}`.
///
/// The result never exceeds `Δ'₀/(2ρ)`, and makes `ε' = 2(1 + ‖b‖/Δ'₀)ε ≤ ε₀`.
pub fn select_inner_epsilon<T: Scalar>(epsilon0: T, delta0_prime: T, system: &LinearSystem<T>) -> T {
    let half = T::lit(0.5) * delta0_prime;
    half * (T::one() / system.rho()).min(epsilon0 / (delta0_prime + system.rhs_norm()))
}

/// `ε' = 2(1 + ‖b‖/Δ'₀)ε`: relative residual guaranteed once `‖p'‖ ≤ ερ`.
pub fn sensitivity_epsilon_prime<T: Scalar>(epsilon: T, delta0_prime: T, b_norm: T) -> T {
    T::lit(2.0) * (T::one() + b_norm / delta0_prime) * epsilon
}

/// `⌈(48/ε₀²)(ρ/Δ'₀)²⌉`
pub fn nonneg_iteration_cap<T: Scalar>(epsilon0: T, rho: T, delta0_prime: T) -> usize {
    let r = rho / delta0_prime;
    let v = (T::lit(48.0) / (epsilon0 * epsilon0) * r * r).to_f64_lossy();
    if !v.is_finite() || v >= usize::MAX as f64 {
        usize::MAX
    } else {
        v.ceil() as usize
    }
}

/// `x₀ = (α₁/α_b, …, αₙ/α_b)` from weights over `{a₁,…,aₙ,-b}`.
pub fn recover_from_coeffs<T: Scalar>(coeffs: &[T], alpha_floor: T) -> Result<Vec<T>> {
    let (&alpha_b, head) = coeffs.split_last().ok_or_else(|| Error::InvalidInput("no coefficients".into()))?;
    if !(alpha_b >= alpha_floor) || alpha_b == T::zero() {
        return Err(Error::AlphaBVanishes { alpha_b: alpha_b.to_f64_lossy(), floor: alpha_floor.to_f64_lossy() });
    }
    Ok(head.iter().map(|&a| a / alpha_b).collect())
}

pub fn recover_solution<T: Scalar>(iterate: &Iterate<T>, system: &LinearSystem<T>, alpha_floor: T) -> Result<Vec<T>> {
    if iterate.coeffs().len() != system.dim() + 1 {
        return Err(Error::DimensionMismatch { expected: system.dim() + 1, found: iterate.coeffs().len() });
    }
    recover_from_coeffs(iterate.coeffs(), alpha_floor)
}

struct Phase2Setup<T> {
    start: Iterate<T>,
    delta0_prime: Option<T>,
    phase1_iterations: usize,
    diagnostics: Vec<String>,
}

fn phase2_setup<T: Scalar>(
    system: &LinearSystem<T>,
    config: &SolveConfig<T>,
    instance: &HullInstance<T>,
) -> Result<Phase2Setup<T>> {
    let mut diagnostics = Vec::new();
    match config.delta0_policy {
        Delta0Policy::FromPhase1Witness => {
            let p1 = phase1_witness(system, config)?;
            let mut coeffs = p1.witness.iterate.coeffs().to_vec();
            coeffs.push(T::zero());
            Ok(Phase2Setup {
                start: Iterate::from_coeffs(instance, coeffs, config.hull.cache_dots)?,
                delta0_prime: Some(p1.delta0_prime),
                phase1_iterations: p1.iterations,
                diagnostics,
            })
        }
        Delta0Policy::UserSupplied(d) => Ok(Phase2Setup {
            start: Iterate::initial(instance, &config.hull.init_rule, config.hull.cache_dots)?,
            delta0_prime: Some(d),
            phase1_iterations: 0,
            diagnostics,
        }),
        Delta0Policy::SkipPhase1 => {
            let delta0_prime = match delta0_lower_bound(system) {
                Ok(d) => Some(d),
                Err(e) => {
                    diagnostics
                        .push(format!("no eigenvalue bound on delta0 ({e}); residual check is the only guarantee"));
                    None
                }
            };
            Ok(Phase2Setup {
                start: Iterate::initial(instance, &config.hull.init_rule, config.hull.cache_dots)?,
                delta0_prime,
                phase1_iterations: 0,
                diagnostics,
            })
        }
    }
}

/// Two-Phase Triangle Algorithm for `Ax = b, x ≥ 0`.
pub fn solve_nonneg<T: Scalar>(system: &LinearSystem<T>, config: &SolveConfig<T>) -> Result<SolveOutcome<T>> {
    config.validate()?;
    let n = system.dim();
    let rho = system.rho();
    let eps0 = config.epsilon0;
    let floor = config.alpha_floor;
    let instance = HullInstance::new(system.hull_points(T::zero()), vec![T::zero(); n])?;
    let Phase2Setup { start, delta0_prime, phase1_iterations, mut diagnostics } =
        phase2_setup(system, config, &instance)?;

    let inner_epsilon = delta0_prime.map(|d| select_inner_epsilon(eps0, d, system));
    let epsilon_prime =
        delta0_prime.zip(inner_epsilon).map(|(d, e)| sensitivity_epsilon_prime(e, d, system.rhs_norm()));
    let iteration_cap = match (config.hull.max_iterations, delta0_prime) {
        (Some(cap), _) => cap,
        (None, Some(d)) => nonneg_iteration_cap(eps0, rho, d).min(ITERATION_CEILING),
        (None, None) => ITERATION_CEILING,
    };
    if delta0_prime.is_none() && config.stop_rule == StopRule::HullGap {
        diagnostics.push("hull-gap stop rule needs delta0; falling back to the residual check".into());
    }
    let residual_stop = config.stop_rule == StopRule::ResidualFirst || inner_epsilon.is_none();
    let every = config.residual_interval(n);
    let target_residual = eps0 * rho;

    let mut it = start;
    let mut trace = config.hull.record_trace.then(Vec::new);
    let mut iterations = 0usize;
    let mut sensitivity: Option<SensitivityCheck<T>> = None;

    let finish = |status,
                  it: &Iterate<T>,
                  iterations,
                  trace: Option<Vec<TraceRecord<T>>>,
                  mut diagnostics: Vec<String>,
                  sensitivity| {
        let x = recover_solution(it, system, floor).ok();
        let residual_norm = x.as_ref().map(|x| system.residual_norm(x));
        let mut trace = trace;
        if let Some(t) = trace.as_mut() {
            t.push(TraceRecord {
                iteration: iterations,
                shift: T::zero(),
                value: residual_norm.unwrap_or_else(|| norm(it.point())),
                alpha_b: Some(it.coeffs()[n]),
                pivot: None,
                step: None,
                witness: matches!(status, SolveStatus::InfeasibleNonneg(_)),
            });
        }
        if delta0_prime.is_none() {
            diagnostics.push("solved without delta0: the direct residual check is the only guarantee".into());
        }
        SolveOutcome {
            status,
            x,
            residual_norm,
            relative_residual: residual_norm.map(|r| r / rho),
            shift_t: T::zero(),
            delta0_prime,
            inner_epsilon,
            epsilon_prime,
            iterations: iterations + phase1_iterations,
            phase1_iterations,
            iteration_cap,
            shift_escalations: 0,
            reseeds: 0,
            trace,
            diagnostics,
            sensitivity,
        }
    };

    loop {
        let alpha_b = it.coeffs()[n];
        let gap = it.gap();
        if alpha_b >= floor && alpha_b > T::zero() {
            let proxy = gap / alpha_b;
            if residual_stop && (iterations.is_multiple_of(every) || proxy <= target_residual) {
                let x = recover_from_coeffs(it.coeffs(), floor)?;
                if system.residual_norm(&x) <= target_residual {
                    return Ok(finish(SolveStatus::Converged, &it, iterations, trace, diagnostics, sensitivity));
                }
            }
        }
        if let (Some(eps), Some(eps_p)) = (inner_epsilon, epsilon_prime) {
            if gap <= eps * rho {
                if !(alpha_b >= floor && alpha_b > T::zero()) {
                    diagnostics.push(
                        Error::AlphaBVanishes { alpha_b: alpha_b.to_f64_lossy(), floor: floor.to_f64_lossy() }
                            .to_string(),
                    );
                    return Ok(finish(SolveStatus::CapExceeded, &it, iterations, trace, diagnostics, sensitivity));
                }
                let x = recover_from_coeffs(it.coeffs(), floor)?;
                let residual = system.residual_norm(&x);
                if sensitivity.is_none() {
                    let holds = residual <= eps_p * rho * (T::one() + T::lit(1e-9));
                    if !holds {
                        diagnostics.push(format!(
                            "sensitivity bound violated at iteration {iterations}: residual {residual} > {}",
                            eps_p * rho
                        ));
                    }
                    sensitivity = Some(SensitivityCheck {
                        iteration: iterations,
                        hull_gap: gap,
                        epsilon: eps,
                        epsilon_prime: eps_p,
                        residual,
                        rho,
                        holds,
                    });
                }
                if !residual_stop && residual <= target_residual {
                    return Ok(finish(SolveStatus::Converged, &it, iterations, trace, diagnostics, sensitivity));
                }
            }
        }

        let Some(j) = find_pivot(&instance, &it, config.hull.pivot_rule) else {
            let w = check_witness(&instance, &it).expect("no pivot implies every margin is negative");
            return Ok(finish(SolveStatus::InfeasibleNonneg(w), &it, iterations, trace, diagnostics, sensitivity));
        };
        if iterations >= iteration_cap {
            diagnostics.push(format!("iteration cap {iteration_cap} reached"));
            return Ok(finish(SolveStatus::CapExceeded, &it, iterations, trace, diagnostics, sensitivity));
        }
        let alpha = match step_size(instance.target(), &it, instance.point(j)) {
            Ok(a) => a,
            Err(e) => {
                diagnostics.push(e.to_string());
                return Ok(finish(SolveStatus::CapExceeded, &it, iterations, trace, diagnostics, sensitivity));
            }
        };
        apply_step(&instance, &mut it, j, alpha);
        iterations += 1;
        if let Some(t) = trace.as_mut() {
            let ab = it.coeffs()[n];
            t.push(TraceRecord {
                iteration: iterations,
                shift: T::zero(),
                value: if ab > T::zero() { it.gap() / ab } else { it.gap() },
                alpha_b: Some(ab),
                pivot: Some(j),
                step: Some(alpha),
                witness: false,
            });
        }
    }
}

/// Convenience: solve with [`InitRule::Centroid`] and no Phase 1, as in small hand-worked systems.
pub fn centroid_config<T: Scalar>(epsilon0: T, delta0_prime: T) -> SolveConfig<T> {
    let mut c = SolveConfig::with_epsilon0(epsilon0);
    c.delta0_policy = Delta0Policy::UserSupplied(delta0_prime);
    c.hull.init_rule = InitRule::Centroid;
    c
}
