//! The Triangle Algorithm for the convex hull decision problem.
//!
//! Given points `S = {v₁,…,vₙ} ⊂ ℝᵐ` and a target `p`, the algorithm keeps an
//! iterate `p' ∈ conv(S)` written explicitly as a convex combination. Each
//! iteration either finds a pivot `vⱼ` with `‖p' - vⱼ‖ ≥ ‖p - vⱼ‖` and moves
//! `p'` to the point of segment `[p', vⱼ]` closest to `p`, or proves that no
//! pivot exists, in which case `p'` is a witness: the perpendicular bisector
//! of `p p'` separates `p` from the hull and `½‖p - p'‖ ≤ Δ ≤ ‖p - p'‖`.
//!
//! Pivot and witness tests use the square-root-free margin
//! `(p - p')ᵀvᵢ - ½(‖p‖² - ‖p'‖²)`, non-negative exactly for pivots.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::linalg::{dist, dist_sq, dot, norm_sq};
use crate::scalar::Scalar;
use crate::trace::TraceRecord;

/// Coefficient magnitude below which a convex weight is snapped to zero.
pub const COEFF_DUST: f64 = 1e-15;
/// Squared pivot-to-iterate distance below which a step is degenerate.
pub const DEGENERATE_PIVOT_SQ: f64 = 1e-30;

/// A membership query: point set plus target.
#[derive(Debug)]
pub struct HullInstance<T> {
    points: Vec<Vec<T>>,
    target: Vec<T>,
    squared_norms: Vec<T>,
    target_dots: Vec<T>,
    target_norm_sq: T,
    radius: OnceLock<T>,
}

impl<T: Scalar> Clone for HullInstance<T> {
    fn clone(&self) -> Self {
        Self {
            points: self.points.clone(),
            target: self.target.clone(),
            squared_norms: self.squared_norms.clone(),
            target_dots: self.target_dots.clone(),
            target_norm_sq: self.target_norm_sq,
            radius: self.radius.clone(),
        }
    }
}

impl<T: Scalar> HullInstance<T> {
    pub fn new(points: Vec<Vec<T>>, target: Vec<T>) -> Result<Self> {
        let m = target.len();
        if points.is_empty() {
            return Err(Error::InvalidInput("point set is empty".into()));
        }
        if m == 0 {
            return Err(Error::InvalidInput("zero-dimensional target".into()));
        }
        if let Some(bad) = points.iter().find(|v| v.len() != m) {
            return Err(Error::DimensionMismatch { expected: m, found: bad.len() });
        }
        if points.iter().flatten().chain(&target).any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite coordinate".into()));
        }
        let squared_norms = points.iter().map(|v| norm_sq(v)).collect();
        let target_dots = points.iter().map(|v| dot(&target, v)).collect();
        let target_norm_sq = norm_sq(&target);
        Ok(Self { points, target, squared_norms, target_dots, target_norm_sq, radius: OnceLock::new() })
    }

    /// Number of points `n`.
    #[inline]
    pub fn len(&self) -> usize {
        self.points.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Ambient dimension `m`.
    #[inline]
    pub fn dim(&self) -> usize {
        self.target.len()
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[T] {
        &self.points[i]
    }

    pub fn points(&self) -> &[Vec<T>] {
        &self.points
    }

    pub fn target(&self) -> &[T] {
        &self.target
    }

    #[inline]
    pub fn squared_norm(&self, i: usize) -> T {
        self.squared_norms[i]
    }

    /// `‖p - vᵢ‖`
    #[inline]
    pub fn distance_to_target(&self, i: usize) -> T {
        dist(&self.target, &self.points[i])
    }

    /// `R = maxᵢ ‖p - vᵢ‖`, computed on first use.
    pub fn radius(&self) -> T {
        *self.radius.get_or_init(|| (0..self.len()).map(|i| self.distance_to_target(i)).fold(T::zero(), T::max))
    }

    /// Overwrites point `i`; used when the hull moves with a parameter.
    pub fn replace_point(&mut self, i: usize, v: Vec<T>) -> Result<()> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: v.len() });
        }
        self.squared_norms[i] = norm_sq(&v);
        self.target_dots[i] = dot(&self.target, &v);
        self.points[i] = v;
        self.radius = OnceLock::new();
        Ok(())
    }

    fn nearest_vertex(&self) -> usize {
        (0..self.len())
            .map(|i| (i, dist_sq(&self.target, &self.points[i])))
            .fold((0, T::infinity()), |best, cur| if cur.1 < best.1 { cur } else { best })
            .0
    }

    /// Column `j` of the Gram matrix: `vⱼᵀvᵢ` for every `i`.
    fn gram_column(&self, j: usize) -> Vec<T> {
        let vj = &self.points[j];
        self.points.iter().map(|vi| dot(vj, vi)).collect()
    }
}

#[derive(Debug, Clone)]
struct DotCache<T> {
    dots: Vec<T>,
    gram: Vec<Option<Vec<T>>>,
}

impl<T: Scalar> DotCache<T> {
    fn fresh(instance: &HullInstance<T>, point: &[T]) -> Self {
        Self { dots: instance.points.iter().map(|v| dot(point, v)).collect(), gram: vec![None; instance.len()] }
    }
}

/// A point of `conv(S)` with its convex-combination coefficients.
#[derive(Debug, Clone)]
pub struct Iterate<T> {
    coeffs: Vec<T>,
    point: Vec<T>,
    point_norm_sq: T,
    gap: T,
    cache: Option<DotCache<T>>,
}

impl<T: Scalar> Iterate<T> {
    /// Builds an iterate from explicit weights, which must be non-negative and sum to one.
    pub fn from_coeffs(instance: &HullInstance<T>, coeffs: Vec<T>, cache_dots: bool) -> Result<Self> {
        if coeffs.len() != instance.len() {
            return Err(Error::DimensionMismatch { expected: instance.len(), found: coeffs.len() });
        }
        let dust = T::lit(COEFF_DUST);
        if coeffs.iter().any(|&c| !c.is_finite() || c < -dust) {
            return Err(Error::InvalidInput("convex weights must be finite and non-negative".into()));
        }
        let sum: T = coeffs.iter().copied().sum();
        if (sum - T::one()).abs() > T::lit(1e-9) {
            return Err(Error::InvalidInput(format!("convex weights sum to {sum}, not 1")));
        }
        let mut coeffs = coeffs;
        clean_coeffs(&mut coeffs);
        let mut point = vec![T::zero(); instance.dim()];
        for (c, v) in coeffs.iter().zip(&instance.points) {
            if *c != T::zero() {
                crate::linalg::axpy(*c, v, &mut point);
            }
        }
        Ok(Self::with_point(instance, coeffs, point, cache_dots))
    }

    /// The vertex `v_k`, i.e. coefficients `e_k`.
    pub fn vertex(instance: &HullInstance<T>, k: usize, cache_dots: bool) -> Self {
        let mut coeffs = vec![T::zero(); instance.len()];
        coeffs[k] = T::one();
        let point = instance.points[k].clone();
        let mut it = Self::with_point(instance, coeffs, point, false);
        if cache_dots {
            let mut cache = DotCache { dots: instance.gram_column(k), gram: vec![None; instance.len()] };
            cache.gram[k] = Some(cache.dots.clone());
            it.cache = Some(cache);
        }
        it
    }

    pub fn centroid(instance: &HullInstance<T>, cache_dots: bool) -> Self {
        let n = instance.len();
        Self::from_coeffs(instance, vec![T::one() / T::from_count(n); n], cache_dots)
            .expect("uniform weights are a valid convex combination")
    }

    pub fn initial(instance: &HullInstance<T>, rule: &InitRule<T>, cache_dots: bool) -> Result<Self> {
        match rule {
            InitRule::NearestVertex => Ok(Self::vertex(instance, instance.nearest_vertex(), cache_dots)),
            InitRule::Centroid => Ok(Self::centroid(instance, cache_dots)),
            InitRule::Given(c) => Self::from_coeffs(instance, c.clone(), cache_dots),
        }
    }

    fn with_point(instance: &HullInstance<T>, coeffs: Vec<T>, point: Vec<T>, cache_dots: bool) -> Self {
        let cache = cache_dots.then(|| DotCache::fresh(instance, &point));
        let point_norm_sq = norm_sq(&point);
        let gap = dist(instance.target(), &point);
        Self { coeffs, point, point_norm_sq, gap, cache }
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn point(&self) -> &[T] {
        &self.point
    }

    /// `‖p - p'‖`
    pub fn gap(&self) -> T {
        self.gap
    }

    pub fn point_norm_sq(&self) -> T {
        self.point_norm_sq
    }

    /// Cached `p'ᵀvᵢ` values, when caching is enabled.
    pub fn dot_cache(&self) -> Option<&[T]> {
        self.cache.as_ref().map(|c| c.dots.as_slice())
    }

    /// `Σ αᵢ vᵢ` recomputed from the coefficients.
    pub fn recompute_point(&self, instance: &HullInstance<T>) -> Vec<T> {
        let mut p = vec![T::zero(); instance.dim()];
        for (c, v) in self.coeffs.iter().zip(&instance.points) {
            crate::linalg::axpy(*c, v, &mut p);
        }
        p
    }

    /// `p'ᵀvᵢ`, from the cache when present.
    #[inline]
    fn dot_with(&self, instance: &HullInstance<T>, i: usize) -> T {
        match &self.cache {
            Some(c) => c.dots[i],
            None => dot(&self.point, &instance.points[i]),
        }
    }

    /// Moves the point by `delta` without touching the coefficients.
    ///
    /// Used when the hull itself moves rigidly with its coefficients (a
    /// parameterized point changed through [`HullInstance::replace_point`]).
    pub(crate) fn translate(&mut self, instance: &HullInstance<T>, delta: &[T]) {
        crate::linalg::axpy(T::one(), delta, &mut self.point);
        self.resync(instance);
    }

    /// Rebuilds the point from the coefficients, discarding accumulated drift.
    pub(crate) fn refresh(&mut self, instance: &HullInstance<T>) {
        self.point = self.recompute_point(instance);
        self.resync(instance);
    }

    /// Recomputes the derived quantities from `point` against the (possibly modified) instance.
    pub(crate) fn resync(&mut self, instance: &HullInstance<T>) {
        self.point_norm_sq = norm_sq(&self.point);
        self.gap = dist(instance.target(), &self.point);
        if self.cache.is_some() {
            self.cache = Some(DotCache::fresh(instance, &self.point));
        }
    }
}

fn clean_coeffs<T: Scalar>(coeffs: &mut [T]) {
    let dust = T::lit(COEFF_DUST);
    for c in coeffs.iter_mut() {
        if c.abs() < dust || *c < T::zero() {
            *c = T::zero();
        }
    }
    let sum: T = coeffs.iter().copied().sum();
    if sum > T::zero() && sum != T::one() {
        for c in coeffs.iter_mut() {
            *c /= sum;
        }
    }
}

/// How the pivot is picked among all admissible points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PivotRule {
    /// Lowest index satisfying the pivot test.
    FirstFound,
    /// Largest pivot margin, lowest index on ties.
    #[default]
    MostViolated,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub enum InitRule<T> {
    #[default]
    NearestVertex,
    Centroid,
    Given(Vec<T>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct HullConfig<T> {
    pub epsilon: T,
    /// Defaults to `⌈48/ε²⌉` when unset.
    pub max_iterations: Option<usize>,
    pub pivot_rule: PivotRule,
    pub init_rule: InitRule<T>,
    pub cache_dots: bool,
    pub record_trace: bool,
}

impl<T: Scalar> Default for HullConfig<T> {
    fn default() -> Self {
        Self {
            epsilon: T::lit(1e-6),
            max_iterations: None,
            pivot_rule: PivotRule::default(),
            init_rule: InitRule::default(),
            cache_dots: false,
            record_trace: false,
        }
    }
}

impl<T: Scalar> HullConfig<T> {
    pub fn with_epsilon(epsilon: T) -> Self {
        Self { epsilon, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > T::zero() && self.epsilon < T::one()) {
            return Err(Error::InvalidConfig(format!("epsilon must lie in (0,1), got {}", self.epsilon)));
        }
        if self.max_iterations == Some(0) {
            return Err(Error::InvalidConfig("max_iterations must be at least 1".into()));
        }
        Ok(())
    }

    pub fn iteration_cap(&self) -> usize {
        self.max_iterations.unwrap_or_else(|| iteration_cap_from_bound(self.epsilon))
    }
}

/// Certificate that the target lies outside the hull.
#[derive(Debug, Clone)]
pub struct Witness<T> {
    pub iterate: Iterate<T>,
    /// `(p - p')ᵀvᵢ - ½(‖p‖² - ‖p'‖²)` for every point; all strictly negative.
    pub margins: Vec<T>,
    /// `(½‖p - p'‖, ‖p - p'‖)`, which brackets the distance from `p` to the hull.
    pub distance_bracket: (T, T),
}

#[derive(Debug, Clone)]
pub enum HullOutcomeKind<T> {
    InHullApprox(Iterate<T>),
    NotInHull(Witness<T>),
    CapExceeded(Iterate<T>),
}

#[derive(Debug, Clone)]
pub struct HullOutcome<T> {
    pub kind: HullOutcomeKind<T>,
    pub iterations: usize,
    /// Gap of the starting iterate, `δ₀ = ‖p'₀ - p‖`.
    pub initial_gap: T,
    pub last_pivot: Option<usize>,
    pub trace: Option<Vec<TraceRecord<T>>>,
}

impl<T> HullOutcome<T> {
    pub fn iterate(&self) -> &Iterate<T> {
        match &self.kind {
            HullOutcomeKind::InHullApprox(it) | HullOutcomeKind::CapExceeded(it) => it,
            HullOutcomeKind::NotInHull(w) => &w.iterate,
        }
    }

    pub fn witness(&self) -> Option<&Witness<T>> {
        match &self.kind {
            HullOutcomeKind::NotInHull(w) => Some(w),
            _ => None,
        }
    }

    pub fn is_in_hull(&self) -> bool {
        matches!(self.kind, HullOutcomeKind::InHullApprox(_))
    }

    pub fn is_not_in_hull(&self) -> bool {
        matches!(self.kind, HullOutcomeKind::NotInHull(_))
    }
}

/// Pivot margins `(p - p')ᵀvᵢ - ½(‖p‖² - ‖p'‖²)` for every point.
pub fn pivot_margins<T: Scalar>(instance: &HullInstance<T>, iterate: &Iterate<T>) -> Vec<T> {
    let half = T::lit(0.5) * (instance.target_norm_sq - iterate.point_norm_sq);
    (0..instance.len()).map(|i| instance.target_dots[i] - iterate.dot_with(instance, i) - half).collect()
}

/// Finds a pivot, or `None` when the iterate is a witness.
pub fn find_pivot<T: Scalar>(instance: &HullInstance<T>, iterate: &Iterate<T>, rule: PivotRule) -> Option<usize> {
    let half = T::lit(0.5) * (instance.target_norm_sq - iterate.point_norm_sq);
    let margin = |i: usize| instance.target_dots[i] - iterate.dot_with(instance, i) - half;
    match rule {
        PivotRule::FirstFound => (0..instance.len()).find(|&i| margin(i) >= T::zero()),
        PivotRule::MostViolated => {
            let mut best: Option<(usize, T)> = None;
            for i in 0..instance.len() {
                let m = margin(i);
                if m >= T::zero() && best.is_none_or(|(_, b)| m > b) {
                    best = Some((i, m));
                }
            }
            best.map(|(i, _)| i)
        }
    }
}

/// Returns a witness when every margin is strictly negative.
pub fn check_witness<T: Scalar>(instance: &HullInstance<T>, iterate: &Iterate<T>) -> Option<Witness<T>> {
    let margins = pivot_margins(instance, iterate);
    margins.iter().all(|&m| m < T::zero()).then(|| {
        let gap = iterate.gap();
        Witness { iterate: iterate.clone(), margins, distance_bracket: (T::lit(0.5) * gap, gap) }
    })
}

/// Step toward `pivot`: `(p - p')ᵀ(vⱼ - p') / ‖vⱼ - p'‖²` clamped to `[0, 1]`.
pub fn step_size<T: Scalar>(target: &[T], iterate: &Iterate<T>, pivot: &[T]) -> Result<T> {
    let p1 = iterate.point();
    let mut num = T::zero();
    let mut den = T::zero();
    for ((&p, &q), &v) in target.iter().zip(p1).zip(pivot) {
        let d = v - q;
        num += (p - q) * d;
        den += d * d;
    }
    if den < T::lit(DEGENERATE_PIVOT_SQ) {
        return Err(Error::DegeneratePivot { distance_sq: den.to_f64_lossy() });
    }
    Ok((num / den).max(T::zero()).min(T::one()))
}

/// Replaces `p'` by `(1 - α)p' + α vⱼ`, updating coefficients and caches in `O(n + m)`
/// (plus one Gram column, memoized, when caching dot products).
pub fn apply_step<T: Scalar>(instance: &HullInstance<T>, iterate: &mut Iterate<T>, j: usize, alpha: T) {
    let keep = T::one() - alpha;
    let vj = instance.point(j);
    if alpha == T::one() {
        iterate.coeffs.iter_mut().for_each(|c| *c = T::zero());
        iterate.coeffs[j] = T::one();
        iterate.point.copy_from_slice(vj);
    } else {
        iterate.coeffs.iter_mut().for_each(|c| *c *= keep);
        iterate.coeffs[j] += alpha;
        for (p, &v) in iterate.point.iter_mut().zip(vj) {
            *p = keep * *p + alpha * v;
        }
        clean_coeffs(&mut iterate.coeffs);
    }
    if let Some(cache) = iterate.cache.as_mut() {
        let col = cache.gram[j].get_or_insert_with(|| instance.gram_column(j));
        if alpha == T::one() {
            cache.dots.copy_from_slice(col);
        } else {
            for (d, &g) in cache.dots.iter_mut().zip(col.iter()) {
                *d = keep * *d + alpha * g;
            }
        }
        // ‖p'‖² = Σ αᵢ p'ᵀvᵢ
        iterate.point_norm_sq = iterate.coeffs.iter().zip(&cache.dots).map(|(&c, &d)| c * d).sum();
    } else {
        iterate.point_norm_sq = norm_sq(&iterate.point);
    }
    iterate.gap = dist(instance.target(), &iterate.point);
}

/// `⌈48/ε²⌉`, the worst-case iteration count to reach an ε-approximation.
pub fn iteration_cap_from_bound<T: Scalar>(epsilon: T) -> usize {
    let v = (T::lit(48.0) / (epsilon * epsilon)).to_f64_lossy();
    let r = v.round();
    let cap = if (v - r).abs() <= 1e-9 * r.max(1.0) { r } else { v.ceil() };
    if cap >= usize::MAX as f64 {
        usize::MAX
    } else {
        cap as usize
    }
}

/// Runs the Triangle Algorithm until an ε-approximation, a witness, or the iteration cap.
pub fn run_hull<T: Scalar>(instance: &HullInstance<T>, config: &HullConfig<T>) -> Result<HullOutcome<T>> {
    config.validate()?;
    let cap = config.iteration_cap();
    let eps = config.epsilon;
    let mut it = Iterate::initial(instance, &config.init_rule, config.cache_dots)?;
    let initial_gap = it.gap();
    let mut trace = config.record_trace.then(Vec::new);
    let mut iterations = 0;
    let mut last_pivot = None;

    let record = |trace: &mut Option<Vec<TraceRecord<T>>>, rec: TraceRecord<T>| {
        if let Some(t) = trace.as_mut() {
            t.push(rec);
        }
    };
    let finish =
        |kind, iterations, last_pivot, trace| Ok(HullOutcome { kind, iterations, initial_gap, last_pivot, trace });

    let nearest = (0..instance.len()).map(|i| instance.distance_to_target(i)).fold(T::infinity(), T::min);
    if it.gap() <= eps * nearest {
        record(&mut trace, final_record(iterations, &it, false));
        return finish(HullOutcomeKind::InHullApprox(it), iterations, last_pivot, trace);
    }

    loop {
        let Some(j) = find_pivot(instance, &it, config.pivot_rule) else {
            let w = check_witness(instance, &it).expect("no pivot implies every margin is negative");
            record(&mut trace, final_record(iterations, &it, true));
            return finish(HullOutcomeKind::NotInHull(w), iterations, last_pivot, trace);
        };
        if it.gap() <= eps * instance.distance_to_target(j) {
            record(&mut trace, final_record(iterations, &it, false));
            return finish(HullOutcomeKind::InHullApprox(it), iterations, Some(j), trace);
        }
        if iterations >= cap {
            record(&mut trace, final_record(iterations, &it, false));
            return finish(HullOutcomeKind::CapExceeded(it), iterations, last_pivot, trace);
        }
        let alpha = step_size(instance.target(), &it, instance.point(j))?;
        apply_step(instance, &mut it, j, alpha);
        iterations += 1;
        last_pivot = Some(j);
        record(
            &mut trace,
            TraceRecord {
                iteration: iterations,
                shift: T::zero(),
                value: it.gap(),
                alpha_b: None,
                pivot: Some(j),
                step: Some(alpha),
                witness: false,
            },
        );
    }
}

fn final_record<T: Scalar>(iteration: usize, it: &Iterate<T>, witness: bool) -> TraceRecord<T> {
    TraceRecord { iteration, shift: T::zero(), value: it.gap(), alpha_b: None, pivot: None, step: None, witness }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn inst(points: &[[f64; 2]], p: [f64; 2]) -> HullInstance<f64> {
        HullInstance::new(points.iter().map(|v| v.to_vec()).collect(), p.to_vec()).unwrap()
    }

    /// Iterate sitting at an arbitrary point (weights irrelevant for the tests that use it).
    fn at_point(instance: &HullInstance<f64>, p: &[f64]) -> Iterate<f64> {
        let mut it = Iterate::centroid(instance, false);
        it.point = p.to_vec();
        it.resync(instance);
        it
    }

    // p = 0, S = {a₁, a₂, -b} of the second worked system at t = 0.
    fn witness_instance() -> HullInstance<f64> {
        inst(&[[2.0, 1.0], [-1.0, 1.0], [0.0, 3.0]], [0.0, 0.0])
    }

    // p = 0, S = {a₁, a₂, -b} of the first worked system.
    fn pivot_instance() -> HullInstance<f64> {
        inst(&[[3.0, 2.0], [-2.0, 1.0], [1.0, -4.0]], [0.0, 0.0])
    }

    #[test]
    fn find_pivot_none_on_witness() {
        let s = witness_instance();
        let it = Iterate::from_coeffs(&s, vec![0.25, 0.5, 0.25], false).unwrap();
        assert_eq!(it.point(), &[0.0, 1.5]);
        assert_eq!(find_pivot(&s, &it, PivotRule::MostViolated), None);
        assert_eq!(find_pivot(&s, &it, PivotRule::FirstFound), None);
    }

    #[test]
    fn find_pivot_selects_second_column() {
        let s = pivot_instance();
        let it = Iterate::centroid(&s, false);
        assert_eq!(find_pivot(&s, &it, PivotRule::MostViolated), Some(1));
        assert_eq!(find_pivot(&s, &it, PivotRule::FirstFound), Some(1));
    }

    #[test]
    fn find_pivot_zero_gap_every_index_qualifies() {
        let s = inst(&[[1.0, 0.0], [0.0, 1.0], [-1.0, -1.0]], [0.2, 0.3]);
        let it = at_point(&s, &[0.2, 0.3]);
        assert!(pivot_margins(&s, &it).iter().all(|&m| m == 0.0));
        assert_eq!(find_pivot(&s, &it, PivotRule::FirstFound), Some(0));
        assert_eq!(find_pivot(&s, &it, PivotRule::MostViolated), Some(0));
    }

    #[test]
    fn step_size_examples() {
        let s = pivot_instance();
        let it = Iterate::centroid(&s, false);
        assert!((step_size(&[0.0, 0.0], &it, &[-2.0, 1.0]).unwrap() - 0.25).abs() < 1e-15);

        let s2 = inst(&[[2.0, 1.0], [-1.0, 1.0], [-2.0, -1.0]], [0.0, 0.0]);
        let it2 = at_point(&s2, &[-0.5, 0.5]);
        assert!((step_size(&[0.0, 0.0], &it2, &[2.0, 1.0]).unwrap() - 2.0 / 13.0).abs() < 1e-15);

        let s3 = inst(&[[0.0, 0.0], [2.0, 0.0]], [1.0, 0.0]);
        let mut it3 = Iterate::vertex(&s3, 0, false);
        let a = step_size(s3.target(), &it3, s3.point(1)).unwrap();
        assert_eq!(a, 0.5);
        apply_step(&s3, &mut it3, 1, a);
        assert_eq!(it3.point(), &[1.0, 0.0]);
        assert_eq!(it3.gap(), 0.0);
    }

    #[test]
    fn step_size_rejects_degenerate_pivot() {
        let s = inst(&[[1.0, 1.0], [2.0, 0.0]], [0.0, 0.0]);
        let it = Iterate::vertex(&s, 0, false);
        assert!(matches!(step_size(s.target(), &it, s.point(0)), Err(Error::DegeneratePivot { .. })));
    }

    #[test]
    fn apply_step_updates_convex_weights() {
        let s = pivot_instance();
        let mut it = Iterate::centroid(&s, true);
        apply_step(&s, &mut it, 1, 0.25);
        for (c, e) in it.coeffs().iter().zip([0.25, 0.5, 0.25]) {
            assert!((c - e).abs() < 1e-15);
        }
        assert!(it.gap() < 1e-15);

        let s2 = inst(&[[2.0, 1.0], [-1.0, 1.0], [-2.0, -1.0]], [0.0, 0.0]);
        let mut it2 = Iterate::from_coeffs(&s2, vec![0.25, 0.5, 0.25], false).unwrap();
        apply_step(&s2, &mut it2, 0, 2.0 / 13.0);
        for (c, e) in it2.coeffs().iter().zip([19.0 / 52.0, 11.0 / 26.0, 11.0 / 52.0]) {
            assert!((c - e).abs() < 1e-15);
        }
    }

    #[test]
    fn apply_step_zero_and_unit() {
        let s = pivot_instance();
        let mut it = Iterate::centroid(&s, true);
        let before = it.clone();
        apply_step(&s, &mut it, 2, 0.0);
        assert_eq!(it.coeffs(), before.coeffs());
        assert_eq!(it.point(), before.point());
        apply_step(&s, &mut it, 2, 1.0);
        assert_eq!(it.coeffs(), &[0.0, 0.0, 1.0]);
        assert_eq!(it.point(), s.point(2));
        assert_eq!(it.dot_cache().unwrap(), &[-5.0, -6.0, 17.0]);
    }

    #[test]
    fn run_hull_first_example_converges_in_one_step() {
        let s = pivot_instance();
        let cfg = HullConfig { init_rule: InitRule::Centroid, ..HullConfig::with_epsilon(1e-12) };
        let out = run_hull(&s, &cfg).unwrap();
        assert!(out.is_in_hull());
        assert_eq!(out.iterations, 1);
        assert!(out.iterate().gap() < 1e-12);
    }

    #[test]
    fn run_hull_target_is_vertex() {
        let s = inst(&[[1.0, 2.0], [3.0, 0.0], [0.0, 0.0]], [1.0, 2.0]);
        let out = run_hull(&s, &HullConfig::default()).unwrap();
        assert!(out.is_in_hull());
        assert_eq!(out.iterations, 0);
        assert_eq!(out.iterate().gap(), 0.0);
    }

    #[test]
    fn run_hull_far_point_brackets_distance() {
        let s = inst(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]], [10.0, 10.0]);
        let out = run_hull(&s, &HullConfig::default()).unwrap();
        let w = out.witness().expect("outside point");
        let delta = 9.0 * 2f64.sqrt();
        assert!(w.distance_bracket.0 <= delta + 1e-12 && delta <= w.distance_bracket.1 + 1e-12);
        assert_eq!(w.distance_bracket.0, 0.5 * w.distance_bracket.1);
    }

    #[test]
    fn check_witness_margins() {
        let s = witness_instance();
        let it = Iterate::from_coeffs(&s, vec![0.25, 0.5, 0.25], false).unwrap();
        let w = check_witness(&s, &it).unwrap();
        for (m, e) in w.margins.iter().zip([-0.375, -0.375, -3.375]) {
            assert!((m - e).abs() < 1e-15);
        }
        let s2 = inst(&[[0.0, 0.0], [4.0, 0.0], [0.0, 4.0]], [1.0, 1.0]);
        assert!(check_witness(&s2, &at_point(&s2, &[1.0, 1.0])).is_none());
    }

    #[test]
    fn cap_from_bound() {
        assert_eq!(iteration_cap_from_bound(0.5), 192);
        assert_eq!(iteration_cap_from_bound(0.1), 4800);
        assert_eq!(iteration_cap_from_bound(1.0 / 48f64.sqrt()), 2304);
    }

    #[test]
    fn run_hull_is_generic_over_f32() {
        let s =
            HullInstance::<f32>::new(vec![vec![3.0, 2.0], vec![-2.0, 1.0], vec![1.0, -4.0]], vec![0.0, 0.0]).unwrap();
        let cfg = HullConfig { init_rule: InitRule::Centroid, ..HullConfig::with_epsilon(1e-4) };
        assert!(run_hull(&s, &cfg).unwrap().is_in_hull());
    }

    #[test]
    fn invalid_config_rejected() {
        let s = pivot_instance();
        assert!(run_hull(&s, &HullConfig::with_epsilon(1.5)).is_err());
        assert!(run_hull(&s, &HullConfig { max_iterations: Some(0), ..HullConfig::default() }).is_err());
        assert!(HullInstance::<f64>::new(vec![vec![1.0], vec![1.0, 2.0]], vec![0.0]).is_err());
    }

    fn arb_instance() -> impl Strategy<Value = (Vec<Vec<f64>>, Vec<f64>, Vec<f64>)> {
        (1usize..6, 1usize..4).prop_flat_map(|(n, m)| {
            (
                prop::collection::vec(prop::collection::vec(-5.0..5.0f64, m), n),
                prop::collection::vec(-5.0..5.0f64, m),
                prop::collection::vec(0.01..1.0f64, n),
            )
        })
    }

    proptest! {
        #[test]
        fn pivot_witness_dichotomy((pts, p, w) in arb_instance(), rule in prop_oneof![Just(PivotRule::FirstFound), Just(PivotRule::MostViolated)]) {
            let s = HullInstance::new(pts, p).unwrap();
            let total: f64 = w.iter().sum();
            let it = Iterate::from_coeffs(&s, w.iter().map(|x| x / total).collect(), false).unwrap();
            prop_assert_ne!(find_pivot(&s, &it, rule).is_some(), check_witness(&s, &it).is_some());
        }

        #[test]
        fn margin_test_matches_distance_test((pts, p, w) in arb_instance()) {
            let s = HullInstance::new(pts, p).unwrap();
            let total: f64 = w.iter().sum();
            let it = Iterate::from_coeffs(&s, w.iter().map(|x| x / total).collect(), false).unwrap();
            for (i, m) in pivot_margins(&s, &it).into_iter().enumerate() {
                let lhs = dist(it.point(), s.point(i));
                let rhs = s.distance_to_target(i);
                // Skip pairs within roundoff of the equality boundary.
                if (lhs - rhs).abs() > 1e-9 {
                    prop_assert_eq!(m >= 0.0, lhs >= rhs);
                }
            }
        }

        #[test]
        fn steps_keep_feasibility_and_shrink_gap((pts, p, w) in arb_instance(), cache in any::<bool>()) {
            let s = HullInstance::new(pts, p).unwrap();
            let total: f64 = w.iter().sum();
            let mut it = Iterate::from_coeffs(&s, w.iter().map(|x| x / total).collect(), cache).unwrap();
            for _ in 0..25 {
                let Some(j) = find_pivot(&s, &it, PivotRule::MostViolated) else { break };
                let Ok(a) = step_size(s.target(), &it, s.point(j)) else { break };
                let before = it.gap();
                apply_step(&s, &mut it, j, a);
                prop_assert!(it.gap() <= before + 1e-12);
                let sum: f64 = it.coeffs().iter().sum();
                prop_assert!((sum - 1.0).abs() < 1e-12);
                prop_assert!(it.coeffs().iter().all(|&c| c >= 0.0));
                let fresh = it.recompute_point(&s);
                prop_assert!(dist(&fresh, it.point()) < 1e-9);
                if let Some(d) = it.dot_cache() {
                    for (i, &di) in d.iter().enumerate() {
                        let exact = dot(it.point(), s.point(i));
                        prop_assert!((di - exact).abs() <= 1e-10 * (1.0 + exact.abs()));
                    }
                }
            }
        }
    }
}
