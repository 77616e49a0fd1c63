//! Problem data model: points, box domains, black-box objectives and
//! solvable instances, plus the instance-normalizing transforms (domain
//! shift, weight rescaling, coordinate contraction).

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use crate::{Error, Result};

/// Absolute tolerance for box and budget comparisons, scaled by the budget.
///
/// The solvers drive `‖x‖₁` exactly to the budget, so accumulated rounding
/// must not flag the final point as infeasible.
pub fn feasibility_tol(budget: f64) -> f64 {
    1e-9 * budget.max(1.0)
}

/// A dense coordinate vector `x ∈ [0, u]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Point {
    coords: Vec<f64>,
}

impl Point {
    /// Builds a point, rejecting non-finite or negative coordinates.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        for &c in &coords {
            if !c.is_finite() || c < 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "point coordinate {c} must be finite and non-negative"
                )));
            }
        }
        Ok(Self { coords })
    }

    /// The origin in `n` dimensions.
    pub fn zeros(n: usize) -> Self {
        Self {
            coords: vec![0.0; n],
        }
    }

    pub(crate) fn from_raw(coords: Vec<f64>) -> Self {
        Self { coords }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn l1_norm(&self) -> f64 {
        self.coords.iter().sum()
    }
}

/// The box `[0, u]` with strictly positive, finite upper bounds.
#[derive(Clone, Debug, PartialEq)]
pub struct BoxDomain {
    upper: Vec<f64>,
}

impl BoxDomain {
    pub fn new(upper: Vec<f64>) -> Result<Self> {
        for &u in &upper {
            if !u.is_finite() || u <= 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "box upper bound {u} must be finite and positive"
                )));
            }
        }
        Ok(Self { upper })
    }

    pub fn dim(&self) -> usize {
        self.upper.len()
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }
}

/// A black-box objective: an evaluation function together with the Lipschitz
/// constant of its gradient and an evaluation counter.
///
/// Evaluation is deterministic (identical inputs yield identical outputs) and
/// safe to call concurrently; the counter is atomic. Wrapper objectives built
/// by [`shift_domain`], [`rescale_weights`] and [`contract`] forward to the
/// wrapped objective's `eval`, so the inner counter keeps accumulating.
#[derive(Clone)]
pub struct Objective {
    func: Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>,
    smoothness: f64,
    dimension: usize,
    evals: Arc<AtomicU64>,
}

impl std::fmt::Debug for Objective {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Objective")
            .field("dimension", &self.dimension)
            .field("smoothness", &self.smoothness)
            .field("eval_count", &self.eval_count())
            .finish()
    }
}

impl Objective {
    /// Wraps an evaluation function. `smoothness` is the user-supplied
    /// constant `L ≥ 0`; no automatic differentiation happens anywhere.
    pub fn new<F>(dimension: usize, smoothness: f64, func: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        assert!(
            smoothness.is_finite() && smoothness >= 0.0,
            "smoothness constant must be finite and non-negative"
        );
        Self {
            func: Arc::new(func),
            smoothness,
            dimension,
            evals: Arc::new(AtomicU64::new(0)),
        }
    }

    /// Evaluates the objective, bumping the evaluation counter by one.
    pub fn eval(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.dimension, "objective input dimension");
        self.evals.fetch_add(1, Ordering::Relaxed);
        (self.func)(x)
    }

    pub fn eval_point(&self, x: &Point) -> f64 {
        self.eval(x.coords())
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn smoothness(&self) -> f64 {
        self.smoothness
    }

    /// Total evaluations made through this handle (shared across clones).
    pub fn eval_count(&self) -> u64 {
        self.evals.load(Ordering::Relaxed)
    }

    /// Same function and counter, different declared smoothness constant.
    pub fn with_smoothness(&self, smoothness: f64) -> Objective {
        assert!(
            smoothness.is_finite() && smoothness >= 0.0,
            "smoothness constant must be finite and non-negative"
        );
        Objective {
            func: Arc::clone(&self.func),
            smoothness,
            dimension: self.dimension,
            evals: Arc::clone(&self.evals),
        }
    }
}

/// An objective over a box together with the ℓ1 budget.
///
/// Construction clamps every `u_i` to `min(u_i, B)`; monotone objectives are
/// unaffected on the feasible region.
#[derive(Clone, Debug)]
pub struct ProblemInstance {
    objective: Objective,
    domain: BoxDomain,
    budget: f64,
}

impl ProblemInstance {
    pub fn new(objective: Objective, domain: BoxDomain, budget: f64) -> Result<Self> {
        if !budget.is_finite() || budget <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "budget {budget} must be finite and positive"
            )));
        }
        if objective.dimension() != domain.dim() {
            return Err(Error::DimensionMismatch {
                expected: objective.dimension(),
                got: domain.dim(),
            });
        }
        let clamped: Vec<f64> = domain.upper().iter().map(|&u| u.min(budget)).collect();
        Ok(Self {
            objective,
            domain: BoxDomain::new(clamped)?,
            budget,
        })
    }

    pub fn objective(&self) -> &Objective {
        &self.objective
    }

    pub fn domain(&self) -> &BoxDomain {
        &self.domain
    }

    pub fn budget(&self) -> f64 {
        self.budget
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }
}

/// One step of a traced solver run.
#[derive(Clone, Debug)]
pub struct TraceEntry {
    pub iteration: usize,
    pub point: Point,
    pub value: f64,
}

/// Output of a solver run.
#[derive(Clone, Debug)]
pub struct SolveResult {
    pub point: Point,
    pub value: f64,
    pub main_iterations: usize,
    pub evaluations: u64,
    pub trace: Option<Vec<TraceEntry>>,
}

/// True iff `0 ≤ x_i ≤ u_i` for all `i` and `‖x‖₁ ≤ B`, all comparisons with
/// tolerance `1e-9·max(1, B)`.
pub fn feasible(instance: &ProblemInstance, x: &Point) -> Result<bool> {
    if x.dim() != instance.dim() {
        return Err(Error::DimensionMismatch {
            expected: instance.dim(),
            got: x.dim(),
        });
    }
    let tol = feasibility_tol(instance.budget());
    let in_box = x
        .coords()
        .iter()
        .zip(instance.domain().upper())
        .all(|(&xi, &ui)| xi >= -tol && xi <= ui + tol);
    Ok(in_box && x.l1_norm() <= instance.budget() + tol)
}

/// Translates the domain: returns `G` with `G(x) = F(x + a)` and the same
/// smoothness constant.
pub fn shift_domain(f: &Objective, a: &[f64]) -> Result<Objective> {
    if a.len() != f.dimension() {
        return Err(Error::DimensionMismatch {
            expected: f.dimension(),
            got: a.len(),
        });
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument(
            "shift vector must be finite".into(),
        ));
    }
    let base = f.clone();
    let shift = a.to_vec();
    Ok(Objective::new(f.dimension(), f.smoothness(), move |x| {
        let shifted: Vec<f64> = x.iter().zip(&shift).map(|(xi, ai)| xi + ai).collect();
        base.eval(&shifted)
    }))
}

/// Absorbs positive constraint weights into the variables: the instance is
/// over `y_i = w_i x_i` with upper bounds `w_i u_i`, objective
/// `G(y) = F(y₁/w₁, …, yₙ/wₙ)` and smoothness `L / W²` for `W = min_i w_i`.
pub fn rescale_weights(
    f: &Objective,
    w: &[f64],
    u: &[f64],
    budget: f64,
) -> Result<ProblemInstance> {
    let n = f.dimension();
    if w.len() != n || u.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: if w.len() != n { w.len() } else { u.len() },
        });
    }
    for &wi in w {
        if !wi.is_finite() || wi <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "constraint weight {wi} must be finite and positive"
            )));
        }
    }
    let wmin = w.iter().cloned().fold(f64::INFINITY, f64::min);
    let smoothness = f.smoothness() / (wmin * wmin);
    let base = f.clone();
    let weights = w.to_vec();
    let g = Objective::new(n, smoothness, move |y| {
        let x: Vec<f64> = y.iter().zip(&weights).map(|(yi, wi)| yi / wi).collect();
        base.eval(&x)
    });
    let upper: Vec<f64> = w.iter().zip(u).map(|(wi, ui)| wi * ui).collect();
    ProblemInstance::new(g, BoxDomain::new(upper)?, budget)
}

/// Fixes the removed coordinates at `base` and returns the residual objective
/// `F′(x′) = F(embed(x′) + base) − F(base)` over the remaining coordinates.
///
/// `base` may be non-zero only on removed coordinates; the smoothness constant
/// carries over unchanged.
pub fn contract(f: &Objective, base: &Point, removed: &[usize]) -> Result<Objective> {
    let n = f.dimension();
    if base.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: base.dim(),
        });
    }
    let mut removed_mask = vec![false; n];
    for &i in removed {
        if i >= n {
            return Err(Error::InvalidArgument(format!(
                "removed coordinate {i} out of range for dimension {n}"
            )));
        }
        removed_mask[i] = true;
    }
    for (i, &xi) in base.coords().iter().enumerate() {
        if !removed_mask[i] && xi != 0.0 {
            return Err(Error::InvalidArgument(format!(
                "base point has non-zero entry {xi} on kept coordinate {i}"
            )));
        }
    }
    let kept: Vec<usize> = (0..n).filter(|&i| !removed_mask[i]).collect();
    let f_base = f.eval(base.coords());
    let inner = f.clone();
    let base_coords = base.coords().to_vec();
    Ok(Objective::new(
        kept.len(),
        f.smoothness(),
        move |xp: &[f64]| {
            let mut full = base_coords.clone();
            for (k, &i) in kept.iter().enumerate() {
                full[i] = xp[k];
            }
            inner.eval(&full) - f_base
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn linear2() -> Objective {
        Objective::new(2, 0.0, |x: &[f64]| x[0] + x[1])
    }

    fn quad2() -> Objective {
        // x1 + x2 - 0.5 x1 x2
        Objective::new(2, 0.5, |x: &[f64]| x[0] + x[1] - 0.5 * x[0] * x[1])
    }

    fn instance2() -> ProblemInstance {
        ProblemInstance::new(quad2(), BoxDomain::new(vec![1.0, 1.0]).unwrap(), 1.0).unwrap()
    }

    #[test]
    fn origin_is_feasible() {
        let inst = instance2();
        assert!(feasible(&inst, &Point::zeros(2)).unwrap());
    }

    #[test]
    fn budget_violation_is_infeasible() {
        let inst = instance2();
        let x = Point::new(vec![0.6, 0.6]).unwrap();
        assert!(!feasible(&inst, &x).unwrap());
    }

    #[test]
    fn budget_boundary_is_feasible() {
        let inst = instance2();
        let x = Point::new(vec![1.0, 0.0]).unwrap();
        assert!(feasible(&inst, &x).unwrap());
    }

    #[test]
    fn feasible_rejects_dimension_mismatch() {
        let inst = instance2();
        assert!(feasible(&inst, &Point::zeros(3)).is_err());
    }

    #[test]
    fn instance_clamps_upper_bounds_to_budget() {
        let inst =
            ProblemInstance::new(linear2(), BoxDomain::new(vec![3.0, 0.5]).unwrap(), 1.0).unwrap();
        assert_eq!(inst.domain().upper(), &[1.0, 0.5]);
    }

    #[test]
    fn shift_by_zero_is_identity() {
        let f = quad2();
        let g = shift_domain(&f, &[0.0, 0.0]).unwrap();
        for x in [[0.0, 0.0], [0.3, 0.7], [1.0, 1.0]] {
            assert_eq!(g.eval(&x), f.eval(&x));
        }
    }

    #[test]
    fn shift_linear_example() {
        let f = Objective::new(1, 0.0, |x: &[f64]| x[0]);
        let g = shift_domain(&f, &[1.0]).unwrap();
        assert_eq!(g.eval(&[0.5]), 1.5);
    }

    #[test]
    fn shift_matches_direct_reevaluation_exactly() {
        let f = quad2();
        let a = [0.21, 0.47];
        let g = shift_domain(&f, &a).unwrap();
        let mut state = 0x9e3779b97f4a7c15u64;
        for _ in 0..100 {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
            let x0 = (state >> 11) as f64 / (1u64 << 53) as f64;
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
            let x1 = (state >> 11) as f64 / (1u64 << 53) as f64;
            let shifted = [x0 + a[0], x1 + a[1]];
            assert_eq!(g.eval(&[x0, x1]), f.eval(&shifted));
        }
    }

    #[test]
    fn rescale_identity_weights() {
        let f = linear2();
        let inst = rescale_weights(&f, &[1.0, 1.0], &[1.0, 1.0], 1.0).unwrap();
        assert_eq!(inst.domain().upper(), &[1.0, 1.0]);
        assert_eq!(inst.objective().eval(&[0.3, 0.4]), 0.7);
        assert_eq!(inst.objective().smoothness(), 0.0);
    }

    #[test]
    fn rescale_linear_example() {
        let f = linear2();
        let inst = rescale_weights(&f, &[2.0, 1.0], &[1.0, 1.0], 2.0).unwrap();
        // G(y) = y1/2 + y2
        assert_eq!(inst.objective().eval(&[1.0, 0.0]), 0.5);
        assert_eq!(inst.domain().upper(), &[2.0, 1.0]);
    }

    #[test]
    fn rescale_rejects_nonpositive_weight() {
        let f = linear2();
        assert!(rescale_weights(&f, &[0.0, 1.0], &[1.0, 1.0], 1.0).is_err());
    }

    #[test]
    fn rescale_feasible_set_equivalence() {
        // y feasible in the rescaled instance iff sum w_i x_i <= B for x = y / w.
        let f = quad2();
        let w = [2.0, 0.5];
        let budget = 1.0;
        let inst = rescale_weights(&f, &w, &[0.4, 1.5], budget).unwrap();
        let mut state = 12345u64;
        let mut rand01 = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..100 {
            let y: Vec<f64> = inst.domain().upper().iter().map(|&u| rand01() * u).collect();
            let p = Point::new(y.clone()).unwrap();
            if feasible(&inst, &p).unwrap() {
                let weighted: f64 = y.iter().zip(&w).map(|(yi, _wi)| yi).sum();
                assert!(weighted <= budget + feasibility_tol(budget));
            }
        }
    }

    #[test]
    fn contract_vanishes_at_origin() {
        let f = quad2();
        let base = Point::new(vec![1.0, 0.0]).unwrap();
        let fp = contract(&f, &base, &[0]).unwrap();
        assert_eq!(fp.eval(&[0.0]), 0.0);
    }

    #[test]
    fn contract_quadratic_example() {
        let f = quad2();
        let base = Point::new(vec![1.0, 0.0]).unwrap();
        let fp = contract(&f, &base, &[0]).unwrap();
        // F'((t)) = t - 0.5 t over the second coordinate.
        assert!((fp.eval(&[1.0]) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn contract_rejects_bad_base_and_indices() {
        let f = quad2();
        let base = Point::new(vec![0.0, 0.3]).unwrap();
        assert!(contract(&f, &base, &[0]).is_err());
        assert!(contract(&f, &Point::zeros(2), &[5]).is_err());
    }

    #[test]
    fn contract_composes_exactly() {
        let f = Objective::new(3, 1.0, |x: &[f64]| {
            x[0] + 2.0 * x[1] + x[2] - 0.3 * x[0] * x[1] - 0.2 * x[1] * x[2]
        });
        let b1 = Point::new(vec![0.7, 0.0, 0.0]).unwrap();
        let f1 = contract(&f, &b1, &[0]).unwrap();
        // In f1's coordinate space (original coords 1, 2), fix coord 1 at 0.4.
        let b2 = Point::new(vec![0.4, 0.0]).unwrap();
        let f12 = contract(&f1, &b2, &[0]).unwrap();
        let bc = Point::new(vec![0.7, 0.4, 0.0]).unwrap();
        let fc = contract(&f, &bc, &[0, 1]).unwrap();
        for t in [0.0, 0.1, 0.5, 0.9] {
            assert_eq!(f12.eval(&[t]), fc.eval(&[t]));
        }
    }

    #[test]
    fn eval_count_increments_once_per_call() {
        let f = quad2();
        assert_eq!(f.eval_count(), 0);
        f.eval(&[0.1, 0.2]);
        f.eval(&[0.1, 0.2]);
        assert_eq!(f.eval_count(), 2);
        // Clones share the counter.
        let g = f.clone();
        g.eval(&[0.0, 0.0]);
        assert_eq!(f.eval_count(), 3);
    }

    #[test]
    fn wrapper_forwards_evaluations_to_inner_counter() {
        let f = quad2();
        let g = shift_domain(&f, &[0.1, 0.1]).unwrap();
        g.eval(&[0.0, 0.0]);
        assert_eq!(f.eval_count(), 1);
        assert_eq!(g.eval_count(), 1);
    }
}
