//! One-dimensional subroutines: the grid-based ratio maximizer and the
//! bisection-based target-value finder.
//!
//! Both are derivative-free and come with additive `ε·L` error guarantees,
//! where `L` is the declared smoothness constant of the objective.

use crate::problem::{BoxDomain, Objective};
use crate::{Error, Result};

/// The finite candidate set the ratio maximizer evaluates.
///
/// Candidate step sizes follow the recurrence `z₀ = a`,
/// `zᵢ = zᵢ₋₁ + √(ε·zᵢ₋₁)`, truncated at the first value above `b`, with `b`
/// itself appended. The spacing law `(q − p)² / (2p) ≤ ε` for consecutive
/// interior points bounds the ratio loss of restricting the search to the
/// grid by `ε·L`.
#[derive(Clone, Debug)]
pub struct RatioGrid {
    points: Vec<f64>,
    a: f64,
    b: f64,
    eps: f64,
}

impl RatioGrid {
    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn lower(&self) -> f64 {
        self.a
    }

    pub fn upper(&self) -> f64 {
        self.b
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Size bound `⌈log₂(ε/a)⌉₊ + ⌈4√(B/ε)⌉ + 3` for the budget `B` the grid
    /// was built with.
    pub fn size_bound(a: f64, eps: f64, budget: f64) -> usize {
        let log_term = (eps / a).log2().ceil().max(0.0) as usize;
        let sqrt_term = (4.0 * (budget / eps).sqrt()).ceil() as usize;
        log_term + sqrt_term + 3
    }
}

/// Builds the candidate grid `M` over `[a, b]`.
pub fn build_ratio_grid(a: f64, b: f64, eps: f64, budget: f64) -> Result<RatioGrid> {
    if !(a.is_finite() && b.is_finite() && a > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "grid lower bound {a} must be finite and positive"
        )));
    }
    if a > b {
        return Err(Error::InvalidArgument(format!(
            "grid bounds must satisfy a <= b, got a = {a}, b = {b}"
        )));
    }
    if b > budget {
        return Err(Error::InvalidArgument(format!(
            "grid upper bound {b} exceeds budget {budget}"
        )));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "accuracy parameter {eps} must lie in (0, 1)"
        )));
    }
    let mut points = Vec::new();
    let mut z = a;
    while z <= b {
        points.push(z);
        z += (eps * z).sqrt();
    }
    if points.last() != Some(&b) {
        points.push(b);
    }
    Ok(RatioGrid { points, a, b, eps })
}

/// Approximately maximizes the ratio `F(x + y·e_i) / y` over `y ∈ [a, b]`.
///
/// Returns `(y, ratio)` with `y` from the candidate grid and the ratio within
/// an additive `ε·L` of the continuous maximum. Ties in the grid argmax break
/// toward the largest `y`. Makes at most `|M|` evaluations.
pub fn maximize_ratio(
    f: &Objective,
    x: &[f64],
    i: usize,
    a: f64,
    b: f64,
    eps: f64,
) -> Result<(f64, f64)> {
    if x.len() != f.dimension() {
        return Err(Error::DimensionMismatch {
            expected: f.dimension(),
            got: x.len(),
        });
    }
    if i >= f.dimension() {
        return Err(Error::InvalidArgument(format!(
            "coordinate {i} out of range for dimension {}",
            f.dimension()
        )));
    }
    let grid = build_ratio_grid(a, b, eps, b)?;
    let mut probe = x.to_vec();
    let mut best_y = f64::NAN;
    let mut best_ratio = f64::NEG_INFINITY;
    for &y in grid.points() {
        probe[i] = x[i] + y;
        let ratio = f.eval(&probe) / y;
        if ratio >= best_ratio {
            best_ratio = ratio;
            best_y = y;
        }
    }
    Ok((best_y, best_ratio))
}

/// Diagnostics of a target-value search; the bracket and interpolation slope
/// are exposed so that tests can verify the derivative-bound invariant.
#[derive(Clone, Debug)]
pub struct TargetSearch {
    /// The returned step `y`.
    pub y: f64,
    /// The final bisection bracket `[a₀, b₀]`.
    pub bracket: (f64, f64),
    /// The interpolation slope `d` (section slope plus `ε·L/2`).
    pub slope: f64,
    /// Objective evaluations performed by this call.
    pub evaluations: u64,
}

/// Finds the (approximately) smallest step `y` along coordinate `i` whose
/// value reaches the target `v`.
///
/// Guarantees `F(x + y·e_i) ≥ v − ε·L` and that no `y′ < y` has
/// `F(x + y′·e_i) ≥ v`. Uses at most `⌈log₂(B/ε)⌉ + 3` evaluations.
pub fn find_target_value(
    f: &Objective,
    domain: &BoxDomain,
    x: &[f64],
    i: usize,
    v: f64,
    eps: f64,
) -> Result<f64> {
    find_target_value_detailed(f, domain, x, i, v, eps).map(|t| t.y)
}

/// [`find_target_value`] with search diagnostics.
pub fn find_target_value_detailed(
    f: &Objective,
    domain: &BoxDomain,
    x: &[f64],
    i: usize,
    v: f64,
    eps: f64,
) -> Result<TargetSearch> {
    if x.len() != f.dimension() || domain.dim() != f.dimension() {
        return Err(Error::DimensionMismatch {
            expected: f.dimension(),
            got: x.len(),
        });
    }
    if i >= f.dimension() {
        return Err(Error::InvalidArgument(format!(
            "coordinate {i} out of range for dimension {}",
            f.dimension()
        )));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "accuracy parameter {eps} must lie in (0, 1)"
        )));
    }
    let width = (domain.upper()[i] - x[i]).max(0.0);
    let mut evals = 0u64;
    let mut probe = x.to_vec();
    let mut section = |y: f64, evals: &mut u64| {
        probe[i] = x[i] + y;
        *evals += 1;
        f.eval(&probe)
    };

    let lo_val = section(0.0, &mut evals);
    let hi_val = section(width, &mut evals);
    let tol = 1e-9 * lo_val.abs().max(hi_val.abs()).max(1.0);
    if v < lo_val - tol || v > hi_val + tol {
        return Err(Error::TargetOutOfRange {
            v,
            lo: lo_val,
            hi: hi_val,
        });
    }
    // Guess-set endpoints sit exactly on the boundary; rounding must not
    // push the interpolation target outside the reachable range.
    let v = v.clamp(lo_val, hi_val.max(lo_val));

    if width <= 0.0 {
        return Ok(TargetSearch {
            y: 0.0,
            bracket: (0.0, 0.0),
            slope: 0.0,
            evaluations: evals,
        });
    }

    let (mut a, mut b) = (0.0f64, width);
    let (mut a_val, mut b_val) = (lo_val, hi_val);
    while b - a >= eps {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = section(m, &mut evals);
        if fm >= v {
            b = m;
            b_val = fm;
        } else {
            a = m;
            a_val = fm;
        }
    }

    let slope = (b_val - a_val) / (b - a) + 0.5 * eps * f.smoothness();
    if slope <= 0.0 {
        // Flat section with L = 0: v equals the value at a and r = 0 is exact.
        return Ok(TargetSearch {
            y: a,
            bracket: (a, b),
            slope,
            evaluations: evals,
        });
    }
    let r = ((v - a_val) / slope).clamp(0.0, b - a);
    Ok(TargetSearch {
        y: a + r,
        bracket: (a, b),
        slope,
        evaluations: evals,
    })
}
