//! Brute-force references for testing: exhaustive grid search for the
//! optimum, dense one-dimensional scans, and an instrumented verifier for the
//! coordinate-ascent progress guarantee.
//!
//! The grid search returns a lower bound on the true optimum; the acceptance
//! checks only use it on the right-hand side of `≥` inequalities, which makes
//! them valid (slightly lenient) tests.

use rayon::prelude::*;

use crate::problem::{feasibility_tol, BoxDomain, Objective, Point, ProblemInstance};
use crate::solvers::{coordinate_ascent, CaConfig};
use crate::{Error, Result};

/// Maximum number of lattice points a single grid search may enumerate.
pub const GRID_POINT_CAP: u128 = 100_000_000;

/// Result of an exhaustive lattice search.
#[derive(Clone, Debug)]
pub struct GridSearchResult {
    pub best_point: Point,
    pub best_value: f64,
    pub resolution: f64,
    pub points_evaluated: u64,
}

fn lex_less(a: &[f64], b: &[f64]) -> bool {
    for (x, y) in a.iter().zip(b) {
        if x < y {
            return true;
        }
        if x > y {
            return false;
        }
    }
    false
}

/// Exhaustively evaluates the lattice `{0, res, 2·res, …}ⁿ ∩ [0, u]`
/// restricted to the budget, plus the budget-projected boundary points (each
/// feasible lattice point with one coordinate raised to exhaust the budget,
/// clamped to the box). Optima of monotone objectives sit on the budget line
/// or the box boundary, so pure lattices systematically undershoot.
pub fn grid_optimum(instance: &ProblemInstance, resolution: f64) -> Result<GridSearchResult> {
    if !(resolution.is_finite() && resolution > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "resolution {resolution} must be positive"
        )));
    }
    let f = instance.objective();
    let upper = instance.domain().upper();
    let budget = instance.budget();
    let tol = feasibility_tol(budget);
    let n = instance.dim();

    let mut required: u128 = 1;
    let mut counts = Vec::with_capacity(n);
    for &u in upper {
        let count = (u / resolution).ceil() as u128 + 1;
        required = required.saturating_mul(count);
        if required > GRID_POINT_CAP {
            return Err(Error::GridCapExceeded {
                required,
                cap: GRID_POINT_CAP,
            });
        }
        // Lattice points actually inside [0, u].
        counts.push((u / resolution).floor() as u64 + 1);
    }
    let total: u64 = counts.iter().product();

    struct Best {
        point: Vec<f64>,
        value: f64,
        evaluated: u64,
    }
    let fold = |acc: Option<Best>, cand: Best| -> Option<Best> {
        match acc {
            None => Some(cand),
            Some(best) => {
                let replace = cand.value > best.value
                    || (cand.value == best.value && lex_less(&cand.point, &best.point));
                let evaluated = best.evaluated + cand.evaluated;
                let mut keep = if replace { cand } else { best };
                keep.evaluated = evaluated;
                Some(keep)
            }
        }
    };

    let best = (0..total)
        .into_par_iter()
        .fold(
            || None,
            |acc: Option<Best>, idx: u64| {
                let mut point = vec![0.0f64; n];
                let mut rest = idx;
                for j in (0..n).rev() {
                    let k = rest % counts[j];
                    rest /= counts[j];
                    point[j] = (k as f64 * resolution).min(upper[j]);
                }
                let l1: f64 = point.iter().sum();
                if l1 > budget + tol {
                    return acc;
                }
                let mut local = Best {
                    value: f.eval(&point),
                    point: point.clone(),
                    evaluated: 1,
                };
                let slack = budget - l1;
                if slack > 0.0 {
                    for j in 0..n {
                        let raised = (point[j] + slack).min(upper[j]);
                        if raised > point[j] {
                            let mut proj = point.clone();
                            proj[j] = raised;
                            let cand = Best {
                                value: f.eval(&proj),
                                point: proj,
                                evaluated: 1,
                            };
                            local = fold(Some(local), cand).unwrap();
                        }
                    }
                }
                fold(acc, local)
            },
        )
        .reduce(
            || None,
            |a, b| match (a, b) {
                (None, x) | (x, None) => x,
                (Some(a), Some(b)) => fold(Some(a), b),
            },
        )
        .ok_or_else(|| Error::InvalidArgument("empty search lattice".into()))?;

    Ok(GridSearchResult {
        best_point: Point::from_raw(best.point),
        best_value: best.value,
        resolution,
        points_evaluated: best.evaluated,
    })
}

/// Dense scan reference for the one-dimensional ratio maximizer.
pub fn dense_ratio_oracle(
    f: &Objective,
    x: &[f64],
    i: usize,
    a: f64,
    b: f64,
    resolution: f64,
) -> Result<(f64, f64)> {
    if !(a > 0.0 && a <= b) {
        return Err(Error::InvalidArgument(format!(
            "bounds must satisfy 0 < a <= b, got a = {a}, b = {b}"
        )));
    }
    if !(resolution > 0.0) {
        return Err(Error::InvalidArgument("resolution must be positive".into()));
    }
    let mut probe = x.to_vec();
    let mut best_y = f64::NAN;
    let mut best_ratio = f64::NEG_INFINITY;
    let mut consider = |y: f64, probe: &mut Vec<f64>| {
        probe[i] = x[i] + y;
        let ratio = f.eval(probe) / y;
        if ratio >= best_ratio {
            best_ratio = ratio;
            best_y = y;
        }
    };
    let mut k = 0u64;
    loop {
        let y = a + k as f64 * resolution;
        if y > b {
            break;
        }
        consider(y, &mut probe);
        k += 1;
    }
    consider(b, &mut probe);
    Ok((best_y, best_ratio))
}

/// Dense scan reference for the target-value finder: the smallest lattice `y`
/// with `F(x + y·e_i) ≥ v`, or `None` if the target is unreachable.
pub fn dense_target_oracle(
    f: &Objective,
    domain: &BoxDomain,
    x: &[f64],
    i: usize,
    v: f64,
    resolution: f64,
) -> Result<Option<f64>> {
    if !(resolution > 0.0) {
        return Err(Error::InvalidArgument("resolution must be positive".into()));
    }
    let width = (domain.upper()[i] - x[i]).max(0.0);
    let mut probe = x.to_vec();
    let section = |y: f64, probe: &mut Vec<f64>| {
        probe[i] = x[i] + y;
        f.eval(probe)
    };
    let mut k = 0u64;
    loop {
        let y = k as f64 * resolution;
        if y > width {
            break;
        }
        if section(y, &mut probe) >= v {
            return Ok(Some(y));
        }
        k += 1;
    }
    if section(width, &mut probe) >= v {
        return Ok(Some(width));
    }
    Ok(None)
}

/// Outcome of the instrumented progress check.
#[derive(Clone, Debug)]
pub struct ConditionedReport {
    /// Length of the leading run of good iterations with respect to `y_ref`.
    pub good_prefix: usize,
    /// Number of prefix states the bound was checked at (`good_prefix + 1`).
    pub checked: usize,
    /// `(h, lhs, rhs)` for every violated bound instance.
    pub violations: Vec<(usize, f64, f64)>,
    /// Smallest observed slack `lhs − rhs` over the checked states.
    pub min_slack: f64,
}

/// Re-runs coordinate ascent with tracing and verifies the conditioned
/// progress bound
/// `F(x⁽ʰ⁾) ≥ (1 − e^{−‖x⁽ʰ⁾‖₁/(‖y‖₁ + εB)})·F(y) − ‖x⁽ʰ⁾‖₁·ε·L`
/// at every state of the good-iteration prefix with respect to `y_ref`.
///
/// An iteration is good when, at its start, every active coordinate could
/// still be raised to `y_ref`'s level without violating feasibility.
pub fn verify_conditioned_guarantee(
    instance: &ProblemInstance,
    cfg: &CaConfig,
    y_ref: &Point,
) -> Result<ConditionedReport> {
    if y_ref.dim() != instance.dim() {
        return Err(Error::DimensionMismatch {
            expected: instance.dim(),
            got: y_ref.dim(),
        });
    }
    let f = instance.objective();
    let upper = instance.domain().upper();
    let budget = instance.budget();
    let tol = feasibility_tol(budget);
    let eps = cfg.eps;

    let traced = coordinate_ascent(instance, &cfg.with_trace(true))?;
    let trace = traced.trace.as_ref().expect("trace requested");

    let f_ref = f.eval(y_ref.coords());
    let denom = y_ref.l1_norm() + eps * budget;
    let smoothness = f.smoothness();

    // Good-iteration prefix: iteration h is good when y_i - x_i <= d'_i for
    // every active i at the state x^(h-1).
    let mut good_prefix = 0usize;
    for h in 1..trace.len() {
        let x = trace[h - 1].point.coords();
        let l1: f64 = x.iter().sum();
        let good = (0..x.len()).all(|i| {
            if x[i] >= upper[i] - tol {
                return true;
            }
            let d_max = (upper[i] - x[i]).min(budget - l1);
            y_ref.coords()[i] - x[i] <= d_max + tol
        });
        if !good {
            break;
        }
        good_prefix = h;
    }

    let check_tol = 1e-9 * f_ref.abs().max(1.0);
    let mut violations = Vec::new();
    let mut min_slack = f64::INFINITY;
    for entry in trace.iter().take(good_prefix + 1) {
        let l1 = entry.point.l1_norm();
        let rhs = if denom > 0.0 {
            (1.0 - (-l1 / denom).exp()) * f_ref - l1 * eps * smoothness
        } else {
            -l1 * eps * smoothness
        };
        let slack = entry.value - rhs;
        min_slack = min_slack.min(slack);
        if slack < -check_tol {
            violations.push((entry.iteration, entry.value, rhs));
        }
    }
    Ok(ConditionedReport {
        good_prefix,
        checked: good_prefix + 1,
        violations,
        min_slack,
    })
}
