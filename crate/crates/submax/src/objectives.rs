//! Test objective families with known smoothness constants, plus empirical
//! checkers for submodularity, monotonicity and the diminishing-returns
//! property.
//!
//! Continuous submodularity is strictly weaker than diminishing returns; a
//! quadratic with non-positive off-diagonal entries but a positive diagonal
//! is submodular yet fails the DR check, which is exactly the class the
//! solvers are designed to handle.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::problem::{BoxDomain, Objective};
use crate::{Error, Result};

/// `F(x) = cᵀx + ½·xᵀQx` with `c ≥ 0`, `Q` symmetric and all off-diagonal
/// entries non-positive. The diagonal is unrestricted in sign, so instances
/// of this family need not satisfy diminishing returns.
#[derive(Clone, Debug)]
pub struct QuadraticSpec {
    pub c: Vec<f64>,
    pub q: Vec<Vec<f64>>,
}

/// `F(x) = g(wᵀx)` for a concave, nondecreasing `g` with `g(0) = 0` and
/// non-negative weights; monotone, non-negative and DR-submodular.
#[derive(Clone, Debug)]
pub struct ConcaveLinearSpec {
    pub w: Vec<f64>,
    pub kind: ConcaveKind,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConcaveKind {
    /// `g(t) = 1 − e^{−t}`, `max |g″| = 1`.
    OneMinusExp,
    /// `g(t) = √(t + 1) − 1`, `max |g″| = 1/4`.
    SqrtShift,
}

/// Outcome of an empirical property check.
#[derive(Clone, Debug)]
pub struct PropertyReport {
    pub trials: u64,
    pub violations: u64,
    pub worst_violation: f64,
    /// Violating input pairs, capped at 10, in trial order.
    pub witnesses: Vec<(Vec<f64>, Vec<f64>)>,
}

impl PropertyReport {
    pub fn clean(&self) -> bool {
        self.violations == 0
    }
}

const WITNESS_CAP: usize = 10;

/// Spectral norm of a symmetric matrix by power iteration on `Q²`, to
/// relative tolerance 1e-8.
fn spectral_norm(q: &[Vec<f64>]) -> f64 {
    let n = q.len();
    if n == 0 || q.iter().all(|row| row.iter().all(|&v| v == 0.0)) {
        return 0.0;
    }
    let matvec = |v: &[f64]| -> Vec<f64> {
        (0..n)
            .map(|i| q[i].iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    };
    // Deterministic start with incommensurate entries so a kernel hit is not
    // possible for the small matrices this is used on.
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * (i as f64 + 1.0).sqrt()).collect();
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nv = norm(&v);
    v.iter_mut().for_each(|x| *x /= nv);
    let mut lambda_sq = 0.0f64;
    for _ in 0..10_000 {
        let w = matvec(&matvec(&v));
        let next = v.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>();
        let wn = norm(&w);
        if wn == 0.0 {
            return 0.0;
        }
        v = w.iter().map(|x| x / wn).collect();
        if (next - lambda_sq).abs() <= 1e-8 * next.abs().max(1e-300) {
            lambda_sq = next;
            break;
        }
        lambda_sq = next;
    }
    lambda_sq.max(0.0).sqrt()
}

/// Builds the quadratic objective, validating the submodularity and
/// monotonicity certificates. `L` is the spectral norm of `Q`.
pub fn make_submodular_quadratic(spec: &QuadraticSpec, u: &[f64]) -> Result<Objective> {
    let n = spec.c.len();
    if spec.q.len() != n || spec.q.iter().any(|row| row.len() != n) || u.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: spec.q.len().max(u.len()),
        });
    }
    for (i, &ci) in spec.c.iter().enumerate() {
        if !ci.is_finite() || ci < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "linear coefficient c[{i}] = {ci} must be non-negative"
            )));
        }
    }
    for i in 0..n {
        for j in 0..n {
            if (spec.q[i][j] - spec.q[j][i]).abs() > 1e-12 {
                return Err(Error::InvalidArgument(format!(
                    "Q must be symmetric, entries ({i},{j}) differ"
                )));
            }
            if i != j && spec.q[i][j] > 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "off-diagonal entry Q[{i}][{j}] = {} must be non-positive",
                    spec.q[i][j]
                )));
            }
        }
    }
    // Conservative monotonicity certificate: the gradient c + Qx stays
    // non-negative on [0, u] if c_i plus the worst-case negative part does.
    for i in 0..n {
        let worst: f64 = (0..n).map(|j| (spec.q[i][j] * u[j]).min(0.0)).sum();
        if spec.c[i] + worst < -1e-12 {
            return Err(Error::InvalidArgument(format!(
                "monotonicity certificate fails at coordinate {i}: c_i + sum_j min(Q_ij u_j, 0) = {}",
                spec.c[i] + worst
            )));
        }
    }
    let smoothness = spectral_norm(&spec.q);
    let c = spec.c.clone();
    let q = spec.q.clone();
    Ok(Objective::new(n, smoothness, move |x: &[f64]| {
        let mut value = 0.0;
        for i in 0..x.len() {
            value += c[i] * x[i];
            let mut qx = 0.0;
            for j in 0..x.len() {
                qx += q[i][j] * x[j];
            }
            value += 0.5 * x[i] * qx;
        }
        value
    }))
}

/// Builds the concave-of-linear objective with `L = max|g″|·‖w‖²`.
pub fn make_concave_linear(spec: &ConcaveLinearSpec, u: &[f64]) -> Result<Objective> {
    let n = spec.w.len();
    if u.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: u.len(),
        });
    }
    for (i, &wi) in spec.w.iter().enumerate() {
        if !wi.is_finite() || wi < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "weight w[{i}] = {wi} must be non-negative"
            )));
        }
    }
    let w_sq: f64 = spec.w.iter().map(|wi| wi * wi).sum();
    let (curvature, g): (f64, fn(f64) -> f64) = match spec.kind {
        ConcaveKind::OneMinusExp => (1.0, |t| 1.0 - (-t).exp()),
        ConcaveKind::SqrtShift => (0.25, |t| (t + 1.0).sqrt() - 1.0),
    };
    let w = spec.w.clone();
    Ok(Objective::new(n, curvature * w_sq, move |x: &[f64]| {
        g(x.iter().zip(&w).map(|(xi, wi)| xi * wi).sum())
    }))
}

fn sample_in_box(rng: &mut ChaCha8Rng, upper: &[f64]) -> Vec<f64> {
    upper.iter().map(|&u| rng.gen_range(0.0..=u)).collect()
}

fn run_check<S>(trials: u64, mut sampler: S) -> Result<PropertyReport>
where
    S: FnMut() -> (Vec<f64>, Vec<f64>, f64),
{
    if trials < 1 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    let mut report = PropertyReport {
        trials,
        violations: 0,
        worst_violation: 0.0,
        witnesses: Vec::new(),
    };
    for _ in 0..trials {
        let (x, y, violation) = sampler();
        if violation > 0.0 {
            report.violations += 1;
            report.worst_violation = report.worst_violation.max(violation);
            if report.witnesses.len() < WITNESS_CAP {
                report.witnesses.push((x, y));
            }
        }
    }
    Ok(report)
}

/// Samples point pairs and checks `F(x) + F(y) ≥ F(x∨y) + F(x∧y)` with
/// relative tolerance 1e-9.
pub fn check_submodular(
    f: &Objective,
    domain: &BoxDomain,
    trials: u64,
    seed: u64,
) -> Result<PropertyReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let upper = domain.upper().to_vec();
    run_check(trials, move || {
        let x = sample_in_box(&mut rng, &upper);
        let y = sample_in_box(&mut rng, &upper);
        let join: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a.max(*b)).collect();
        let meet: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a.min(*b)).collect();
        let fx = f.eval(&x);
        let fy = f.eval(&y);
        let lhs = fx + fy;
        let rhs = f.eval(&join) + f.eval(&meet);
        let tol = 1e-9 * (fx.abs() + fy.abs()).max(1.0);
        let violation = if lhs < rhs - tol { rhs - lhs } else { 0.0 };
        (x, y, violation)
    })
}

/// Samples ordered pairs `(x, x∨y)` and checks `F(x) ≤ F(x∨y)`.
pub fn check_monotone(
    f: &Objective,
    domain: &BoxDomain,
    trials: u64,
    seed: u64,
) -> Result<PropertyReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let upper = domain.upper().to_vec();
    run_check(trials, move || {
        let x = sample_in_box(&mut rng, &upper);
        let y = sample_in_box(&mut rng, &upper);
        let join: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a.max(*b)).collect();
        let fx = f.eval(&x);
        let fj = f.eval(&join);
        let tol = 1e-9 * (fx.abs() + fj.abs()).max(1.0);
        let violation = if fx > fj + tol { fx - fj } else { 0.0 };
        (x, join, violation)
    })
}

/// Samples `x ≤ y`, a coordinate and a step, and checks the diminishing
/// returns inequality `F(z·e_i + x) − F(x) ≥ F(z·e_i + y) − F(y)`.
pub fn check_dr(
    f: &Objective,
    domain: &BoxDomain,
    trials: u64,
    seed: u64,
) -> Result<PropertyReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let upper = domain.upper().to_vec();
    let n = upper.len();
    run_check(trials, move || {
        let y = sample_in_box(&mut rng, &upper);
        let x: Vec<f64> = y.iter().map(|&yi| rng.gen_range(0.0..=yi)).collect();
        let i = rng.gen_range(0..n);
        let z = rng.gen_range(0.0..=(upper[i] - y[i]));
        let mut xs = x.clone();
        xs[i] += z;
        let mut ys = y.clone();
        ys[i] += z;
        let fx = f.eval(&x);
        let fy = f.eval(&y);
        let lhs = f.eval(&xs) - fx;
        let rhs = f.eval(&ys) - fy;
        let tol = 1e-9 * (fx.abs() + fy.abs()).max(1.0);
        let violation = if lhs < rhs - tol { rhs - lhs } else { 0.0 };
        (x, y, violation)
    })
}

/// Empirical lower bound on the smoothness constant: the largest observed
/// ratio `‖∇̂F(x) − ∇̂F(y)‖ / ‖x − y‖` over finite-difference gradients at
/// random sample points.
pub fn estimate_smoothness(
    f: &Objective,
    domain: &BoxDomain,
    samples: u64,
    seed: u64,
) -> Result<f64> {
    if samples < 2 {
        return Err(Error::InvalidArgument("samples must be at least 2".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let upper = domain.upper();
    let n = upper.len();
    let steps: Vec<f64> = upper.iter().map(|&u| 1e-5 * u).collect();
    let grad = |x: &[f64]| -> Vec<f64> {
        (0..n)
            .map(|i| {
                let mut hi = x.to_vec();
                hi[i] += steps[i];
                let mut lo = x.to_vec();
                lo[i] -= steps[i];
                (f.eval(&hi) - f.eval(&lo)) / (2.0 * steps[i])
            })
            .collect()
    };
    // Keep central differences inside the box.
    let points: Vec<Vec<f64>> = (0..samples)
        .map(|_| {
            upper
                .iter()
                .zip(&steps)
                .map(|(&u, &h)| rng.gen_range(h..=(u - h)))
                .collect()
        })
        .collect();
    let grads: Vec<Vec<f64>> = points.iter().map(|p| grad(p)).collect();
    let mut best = 0.0f64;
    for a in 0..points.len() {
        for b in (a + 1)..points.len() {
            let dx: f64 = points[a]
                .iter()
                .zip(&points[b])
                .map(|(p, q)| (p - q).powi(2))
                .sum::<f64>()
                .sqrt();
            if dx < 1e-12 {
                continue;
            }
            let dg: f64 = grads[a]
                .iter()
                .zip(&grads[b])
                .map(|(p, q)| (p - q).powi(2))
                .sum::<f64>()
                .sqrt();
            best = best.max(dg / dx);
        }
    }
    Ok(best)
}
