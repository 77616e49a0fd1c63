//! The coordinate-ascent solver family: plain coordinate ascent, the
//! enhanced variant that also tries every single-coordinate solution, and the
//! fully enhanced variant that guesses two heavy coordinates before
//! descending on the contracted instance.

use rayon::prelude::*;

use crate::onedim::{find_target_value, maximize_ratio};
use crate::problem::{
    contract, feasibility_tol, BoxDomain, Objective, Point, ProblemInstance, SolveResult,
    TraceEntry,
};
use crate::{Error, Result};

/// Configuration shared by all solvers.
#[derive(Clone, Copy, Debug)]
pub struct CaConfig {
    /// Quality control parameter, must lie in `(0, 1/4)`.
    pub eps: f64,
    /// Record a per-iteration trace of the main loop.
    pub trace: bool,
}

impl CaConfig {
    pub fn new(eps: f64) -> Self {
        Self { eps, trace: false }
    }

    pub fn with_trace(mut self, trace: bool) -> Self {
        self.trace = trace;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.eps < 0.25) {
            return Err(Error::InvalidArgument(format!(
                "epsilon {} must lie in (0, 1/4)",
                self.eps
            )));
        }
        Ok(())
    }
}

/// The ladder of target values tried for one guessed coordinate:
/// `{F(x) + ε·j·F(u_h·e_h) | j ≥ 0, value ≤ F(x ∨ u_h·e_h)}`.
#[derive(Clone, Debug)]
pub struct GuessSet {
    pub values: Vec<f64>,
    pub step: f64,
}

/// One candidate solution produced by the fully enhanced solver.
#[derive(Clone, Debug)]
pub struct Candidate {
    pub h1: usize,
    pub h2: usize,
    pub v1_index: usize,
    pub v2_index: usize,
    pub point: Point,
    pub value: f64,
    pub ca_iterations: usize,
}

/// Plain coordinate ascent.
///
/// Starts at the origin and repeatedly pushes the coordinate with the best
/// approximate marginal-gain-per-unit ratio, with step sizes drawn from
/// `[min{d'_i, δ}, d'_i]` for `δ = εB/n`, until the budget is exhausted or no
/// coordinate can move. The main loop runs at most `n + 1 + n/ε` iterations
/// and the objective value never decreases along the way.
pub fn coordinate_ascent(instance: &ProblemInstance, cfg: &CaConfig) -> Result<SolveResult> {
    cfg.validate()?;
    let f = instance.objective();
    let n = instance.dim();
    let upper = instance.domain().upper();
    let budget = instance.budget();
    let tol = feasibility_tol(budget);
    let eps = cfg.eps;
    let delta = eps * budget / n.max(1) as f64;

    let evals_before = f.eval_count();
    let mut x = vec![0.0f64; n];
    let mut value = f.eval(&x);
    let mut trace = cfg.trace.then(|| {
        vec![TraceEntry {
            iteration: 0,
            point: Point::from_raw(x.clone()),
            value,
        }]
    });

    // Structural bound on main-loop iterations; tripping the hard cap means
    // the step selection is broken, so fail loudly instead of spinning.
    let iter_bound = n as f64 + 1.0 + n as f64 / eps;
    let hard_cap = (2.0 * iter_bound) as usize + 16;

    let mut iterations = 0usize;
    loop {
        let l1: f64 = x.iter().sum();
        if budget - l1 <= tol {
            break;
        }
        let active: Vec<usize> = (0..n).filter(|&i| x[i] < upper[i] - tol).collect();
        if active.is_empty() {
            break;
        }
        if iterations >= hard_cap {
            return Err(Error::InvalidArgument(format!(
                "coordinate ascent exceeded {hard_cap} iterations without terminating"
            )));
        }

        // Marginal section at the current point: g(w) = F(w) - F(x), so the
        // ratio maximizer sees (F(x + y e_i) - F(x)) / y.
        let base = f.clone();
        let fx = value;
        let marginal = Objective::new(n, f.smoothness(), move |w: &[f64]| base.eval(w) - fx);

        let room = budget - l1;
        let mut best: Option<(f64, usize, f64)> = None; // (ratio, coord, step)
        for &i in &active {
            let d_max = (upper[i] - x[i]).min(room);
            let d_min = d_max.min(delta);
            let (step, ratio) = maximize_ratio(&marginal, &x, i, d_min, d_max, eps)?;
            match best {
                Some((best_ratio, _, _)) if ratio <= best_ratio => {}
                _ => best = Some((ratio, i, step)),
            }
        }
        let (_, j, step) = best.expect("active set is non-empty");
        x[j] += step;
        value = f.eval(&x);
        iterations += 1;
        if let Some(t) = trace.as_mut() {
            t.push(TraceEntry {
                iteration: iterations,
                point: Point::from_raw(x.clone()),
                value,
            });
        }
    }

    Ok(SolveResult {
        point: Point::from_raw(x),
        value,
        main_iterations: iterations,
        evaluations: f.eval_count() - evals_before,
        trace,
    })
}

/// Coordinate ascent, then the better of its output and the `n`
/// single-coordinate solutions `u_i·e_i`.
pub fn enhanced_ca(instance: &ProblemInstance, cfg: &CaConfig) -> Result<SolveResult> {
    let f = instance.objective();
    let n = instance.dim();
    let upper = instance.domain().upper();
    let evals_before = f.eval_count();
    let mut result = coordinate_ascent(instance, cfg)?;
    for i in 0..n {
        let mut corner = vec![0.0f64; n];
        corner[i] = upper[i];
        let value = f.eval(&corner);
        if value > result.value {
            result.value = value;
            result.point = Point::from_raw(corner);
        }
    }
    result.evaluations = f.eval_count() - evals_before;
    Ok(result)
}

/// Builds the guess-set ladder `J(x, h)` for coordinate `h`.
///
/// When `F(u_h·e_h) = 0` the section is flat by monotonicity and
/// submodularity, and the set degenerates to `{F(x)}`.
pub fn guess_set(
    f: &Objective,
    domain: &BoxDomain,
    x: &Point,
    h: usize,
    eps: f64,
) -> Result<GuessSet> {
    let n = f.dimension();
    if x.dim() != n || domain.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: x.dim(),
        });
    }
    if h >= n {
        return Err(Error::InvalidArgument(format!(
            "coordinate {h} out of range for dimension {n}"
        )));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "epsilon {eps} must lie in (0, 1)"
        )));
    }
    let fx = f.eval(x.coords());
    let mut corner = vec![0.0f64; n];
    corner[h] = domain.upper()[h];
    let f_corner = f.eval(&corner);
    let mut joined = x.coords().to_vec();
    joined[h] = joined[h].max(domain.upper()[h]);
    let top = f.eval(&joined);

    let step = eps * f_corner;
    if step <= 0.0 {
        return Ok(GuessSet {
            values: vec![fx],
            step,
        });
    }
    let top_tol = 1e-12 * top.abs().max(1.0);
    // Submodularity and non-negativity bound the ladder length by 1 + ceil(1/eps);
    // the explicit cap guards against objectives that break that contract.
    let cap = (1.0 / eps).ceil() as usize + 1;
    let mut values = Vec::new();
    for j in 0..=cap {
        let v = fx + j as f64 * step;
        if v > top + top_tol {
            break;
        }
        values.push(v);
    }
    Ok(GuessSet { values, step })
}

/// Enumerates every candidate the fully enhanced solver considers: all
/// ordered pairs of distinct guessed coordinates, all guess-ladder values for
/// each, completed by coordinate ascent on the contracted residual instance.
pub fn feca_candidates(instance: &ProblemInstance, cfg: &CaConfig) -> Result<Vec<Candidate>> {
    cfg.validate()?;
    let n = instance.dim();
    if n == 0 {
        return Ok(Vec::new());
    }
    let pairs: Vec<(usize, Option<usize>)> = if n == 1 {
        vec![(0, None)]
    } else {
        let mut p = Vec::with_capacity(n * (n - 1));
        for h1 in 0..n {
            for h2 in 0..n {
                if h1 != h2 {
                    p.push((h1, Some(h2)));
                }
            }
        }
        p
    };
    let results: Vec<Vec<Candidate>> = pairs
        .par_iter()
        .map(|&(h1, h2)| pair_candidates(instance, cfg, h1, h2))
        .collect::<Result<_>>()?;
    Ok(results.into_iter().flatten().collect())
}

fn pair_candidates(
    instance: &ProblemInstance,
    cfg: &CaConfig,
    h1: usize,
    h2: Option<usize>,
) -> Result<Vec<Candidate>> {
    let f = instance.objective();
    let n = instance.dim();
    let domain = instance.domain();
    let budget = instance.budget();
    let tol = feasibility_tol(budget);
    let eps = cfg.eps;
    let inner_cfg = CaConfig::new(eps);

    let mut candidates = Vec::new();
    let origin = Point::zeros(n);
    let guesses1 = guess_set(f, domain, &origin, h1, eps)?;
    for (v1_index, &v1) in guesses1.values.iter().enumerate() {
        let y1 = find_target_value(f, domain, origin.coords(), h1, v1, eps)?;
        let mut x1 = vec![0.0f64; n];
        x1[h1] = y1;
        let x1 = Point::from_raw(x1);

        let second: Vec<(usize, f64)> = match h2 {
            Some(h2) => guess_set(f, domain, &x1, h2, eps)?
                .values
                .iter()
                .cloned()
                .enumerate()
                .collect(),
            None => vec![(0, f64::NAN)],
        };
        for (v2_index, v2) in second {
            let guessed = match h2 {
                Some(h2) => {
                    let y2 = find_target_value(f, domain, x1.coords(), h2, v2, eps)?;
                    let mut xs = x1.coords().to_vec();
                    xs[h2] += y2;
                    Point::from_raw(xs)
                }
                None => x1.clone(),
            };
            let used = guessed.l1_norm();
            if used > budget + tol {
                // Infeasible guess branch; the branch matching the optimum's
                // coordinates always stays within budget.
                continue;
            }
            let removed: Vec<usize> = match h2 {
                Some(h2) => vec![h1, h2],
                None => vec![h1],
            };
            let residual_budget = budget - used;
            let (full, ca_iterations) = if n > removed.len() && residual_budget > tol {
                let residual_obj = contract(f, &guessed, &removed)?;
                let kept: Vec<usize> =
                    (0..n).filter(|i| !removed.contains(i)).collect();
                let residual_upper: Vec<f64> =
                    kept.iter().map(|&i| domain.upper()[i]).collect();
                let residual = ProblemInstance::new(
                    residual_obj,
                    BoxDomain::new(residual_upper)?,
                    residual_budget,
                )?;
                let sub = coordinate_ascent(&residual, &inner_cfg)?;
                let mut xs = guessed.coords().to_vec();
                for (k, &i) in kept.iter().enumerate() {
                    xs[i] += sub.point.coords()[k];
                }
                (Point::from_raw(xs), sub.main_iterations)
            } else {
                (guessed, 0)
            };
            let value = f.eval(full.coords());
            candidates.push(Candidate {
                h1,
                h2: h2.unwrap_or(h1),
                v1_index,
                v2_index,
                point: full,
                value,
            ca_iterations,
            });
        }
    }
    Ok(candidates)
}

/// Fully enhanced coordinate ascent.
///
/// Evaluates every guess candidate (see [`feca_candidates`]) and returns the
/// best, with ties broken by the lexicographically smallest
/// `(h₁, h₂, v₁ index, v₂ index)` tuple. Candidates are independent, so they
/// are evaluated in parallel across `workers` threads; the deterministic
/// reduction makes the result identical for every worker count.
pub fn fully_enhanced_ca(
    instance: &ProblemInstance,
    cfg: &CaConfig,
    workers: usize,
) -> Result<SolveResult> {
    cfg.validate()?;
    if workers == 0 {
        return Err(Error::InvalidArgument("workers must be at least 1".into()));
    }
    let f = instance.objective();
    let evals_before = f.eval_count();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    let candidates = pool.install(|| feca_candidates(instance, cfg))?;
    if candidates.is_empty() {
        // Zero-dimensional instance: the only solution is the empty point.
        let point = Point::zeros(instance.dim());
        let value = f.eval(point.coords());
        return Ok(SolveResult {
            point,
            value,
            main_iterations: 0,
            evaluations: f.eval_count() - evals_before,
            trace: None,
        });
    }
    // Candidates arrive in ascending (h1, h2, v1, v2) order, so a strict
    // comparison implements the lexicographic tie-break.
    let mut total_iterations = 0usize;
    let mut best = 0usize;
    for (k, c) in candidates.iter().enumerate() {
        total_iterations += c.ca_iterations;
        if c.value > candidates[best].value {
            best = k;
        }
    }
    let winner = &candidates[best];
    Ok(SolveResult {
        point: winner.point.clone(),
        value: winner.value,
        main_iterations: total_iterations,
        evaluations: f.eval_count() - evals_before,
        trace: None,
    })
}
