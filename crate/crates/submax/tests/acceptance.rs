//! End-to-end acceptance gate. Each test covers one numbered criterion and
//! prints a single PASS/FAIL line (run with `--nocapture` to see them).

mod common;

use std::f64::consts::E;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{acceptance_suite, oracle_resolution, small_coordinate_suite, SuiteInstance};
use submax::objectives::{check_dr, check_submodular, make_submodular_quadratic, QuadraticSpec};
use submax::onedim::{
    build_ratio_grid, find_target_value_detailed, maximize_ratio, RatioGrid,
};
use submax::oracle::{
    dense_ratio_oracle, dense_target_oracle, grid_optimum, verify_conditioned_guarantee,
};
use submax::solvers::{coordinate_ascent, enhanced_ca, fully_enhanced_ca, CaConfig};
use submax::{BoxDomain, ProblemInstance};

fn report(id: u32, label: &str, pass: bool) {
    println!(
        "criterion {id:02} {label}: {}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {id:02} {label} failed");
}

fn opt_value(inst: &ProblemInstance) -> f64 {
    grid_optimum(inst, oracle_resolution(inst)).unwrap().best_value
}

#[test]
fn c01_enhanced_ca_guarantee() {
    let suite = acceptance_suite();
    assert!(suite.len() >= 20);
    let mut pass = true;
    for s in &suite {
        let opt = opt_value(&s.instance);
        let b = s.instance.budget();
        let l = s.instance.objective().smoothness();
        let bound = ((E - 1.0) / (2.0 * E - 1.0) - 2.0 * s.eps) * opt - s.eps * b * l;
        let res = enhanced_ca(&s.instance, &CaConfig::new(s.eps)).unwrap();
        if res.value < bound - 1e-9 * opt.abs().max(1.0) {
            eprintln!("{}: value {} below bound {}", s.name, res.value, bound);
            pass = false;
        }
    }
    report(1, "enhanced coordinate ascent guarantee", pass);
}

#[test]
fn c02_fully_enhanced_ca_guarantee() {
    let suite = acceptance_suite();
    let mut pass = true;
    for s in &suite {
        let opt = opt_value(&s.instance);
        let b = s.instance.budget();
        let l = s.instance.objective().smoothness();
        let bound = (1.0 - 1.0 / E - 4.0 * s.eps) * opt - s.eps * (b + 2.0) * l;
        let res = fully_enhanced_ca(&s.instance, &CaConfig::new(s.eps), 4).unwrap();
        if res.value < bound - 1e-9 * opt.abs().max(1.0) {
            eprintln!("{}: value {} below bound {}", s.name, res.value, bound);
            pass = false;
        }
    }
    report(2, "fully enhanced coordinate ascent guarantee", pass);
}

#[test]
fn c03_small_coordinate_guarantee() {
    let suite = small_coordinate_suite();
    assert!(suite.len() >= 5);
    let mut pass = true;
    for s in &suite {
        let opt = opt_value(&s.instance);
        let b = s.instance.budget();
        let l = s.instance.objective().smoothness();
        let u_max = s
            .instance
            .domain()
            .upper()
            .iter()
            .cloned()
            .fold(0.0f64, f64::max);
        assert!(u_max <= b / 5.0 + 1e-12);
        let bound = (1.0 - 1.0 / E - u_max / b - s.eps) * opt - s.eps * b * l;
        let res = coordinate_ascent(&s.instance, &CaConfig::new(s.eps)).unwrap();
        if res.value < bound - 1e-9 * opt.abs().max(1.0) {
            eprintln!("{}: value {} below bound {}", s.name, res.value, bound);
            pass = false;
        }
    }
    report(3, "small-coordinate ascent guarantee", pass);
}

struct SectionSample {
    instance_index: usize,
    x: Vec<f64>,
    i: usize,
    eps: f64,
}

fn sample_sections(suite: &[SuiteInstance], count: usize, seed: u64) -> Vec<SectionSample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let eps_choices = [0.05, 0.1, 0.2];
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let k = rng.gen_range(0..suite.len());
        let inst = &suite[k].instance;
        let upper = inst.domain().upper();
        let i = rng.gen_range(0..inst.dim());
        let x: Vec<f64> = upper
            .iter()
            .enumerate()
            .map(|(j, &u)| {
                if j == i {
                    rng.gen_range(0.0..0.5 * u)
                } else {
                    rng.gen_range(0.0..u)
                }
            })
            .collect();
        if upper[i] - x[i] < 0.05 {
            continue;
        }
        out.push(SectionSample {
            instance_index: k,
            x,
            i,
            eps: eps_choices[rng.gen_range(0..3)],
        });
    }
    out
}

#[test]
fn c04_ratio_maximizer_vs_dense_oracle() {
    let suite = acceptance_suite();
    let sections = sample_sections(&suite, 200, 42);
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    let mut pass = true;
    for s in &sections {
        let inst = &suite[s.instance_index].instance;
        let f = inst.objective();
        let budget = inst.budget();
        let b = (inst.domain().upper()[s.i] - s.x[s.i]).min(budget);
        let a = b * rng.gen_range(0.01..0.5);
        let (_, ratio) = maximize_ratio(f, &s.x, s.i, a, b, s.eps).unwrap();
        let (_, oracle_ratio) = dense_ratio_oracle(f, &s.x, s.i, a, b, 1e-4).unwrap();
        let l = f.smoothness();
        if ratio < oracle_ratio - s.eps * l - 1e-9 {
            eprintln!("ratio {ratio} below oracle {oracle_ratio} - eps*L");
            pass = false;
        }
        let grid = build_ratio_grid(a, b, s.eps, b).unwrap();
        if grid.len() > RatioGrid::size_bound(a, s.eps, budget) {
            eprintln!("grid size {} exceeds bound", grid.len());
            pass = false;
        }
    }
    report(4, "ratio maximizer matches dense oracle", pass);
}

#[test]
fn c05_target_finder_vs_dense_oracle() {
    let suite = acceptance_suite();
    let sections = sample_sections(&suite, 200, 44);
    let mut rng = ChaCha8Rng::seed_from_u64(45);
    let mut pass = true;
    for s in &sections {
        let inst = &suite[s.instance_index].instance;
        let f = inst.objective();
        let domain = inst.domain();
        let l = f.smoothness();
        let width = domain.upper()[s.i] - s.x[s.i];
        let mut top = s.x.clone();
        top[s.i] += width;
        let lo = f.eval(&s.x);
        let hi = f.eval(&top);
        let v = lo + rng.gen_range(0.0..=1.0) * (hi - lo);
        let search = find_target_value_detailed(f, domain, &s.x, s.i, v, s.eps).unwrap();
        let mut probe = s.x.clone();
        probe[s.i] += search.y;
        if f.eval(&probe) < v - s.eps * l - 1e-9 {
            eprintln!("target value missed by more than eps*L at y = {}", search.y);
            pass = false;
        }
        if let Some(y_min) = dense_target_oracle(f, domain, &s.x, s.i, v, 1e-5).unwrap() {
            if y_min < search.y - 1e-9 {
                eprintln!("oracle found smaller step {y_min} < {}", search.y);
                pass = false;
            }
        }
        let budget = (inst.budget() / s.eps).log2().ceil() as u64 + 3;
        if search.evaluations > budget {
            eprintln!("evaluations {} exceed budget {budget}", search.evaluations);
            pass = false;
        }
    }
    report(5, "target finder matches dense oracle", pass);
}

#[test]
fn c06_iteration_bound() {
    let mut pass = true;
    for s in acceptance_suite().iter().chain(small_coordinate_suite().iter()) {
        let n = s.instance.dim() as f64;
        let res = coordinate_ascent(&s.instance, &CaConfig::new(s.eps)).unwrap();
        let limit = n + 1.0 + n / s.eps;
        if (res.main_iterations as f64) > limit {
            eprintln!("{}: {} iterations exceed {limit}", s.name, res.main_iterations);
            pass = false;
        }
    }
    report(6, "iteration count bound", pass);
}

#[test]
fn c07_monotone_progress() {
    let mut pass = true;
    for s in acceptance_suite().iter().chain(small_coordinate_suite().iter()) {
        let res = coordinate_ascent(&s.instance, &CaConfig::new(s.eps).with_trace(true)).unwrap();
        let trace = res.trace.unwrap();
        for w in trace.windows(2) {
            if w[1].value < w[0].value {
                eprintln!("{}: value decreased at iteration {}", s.name, w[1].iteration);
                pass = false;
            }
        }
    }
    report(7, "monotone objective progress", pass);
}

#[test]
fn c08_conditioned_progress_instrumentation() {
    let suite = acceptance_suite();
    let mut pass = true;
    let mut checked = 0;
    for s in suite.iter().take(10) {
        let opt = grid_optimum(&s.instance, oracle_resolution(&s.instance)).unwrap();
        let rep =
            verify_conditioned_guarantee(&s.instance, &CaConfig::new(s.eps), &opt.best_point)
                .unwrap();
        if !rep.violations.is_empty() {
            eprintln!("{}: {} conditioned-bound violations", s.name, rep.violations.len());
            pass = false;
        }
        checked += 1;
    }
    assert!(checked >= 10);
    report(8, "conditioned progress instrumentation", pass);
}

#[test]
fn c09_non_dr_scope() {
    let spec = QuadraticSpec {
        c: vec![1.0, 1.0],
        q: vec![vec![0.4, -0.5], vec![-0.5, 0.4]],
    };
    let u = vec![1.0, 1.0];
    let f = make_submodular_quadratic(&spec, &u).unwrap();
    let domain = BoxDomain::new(u).unwrap();
    let sub = check_submodular(&f, &domain, 1000, 7).unwrap();
    let dr = check_dr(&f, &domain, 1000, 7).unwrap();
    let pass = sub.clean() && dr.violations >= 1;
    report(9, "submodular but not diminishing-returns", pass);
}

#[test]
fn c10_parallel_determinism() {
    let suite = acceptance_suite();
    let mut pass = true;
    for s in suite.iter().filter(|s| s.instance.dim() <= 3).take(5) {
        let cfg = CaConfig::new(s.eps);
        let r1 = fully_enhanced_ca(&s.instance, &cfg, 1).unwrap();
        let r2 = fully_enhanced_ca(&s.instance, &cfg, 2).unwrap();
        let r8 = fully_enhanced_ca(&s.instance, &cfg, 8).unwrap();
        let same = |a: &submax::SolveResult, b: &submax::SolveResult| {
            a.value.to_bits() == b.value.to_bits()
                && a.point
                    .coords()
                    .iter()
                    .zip(b.point.coords())
                    .all(|(x, y)| x.to_bits() == y.to_bits())
        };
        if !(same(&r1, &r2) && same(&r1, &r8)) {
            eprintln!("{}: worker counts disagree", s.name);
            pass = false;
        }
    }
    report(10, "parallel determinism across worker counts", pass);
}
