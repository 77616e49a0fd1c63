//! Deterministic instance suite shared by the integration tests.

// Each integration test binary compiles its own copy of this module and not
// every binary uses every helper.
#![allow(dead_code)]

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use submax::objectives::{
    make_concave_linear, make_submodular_quadratic, ConcaveKind, ConcaveLinearSpec, QuadraticSpec,
};
use submax::{BoxDomain, ProblemInstance};

pub struct SuiteInstance {
    pub name: String,
    pub instance: ProblemInstance,
    pub eps: f64,
}

fn random_quadratic(n: usize, seed: u64) -> (QuadraticSpec, Vec<f64>, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c: Vec<f64> = (0..n).map(|_| rng.gen_range(0.7..1.4)).collect();
    let off_scale = 0.4 / (n - 1) as f64;
    let mut q = vec![vec![0.0f64; n]; n];
    for i in 0..n {
        q[i][i] = rng.gen_range(-0.15..0.25);
        for j in (i + 1)..n {
            let v = -rng.gen_range(0.0..off_scale);
            q[i][j] = v;
            q[j][i] = v;
        }
    }
    let u: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..1.0)).collect();
    let budget = rng.gen_range(0.8..1.4);
    (QuadraticSpec { c, q }, u, budget)
}

fn random_concave(n: usize, seed: u64) -> (ConcaveLinearSpec, Vec<f64>, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w: Vec<f64> = (0..n).map(|_| rng.gen_range(0.3..1.2)).collect();
    let kind = if seed % 2 == 0 {
        ConcaveKind::OneMinusExp
    } else {
        ConcaveKind::SqrtShift
    };
    let u: Vec<f64> = (0..n).map(|_| rng.gen_range(0.4..1.0)).collect();
    let budget = rng.gen_range(0.8..1.4);
    (ConcaveLinearSpec { w, kind }, u, budget)
}

fn quadratic_instance(n: usize, seed: u64) -> ProblemInstance {
    let (spec, u, budget) = random_quadratic(n, seed);
    let f = make_submodular_quadratic(&spec, &u).unwrap();
    ProblemInstance::new(f, BoxDomain::new(u).unwrap(), budget).unwrap()
}

fn concave_instance(n: usize, seed: u64) -> ProblemInstance {
    let (spec, u, budget) = random_concave(n, seed);
    let f = make_concave_linear(&spec, &u).unwrap();
    ProblemInstance::new(f, BoxDomain::new(u).unwrap(), budget).unwrap()
}

/// Mixed suite of 21 instances with n in {2, 3, 4} and eps in
/// {0.05, 0.1, 0.2}; four quadratics and three concave-of-linear per
/// dimension.
pub fn acceptance_suite() -> Vec<SuiteInstance> {
    let mut out = Vec::new();
    for (ni, &n) in [2usize, 3, 4].iter().enumerate() {
        // Cheaper eps values for the larger dimensions keep the fully
        // enhanced runs fast without losing the eps mix.
        let eps_cycle: [f64; 7] = if n < 4 {
            [0.05, 0.1, 0.2, 0.05, 0.1, 0.2, 0.05]
        } else {
            [0.1, 0.2, 0.1, 0.2, 0.1, 0.2, 0.05]
        };
        for k in 0..7 {
            let seed = (ni as u64) * 100 + k as u64;
            let (name, instance) = if k < 4 {
                (format!("quad-n{n}-{k}"), quadratic_instance(n, seed))
            } else {
                (format!("conc-n{n}-{k}"), concave_instance(n, seed))
            };
            out.push(SuiteInstance {
                name,
                instance,
                eps: eps_cycle[k],
            });
        }
    }
    out
}

/// Instances with small coordinate ranges, max u_i <= B/5, n in {4, 5}.
pub fn small_coordinate_suite() -> Vec<SuiteInstance> {
    let mut out = Vec::new();
    // The concave-of-linear reference case: n = 5, u_i = 0.2, B = 1.
    let f = make_concave_linear(
        &ConcaveLinearSpec {
            w: vec![1.0; 5],
            kind: ConcaveKind::OneMinusExp,
        },
        &[0.2; 5],
    )
    .unwrap();
    out.push(SuiteInstance {
        name: "conc-small-n5".into(),
        instance: ProblemInstance::new(f, BoxDomain::new(vec![0.2; 5]).unwrap(), 1.0).unwrap(),
        eps: 0.05,
    });
    for (k, &(n, seed, eps)) in [
        (4usize, 11u64, 0.05f64),
        (4, 12, 0.1),
        (5, 13, 0.1),
        (4, 14, 0.2),
        (5, 15, 0.05),
    ]
    .iter()
    .enumerate()
    {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
        let budget = 1.0;
        let u: Vec<f64> = (0..n).map(|_| rng.gen_range(0.12..0.2)).collect();
        let (spec, _, _) = random_quadratic(n, seed);
        let f = make_submodular_quadratic(&spec, &u).unwrap();
        out.push(SuiteInstance {
            name: format!("quad-small-{k}"),
            instance: ProblemInstance::new(f, BoxDomain::new(u).unwrap(), budget).unwrap(),
            eps,
        });
    }
    out
}

/// Oracle resolution matching the acceptance protocol: B/100 for n = 2,
/// B/30 otherwise.
pub fn oracle_resolution(instance: &ProblemInstance) -> f64 {
    if instance.dim() == 2 {
        instance.budget() / 100.0
    } else {
        instance.budget() / 30.0
    }
}
