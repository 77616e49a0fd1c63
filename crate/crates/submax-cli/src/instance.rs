//! Instance file schema and loading.
//!
//! Instances are JSON documents:
//!
//! ```json
//! {
//!   "name": "quad2",
//!   "objective": {
//!     "type": "quadratic",
//!     "c": [1.0, 1.0],
//!     "Q": [[0.0, -0.5], [-0.5, 0.0]]
//!   },
//!   "u": [1.0, 1.0],
//!   "B": 1.0
//! }
//! ```
//!
//! Matrices are row-major. `L_override`, when present, replaces the derived
//! smoothness constant. Concave-of-linear objectives use
//! `{"type": "concave_linear", "w": [...], "kind": "one_minus_exp" | "sqrt_shift"}`.

use serde::Deserialize;

use submax::objectives::{
    make_concave_linear, make_submodular_quadratic, ConcaveKind, ConcaveLinearSpec, QuadraticSpec,
};
use submax::{BoxDomain, Objective, ProblemInstance};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub name: String,
    pub objective: ObjectiveSpec,
    pub u: Vec<f64>,
    #[serde(rename = "B")]
    pub budget: f64,
    #[serde(rename = "L_override", default)]
    pub l_override: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ObjectiveSpec {
    Quadratic {
        c: Vec<f64>,
        #[serde(rename = "Q", alias = "q")]
        q: Vec<Vec<f64>>,
    },
    ConcaveLinear {
        w: Vec<f64>,
        kind: String,
    },
}

fn parse_kind(kind: &str) -> Result<ConcaveKind, String> {
    match kind {
        "one_minus_exp" => Ok(ConcaveKind::OneMinusExp),
        "sqrt_shift" => Ok(ConcaveKind::SqrtShift),
        other => Err(format!(
            "unknown concave kind {other:?}, expected one_minus_exp or sqrt_shift"
        )),
    }
}

impl InstanceFile {
    pub fn load(path: &std::path::Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| format!("cannot parse {}: {e}", path.display()))
    }

    /// Builds a fully validated problem instance; every structural invariant
    /// (certificates, positivity, dimensions) is enforced here.
    pub fn build(&self) -> Result<ProblemInstance, String> {
        let objective = match &self.objective {
            ObjectiveSpec::Quadratic { c, q } => make_submodular_quadratic(
                &QuadraticSpec {
                    c: c.clone(),
                    q: q.clone(),
                },
                &self.u,
            ),
            ObjectiveSpec::ConcaveLinear { w, kind } => make_concave_linear(
                &ConcaveLinearSpec {
                    w: w.clone(),
                    kind: parse_kind(kind)?,
                },
                &self.u,
            ),
        }
        .map_err(|e| e.to_string())?;
        let objective = match self.l_override {
            Some(l) if l >= 0.0 && l.is_finite() => objective.with_smoothness(l),
            Some(l) => return Err(format!("L_override = {l} must be a non-negative real")),
            None => objective,
        };
        let domain = BoxDomain::new(self.u.clone()).map_err(|e| e.to_string())?;
        ProblemInstance::new(objective, domain, self.budget).map_err(|e| e.to_string())
    }

    /// Builds the objective without the submodularity and monotonicity
    /// certificates, so the property checkers can deliver the verdict on
    /// files that intentionally violate them. Only shapes are validated.
    pub fn build_unchecked(&self) -> Result<(Objective, BoxDomain), String> {
        let n = self.u.len();
        let objective = match &self.objective {
            ObjectiveSpec::Quadratic { c, q } => {
                if c.len() != n || q.len() != n || q.iter().any(|row| row.len() != n) {
                    return Err("quadratic coefficient shapes do not match u".into());
                }
                let c = c.clone();
                let q = q.clone();
                let l = self.l_override.unwrap_or_else(|| {
                    q.iter().flatten().map(|v| v * v).sum::<f64>().sqrt()
                });
                Objective::new(n, l, move |x: &[f64]| {
                    let lin: f64 = c.iter().zip(x).map(|(a, b)| a * b).sum();
                    let quad: f64 = (0..x.len())
                        .map(|i| {
                            x[i] * q[i].iter().zip(x).map(|(a, b)| a * b).sum::<f64>()
                        })
                        .sum();
                    lin + 0.5 * quad
                })
            }
            ObjectiveSpec::ConcaveLinear { w, kind } => {
                if w.len() != n {
                    return Err("weight vector length does not match u".into());
                }
                let kind = parse_kind(kind)?;
                let w = w.clone();
                let norm_sq: f64 = w.iter().map(|v| v * v).sum();
                let l = self.l_override.unwrap_or(match kind {
                    ConcaveKind::OneMinusExp => norm_sq,
                    ConcaveKind::SqrtShift => 0.25 * norm_sq,
                });
                Objective::new(n, l, move |x: &[f64]| {
                    let t: f64 = w.iter().zip(x).map(|(a, b)| a * b).sum();
                    match kind {
                        ConcaveKind::OneMinusExp => 1.0 - (-t).exp(),
                        ConcaveKind::SqrtShift => (t + 1.0).sqrt() - 1.0,
                    }
                })
            }
        };
        let domain = BoxDomain::new(self.u.clone()).map_err(|e| e.to_string())?;
        Ok((objective, domain))
    }
}
