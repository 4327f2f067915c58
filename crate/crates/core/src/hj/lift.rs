//! Reduced dynamics on the base and their lift back through the section.

use super::{check, lifted_state, reduced_layout, reduced_vf, section, solve_on_section, CharacteristicFn};
use crate::dynamics::{integrate, phase_vars, Aborted, IntegratorConfig, NodeRecord, Trajectory, VectorField};
use crate::error::{Error, Result};
use crate::implicit::{implicit_rhs, MorseFamilySystem};

/// Centered-difference defect above which a reduced trajectory is rejected.
pub const REDUCED_DEFECT_TOL: f64 = 1e-6;

pub struct ReducedField<'a> {
    pub sys: &'a MorseFamilySystem,
    pub w: &'a CharacteristicFn,
    pub lambda: Vec<f64>,
    pub pinned: Vec<Option<f64>>,
}

impl ReducedField<'_> {
    fn solve(&mut self, s: &[f64]) -> Result<Vec<f64>> {
        let l = solve_on_section(self.sys, self.w, s, &self.lambda, &self.pinned)?;
        self.lambda = l.clone();
        Ok(l)
    }
}

impl VectorField for ReducedField<'_> {
    fn layout(&self) -> Vec<String> {
        reduced_layout(self.sys)
    }

    fn rhs(&mut self, s: &[f64]) -> Result<Vec<f64>> {
        let l = self.solve(s)?;
        reduced_vf(self.sys, self.w, s, &l)
    }

    fn observe(&mut self, _step: usize, s: &[f64]) -> Result<NodeRecord> {
        let l = self.solve(s)?;
        let x = section(self.sys, self.w, s)?;
        Ok(NodeRecord {
            diagnostics: vec![("E".into(), self.sys.value(&x, &l)?)],
            multipliers: (self.sys.k() > 0).then_some(l),
        })
    }

    fn multiplier_names(&self) -> Vec<String> {
        self.sys.multipliers.clone()
    }
}

pub fn integrate_reduced(
    sys: &MorseFamilySystem,
    w: &CharacteristicFn,
    s0: &[f64],
    cfg: &IntegratorConfig,
    lambda0: &[f64],
    pinned: &[Option<f64>],
) -> std::result::Result<Trajectory, Box<Aborted>> {
    let mut field = ReducedField {
        sys,
        w,
        lambda: lambda0.to_vec(),
        pinned: pinned.to_vec(),
    };
    integrate(&mut field, s0, cfg)
}

#[derive(Debug, Clone)]
pub struct Lift {
    pub full: Trajectory,
    /// Sup over interior nodes of the full equations' centered defect.
    pub max_residual: f64,
    /// The same measure for the reduced trajectory against the reduced field.
    pub reduced_defect: f64,
}

fn centered_defect(times: &[f64], states: &[Vec<f64>], field: &[Vec<f64>]) -> Vec<f64> {
    let m = times.len();
    (0..m)
        .map(|i| {
            if i == 0 || i + 1 == m {
                return f64::NAN;
            }
            let dt = times[i + 1] - times[i - 1];
            (0..states[i].len())
                .map(|j| ((states[i + 1][j] - states[i - 1][j]) / dt - field[i][j]).abs())
                .fold(0.0, f64::max)
        })
        .collect()
}

fn finite_max(v: &[f64]) -> f64 {
    v.iter().filter(|x| !x.is_nan()).fold(0.0, |m: f64, x| m.max(*x))
}

/// Lifts a reduced trajectory to `(q, ∇W(q), z)`, with `z` taken from the
/// reduced run (contact) or `z = W(q)` (evolution), and measures how well the
/// lift solves the full equations.
pub fn lift_solution(
    w: &CharacteristicFn,
    reduced: &Trajectory,
    sys: &MorseFamilySystem,
    lambda0: &[f64],
    pinned: &[Option<f64>],
) -> Result<Lift> {
    let width = reduced_layout(sys).len();
    if w.n() != sys.n || reduced.states.iter().any(|s| s.len() != width) {
        return Err(Error::Schema {
            pointer: "/reduced".into(),
            message: format!(
                "reduced states must have {width} columns for n = {} and W over {} coordinates",
                sys.n,
                w.n()
            ),
        });
    }
    check(sys, w, width)?;
    let mut lambda = lambda0.to_vec();
    let mut reduced_field = Vec::with_capacity(reduced.len());
    let mut full_states = Vec::with_capacity(reduced.len());
    let mut full_field = Vec::with_capacity(reduced.len());
    let mut multipliers = Vec::with_capacity(reduced.len());
    let mut e_vals = Vec::with_capacity(reduced.len());
    for s in &reduced.states {
        lambda = solve_on_section(sys, w, s, &lambda, pinned)?;
        reduced_field.push(reduced_vf(sys, w, s, &lambda)?);
        let x = lifted_state(sys, w, s)?;
        full_field.push(implicit_rhs(sys, &x, &lambda)?);
        e_vals.push(sys.value(&x, &lambda)?);
        full_states.push(x);
        multipliers.push(lambda.clone());
    }
    let reduced_defect = finite_max(&centered_defect(&reduced.times, &reduced.states, &reduced_field));
    if reduced_defect > REDUCED_DEFECT_TOL {
        return Err(Error::ReducedNotASolution { defect: reduced_defect });
    }
    let defect = centered_defect(&reduced.times, &full_states, &full_field);
    let max_residual = finite_max(&defect);
    let mut full = Trajectory {
        times: reduced.times.clone(),
        states: full_states,
        layout: phase_vars(sys.n),
        multipliers: (sys.k() > 0).then_some(multipliers),
        multiplier_names: sys.multipliers.clone(),
        diagnostics: Default::default(),
    };
    full.diagnostics.insert("E".into(), e_vals);
    full.diagnostics.insert("defect".into(), defect);
    Ok(Lift {
        full,
        max_residual,
        reduced_defect,
    })
}
