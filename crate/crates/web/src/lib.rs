//! Browser bindings. Every entry point takes and returns JSON text; errors
//! come back as `{"error": {"kind", "message"}}`.

use contactor::checks::{CheckOptions, Checker};
use contactor::dynamics::{
    integrate, Flow, HamiltonianField, HamiltonianSystem, IntegratorConfig, LagrangianSystem, Trajectory,
};
use contactor::hj::{solve_evolution_hj_1d, uniform_grid, Branch};
use contactor::implicit::{dae_integrate, MorseFamilySystem};
use contactor::systems::{catalog, SystemConfig};
use contactor::{Error, Result};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

/// Most points a plotted series carries.
const MAX_POINTS: usize = 800;

fn respond(r: Result<Value>) -> String {
    match r {
        Ok(v) => v.to_string(),
        Err(e) => json!({ "error": { "kind": e.kind(), "message": e.to_string() } }).to_string(),
    }
}

fn thin(traj: &Trajectory) -> Value {
    let stride = traj.len().div_ceil(MAX_POINTS).max(1);
    let idx: Vec<usize> = (0..traj.len()).step_by(stride).collect();
    let mut series = serde_json::Map::new();
    for (j, name) in traj.layout.iter().enumerate() {
        series.insert(
            name.clone(),
            idx.iter().map(|&i| traj.states[i][j]).collect::<Vec<_>>().into(),
        );
    }
    for (name, d) in &traj.diagnostics {
        series.insert(
            format!("diag:{name}"),
            idx.iter().map(|&i| d[i]).collect::<Vec<_>>().into(),
        );
    }
    json!({ "t": idx.iter().map(|&i| traj.times[i]).collect::<Vec<_>>(), "series": series })
}

/// Names and JSON of the shipped configurations.
#[wasm_bindgen]
pub fn catalog_json() -> String {
    let entries: Vec<Value> = catalog()
        .iter()
        .map(|c| json!({ "name": c.name, "kind": c.kind.as_str(), "config": c.to_json() }))
        .collect();
    Value::from(entries).to_string()
}

/// Integrates an explicit configuration and runs its listed invariants.
#[wasm_bindgen]
pub fn simulate(config_json: &str) -> String {
    respond((|| {
        let cfg = SystemConfig::from_json_str(config_json)?;
        let mut checker = Checker::new(
            &cfg,
            CheckOptions {
                samples: 25,
                ..CheckOptions::for_config(&cfg)
            },
        );
        let traj = if cfg.kind.is_morse() {
            checker.dae_run()?
        } else {
            checker.explicit_run()?
        };
        let mut checks = Vec::new();
        for name in cfg.listed_invariants() {
            if let Some(r) = checker.run_applicable(&name)? {
                checks.push(r);
            }
        }
        Ok(json!({ "name": cfg.name, "trajectory": thin(&traj), "checks": checks }))
    })())
}

/// Solves `H(q, W', W) = c` on `[lo, hi]` for a one-degree-of-freedom `H`.
#[wasm_bindgen]
pub fn solve_hj(hamiltonian: &str, c: f64, lo: f64, hi: f64, nodes: usize, branch: &str) -> String {
    respond((|| {
        let sys = HamiltonianSystem::new(1, hamiltonian)?;
        let branch: Branch = branch.parse()?;
        if !(hi > lo) || nodes < 2 {
            return Err(Error::schema("/grid", "need hi > lo and at least two nodes"));
        }
        let s = solve_evolution_hj_1d(&sys, c, &uniform_grid(lo, hi, nodes), 0.0, branch)?;
        Ok(json!({
            "q": s.table.q,
            "W": s.table.w,
            "dW": s.table.dw,
            "max_residual": s.max_residual(),
        }))
    })())
}

/// Runs a Herglotz Lagrangian both as an implicit system and through its
/// Legendre dual `hamiltonian`, returning both `q1(t)` and the gap.
#[wasm_bindgen]
pub fn herglotz_compare(lagrangian: &str, hamiltonian: &str, q0: f64, qd0: f64, t_final: f64) -> String {
    respond((|| {
        let ic = IntegratorConfig::new(1e-2, t_final);
        ic.validate()?;
        let fam = MorseFamilySystem::herglotz(1, lagrangian, Flow::Contact)?;
        let l = LagrangianSystem::new(1, lagrangian)?;
        let p0 = l.l.grad_at(&[q0, qd0, 0.0], &[1])?.1[0];
        let x0 = [q0, p0, 0.0];
        let implicit = dae_integrate(&fam, &x0, &[qd0], &ic, &[])?;
        let sys = HamiltonianSystem::new(1, hamiltonian)?;
        let explicit = integrate(
            &mut HamiltonianField {
                sys: &sys,
                flow: Flow::Contact,
            },
            &x0,
            &ic,
        )?;
        let gap = implicit
            .states
            .iter()
            .zip(&explicit.states)
            .map(|(a, b)| a.iter().zip(b).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        Ok(json!({ "implicit": thin(&implicit), "explicit": thin(&explicit), "gap": gap }))
    })())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Value {
        serde_json::from_str(s).unwrap()
    }

    #[test]
    fn catalog_lists_entries() {
        let v = parse(&catalog_json());
        assert!(v.as_array().unwrap().len() >= 8);
    }

    #[test]
    fn simulate_dho() {
        let cfg = catalog().into_iter().find(|c| c.name == "dho").unwrap();
        let v = parse(&simulate(&cfg.to_json()));
        assert!(v["trajectory"]["t"].as_array().unwrap().len() <= MAX_POINTS + 1);
        assert!(v["checks"].as_array().unwrap().iter().all(|c| c["pass"] == true));
    }

    #[test]
    fn errors_are_json() {
        let v = parse(&simulate("{"));
        assert_eq!(v["error"]["kind"], "SchemaError");
        let v = parse(&solve_hj("p1^2 + q1^2", 0.0, -1.0, 1.0, 50, "+"));
        assert_eq!(v["error"]["kind"], "BranchLoss");
    }

    #[test]
    fn hj_solution_is_tight() {
        let v = parse(&solve_hj("p1^2/2 + q1^2/2 + 0.2*z", 1.0, -1.0, 1.0, 201, "+"));
        assert!(v["max_residual"].as_f64().unwrap() <= 1e-10);
    }

    #[test]
    fn herglotz_matches_dual() {
        let v = parse(&herglotz_compare(
            "qd1^2/2 - q1^2/2 - 0.2*z",
            "p1^2/2 + q1^2/2 + 0.2*z",
            1.0,
            0.0,
            5.0,
        ));
        assert!(v["gap"].as_f64().unwrap() <= 1e-6, "{v}");
    }
}
