//! Half-explicit RK4: every stage re-solves `∂E/∂λ = 0` from the previous
//! stage's multipliers, then evaluates the implicit field.

use super::{implicit_rhs, solve_constraint, MorseFamilySystem, Variant};
use crate::dynamics::{
    drift_profile, integrate, phase_vars, Aborted, IntegratorConfig, NodeRecord, Trajectory, VectorField,
};
use crate::error::{Error, Result};

/// Post-step constraint residual above which a run is abandoned.
pub const CONSISTENCY_TOL: f64 = 1e-8;

pub struct ImplicitField<'a> {
    sys: &'a MorseFamilySystem,
    pinned: Vec<Option<f64>>,
    /// Warm start for the next solve.
    lambda: Vec<f64>,
    accepted: Option<Vec<f64>>,
    last_jump: f64,
    h: f64,
}

impl<'a> ImplicitField<'a> {
    pub fn new(sys: &'a MorseFamilySystem, lambda0: &[f64], pinned: &[Option<f64>], h: f64) -> Self {
        ImplicitField {
            sys,
            pinned: if pinned.is_empty() {
                vec![None; sys.k()]
            } else {
                pinned.to_vec()
            },
            lambda: lambda0.to_vec(),
            accepted: None,
            last_jump: 0.0,
            h,
        }
    }

    fn solve(&mut self, x: &[f64]) -> Result<Vec<f64>> {
        if self.sys.k() == 0 {
            return Ok(Vec::new());
        }
        let r = solve_constraint(self.sys, x, &self.lambda, &self.pinned)?;
        self.lambda = r.lambda.clone();
        Ok(r.lambda)
    }
}

impl VectorField for ImplicitField<'_> {
    fn layout(&self) -> Vec<String> {
        phase_vars(self.sys.n)
    }

    fn rhs(&mut self, x: &[f64]) -> Result<Vec<f64>> {
        let lambda = self.solve(x)?;
        implicit_rhs(self.sys, x, &lambda)
    }

    fn multiplier_names(&self) -> Vec<String> {
        self.sys.multipliers.clone()
    }

    fn observe(&mut self, step: usize, x: &[f64]) -> Result<NodeRecord> {
        let lambda = self.solve(x)?;
        let residual = self.sys.constraint_residual(x, &lambda)?;
        if residual > CONSISTENCY_TOL {
            return Err(Error::ConsistencyLost { step, residual });
        }
        // a jump is a step much larger than the running rate predicts
        let jump = match &self.accepted {
            Some(prev) => prev
                .iter()
                .zip(&lambda)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0f64, f64::max),
            None => 0.0,
        };
        let rate = self.last_jump / self.h;
        let flagged = step >= 2 && jump > 10.0 * self.h * rate + 1e-9;
        self.last_jump = jump;
        self.accepted = Some(lambda.clone());
        let e = self.sys.value(x, &lambda)?;
        Ok(NodeRecord {
            diagnostics: vec![
                ("E".into(), e),
                ("constraint_residual".into(), residual),
                ("branch_jump".into(), if flagged { 1.0 } else { 0.0 }),
            ],
            multipliers: (self.sys.k() > 0).then_some(lambda),
        })
    }

    fn finish(&self, traj: &mut Trajectory) {
        if self.sys.variant == Variant::Evolution || self.sys.variant == Variant::Symplectic {
            if let Some(e) = traj.diagnostics.get("E") {
                let d = drift_profile(e);
                traj.diagnostics.insert("E_drift".into(), d);
            }
        }
    }
}

/// Integrates the implicit system from `x0`, starting the multiplier solve at
/// `lambda0`. Pinned multipliers stay at their values and leave the Newton
/// system.
pub fn dae_integrate(
    sys: &MorseFamilySystem,
    x0: &[f64],
    lambda0: &[f64],
    cfg: &IntegratorConfig,
    pinned: &[Option<f64>],
) -> std::result::Result<Trajectory, Box<Aborted>> {
    let fail = |e: Error| {
        Box::new(Aborted {
            partial: Trajectory {
                layout: phase_vars(sys.n),
                ..Default::default()
            },
            error: e,
        })
    };
    if sys.variant == Variant::Generator {
        return Err(fail(Error::dim("generator families carry no dynamics")));
    }
    if lambda0.len() != sys.k() || (!pinned.is_empty() && pinned.len() != sys.k()) {
        return Err(fail(Error::dim(format!("{} multipliers expected", sys.k()))));
    }
    let mut field = ImplicitField::new(sys, lambda0, pinned, cfg.h);
    integrate(&mut field, x0, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{Flow, HamiltonianField, HamiltonianSystem};

    #[test]
    fn multiplier_free_run_is_bitwise_explicit() {
        let text = "p1^2/2 + q1^2/2 + 0.2*z";
        let sys = MorseFamilySystem::new(1, Variant::Contact, text, &[] as &[&str]).unwrap();
        let h = HamiltonianSystem::new(1, text).unwrap();
        let cfg = IntegratorConfig::new(1e-2, 2.0);
        let a = dae_integrate(&sys, &[1.0, 0.0, 0.0], &[], &cfg, &[]).unwrap();
        let b = integrate(
            &mut HamiltonianField {
                sys: &h,
                flow: Flow::Contact,
            },
            &[1.0, 0.0, 0.0],
            &cfg,
        )
        .unwrap();
        assert_eq!(a.states, b.states);
        assert!(a.multipliers.is_none());
    }

    #[test]
    fn herglotz_family_tracks_legendre_dual() {
        let sys = MorseFamilySystem::herglotz(1, "qd1^2/2 - q1^2/2 - 0.2*z", Flow::Contact).unwrap();
        let h = HamiltonianSystem::new(1, "p1^2/2 + q1^2/2 + 0.2*z").unwrap();
        let cfg = IntegratorConfig::new(1e-2, 3.0);
        let a = dae_integrate(&sys, &[1.0, 0.0, 0.0], &[0.0], &cfg, &[]).unwrap();
        let b = integrate(
            &mut HamiltonianField {
                sys: &h,
                flow: Flow::Contact,
            },
            &[1.0, 0.0, 0.0],
            &cfg,
        )
        .unwrap();
        let err = a
            .states
            .iter()
            .zip(&b.states)
            .flat_map(|(x, y)| x.iter().zip(y).map(|(u, v)| (u - v).abs()))
            .fold(0.0, f64::max);
        assert!(err <= 1e-12, "{err}");
        assert!(a.diag_max("constraint_residual").unwrap() <= 1e-8);
        assert_eq!(a.diag_max("branch_jump").unwrap(), 0.0);
    }

    #[test]
    fn unpinned_gauge_fails_pinned_runs() {
        let sys = MorseFamilySystem::herglotz(2, "qd1^2/2 - q1^2/2 - 0.2*z", Flow::Contact).unwrap();
        let cfg = IntegratorConfig::new(1e-2, 1.0);
        let x0 = [1.0, 0.0, 0.0, 0.0, 0.0];
        let err = dae_integrate(&sys, &x0, &[0.0, 0.0], &cfg, &[]).unwrap_err();
        assert!(matches!(err.error, Error::SingularConstraintJacobian { .. }));
        let ok = dae_integrate(&sys, &x0, &[0.0, 0.0], &cfg, &[None, Some(0.0)]).unwrap();
        assert_eq!(ok.len(), 101);
    }

    #[test]
    fn drifting_off_the_constraint_is_caught() {
        // ∂E/∂λ = λ − q1 cannot be met once the pinned λ stays fixed while q moves
        let sys = MorseFamilySystem::new(1, Variant::Contact, "p1 + (l1 - q1)^2/2", &["l1"]).unwrap();
        let err = dae_integrate(
            &sys,
            &[0.0, 0.0, 0.0],
            &[0.0],
            &IntegratorConfig::new(0.1, 1.0),
            &[Some(0.0)],
        )
        .unwrap_err();
        assert!(matches!(err.error, Error::ConsistencyLost { step: 1, .. }));
        assert_eq!(err.partial.len(), 1);
    }

    #[test]
    fn symplectic_family_conserves_generator() {
        let sys = MorseFamilySystem::new(
            1,
            Variant::Symplectic,
            "p1^2/2 + q1^2/2 + l1*(p1 - q1) - l1^2/2",
            &["l1"],
        )
        .unwrap();
        let traj = dae_integrate(&sys, &[0.5, 0.2, 0.0], &[0.0], &IntegratorConfig::new(1e-3, 2.0), &[]).unwrap();
        assert!(traj.diag_max("E_drift").unwrap() <= 1e-9);
        assert!(traj.column("z").unwrap().iter().all(|&z| z == 0.0));
    }
}
