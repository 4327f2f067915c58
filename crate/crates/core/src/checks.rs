//! Named numerical checks over a system configuration. The CLI reports them
//! and the catalog lists which ones each entry must pass.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use crate::dynamics::{
    cartan_residual, field_from_derivatives, integrate, FieldGraph, Flow, HamiltonianField, HamiltonianSystem,
    HerglotzField, IntegratorConfig, SymplecticField, Trajectory,
};
use crate::error::{Error, Result};
use crate::geometry::{
    beta_0_flat, beta_0_pullback_defect, beta_c_flat, beta_c_pullback_defect, pullback_isotropy_check, Ad, IsotropyForm,
};
use crate::hj::{
    hj_sweep, integrate_reduced, lift_solution, solve_evolution_hj_1d, uniform_grid, CharacteristicFn, HjSolve1d, Lift,
};
use crate::implicit::{
    dae_integrate, legendrian_points, morse_rank_check, phi_equivalence, solve_constraint, MorseFamilySystem,
    MorseImmersion, PhiMap, PointKind, Variant,
};
use crate::systems::{Kind, Model, SystemConfig};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl CheckResult {
    pub fn new(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        CheckResult {
            name: name.into(),
            value,
            tolerance,
            // NaN never passes
            pass: value <= tolerance,
        }
    }
}

pub fn default_tolerance(name: &str) -> f64 {
    match name {
        "eta_contraction" | "dissipation" | "conservation" | "beta_compat" | "phi_isotropy" => 1e-12,
        "beta_pullback" | "dz_cancellation" => 1e-13,
        "cartan" | "legendrian_image" | "hj_residual" | "gamma_related" | "hj_solve" | "gauge_reduction" => 1e-10,
        "closed_form" => 1e-7,
        "run_dissipation" | "lift" => 1e-5,
        "run_drift" | "constraint_maintenance" | "phi_equivalence" => 1e-8,
        "implicit_explicit" | "legendre_dual" | "lift_H" => 1e-6,
        "verdict_agreement" | "gauge_unpinned_fails" | "morse_rank" => 0.0,
        _ => 1e-10,
    }
}

#[derive(Debug, Clone)]
pub struct CheckOptions {
    pub samples: usize,
    pub seed: u64,
    /// Take precedence over the config's own tolerances.
    pub overrides: BTreeMap<String, f64>,
}

impl CheckOptions {
    pub fn for_config(cfg: &SystemConfig) -> Self {
        CheckOptions {
            samples: 100,
            seed: cfg.seed(),
            overrides: BTreeMap::new(),
        }
    }
}

/// Uniform samples in `[−1, 1]^d`.
pub fn box_samples(seed: u64, d: usize, count: usize) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| (0..d).map(|_| rng.gen_range(-1.0..=1.0)).collect())
        .collect()
}

fn sup_gap(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter()
        .zip(b)
        .flat_map(|(x, y)| x.iter().zip(y).map(|(u, v)| (u - v).abs()))
        .fold(0.0, f64::max)
}

fn not_applicable(name: &str, cfg: &SystemConfig) -> Error {
    Error::Schema {
        pointer: "/kind".into(),
        message: format!("check `{name}` does not apply to kind `{}`", cfg.kind.as_str()),
    }
}

/// Runs checks against one config, collecting extra per-sample details.
pub struct Checker<'a> {
    pub cfg: &'a SystemConfig,
    pub opts: CheckOptions,
    pub details: BTreeMap<String, serde_json::Value>,
    solved: Option<HjSolve1d>,
}

impl<'a> Checker<'a> {
    pub fn new(cfg: &'a SystemConfig, opts: CheckOptions) -> Self {
        Checker {
            cfg,
            opts,
            details: BTreeMap::new(),
            solved: None,
        }
    }

    pub fn tolerance(&self, name: &str) -> f64 {
        self.opts
            .overrides
            .get(name)
            .copied()
            .unwrap_or_else(|| self.cfg.tolerance(name, default_tolerance(name)))
    }

    fn result(&self, name: &str, value: f64) -> CheckResult {
        CheckResult::new(name, value, self.tolerance(name))
    }

    fn samples(&self, d: usize) -> Vec<Vec<f64>> {
        box_samples(self.opts.seed, d, self.opts.samples)
    }

    fn view(&self, name: &str) -> Result<HamiltonianSystem> {
        self.cfg
            .hamiltonian_view()?
            .ok_or_else(|| not_applicable(name, self.cfg))
    }

    /// Contact flow unless the config is of an evolution kind.
    fn view_flow(&self) -> Flow {
        self.cfg.kind.flow().unwrap_or(Flow::Contact)
    }

    pub fn run_all(&mut self, names: &[String]) -> Result<Vec<CheckResult>> {
        names.iter().map(|n| self.run(n)).collect()
    }

    /// Like [`Checker::run`], with `None` when the check does not apply to
    /// this kind of system.
    pub fn run_applicable(&mut self, name: &str) -> Result<Option<CheckResult>> {
        match self.run(name) {
            Ok(r) => Ok(Some(r)),
            Err(Error::Schema { pointer, message }) if pointer == "/kind" && message.starts_with("check") => Ok(None),
            Err(e) => Err(e),
        }
    }

    pub fn run(&mut self, name: &str) -> Result<CheckResult> {
        let cfg = self.cfg;
        let n = cfg.n;
        let value = match name {
            "eta_contraction" => {
                let sys = self.view(name)?;
                let flow = self.view_flow();
                let mut worst = 0.0f64;
                for x in self.samples(2 * n + 1) {
                    let (h, g) = sys.derivatives(&x)?;
                    let v = field_from_derivatives(&x[n..2 * n], h, &g, flow);
                    let eta = v[2 * n] - (0..n).map(|i| x[n + i] * v[i]).sum::<f64>();
                    worst = worst.max(match flow {
                        Flow::Contact => (eta + h).abs(),
                        Flow::Evolution => eta.abs(),
                    });
                }
                worst
            }
            "cartan" => {
                let sys = self.view(name)?;
                let mut worst = 0.0f64;
                for x in self.samples(2 * n + 1) {
                    for r in cartan_residual(&sys, &x)? {
                        worst = worst.max(r.abs());
                    }
                }
                worst
            }
            "dissipation" | "conservation" => {
                // X(H) = −H_z·H along the contact flow, ε(H) = 0 along evolution
                let sys = self.view(name)?;
                let flow = if name == "dissipation" {
                    Flow::Contact
                } else {
                    Flow::Evolution
                };
                let mut worst = 0.0f64;
                for x in self.samples(2 * n + 1) {
                    let (h, g) = sys.derivatives(&x)?;
                    let v = field_from_derivatives(&x[n..2 * n], h, &g, flow);
                    let dh: f64 = g.iter().zip(&v).map(|(a, b)| a * b).sum();
                    worst = worst.max(match flow {
                        Flow::Contact => (dh + g[2 * n] * h).abs(),
                        Flow::Evolution => dh.abs(),
                    });
                }
                worst
            }
            "legendrian_image" => self.legendrian_image()?,
            "beta_compat" => self.beta_compat()?,
            "beta_pullback" => {
                let mut worst = 0.0f64;
                let pts = box_samples(self.opts.seed, 4 * n + 3, self.opts.samples);
                let vecs = box_samples(self.opts.seed.wrapping_add(1), 4 * n + 3, self.opts.samples);
                for (x, v) in pts.iter().zip(&vecs) {
                    worst = worst.max(beta_c_pullback_defect(x, v));
                    worst = worst.max(beta_0_pullback_defect(&x[..4 * n + 2], &v[..4 * n + 2]));
                }
                worst
            }
            "closed_form" => self.closed_form()?,
            "run_dissipation" => {
                let traj = self.explicit_run()?;
                traj.diag_max("dissipation").ok_or_else(|| not_applicable(name, cfg))?
            }
            "run_drift" => self.run_drift()?,
            "hj_residual" | "gamma_related" | "dz_cancellation" | "verdict_agreement" => self.hj_check(name)?,
            "hj_solve" => self.hj_solution()?.max_residual(),
            "lift" => self.lift()?.max_residual,
            "lift_H" => {
                let c = cfg.hj.as_ref().ok_or_else(|| not_applicable(name, cfg))?.c;
                let lift = self.lift()?;
                lift.full.diagnostics["E"]
                    .iter()
                    .fold(0.0, |m: f64, e| m.max((e - c).abs()))
            }
            "implicit_explicit" => self.implicit_explicit()?,
            "legendre_dual" => {
                let sys = self.view(name)?;
                let dae = self.dae_run()?;
                let x0 = dae.states[0].clone();
                let cfg_i = cfg.integrator()?;
                let exp = integrate(
                    &mut HamiltonianField {
                        sys: &sys,
                        flow: self.view_flow(),
                    },
                    &x0,
                    &cfg_i,
                )?;
                sup_gap(&dae.states, &exp.states)
            }
            "constraint_maintenance" => self.dae_run()?.diag_max("constraint_residual").unwrap_or(0.0),
            "gauge_reduction" => self.gauge_reduction()?,
            "gauge_unpinned_fails" => {
                let fam = cfg.family()?;
                let (x0, l0) = cfg.initial_implicit()?;
                match dae_integrate(&fam, &x0, &l0, &cfg.integrator()?, &[]) {
                    Err(a) if matches!(a.error, Error::SingularConstraintJacobian { .. }) => 0.0,
                    _ => 1.0,
                }
            }
            "morse_rank" => self.morse_rank()?,
            "phi_equivalence" | "phi_isotropy" => {
                let Model::Phi(g) = cfg.model()? else {
                    return Err(not_applicable(name, cfg));
                };
                let samples = box_samples(self.opts.seed, n, self.opts.samples.max(200));
                if name == "phi_isotropy" {
                    pullback_isotropy_check(&Ad(PhiMap(&g)), IsotropyForm::Eta, &samples)?
                } else {
                    let eq = phi_equivalence(&g, &samples)?;
                    self.details.insert("phi_equivalence".into(), json!(eq));
                    eq.discrepancy()
                }
            }
            "" => return Err(Error::schema("/metadata/invariants", "empty check name")),
            other => {
                return Err(Error::Schema {
                    pointer: "/metadata/invariants".into(),
                    message: format!("unknown check `{other}`"),
                })
            }
        };
        Ok(self.result(name, value))
    }

    fn legendrian_image(&self) -> Result<f64> {
        let cfg = self.cfg;
        let n = cfg.n;
        match cfg.model()? {
            Model::Hamiltonian { sys, flow } => {
                let form = match flow {
                    Flow::Contact => IsotropyForm::EtaT,
                    Flow::Evolution => IsotropyForm::OmegaEta,
                };
                pullback_isotropy_check(&Ad(FieldGraph { sys: &sys, flow }), form, &self.samples(2 * n + 1))
            }
            Model::Phi(_) => Err(not_applicable("legendrian_image", cfg)),
            _ => {
                let fam = cfg.family()?;
                let kind = PointKind::default_for(fam.variant);
                let imm = MorseImmersion {
                    sys: &fam,
                    kind,
                    lambda0: vec![0.0; fam.k()],
                    pinned: cfg.pinned(),
                };
                let form = kind.form().expect("default kinds carry a form");
                pullback_isotropy_check(&imm, form, &self.samples(fam.base_dim()))
            }
        }
    }

    fn beta_compat(&self) -> Result<f64> {
        let cfg = self.cfg;
        let n = cfg.n;
        let d = 2 * n + 1;
        let mut worst = 0.0f64;
        match cfg.model()? {
            Model::Hamiltonian { sys, flow } => {
                for x in self.samples(d) {
                    let (h, g) = sys.derivatives(&x)?;
                    let v = field_from_derivatives(&x[n..2 * n], h, &g, flow);
                    let mut pt = x.clone();
                    match flow {
                        Flow::Contact => {
                            pt.extend(&v);
                            pt.push(g[2 * n]);
                            let img = beta_c_flat(&pt);
                            for i in 0..d {
                                worst = worst.max((img[d + i] + g[i]).abs());
                            }
                            worst = worst.max((img[2 * d] + h).abs());
                        }
                        Flow::Evolution => {
                            pt.extend_from_slice(&v[..2 * n]);
                            pt.push(g[2 * n]);
                            let img = beta_0_flat(&pt);
                            for i in 0..d {
                                worst = worst.max((img[d + i] + g[i]).abs());
                            }
                        }
                    }
                }
            }
            Model::Herglotz { .. } | Model::Morse(_) => {
                let fam = cfg.family()?;
                if fam.variant != Variant::Contact {
                    return Err(not_applicable("beta_compat", cfg));
                }
                let samples = self.samples(fam.base_dim());
                let l0 = vec![0.0; fam.k()];
                let ne = legendrian_points(&fam, &samples, &l0, &cfg.pinned(), PointKind::Ne)?;
                let hl = legendrian_points(&fam, &samples, &l0, &cfg.pinned(), PointKind::HamLeg)?;
                for (a, b) in ne.iter().zip(&hl) {
                    worst = worst.max(sup_gap(&[beta_c_flat(a)], std::slice::from_ref(b)));
                }
            }
            _ => return Err(not_applicable("beta_compat", cfg)),
        }
        Ok(worst)
    }

    fn closed_form(&self) -> Result<f64> {
        let traj = self.explicit_run()?;
        closed_form_error(self.cfg, &traj).ok_or_else(|| not_applicable("closed_form", self.cfg))
    }

    /// The explicit run of the config: Hamiltonian, symplectic or Herglotz.
    pub fn explicit_run(&self) -> Result<Trajectory> {
        let cfg = self.cfg;
        let ic = cfg.integrator()?;
        let x0 = cfg.initial_explicit()?;
        Ok(match cfg.model()? {
            Model::Hamiltonian { sys, flow } => integrate(&mut HamiltonianField { sys: &sys, flow }, &x0, &ic)?,
            Model::Symplectic { f, n } => integrate(&mut SymplecticField { f: &f, n }, &x0, &ic)?,
            Model::Herglotz { sys, flow } => integrate(&mut HerglotzField { sys: &sys, flow }, &x0, &ic)?,
            _ => return Err(not_applicable("explicit run", cfg)),
        })
    }

    pub fn dae_run(&self) -> Result<Trajectory> {
        let cfg = self.cfg;
        let fam = cfg.family()?;
        let (x0, l0) = cfg.initial_implicit()?;
        Ok(dae_integrate(&fam, &x0, &l0, &cfg.integrator()?, &cfg.pinned())?)
    }

    fn run_drift(&self) -> Result<f64> {
        let cfg = self.cfg;
        let (traj, key) = match cfg.kind {
            Kind::Evolution => (self.explicit_run()?, "H_drift"),
            Kind::Symplectic => (self.explicit_run()?, "F_drift"),
            Kind::HerglotzEvolution | Kind::MorseEvolution | Kind::MorseSymplectic => (self.dae_run()?, "E_drift"),
            _ => return Err(not_applicable("run_drift", cfg)),
        };
        traj.diag_max(key).ok_or_else(|| not_applicable("run_drift", cfg))
    }

    fn hj_check(&mut self, name: &str) -> Result<f64> {
        let cfg = self.cfg;
        let w = cfg.characteristic()?.ok_or_else(|| Error::Schema {
            pointer: "/W".into(),
            message: "this check needs a characteristic function `W`".into(),
        })?;
        let fam = cfg.family()?;
        if fam.variant == Variant::Generator {
            return Err(not_applicable(name, cfg));
        }
        let samples = self.samples(crate::hj::reduced_dim(&fam));
        let sweep = hj_sweep(&fam, &w, &samples, &vec![0.0; fam.k()], &cfg.pinned())?;
        let agree = sweep.verdicts_agree(1e-10) && sweep.verdicts_agree(1e-6);
        let value = match name {
            "hj_residual" => sweep.residual_sup().max(sweep.constraint_sup()),
            "gamma_related" => sweep.mismatch_sup(),
            "dz_cancellation" => sweep.dz_cancellation,
            _ => {
                if agree {
                    0.0
                } else {
                    1.0
                }
            }
        };
        self.details.insert(
            "hj".into(),
            json!({
                "variant": sweep.variant,
                "samples": samples,
                "residual": sweep.residual,
                "mismatch": sweep.mismatch,
                "constraint_residual": sweep.constraint,
                "verdicts_agree": agree,
            }),
        );
        Ok(value)
    }

    /// The tabulated solution of the config's 1-D evolution HJ problem.
    pub fn hj_solution(&mut self) -> Result<HjSolve1d> {
        if let Some(s) = &self.solved {
            return Ok(s.clone());
        }
        let cfg = self.cfg;
        let spec = cfg.hj.as_ref().ok_or_else(|| not_applicable("hj_solve", cfg))?;
        let Model::Hamiltonian { sys, .. } = cfg.model()? else {
            return Err(not_applicable("hj_solve", cfg));
        };
        let grid = uniform_grid(spec.q_min, spec.q_max, spec.nodes);
        let s = solve_evolution_hj_1d(&sys, spec.c, &grid, spec.w0, spec.branch)?;
        self.solved = Some(s.clone());
        Ok(s)
    }

    /// `W`, reduced start and integrator for the config's own lift. With an
    /// `hj` block the solved table is used from `q_min` over `horizon`;
    /// otherwise the config's `W` from the initial state.
    pub fn lift_setup(&mut self) -> Result<(CharacteristicFn, Vec<f64>, IntegratorConfig)> {
        let cfg = self.cfg;
        let contact = cfg.family()?.variant == Variant::Contact;
        let ic = cfg.integrator()?;
        if let Some(spec) = cfg.hj.clone() {
            let table = self.hj_solution()?.table;
            let mut s0 = vec![spec.q_min];
            if contact {
                s0.push(spec.w0);
            }
            let horizon = spec.horizon.unwrap_or(ic.t_final);
            return Ok((CharacteristicFn::Table(table), s0, IntegratorConfig::new(ic.h, horizon)));
        }
        let w = cfg.characteristic()?.ok_or_else(|| not_applicable("lift", cfg))?;
        let init = cfg.initial.as_ref().ok_or_else(|| not_applicable("lift", cfg))?;
        let mut s0 = init.q.clone();
        if contact {
            s0.push(init.z);
        }
        Ok((w, s0, ic))
    }

    pub fn lift(&mut self) -> Result<Lift> {
        let cfg = self.cfg;
        let fam = cfg.family()?;
        let (w, s0, ic) = self.lift_setup()?;
        let l0 = vec![0.0; fam.k()];
        let red = integrate_reduced(&fam, &w, &s0, &ic, &l0, &cfg.pinned())?;
        lift_solution(&w, &red, &fam, &l0, &cfg.pinned())
    }

    fn implicit_explicit(&self) -> Result<f64> {
        let cfg = self.cfg;
        let Model::Herglotz { sys, .. } = cfg.model()? else {
            return Err(not_applicable("implicit_explicit", cfg));
        };
        let n = cfg.n;
        let dae = self.dae_run()?;
        let exp = self.explicit_run()?;
        let idx: Vec<usize> = (n..2 * n).collect();
        let mut mapped = Vec::with_capacity(exp.len());
        for s in &exp.states {
            let (_, p) = sys.l.grad_at(s, &idx)?;
            let mut x = s[..n].to_vec();
            x.extend(p);
            x.push(s[2 * n]);
            mapped.push(x);
        }
        Ok(sup_gap(&dae.states, &mapped))
    }

    fn gauge_reduction(&self) -> Result<f64> {
        let cfg = self.cfg;
        let spec = cfg
            .metadata
            .get("reduced")
            .ok_or_else(|| not_applicable("gauge_reduction", cfg))?;
        let lag = spec.get("lagrangian").and_then(|v| v.as_str()).unwrap_or_default();
        let keep: Vec<usize> = spec
            .get("keep")
            .and_then(|v| v.as_array())
            .map(|a| a.iter().filter_map(|i| i.as_u64().map(|i| i as usize - 1)).collect())
            .unwrap_or_default();
        let m = keep.len();
        let flow = cfg.kind.flow().ok_or_else(|| not_applicable("gauge_reduction", cfg))?;
        let small = MorseFamilySystem::herglotz(m, lag, flow).map_err(|e| e.at("/metadata/reduced/lagrangian"))?;
        let full = self.dae_run()?;
        let n = cfg.n;
        let project = |x: &[f64]| -> Vec<f64> {
            let mut y: Vec<f64> = keep.iter().map(|&i| x[i]).collect();
            y.extend(keep.iter().map(|&i| x[n + i]));
            y.push(x[2 * n]);
            y
        };
        let (_, l0) = cfg.initial_implicit()?;
        let l0: Vec<f64> = keep.iter().map(|&i| l0[i]).collect();
        let reduced = dae_integrate(&small, &project(&full.states[0]), &l0, &cfg.integrator()?, &[])?;
        let projected: Vec<Vec<f64>> = full.states.iter().map(|x| project(x)).collect();
        Ok(sup_gap(&projected, &reduced.states))
    }

    fn morse_rank(&mut self) -> Result<f64> {
        let cfg = self.cfg;
        let fam = cfg.family()?;
        if fam.k() == 0 {
            return Err(not_applicable("morse_rank", cfg));
        }
        let l0 = vec![0.0; fam.k()];
        let mut ranks = Vec::new();
        let mut bad = 0usize;
        for x in self.samples(fam.base_dim()) {
            let lambda = solve_constraint(&fam, &x, &l0, &cfg.pinned())
                .map(|r| r.lambda)
                .unwrap_or_else(|_| l0.clone());
            let r = morse_rank_check(&fam, &x, &lambda)?;
            if !r.ok {
                bad += 1;
            }
            ranks.push(r.rank);
        }
        self.details
            .insert("morse_rank".into(), json!({ "k": fam.k(), "per_sample": ranks }));
        Ok(bad as f64)
    }
}

/// `q(t)` for `q̈ + γq̇ + ω₀²q = 0`, underdamped, from `q(0) = q0`, `q̇(0) = v0`.
pub fn damped_oscillator(gamma: f64, omega0: f64, q0: f64, v0: f64) -> impl Fn(f64) -> f64 {
    let a = gamma / 2.0;
    let w = (omega0 * omega0 - a * a).sqrt();
    move |t| (-a * t).exp() * (q0 * (w * t).cos() + (v0 + a * q0) / w * (w * t).sin())
}

/// Largest error of the first coordinate against the documented damped
/// oscillator, if the config carries one.
pub fn closed_form_error(cfg: &SystemConfig, traj: &Trajectory) -> Option<f64> {
    let spec = cfg.metadata.get("closed_form")?;
    if spec.get("kind").and_then(|k| k.as_str()) != Some("damped_oscillator") || cfg.n != 1 {
        return None;
    }
    let gamma = spec.get("gamma").and_then(|v| v.as_f64()).unwrap_or(0.0);
    let w0 = spec.get("omega0").and_then(|v| v.as_f64()).unwrap_or(1.0);
    let (q0, v0) = (traj.states.first()?[0], traj.states[0][1]);
    let q = damped_oscillator(gamma, w0, q0, v0);
    Some(
        traj.times
            .iter()
            .zip(&traj.states)
            .fold(0.0, |m: f64, (&t, s)| m.max((s[0] - q(t)).abs())),
    )
}

/// Every check listed by the config, in order.
pub fn run_listed(
    cfg: &SystemConfig,
    opts: CheckOptions,
) -> Result<(Vec<CheckResult>, BTreeMap<String, serde_json::Value>)> {
    let mut checker = Checker::new(cfg, opts);
    let results = checker.run_all(&cfg.listed_invariants())?;
    Ok((results, checker.details))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::catalog;

    #[test]
    fn oscillator_formula() {
        let q = damped_oscillator(0.2, 1.0, 1.0, 0.0);
        let w = 0.99f64.sqrt();
        let t: f64 = 2.3;
        let want = (-0.1 * t).exp() * ((w * t).cos() + 0.1 / w * (w * t).sin());
        assert!((q(t) - want).abs() < 1e-15);
    }

    #[test]
    fn every_catalog_entry_passes_its_suite() {
        let mut failures = Vec::new();
        for cfg in catalog() {
            let mut opts = CheckOptions::for_config(&cfg);
            opts.samples = 20;
            let mut checker = Checker::new(&cfg, opts);
            for name in cfg.listed_invariants() {
                match checker.run(&name) {
                    Ok(r) if r.pass => {}
                    Ok(r) => failures.push(format!("{}: {name} = {:e} > {:e}", cfg.name, r.value, r.tolerance)),
                    Err(e) => failures.push(format!("{}: {name}: {e}", cfg.name)),
                }
            }
        }
        assert!(failures.is_empty(), "{failures:#?}");
    }
}
