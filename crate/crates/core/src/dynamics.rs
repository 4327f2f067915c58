//! Explicit vector fields and a fixed-step RK4 integrator.
//!
//! State layouts: Hamiltonian flows use `(q, p, z)`, the symplectic baseline
//! uses `(q, p, z)` with `z` carried along unchanged, and Herglotz flows use
//! `(q, qd, z)`.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::{indexed, Real, ScalarExpr};
use crate::geometry::{ContactState, ContactTangent, SmoothMap};

/// Which of the two Hamiltonian flows on `T*Q × ℝ` is meant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flow {
    Contact,
    Evolution,
}

impl Flow {
    pub fn as_str(self) -> &'static str {
        match self {
            Flow::Contact => "contact",
            Flow::Evolution => "evolution",
        }
    }
}

/// `q1..qn, p1..pn, z`.
pub fn phase_vars(n: usize) -> Vec<String> {
    let mut v = indexed("q", n);
    v.extend(indexed("p", n));
    v.push("z".into());
    v
}

/// `q1..qn, qd1..qdn, z`.
pub fn lagrangian_vars(n: usize) -> Vec<String> {
    let mut v = indexed("q", n);
    v.extend(indexed("qd", n));
    v.push("z".into());
    v
}

#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianSystem {
    pub n: usize,
    pub h: ScalarExpr,
}

impl HamiltonianSystem {
    pub fn new(n: usize, text: &str) -> Result<Self> {
        if n == 0 {
            return Err(Error::dim("n must be at least 1"));
        }
        Ok(HamiltonianSystem {
            n,
            h: ScalarExpr::parse(text, &phase_vars(n))?,
        })
    }

    pub fn hamiltonian(&self, x: &[f64]) -> Result<f64> {
        self.h.value_at(x)
    }

    /// `(H, ∂H/∂(q, p, z))` at `x`.
    pub fn derivatives<T: Real>(&self, x: &[T]) -> Result<(T, Vec<T>)> {
        let idx: Vec<usize> = (0..2 * self.n + 1).collect();
        self.h.grad_generic(x, &idx)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LagrangianSystem {
    pub n: usize,
    pub l: ScalarExpr,
}

impl LagrangianSystem {
    pub fn new(n: usize, text: &str) -> Result<Self> {
        if n == 0 {
            return Err(Error::dim("n must be at least 1"));
        }
        Ok(LagrangianSystem {
            n,
            l: ScalarExpr::parse(text, &lagrangian_vars(n))?,
        })
    }
}

/// Tangent of a contact-type flow from a generator's value and partials.
/// Shared by explicit and implicit systems so that a multiplier-free family
/// reproduces the explicit field bit for bit.
pub fn field_from_derivatives<T: Real>(p: &[T], e: T, grad: &[T], flow: Flow) -> Vec<T> {
    let n = p.len();
    let (e_q, e_p, e_z) = (&grad[..n], &grad[n..2 * n], grad[2 * n]);
    let mut out = Vec::with_capacity(2 * n + 1);
    out.extend_from_slice(e_p);
    out.extend((0..n).map(|i| -e_q[i] - p[i] * e_z));
    let p_hp = p.iter().zip(e_p).fold(T::cst(0.0), |acc, (&a, &b)| acc + a * b);
    out.push(match flow {
        Flow::Contact => p_hp - e,
        Flow::Evolution => p_hp,
    });
    out
}

pub fn hamiltonian_vf_flat<T: Real>(sys: &HamiltonianSystem, x: &[T], flow: Flow) -> Result<Vec<T>> {
    let n = sys.n;
    if x.len() != 2 * n + 1 {
        return Err(Error::dim(format!("state of length {} for n = {n}", x.len())));
    }
    let (e, g) = sys.derivatives(x)?;
    Ok(field_from_derivatives(&x[n..2 * n], e, &g, flow))
}

pub fn contact_vf(sys: &HamiltonianSystem, x: &ContactState) -> Result<ContactTangent> {
    let v = hamiltonian_vf_flat(sys, &x.to_flat(), Flow::Contact)?;
    Ok(ContactTangent::from_flat(sys.n, &v))
}

pub fn evolution_vf(sys: &HamiltonianSystem, x: &ContactState) -> Result<ContactTangent> {
    let v = hamiltonian_vf_flat(sys, &x.to_flat(), Flow::Evolution)?;
    Ok(ContactTangent::from_flat(sys.n, &v))
}

/// `(q̇, ṗ) = (F_p, −F_q)` for `F` over `q1..qn, p1..pn`.
pub fn symplectic_vf(f: &ScalarExpr, n: usize, x: &[f64]) -> Result<Vec<f64>> {
    if x.len() != 2 * n || f.vars().len() != 2 * n {
        return Err(Error::dim("symplectic field expects 2n coordinates"));
    }
    let (_, g) = f.full_grad_at(x)?;
    let mut out = g[n..].to_vec();
    out.extend(g[..n].iter().map(|v| -v));
    Ok(out)
}

/// Components of `ι_X dη − (dH − H_z η)` for `X = X_H`, ordered `dq, dp, dz`.
pub fn cartan_residual(sys: &HamiltonianSystem, x: &[f64]) -> Result<Vec<f64>> {
    let n = sys.n;
    let v = hamiltonian_vf_flat(sys, x, Flow::Contact)?;
    let (_, g) = sys.derivatives(x)?;
    let hz = g[2 * n];
    let p = &x[n..2 * n];
    let mut r = Vec::with_capacity(2 * n + 1);
    // ι_X (dq∧dp) = X^q dp − X^p dq ; η = dz − p dq
    r.extend((0..n).map(|i| -v[n + i] - (g[i] + hz * p[i])));
    r.extend((0..n).map(|i| v[i] - g[n + i]));
    // dz-part: 0 − (H_z − H_z·1)
    r.push(0.0);
    Ok(r)
}

/// `q̈` and `ż` of the Herglotz equations at `s = (q, qd, z)`.
pub fn herglotz_vf(sys: &LagrangianSystem, s: &[f64], flow: Flow) -> Result<Vec<f64>> {
    let n = sys.n;
    if s.len() != 2 * n + 1 {
        return Err(Error::dim(format!("state of length {} for n = {n}", s.len())));
    }
    let (l, g) = sys.l.full_grad_at(s)?;
    let hess = sys.l.full_hess_at(s)?;
    let qd = &s[n..2 * n];
    let (l_q, l_v, l_z) = (&g[..n], &g[n..2 * n], g[2 * n]);
    let zd = match flow {
        Flow::Contact => l,
        Flow::Evolution => qd.iter().zip(l_v).map(|(a, b)| a * b).sum(),
    };
    let m = hess.view((n, n), (n, n)).into_owned();
    let svd = m.clone().svd(true, true);
    let (min_sv, max_sv) = (svd.singular_values.min(), svd.singular_values.max());
    if max_sv == 0.0 || min_sv < 1e-10 * max_sv {
        return Err(Error::SingularLagrangian { min_sv, max_sv });
    }
    let rhs = DVector::from_iterator(
        n,
        (0..n).map(|i| {
            let mut r = l_q[i] + l_z * l_v[i] - hess[(n + i, 2 * n)] * zd;
            for j in 0..n {
                r -= hess[(n + i, j)] * qd[j];
            }
            r
        }),
    );
    let qdd = svd.solve(&rhs, 0.0).map_err(|e| Error::Domain(e.to_string()))?;
    let mut out = qd.to_vec();
    out.extend(qdd.iter());
    out.push(zd);
    Ok(out)
}

/// Graph `x ↦ (x, X_H(x), H_z(x))` (contact, into the extended tangent bundle)
/// or `x ↦ (x, ε_H^q, ε_H^p, H_z(x))` (evolution, into `ℌT*Q × ℝ`).
pub struct FieldGraph<'a> {
    pub sys: &'a HamiltonianSystem,
    pub flow: Flow,
}

impl SmoothMap for FieldGraph<'_> {
    fn domain_dim(&self) -> usize {
        2 * self.sys.n + 1
    }
    fn target_dim(&self) -> usize {
        match self.flow {
            Flow::Contact => 4 * self.sys.n + 3,
            Flow::Evolution => 4 * self.sys.n + 2,
        }
    }
    fn eval<T: Real>(&self, x: &[T]) -> Result<Vec<T>> {
        let n = self.sys.n;
        let (e, g) = self.sys.derivatives(x)?;
        let v = field_from_derivatives(&x[n..2 * n], e, &g, self.flow);
        let mut out = x.to_vec();
        match self.flow {
            Flow::Contact => out.extend(v),
            Flow::Evolution => out.extend_from_slice(&v[..2 * n]),
        }
        out.push(g[2 * n]);
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub h: f64,
    #[serde(rename = "T")]
    pub t_final: f64,
}

impl IntegratorConfig {
    pub fn new(h: f64, t_final: f64) -> Self {
        IntegratorConfig { h, t_final }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.h > 0.0 && self.h.is_finite()) {
            return Err(Error::dim(format!("step h = {} must be positive", self.h)));
        }
        if !(self.t_final > 0.0 && self.t_final.is_finite()) {
            return Err(Error::dim(format!("horizon T = {} must be positive", self.t_final)));
        }
        if self.t_final / self.h > 1e8 {
            return Err(Error::dim("T/h exceeds 1e8 steps"));
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        (self.t_final / self.h).round().max(1.0) as usize
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    /// Column names of a state vector.
    pub layout: Vec<String>,
    pub multipliers: Option<Vec<Vec<f64>>>,
    pub multiplier_names: Vec<String>,
    /// Per-node diagnostics. Quantities that only exist at interior nodes are
    /// NaN at the two ends.
    pub diagnostics: BTreeMap<String, Vec<f64>>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn step(&self) -> f64 {
        if self.times.len() < 2 {
            0.0
        } else {
            self.times[1] - self.times[0]
        }
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.layout.iter().position(|c| c == name)?;
        Some(self.states.iter().map(|s| s[i]).collect())
    }

    /// Largest absolute finite value of a diagnostic.
    pub fn diag_max(&self, name: &str) -> Option<f64> {
        self.diagnostics
            .get(name)
            .map(|v| v.iter().filter(|x| !x.is_nan()).fold(0.0f64, |m, x| m.max(x.abs())))
    }
}

/// Right-hand side of an autonomous first-order system, with hooks for
/// per-node diagnostics.
pub trait VectorField {
    fn layout(&self) -> Vec<String>;
    fn rhs(&mut self, x: &[f64]) -> Result<Vec<f64>>;

    /// Called on the initial state and after every accepted step.
    fn observe(&mut self, _step: usize, _x: &[f64]) -> Result<NodeRecord> {
        Ok(NodeRecord::default())
    }

    fn multiplier_names(&self) -> Vec<String> {
        Vec::new()
    }

    /// Whole-trajectory post-processing once the run ends.
    fn finish(&self, _traj: &mut Trajectory) {}
}

#[derive(Debug, Clone, Default)]
pub struct NodeRecord {
    pub diagnostics: Vec<(String, f64)>,
    pub multipliers: Option<Vec<f64>>,
}

/// A run that stopped early; `partial` holds every accepted node.
#[derive(Debug, Clone)]
pub struct Aborted {
    pub partial: Trajectory,
    pub error: Error,
}

impl From<Box<Aborted>> for Error {
    fn from(a: Box<Aborted>) -> Error {
        a.error
    }
}

fn push_node(traj: &mut Trajectory, t: f64, x: &[f64], rec: NodeRecord) {
    traj.times.push(t);
    traj.states.push(x.to_vec());
    for (k, v) in rec.diagnostics {
        traj.diagnostics.entry(k).or_default().push(v);
    }
    if let Some(l) = rec.multipliers {
        traj.multipliers.get_or_insert_with(Vec::new).push(l);
    }
}

/// Classical fixed-step RK4.
pub fn integrate<F: VectorField + ?Sized>(
    field: &mut F,
    x0: &[f64],
    cfg: &IntegratorConfig,
) -> std::result::Result<Trajectory, Box<Aborted>> {
    let mut traj = Trajectory {
        layout: field.layout(),
        multiplier_names: field.multiplier_names(),
        ..Default::default()
    };
    let abort = |traj: Trajectory, error: Error| Box::new(Aborted { partial: traj, error });
    if let Err(e) = cfg.validate() {
        return Err(abort(traj, e));
    }
    if x0.len() != traj.layout.len() {
        let e = Error::dim(format!(
            "initial state of length {}, expected {}",
            x0.len(),
            traj.layout.len()
        ));
        return Err(abort(traj, e));
    }
    let h = cfg.h;
    let steps = cfg.steps();
    let mut x = x0.to_vec();
    match field.observe(0, &x) {
        Ok(rec) => push_node(&mut traj, 0.0, &x, rec),
        Err(e) => return Err(abort(traj, e)),
    }
    let d = x.len();
    let mut stage = vec![0.0; d];
    for step in 1..=steps {
        let mut advance = || -> Result<Vec<f64>> {
            let k1 = field.rhs(&x)?;
            for i in 0..d {
                stage[i] = x[i] + 0.5 * h * k1[i];
            }
            let k2 = field.rhs(&stage)?;
            for i in 0..d {
                stage[i] = x[i] + 0.5 * h * k2[i];
            }
            let k3 = field.rhs(&stage)?;
            for i in 0..d {
                stage[i] = x[i] + h * k3[i];
            }
            let k4 = field.rhs(&stage)?;
            Ok((0..d)
                .map(|i| x[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
                .collect())
        };
        let next = match advance() {
            Ok(v) => v,
            Err(e) => return Err(abort(traj, e)),
        };
        if let Some(bad) = next.iter().find(|v| !v.is_finite()) {
            let e = Error::Domain(format!("non-finite state value {bad} at step {step}"));
            return Err(abort(traj, e));
        }
        x = next;
        match field.observe(step, &x) {
            Ok(rec) => push_node(&mut traj, step as f64 * h, &x, rec),
            Err(e) => return Err(abort(traj, e)),
        }
    }
    field.finish(&mut traj);
    Ok(traj)
}

/// Centered `dH/dt + H_z·H` at interior nodes.
pub(crate) fn dissipation_profile(times: &[f64], h_vals: &[f64], hz: &[f64]) -> Vec<f64> {
    let m = times.len();
    (0..m)
        .map(|i| {
            if i == 0 || i + 1 == m {
                f64::NAN
            } else {
                let dt = times[i + 1] - times[i - 1];
                (h_vals[i + 1] - h_vals[i - 1]) / dt + hz[i] * h_vals[i]
            }
        })
        .collect()
}

pub(crate) fn drift_profile(vals: &[f64]) -> Vec<f64> {
    let v0 = vals.first().copied().unwrap_or(0.0);
    vals.iter().map(|v| (v - v0).abs()).collect()
}

/// Contact or evolution flow of a Hamiltonian.
pub struct HamiltonianField<'a> {
    pub sys: &'a HamiltonianSystem,
    pub flow: Flow,
}

impl VectorField for HamiltonianField<'_> {
    fn layout(&self) -> Vec<String> {
        phase_vars(self.sys.n)
    }

    fn rhs(&mut self, x: &[f64]) -> Result<Vec<f64>> {
        hamiltonian_vf_flat(self.sys, x, self.flow)
    }

    fn observe(&mut self, _step: usize, x: &[f64]) -> Result<NodeRecord> {
        hamiltonian_diagnostics(self.sys, self.flow, x)
    }

    fn finish(&self, traj: &mut Trajectory) {
        finish_hamiltonian(self.flow, traj);
    }
}

pub(crate) fn hamiltonian_diagnostics(sys: &HamiltonianSystem, flow: Flow, x: &[f64]) -> Result<NodeRecord> {
    let n = sys.n;
    let (e, g) = sys.derivatives(x)?;
    let v = field_from_derivatives(&x[n..2 * n], e, &g, flow);
    let eta: f64 = v[2 * n] - (0..n).map(|i| x[n + i] * v[i]).sum::<f64>();
    Ok(NodeRecord {
        diagnostics: vec![("H".into(), e), ("H_z".into(), g[2 * n]), ("eta".into(), eta)],
        multipliers: None,
    })
}

pub(crate) fn finish_hamiltonian(flow: Flow, traj: &mut Trajectory) {
    let (Some(h), Some(hz)) = (traj.diagnostics.get("H"), traj.diagnostics.get("H_z")) else {
        return;
    };
    match flow {
        Flow::Contact => {
            let d = dissipation_profile(&traj.times, h, hz);
            traj.diagnostics.insert("dissipation".into(), d);
        }
        Flow::Evolution => {
            let d = drift_profile(h);
            traj.diagnostics.insert("H_drift".into(), d);
        }
    }
}

/// Symplectic baseline on `(q, p, z)`; `z` stays constant.
pub struct SymplecticField<'a> {
    pub f: &'a ScalarExpr,
    pub n: usize,
}

impl VectorField for SymplecticField<'_> {
    fn layout(&self) -> Vec<String> {
        phase_vars(self.n)
    }

    fn rhs(&mut self, x: &[f64]) -> Result<Vec<f64>> {
        let mut v = symplectic_vf(self.f, self.n, &x[..2 * self.n])?;
        v.push(0.0);
        Ok(v)
    }

    fn observe(&mut self, _step: usize, x: &[f64]) -> Result<NodeRecord> {
        Ok(NodeRecord {
            diagnostics: vec![("F".into(), self.f.value_at(&x[..2 * self.n])?)],
            multipliers: None,
        })
    }

    fn finish(&self, traj: &mut Trajectory) {
        if let Some(f) = traj.diagnostics.get("F") {
            let d = drift_profile(f);
            traj.diagnostics.insert("F_drift".into(), d);
        }
    }
}

/// Regular Herglotz flow on `(q, qd, z)`.
pub struct HerglotzField<'a> {
    pub sys: &'a LagrangianSystem,
    pub flow: Flow,
}

impl VectorField for HerglotzField<'_> {
    fn layout(&self) -> Vec<String> {
        lagrangian_vars(self.sys.n)
    }

    fn rhs(&mut self, x: &[f64]) -> Result<Vec<f64>> {
        herglotz_vf(self.sys, x, self.flow)
    }

    fn observe(&mut self, _step: usize, x: &[f64]) -> Result<NodeRecord> {
        let n = self.sys.n;
        let (l, g) = self.sys.l.full_grad_at(x)?;
        // Legendre-transformed energy q̇·L_q̇ − L
        let energy: f64 = (0..n).map(|i| x[n + i] * g[n + i]).sum::<f64>() - l;
        Ok(NodeRecord {
            diagnostics: vec![("L".into(), l), ("energy".into(), energy)],
            multipliers: None,
        })
    }
}

/// Jacobian of a Hamiltonian flow at `x`, from the Hessian of `H`.
pub fn field_jacobian(sys: &HamiltonianSystem, x: &[f64], flow: Flow) -> Result<DMatrix<f64>> {
    let graph = crate::geometry::Ad(FieldGraph { sys, flow });
    let (_, jac) = crate::geometry::Immersion::evaluate(&graph, x)?;
    let d = 2 * sys.n + 1;
    Ok(jac.view((d, 0), (d, d)).into_owned())
}
