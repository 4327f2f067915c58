//! Contact and symplectic structures on the extended cotangent bundle
//! `T*Q × ℝ` and its lifts, written out in Darboux coordinates.
//!
//! Flat layouts used throughout (n = dim Q):
//!
//! | space | layout | length |
//! |---|---|---|
//! | contact state | `q, p, z` | 2n+1 |
//! | extended tangent | `q, p, z, q̇, ṗ, ż, u` | 4n+3 |
//! | horizontal | `q, p, z, q̇, ṗ, u` | 4n+2 |
//! | covector jet | `q, p, z, π_q, π_p, π_z, s` | 4n+3 |
//! | covector | `q, p, z, π_q, π_p, π_z` | 4n+2 |
//! | tangent of `T*Q` | `q, p, q̇, ṗ` | 4n |

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::expr::{Dual, Real, ScalarExpr};

#[derive(Debug, Clone, PartialEq)]
pub struct ContactState {
    pub q: Vec<f64>,
    pub p: Vec<f64>,
    pub z: f64,
}

impl ContactState {
    pub fn new(q: Vec<f64>, p: Vec<f64>, z: f64) -> Self {
        assert_eq!(q.len(), p.len(), "q and p must have the same length");
        ContactState { q, p, z }
    }

    pub fn n(&self) -> usize {
        self.q.len()
    }

    pub fn from_flat(n: usize, x: &[f64]) -> Self {
        assert!(x.len() > 2 * n);
        ContactState {
            q: x[..n].to_vec(),
            p: x[n..2 * n].to_vec(),
            z: x[2 * n],
        }
    }

    pub fn to_flat(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(2 * self.n() + 1);
        v.extend_from_slice(&self.q);
        v.extend_from_slice(&self.p);
        v.push(self.z);
        v
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContactTangent {
    pub dq: Vec<f64>,
    pub dp: Vec<f64>,
    pub dz: f64,
}

impl ContactTangent {
    pub fn zero(n: usize) -> Self {
        ContactTangent {
            dq: vec![0.0; n],
            dp: vec![0.0; n],
            dz: 0.0,
        }
    }

    /// The Reeb field `∂/∂z`.
    pub fn reeb(n: usize) -> Self {
        ContactTangent {
            dz: 1.0,
            ..Self::zero(n)
        }
    }

    pub fn from_flat(n: usize, v: &[f64]) -> Self {
        let s = ContactState::from_flat(n, v);
        ContactTangent {
            dq: s.q,
            dp: s.p,
            dz: s.z,
        }
    }

    pub fn to_flat(&self) -> Vec<f64> {
        let mut v = self.dq.clone();
        v.extend_from_slice(&self.dp);
        v.push(self.dz);
        v
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContactCovector {
    pub a_q: Vec<f64>,
    pub a_p: Vec<f64>,
    pub a_z: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtTangentState {
    pub base: ContactState,
    pub dq: Vec<f64>,
    pub dp: Vec<f64>,
    pub dz: f64,
    pub u: f64,
}

impl ExtTangentState {
    pub fn from_flat(n: usize, x: &[f64]) -> Self {
        assert_eq!(x.len(), 4 * n + 3);
        ExtTangentState {
            base: ContactState::from_flat(n, x),
            dq: x[2 * n + 1..3 * n + 1].to_vec(),
            dp: x[3 * n + 1..4 * n + 1].to_vec(),
            dz: x[4 * n + 1],
            u: x[4 * n + 2],
        }
    }

    pub fn to_flat(&self) -> Vec<f64> {
        let mut v = self.base.to_flat();
        v.extend_from_slice(&self.dq);
        v.extend_from_slice(&self.dp);
        v.push(self.dz);
        v.push(self.u);
        v
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HorizontalState {
    pub base: ContactState,
    pub dq: Vec<f64>,
    pub dp: Vec<f64>,
    pub u: f64,
}

impl HorizontalState {
    pub fn from_flat(n: usize, y: &[f64]) -> Self {
        assert_eq!(y.len(), 4 * n + 2);
        HorizontalState {
            base: ContactState::from_flat(n, y),
            dq: y[2 * n + 1..3 * n + 1].to_vec(),
            dp: y[3 * n + 1..4 * n + 1].to_vec(),
            u: y[4 * n + 1],
        }
    }

    pub fn to_flat(&self) -> Vec<f64> {
        let mut v = self.base.to_flat();
        v.extend_from_slice(&self.dq);
        v.extend_from_slice(&self.dp);
        v.push(self.u);
        v
    }
}

/// A point of `T*(T*Q) × ℝ`. With `s` dropped it is a point of `T*(T*Q)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CovectorJet {
    pub base: ContactState,
    pub pi_q: Vec<f64>,
    pub pi_p: Vec<f64>,
    pub pi_z: f64,
    pub s: f64,
}

impl CovectorJet {
    pub fn from_flat(n: usize, x: &[f64]) -> Self {
        assert!(x.len() == 4 * n + 3 || x.len() == 4 * n + 2);
        CovectorJet {
            base: ContactState::from_flat(n, x),
            pi_q: x[2 * n + 1..3 * n + 1].to_vec(),
            pi_p: x[3 * n + 1..4 * n + 1].to_vec(),
            pi_z: x[4 * n + 1],
            s: x.get(4 * n + 2).copied().unwrap_or(0.0),
        }
    }

    pub fn to_flat(&self) -> Vec<f64> {
        let mut v = self.base.to_flat();
        v.extend_from_slice(&self.pi_q);
        v.extend_from_slice(&self.pi_p);
        v.push(self.pi_z);
        v.push(self.s);
        v
    }

    /// Flat layout without `s`.
    pub fn to_flat_covector(&self) -> Vec<f64> {
        let mut v = self.to_flat();
        v.pop();
        v
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn dot_t<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::cst(0.0), |acc, (&x, &y)| acc + x * y)
}

/// `η = dz − p·dq` contracted with `v`.
pub fn eta(x: &ContactState, v: &ContactTangent) -> f64 {
    assert_eq!(x.n(), v.dq.len());
    v.dz - dot(&x.p, &v.dq)
}

/// `dη = dq∧dp`.
pub fn deta(v1: &ContactTangent, v2: &ContactTangent) -> f64 {
    dot(&v1.dq, &v2.dp) - dot(&v2.dq, &v1.dp)
}

pub fn sharp_lambda(x: &ContactState, a: &ContactCovector) -> ContactTangent {
    assert_eq!(x.n(), a.a_q.len());
    ContactTangent {
        dq: a.a_p.clone(),
        dp: a.a_q.iter().zip(&x.p).map(|(aq, p)| -(aq + p * a.a_z)).collect(),
        dz: dot(&a.a_p, &x.p),
    }
}

/// `η^T = dż + u dz − (ṗ + u p)·dq − p·dq̇` on the extended tangent bundle.
pub fn eta_t(x: &[f64], v: &[f64]) -> f64 {
    let n = (x.len() - 3) / 4;
    assert_eq!(x.len(), 4 * n + 3);
    assert_eq!(v.len(), x.len());
    let (p, pd, u) = (&x[n..2 * n], &x[3 * n + 1..4 * n + 1], x[4 * n + 2]);
    let mut r = v[4 * n + 1] + u * v[2 * n];
    for i in 0..n {
        r -= (pd[i] + u * p[i]) * v[i] + p[i] * v[2 * n + 1 + i];
    }
    r
}

/// Exterior derivative of [`eta_t`]; constant coefficients except `u` and `p`.
pub fn deta_t(x: &[f64], v1: &[f64], v2: &[f64]) -> f64 {
    let n = (x.len() - 3) / 4;
    // same coefficients as ω_η once the ż slot is dropped
    let drop = |v: &[f64]| -> Vec<f64> {
        let mut w = v[..4 * n + 1].to_vec();
        w.push(v[4 * n + 2]);
        w
    };
    omega_eta(&drop(x), &drop(v1), &drop(v2))
}

/// `θ_η = u dz − (ṗ + u p)·dq + q̇·dp` on `ℌT*Q × ℝ`.
pub fn theta_eta(y: &[f64], v: &[f64]) -> f64 {
    let n = (y.len() - 2) / 4;
    assert_eq!(y.len(), 4 * n + 2);
    assert_eq!(v.len(), y.len());
    let (p, qd, pd, u) = (
        &y[n..2 * n],
        &y[2 * n + 1..3 * n + 1],
        &y[3 * n + 1..4 * n + 1],
        y[4 * n + 1],
    );
    let mut r = u * v[2 * n];
    for i in 0..n {
        r += -(pd[i] + u * p[i]) * v[i] + qd[i] * v[n + i];
    }
    r
}

/// `ω_η = du∧dz − dṗ∧dq − p du∧dq − u dp∧dq + dq̇∧dp`.
pub fn omega_eta(y: &[f64], v1: &[f64], v2: &[f64]) -> f64 {
    let n = (y.len() - 2) / 4;
    assert_eq!(y.len(), 4 * n + 2);
    let w = |a: f64, b: f64, c: f64, d: f64| a * d - b * c;
    let (iz, iu) = (2 * n, 4 * n + 1);
    let mut r = w(v1[iu], v1[iz], v2[iu], v2[iz]);
    for i in 0..n {
        let (iq, ip, iqd, ipd) = (i, n + i, 2 * n + 1 + i, 3 * n + 1 + i);
        let p = y[ip];
        let u = y[iu];
        r -= w(v1[ipd], v1[iq], v2[ipd], v2[iq]);
        r -= p * w(v1[iu], v1[iq], v2[iu], v2[iq]);
        r -= u * w(v1[ip], v1[iq], v2[ip], v2[iq]);
        r += w(v1[iqd], v1[ip], v2[iqd], v2[ip]);
    }
    r
}

/// Contact form `ds − π·dx` of `T*(T*Q) × ℝ`.
pub fn jet_eta(j: &[f64], v: &[f64]) -> f64 {
    let m = (j.len() - 1) / 2;
    assert_eq!(j.len(), 2 * m + 1);
    v[2 * m] - dot(&j[m..2 * m], &v[..m])
}

/// Minus the Liouville form, `−π·dx`, on `T*(T*Q)`.
pub fn canonical_theta(c: &[f64], v: &[f64]) -> f64 {
    let m = c.len() / 2;
    -dot(&c[m..2 * m], &v[..m])
}

/// `dx∧dπ`, the canonical symplectic form of `T*(T*Q)`.
pub fn canonical_omega(v1: &[f64], v2: &[f64]) -> f64 {
    let m = v1.len() / 2;
    dot(&v1[..m], &v2[m..2 * m]) - dot(&v2[..m], &v1[m..2 * m])
}

/// Tangent lift `dq̇∧dp + dq∧dṗ` of `dq∧dp` to `T(T*Q)`.
pub fn tangent_omega(v1: &[f64], v2: &[f64]) -> f64 {
    let n = v1.len() / 4;
    let (q, p, qd, pd) = (0..n, n..2 * n, 2 * n..3 * n, 3 * n..4 * n);
    dot(&v1[qd.clone()], &v2[p.clone()]) - dot(&v2[qd], &v1[p]) + dot(&v1[q.clone()], &v2[pd.clone()])
        - dot(&v2[q], &v1[pd])
}

pub fn beta_c_flat<T: Real>(x: &[T]) -> Vec<T> {
    let n = (x.len() - 3) / 4;
    let (p, qd, pd, zd, u) = (
        &x[n..2 * n],
        &x[2 * n + 1..3 * n + 1],
        &x[3 * n + 1..4 * n + 1],
        x[4 * n + 1],
        x[4 * n + 2],
    );
    let mut out = x[..2 * n + 1].to_vec();
    out.extend((0..n).map(|i| u * p[i] + pd[i]));
    out.extend(qd.iter().map(|&v| -v));
    out.push(-u);
    out.push(zd - dot_t(p, qd));
    out
}

pub fn beta_c_inv_flat<T: Real>(c: &[T]) -> Vec<T> {
    let n = (c.len() - 3) / 4;
    let (p, pi_q, pi_p, pi_z, s) = (
        &c[n..2 * n],
        &c[2 * n + 1..3 * n + 1],
        &c[3 * n + 1..4 * n + 1],
        c[4 * n + 1],
        c[4 * n + 2],
    );
    let u = -pi_z;
    let qd: Vec<T> = pi_p.iter().map(|&v| -v).collect();
    let mut out = c[..2 * n + 1].to_vec();
    out.extend(qd.iter().copied());
    out.extend((0..n).map(|i| pi_q[i] - u * p[i]));
    out.push(s + dot_t(p, &qd));
    out.push(u);
    out
}

pub fn beta_0_flat<T: Real>(y: &[T]) -> Vec<T> {
    let n = (y.len() - 2) / 4;
    let (p, qd, pd, u) = (
        &y[n..2 * n],
        &y[2 * n + 1..3 * n + 1],
        &y[3 * n + 1..4 * n + 1],
        y[4 * n + 1],
    );
    let mut out = y[..2 * n + 1].to_vec();
    out.extend((0..n).map(|i| u * p[i] + pd[i]));
    out.extend(qd.iter().map(|&v| -v));
    out.push(-u);
    out
}

pub fn beta_0_inv_flat<T: Real>(c: &[T]) -> Vec<T> {
    let n = (c.len() - 2) / 4;
    let (p, pi_q, pi_p, pi_z) = (
        &c[n..2 * n],
        &c[2 * n + 1..3 * n + 1],
        &c[3 * n + 1..4 * n + 1],
        c[4 * n + 1],
    );
    let u = -pi_z;
    let mut out = c[..2 * n + 1].to_vec();
    out.extend(pi_p.iter().map(|&v| -v));
    out.extend((0..n).map(|i| pi_q[i] - u * p[i]));
    out.push(u);
    out
}

pub fn j_embed_flat<T: Real>(y: &[T]) -> Vec<T> {
    let n = (y.len() - 2) / 4;
    let mut out = y[..4 * n + 1].to_vec();
    out.push(dot_t(&y[n..2 * n], &y[2 * n + 1..3 * n + 1]));
    out.push(y[4 * n + 1]);
    out
}

pub fn beta_c(x: &ExtTangentState) -> CovectorJet {
    let n = x.base.n();
    CovectorJet::from_flat(n, &beta_c_flat(&x.to_flat()))
}

pub fn beta_c_inv(c: &CovectorJet) -> ExtTangentState {
    let n = c.base.n();
    ExtTangentState::from_flat(n, &beta_c_inv_flat(&c.to_flat()))
}

/// The returned jet carries `s = 0`; only the covector part is meaningful.
pub fn beta_0(y: &HorizontalState) -> CovectorJet {
    let n = y.base.n();
    CovectorJet::from_flat(n, &beta_0_flat(&y.to_flat()))
}

pub fn beta_0_inv(c: &CovectorJet) -> HorizontalState {
    let n = c.base.n();
    HorizontalState::from_flat(n, &beta_0_inv_flat(&c.to_flat_covector()))
}

pub fn j_embed(y: &HorizontalState) -> ExtTangentState {
    let n = y.base.n();
    ExtTangentState::from_flat(n, &j_embed_flat(&y.to_flat()))
}

/// Directional derivative of a polynomial map at `x` along `v`, exact.
pub fn push_forward(f: impl Fn(&[Dual<f64>]) -> Vec<Dual<f64>>, x: &[f64], v: &[f64]) -> Vec<f64> {
    let xs: Vec<Dual<f64>> = x.iter().zip(v).map(|(&a, &b)| Dual::new(a, b)).collect();
    f(&xs).into_iter().map(|d| d.eps).collect()
}

/// `|(β^c)*(ds − π·dx)(V) − η^T(V)|` at `x`.
pub fn beta_c_pullback_defect(x: &[f64], v: &[f64]) -> f64 {
    let image = beta_c_flat(x);
    let dv = push_forward(beta_c_flat, x, v);
    (jet_eta(&image, &dv) - eta_t(x, v)).abs()
}

/// `|(β^0)*(−π·dx)(V) − θ_η(V)|` at `y`.
pub fn beta_0_pullback_defect(y: &[f64], v: &[f64]) -> f64 {
    let image = beta_0_flat(y);
    let dv = push_forward(beta_0_flat, y, v);
    (canonical_theta(&image, &dv) - theta_eta(y, v)).abs()
}

/// A smooth map written once over any [`Real`] scalar, so its Jacobian comes
/// from dual numbers.
pub trait SmoothMap {
    fn domain_dim(&self) -> usize;
    fn target_dim(&self) -> usize;
    fn eval<T: Real>(&self, s: &[T]) -> Result<Vec<T>>;
}

/// A parametrized submanifold: point and Jacobian (target × domain) at a parameter.
pub trait Immersion {
    fn domain_dim(&self) -> usize;
    fn target_dim(&self) -> usize;
    fn evaluate(&self, s: &[f64]) -> Result<(Vec<f64>, DMatrix<f64>)>;
}

/// Differentiates a [`SmoothMap`] with one dual pass per parameter.
pub struct Ad<M>(pub M);

impl<M: SmoothMap> Immersion for Ad<M> {
    fn domain_dim(&self) -> usize {
        self.0.domain_dim()
    }
    fn target_dim(&self) -> usize {
        self.0.target_dim()
    }
    fn evaluate(&self, s: &[f64]) -> Result<(Vec<f64>, DMatrix<f64>)> {
        let d = self.0.domain_dim();
        if s.len() != d {
            return Err(Error::dim(format!(
                "parameter of length {} for a map on ℝ^{d}",
                s.len()
            )));
        }
        let point = self.0.eval(s)?;
        let mut jac = DMatrix::zeros(point.len(), d);
        let mut ds: Vec<Dual<f64>> = s.iter().map(|&v| Dual::constant(v)).collect();
        for c in 0..d {
            ds[c].eps = 1.0;
            let col = self.0.eval(&ds);
            ds[c].eps = 0.0;
            for (r, v) in col?.iter().enumerate() {
                jac[(r, c)] = v.eps;
            }
        }
        Ok((point, jac))
    }
}

/// A map known only through point evaluations; Jacobian by central differences.
pub struct Sampled<F> {
    pub domain_dim: usize,
    pub target_dim: usize,
    pub f: F,
    pub step: f64,
}

impl<F: Fn(&[f64]) -> Result<Vec<f64>>> Sampled<F> {
    pub fn new(domain_dim: usize, target_dim: usize, f: F) -> Self {
        Sampled {
            domain_dim,
            target_dim,
            f,
            step: 1e-6,
        }
    }
}

impl<F: Fn(&[f64]) -> Result<Vec<f64>>> Immersion for Sampled<F> {
    fn domain_dim(&self) -> usize {
        self.domain_dim
    }
    fn target_dim(&self) -> usize {
        self.target_dim
    }
    fn evaluate(&self, s: &[f64]) -> Result<(Vec<f64>, DMatrix<f64>)> {
        let point = (self.f)(s)?;
        let mut jac = DMatrix::zeros(point.len(), s.len());
        let mut x = s.to_vec();
        for c in 0..s.len() {
            x[c] = s[c] + self.step;
            let plus = (self.f)(&x)?;
            x[c] = s[c] - self.step;
            let minus = (self.f)(&x)?;
            x[c] = s[c];
            for r in 0..point.len() {
                jac[(r, c)] = (plus[r] - minus[r]) / (2.0 * self.step);
            }
        }
        Ok((point, jac))
    }
}

/// Component-wise map given by expressions over the parameters.
pub struct ExprMap {
    pub components: Vec<ScalarExpr>,
    pub domain_dim: usize,
}

impl SmoothMap for ExprMap {
    fn domain_dim(&self) -> usize {
        self.domain_dim
    }
    fn target_dim(&self) -> usize {
        self.components.len()
    }
    fn eval<T: Real>(&self, s: &[T]) -> Result<Vec<T>> {
        self.components.iter().map(|c| c.eval_generic(s)).collect()
    }
}

/// First prolongation `q ↦ (q, ∇W(q), W(q))` of a function on Q.
pub struct Prolongation<'a> {
    pub w: &'a ScalarExpr,
    pub n: usize,
}

impl SmoothMap for Prolongation<'_> {
    fn domain_dim(&self) -> usize {
        self.n
    }
    fn target_dim(&self) -> usize {
        2 * self.n + 1
    }
    fn eval<T: Real>(&self, s: &[T]) -> Result<Vec<T>> {
        let idx: Vec<usize> = (0..self.n).collect();
        let (w, g) = self.w.grad_generic(s, &idx)?;
        let mut out = s.to_vec();
        out.extend(g);
        out.push(w);
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IsotropyForm {
    /// `η` on `T*Q × ℝ`.
    Eta,
    /// `η^T` on the extended tangent bundle.
    EtaT,
    /// `ω_η` on `ℌT*Q × ℝ`.
    OmegaEta,
    /// `ds − π·dx` on `T*(T*Q) × ℝ`.
    JetEta,
    /// `dx∧dπ` on `T*(T*Q)`.
    Canonical,
    /// `dq̇∧dp + dq∧dṗ` on `T(T*Q)`.
    Tangent,
}

impl IsotropyForm {
    pub fn name(self) -> &'static str {
        match self {
            IsotropyForm::Eta => "eta",
            IsotropyForm::EtaT => "eta_T",
            IsotropyForm::OmegaEta => "omega_eta",
            IsotropyForm::JetEta => "jet_eta",
            IsotropyForm::Canonical => "canonical",
            IsotropyForm::Tangent => "tangent_omega",
        }
    }

    fn fits(self, d: usize) -> bool {
        match self {
            IsotropyForm::Eta => d % 2 == 1,
            IsotropyForm::EtaT | IsotropyForm::JetEta => d >= 7 && (d - 3).is_multiple_of(4),
            IsotropyForm::OmegaEta | IsotropyForm::Canonical => d >= 6 && (d - 2).is_multiple_of(4),
            IsotropyForm::Tangent => d >= 4 && d.is_multiple_of(4),
        }
    }

    fn one_form(self, x: &[f64], v: &[f64]) -> Option<f64> {
        match self {
            IsotropyForm::Eta => {
                let n = (x.len() - 1) / 2;
                Some(v[2 * n] - dot(&x[n..2 * n], &v[..n]))
            }
            IsotropyForm::EtaT => Some(eta_t(x, v)),
            IsotropyForm::JetEta => Some(jet_eta(x, v)),
            _ => None,
        }
    }

    fn two_form(self, x: &[f64], a: &[f64], b: &[f64]) -> f64 {
        match self {
            IsotropyForm::Eta => {
                let n = (x.len() - 1) / 2;
                dot(&a[..n], &b[n..2 * n]) - dot(&b[..n], &a[n..2 * n])
            }
            IsotropyForm::EtaT => deta_t(x, a, b),
            IsotropyForm::OmegaEta => omega_eta(x, a, b),
            IsotropyForm::JetEta => {
                let m = (x.len() - 1) / 2;
                canonical_omega(&a[..2 * m], &b[..2 * m])
            }
            IsotropyForm::Canonical => canonical_omega(a, b),
            IsotropyForm::Tangent => tangent_omega(a, b),
        }
    }
}

/// Largest absolute value of the form pulled back to the parametrized
/// submanifold, over samples and coordinate directions (and pairs of them for
/// the two-form part).
pub fn pullback_isotropy_check<I: Immersion + ?Sized>(
    imm: &I,
    form: IsotropyForm,
    samples: &[Vec<f64>],
) -> Result<f64> {
    let d = imm.target_dim();
    if !form.fits(d) {
        return Err(Error::dim(format!(
            "form {} does not act on a {d}-dimensional space",
            form.name()
        )));
    }
    let mut worst = 0.0f64;
    for s in samples {
        let (x, jac) = imm.evaluate(s)?;
        if x.len() != d {
            return Err(Error::dim(format!(
                "immersion returned {} coordinates, expected {d}",
                x.len()
            )));
        }
        let cols: Vec<Vec<f64>> = jac.column_iter().map(|c| c.iter().copied().collect()).collect();
        for (a, ca) in cols.iter().enumerate() {
            if let Some(v) = form.one_form(&x, ca) {
                worst = worst.max(v.abs());
            }
            for cb in &cols[a + 1..] {
                worst = worst.max(form.two_form(&x, ca, cb).abs());
            }
        }
    }
    Ok(worst)
}
