//! Morse families `E(x, λ)` and the implicit dynamics they generate on the
//! constraint set `∂E/∂λ = 0`.

mod dae;
mod legendrian;
mod phi;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::dynamics::{field_from_derivatives, phase_vars, Flow, HamiltonianSystem};
use crate::error::{Error, Result};
use crate::expr::{indexed, Real, ScalarExpr};

pub use dae::{dae_integrate, ImplicitField};
pub(crate) use legendrian::tuple;
pub use legendrian::{legendrian_points, MorseImmersion, PointKind};
pub use phi::{phi_equivalence, PhiGenerator, PhiMap};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Contact,
    Evolution,
    Symplectic,
    /// A family over Q alone, generating `{(q, E_q, E)}` in `T*Q × ℝ`.
    /// It has no dynamics.
    Generator,
}

impl Variant {
    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Contact => "contact",
            Variant::Evolution => "evolution",
            Variant::Symplectic => "symplectic",
            Variant::Generator => "generator",
        }
    }

    pub fn flow(self) -> Option<Flow> {
        match self {
            Variant::Contact => Some(Flow::Contact),
            Variant::Evolution => Some(Flow::Evolution),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    /// Sup-norm target for `∂E/∂λ`.
    pub tol: f64,
    pub max_iter: usize,
    pub max_halvings: usize,
    /// Relative singular-value floor for the `λλ` block.
    pub sv_rel: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tol: 1e-10,
            max_iter: 50,
            max_halvings: 30,
            sv_rel: 1e-10,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MorseFamilySystem {
    pub n: usize,
    pub variant: Variant,
    pub gen: ScalarExpr,
    pub multipliers: Vec<String>,
    pub options: SolveOptions,
}

/// Base variables of a variant, in state order.
pub fn base_vars(n: usize, variant: Variant) -> Vec<String> {
    match variant {
        Variant::Contact | Variant::Evolution => phase_vars(n),
        Variant::Symplectic => {
            let mut v = indexed("q", n);
            v.extend(indexed("p", n));
            v
        }
        Variant::Generator => indexed("q", n),
    }
}

impl MorseFamilySystem {
    pub fn new(n: usize, variant: Variant, text: &str, multipliers: &[impl AsRef<str>]) -> Result<Self> {
        if n == 0 {
            return Err(Error::dim("n must be at least 1"));
        }
        let multipliers: Vec<String> = multipliers.iter().map(|m| m.as_ref().to_string()).collect();
        let mut vars = base_vars(n, variant);
        for m in &multipliers {
            if vars.contains(m) {
                return Err(Error::Schema {
                    pointer: "/multipliers".into(),
                    message: format!("multiplier `{m}` clashes with a base variable"),
                });
            }
            vars.push(m.clone());
        }
        Ok(MorseFamilySystem {
            n,
            variant,
            gen: ScalarExpr::parse(text, &vars)?,
            multipliers,
            options: SolveOptions::default(),
        })
    }

    /// A multiplier-free family whose generator is the Hamiltonian itself.
    pub fn explicit(h: &HamiltonianSystem, flow: Flow) -> Self {
        MorseFamilySystem {
            n: h.n,
            variant: match flow {
                Flow::Contact => Variant::Contact,
                Flow::Evolution => Variant::Evolution,
            },
            gen: h.h.clone(),
            multipliers: Vec::new(),
            options: SolveOptions::default(),
        }
    }

    /// The Herglotz family `E = q̇·p − L` with multipliers `qd1..qdn`.
    pub fn herglotz(n: usize, lagrangian: &str, flow: Flow) -> Result<Self> {
        let qd = indexed("qd", n);
        let pairing: Vec<String> = (1..=n).map(|i| format!("qd{i}*p{i}")).collect();
        let text = format!("{} - ({lagrangian})", pairing.join(" + "));
        let variant = match flow {
            Flow::Contact => Variant::Contact,
            Flow::Evolution => Variant::Evolution,
        };
        Self::new(n, variant, &text, &qd)
    }

    pub fn k(&self) -> usize {
        self.multipliers.len()
    }

    pub fn base_dim(&self) -> usize {
        match self.variant {
            Variant::Contact | Variant::Evolution => 2 * self.n + 1,
            Variant::Symplectic => 2 * self.n,
            Variant::Generator => self.n,
        }
    }

    /// Length of the integrated state; the symplectic variant carries `z` too.
    pub fn state_dim(&self) -> usize {
        match self.variant {
            Variant::Generator => self.n,
            _ => 2 * self.n + 1,
        }
    }

    fn base_of<'a, T>(&self, x: &'a [T]) -> &'a [T] {
        &x[..self.base_dim()]
    }

    fn point<T: Real>(&self, x: &[T], lambda: &[T]) -> Result<Vec<T>> {
        if x.len() < self.base_dim() || lambda.len() != self.k() {
            return Err(Error::dim(format!(
                "point of length {} with {} multipliers, expected {} and {}",
                x.len(),
                lambda.len(),
                self.base_dim(),
                self.k()
            )));
        }
        let mut v = self.base_of(x).to_vec();
        v.extend_from_slice(lambda);
        Ok(v)
    }

    pub fn value<T: Real>(&self, x: &[T], lambda: &[T]) -> Result<T> {
        self.gen.eval_generic(&self.point(x, lambda)?)
    }

    /// `(E, ∂E/∂x)` over the base variables.
    pub fn base_derivatives<T: Real>(&self, x: &[T], lambda: &[T]) -> Result<(T, Vec<T>)> {
        let idx: Vec<usize> = (0..self.base_dim()).collect();
        self.gen.grad_generic(&self.point(x, lambda)?, &idx)
    }

    /// `∂E/∂λ`.
    pub fn constraint<T: Real>(&self, x: &[T], lambda: &[T]) -> Result<Vec<T>> {
        let d = self.base_dim();
        let idx: Vec<usize> = (d..d + self.k()).collect();
        Ok(self.gen.grad_generic(&self.point(x, lambda)?, &idx)?.1)
    }

    /// Rows `λ`, columns `(x, λ)`: the matrix `[E_λx | E_λλ]`.
    pub fn constraint_jacobian(&self, x: &[f64], lambda: &[f64]) -> Result<DMatrix<f64>> {
        let d = self.base_dim();
        let h = self.gen.full_hess_at(&self.point(x, lambda)?)?;
        Ok(h.rows(d, self.k()).into_owned())
    }

    pub fn constraint_residual(&self, x: &[f64], lambda: &[f64]) -> Result<f64> {
        Ok(self.constraint(x, lambda)?.iter().fold(0.0f64, |m, v| m.max(v.abs())))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankReport {
    pub rank: usize,
    pub ok: bool,
    pub singular_values: Vec<f64>,
}

fn numerical_rank(m: &DMatrix<f64>, rel: f64) -> (usize, Vec<f64>) {
    if m.nrows() == 0 || m.ncols() == 0 {
        return (0, Vec::new());
    }
    let sv = m.clone().svd(false, false).singular_values;
    let max = sv.max();
    let rank = if max == 0.0 {
        0
    } else {
        sv.iter().filter(|&&s| s > rel * max).count()
    };
    (rank, sv.iter().copied().collect())
}

/// Transversality of `∂E/∂λ = 0`: the matrix `[E_λx | E_λλ]` must have full
/// row rank `k`. A multiplier-free family passes trivially.
pub fn morse_rank_check(sys: &MorseFamilySystem, x: &[f64], lambda: &[f64]) -> Result<RankReport> {
    let j = sys.constraint_jacobian(x, lambda)?;
    let (rank, singular_values) = numerical_rank(&j, sys.options.sv_rel);
    Ok(RankReport {
        rank,
        ok: rank == sys.k(),
        singular_values,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstraintSolveReport {
    pub lambda: Vec<f64>,
    pub iterations: usize,
    /// Sup-norm of the free components of `∂E/∂λ`.
    pub residual_norm: f64,
    pub jacobian_min_sv: f64,
    pub jacobian_max_sv: f64,
}

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// Damped Newton on `∂E/∂λ = 0` over the multipliers that are not pinned.
/// `pinned[i] = Some(v)` holds multiplier `i` at `v`.
pub fn solve_constraint(
    sys: &MorseFamilySystem,
    x: &[f64],
    lambda0: &[f64],
    pinned: &[Option<f64>],
) -> Result<ConstraintSolveReport> {
    let k = sys.k();
    if lambda0.len() != k || (!pinned.is_empty() && pinned.len() != k) {
        return Err(Error::dim(format!("{k} multipliers expected")));
    }
    let opts = sys.options;
    let mut lambda = lambda0.to_vec();
    for (i, p) in pinned.iter().enumerate() {
        if let Some(v) = p {
            lambda[i] = *v;
        }
    }
    let free: Vec<usize> = (0..k).filter(|&i| pinned.get(i).is_none_or(|p| p.is_none())).collect();
    let free_residual = |lam: &[f64]| -> Result<Vec<f64>> {
        let g = sys.constraint(x, lam)?;
        Ok(free.iter().map(|&i| g[i]).collect())
    };
    let mut report = ConstraintSolveReport {
        lambda: lambda.clone(),
        iterations: 0,
        residual_norm: 0.0,
        jacobian_min_sv: f64::INFINITY,
        jacobian_max_sv: 0.0,
    };
    if free.is_empty() {
        return Ok(report);
    }
    let d = sys.base_dim();
    let mut g = free_residual(&lambda)?;
    let mut r = sup(&g);
    for it in 0..=opts.max_iter {
        let full = sys.constraint_jacobian(x, &lambda)?;
        let jac = DMatrix::from_fn(free.len(), free.len(), |a, b| full[(free[a], d + free[b])]);
        let svd = jac.svd(true, true);
        let (min_sv, max_sv) = (svd.singular_values.min(), svd.singular_values.max());
        report.lambda = lambda.clone();
        report.iterations = it;
        report.residual_norm = r;
        report.jacobian_min_sv = min_sv;
        report.jacobian_max_sv = max_sv;
        if max_sv == 0.0 || min_sv < opts.sv_rel * max_sv {
            return Err(Error::SingularConstraintJacobian { min_sv, max_sv });
        }
        if r <= opts.tol {
            return Ok(report);
        }
        if it == opts.max_iter {
            break;
        }
        let delta = svd
            .solve(&(-DVector::from_vec(g.clone())), 0.0)
            .map_err(|e| Error::Domain(e.to_string()))?;
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..=opts.max_halvings {
            let mut trial = lambda.clone();
            for (a, &i) in free.iter().enumerate() {
                trial[i] += t * delta[a];
            }
            if let Ok(gt) = free_residual(&trial) {
                let rt = sup(&gt);
                if rt < r {
                    lambda = trial;
                    g = gt;
                    r = rt;
                    accepted = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    Err(Error::NoConvergence(Box::new(report)))
}

/// Tangent of the implicit flow at `x` for a fixed `λ` (which need not solve
/// the constraint). Layout `(q, p, z)`; the symplectic variant leaves `ż = 0`.
pub fn implicit_rhs<T: Real>(sys: &MorseFamilySystem, x: &[T], lambda: &[T]) -> Result<Vec<T>> {
    let n = sys.n;
    if x.len() != sys.state_dim() {
        return Err(Error::dim(format!(
            "state of length {}, expected {}",
            x.len(),
            sys.state_dim()
        )));
    }
    match sys.variant {
        Variant::Contact | Variant::Evolution => {
            let (e, g) = sys.base_derivatives(x, lambda)?;
            let flow = sys.variant.flow().expect("contact-type variant");
            Ok(field_from_derivatives(&x[n..2 * n], e, &g, flow))
        }
        Variant::Symplectic => {
            let (_, g) = sys.base_derivatives(x, lambda)?;
            let mut out = g[n..2 * n].to_vec();
            out.extend(g[..n].iter().map(|&v| -v));
            out.push(T::cst(0.0));
            Ok(out)
        }
        Variant::Generator => Err(Error::dim("generator families carry no dynamics")),
    }
}
