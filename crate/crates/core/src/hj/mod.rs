//! Hamilton–Jacobi conditions for sections `q ↦ (q, ∇W(q), ·)`: residuals,
//! relatedness of the reduced and full dynamics, and lifting reduced solutions.
//!
//! One entry point serves all six flavours. A multiplier-free family is the
//! explicit case and the family's variant picks contact, evolution or
//! symplectic.

mod lift;
mod table;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::{indexed, Dual, Real, ScalarExpr};
use crate::implicit::{solve_constraint, tuple, MorseFamilySystem, PointKind, Variant};

pub use lift::{integrate_reduced, lift_solution, Lift, ReducedField, REDUCED_DEFECT_TOL};
pub use table::{solve_evolution_hj_1d, uniform_grid, Branch, HjSolve1d, TabulatedW};

/// The function `W` on Q whose differential is the section.
#[derive(Debug, Clone, PartialEq)]
pub enum CharacteristicFn {
    Expr(ScalarExpr),
    /// One degree of freedom only.
    Table(TabulatedW),
}

impl CharacteristicFn {
    /// Parses `W` over `q1..qn`.
    pub fn expr(n: usize, text: &str) -> Result<Self> {
        Ok(CharacteristicFn::Expr(ScalarExpr::parse(text, &indexed("q", n))?))
    }

    pub fn n(&self) -> usize {
        match self {
            CharacteristicFn::Expr(e) => e.vars().len(),
            CharacteristicFn::Table(_) => 1,
        }
    }

    /// `(W, ∇W)` at `q`.
    pub fn grad_generic<T: Real>(&self, q: &[T]) -> Result<(T, Vec<T>)> {
        if q.len() != self.n() {
            return Err(Error::dim(format!("W takes {} coordinates, got {}", self.n(), q.len())));
        }
        match self {
            CharacteristicFn::Expr(e) => {
                let idx: Vec<usize> = (0..q.len()).collect();
                e.grad_generic(q, &idx)
            }
            CharacteristicFn::Table(t) => {
                let v = t.value(Dual::new(q[0], T::cst(1.0)))?;
                Ok((v.re, vec![v.eps]))
            }
        }
    }

    pub fn value(&self, q: &[f64]) -> Result<f64> {
        Ok(self.grad_generic(q)?.0)
    }

    pub fn hessian(&self, q: &[f64]) -> Result<DMatrix<f64>> {
        let n = q.len();
        let mut h = DMatrix::zeros(n, n);
        let mut point: Vec<Dual<f64>> = q.iter().map(|&v| Dual::constant(v)).collect();
        for j in 0..n {
            point[j].eps = 1.0;
            let g = self.grad_generic(&point);
            point[j].eps = 0.0;
            for (i, d) in g?.1.iter().enumerate() {
                h[(i, j)] = d.eps;
            }
        }
        Ok(h)
    }
}

/// Number of reduced coordinates: `(q, z)` for contact, `q` otherwise.
pub fn reduced_dim(sys: &MorseFamilySystem) -> usize {
    match sys.variant {
        Variant::Contact => sys.n + 1,
        _ => sys.n,
    }
}

pub fn reduced_layout(sys: &MorseFamilySystem) -> Vec<String> {
    let mut v = indexed("q", sys.n);
    if sys.variant == Variant::Contact {
        v.push("z".into());
    }
    v
}

/// Human-readable flavour: explicit or implicit, times the variant.
pub fn variant_name(sys: &MorseFamilySystem) -> String {
    let base = sys.variant.as_str();
    if sys.k() == 0 {
        base.to_string()
    } else {
        format!("implicit-{base}")
    }
}

fn check(sys: &MorseFamilySystem, w: &CharacteristicFn, s_len: usize) -> Result<()> {
    if sys.variant == Variant::Generator {
        return Err(Error::dim("generator families carry no Hamilton–Jacobi problem"));
    }
    if w.n() != sys.n {
        return Err(Error::dim(format!("W has {} coordinates, the system {}", w.n(), sys.n)));
    }
    if s_len != reduced_dim(sys) {
        return Err(Error::dim(format!(
            "reduced point of length {s_len}, expected {}",
            reduced_dim(sys)
        )));
    }
    Ok(())
}

/// Base point of the family over the reduced point `s`.
pub fn section<T: Real>(sys: &MorseFamilySystem, w: &CharacteristicFn, s: &[T]) -> Result<Vec<T>> {
    let n = sys.n;
    let (wv, dw) = w.grad_generic(&s[..n])?;
    let mut x = s[..n].to_vec();
    x.extend(dw);
    match sys.variant {
        Variant::Contact => x.push(s[n]),
        Variant::Evolution => x.push(wv),
        _ => {}
    }
    Ok(x)
}

/// The integrated state over `s`; symplectic states carry `z = 0`.
pub fn lifted_state(sys: &MorseFamilySystem, w: &CharacteristicFn, s: &[f64]) -> Result<Vec<f64>> {
    let mut x = section(sys, w, s)?;
    if sys.variant == Variant::Symplectic {
        x.push(0.0);
    }
    Ok(x)
}

/// Multipliers on the section at `s`, by Newton from `lambda0`.
pub fn solve_on_section(
    sys: &MorseFamilySystem,
    w: &CharacteristicFn,
    s: &[f64],
    lambda0: &[f64],
    pinned: &[Option<f64>],
) -> Result<Vec<f64>> {
    check(sys, w, s.len())?;
    if sys.k() == 0 {
        return Ok(Vec::new());
    }
    let x = section(sys, w, s)?;
    Ok(solve_constraint(sys, &x, lambda0, pinned)?.lambda)
}

/// Largest `|∂E/∂λ|` accepted by [`reduced_vf`].
pub const SECTION_CONSTRAINT_TOL: f64 = 1e-10;

fn reduced_unchecked(sys: &MorseFamilySystem, w: &CharacteristicFn, s: &[f64], lambda: &[f64]) -> Result<Vec<f64>> {
    let n = sys.n;
    let x = section(sys, w, s)?;
    let (e, g) = sys.base_derivatives(&x, lambda)?;
    let mut v = g[n..2 * n].to_vec();
    if sys.variant == Variant::Contact {
        let zdot = x[n..2 * n].iter().zip(&g[n..2 * n]).map(|(p, hp)| p * hp).sum::<f64>() - e;
        v.push(zdot);
    }
    Ok(v)
}

/// Reduced field on the base: `q̇ = E_p`, plus `ż = ∇W·E_p − E` for contact,
/// all on the section.
pub fn reduced_vf(sys: &MorseFamilySystem, w: &CharacteristicFn, s: &[f64], lambda: &[f64]) -> Result<Vec<f64>> {
    check(sys, w, s.len())?;
    if sys.k() > 0 {
        let x = section(sys, w, s)?;
        let residual = sys.constraint_residual(&x, lambda)?;
        if residual > SECTION_CONSTRAINT_TOL {
            return Err(Error::ConstraintViolated { residual });
        }
    }
    reduced_unchecked(sys, w, s, lambda)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HjReport {
    pub variant: String,
    /// The `dq` components of the condition.
    pub residual: Vec<f64>,
    pub constraint_residual: Vec<f64>,
    pub dz_cancellation: f64,
    pub tolerance: f64,
    pub verdict: bool,
}

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

impl HjReport {
    pub fn residual_norm(&self) -> f64 {
        sup(&self.residual)
    }

    pub fn constraint_norm(&self) -> f64 {
        sup(&self.constraint_residual)
    }
}

/// The Hamilton–Jacobi condition at `s`, with `λ` held fixed.
///
/// Contact: `∂_q(E∘γ) + E_z ∇W`, the `dq` part of `d(E∘γ) − γ*(E_z η)`.
/// Evolution and symplectic: `∇_q(E∘γ)`, which removes the constant `c`.
pub fn hj_residual(
    sys: &MorseFamilySystem,
    w: &CharacteristicFn,
    s: &[f64],
    lambda: &[f64],
    tolerance: f64,
) -> Result<HjReport> {
    check(sys, w, s.len())?;
    let n = sys.n;
    let x = section(sys, w, s)?;
    let (_, g) = sys.base_derivatives(&x, lambda)?;
    let lam: Vec<Dual<f64>> = lambda.iter().map(|&l| Dual::constant(l)).collect();
    let mut sd: Vec<Dual<f64>> = s.iter().map(|&v| Dual::constant(v)).collect();
    let mut composed = Vec::with_capacity(s.len());
    for i in 0..s.len() {
        sd[i].eps = 1.0;
        let r = section(sys, w, &sd).and_then(|xd| sys.value(&xd, &lam));
        sd[i].eps = 0.0;
        composed.push(r?.eps);
    }
    let mut residual = composed[..n].to_vec();
    let mut dz_cancellation = 0.0;
    if matches!(sys.variant, Variant::Contact | Variant::Evolution) {
        let ez = g[2 * n];
        if sys.variant == Variant::Contact {
            let (_, dw) = w.grad_generic(&s[..n])?;
            for (r, wi) in residual.iter_mut().zip(&dw) {
                *r += ez * wi;
            }
        }
        // dz part of d(E∘γ) against γ*(E_z η), with γ(q, z) = (q, ∇W, z)
        let mut xd: Vec<Dual<f64>> = x.iter().map(|&v| Dual::constant(v)).collect();
        xd[2 * n].eps = 1.0;
        dz_cancellation = sys.value(&xd, &lam)?.eps - ez;
    }
    let constraint_residual = sys.constraint(&x, lambda)?;
    let verdict = sup(&residual) <= tolerance && sup(&constraint_residual) <= tolerance;
    Ok(HjReport {
        variant: variant_name(sys),
        residual,
        constraint_residual,
        dz_cancellation,
        tolerance,
        verdict,
    })
}

/// Lifted reduced tangent minus the full tuple at `γ(s)`, slot by slot.
///
/// Contact compares with `(x, X, E_z)`, evolution with the evolution field
/// pushed into the extended tangent bundle, symplectic with `(x, E_p, −E_q)`.
/// Only the `ṗ` slots can differ.
pub fn gamma_mismatch(sys: &MorseFamilySystem, w: &CharacteristicFn, s: &[f64], lambda: &[f64]) -> Result<Vec<f64>> {
    check(sys, w, s.len())?;
    let n = sys.n;
    let x = section(sys, w, s)?;
    let (kind, mut lifted) = match sys.variant {
        Variant::Contact => (PointKind::Ne, x.clone()),
        Variant::Evolution => (PointKind::JSf, x.clone()),
        _ => (PointKind::Tangent, x.clone()),
    };
    let full = tuple(sys, kind, &x, lambda)?;
    let red = reduced_unchecked(sys, w, s, lambda)?;
    let qdot = &red[..n];
    let hess = w.hessian(&s[..n])?;
    let pdot = &hess * nalgebra::DVector::from_column_slice(qdot);
    lifted.extend_from_slice(qdot);
    lifted.extend(pdot.iter());
    match sys.variant {
        Variant::Contact => lifted.push(red[n]),
        Variant::Evolution => lifted.push(x[n..2 * n].iter().zip(qdot).map(|(p, v)| p * v).sum()),
        _ => {}
    }
    if kind != PointKind::Tangent {
        // the conformal factor is carried over unchanged
        lifted.push(full[full.len() - 1]);
    }
    Ok(lifted.iter().zip(&full).map(|(a, b)| a - b).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HjSweep {
    pub variant: String,
    pub samples: usize,
    /// Per sample: residual sup-norm, relatedness mismatch, constraint residual.
    pub residual: Vec<f64>,
    pub mismatch: Vec<f64>,
    pub constraint: Vec<f64>,
    pub dz_cancellation: f64,
    /// Largest gap between a `ṗ` mismatch and the matching residual entry.
    pub slot_gap: f64,
}

impl HjSweep {
    pub fn residual_sup(&self) -> f64 {
        self.residual.iter().fold(0.0, |m: f64, v| m.max(*v))
    }

    pub fn mismatch_sup(&self) -> f64 {
        self.mismatch.iter().fold(0.0, |m: f64, v| m.max(*v))
    }

    pub fn constraint_sup(&self) -> f64 {
        self.constraint.iter().fold(0.0, |m: f64, v| m.max(*v))
    }

    /// Whether both conditions give the same verdict on every sample at `eps`.
    pub fn verdicts_agree(&self, eps: f64) -> bool {
        self.residual
            .iter()
            .zip(&self.mismatch)
            .zip(&self.constraint)
            .all(|((r, m), c)| (r.max(*c) <= eps) == (m.max(*c) <= eps))
    }
}

/// Both conditions over many reduced samples. Multipliers are solved on the
/// section at each sample, from `lambda0`.
pub fn hj_sweep(
    sys: &MorseFamilySystem,
    w: &CharacteristicFn,
    samples: &[Vec<f64>],
    lambda0: &[f64],
    pinned: &[Option<f64>],
) -> Result<HjSweep> {
    let n = sys.n;
    let mut out = HjSweep {
        variant: variant_name(sys),
        samples: samples.len(),
        residual: Vec::with_capacity(samples.len()),
        mismatch: Vec::with_capacity(samples.len()),
        constraint: Vec::with_capacity(samples.len()),
        dz_cancellation: 0.0,
        slot_gap: 0.0,
    };
    for s in samples {
        let lambda = solve_on_section(sys, w, s, lambda0, pinned)?;
        let r = hj_residual(sys, w, s, &lambda, 0.0)?;
        let m = gamma_mismatch(sys, w, s, &lambda)?;
        let off = match sys.variant {
            Variant::Symplectic => 3 * n,
            _ => 3 * n + 1,
        };
        for i in 0..n {
            out.slot_gap = out.slot_gap.max((m[off + i] - r.residual[i]).abs());
        }
        out.residual.push(r.residual_norm());
        out.mismatch.push(sup(&m));
        out.constraint.push(r.constraint_norm());
        out.dz_cancellation = out.dz_cancellation.max(r.dz_cancellation.abs());
    }
    Ok(out)
}

/// Largest relatedness mismatch over the samples.
pub fn gamma_related_check(
    sys: &MorseFamilySystem,
    w: &CharacteristicFn,
    samples: &[Vec<f64>],
    lambda0: &[f64],
    pinned: &[Option<f64>],
) -> Result<f64> {
    let mut worst = 0.0f64;
    for s in samples {
        let lambda = solve_on_section(sys, w, s, lambda0, pinned)?;
        worst = worst.max(sup(&gamma_mismatch(sys, w, s, &lambda)?));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests;
