//! Points of the submanifolds a Morse family generates, and a local
//! parametrization of them for isotropy checks.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::{solve_constraint, MorseFamilySystem, Variant};
use crate::dynamics::{field_from_derivatives, Flow};
use crate::error::{Error, Result};
use crate::expr::{Dual, Real};
use crate::geometry::{Immersion, IsotropyForm};

/// Which tuple to emit on `∂E/∂λ = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointKind {
    /// `(x, E_p, −E_q − pE_z, p·E_p − E, E_z)` in the extended tangent bundle.
    Ne,
    /// `(x, −E_q, −E_p, −E_z, −E)` in `T*(T*Q) × ℝ`.
    HamLeg,
    /// `(x, E_p, −E_q − pE_z, E_z)` in `ℌT*Q × ℝ`.
    Sf,
    /// `S_F` pushed into the extended tangent bundle, `ż = p·E_p`.
    JSf,
    /// `(x, −E_q, −E_p, −E_z)` in `T*(T*Q)`.
    S,
    /// `(q, p, F_p, −F_q)` in `T(T*Q)`.
    Tangent,
    /// `(q, E_q, E)` in `T*Q × ℝ`.
    Generated,
}

impl PointKind {
    pub fn default_for(variant: Variant) -> PointKind {
        match variant {
            Variant::Contact => PointKind::Ne,
            Variant::Evolution => PointKind::Sf,
            Variant::Symplectic => PointKind::Tangent,
            Variant::Generator => PointKind::Generated,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            PointKind::Ne => "N_E",
            PointKind::HamLeg => "ham_leg",
            PointKind::Sf => "S_F",
            PointKind::JSf => "j(S_F)",
            PointKind::S => "S",
            PointKind::Tangent => "tangent",
            PointKind::Generated => "generated",
        }
    }

    pub fn fits(self, variant: Variant) -> bool {
        match self {
            PointKind::Tangent => variant == Variant::Symplectic,
            PointKind::Generated => variant == Variant::Generator,
            _ => matches!(variant, Variant::Contact | Variant::Evolution),
        }
    }

    pub fn dim(self, n: usize) -> usize {
        match self {
            PointKind::Ne | PointKind::HamLeg | PointKind::JSf => 4 * n + 3,
            PointKind::Sf | PointKind::S => 4 * n + 2,
            PointKind::Tangent => 4 * n,
            PointKind::Generated => 2 * n + 1,
        }
    }

    /// The form the emitted set is isotropic for, if any.
    pub fn form(self) -> Option<IsotropyForm> {
        match self {
            PointKind::Ne => Some(IsotropyForm::EtaT),
            PointKind::HamLeg => Some(IsotropyForm::JetEta),
            PointKind::Sf => Some(IsotropyForm::OmegaEta),
            PointKind::JSf => None,
            PointKind::S => Some(IsotropyForm::Canonical),
            PointKind::Tangent => Some(IsotropyForm::Tangent),
            PointKind::Generated => Some(IsotropyForm::Eta),
        }
    }
}

pub(crate) fn tuple<T: Real>(sys: &MorseFamilySystem, kind: PointKind, x: &[T], lambda: &[T]) -> Result<Vec<T>> {
    let n = sys.n;
    let (e, g) = sys.base_derivatives(x, lambda)?;
    let mut out = x[..sys.base_dim()].to_vec();
    let neg = |v: &[T]| v.iter().map(|&a| -a).collect::<Vec<T>>();
    match kind {
        PointKind::Ne => {
            out.extend(field_from_derivatives(&x[n..2 * n], e, &g, Flow::Contact));
            out.push(g[2 * n]);
        }
        PointKind::HamLeg => {
            out.extend(neg(&g));
            out.push(-e);
        }
        PointKind::Sf => {
            let v = field_from_derivatives(&x[n..2 * n], e, &g, Flow::Evolution);
            out.extend_from_slice(&v[..2 * n]);
            out.push(g[2 * n]);
        }
        PointKind::JSf => {
            out.extend(field_from_derivatives(&x[n..2 * n], e, &g, Flow::Evolution));
            out.push(g[2 * n]);
        }
        PointKind::S => out.extend(neg(&g)),
        PointKind::Tangent => {
            out.extend_from_slice(&g[n..2 * n]);
            out.extend(neg(&g[..n]));
        }
        PointKind::Generated => {
            out.extend(g);
            out.push(e);
        }
    }
    Ok(out)
}

fn check_kind(sys: &MorseFamilySystem, kind: PointKind) -> Result<()> {
    if !kind.fits(sys.variant) {
        return Err(Error::dim(format!(
            "{} points are not defined for {} families",
            kind.name(),
            sys.variant.as_str()
        )));
    }
    Ok(())
}

/// Solves the constraint at every base sample (each from `lambda0`) and emits
/// the requested tuple.
pub fn legendrian_points(
    sys: &MorseFamilySystem,
    samples: &[Vec<f64>],
    lambda0: &[f64],
    pinned: &[Option<f64>],
    kind: PointKind,
) -> Result<Vec<Vec<f64>>> {
    check_kind(sys, kind)?;
    samples
        .iter()
        .map(|x| {
            let r = solve_constraint(sys, x, lambda0, pinned)?;
            tuple(sys, kind, x, &r.lambda)
        })
        .collect()
}

/// The generated submanifold near each sample, parametrized by its base point.
/// The tangent frame spans the kernel of the constraint differential in
/// `(x, λ)`, so no invertibility of `E_λλ` is needed beyond the solve itself.
pub struct MorseImmersion<'a> {
    pub sys: &'a MorseFamilySystem,
    pub kind: PointKind,
    pub lambda0: Vec<f64>,
    pub pinned: Vec<Option<f64>>,
}

impl Immersion for MorseImmersion<'_> {
    fn domain_dim(&self) -> usize {
        self.sys.base_dim()
    }

    fn target_dim(&self) -> usize {
        self.kind.dim(self.sys.n)
    }

    fn evaluate(&self, x: &[f64]) -> Result<(Vec<f64>, DMatrix<f64>)> {
        check_kind(self.sys, self.kind)?;
        let sys = self.sys;
        let d = sys.base_dim();
        let r = solve_constraint(sys, x, &self.lambda0, &self.pinned)?;
        let lambda = r.lambda;
        let point = tuple(sys, self.kind, x, &lambda)?;
        let free: Vec<usize> = (0..sys.k())
            .filter(|&i| self.pinned.get(i).is_none_or(|p| p.is_none()))
            .collect();
        let m = d + free.len();
        let basis = if free.is_empty() {
            DMatrix::identity(m, d)
        } else {
            let full = sys.constraint_jacobian(x, &lambda)?;
            let c = DMatrix::from_fn(free.len(), m, |r, col| {
                let src = if col < d { col } else { d + free[col - d] };
                full[(free[r], src)]
            });
            let eig = SymmetricEigen::new(c.transpose() * &c);
            let mut order: Vec<usize> = (0..m).collect();
            order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
            DMatrix::from_fn(m, d, |r, col| eig.eigenvectors[(r, order[col])])
        };
        let mut frame = DMatrix::zeros(point.len(), d);
        for col in 0..d {
            let xs: Vec<Dual<f64>> = x
                .iter()
                .enumerate()
                .map(|(i, &v)| Dual::new(v, if i < d { basis[(i, col)] } else { 0.0 }))
                .collect();
            let mut ls: Vec<Dual<f64>> = lambda.iter().map(|&v| Dual::constant(v)).collect();
            for (a, &i) in free.iter().enumerate() {
                ls[i].eps = basis[(d + a, col)];
            }
            for (row, v) in tuple(sys, self.kind, &xs, &ls)?.iter().enumerate() {
                frame[(row, col)] = v.eps;
            }
        }
        Ok((point, frame))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{FieldGraph, HamiltonianSystem};
    use crate::geometry::{beta_c_flat, pullback_isotropy_check, SmoothMap};

    fn samples(d: usize, count: usize) -> Vec<Vec<f64>> {
        (0..count)
            .map(|i| (0..d).map(|j| ((i * 7 + j * 3) as f64 * 0.37).sin()).collect())
            .collect()
    }

    #[test]
    fn explicit_family_points_are_the_field_graph() {
        let text = "p1^2/2 + q1^2/2 + 0.2*z";
        let sys = MorseFamilySystem::new(1, Variant::Contact, text, &[] as &[&str]).unwrap();
        let h = HamiltonianSystem::new(1, text).unwrap();
        let xs = samples(3, 5);
        let pts = legendrian_points(&sys, &xs, &[], &[], PointKind::Ne).unwrap();
        for (x, p) in xs.iter().zip(&pts) {
            assert_eq!(
                p,
                &FieldGraph {
                    sys: &h,
                    flow: Flow::Contact
                }
                .eval(x)
                .unwrap()
            );
        }
    }

    #[test]
    fn herglotz_points_match_lagrangian_tuples() {
        let sys = MorseFamilySystem::herglotz(1, "qd1^2/2 - q1^2/2 - 0.2*z + q1*qd1", Flow::Contact).unwrap();
        // p = L_qd = qd + q  =>  qd = p − q
        let x = vec![0.3, 0.8, -0.1];
        let pts = legendrian_points(&sys, &[x.clone()], &[0.0], &[], PointKind::Ne).unwrap();
        let (q, p, z) = (x[0], x[1], x[2]);
        let qd = p - q;
        let l = qd * qd / 2.0 - q * q / 2.0 - 0.2 * z + q * qd;
        let (l_q, l_v, l_z) = (-q + qd, qd + q, -0.2);
        let want = [q, p, z, qd, l_z * l_v + l_q, l, -l_z];
        for (a, b) in pts[0].iter().zip(&want) {
            assert!((a - b).abs() <= 1e-14, "{:?} vs {want:?}", pts[0]);
        }
        let evo = MorseFamilySystem::herglotz(1, "qd1^2/2 - q1^2/2 - 0.2*z + q1*qd1", Flow::Evolution).unwrap();
        let pts = legendrian_points(&evo, &[x], &[0.0], &[], PointKind::Sf).unwrap();
        let want = [q, p, z, qd, l_z * l_v + l_q, -l_z];
        for (a, b) in pts[0].iter().zip(&want) {
            assert!((a - b).abs() <= 1e-14);
        }
    }

    #[test]
    fn emitted_sets_are_isotropic() {
        let l = "qd1^2/2 + qd2^2/2 + qd1*qd2/3 - q1^2/2 - q2*q1 - 0.2*z*qd1 + sin(q2)*z";
        let xs = samples(5, 12);
        for (flow, kinds) in [
            (Flow::Contact, vec![PointKind::Ne, PointKind::HamLeg, PointKind::S]),
            (Flow::Evolution, vec![PointKind::Sf, PointKind::S]),
        ] {
            let sys = MorseFamilySystem::herglotz(2, l, flow).unwrap();
            for kind in kinds {
                let imm = MorseImmersion {
                    sys: &sys,
                    kind,
                    lambda0: vec![0.0; 2],
                    pinned: vec![],
                };
                let r = pullback_isotropy_check(&imm, kind.form().unwrap(), &xs).unwrap();
                assert!(r <= 1e-8, "{kind:?}: {r}");
            }
        }
        let sym = MorseFamilySystem::new(
            1,
            Variant::Symplectic,
            "p1^2/2 + q1^2/2 + l1*(p1 - q1) - l1^2/2",
            &["l1"],
        )
        .unwrap();
        let imm = MorseImmersion {
            sys: &sym,
            kind: PointKind::Tangent,
            lambda0: vec![0.0],
            pinned: vec![],
        };
        assert!(pullback_isotropy_check(&imm, IsotropyForm::Tangent, &samples(2, 10)).unwrap() <= 1e-8);
    }

    #[test]
    fn beta_c_carries_ne_onto_ham_leg() {
        let sys = MorseFamilySystem::herglotz(1, "qd1^2/2 - q1^2/2 - 0.2*z + qd1^4/12", Flow::Contact).unwrap();
        let xs = samples(3, 10);
        let ne = legendrian_points(&sys, &xs, &[0.0], &[], PointKind::Ne).unwrap();
        let hl = legendrian_points(&sys, &xs, &[0.0], &[], PointKind::HamLeg).unwrap();
        for (a, b) in ne.iter().zip(&hl) {
            for (u, v) in beta_c_flat(a).iter().zip(b) {
                assert!((u - v).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn kind_must_fit_variant() {
        let sys = MorseFamilySystem::herglotz(1, "qd1^2/2", Flow::Contact).unwrap();
        assert!(legendrian_points(&sys, &samples(3, 1), &[0.0], &[], PointKind::Tangent).is_err());
    }
}
