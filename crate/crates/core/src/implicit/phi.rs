//! Legendrian submanifolds given by a generating function `Φ(q^a, p_b)` over a
//! split of the indices, and the Morse family `Φ + q^b p_b` producing the same set.

use super::{solve_constraint, MorseFamilySystem, Variant};
use crate::error::{Error, Result};
use crate::expr::{Real, ScalarExpr};
use crate::geometry::SmoothMap;

#[derive(Debug, Clone, PartialEq)]
pub struct PhiGenerator {
    pub n: usize,
    /// 1-based indices whose positions `q^a` parametrize.
    pub a: Vec<usize>,
    /// 1-based indices whose momenta `p_b` parametrize.
    pub b: Vec<usize>,
    /// Over `q<a>` for `a ∈ A` then `p<b>` for `b ∈ B`.
    pub phi: ScalarExpr,
}

impl PhiGenerator {
    pub fn new(n: usize, a: Vec<usize>, b: Vec<usize>, text: &str) -> Result<Self> {
        let mut all: Vec<usize> = a.iter().chain(&b).copied().collect();
        all.sort_unstable();
        if all != (1..=n).collect::<Vec<_>>() {
            return Err(Error::Schema {
                pointer: "/phi".into(),
                message: format!("index sets {a:?} and {b:?} must partition 1..={n}"),
            });
        }
        let vars = Self::vars_for(&a, &b);
        Ok(PhiGenerator {
            n,
            phi: ScalarExpr::parse(text, &vars)?,
            a,
            b,
        })
    }

    fn vars_for(a: &[usize], b: &[usize]) -> Vec<String> {
        a.iter()
            .map(|i| format!("q{i}"))
            .chain(b.iter().map(|i| format!("p{i}")))
            .collect()
    }

    /// `(q, p, z)` with `q^b = −Φ_{p_b}`, `p_a = Φ_{q^a}`, `z = Φ − p_b Φ_{p_b}`,
    /// for the parameter `s = (q^a, p_b)`.
    pub fn point<T: Real>(&self, s: &[T]) -> Result<Vec<T>> {
        let n = self.n;
        if s.len() != n {
            return Err(Error::dim(format!("parameter of length {}, expected {n}", s.len())));
        }
        let idx: Vec<usize> = (0..n).collect();
        let (phi, g) = self.phi.grad_generic(s, &idx)?;
        let na = self.a.len();
        let mut q = vec![T::cst(0.0); n];
        let mut p = vec![T::cst(0.0); n];
        let mut z = phi;
        for (j, &i) in self.a.iter().enumerate() {
            q[i - 1] = s[j];
            p[i - 1] = g[j];
        }
        for (j, &i) in self.b.iter().enumerate() {
            let pb = s[na + j];
            let phi_p = g[na + j];
            q[i - 1] = -phi_p;
            p[i - 1] = pb;
            z = z - pb * phi_p;
        }
        let mut out = q;
        out.extend(p);
        out.push(z);
        Ok(out)
    }

    pub fn points(&self, samples: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        samples.iter().map(|s| self.point(s)).collect()
    }

    /// `E(q, l) = Φ(q^a, l) + Σ q^b l_b` over Q, one multiplier `l_j` per `b`.
    pub fn to_morse(&self) -> Result<MorseFamilySystem> {
        let multipliers: Vec<String> = (1..=self.b.len()).map(|j| format!("l{j}")).collect();
        let renames: Vec<(String, String)> = self
            .b
            .iter()
            .zip(&multipliers)
            .map(|(i, l)| (format!("p{i}"), l.clone()))
            .collect();
        let pairs: Vec<(&str, &str)> = renames.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
        let mut vars: Vec<String> = (1..=self.n).map(|i| format!("q{i}")).collect();
        vars.extend(multipliers.iter().cloned());
        let rebound = self.phi.rebind(&vars, &pairs)?;
        let mut text = rebound.to_string();
        for (i, l) in self.b.iter().zip(&multipliers) {
            text.push_str(&format!(" + q{i}*{l}"));
        }
        MorseFamilySystem::new(self.n, Variant::Generator, &text, &multipliers)
    }
}

/// `s ↦ Φ`-point, for isotropy checks with exact Jacobians.
pub struct PhiMap<'a>(pub &'a PhiGenerator);

impl SmoothMap for PhiMap<'_> {
    fn domain_dim(&self) -> usize {
        self.0.n
    }
    fn target_dim(&self) -> usize {
        2 * self.0.n + 1
    }
    fn eval<T: Real>(&self, s: &[T]) -> Result<Vec<T>> {
        self.0.point(s)
    }
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct Equivalence {
    /// Largest distance from a `Φ` point to the nearest Morse point.
    pub phi_to_morse: f64,
    /// Largest distance from a Morse point to the nearest `Φ` point.
    pub morse_to_phi: f64,
    pub samples: usize,
}

impl Equivalence {
    pub fn discrepancy(&self) -> f64 {
        self.phi_to_morse.max(self.morse_to_phi)
    }
}

/// Two-sided nearest-point comparison (sup-norm) between the `Φ` points of the
/// samples and the constraint solutions of the Morse family taken at the same
/// base points, each solve starting from `l = 0`.
pub fn phi_equivalence(g: &PhiGenerator, samples: &[Vec<f64>]) -> Result<Equivalence> {
    let morse = g.to_morse()?;
    let phi_pts = g.points(samples)?;
    let zero = vec![0.0; morse.k()];
    let morse_pts: Vec<Vec<f64>> = phi_pts
        .iter()
        .map(|pt| {
            let q = &pt[..g.n];
            let r = solve_constraint(&morse, q, &zero, &[])?;
            let (e, grad) = morse.base_derivatives(q, &r.lambda)?;
            let mut out = q.to_vec();
            out.extend(grad);
            out.push(e);
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let one_sided = |from: &[Vec<f64>], to: &[Vec<f64>]| {
        from.iter()
            .map(|a| to.iter().map(|b| dist(a, b)).fold(f64::INFINITY, f64::min))
            .fold(0.0f64, f64::max)
    };
    Ok(Equivalence {
        phi_to_morse: one_sided(&phi_pts, &morse_pts),
        morse_to_phi: one_sided(&morse_pts, &phi_pts),
        samples: samples.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{pullback_isotropy_check, Ad, IsotropyForm};

    #[test]
    fn empty_b_gives_prolongation() {
        let g = PhiGenerator::new(2, vec![1, 2], vec![], "q1^2*q2 + sin(q2)").unwrap();
        let pt = g.point(&[0.5, 0.3]).unwrap();
        let want = [
            0.5,
            0.3,
            2.0 * 0.5 * 0.3,
            0.25 + 0.3f64.cos(),
            0.25 * 0.3 + 0.3f64.sin(),
        ];
        for (a, b) in pt.iter().zip(&want) {
            assert!((a - b).abs() <= 1e-15);
        }
    }

    #[test]
    fn momentum_generator_example() {
        let g = PhiGenerator::new(1, vec![], vec![1], "p1^2/2").unwrap();
        assert_eq!(g.point(&[1.5]).unwrap(), vec![-1.5, 1.5, -1.125]);
    }

    #[test]
    fn morse_family_reproduces_points() {
        let g = PhiGenerator::new(2, vec![1], vec![2], "q1^3/6 + q1^2*p2/2 + p2^3/6 + p2^2 + 0.5*q1*p2").unwrap();
        let samples: Vec<Vec<f64>> = (0..40)
            .map(|i| vec![(i as f64 * 0.7).sin(), (i as f64 * 1.3).cos()])
            .collect();
        let eq = phi_equivalence(&g, &samples).unwrap();
        assert!(eq.discrepancy() <= 1e-8, "{eq:?}");
        let r = pullback_isotropy_check(&Ad(PhiMap(&g)), IsotropyForm::Eta, &samples).unwrap();
        assert!(r <= 1e-12);
    }

    #[test]
    fn bad_partition() {
        assert!(PhiGenerator::new(2, vec![1], vec![1], "q1").is_err());
        assert!(PhiGenerator::new(2, vec![1], vec![], "q1").is_err());
    }
}
