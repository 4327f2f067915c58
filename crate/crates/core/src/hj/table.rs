//! Tabulated one-dimensional characteristic functions and the evolution
//! Hamilton–Jacobi solver that produces them.

use serde::{Deserialize, Serialize};

use crate::dynamics::HamiltonianSystem;
use crate::error::{Error, Result};
use crate::expr::Real;

/// `W` on a grid with `W`, `W'` and `W''` at every node, interpolated by
/// quintic Hermite pieces. Matching `W''` at nodes makes composed gradients
/// exact there, not just `O(h²)` close.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TabulatedW {
    pub q: Vec<f64>,
    pub w: Vec<f64>,
    pub dw: Vec<f64>,
    pub ddw: Vec<f64>,
}

impl TabulatedW {
    pub fn new(q: Vec<f64>, w: Vec<f64>, dw: Vec<f64>, ddw: Vec<f64>) -> Result<Self> {
        let m = q.len();
        if m < 2 || w.len() != m || dw.len() != m || ddw.len() != m {
            return Err(Error::dim("a table needs at least two nodes and equal column lengths"));
        }
        if q.windows(2).any(|p| p[1] <= p[0]) {
            return Err(Error::Domain("table nodes must be strictly increasing".into()));
        }
        Ok(TabulatedW { q, w, dw, ddw })
    }

    pub fn range(&self) -> (f64, f64) {
        (self.q[0], *self.q.last().unwrap())
    }

    fn interval(&self, x: f64) -> Result<usize> {
        let (lo, hi) = self.range();
        let slack = 1e-9 * (hi - lo);
        if !(x >= lo - slack && x <= hi + slack) {
            return Err(Error::Domain(format!(
                "q = {x} outside the tabulated range [{lo}, {hi}]"
            )));
        }
        let i = self.q.partition_point(|&v| v <= x);
        Ok(i.clamp(1, self.q.len() - 1) - 1)
    }

    /// Interpolated `W` on any [`Real`] scalar.
    pub fn value<T: Real>(&self, x: T) -> Result<T> {
        let i = self.interval(x.re())?;
        let hh = self.q[i + 1] - self.q[i];
        let t = (x - T::cst(self.q[i])) / T::cst(hh);
        let t2 = t * t;
        let t3 = t2 * t;
        let t4 = t3 * t;
        let t5 = t4 * t;
        let c = T::cst;
        let h0 = c(1.0) - c(10.0) * t3 + c(15.0) * t4 - c(6.0) * t5;
        let h1 = t - c(6.0) * t3 + c(8.0) * t4 - c(3.0) * t5;
        let h2 = (t2 - c(3.0) * t3 + c(3.0) * t4 - t5) * c(0.5);
        let h3 = c(10.0) * t3 - c(15.0) * t4 + c(6.0) * t5;
        let h4 = c(-4.0) * t3 + c(7.0) * t4 - c(3.0) * t5;
        let h5 = (t3 - c(2.0) * t4 + t5) * c(0.5);
        Ok(h0 * c(self.w[i])
            + h1 * c(hh * self.dw[i])
            + h2 * c(hh * hh * self.ddw[i])
            + h3 * c(self.w[i + 1])
            + h4 * c(hh * self.dw[i + 1])
            + h5 * c(hh * hh * self.ddw[i + 1]))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    /// `∂H/∂p > 0`.
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Branch {
    fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }
}

impl std::str::FromStr for Branch {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "+" | "plus" => Ok(Branch::Plus),
            "-" | "minus" => Ok(Branch::Minus),
            _ => Err(Error::Schema {
                pointer: "/branch".into(),
                message: format!("branch must be + or -, got `{s}`"),
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HjSolve1d {
    pub table: TabulatedW,
    /// `|H(q, W', W) − c|` at each node.
    pub residual: Vec<f64>,
}

impl HjSolve1d {
    pub fn max_residual(&self) -> f64 {
        self.residual.iter().fold(0.0f64, |m, v| m.max(*v))
    }
}

/// Smallest `|∂H/∂p|` accepted before declaring a turning point.
const TURNING: f64 = 1e-8;

struct MomentumSolver<'a> {
    sys: &'a HamiltonianSystem,
    c: f64,
    branch: Branch,
}

impl MomentumSolver<'_> {
    fn eval(&self, q: f64, p: f64, w: f64) -> Result<(f64, Vec<f64>)> {
        let (h, g) = self.sys.derivatives(&[q, p, w])?;
        Ok((h - self.c, g))
    }

    /// Solves `H(q, p, W) = c` for `p` on the branch, from `p0`.
    fn solve(&self, q: f64, w: f64, p0: f64) -> Result<f64> {
        let lost = |reason: String| Error::BranchLoss { q, reason };
        let scale = 1.0 + self.c.abs();
        let mut p = p0;
        let (mut f, mut g) = self.eval(q, p, w).map_err(|e| lost(e.to_string()))?;
        for _ in 0..60 {
            let hp = g[1];
            if f.abs() <= 1e-14 * scale {
                break;
            }
            if hp.abs() < TURNING {
                return Err(lost(format!("|∂H/∂p| = {:e} at p = {p}", hp.abs())));
            }
            let step = -f / hp;
            let mut t = 1.0;
            let mut moved = false;
            for _ in 0..30 {
                if let Ok((ft, gt)) = self.eval(q, p + t * step, w) {
                    if ft.abs() < f.abs() {
                        p += t * step;
                        f = ft;
                        g = gt;
                        moved = true;
                        break;
                    }
                }
                t *= 0.5;
            }
            if !moved {
                break;
            }
        }
        let hp = g[1];
        if f.abs() > 1e-11 * scale {
            return Err(lost(format!(
                "no root of H(q, p, W) = c near p = {p0}, residual {:e}",
                f.abs()
            )));
        }
        if hp.abs() < TURNING || hp.signum() != self.branch.sign() {
            return Err(lost(format!("root p = {p} has ∂H/∂p = {hp:e}, off the chosen branch")));
        }
        Ok(p)
    }

    fn first(&self, q: f64, w: f64) -> Result<f64> {
        let mut last = None;
        for guess in [0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0] {
            for s in [1.0, -1.0] {
                match self.solve(q, w, self.branch.sign() * s * guess) {
                    Ok(p) => return Ok(p),
                    Err(e) => last = Some(e),
                }
            }
        }
        Err(last.expect("at least one guess"))
    }
}

/// Solves `H(q, W', W) = c` on `grid` as the ODE `W' = w(q, W)`, where `w`
/// is the root on `branch`, by RK4 from `W(grid[0]) = w0`.
pub fn solve_evolution_hj_1d(
    sys: &HamiltonianSystem,
    c: f64,
    grid: &[f64],
    w0: f64,
    branch: Branch,
) -> Result<HjSolve1d> {
    if sys.n != 1 {
        return Err(Error::dim("the one-dimensional solver needs n = 1"));
    }
    if grid.len() < 2 || grid.windows(2).any(|p| p[1] <= p[0]) {
        return Err(Error::Domain(
            "grid must be strictly increasing with at least two nodes".into(),
        ));
    }
    let solver = MomentumSolver { sys, c, branch };
    let m = grid.len();
    let mut w = Vec::with_capacity(m);
    let mut dw = Vec::with_capacity(m);
    let mut ddw = Vec::with_capacity(m);
    let mut residual = Vec::with_capacity(m);
    let mut wv = w0;
    let mut p = solver.first(grid[0], wv)?;
    for i in 0..m {
        let q = grid[i];
        if i > 0 {
            let h = q - grid[i - 1];
            let q0 = grid[i - 1];
            let mut slope = |qs: f64, ws: f64| -> Result<f64> {
                p = solver.solve(qs, ws, p)?;
                Ok(p)
            };
            let k1 = slope(q0, wv)?;
            let k2 = slope(q0 + 0.5 * h, wv + 0.5 * h * k1)?;
            let k3 = slope(q0 + 0.5 * h, wv + 0.5 * h * k2)?;
            let k4 = slope(q0 + h, wv + h * k3)?;
            wv += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            p = solver.solve(q, wv, p)?;
        }
        let (f, g) = solver.eval(q, p, wv)?;
        w.push(wv);
        dw.push(p);
        // differentiate H(q, w(q), W(q)) = c along the solution
        ddw.push(-(g[0] + g[2] * p) / g[1]);
        residual.push(f.abs());
    }
    Ok(HjSolve1d {
        table: TabulatedW::new(grid.to_vec(), w, dw, ddw)?,
        residual,
    })
}

/// `m` evenly spaced nodes from `lo` to `hi`.
pub fn uniform_grid(lo: f64, hi: f64, m: usize) -> Vec<f64> {
    let m = m.max(2);
    (0..m)
        .map(|i| {
            if i + 1 == m {
                hi
            } else {
                lo + (hi - lo) * i as f64 / (m - 1) as f64
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Dual;

    #[test]
    fn quintic_reproduces_node_data() {
        let q = vec![0.0, 0.5, 1.2];
        let t = TabulatedW::new(
            q.clone(),
            vec![1.0, 2.0, -1.0],
            vec![0.3, -0.2, 0.7],
            vec![1.5, -3.0, 0.25],
        )
        .unwrap();
        for i in 0..3 {
            let x = Dual::new(Dual::new(q[i], 1.0), Dual::new(1.0, 0.0));
            let v = t.value(x).unwrap();
            assert!((v.re.re - t.w[i]).abs() < 1e-14);
            assert!((v.re.eps - t.dw[i]).abs() < 1e-13);
            assert!((v.eps.eps - t.ddw[i]).abs() < 1e-12);
        }
        assert!(t.value(1.5).is_err());
    }

    #[test]
    fn quintic_is_exact_on_quintics() {
        let f = |x: f64| x.powi(5) - 2.0 * x.powi(3) + x;
        let df = |x: f64| 5.0 * x.powi(4) - 6.0 * x * x + 1.0;
        let ddf = |x: f64| 20.0 * x.powi(3) - 12.0 * x;
        let q = uniform_grid(-1.0, 1.0, 4);
        let t = TabulatedW::new(
            q.clone(),
            q.iter().map(|&x| f(x)).collect(),
            q.iter().map(|&x| df(x)).collect(),
            q.iter().map(|&x| ddf(x)).collect(),
        )
        .unwrap();
        for x in [-0.9, -0.1, 0.33, 0.99] {
            assert!((t.value(x).unwrap() - f(x)).abs() < 1e-13);
        }
    }

    #[test]
    fn linear_hamiltonian() {
        let sys = HamiltonianSystem::new(1, "p1").unwrap();
        let grid = uniform_grid(-1.0, 2.0, 31);
        let s = solve_evolution_hj_1d(&sys, 0.7, &grid, 0.25, Branch::Plus).unwrap();
        for (i, &q) in grid.iter().enumerate() {
            assert!((s.table.w[i] - (0.25 + 0.7 * (q + 1.0))).abs() < 1e-13);
        }
        assert!(solve_evolution_hj_1d(&sys, 0.7, &grid, 0.25, Branch::Minus).is_err());
    }

    #[test]
    fn damped_oscillator_residual_and_bisection() {
        let sys = HamiltonianSystem::new(1, "p1^2/2 + q1^2/2 + 0.2*z").unwrap();
        let grid = uniform_grid(0.0, 0.5, 501);
        let s = solve_evolution_hj_1d(&sys, 1.0, &grid, 0.0, Branch::Plus).unwrap();
        assert!(s.max_residual() <= 1e-10);
        // independent root of p²/2 + q²/2 + 0.2W = 1 by bisection on p > 0
        for i in (0..501).step_by(50) {
            let (q, w) = (grid[i], s.table.w[i]);
            let f = |p: f64| p * p / 2.0 + q * q / 2.0 + 0.2 * w - 1.0;
            let (mut lo, mut hi) = (0.0, 10.0);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if f(mid) > 0.0 {
                    hi = mid
                } else {
                    lo = mid
                }
            }
            assert!((s.table.dw[i] - lo).abs() <= 1e-10);
        }
    }

    #[test]
    fn no_real_branch() {
        let sys = HamiltonianSystem::new(1, "p1^2 + q1^2").unwrap();
        let err = solve_evolution_hj_1d(&sys, 0.0, &uniform_grid(0.5, 1.0, 11), 0.0, Branch::Plus).unwrap_err();
        assert!(matches!(err, Error::BranchLoss { q, .. } if q == 0.5));
    }
}
