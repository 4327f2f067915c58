//! Scalar expressions over named variables, evaluated exactly with
//! forward-mode dual numbers.
//!
//! An expression is parsed against an ordered variable list. Every
//! identifier must be in that list or be one of the built-in functions
//! `sin cos tan exp log sqrt tanh abs`. Gradients use one dual pass per
//! direction; Hessians use nested duals, one pass per upper-triangle entry,
//! and are mirrored so the result is symmetric bit for bit.
//!
//! ```
//! use contactor::expr::{Bindings, ScalarExpr};
//!
//! let h = ScalarExpr::parse("p1^2/2 + q1^2/2 + 0.2*z", &["q1", "p1", "z"]).unwrap();
//! let b = Bindings::from_pairs(&[("q1", 1.0), ("p1", 0.0), ("z", 0.0)]);
//! assert_eq!(h.eval(&b).unwrap(), 0.5);
//! ```

mod parse;
pub mod real;

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
pub use real::{Dual, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Log,
    Sqrt,
    Tanh,
    Abs,
}

impl Func {
    fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            "tanh" => Func::Tanh,
            "abs" => Func::Abs,
            _ => return None,
        })
    }

    fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Tanh => "tanh",
            Func::Abs => "abs",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Num(f64),
    /// Index into the owning expression's variable list.
    Var(usize),
    Neg(Box<Node>),
    Bin(BinOp, Box<Node>, Box<Node>),
    /// `exp_const` caches the exponent when it contains no variables.
    Pow {
        base: Box<Node>,
        exp: Box<Node>,
        exp_const: Option<f64>,
    },
    Call(Func, Box<Node>),
}

impl Node {
    fn pow(base: Node, exp: Node) -> Node {
        let exp_const = if exp.has_vars() {
            None
        } else {
            eval_node::<f64>(&exp, &[]).ok()
        };
        Node::Pow {
            base: Box::new(base),
            exp: Box::new(exp),
            exp_const,
        }
    }

    fn has_vars(&self) -> bool {
        match self {
            Node::Num(_) => false,
            Node::Var(_) => true,
            Node::Neg(a) | Node::Call(_, a) => a.has_vars(),
            Node::Bin(_, a, b) => a.has_vars() || b.has_vars(),
            Node::Pow { base, exp, .. } => base.has_vars() || exp.has_vars(),
        }
    }

    fn collect_vars(&self, out: &mut Vec<usize>) {
        match self {
            Node::Num(_) => {}
            Node::Var(i) => {
                if !out.contains(i) {
                    out.push(*i)
                }
            }
            Node::Neg(a) | Node::Call(_, a) => a.collect_vars(out),
            Node::Bin(_, a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Node::Pow { base, exp, .. } => {
                base.collect_vars(out);
                exp.collect_vars(out);
            }
        }
    }

    fn remap(&self, map: &[usize]) -> Node {
        match self {
            Node::Num(v) => Node::Num(*v),
            Node::Var(i) => Node::Var(map[*i]),
            Node::Neg(a) => Node::Neg(Box::new(a.remap(map))),
            Node::Call(f, a) => Node::Call(*f, Box::new(a.remap(map))),
            Node::Bin(op, a, b) => Node::Bin(*op, Box::new(a.remap(map)), Box::new(b.remap(map))),
            Node::Pow { base, exp, exp_const } => Node::Pow {
                base: Box::new(base.remap(map)),
                exp: Box::new(exp.remap(map)),
                exp_const: *exp_const,
            },
        }
    }

    fn write(&self, vars: &[String], f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Node::Num(v) => {
                let a = v.abs();
                if a != 0.0 && !(1e-4..1e15).contains(&a) {
                    write!(f, "{v:e}")
                } else {
                    write!(f, "{v}")
                }
            }
            Node::Var(i) => write!(f, "{}", vars[*i]),
            Node::Neg(a) => {
                write!(f, "(-")?;
                a.write(vars, f)?;
                write!(f, ")")
            }
            Node::Call(func, a) => {
                write!(f, "{}(", func.name())?;
                a.write(vars, f)?;
                write!(f, ")")
            }
            Node::Bin(op, a, b) => {
                let c = match op {
                    BinOp::Add => '+',
                    BinOp::Sub => '-',
                    BinOp::Mul => '*',
                    BinOp::Div => '/',
                };
                write!(f, "(")?;
                a.write(vars, f)?;
                write!(f, " {c} ")?;
                b.write(vars, f)?;
                write!(f, ")")
            }
            Node::Pow { base, exp, .. } => {
                write!(f, "(")?;
                base.write(vars, f)?;
                write!(f, ")^(")?;
                exp.write(vars, f)?;
                write!(f, ")")
            }
        }
    }
}

fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

fn eval_node<T: Real>(node: &Node, vals: &[T]) -> Result<T> {
    Ok(match node {
        Node::Num(v) => T::cst(*v),
        Node::Var(i) => vals[*i],
        Node::Neg(a) => -eval_node(a, vals)?,
        Node::Bin(op, a, b) => {
            let x = eval_node(a, vals)?;
            let y = eval_node(b, vals)?;
            match op {
                BinOp::Add => x + y,
                BinOp::Sub => x - y,
                BinOp::Mul => x * y,
                BinOp::Div => {
                    if y.re() == 0.0 {
                        return Err(domain("division by zero"));
                    }
                    x / y
                }
            }
        }
        Node::Pow { base, exp, exp_const } => {
            let b = eval_node(base, vals)?;
            match exp_const {
                Some(c) if c.fract() == 0.0 && c.abs() <= i32::MAX as f64 => {
                    if *c < 0.0 && b.re() == 0.0 {
                        return Err(domain("zero raised to a negative power"));
                    }
                    b.powi(*c as i32)
                }
                Some(c) => {
                    if b.re() < 0.0 {
                        return Err(domain(format!(
                            "negative base {} with non-integer exponent {c}",
                            b.re()
                        )));
                    }
                    if b.re() == 0.0 && *c < 0.0 {
                        return Err(domain("zero raised to a negative power"));
                    }
                    b.powf(*c)
                }
                None => {
                    if b.re() <= 0.0 {
                        return Err(domain(format!("non-positive base {} with variable exponent", b.re())));
                    }
                    b.pow(eval_node(exp, vals)?)
                }
            }
        }
        Node::Call(func, a) => {
            let x = eval_node(a, vals)?;
            match func {
                Func::Sin => x.sin(),
                Func::Cos => x.cos(),
                Func::Tan => x.tan(),
                Func::Exp => x.exp(),
                Func::Log => {
                    if x.re() <= 0.0 {
                        return Err(domain(format!("log of non-positive value {}", x.re())));
                    }
                    x.ln()
                }
                Func::Sqrt => {
                    if x.re() < 0.0 {
                        return Err(domain(format!("sqrt of negative value {}", x.re())));
                    }
                    x.sqrt()
                }
                Func::Tanh => x.tanh(),
                Func::Abs => x.abs(),
            }
        }
    })
}

/// Variable name to value map.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Bindings(BTreeMap<String, f64>);

impl Bindings {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs(pairs: &[(&str, f64)]) -> Self {
        Bindings(pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect())
    }

    pub fn set(&mut self, name: impl Into<String>, value: f64) {
        self.0.insert(name.into(), value);
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.0.get(name).copied()
    }
}

/// A parsed, immutable scalar expression.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarExpr {
    source: String,
    root: Node,
    vars: Vec<String>,
}

impl ScalarExpr {
    pub fn parse<S: AsRef<str>>(text: &str, vars: &[S]) -> Result<Self> {
        let vars: Vec<String> = vars.iter().map(|v| v.as_ref().to_string()).collect();
        let root = parse::parse_tree(text, &vars)?;
        Ok(ScalarExpr {
            source: text.to_string(),
            root,
            vars,
        })
    }

    pub fn constant(value: f64, vars: &[impl AsRef<str>]) -> Self {
        ScalarExpr {
            source: format!("{value}"),
            root: Node::Num(value),
            vars: vars.iter().map(|v| v.as_ref().to_string()).collect(),
        }
    }

    /// The text this expression was parsed from.
    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    /// Names of the variables that actually occur in the tree.
    pub fn free_vars(&self) -> Vec<&str> {
        let mut idx = Vec::new();
        self.root.collect_vars(&mut idx);
        idx.sort_unstable();
        idx.into_iter().map(|i| self.vars[i].as_str()).collect()
    }

    pub fn depends_on(&self, name: &str) -> bool {
        self.free_vars().contains(&name)
    }

    /// Moves the expression onto a new variable list. `rename` maps old names to
    /// new ones; names it leaves out keep their spelling. Every used variable must
    /// land in `new_vars`.
    pub fn rebind<S: AsRef<str>>(&self, new_vars: &[S], rename: &[(&str, &str)]) -> Result<Self> {
        let new_vars: Vec<String> = new_vars.iter().map(|v| v.as_ref().to_string()).collect();
        let mut map = vec![usize::MAX; self.vars.len()];
        for (i, old) in self.vars.iter().enumerate() {
            let target = rename
                .iter()
                .find(|(from, _)| from == old)
                .map(|(_, to)| *to)
                .unwrap_or(old.as_str());
            if let Some(j) = new_vars.iter().position(|v| v == target) {
                map[i] = j;
            }
        }
        let mut used = Vec::new();
        self.root.collect_vars(&mut used);
        if let Some(&bad) = used.iter().find(|&&i| map[i] == usize::MAX) {
            return Err(Error::UnknownIdentifier(self.vars[bad].clone()));
        }
        let root = self.root.remap(&map);
        let mut e = ScalarExpr {
            source: String::new(),
            root,
            vars: new_vars,
        };
        e.source = e.to_string();
        Ok(e)
    }

    fn values(&self, b: &Bindings) -> Result<Vec<f64>> {
        let mut used = Vec::new();
        self.root.collect_vars(&mut used);
        self.vars
            .iter()
            .enumerate()
            .map(|(i, name)| match b.get(name) {
                Some(v) => Ok(v),
                // unused list entries may stay unbound
                None if !used.contains(&i) => Ok(0.0),
                None => Err(Error::Unbound(name.clone())),
            })
            .collect()
    }

    fn indices(&self, wrt: &[&str]) -> Result<Vec<usize>> {
        wrt.iter()
            .map(|w| self.var_index(w).ok_or_else(|| Error::UnknownIdentifier(w.to_string())))
            .collect()
    }

    fn check_len(&self, vals: usize) -> Result<()> {
        if vals != self.vars.len() {
            return Err(Error::dim(format!(
                "expression over {} variables evaluated at {} values",
                self.vars.len(),
                vals
            )));
        }
        Ok(())
    }

    pub fn eval(&self, b: &Bindings) -> Result<f64> {
        self.value_at(&self.values(b)?)
    }

    pub fn grad(&self, wrt: &[&str], b: &Bindings) -> Result<Vec<f64>> {
        let idx = self.indices(wrt)?;
        Ok(self.grad_at(&self.values(b)?, &idx)?.1)
    }

    pub fn hess(&self, wrt: &[&str], b: &Bindings) -> Result<DMatrix<f64>> {
        let idx = self.indices(wrt)?;
        self.hess_at(&self.values(b)?, &idx)
    }

    /// Evaluates on any [`Real`] scalar, `vals` in variable-list order.
    pub fn eval_generic<T: Real>(&self, vals: &[T]) -> Result<T> {
        self.check_len(vals.len())?;
        let v = eval_node(&self.root, vals)?;
        if !v.re().is_finite() {
            return Err(domain("non-finite result"));
        }
        Ok(v)
    }

    /// Value and partials along `idx` on any [`Real`] scalar. With `T = Dual<f64>`
    /// this differentiates the gradient itself, which is how Jacobians of vector
    /// fields are obtained.
    pub fn grad_generic<T: Real>(&self, vals: &[T], idx: &[usize]) -> Result<(T, Vec<T>)> {
        self.check_len(vals.len())?;
        if idx.is_empty() {
            return Ok((self.eval_generic(vals)?, Vec::new()));
        }
        let mut point: Vec<Dual<T>> = vals.iter().map(|&v| Dual::constant(v)).collect();
        let mut value = T::cst(0.0);
        let mut g = Vec::with_capacity(idx.len());
        for &i in idx {
            point[i].eps = T::cst(1.0);
            let r = self.eval_generic(&point);
            point[i].eps = T::cst(0.0);
            let r = r?;
            if !r.eps.re().is_finite() {
                return Err(domain(format!("non-finite derivative along {}", self.vars[i])));
            }
            value = r.re;
            g.push(r.eps);
        }
        Ok((value, g))
    }

    pub fn value_at(&self, vals: &[f64]) -> Result<f64> {
        self.eval_generic(vals)
    }

    /// Value and partial derivatives along the variables at `idx`.
    pub fn grad_at(&self, vals: &[f64], idx: &[usize]) -> Result<(f64, Vec<f64>)> {
        self.check_len(vals.len())?;
        if idx.is_empty() {
            return Ok((self.value_at(vals)?, Vec::new()));
        }
        let mut point: Vec<Dual<f64>> = vals.iter().map(|&v| Dual::constant(v)).collect();
        let mut value = 0.0;
        let mut g = Vec::with_capacity(idx.len());
        for &i in idx {
            point[i].eps = 1.0;
            let r = self.eval_generic(&point)?;
            point[i].eps = 0.0;
            if !r.eps.is_finite() {
                return Err(domain(format!("non-finite derivative along {}", self.vars[i])));
            }
            value = r.re;
            g.push(r.eps);
        }
        Ok((value, g))
    }

    /// Full gradient over the whole variable list.
    pub fn full_grad_at(&self, vals: &[f64]) -> Result<(f64, Vec<f64>)> {
        let idx: Vec<usize> = (0..self.vars.len()).collect();
        self.grad_at(vals, &idx)
    }

    /// Hessian block along the variables at `idx`, by nested duals.
    pub fn hess_at(&self, vals: &[f64], idx: &[usize]) -> Result<DMatrix<f64>> {
        self.check_len(vals.len())?;
        let m = idx.len();
        let mut h = DMatrix::zeros(m, m);
        let mut point: Vec<Dual<Dual<f64>>> = vals.iter().map(|&v| Dual::constant(Dual::constant(v))).collect();
        for a in 0..m {
            for b in a..m {
                let (i, j) = (idx[a], idx[b]);
                point[j].re.eps = 1.0;
                point[i].eps.re = 1.0;
                let r = self.eval_generic(&point);
                point[j].re.eps = 0.0;
                point[i].eps.re = 0.0;
                let d2 = r?.eps.eps;
                if !d2.is_finite() {
                    return Err(domain("non-finite second derivative"));
                }
                h[(a, b)] = d2;
                h[(b, a)] = d2;
            }
        }
        Ok(h)
    }

    /// Full Hessian over the whole variable list.
    pub fn full_hess_at(&self, vals: &[f64]) -> Result<DMatrix<f64>> {
        let idx: Vec<usize> = (0..self.vars.len()).collect();
        self.hess_at(vals, &idx)
    }
}

impl fmt::Display for ScalarExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.root.write(&self.vars, f)
    }
}

/// Standard variable names `q1..qn`, `p1..pn`.
pub fn indexed(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(pairs: &[(&str, f64)]) -> Bindings {
        Bindings::from_pairs(pairs)
    }

    #[test]
    fn parses_hamiltonian_with_three_free_vars() {
        let e = ScalarExpr::parse("p1^2/2 + q1^2/2 + 0.2*z", &["q1", "p1", "z"]).unwrap();
        assert_eq!(e.free_vars(), vec!["q1", "p1", "z"]);
    }

    #[test]
    fn syntax_error_offset() {
        let err = ScalarExpr::parse("q1 +* p1", &["q1", "p1"]).unwrap_err();
        assert_eq!(
            err,
            Error::Syntax {
                position: 4,
                message: "unexpected operator `*`".into()
            }
        );
    }

    #[test]
    fn unknown_identifier() {
        let err = ScalarExpr::parse("sin(w)", &["q1"]).unwrap_err();
        assert_eq!(err, Error::UnknownIdentifier("w".into()));
        let err = ScalarExpr::parse("foo(q1)", &["q1"]).unwrap_err();
        assert_eq!(err, Error::UnknownIdentifier("foo".into()));
    }

    #[test]
    fn other_syntax_errors() {
        for bad in ["", "(q1", "q1)", "q1 q1", "2..3", "sin", "q1 # 2", "sin()"] {
            let err = ScalarExpr::parse(bad, &["q1"]).unwrap_err();
            assert!(matches!(err, Error::Syntax { .. }), "{bad}: {err:?}");
        }
    }

    #[test]
    fn eval_examples() {
        let e = ScalarExpr::parse("q1^2", &["q1"]).unwrap();
        assert_eq!(e.eval(&b(&[("q1", 3.0)])).unwrap(), 9.0);
        let e = ScalarExpr::parse("p1^2/2 + q1^2/2 + 0.2*z", &["q1", "p1", "z"]).unwrap();
        assert_eq!(e.eval(&b(&[("q1", 1.0), ("p1", 0.0), ("z", 0.0)])).unwrap(), 0.5);
        let e = ScalarExpr::parse("log(q1)", &["q1"]).unwrap();
        assert!(matches!(e.eval(&b(&[("q1", -1.0)])).unwrap_err(), Error::Domain(_)));
    }

    #[test]
    fn precedence_and_associativity() {
        let e = ScalarExpr::parse("-q1^2", &["q1"]).unwrap();
        assert_eq!(e.eval(&b(&[("q1", 3.0)])).unwrap(), -9.0);
        let e = ScalarExpr::parse("2^3^2", &["q1"]).unwrap();
        assert_eq!(e.eval(&b(&[])).unwrap(), 512.0);
        let e = ScalarExpr::parse("2^-1 + 8/4/2 - 1 - 1", &["q1"]).unwrap();
        assert_eq!(e.eval(&b(&[])).unwrap(), -0.5);
        let e = ScalarExpr::parse("1.5e-1*q1 + .5", &["q1"]).unwrap();
        assert!((e.eval(&b(&[("q1", 2.0)])).unwrap() - 0.8).abs() < 1e-15);
    }

    #[test]
    fn domain_errors() {
        let cases = [
            ("q1^0.5", -1.0),
            ("sqrt(q1)", -1.0),
            ("1/q1", 0.0),
            ("q1^q1", -2.0),
            ("q1^(-1)", 0.0),
        ];
        for (src, x) in cases {
            let e = ScalarExpr::parse(src, &["q1"]).unwrap();
            assert!(
                matches!(e.eval(&b(&[("q1", x)])), Err(Error::Domain(_))),
                "{src} at {x}"
            );
        }
        // integer exponents are fine on negative bases
        let e = ScalarExpr::parse("q1^3", &["q1"]).unwrap();
        assert_eq!(e.eval(&b(&[("q1", -2.0)])).unwrap(), -8.0);
    }

    #[test]
    fn unbound_variable() {
        let e = ScalarExpr::parse("q1 + p1", &["q1", "p1"]).unwrap();
        assert_eq!(e.eval(&b(&[("q1", 1.0)])).unwrap_err(), Error::Unbound("p1".into()));
        // extra bindings are ignored
        assert_eq!(e.eval(&b(&[("q1", 1.0), ("p1", 2.0), ("zz", 9.0)])).unwrap(), 3.0);
    }

    #[test]
    fn grad_examples() {
        let e = ScalarExpr::parse("q1^2", &["q1"]).unwrap();
        assert_eq!(e.grad(&["q1"], &b(&[("q1", 3.0)])).unwrap(), vec![6.0]);
        let e = ScalarExpr::parse("p1*qd1 - qd1^2/2", &["p1", "qd1"]).unwrap();
        assert_eq!(e.grad(&["qd1"], &b(&[("p1", 2.0), ("qd1", 2.0)])).unwrap(), vec![0.0]);
        let e = ScalarExpr::parse("5", &["q1"]).unwrap();
        assert_eq!(e.grad(&["q1"], &b(&[("q1", 7.0)])).unwrap(), vec![0.0]);
    }

    #[test]
    fn hess_examples() {
        let e = ScalarExpr::parse("q1^2*q2", &["q1", "q2"]).unwrap();
        let h = e.hess(&["q1", "q2"], &b(&[("q1", 1.0), ("q2", 2.0)])).unwrap();
        assert_eq!(h, DMatrix::from_row_slice(2, 2, &[4.0, 2.0, 2.0, 0.0]));
        let e = ScalarExpr::parse("3*q1 - 2*q2 + 1", &["q1", "q2"]).unwrap();
        let h = e.hess(&["q1", "q2"], &b(&[("q1", 0.3), ("q2", -4.0)])).unwrap();
        assert_eq!(h, DMatrix::zeros(2, 2));
        let e = ScalarExpr::parse("q1^4", &["q1"]).unwrap();
        let h = e.hess(&["q1"], &b(&[("q1", 1.0)])).unwrap();
        assert_eq!(h[(0, 0)], 12.0);
    }

    #[test]
    fn function_derivatives() {
        let x = 0.7;
        let cases: [(&str, f64); 8] = [
            ("sin(q1)", x.cos()),
            ("cos(q1)", -x.sin()),
            ("tan(q1)", 1.0 / (x.cos() * x.cos())),
            ("exp(q1)", x.exp()),
            ("log(q1)", 1.0 / x),
            ("sqrt(q1)", 0.5 / x.sqrt()),
            ("tanh(q1)", 1.0 - x.tanh() * x.tanh()),
            ("abs(-q1)", 1.0),
        ];
        for (src, want) in cases {
            let e = ScalarExpr::parse(src, &["q1"]).unwrap();
            let g = e.grad(&["q1"], &b(&[("q1", x)])).unwrap()[0];
            assert!((g - want).abs() < 1e-15, "{src}: {g} vs {want}");
        }
        let e = ScalarExpr::parse("q1^q1", &["q1"]).unwrap();
        let g = e.grad(&["q1"], &b(&[("q1", 2.0)])).unwrap()[0];
        assert!((g - 4.0 * (1.0 + 2f64.ln())).abs() < 1e-14);
    }

    #[test]
    fn display_reparses_to_same_values() {
        let src = "-q1^2*sin(p1)/(1+z^2) - 2^-p1 + 1e-7*q1";
        let e = ScalarExpr::parse(src, &["q1", "p1", "z"]).unwrap();
        let again = ScalarExpr::parse(&e.to_string(), &["q1", "p1", "z"]).unwrap();
        let vals = [0.3, -1.2, 0.8];
        assert_eq!(e.value_at(&vals).unwrap(), again.value_at(&vals).unwrap());
    }

    #[test]
    fn rebind_renames_and_reorders() {
        let phi = ScalarExpr::parse("q1^3 + q1*p2", &["q1", "p2"]).unwrap();
        let e = phi.rebind(&["q1", "q2", "l1"], &[("p2", "l1")]).unwrap();
        assert_eq!(e.vars(), &["q1", "q2", "l1"]);
        assert_eq!(e.value_at(&[2.0, 99.0, 3.0]).unwrap(), 14.0);
        assert!(phi.rebind(&["q1"], &[]).is_err());
    }
}
