//! A small differentiable expression language in prefix s-expression form,
//! e.g. `(- (+ (pow x1 2) (pow x2 2)) 1)`, over variables `x1..xn` and
//! `u1..um`.

use std::fmt;

use num::{BigRational, One, Zero};

use crate::error::{Result, VakError};

const DIV_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    X(usize),
    U(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64, BigRational),
    Var(Var),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Exp(Box<Expr>),
    Tanh(Box<Expr>),
}

impl Expr {
    pub fn constant(v: f64) -> Expr {
        Expr::Const(v, <BigRational as crate::scalar::Scalar>::from_f64(v))
    }

    pub fn x(i: usize) -> Expr {
        Expr::Var(Var::X(i))
    }

    pub fn u(j: usize) -> Expr {
        Expr::Var(Var::U(j))
    }

    pub fn parse(src: &str) -> Result<Expr> {
        let tokens = tokenize(src);
        let mut pos = 0;
        let e = parse_tokens(&tokens, &mut pos)?;
        if pos != tokens.len() {
            return Err(VakError::Parse(format!("trailing input after position {pos}")));
        }
        Ok(e)
    }

    /// Largest `x` and `u` indices used (1-based; 0 when absent).
    pub fn max_indices(&self) -> (usize, usize) {
        let mut out = (0, 0);
        self.visit(&mut |e| {
            if let Expr::Var(v) = e {
                match *v {
                    Var::X(i) => out.0 = out.0.max(i),
                    Var::U(j) => out.1 = out.1.max(j),
                }
            }
        });
        out
    }

    fn visit(&self, f: &mut dyn FnMut(&Expr)) {
        f(self);
        match self {
            Expr::Const(..) | Expr::Var(_) => {}
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Exp(a) | Expr::Tanh(a) => a.visit(f),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.visit(f);
                b.visit(f);
            }
        }
    }

    /// Value at `z = (x, u)` where the first `n` entries are `x`.
    pub fn eval(&self, z: &[f64], n: usize) -> Result<f64> {
        Ok(match self {
            Expr::Const(v, _) => *v,
            Expr::Var(v) => z[index(*v, n)],
            Expr::Neg(a) => -a.eval(z, n)?,
            Expr::Add(a, b) => a.eval(z, n)? + b.eval(z, n)?,
            Expr::Sub(a, b) => a.eval(z, n)? - b.eval(z, n)?,
            Expr::Mul(a, b) => a.eval(z, n)? * b.eval(z, n)?,
            Expr::Div(a, b) => {
                let d = b.eval(z, n)?;
                if d.abs() < DIV_TOL {
                    return Err(VakError::DivisionByZero);
                }
                a.eval(z, n)? / d
            }
            Expr::Pow(a, k) => {
                let v = a.eval(z, n)?;
                if *k < 0 && v.abs() < DIV_TOL {
                    return Err(VakError::DivisionByZero);
                }
                v.powi(*k)
            }
            Expr::Exp(a) => a.eval(z, n)?.exp(),
            Expr::Tanh(a) => a.eval(z, n)?.tanh(),
        })
    }

    /// Value and gradient with respect to all of `z` (forward mode).
    pub fn grad(&self, z: &[f64], n: usize) -> Result<(f64, Vec<f64>)> {
        let d = self.dual(z, n)?;
        Ok((d.v, d.g))
    }

    fn dual(&self, z: &[f64], n: usize) -> Result<Dual> {
        let len = z.len();
        Ok(match self {
            Expr::Const(v, _) => Dual::constant(*v, len),
            Expr::Var(v) => {
                let i = index(*v, n);
                let mut g = vec![0.0; len];
                g[i] = 1.0;
                Dual { v: z[i], g }
            }
            Expr::Neg(a) => a.dual(z, n)?.map(|v| -v, -1.0),
            Expr::Add(a, b) => a.dual(z, n)?.combine(&b.dual(z, n)?, 1.0, 1.0, |x, y| x + y),
            Expr::Sub(a, b) => a.dual(z, n)?.combine(&b.dual(z, n)?, 1.0, -1.0, |x, y| x - y),
            Expr::Mul(a, b) => {
                let (p, q) = (a.dual(z, n)?, b.dual(z, n)?);
                p.combine(&q, q.v, p.v, |x, y| x * y)
            }
            Expr::Div(a, b) => {
                let (p, q) = (a.dual(z, n)?, b.dual(z, n)?);
                if q.v.abs() < DIV_TOL {
                    return Err(VakError::DivisionByZero);
                }
                p.combine(&q, 1.0 / q.v, -p.v / (q.v * q.v), |x, y| x / y)
            }
            Expr::Pow(a, k) => {
                let p = a.dual(z, n)?;
                if *k < 0 && p.v.abs() < DIV_TOL {
                    return Err(VakError::DivisionByZero);
                }
                let dk = if *k == 0 { 0.0 } else { *k as f64 * p.v.powi(k - 1) };
                p.map(|v| v.powi(*k), dk)
            }
            Expr::Exp(a) => {
                let p = a.dual(z, n)?;
                let e = p.v.exp();
                p.map(|_| e, e)
            }
            Expr::Tanh(a) => {
                let p = a.dual(z, n)?;
                let t = p.v.tanh();
                p.map(|_| t, 1.0 - t * t)
            }
        })
    }

    /// Polynomial degree, or `None` when a transcendental node or a
    /// non-constant division/negative power is present.
    pub fn degree(&self) -> Option<u32> {
        match self {
            Expr::Const(..) => Some(0),
            Expr::Var(_) => Some(1),
            Expr::Neg(a) => a.degree(),
            Expr::Add(a, b) | Expr::Sub(a, b) => Some(a.degree()?.max(b.degree()?)),
            Expr::Mul(a, b) => Some(a.degree()? + b.degree()?),
            Expr::Div(a, b) => match b.degree()? {
                0 => a.degree(),
                _ => None,
            },
            Expr::Pow(a, k) => {
                let d = a.degree()?;
                if *k >= 0 {
                    Some(d * *k as u32)
                } else if d == 0 {
                    Some(0)
                } else {
                    None
                }
            }
            Expr::Exp(a) | Expr::Tanh(a) => match a.degree()? {
                0 => Some(0),
                _ => None,
            },
        }
    }

    pub fn is_affine(&self) -> bool {
        self.linear_form(0, 0).is_some()
    }

    /// Exact `(coefficients, constant)` with the expression equal to
    /// `coeffs·z + constant`, for affine expressions over `z` of length
    /// `n + m` (sized to fit the variables used when both are zero).
    pub fn linear_form(&self, n: usize, m: usize) -> Option<(Vec<BigRational>, BigRational)> {
        let (mx, mu) = self.max_indices();
        let n = n.max(mx);
        let len = n + m.max(mu);
        self.affine(n, len)
    }

    fn affine(&self, n: usize, len: usize) -> Option<(Vec<BigRational>, BigRational)> {
        let zero = || vec![<BigRational as Zero>::zero(); len];
        match self {
            Expr::Const(_, q) => Some((zero(), q.clone())),
            Expr::Var(v) => {
                let mut c = zero();
                c[index(*v, n)] = <BigRational as One>::one();
                Some((c, <BigRational as Zero>::zero()))
            }
            Expr::Neg(a) => {
                let (c, k) = a.affine(n, len)?;
                Some((c.into_iter().map(|x| -x).collect(), -k))
            }
            Expr::Add(a, b) | Expr::Sub(a, b) => {
                let (c1, k1) = a.affine(n, len)?;
                let (c2, k2) = b.affine(n, len)?;
                let s = if matches!(self, Expr::Sub(..)) { -<BigRational as One>::one() } else { <BigRational as One>::one() };
                Some((c1.into_iter().zip(c2).map(|(x, y)| x + y * s.clone()).collect(), k1 + k2 * s))
            }
            Expr::Mul(a, b) => {
                let (c1, k1) = a.affine(n, len)?;
                let (c2, k2) = b.affine(n, len)?;
                if c1.iter().all(|x| x.is_zero()) {
                    Some((c2.into_iter().map(|x| x * k1.clone()).collect(), k2 * k1))
                } else if c2.iter().all(|x| x.is_zero()) {
                    Some((c1.into_iter().map(|x| x * k2.clone()).collect(), k1 * k2))
                } else {
                    None
                }
            }
            Expr::Div(a, b) => {
                let (c1, k1) = a.affine(n, len)?;
                let (c2, k2) = b.affine(n, len)?;
                if !c2.iter().all(|x| x.is_zero()) || k2.is_zero() {
                    return None;
                }
                Some((c1.into_iter().map(|x| x / k2.clone()).collect(), k1 / k2))
            }
            Expr::Pow(a, k) => {
                let (c, q) = a.affine(n, len)?;
                match *k {
                    0 => Some((zero(), <BigRational as One>::one())),
                    1 => Some((c, q)),
                    _ if c.iter().all(|x| x.is_zero()) => {
                        if *k < 0 && q.is_zero() {
                            return None;
                        }
                        let base = if *k < 0 { q.recip() } else { q };
                        let mut r = <BigRational as One>::one();
                        for _ in 0..k.unsigned_abs() {
                            r *= base.clone();
                        }
                        Some((c, r))
                    }
                    _ => None,
                }
            }
            Expr::Exp(_) | Expr::Tanh(_) => None,
        }
    }
}

fn index(v: Var, n: usize) -> usize {
    match v {
        Var::X(i) => i - 1,
        Var::U(j) => n + j - 1,
    }
}

struct Dual {
    v: f64,
    g: Vec<f64>,
}

impl Dual {
    fn constant(v: f64, len: usize) -> Self {
        Dual { v, g: vec![0.0; len] }
    }
    fn map(self, f: impl Fn(f64) -> f64, dv: f64) -> Self {
        Dual { v: f(self.v), g: self.g.into_iter().map(|g| g * dv).collect() }
    }
    fn combine(&self, o: &Dual, da: f64, db: f64, f: impl Fn(f64, f64) -> f64) -> Self {
        Dual { v: f(self.v, o.v), g: self.g.iter().zip(&o.g).map(|(a, b)| da * a + db * b).collect() }
    }
}

fn tokenize(src: &str) -> Vec<String> {
    src.replace('(', " ( ").replace(')', " ) ").split_whitespace().map(str::to_string).collect()
}

fn parse_tokens(t: &[String], pos: &mut usize) -> Result<Expr> {
    let tok = t.get(*pos).ok_or_else(|| VakError::Parse("unexpected end of input".into()))?;
    *pos += 1;
    if tok == ")" {
        return Err(VakError::Parse("unexpected ')'".into()));
    }
    if tok != "(" {
        return atom(tok);
    }
    let op = t.get(*pos).ok_or_else(|| VakError::Parse("missing operator".into()))?.clone();
    *pos += 1;
    let mut args = Vec::new();
    loop {
        match t.get(*pos).map(String::as_str) {
            None => return Err(VakError::Parse("unbalanced parentheses".into())),
            Some(")") => {
                *pos += 1;
                break;
            }
            Some(_) => args.push(parse_tokens(t, pos)?),
        }
    }
    let arity = |k: usize| -> Result<()> {
        if args.len() == k {
            Ok(())
        } else {
            Err(VakError::Parse(format!("'{op}' expects {k} argument(s), got {}", args.len())))
        }
    };
    let fold = |args: Vec<Expr>, f: fn(Box<Expr>, Box<Expr>) -> Expr| -> Result<Expr> {
        let mut it = args.into_iter();
        let first = it.next().ok_or_else(|| VakError::Parse("operator needs arguments".into()))?;
        Ok(it.fold(first, |acc, e| f(Box::new(acc), Box::new(e))))
    };
    match op.as_str() {
        "+" => fold(args, Expr::Add),
        "*" => fold(args, Expr::Mul),
        "-" if args.len() == 1 => Ok(Expr::Neg(Box::new(args.pop_one()))),
        "-" => fold(args, Expr::Sub),
        "/" => {
            arity(2)?;
            fold(args, Expr::Div)
        }
        "pow" | "^" => {
            arity(2)?;
            let k = match &args[1] {
                Expr::Const(v, _) if v.fract() == 0.0 && v.abs() <= 64.0 => *v as i32,
                Expr::Neg(inner) => match inner.as_ref() {
                    Expr::Const(v, _) if v.fract() == 0.0 && v.abs() <= 64.0 => -(*v as i32),
                    _ => return Err(VakError::Parse("pow exponent must be an integer literal".into())),
                },
                _ => return Err(VakError::Parse("pow exponent must be an integer literal".into())),
            };
            Ok(Expr::Pow(Box::new(args.into_iter().next().unwrap()), k))
        }
        "exp" => {
            arity(1)?;
            Ok(Expr::Exp(Box::new(args.pop_one())))
        }
        "tanh" => {
            arity(1)?;
            Ok(Expr::Tanh(Box::new(args.pop_one())))
        }
        _ => Err(VakError::Parse(format!("unknown operator '{op}'"))),
    }
}

trait PopOne {
    fn pop_one(self) -> Expr;
}

impl PopOne for Vec<Expr> {
    fn pop_one(mut self) -> Expr {
        self.pop().expect("arity checked")
    }
}

fn atom(tok: &str) -> Result<Expr> {
    let var = |rest: &str| rest.parse::<usize>().ok().filter(|&i| i >= 1);
    if let Some(i) = tok.strip_prefix('x').and_then(var) {
        return Ok(Expr::x(i));
    }
    if let Some(j) = tok.strip_prefix('u').and_then(var) {
        return Ok(Expr::u(j));
    }
    let q = <BigRational as crate::scalar::Scalar>::parse_literal(tok).ok_or_else(|| VakError::Parse(format!("bad token '{tok}'")))?;
    let v: f64 = tok.parse().map_err(|_| VakError::Parse(format!("bad number '{tok}'")))?;
    Ok(Expr::Const(v, q))
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(v, _) => write!(f, "{v}"),
            Expr::Var(Var::X(i)) => write!(f, "x{i}"),
            Expr::Var(Var::U(j)) => write!(f, "u{j}"),
            Expr::Neg(a) => write!(f, "(- {a})"),
            Expr::Add(a, b) => write!(f, "(+ {a} {b})"),
            Expr::Sub(a, b) => write!(f, "(- {a} {b})"),
            Expr::Mul(a, b) => write!(f, "(* {a} {b})"),
            Expr::Div(a, b) => write!(f, "(/ {a} {b})"),
            Expr::Pow(a, k) => write!(f, "(pow {a} {k})"),
            Expr::Exp(a) => write!(f, "(exp {a})"),
            Expr::Tanh(a) => write!(f, "(tanh {a})"),
        }
    }
}

impl std::str::FromStr for Expr {
    type Err = VakError;
    fn from_str(s: &str) -> Result<Expr> {
        Expr::parse(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_value_and_gradient() {
        let e = Expr::parse("(- (+ (pow x1 2) (pow x2 2)) 1)").unwrap();
        let (v, g) = e.grad(&[1.0, 0.0], 2).unwrap();
        assert_eq!(v, 0.0);
        assert_eq!(g, vec![2.0, 0.0]);
        assert_eq!(e.degree(), Some(2));
        assert!(!e.is_affine());
    }

    #[test]
    fn mixed_variables() {
        let e = Expr::parse("(- u1 (tanh x1))").unwrap();
        let (_, g) = e.grad(&[0.0, 3.0], 1).unwrap();
        assert_eq!(g, vec![-1.0, 1.0]);
        assert_eq!(e.max_indices(), (1, 1));
    }

    #[test]
    fn affine_forms_are_exact() {
        let e = Expr::parse("(- (* 0.1 x1) (/ x2 3))").unwrap();
        let (c, k) = e.linear_form(2, 0).unwrap();
        assert_eq!(c[0], BigRational::new(1.into(), 10.into()));
        assert_eq!(c[1], BigRational::new((-1).into(), 3.into()));
        assert!(k.is_zero());
    }

    #[test]
    fn division_by_zero_is_reported() {
        let e = Expr::parse("(/ 1 x1)").unwrap();
        assert_eq!(e.eval(&[0.0], 1), Err(VakError::DivisionByZero));
    }

    #[test]
    fn round_trip_display() {
        let e = Expr::parse("(+ x1 (* 2 (exp (- u2))) 3)").unwrap();
        assert_eq!(Expr::parse(&e.to_string()).unwrap(), e);
    }

    #[test]
    fn parse_errors() {
        assert!(Expr::parse("(+ x1").is_err());
        assert!(Expr::parse("(foo x1)").is_err());
        assert!(Expr::parse("(pow x1 x2)").is_err());
        assert!(Expr::parse("x0").is_err());
    }
}
