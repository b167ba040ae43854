//! Plant dynamics: one ODE per mode over a scalar state, integrated with
//! fixed-step RK4 over one sampling period.

use std::collections::BTreeMap;
use std::fmt;

use crate::interval::IntervalSet;
use crate::lang::Name;

pub const DEFAULT_STEPS: usize = 1000;

/// Right-hand side of `x' = p(t, x)`.
#[derive(Clone, Debug, PartialEq)]
pub enum RealExpr {
    Num(f64),
    /// Time within the period, in `[0, 1]`.
    T,
    /// The plant state.
    X,
    Neg(Box<RealExpr>),
    Add(Box<RealExpr>, Box<RealExpr>),
    Sub(Box<RealExpr>, Box<RealExpr>),
    Mul(Box<RealExpr>, Box<RealExpr>),
    Div(Box<RealExpr>, Box<RealExpr>),
    /// `log` of a constant; kept symbolic for printing.
    Log(f64),
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PlantError {
    #[error("{line}:{col}: {msg}")]
    Syntax {
        line: usize,
        col: usize,
        msg: String,
    },
    #[error("division by zero in plant equation")]
    DivByZero,
    #[error("no equation for mode `{0}`")]
    UnknownMode(String),
    #[error("flow left the finite range (start {x0}, mode {mode})")]
    NonFinite { mode: String, x0: f64 },
}

impl RealExpr {
    pub fn eval(&self, t: f64, x: f64) -> Result<f64, PlantError> {
        Ok(match self {
            RealExpr::Num(c) => *c,
            RealExpr::T => t,
            RealExpr::X => x,
            RealExpr::Log(c) => c.ln(),
            RealExpr::Neg(a) => -a.eval(t, x)?,
            RealExpr::Add(a, b) => a.eval(t, x)? + b.eval(t, x)?,
            RealExpr::Sub(a, b) => a.eval(t, x)? - b.eval(t, x)?,
            RealExpr::Mul(a, b) => a.eval(t, x)? * b.eval(t, x)?,
            RealExpr::Div(a, b) => {
                let d = b.eval(t, x)?;
                if d == 0.0 {
                    return Err(PlantError::DivByZero);
                }
                a.eval(t, x)? / d
            }
        })
    }

    fn is_constant(&self) -> bool {
        match self {
            RealExpr::T | RealExpr::X => false,
            RealExpr::Num(_) | RealExpr::Log(_) => true,
            RealExpr::Neg(a) => a.is_constant(),
            RealExpr::Add(a, b)
            | RealExpr::Sub(a, b)
            | RealExpr::Mul(a, b)
            | RealExpr::Div(a, b) => a.is_constant() && b.is_constant(),
        }
    }

    fn prec(&self) -> u8 {
        match self {
            RealExpr::Add(..) | RealExpr::Sub(..) => 1,
            RealExpr::Mul(..) | RealExpr::Div(..) => 2,
            RealExpr::Neg(_) => 3,
            _ => 4,
        }
    }

    fn show(&self, state: &str, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let child = |e: &RealExpr, min: u8, f: &mut fmt::Formatter<'_>| {
            if e.prec() < min {
                f.write_str("(")?;
                e.show(state, f)?;
                f.write_str(")")
            } else {
                e.show(state, f)
            }
        };
        match self {
            RealExpr::Num(c) => write!(f, "{c}"),
            RealExpr::T => f.write_str("t"),
            RealExpr::X => f.write_str(state),
            RealExpr::Log(c) => write!(f, "log({c})"),
            RealExpr::Neg(a) => {
                f.write_str("-")?;
                child(a, 4, f)
            }
            RealExpr::Add(a, b)
            | RealExpr::Sub(a, b)
            | RealExpr::Mul(a, b)
            | RealExpr::Div(a, b) => {
                let (sym, p) = match self {
                    RealExpr::Add(..) => ("+", 1),
                    RealExpr::Sub(..) => ("-", 1),
                    RealExpr::Mul(..) => ("*", 2),
                    _ => ("/", 2),
                };
                child(a, p, f)?;
                write!(f, " {sym} ")?;
                child(b, p + 1, f)
            }
        }
    }

    /// Prints with `state` as the name of the state variable.
    pub fn display<'a>(&'a self, state: &'a str) -> impl fmt::Display + 'a {
        struct D<'a>(&'a RealExpr, &'a str);
        impl fmt::Display for D<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                self.0.show(self.1, f)
            }
        }
        D(self, state)
    }
}

/// Parses `expr` over the state variable `state`, the time `t`, numbers,
/// `+ - * /`, parentheses and `log(c)` for a constant `c > 0`.
pub fn parse_rhs(text: &str, state: &str) -> Result<RealExpr, PlantError> {
    let mut p = RhsParser {
        chars: text.chars().collect(),
        pos: 0,
        state,
        depth: 0,
    };
    let e = p.sum()?;
    p.skip_ws();
    if p.pos < p.chars.len() {
        return Err(p.err(format!("unexpected `{}`", p.chars[p.pos])));
    }
    Ok(e)
}

struct RhsParser<'a> {
    chars: Vec<char>,
    pos: usize,
    state: &'a str,
    depth: usize,
}

impl RhsParser<'_> {
    fn err(&self, msg: impl Into<String>) -> PlantError {
        let before = &self.chars[..self.pos.min(self.chars.len())];
        let line = 1 + before.iter().filter(|c| **c == '\n').count();
        let col = 1 + before.iter().rev().take_while(|c| **c != '\n').count();
        PlantError::Syntax {
            line,
            col,
            msg: msg.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn sum(&mut self) -> Result<RealExpr, PlantError> {
        let mut e = self.product()?;
        loop {
            match self.peek() {
                Some('+') => {
                    self.pos += 1;
                    e = RealExpr::Add(Box::new(e), Box::new(self.product()?));
                }
                Some('-') => {
                    self.pos += 1;
                    e = RealExpr::Sub(Box::new(e), Box::new(self.product()?));
                }
                _ => return Ok(e),
            }
        }
    }

    fn product(&mut self) -> Result<RealExpr, PlantError> {
        let mut e = self.unary()?;
        loop {
            match self.peek() {
                Some('*') => {
                    self.pos += 1;
                    e = RealExpr::Mul(Box::new(e), Box::new(self.unary()?));
                }
                Some('/') => {
                    self.pos += 1;
                    e = RealExpr::Div(Box::new(e), Box::new(self.unary()?));
                }
                _ => return Ok(e),
            }
        }
    }

    fn unary(&mut self) -> Result<RealExpr, PlantError> {
        if self.peek() == Some('-') {
            self.pos += 1;
            return self.nested(|p| Ok(RealExpr::Neg(Box::new(p.unary()?))));
        }
        self.atom()
    }

    fn nested(
        &mut self,
        f: impl FnOnce(&mut Self) -> Result<RealExpr, PlantError>,
    ) -> Result<RealExpr, PlantError> {
        if self.depth >= 200 {
            return Err(self.err("expression nested too deeply"));
        }
        self.depth += 1;
        let r = f(self);
        self.depth -= 1;
        r
    }

    fn atom(&mut self) -> Result<RealExpr, PlantError> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let e = self.nested(|p| p.sum())?;
                if self.peek() != Some(')') {
                    return Err(self.err("expected `)`"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => {
                let start = self.pos;
                while self.pos < self.chars.len() {
                    let d = self.chars[self.pos];
                    let exp_sign = (d == '-' || d == '+')
                        && self.pos > start
                        && matches!(self.chars[self.pos - 1], 'e' | 'E');
                    if d.is_ascii_digit() || d == '.' || d == 'e' || d == 'E' || exp_sign {
                        self.pos += 1;
                    } else {
                        break;
                    }
                }
                let s: String = self.chars[start..self.pos].iter().collect();
                match s.parse::<f64>() {
                    Ok(v) if v.is_finite() => Ok(RealExpr::Num(v)),
                    _ => {
                        self.pos = start;
                        Err(self.err(format!("malformed number `{s}`")))
                    }
                }
            }
            Some(c) if c.is_ascii_alphabetic() || c == '_' => {
                let start = self.pos;
                while self.pos < self.chars.len()
                    && (self.chars[self.pos].is_ascii_alphanumeric()
                        || matches!(self.chars[self.pos], '_' | '\''))
                {
                    self.pos += 1;
                }
                let id: String = self.chars[start..self.pos].iter().collect();
                if id == self.state {
                    Ok(RealExpr::X)
                } else if id == "t" {
                    Ok(RealExpr::T)
                } else if id == "log" {
                    let arg = self.nested(|p| p.atom())?;
                    if !arg.is_constant() {
                        return Err(self.err("`log` takes a constant argument"));
                    }
                    let c = arg.eval(0.0, 0.0)?;
                    if c.is_nan() || c <= 0.0 {
                        return Err(self.err("`log` needs a positive argument"));
                    }
                    Ok(RealExpr::Log(c))
                } else {
                    self.pos = start;
                    Err(self.err(format!("unknown identifier `{id}`")))
                }
            }
            Some(c) => Err(self.err(format!("unexpected `{c}`"))),
            None => Err(self.err("unexpected end of expression")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Forward,
    /// Integrates `-p(1 - t, x)` forward, i.e. the time-reversed system.
    Reverse,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlantSpec {
    pub state: Name,
    pub rhs: BTreeMap<Name, RealExpr>,
    /// RK4 steps per period.
    pub steps: usize,
}

impl PlantSpec {
    pub fn new(state: &str, rhs: impl IntoIterator<Item = (Name, RealExpr)>) -> Self {
        PlantSpec {
            state: state.into(),
            rhs: rhs.into_iter().collect(),
            steps: DEFAULT_STEPS,
        }
    }

    fn field(&self, mode: &str) -> Result<&RealExpr, PlantError> {
        self.rhs
            .get(mode)
            .ok_or_else(|| PlantError::UnknownMode(mode.to_string()))
    }

    /// State after one period in `mode` starting from `x0`.
    pub fn flow(&self, mode: &str, x0: f64, dir: Direction) -> Result<f64, PlantError> {
        let p = self.field(mode)?;
        let f = |t: f64, x: f64| -> Result<f64, PlantError> {
            match dir {
                Direction::Forward => p.eval(t, x),
                Direction::Reverse => Ok(-p.eval(1.0 - t, x)?),
            }
        };
        let n = self.steps.max(1);
        let h = 1.0 / n as f64;
        let mut x = x0;
        for k in 0..n {
            let t = k as f64 * h;
            let k1 = f(t, x)?;
            let k2 = f(t + h / 2.0, x + h / 2.0 * k1)?;
            let k3 = f(t + h / 2.0, x + h / 2.0 * k2)?;
            let k4 = f(t + h, x + h * k3)?;
            x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            if !x.is_finite() {
                return Err(PlantError::NonFinite {
                    mode: mode.to_string(),
                    x0,
                });
            }
        }
        Ok(x)
    }

    /// Image of a set of states under one period of `mode`. Endpoints are
    /// flowed individually: in one dimension trajectories cannot cross, so
    /// the flow map is increasing.
    pub fn flow_interval(
        &self,
        mode: &str,
        xs: &IntervalSet,
        dir: Direction,
    ) -> Result<IntervalSet, PlantError> {
        self.field(mode)?;
        xs.map_monotone(|x| self.flow(mode, x, dir))
    }
}
