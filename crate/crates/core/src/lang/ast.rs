use std::sync::Arc;

use super::Real;

/// Interned-ish identifier. Cheap to clone and `Send + Sync`.
pub type Name = Arc<str>;

pub fn name(s: &str) -> Name {
    Arc::from(s)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AOp {
    Add,
    Sub,
    Mul,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ROp {
    Eq,
    Lt,
    Le,
    Gt,
    Ge,
}

impl ROp {
    pub fn symbol(self) -> &'static str {
        match self {
            ROp::Eq => "=",
            ROp::Lt => "<",
            ROp::Le => "<=",
            ROp::Gt => ">",
            ROp::Ge => ">=",
        }
    }

    pub fn compare(self, l: f64, r: f64, eps_eq: f64) -> bool {
        match self {
            ROp::Eq => (l - r).abs() <= eps_eq,
            ROp::Lt => l < r,
            ROp::Le => l <= r,
            ROp::Gt => l > r,
            ROp::Ge => l >= r,
        }
    }
}

/// Arithmetic expressions over think variables and logical variables.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AExp {
    Num(Real),
    Think(Name),
    Logical(Name),
    Bin(AOp, Box<AExp>, Box<AExp>),
}

impl AExp {
    pub fn num(n: i64) -> Self {
        AExp::Num(Real::from_int(n))
    }

    pub fn think(x: &str) -> Self {
        AExp::Think(name(x))
    }

    pub fn bin(op: AOp, l: AExp, r: AExp) -> Self {
        AExp::Bin(op, Box::new(l), Box::new(r))
    }

    pub fn mentions_logical(&self, v: &str) -> bool {
        match self {
            AExp::Logical(n) => &**n == v,
            AExp::Num(_) | AExp::Think(_) => false,
            AExp::Bin(_, l, r) => l.mentions_logical(v) || r.mentions_logical(v),
        }
    }

    pub fn mentions_think(&self, x: &str) -> bool {
        match self {
            AExp::Think(n) => &**n == x,
            AExp::Num(_) | AExp::Logical(_) => false,
            AExp::Bin(_, l, r) => l.mentions_think(x) || r.mentions_think(x),
        }
    }

    pub(crate) fn collect_logical(&self, out: &mut Vec<Name>) {
        match self {
            AExp::Logical(n) => out.push(n.clone()),
            AExp::Num(_) | AExp::Think(_) => {}
            AExp::Bin(_, l, r) => {
                l.collect_logical(out);
                r.collect_logical(out);
            }
        }
    }
}

/// Boolean guards of controller programs.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BExp {
    True,
    False,
    Sense(Name),
    Cmp(ROp, AExp, AExp),
    Not(Box<BExp>),
    Or(Box<BExp>, Box<BExp>),
    And(Box<BExp>, Box<BExp>),
}

/// Controller commands. The language has no loops.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Cmd {
    Skip,
    Assign(Name, AExp),
    /// `act := mode`; the first field is the act variable.
    SetMode(Name, Name),
    Seq(Box<Cmd>, Box<Cmd>),
    If(BExp, Box<Cmd>, Box<Cmd>),
}

impl Cmd {
    pub fn seq(a: Cmd, b: Cmd) -> Self {
        Cmd::Seq(Box::new(a), Box::new(b))
    }

    pub fn ite(b: BExp, t: Cmd, e: Cmd) -> Self {
        Cmd::If(b, Box::new(t), Box::new(e))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ModeExpr {
    Lit(Name),
    /// The act variable, by name.
    Act(Name),
}

/// Assertions over controller states.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    True,
    False,
    Sense(Name),
    Cmp(ROp, AExp, AExp),
    ModeEq(ModeExpr, ModeExpr),
    Not(Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Exists(Name, Box<Formula>),
    Forall(Name, Box<Formula>),
}

impl Formula {
    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(a: Formula) -> Self {
        Formula::Not(Box::new(a))
    }

    pub fn cmp(op: ROp, l: AExp, r: AExp) -> Self {
        Formula::Cmp(op, l, r)
    }

    /// `act = mode`
    pub fn mode_is(act: &Name, mode: &Name) -> Self {
        Formula::ModeEq(ModeExpr::Act(act.clone()), ModeExpr::Lit(mode.clone()))
    }

    pub fn conj<I: IntoIterator<Item = Formula>>(items: I) -> Self {
        let mut it = items.into_iter();
        match it.next() {
            None => Formula::True,
            Some(first) => it.fold(first, Formula::and),
        }
    }

    pub fn disj<I: IntoIterator<Item = Formula>>(items: I) -> Self {
        let mut it = items.into_iter();
        match it.next() {
            None => Formula::False,
            Some(first) => it.fold(first, Formula::or),
        }
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Formula::Exists(..) | Formula::Forall(..) => false,
            Formula::Not(a) => a.is_quantifier_free(),
            Formula::Or(a, b) | Formula::And(a, b) => {
                a.is_quantifier_free() && b.is_quantifier_free()
            }
            _ => true,
        }
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        match self {
            Formula::Not(a) | Formula::Exists(_, a) | Formula::Forall(_, a) => 1 + a.size(),
            Formula::Or(a, b) | Formula::And(a, b) => 1 + a.size() + b.size(),
            _ => 1,
        }
    }

    /// Free logical variables, in order of first occurrence, with duplicates.
    pub(crate) fn collect_free_logical(&self, bound: &mut Vec<Name>, out: &mut Vec<Name>) {
        match self {
            Formula::Cmp(_, l, r) => {
                let mut tmp = Vec::new();
                l.collect_logical(&mut tmp);
                r.collect_logical(&mut tmp);
                out.extend(tmp.into_iter().filter(|v| !bound.contains(v)));
            }
            Formula::Not(a) => a.collect_free_logical(bound, out),
            Formula::Or(a, b) | Formula::And(a, b) => {
                a.collect_free_logical(bound, out);
                b.collect_free_logical(bound, out);
            }
            Formula::Exists(v, a) | Formula::Forall(v, a) => {
                bound.push(v.clone());
                a.collect_free_logical(bound, out);
                bound.pop();
            }
            _ => {}
        }
    }

    /// Every logical variable name occurring anywhere, bound or free.
    pub(crate) fn all_logical_names(&self, out: &mut Vec<Name>) {
        match self {
            Formula::Cmp(_, l, r) => {
                l.collect_logical(out);
                r.collect_logical(out);
            }
            Formula::Not(a) => a.all_logical_names(out),
            Formula::Or(a, b) | Formula::And(a, b) => {
                a.all_logical_names(out);
                b.all_logical_names(out);
            }
            Formula::Exists(v, a) | Formula::Forall(v, a) => {
                out.push(v.clone());
                a.all_logical_names(out);
            }
            _ => {}
        }
    }
}

impl From<&BExp> for Formula {
    fn from(b: &BExp) -> Self {
        match b {
            BExp::True => Formula::True,
            BExp::False => Formula::False,
            BExp::Sense(x) => Formula::Sense(x.clone()),
            BExp::Cmp(op, l, r) => Formula::Cmp(*op, l.clone(), r.clone()),
            BExp::Not(a) => Formula::not(a.as_ref().into()),
            BExp::Or(a, b) => Formula::or(a.as_ref().into(), b.as_ref().into()),
            BExp::And(a, b) => Formula::and(a.as_ref().into(), b.as_ref().into()),
        }
    }
}
