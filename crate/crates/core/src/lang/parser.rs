//! Recursive-descent parser for controller programs and assertions.
//!
//! Grammar (informal):
//!
//! ```text
//! cmd     ::= simple (';' simple)* [';']
//! simple  ::= 'skip' | x_t ':=' aexp | x_a ':=' mode
//!           | 'if' bexp 'then' simple 'else' simple
//!           | 'switch' '{' (bexp ':' simple [';'])+ '}'
//!           | '{' cmd '}'
//! form    ::= conj ('||' conj)*
//! conj    ::= unary ('&&' unary)*
//! unary   ::= '!' unary | atom
//! atom    ::= 'true' | 'false' | x_s | mexp '=' mexp
//!           | ('exists' | 'forall') _vN '.' form
//!           | aexp rop aexp (rop aexp)*        -- chains read as conjunctions
//!           | '(' form ')'
//! aexp    ::= term (('+' | '-') term)*
//! term    ::= factor ('*' factor)*
//! factor  ::= num | '-' num | '-' factor | x_t | _vN | '(' aexp ')'
//! ```

use super::ast::{name, AExp, AOp, BExp, Cmd, Formula, ModeExpr, ROp};
use super::lexer::{tokenize, Spanned, Tok};
use super::vars::{is_logical_identifier, VarClass, VarTable};
use super::{LangError, Real};

struct Parser<'a> {
    toks: Vec<Spanned>,
    pos: usize,
    vars: &'a VarTable,
    /// Logical variables are only legal in assertions.
    allow_logical: bool,
    allow_modes: bool,
    depth: usize,
}

const MAX_DEPTH: usize = 200;

type PResult<T> = Result<T, LangError>;

pub fn parse_controller(text: &str, vars: &VarTable) -> Result<Cmd, LangError> {
    let mut p = Parser {
        toks: tokenize(text)?,
        pos: 0,
        vars,
        allow_logical: false,
        allow_modes: false,
        depth: 0,
    };
    let c = p.cmd()?;
    p.expect_eof()?;
    Ok(c)
}

pub fn parse_formula(text: &str, vars: &VarTable) -> Result<Formula, LangError> {
    let mut p = Parser {
        toks: tokenize(text)?,
        pos: 0,
        vars,
        allow_logical: true,
        allow_modes: true,
        depth: 0,
    };
    let f = p.formula()?;
    p.expect_eof()?;
    Ok(f)
}

pub fn parse_bexp(text: &str, vars: &VarTable) -> Result<BExp, LangError> {
    let mut p = Parser {
        toks: tokenize(text)?,
        pos: 0,
        vars,
        allow_logical: false,
        allow_modes: false,
        depth: 0,
    };
    let f = p.formula()?;
    p.expect_eof()?;
    Ok(to_bexp(&f).expect("controller-mode parser only builds guard formulas"))
}

fn to_bexp(f: &Formula) -> Option<BExp> {
    Some(match f {
        Formula::True => BExp::True,
        Formula::False => BExp::False,
        Formula::Sense(x) => BExp::Sense(x.clone()),
        Formula::Cmp(op, l, r) => BExp::Cmp(*op, l.clone(), r.clone()),
        Formula::Not(a) => BExp::Not(Box::new(to_bexp(a)?)),
        Formula::Or(a, b) => BExp::Or(Box::new(to_bexp(a)?), Box::new(to_bexp(b)?)),
        Formula::And(a, b) => BExp::And(Box::new(to_bexp(a)?), Box::new(to_bexp(b)?)),
        Formula::ModeEq(..) | Formula::Exists(..) | Formula::Forall(..) => return None,
    })
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn nested<T>(&mut self, f: impl FnOnce(&mut Self) -> PResult<T>) -> PResult<T> {
        if self.depth >= MAX_DEPTH {
            return self.err("expression nested too deeply");
        }
        self.depth += 1;
        let r = f(self);
        self.depth -= 1;
        r
    }

    /// Index of the `)` matching the `(` at `self.pos`.
    fn matching_paren(&self) -> Option<usize> {
        let mut depth = 0usize;
        for (i, s) in self.toks.iter().enumerate().skip(self.pos) {
            match s.tok {
                Tok::LParen => depth += 1,
                Tok::RParen => {
                    depth -= 1;
                    if depth == 0 {
                        return Some(i);
                    }
                }
                Tok::Eof => return None,
                _ => {}
            }
        }
        None
    }

    fn next(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> PResult<T> {
        let s = &self.toks[self.pos];
        Err(LangError::syntax(s.line, s.col, msg))
    }

    fn undeclared<T>(&self, ident: &str) -> PResult<T> {
        let s = &self.toks[self.pos];
        Err(LangError::Undeclared {
            line: s.line,
            col: s.col,
            name: ident.to_string(),
        })
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.next();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: Tok, what: &str) -> PResult<()> {
        if self.eat(&t) {
            Ok(())
        } else {
            self.err(format!("expected {what}, found {}", describe(self.peek())))
        }
    }

    fn expect_kw(&mut self, kw: &str) -> PResult<()> {
        if self.is_kw(kw) {
            self.next();
            Ok(())
        } else {
            self.err(format!("expected `{kw}`, found {}", describe(self.peek())))
        }
    }

    fn expect_eof(&self) -> PResult<()> {
        match self.peek() {
            Tok::Eof => Ok(()),
            t => self.err(format!("unexpected {} after end of input", describe(t))),
        }
    }

    // ---- commands ----

    fn cmd(&mut self) -> PResult<Cmd> {
        let mut parts = vec![self.simple()?];
        while self.eat(&Tok::Semi) {
            if matches!(self.peek(), Tok::Eof | Tok::RBrace) {
                break;
            }
            parts.push(self.simple()?);
        }
        let last = parts.pop().expect("at least one command");
        Ok(parts
            .into_iter()
            .rev()
            .fold(last, |acc, c| Cmd::seq(c, acc)))
    }

    fn simple(&mut self) -> PResult<Cmd> {
        match self.peek().clone() {
            Tok::LBrace => {
                self.next();
                let c = self.nested(|p| p.cmd())?;
                self.expect(Tok::RBrace, "`}`")?;
                Ok(c)
            }
            Tok::Ident(kw) if kw == "skip" => {
                self.next();
                Ok(Cmd::Skip)
            }
            Tok::Ident(kw) if kw == "if" => {
                self.next();
                let b = self.guard()?;
                self.expect_kw("then")?;
                let t = self.nested(|p| p.simple())?;
                self.expect_kw("else")?;
                let e = self.nested(|p| p.simple())?;
                Ok(Cmd::ite(b, t, e))
            }
            Tok::Ident(kw) if kw == "switch" => {
                self.next();
                self.expect(Tok::LBrace, "`{` after `switch`")?;
                let mut arms = Vec::new();
                while !matches!(self.peek(), Tok::RBrace | Tok::Eof) {
                    let g = self.guard()?;
                    self.expect(Tok::Colon, "`:` after switch guard")?;
                    let body = self.simple()?;
                    self.eat(&Tok::Semi);
                    arms.push((g, body));
                }
                self.expect(Tok::RBrace, "`}` closing `switch`")?;
                desugar_switch(arms).map_or_else(|| self.err("`switch` needs at least one arm"), Ok)
            }
            Tok::Ident(id) => {
                if super::lexer::is_keyword(&id) {
                    return self.err(format!("unexpected keyword `{id}`"));
                }
                match self.vars.class_of(&id) {
                    Some(VarClass::Think) => {
                        let x = self.vars.lookup(&id, VarClass::Think).unwrap();
                        self.next();
                        self.expect(Tok::Assign, "`:=`")?;
                        let a = self.aexp()?;
                        Ok(Cmd::Assign(x, a))
                    }
                    Some(VarClass::Act) => {
                        let x = self.vars.act().clone();
                        self.next();
                        self.expect(Tok::Assign, "`:=`")?;
                        match self.next() {
                            Tok::Ident(m) => match self.vars.lookup(&m, VarClass::Mode) {
                                Some(m) => Ok(Cmd::SetMode(x, m)),
                                None => {
                                    self.pos -= 1;
                                    self.undeclared(&m)
                                }
                            },
                            t => {
                                self.pos -= 1;
                                self.err(format!("expected a mode name, found {}", describe(&t)))
                            }
                        }
                    }
                    Some(VarClass::Sense) => {
                        self.err(format!("sense variable `{id}` cannot be assigned"))
                    }
                    Some(VarClass::Mode) => self.err(format!("mode `{id}` cannot be assigned")),
                    None => self.undeclared(&id),
                }
            }
            t => self.err(format!("expected a command, found {}", describe(&t))),
        }
    }

    fn guard(&mut self) -> PResult<BExp> {
        let f = self.formula()?;
        match to_bexp(&f) {
            Some(b) => Ok(b),
            None => {
                self.err("mode equalities and quantifiers are not allowed in controller guards")
            }
        }
    }

    // ---- formulas ----

    fn formula(&mut self) -> PResult<Formula> {
        let mut f = self.conj()?;
        while self.eat(&Tok::OrOr) {
            let r = self.conj()?;
            f = Formula::or(f, r);
        }
        Ok(f)
    }

    fn conj(&mut self) -> PResult<Formula> {
        let mut f = self.unary()?;
        while self.eat(&Tok::AndAnd) {
            let r = self.unary()?;
            f = Formula::and(f, r);
        }
        Ok(f)
    }

    fn unary(&mut self) -> PResult<Formula> {
        if self.eat(&Tok::Bang) {
            return Ok(Formula::not(self.nested(|p| p.unary())?));
        }
        self.atom()
    }

    fn atom(&mut self) -> PResult<Formula> {
        match self.peek().clone() {
            Tok::Ident(kw) if kw == "true" => {
                self.next();
                Ok(Formula::True)
            }
            Tok::Ident(kw) if kw == "false" => {
                self.next();
                Ok(Formula::False)
            }
            Tok::Ident(kw) if kw == "exists" || kw == "forall" => {
                if !self.allow_logical {
                    return self.err("quantifiers are only allowed in assertions");
                }
                self.next();
                let v = match self.next() {
                    Tok::Ident(v) if is_logical_identifier(&v) => name(&v),
                    _ => {
                        self.pos -= 1;
                        return self.err("quantified variables must be logical variables `_vN`");
                    }
                };
                self.expect(Tok::Dot, "`.` after quantified variable")?;
                let body = Box::new(self.nested(|p| p.formula())?);
                Ok(if kw == "exists" {
                    Formula::Exists(v, body)
                } else {
                    Formula::Forall(v, body)
                })
            }
            Tok::Ident(id) if self.vars.class_of(&id) == Some(VarClass::Sense) => {
                self.next();
                Ok(Formula::Sense(
                    self.vars.lookup(&id, VarClass::Sense).unwrap(),
                ))
            }
            Tok::Ident(id)
                if matches!(
                    self.vars.class_of(&id),
                    Some(VarClass::Act | VarClass::Mode)
                ) =>
            {
                if !self.allow_modes {
                    return self.err(format!("`{id}` cannot appear in a controller guard"));
                }
                let l = self.mode_expr()?;
                self.expect(Tok::Eq, "`=` in mode comparison")?;
                let r = self.mode_expr()?;
                Ok(Formula::ModeEq(l, r))
            }
            Tok::LParen => {
                // An arithmetic group is followed by an operator or relation.
                let arith = self.matching_paren().is_some_and(|close| {
                    matches!(
                        self.toks[close + 1].tok,
                        Tok::Plus
                            | Tok::Minus
                            | Tok::Star
                            | Tok::Eq
                            | Tok::Lt
                            | Tok::Le
                            | Tok::Gt
                            | Tok::Ge
                    )
                });
                if arith {
                    return self.comparison();
                }
                self.next();
                let f = self.nested(|p| p.formula())?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            _ => self.comparison(),
        }
    }

    fn mode_expr(&mut self) -> PResult<ModeExpr> {
        match self.next() {
            Tok::Ident(id) => match self.vars.class_of(&id) {
                Some(VarClass::Act) => Ok(ModeExpr::Act(self.vars.act().clone())),
                Some(VarClass::Mode) => Ok(ModeExpr::Lit(
                    self.vars.lookup(&id, VarClass::Mode).unwrap(),
                )),
                _ => {
                    self.pos -= 1;
                    self.err(format!("expected a mode or the act variable, found `{id}`"))
                }
            },
            t => {
                self.pos -= 1;
                self.err(format!("expected a mode, found {}", describe(&t)))
            }
        }
    }

    fn rop(&self) -> Option<ROp> {
        Some(match self.peek() {
            Tok::Eq => ROp::Eq,
            Tok::Lt => ROp::Lt,
            Tok::Le => ROp::Le,
            Tok::Gt => ROp::Gt,
            Tok::Ge => ROp::Ge,
            _ => return None,
        })
    }

    fn comparison(&mut self) -> PResult<Formula> {
        let mut lhs = self.aexp()?;
        let Some(op) = self.rop() else {
            return self.err(format!(
                "expected a comparison operator, found {}",
                describe(self.peek())
            ));
        };
        self.next();
        let mut rhs = self.aexp()?;
        let mut f = Formula::Cmp(op, lhs, rhs.clone());
        while let Some(op) = self.rop() {
            self.next();
            lhs = rhs;
            rhs = self.aexp()?;
            f = Formula::and(f, Formula::Cmp(op, lhs, rhs.clone()));
        }
        Ok(f)
    }

    // ---- arithmetic ----

    fn aexp(&mut self) -> PResult<AExp> {
        let mut a = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => AOp::Add,
                Tok::Minus => AOp::Sub,
                _ => return Ok(a),
            };
            self.next();
            let r = self.term()?;
            a = AExp::bin(op, a, r);
        }
    }

    fn term(&mut self) -> PResult<AExp> {
        let mut a = self.factor()?;
        while self.eat(&Tok::Star) {
            let r = self.factor()?;
            a = AExp::bin(AOp::Mul, a, r);
        }
        Ok(a)
    }

    fn factor(&mut self) -> PResult<AExp> {
        match self.peek().clone() {
            Tok::Num(r) => {
                self.next();
                Ok(AExp::Num(r))
            }
            Tok::Minus => {
                self.next();
                if let Tok::Num(r) = self.peek().clone() {
                    self.next();
                    return Ok(AExp::Num(r.neg()));
                }
                let f = self.nested(|p| p.factor())?;
                Ok(AExp::bin(AOp::Mul, AExp::Num(Real::from_int(-1)), f))
            }
            Tok::LParen => {
                self.next();
                let a = self.nested(|p| p.aexp())?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(a)
            }
            Tok::Ident(id) if is_logical_identifier(&id) => {
                if !self.allow_logical {
                    return self.err("logical variables are only allowed in assertions");
                }
                self.next();
                Ok(AExp::Logical(name(&id)))
            }
            Tok::Ident(id) => match self.vars.class_of(&id) {
                Some(VarClass::Think) => {
                    self.next();
                    Ok(AExp::Think(self.vars.lookup(&id, VarClass::Think).unwrap()))
                }
                Some(_) => self.err(format!("`{id}` is not a think variable")),
                None if super::lexer::is_keyword(&id) => {
                    self.err(format!("unexpected keyword `{id}`"))
                }
                None => self.undeclared(&id),
            },
            t => self.err(format!(
                "expected an arithmetic expression, found {}",
                describe(&t)
            )),
        }
    }
}

/// `switch { g1: c1; ...; gn: cn }` becomes `if g1 then c1 else ... else cn`.
/// The last guard is dropped; earlier arms take priority on overlap.
pub fn desugar_switch(mut arms: Vec<(BExp, Cmd)>) -> Option<Cmd> {
    let (_, last) = arms.pop()?;
    Some(
        arms.into_iter()
            .rev()
            .fold(last, |acc, (g, c)| Cmd::ite(g, c, acc)),
    )
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Num(r) => format!("number `{r}`"),
        Tok::Eof => "end of input".into(),
        other => format!("`{}`", token_text(other)),
    }
}

fn token_text(t: &Tok) -> &'static str {
    match t {
        Tok::Assign => ":=",
        Tok::Semi => ";",
        Tok::Colon => ":",
        Tok::Dot => ".",
        Tok::Comma => ",",
        Tok::LParen => "(",
        Tok::RParen => ")",
        Tok::LBrace => "{",
        Tok::RBrace => "}",
        Tok::AndAnd => "&&",
        Tok::OrOr => "||",
        Tok::Bang => "!",
        Tok::Eq => "=",
        Tok::Lt => "<",
        Tok::Le => "<=",
        Tok::Gt => ">",
        Tok::Ge => ">=",
        Tok::Plus => "+",
        Tok::Minus => "-",
        Tok::Star => "*",
        Tok::Ident(_) | Tok::Num(_) | Tok::Eof => "?",
    }
}
