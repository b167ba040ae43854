use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};

use super::ast::{name, Name};
use super::LangError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VarClass {
    Think,
    Sense,
    Act,
    Mode,
}

/// Declared variables of a controller: think, sense, the single act variable,
/// and the mode set. Also hands out fresh logical variable names.
pub struct VarTable {
    think: Vec<Name>,
    sense: Vec<Name>,
    act: Name,
    modes: Vec<Name>,
    fresh: AtomicU64,
}

impl VarTable {
    pub fn new<S: AsRef<str>>(
        think: &[S],
        sense: &[S],
        act: &str,
        modes: &[S],
    ) -> Result<Self, LangError> {
        let think: Vec<Name> = think.iter().map(|s| name(s.as_ref())).collect();
        let sense: Vec<Name> = sense.iter().map(|s| name(s.as_ref())).collect();
        let modes: Vec<Name> = modes.iter().map(|s| name(s.as_ref())).collect();
        let act = name(act);
        if modes.is_empty() {
            return Err(LangError::Declaration(
                "at least one mode is required".into(),
            ));
        }
        let mut seen: Vec<&Name> = Vec::new();
        for n in think
            .iter()
            .chain(&sense)
            .chain(std::iter::once(&act))
            .chain(&modes)
        {
            if !is_user_identifier(n) {
                return Err(LangError::Declaration(format!(
                    "`{n}` is not a valid identifier"
                )));
            }
            if seen.contains(&n) {
                return Err(LangError::Declaration(format!(
                    "`{n}` is declared more than once"
                )));
            }
            seen.push(n);
        }
        Ok(VarTable {
            think,
            sense,
            act,
            modes,
            fresh: AtomicU64::new(0),
        })
    }

    pub fn think(&self) -> &[Name] {
        &self.think
    }

    pub fn sense(&self) -> &[Name] {
        &self.sense
    }

    pub fn act(&self) -> &Name {
        &self.act
    }

    pub fn modes(&self) -> &[Name] {
        &self.modes
    }

    pub fn mode_index(&self, m: &str) -> Option<usize> {
        self.modes.iter().position(|x| &**x == m)
    }

    pub fn class_of(&self, ident: &str) -> Option<VarClass> {
        if self.think.iter().any(|x| &**x == ident) {
            Some(VarClass::Think)
        } else if self.sense.iter().any(|x| &**x == ident) {
            Some(VarClass::Sense)
        } else if &*self.act == ident {
            Some(VarClass::Act)
        } else if self.modes.iter().any(|x| &**x == ident) {
            Some(VarClass::Mode)
        } else {
            None
        }
    }

    pub fn lookup(&self, ident: &str, class: VarClass) -> Option<Name> {
        let pool: &[Name] = match class {
            VarClass::Think => &self.think,
            VarClass::Sense => &self.sense,
            VarClass::Mode => &self.modes,
            VarClass::Act => std::slice::from_ref(&self.act),
        };
        pool.iter().find(|x| &***x == ident).cloned()
    }

    /// A logical variable name `_vN` that was never handed out before.
    /// Safe to call from several threads at once.
    pub fn fresh_logical(&self) -> Name {
        let n = self.fresh.fetch_add(1, Ordering::Relaxed);
        name(&format!("_v{n}"))
    }
}

impl Clone for VarTable {
    fn clone(&self) -> Self {
        VarTable {
            think: self.think.clone(),
            sense: self.sense.clone(),
            act: self.act.clone(),
            modes: self.modes.clone(),
            fresh: AtomicU64::new(self.fresh.load(Ordering::Relaxed)),
        }
    }
}

impl fmt::Debug for VarTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("VarTable")
            .field("think", &self.think)
            .field("sense", &self.sense)
            .field("act", &self.act)
            .field("modes", &self.modes)
            .finish()
    }
}

/// User identifiers: ASCII letter first, then letters, digits, `_` or `'`.
/// Names starting with `_` are reserved for generated logical variables.
pub fn is_user_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
        && !super::lexer::is_keyword(s)
}

pub fn is_logical_identifier(s: &str) -> bool {
    s.strip_prefix("_v")
        .is_some_and(|d| !d.is_empty() && d.chars().all(|c| c.is_ascii_digit()))
}
