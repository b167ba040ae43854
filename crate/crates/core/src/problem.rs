//! Loader for `.sds` problem files.
//!
//! A problem file is a sequence of sections, each opened by a header line:
//!
//! ```text
//! [modes]         optional `state = v`, then one `Mode: rhs` per line
//! [controller]    program text
//! [sensor]        optional `input = i`, then one `xs: predicate` per line
//! [input]         the input domain, e.g. `[-0.2, 0.2]`
//! [pre]           `ctrl: formula` and `plant: interval set`
//! [post]          same as [pre]
//! [steps]         the horizon T
//! ```
//!
//! `#` starts a comment. The act variable is the one the controller assigns
//! modes to; every other controller identifier that is neither a mode nor a
//! sense variable is a think variable.

use std::collections::BTreeMap;
use std::path::Path;

use crate::interval::{Interval, IntervalSet};
use crate::lang::lexer::{tokenize, Tok};
use crate::lang::vars::is_user_identifier;
use crate::lang::{parse_controller, parse_formula, Formula, LangError, Name, VarTable};
use crate::plant::{parse_rhs, PlantError, PlantSpec};
use crate::sensor::SensorSpec;
use crate::system::{CPCondition, SynthesisProblem, SystemSpec};

const SECTIONS: [&str; 7] = [
    "modes",
    "controller",
    "sensor",
    "input",
    "pre",
    "post",
    "steps",
];

#[derive(Debug, thiserror::Error)]
pub enum ProblemError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("[{section}] line {line}: {msg}")]
    At {
        section: String,
        line: usize,
        msg: String,
    },
    #[error("missing section [{0}]")]
    Missing(String),
}

struct Section {
    /// File line of the header.
    header: usize,
    /// Body lines with their file line numbers, comments stripped.
    lines: Vec<(usize, String)>,
}

impl Section {
    fn err(&self, name: &str, line: usize, msg: impl Into<String>) -> ProblemError {
        ProblemError::At {
            section: name.to_string(),
            line,
            msg: msg.into(),
        }
    }

    fn nonblank(&self) -> impl Iterator<Item = &(usize, String)> {
        self.lines.iter().filter(|(_, l)| !l.trim().is_empty())
    }

    /// Body text, with blank lines kept so line numbers line up.
    fn text(&self) -> String {
        self.lines
            .iter()
            .map(|(_, l)| l.as_str())
            .collect::<Vec<_>>()
            .join("\n")
    }

    fn first_line(&self) -> usize {
        self.lines.first().map_or(self.header, |(n, _)| *n)
    }
}

fn strip_comment(line: &str) -> &str {
    line.split_once('#').map_or(line, |(a, _)| a)
}

fn split_sections(src: &str) -> Result<BTreeMap<String, Section>, ProblemError> {
    let mut out: BTreeMap<String, Section> = BTreeMap::new();
    let mut current: Option<String> = None;
    for (idx, raw) in src.lines().enumerate() {
        let n = idx + 1;
        let line = strip_comment(raw);
        let t = line.trim();
        if let Some(h) = t.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
            let h = h.trim();
            if SECTIONS.contains(&h) {
                if out.contains_key(h) {
                    return Err(ProblemError::At {
                        section: h.into(),
                        line: n,
                        msg: "duplicate section".into(),
                    });
                }
                out.insert(
                    h.to_string(),
                    Section {
                        header: n,
                        lines: Vec::new(),
                    },
                );
                current = Some(h.to_string());
                continue;
            }
        }
        match &current {
            Some(s) => out.get_mut(s).unwrap().lines.push((n, line.to_string())),
            None if t.is_empty() => {}
            None => {
                return Err(ProblemError::At {
                    section: "-".into(),
                    line: n,
                    msg: "text before the first section".into(),
                })
            }
        }
    }
    for s in SECTIONS {
        if !out.contains_key(s) {
            return Err(ProblemError::Missing(s.to_string()));
        }
    }
    Ok(out)
}

/// `key = value` on a line by itself.
fn setting<'a>(line: &'a str, key: &str) -> Option<&'a str> {
    let (k, v) = line.split_once('=')?;
    (k.trim() == key && !v.contains('=')).then(|| v.trim())
}

fn state_name(sec: &Section, name: &str, line: usize, v: &str) -> Result<String, ProblemError> {
    if !is_user_identifier(v) || v == "t" || v == "log" {
        return Err(sec.err(
            name,
            line,
            format!("`{v}` cannot be used as a variable name"),
        ));
    }
    Ok(v.to_string())
}

/// Maps an error position inside a section body to a file line.
fn lang_line(sec: &Section, e: &LangError) -> usize {
    match e {
        LangError::Syntax { line, .. } | LangError::Undeclared { line, .. } => {
            sec.first_line() + line - 1
        }
        LangError::Declaration(_) => sec.header,
    }
}

fn parse_cp(sec: &Section, name: &str, vars: &VarTable) -> Result<CPCondition, ProblemError> {
    let (mut ctrl, mut plant) = (None, None);
    for (n, l) in sec.nonblank() {
        let Some((key, val)) = l.split_once(':') else {
            return Err(sec.err(name, *n, "expected `ctrl: formula` or `plant: intervals`"));
        };
        let slot = match key.trim() {
            "ctrl" => &mut ctrl,
            "plant" => &mut plant,
            k => return Err(sec.err(name, *n, format!("unknown key `{k}`"))),
        };
        if slot.is_some() {
            return Err(sec.err(name, *n, format!("duplicate key `{}`", key.trim())));
        }
        *slot = Some((*n, val.trim().to_string()));
    }
    let c_cond = match ctrl {
        None => Formula::True,
        Some((n, text)) => {
            parse_formula(&text, vars).map_err(|e| sec.err(name, n, e.to_string()))?
        }
    };
    let p_cond = match plant {
        None => IntervalSet::full(),
        Some((n, text)) => text
            .parse()
            .map_err(|e: crate::interval::IntervalParseError| sec.err(name, n, e.to_string()))?,
    };
    Ok(CPCondition::new(c_cond, p_cond))
}

/// Act variable and think variables named by the controller text.
fn controller_names(
    sec: &Section,
    modes: &[Name],
    sense: &[String],
) -> Result<(String, Vec<String>), ProblemError> {
    let toks = tokenize(&sec.text())
        .map_err(|e| sec.err("controller", lang_line(sec, &e), e.to_string()))?;
    let mut act: Option<String> = None;
    for w in toks.windows(3) {
        if let (Tok::Ident(x), Tok::Assign, Tok::Ident(m)) = (&w[0].tok, &w[1].tok, &w[2].tok) {
            if modes.iter().any(|k| **k == **m) {
                match &act {
                    Some(a) if a != x => {
                        let line = sec.first_line() + w[0].line - 1;
                        return Err(sec.err(
                            "controller",
                            line,
                            format!("modes assigned to both `{a}` and `{x}`"),
                        ));
                    }
                    _ => act = Some(x.clone()),
                }
            }
        }
    }
    let act = act.ok_or_else(|| {
        sec.err(
            "controller",
            sec.header,
            "the controller never selects a mode",
        )
    })?;
    let mut think: Vec<String> = Vec::new();
    for s in &toks {
        if let Tok::Ident(x) = &s.tok {
            let taken = crate::lang::lexer::is_keyword(x)
                || *x == act
                || modes.iter().any(|m| **m == **x)
                || sense.contains(x)
                || think.contains(x);
            if !taken {
                think.push(x.clone());
            }
        }
    }
    Ok((act, think))
}

/// Parses and validates a problem from source text.
pub fn parse_problem(src: &str) -> Result<SynthesisProblem, ProblemError> {
    let secs = split_sections(src)?;

    let sm = &secs["modes"];
    let mut state = "x".to_string();
    let mut rhs_lines = Vec::new();
    for (n, l) in sm.nonblank() {
        if let Some(v) = setting(l, "state") {
            state = state_name(sm, "modes", *n, v)?;
        } else {
            rhs_lines.push((*n, l.clone()));
        }
    }
    let mut modes: Vec<Name> = Vec::new();
    let mut rhs = Vec::new();
    for (n, l) in rhs_lines {
        let Some((m, e)) = l.split_once(':') else {
            return Err(sm.err("modes", n, "expected `Mode: expression`"));
        };
        let m = m.trim();
        if !is_user_identifier(m) {
            return Err(sm.err("modes", n, format!("`{m}` is not a valid mode name")));
        }
        if modes.iter().any(|k| &**k == m) {
            return Err(sm.err("modes", n, format!("mode `{m}` defined twice")));
        }
        let expr = parse_rhs(e, &state).map_err(|err| match err {
            PlantError::Syntax { col, msg, .. } => {
                sm.err("modes", n, format!("column {col}: {msg}"))
            }
            other => sm.err("modes", n, other.to_string()),
        })?;
        modes.push(Name::from(m));
        rhs.push((Name::from(m), expr));
    }
    if modes.is_empty() {
        return Err(sm.err("modes", sm.header, "at least one mode is required"));
    }

    let si = &secs["input"];
    let domain_line = si
        .nonblank()
        .next()
        .ok_or_else(|| si.err("input", si.header, "missing input domain"))?;
    if si.nonblank().count() > 1 {
        return Err(si.err("input", si.header, "expected a single interval"));
    }
    let domain: Interval = domain_line
        .1
        .parse()
        .map_err(|e: String| si.err("input", domain_line.0, e))?;
    if domain.is_empty() {
        return Err(si.err("input", domain_line.0, "the input domain is empty"));
    }

    let ss = &secs["sensor"];
    let mut input = "i".to_string();
    let mut preds: Vec<(String, String)> = Vec::new();
    for (n, l) in ss.nonblank() {
        if let Some(v) = setting(l, "input") {
            input = state_name(ss, "sensor", *n, v)?;
            continue;
        }
        let Some((x, p)) = l.split_once(':') else {
            return Err(ss.err("sensor", *n, "expected `sense_var: predicate`"));
        };
        let x = x.trim();
        if !is_user_identifier(x) {
            return Err(ss.err("sensor", *n, format!("`{x}` is not a valid sense variable")));
        }
        if preds.iter().any(|(k, _)| k == x) {
            return Err(ss.err("sensor", *n, format!("sense variable `{x}` defined twice")));
        }
        preds.push((x.to_string(), p.trim().to_string()));
    }
    if input == state {
        return Err(ss.err(
            "sensor",
            ss.header,
            "the input and the plant state need different names",
        ));
    }
    // parse one at a time so errors point at the right line
    for (n, l) in ss.nonblank() {
        if setting(l, "input").is_some() {
            continue;
        }
        let (x, p) = l.split_once(':').unwrap();
        let one = [(x.trim().to_string(), p.trim().to_string())];
        SensorSpec::parse(&state, &input, domain, &one)
            .map_err(|e| ss.err("sensor", *n, e.to_string()))?;
    }
    let sensor = SensorSpec::parse(&state, &input, domain, &preds)
        .map_err(|e| ss.err("sensor", ss.header, e.to_string()))?;

    let sc = &secs["controller"];
    let sense: Vec<String> = preds.iter().map(|(x, _)| x.clone()).collect();
    let (act, think) = controller_names(sc, &modes, &sense)?;
    let mode_strs: Vec<String> = modes.iter().map(|m| m.to_string()).collect();
    let vars = VarTable::new(&think, &sense, &act, &mode_strs)
        .map_err(|e| sc.err("controller", sc.header, e.to_string()))?;
    let controller = parse_controller(&sc.text(), &vars)
        .map_err(|e| sc.err("controller", lang_line(sc, &e), e.to_string()))?;

    let pre = parse_cp(&secs["pre"], "pre", &vars)?;
    let post = parse_cp(&secs["post"], "post", &vars)?;

    let st = &secs["steps"];
    let (n, text) = st
        .nonblank()
        .next()
        .ok_or_else(|| st.err("steps", st.header, "missing step count"))?;
    let steps: usize = text.trim().parse().map_err(|_| {
        st.err(
            "steps",
            *n,
            format!("`{}` is not a step count", text.trim()),
        )
    })?;

    let plant = PlantSpec::new(&state, rhs);
    let system = SystemSpec::new(vars, controller, plant, sensor)
        .map_err(|e| sc.err("controller", sc.header, e.to_string()))?;
    Ok(SynthesisProblem {
        system,
        pre,
        post,
        steps,
    })
}

/// Reads and parses a problem file.
pub fn load_problem(path: &Path) -> Result<SynthesisProblem, ProblemError> {
    let src = std::fs::read_to_string(path).map_err(|source| ProblemError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_problem(&src)
}
