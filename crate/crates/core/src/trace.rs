//! JSON trace files: an answer plus search statistics.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::backward::SearchStats;
use crate::lang::Name;
use crate::system::{Answer, SynthesisProblem, SystemState};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathEntry {
    pub sense: BTreeMap<Name, bool>,
    pub mode: Name,
}

/// Search counters. Wall-clock times are left out so that identical runs
/// write identical files.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceStats {
    pub backtracks: u64,
    pub expanded: u64,
    pub pruned: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceFile {
    pub initial: SystemState,
    pub inputs: Vec<f64>,
    pub path: Vec<PathEntry>,
    pub trace: Vec<SystemState>,
    pub stats: TraceStats,
}

#[derive(Debug, thiserror::Error)]
pub enum TraceError {
    #[error("malformed trace: {0}")]
    Json(#[from] serde_json::Error),
    #[error("trace does not fit the problem: {0}")]
    Schema(String),
}

impl TraceFile {
    pub fn from_answer(ans: &Answer, stats: &SearchStats) -> Self {
        TraceFile {
            initial: ans.initial.clone(),
            inputs: ans.inputs.clone(),
            path: ans
                .path
                .iter()
                .map(|(s, m)| PathEntry {
                    sense: s.clone(),
                    mode: m.clone(),
                })
                .collect(),
            trace: ans.trace.clone(),
            stats: TraceStats {
                backtracks: stats.backtracks,
                expanded: stats.expanded,
                pruned: stats.pruned,
            },
        }
    }

    pub fn to_answer(&self) -> Answer {
        Answer {
            initial: self.initial.clone(),
            inputs: self.inputs.clone(),
            trace: self.trace.clone(),
            path: self
                .path
                .iter()
                .map(|p| (p.sense.clone(), p.mode.clone()))
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("trace values are serializable");
        s.push('\n');
        s
    }

    /// Parses JSON without checking it against a problem.
    pub fn decode(text: &str) -> Result<Self, TraceError> {
        Ok(serde_json::from_str(text)?)
    }

    /// Checks lengths, variable names and modes against `problem`.
    pub fn check(&self, problem: &SynthesisProblem) -> Result<(), TraceError> {
        let t = problem.steps;
        let bad = |m: String| Err(TraceError::Schema(m));
        if self.inputs.len() != t {
            return bad(format!("{} inputs for a horizon of {t}", self.inputs.len()));
        }
        if self.path.len() != t {
            return bad(format!("path has {} steps, expected {t}", self.path.len()));
        }
        if self.trace.len() != t + 1 {
            return bad(format!(
                "trace has {} states, expected {}",
                self.trace.len(),
                t + 1
            ));
        }
        let vars = &problem.system.vars;
        let modes = vars.modes();
        let check_state = |st: &SystemState| -> Result<(), TraceError> {
            let think: Vec<&Name> = st.c_state.think.keys().collect();
            let sense: Vec<&Name> = st.c_state.sense.keys().collect();
            let mut want_think: Vec<&Name> = vars.think().iter().collect();
            let mut want_sense: Vec<&Name> = vars.sense().iter().collect();
            want_think.sort();
            want_sense.sort();
            if think != want_think || sense != want_sense {
                return bad("state variables do not match the controller".into());
            }
            if !modes.contains(&st.c_state.act) {
                return bad(format!("unknown mode `{}`", st.c_state.act));
            }
            Ok(())
        };
        check_state(&self.initial)?;
        for st in &self.trace {
            check_state(st)?;
        }
        for p in &self.path {
            if !modes.contains(&p.mode) {
                return bad(format!("unknown mode `{}`", p.mode));
            }
            let keys: Vec<&Name> = p.sense.keys().collect();
            let mut want: Vec<&Name> = vars.sense().iter().collect();
            want.sort();
            if keys != want {
                return bad("path sense variables do not match the sensor".into());
            }
        }
        Ok(())
    }
}
