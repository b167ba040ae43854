//! From a successful sense path to concrete initial state and inputs.

use std::time::Instant;

use crate::backward::{search, SearchStats, Strategy};
use crate::forward::{fa_sequence, FaSequence, TruncationTrigger};
use crate::interval::IntervalSet;
use crate::lang::Name;
use crate::logic::find_model;
use crate::plant::Direction;
use crate::system::{
    Answer, CPCondition, PathStep, SynthesisProblem, SystemError, SystemSpec, SystemState,
    EPS_MEMBER,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SynthError {
    #[error("no input reproduces the sensor output at step {step}: plant state {x}, feasible inputs {feasible}")]
    Drift {
        step: usize,
        x: f64,
        feasible: IntervalSet,
    },
    #[error("replay diverged from the sense path at step {step}")]
    PathMismatch { step: usize },
    #[error("replayed final state misses the postcondition")]
    PostViolated,
    #[error("leaf condition is unsatisfiable")]
    EmptyLeaf,
    #[error(transparent)]
    System(#[from] SystemError),
}

impl From<crate::logic::LogicError> for SynthError {
    fn from(e: crate::logic::LogicError) -> Self {
        SynthError::System(e.into())
    }
}

/// Some state satisfying `leaf`: a model of the formula and the midpoint
/// of the widest plant component.
pub fn choose_initial(sys: &SystemSpec, leaf: &CPCondition) -> Result<SystemState, SynthError> {
    let part = leaf.p_cond.largest().ok_or(SynthError::EmptyLeaf)?;
    let c_state = find_model(&leaf.c_cond, &sys.vars)?;
    Ok(SystemState {
        c_state,
        p_state: part.midpoint(),
    })
}

/// Plant states under a fixed mode sequence.
pub fn replay_modes(sys: &SystemSpec, x0: f64, modes: &[Name]) -> Result<Vec<f64>, SynthError> {
    let mut xs = vec![x0];
    for m in modes {
        let x = sys
            .plant
            .flow(m, *xs.last().unwrap(), Direction::Forward)
            .map_err(SystemError::from)?;
        xs.push(x);
    }
    Ok(xs)
}

/// An input per step, chosen in the middle of the widest set of inputs that
/// produce the required sensor output. `path` is in time order.
pub fn synthesize_inputs(
    sys: &SystemSpec,
    path: &[PathStep],
    xs: &[f64],
) -> Result<Vec<f64>, SynthError> {
    let mut inputs = Vec::with_capacity(path.len());
    for (k, ((sout, _), &x)) in path.iter().zip(xs).enumerate() {
        let feasible = sys
            .sensor
            .feasible_inputs(x, sout)
            .map_err(SystemError::from)?;
        let Some(part) = feasible.largest() else {
            return Err(SynthError::Drift {
                step: k,
                x,
                feasible,
            });
        };
        let mut i = part.midpoint();
        if !part.contains(i) {
            // a single open point cannot happen; a closed one is its own midpoint
            return Err(SynthError::Drift {
                step: k,
                x,
                feasible,
            });
        }
        if i == 0.0 {
            i = 0.0; // normalize -0
        }
        inputs.push(i);
    }
    Ok(inputs)
}

#[derive(Clone, Copy, Debug)]
pub struct SolveOptions {
    pub strategy: Strategy,
    pub seed: u64,
    pub truncate: Option<TruncationTrigger>,
    pub eps_member: f64,
    pub retry_widen: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            strategy: Strategy::Robustness,
            seed: 0,
            truncate: Some(TruncationTrigger::ModeCompatible),
            eps_member: EPS_MEMBER,
            retry_widen: false,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SolveReport {
    pub answer: Option<Answer>,
    pub stats: SearchStats,
    pub fa: FaSequence,
}

/// Builds and checks the answer for a path found by the search.
fn realize(
    problem: &SynthesisProblem,
    leaf: &CPCondition,
    time_path: &[PathStep],
    eps: f64,
) -> Result<Answer, SynthError> {
    let sys = &problem.system;
    let initial = choose_initial(sys, leaf)?;
    let modes: Vec<Name> = time_path.iter().map(|(_, m)| m.clone()).collect();
    let xs = replay_modes(sys, initial.p_state, &modes)?;
    let inputs = synthesize_inputs(sys, time_path, &xs)?;
    let trace = sys.run(&initial, &inputs)?;
    for (k, st) in trace.iter().skip(1).enumerate() {
        if sys.observed(st) != time_path[k] {
            return Err(SynthError::PathMismatch { step: k });
        }
    }
    if !sys.satisfies(trace.last().unwrap(), &problem.post, eps)? {
        return Err(SynthError::PostViolated);
    }
    Ok(Answer {
        initial,
        inputs,
        trace,
        path: time_path.to_vec(),
    })
}

/// Forward approximation, backward search, then input synthesis.
pub fn solve(problem: &SynthesisProblem, opts: &SolveOptions) -> Result<SolveReport, SynthError> {
    let t0 = Instant::now();
    let fa = fa_sequence(problem, opts.truncate)?;
    let fa_ms = t0.elapsed().as_secs_f64() * 1e3;
    let outcome = search(problem, &fa, opts.strategy, opts.seed)?;
    let mut stats = outcome.stats;
    stats.fa_ms = fa_ms;
    let Some(leaf) = outcome.leaf else {
        return Ok(SolveReport {
            answer: None,
            stats,
            fa,
        });
    };
    let t1 = Instant::now();
    let time_path: Vec<PathStep> = leaf.path.iter().rev().cloned().collect();
    let attempts = if opts.retry_widen { 5 } else { 1 };
    let mut eps = opts.eps_member;
    let mut result = realize(problem, &leaf.label, &time_path, eps);
    for _ in 1..attempts {
        if !matches!(result, Err(SynthError::PostViolated)) {
            break;
        }
        eps *= 2.0;
        result = realize(problem, &leaf.label, &time_path, eps);
    }
    stats.synth_ms = t1.elapsed().as_secs_f64() * 1e3;
    Ok(SolveReport {
        answer: Some(result?),
        stats,
        fa,
    })
}

/// Replays the answer and checks both ends against the problem.
pub fn verify_answer(problem: &SynthesisProblem, ans: &Answer, eps: f64) -> bool {
    let sys = &problem.system;
    if ans.inputs.len() != problem.steps {
        return false;
    }
    let Ok(trace) = sys.run(&ans.initial, &ans.inputs) else {
        return false;
    };
    let first = sys.satisfies(&trace[0], &problem.pre, eps).unwrap_or(false);
    let last = sys
        .satisfies(trace.last().unwrap(), &problem.post, eps)
        .unwrap_or(false);
    first && last
}
