//! Forward over-approximation of the reachable CP-conditions.

use crate::interval::IntervalSet;
use crate::lang::{Formula, Name};
use crate::logic::{is_satisfiable, project_sense, simplify, sp, sp_sense};
use crate::plant::Direction;
use crate::sensor::SensorOutput;
use crate::system::{CPCondition, SynthesisProblem, SystemError, SystemSpec};

/// When to replace the C-condition of an approximant by `true`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum TruncationTrigger {
    /// The condition allows every mode: `phi && act = m` is satisfiable for
    /// all `m`.
    #[default]
    ModeCompatible,
    /// Every (sensor output, mode) branch of the next step is satisfiable.
    AllBranches,
}

#[derive(Clone, Debug)]
pub struct FaSequence {
    pub entries: Vec<CPCondition>,
    pub truncated: Vec<bool>,
}

impl FaSequence {
    /// Total printed size of the C-conditions.
    pub fn c_size(&self) -> usize {
        self.entries
            .iter()
            .map(|e| e.c_cond.to_string().len())
            .sum()
    }
}

/// Sense then think, for one sensor output.
fn sense_think(
    sys: &SystemSpec,
    sout: &SensorOutput,
    cp: &CPCondition,
) -> Result<CPCondition, SystemError> {
    let mut c = cp.c_cond.clone();
    for (xs, v) in sout {
        c = sp_sense(xs, *v, &c, &sys.vars);
    }
    let p = cp.p_cond.intersect(&sys.sensor.preimage(sout));
    let c = simplify(&sp(&sys.controller, &c, &sys.vars)?, &sys.vars);
    Ok(CPCondition::new(c, p))
}

fn act(sys: &SystemSpec, m: &Name, cp: &CPCondition) -> Result<CPCondition, SystemError> {
    let c = simplify(
        &Formula::and(cp.c_cond.clone(), Formula::mode_is(sys.act(), m)),
        &sys.vars,
    );
    let p = sys.plant.flow_interval(m, &cp.p_cond, Direction::Forward)?;
    Ok(CPCondition::new(c, p))
}

/// One step forward for a fixed sensor output and mode.
pub fn one_fa_pre(
    sys: &SystemSpec,
    sout: &SensorOutput,
    m: &Name,
    cp: &CPCondition,
) -> Result<CPCondition, SystemError> {
    act(sys, m, &sense_think(sys, sout, cp)?)
}

/// One step forward over all branches with a satisfiable result. Sense
/// variables are projected out: the next sense stage overwrites them.
pub fn one_fa(sys: &SystemSpec, cp: &CPCondition) -> Result<CPCondition, SystemError> {
    let mut cs = Vec::new();
    let mut p = IntervalSet::empty();
    for sout in sys.sensor.outputs() {
        let st = sense_think(sys, &sout, cp)?;
        for m in sys.modes() {
            let r = act(sys, m, &st)?;
            if r.is_satisfiable(&sys.vars)? {
                cs.push(r.c_cond);
                p = p.union(&r.p_cond);
            }
        }
    }
    let c = project_sense(&Formula::disj(cs), &sys.vars);
    Ok(CPCondition::new(c, p))
}

fn trigger_fires(
    sys: &SystemSpec,
    trigger: TruncationTrigger,
    cp: &CPCondition,
) -> Result<bool, SystemError> {
    match trigger {
        TruncationTrigger::ModeCompatible => {
            for m in sys.modes() {
                if !is_satisfiable(
                    &Formula::and(cp.c_cond.clone(), Formula::mode_is(sys.act(), m)),
                    &sys.vars,
                )? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        TruncationTrigger::AllBranches => {
            for sout in sys.sensor.outputs() {
                for m in sys.modes() {
                    if !is_satisfiable(&one_fa_pre(sys, &sout, m, cp)?.c_cond, &sys.vars)? {
                        return Ok(false);
                    }
                }
            }
            Ok(true)
        }
    }
}

/// Entries `0..=T`. With `truncate`, once the trigger fires at some entry
/// `k >= 1`, the C-condition of that entry and all later ones is `true`;
/// the P-conditions keep being propagated.
pub fn fa_sequence(
    problem: &SynthesisProblem,
    truncate: Option<TruncationTrigger>,
) -> Result<FaSequence, SystemError> {
    let sys = &problem.system;
    let mut entries = vec![problem.pre.clone()];
    let mut truncated = vec![false];
    let mut on = false;
    for _ in 0..problem.steps {
        let prev = entries.last().unwrap();
        let mut next = one_fa(sys, prev)?;
        if on {
            next.c_cond = Formula::True;
        } else if let Some(t) = truncate {
            if next.c_cond != Formula::True && trigger_fires(sys, t, &next)? {
                on = true;
                next.c_cond = Formula::True;
            }
        }
        entries.push(next);
        truncated.push(on);
    }
    Ok(FaSequence { entries, truncated })
}
