//! Sampled data systems: controller, plant and sensor closed in a
//! sense-think-act loop with period 1.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::exec::{exec_cmd, satisfied_by, ExecError, Valuation};
use crate::interval::IntervalSet;
use crate::lang::{Cmd, Formula, Name, VarTable};
use crate::logic::{is_satisfiable, LogicError};
use crate::plant::{Direction, PlantError, PlantSpec};
use crate::sensor::{SensorError, SensorOutput, SensorSpec};

/// Default widening of plant intervals in membership checks.
pub const EPS_MEMBER: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SystemError {
    #[error("invalid system: {0}")]
    Invalid(String),
    #[error(transparent)]
    Sensor(#[from] SensorError),
    #[error(transparent)]
    Plant(#[from] PlantError),
    #[error(transparent)]
    Exec(#[from] ExecError),
    #[error(transparent)]
    Logic(#[from] LogicError),
}

#[derive(Clone, Debug)]
pub struct SystemSpec {
    pub vars: VarTable,
    pub controller: Cmd,
    pub plant: PlantSpec,
    pub sensor: SensorSpec,
}

impl SystemSpec {
    pub fn new(
        vars: VarTable,
        controller: Cmd,
        plant: PlantSpec,
        sensor: SensorSpec,
    ) -> Result<Self, SystemError> {
        for m in vars.modes() {
            if !plant.rhs.contains_key(m) {
                return Err(SystemError::Invalid(format!(
                    "no plant equation for mode `{m}`"
                )));
            }
        }
        if let Some(extra) = plant.rhs.keys().find(|m| vars.mode_index(m).is_none()) {
            return Err(SystemError::Invalid(format!(
                "plant equation for undeclared mode `{extra}`"
            )));
        }
        let declared: Vec<&Name> = vars.sense().iter().collect();
        let defined: Vec<&Name> = sensor.sense_vars().collect();
        if declared != defined {
            return Err(SystemError::Invalid(
                "sensor must define each sense variable exactly once, in order".into(),
            ));
        }
        Ok(SystemSpec {
            vars,
            controller,
            plant,
            sensor,
        })
    }

    pub fn act(&self) -> &Name {
        self.vars.act()
    }

    pub fn modes(&self) -> &[Name] {
        self.vars.modes()
    }

    /// Sense stage: read the plant through the sensor.
    pub fn sense(&self, st: &SystemState, i: f64) -> Result<SystemState, SystemError> {
        let out = self.sensor.sense_eval(st.p_state, i)?;
        let mut c = st.c_state.clone();
        c.sense.extend(out);
        Ok(SystemState {
            c_state: c,
            p_state: st.p_state,
        })
    }

    /// Think stage: run the controller.
    pub fn think(&self, st: &SystemState) -> Result<SystemState, SystemError> {
        Ok(SystemState {
            c_state: exec_cmd(&self.controller, &st.c_state)?,
            p_state: st.p_state,
        })
    }

    /// Act stage: let the plant evolve for one period in the chosen mode.
    pub fn act_stage(&self, st: &SystemState) -> Result<SystemState, SystemError> {
        let x = self
            .plant
            .flow(&st.c_state.act, st.p_state, Direction::Forward)?;
        Ok(SystemState {
            c_state: st.c_state.clone(),
            p_state: x,
        })
    }

    pub fn step(&self, st: &SystemState, i: f64) -> Result<SystemState, SystemError> {
        self.act_stage(&self.think(&self.sense(st, i)?)?)
    }

    /// All states of the run, starting with `st0`.
    pub fn run(&self, st0: &SystemState, inputs: &[f64]) -> Result<Vec<SystemState>, SystemError> {
        let mut out = Vec::with_capacity(inputs.len() + 1);
        out.push(st0.clone());
        for &i in inputs {
            let next = self.step(out.last().unwrap(), i)?;
            out.push(next);
        }
        Ok(out)
    }

    /// `(sigma, x) |= (phi, X)`, with `X` widened by `eps`.
    pub fn satisfies(
        &self,
        st: &SystemState,
        cp: &CPCondition,
        eps: f64,
    ) -> Result<bool, SystemError> {
        Ok(cp.p_cond.contains_within(st.p_state, eps)
            && satisfied_by(&st.c_state, &cp.c_cond, &self.vars)?)
    }

    /// The sensor output and mode a state records after a step.
    pub fn observed(&self, st: &SystemState) -> (SensorOutput, Name) {
        let out = self
            .sensor
            .sense_vars()
            .map(|x| (x.clone(), st.c_state.sense.get(x).copied().unwrap_or(false)));
        (out.collect(), st.c_state.act.clone())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemState {
    pub c_state: Valuation,
    pub p_state: f64,
}

/// A condition on the controller paired with a set of plant states.
#[derive(Clone, Debug, PartialEq)]
pub struct CPCondition {
    pub c_cond: Formula,
    pub p_cond: IntervalSet,
}

impl CPCondition {
    pub fn new(c_cond: Formula, p_cond: IntervalSet) -> Self {
        CPCondition { c_cond, p_cond }
    }

    /// Unsatisfiable iff the formula is or the interval set is empty.
    pub fn is_satisfiable(&self, vars: &VarTable) -> Result<bool, LogicError> {
        Ok(!self.p_cond.is_empty() && is_satisfiable(&self.c_cond, vars)?)
    }
}

impl fmt::Display for CPCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} / {}", self.c_cond, self.p_cond)
    }
}

#[derive(Clone, Debug)]
pub struct SynthesisProblem {
    pub system: SystemSpec,
    pub pre: CPCondition,
    pub post: CPCondition,
    pub steps: usize,
}

/// One step of a sense path: what the sensor reported and which mode the
/// controller chose.
pub type PathStep = (SensorOutput, Name);

#[derive(Clone, Debug, PartialEq)]
pub struct Answer {
    pub initial: SystemState,
    pub inputs: Vec<f64>,
    pub trace: Vec<SystemState>,
    /// In time order.
    pub path: Vec<PathStep>,
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::interval::Interval;
    use crate::lang::{parse_controller, parse_formula};
    use crate::plant::parse_rhs;

    pub(crate) fn braking() -> SystemSpec {
        let vars = VarTable::new(&["cnt"], &["xs"], "xa", &["Acl", "Brk"]).unwrap();
        let c = parse_controller(
            "if xs then cnt := cnt + 1 else cnt := 0; if cnt < 2 then xa := Acl else xa := Brk",
            &vars,
        )
        .unwrap();
        let plant = PlantSpec::new(
            "v",
            [
                ("Acl".into(), parse_rhs("(2 - v) * log(2)", "v").unwrap()),
                ("Brk".into(), parse_rhs("-0.5", "v").unwrap()),
            ],
        );
        let sensor = SensorSpec::parse(
            "v",
            "i",
            Interval::closed(-0.2, 0.2),
            &[("xs".into(), "v + i >= 1".into())],
        )
        .unwrap();
        SystemSpec::new(vars, c, plant, sensor).unwrap()
    }

    #[test]
    fn braking_example_run() {
        let sys = braking();
        let s0 = SystemState {
            c_state: Valuation::defaults(&sys.vars),
            p_state: 0.9,
        };
        let s1 = sys.step(&s0, 0.1).unwrap();
        assert_eq!(s1.c_state.think["cnt"], 1.0);
        assert!(s1.c_state.sense["xs"]);
        assert!((s1.p_state - 1.45).abs() < 1e-6);
        let s2 = sys.step(&s1, 0.0).unwrap();
        assert_eq!(&*s2.c_state.act, "Brk");
        assert!((s2.p_state - 0.95).abs() < 1e-6);
        assert!(sys.step(&s0, 0.3).is_err());
        let run = sys.run(&s0, &[0.1, 0.0, 0.0, 0.0]).unwrap();
        let xs: Vec<f64> = run.iter().map(|s| s.p_state).collect();
        for (got, want) in xs.iter().zip([0.9, 1.45, 0.95, 1.475, 1.7375]) {
            assert!((got - want).abs() < 1e-6, "{xs:?}");
        }
        let post = CPCondition::new(Formula::True, IntervalSet::closed(1.5, 2.0));
        assert!(sys
            .satisfies(run.last().unwrap(), &post, EPS_MEMBER)
            .unwrap());
        let pre = CPCondition::new(
            parse_formula("cnt = 0", &sys.vars).unwrap(),
            IntervalSet::closed(0.8, 1.0),
        );
        assert!(sys.satisfies(&s0, &pre, EPS_MEMBER).unwrap());
        assert_eq!(sys.run(&s0, &[]).unwrap(), vec![s0]);
    }
}
