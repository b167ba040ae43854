//! Depth-first search of the backward tree rooted at the postcondition.

use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::forward::FaSequence;
use crate::lang::{substitute, Formula, Name, Subst};
use crate::logic::{simplify, wp};
use crate::plant::Direction;
use crate::sensor::SensorOutput;
use crate::system::{CPCondition, PathStep, SynthesisProblem, SystemError, SystemSpec};

/// Child ordering in the depth-first search.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    /// Sensor outputs true-first, then modes in declaration order.
    Canonical,
    /// Seeded shuffle.
    Random,
    /// Largest P-condition first.
    Volume,
    /// P-condition closest to the middle of the forward approximant first.
    #[default]
    Robustness,
}

impl std::str::FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "canonical" => Ok(Strategy::Canonical),
            "random" => Ok(Strategy::Random),
            "volume" => Ok(Strategy::Volume),
            "robustness" => Ok(Strategy::Robustness),
            _ => Err(format!("unknown strategy `{s}`")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchNode {
    /// Root first: the step closest to the postcondition comes first.
    pub path: Vec<PathStep>,
    pub label: CPCondition,
    pub depth: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SearchStats {
    pub backtracks: u64,
    pub expanded: u64,
    pub pruned: u64,
    pub fa_ms: f64,
    pub search_ms: f64,
    pub synth_ms: f64,
}

/// One step backward for a fixed sensor output and mode: reverse act,
/// weakest precondition through the controller, then the sensor.
pub fn one_bs_pre(
    sys: &SystemSpec,
    sout: &SensorOutput,
    m: &Name,
    cp: &CPCondition,
) -> Result<CPCondition, SystemError> {
    let c = simplify(
        &Formula::and(cp.c_cond.clone(), Formula::mode_is(sys.act(), m)),
        &sys.vars,
    );
    let p = sys.plant.flow_interval(m, &cp.p_cond, Direction::Reverse)?;
    let c = wp(&sys.controller, &c, &sys.vars);
    let c = sout.iter().fold(c, |acc, (xs, v)| {
        let b = if *v { Formula::True } else { Formula::False };
        substitute(&acc, &Subst::Sense(xs.clone(), b))
    });
    let p = p.intersect(&sys.sensor.preimage(sout));
    Ok(CPCondition::new(simplify(&c, &sys.vars), p))
}

/// The child of `node` at `(sout, m)`, cut down by the forward
/// approximant of its time step.
pub fn expand_child(
    sys: &SystemSpec,
    fa: &FaSequence,
    node: &SearchNode,
    sout: &SensorOutput,
    m: &Name,
) -> Result<SearchNode, SystemError> {
    let steps = fa.entries.len() - 1;
    let k = steps - node.depth - 1;
    let back = one_bs_pre(sys, sout, m, &node.label)?;
    let fwd = &fa.entries[k];
    let c = simplify(&Formula::and(fwd.c_cond.clone(), back.c_cond), &sys.vars);
    let p = fwd.p_cond.intersect(&back.p_cond);
    let mut path = node.path.clone();
    path.push((sout.clone(), m.clone()));
    Ok(SearchNode {
        path,
        label: CPCondition::new(c, p),
        depth: node.depth + 1,
    })
}

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    /// The leaf of a successful path, if one was found.
    pub leaf: Option<SearchNode>,
    pub stats: SearchStats,
}

struct Frame {
    children: Vec<SearchNode>,
    next: usize,
}

/// Satisfiable children in canonical order; counts the pruned ones.
fn children(
    sys: &SystemSpec,
    fa: &FaSequence,
    node: &SearchNode,
    stats: &mut SearchStats,
) -> Result<Vec<SearchNode>, SystemError> {
    stats.expanded += 1;
    let mut out = Vec::new();
    for sout in sys.sensor.outputs() {
        for m in sys.modes() {
            let child = expand_child(sys, fa, node, &sout, m)?;
            if child.label.is_satisfiable(&sys.vars)? {
                out.push(child);
            } else {
                stats.pruned += 1;
            }
        }
    }
    Ok(out)
}

fn distance_to(reference: f64, node: &SearchNode) -> f64 {
    node.label
        .p_cond
        .midpoints()
        .into_iter()
        .map(|m| (m - reference).abs())
        .fold(f64::INFINITY, f64::min)
}

fn order(children: &mut [SearchNode], strategy: Strategy, fa: &FaSequence, rng: &mut ChaCha8Rng) {
    match strategy {
        Strategy::Canonical => {}
        Strategy::Random => children.shuffle(rng),
        Strategy::Volume => {
            // stable: ties keep canonical order
            children.sort_by(|a, b| b.label.p_cond.volume().total_cmp(&a.label.p_cond.volume()));
        }
        Strategy::Robustness => {
            let Some(first) = children.first() else {
                return;
            };
            let k = fa.entries.len() - 1 - first.depth;
            let Some(reference) = fa.entries[k].p_cond.largest().map(|c| c.midpoint()) else {
                return;
            };
            children
                .sort_by(|a, b| distance_to(reference, a).total_cmp(&distance_to(reference, b)));
        }
    }
}

/// Searches for a path of length `T` whose leaf is satisfiable.
pub fn search(
    problem: &SynthesisProblem,
    fa: &FaSequence,
    strategy: Strategy,
    seed: u64,
) -> Result<SearchOutcome, SystemError> {
    let started = Instant::now();
    let sys = &problem.system;
    let mut stats = SearchStats::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let root = SearchNode {
        path: Vec::new(),
        label: problem.post.clone(),
        depth: 0,
    };
    let finish = |leaf: Option<SearchNode>, mut stats: SearchStats| {
        stats.search_ms = started.elapsed().as_secs_f64() * 1e3;
        Ok(SearchOutcome { leaf, stats })
    };
    if problem.steps == 0 {
        let pre = &fa.entries[0];
        let label = CPCondition::new(
            simplify(
                &Formula::and(pre.c_cond.clone(), root.label.c_cond.clone()),
                &sys.vars,
            ),
            pre.p_cond.intersect(&root.label.p_cond),
        );
        let leaf = label
            .is_satisfiable(&sys.vars)?
            .then_some(SearchNode { label, ..root });
        return finish(leaf, stats);
    }
    if !root.label.is_satisfiable(&sys.vars)? {
        return finish(None, stats);
    }
    let mut first = children(sys, fa, &root, &mut stats)?;
    order(&mut first, strategy, fa, &mut rng);
    let mut stack = vec![Frame {
        children: first,
        next: 0,
    }];
    while let Some(top) = stack.last_mut() {
        if top.next == top.children.len() {
            stack.pop();
            if !stack.is_empty() {
                stats.backtracks += 1;
            }
            continue;
        }
        let child = top.children[top.next].clone();
        top.next += 1;
        if child.depth == problem.steps {
            return finish(Some(child), stats);
        }
        let mut next = children(sys, fa, &child, &mut stats)?;
        order(&mut next, strategy, fa, &mut rng);
        stack.push(Frame {
            children: next,
            next: 0,
        });
    }
    finish(None, stats)
}
