//! Input synthesis for sampled data systems: a loop-free controller sampled
//! once per period, coupled with a one-dimensional plant that switches between
//! ODE modes.

pub mod backward;
pub mod exec;
pub mod forward;
pub mod interval;
pub mod lang;
pub mod logic;
pub mod plant;
pub mod problem;
pub mod sensor;
pub mod synth;
pub mod system;
pub mod trace;
