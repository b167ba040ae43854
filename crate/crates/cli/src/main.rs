use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use sds_core::backward::Strategy;
use sds_core::forward::{fa_sequence, TruncationTrigger};
use sds_core::problem::load_problem;
use sds_core::synth::{solve, verify_answer, SolveOptions, SynthError};
use sds_core::system::{SynthesisProblem, EPS_MEMBER};
use sds_core::trace::TraceFile;

const EXIT_NO_ANSWER: u8 = 1;
const EXIT_DRIFT: u8 = 2;
const EXIT_INPUT: u8 = 3;

#[derive(Parser)]
#[command(
    name = "sds-synth",
    version,
    about = "Input synthesis for sampled data systems"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(clap::Args)]
struct Common {
    /// Disable truncation of the forward approximation.
    #[arg(long)]
    no_truncate_fa: bool,
    /// RK4 steps per unit of time.
    #[arg(long, default_value_t = 1000)]
    ode_steps: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Search for an initial state and inputs that reach the postcondition.
    Synth {
        problem: PathBuf,
        /// canonical, random, volume or robustness.
        #[arg(long, default_value = "robustness")]
        strategy: Strategy,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Interval membership tolerance used when checking replayed states.
        #[arg(long, default_value_t = EPS_MEMBER)]
        tol: f64,
        /// Double the tolerance up to four times if the replay misses the postcondition.
        #[arg(long)]
        retry_widen: bool,
        /// Where to write the trace.
        #[arg(long, default_value = "trace.json")]
        out: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Replay a trace file and check it against the problem.
    Simulate {
        problem: PathBuf,
        trace: PathBuf,
        #[arg(long, default_value_t = EPS_MEMBER)]
        tol: f64,
        #[arg(long, default_value_t = 1000)]
        ode_steps: usize,
    },
    /// Print entry `k` of the forward approximation.
    Fa {
        problem: PathBuf,
        k: usize,
        #[command(flatten)]
        common: Common,
    },
}

fn load(path: &Path, ode_steps: usize) -> Result<SynthesisProblem, ExitCode> {
    let mut p = load_problem(path).map_err(|e| fail(EXIT_INPUT, e))?;
    if ode_steps == 0 {
        return Err(fail(EXIT_INPUT, "--ode-steps must be positive"));
    }
    p.system.plant.steps = ode_steps;
    Ok(p)
}

fn fail(code: u8, msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(code)
}

fn trigger(common: &Common) -> Option<TruncationTrigger> {
    (!common.no_truncate_fa).then_some(TruncationTrigger::ModeCompatible)
}

fn synth(
    path: &Path,
    strategy: Strategy,
    seed: u64,
    tol: f64,
    retry_widen: bool,
    out: &Path,
    common: &Common,
) -> Result<ExitCode, ExitCode> {
    let problem = load(path, common.ode_steps)?;
    let opts = SolveOptions {
        strategy,
        seed,
        truncate: trigger(common),
        eps_member: tol,
        retry_widen,
    };
    let report = match solve(&problem, &opts) {
        Ok(r) => r,
        Err(
            e @ (SynthError::Drift { .. }
            | SynthError::PathMismatch { .. }
            | SynthError::PostViolated),
        ) => return Err(fail(EXIT_DRIFT, e)),
        Err(e) => return Err(fail(EXIT_INPUT, e)),
    };
    let s = &report.stats;
    println!("backtracks: {}", s.backtracks);
    println!("expanded:   {}", s.expanded);
    println!("pruned:     {}", s.pruned);
    println!("fa:         {:.3} ms", s.fa_ms);
    println!("search:     {:.3} ms", s.search_ms);
    println!("synthesis:  {:.3} ms", s.synth_ms);
    let Some(ans) = report.answer else {
        println!("no answer");
        return Ok(ExitCode::from(EXIT_NO_ANSWER));
    };
    let json = TraceFile::from_answer(&ans, s).to_json();
    std::fs::write(out, json)
        .map_err(|e| fail(EXIT_INPUT, format!("cannot write {}: {e}", out.display())))?;
    println!(
        "initial:    {} / {}",
        fmt_c(&ans.initial),
        ans.initial.p_state
    );
    println!("inputs:     {:?}", ans.inputs);
    println!("trace written to {}", out.display());
    Ok(ExitCode::SUCCESS)
}

fn fmt_c(st: &sds_core::system::SystemState) -> String {
    let mut parts: Vec<String> = st
        .c_state
        .think
        .iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect();
    parts.extend(
        st.c_state
            .sense
            .iter()
            .map(|(k, v)| format!("{k}={}", if *v { "tt" } else { "ff" })),
    );
    parts.push(format!("act={}", st.c_state.act));
    parts.join(" ")
}

fn simulate(path: &Path, trace: &Path, tol: f64, ode_steps: usize) -> Result<ExitCode, ExitCode> {
    let problem = load(path, ode_steps)?;
    let text = std::fs::read_to_string(trace)
        .map_err(|e| fail(EXIT_INPUT, format!("cannot read {}: {e}", trace.display())))?;
    let tf = TraceFile::decode(&text).map_err(|e| fail(EXIT_INPUT, e))?;
    tf.check(&problem).map_err(|e| fail(EXIT_INPUT, e))?;
    let ans = tf.to_answer();
    match problem.system.run(&ans.initial, &ans.inputs) {
        Ok(run) => {
            for (k, st) in run.iter().enumerate() {
                println!("{k:>5}  {} / {}", fmt_c(st), st.p_state);
            }
        }
        Err(e) => {
            println!("replay failed: {e}");
            return Ok(ExitCode::from(EXIT_NO_ANSWER));
        }
    }
    if verify_answer(&problem, &ans, tol) {
        println!("verified");
        Ok(ExitCode::SUCCESS)
    } else {
        println!("not verified");
        Ok(ExitCode::from(EXIT_NO_ANSWER))
    }
}

fn fa(path: &Path, k: usize, common: &Common) -> Result<ExitCode, ExitCode> {
    let mut problem = load(path, common.ode_steps)?;
    if k > problem.steps {
        return Err(fail(
            EXIT_INPUT,
            format!("k = {k} is beyond the horizon {}", problem.steps),
        ));
    }
    problem.steps = k;
    let seq = fa_sequence(&problem, trigger(common)).map_err(|e| fail(EXIT_INPUT, e))?;
    println!("{}", seq.entries[k]);
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_INPUT)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let r = match &cli.cmd {
        Command::Synth {
            problem,
            strategy,
            seed,
            tol,
            retry_widen,
            out,
            common,
        } => synth(problem, *strategy, *seed, *tol, *retry_widen, out, common),
        Command::Simulate {
            problem,
            trace,
            tol,
            ode_steps,
        } => simulate(problem, trace, *tol, *ode_steps),
        Command::Fa { problem, k, common } => fa(problem, *k, common),
    };
    r.unwrap_or_else(|code| code)
}
