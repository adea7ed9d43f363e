//! Command-line driver.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use dvsynth_core::automata::{translate, Nba, TranslateError, DEFAULT_STATE_CAP};
use dvsynth_core::clock::SystemClock;
use dvsynth_core::controller::{verify, Controller};
use dvsynth_core::dependency::{find_maximal_dependent_set, DEFAULT_BUDGET_MS};
use dvsynth_core::ltl::{gen_midbit_spec, Spec, SpecError};
use dvsynth_core::pipeline::{synthesize, SynthError, SynthOptions, SynthResult};
use dvsynth_core::projection::project;
use dvsynth_core::session::bits;
use dvsynth_core::{Clock, Session};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::aiger::{emit_aiger, parse_aiger, AigerError};
use crate::dump::{explicit_machine, to_json};
use crate::hoa::{emit_hoa, parse_hoa, HoaError};
use crate::spec_format::{parse_spec, print_spec, ParseError};

/// Exit code for an unrealizable specification or a failed verification.
pub const EXIT_NO: i32 = 2;
/// Exit code for errors.
pub const EXIT_ERROR: i32 = 1;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}:{source}")]
    Spec { path: PathBuf, source: ParseError },
    #[error("{path}: {source}")]
    Hoa { path: PathBuf, source: HoaError },
    #[error("{path}: {source}")]
    Aiger { path: PathBuf, source: AigerError },
    #[error(transparent)]
    Vocab(#[from] SpecError),
    #[error(transparent)]
    Translate(#[from] TranslateError),
    #[error(transparent)]
    Synth(#[from] SynthError),
    #[error("{0}")]
    Mismatch(String),
    #[error("self-check failed: {0}")]
    SelfCheck(String),
    #[error("{0} needs an LTL specification, not an automaton")]
    NeedsSpec(&'static str),
    #[error("writing output: {0}")]
    Output(#[from] std::io::Error),
}

#[derive(Debug, Parser)]
#[command(name = "dvsynth", version, about = "Reactive synthesis with dependent outputs")]
pub struct Cli {
    /// Print the phase breakdown as CSV after the main output.
    #[arg(long, global = true)]
    pub timings: bool,
    /// Seed for the random simulation self-check.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Bound on automaton states.
    #[arg(long, global = true, default_value_t = DEFAULT_STATE_CAP)]
    pub state_cap: usize,
    #[command(subcommand)]
    pub cmd: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Report which outputs are dependent.
    Deps {
        /// Specification, or automaton when the name ends in `.hoa`.
        spec: PathBuf,
        #[arg(long, default_value_t = DEFAULT_BUDGET_MS)]
        dep_budget_ms: u64,
    },
    /// Run the full pipeline.
    Synth {
        spec: PathBuf,
        /// Where to write the controller.
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_BUDGET_MS)]
        dep_budget_ms: u64,
        /// Treat every output as non-dependent.
        #[arg(long)]
        no_deps: bool,
        /// Where to write the explicit controller as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Label sizes before and after erasing the dependent outputs, as CSV.
    ProjectStats {
        #[arg(required = true)]
        specs: Vec<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_BUDGET_MS)]
        dep_budget_ms: u64,
    },
    /// Check a controller against a specification.
    Verify { spec: PathBuf, controller: PathBuf },
    /// Build the Büchi automaton only.
    Translate {
        spec: PathBuf,
        /// Write the automaton in HOA format (`-` for standard output).
        #[arg(long)]
        hoa: Option<PathBuf>,
        /// Write the automaton in DOT format (`-` for standard output).
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Write the midbit specification of size `n`.
    GenMidbit {
        n: usize,
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
    },
}

pub enum Input {
    Spec(Spec),
    Automaton(Session, Nba),
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.into(),
        source,
    })
}

fn write_file(path: &Path, text: &str, out: &mut dyn Write) -> Result<(), CliError> {
    if path == Path::new("-") {
        out.write_all(text.as_bytes())?;
        return Ok(());
    }
    std::fs::write(path, text).map_err(|source| CliError::Io {
        path: path.into(),
        source,
    })
}

pub fn load(path: &Path) -> Result<Input, CliError> {
    let text = read(path)?;
    if path.extension().is_some_and(|e| e == "hoa") {
        let (s, n) = parse_hoa(&text).map_err(|source| CliError::Hoa {
            path: path.into(),
            source,
        })?;
        return Ok(Input::Automaton(s, n));
    }
    parse_spec(&text).map(Input::Spec).map_err(|source| CliError::Spec {
        path: path.into(),
        source,
    })
}

pub fn load_spec(path: &Path, what: &'static str) -> Result<Spec, CliError> {
    match load(path)? {
        Input::Spec(s) => Ok(s),
        Input::Automaton(..) => Err(CliError::NeedsSpec(what)),
    }
}

/// Session and trimmed automaton for either kind of input, with the build time.
fn automaton(input: Input, state_cap: usize, clock: &SystemClock) -> Result<(Session, Nba, u64), CliError> {
    match input {
        Input::Spec(spec) => {
            let mut s = Session::new(spec.inputs(), spec.outputs()).map_err(|e| CliError::Mismatch(e.to_string()))?;
            let t0 = clock.now_us();
            let n = translate(&mut s, &spec, state_cap)?;
            Ok((s, n, clock.now_us() - t0))
        }
        Input::Automaton(s, n) => {
            let t0 = clock.now_us();
            let n = n.trim();
            Ok((s, n, clock.now_us() - t0))
        }
    }
}

fn ms(us: u64) -> String {
    format!("{:.3}", us as f64 / 1000.0)
}

const TIMINGS_HEADER: &str = "nba_ms,deps_ms,nondep_ms,dep_ms,total_ms,n_dep,n_nondep,bdd_before,bdd_after";

fn timings_row(r: &SynthResult) -> String {
    let t = &r.timings;
    format!(
        "{},{},{},{},{},{},{},{},{}",
        ms(t.nba_us),
        ms(t.deps_us),
        ms(t.nondep_us),
        ms(t.dep_us),
        ms(t.total_us),
        r.report.dependent.len(),
        r.report.nondependent.len(),
        r.bdd_before,
        r.bdd_after
    )
}

/// Simulates the in-memory controller and its re-parsed AIGER text on the same
/// random input words.
fn cross_simulate(c: &Controller, text: &str, seed: u64) -> Result<(), CliError> {
    let back = Controller::from_aig(parse_aiger(text).map_err(|e| CliError::SelfCheck(e.to_string()))?);
    let ni = c.aig.inputs().len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..50 {
        let word: Vec<Vec<bool>> = (0..20)
            .map(|_| bits(rng.gen_range(0..1u64 << ni), ni))
            .collect();
        if c.simulate(&word) != back.simulate(&word) {
            return Err(CliError::SelfCheck("written controller disagrees with the synthesized one".into()));
        }
    }
    Ok(())
}

/// Runs one command; returns the process exit code.
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<i32, CliError> {
    let clock = SystemClock::new();
    match &cli.cmd {
        Command::Deps { spec, dep_budget_ms } => {
            let (mut s, nba, nba_us) = automaton(load(spec)?, cli.state_cap, &clock)?;
            let order: Vec<usize> = s.vocab.output_atoms().collect();
            let r = find_maximal_dependent_set(&mut s, &nba, &order, Some(dep_budget_ms.saturating_mul(1000)), &clock);
            for v in &r.vars {
                writeln!(out, "{}\t{}\t{}", v.name, v.status.as_str(), ms(v.micros))?;
            }
            let total = s.vocab.num_outputs();
            let ratio = if total == 0 {
                0.0
            } else {
                r.dependent.len() as f64 / total as f64
            };
            writeln!(out, "dependent={} total={} ratio={:.3}", r.dependent.len(), total, ratio)?;
            if cli.timings {
                writeln!(out, "{TIMINGS_HEADER}")?;
                let n_dep = r.dependent.len();
                let deps_us = r.total_micros;
                writeln!(
                    out,
                    "{},{},0.000,0.000,{},{},{},{},{}",
                    ms(nba_us),
                    ms(deps_us),
                    ms(nba_us + deps_us),
                    n_dep,
                    total - n_dep,
                    nba.label_size(&s.bdd),
                    {
                        let p = project(&mut s, &nba, &r.dependent);
                        p.label_size(&s.bdd)
                    }
                )?;
            }
            Ok(0)
        }
        Command::Synth {
            spec,
            output,
            dep_budget_ms,
            no_deps,
            json,
        } => {
            let spec = load_spec(spec, "synth")?;
            let mut s = Session::new(spec.inputs(), spec.outputs()).map_err(|e| CliError::Mismatch(e.to_string()))?;
            let opts = SynthOptions {
                dep_budget_ms: Some(*dep_budget_ms),
                no_deps: *no_deps,
                state_cap: cli.state_cap,
                ..SynthOptions::default()
            };
            let r = synthesize(&mut s, &spec, &opts, &clock)?;
            if r.verified == Some(false) {
                return Err(CliError::SelfCheck("controller violates the specification".into()));
            }
            writeln!(out, "{}", if r.realizable { "REALIZABLE" } else { "UNREALIZABLE" })?;
            if let Some(c) = &r.controller {
                let text = emit_aiger(&c.aig);
                cross_simulate(c, &text, cli.seed)?;
                if let Some(p) = output {
                    write_file(p, &text, out)?;
                }
                if let Some(p) = json {
                    write_file(p, &to_json(&explicit_machine(c)), out)?;
                }
            }
            if cli.timings {
                writeln!(out, "{TIMINGS_HEADER}")?;
                writeln!(out, "{}", timings_row(&r))?;
            }
            Ok(if r.realizable { 0 } else { EXIT_NO })
        }
        Command::ProjectStats { specs, dep_budget_ms } => {
            writeln!(out, "spec,states,edges,bdd_before,bdd_after")?;
            for p in specs {
                let (mut s, nba, _) = automaton(load(p)?, cli.state_cap, &clock)?;
                let order: Vec<usize> = s.vocab.output_atoms().collect();
                let r = find_maximal_dependent_set(&mut s, &nba, &order, Some(dep_budget_ms.saturating_mul(1000)), &clock);
                let proj = project(&mut s, &nba, &r.dependent);
                let name = p.file_stem().map_or_else(|| p.display().to_string(), |n| n.to_string_lossy().into_owned());
                writeln!(
                    out,
                    "{},{},{},{},{}",
                    name,
                    nba.num_states(),
                    nba.edges().len(),
                    nba.label_size(&s.bdd),
                    proj.label_size(&s.bdd)
                )?;
            }
            Ok(0)
        }
        Command::Verify { spec, controller } => {
            let spec = load_spec(spec, "verify")?;
            let text = read(controller)?;
            let aig = parse_aiger(&text).map_err(|source| CliError::Aiger {
                path: controller.clone(),
                source,
            })?;
            let ins: Vec<&str> = aig.inputs().iter().map(|(_, n)| n.as_str()).collect();
            let outs: Vec<&str> = aig.outputs().iter().map(|(_, n)| n.as_str()).collect();
            let mut want_outs: Vec<&str> = spec.outputs().iter().map(String::as_str).collect();
            want_outs.push(dvsynth_core::depsynth::LIVE);
            let want_ins: Vec<&str> = spec.inputs().iter().map(String::as_str).collect();
            if ins != want_ins || outs != want_outs {
                return Err(CliError::Mismatch(format!(
                    "controller has inputs {ins:?} and outputs {outs:?}, expected {want_ins:?} and {want_outs:?}"
                )));
            }
            let mut s = Session::new(spec.inputs(), spec.outputs()).map_err(|e| CliError::Mismatch(e.to_string()))?;
            let neg = translate(&mut s, &spec.negate(), cli.state_cap)?;
            let ok = verify(&s, &Controller::from_aig(aig), &neg);
            writeln!(out, "{}", if ok { "VERIFIED" } else { "NOT VERIFIED" })?;
            Ok(if ok { 0 } else { EXIT_NO })
        }
        Command::Translate { spec, hoa, dot } => {
            let name = spec.display().to_string();
            let (s, nba, nba_us) = automaton(load(spec)?, cli.state_cap, &clock)?;
            writeln!(
                out,
                "states={} edges={} accepting={}",
                nba.num_states(),
                nba.edges().len(),
                nba.accepting_states().len()
            )?;
            if let Some(p) = hoa {
                write_file(p, &emit_hoa(&s, &nba, &name), out)?;
            }
            if let Some(p) = dot {
                write_file(p, &nba.to_dot(&s), out)?;
            }
            if cli.timings {
                writeln!(out, "{TIMINGS_HEADER}")?;
                writeln!(out, "{},0.000,0.000,0.000,{},0,0,0,0", ms(nba_us), ms(nba_us))?;
            }
            Ok(0)
        }
        Command::GenMidbit { n, output } => {
            let text = print_spec(&gen_midbit_spec(*n)?);
            match output {
                Some(p) => write_file(p, &text, out)?,
                None => out.write_all(text.as_bytes())?,
            }
            Ok(0)
        }
    }
}
