//! End-to-end synthesis.

use alloc::vec::Vec;

use thiserror::Error;

use crate::automata::{translate, Nba, TranslateError, DEFAULT_STATE_CAP};
use crate::clock::Clock;
use crate::controller::{check, compose, verify, Controller};
use crate::dependency::{find_maximal_dependent_set, DependencyReport, DEFAULT_BUDGET_MS};
use crate::depsynth::build_lambda_circuit_projected;
use crate::ltl::Spec;
use crate::nondep::{solve_nondep, MealyTY, NondepError, DEFAULT_ATOM_CAP};
use crate::projection::project;
use crate::session::Session;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SynthOptions {
    /// Per-output budget of the dependency search; `None` disables the limit.
    pub dep_budget_ms: Option<u64>,
    /// Skip the dependency search and treat every output as non-dependent.
    pub no_deps: bool,
    /// Bound on automaton and parity-automaton states.
    pub state_cap: usize,
    /// Bound on symbolic letters in the game.
    pub atom_cap: usize,
    /// Check the composed controller against the negated specification.
    pub self_check: bool,
}

impl Default for SynthOptions {
    fn default() -> Self {
        SynthOptions {
            dep_budget_ms: Some(DEFAULT_BUDGET_MS),
            no_deps: false,
            state_cap: DEFAULT_STATE_CAP,
            atom_cap: DEFAULT_ATOM_CAP,
            self_check: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SynthError {
    #[error(transparent)]
    Translate(#[from] TranslateError),
    #[error(transparent)]
    Nondep(#[from] NondepError),
}

/// Phase durations in microseconds.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Timings {
    pub nba_us: u64,
    pub deps_us: u64,
    pub nondep_us: u64,
    /// Erasing the dependent outputs and measuring label sizes.
    pub project_us: u64,
    pub dep_us: u64,
    /// Wiring the two machines into one circuit.
    pub compose_us: u64,
    /// Self-check, not part of `total_us`.
    pub verify_us: u64,
    pub total_us: u64,
}

#[derive(Debug, Clone)]
pub struct SynthResult {
    pub realizable: bool,
    pub controller: Option<Controller>,
    pub report: DependencyReport,
    /// False on the path where every output is dependent.
    pub used_determinization: bool,
    /// Outcome of the self-check, when one ran.
    pub verified: Option<bool>,
    pub timings: Timings,
    pub nba_states: usize,
    pub nba_edges: usize,
    /// Label size before and after erasing the dependent outputs.
    pub bdd_before: usize,
    pub bdd_after: usize,
    pub dpa_states: usize,
    pub game_nodes: usize,
}

/// Runs the whole pipeline on `spec`. The session must be declared with the
/// specification's inputs and outputs.
pub fn synthesize(session: &mut Session, spec: &Spec, opts: &SynthOptions, clock: &dyn Clock) -> Result<SynthResult, SynthError> {
    let t0 = clock.now_us();
    let nba = translate(session, spec, opts.state_cap)?;
    let t1 = clock.now_us();
    let report = if opts.no_deps {
        DependencyReport::none(session)
    } else {
        let order: Vec<usize> = session.vocab.output_atoms().collect();
        let budget = opts.dep_budget_ms.map(|ms| ms.saturating_mul(1000));
        find_maximal_dependent_set(session, &nba, &order, budget, clock)
    };
    let t2 = clock.now_us();
    let xs = report.dependent.clone();
    let ys = report.nondependent.clone();
    let projected = project(session, &nba, &xs);
    let mut res = SynthResult {
        realizable: false,
        controller: None,
        report,
        used_determinization: false,
        verified: None,
        timings: Timings::default(),
        nba_states: nba.num_states(),
        nba_edges: nba.edges().len(),
        bdd_before: nba.label_size(&session.bdd),
        bdd_after: projected.label_size(&session.bdd),
        dpa_states: 0,
        game_nodes: 0,
    };
    let tp = clock.now_us();
    let neg = |session: &mut Session| translate(session, &spec.negate(), opts.state_cap);
    if ys.is_empty() {
        // every output follows from the automaton: the subset machine is the only candidate
        let tx = build_lambda_circuit_projected(session, &nba, &projected, &xs);
        let t3 = clock.now_us();
        let c = compose(session, &MealyTY::trivial(session), Some(&tx));
        let t3c = clock.now_us();
        let neg_nba = neg(session)?;
        let chk = check(session, &c, &neg_nba);
        let t4 = clock.now_us();
        res.realizable = !chk.reaches_bottom && !chk.accepting_lasso;
        if res.realizable {
            res.controller = Some(c);
            res.verified = Some(true);
        }
        res.timings = Timings {
            nba_us: t1 - t0,
            deps_us: t2 - t1,
            project_us: tp - t2,
            dep_us: t3 - tp,
            compose_us: t3c - t3,
            nondep_us: t4 - t3c,
            verify_us: 0,
            total_us: t4 - t0,
        };
        return Ok(res);
    }
    res.used_determinization = true;
    let nd = solve_nondep(session, &projected, &ys, opts.atom_cap, opts.state_cap)?;
    let t3 = clock.now_us();
    res.dpa_states = nd.dpa_states;
    res.game_nodes = nd.game_nodes;
    let Some(t_y) = nd.machine else {
        res.timings = Timings {
            nba_us: t1 - t0,
            deps_us: t2 - t1,
            project_us: tp - t2,
            nondep_us: t3 - tp,
            dep_us: 0,
            compose_us: 0,
            verify_us: 0,
            total_us: t3 - t0,
        };
        return Ok(res);
    };
    res.realizable = true;
    let tx = (!xs.is_empty()).then(|| build_lambda_circuit_projected(session, &nba, &projected, &xs));
    let t3c = clock.now_us();
    let c = compose(session, &t_y, tx.as_ref());
    let t4 = clock.now_us();
    if opts.self_check {
        let neg_nba: Nba = neg(session)?;
        res.verified = Some(verify(session, &c, &neg_nba));
    }
    let t5 = clock.now_us();
    res.controller = Some(c);
    res.timings = Timings {
        nba_us: t1 - t0,
        deps_us: t2 - t1,
        project_us: tp - t2,
        nondep_us: t3 - tp,
        dep_us: t3c - t3,
        compose_us: t4 - t3c,
        verify_us: t5 - t4,
        total_us: t4 - t0,
    };
    Ok(res)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clock::NoClock;

    fn run(spec: &Spec, no_deps: bool) -> SynthResult {
        let mut s = Session::new(spec.inputs(), spec.outputs()).unwrap();
        let opts = SynthOptions {
            no_deps,
            ..SynthOptions::default()
        };
        synthesize(&mut s, spec, &opts, &NoClock).unwrap()
    }

    fn copy_spec() -> Spec {
        let mut spec = Spec::with_names(&["i"], &["o"]).unwrap();
        let i = spec.atom("i").unwrap();
        let o = spec.atom("o").unwrap();
        let e = spec.iff(o, i);
        let g = spec.globally(e);
        spec.set_formula(g);
        spec
    }

    #[test]
    fn copy_takes_the_fast_path() {
        let r = run(&copy_spec(), false);
        assert!(r.realizable);
        assert!(!r.used_determinization);
        assert_eq!(r.report.dependent, vec![1]);
        assert_eq!(r.verified, Some(true));
    }

    #[test]
    fn copy_without_dependencies_uses_the_game() {
        let r = run(&copy_spec(), true);
        assert!(r.realizable);
        assert!(r.used_determinization);
        assert_eq!(r.verified, Some(true));
    }

    #[test]
    fn prediction_is_unrealizable_both_ways() {
        let mut spec = Spec::with_names(&["i"], &["o"]).unwrap();
        let i = spec.atom("i").unwrap();
        let o = spec.atom("o").unwrap();
        let xi = spec.next(i);
        let e = spec.iff(o, xi);
        let g = spec.globally(e);
        spec.set_formula(g);
        assert!(!run(&spec, false).realizable);
        assert!(!run(&spec, true).realizable);
    }
}
