mod common;

use std::sync::Arc;

use algotrace::eqn::{parse_eqn, step_eqn, EqnConfig, FunTerm};
use algotrace::imp::{parse_imp, step_imp, ImpConfig, Store};
use algotrace::kernel::{
    enumerate_sequences, run_deterministic, Config, EnumerationError, EnumerationTask, Semantics, Status, StepFunction,
    Value,
};
use algotrace::lam::{parse_lam, step_lam, LamTerm};
use algotrace::traces::{collect_traces, project, ErasedState, ProjectionSpec};
use common::*;

fn imp_config(src: &str, x: i64) -> Config {
    Config::Imp(ImpConfig::new(parse_imp(src).unwrap(), Store::new().with("x", x)))
}

fn halve_imp(x: i64) -> Config {
    imp_config(&read_fixture("halve.imp"), x)
}

fn halve_any_imp(x: i64) -> Config {
    imp_config(&read_fixture("halve_any_pow2.imp"), x)
}

fn halve_eqn(n: i64) -> Config {
    let p = Arc::new(parse_eqn(&read_fixture("halve.eqn")).unwrap());
    Config::Eqn(p.apply("f", &[Value::int(n)]).unwrap())
}

fn halve_lam(n: i64) -> Config {
    let f = parse_lam(&read_fixture("halve.lam")).unwrap();
    Config::Lam(LamTerm::app(f, LamTerm::int(n)))
}

fn rendered(seq: &[Config]) -> Vec<String> {
    seq.iter().map(ToString::to_string).collect()
}

fn assert_well_formed(configs: &[Config], status: Status) {
    for w in configs.windows(2) {
        let succ = Semantics.step(&w[0]).unwrap();
        assert!(succ.contains(&w[1]), "{} does not step to {}", w[0], w[1]);
    }
    let last = Semantics.step(configs.last().unwrap()).unwrap();
    assert_eq!(last.is_empty(), status == Status::Terminal);
}

#[test]
fn imp_halving_at_12_matches_golden_listing() {
    let task = EnumerationTask::new(vec![halve_imp(12)], Semantics);
    let seqs = enumerate_sequences(&task).unwrap();
    assert_eq!(seqs.len(), 1);
    assert_eq!(seqs[0].status, Status::Terminal);
    assert_eq!(rendered(&seqs[0].configs), golden_lines("halve_imp_x12.txt"));
    assert_well_formed(&seqs[0].configs, seqs[0].status);
}

#[test]
fn empty_program_is_already_terminal() {
    let c = Config::Imp(ImpConfig::new(vec![], Store::new().with("x", 1)));
    let seqs = enumerate_sequences(&EnumerationTask::new(vec![c.clone()], Semantics)).unwrap();
    assert_eq!(seqs.len(), 1);
    assert_eq!(seqs[0].len(), 1);
    let seq = run_deterministic(c, &Semantics, 10).unwrap();
    assert_eq!(seq.len(), 1);
}

#[test]
fn nondeterministic_halving_at_8_has_four_sequences() {
    let task = EnumerationTask::new(vec![halve_any_imp(8)], Semantics);
    let seqs = enumerate_sequences(&task).unwrap();
    assert_eq!(seqs.len(), 4);
    for s in &seqs {
        assert_well_formed(&s.configs, s.status);
    }
    let oracle = bfs_sequences(&Semantics, halve_any_imp(8), 100);
    let mut got: Vec<Vec<String>> = seqs.iter().map(|s| rendered(&s.configs)).collect();
    let mut want: Vec<Vec<String>> = oracle.iter().map(|s| rendered(s)).collect();
    got.sort();
    want.sort();
    assert_eq!(got, want);
}

#[test]
fn enumeration_matches_breadth_first_oracle() {
    for x in 1..=64 {
        let seqs = enumerate_sequences(&EnumerationTask::new(vec![halve_any_imp(x)], Semantics)).unwrap();
        let mut got: Vec<Vec<String>> = seqs.iter().map(|s| rendered(&s.configs)).collect();
        let mut want: Vec<Vec<String>> =
            bfs_sequences(&Semantics, halve_any_imp(x), 1000).iter().map(|s| rendered(s)).collect();
        got.sort();
        want.sort();
        assert_eq!(got, want, "x = {x}");
    }
}

#[test]
fn deterministic_run_rejects_choice() {
    assert!(matches!(
        run_deterministic(halve_any_imp(12), &Semantics, 1000),
        Err(EnumerationError::Nondeterminism { successors: 2, .. })
    ));
    let seqs = enumerate_sequences(&EnumerationTask::new(vec![halve_any_imp(12)], Semantics)).unwrap();
    assert_eq!(seqs.len(), 2);
}

#[test]
fn one_sequence_per_initial_when_deterministic() {
    let initials: Vec<Config> = (1..=30).map(halve_imp).chain((1..=30).map(halve_eqn)).collect();
    let seqs = enumerate_sequences(&EnumerationTask::new(initials.clone(), Semantics)).unwrap();
    assert_eq!(seqs.len(), initials.len());
    for (s, i) in seqs.iter().zip(&initials) {
        assert_eq!(&s.configs[0], i);
    }
}

#[test]
fn imp_computes_largest_odd_divisor() {
    for n in 1..=1000u64 {
        let seq = run_deterministic(halve_imp(n as i64), &Semantics, 10_000).unwrap();
        let Config::Imp(last) = seq.last() else { unreachable!() };
        assert!(last.is_terminal());
        assert_eq!(last.store.get("x"), Some(&Value::int(largest_odd_divisor(n) as i64)), "n = {n}");
    }
}

#[test]
fn imp_projection_of_the_listing() {
    let seq = run_deterministic(halve_imp(12), &Semantics, 100).unwrap();
    let trace = project(&seq, &ProjectionSpec::keep(&["x"]).unwrap()).unwrap();
    let xs = [12, 12, 12, 6, 6, 6, 3, 3, 3, 3];
    assert_eq!(trace.states, xs.iter().map(|&x| ErasedState::tuple([x])).collect::<Vec<_>>());
}

#[test]
fn eqn_matches_golden_listing_and_trace() {
    let seq = run_deterministic(halve_eqn(12), &Semantics, 100).unwrap();
    assert_eq!(rendered(&seq.configs), golden_lines("halve_eqn_f12.txt"));
    let trace = project(&seq, &ProjectionSpec::Erasure).unwrap();
    let got: Vec<String> = trace.states.iter().map(ToString::to_string).collect();
    assert_eq!(got, golden_lines("halve_f12.trace"));
}

#[test]
fn eqn_computes_largest_odd_divisor() {
    for n in 1..=1000u64 {
        let seq = run_deterministic(halve_eqn(n as i64), &Semantics, 100_000).unwrap();
        let Config::Eqn(EqnConfig { term, .. }) = seq.last() else { unreachable!() };
        assert_eq!(term, &FunTerm::int(largest_odd_divisor(n) as i64), "n = {n}");
    }
}

#[test]
fn lam_listing_and_trace() {
    let seq = run_deterministic(halve_lam(12), &Semantics, 100).unwrap();
    assert_eq!(seq.len(), 12);
    assert_eq!(rendered(&seq.configs), golden_lines("halve_lam_12.txt"));
    assert_eq!(seq.last(), &Config::Lam(LamTerm::int(3)));
    let trace = project(&seq, &ProjectionSpec::Erasure).unwrap();
    let got: Vec<String> = trace.states.iter().map(ToString::to_string).collect();
    assert_eq!(got, golden_lines("halve_f12.trace"));
}

#[test]
fn square_plus_one_takes_three_steps() {
    let t = parse_lam(&read_fixture("square_plus_one.lam")).unwrap();
    let seq = run_deterministic(Config::Lam(t), &Semantics, 100).unwrap();
    assert_eq!(seq.steps(), 3);
    assert_eq!(seq.last(), &Config::Lam(LamTerm::int(50)));
}

#[test]
fn eqn_and_lam_traces_coincide() {
    for n in 1..=200 {
        let e = run_deterministic(halve_eqn(n), &Semantics, 10_000).unwrap();
        let l = run_deterministic(halve_lam(n), &Semantics, 10_000).unwrap();
        let te = project(&e, &ProjectionSpec::Erasure).unwrap();
        let tl = project(&l, &ProjectionSpec::Erasure).unwrap();
        assert_eq!(te, tl, "n = {n}");
    }
}

#[test]
fn steps_preserve_closedness() {
    for n in 1..=40 {
        let Config::Lam(t) = halve_lam(n) else { unreachable!() };
        let mut t = t;
        while let Some(next) = step_lam(&t).unwrap().pop() {
            assert!(next.is_closed());
            t = next;
        }
        let Config::Eqn(c) = halve_eqn(n) else { unreachable!() };
        let mut c = c;
        while let Some(next) = step_eqn(&c).unwrap().pop() {
            assert!(next.term.is_closed());
            c = next;
        }
    }
}

#[test]
fn while_steps_leave_the_store_alone() {
    let Config::Imp(mut c) = halve_imp(96) else { unreachable!() };
    while let Some(next) = step_imp(&c).unwrap().pop() {
        if matches!(c.program.first(), Some(algotrace::imp::Stmt::While(..))) {
            assert_eq!(next.store, c.store);
        }
        c = next;
    }
}

#[test]
fn truncated_sequences_have_no_trace() {
    let c = imp_config("while true do x := x + 1", 0);
    let task = EnumerationTask::new(vec![c], Semantics).with_limits(20, 10);
    let seqs = enumerate_sequences(&task).unwrap();
    assert_eq!(seqs[0].status, Status::Truncated);
    assert!(project(&seqs[0], &ProjectionSpec::all_variables()).is_err());
    assert!(collect_traces(&seqs, &ProjectionSpec::all_variables(), false).is_err());
}
