//! Proptest generators shared by the property and acceptance suites.

use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

use algotrace::eqn::FunTerm;
use algotrace::imp::{BinOp, Expr, Stmt};
use algotrace::kernel::{enumerate_sequences, Config, EnumerationError, EnumerationTask, Semantics, StepFunction};
use algotrace::lam::{LamTerm, Prim};
use algotrace::traces::{ErasedState, Trace, TraceSet};

pub fn states(xs: &[u8]) -> Vec<ErasedState> {
    xs.iter().map(|&x| ErasedState::tuple([x as i64])).collect()
}

/// A long trace and a candidate short one; half the time the short trace is
/// a random subsequence containing the first element.
pub fn trace_pair() -> impl Strategy<Value = (Vec<u8>, Vec<u8>)> {
    prop::collection::vec(0u8..3, 1..=12).prop_flat_map(|long| {
        let n = long.len();
        let sub = prop::collection::vec(any::<bool>(), n).prop_map({
            let long = long.clone();
            move |keep| {
                long.iter().enumerate().filter(|(i, _)| *i == 0 || keep[*i]).map(|(_, x)| *x).collect::<Vec<u8>>()
            }
        });
        let random = prop::collection::vec(0u8..3, 1..=6);
        (Just(long), prop_oneof![sub, random])
    })
}

pub fn trace_set() -> impl Strategy<Value = TraceSet> {
    prop::collection::vec(prop::collection::vec(0u8..4, 1..6), 0..6)
        .prop_map(|ts| ts.iter().map(|t| Trace::new(states(t))).collect())
}

/// No multiplication: loops of squaring grow the integers too fast.
pub fn imp_expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![(0i64..6).prop_map(Expr::int), prop::sample::select(vec!["x", "y"]).prop_map(Expr::var),];
    leaf.prop_recursive(3, 12, 2, |inner| {
        (prop::sample::select(vec![BinOp::Add, BinOp::Sub]), inner.clone(), inner)
            .prop_map(|(op, l, r)| Expr::bin(op, l, r))
    })
}

pub fn imp_cond() -> impl Strategy<Value = Expr> {
    prop_oneof![
        (imp_expr(), imp_expr()).prop_map(|(l, r)| Expr::bin(BinOp::Lt, l, r)),
        imp_expr().prop_map(|e| Expr::Even(Box::new(e))),
        Just(Expr::Bool(true)),
    ]
}

pub fn imp_stmt() -> impl Strategy<Value = Stmt> {
    let leaf = prop_oneof![
        Just(Stmt::Skip),
        (prop::sample::select(vec!["x", "y", "z"]), imp_expr()).prop_map(|(x, e)| Stmt::Assign(x.to_string(), e)),
    ];
    leaf.prop_recursive(3, 16, 3, |inner| {
        let seq = prop::collection::vec(inner, 0..3);
        prop_oneof![
            seq.clone().prop_map(Stmt::Block),
            (imp_cond(), seq.clone(), seq.clone()).prop_map(|(c, t, e)| Stmt::If(c, t, e)),
            (imp_cond(), seq).prop_map(|(c, b)| Stmt::While(c, b)),
        ]
    })
}

pub fn assert_deterministic_run(initial: Config, max_steps: usize) -> Result<(), TestCaseError> {
    let task = EnumerationTask::new(vec![initial], Semantics).with_limits(max_steps, 10);
    match enumerate_sequences(&task) {
        Ok(seqs) => {
            prop_assert_eq!(seqs.len(), 1);
            for c in &seqs[0].configs {
                prop_assert!(Semantics.step(c).unwrap().len() <= 1);
            }
        }
        Err(EnumerationError::Stuck { .. }) => {}
        Err(e) => prop_assert!(false, "unexpected {e}"),
    }
    Ok(())
}

/// Primitive-only first-order terms, mapped to both functional languages.
pub fn arith_term() -> impl Strategy<Value = FunTerm> {
    let leaf = prop_oneof![(0i64..9).prop_map(FunTerm::int), any::<bool>().prop_map(FunTerm::Bool)];
    leaf.prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            inner.clone().prop_map(|a| FunTerm::app("even", vec![a])),
            (prop::sample::select(vec!["+", "*", "/"]), inner.clone(), inner.clone())
                .prop_map(|(op, a, b)| FunTerm::app(op, vec![a, b])),
            (inner.clone(), inner.clone(), inner).prop_map(|(c, a, b)| FunTerm::app("if", vec![c, a, b])),
        ]
    })
}

pub fn to_lam(t: &FunTerm) -> LamTerm {
    match t {
        FunTerm::Int(n) => LamTerm::Int(n.clone()),
        FunTerm::Bool(b) => LamTerm::Bool(*b),
        FunTerm::Var(x) => LamTerm::Var(x.clone()),
        FunTerm::App(name, args) if name == "if" => {
            LamTerm::If(Box::new(to_lam(&args[0])), Box::new(to_lam(&args[1])), Box::new(to_lam(&args[2])))
        }
        FunTerm::App(name, args) => {
            let p = match name.as_str() {
                "even" => Prim::Even,
                "+" => Prim::Add,
                "*" => Prim::Mul,
                "/" => Prim::Div,
                other => panic!("no primitive {other}"),
            };
            LamTerm::apps(LamTerm::Prim(p), args.iter().map(to_lam))
        }
    }
}
