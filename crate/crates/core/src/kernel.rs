//! Generic reduction engine.
//!
//! A language is a [`StepFunction`]: a pure map from a configuration to the
//! finite set of its successors. A configuration with no successor is
//! terminal. [`enumerate_sequences`] expands every maximal reduction sequence
//! reachable from a set of initial configurations, depth first, in the
//! successor order chosen by the language.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use thiserror::Error;

use crate::eqn::EqnConfig;
use crate::imp::ImpConfig;
use crate::lam::LamTerm;

pub const DEFAULT_MAX_STEPS: usize = 10_000;
pub const DEFAULT_MAX_SEQUENCES: usize = 100_000;

/// A first-order runtime value.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Int(BigInt),
    Bool(bool),
}

impl Value {
    pub fn int(n: i64) -> Self {
        Value::Int(BigInt::from(n))
    }

    pub fn as_int(&self) -> Option<&BigInt> {
        match self {
            Value::Int(n) => Some(n),
            Value::Bool(_) => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            Value::Int(_) => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(n) => write!(f, "{n}"),
            Value::Bool(b) => write!(f, "{b}"),
        }
    }
}

impl From<i64> for Value {
    fn from(n: i64) -> Self {
        Value::int(n)
    }
}

impl From<bool> for Value {
    fn from(b: bool) -> Self {
        Value::Bool(b)
    }
}

/// A term whose function symbols have all been replaced by the opaque
/// token `<fun>`. `Fun(vec![])` is the bare token.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ErasedTerm {
    Int(BigInt),
    Bool(bool),
    Fun(Vec<ErasedTerm>),
}

impl ErasedTerm {
    pub fn int(n: i64) -> Self {
        ErasedTerm::Int(BigInt::from(n))
    }

    pub fn fun(args: impl IntoIterator<Item = ErasedTerm>) -> Self {
        ErasedTerm::Fun(args.into_iter().collect())
    }
}

impl From<Value> for ErasedTerm {
    fn from(v: Value) -> Self {
        match v {
            Value::Int(n) => ErasedTerm::Int(n),
            Value::Bool(b) => ErasedTerm::Bool(b),
        }
    }
}

impl fmt::Display for ErasedTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ErasedTerm::Int(n) => write!(f, "{n}"),
            ErasedTerm::Bool(b) => write!(f, "{b}"),
            ErasedTerm::Fun(args) => {
                f.write_str("<fun>")?;
                if args.is_empty() {
                    return Ok(());
                }
                f.write_str("(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// Why a configuration cannot take a step even though it is not terminal.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StepError {
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("type mismatch: {0}")]
    TypeMismatch(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("empty choice set: {0}")]
    EmptyChoice(String),
    #[error("stuck: {0}")]
    Stuck(String),
}

/// The one-step transition relation of a language.
///
/// Implementations must be pure and return successors in a canonical order;
/// an empty vector means the configuration is terminal.
pub trait StepFunction {
    type Config: Clone;

    fn step(&self, config: &Self::Config) -> Result<Vec<Self::Config>, StepError>;
}

impl<S: StepFunction + ?Sized> StepFunction for &S {
    type Config = S::Config;

    fn step(&self, config: &Self::Config) -> Result<Vec<Self::Config>, StepError> {
        (**self).step(config)
    }
}

/// Erasure met a variable, so the term was not closed.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("free variable `{0}`")]
pub struct FreeVariable(pub String);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Language {
    Imp,
    Eqn,
    Lam,
}

impl fmt::Display for Language {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Language::Imp => "imp",
            Language::Eqn => "eqn",
            Language::Lam => "lam",
        })
    }
}

impl FromStr for Language {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "imp" => Ok(Language::Imp),
            "eqn" => Ok(Language::Eqn),
            "lam" => Ok(Language::Lam),
            other => Err(format!("unknown language `{other}` (expected imp, eqn or lam)")),
        }
    }
}

/// A language-tagged machine configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Config {
    Imp(ImpConfig),
    Eqn(EqnConfig),
    Lam(LamTerm),
}

impl Config {
    pub fn language(&self) -> Language {
        match self {
            Config::Imp(_) => Language::Imp,
            Config::Eqn(_) => Language::Eqn,
            Config::Lam(_) => Language::Lam,
        }
    }
}

impl fmt::Display for Config {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Config::Imp(c) => write!(f, "{c}"),
            Config::Eqn(c) => write!(f, "{c}"),
            Config::Lam(t) => write!(f, "{t}"),
        }
    }
}

/// Dispatches to the step function of the configuration's own language.
#[derive(Debug, Clone, Copy, Default)]
pub struct Semantics;

impl StepFunction for Semantics {
    type Config = Config;

    fn step(&self, config: &Config) -> Result<Vec<Config>, StepError> {
        Ok(match config {
            Config::Imp(c) => crate::imp::step_imp(c)?.into_iter().map(Config::Imp).collect(),
            Config::Eqn(c) => crate::eqn::step_eqn(c)?.into_iter().map(Config::Eqn).collect(),
            Config::Lam(t) => crate::lam::step_lam(t)?.into_iter().map(Config::Lam).collect(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Terminal,
    Truncated,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionSequence<C> {
    pub configs: Vec<C>,
    pub status: Status,
}

impl<C> ReductionSequence<C> {
    pub fn len(&self) -> usize {
        self.configs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.configs.is_empty()
    }

    /// Number of transitions taken.
    pub fn steps(&self) -> usize {
        self.configs.len().saturating_sub(1)
    }

    pub fn last(&self) -> &C {
        self.configs.last().expect("reduction sequences are nonempty")
    }

    pub fn is_terminal(&self) -> bool {
        self.status == Status::Terminal
    }
}

#[derive(Debug, Clone)]
pub struct EnumerationTask<S: StepFunction> {
    pub initials: Vec<S::Config>,
    pub step: S,
    /// Maximum number of transitions in one sequence.
    pub max_steps: usize,
    pub max_sequences: usize,
}

impl<S: StepFunction> EnumerationTask<S> {
    pub fn new(initials: Vec<S::Config>, step: S) -> Self {
        EnumerationTask { initials, step, max_steps: DEFAULT_MAX_STEPS, max_sequences: DEFAULT_MAX_SEQUENCES }
    }

    pub fn with_limits(mut self, max_steps: usize, max_sequences: usize) -> Self {
        self.max_steps = max_steps;
        self.max_sequences = max_sequences;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnumerationError {
    #[error("enumeration limits must be positive (max_steps={max_steps}, max_sequences={max_sequences})")]
    InvalidLimits { max_steps: usize, max_sequences: usize },
    #[error("more than {max_sequences} maximal reduction sequences")]
    LimitExceeded { max_sequences: usize },
    #[error("configuration after {steps} step(s) is stuck: {source}")]
    Stuck {
        steps: usize,
        #[source]
        source: StepError,
    },
    #[error("configuration after {steps} step(s) has {successors} successors")]
    Nondeterminism { steps: usize, successors: usize },
}

/// Expands every maximal reduction sequence from each initial configuration.
///
/// Sequences are produced depth first, following the step function's
/// successor order. A sequence that reaches `max_steps` transitions without
/// terminating is returned with [`Status::Truncated`].
pub fn enumerate_sequences<S: StepFunction>(
    task: &EnumerationTask<S>,
) -> Result<Vec<ReductionSequence<S::Config>>, EnumerationError> {
    if task.max_steps == 0 || task.max_sequences == 0 {
        return Err(EnumerationError::InvalidLimits { max_steps: task.max_steps, max_sequences: task.max_sequences });
    }
    let mut out = Vec::new();
    for initial in &task.initials {
        expand(initial, task, &mut out)?;
    }
    Ok(out)
}

fn expand<S: StepFunction>(
    initial: &S::Config,
    task: &EnumerationTask<S>,
    out: &mut Vec<ReductionSequence<S::Config>>,
) -> Result<(), EnumerationError> {
    let mut stack: Vec<Vec<S::Config>> = vec![vec![initial.clone()]];
    while let Some(mut path) = stack.pop() {
        loop {
            let steps = path.len() - 1;
            let last = path.last().expect("paths are nonempty");
            let mut succ = task.step.step(last).map_err(|source| EnumerationError::Stuck { steps, source })?;
            let status = if succ.is_empty() {
                Some(Status::Terminal)
            } else if steps >= task.max_steps {
                Some(Status::Truncated)
            } else {
                None
            };
            if let Some(status) = status {
                if out.len() == task.max_sequences {
                    return Err(EnumerationError::LimitExceeded { max_sequences: task.max_sequences });
                }
                out.push(ReductionSequence { configs: path, status });
                break;
            }
            // Siblings go on the stack in reverse so the first successor is
            // explored first; the current path continues with it.
            let first = succ.remove(0);
            for s in succ.into_iter().rev() {
                let mut branch = path.clone();
                branch.push(s);
                stack.push(branch);
            }
            path.push(first);
        }
    }
    Ok(())
}

/// Runs a step function that is expected to be deterministic.
pub fn run_deterministic<S: StepFunction>(
    initial: S::Config,
    step: &S,
    max_steps: usize,
) -> Result<ReductionSequence<S::Config>, EnumerationError> {
    if max_steps == 0 {
        return Err(EnumerationError::InvalidLimits { max_steps, max_sequences: 1 });
    }
    let mut configs = vec![initial];
    loop {
        let steps = configs.len() - 1;
        let last = configs.last().expect("nonempty");
        let mut succ = step.step(last).map_err(|source| EnumerationError::Stuck { steps, source })?;
        match succ.len() {
            0 => return Ok(ReductionSequence { configs, status: Status::Terminal }),
            1 if steps >= max_steps => return Ok(ReductionSequence { configs, status: Status::Truncated }),
            1 => configs.push(succ.pop().expect("one successor")),
            n => return Err(EnumerationError::Nondeterminism { steps, successors: n }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Counts down by one or two; 0 is terminal, negative is stuck.
    struct Countdown;

    impl StepFunction for Countdown {
        type Config = i32;

        fn step(&self, c: &i32) -> Result<Vec<i32>, StepError> {
            match *c {
                0 => Ok(vec![]),
                n if n < 0 => Err(StepError::Stuck(format!("{n}"))),
                1 => Ok(vec![0]),
                n => Ok(vec![n - 1, n - 2]),
            }
        }
    }

    /// Loops forever.
    struct Spin;

    impl StepFunction for Spin {
        type Config = u8;

        fn step(&self, c: &u8) -> Result<Vec<u8>, StepError> {
            Ok(vec![c.wrapping_add(1)])
        }
    }

    #[test]
    fn fibonacci_many_paths() {
        // Number of compositions of n into 1s and 2s is fib(n+1).
        let task = EnumerationTask::new(vec![5], Countdown);
        let seqs = enumerate_sequences(&task).unwrap();
        assert_eq!(seqs.len(), 8);
        assert!(seqs.iter().all(|s| s.is_terminal() && *s.last() == 0));
        // depth-first, first successor first
        assert_eq!(seqs[0].configs, vec![5, 4, 3, 2, 1, 0]);
        assert_eq!(seqs[7].configs, vec![5, 3, 1, 0]);
    }

    #[test]
    fn truncation_is_a_status_not_an_error() {
        let task = EnumerationTask::new(vec![0u8], Spin).with_limits(5, 10);
        let seqs = enumerate_sequences(&task).unwrap();
        assert_eq!(seqs.len(), 1);
        assert_eq!(seqs[0].status, Status::Truncated);
        assert_eq!(seqs[0].steps(), 5);
    }

    #[test]
    fn too_many_sequences() {
        let task = EnumerationTask::new(vec![10], Countdown).with_limits(100, 50);
        assert_eq!(enumerate_sequences(&task), Err(EnumerationError::LimitExceeded { max_sequences: 50 }));
    }

    #[test]
    fn zero_limits_rejected() {
        let task = EnumerationTask::new(vec![1], Countdown).with_limits(0, 1);
        assert!(matches!(enumerate_sequences(&task), Err(EnumerationError::InvalidLimits { .. })));
    }

    #[test]
    fn stuck_reports_depth() {
        let task = EnumerationTask::new(vec![-1], Countdown);
        assert!(matches!(enumerate_sequences(&task), Err(EnumerationError::Stuck { steps: 0, .. })));
    }

    #[test]
    fn run_deterministic_rejects_branching() {
        assert_eq!(
            run_deterministic(3, &Countdown, 10),
            Err(EnumerationError::Nondeterminism { steps: 0, successors: 2 })
        );
        let seq = run_deterministic(1, &Countdown, 10).unwrap();
        assert_eq!(seq.configs, vec![1, 0]);
        let seq = run_deterministic(0u8, &Spin, 3).unwrap();
        assert_eq!(seq.status, Status::Truncated);
        assert_eq!(seq.len(), 4);
    }

    #[test]
    fn erased_term_rendering() {
        let t = ErasedTerm::fun([
            ErasedTerm::fun([ErasedTerm::int(12)]),
            ErasedTerm::fun([ErasedTerm::fun([ErasedTerm::int(12), ErasedTerm::int(2)])]),
            ErasedTerm::int(12),
        ]);
        assert_eq!(t.to_string(), "<fun>(<fun>(12),<fun>(<fun>(12,2)),12)");
        assert_eq!(ErasedTerm::Fun(vec![]).to_string(), "<fun>");
        assert_eq!(ErasedTerm::Bool(false).to_string(), "false");
    }
}
