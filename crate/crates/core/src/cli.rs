//! Batch workflows behind the `algotrace` binary: run one program, collect
//! the trace set of a program over an input range, and compare trace sets.
//!
//! Every command returns an [`Outcome`] (text plus exit code) or a
//! [`CliError`] whose [`CliError::exit_code`] is fixed:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success, `k=<n>`, `equal` |
//! | 1 | parse or I/O error |
//! | 2 | stuck configuration (or branching during `run`) |
//! | 3 | step or sequence limit exceeded |
//! | 4 | `not-a-speedup` |
//! | 5 | `different` |

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::sync::Arc;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::eqn::{parse_eqn, EqnProgram};
use crate::imp::{parse_imp, parse_value, ImpConfig, Stmt, Store};
use crate::kernel::{
    enumerate_sequences, run_deterministic, Config, EnumerationError, EnumerationTask, Language, Semantics, Status,
    Value, DEFAULT_MAX_SEQUENCES, DEFAULT_MAX_STEPS,
};
use crate::lam::{parse_lam, LamTerm};
use crate::traces::{
    algorithm_equal, collect_traces, parse_trace_set, serialize_trace_set, speedup_check, Origin, ProjectionSpec,
    TraceError, TraceSet,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 1;
pub const EXIT_STUCK: i32 = 2;
pub const EXIT_LIMIT: i32 = 3;
pub const EXIT_NOT_SPEEDUP: i32 = 4;
pub const EXIT_DIFFERENT: i32 = 5;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Stuck(String),
    #[error("{0}")]
    Limit(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => EXIT_PARSE,
            CliError::Stuck(_) => EXIT_STUCK,
            CliError::Limit(_) => EXIT_LIMIT,
        }
    }
}

impl From<EnumerationError> for CliError {
    fn from(e: EnumerationError) -> Self {
        match e {
            EnumerationError::Stuck { .. } => CliError::Stuck(e.to_string()),
            EnumerationError::Nondeterminism { .. } => {
                CliError::Stuck(format!("{e}; use `enumerate` for nondeterministic programs"))
            }
            EnumerationError::LimitExceeded { .. } | EnumerationError::InvalidLimits { .. } => {
                CliError::Limit(e.to_string())
            }
        }
    }
}

impl From<TraceError> for CliError {
    fn from(e: TraceError) -> Self {
        match e {
            TraceError::Truncated => CliError::Limit(format!("{e} (raise --max-steps)")),
            TraceError::FreeVariable(_) => CliError::Stuck(e.to_string()),
            TraceError::SpecMismatch { .. } | TraceError::DuplicateVariable(_) => CliError::Parse(e.to_string()),
        }
    }
}

/// Text to print and the process exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub code: i32,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome { stdout, code: EXIT_OK }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_steps: usize,
    pub max_sequences: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_steps: DEFAULT_MAX_STEPS, max_sequences: DEFAULT_MAX_SEQUENCES }
    }
}

/// One input: store bindings for imp, positional arguments for eqn/lam.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Input {
    pub bindings: Vec<(Option<String>, Value)>,
}

impl Input {
    pub fn describe(&self) -> String {
        self.bindings
            .iter()
            .map(|(n, v)| match n {
                Some(n) => format!("{n}={v}"),
                None => v.to_string(),
            })
            .collect::<Vec<_>>()
            .join(",")
    }

    fn store(&self) -> Result<Store, CliError> {
        let mut store = Store::new();
        for (n, v) in &self.bindings {
            let n =
                n.as_deref().ok_or_else(|| CliError::Parse(format!("imp inputs need variable names, e.g. `x={v}`")))?;
            if store.get(n).is_some() {
                return Err(CliError::Parse(format!("variable `{n}` bound twice")));
            }
            store.set(n, v.clone());
        }
        Ok(store)
    }

    fn args(&self) -> Vec<Value> {
        self.bindings.iter().map(|(_, v)| v.clone()).collect()
    }
}

fn binding(item: &str) -> Result<(Option<String>, &str), CliError> {
    match item.split_once('=') {
        Some((n, v)) => {
            let n = n.trim();
            if n.is_empty() || !n.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                return Err(CliError::Parse(format!("bad variable name `{n}`")));
            }
            Ok((Some(n.to_string()), v.trim()))
        }
        None => Ok((None, item.trim())),
    }
}

fn value(s: &str) -> Result<Value, CliError> {
    parse_value(s).map_err(CliError::Parse)
}

/// `x=12,y=1` or, for functional languages, `12` / `12,3`.
pub fn parse_input(s: &str) -> Result<Input, CliError> {
    let mut bindings = Vec::new();
    for item in s.split(',').map(str::trim).filter(|i| !i.is_empty()) {
        let (n, v) = binding(item)?;
        bindings.push((n, value(v)?));
    }
    Ok(Input { bindings })
}

/// `;`-separated dimensions, each `[name=]lo..hi` or `[name=]v1,v2,...`;
/// the result is their cartesian product, first dimension outermost.
pub fn parse_inputs(s: &str) -> Result<Vec<Input>, CliError> {
    let mut out = vec![Input::default()];
    for dim in s.split(';').map(str::trim).filter(|d| !d.is_empty()) {
        let (name, values) = binding(dim)?;
        let values: Vec<Value> = match values.split_once("..") {
            Some((lo, hi)) => {
                let lo: i64 = lo.trim().parse().map_err(|_| CliError::Parse(format!("bad range start `{lo}`")))?;
                let hi: i64 = hi.trim().parse().map_err(|_| CliError::Parse(format!("bad range end `{hi}`")))?;
                if lo > hi {
                    return Err(CliError::Parse(format!("empty range {lo}..{hi}")));
                }
                (lo..=hi).map(Value::int).collect()
            }
            None => values.split(',').map(str::trim).filter(|v| !v.is_empty()).map(value).collect::<Result<_, _>>()?,
        };
        if values.is_empty() {
            return Err(CliError::Parse(format!("no values in `{dim}`")));
        }
        out = out
            .iter()
            .flat_map(|prefix| {
                values.iter().map(|v| {
                    let mut next = prefix.clone();
                    next.bindings.push((name.clone(), v.clone()));
                    next
                })
            })
            .collect();
    }
    if out.len() == 1 && out[0].bindings.is_empty() {
        return Err(CliError::Parse("no inputs given".into()));
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub enum Program {
    Imp(Vec<Stmt>),
    Eqn(Arc<EqnProgram>),
    Lam(LamTerm),
}

impl Program {
    pub fn parse(language: Language, src: &str) -> Result<Self, CliError> {
        let err = |e: crate::syntax::ParseError| CliError::Parse(format!("{language} syntax error at {e}"));
        Ok(match language {
            Language::Imp => Program::Imp(parse_imp(src).map_err(err)?),
            Language::Eqn => Program::Eqn(Arc::new(parse_eqn(src).map_err(err)?)),
            Language::Lam => Program::Lam(parse_lam(src).map_err(err)?),
        })
    }

    pub fn language(&self) -> Language {
        match self {
            Program::Imp(_) => Language::Imp,
            Program::Eqn(_) => Language::Eqn,
            Program::Lam(_) => Language::Lam,
        }
    }

    /// The initial configuration for one input. Functional programs are
    /// applied to the input values: `entry(v1,...)` for eqn, `(term v1 ...)`
    /// for lam.
    pub fn initial(&self, input: &Input, entry: Option<&str>) -> Result<Config, CliError> {
        Ok(match self {
            Program::Imp(p) => Config::Imp(ImpConfig::new(p.clone(), input.store()?)),
            Program::Eqn(p) => {
                let entry = entry.unwrap_or("f");
                Config::Eqn(p.apply(entry, &input.args()).map_err(CliError::Parse)?)
            }
            Program::Lam(t) => {
                if let Some(e) = entry {
                    return Err(CliError::Parse(format!(
                        "--entry `{e}` does not apply to lam programs; the whole term is applied"
                    )));
                }
                let args = input.args().into_iter().map(|v| match v {
                    Value::Int(n) => LamTerm::Int(n),
                    Value::Bool(b) => LamTerm::Bool(b),
                });
                Config::Lam(LamTerm::apps(t.clone(), args))
            }
        })
    }
}

/// Everything needed to turn a program file into configurations and traces.
#[derive(Debug, Clone)]
pub struct RunSpec {
    pub program: Program,
    pub source: String,
    pub entry: Option<String>,
    pub projection: ProjectionSpec,
    pub dedup: bool,
    pub limits: Limits,
}

pub fn language_from_path(path: &Path) -> Option<Language> {
    path.extension()?.to_str()?.parse().ok()
}

impl RunSpec {
    pub fn new(language: Language, source: &str) -> Result<Self, CliError> {
        Ok(RunSpec {
            program: Program::parse(language, source)?,
            source: source.to_string(),
            entry: None,
            projection: ProjectionSpec::default_for(language),
            dedup: false,
            limits: Limits::default(),
        })
    }

    /// Reads a program file; the language defaults to the file extension.
    pub fn from_file(path: &Path, language: Option<Language>) -> Result<Self, CliError> {
        let language = language
            .or_else(|| language_from_path(path))
            .ok_or_else(|| CliError::Parse(format!("cannot infer the language of {}; pass --lang", path.display())))?;
        RunSpec::new(language, &read(path)?)
    }

    pub fn with_keep(mut self, keep: &[String]) -> Result<Self, CliError> {
        if self.program.language() != Language::Imp {
            return Err(CliError::Parse("--keep only applies to imp programs".into()));
        }
        self.projection = ProjectionSpec::keep(keep)?;
        Ok(self)
    }

    pub fn language(&self) -> Language {
        self.program.language()
    }

    pub fn digest(&self) -> String {
        let hash = Sha256::digest(self.source.as_bytes());
        hash.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }

    fn projection_label(&self) -> String {
        match &self.projection {
            ProjectionSpec::Variables(None) => "all-variables".into(),
            ProjectionSpec::Variables(Some(keep)) => format!("keep={}", keep.join(",")),
            ProjectionSpec::Erasure => "erase-functions".into(),
        }
    }

    /// Enumerates every terminal sequence from every input and projects it.
    pub fn trace_set(&self, inputs: &[Input], inputs_label: &str) -> Result<TraceSet, CliError> {
        let mut set = TraceSet::new();
        let mut produced = 0;
        for input in inputs {
            let initial = self.program.initial(input, self.entry.as_deref())?;
            let budget = self.limits.max_sequences.checked_sub(produced).filter(|b| *b > 0);
            let Some(budget) = budget else {
                return Err(EnumerationError::LimitExceeded { max_sequences: self.limits.max_sequences }.into());
            };
            let task = EnumerationTask::new(vec![initial], Semantics).with_limits(self.limits.max_steps, budget);
            let seqs = enumerate_sequences(&task).map_err(|e| match e {
                EnumerationError::LimitExceeded { .. } => {
                    EnumerationError::LimitExceeded { max_sequences: self.limits.max_sequences }
                }
                e => e,
            })?;
            produced += seqs.len();
            let origin = Origin { language: self.language(), program_digest: self.digest(), input: input.describe() };
            for t in collect_traces(&seqs, &self.projection, self.dedup)?.iter() {
                set.insert(t.clone().with_origin(origin.clone()));
            }
        }
        set.metadata.insert("language".into(), self.language().to_string());
        set.metadata.insert("program".into(), self.digest());
        set.metadata.insert("inputs".into(), inputs_label.to_string());
        set.metadata.insert("projection".into(), self.projection_label());
        set.metadata.insert("dedup".into(), self.dedup.to_string());
        if let (Some(e), Language::Eqn) = (&self.entry, self.language()) {
            set.metadata.insert("entry".into(), e.clone());
        }
        Ok(set)
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Parse(format!("cannot read {}: {e}", path.display())))
}

/// Writes through a sibling temporary file so readers never see a partial file.
fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Parse(format!("cannot write {}: {e}", path.display()));
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    fs::write(&tmp, contents).map_err(io)?;
    fs::rename(&tmp, path).map_err(io)
}

/// Prints the reduction sequence of a deterministic program, one
/// configuration per line.
pub fn cmd_run(spec: &RunSpec, input: &Input) -> Result<Outcome, CliError> {
    let initial = spec.program.initial(input, spec.entry.as_deref())?;
    let seq = run_deterministic(initial, &Semantics, spec.limits.max_steps)?;
    let mut out = String::new();
    for c in &seq.configs {
        writeln!(out, "{c}").expect("writing to a String");
    }
    if seq.status == Status::Truncated {
        return Err(CliError::Limit(format!("{out}no terminal configuration within {} steps", spec.limits.max_steps)));
    }
    Ok(Outcome::ok(out))
}

/// Serializes the trace set of `spec` over `inputs`, to `out` if given.
pub fn cmd_enumerate(spec: &RunSpec, inputs_label: &str, out: Option<&Path>) -> Result<Outcome, CliError> {
    let inputs = parse_inputs(inputs_label)?;
    let text = serialize_trace_set(&spec.trace_set(&inputs, inputs_label)?);
    match out {
        Some(path) => {
            write_atomic(path, &text)?;
            Ok(Outcome::ok(String::new()))
        }
        None => Ok(Outcome::ok(text)),
    }
}

fn load_trace_set(path: &Path) -> Result<TraceSet, CliError> {
    parse_trace_set(&read(path)?).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

/// Is the set in `fast` a speed-up of the set in `slow`?
pub fn cmd_speedup(fast: &Path, slow: &Path) -> Result<Outcome, CliError> {
    let (b, a) = (load_trace_set(fast)?, load_trace_set(slow)?);
    Ok(match speedup_check(&b, &a) {
        Some(k) => Outcome::ok(format!("{k}\n")),
        None => Outcome { stdout: "not-a-speedup\n".into(), code: EXIT_NOT_SPEEDUP },
    })
}

fn verdict(equal: bool) -> Outcome {
    if equal {
        Outcome::ok("equal\n".into())
    } else {
        Outcome { stdout: "different\n".into(), code: EXIT_DIFFERENT }
    }
}

pub fn cmd_equal(a: &Path, b: &Path) -> Result<Outcome, CliError> {
    Ok(verdict(algorithm_equal(&load_trace_set(a)?, &load_trace_set(b)?)))
}

/// Builds both trace sets over the same inputs and compares them exactly.
pub fn cmd_compare(a: &RunSpec, b: &RunSpec, inputs_label: &str) -> Result<Outcome, CliError> {
    let inputs = parse_inputs(inputs_label)?;
    let sa = a.trace_set(&inputs, inputs_label)?;
    let sb = b.trace_set(&inputs, inputs_label)?;
    Ok(verdict(algorithm_equal(&sa, &sb)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_inputs() {
        let i = parse_input("x=12, y=1").unwrap();
        assert_eq!(i.describe(), "x=12,y=1");
        let i = parse_input("12,true").unwrap();
        assert_eq!(i.args(), vec![Value::int(12), Value::Bool(true)]);
        assert!(parse_input("x=").is_err());
        assert!(parse_input("=3").is_err());
    }

    #[test]
    fn input_ranges() {
        let is = parse_inputs("x=1..3").unwrap();
        assert_eq!(is.iter().map(Input::describe).collect::<Vec<_>>(), ["x=1", "x=2", "x=3"]);
        let is = parse_inputs("true,false").unwrap();
        assert_eq!(is.len(), 2);
        let is = parse_inputs("x=1,2; y=5..6").unwrap();
        assert_eq!(is.iter().map(Input::describe).collect::<Vec<_>>(), ["x=1,y=5", "x=1,y=6", "x=2,y=5", "x=2,y=6"]);
        assert!(parse_inputs("x=3..1").is_err());
        assert!(parse_inputs("").is_err());
        assert!(parse_inputs("x=a..b").is_err());
    }

    #[test]
    fn imp_needs_named_inputs() {
        let spec = RunSpec::new(Language::Imp, "skip").unwrap();
        let err = spec.program.initial(&parse_input("12").unwrap(), None).unwrap_err();
        assert_eq!(err.exit_code(), EXIT_PARSE);
    }

    #[test]
    fn run_exit_codes() {
        let spec = RunSpec::new(Language::Imp, "x := y").unwrap();
        assert_eq!(cmd_run(&spec, &Input::default()).unwrap_err().exit_code(), EXIT_STUCK);
        let mut spec = RunSpec::new(Language::Imp, "while true do skip").unwrap();
        spec.limits.max_steps = 50;
        assert_eq!(cmd_run(&spec, &Input::default()).unwrap_err().exit_code(), EXIT_LIMIT);
        assert_eq!(RunSpec::new(Language::Imp, "x :=").unwrap_err().exit_code(), EXIT_PARSE);
        let spec = RunSpec::new(Language::Imp, "d :in pow2div(x)").unwrap();
        let err = cmd_run(&spec, &parse_input("x=8").unwrap()).unwrap_err();
        assert_eq!(err.exit_code(), EXIT_STUCK);
    }

    #[test]
    fn sequence_budget_spans_inputs() {
        let mut spec = RunSpec::new(Language::Imp, "while even(x) do {d :in pow2div(x); x := x / d}").unwrap();
        spec.limits.max_sequences = 5;
        // x=8 alone has 4 sequences, x=12 adds 2
        assert!(spec.trace_set(&parse_inputs("x=8").unwrap(), "x=8").is_ok());
        let err = spec.trace_set(&parse_inputs("x=8,12").unwrap(), "x=8,12").unwrap_err();
        assert_eq!(err.exit_code(), EXIT_LIMIT);
    }

    #[test]
    fn keep_only_for_imp() {
        let spec = RunSpec::new(Language::Lam, "fun x -> x").unwrap();
        assert!(spec.with_keep(&["x".into()]).is_err());
        let spec = RunSpec::new(Language::Imp, "skip").unwrap();
        assert!(spec.with_keep(&["x".into(), "x".into()]).is_err());
    }

    #[test]
    fn lam_rejects_entry() {
        let mut spec = RunSpec::new(Language::Lam, "fun x -> x").unwrap();
        spec.entry = Some("g".into());
        assert!(cmd_run(&spec, &parse_input("1").unwrap()).is_err());
    }
}
