//! Execution traces: projections of terminal reduction sequences, the
//! speed-up relation between trace sets, and the canonical `.traces` text
//! format.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use thiserror::Error;

use crate::kernel::{Config, ErasedTerm, FreeVariable, Language, ReductionSequence, Value};

/// One projected configuration.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ErasedState {
    /// Values of the kept variables of an imperative store.
    Tuple(Vec<Value>),
    /// A functional term with all function symbols erased.
    Term(ErasedTerm),
}

impl ErasedState {
    pub fn tuple(values: impl IntoIterator<Item = i64>) -> Self {
        ErasedState::Tuple(values.into_iter().map(Value::int).collect())
    }

    fn is_tuple(&self) -> bool {
        matches!(self, ErasedState::Tuple(_))
    }
}

impl fmt::Display for ErasedState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ErasedState::Tuple(vs) => {
                f.write_str("(")?;
                for (i, v) in vs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{v}")?;
                }
                f.write_str(")")
            }
            ErasedState::Term(t) => write!(f, "{t}"),
        }
    }
}

impl FromStr for ErasedState {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if let Some(inner) = s.strip_prefix('(') {
            let inner = inner.strip_suffix(')').ok_or_else(|| format!("unclosed tuple `{s}`"))?;
            if inner.is_empty() {
                return Ok(ErasedState::Tuple(Vec::new()));
            }
            let values = inner.split(',').map(parse_atom).collect::<Result<Vec<_>, _>>()?;
            return Ok(ErasedState::Tuple(values));
        }
        let (t, rest) = parse_erased(s)?;
        if !rest.is_empty() {
            return Err(format!("trailing `{rest}` after term"));
        }
        Ok(ErasedState::Term(t))
    }
}

fn parse_atom(s: &str) -> Result<Value, String> {
    match s {
        "true" => Ok(Value::Bool(true)),
        "false" => Ok(Value::Bool(false)),
        _ if !s.is_empty() && s.strip_prefix('-').unwrap_or(s).bytes().all(|b| b.is_ascii_digit()) && s != "-" => {
            Ok(Value::Int(s.parse::<BigInt>().map_err(|e| e.to_string())?))
        }
        _ => Err(format!("bad value `{s}`")),
    }
}

/// Parses one erased term from the front of `s`, returning the rest.
fn parse_erased(s: &str) -> Result<(ErasedTerm, &str), String> {
    if let Some(mut rest) = s.strip_prefix("<fun>") {
        let mut args = Vec::new();
        if let Some(r) = rest.strip_prefix('(') {
            rest = r;
            loop {
                let (a, r) = parse_erased(rest)?;
                args.push(a);
                if let Some(r) = r.strip_prefix(',') {
                    rest = r;
                } else if let Some(r) = r.strip_prefix(')') {
                    rest = r;
                    break;
                } else {
                    return Err(format!("expected `,` or `)` at `{r}`"));
                }
            }
        }
        return Ok((ErasedTerm::Fun(args), rest));
    }
    let end = s.find([',', ')']).unwrap_or(s.len());
    let value = parse_atom(&s[..end])?;
    Ok((ErasedTerm::from(value), &s[end..]))
}

/// The pointwise projection applied to every configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProjectionSpec {
    /// Imperative: keep the listed variables in this order, or every variable
    /// in allocation order when `None`.
    Variables(Option<Vec<String>>),
    /// Functional: erase function symbols to `<fun>`.
    Erasure,
}

impl ProjectionSpec {
    pub fn keep<S: AsRef<str>>(names: &[S]) -> Result<Self, TraceError> {
        let mut out: Vec<String> = Vec::with_capacity(names.len());
        for n in names {
            let n = n.as_ref();
            if out.iter().any(|m| m == n) {
                return Err(TraceError::DuplicateVariable(n.to_string()));
            }
            out.push(n.to_string());
        }
        Ok(ProjectionSpec::Variables(Some(out)))
    }

    pub fn all_variables() -> Self {
        ProjectionSpec::Variables(None)
    }

    /// The natural projection for a language.
    pub fn default_for(language: Language) -> Self {
        match language {
            Language::Imp => ProjectionSpec::all_variables(),
            Language::Eqn | Language::Lam => ProjectionSpec::Erasure,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TraceError {
    #[error("sequence was truncated before terminating; only terminal sequences have traces")]
    Truncated,
    #[error("projection {spec:?} does not apply to {language} configurations")]
    SpecMismatch { spec: ProjectionSpec, language: Language },
    #[error("variable `{0}` kept twice")]
    DuplicateVariable(String),
    #[error(transparent)]
    FreeVariable(#[from] FreeVariable),
}

/// Where a trace came from. Ignored by every comparison.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Origin {
    pub language: Language,
    pub program_digest: String,
    pub input: String,
}

#[derive(Debug, Clone)]
pub struct Trace {
    pub states: Vec<ErasedState>,
    pub origin: Option<Origin>,
}

impl Trace {
    pub fn new(states: Vec<ErasedState>) -> Self {
        Trace { states, origin: None }
    }

    pub fn with_origin(mut self, origin: Origin) -> Self {
        self.origin = Some(origin);
        self
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

impl PartialEq for Trace {
    fn eq(&self, other: &Self) -> bool {
        self.states == other.states
    }
}

impl Eq for Trace {}

impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.states.iter().enumerate() {
            if i > 0 {
                f.write_str("|")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

impl FromStr for Trace {
    type Err = String;

    fn from_str(line: &str) -> Result<Self, Self::Err> {
        if line.is_empty() {
            return Err("empty trace".into());
        }
        let states = line.split('|').map(str::parse).collect::<Result<Vec<ErasedState>, _>>()?;
        if states.iter().any(|s| s.is_tuple() != states[0].is_tuple()) {
            return Err("trace mixes tuple and term states".into());
        }
        Ok(Trace::new(states))
    }
}

/// A finite set of traces, keyed by canonical rendering so that iteration
/// order is the lexicographic order of serialized lines.
#[derive(Debug, Clone, Default)]
pub struct TraceSet {
    traces: BTreeMap<String, Trace>,
    pub metadata: BTreeMap<String, String>,
}

impl TraceSet {
    pub fn new() -> Self {
        TraceSet::default()
    }

    /// Adds a trace; returns `false` if an equal trace was already present.
    pub fn insert(&mut self, trace: Trace) -> bool {
        let key = trace.to_string();
        if self.traces.contains_key(&key) {
            return false;
        }
        self.traces.insert(key, trace);
        true
    }

    pub fn contains(&self, trace: &Trace) -> bool {
        self.traces.contains_key(&trace.to_string())
    }

    pub fn iter(&self) -> impl Iterator<Item = &Trace> {
        self.traces.values()
    }

    pub fn len(&self) -> usize {
        self.traces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.traces.is_empty()
    }

    pub fn lines(&self) -> impl Iterator<Item = &str> {
        self.traces.keys().map(String::as_str)
    }
}

impl FromIterator<Trace> for TraceSet {
    fn from_iter<I: IntoIterator<Item = Trace>>(iter: I) -> Self {
        let mut set = TraceSet::new();
        for t in iter {
            set.insert(t);
        }
        set
    }
}

/// Projects one configuration.
pub fn project_config(c: &Config, spec: &ProjectionSpec) -> Result<ErasedState, TraceError> {
    match (c, spec) {
        (Config::Imp(c), ProjectionSpec::Variables(keep)) => {
            Ok(ErasedState::Tuple(crate::imp::erase_imp(c, keep.as_deref())))
        }
        (Config::Eqn(c), ProjectionSpec::Erasure) => Ok(ErasedState::Term(crate::eqn::erase_fun_term(&c.term)?)),
        (Config::Lam(t), ProjectionSpec::Erasure) => Ok(ErasedState::Term(crate::lam::erase_lam_term(t)?)),
        (c, spec) => Err(TraceError::SpecMismatch { spec: spec.clone(), language: c.language() }),
    }
}

/// Pointwise projection of a terminal reduction sequence.
pub fn project(seq: &ReductionSequence<Config>, spec: &ProjectionSpec) -> Result<Trace, TraceError> {
    if !seq.is_terminal() {
        return Err(TraceError::Truncated);
    }
    let states = seq.configs.iter().map(|c| project_config(c, spec)).collect::<Result<_, _>>()?;
    Ok(Trace::new(states))
}

/// Keeps the first state of every run of equal consecutive states.
pub fn dedup(t: &Trace) -> Trace {
    let mut states = t.states.clone();
    states.dedup();
    Trace { states, origin: t.origin.clone() }
}

/// The constant `k` of a speed-up: the longest run of omitted states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SpeedupBound(pub usize);

impl fmt::Display for SpeedupBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "k={}", self.0)
    }
}

/// Smallest `k` such that `short` embeds in `long` as a subsequence with
/// `short[0]` matched to `long[0]`, equal last elements, and no run of more
/// than `k` consecutive omitted elements. The omitted suffix after the last
/// matched index counts as a run. `None` if no such embedding exists.
pub fn minimal_gap_bound<T: PartialEq>(short: &[T], long: &[T]) -> Option<usize> {
    let (m, n) = (short.len(), long.len());
    if m == 0 || n == 0 || m > n || short[0] != long[0] || short[m - 1] != long[n - 1] {
        return None;
    }
    // best[j]: minimal max-gap so far with the current element of `short`
    // matched at long[j]
    let mut best: Vec<Option<usize>> = vec![None; n];
    best[0] = Some(0);
    for s in &short[1..] {
        let mut next = vec![None; n];
        for (j, slot) in next.iter_mut().enumerate() {
            if long[j] != *s {
                continue;
            }
            *slot = (0..j).filter_map(|p| best[p].map(|g| g.max(j - p - 1))).min();
        }
        best = next;
    }
    best.iter().enumerate().filter_map(|(j, g)| g.map(|g| g.max(n - 1 - j))).min()
}

/// `Some(k)` when every trace of `fast` is a speed-up of some trace of
/// `slow`; `k` is the worst per-trace minimal bound.
pub fn speedup_check(fast: &TraceSet, slow: &TraceSet) -> Option<SpeedupBound> {
    let mut k = 0;
    for b in fast.iter() {
        let best = slow.iter().filter_map(|a| minimal_gap_bound(&b.states, &a.states)).min()?;
        k = k.max(best);
    }
    Some(SpeedupBound(k))
}

/// Exact equality of the trace sets; metadata is ignored.
pub fn algorithm_equal(a: &TraceSet, b: &TraceSet) -> bool {
    a.traces.len() == b.traces.len() && a.traces.keys().eq(b.traces.keys())
}

/// Projects every sequence and collects the traces.
pub fn collect_traces(
    seqs: &[ReductionSequence<Config>],
    spec: &ProjectionSpec,
    dedup_states: bool,
) -> Result<TraceSet, TraceError> {
    let mut set = TraceSet::new();
    for seq in seqs {
        let t = project(seq, spec)?;
        set.insert(if dedup_states { dedup(&t) } else { t });
    }
    Ok(set)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct TraceParseError {
    pub line: usize,
    pub message: String,
}

fn metadata_entry(comment: &str) -> Option<(&str, &str)> {
    let (k, v) = comment.split_once(": ")?;
    let valid = !k.is_empty() && k.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_' || b == b'-');
    valid.then_some((k, v))
}

/// Canonical text: `# key: value` metadata lines sorted by key, then one
/// trace per line sorted lexicographically.
pub fn serialize_trace_set(set: &TraceSet) -> String {
    let mut out = String::new();
    for (k, v) in &set.metadata {
        out.push_str(&format!("# {k}: {}\n", v.replace('\n', " ")));
    }
    for line in set.lines() {
        out.push_str(line);
        out.push('\n');
    }
    out
}

pub fn parse_trace_set(text: &str) -> Result<TraceSet, TraceParseError> {
    let mut set = TraceSet::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if let Some((k, v)) = metadata_entry(comment.trim_start()) {
                set.metadata.insert(k.to_string(), v.to_string());
            }
            continue;
        }
        let trace = line.parse::<Trace>().map_err(|message| TraceParseError { line: i + 1, message })?;
        set.insert(trace);
    }
    Ok(set)
}
