//! Small-step interpreters for three toy languages, execution traces
//! obtained by projecting their reduction sequences, and the trace-set
//! operations used to decide whether two programs express the same
//! algorithm.

pub mod cli;
pub mod eqn;
pub mod imp;
pub mod kernel;
pub mod lam;
pub mod syntax;
pub mod traces;

pub use kernel::{
    enumerate_sequences, run_deterministic, Config, EnumerationError, EnumerationTask, ErasedTerm, Language,
    ReductionSequence, Semantics, Status, StepError, StepFunction, Value,
};
pub use syntax::ParseError;
pub use traces::{ErasedState, ProjectionSpec, SpeedupBound, Trace, TraceSet};
