//! wasm-bindgen entry points for the static page in `www/`.

use wasm_bindgen::prelude::*;

use algotrace::cli::{self, RunSpec};
use algotrace::kernel::Language;
use algotrace::traces::{parse_trace_set, speedup_check};

fn spec(lang: &str, source: &str, keep: &str, dedup: bool) -> Result<RunSpec, String> {
    let language: Language = lang.parse()?;
    let mut spec = RunSpec::new(language, source).map_err(|e| e.to_string())?;
    let keep: Vec<String> = keep.split(',').map(str::trim).filter(|s| !s.is_empty()).map(String::from).collect();
    if !keep.is_empty() {
        spec = spec.with_keep(&keep).map_err(|e| e.to_string())?;
    }
    spec.dedup = dedup;
    Ok(spec)
}

/// The reduction sequence, one configuration per line.
pub fn run_program(lang: &str, source: &str, input: &str) -> Result<String, String> {
    let spec = spec(lang, source, "", false)?;
    let input = cli::parse_input(input).map_err(|e| e.to_string())?;
    cli::cmd_run(&spec, &input).map(|o| o.stdout).map_err(|e| e.to_string())
}

/// The trace set over `inputs` in the `.traces` text format.
pub fn enumerate_program(lang: &str, source: &str, inputs: &str, keep: &str, dedup: bool) -> Result<String, String> {
    let spec = spec(lang, source, keep, dedup)?;
    cli::cmd_enumerate(&spec, inputs, None).map(|o| o.stdout).map_err(|e| e.to_string())
}

/// `k=<n>` if `fast` is a speed-up of `slow`, otherwise `not-a-speedup`.
pub fn speedup_text(fast: &str, slow: &str) -> Result<String, String> {
    let fast = parse_trace_set(fast).map_err(|e| format!("fast: {e}"))?;
    let slow = parse_trace_set(slow).map_err(|e| format!("slow: {e}"))?;
    Ok(speedup_check(&fast, &slow).map_or_else(|| "not-a-speedup".to_string(), |k| k.to_string()))
}

#[wasm_bindgen]
pub fn run(lang: &str, source: &str, input: &str) -> Result<String, String> {
    run_program(lang, source, input)
}

#[wasm_bindgen]
pub fn enumerate(lang: &str, source: &str, inputs: &str, keep: &str, dedup: bool) -> Result<String, String> {
    enumerate_program(lang, source, inputs, keep, dedup)
}

#[wasm_bindgen]
pub fn speedup(fast: &str, slow: &str) -> Result<String, String> {
    speedup_text(fast, slow)
}
