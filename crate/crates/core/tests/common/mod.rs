//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

pub mod strategies;

use std::collections::VecDeque;
use std::path::PathBuf;

use algotrace::kernel::StepFunction;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn golden(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

pub fn read_fixture(name: &str) -> String {
    std::fs::read_to_string(fixture(name)).unwrap()
}

pub fn read_golden(name: &str) -> String {
    std::fs::read_to_string(golden(name)).unwrap()
}

/// Golden trace files, one state per line, ignoring `#` comments.
pub fn golden_lines(name: &str) -> Vec<String> {
    read_golden(name).lines().filter(|l| !l.trim().is_empty() && !l.starts_with('#')).map(str::to_string).collect()
}

/// Divide by two until odd.
pub fn largest_odd_divisor(mut n: u64) -> u64 {
    assert!(n > 0);
    while n.is_multiple_of(2) {
        n /= 2;
    }
    n
}

/// Minimal gap bound by trying every index subset of `long`.
pub fn brute_force_gap<T: PartialEq>(short: &[T], long: &[T]) -> Option<usize> {
    let (m, n) = (short.len(), long.len());
    assert!(n <= 16, "oracle is exponential");
    if m == 0 || n == 0 {
        return None;
    }
    let mut best: Option<usize> = None;
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != m || mask & 1 == 0 {
            continue;
        }
        let idx: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        if idx.iter().zip(short).any(|(&i, s)| long[i] != *s) {
            continue;
        }
        if short[m - 1] != long[n - 1] {
            continue;
        }
        let mut gap = n - 1 - idx[m - 1];
        for w in idx.windows(2) {
            gap = gap.max(w[1] - w[0] - 1);
        }
        best = Some(best.map_or(gap, |b| b.min(gap)));
    }
    best
}

/// Every maximal path from `initial`, found breadth first. Panics if some
/// path exceeds `depth` steps or a step fails.
pub fn bfs_sequences<S: StepFunction>(step: &S, initial: S::Config, depth: usize) -> Vec<Vec<S::Config>> {
    let mut done = Vec::new();
    let mut frontier = VecDeque::from([vec![initial]]);
    while let Some(path) = frontier.pop_front() {
        assert!(path.len() <= depth + 1, "path longer than {depth}");
        let succ = step.step(path.last().unwrap()).expect("oracle inputs never get stuck");
        if succ.is_empty() {
            done.push(path);
            continue;
        }
        for s in succ {
            let mut p = path.clone();
            p.push(s);
            frontier.push_back(p);
        }
    }
    done
}

/// Every way to reach the odd part of `n` by dividing by powers of two,
/// as the list of intermediate values.
pub fn pow2_division_paths(n: u64) -> Vec<Vec<u64>> {
    if n % 2 == 1 {
        return vec![vec![n]];
    }
    let mut out = Vec::new();
    let mut d = 2;
    while n.is_multiple_of(d) {
        for mut rest in pow2_division_paths(n / d) {
            rest.insert(0, n);
            out.push(rest);
        }
        d *= 2;
    }
    out
}
