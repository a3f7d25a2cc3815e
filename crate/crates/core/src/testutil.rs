//! Shared fixtures for unit tests. Objects are 0-based: x1 is index 0.

use crate::model::{build_system, Covering, CoveringDecisionSystem};

pub fn lists(raw: &[&[usize]]) -> Vec<Vec<usize>> {
    raw.iter().map(|b| b.to_vec()).collect()
}

fn named(raw: &[(&str, &[&[usize]])]) -> Vec<(String, Vec<Vec<usize>>)> {
    raw.iter().map(|(n, bs)| (n.to_string(), lists(bs))).collect()
}

const DECISION8: &[&[usize]] = &[&[0, 1, 2], &[3, 4, 5], &[6, 7]];

pub const CONSISTENT8: &[(&str, &[&[usize]])] = &[
    ("C1", &[&[0, 1], &[1, 2, 3], &[2], &[3], &[4, 5], &[5, 6, 7]]),
    ("C2", &[&[0, 2, 3], &[1, 2], &[3, 4], &[4, 5], &[5], &[6, 7]]),
    ("C3", &[&[0], &[0, 1, 2], &[1, 2], &[2, 3, 4, 5], &[4, 6, 7]]),
    ("C4", &[&[0, 1, 3], &[1, 2], &[3, 4, 5], &[5], &[6, 7]]),
    ("C5", &[&[0, 1, 2], &[3], &[4, 5], &[4, 5, 7], &[3, 6, 7]]),
];

pub const CONSISTENT8_C6: &[&[usize]] = &[&[0, 3, 4], &[1], &[2, 3, 5], &[2, 4, 6], &[6, 7]];

pub const INCONSISTENT8: &[(&str, &[&[usize]])] = &[
    ("C1", &[&[0, 1, 2, 3], &[2, 5, 6], &[3, 4], &[5], &[6, 7]]),
    ("C2", &[&[0], &[1, 2, 3], &[3, 4], &[3, 4, 5], &[5, 6, 7]]),
    ("C3", &[&[0], &[0, 2, 3], &[1, 2, 3, 7], &[2, 3, 4, 5, 6]]),
    ("C4", &[&[0, 3, 4], &[1, 2, 3, 4], &[3, 4, 5, 6, 7]]),
];

pub const INCONSISTENT8_C5: &[&[usize]] = &[&[0, 4, 5], &[3, 4], &[1, 2, 3], &[4, 5, 6, 7]];

pub fn consistent8() -> CoveringDecisionSystem {
    build_system(8, &named(CONSISTENT8), &lists(DECISION8)).unwrap()
}

pub fn consistent8_c6() -> Covering {
    Covering::from_lists("C6", 8, &lists(CONSISTENT8_C6)).unwrap()
}

pub fn inconsistent8() -> CoveringDecisionSystem {
    build_system(8, &named(INCONSISTENT8), &lists(DECISION8)).unwrap()
}

pub fn inconsistent8_c5() -> Covering {
    Covering::from_lists("C5", 8, &lists(INCONSISTENT8_C5)).unwrap()
}

pub fn system(
    n: usize,
    coverings: &[(&str, &[&[usize]])],
    decision: &[&[usize]],
) -> CoveringDecisionSystem {
    build_system(n, &named(coverings), &lists(decision)).unwrap()
}
