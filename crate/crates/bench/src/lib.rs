//! Fixtures shared by the benchmarks.

use quatl1::{build_socp, RecoveryInstance, SocpProblem, TrialSpec};

/// Planted instance with the given shape.
pub fn instance(m: usize, n: usize, s: usize, seed: u64) -> RecoveryInstance {
    RecoveryInstance::generate(TrialSpec::new(m, n, s, seed).expect("valid shape")).expect("instance generates")
}

/// The cone program of a planted instance.
pub fn problem(m: usize, n: usize, s: usize, seed: u64) -> SocpProblem {
    let inst = instance(m, n, s, seed);
    build_socp(&inst.a, &inst.y).and_then(|e| e.into_socp()).expect("embedding succeeds")
}
