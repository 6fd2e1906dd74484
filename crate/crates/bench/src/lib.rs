//! Shared inputs for the criterion benchmarks.

use tentcode::Mu;

/// Slopes exercised by every benchmark group.
pub fn slopes() -> Vec<Mu> {
    ["3/2", "7/4", "13/8"]
        .iter()
        .map(|s| s.parse().expect("valid slope"))
        .collect()
}
