//! Batch experiments on the chain: level histograms, tail-bound checks,
//! space accounting, and audits of the level-jump law.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::{BigInt, BigUint};
use rayon::prelude::*;

use crate::automaton::{AutomatonState, Orientation, SegmentTable};
use crate::numeric::{ceil_log_mu, Mu, Rational};
use crate::sampler::{run_stats_only, RunStats, TentSampler};
use crate::tent::tent;

/// `8 * ceil(log_mu d) * ceil(log_mu n)`, with exact ceilings.
pub fn l_star(mu: &Mu, n: u64) -> u64 {
    8 * ceil_log_mu(mu, &BigUint::from(mu.d())) * ceil_log_mu(mu, &BigUint::from(n))
}

/// First `i` in `1..n` with `f^i(1/2) = 1/2`, if any.
pub fn returns_to_half(mu: &Mu, n: u64) -> Option<u64> {
    let half = Rational::half();
    let mut y = half.clone();
    for i in 1..n {
        y = tent(mu, &y);
        if y == half {
            return Some(i);
        }
    }
    None
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TrialRecord {
    pub trial: u64,
    pub seed: u64,
    pub stats: RunStats,
}

/// Distribution of `K` over seeds `seed0 .. seed0 + trials`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KHistogram {
    pub n: u64,
    pub trials: u64,
    pub seed0: u64,
    pub counts: BTreeMap<usize, u64>,
    pub l_star: u64,
    pub records: Vec<TrialRecord>,
}

impl KHistogram {
    /// Runs with `K >= 2 l_star`.
    pub fn exceedances(&self) -> u64 {
        let threshold = 2 * self.l_star as usize;
        self.counts.range(threshold..).map(|(_, c)| c).sum()
    }

    /// Observed exceedances within `max(3, 10 trials / n^2)`.
    pub fn tail_bound_holds(&self) -> bool {
        let n2 = u128::from(self.n) * u128::from(self.n);
        let e = u128::from(self.exceedances());
        e <= 3 || e * n2 <= 10 * u128::from(self.trials)
    }

    pub fn sum_k_squared(&self) -> u128 {
        self.counts
            .iter()
            .map(|(&k, &c)| (k as u128) * (k as u128) * u128::from(c))
            .sum()
    }

    pub fn mean_k_squared(&self) -> Rational {
        Rational::new(
            BigInt::from(self.sum_k_squared()),
            BigInt::from(self.trials),
        )
        .expect("trials >= 1")
    }

    pub fn max_table_bits(&self) -> u64 {
        self.records
            .iter()
            .map(|r| r.stats.table_bits)
            .max()
            .unwrap_or(0)
    }

    /// `key=value` records: one summary line, then one line per level.
    pub fn to_kv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "n={} trials={} seed0={} l_star={} exceed_2l_star={} tail_bound={} mean_K2={}",
            self.n,
            self.trials,
            self.seed0,
            self.l_star,
            self.exceedances(),
            if self.tail_bound_holds() {
                "pass"
            } else {
                "fail"
            },
            self.mean_k_squared(),
        );
        for (k, c) in &self.counts {
            let _ = writeln!(out, "K={k} count={c}");
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("trial,seed,K,table_bits,grow_events\n");
        for r in &self.records {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                r.trial, r.seed, r.stats.max_level, r.stats.table_bits, r.stats.grow_events
            );
        }
        out
    }
}

/// Runs independent chains (one table each) in parallel; the result does
/// not depend on scheduling.
pub fn k_distribution(mu: &Mu, n: u64, trials: u64, seed0: u64) -> KHistogram {
    assert!(trials >= 1, "trials must be positive");
    let records: Vec<TrialRecord> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let seed = seed0.wrapping_add(trial);
            TrialRecord {
                trial,
                seed,
                stats: run_stats_only(mu, n, seed),
            }
        })
        .collect();
    let mut counts = BTreeMap::new();
    for r in &records {
        *counts.entry(r.stats.max_level).or_insert(0) += 1;
    }
    KHistogram {
        n,
        trials,
        seed0,
        counts,
        l_star: l_star(mu, n),
        records,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AuditOutcome {
    Passed {
        steps: u64,
    },
    /// `f^i(1/2) = 1/2` for this `i < n`; the law is not claimed.
    Skipped {
        violating_i: u64,
    },
    Failed {
        step: u64,
        from: AutomatonState,
        to: AutomatonState,
    },
}

impl AuditOutcome {
    pub fn is_failure(&self) -> bool {
        matches!(self, AuditOutcome::Failed { .. })
    }
}

/// Whether `from -> to` is a move the level-jump law allows: up one level
/// keeping orientation, or back to some level `k + 1` with
/// `1 <= k <= level / 2`, switching orientation. Level 0 only enters level
/// 1, and level 1 may also loop on itself.
pub fn jump_allowed(from: AutomatonState, to: AutomatonState) -> bool {
    let (
        AutomatonState::At {
            level: a,
            orientation: oa,
        },
        AutomatonState::At {
            level: b,
            orientation: ob,
        },
    ) = (from, to)
    else {
        return false;
    };
    match a {
        0 => b == 1,
        1 => (b == 2 && oa == ob) || (b == 1 && oa == ob),
        _ => (b == a + 1 && oa == ob) || (2 <= b && b <= a / 2 + 1 && oa != ob),
    }
}

/// Replays one chain and checks every transition against [`jump_allowed`].
pub fn level_jump_audit(mu: &Mu, n: u64, seed: u64) -> AuditOutcome {
    if let Some(i) = returns_to_half(mu, n) {
        return AuditOutcome::Skipped { violating_i: i };
    }
    audit_unchecked(mu, n, seed)
}

/// [`level_jump_audit`] without the hypothesis scan, for callers that have
/// already run [`returns_to_half`] for this `(mu, n)`.
pub fn audit_unchecked(mu: &Mu, n: u64, seed: u64) -> AuditOutcome {
    let mut chain = TentSampler::new(mu, n, seed);
    let mut prev = chain.state();
    let mut step = 0;
    while chain.next().is_some() {
        step += 1;
        let cur = chain.state();
        if !jump_allowed(prev, cur) {
            return AuditOutcome::Failed {
                step,
                from: prev,
                to: cur,
            };
        }
        prev = cur;
    }
    AuditOutcome::Passed { steps: step }
}

/// Checks that each first arrival at an even level `2j` was preceded by
/// `j` steps straight up through levels `j .. 2j - 1` with unchanged
/// orientation. `states[0]` is the initial state.
pub fn first_visit_structure(states: &[AutomatonState]) -> Result<(), String> {
    let mut seen = std::collections::BTreeSet::new();
    for (t, s) in states.iter().enumerate() {
        let AutomatonState::At { level, orientation } = *s else {
            return Err(format!("reject state at t={t}"));
        };
        if !seen.insert(level) || level == 0 || level % 2 == 1 {
            continue;
        }
        let j = level / 2;
        for i in 1..=j {
            let want = AutomatonState::At {
                level: level - i,
                orientation,
            };
            if t < i || states[t - i] != want {
                return Err(format!(
                    "first visit to level {level} at t={t}: Z_{{t-{i}}} = {:?}, expected {want:?}",
                    states.get(t.wrapping_sub(i))
                ));
            }
        }
    }
    Ok(())
}

/// Measured table size against the analytic bound and a loose shape guard.
#[derive(Clone, Debug, PartialEq)]
pub struct SpaceReport {
    pub frontier: usize,
    pub table_bits: u64,
    /// `4k(k log2 d + 1)` for the endpoints plus `k(1 + 3 log2 k)` for the
    /// bookkeeping.
    pub bound: f64,
    /// `16 k^2 log2 d + 64 k (log2 k + 1)`.
    pub guard: f64,
    /// Every endpoint denominator divides `2 d^frontier`.
    pub denominators_ok: bool,
}

impl SpaceReport {
    pub fn guard_holds(&self) -> bool {
        (self.table_bits as f64) <= self.guard
    }

    pub fn to_kv(&self) -> String {
        format!(
            "frontier={} table_bits={} bound={:.1} guard={:.1} guard_ok={} denominators_ok={}\n",
            self.frontier,
            self.table_bits,
            self.bound,
            self.guard,
            self.guard_holds(),
            self.denominators_ok
        )
    }
}

/// `16 k^2 log2 d + 64 k (log2 k + 1)` for a table with frontier `k`.
pub fn space_guard(mu: &Mu, k: usize) -> f64 {
    let kf = k as f64;
    let log_d = (mu.d() as f64).log2();
    16.0 * kf * kf * log_d + 64.0 * kf * (kf.max(1.0).log2() + 1.0)
}

pub fn space_report(table: &SegmentTable) -> SpaceReport {
    let k = table.frontier();
    let kf = k as f64;
    let log_d = (table.mu().d() as f64).log2();
    let log_k = kf.max(1.0).log2();
    let modulus = BigInt::from(2u32) * num_traits::pow(BigInt::from(table.mu().d()), k);
    let denominators_ok = table.levels().iter().all(|r| {
        (&modulus % r.v.denom()) == BigInt::ZERO && (&modulus % r.u.denom()) == BigInt::ZERO
    });
    SpaceReport {
        frontier: k,
        table_bits: table.table_bits(),
        bound: 4.0 * kf * (kf * log_d + 1.0) + kf * (1.0 + 3.0 * log_k),
        guard: space_guard(table.mu(), k),
        denominators_ok,
    }
}

/// Probability of climbing straight from `I_l` to `I_{2l}`, multiplied out
/// step by step on the table, paired with the closed form
/// `|I_{2l}| / (mu^l |I_l|)`.
pub fn go_back_probability(table: &mut SegmentTable, l: usize) -> (Rational, Rational) {
    assert!(l >= 1);
    table.materialize_to(2 * l);
    let mut product = Rational::one();
    for i in l..2 * l {
        let from = AutomatonState::At {
            level: i,
            orientation: Orientation::Straight,
        };
        let bit = table.level(i + 1).c;
        product = product * table.transition_probability(from, bit);
        let to = table.step(from, bit);
        assert_eq!(
            to,
            AutomatonState::At {
                level: i + 1,
                orientation: Orientation::Straight
            },
            "I_{i} does not continue to I_{}",
            i + 1
        );
    }
    let closed =
        table.level(2 * l).length() / (table.mu().value().pow(l as u32) * table.level(l).length());
    (product, closed)
}

/// Searches `l = 2^i ceil(log_mu n)` for the first `l` with
/// `|I_{2l}| / (mu^l |I_l|) <= n^{-3}`, over the range of `i` for which such
/// an `l` is guaranteed to exist.
pub fn short_l_witness(mu: &Mu, n: u64) -> Option<u64> {
    let base = ceil_log_mu(mu, &BigUint::from(n));
    let log_d = ceil_log_mu(mu, &BigUint::from(mu.d()));
    // ceil(log2(log_mu d)) = least m with 2^m >= ceil(log_mu d)
    let mut m = 0;
    while (1u64 << m) < log_d {
        m += 1;
    }
    let i_max = std::cmp::max(4, m + 2);
    let threshold = Rational::new(1, BigInt::from(n).pow(3)).expect("n >= 1");
    let mut table = SegmentTable::new(mu);
    (1..=i_max).map(|i| (1u64 << i) * base).find(|&l| {
        let l = l as usize;
        table.materialize_to(2 * l);
        let ratio =
            table.level(2 * l).length() / (mu.value().pow(l as u32) * table.level(l).length());
        ratio <= threshold
    })
}
