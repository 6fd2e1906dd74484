//! Streaming generation of `B_1 ... B_n ~ D_n`, the law of the first `n`
//! code bits of a uniform `x` in `[0, 1)`.
//!
//! [`TentSampler`] is an iterator that yields one bit per call and keeps
//! only the segment table, the current level, and the last bit. The table
//! is grown the first time the walk lands on its frontier.

use crate::automaton::{AutomatonState, Orientation, SegmentTable, Successor};
use crate::numeric::{BitSource, Mu};
use crate::tent::Code;

/// Resource figures of one run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RunStats {
    /// Largest level visited (`K`).
    pub max_level: usize,
    pub table_bits: u64,
    pub steps: u64,
    pub grow_events: u64,
}

impl RunStats {
    /// `key=value` lines, one per field.
    pub fn to_kv_lines(&self) -> String {
        format!(
            "K={}\ntable_bits={}\nsteps={}\ngrow_events={}\n",
            self.max_level, self.table_bits, self.steps, self.grow_events
        )
    }
}

/// Pull-based walker of the segment-type Markov chain.
#[derive(Clone, Debug)]
pub struct TentSampler {
    table: SegmentTable,
    rng: BitSource,
    level: usize,
    last_bit: bool,
    step: u64,
    n: u64,
    max_level: usize,
}

impl TentSampler {
    pub fn new(mu: &Mu, n: u64, seed: u64) -> Self {
        TentSampler {
            table: SegmentTable::new(mu),
            rng: BitSource::new(seed),
            level: 0,
            last_bit: true,
            step: 0,
            n,
            max_level: 0,
        }
    }

    pub fn table(&self) -> &SegmentTable {
        &self.table
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn state(&self) -> AutomatonState {
        AutomatonState::At {
            level: self.level,
            orientation: self.orientation(),
        }
    }

    fn orientation(&self) -> Orientation {
        if self.last_bit == self.table.level(self.level).c {
            Orientation::Straight
        } else {
            Orientation::Mirrored
        }
    }

    pub fn stats(&self) -> RunStats {
        RunStats {
            max_level: self.max_level,
            table_bits: self.table.table_bits(),
            steps: self.step,
            grow_events: self.table.grow_events(),
        }
    }

    /// Walks the remaining steps, discarding bits.
    pub fn finish(mut self) -> RunStats {
        while self.next().is_some() {}
        self.stats()
    }
}

impl Iterator for TentSampler {
    type Item = bool;

    fn next(&mut self) -> Option<bool> {
        if self.step >= self.n {
            return None;
        }
        let l = self.level;
        let straight = self.orientation() == Orientation::Straight;
        // The straight state emits 0 with probability |I_{delta0}| / (mu |I_l|);
        // the mirrored state emits 1 with that same probability.
        let zero_branch = self.table.step_draw(l).sample(&mut self.rng);
        let straight_bit = !zero_branch;
        let emitted = straight_bit ^ !straight;
        let next = match self.table.delta(l)[straight_bit as usize] {
            Successor::Level(t) => t,
            Successor::Reject => panic!(
                "chain moved into the reject state at step {} from level {l}",
                self.step + 1
            ),
        };
        self.level = next;
        self.last_bit = emitted;
        self.step += 1;
        self.max_level = self.max_level.max(next);
        // Deferred update: materialize the successors on first arrival.
        self.table.ensure_expanded(next);
        Some(emitted)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.n - self.step) as usize;
        (left, Some(left))
    }
}

/// The streaming sampler for `n` bits from `seed`.
pub fn sample_stream(mu: &Mu, n: u64, seed: u64) -> TentSampler {
    TentSampler::new(mu, n, seed)
}

/// Collects a whole code; for tests and small `n`.
pub fn sample_code(mu: &Mu, n: u64, seed: u64) -> (Code, RunStats) {
    let mut s = TentSampler::new(mu, n, seed);
    let code = Code::from_bits(s.by_ref().collect());
    (code, s.stats())
}

pub fn run_stats_only(mu: &Mu, n: u64, seed: u64) -> RunStats {
    TentSampler::new(mu, n, seed).finish()
}
