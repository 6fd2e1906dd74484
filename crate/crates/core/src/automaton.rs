//! Segment types, the transition diagram over them, and exact path
//! probabilities.
//!
//! Level `k >= 1` of a [`SegmentTable`] records the image interval of the
//! kneading prefix `gamma^k(1/2)` as endpoints `v < u`, plus the bit `c_k`.
//! Whether an endpoint is included is never stored: a state is the pair
//! (level, last emitted bit), and the interval is `[v, u)` after a 0 and
//! `(v, u]` after a 1. The state is *straight* (`I_k`) when the last bit
//! equals `c_k` and *mirrored* (`Ī_k`) otherwise.
//!
//! Levels are materialized lazily: only the frontier level has unresolved
//! successors, and [`SegmentTable::grow`] resolves them, appending at most
//! one new level.

use std::fmt;

use num_bigint::BigUint;
use num_traits::Zero;

use crate::numeric::{ExactBernoulli, Mu, Rational};
use crate::tent::{tent, Code};

/// Target of a transition: another level, or rejection of the bit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Successor {
    Reject,
    Level(usize),
}

impl Successor {
    pub fn level(self) -> Option<usize> {
        match self {
            Successor::Level(l) => Some(l),
            Successor::Reject => None,
        }
    }
}

impl fmt::Display for Successor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Successor::Reject => f.write_str("-1"),
            Successor::Level(l) => write!(f, "{l}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Orientation {
    Straight,
    Mirrored,
}

impl Orientation {
    fn of(last_bit: bool, c: bool) -> Self {
        if last_bit == c {
            Orientation::Straight
        } else {
            Orientation::Mirrored
        }
    }

    fn flips(self) -> bool {
        self == Orientation::Mirrored
    }
}

/// A walker's position in the diagram.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AutomatonState {
    Reject,
    At {
        level: usize,
        orientation: Orientation,
    },
}

impl AutomatonState {
    /// `q_0`: level 0 entered as if the last bit were 1.
    pub const INITIAL: AutomatonState = AutomatonState::At {
        level: 0,
        orientation: Orientation::Mirrored,
    };

    pub fn level(self) -> Option<usize> {
        match self {
            AutomatonState::At { level, .. } => Some(level),
            AutomatonState::Reject => None,
        }
    }

    pub fn is_reject(self) -> bool {
        self == AutomatonState::Reject
    }
}

/// One row of the segment table.
#[derive(Clone, Debug)]
pub struct LevelRecord {
    pub v: Rational,
    pub u: Rational,
    pub c: bool,
    /// `delta[b]` is the level reached from the straight state on bit `b`.
    /// `None` until the level is expanded.
    pub delta: Option<[Successor; 2]>,
    /// Steps since the last branching level; defined from level 2 on.
    pub theta: Option<usize>,
    /// Probability that the straight state emits 0.
    step: Option<ExactBernoulli>,
}

impl LevelRecord {
    pub fn length(&self) -> Rational {
        &self.u - &self.v
    }

    pub fn out_degree(&self) -> Option<usize> {
        self.delta
            .map(|d| d.iter().filter(|s| **s != Successor::Reject).count())
    }

    fn bits(&self) -> u64 {
        fn index_bits(s: Successor) -> u64 {
            match s {
                Successor::Reject => 1,
                Successor::Level(l) => BigUint::from(l).bits(),
            }
        }
        let delta = self.delta.map_or(0, |[a, b]| index_bits(a) + index_bits(b));
        let theta = self.theta.map_or(0, |t| BigUint::from(t).bits());
        self.v.bit_size() + self.u.bit_size() + 1 + delta + theta
    }
}

/// The lazily grown table of segment types for one slope.
#[derive(Clone, Debug)]
pub struct SegmentTable {
    mu: Mu,
    peak: Rational,
    levels: Vec<LevelRecord>,
    stabilized_at: Option<usize>,
    alias: Option<usize>,
    degenerate_at: Option<usize>,
    grow_events: u64,
}

impl SegmentTable {
    /// Levels 0 (`q_0`, `[0, 1]`) and 1 (`I_1`, `(0, mu/2]`); level 1 is
    /// the unexpanded frontier.
    pub fn new(mu: &Mu) -> Self {
        let peak = tent(mu, &Rational::half());
        let q0 = LevelRecord {
            v: Rational::zero(),
            u: Rational::one(),
            c: false,
            delta: Some([Successor::Level(1); 2]),
            theta: None,
            // |I_1| / (mu * 1) = 1/2
            step: Some(ExactBernoulli::new(&Rational::half()).expect("1/2 in range")),
        };
        let i1 = LevelRecord {
            v: Rational::zero(),
            u: peak.clone(),
            c: true,
            delta: None,
            theta: None,
            step: None,
        };
        SegmentTable {
            mu: mu.clone(),
            peak,
            levels: vec![q0, i1],
            stabilized_at: None,
            alias: None,
            degenerate_at: None,
            grow_events: 0,
        }
    }

    pub fn mu(&self) -> &Mu {
        &self.mu
    }

    pub fn levels(&self) -> &[LevelRecord] {
        &self.levels
    }

    pub fn level(&self, k: usize) -> &LevelRecord {
        &self.levels[k]
    }

    /// Highest materialized level.
    pub fn frontier(&self) -> usize {
        self.levels.len() - 1
    }

    /// Set once a newly computed type coincides with an existing level; the
    /// table is complete from then on.
    pub fn stabilized_at(&self) -> Option<usize> {
        self.stabilized_at
    }

    /// First level having an endpoint exactly at `1/2`, if any.
    pub fn degenerate_at(&self) -> Option<usize> {
        self.degenerate_at
    }

    pub fn grow_events(&self) -> u64 {
        self.grow_events
    }

    pub fn is_complete(&self) -> bool {
        self.stabilized_at.is_some()
    }

    /// Storage of the table in bits: both endpoints of every level, one bit
    /// for `c`, and the bit-length of every stored level index.
    pub fn table_bits(&self) -> u64 {
        self.levels.iter().map(LevelRecord::bits).sum()
    }

    fn find_pair(&self, v: &Rational, u: &Rational) -> Option<usize> {
        (1..self.levels.len()).find(|&j| self.levels[j].v == *v && self.levels[j].u == *u)
    }

    /// Resolves the successors of the frontier level, appending the next
    /// kneading type. Returns the level index of that type, which is an
    /// existing level once the table has stabilized.
    pub fn grow(&mut self) -> usize {
        if let Some(alias) = self.alias {
            return alias;
        }
        let k = self.frontier();
        debug_assert!(self.levels[k].delta.is_none());
        let half = Rational::half();
        let (v, u, c) = {
            let rec = &self.levels[k];
            (rec.v.clone(), rec.u.clone(), rec.c)
        };
        if self.degenerate_at.is_none() && (v == half || u == half) {
            self.degenerate_at = Some(k);
        }
        let f = |x: &Rational| tent(&self.mu, x);

        // (pair of the continuing type, its first bit, branch pair if any)
        let branching = v < half && half < u;
        let (cont, cont_bit, branch) = if branching {
            // Closed end first: after a 0 that is v, after a 1 it is u.
            let (near, far) = if c { (&u, &v) } else { (&v, &u) };
            (
                (f(near), self.peak.clone()),
                false,
                Some((f(far), self.peak.clone())),
            )
        } else if u <= half {
            ((f(&v), f(&u)), c, None)
        } else {
            ((f(&u), f(&v)), !c, None)
        };

        let cont_level = match self.find_pair(&cont.0, &cont.1) {
            Some(j) => {
                self.stabilized_at = Some(k);
                self.alias = Some(j);
                j
            }
            None => {
                let theta = if branching {
                    1
                } else {
                    self.levels[k].theta.expect("non-branching level has theta") + 1
                };
                self.levels.push(LevelRecord {
                    v: cont.0,
                    u: cont.1,
                    c: cont_bit,
                    delta: None,
                    theta: Some(theta),
                    step: None,
                });
                k + 1
            }
        };

        let delta = match branch {
            Some((bv, bu)) => {
                let target = self.resolve_branch(k, &bv, &bu);
                [Successor::Level(cont_level), Successor::Level(target)]
            }
            None => {
                let mut d = [Successor::Reject; 2];
                // From the straight state the emitted bit equals the new
                // closedness `cont_bit`.
                d[cont_bit as usize] = Successor::Level(cont_level);
                d
            }
        };
        let zero_len = match delta[0] {
            Successor::Level(l) => self.levels[l].length(),
            Successor::Reject => Rational::zero(),
        };
        let p0 = zero_len / (self.mu.value() * self.levels[k].length());
        let rec = &mut self.levels[k];
        rec.delta = Some(delta);
        rec.step = Some(ExactBernoulli::new(&p0).expect("step probability in [0, 1]"));
        self.grow_events += 1;
        cont_level
    }

    /// The branch target of a branching level `k` is `Ī_{theta(k)+1}`; the
    /// endpoint scan is the cross-check and the fallback when that fails.
    fn resolve_branch(&self, k: usize, v: &Rational, u: &Rational) -> usize {
        let by_theta = self.levels[k]
            .theta
            .map(|t| t + 1)
            .filter(|&j| j < self.levels.len() && self.levels[j].v == *v && self.levels[j].u == *u);
        let by_scan = || {
            self.find_pair(v, u).unwrap_or_else(|| {
                panic!("segment table invariant violated: branch type ({v}, {u}) from level {k} is not a known type")
            })
        };
        match by_theta {
            Some(j) => {
                debug_assert_eq!(by_scan(), j);
                j
            }
            None => by_scan(),
        }
    }

    /// Expands level `k` if it is the unexpanded frontier.
    pub fn ensure_expanded(&mut self, k: usize) {
        while self.levels[k].delta.is_none() {
            self.grow();
        }
    }

    /// Grows until level `k` exists or the table stabilizes.
    pub fn materialize_to(&mut self, k: usize) {
        while self.frontier() < k && !self.is_complete() {
            self.grow();
        }
    }

    /// Successor levels of level `k`, expanding it first if needed.
    pub fn delta(&mut self, k: usize) -> [Successor; 2] {
        self.ensure_expanded(k);
        self.levels[k].delta.expect("expanded")
    }

    /// The prepared draw for "straight state at level `k` emits 0".
    pub fn step_draw(&mut self, k: usize) -> &ExactBernoulli {
        self.ensure_expanded(k);
        self.levels[k].step.as_ref().expect("expanded")
    }

    /// `|delta(I_k, 0)| / (mu |I_k|)`.
    pub fn zero_probability(&mut self, k: usize) -> Rational {
        self.step_draw(k).probability()
    }

    /// One transition on `bit`. Rejection is absorbing.
    pub fn step(&mut self, state: AutomatonState, bit: bool) -> AutomatonState {
        let AutomatonState::At { level, orientation } = state else {
            return AutomatonState::Reject;
        };
        let straight_bit = bit ^ orientation.flips();
        match self.delta(level)[straight_bit as usize] {
            Successor::Reject => AutomatonState::Reject,
            Successor::Level(t) => AutomatonState::At {
                level: t,
                orientation: Orientation::of(bit, self.levels[t].c),
            },
        }
    }

    /// Probability that `state` emits `bit`.
    pub fn transition_probability(&mut self, state: AutomatonState, bit: bool) -> Rational {
        let AutomatonState::At { level, orientation } = state else {
            return Rational::zero();
        };
        let p0 = self.zero_probability(level);
        if bit ^ orientation.flips() {
            Rational::one() - p0
        } else {
            p0
        }
    }

    pub fn trace(&mut self, code: &Code) -> AutomatonState {
        code.bits()
            .iter()
            .fold(AutomatonState::INITIAL, |s, &b| self.step(s, b))
    }

    pub fn recognize(&mut self, code: &Code) -> bool {
        !self.trace(code).is_reject()
    }

    /// `|L_n|` by counting paths of length `n` from `q_0`.
    pub fn count_codes(&mut self, n: usize) -> BigUint {
        let slot = |level: usize, o: Orientation| 2 * level + o.flips() as usize;
        let mut counts: Vec<BigUint> = vec![BigUint::zero(); 2];
        counts[slot(0, Orientation::Mirrored)] = BigUint::from(1u32);
        for _ in 0..n {
            let mut next: Vec<BigUint> = Vec::new();
            for (idx, count) in counts.iter().enumerate() {
                if count.is_zero() {
                    continue;
                }
                let orientation = if idx % 2 == 1 {
                    Orientation::Mirrored
                } else {
                    Orientation::Straight
                };
                let from = AutomatonState::At {
                    level: idx / 2,
                    orientation,
                };
                for bit in [false, true] {
                    if let AutomatonState::At { level, orientation } = self.step(from, bit) {
                        let s = slot(level, orientation);
                        if next.len() <= s {
                            next.resize(s + 1, BigUint::zero());
                        }
                        next[s] += count;
                    }
                }
            }
            counts = next;
        }
        counts.into_iter().sum()
    }

    /// Product of the step probabilities along `code`; zero when rejected.
    pub fn code_probability(&mut self, code: &Code) -> Rational {
        let mut state = AutomatonState::INITIAL;
        let mut p = Rational::one();
        for &b in code.bits() {
            p = p * self.transition_probability(state, b);
            state = self.step(state, b);
            if state.is_reject() {
                return Rational::zero();
            }
        }
        p
    }

    /// Swaps the two successors of one level. Used only to check that
    /// verification notices a corrupted table.
    #[doc(hidden)]
    pub fn corrupt_level(&mut self, k: usize) {
        self.materialize_to(k);
        self.ensure_expanded(k);
        if let Some(d) = self.levels[k].delta.as_mut() {
            d.swap(0, 1);
        }
    }
}

impl fmt::Display for SegmentTable {
    /// One tab-separated row per level: `k v u c delta0 delta1 theta`.
    /// Unresolved successors print as `?`, an undefined theta as `-`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, rec) in self.levels.iter().enumerate() {
            let (d0, d1) = match rec.delta {
                Some([a, b]) => (a.to_string(), b.to_string()),
                None => ("?".into(), "?".into()),
            };
            let theta = rec.theta.map_or("-".into(), |t| t.to_string());
            writeln!(
                f,
                "{k}\t{}\t{}\t{}\t{d0}\t{d1}\t{theta}",
                rec.v, rec.u, rec.c as u8
            )?;
        }
        Ok(())
    }
}

/// Membership of `code` in the tent language.
pub fn recognize(mu: &Mu, code: &Code) -> bool {
    SegmentTable::new(mu).recognize(code)
}

pub fn count_codes(mu: &Mu, n: usize) -> BigUint {
    SegmentTable::new(mu).count_codes(n)
}

pub fn code_probability(mu: &Mu, code: &Code) -> Rational {
    SegmentTable::new(mu).code_probability(code)
}
