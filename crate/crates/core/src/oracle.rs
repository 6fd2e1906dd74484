//! Brute-force ground truth by exact interval subdivision.
//!
//! Each section `[lo, hi)` carries the affine image of `f^n` over it,
//! tracked as the limit values at its two ends. Refining to `n + 1` splits
//! the section at the preimage of `1/2` whenever `1/2` is interior to that
//! image. This module deliberately shares nothing with
//! [`crate::automaton`]; it is the reference the automaton is checked
//! against.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::numeric::{Mu, Rational};
use crate::tent::{tent, Code};

/// Default largest `n` that [`enumerate_sections`] accepts.
pub const DEFAULT_ENUMERATION_CAP: usize = 16;

/// The set of initial conditions `[lo, hi)` sharing one code.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Section {
    pub code: Code,
    pub lo: Rational,
    pub hi: Rational,
    /// `f^n(lo)`.
    start: Rational,
    /// `lim f^n(x)` as `x -> hi` from below.
    end: Rational,
}

impl Section {
    pub fn length(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn image_lo(&self) -> &Rational {
        std::cmp::min(&self.start, &self.end)
    }

    pub fn image_hi(&self) -> &Rational {
        std::cmp::max(&self.start, &self.end)
    }

    /// `false` when `f^n` increases across the section, `true` when it
    /// decreases.
    pub fn image_orientation(&self) -> bool {
        self.start > self.end
    }

    pub fn contains(&self, x: &Rational) -> bool {
        self.lo <= *x && *x < self.hi
    }

    fn roots(mu: &Mu) -> [Section; 2] {
        let half = Rational::half();
        let peak = tent(mu, &half);
        [
            Section {
                code: Code::from_bits(vec![false]),
                lo: Rational::zero(),
                hi: half.clone(),
                start: Rational::zero(),
                end: peak.clone(),
            },
            Section {
                code: Code::from_bits(vec![true]),
                lo: half,
                hi: Rational::one(),
                start: peak,
                end: Rational::zero(),
            },
        ]
    }

    /// Splits into the one or two sections of length `n + 1`, lower first.
    fn refine(&self, mu: &Mu) -> (Section, Option<Section>) {
        let half = Rational::half();
        let (ilo, ihi) = (self.image_lo(), self.image_hi());
        if *ilo < half && half < *ihi {
            // Affine preimage of 1/2 inside [lo, hi).
            let t = (&half - &self.start) / (&self.end - &self.start);
            let cut = &self.lo + t * (&self.hi - &self.lo);
            let peak = tent(mu, &half);
            let lower = Section {
                code: self.code.with(false),
                lo: self.lo.clone(),
                hi: cut.clone(),
                start: tent(mu, &self.start),
                end: peak.clone(),
            };
            let upper = Section {
                code: self.code.with(true),
                lo: cut,
                hi: self.hi.clone(),
                start: peak,
                end: tent(mu, &self.end),
            };
            return (lower, Some(upper));
        }
        // The whole image lies on one side of 1/2 (touching allowed).
        let below = *ihi <= half;
        let bit = if self.image_orientation() {
            below
        } else {
            !below
        };
        let only = Section {
            code: self.code.with(bit),
            lo: self.lo.clone(),
            hi: self.hi.clone(),
            start: tent(mu, &self.start),
            end: tent(mu, &self.end),
        };
        (only, None)
    }
}

/// All sections for prefix length `n`, sorted by `lo` (equivalently, by
/// code in lexicographic order). Fails when `n` exceeds
/// [`DEFAULT_ENUMERATION_CAP`].
pub fn enumerate_sections(mu: &Mu, n: usize) -> Result<Vec<Section>> {
    enumerate_sections_capped(mu, n, DEFAULT_ENUMERATION_CAP)
}

pub fn enumerate_sections_capped(mu: &Mu, n: usize, cap: usize) -> Result<Vec<Section>> {
    if n > cap {
        return Err(Error::CapExceeded { n, cap });
    }
    if n == 0 {
        return Err(Error::domain(n, "n >= 1"));
    }
    let mut level: Vec<Section> = Section::roots(mu).into();
    for _ in 1..n {
        let mut next = Vec::with_capacity(level.len() * 2);
        for s in &level {
            let (a, b) = s.refine(mu);
            next.push(a);
            next.extend(b);
        }
        level = next;
    }
    Ok(level)
}

/// `D_n` as a map from code to probability (its section's length).
pub fn exact_distribution(mu: &Mu, n: usize) -> Result<BTreeMap<Code, Rational>> {
    Ok(enumerate_sections(mu, n)?
        .into_iter()
        .map(|s| {
            let len = s.length();
            (s.code, len)
        })
        .collect())
}

/// The section of length `n` containing `x`, found by descending the
/// subdivision tree along `x` only.
pub fn section_of(mu: &Mu, x: &Rational, n: usize) -> Result<Section> {
    if !x.in_unit_half_open() {
        return Err(Error::domain(x, "[0, 1)"));
    }
    if n == 0 {
        return Err(Error::domain(n, "n >= 1"));
    }
    let [left, right] = Section::roots(mu);
    let mut cur = if *x < Rational::half() { left } else { right };
    for _ in 1..n {
        cur = match cur.refine(mu) {
            (only, None) => only,
            (lower, Some(upper)) => {
                if lower.contains(x) {
                    lower
                } else {
                    upper
                }
            }
        };
    }
    Ok(cur)
}
