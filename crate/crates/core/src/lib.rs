//! Exact sampling of tent codes.
//!
//! For a rational slope `1 < mu < 2`, draws `x` uniformly from `[0, 1)` and
//! emits the first `n` bits of its tent code, without ever representing
//! `x`. The sampler walks a Markov chain over segment types, each a pair of
//! endpoints plus one bit of orientation, and grows the type table lazily.
//!
//! [`oracle`] enumerates the same distribution by brute-force interval
//! subdivision and serves as the ground truth for small `n`.

pub mod analysis;
pub mod automaton;
pub mod error;
pub mod numeric;
pub mod oracle;
pub mod sampler;
pub mod tent;

pub use automaton::{
    code_probability, count_codes, recognize, AutomatonState, LevelRecord, Orientation,
    SegmentTable, Successor,
};
pub use error::{Error, Result};
pub use numeric::{bernoulli_exact, BitSource, ExactBernoulli, Mu, Rational};
pub use oracle::{enumerate_sections, exact_distribution, section_of, Section};
pub use sampler::{sample_code, sample_stream, RunStats, TentSampler};
pub use tent::{decode_partial, encode, tent_apply, tent_iterate, tent_tilde, Code};
