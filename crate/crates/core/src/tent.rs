//! The tent map, its folded variant, and the tent-code encoder/decoder.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::numeric::{Mu, Rational};

/// A finite bit sequence `b_1 ... b_n`, serialized as ASCII `0`/`1` with
/// `b_1` first.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Code(Vec<bool>);

impl Code {
    pub fn new() -> Self {
        Code(Vec::new())
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        Code(bits)
    }

    pub fn zeros(n: usize) -> Self {
        Code(vec![false; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn push(&mut self, bit: bool) {
        self.0.push(bit);
    }

    pub fn last(&self) -> Option<bool> {
        self.0.last().copied()
    }

    pub fn complement(&self) -> Code {
        Code(self.0.iter().map(|b| !b).collect())
    }

    /// The code with its first bit removed.
    pub fn tail(&self) -> Code {
        Code(self.0.iter().skip(1).copied().collect())
    }

    pub fn with(&self, bit: bool) -> Code {
        let mut c = self.clone();
        c.push(bit);
        c
    }

    /// All `2^n` codes of length `n`, in lexicographic order.
    pub fn all(n: usize) -> impl Iterator<Item = Code> {
        assert!(n < 64, "exhaustive listing limited to n < 64");
        (0u64..1 << n).map(move |v| Code((0..n).rev().map(|i| (v >> i) & 1 == 1).collect()))
    }
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Code({self})")
    }
}

impl FromStr for Code {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|ch| match ch {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::Parse {
                    input: s.to_string(),
                    what: "a 0/1 string",
                }),
            })
            .collect::<Result<Vec<_>>>()
            .map(Code)
    }
}

/// Unchecked `f(x)`; callers guarantee `x` in `[0, 1]`.
pub(crate) fn tent(mu: &Mu, x: &Rational) -> Rational {
    if *x <= Rational::half() {
        mu.value() * x
    } else {
        mu.value() * (Rational::one() - x)
    }
}

fn check_closed(x: &Rational) -> Result<()> {
    if x.in_unit_closed() {
        Ok(())
    } else {
        Err(Error::domain(x, "[0, 1]"))
    }
}

/// `mu x` for `x <= 1/2`, `mu (1 - x)` otherwise.
pub fn tent_apply(mu: &Mu, x: &Rational) -> Result<Rational> {
    check_closed(x)?;
    Ok(tent(mu, x))
}

/// The folded map: `f(x)` for `x <= 1/2`, `1 - f(x)` otherwise.
/// Satisfies `f^{n+1}(x) = f^n(tent_tilde(x))` for `n >= 1`.
pub fn tent_tilde(mu: &Mu, x: &Rational) -> Result<Rational> {
    check_closed(x)?;
    let fx = tent(mu, x);
    Ok(if *x <= Rational::half() {
        fx
    } else {
        Rational::one() - fx
    })
}

/// `f^n(x)` by `n` exact applications.
pub fn tent_iterate(mu: &Mu, x: &Rational, n: u64) -> Result<Rational> {
    check_closed(x)?;
    let mut y = x.clone();
    for _ in 0..n {
        // 0 is fixed; skip the remaining work once we land there.
        if y.is_zero() {
            break;
        }
        y = tent(mu, &y);
    }
    Ok(y)
}

/// The tent code `gamma^n(x)`.
///
/// `b_1 = [x >= 1/2]`, then with `x_i = f^i(x)`:
///
/// | `b_i` | `x_i`      | `b_{i+1}` |
/// |-------|------------|-----------|
/// | 0     | `< 1/2`    | 0         |
/// | 0     | `>= 1/2`   | 1         |
/// | 1     | `<= 1/2`   | 1         |
/// | 1     | `> 1/2`    | 0         |
pub fn encode(mu: &Mu, x: &Rational, n: usize) -> Result<Code> {
    if !x.in_unit_half_open() {
        return Err(Error::domain(x, "[0, 1)"));
    }
    let half = Rational::half();
    let mut bits = Vec::with_capacity(n);
    if n == 0 {
        return Ok(Code(bits));
    }
    let mut b = *x >= half;
    bits.push(b);
    let mut xi = x.clone();
    for _ in 1..n {
        xi = tent(mu, &xi);
        b = if b { xi <= half } else { xi >= half };
        bits.push(b);
    }
    Ok(Code(bits))
}

/// `(mu - 1) * sum_i b_i mu^{-i}`, the truncated inverse of [`encode`].
/// For `code = encode(x, n)` the error is at most `mu^{-n}`.
pub fn decode_partial(mu: &Mu, code: &Code) -> Rational {
    let inv = mu.value().recip();
    let mut weight = Rational::one();
    let mut acc = Rational::zero();
    for &b in code.bits() {
        weight = &weight * &inv;
        if b {
            acc = acc + &weight;
        }
    }
    (mu.value() - Rational::one()) * acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn mu(s: &str) -> Mu {
        s.parse().unwrap()
    }

    fn q(n: i64, d: i64) -> Rational {
        Rational::frac(n, d)
    }

    #[test]
    fn apply_examples() {
        let m = mu("3/2");
        assert_eq!(tent_apply(&m, &q(0, 1)).unwrap(), q(0, 1));
        assert_eq!(tent_apply(&m, &q(1, 2)).unwrap(), q(3, 4));
        assert_eq!(tent_apply(&m, &q(3, 4)).unwrap(), q(3, 8));
        assert!(tent_apply(&m, &q(3, 2)).is_err());
        assert!(tent_apply(&m, &q(-1, 2)).is_err());
        assert_eq!(tent_apply(&m, &q(1, 1)).unwrap(), q(0, 1));
    }

    #[test]
    fn tilde_examples() {
        let m = mu("3/2");
        assert_eq!(tent_tilde(&m, &q(0, 1)).unwrap(), q(0, 1));
        assert_eq!(tent_tilde(&m, &q(1, 2)).unwrap(), q(3, 4));
        assert_eq!(tent_tilde(&m, &q(3, 4)).unwrap(), q(5, 8));
    }

    #[test]
    fn iterate_examples() {
        let m = mu("3/2");
        assert_eq!(tent_iterate(&m, &q(1, 2), 0).unwrap(), q(1, 2));
        assert_eq!(tent_iterate(&m, &q(1, 2), 2).unwrap(), q(3, 8));
        assert_eq!(tent_iterate(&m, &q(1, 2), 3).unwrap(), q(9, 16));
        assert_eq!(
            tent_iterate(&mu("7/4"), &q(0, 1), 1_000_000).unwrap(),
            q(0, 1)
        );
    }

    #[test]
    fn encode_examples() {
        let m = mu("3/2");
        assert_eq!(encode(&m, &q(0, 1), 5).unwrap().to_string(), "00000");
        assert_eq!(encode(&m, &q(1, 2), 3).unwrap().to_string(), "100");
        for s in ["3/2", "4/3", "7/4", "9/5"] {
            assert_eq!(encode(&mu(s), &q(1, 2), 2).unwrap().to_string(), "10");
        }
        assert!(encode(&m, &q(1, 1), 3).is_err());
    }

    #[test]
    fn decode_examples() {
        let m = mu("3/2");
        assert_eq!(decode_partial(&m, &"00000".parse().unwrap()), q(0, 1));
        assert_eq!(decode_partial(&m, &"10".parse().unwrap()), q(1, 3));
        assert_eq!(decode_partial(&m, &"11".parse().unwrap()), q(5, 9));
    }

    #[test]
    fn code_parse_display() {
        let c: Code = "0110".parse().unwrap();
        assert_eq!(c.to_string(), "0110");
        assert_eq!(c.complement().to_string(), "1001");
        assert_eq!(c.tail().to_string(), "110");
        assert!("01a".parse::<Code>().is_err());
        let all: Vec<String> = Code::all(2).map(|c| c.to_string()).collect();
        assert_eq!(all, ["00", "01", "10", "11"]);
    }

    fn any_mu() -> impl Strategy<Value = Mu> {
        prop_oneof![
            Just("3/2"),
            Just("4/3"),
            Just("7/4"),
            Just("9/5"),
            Just("11/7")
        ]
        .prop_map(|s| s.parse().unwrap())
    }

    /// Rationals in the open unit interval.
    fn open_unit() -> impl Strategy<Value = Rational> {
        (1u32..1 << 20)
            .prop_flat_map(|d| (1..d, Just(d)))
            .prop_map(|(n, d)| Rational::frac(n as i64, d as i64))
    }

    proptest! {
        #[test]
        fn symmetric_about_half(m in any_mu(), x in open_unit(), n in 1u64..=50) {
            let y = Rational::one() - &x;
            prop_assert_eq!(tent_iterate(&m, &x, n).unwrap(), tent_iterate(&m, &y, n).unwrap());
        }

        #[test]
        fn compressing(m in any_mu(), x in open_unit(), n in 1u64..=50) {
            let folded = tent_tilde(&m, &x).unwrap();
            prop_assert_eq!(
                tent_iterate(&m, &x, n + 1).unwrap(),
                tent_iterate(&m, &folded, n).unwrap()
            );
        }

        #[test]
        fn shift_drops_first_bit(m in any_mu(), x in open_unit(), n in 2usize..=30) {
            let code = encode(&m, &x, n).unwrap();
            let folded = tent_tilde(&m, &x).unwrap();
            prop_assert_eq!(code.tail(), encode(&m, &folded, n - 1).unwrap());
        }

        #[test]
        fn lexicographic_monotone(m in any_mu(), a in open_unit(), b in open_unit(), n in 1usize..=30) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(encode(&m, &lo, n).unwrap() <= encode(&m, &hi, n).unwrap());
        }

        #[test]
        fn shared_prefix_orders_images(m in any_mu(), lo in open_unit(), gap in 1i64..1000, n in 1usize..=20) {
            let hi = &lo + Rational::frac(gap, 1 << 32);
            prop_assume!(hi < Rational::one());
            let (cl, ch) = (encode(&m, &lo, n).unwrap(), encode(&m, &hi, n).unwrap());
            if cl != ch {
                return Ok(());
            }
            let (xl, xh) = (
                tent_iterate(&m, &lo, n as u64).unwrap(),
                tent_iterate(&m, &hi, n as u64).unwrap(),
            );
            if cl.last() == Some(false) {
                prop_assert!(xl < xh);
            } else {
                prop_assert!(xl > xh);
            }
        }

        #[test]
        fn reconstruction_bound(m in any_mu(), x in open_unit(), n in 1usize..=40) {
            let code = encode(&m, &x, n).unwrap();
            let err = (&x - decode_partial(&m, &code)).abs();
            prop_assert!(err <= m.value().recip().pow(n as u32));
        }
    }
}
