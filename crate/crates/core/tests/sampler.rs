use std::collections::BTreeMap;

use statrs::distribution::{ChiSquared, ContinuousCDF};
use tentcode::analysis::space_report;
use tentcode::{
    exact_distribution, sample_code, sample_stream, AutomatonState, Code, Mu, Rational,
    SegmentTable, Successor,
};

fn mu(s: &str) -> Mu {
    s.parse().unwrap()
}

/// Pearson statistic with bins of expected count below 5 pooled together.
fn chi_square(
    observed: &BTreeMap<Code, u64>,
    exact: &BTreeMap<Code, Rational>,
    total: u64,
) -> (f64, usize) {
    let (mut stat, mut bins) = (0.0, 0);
    let (mut pooled_obs, mut pooled_exp) = (0.0, 0.0);
    for (code, p) in exact {
        let e = p.to_f64() * total as f64;
        let o = *observed.get(code).unwrap_or(&0) as f64;
        if e < 5.0 {
            pooled_obs += o;
            pooled_exp += e;
        } else {
            stat += (o - e) * (o - e) / e;
            bins += 1;
        }
    }
    if pooled_exp > 0.0 {
        stat += (pooled_obs - pooled_exp) * (pooled_obs - pooled_exp) / pooled_exp;
        bins += 1;
    }
    (stat, bins - 1)
}

#[test]
fn deterministic_per_seed() {
    for m in ["3/2", "7/4"] {
        let a = sample_code(&mu(m), 2000, 42);
        let b = sample_code(&mu(m), 2000, 42);
        assert_eq!(a, b);
        assert_ne!(a.0, sample_code(&mu(m), 2000, 43).0);
    }
}

#[test]
fn length_one_reaches_level_one() {
    for seed in 0..50 {
        let (code, stats) = sample_code(&mu("3/2"), 1, seed);
        assert_eq!(code.len(), 1);
        assert_eq!(stats.max_level, 1);
        assert_eq!(stats.steps, 1);
    }
}

#[test]
fn first_bit_is_fair() {
    let trials = 20_000u64;
    let ones = (0..trials)
        .filter(|&s| sample_stream(&mu("3/2"), 1, s).next().unwrap())
        .count() as f64;
    let sd = (0.25 / trials as f64).sqrt();
    assert!((ones / trials as f64 - 0.5).abs() < 4.0 * sd);
}

#[test]
fn emitted_codes_are_accepted() {
    for m in ["3/2", "4/3", "7/4", "9/5", "11/7"] {
        let m = mu(m);
        let mut table = SegmentTable::new(&m);
        for seed in 0..40 {
            let (code, stats) = sample_code(&m, 500, seed);
            assert_eq!(code.len(), 500);
            assert!(table.recognize(&code), "mu={m} seed={seed}");
            assert!(stats.max_level <= 500);
        }
    }
}

#[test]
fn level_stays_within_frontier() {
    let mut chain = sample_stream(&mu("9/5"), 3000, 5);
    let mut max = 0;
    while chain.next().is_some() {
        assert!(chain.level() <= chain.table().frontier());
        max = max.max(chain.level());
    }
    let stats = chain.stats();
    assert_eq!(stats.max_level, max);
    assert!(stats.max_level <= chain.table().frontier());
    assert_eq!(stats.steps, 3000);
}

#[test]
fn forced_steps_have_certain_probability() {
    for m in ["3/2", "4/3", "7/4", "9/5"] {
        let mut t = SegmentTable::new(&mu(m));
        t.materialize_to(100);
        for k in 1..=100 {
            let d = t.delta(k);
            let p = t.zero_probability(k);
            match d {
                [Successor::Reject, _] => assert_eq!(p, Rational::zero()),
                [_, Successor::Reject] => assert_eq!(p, Rational::one()),
                _ => assert!(p > Rational::zero() && p < Rational::one()),
            }
        }
    }
}

#[test]
fn chain_state_tracks_orientation() {
    let m = mu("7/4");
    let mut t = SegmentTable::new(&m);
    let mut chain = sample_stream(&m, 400, 9);
    let mut state = AutomatonState::INITIAL;
    while let Some(bit) = chain.next() {
        state = t.step(state, bit);
        assert_eq!(state, chain.state());
    }
}

#[test]
fn small_n_distribution() {
    // chi-square at 1e-4 over 4e4 draws, n = 6
    for m in ["3/2", "4/3", "9/5"] {
        let m = mu(m);
        let n = 6;
        let total = 40_000u64;
        let exact = exact_distribution(&m, n).unwrap();
        let mut observed: BTreeMap<Code, u64> = BTreeMap::new();
        for seed in 0..total {
            let (code, _) = sample_code(&m, n as u64, seed);
            assert!(exact.contains_key(&code), "mu={m} produced {code}");
            *observed.entry(code).or_default() += 1;
        }
        let (stat, df) = chi_square(&observed, &exact, total);
        let critical = ChiSquared::new(df as f64).unwrap().inverse_cdf(1.0 - 1e-4);
        assert!(
            stat <= critical,
            "mu={m}: chi2={stat:.2} > {critical:.2} (df={df})"
        );
    }
}

#[test]
fn table_bits_fit_quadratic_shape() {
    for m in ["3/2", "9/5", "13/8"] {
        let m = mu(m);
        for seed in 0..20 {
            let mut chain = sample_stream(&m, 5000, seed);
            while chain.next().is_some() {}
            let report = space_report(chain.table());
            assert!(report.guard_holds(), "mu={m} seed={seed}: {report:?}");
            assert_eq!(report.table_bits, chain.stats().table_bits);
        }
    }
}
