//! Invariant suites behind `tentcode verify`.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{self, Write};
use std::panic::{self, AssertUnwindSafe};

use tentcode::analysis::{audit_unchecked, returns_to_half, AuditOutcome};
use tentcode::{
    decode_partial, encode, enumerate_sections, sample_code, BitSource, Code, Mu, Rational,
    SegmentTable, Successor,
};

use crate::EXIT_FAULT;

pub const DEFAULT_MUS: [&str; 4] = ["3/2", "4/3", "7/4", "9/5"];

type Check = fn(&Ctx) -> Result<(), String>;

const SUITES: [(&str, Check); 6] = [
    ("language", language),
    ("distribution", distribution),
    ("structure", structure),
    ("level-jump", level_jump),
    ("reconstruction", reconstruction),
    ("sampler", sampler),
];

struct Ctx {
    mu: Mu,
    max_n: usize,
    seed: u64,
    fault: bool,
}

impl Ctx {
    fn table(&self) -> SegmentTable {
        let mut t = SegmentTable::new(&self.mu);
        if self.fault {
            t.corrupt_level(2);
        }
        t
    }
}

pub fn run(
    out: &mut impl Write,
    mus: &[Mu],
    max_n: usize,
    seed: u64,
    fault: bool,
) -> io::Result<u8> {
    let mut failed = Vec::new();
    for mu in mus {
        let ctx = Ctx {
            mu: mu.clone(),
            max_n,
            seed,
            fault,
        };
        for (name, check) in SUITES {
            let result = panic::catch_unwind(AssertUnwindSafe(|| check(&ctx)))
                .unwrap_or_else(|_| Err("panicked".to_string()));
            match result {
                Ok(()) => writeln!(out, "suite={name} mu={mu} result=pass")?,
                Err(why) => {
                    writeln!(out, "suite={name} mu={mu} result=fail detail={why}")?;
                    failed.push(format!("{name}@{mu}"));
                }
            }
        }
    }
    if failed.is_empty() {
        writeln!(out, "all suites passed")?;
        Ok(0)
    } else {
        writeln!(out, "failed: {}", failed.join(" "))?;
        Ok(EXIT_FAULT)
    }
}

fn ensure(cond: bool, why: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(why())
    }
}

fn sections(ctx: &Ctx, n: usize) -> Result<BTreeMap<Code, Rational>, String> {
    Ok(enumerate_sections(&ctx.mu, n)
        .map_err(|e| e.to_string())?
        .into_iter()
        .map(|s| {
            let len = s.length();
            (s.code, len)
        })
        .collect())
}

fn language(ctx: &Ctx) -> Result<(), String> {
    let mut t = ctx.table();
    for n in 1..=ctx.max_n {
        let oracle = sections(ctx, n)?;
        let accepted: BTreeSet<Code> = Code::all(n).filter(|c| t.recognize(c)).collect();
        let expected: BTreeSet<Code> = oracle.into_keys().collect();
        ensure(accepted == expected, || {
            format!("code sets differ at n={n}")
        })?;
        let count = t.count_codes(n);
        ensure(count == expected.len().into(), || {
            format!("count {count} at n={n}")
        })?;
    }
    Ok(())
}

fn distribution(ctx: &Ctx) -> Result<(), String> {
    let mut t = ctx.table();
    for n in 1..=ctx.max_n {
        let oracle = sections(ctx, n)?;
        let mut total = Rational::zero();
        for c in Code::all(n) {
            let p = t.code_probability(&c);
            let want = oracle.get(&c).cloned().unwrap_or_else(Rational::zero);
            ensure(p == want, || {
                format!("code {c}: chain {p} vs section {want}")
            })?;
            total = total + p;
        }
        ensure(total == Rational::one(), || {
            format!("total {total} at n={n}")
        })?;
    }
    Ok(())
}

fn structure(ctx: &Ctx) -> Result<(), String> {
    let frontier = 20 * ctx.max_n.max(1);
    let mut t = ctx.table();
    t.materialize_to(frontier);
    t.ensure_expanded(frontier);
    ensure(t.frontier() <= frontier + 1, || {
        format!("frontier {}", t.frontier())
    })?;
    let mu = t.mu().value().clone();
    let d = num_bigint::BigUint::from(t.mu().d());
    for k in 1..=frontier {
        let delta = t.delta(k);
        if let [Successor::Level(a), Successor::Level(b)] = delta {
            let sum = t.level(a).length() + t.level(b).length();
            ensure(sum == &mu * t.level(k).length(), || {
                format!("sum rule at level {k}")
            })?;
        }
        if k < 2 {
            continue;
        }
        let rec = t.level(k);
        let floor = Rational::new(1, 2u32 * d.pow(k as u32)).expect("nonzero");
        ensure(rec.length() >= floor, || {
            format!("level {k} shorter than 1/(2d^k)")
        })?;
        let theta = rec
            .theta
            .ok_or_else(|| format!("theta missing at level {k}"))?;
        ensure(rec.c != t.level(theta).c, || format!("c law at level {k}"))?;
        if rec.out_degree() == Some(2) {
            ensure(2 * theta <= k, || {
                format!("theta {theta} > k/2 at level {k}")
            })?;
            ensure(delta[1] == Successor::Level(theta + 1), || {
                format!("branch of level {k} is {} not {}", delta[1], theta + 1)
            })?;
        }
    }
    Ok(())
}

fn level_jump(ctx: &Ctx) -> Result<(), String> {
    let n = 1000;
    if returns_to_half(&ctx.mu, n).is_some() {
        // the law is only claimed when 1/2 never returns to itself
        return Ok(());
    }
    for seed in ctx.seed..ctx.seed + 20 {
        if let AuditOutcome::Failed { step, from, to } = audit_unchecked(&ctx.mu, n, seed) {
            return Err(format!("seed {seed} step {step}: {from:?} -> {to:?}"));
        }
    }
    Ok(())
}

fn reconstruction(ctx: &Ctx) -> Result<(), String> {
    let n = 30;
    let bound = ctx.mu.value().recip().pow(n as u32);
    let mut bits = BitSource::new(ctx.seed);
    let mut draw = |width: u32| (0..width).fold(0i64, |acc, _| (acc << 1) | bits.next_bit() as i64);
    for _ in 0..200 {
        let den = draw(31) + 1;
        let x = Rational::frac(draw(31) % den, den);
        let code = encode(&ctx.mu, &x, n).map_err(|e| e.to_string())?;
        let err = (&x - decode_partial(&ctx.mu, &code)).abs();
        ensure(err <= bound, || format!("x={x}: error {err}"))?;
    }
    Ok(())
}

fn sampler(ctx: &Ctx) -> Result<(), String> {
    let mut t = ctx.table();
    let n = 50 * ctx.max_n.max(1) as u64;
    for seed in ctx.seed..ctx.seed + 20 {
        let (code, stats) = sample_code(&ctx.mu, n, seed);
        ensure(t.recognize(&code), || {
            format!("seed {seed}: emitted code rejected")
        })?;
        ensure(stats.max_level as u64 <= n, || {
            format!("seed {seed}: K > n")
        })?;
    }
    Ok(())
}
