use std::io::{self, Write};

use tentcode::analysis::{k_distribution, space_report};
use tentcode::oracle::enumerate_sections_capped;
use tentcode::{sample_stream, Error, Mu, SegmentTable};

use crate::{Emit, EXIT_BAD_INPUT, EXIT_CAP};

pub fn gen(
    out: &mut impl Write,
    mu: &Mu,
    n: u64,
    seed: u64,
    emit: Emit,
    stats: bool,
) -> io::Result<u8> {
    let mut chain = sample_stream(mu, n, seed);
    match emit {
        Emit::Bits => {
            for bit in chain.by_ref() {
                out.write_all(if bit { b"1" } else { b"0" })?;
            }
        }
        Emit::Hex => {
            // b_1 is the most significant bit of the first byte
            let (mut byte, mut filled) = (0u8, 0);
            for bit in chain.by_ref() {
                byte = (byte << 1) | bit as u8;
                filled += 1;
                if filled == 8 {
                    write!(out, "{byte:02x}")?;
                    (byte, filled) = (0, 0);
                }
            }
            if filled > 0 {
                write!(out, "{:02x}", byte << (8 - filled))?;
            }
        }
    }
    writeln!(out)?;
    if stats {
        eprint!("{}", chain.stats().to_kv_lines());
    }
    Ok(0)
}

pub fn enumerate(
    out: &mut impl Write,
    mu: &Mu,
    n: usize,
    probs: bool,
    max_n: usize,
    force: bool,
) -> io::Result<u8> {
    let cap = if force { n.max(max_n) } else { max_n };
    let sections = match enumerate_sections_capped(mu, n, cap) {
        Ok(s) => s,
        Err(e @ Error::CapExceeded { .. }) => {
            eprintln!("error: {e}; pass --force to run anyway");
            return Ok(EXIT_CAP);
        }
        Err(e) => {
            eprintln!("error: {e}");
            return Ok(EXIT_BAD_INPUT);
        }
    };
    let mut table = SegmentTable::new(mu);
    for s in sections {
        write!(out, "{}\t{}\t{}\t{}", s.code, s.lo, s.hi, s.length())?;
        if probs {
            write!(out, "\t{}", table.code_probability(&s.code))?;
        }
        writeln!(out)?;
    }
    Ok(0)
}

pub fn stats(
    out: &mut impl Write,
    mu: &Mu,
    n: u64,
    trials: u64,
    seed0: u64,
    csv: bool,
) -> io::Result<u8> {
    let hist = k_distribution(mu, n, trials, seed0);
    if csv {
        out.write_all(hist.to_csv().as_bytes())?;
    } else {
        out.write_all(hist.to_kv().as_bytes())?;
        writeln!(out, "max_table_bits={}", hist.max_table_bits())?;
    }
    Ok(0)
}

pub fn table(out: &mut impl Write, mu: &Mu, k: usize) -> io::Result<u8> {
    let mut table = SegmentTable::new(mu);
    table.materialize_to(k);
    write!(out, "{table}")?;
    eprint!("{}", space_report(&table).to_kv());
    Ok(0)
}
