mod commands;
mod verify;

use std::io;
use std::panic;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use tentcode::Mu;

/// Exact sampling and enumeration of tent-map codes.
#[derive(Parser, Debug)]
#[command(name = "tentcode", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Stream n bits drawn from the code distribution.
    Gen(GenArgs),
    /// List every code of length n with its exact probability.
    Enumerate(EnumerateArgs),
    /// Run the invariant suites and report pass/fail per suite.
    Verify(VerifyArgs),
    /// Histogram of the largest level reached over many seeds.
    Stats(StatsArgs),
    /// Dump the segment table up to a given level.
    Table(TableArgs),
}

#[derive(Args, Debug)]
struct GenArgs {
    /// Slope as an exact fraction c/d with 1 < c/d < 2.
    #[arg(long)]
    mu: Mu,
    #[arg(short, value_parser = clap::value_parser!(u64).range(1..))]
    n: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Emit::Bits)]
    emit: Emit,
    /// Print run statistics to stderr.
    #[arg(long)]
    stats: bool,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Emit {
    Bits,
    Hex,
}

#[derive(Args, Debug)]
struct EnumerateArgs {
    #[arg(long)]
    mu: Mu,
    #[arg(short, value_parser = clap::value_parser!(u64).range(1..))]
    n: u64,
    /// Add a column with the probability computed on the automaton.
    #[arg(long)]
    probs: bool,
    /// Largest n accepted without --force.
    #[arg(long, default_value_t = tentcode::oracle::DEFAULT_ENUMERATION_CAP)]
    max_n: usize,
    #[arg(long)]
    force: bool,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Check a single slope instead of the default set.
    #[arg(long)]
    mu: Option<Mu>,
    /// Largest n for the exhaustive suites.
    #[arg(long, default_value_t = 10)]
    max_n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Swap the successors of one table level before checking.
    #[arg(long, hide = true)]
    inject_fault: bool,
}

#[derive(Args, Debug)]
struct StatsArgs {
    #[arg(long)]
    mu: Mu,
    #[arg(short, value_parser = clap::value_parser!(u64).range(1..))]
    n: u64,
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
    trials: u64,
    /// First seed; trial i uses seed + i.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// One CSV row per trial instead of the histogram.
    #[arg(long)]
    csv: bool,
}

#[derive(Args, Debug)]
struct TableArgs {
    #[arg(long)]
    mu: Mu,
    #[arg(short, value_parser = clap::value_parser!(u64).range(1..))]
    k: u64,
}

pub const EXIT_FAULT: u8 = 1;
pub const EXIT_BAD_INPUT: u8 = 2;
pub const EXIT_CAP: u8 = 3;

fn dispatch(cli: Cli) -> io::Result<u8> {
    let stdout = io::stdout();
    let mut out = io::BufWriter::new(stdout.lock());
    let code = match cli.command {
        Command::Gen(a) => commands::gen(&mut out, &a.mu, a.n, a.seed, a.emit, a.stats)?,
        Command::Enumerate(a) => {
            commands::enumerate(&mut out, &a.mu, a.n as usize, a.probs, a.max_n, a.force)?
        }
        Command::Verify(a) => {
            let mus = match a.mu {
                Some(m) => vec![m],
                None => verify::DEFAULT_MUS
                    .iter()
                    .map(|s| s.parse().expect("valid"))
                    .collect(),
            };
            verify::run(&mut out, &mus, a.max_n, a.seed, a.inject_fault)?
        }
        Command::Stats(a) => commands::stats(&mut out, &a.mu, a.n, a.trials, a.seed, a.csv)?,
        Command::Table(a) => commands::table(&mut out, &a.mu, a.k as usize)?,
    };
    io::Write::flush(&mut out)?;
    Ok(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_BAD_INPUT } else { 0 });
        }
    };
    match panic::catch_unwind(|| dispatch(cli)) {
        Ok(Ok(code)) => ExitCode::from(code),
        // the reader went away (e.g. `| head`); nothing left to do
        Ok(Err(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_FAULT)
        }
        Err(_) => {
            eprintln!("error: internal fault");
            ExitCode::from(EXIT_FAULT)
        }
    }
}
