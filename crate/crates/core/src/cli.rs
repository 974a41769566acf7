//! Command-line front end. [`run`] takes the argument vector and returns the
//! process exit code: 0 on success, 1 when a verification fails, 2 for bad
//! arguments.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::arith::Nat;
use crate::error::{Error, Result};
use crate::exceptional::{default_height, exceptional_set_with, HeightPolicy};
use crate::scan::{self, census_findings, ScanConfig, ScanMetadata, ScanRow};
use crate::serde_dec;
use crate::solver::{enumerate_solutions, HeightBound, Triple};
use crate::system::{brute_force_system, theorem_certificate, CertifyOptions};

#[derive(Parser, Debug)]
#[command(name = "expdioph", version, about = "Solutions of a^x + b^y = c^z and the a^2+b=c^z, a+b^2=c^Z system")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List every solution (x, y, z) with c^z <= H.
    Solve(SolveArgs),
    /// Count solutions with c^z <= H.
    Count(SolveArgs),
    /// Census of multi-solution triples over a box of bases.
    Scan(ScanArgs),
    /// Verify the exceptional set.
    Exceptional(ExceptionalArgs),
    /// Direct search for a^2 + b = c^z, a + b^2 = c^Z with fixed c.
    System(SystemArgs),
    /// Replay the case analysis for the system and cross-check it.
    Certify(CertifyArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Jsonl,
    Tsv,
}

#[derive(Args, Debug)]
struct Output {
    #[arg(long, value_enum, default_value_t = Format::Jsonl)]
    format: Format,
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[arg(long, value_parser = parse_nat)]
    a: Nat,
    #[arg(long, value_parser = parse_nat)]
    b: Nat,
    #[arg(long, value_parser = parse_nat)]
    c: Nat,
    /// Bound on c^z: a decimal value, `B^K`, or `auto` for max(c^3, 10^8).
    #[arg(long, default_value = "auto")]
    height: String,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct ScanArgs {
    #[arg(long)]
    a_max: u64,
    #[arg(long)]
    b_max: u64,
    #[arg(long)]
    c_max: u64,
    #[arg(long, default_value = "2")]
    c_min: u64,
    #[arg(long)]
    height: String,
    /// Keep triples where a base is a perfect power.
    #[arg(long)]
    allow_perfect_powers: bool,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct ExceptionalArgs {
    #[arg(long)]
    r_max: u32,
    /// `auto` starts at max(c^3, 10^8) per triple and doubles as needed.
    #[arg(long, default_value = "auto")]
    height: String,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct SystemArgs {
    #[arg(long)]
    c: u64,
    #[arg(long, default_value_t = 10_000)]
    a_max: u64,
    #[arg(long, default_value_t = 40)]
    z_max: u32,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct CertifyArgs {
    #[arg(long, default_value_t = 10_000)]
    r_scan: u64,
    #[arg(long, default_value_t = 200)]
    oracle_c_max: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_nat(s: &str) -> std::result::Result<Nat, String> {
    s.trim()
        .parse::<Nat>()
        .map_err(|e| format!("not a nonnegative integer: {s:?} ({e})"))
}

/// Parses `auto`, a decimal integer, or `B^K`. `auto` yields `None`.
pub fn parse_height(s: &str) -> Result<Option<HeightBound>> {
    let s = s.trim();
    if s.eq_ignore_ascii_case("auto") {
        return Ok(None);
    }
    let value = match s.split_once('^') {
        Some((base, exp)) => {
            let base = parse_nat(base).map_err(Error::InvalidInput)?;
            let exp: u32 = exp
                .trim()
                .parse()
                .map_err(|e| Error::invalid(format!("bad exponent in {s:?}: {e}")))?;
            base.pow(exp)
        }
        None => parse_nat(s).map_err(Error::InvalidInput)?,
    };
    HeightBound::new(value).map(Some)
}

#[derive(Serialize)]
struct SolutionRow<'a> {
    #[serde(with = "serde_dec")]
    a: &'a Nat,
    #[serde(with = "serde_dec")]
    b: &'a Nat,
    #[serde(with = "serde_dec")]
    c: &'a Nat,
    x: u64,
    y: u64,
    z: u64,
    /// The common value c^z.
    #[serde(with = "serde_dec")]
    value: Nat,
}

#[derive(Serialize)]
struct CountRow<'a> {
    #[serde(with = "serde_dec")]
    a: &'a Nat,
    #[serde(with = "serde_dec")]
    b: &'a Nat,
    #[serde(with = "serde_dec")]
    c: &'a Nat,
    #[serde(rename = "H")]
    height: &'a HeightBound,
    #[serde(rename = "N")]
    n: usize,
}

struct Sink<'a> {
    out: Option<PathBuf>,
    buf: Vec<u8>,
    stdout: &'a mut dyn Write,
}

impl<'a> Sink<'a> {
    fn new(out: Option<PathBuf>, stdout: &'a mut dyn Write) -> Self {
        Sink {
            out,
            buf: Vec::new(),
            stdout,
        }
    }

    fn json_line<T: Serialize>(&mut self, v: &T) -> Result<()> {
        serde_json::to_writer(&mut self.buf, v)?;
        self.buf.push(b'\n');
        Ok(())
    }

    fn line(&mut self, s: &str) {
        self.buf.extend_from_slice(s.as_bytes());
        self.buf.push(b'\n');
    }

    fn finish(self) -> Result<()> {
        match self.out {
            Some(path) => fs::write(path, &self.buf)?,
            None => self.stdout.write_all(&self.buf)?,
        }
        Ok(())
    }
}

/// Parses `argv` (program name first) and runs the command.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            if code == 0 {
                let _ = stdout.write_all(text.as_bytes());
            } else {
                let _ = writeln!(stderr, "{}", text.lines().next().unwrap_or("usage error"));
            }
            return code;
        }
    };
    match dispatch(cli.command, stdout, stderr) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cmd: Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    match cmd {
        Command::Solve(args) => {
            let (t, h) = solve_inputs(&args)?;
            let sols = enumerate_solutions(&t, &h)?;
            let mut sink = Sink::new(args.output.out, stdout);
            if args.output.format == Format::Tsv {
                sink.line("a\tb\tc\tx\ty\tz\tvalue");
            }
            for s in sols {
                let value = t.c().pow(u32::try_from(s.z).expect("exponent bounded by H"));
                match args.output.format {
                    Format::Jsonl => sink.json_line(&SolutionRow {
                        a: t.a(),
                        b: t.b(),
                        c: t.c(),
                        x: s.x,
                        y: s.y,
                        z: s.z,
                        value,
                    })?,
                    Format::Tsv => sink.line(&format!(
                        "{}\t{}\t{}\t{}\t{}\t{}\t{}",
                        t.a(),
                        t.b(),
                        t.c(),
                        s.x,
                        s.y,
                        s.z,
                        value
                    )),
                }
            }
            sink.finish()
        }
        Command::Count(args) => {
            let (t, h) = solve_inputs(&args)?;
            let n = enumerate_solutions(&t, &h)?.len();
            let mut sink = Sink::new(args.output.out, stdout);
            match args.output.format {
                Format::Jsonl => sink.json_line(&CountRow {
                    a: t.a(),
                    b: t.b(),
                    c: t.c(),
                    height: &h,
                    n,
                })?,
                Format::Tsv => {
                    sink.line("a\tb\tc\tH\tN");
                    sink.line(&format!("{}\t{}\t{}\t{}\t{}", t.a(), t.b(), t.c(), h, n));
                }
            }
            sink.finish()
        }
        Command::Scan(args) => {
            let height = parse_height(&args.height)?
                .ok_or_else(|| Error::invalid("scan needs an explicit --height"))?;
            let cfg = ScanConfig {
                a_max: args.a_max,
                b_max: args.b_max,
                c_min: args.c_min,
                c_max: args.c_max,
                height,
                exclude_perfect_powers: !args.allow_perfect_powers,
                workers: args.workers,
            };
            let report = scan::scan_range(&cfg)?;
            let findings = census_findings(&report);
            for f in &findings {
                writeln!(stderr, "finding: {}", serde_json::to_string(f)?)?;
            }
            let meta = ScanMetadata {
                config: report.config.clone(),
                checksum: report.checksum.clone(),
                rows: report.rows.len(),
                findings,
            };
            let out = args.output.out.clone();
            let mut sink = Sink::new(args.output.out, stdout);
            write_rows(&mut sink, &report.rows, args.output.format)?;
            sink.finish()?;
            if let Some(path) = out {
                fs::write(
                    scan::metadata_path(&path),
                    serde_json::to_vec_pretty(&meta)?,
                )?;
            }
            Ok(())
        }
        Command::Exceptional(args) => {
            let policy = match parse_height(&args.height)? {
                None => HeightPolicy::default(),
                Some(h) => HeightPolicy::Fixed(h),
            };
            let entries = exceptional_set_with(args.r_max, &policy)?;
            let rows = entries
                .iter()
                .map(ScanRow::from_entry)
                .collect::<Result<Vec<_>>>()?;
            let mut sink = Sink::new(args.output.out, stdout);
            write_rows(&mut sink, &rows, args.output.format)?;
            sink.finish()
        }
        Command::System(args) => {
            let sols = brute_force_system(args.c, args.a_max, args.z_max)?;
            let mut sink = Sink::new(args.output.out, stdout);
            match args.output.format {
                Format::Jsonl => {
                    for s in &sols {
                        sink.json_line(s)?;
                    }
                }
                Format::Tsv => {
                    sink.line("a\tb\tc\tz\tZ");
                    for s in &sols {
                        sink.line(&format!("{}\t{}\t{}\t{}\t{}", s.a, s.b, s.c, s.z, s.big_z));
                    }
                }
            }
            sink.finish()
        }
        Command::Certify(args) => {
            let opts = CertifyOptions {
                r_scan: args.r_scan,
                oracle_c_max: args.oracle_c_max,
                ..CertifyOptions::default()
            };
            let cert = theorem_certificate(&opts)?;
            let mut sink = Sink::new(args.out, stdout);
            sink.json_line(&cert)?;
            sink.finish()
        }
    }
}

fn solve_inputs(args: &SolveArgs) -> Result<(Triple, HeightBound)> {
    let t = Triple::new(args.a.clone(), args.b.clone(), args.c.clone())?;
    let h = match parse_height(&args.height)? {
        Some(h) => h,
        None => default_height(&t),
    };
    Ok((t, h))
}

fn write_rows(sink: &mut Sink<'_>, rows: &[ScanRow], format: Format) -> Result<()> {
    match format {
        Format::Jsonl => scan::write_jsonl(rows, &mut sink.buf),
        Format::Tsv => scan::write_tsv(rows, &mut sink.buf),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::nat;

    #[test]
    fn height_forms() {
        assert_eq!(parse_height("auto").unwrap(), None);
        assert_eq!(
            parse_height("1048576").unwrap(),
            Some(HeightBound::from_u64(1 << 20).unwrap())
        );
        assert_eq!(
            parse_height("2^60").unwrap().unwrap().value(),
            &(nat(1) << 60u32)
        );
        assert_eq!(
            parse_height(" 8283^2 ").unwrap().unwrap().value(),
            &nat(8283 * 8283)
        );
        assert!(parse_height("1").is_err());
        assert!(parse_height("2^x").is_err());
        assert!(parse_height("ten").is_err());
    }
}
