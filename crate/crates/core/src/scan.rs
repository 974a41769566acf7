//! Census of multi-solution triples over a box of bases, with JSONL / TSV
//! persistence.

use std::collections::BTreeSet;
use std::fs;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};
use std::thread;

use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::arith::{is_perfect_power, nat};
use crate::error::{Error, Result};
use crate::exceptional::{is_exceptional, ExceptionalEntry};
use crate::solver::{enumerate_solutions, ExpSolution, HeightBound, Triple};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanConfig {
    pub a_max: u64,
    pub b_max: u64,
    /// Lower end of the `c` range; lets a census be split into shards.
    pub c_min: u64,
    pub c_max: u64,
    #[serde(rename = "H")]
    pub height: HeightBound,
    pub exclude_perfect_powers: bool,
    pub workers: usize,
}

impl ScanConfig {
    /// Full `c` range, perfect powers excluded, one worker.
    pub fn new(a_max: u64, b_max: u64, c_max: u64, height: HeightBound) -> Self {
        ScanConfig {
            a_max,
            b_max,
            c_min: 2,
            c_max,
            height,
            exclude_perfect_powers: true,
            workers: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.a_max < 2 || self.b_max < 2 || self.c_max < 2 || self.c_min < 2 {
            return Err(Error::invalid("scan bounds must all be >= 2"));
        }
        if self.c_min > self.c_max {
            return Err(Error::invalid(format!(
                "empty c range {}..={}",
                self.c_min, self.c_max
            )));
        }
        if self.workers == 0 {
            return Err(Error::invalid("workers must be >= 1"));
        }
        if *self.height.value() < nat(self.c_max) {
            return Err(Error::invalid(format!(
                "height bound {} is below c_max = {}",
                self.height, self.c_max
            )));
        }
        Ok(())
    }

    fn same_census(&self, other: &ScanConfig) -> bool {
        self.a_max == other.a_max
            && self.b_max == other.b_max
            && self.height == other.height
            && self.exclude_perfect_powers == other.exclude_perfect_powers
    }
}

/// One triple with at least two solutions under the bound.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanRow {
    pub a: u64,
    pub b: u64,
    pub c: u64,
    #[serde(rename = "H")]
    pub height: HeightBound,
    #[serde(rename = "N")]
    pub n: usize,
    pub solutions: Vec<[u64; 3]>,
    pub exceptional: bool,
}

impl ScanRow {
    pub fn new(t: &Triple, height: &HeightBound, solutions: &[ExpSolution]) -> Result<Self> {
        let small = |v: &num_bigint::BigUint| {
            v.to_u64()
                .ok_or_else(|| Error::invalid(format!("base {v} does not fit a JSONL integer")))
        };
        Ok(ScanRow {
            a: small(t.a())?,
            b: small(t.b())?,
            c: small(t.c())?,
            height: height.clone(),
            n: solutions.len(),
            solutions: solutions.iter().map(ExpSolution::as_array).collect(),
            exceptional: is_exceptional(t),
        })
    }

    pub fn from_entry(e: &ExceptionalEntry) -> Result<Self> {
        let h = e
            .height
            .as_ref()
            .ok_or_else(|| Error::invalid("entry has not been verified"))?;
        ScanRow::new(&e.triple, h, &e.witnesses)
    }

    fn key(&self) -> (u64, u64, u64) {
        (self.a, self.b, self.c)
    }

    fn tsv_line(&self) -> String {
        let sols: Vec<String> = self
            .solutions
            .iter()
            .map(|[x, y, z]| format!("{x},{y},{z}"))
            .collect();
        format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}",
            self.a,
            self.b,
            self.c,
            self.height,
            self.n,
            sols.join(";"),
            self.exceptional
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanReport {
    pub rows: Vec<ScanRow>,
    pub config: ScanConfig,
    /// SHA-256 over the canonical JSONL encoding of `rows`.
    pub checksum: String,
}

impl ScanReport {
    fn from_rows(mut rows: Vec<ScanRow>, config: ScanConfig) -> Result<Self> {
        rows.sort_by_key(ScanRow::key);
        let checksum = rows_checksum(&rows)?;
        Ok(ScanReport {
            rows,
            config,
            checksum,
        })
    }
}

pub fn rows_checksum(rows: &[ScanRow]) -> Result<String> {
    let mut hasher = Sha256::new();
    for row in rows {
        hasher.update(serde_json::to_vec(row)?);
        hasher.update(b"\n");
    }
    Ok(hex::encode(hasher.finalize()))
}

fn perfect_power_table(limit: u64) -> Result<Vec<bool>> {
    let mut table = vec![false; limit as usize + 1];
    for v in 2..=limit {
        table[v as usize] = is_perfect_power(&nat(v))?.is_some();
    }
    Ok(table)
}

fn scan_c_values(
    cfg: &ScanConfig,
    cs: &[u64],
    perfect_power: &[bool],
) -> Result<Vec<ScanRow>> {
    let mut rows = Vec::new();
    for &c in cs {
        for a in 2..=cfg.a_max {
            if a.gcd(&c) != 1 {
                continue;
            }
            for b in 2..=cfg.b_max {
                if b.gcd(&a) != 1 || b.gcd(&c) != 1 {
                    continue;
                }
                if cfg.exclude_perfect_powers
                    && [a, b, c].iter().any(|&v| perfect_power[v as usize])
                {
                    continue;
                }
                let t = Triple::from_u64(a, b, c)?;
                let sols = enumerate_solutions(&t, &cfg.height)?;
                if sols.len() >= 2 {
                    rows.push(ScanRow::new(&t, &cfg.height, &sols)?);
                }
            }
        }
    }
    Ok(rows)
}

/// Every pairwise coprime triple in the box with at least two solutions.
///
/// The `c` range is cut into `workers` contiguous chunks, each scanned on
/// its own thread; rows are sorted by `(a, b, c)` afterwards, so the
/// report does not depend on the worker count.
pub fn scan_range(cfg: &ScanConfig) -> Result<ScanReport> {
    cfg.validate()?;
    let limit = cfg.a_max.max(cfg.b_max).max(cfg.c_max);
    let perfect_power = perfect_power_table(limit)?;
    let cs: Vec<u64> = (cfg.c_min..=cfg.c_max).collect();
    let chunk = cs.len().div_ceil(cfg.workers).max(1);

    let parts: Vec<Result<Vec<ScanRow>>> = thread::scope(|s| {
        let handles: Vec<_> = cs
            .chunks(chunk)
            .map(|part| s.spawn(|| scan_c_values(cfg, part, &perfect_power)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("scan worker panicked"))
            .collect()
    });
    let mut rows = Vec::new();
    for part in parts {
        rows.extend(part?);
    }
    ScanReport::from_rows(rows, cfg.clone())
}

/// Union of reports over disjoint, adjacent `c` ranges of the same census.
pub fn merge_reports(parts: &[ScanReport]) -> Result<ScanReport> {
    let first = parts
        .first()
        .ok_or_else(|| Error::Merge("no reports given".into()))?;
    if let Some(p) = parts.iter().find(|p| !p.config.same_census(&first.config)) {
        return Err(Error::Merge(format!(
            "configs differ beyond the c range: {:?} vs {:?}",
            first.config, p.config
        )));
    }
    let mut ordered: Vec<&ScanReport> = parts.iter().collect();
    ordered.sort_by_key(|p| p.config.c_min);
    for w in ordered.windows(2) {
        let (lo, hi) = (&w[0].config, &w[1].config);
        if hi.c_min <= lo.c_max {
            return Err(Error::Merge(format!(
                "overlapping c ranges {}..={} and {}..={}",
                lo.c_min, lo.c_max, hi.c_min, hi.c_max
            )));
        }
        if hi.c_min != lo.c_max + 1 {
            return Err(Error::Merge(format!(
                "gap between c ranges ending at {} and starting at {}",
                lo.c_max, hi.c_min
            )));
        }
    }
    let mut config = first.config.clone();
    config.c_min = ordered[0].config.c_min;
    config.c_max = ordered[ordered.len() - 1].config.c_max;

    let mut seen = BTreeSet::new();
    let rows: Vec<ScanRow> = ordered
        .iter()
        .flat_map(|p| p.rows.iter())
        .filter(|r| seen.insert(r.key()))
        .cloned()
        .collect();
    ScanReport::from_rows(rows, config)
}

// ---------------------------------------------------------------------------
// Findings
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FindingKind {
    /// Multi-solution triple outside the exceptional set although no base
    /// is a perfect power.
    OutsideExceptionalSet,
    /// Odd `c` with more than two solutions.
    OddCAboveTwo,
    /// Even `c` with three or more solutions other than `(3, 5, 2)` and
    /// `(5, 3, 2)`.
    EvenCAboveTwo,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Finding {
    pub a: u64,
    pub b: u64,
    pub c: u64,
    #[serde(rename = "N")]
    pub n: usize,
    pub kind: FindingKind,
}

/// Rows that contradict one of the known counting results.
pub fn census_findings(report: &ScanReport) -> Vec<Finding> {
    let mut out = Vec::new();
    for r in &report.rows {
        let mut push = |kind| {
            out.push(Finding {
                a: r.a,
                b: r.b,
                c: r.c,
                n: r.n,
                kind,
            })
        };
        if report.config.exclude_perfect_powers && !r.exceptional {
            push(FindingKind::OutsideExceptionalSet);
        }
        if r.c % 2 == 1 && r.n > 2 {
            push(FindingKind::OddCAboveTwo);
        }
        if r.c % 2 == 0 && r.n >= 3 && !matches!(r.key(), (3, 5, 2) | (5, 3, 2)) {
            push(FindingKind::EvenCAboveTwo);
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Persistence
// ---------------------------------------------------------------------------

pub const TSV_HEADER: &str = "a\tb\tc\tH\tN\tsolutions\texceptional";

pub fn write_jsonl<W: Write>(rows: &[ScanRow], mut w: W) -> Result<()> {
    for row in rows {
        serde_json::to_writer(&mut w, row)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_jsonl<R: BufRead>(r: R) -> Result<Vec<ScanRow>> {
    let mut rows = Vec::new();
    for line in r.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        rows.push(serde_json::from_str(&line)?);
    }
    Ok(rows)
}

pub fn write_tsv<W: Write>(rows: &[ScanRow], mut w: W) -> Result<()> {
    writeln!(w, "{TSV_HEADER}")?;
    for row in rows {
        writeln!(w, "{}", row.tsv_line())?;
    }
    Ok(())
}

/// Sidecar written next to a persisted report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanMetadata {
    pub config: ScanConfig,
    pub checksum: String,
    pub rows: usize,
    #[serde(default)]
    pub findings: Vec<Finding>,
}

pub fn metadata_path(rows_path: &Path) -> PathBuf {
    let mut name = rows_path.as_os_str().to_owned();
    name.push(".meta.json");
    PathBuf::from(name)
}

/// Writes the rows to `path` as JSONL and the metadata to `<path>.meta.json`.
pub fn save_report(report: &ScanReport, path: &Path) -> Result<()> {
    let mut buf = Vec::new();
    write_jsonl(&report.rows, &mut buf)?;
    fs::write(path, buf)?;
    let meta = ScanMetadata {
        config: report.config.clone(),
        checksum: report.checksum.clone(),
        rows: report.rows.len(),
        findings: census_findings(report),
    };
    fs::write(metadata_path(path), serde_json::to_vec_pretty(&meta)?)?;
    Ok(())
}

/// Reads a saved report back and checks the stored checksum.
pub fn load_report(path: &Path) -> Result<ScanReport> {
    let rows = read_jsonl(std::io::BufReader::new(fs::File::open(path)?))?;
    let meta: ScanMetadata = serde_json::from_slice(&fs::read(metadata_path(path))?)?;
    let checksum = rows_checksum(&rows)?;
    if checksum != meta.checksum {
        return Err(Error::Assertion(format!(
            "checksum mismatch for {}: stored {}, computed {checksum}",
            path.display(),
            meta.checksum
        )));
    }
    Ok(ScanReport {
        rows,
        config: meta.config,
        checksum,
    })
}
