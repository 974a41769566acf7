use expdioph::exceptional::{exceptional_set, is_exceptional};
use expdioph::scan::*;
use expdioph::solver::{HeightBound, Triple};
use expdioph::Error;

fn cfg(a: u64, b: u64, c: u64, h: u64) -> ScanConfig {
    ScanConfig::new(a, b, c, HeightBound::from_u64(h).unwrap())
}

fn keys(r: &ScanReport) -> Vec<(u64, u64, u64)> {
    r.rows.iter().map(|r| (r.a, r.b, r.c)).collect()
}

#[test]
fn census_to_five() {
    let report = scan_range(&cfg(5, 5, 5, 1_000_000)).unwrap();
    assert_eq!(
        keys(&report),
        vec![(2, 3, 5), (2, 5, 3), (3, 2, 5), (3, 5, 2), (5, 2, 3), (5, 3, 2)]
    );
    assert!(report.rows.iter().all(|r| r.exceptional));
    let row = &report.rows[3];
    assert_eq!(row.n, 3);
    assert_eq!(row.solutions, vec![[1, 1, 3], [3, 1, 5], [1, 3, 7]]);
}

#[test]
fn census_to_thirteen_stays_in_exceptional_set() {
    let report = scan_range(&cfg(13, 13, 13, 1_000_000_000)).unwrap();
    for k in [(3, 5, 2), (2, 5, 3), (2, 7, 3), (2, 3, 11), (3, 13, 2), (2, 3, 5), (3, 10, 13)] {
        assert!(keys(&report).contains(&k), "{k:?}");
    }
    assert!(report.rows.iter().all(|r| r.exceptional));
    assert!(census_findings(&report).is_empty());
}

#[test]
fn perfect_powers_can_be_kept() {
    let mut c = cfg(10, 10, 10, 1_000_000);
    let strict = scan_range(&c).unwrap();
    c.exclude_perfect_powers = false;
    let loose = scan_range(&c).unwrap();
    for k in keys(&strict) {
        assert!(keys(&loose).contains(&k));
    }
    // (2, 7, 9) is the r = 3 family member, excluded only because 9 = 3^2
    let extra: Vec<_> = loose
        .rows
        .iter()
        .filter(|r| !r.exceptional)
        .map(|r| (r.a, r.b, r.c))
        .collect();
    assert_eq!(extra, vec![(2, 7, 9), (7, 2, 9)]);
    assert!(census_findings(&loose)
        .iter()
        .all(|f| f.kind != FindingKind::OutsideExceptionalSet));
}

#[test]
fn checksum_independent_of_workers() {
    let mut c = cfg(13, 13, 13, 1_000_000_000);
    let one = scan_range(&c).unwrap();
    c.workers = 8;
    let eight = scan_range(&c).unwrap();
    c.workers = 3;
    let three = scan_range(&c).unwrap();
    assert_eq!(one.checksum, eight.checksum);
    assert_eq!(one.checksum, three.checksum);
    assert_eq!(one.rows, eight.rows);
}

#[test]
fn merge_halves() {
    let whole = scan_range(&cfg(13, 13, 13, 1_000_000_000)).unwrap();
    let mut lo = cfg(13, 13, 6, 1_000_000_000);
    lo.c_min = 2;
    let mut hi = cfg(13, 13, 13, 1_000_000_000);
    hi.c_min = 7;
    let lo = scan_range(&lo).unwrap();
    let hi = scan_range(&hi).unwrap();
    let merged = merge_reports(&[hi.clone(), lo.clone()]).unwrap();
    assert_eq!(merged.rows, whole.rows);
    assert_eq!(merged.checksum, whole.checksum);
    assert_eq!((merged.config.c_min, merged.config.c_max), (2, 13));

    assert!(matches!(merge_reports(&[]), Err(Error::Merge(_))));
    assert!(matches!(merge_reports(&[whole.clone(), hi.clone()]), Err(Error::Merge(_))));
    let mut far = cfg(13, 13, 13, 1_000_000_000);
    far.c_min = 9;
    let far = scan_range(&far).unwrap();
    assert!(matches!(merge_reports(&[lo.clone(), far]), Err(Error::Merge(_))));
    let other = scan_range(&cfg(12, 13, 13, 1_000_000_000)).unwrap();
    assert!(merge_reports(&[lo, other]).is_err());
}

#[test]
fn rejects_bad_config() {
    assert!(scan_range(&cfg(1, 5, 5, 100)).is_err());
    assert!(scan_range(&cfg(5, 5, 500, 100)).is_err());
    let mut c = cfg(5, 5, 5, 100);
    c.workers = 0;
    assert!(scan_range(&c).is_err());
}

#[test]
fn jsonl_schema_and_round_trip() {
    let report = scan_range(&cfg(5, 5, 5, 1_000_000)).unwrap();
    let mut buf = Vec::new();
    write_jsonl(&report.rows, &mut buf).unwrap();
    let text = String::from_utf8(buf.clone()).unwrap();
    let first = text.lines().next().unwrap();
    assert_eq!(
        first,
        r#"{"a":2,"b":3,"c":5,"H":"1000000","N":2,"solutions":[[1,1,1],[4,2,2]],"exceptional":true}"#
    );
    let back = read_jsonl(buf.as_slice()).unwrap();
    assert_eq!(back, report.rows);
    assert_eq!(rows_checksum(&back).unwrap(), report.checksum);
}

#[test]
fn tsv_export() {
    let report = scan_range(&cfg(5, 5, 5, 1_000_000)).unwrap();
    let mut buf = Vec::new();
    write_tsv(&report.rows, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(TSV_HEADER));
    assert_eq!(lines.next(), Some("2\t3\t5\t1000000\t2\t1,1,1;4,2,2\ttrue"));
    assert_eq!(lines.count(), 5);
}

#[test]
fn save_and_load_with_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("census.jsonl");
    let report = scan_range(&cfg(7, 7, 7, 1_000_000)).unwrap();
    save_report(&report, &path).unwrap();
    assert!(metadata_path(&path).exists());
    let back = load_report(&path).unwrap();
    assert_eq!(back, report);

    std::fs::write(&path, "").unwrap();
    assert!(matches!(load_report(&path), Err(Error::Assertion(_))));
}

#[test]
fn exceptional_entries_share_the_row_schema() {
    let entries = exceptional_set(4).unwrap();
    for e in &entries {
        let row = ScanRow::from_entry(e).unwrap();
        assert!(row.exceptional);
        assert!(row.n >= 2);
        let t = Triple::from_u64(row.a, row.b, row.c).unwrap();
        assert!(is_exceptional(&t));
    }
}

#[test]
fn findings_flag_rule_breakers() {
    let h = HeightBound::from_u64(1000).unwrap();
    let row = |a, b, c, n| ScanRow {
        a,
        b,
        c,
        height: h.clone(),
        n,
        solutions: vec![],
        exceptional: false,
    };
    let report = ScanReport {
        rows: vec![row(3, 5, 2, 3), row(7, 11, 3, 3), row(7, 11, 4, 3)],
        config: cfg(13, 13, 13, 1000),
        checksum: String::new(),
    };
    let kinds: Vec<_> = census_findings(&report)
        .into_iter()
        .map(|f| ((f.a, f.b, f.c), f.kind))
        .collect();
    assert!(kinds.contains(&((7, 11, 3), FindingKind::OddCAboveTwo)));
    assert!(kinds.contains(&((7, 11, 4), FindingKind::EvenCAboveTwo)));
    assert!(!kinds.contains(&((3, 5, 2), FindingKind::EvenCAboveTwo)));
    assert!(kinds.contains(&((3, 5, 2), FindingKind::OutsideExceptionalSet)));
}
