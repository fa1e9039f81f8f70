use std::io::Write as _;
use std::path::PathBuf;

use msd_cli::{emit, load_config, parse_csv, run, CsvRow, Format};
use msd_core::factory::{simulate_factory, FactoryReport};
use msd_core::reference::{TABLE1, TABLE2};

fn msd(args: &[&str]) -> (u8, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("msd").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn repo_file(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..").join(name)
}

fn close(a: f64, b: f64) -> bool {
    a == b || ((a - b) / b).abs() <= 1e-12
}

fn level1_reports() -> Vec<FactoryReport> {
    TABLE1
        .iter()
        .filter(|r| r.level2.is_none())
        .map(|r| simulate_factory(&r.config().unwrap()).unwrap())
        .collect()
}

#[test]
fn csv_round_trips() {
    let reports = level1_reports();
    let mut buf = Vec::new();
    emit(&reports, Format::Csv, &mut buf).unwrap();
    let rows = parse_csv(std::str::from_utf8(&buf).unwrap()).unwrap();
    assert_eq!(rows.len(), reports.len());
    for (row, rep) in rows.iter().zip(&reports) {
        let want = CsvRow::from(rep);
        assert_eq!(row.protocol, want.protocol);
        assert_eq!(row.qubits, want.qubits);
        assert_eq!(row.d_full_100, want.d_full_100);
        assert_eq!(row.d_full_10k, want.d_full_10k);
        for (a, b) in [
            (row.p_phys, want.p_phys),
            (row.p_out, want.p_out),
            (row.cycles, want.cycles),
            (row.qubitcycles_per_state, want.qubitcycles_per_state),
            (row.cost_d3_100.unwrap(), want.cost_d3_100.unwrap()),
            (row.cost_d3_10k.unwrap(), want.cost_d3_10k.unwrap()),
        ] {
            assert!(close(a, b), "{a} vs {b}");
        }
    }
}

#[test]
fn one_report_is_one_ten_field_row() {
    let (code, out, _) = msd(&[
        "factory", "--family", "l1_15to1", "--d", "7,3,3", "--pphys", "1e-4", "--format", "csv",
    ]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(
        lines[0],
        "protocol,p_phys,p_out,qubits,cycles,qubitcycles_per_state,d_full_100,cost_d3_100,d_full_10k,cost_d3_10k"
    );
    let mut r = csv::Reader::from_reader(out.as_bytes());
    let record = r.records().next().unwrap().unwrap();
    assert_eq!(record.len(), 10);
    assert_eq!(&record[0], "(15-to-1)_{7,3,3}");
    assert_eq!(&record[3], "810");
}

#[test]
fn json_mirrors_report_fields() {
    let (code, out, _) = msd(&[
        "factory", "--family", "l2_15x15", "--d", "9,3,3", "--d2", "25,9,9", "--n-l1", "4", "--pphys", "1e-4", "--ct",
        "10", "--format", "json",
    ]);
    assert_eq!(code, 0);
    let parsed: Vec<FactoryReport> = serde_json::from_str(&out).unwrap();
    let direct = simulate_factory(&TABLE2[3].config().unwrap()).unwrap();
    assert_eq!(parsed, vec![direct]);
    let value: serde_json::Value = serde_json::from_str(&out).unwrap();
    for key in [
        "protocol",
        "p_out",
        "p_fail_l1",
        "p_fail_l2",
        "qubits",
        "cycles",
        "qubitcycles_per_state",
        "d_full_100",
    ] {
        assert!(value[0].get(key).is_some(), "{key}");
    }
}

#[test]
fn zero_noise_factory_is_perfect() {
    let (code, out, _) = msd(&[
        "factory", "--family", "l1_15to1", "--d", "7,3,3", "--pphys", "0", "--format", "json",
    ]);
    assert_eq!(code, 0);
    let parsed: Vec<FactoryReport> = serde_json::from_str(&out).unwrap();
    assert_eq!(parsed[0].p_out, 0.0);
    assert_eq!(parsed[0].cycles, 18.0);
}

#[test]
fn verify_passes() {
    let (code, out, _) = msd(&["verify"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("✓ identity16 ∝ identity"));
    assert!(out.contains("✓ 15-to-1 ≡ Z_{-π/8}"));
    for n in ["35 undetected", "22 undetected", "28 undetected"] {
        assert!(out.contains(n), "{n}");
    }
    assert!(!out.contains('✗'));
}

#[test]
fn circuit_reports_output_and_failure() {
    let (code, out, _) = msd(&["circuit", "--kind", "15to1", "--noise", "z:1e-4", "--format", "json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let p_out = v["p_out"].as_f64().unwrap();
    assert!((p_out / 3.501e-11 - 1.0).abs() < 1e-3);
    assert!(v["p_fail"].as_f64().unwrap() > 0.0);
}

#[test]
fn table1_regenerates_deterministically() {
    let (code, first, _) = msd(&["table", "--name", "table1"]);
    assert_eq!(code, 0, "{first}");
    let row = first.lines().find(|l| l.starts_with("(15-to-1)_{7,3,3} ")).unwrap();
    for cell in ["810", "18.1", "14,600", "4.4e-8", "d=11", "d=13", "pass"] {
        assert!(
            row.split_whitespace().any(|c| c == cell || c.ends_with(cell)),
            "{cell} missing in {row}"
        );
    }
    assert_eq!(first.lines().filter(|l| l.ends_with("  pass")).count(), TABLE1.len());
    let (_, second, _) = msd(&["table", "--name", "table1"]);
    assert_eq!(first, second);
}

#[test]
fn table_csv_has_a_row_per_reference_row() {
    let (code, out, _) = msd(&["table", "--name", "table2", "--format", "csv"]);
    assert_eq!(code, 0);
    assert_eq!(parse_csv(&out).unwrap().len(), TABLE2.len());
}

#[test]
fn shipped_configs_list_the_reference_rows() {
    for (file, rows) in [("configs/table1.toml", TABLE1), ("configs/table2.toml", TABLE2)] {
        let configs = load_config(&repo_file(file)).unwrap();
        let expected: Vec<_> = rows.iter().map(|r| r.config().unwrap()).collect();
        assert_eq!(configs, expected, "{file}");
    }
}

#[test]
fn config_file_runs_through_factory() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    writeln!(
        f,
        "[[protocol]]\nfamily = \"l1_15to1_small\"\nd = [9, 3, 3]\np_phys = 1e-4"
    )
    .unwrap();
    let path = f.path().to_str().unwrap();
    let (code, out, _) = msd(&["factory", "--config", path]);
    assert_eq!(code, 0);
    assert!(out.lines().nth(1).unwrap().starts_with("small (15-to-1)_{9,3,3}"));
}

#[test]
fn bad_config_exits_with_diagnostic() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    writeln!(f, "[[protocol]]\nfamily = \"l1_15to1\"\nd = [7, 4, 3]\np_phys = 1e-4").unwrap();
    let path = f.path().to_str().unwrap().to_string();
    let (code, _, err) = msd(&["factory", "--config", &path]);
    assert_eq!(code, 2);
    assert!(err.contains(&format!("{path}:3: protocol[0].d")), "{err}");
}

#[test]
fn argument_errors_exit_with_two() {
    for args in [
        vec!["factory", "--family", "l1_15to1", "--d", "8,3,3", "--pphys", "1e-4"],
        vec!["factory", "--family", "l2_15x15", "--d", "9,3,3", "--pphys", "1e-4"],
        vec!["factory", "--family", "l1_15to1", "--d", "7,3,3", "--pphys", "0.5"],
        vec!["factory", "--family", "nope", "--d", "7,3,3", "--pphys", "1e-4"],
        vec!["factory", "--config", "/nonexistent/file.toml"],
        vec!["circuit", "--kind", "15to1", "--noise", "x:1"],
        vec!["table", "--name", "table3"],
        vec![
            "sweep", "--family", "l2_15x20", "--pphys", "1e-4", "--dx", "9", "--dz", "3", "--dm", "3",
        ],
        vec![],
    ] {
        let (code, _, err) = msd(&args);
        assert_eq!(code, 2, "{args:?}: {err}");
        assert!(!err.is_empty());
    }
    let (code, out, _) = msd(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("Usage"));
}

#[test]
fn empty_sweep_is_header_only_csv() {
    let (code, out, _) = msd(&[
        "sweep", "--family", "l1_15to1", "--pphys", "1e-4", "--target", "1e-25", "--dx", "7", "--dz", "3", "--dm", "3",
        "--format", "csv",
    ]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 1);
}

#[test]
fn sweep_finds_cheapest_level1_factory() {
    let (code, out, _) = msd(&[
        "sweep", "--family", "l1_15to1", "--pphys", "1e-4", "--target", "5e-8", "--dx", "5:9", "--dz", "3:5", "--dm",
        "3:5", "--format", "csv",
    ]);
    assert_eq!(code, 0);
    let rows = parse_csv(&out).unwrap();
    assert_eq!(rows[0].protocol, "(15-to-1)_{7,3,3}");
    assert!(rows.iter().all(|r| r.p_out <= 5e-8));
}
