use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_laborcast"))
}

fn data_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

fn run(args: &[&str], config: &Path, out: &Path) -> Output {
    bin().args(args).arg("--config").arg(config).arg("--out").arg(out).output().unwrap()
}

fn error_record(o: &Output) -> serde_json::Value {
    let text = String::from_utf8_lossy(&o.stderr);
    serde_json::from_str(text.trim()).unwrap_or_else(|e| panic!("stderr is not JSON ({e}): {text}"))
}

/// Catalog with one annual series `x` and the given run config body.
fn tiny(dir: &Path, csv: &str, body: &str) -> PathBuf {
    std::fs::write(dir.join("x.csv"), csv).unwrap();
    std::fs::write(dir.join("catalog.toml"), "version = 1\n[[series]]\nid = 'x'\nfile = 'x.csv'\nfrequency = 'annual'\n")
        .unwrap();
    let cfg = dir.join("run.toml");
    std::fs::write(&cfg, format!("version = 1\ncatalog = 'catalog.toml'\n{body}")).unwrap();
    cfg
}

const URTEST: &str = "[urtest]\ntests = [{ test = 'adf', deterministic = 'constant', lags = 0 }]\n[[urtest.rows]]\nseries = 'x'\n";

#[test]
fn forecast_emits_one_path_per_scenario() {
    let out = tempfile::tempdir().unwrap();
    let o = run(&["forecast"], &data_dir().join("switzerland.toml"), out.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(out.path().join("forecast.csv")).unwrap();
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().starts_with("# config-hash: "));
    assert_eq!(lines.next().unwrap(), "scenario,variable,period,value");
    let mut scenarios: Vec<&str> = lines.clone().map(|l| l.split(',').next().unwrap()).collect();
    scenarios.dedup();
    assert_eq!(scenarios, ["high fertility", "low fertility", "middle fertility"]);
    // 41 years of CPI and UE per scenario
    assert_eq!(lines.count(), 3 * 2 * 41);
}

#[test]
fn urtest_table_has_series_rows_and_test_columns() {
    let out = tempfile::tempdir().unwrap();
    let o = run(&["urtest"], &data_dir().join("switzerland.toml"), out.path());
    assert!(o.status.success());
    let text = std::fs::read_to_string(out.path().join("urtest.txt")).unwrap();
    let header = text.lines().find(|l| l.starts_with("series")).unwrap();
    let cols: Vec<&str> = header.split("  ").map(str::trim).filter(|s| !s.is_empty()).collect();
    assert_eq!(cols, ["series", "DF (lag 0)", "DF-GLS (lag 2)", "PP z(rho)", "PP z(t)"]);
    let rows: Vec<&str> = text.lines().skip_while(|l| !l.starts_with("---")).skip(1).map(|l| l.split(' ').next().unwrap()).collect();
    assert_eq!(rows, ["DGDP", "dDGDP", "CPI", "dCPI", "UE", "dUE", "dLF/LF", "d(dLF/LF)"]);
}

#[test]
fn saved_models_reproduce_the_run() {
    let out = tempfile::tempdir().unwrap();
    let cfg = data_dir().join("switzerland.toml");
    assert!(run(&["calibrate"], &cfg, out.path()).status.success());
    assert!(run(&["evaluate"], &cfg, out.path()).status.success());
    let first = std::fs::read_to_string(out.path().join("evaluation.csv")).unwrap();

    let again = tempfile::tempdir().unwrap();
    let o = bin()
        .args(["evaluate", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(again.path())
        .arg("--models")
        .arg(out.path().join("models"))
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let second = std::fs::read_to_string(again.path().join("evaluation.csv")).unwrap();
    // Same numbers; only the hash line differs because model files are hashed.
    assert_eq!(first.split_once('\n').unwrap().1, second.split_once('\n').unwrap().1);
    assert_ne!(first.lines().next(), second.lines().next());
}

#[test]
fn seed_and_series_overrides_change_the_hash() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = tiny(dir.path(), "period,value\n", URTEST);
    let csv: String = (0..40).map(|i| format!("{},{}\n", 1970 + i, ((i * 7919) % 13) as f64 / 10.0)).collect();
    std::fs::write(dir.path().join("x.csv"), format!("period,value\n{csv}")).unwrap();
    let alt = dir.path().join("alt.csv");
    let csv2: String = (0..40).map(|i| format!("{},{}\n", 1970 + i, ((i * 104729) % 17) as f64 / 10.0)).collect();
    std::fs::write(&alt, format!("period,value\n{csv2}")).unwrap();

    let hash = |extra: &[&str]| {
        let out = tempfile::tempdir().unwrap();
        let o = bin().arg("urtest").arg("--config").arg(&cfg).arg("--out").arg(out.path()).args(extra).output().unwrap();
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        let text = std::fs::read_to_string(out.path().join("urtest.csv")).unwrap();
        (text.lines().next().unwrap().to_string(), text)
    };
    let (base, base_text) = hash(&[]);
    assert_eq!(hash(&[]).1, base_text);
    assert_ne!(hash(&["--seed", "5"]).0, base);
    let series = format!("x={}", alt.display());
    let (h, text) = hash(&["--series", &series]);
    assert_ne!(h, base);
    assert_ne!(text.split_once('\n').unwrap().1, base_text.split_once('\n').unwrap().1);
}

#[test]
fn config_errors_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = tiny(dir.path(), "period,value\n1970,1\n", "[urtest]\ntests = []\nrows = [{ series = 'nope' }]\n");
    let o = run(&["urtest"], &cfg, dir.path());
    assert_eq!(o.status.code(), Some(2));
    let rec = error_record(&o);
    assert_eq!(rec["error"], "config");
    assert_eq!(rec["exit_code"], 2);
    assert!(rec["message"].as_str().unwrap().contains("nope"));

    let missing = run(&["coint"], &tiny(dir.path(), "period,value\n1970,1\n", ""), dir.path());
    assert_eq!(missing.status.code(), Some(2));
    let no_config = bin().arg("urtest").output().unwrap();
    assert_eq!(no_config.status.code(), Some(2));
    let bad_series = bin().args(["urtest", "--series", "x"]).arg("--config").arg(&cfg).output().unwrap();
    assert_eq!(bad_series.status.code(), Some(2));
}

#[test]
fn data_errors_exit_with_3_and_name_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = tiny(dir.path(), "period,value\n1970,0.1\n1970,0.2\n", URTEST);
    let o = run(&["urtest"], &cfg, dir.path());
    assert_eq!(o.status.code(), Some(3));
    let msg = error_record(&o)["message"].as_str().unwrap().to_string();
    assert!(msg.contains("x.csv:3"), "{msg}");

    let cfg = tiny(dir.path(), "", URTEST);
    assert_eq!(run(&["urtest"], &cfg, dir.path()).status.code(), Some(3));
    let cfg = tiny(dir.path(), "period,value\n1975Q1,0.1\n1975,0.2\n", URTEST);
    assert_eq!(run(&["urtest"], &cfg, dir.path()).status.code(), Some(3));
}

#[test]
fn numeric_failures_exit_with_4() {
    let dir = tempfile::tempdir().unwrap();
    let csv: String = (0..30).map(|i| format!("{},0.5\n", 1970 + i)).collect();
    let cfg = tiny(dir.path(), &format!("period,value\n{csv}"), URTEST);
    let o = run(&["urtest"], &cfg, dir.path());
    assert_eq!(o.status.code(), Some(4));
    assert_eq!(error_record(&o)["error"], "numeric");
}

#[test]
fn quarterly_series_are_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let csv: String = (0..60).map(|i| format!("{}Q{},{}\n", 1975 + i / 4, i % 4 + 1, ((i * 31) % 11) as f64)).collect();
    std::fs::write(dir.path().join("x.csv"), format!("period,value\n{csv}")).unwrap();
    std::fs::write(dir.path().join("catalog.toml"), "version = 1\n[[series]]\nid = 'x'\nfile = 'x.csv'\nfrequency = 'quarterly'\n")
        .unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, format!("version = 1\ncatalog = 'catalog.toml'\n{URTEST}")).unwrap();
    let o = run(&["urtest"], &cfg, dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("urtest.csv")).unwrap();
    assert!(csv.contains(",1975Q1,1989Q4,"), "{csv}");
}
