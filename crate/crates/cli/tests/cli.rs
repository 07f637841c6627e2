use std::fs;
use std::path::Path;

use clap::Parser;
use elo_dyn_cli::{run, Cli, RunOutcome};
use tempfile::TempDir;

fn exec(args: &[&str]) -> anyhow::Result<(RunOutcome, String)> {
    let cli = Cli::try_parse_from(std::iter::once("elo-dyn").chain(args.iter().copied()))?;
    let mut log = Vec::new();
    let outcome = run(&cli, &mut log)?;
    Ok((outcome, String::from_utf8(log).unwrap()))
}

fn exec_in(dir: &Path, args: &[&str]) -> anyhow::Result<(RunOutcome, String)> {
    let mut all: Vec<&str> = args.to_vec();
    let d = dir.to_str().unwrap();
    all.extend(["--out-dir", d]);
    exec(&all)
}

/// Rows after the `#` header and the column line.
fn rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}

fn column_line(text: &str) -> &str {
    text.lines().find(|l| !l.starts_with('#')).unwrap()
}

fn args_line(text: &str) -> Vec<String> {
    let line = text.lines().find_map(|l| l.strip_prefix("# args: ")).expect("args echo");
    line.split_whitespace().map(str::to_owned).collect()
}

#[test]
fn density_counts_add_up_to_m() {
    let dir = TempDir::new().unwrap();
    let (out, _) = exec_in(dir.path(), &["density-rho", "--m", "1000", "--rho1", "0", "--bins", "50"]).unwrap();
    assert_eq!(out.files.len(), 1);
    let text = fs::read_to_string(&out.files[0]).unwrap();
    assert_eq!(column_line(&text), "bin_left,bin_right,count,density");
    let r = rows(&text);
    assert_eq!(r.len(), 50);
    let total: u64 = r.iter().map(|row| row[2].parse::<u64>().unwrap()).sum();
    assert_eq!(total, 1000);
    let mass: f64 = r
        .iter()
        .map(|row| {
            let w = row[1].parse::<f64>().unwrap() - row[0].parse::<f64>().unwrap();
            w * row[3].parse::<f64>().unwrap()
        })
        .sum();
    assert!((mass - 1.0).abs() < 1e-9);
}

#[test]
fn density_rho_defaults_write_five_files() {
    let dir = TempDir::new().unwrap();
    let (out, _) = exec_in(dir.path(), &["density-rho", "--m", "200", "--t-star", "50"]).unwrap();
    let mut names: Vec<String> = out
        .files
        .iter()
        .map(|p| p.file_name().unwrap().to_string_lossy().into_owned())
        .collect();
    names.sort();
    assert_eq!(
        names,
        [
            "density_rho_0.25.csv",
            "density_rho_0.5.csv",
            "density_rho_0.75.csv",
            "density_rho_0.csv",
            "density_rho_1.csv"
        ]
    );
}

#[test]
fn density_k_rejects_unstable_k_before_writing() {
    let dir = TempDir::new().unwrap();
    let err = exec_in(dir.path(), &["density-k", "--k", "0.4,2.1", "--m", "100"]).unwrap_err();
    assert!(format!("{err:#}").contains("KL < 1"), "{err:#}");
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn k_scan_has_one_row_per_point() {
    let dir = TempDir::new().unwrap();
    let (out, _) = exec_in(dir.path(), &["k-scan", "--points", "10", "--m", "200", "--t-star", "100"]).unwrap();
    let text = fs::read_to_string(&out.files[0]).unwrap();
    assert_eq!(column_line(&text), "K,mean_abs_dev,stderr,t_star_used");
    let r = rows(&text);
    assert_eq!(r.len(), 10);
    assert_eq!(r[0][0], "0.001");
    assert_eq!(r[9][0], "1");
    for row in &r {
        assert!(row[1].parse::<f64>().unwrap() >= 0.0);
        assert_eq!(row[3], "100");
    }
}

#[test]
fn bias_scan_is_centred_at_zero_skill() {
    let dir = TempDir::new().unwrap();
    let (out, _) = exec_in(dir.path(), &["bias-scan", "--points", "5", "--m", "2000"]).unwrap();
    let text = fs::read_to_string(&out.files[0]).unwrap();
    assert_eq!(column_line(&text), "rho1,b2rho1,mean_X1,b_2meanX1,mean_b2X1,stderr");
    let r = rows(&text);
    assert_eq!(r.len(), 5);
    let mid = &r[2];
    assert_eq!(mid[0], "0");
    assert_eq!(mid[1], "0");
    let (mean, se): (f64, f64) = (mid[2].parse().unwrap(), mid[5].parse().unwrap());
    assert!(mean.abs() < 4.0 * se, "mean {mean} se {se}");
    assert!(!text.contains("-0 "), "negative zero in echo:\n{text}");
}

#[test]
fn verify_only_writes_one_row() {
    let dir = TempDir::new().unwrap();
    let (out, log) = exec_in(dir.path(), &["verify", "--only", "sandwich", "--m", "5000"]).unwrap();
    assert!(out.success, "{log}");
    let text = fs::read_to_string(&out.files[0]).unwrap();
    assert_eq!(column_line(&text), "check,param_echo,observed,bound,tolerance,passed,samples");
    let r = rows(&text);
    assert_eq!(r.len(), 1);
    assert_eq!(r[0][0], "sandwich");
    assert_eq!(r[0][5], "true");
    assert_eq!(r[0][1].matches("seed=").count(), 1);
}

#[test]
fn verify_rejects_unknown_check() {
    let dir = TempDir::new().unwrap();
    assert!(exec_in(dir.path(), &["verify", "--only", "nonsense"]).is_err());
}

#[test]
fn same_seed_gives_identical_bytes() {
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    let args = ["density-k", "--k", "0.1", "--m", "500", "--seed", "17", "--bins", "20"];
    let (fa, _) = exec_in(a.path(), &args).unwrap();
    let (fb, _) = exec_in(b.path(), &args).unwrap();
    assert_eq!(fs::read(&fa.files[0]).unwrap(), fs::read(&fb.files[0]).unwrap());

    let c = TempDir::new().unwrap();
    let other = ["density-k", "--k", "0.1", "--m", "500", "--seed", "18", "--bins", "20"];
    let (fc, _) = exec_in(c.path(), &other).unwrap();
    assert_ne!(fs::read(&fa.files[0]).unwrap(), fs::read(&fc.files[0]).unwrap());
}

#[test]
fn args_echo_reproduces_the_file() {
    let a = TempDir::new().unwrap();
    let (first, _) = exec_in(
        a.path(),
        &["density-rho", "--rho1", "0.5", "--m", "400", "--t-star", "60", "--seed", "5", "--bins", "30"],
    )
    .unwrap();
    let original = fs::read_to_string(&first.files[0]).unwrap();
    let echoed = args_line(&original);
    let b = TempDir::new().unwrap();
    let refs: Vec<&str> = echoed.iter().map(String::as_str).collect();
    let (second, _) = exec_in(b.path(), &refs).unwrap();
    assert_eq!(first.files[0].file_name(), second.files[0].file_name());
    assert_eq!(original, fs::read_to_string(&second.files[0]).unwrap());
}

#[test]
fn k_scan_echo_reproduces_the_file() {
    let a = TempDir::new().unwrap();
    let (first, _) = exec_in(a.path(), &["k-scan", "--points", "3", "--m", "100", "--rho1", "0.25"]).unwrap();
    let original = fs::read_to_string(&first.files[0]).unwrap();
    let echoed = args_line(&original);
    let b = TempDir::new().unwrap();
    let refs: Vec<&str> = echoed.iter().map(String::as_str).collect();
    let (second, _) = exec_in(b.path(), &refs).unwrap();
    assert_eq!(original, fs::read_to_string(&second.files[0]).unwrap());
}

#[test]
fn reach_lands_in_the_target() {
    let dir = TempDir::new().unwrap();
    let (out, log) = exec_in(
        dir.path(),
        &["reach", "--start", "0,0", "--target", "1.0,1.1", "--k", "0.4", "--L", "0.5"],
    )
    .unwrap();
    assert!(log.contains("in targets: true"), "{log}");
    let plan = fs::read_to_string(&out.files[0]).unwrap();
    assert!(plan.starts_with("# k=0.4 L=0.5\n"));
}

#[test]
fn reach_needs_invertible_maps() {
    let dir = TempDir::new().unwrap();
    let err = exec_in(
        dir.path(),
        &["reach", "--start", "0,0", "--target", "1.0,1.1", "--k", "1.5", "--L", "0.5"],
    )
    .unwrap_err();
    assert!(format!("{err:#}").contains("2·K·L < 1"), "{err:#}");
    assert!(exec_in(dir.path(), &["reach", "--start", "0,0", "--target", "1.0"]).is_err());
}

#[test]
fn simulate_reads_a_parameter_file() {
    let dir = TempDir::new().unwrap();
    let config = dir.path().join("params.txt");
    fs::write(
        &config,
        "n_players = 3\nk_factor = 0.2\nlink.kind = logistic\nlink.c = 0.5\nscore.kind = binary\nskills = 0.6, -0.3, -0.3\n",
    )
    .unwrap();
    let (out, _) = exec_in(
        dir.path(),
        &["simulate", "--config", config.to_str().unwrap(), "--coord", "2", "--m", "300"],
    )
    .unwrap();
    assert!(out.files[0].ends_with("simulate_x2.csv"));
    let text = fs::read_to_string(&out.files[0]).unwrap();
    let values: Vec<f64> = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.parse().unwrap())
        .collect();
    assert_eq!(values.len(), 300);
    assert!(exec_in(dir.path(), &["simulate", "--config", config.to_str().unwrap(), "--coord", "4"]).is_err());
}
