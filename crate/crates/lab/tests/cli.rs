use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use cusp_core::{build_grid, sample_function, CuspDomain, CuspProfile, Family, GridSpec};
use cusp_lab::formats::read_grid_function;

const BIN: &str = env!("CARGO_BIN_EXE_cusp-lab");

const CONFIG: &str = r#"
experiment = "cli"
n = 2
profile = { kind = "power", a = 1.0, s = 2.0 }
s_values = [2.0, 4.0]
h = 0.125
family = { kind = "power_t", alpha = 0.3 }
p = [1.2, 2.0, inf]
levels = 2
cloud_size = 30
seed = 5
radii = [0.1, 0.05]
samples = 20000
"#;

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().unwrap()
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("config.toml");
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

#[test]
fn sweep_writes_every_row_and_a_plot() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), CONFIG);
    let out = run(&["sweep", "--config", &cfg, "--out", &path(dir.path(), "out")]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("out/sweep.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(
        lines[0],
        "experiment,n,s,p,level,h_t,h_x,lp_u,lp_grad,sobolev,hajlasz_constructive,hajlasz_lower_bound,certified_constant,below_romanov,error"
    );
    // 2 values of s, 3 exponents, 2 levels
    assert_eq!(lines.len(), 1 + 12);
    // threshold for s = 4 is 2.5
    assert!(lines.iter().any(|l| l.starts_with("cli,2,4,1.2,1,") && l.ends_with(",true,")));
    assert!(lines.iter().any(|l| l.starts_with("cli,2,4,inf,2,") && l.ends_with(",false,")));

    let svg = fs::read_to_string(dir.path().join("out/sweep.svg")).unwrap();
    let again = path(dir.path(), "again.svg");
    assert!(run(&["plot", "--csv", &path(dir.path(), "out/sweep.csv"), "--out", &again]).status.success());
    assert_eq!(fs::read_to_string(&again).unwrap(), svg);
}

#[test]
fn unknown_family_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &CONFIG.replace("kind = \"power_t\", alpha = 0.3", "kind = \"bessel\""));
    let out = run(&["sweep", "--config", &cfg, "--out", &path(dir.path(), "out")]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bessel"));
    assert!(!dir.path().join("out").exists(), "nothing is computed or written");
}

#[test]
fn failing_rows_give_exit_code_two() {
    let dir = tempfile::tempdir().unwrap();
    // the second level needs more nodes than the budget allows
    let cfg = write_config(dir.path(), &format!("{CONFIG}node_budget = 500\n"));
    let out = run(&["sweep", "--config", &cfg, "--out", &path(dir.path(), "out")]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("out/sweep.csv")).unwrap();
    let mut rdr = csv::Reader::from_reader(csv.as_bytes());
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 12);
    let failed: Vec<_> = rows.iter().filter(|r| !r[14].is_empty()).collect();
    assert_eq!(failed.len(), 6);
    assert!(failed.iter().all(|r| &r[4] == "2" && r[9].is_empty()));
    assert!(failed[0][14].contains("budget"), "{}", &failed[0][14]);
}

#[test]
fn maximal_output_reads_back_onto_the_grid() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), CONFIG);
    let out_file = path(dir.path(), "tau.csv");
    let out = run(&["maximal", "--config", &cfg, "--operator", "tau", "--out", &out_file]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let d = CuspDomain::new(2, CuspProfile::power(1.0, 2.0).unwrap()).unwrap();
    let g = build_grid(&d, &GridSpec::uniform(0.125)).unwrap();
    let u = sample_function(&g, &Family::PowerT { alpha: 0.3 }).unwrap();
    let m = read_grid_function(fs::File::open(&out_file).unwrap(), &g).unwrap();
    assert_eq!(m.values(), cusp_core::m_tau(&u).values());

    // feeding the result back in applies the operator again
    let twice = path(dir.path(), "tau2.csv");
    assert!(run(&["maximal", "--config", &cfg, "--operator", "tau", "--input", &out_file, "--out", &twice])
        .status
        .success());
    let m2 = read_grid_function(fs::File::open(&twice).unwrap(), &g).unwrap();
    assert!(m2.values().iter().zip(m.values()).all(|(a, b)| a >= b));

    let bad = run(&["maximal", "--config", &cfg, "--operator", "tau", "--level", "2", "--input", &out_file, "--out", &twice]);
    assert_eq!(bad.status.code(), Some(1), "a file for another grid is rejected");
}

#[test]
fn extend_writes_header_support_table_and_strip() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), CONFIG);
    let out_file = path(dir.path(), "ext.csv");
    assert!(run(&["extend", "--config", &cfg, "--out", &out_file]).status.success());
    let text = fs::read_to_string(&out_file).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n,h_t,h_x,t_min,profile-hash,half_width");
    assert_eq!(lines[2], "slice,t,support_radius");
    let strip_at = lines.iter().position(|l| *l == "t,x1,value").unwrap();
    let half_width: usize = lines[1].split(',').nth(5).unwrap().parse().unwrap();
    let slices = strip_at - 3;
    assert_eq!(lines.len() - strip_at - 1, slices * (2 * half_width + 1));
}

#[test]
fn hajlasz_modes_print_one_json_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), CONFIG);
    let mut constants = Vec::new();
    for mode in ["constructive", "constructive2d", "optimal"] {
        let file = path(dir.path(), &format!("{mode}.csv"));
        let out = run(&["hajlasz", "--config", &cfg, "--mode", mode, "--p", "2", "--pairs", "all", "--out", &file]);
        assert!(out.status.success(), "{mode}: {}", String::from_utf8_lossy(&out.stderr));
        let stdout = String::from_utf8(out.stdout).unwrap();
        assert_eq!(stdout.lines().count(), 1);
        let v: serde_json::Value = serde_json::from_str(stdout.trim()).unwrap();
        assert_eq!(v["seed"], 5);
        assert!(v["norm"].as_f64().unwrap() > 0.0);
        constants.push(v["certified_constant"].as_f64().unwrap());
    }
    // certifying the constructive gradient reproduces its constant
    let out = run(&[
        "hajlasz",
        "--config",
        &cfg,
        "--mode",
        "certify",
        "--pairs",
        "all",
        "--gradient",
        &path(dir.path(), "constructive.csv"),
        "--out",
        &path(dir.path(), "certified.csv"),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["certified_constant"].as_f64().unwrap(), constants[0]);

    let missing = run(&["hajlasz", "--config", &cfg, "--mode", "certify", "--out", &path(dir.path(), "x.csv")]);
    assert_eq!(missing.status.code(), Some(1));
}

#[test]
fn slit_and_density_tables() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["slit", "--levels", "2", "--out", &path(dir.path(), "slit")]);
    assert!(out.status.success());
    let text = fs::read_to_string(dir.path().join("slit/slit.csv")).unwrap();
    assert_eq!(text.lines().count(), 3);
    assert!(text.starts_with("level,h,nodes,p,sobolev,optimal_norm,"));

    let cfg = write_config(dir.path(), CONFIG);
    assert!(run(&["density", "--config", &cfg, "--out", &path(dir.path(), "d")]).status.success());
    let text = fs::read_to_string(dir.path().join("d/density.csv")).unwrap();
    assert_eq!(text.lines().count(), 1 + 4);
    assert!(text.lines().skip(1).all(|l| l.ends_with(",true")), "{text}");
}

#[test]
fn missing_config_file() {
    let out = run(&["density", "--config", "/definitely/not/here.toml", "--out", "/tmp/unused"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cannot read"));
}
