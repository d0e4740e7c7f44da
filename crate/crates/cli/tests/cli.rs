use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/tests/fixtures")
        .join(name)
}

fn zulf(args: &[&str]) -> Output {
    zulf_in(args, None)
}

fn zulf_in(args: &[&str], cwd: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_zulf"));
    cmd.args(args).env_remove("ZULF_CONFIG_PATH");
    if let Some(dir) = cwd {
        cmd.current_dir(dir);
    }
    cmd.output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "invalid JSON ({e}); stderr: {}",
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn methane_proton_inspect() {
    let out = zulf(&["inspect", path_str(&fixture("methane.mol"))]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let clusters = v["reports"][0]["clusters"].as_array().unwrap();
    assert_eq!(clusters.len(), 1);
    assert_eq!(clusters[0]["metrics"]["n_spins"], 4);
    for flag in ["n_ge_16", "n_ge_20", "n_ge_32"] {
        assert_eq!(clusters[0]["hardness"][flag], false);
    }
}

#[test]
fn hetero_dipolar_spans_the_molecule() {
    let out = zulf(&[
        "inspect",
        "--regime",
        "hetero",
        "--dipolar",
        "full",
        path_str(&fixture("menthol.mol")),
    ]);
    let v = json(&out);
    let r = &v["reports"][0];
    assert_eq!(r["clusters"].as_array().unwrap().len(), 1);
    assert_eq!(r["clusters"][0]["metrics"]["n_spins"], r["n_spins"]);
    assert_eq!(r["clusters"][0]["hardness"]["n_ge_20"], true);
}

#[test]
fn empty_directory_is_an_empty_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = zulf(&["inspect", path_str(dir.path())]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["reports"].as_array().unwrap().len(), 0);
    assert_eq!(v["failures"].as_array().unwrap().len(), 0);
}

#[test]
fn parse_failures_give_partial_exit() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::copy(fixture("ethanol.mol"), dir.path().join("ethanol.mol")).unwrap();
    std::fs::write(dir.path().join("broken.mol"), "not a molfile\n").unwrap();
    let out = zulf(&["inspect", path_str(dir.path())]);
    assert_eq!(out.status.code(), Some(2));
    let v = json(&out);
    assert_eq!(v["reports"].as_array().unwrap().len(), 1);
    let failures = v["failures"].as_array().unwrap();
    assert_eq!(failures.len(), 1);
    assert!(failures[0]["path"]
        .as_str()
        .unwrap()
        .ends_with("broken.mol"));
    assert!(String::from_utf8_lossy(&out.stderr).contains("broken.mol"));
}

#[test]
fn estimates_are_deterministic_and_order_independent() {
    let a = fixture("ethanol.mol");
    let b = fixture("menthol.mol");
    let args = |x: &Path, y: &Path| {
        zulf(&["estimate", "--threshold", "1", path_str(x), path_str(y)]).stdout
    };
    let first = args(&a, &b);
    assert_eq!(first, args(&a, &b));
    assert_eq!(first, args(&b, &a));

    let batch: Value = serde_json::from_slice(&first).unwrap();
    for (i, p) in [&a, &b].iter().enumerate() {
        let single = json(&zulf(&["estimate", "--threshold", "1", path_str(p)]));
        assert_eq!(batch["reports"][i], single["reports"][0]);
    }
}

#[test]
fn output_directory_files_are_byte_identical() {
    let runs: Vec<Vec<u8>> = (0..2)
        .map(|_| {
            let dir = tempfile::tempdir().unwrap();
            let out = zulf(&[
                "estimate",
                "--out",
                path_str(dir.path()),
                path_str(&fixture("menthol.mol")),
            ]);
            assert_eq!(out.status.code(), Some(0));
            std::fs::read(dir.path().join("menthol.mol.json")).unwrap()
        })
        .collect();
    assert_eq!(runs[0], runs[1]);
}

#[test]
fn proton_fixture_is_below_the_t_band() {
    let out = zulf(&[
        "estimate",
        "--threshold",
        "1",
        path_str(&fixture("menthol.mol")),
    ]);
    let v = json(&out);
    let r = &v["reports"][0];
    assert_eq!(r["aggregate"]["below_t_band"], true);
    assert!(r["single_shot_max"]["n_t"].as_u64().unwrap() < 10_000_000_000);
}

#[test]
fn ge_machine_uses_twenty_million_qubits() {
    let out = zulf(&[
        "estimate",
        "--machine",
        "ge",
        path_str(&fixture("menthol.mol")),
    ]);
    let v = json(&out);
    let phys = &v["reports"][0]["physical"];
    let n_phys = phys["estimate"]["n_phys"].as_u64().unwrap();
    let ge = &phys["machines"][0];
    assert_eq!(ge["machine"], "ge");
    assert_eq!(ge["concurrency"].as_u64().unwrap(), 20_000_000 / n_phys);
}

#[test]
fn strict_mode_flags_infeasible_mappings() {
    let file = fixture("menthol.mol");
    let base = ["estimate", "--p-phys", "9e-3", path_str(&file)];
    let lenient = zulf(&base);
    assert_eq!(lenient.status.code(), Some(0));
    assert_eq!(json(&lenient)["reports"][0]["physical"]["feasible"], false);

    let mut strict = base.to_vec();
    strict.push("--strict");
    assert_eq!(zulf(&strict).status.code(), Some(3));

    let phys = zulf(&[
        "physical",
        "--n-t",
        "1000",
        "--n-logical",
        "10",
        "--p-phys",
        "9.9e-3",
        "--strict",
    ]);
    assert_eq!(phys.status.code(), Some(3));
}

fn key_paths(v: &Value, prefix: &str, out: &mut Vec<String>) {
    match v {
        Value::Object(map) => {
            for (k, child) in map {
                let p = format!("{prefix}.{k}");
                out.push(p.clone());
                key_paths(child, &p, out);
            }
        }
        Value::Array(items) => {
            if let Some(first) = items.first() {
                key_paths(first, &format!("{prefix}[]"), out);
            }
        }
        _ => {}
    }
}

#[test]
fn estimate_schema_matches_golden() {
    let out = zulf(&["estimate", path_str(&fixture("menthol.mol"))]);
    let v = json(&out);
    let mut paths = Vec::new();
    key_paths(&v, "", &mut paths);
    paths.sort();
    paths.dedup();
    let golden = include_str!("golden/estimate_schema.txt");
    let expected: Vec<&str> = golden.lines().filter(|l| !l.is_empty()).collect();
    assert_eq!(paths, expected);
    assert_eq!(v["schema"], "zulf-report-1");
    assert_eq!(v["reports"][0]["ledger_version"], "zulf-cost-1");
}

#[test]
fn chloroform_hc_spectrum_peaks_at_the_coupling() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("zulf.toml"), "[couplings]\nCH = [140.0]\n").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_zulf"))
        .args([
            "spectrum",
            "--regime",
            "hetero",
            "--points",
            "1024",
            "--out",
            path_str(dir.path()),
            path_str(&fixture("chloroform.mol")),
        ])
        .env("ZULF_CONFIG_PATH", dir.path())
        .output()
        .unwrap();
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let peaks = std::fs::read_to_string(dir.path().join("chloroform.peaks.csv")).unwrap();
    let spectrum = std::fs::read_to_string(dir.path().join("chloroform.spectrum.csv")).unwrap();
    let freqs: Vec<f64> = spectrum
        .lines()
        .skip(1)
        .take(2)
        .map(|l| l.split(',').next().unwrap().parse().unwrap())
        .collect();
    let bin = freqs[1] - freqs[0];
    let top: f64 = peaks
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .next()
        .unwrap()
        .parse()
        .unwrap();
    assert!((top - 140.0).abs() <= bin, "peak at {top}, bin {bin}");
    assert!(dir.path().join("chloroform.trace.csv").exists());
}

#[test]
fn unweighted_homonuclear_trace_warns_flat() {
    let dir = tempfile::tempdir().unwrap();
    let out = zulf_in(
        &[
            "spectrum",
            "--observable",
            "sz",
            path_str(&fixture("ethanol.mol")),
        ],
        Some(dir.path()),
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("flat trace"));
}

#[test]
fn spectrum_errors_carry_context() {
    let dir = tempfile::tempdir().unwrap();
    let few = zulf_in(
        &[
            "spectrum",
            "--points",
            "3",
            path_str(&fixture("ethanol.mol")),
        ],
        Some(dir.path()),
    );
    assert_ne!(few.status.code(), Some(0));
    let err = String::from_utf8_lossy(&few.stderr);
    assert!(
        err.contains("spectrum") && err.contains("at least 4 samples"),
        "{err}"
    );

    let big = zulf_in(
        &[
            "spectrum",
            "--regime",
            "hetero",
            path_str(&fixture("strychnine.mol")),
        ],
        Some(dir.path()),
    );
    assert_ne!(big.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&big.stderr).contains("cap of 14"));
}

#[test]
fn phases_csv_has_2d_plus_1_rows() {
    let out = zulf(&[
        "phases",
        "--tau",
        "5",
        "--epsilon",
        "1e-3",
        "--format",
        "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("index,lambda,phi,theta"));
    // d = ⌈e·5/2 + 3⌉ = 10
    assert_eq!(lines.count(), 21);
}

#[test]
fn fermi_hubbard_refmodel() {
    let dir = tempfile::tempdir().unwrap();
    let ham = dir.path().join("fh.txt");
    let out = zulf(&[
        "refmodel",
        "--kind",
        "fh",
        "--lx",
        "2",
        "--ly",
        "2",
        "--hamiltonian",
        path_str(&ham),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["n_qubits"], 8);
    assert_eq!(v["n_terms"], 28);
    assert!(std::fs::read_to_string(&ham).unwrap().contains("n_spins 8"));
}

#[test]
fn explicit_config_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "[budget]\nn_points = 7\n").unwrap();
    let out = zulf(&[
        "estimate",
        "--config",
        path_str(&cfg),
        "--threshold",
        "1",
        "--eps-max",
        "1e-2",
        path_str(&fixture("ethanol.mol")),
    ]);
    let v = json(&out);
    let r = &v["reports"][0];
    assert_eq!(r["schedule"]["timepoints"].as_array().unwrap().len(), 7);
    assert_eq!(r["single_shot_max"]["epsilon"], 1e-2);

    std::fs::write(&cfg, "[budget]\nbogus = 1\n").unwrap();
    let bad = zulf(&[
        "inspect",
        "--config",
        path_str(&cfg),
        path_str(&fixture("ethanol.mol")),
    ]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn csv_projection() {
    let out = zulf(&[
        "inspect",
        "--format",
        "csv",
        path_str(&fixture("methane.mol")),
        path_str(&fixture("ethane.mol")),
    ]);
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert!(rows[0].starts_with("molecule,regime,cluster,n_spins"));
    assert_eq!(rows.len(), 3);
    assert!(rows[1].starts_with("ethane,") && rows[2].starts_with("methane,"));
}
