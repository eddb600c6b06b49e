//! End-to-end tests of the `bpes` binary: exit codes, file contents, and
//! CSV round-trip stability.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::sync::atomic::{AtomicU32, Ordering};

static DIR_SEQ: AtomicU32 = AtomicU32::new(0);

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!(
        "bpes-cli-{}-{}-{}",
        tag,
        std::process::id(),
        DIR_SEQ.fetch_add(1, Ordering::SeqCst)
    ));
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn bpes(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bpes"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn bpes_env(args: &[&str], key: &str, value: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bpes"))
        .args(args)
        .env(key, value)
        .output()
        .expect("binary runs")
}

fn read(dir: &Path, name: &str) -> String {
    fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("missing {name}: {e}"))
}

/// Data rows of a CSV (skipping `#` metadata and the header row).
fn data_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#') && !l.is_empty())
        .skip(1)
        .map(|l| l.split(',').map(|c| c.to_string()).collect())
        .collect()
}

fn meta_value(text: &str, key: &str) -> Option<String> {
    let prefix = format!("# {key} = ");
    text.lines()
        .find(|l| l.starts_with(&prefix))
        .map(|l| l[prefix.len()..].to_string())
}

#[test]
fn roots_single_order() {
    let dir = temp_dir("roots1");
    let out = bpes(&["roots", "--n0", "1", "--out", dir.to_str().unwrap()]);
    assert!(out.status.success());
    let text = read(&dir, "roots.csv");
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][0], "1");
    let mu: f64 = rows[0][1].parse().unwrap();
    assert!((mu - 2f64.powf(0.25)).abs() < 1e-10);
    let residual: f64 = rows[0][2].parse().unwrap();
    assert!(residual < 1e-10);
}

#[test]
fn roots_rejects_zero_order() {
    let dir = temp_dir("roots0");
    let out = bpes(&["roots", "--n0", "0", "--out", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!dir.join("roots.csv").exists());
}

#[test]
fn roots_twenty_orders() {
    let dir = temp_dir("roots20");
    let out = bpes(&["roots", "--n0", "20", "--out", dir.to_str().unwrap()]);
    assert!(out.status.success());
    let rows = data_rows(&read(&dir, "roots.csv"));
    assert_eq!(rows.len(), 20);
    for row in &rows {
        let residual: f64 = row[2].parse().unwrap();
        assert!(residual <= 1e-10);
    }
}

#[test]
fn solve_two_coefficients_with_omega_metadata() {
    let dir = temp_dir("solve2");
    let out = bpes(&["solve", "--n0", "2", "--out", dir.to_str().unwrap()]);
    assert!(out.status.success());
    let text = read(&dir, "coefficients.csv");
    let omega: f64 = meta_value(&text, "omega").unwrap().parse().unwrap();
    let row_norm: f64 = meta_value(&text, "row_norm").unwrap().parse().unwrap();
    assert!(omega <= 1e-12 * row_norm);
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 2);
    let norm: f64 = rows
        .iter()
        .map(|r| r[1].parse::<f64>().unwrap().powi(2))
        .sum::<f64>()
        .sqrt();
    assert!((norm - 1.0).abs() < 1e-12);
}

#[test]
fn solve_one_dimensional_case() {
    let dir = temp_dir("solve1");
    let out = bpes(&["solve", "--n0", "1", "--out", dir.to_str().unwrap()]);
    assert!(out.status.success());
    let text = read(&dir, "coefficients.csv");
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][1].parse::<f64>().unwrap(), 1.0);
    let omega: f64 = meta_value(&text, "omega").unwrap().parse().unwrap();
    assert!(omega > 0.0); // Omega = |a_1| in the trivial-kernel case
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir_a = temp_dir("det-a");
    let dir_b = temp_dir("det-b");
    for dir in [&dir_a, &dir_b] {
        let out = bpes(&["solve", "--n0", "5", "--out", dir.to_str().unwrap()]);
        assert!(out.status.success());
    }
    assert_eq!(
        read(&dir_a, "coefficients.csv"),
        read(&dir_b, "coefficients.csv")
    );
}

#[test]
fn grid_emits_normalized_density() {
    let dir = temp_dir("grid");
    let out = bpes(&[
        "grid",
        "--n0",
        "3",
        "--grid-nx",
        "201",
        "--grid-nt",
        "5",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    for name in ["u_real.csv", "u_imag.csv", "density.csv"] {
        assert!(dir.join(name).exists(), "{name}");
    }
    let text = read(&dir, "density.csv");
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 201);
    assert_eq!(rows[0].len(), 6); // x column + 5 t columns

    // Density is nonnegative everywhere.
    let cell = |r: &Vec<String>, j: usize| r[j].parse::<f64>().unwrap();
    for row in &rows {
        for j in 1..row.len() {
            assert!(cell(row, j) >= 0.0);
        }
    }
    // The t = 0 column integrates to one under the trapezoid rule.
    let mut integral = 0.0;
    for i in 1..rows.len() {
        let x0 = cell(&rows[i - 1], 0);
        let x1 = cell(&rows[i], 0);
        integral += 0.5 * (x1 - x0) * (cell(&rows[i], 1) + cell(&rows[i - 1], 1));
    }
    assert!((integral - 1.0).abs() <= 1e-10, "integral = {integral}");

    // At (x, t) = (0, 0) the polynomial arguments vanish, so
    // u_real = -(1/N0) sum xi_k * scale.
    let coeff_out = bpes(&["solve", "--n0", "3", "--out", dir.to_str().unwrap()]);
    assert!(coeff_out.status.success());
    let xi_sum: f64 = data_rows(&read(&dir, "coefficients.csv"))
        .iter()
        .map(|r| r[1].parse::<f64>().unwrap())
        .sum();
    let scale: f64 = meta_value(&text, "scale").unwrap().parse().unwrap();
    let u_real_00: f64 = data_rows(&read(&dir, "u_real.csv"))[0][1].parse().unwrap();
    let expected = -xi_sum / 3.0 * scale;
    assert!(
        (u_real_00 - expected).abs() <= 1e-12 * expected.abs().max(1.0),
        "{u_real_00} vs {expected}"
    );
}

#[test]
fn grid_minimal_two_by_two() {
    let dir = temp_dir("grid2");
    let out = bpes(&[
        "grid",
        "--n0",
        "2",
        "--grid-nx",
        "2",
        "--grid-nt",
        "2",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let rows = data_rows(&read(&dir, "density.csv"));
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0].len(), 3);
}

#[test]
fn convergence_writes_omega_and_delta_rows() {
    let dir = temp_dir("conv");
    let out = bpes(&[
        "convergence",
        "--n0-list",
        "2,3,4",
        "--grid-nx",
        "41",
        "--grid-nt",
        "11",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = read(&dir, "convergence.csv");
    let rows = data_rows(&text);
    let omegas: Vec<_> = rows.iter().filter(|r| r[0] == "omega").collect();
    let deltas: Vec<_> = rows.iter().filter(|r| r[0] == "delta").collect();
    assert_eq!(omegas.len(), 3);
    assert_eq!(deltas.len(), 2);
    for d in &deltas {
        let v: f64 = d[3].parse().unwrap();
        assert!(v.is_finite() && v >= 0.0);
    }
    assert!(meta_value(&text, "converged_at").is_some());
}

#[test]
fn convergence_default_list_has_five_data_and_four_delta_rows() {
    let dir = temp_dir("conv-default");
    let out = bpes(&[
        "convergence",
        "--grid-nx",
        "21",
        "--grid-nt",
        "11",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = read(&dir, "convergence.csv");
    assert_eq!(meta_value(&text, "n0_list").unwrap(), "11,23,43,57,65");
    let rows = data_rows(&text);
    assert_eq!(rows.iter().filter(|r| r[0] == "omega").count(), 5);
    assert_eq!(rows.iter().filter(|r| r[0] == "delta").count(), 4);
}

#[test]
fn convergence_rejects_single_entry_and_unsorted_lists() {
    let dir = temp_dir("conv-bad");
    let out = bpes(&[
        "convergence",
        "--n0-list",
        "5",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let out = bpes(&[
        "convergence",
        "--n0-list",
        "5,5",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_passes_on_defaults() {
    let dir = temp_dir("verify");
    let out = bpes(&[
        "verify",
        "--n0",
        "6",
        "--grid-nx",
        "101",
        "--grid-nt",
        "11",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = read(&dir, "verify.txt");
    assert!(text.contains("result = pass"));
    assert!(text.contains("polynomial_oracle = pass"));
    assert!(text.contains("kernel_residual = pass"));
}

#[test]
fn verify_trivial_kernel_and_shifted_momentum() {
    // N0 = 1 exercises the trivial-kernel branch (Omega = |a_1|); p != 1
    // exercises the t = 0 restriction of the profile identity.
    for extra in [["--n0", "1"], ["--p", "2.0"]] {
        let dir = temp_dir("verify-edge");
        let out = bpes(&[
            "verify",
            extra[0],
            extra[1],
            "--grid-nx",
            "51",
            "--grid-nt",
            "11",
            "--out",
            dir.to_str().unwrap(),
        ]);
        assert!(
            out.status.success(),
            "{extra:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        assert!(read(&dir, "verify.txt").contains("result = pass"));
    }
}

#[test]
fn verify_chain_rule_modes_both_complete_and_differ() {
    let dir_lit = temp_dir("verify-lit");
    let dir_single = temp_dir("verify-single");
    for (dir, mode) in [(&dir_lit, "literal"), (&dir_single, "single")] {
        let out = bpes(&[
            "verify",
            "--n0",
            "4",
            "--grid-nx",
            "51",
            "--grid-nt",
            "11",
            "--chain-rule",
            mode,
            "--out",
            dir.to_str().unwrap(),
        ]);
        assert!(
            out.status.success(),
            "{mode}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    let lit = read(&dir_lit, "verify.txt");
    let single = read(&dir_single, "verify.txt");
    assert!(lit.contains("chain_rule_mode = literal"));
    assert!(single.contains("chain_rule_mode = single"));
    let row = |text: &str| {
        text.lines()
            .find(|l| l.starts_with("row_norm = "))
            .unwrap()
            .to_string()
    };
    assert_ne!(row(&lit), row(&single));
}

#[test]
fn verify_corrupted_root_table_fails_naming_the_check() {
    let dir = temp_dir("verify-corrupt");
    let out = bpes_env(
        &[
            "verify",
            "--n0",
            "4",
            "--grid-nx",
            "51",
            "--grid-nt",
            "11",
            "--out",
            dir.to_str().unwrap(),
        ],
        "BPES_TEST_CORRUPT_ROOT",
        "2",
    );
    assert_eq!(out.status.code(), Some(6));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("root"), "stderr: {stderr}");
    let text = read(&dir, "verify.txt");
    assert!(text.contains("result = fail: root_residuals"));
}

#[test]
fn config_file_is_read_and_flags_win() {
    let dir = temp_dir("config");
    let config_path = dir.join("run.conf");
    let config_text = "# sample configuration\nn0 = 3\nenergy = 2.0\nout = ignored\n";
    fs::write(&config_path, config_text).unwrap();

    let out = bpes(&[
        "roots",
        "--config",
        config_path.to_str().unwrap(),
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let rows = data_rows(&read(&dir, "roots.csv"));
    assert_eq!(rows.len(), 3); // n0 from the file

    // Flags override the file.
    let out = bpes(&[
        "roots",
        "--config",
        config_path.to_str().unwrap(),
        "--n0",
        "2",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert_eq!(data_rows(&read(&dir, "roots.csv")).len(), 2);

    // The config file itself is never mutated.
    assert_eq!(fs::read_to_string(&config_path).unwrap(), config_text);

    // Unknown keys are a configuration error.
    fs::write(&config_path, "bogus = 1\n").unwrap();
    let out = bpes(&[
        "roots",
        "--config",
        config_path.to_str().unwrap(),
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn emitted_csv_round_trips_at_printed_precision() {
    let dir = temp_dir("roundtrip");
    let out = bpes(&["roots", "--n0", "6", "--out", dir.to_str().unwrap()]);
    assert!(out.status.success());
    let out = bpes(&["solve", "--n0", "6", "--out", dir.to_str().unwrap()]);
    assert!(out.status.success());
    let out = bpes(&[
        "grid",
        "--n0",
        "6",
        "--grid-nx",
        "11",
        "--grid-nt",
        "7",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    for name in ["roots.csv", "coefficients.csv", "density.csv", "u_real.csv"] {
        let text = read(&dir, name);
        for row in data_rows(&text) {
            for cell in &row[1..] {
                let v: f64 = cell.parse().unwrap();
                assert_eq!(&bpes_core::csv::fmt_g15(v), cell, "{name}: {cell}");
            }
        }
    }
}

#[test]
fn invalid_physical_parameters_exit_2() {
    let dir = temp_dir("badparam");
    for args in [
        ["solve", "--energy", "-1.0"],
        ["solve", "--hbar", "0.0"],
        ["solve", "--p", "0.0"],
        ["solve", "--radius", "-2.0"],
    ] {
        let out = bpes(&[args[0], args[1], args[2], "--out", dir.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
}
