use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use qae_core::{exact_diagonalize, format_matrix, generate_ci_like_matrix, SymmetricMatrix};

const FAST: &str = "reads_per_anneal = 50\nsweeps = 200\n";

fn qae(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qae")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn field(text: &str, key: &str) -> f64 {
    text.lines()
        .find_map(|l| l.strip_prefix(key)?.strip_prefix(" = "))
        .unwrap_or_else(|| panic!("no `{key}` in:\n{text}"))
        .parse()
        .unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn matrix_file(dir: &Path, name: &str, m: &SymmetricMatrix) -> String {
    write(dir, name, &format_matrix(m)).to_str().unwrap().to_string()
}

#[test]
fn solve_diagonal_gives_min_entry() {
    let dir = tempfile::tempdir().unwrap();
    let m = matrix_file(dir.path(), "h.txt", &SymmetricMatrix::diagonal(&[-1.5, 0.25, -0.75]).unwrap());
    let cfg = write(dir.path(), "c.txt", FAST);
    let out = dir.path().join("result.txt");
    let o = qae(&["solve", "--matrix", &m, "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(field(&stdout(&o), "final_energy"), -1.5);
    assert!(out.exists());
    let trace = qae_core::read_trace(dir.path().join("result.txt.trace")).unwrap();
    assert_eq!(trace.len() as f64, field(&stdout(&o), "repeats"));
}

#[test]
fn solve_matches_diag_on_synthetic_9x9() {
    let dir = tempfile::tempdir().unwrap();
    let m = matrix_file(dir.path(), "h.txt", &generate_ci_like_matrix(9, 1.0, 0.2, 4).unwrap());
    let solved = field(&stdout(&qae(&["solve", "--matrix", &m])), "final_energy");
    let exact = field(&stdout(&qae(&["diag", "--matrix", &m])), "lowest_eigenvalue");
    assert!((solved - exact).abs() <= 1e-5, "{solved} vs {exact}");
}

#[test]
fn missing_config_is_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let m = matrix_file(dir.path(), "h.txt", &SymmetricMatrix::identity(2).unwrap());
    let out = dir.path().join("r.txt");
    let o = qae(&["solve", "--matrix", &m, "--config", "/nonexistent/cfg", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!out.exists());
    assert!(o.stdout.is_empty());
}

#[test]
fn input_and_runtime_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(qae(&["solve"]).status.code(), Some(1));
    assert_eq!(qae(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(qae(&["--help"]).status.code(), Some(0));
    let bad = write(dir.path(), "bad.txt", "2\n1 2\n3 1\n");
    assert_eq!(qae(&["diag", "--matrix", bad.to_str().unwrap()]).status.code(), Some(1));
    let cfg = write(dir.path(), "c.txt", "bogus = 3\n");
    let m = matrix_file(dir.path(), "h.txt", &SymmetricMatrix::identity(2).unwrap());
    assert_eq!(
        qae(&["solve", "--matrix", &m, "--config", cfg.to_str().unwrap()]).status.code(),
        Some(1)
    );
    // the computation succeeds but its result cannot be written
    let fast = write(dir.path(), "f.txt", FAST);
    let o = qae(&["solve", "--matrix", &m, "--config", fast.to_str().unwrap(), "--out", "/nonexistent/dir/r.txt"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn compare_on_diagonal_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let m = matrix_file(dir.path(), "h.txt", &SymmetricMatrix::diagonal(&[-2.0, 1.0, 3.0]).unwrap());
    let cfg = write(dir.path(), "c.txt", FAST);
    let o = qae(&["compare", "--matrix", &m, "--config", cfg.to_str().unwrap(), "--reps", "5"]);
    let text = stdout(&o);
    assert!(field(&text, "std_dev").abs() <= 1e-10);
    assert!(field(&text, "delta_percent").abs() <= 1e-10);
}

#[test]
fn compare_runs_are_variational() {
    let dir = tempfile::tempdir().unwrap();
    let h = generate_ci_like_matrix(9, 1.0, 0.2, 2).unwrap();
    let exact = exact_diagonalize(&h).unwrap().lowest();
    let m = matrix_file(dir.path(), "h.txt", &h);
    let cfg = write(dir.path(), "c.txt", &format!("{FAST}seed = 10\n"));
    let text = stdout(&qae(&["compare", "--matrix", &m, "--config", cfg.to_str().unwrap(), "--reps", "5"]));
    let runs: Vec<&str> = text.lines().filter(|l| l.starts_with("run ")).collect();
    assert_eq!(runs.len(), 5);
    for (i, line) in runs.iter().enumerate() {
        let parts: Vec<&str> = line.split_whitespace().collect();
        assert_eq!(parts[3], (10 + i).to_string());
        let e: f64 = parts[5].parse().unwrap();
        assert!(e >= exact - 1e-9);
    }
}

#[test]
fn zero_reps_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let m = matrix_file(dir.path(), "h.txt", &SymmetricMatrix::identity(2).unwrap());
    assert_eq!(qae(&["compare", "--matrix", &m, "--reps", "0"]).status.code(), Some(1));
}

/// Synthetic matrix shifted so that its lowest eigenvalue is `target`.
fn with_ground_energy(dim: usize, seed: u64, target: f64) -> SymmetricMatrix {
    let h = generate_ci_like_matrix(dim, 1.0, 0.2, seed).unwrap();
    let e0 = exact_diagonalize(&h).unwrap().lowest();
    h.shifted(target - e0)
}

#[test]
fn fss_reproduces_tabulated_splitting() {
    let dir = tempfile::tempdir().unwrap();
    let lo = matrix_file(dir.path(), "lo.txt", &with_ground_energy(5, 1, -507.679395));
    let hi = matrix_file(dir.path(), "hi.txt", &with_ground_energy(4, 2, -507.515951));
    let cfg = write(dir.path(), "c.txt", "reads_per_anneal = 100\nsweeps = 300\n");
    let cfg = cfg.to_str().unwrap();
    let ab = stdout(&qae(&["fss", "--lower", &lo, "--upper", &hi, "--config", cfg]));
    assert!((field(&ab, "fss") - 0.163444).abs() <= 2e-6, "{ab}");
    let ba = stdout(&qae(&["fss", "--lower", &hi, "--upper", &lo, "--config", cfg]));
    assert!((field(&ab, "fss") + field(&ba, "fss")).abs() <= 1e-9);
    let same = stdout(&qae(&["fss", "--lower", &lo, "--upper", &lo, "--config", cfg]));
    assert_eq!(field(&same, "fss"), 0.0);
}

fn scan_points(text: &str) -> Vec<(f64, f64)> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| {
            let p: Vec<f64> = l.split_whitespace().take(2).map(|t| t.parse().unwrap()).collect();
            (p[0], p[1])
        })
        .collect()
}

#[test]
fn lambda_scan_minimum_sits_at_ground_energy() {
    let dir = tempfile::tempdir().unwrap();
    let h = generate_ci_like_matrix(6, 1.0, 0.3, 5).unwrap();
    let e0 = exact_diagonalize(&h).unwrap().lowest();
    let m = matrix_file(dir.path(), "h.txt", &h);
    let (lo, hi) = (format!("{}", e0 - 0.4), format!("{}", e0 + 0.23));
    let pts = scan_points(&stdout(&qae(&[
        "lambda-scan", "--matrix", &m, "--lambda-min", &lo, "--lambda-max", &hi, "--steps", "41",
    ])));
    assert_eq!(pts.len(), 41);
    let nearest = pts
        .iter()
        .min_by(|a, b| (a.0 - e0).abs().total_cmp(&(b.0 - e0).abs()))
        .unwrap();
    let lowest = pts.iter().min_by(|a, b| a.1.total_cmp(&b.1)).unwrap();
    assert_eq!(nearest.0, lowest.0);
    assert!(pts.iter().all(|p| p.1 >= e0 - 1e-9));
}

#[test]
fn lambda_scan_of_scalar_is_constant() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "h.txt", "1\n-0.625\n");
    let m = m.to_str().unwrap();
    let pts = scan_points(&stdout(&qae(&[
        "lambda-scan", "--matrix", m, "--lambda-min", "-3", "--lambda-max", "2", "--steps", "6",
    ])));
    assert_eq!(pts.len(), 6);
    assert!(pts.iter().all(|p| p.1 == -0.625));
    let o = qae(&["lambda-scan", "--matrix", m, "--lambda-min", "0", "--lambda-max", "1", "--steps", "1"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn gen_matrix_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g.txt");
    let o = qae(&["gen-matrix", "--dim", "7", "--seed", "3", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let m = qae_core::load_matrix(&out).unwrap();
    assert_eq!(m, generate_ci_like_matrix(7, 1.0, 0.2, 3).unwrap());
    assert_eq!(qae(&["gen-matrix", "--dim", "1"]).status.code(), Some(1));
}

#[test]
fn seed_flag_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let m = matrix_file(dir.path(), "h.txt", &generate_ci_like_matrix(4, 1.0, 0.3, 8).unwrap());
    let cfg = write(dir.path(), "c.txt", "reads_per_anneal = 5\nsweeps = 20\ntotal_repeats = 3\n");
    let run = |seed: &str| stdout(&qae(&["solve", "--matrix", &m, "--config", cfg.to_str().unwrap(), "--seed", seed]));
    assert_eq!(run("7"), run("7"));
}
