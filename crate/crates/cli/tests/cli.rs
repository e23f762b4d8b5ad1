use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn qsine(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_qsine"));
    cmd.args(args);
    match threads {
        Some(t) => cmd.env("QSINE_THREADS", t),
        None => cmd.env_remove("QSINE_THREADS"),
    };
    cmd.output().expect("spawn qsine")
}

fn run_into(dir: &Path, args: &[&str]) -> Output {
    let mut all: Vec<&str> = args.to_vec();
    all.extend(["--out", dir.to_str().unwrap()]);
    qsine(&all, Some("1"))
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}

fn column(header: &[String], rows: &[Vec<String>], name: &str) -> Vec<f64> {
    let i = header.iter().position(|h| h == name).unwrap();
    rows.iter().map(|r| r[i].parse().unwrap()).collect()
}

#[test]
fn poisson1d_writes_results_and_manifest() {
    let dir = TempDir::new().unwrap();
    let out = run_into(dir.path(), &["poisson1d", "--n", "16,32", "--p", "3"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let (header, rows) = read_csv(&dir.path().join("results.csv"));
    assert_eq!(
        header,
        [
            "n",
            "p",
            "l2_error_quantum",
            "l2_error_classical",
            "success_probability"
        ]
    );
    assert_eq!(rows.len(), 2);
    let q = column(&header, &rows, "l2_error_quantum");
    let c = column(&header, &rows, "l2_error_classical");
    assert!(q[1] < q[0] && c[1] < c[0]);
    for (a, b) in q.iter().zip(&c) {
        assert!((a - b).abs() < 0.05 * b);
    }

    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["config"]["experiment"], "poisson1d");
    assert_eq!(manifest["config"]["n"], serde_json::json!([16, 32]));
    assert_eq!(manifest["threads"], 1);
    assert_eq!(manifest["files"], serde_json::json!(["results.csv"]));
}

#[test]
fn same_seed_gives_identical_csv() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    let args = [
        "fractional1d",
        "--n",
        "16",
        "--beta",
        "1",
        "--samples",
        "3",
        "--seed",
        "11",
    ];
    assert!(run_into(a.path(), &args).status.success());
    let mut more: Vec<&str> = args.to_vec();
    more.extend(["--out", b.path().to_str().unwrap()]);
    assert!(qsine(&more, Some("2")).status.success());
    for f in ["results.csv", "samples.csv"] {
        let x = fs::read(a.path().join(f)).unwrap();
        let y = fs::read(b.path().join(f)).unwrap();
        assert_eq!(x, y, "{f} differs between runs");
    }
    let (header, rows) = read_csv(&a.path().join("samples.csv"));
    assert_eq!(header, ["beta", "sample", "index", "x", "value"]);
    assert_eq!(rows.len(), 3 * 16);
}

#[test]
fn different_seeds_give_different_samples() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    let base = ["fractional1d", "--n", "16", "--beta", "1", "--samples", "2"];
    let mut x: Vec<&str> = base.to_vec();
    x.extend(["--seed", "1"]);
    let mut y: Vec<&str> = base.to_vec();
    y.extend(["--seed", "2"]);
    assert!(run_into(a.path(), &x).status.success());
    assert!(run_into(b.path(), &y).status.success());
    assert_ne!(
        fs::read(a.path().join("samples.csv")).unwrap(),
        fs::read(b.path().join("samples.csv")).unwrap()
    );
}

#[test]
fn fractional1d_rates_grow_with_beta() {
    let dir = TempDir::new().unwrap();
    let out = run_into(dir.path(), &["fractional1d", "--n", "16,32,64", "--p", "4"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let (header, rows) = read_csv(&dir.path().join("results.csv"));
    assert_eq!(
        header,
        ["n", "beta", "nu", "method", "p", "amplitude", "rel_error"]
    );
    let classical: Vec<&Vec<String>> = rows.iter().filter(|r| r[3] == "classical").collect();
    let quantum: Vec<&Vec<String>> = rows.iter().filter(|r| r[3] == "quantum").collect();
    assert_eq!((classical.len(), quantum.len()), (9, 9));
    assert!(classical.iter().all(|r| r[4].is_empty()));
    let err = |beta: &str, n: &str| -> f64 {
        classical
            .iter()
            .find(|r| r[1] == beta && r[0] == n)
            .unwrap()[6]
            .parse()
            .unwrap()
    };
    let drop = |beta: &str| err(beta, "16") / err(beta, "64");
    assert!(drop("0.5") < drop("1.0") && drop("1.0") < drop("1.5"));
}

#[test]
fn gatecount_ur_orders_shift_implementations() {
    let dir = TempDir::new().unwrap();
    let out = run_into(dir.path(), &["gatecount-ur", "--n", "4,5,6,7"]);
    let (header, rows) = read_csv(&dir.path().join("results.csv"));
    assert_eq!(
        header,
        [
            "series",
            "n",
            "n_qubits",
            "n_ancilla",
            "cnot",
            "u3",
            "total"
        ]
    );
    let total = |series: &str| -> Vec<f64> {
        rows.iter()
            .filter(|r| r[0] == series)
            .map(|r| r[6].parse().unwrap())
            .collect()
    };
    let (mcx, ripple) = (total("U_R/mcx"), total("U_R/ripple"));
    assert_eq!(mcx.len(), 4);
    assert!(ripple.iter().zip(&mcx).all(|(r, m)| r < m));

    let (header, exps) = read_csv(&dir.path().join("exponents.csv"));
    assert_eq!(header, ["series", "exponent", "bound", "within_bound"]);
    let ripple_exp = exps.iter().find(|r| r[0] == "U_R/ripple").unwrap();
    assert_eq!(ripple_exp[3], "true");
    let violated = exps.iter().any(|r| r[3] == "false");
    assert_eq!(out.status.code(), Some(if violated { 3 } else { 0 }));
}

#[test]
fn gatecount_uf_ripple_is_within_bound() {
    let dir = TempDir::new().unwrap();
    let out = run_into(dir.path(), &["gatecount-uf", "--shift", "ripple"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let (_, rows) = read_csv(&dir.path().join("results.csv"));
    assert_eq!(rows.len(), 11);
}

#[test]
fn exponent_violation_exits_with_status_3() {
    let dir = TempDir::new().unwrap();
    let out = run_into(
        dir.path(),
        &[
            "gatecount-ur",
            "--n",
            "3,4,5",
            "--shift",
            "ripple",
            "--exponent-bound",
            "1",
        ],
    );
    assert_eq!(out.status.code(), Some(3));
    assert!(dir.path().join("exponents.csv").exists());
    let manifest = fs::read_to_string(dir.path().join("manifest.json")).unwrap();
    assert!(manifest.contains("U_R/ripple: exponent"));
}

#[test]
fn gatecount_solver_counts_grow() {
    let dir = TempDir::new().unwrap();
    run_into(
        dir.path(),
        &["gatecount-solver", "--n", "16,32,64", "--shift", "ripple"],
    );
    let (header, rows) = read_csv(&dir.path().join("results.csv"));
    let total = column(&header, &rows, "total");
    assert_eq!(total.len(), 3);
    assert!(total[0] < total[1] && total[1] < total[2]);
    assert_eq!(column(&header, &rows, "n_qubits"), [5.0, 6.0, 7.0]);
}

#[test]
fn poisson2d_small_run() {
    let dir = TempDir::new().unwrap();
    let out = run_into(
        dir.path(),
        &["poisson2d", "--n", "8", "--p", "3", "--reference", "64"],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let (header, rows) = read_csv(&dir.path().join("results.csv"));
    assert_eq!(rows.len(), 1);
    assert!(column(&header, &rows, "l2_error_quantum")[0] < 0.1);
}

#[test]
fn fractional2d_small_run() {
    let dir = TempDir::new().unwrap();
    let out = run_into(dir.path(), &["fractional2d", "--n", "8", "--p", "3"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let (header, rows) = read_csv(&dir.path().join("results.csv"));
    assert_eq!(
        header,
        [
            "n",
            "method",
            "p",
            "k_split",
            "rel_error_matern",
            "rel_error_exact"
        ]
    );
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0][1], "exact");
    assert_eq!(rows[1][3], "6");
}

#[test]
fn poisson1d_inhom_small_run() {
    let dir = TempDir::new().unwrap();
    let out = run_into(dir.path(), &["poisson1d-inhom", "--n", "16", "--p", "4"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let (header, rows) = read_csv(&dir.path().join("results.csv"));
    assert!(column(&header, &rows, "l2_error_quantum")[0] < 0.05);
}

#[test]
fn invalid_configs_are_usage_errors() {
    for args in [
        vec!["poisson1d", "--n", "24"],
        vec!["poisson1d", "--p", "0"],
        vec!["poisson1d", "--p", "7"],
        vec!["poisson1d", "--shift", "carry"],
        vec!["nonsense"],
        vec!["plotdata"],
        vec!["poisson1d", "--partition", "5:1"],
    ] {
        let out = qsine(&args, None);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
    let out = qsine(&["gatecount-uf", "--n", "3"], Some("zero"));
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn help_documents_columns() {
    let out = qsine(&["--help"], None);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("n,p,l2_error_quantum,l2_error_classical,success_probability"));
    assert!(text.contains("series,x,y"));
    assert!(text.contains("QSINE_THREADS"));
}

#[test]
fn plotdata_melts_two_columns() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("in.csv");
    fs::write(&input, "n,quantum,classical\n16,0.5,0.4\n32,0.2,0.1\n").unwrap();
    let out = qsine(
        &["plotdata", "--input", input.to_str().unwrap(), "--out", "-"],
        None,
    );
    assert!(out.status.success());
    assert_eq!(
        String::from_utf8(out.stdout).unwrap(),
        "series,x,y\nquantum,16,0.5\nclassical,16,0.4\nquantum,32,0.2\nclassical,32,0.1\n"
    );
}

#[test]
fn plotdata_reads_experiment_output() {
    let dir = TempDir::new().unwrap();
    let out_dir = dir.path().join("run");
    assert!(
        run_into(&out_dir, &["poisson1d", "--n", "16", "--p", "3,4"])
            .status
            .success()
    );
    let out = qsine(
        &[
            "plotdata",
            "--input",
            out_dir.join("results.csv").to_str().unwrap(),
            "--x",
            "n",
            "--group",
            "p",
            "--out",
            dir.path().to_str().unwrap(),
        ],
        None,
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let (header, rows) = read_csv(&dir.path().join("plotdata.csv"));
    assert_eq!(header, ["series", "x", "y"]);
    assert_eq!(rows.len(), 2 * 3);
    assert_eq!(rows[0][0], "3/l2_error_quantum");
}

#[test]
fn plotdata_empty_input_and_missing_file() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("empty.csv");
    fs::write(&input, "").unwrap();
    let out = qsine(
        &["plotdata", "--input", input.to_str().unwrap(), "--out", "-"],
        None,
    );
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "series,x,y\n");

    let missing = dir.path().join("missing.csv");
    let out = qsine(
        &[
            "plotdata",
            "--input",
            missing.to_str().unwrap(),
            "--out",
            "-",
        ],
        None,
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing.csv"));
}
