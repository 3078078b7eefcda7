use std::process::{Command, Output};

fn dzhcp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dzhcp"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn column(csv: &str, name: &str) -> Vec<String> {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let i = header.iter().position(|h| *h == name).unwrap();
    lines
        .map(|l| l.split(',').nth(i).unwrap().to_string())
        .collect()
}

const SMALL_MC: [&str; 8] = [
    "--fix",
    "palm_reps=200",
    "--fix",
    "intensity_reps=10",
    "--fix",
    "window_side=800",
    "--process",
    "typeII",
];

#[test]
fn intensity_sweep_is_a_csv_table() {
    let o = dzhcp(&[
        "intensity",
        "--sweep",
        "lambda_p",
        "1e-6..1e-3",
        "log",
        "7",
        "--process",
        "typeI,typeII",
    ]);
    assert!(o.status.success());
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(
        lines[0],
        "sweep_var,value,process,quantity,analytic,quad_error"
    );
    assert_eq!(lines.len(), 1 + 14);
    assert!(lines[1].starts_with("lambda_p,1e-6,typeI,intensity,"));
    for v in column(&out, "analytic") {
        assert!(v.parse::<f64>().unwrap() > 0.0);
    }
}

#[test]
fn degenerate_throughput_is_intensity_times_success() {
    let args = ["--fix", "lambda_p=3e-5", "--process", "typeI"];
    let get = |cmd: &str| -> f64 {
        let o = dzhcp(&[&[cmd][..], &args[..]].concat());
        assert!(o.status.success(), "{cmd}");
        column(&stdout(&o), "analytic")[0].parse().unwrap()
    };
    let (lam, p, thr) = (get("intensity"), get("success"), get("throughput"));
    assert!((thr - lam * p).abs() <= 1e-12 * thr, "{thr} vs {}", lam * p);
}

#[test]
fn out_flag_writes_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("gain.csv");
    let o = dzhcp(&[
        "gain",
        "--out",
        path.to_str().unwrap(),
        "--process",
        "maternII",
    ]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.lines().nth(1).unwrap().contains(",maternII,gain,"));
}

#[test]
fn config_file_and_fix_compose() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# geometry\nR_tx = 50\nR_cs = 80\nd = 40\n").unwrap();
    let a = dzhcp(&[
        "intensity",
        "--config",
        cfg.to_str().unwrap(),
        "--process",
        "maternI",
    ]);
    let b = dzhcp(&[
        "intensity",
        "--fix",
        "R_tx=50",
        "--fix",
        "R_cs=80",
        "--fix",
        "d=40",
        "--process",
        "maternI",
    ]);
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        &["intensity", "--sweep", "lambda_p", "1..0", "lin", "5"][..],
        &["intensity", "--fix", "alpha=2"],
        &["intensity", "--fix", "nonsense=1"],
        &["intensity", "--process", "typeIII"],
        &["gain", "--fix", "d=130"],
        &["frobnicate"],
        &["intensity", "--config", "/nonexistent/dzhcp.cfg"],
    ] {
        let o = dzhcp(args);
        assert_eq!(
            o.status.code(),
            Some(2),
            "{args:?}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
    }
}

#[test]
fn validate_passes_on_consistent_models() {
    let o = dzhcp(
        &[
            &[
                "validate",
                "--seed",
                "11",
                "--fix",
                "palm_reps=2000",
                "--fix",
                "T=-5dB",
            ][..],
            &SMALL_MC[2..],
        ]
        .concat(),
    );
    let out = stdout(&o);
    assert_eq!(
        out.lines().next().unwrap(),
        "check,process,param_point,analytic,mc_mean,ci_low,ci_high,tolerance,pass"
    );
    assert_eq!(o.status.code(), Some(0), "{out}");
    assert!(column(&out, "pass").iter().all(|p| p == "pass"));
}

#[test]
fn corrupted_area_makes_validate_fail() {
    let mut args = vec![
        "validate",
        "--seed",
        "11",
        "--test-corrupt-vo",
        "1.5",
        "--fix",
        "intensity_reps=100",
    ];
    args.extend_from_slice(&SMALL_MC[..2]);
    args.extend_from_slice(&SMALL_MC[4..]);
    let o = dzhcp(&args);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    let checks = column(&out, "check");
    let pass = column(&out, "pass");
    let i = checks.iter().position(|c| c == "intensity").unwrap();
    assert_eq!(pass[i], "fail");
}

#[test]
fn simulate_dumps_a_realization() {
    let o = dzhcp(&[
        "simulate",
        "--seed",
        "4",
        "--fix",
        "window_side=600",
        "--process",
        "typeI",
    ]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert_eq!(out.lines().next().unwrap(), "x,y,theta,mark,e");
    for line in out.lines().skip(1) {
        let f: Vec<f64> = line.split(',').map(|v| v.parse().unwrap()).collect();
        assert!(f[0].abs() <= 300.0 && f[1].abs() <= 300.0);
        assert!(f[4] == 0.0 || f[4] == 1.0);
    }
}
