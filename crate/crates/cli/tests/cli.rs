use std::process::{Command, Output};

use twinbeam::{
    evolve, fidelity, threshold_time, ChannelParams, TeleportationParams, Threshold, TwinBeamParams,
};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_twinbeam"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

/// Parse CSV output into a header and rows of raw fields.
fn csv(o: &Output) -> (Vec<String>, Vec<Vec<String>>) {
    let text = stdout(o);
    assert!(!text.contains('\r'));
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(String::from).collect())
        .collect();
    (header, rows)
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

fn tb(lambda: f64) -> TwinBeamParams {
    TwinBeamParams::from_lambda(lambda).unwrap()
}

#[test]
fn evolve_at_zero_is_initial_state() {
    let o = run(&[
        "evolve",
        "--lambda",
        "1",
        "--gamma-rate",
        "1",
        "--thermal-m",
        "0.5",
        "--t",
        "0",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let (h, rows) = csv(&o);
    assert_eq!(
        h,
        [
            "t",
            "tau",
            "sigma_plus_sq",
            "sigma_minus_sq",
            "separable",
            "fidelity"
        ]
    );
    assert_eq!(rows.len(), 1);
    assert!((num(&rows[0][2]) - 2f64.exp() / 4.0).abs() < 1e-14);
    assert!((num(&rows[0][3]) - (-2f64).exp() / 4.0).abs() < 1e-15);
    assert_eq!(rows[0][4], "false");
}

#[test]
fn evolve_at_threshold_is_on_the_boundary() {
    let o = run(&[
        "evolve",
        "--lambda",
        "1",
        "--thermal-m",
        "0.5",
        "--t",
        "0.623089",
    ]);
    let (_, rows) = csv(&o);
    assert!((num(&rows[0][3]) - 0.25).abs() < 1e-5);
}

#[test]
fn separable_column_flips_once() {
    let o = run(&[
        "evolve",
        "--lambda",
        "1",
        "--thermal-m",
        "0.5",
        "--t-start",
        "0",
        "--t-stop",
        "2",
        "--t-steps",
        "41",
    ]);
    let (_, rows) = csv(&o);
    assert_eq!(rows.len(), 41);
    let flags: Vec<bool> = rows.iter().map(|r| r[4] == "true").collect();
    let flips = flags.windows(2).filter(|w| w[0] != w[1]).count();
    assert_eq!(flips, 1);
    assert!(!flags[0] && flags[40]);
}

#[test]
fn evolve_matches_library_exactly() {
    let o = run(&[
        "evolve",
        "--n-mean",
        "3",
        "--gamma-rate",
        "2.5",
        "--thermal-m",
        "0.3",
        "--t",
        "0.17",
    ]);
    let (_, rows) = csv(&o);
    let tb = TwinBeamParams::from_photon_number(3.0).unwrap();
    let v = evolve(&tb, &ChannelParams::new(2.5, 0.3).unwrap(), 0.17).unwrap();
    assert_eq!(num(&rows[0][2]), v.variances.var_plus);
    assert_eq!(num(&rows[0][3]), v.variances.var_minus);
    assert_eq!(num(&rows[0][1]), v.tau);
}

#[test]
fn threshold_examples() {
    let o = run(&[
        "threshold",
        "--lambda",
        "1",
        "--gamma-rate",
        "1",
        "--thermal-m",
        "0.5",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let (h, rows) = csv(&o);
    assert_eq!(h, ["t_s", "tau_s"]);
    let ts = num(&rows[0][0]);
    assert!((ts - 0.623081).abs() < 1e-6);
    assert!((ts - 0.623089).abs() < 1e-5);
    let expected = threshold_time(&tb(1.0), &ChannelParams::new(1.0, 0.5).unwrap());
    assert_eq!(Threshold::Finite(ts), expected);
    assert!(stderr(&o).contains("separable after"));

    let o = run(&["threshold", "--n-mean", "0"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(csv(&o).1[0][0], "0");
}

#[test]
fn pure_loss_threshold_is_infinite() {
    let o = run(&["threshold", "--lambda", "2", "--thermal-m", "0"]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(csv(&o).1[0], ["infinite", "infinite"]);

    let o = run(&[
        "threshold",
        "--lambda",
        "2",
        "--thermal-m",
        "0",
        "--format",
        "json",
    ]);
    assert_eq!(o.status.code(), Some(3));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["t_s"], "infinite");
}

#[test]
fn fidelity_examples() {
    let o = run(&["fidelity", "--lambda", "1", "--t", "0"]);
    let (h, rows) = csv(&o);
    assert_eq!(h, ["t", "fidelity", "quantum"]);
    assert!((num(&rows[0][1]) - 0.880797).abs() < 1e-6);
    assert_eq!(rows[0][2], "true");

    let o = run(&["fidelity", "--lambda", "0", "--t", "0"]);
    let (_, rows) = csv(&o);
    assert_eq!(num(&rows[0][1]), 0.5);
    assert_eq!(rows[0][2], "false");
    let o = run(&["fidelity", "--lambda", "0", "--t", "0", "--inclusive-bound"]);
    assert_eq!(csv(&o).1[0][2], "true");

    let o = run(&[
        "fidelity",
        "--lambda",
        "0.5",
        "--gamma-rate",
        "1",
        "--thermal-m",
        "0.5",
        "--t",
        "0.2",
    ]);
    let f = num(&csv(&o).1[0][1]);
    assert!((f - 0.601059).abs() < 1e-6);
    let lib = fidelity(
        &tb(0.5),
        &ChannelParams::new(1.0, 0.5).unwrap(),
        0.2,
        &TeleportationParams::default(),
    );
    assert_eq!(f, lib.unwrap());
}

#[test]
fn usage_errors_exit_one() {
    for args in [
        vec!["fidelity", "--lambda", "1", "--t", "0", "--eta", "1.5"],
        vec!["fidelity", "--lambda", "1", "--t", "0", "--eta", "0"],
        vec!["evolve", "--lambda", "1", "--n-mean", "2", "--t", "0"],
        vec!["evolve", "--lambda", "1"],
        vec!["evolve", "--t", "1"],
        vec!["evolve", "--lambda", "1", "--t-start", "0", "--t-stop", "1"],
        vec![
            "evolve",
            "--lambda",
            "1",
            "--t-start",
            "1",
            "--t-stop",
            "0",
            "--t-steps",
            "3",
        ],
        vec!["evolve", "--lambda", "1", "--t", "-1"],
        vec!["threshold", "--lambda", "-1"],
        vec!["threshold", "--lambda", "1", "--thermal-m", "-0.1"],
        vec!["threshold", "--lambda", "1", "--gamma-rate", "0"],
        vec!["fig1", "--n-step", "0"],
        vec!["bogus"],
    ] {
        let o = run(&args);
        assert_eq!(o.status.code(), Some(1), "{args:?}: {}", stderr(&o));
        assert!(o.stdout.is_empty(), "{args:?}");
    }
}

#[test]
fn fig1_defaults() {
    let o = run(&["fig1"]);
    assert_eq!(o.status.code(), Some(0));
    let (h, rows) = csv(&o);
    assert_eq!(
        h,
        ["N", "t_s(M=0.1)", "t_s(M=0.3)", "t_s(M=0.7)", "t_s(M=1.0)"]
    );
    assert_eq!(rows.len(), 201);
    assert_eq!(rows[0], ["0", "0", "0", "0", "0"]);
    assert_eq!(rows[5][0], "0.5");
    assert_eq!(rows[200][0], "20");
    let cp = ChannelParams::new(1.0, 0.3).unwrap();
    let n = num(&rows[37][0]);
    let lib = threshold_time(&TwinBeamParams::from_photon_number(n).unwrap(), &cp);
    assert_eq!(Threshold::Finite(num(&rows[37][2])), lib);
}

#[test]
fn fig1_with_pure_loss_curve() {
    let o = run(&[
        "fig1",
        "--n-max",
        "1",
        "--n-step",
        "0.5",
        "--m-values",
        "0,0.5",
    ]);
    let (h, rows) = csv(&o);
    assert_eq!(h, ["N", "t_s(M=0.0)", "t_s(M=0.5)"]);
    assert_eq!(rows[0][1], "0");
    assert_eq!(rows[1][1], "infinite");
    assert_eq!(rows[2][1], "infinite");
}

#[test]
fn csv_is_deterministic() {
    let args = [
        "evolve",
        "--lambda",
        "0.3",
        "--thermal-m",
        "0.5",
        "--t-start",
        "0",
        "--t-stop",
        "0.5",
        "--t-steps",
        "3",
        "--mc-samples",
        "20000",
        "--seed",
        "11",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let (h, rows) = csv(&a);
    assert_eq!(h.len(), 9);
    assert_eq!(rows[0][7], "");
    let mut other = args.to_vec();
    *other.last_mut().unwrap() = "12";
    assert_ne!(run(&other).stdout, a.stdout);
}

#[test]
fn mc_column_tracks_closed_form() {
    let o = run(&[
        "evolve",
        "--lambda",
        "0.3",
        "--thermal-m",
        "0.5",
        "--t",
        "0.5",
        "--mc-samples",
        "200000",
        "--seed",
        "3",
    ]);
    let (_, rows) = csv(&o);
    let (exact, mc, se) = (num(&rows[0][6]), num(&rows[0][7]), num(&rows[0][8]));
    assert!((exact - mc).abs() < 4.0 * se, "{exact} vs {mc} ± {se}");
}

#[test]
fn json_round_trips_exactly() {
    let o = run(&[
        "evolve",
        "--lambda",
        "0.7",
        "--gamma-rate",
        "1.3",
        "--thermal-m",
        "0.2",
        "--t-start",
        "0",
        "--t-stop",
        "1",
        "--t-steps",
        "7",
        "--eta",
        "0.9",
        "--format",
        "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let rows: Vec<twinbeam::tables::EvolveRow> = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(rows.len(), 7);
    let cp = ChannelParams::new(1.3, 0.2).unwrap();
    let tp = TeleportationParams::new(0.9).unwrap();
    for r in &rows {
        let v = evolve(&tb(0.7), &cp, r.t).unwrap();
        assert_eq!(r.sigma_plus_sq, v.variances.var_plus);
        assert_eq!(r.sigma_minus_sq, v.variances.var_minus);
        assert_eq!(r.tau, v.tau);
        assert_eq!(r.fidelity, fidelity(&tb(0.7), &cp, r.t, &tp).unwrap());
    }
    let again = serde_json::to_string_pretty(&rows).unwrap();
    assert_eq!(again.trim_end(), stdout(&o).trim_end());
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f.csv");
    let o = run(&[
        "fidelity",
        "--lambda",
        "1",
        "--t",
        "0",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("t,fidelity,quantum\n0,"));
}

#[test]
fn oracle_tiny_dim_reports_truncation() {
    let o = run(&[
        "oracle",
        "--lambda",
        "0.6",
        "--thermal-m",
        "0.5",
        "--t",
        "0.5",
        "--dim",
        "4",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("raise dim"), "{}", stderr(&o));
}

#[test]
fn oracle_single_point_passes() {
    let o = run(&[
        "oracle",
        "--lambda",
        "0.4",
        "--thermal-m",
        "0.5",
        "--t",
        "0.5",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let (h, rows) = csv(&o);
    let col = |name: &str| h.iter().position(|c| c == name).unwrap();
    assert_eq!(rows.len(), 1);
    assert!(num(&rows[0][col("diff_plus")]) < 1e-5);
    assert!(num(&rows[0][col("diff_minus")]) < 1e-5);
    assert_eq!(rows[0][col("ppt_agree")], "true");
}

#[test]
fn oracle_pure_loss_stays_entangled() {
    let o = run(&[
        "oracle",
        "--lambda",
        "0.5",
        "--thermal-m",
        "0",
        "--t-start",
        "1",
        "--t-stop",
        "5",
        "--t-steps",
        "3",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let (h, rows) = csv(&o);
    let col = h.iter().position(|c| c == "pt_min_eig").unwrap();
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| num(&r[col]) < 0.0));
}
