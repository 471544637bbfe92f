//! End-to-end tests of the command-line interface: file ingestion, the
//! exit-code contract, and byte-level reproducibility.

use std::path::PathBuf;
use std::process::{Command, Output};

use vacuumlab::channels::QuantumChannel;
use vacuumlab::json::ChannelJson;
use vacuumlab::linops::{CMat, Ket, C64};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_vacuumlab"))
}

fn workdir() -> PathBuf {
    let dir = std::env::temp_dir().join(format!("vacuumlab-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write_channel(name: &str, js: &ChannelJson) -> PathBuf {
    let path = workdir().join(name);
    std::fs::write(&path, serde_json::to_string(js).unwrap()).unwrap();
    path
}

fn identity_file(dim: usize) -> PathBuf {
    let mut js = ChannelJson::from_channel(&QuantumChannel::identity(dim));
    js.vacuum = Some(vacuum_pairs(dim));
    write_channel(&format!("identity-{}.json", dim), &js)
}

fn vacuum_pairs(dim: usize) -> Vec<[f64; 2]> {
    let mut v = vec![[0.0, 0.0]; dim];
    v[0] = [1.0, 0.0];
    v
}

fn bomb_file() -> PathBuf {
    let t = QuantumChannel::reset_to_pure(&Ket::basis(2, 0)).unwrap();
    let mut js = ChannelJson::from_channel(&t);
    js.vacuum = Some(vacuum_pairs(2));
    write_channel("bomb.json", &js)
}

fn damping_file(name: &str, gamma: f64) -> PathBuf {
    let cw = vacuumlab::random::damping_to_pure(&Ket::basis(2, 0), gamma);
    let js = ChannelJson::from_channel_with_vacuum(&cw);
    write_channel(name, &js)
}

fn pinching_file() -> PathBuf {
    let t = vacuumlab::kwiat::pinching_channel(2);
    let mut js = ChannelJson::from_channel(&t);
    js.vacuum = Some(vacuum_pairs(2));
    write_channel("pinching.json", &js)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn decide_feasible_pair_exits_zero() {
    let out = run(&[
        "decide",
        identity_file(2).to_str().unwrap(),
        bomb_file().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let verdict: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(verdict["feasible"], true);
    assert_eq!(verdict["which_isometric"], "A");
    assert_eq!(verdict["witness_basis"].as_array().unwrap().len(), 2);
}

#[test]
fn decide_equal_pair_exits_three() {
    let b = bomb_file();
    let out = run(&["decide", b.to_str().unwrap(), b.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    let verdict: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(verdict["feasible"], false);
}

#[test]
fn decide_dimension_mismatch_exits_one() {
    let out = run(&[
        "decide",
        identity_file(2).to_str().unwrap(),
        identity_file(3).to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn decide_invalid_channel_names_invariant() {
    let path = workdir().join("broken.json");
    std::fs::write(
        &path,
        r#"{"dim":2,"kraus":[[[0.5,0.0],[0.0,0.0],[0.0,0.0],[0.5,0.0]]],"vacuum":[[1.0,0.0],[0.0,0.0]]}"#,
    )
    .unwrap();
    let out = run(&["decide", path.to_str().unwrap(), path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("trace preservation"), "stderr was: {}", err);
}

#[test]
fn simulate_bomb_closed_form() {
    let out = run(&[
        "simulate",
        bomb_file().to_str().unwrap(),
        "-n",
        "100",
        "-k",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let p_i = report["p_interaction"].as_f64().unwrap();
    let want = 1.0 - (std::f64::consts::PI / 200.0).cos().powi(200);
    assert!((p_i - want).abs() < 1e-10);
    assert_eq!(report["mixing"], true);
}

#[test]
fn simulate_identity_has_no_interaction() {
    let out = run(&["simulate", identity_file(2).to_str().unwrap(), "-n", "32"]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(report["p_interaction"].as_f64().unwrap().abs() < 1e-10);
}

#[test]
fn simulate_pinching_warns_but_reports() {
    let out = run(&["simulate", pinching_file().to_str().unwrap(), "-n", "16"]);
    assert_eq!(out.status.code(), Some(0));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(
        err.contains("not mixing"),
        "expected a non-mixing warning, got: {}",
        err
    );
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["mixing"], false);
    assert!(report["p_interaction"].as_f64().is_some());
}

#[test]
fn sweep_damping_slopes() {
    // a mixing channel with a genuine miss probability: error decays like
    // 1/N^2, interaction like 1/N
    let out = run(&[
        "sweep",
        damping_file("damp-sweep.json", 0.5).to_str().unwrap(),
        "--n-grid",
        "8:512:7:log",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let slope_line = text.lines().last().unwrap();
    let fields: Vec<&str> = slope_line.split(',').collect();
    assert_eq!(fields[0], "slope");
    let s_err: f64 = fields[1].parse().unwrap();
    let s_int: f64 = fields[2].parse().unwrap();
    assert!((-2.4..=-1.6).contains(&s_err), "p_error slope {}", s_err);
    assert!(
        (-1.3..=-0.7).contains(&s_int),
        "p_interaction slope {}",
        s_int
    );
    // the bound columns are finite for a mixing channel
    let first_row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert!(first_row[4].parse::<f64>().unwrap().is_finite());
}

#[test]
fn sweep_identity_interaction_column_is_zero() {
    let out = run(&[
        "sweep",
        identity_file(2).to_str().unwrap(),
        "--n-grid",
        "4:32:4:log",
    ]);
    assert_eq!(out.status.code(), Some(0));
    for line in stdout(&out).lines().skip(1) {
        let fields: Vec<&str> = line.split(',').collect();
        if fields[0] == "slope" {
            continue;
        }
        let p_i: f64 = fields[2].parse().unwrap();
        assert!(p_i.abs() < 1e-10);
    }
}

#[test]
fn sweep_pinching_cumulative_column_does_not_decay() {
    let out = run(&[
        "sweep",
        pinching_file().to_str().unwrap(),
        "--n-grid",
        "8:128:5:log",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let slope_line = text.lines().last().unwrap();
    let fields: Vec<&str> = slope_line.split(',').collect();
    // the transmission column carries the cumulative influence sum
    let s_tt: f64 = fields[3].parse().unwrap();
    assert!(s_tt > -0.1, "cumulative influence slope {}", s_tt);
}

#[test]
fn sweep_rejects_tiny_grid() {
    let out = run(&[
        "sweep",
        bomb_file().to_str().unwrap(),
        "--n-grid",
        "1:8:3:log",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn reduce_equal_restriction_gives_identity() {
    let id = identity_file(2);
    let out = run(&["reduce", id.to_str().unwrap(), id.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let js: ChannelJson = serde_json::from_str(&stdout(&out)).unwrap();
    let t = js.to_channel().unwrap();
    assert!(t.choi_distance(&QuantumChannel::identity(2)) < 1e-9);
}

#[test]
fn reduce_pinching_probe_has_unique_fixed_point() {
    let out = run(&[
        "reduce",
        identity_file(2).to_str().unwrap(),
        pinching_file().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let js: ChannelJson = serde_json::from_str(&stdout(&out)).unwrap();
    let t = js.to_channel().unwrap();
    let shifted = t.superoperator().sub(&CMat::identity(4));
    let kernel = vacuumlab::linops::kernel_basis(&shifted, 1e-7);
    assert_eq!(kernel.cols(), 1);
    let q0 = Ket::basis(2, 0).projector().vec_flatten();
    let ip: C64 = kernel
        .column(0)
        .iter()
        .zip(&q0)
        .map(|(a, b)| a.conj() * b)
        .sum();
    assert!((ip.norm() - 1.0).abs() < 1e-8);
}

#[test]
fn reduce_non_isometric_reference_exits_two() {
    let out = run(&[
        "reduce",
        bomb_file().to_str().unwrap(),
        pinching_file().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn reduce_emitted_superchannel_revalidates() {
    let id = identity_file(2);
    let super_path = workdir().join("superchannel.json");
    let out = run(&[
        "reduce",
        id.to_str().unwrap(),
        pinching_file().to_str().unwrap(),
        "--emit-superchannel",
        super_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&super_path).unwrap();
    let js: vacuumlab::json::SuperchannelJson = serde_json::from_str(&text).unwrap();
    let r = js.to_superchannel().unwrap();
    // the folded pre/post realization reproduces the emitted qubit channel
    let emitted: ChannelJson = serde_json::from_str(&stdout(&out)).unwrap();
    let emitted = emitted.to_channel().unwrap();
    let probe = vacuumlab::kwiat::pinching_channel(2);
    let folded = vacuumlab::reduction::apply_via_pre_post(&r, &probe).unwrap();
    assert!(folded.choi_distance(&emitted) < 1e-9);
}

#[test]
fn nogo_audit_on_infeasible_pair_all_hold() {
    let a = damping_file("audit-a.json", 0.3);
    let b = damping_file("audit-b.json", 0.6);
    let out = run(&[
        "nogo-audit",
        a.to_str().unwrap(),
        b.to_str().unwrap(),
        "--trials",
        "6",
        "--seed",
        "11",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 12, "two audit rows per trial");
    for row in rows {
        assert!(row.ends_with(",true"), "audit row failed: {}", row);
    }
}

#[test]
fn nogo_audit_feasible_pair_exits_four() {
    let out = run(&[
        "nogo-audit",
        identity_file(2).to_str().unwrap(),
        bomb_file().to_str().unwrap(),
        "--trials",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn nogo_audit_zero_trials_header_only() {
    let a = damping_file("audit-a0.json", 0.3);
    let b = damping_file("audit-b0.json", 0.6);
    let out = run(&[
        "nogo-audit",
        a.to_str().unwrap(),
        b.to_str().unwrap(),
        "--trials",
        "0",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "trial_id,lhs,rhs,constant_used,holds\n");
}

#[test]
fn outputs_are_byte_identical_for_fixed_seed() {
    let a = damping_file("det-a.json", 0.3);
    let b = damping_file("det-b.json", 0.6);
    let args = [
        "nogo-audit",
        a.to_str().unwrap(),
        b.to_str().unwrap(),
        "--trials",
        "5",
        "--seed",
        "42",
    ];
    let first = bin()
        .args(args)
        .env("VACUUMLAB_THREADS", "1")
        .output()
        .unwrap();
    let second = bin()
        .args(args)
        .env("VACUUMLAB_THREADS", "4")
        .output()
        .unwrap();
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(
        first.stdout, second.stdout,
        "seeded output must not depend on thread count"
    );

    let sweep_args = [
        "sweep",
        a.to_str().unwrap(),
        "--n-grid",
        "8:64:4:log",
        "--seed",
        "42",
    ];
    let s1 = bin()
        .args(sweep_args)
        .env("VACUUMLAB_THREADS", "2")
        .output()
        .unwrap();
    let s2 = bin()
        .args(sweep_args)
        .env("VACUUMLAB_THREADS", "3")
        .output()
        .unwrap();
    assert_eq!(s1.stdout, s2.stdout);
}

#[test]
fn simulate_accepts_hamiltonian_file() {
    // a scaled generator: <v|exp(-iH)v> = cos(0.7 pi/2), so repetition matters
    let h = vacuumlab::kwiat::hamiltonian_half_pi_y(&Ket::basis(2, 0)).scale(C64::new(0.7, 0.0));
    let js = vacuumlab::json::MatrixJson::from_matrix(&h);
    let path = workdir().join("h07.json");
    std::fs::write(&path, serde_json::to_string(&js).unwrap()).unwrap();
    let out = run(&[
        "simulate",
        bomb_file().to_str().unwrap(),
        "-n",
        "20",
        "-k",
        "3",
        "--hamiltonian",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    // absorber probe: exact error is (1/2) C_H^{2K}
    let c_h = (0.7 * std::f64::consts::FRAC_PI_2).cos();
    let want = 0.5 * c_h.powi(6);
    let got = report["p_error"].as_f64().unwrap();
    assert!((got - want).abs() < 1e-10, "{} vs {}", got, want);
}

#[test]
fn out_flag_writes_file() {
    let target = workdir().join("verdict.json");
    let out = run(&[
        "decide",
        identity_file(2).to_str().unwrap(),
        bomb_file().to_str().unwrap(),
        "--out",
        target.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&target).unwrap();
    let verdict: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(verdict["feasible"], true);
}

#[test]
fn json_format_for_audit() {
    let a = damping_file("fmt-a.json", 0.3);
    let b = damping_file("fmt-b.json", 0.6);
    let out = run(&[
        "nogo-audit",
        a.to_str().unwrap(),
        b.to_str().unwrap(),
        "--trials",
        "2",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let rows: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(rows.as_array().unwrap().len(), 4);
    assert_eq!(rows[0]["holds"], true);
}
