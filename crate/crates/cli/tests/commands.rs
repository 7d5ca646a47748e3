use std::process::Command;

use ldg_cli::*;
use ldg_core::bulk::bulk_gradient;
use ldg_core::solver::read_snapshot;

const PAA: &str = "[material]\na = 1.0\nb = 1.0\nc = 1.0\n[frank]\nk1 = 5.0\nk2 = 3.8\nk3 = 10.1\nk4 = 0.0\n";
const ONE: &str = "[material]\na = 1.0\nb = 1.0\nc = 1.0\n[elastic]\nl1 = 1.0\nl2 = 0.0\nl3 = 0.0\nl4 = 0.0\n";

fn cfg(text: &str) -> RunConfig {
    RunConfig::parse(text).unwrap()
}

fn statuses(rec: &ResultRecord) -> Vec<(String, Status)> {
    rec.checks.iter().map(|c| (c.name.clone(), c.status)).collect()
}

#[test]
fn verify_default_config_passes() {
    let rec = cmd_verify(&cfg(PAA)).unwrap();
    assert!(rec.passed(), "{:?}", statuses(&rec));
    assert_eq!(rec.checks.len(), 9);
    assert!(rec.warnings.is_empty());
}

#[test]
fn verify_with_no_samples_skips_everything() {
    let text = format!(
        "{PAA}[sampling]\nidentity_samples = 0\nbulk_samples = 0\nhessian_bound_samples = 0\nprojection_samples = 0\nbrute_force_samples = 0\n"
    );
    let rec = cmd_verify(&cfg(&text)).unwrap();
    assert!(rec.checks.iter().all(|c| c.status == Status::Skipped));
    assert!(rec.passed());
    assert_eq!(rec.warnings.len(), 5);
}

#[test]
fn verify_catches_a_corrupted_bulk_gradient() {
    let hooks = VerifyHooks { bulk_gradient: |q, mc| bulk_gradient(q, mc) * 1.001 };
    let text = format!("{PAA}[sampling]\nidentity_samples = 10\nbulk_samples = 50\n");
    let rec = cmd_verify_with(&cfg(&text), &hooks).unwrap();
    assert!(!rec.passed());
    assert_eq!(rec.check("bulk_gradient_fd").unwrap().status, Status::Fail);
}

#[test]
fn strict_projection_bound_is_reported_as_failing() {
    let text = format!("{PAA}[sampling]\nidentity_samples = 1\n[tolerances]\nstrict_projection_bound = true\n");
    let rec = cmd_verify(&cfg(&text)).unwrap();
    let c = rec.check("projection_bound_half_lambda").unwrap();
    assert_eq!(c.status, Status::Fail);
    assert!(c.measured.unwrap() > 0.25 && c.measured.unwrap() < 0.5);
}

#[test]
fn coercivity_paa_witness_and_positive_alpha() {
    let rec = cmd_coercivity(&cfg(PAA)).unwrap();
    assert!(rec.passed(), "{:?}", statuses(&rec));
    assert!(rec.check("original_witness").unwrap().measured.unwrap() < -1e3);
    let l4 = rec.details["elastic"]["l4"].as_f64().unwrap();
    assert!((l4 - 0.756).abs() < 1e-3);
    assert!(rec.details["witness"]["q"].as_array().unwrap().len() == 5);
}

#[test]
fn coercivity_one_constant_alpha_is_l1() {
    let text = ONE.replace("l1 = 1.0", "l1 = 2.5");
    let rec = cmd_coercivity(&cfg(&format!("{text}[sampling]\ncoercivity_samples = 200\n"))).unwrap();
    let alpha = rec.check("alpha_positive").unwrap().measured.unwrap();
    assert!((alpha - 2.5).abs() <= 1e-14 * 2.5, "{alpha}");
    assert_eq!(rec.check("original_witness").unwrap().status, Status::Skipped);
    assert!(rec.passed());
}

#[test]
fn coercivity_names_the_failing_inequality() {
    let text = ONE.replace("l3 = 0.0", "l3 = 5.0");
    let rec = cmd_coercivity(&cfg(&format!("{text}[sampling]\ncoercivity_samples = 50\n"))).unwrap();
    let c = rec.check("condition_l").unwrap();
    assert_eq!(c.status, Status::Fail);
    assert!(c.note.contains("L3 < 2L1 - s+L4/3"), "{}", c.note);
    assert_eq!(rec.details["condition_l"]["holds"], false);
}

#[test]
fn minimize_hedgehog_passes_with_monotone_log() {
    let out = cmd_minimize(&cfg(&format!("{ONE}[solver]\nl = 0.1\n"))).unwrap();
    assert!(out.record.passed(), "{:?}", statuses(&out.record));
    let log: Vec<f64> =
        out.record.details["minimize"]["energy_log"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    assert!(log.len() > 2 && log.windows(2).all(|w| w[1] <= w[0]));
    let snap = read_snapshot(out.snapshot.unwrap().as_slice()).unwrap();
    assert_eq!(snap.field.dims(), [9, 9, 9]);
}

#[test]
fn resumed_minimize_matches_uninterrupted() {
    let dir = tempfile::tempdir().unwrap();
    let full = cmd_minimize(&cfg(&format!("{ONE}[solver]\nl = 0.05\n"))).unwrap();
    let part = cmd_minimize(&cfg(&format!("{ONE}[solver]\nl = 0.05\n[tolerances]\nmax_iters = 8\n"))).unwrap();
    part.write_to(dir.path()).unwrap();
    let path = dir.path().join("field.ldgq");
    let resumed =
        cmd_minimize(&cfg(&format!("{ONE}[solver]\nl = 0.05\nresume = {:?}\n", path.to_str().unwrap()))).unwrap();
    let e = |o: &Outcome| o.record.details["minimize"]["final_energy"].as_f64().unwrap();
    assert!((e(&full) - e(&resumed)).abs() <= 1e-10 * e(&full).abs());
}

#[test]
fn adversarial_original_density_fails_citing_non_coercivity() {
    let text = format!(
        "{PAA}[solver]\ndims = [5, 5, 5]\nscenario = \"adversarial\"\nl = 1000000.0\nallow_noncoercive = true\n"
    );
    let out = cmd_minimize(&cfg(&text)).unwrap();
    assert!(!out.record.passed());
    let c = out.record.check("minimize").unwrap();
    assert!(c.note.contains("diverged") && c.note.contains("not coercive"), "{}", c.note);
    assert!(out.snapshot.is_none());
    // without the override the solver refuses up front
    let text = text.replace("allow_noncoercive = true\n", "");
    let out = cmd_minimize(&cfg(&text)).unwrap();
    assert!(out.record.check("minimize").unwrap().note.contains("not coercive"));
}

#[test]
fn sweep_writes_one_row_per_l() {
    let out = cmd_sweep(&cfg(&format!("{ONE}[solver]\nl_list = [0.1, 0.05, 0.025, 0.0125]\n"))).unwrap();
    assert!(out.record.passed(), "{:?}", statuses(&out.record));
    let csv = out.csv.unwrap();
    let mut rdr = csv::Reader::from_reader(csv.as_bytes());
    assert_eq!(rdr.headers().unwrap().iter().collect::<Vec<_>>(), CSV_HEADER.to_vec());
    let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 4);
    let bulk: Vec<f64> = rows.iter().map(|r| r[2].parse().unwrap()).collect();
    assert!(bulk[3] < bulk[0], "{bulk:?}");
}

#[test]
fn sweep_records_failed_rows_and_continues() {
    // L4 > 0 with the original density: every L fails, every row is still written
    let text = format!("{PAA}[solver]\ndims = [5, 5, 5]\nl_list = [0.1, 0.05]\n");
    let out = cmd_sweep(&cfg(&text)).unwrap();
    assert!(!out.record.passed());
    let csv = out.csv.unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("0.1,,"));
    assert!(out.record.check("converged[L=0.05]").unwrap().note.contains("not coercive"));
}

#[test]
fn empty_l_list_is_rejected() {
    assert!(matches!(RunConfig::parse(&format!("{ONE}[solver]\nl_list = []\n")), Err(CliError::Config(_))));
}

#[test]
fn sweep_is_deterministic() {
    let text = format!("{ONE}[solver]\ndims = [7, 7, 7]\nh = 0.3333333333333333\nperturbation = 0.05\nl_list = [0.1, 0.05]\n[sampling]\nseed = 9\n");
    let a = cmd_sweep(&cfg(&text)).unwrap();
    let b = cmd_sweep(&cfg(&text)).unwrap();
    assert_eq!(a.csv, b.csv);
    assert_eq!(a.record.to_json(), b.record.to_json());
    let c = cmd_sweep(&cfg(&text.replace("seed = 9", "seed = 10"))).unwrap();
    assert_ne!(a.csv, c.csv);
}

#[test]
fn echoed_config_reparses() {
    let rec = cmd_coercivity(&cfg(&format!("{PAA}[sampling]\ncoercivity_samples = 10\n"))).unwrap();
    let back = RunConfig::parse(&rec.config).unwrap();
    assert_eq!(back, cfg(&format!("{PAA}[sampling]\ncoercivity_samples = 10\n")));
}

fn ldg(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_ldg")).args(args).output().unwrap()
}

#[test]
fn binary_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, text: &str| {
        let p = dir.path().join(name);
        std::fs::write(&p, text).unwrap();
        p.to_str().unwrap().to_string()
    };
    let out = dir.path().join("out");
    let out = out.to_str().unwrap();

    let skip = write("skip.toml", &format!("{PAA}[sampling]\nidentity_samples = 0\nbulk_samples = 0\nhessian_bound_samples = 0\nprojection_samples = 0\nbrute_force_samples = 0\n"));
    let r = ldg(&["verify", "--config", &skip, "--out", out]);
    assert_eq!(r.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&r.stderr).contains("warning"));
    let rec: ResultRecord =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("out/record.json")).unwrap()).unwrap();
    assert_eq!(rec.command, "verify");

    let bad = write("bad.toml", &format!("{PAA}[solver]\nl_list = [0.1, 0.2]\n"));
    let r = ldg(&["sweep", "--config", &bad, "--out", out]);
    assert_eq!(r.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&r.stderr).contains("solver.l_list"));

    let adv = write(
        "adv.toml",
        &format!(
            "{PAA}[solver]\ndims = [5, 5, 5]\nscenario = \"adversarial\"\nl = 1000000.0\nallow_noncoercive = true\n"
        ),
    );
    let r = ldg(&["minimize", "--config", &adv, "--out", out]);
    assert_eq!(r.status.code(), Some(1));

    let r = ldg(&["coercivity", "--config", &skip, "--seed", "5", "--out", out]);
    assert_eq!(r.status.code(), Some(0));
    let rec: ResultRecord =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("out/record.json")).unwrap()).unwrap();
    assert_eq!(rec.seed, 5);
}
