use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use cascade_sim::{parse_config, RunManifest};

fn cascade_sim(dir: &Path, args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_cascade-sim"));
    cmd.current_dir(dir).args(args);
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn ok(output: Output) -> Output {
    assert!(
        output.status.success(),
        "exit {:?}, stderr: {}",
        output.status,
        String::from_utf8_lossy(&output.stderr)
    );
    output
}

fn read(path: impl AsRef<Path>) -> String {
    fs::read_to_string(path).unwrap()
}

fn manifest(path: impl AsRef<Path>) -> RunManifest {
    serde_json::from_str(&read(path)).unwrap()
}

#[test]
fn run_without_steps_writes_flat_trajectories() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("c.txt"), "n = 40\nsteps = 0\n").unwrap();
    ok(cascade_sim(dir.path(), &["run", "--config", "c.txt", "--realizations", "3", "--out", "t.csv"], &[]));
    assert_eq!(
        read(dir.path().join("t.csv")),
        "realization,t,nd_cum,panic_active,rescues_used\n0,0,0,false,0\n1,0,0,false,0\n2,0,0,false,0\n"
    );
    let m = manifest(dir.path().join("t.manifest.json"));
    assert_eq!(m.tool, "cascade-sim");
    assert_eq!(m.version, env!("CARGO_PKG_VERSION"));
    assert_eq!(m.config.realizations, 3);
    assert_eq!(m.config.steps, 0);
    assert_eq!(m.data_file, "t.csv");
    assert_eq!(m.summary["nd_mean"], 0.0);
    assert!(m.wall_clock_seconds >= 0.0);
}

#[test]
fn identical_invocations_replay_byte_for_byte() {
    let dir = tempfile::tempdir().unwrap();
    let config = "n = 120\nh = 0.1\nbailout_budget = 2\nrealizations = 6\naxis = j0\nvalues = 0, 0.02, 0.05\n";
    fs::write(dir.path().join("c.txt"), config).unwrap();
    let args = |out: &'static str| ["sweep", "--config", "c.txt", "--seed", "9", "--out", out];
    ok(cascade_sim(dir.path(), &args("a.csv"), &[("CASCADE_SIM_THREADS", "1")]));
    ok(cascade_sim(dir.path(), &args("b.csv"), &[("CASCADE_SIM_THREADS", "3")]));
    let a = fs::read(dir.path().join("a.csv")).unwrap();
    assert_eq!(a, fs::read(dir.path().join("b.csv")).unwrap());
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with("axis,value,n,h,b,p0,q0,realizations,nd_mean,nd_std,nd_over_n_mean,nd_over_n_std\n"));
    assert_eq!(text.lines().count(), 4);

    ok(cascade_sim(dir.path(), &["sweep", "--config", "c.txt", "--seed", "10", "--out", "c.csv"], &[]));
    assert_ne!(read(dir.path().join("c.csv")), text);
}

#[test]
fn manifest_configuration_reproduces_the_data() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("c.txt"), "n = 80\nj0_values = 0, 0.03\nb_values = 1, 4\nh = 0.2\n").unwrap();
    ok(cascade_sim(
        dir.path(),
        &["rescue", "--config", "c.txt", "--realizations", "5", "--out", "first.csv", "steps=6", "top_boundary=restrict_spin"],
        &[],
    ));
    let m = manifest(dir.path().join("first.manifest.json"));
    assert_eq!(parse_config(&m.config_text).unwrap(), m.config);
    assert_eq!(m.config.steps, 6);

    fs::write(dir.path().join("replay.txt"), &m.config_text).unwrap();
    ok(cascade_sim(dir.path(), &["rescue", "--config", "replay.txt", "--out", "second.csv"], &[]));
    let first = read(dir.path().join("first.csv"));
    assert_eq!(first, read(dir.path().join("second.csv")));
    assert!(first.starts_with("j0,h,b,delta_nd_over_n,realizations\n"));
    assert_eq!(first.lines().count(), 5);
}

#[test]
fn susceptibility_rows_follow_schema() {
    let dir = tempfile::tempdir().unwrap();
    ok(cascade_sim(
        dir.path(),
        &["susceptibility", "--realizations", "4", "--out", "chi.csv", "n=60", "j0_values=0,0.01", "delta_h=0.5"],
        &[],
    ));
    let text = read(dir.path().join("chi.csv"));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "j0,delta_h,chi,chi_std,realizations");
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("0,0.5,"));
    assert!(lines[2].starts_with("0.01,0.5,"));
    assert!(lines[2].ends_with(",4"));
}

#[test]
fn strong_field_mean_field_has_one_attractor() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("mf.txt"), "jtilde = 3.5\nh = 1.0\nresolution = 21\n").unwrap();
    ok(cascade_sim(dir.path(), &["meanfield", "--config", "mf.txt", "--out", "basin.csv"], &[]));
    let text = read(dir.path().join("basin.csv"));
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("p0,q0,p_inf,q_inf,converged,iterations"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 21 * 22 / 2);
    let p_inf: Vec<f64> = rows.iter().map(|r| r[2].parse().unwrap()).collect();
    assert!(rows.iter().all(|r| r[4] == "true"));
    let (lo, hi) = p_inf.iter().fold((f64::MAX, f64::MIN), |(lo, hi), &p| (lo.min(p), hi.max(p)));
    assert!(hi - lo < 1e-6);
    assert!((lo - 0.98).abs() < 0.02);
}

#[test]
fn invalid_configurations_fail_with_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    for (text, needle) in [
        ("p0 = 0.7\nq0 = 0.7\n", "line 1: `p0`: p0 + q0 must not exceed 1"),
        ("n = 5\nsigma_j = -1\n", "line 2: `sigma_j`"),
        ("speed = 3\n", "line 1: `speed`: unknown key"),
        ("n = ten\n", "line 1: `n`: malformed number"),
    ] {
        fs::write(dir.path().join("bad.txt"), text).unwrap();
        let out = cascade_sim(dir.path(), &["run", "--config", "bad.txt"], &[]);
        assert!(!out.status.success());
        let stderr = String::from_utf8_lossy(&out.stderr);
        assert!(stderr.contains(needle), "{stderr:?} lacks {needle:?}");
    }
    assert!(!dir.path().join("run.csv").exists());

    let missing = cascade_sim(dir.path(), &["run", "--config", "nope.txt"], &[]);
    assert!(!missing.status.success());
    assert!(String::from_utf8_lossy(&missing.stderr).contains("nope.txt"));

    let no_axis = cascade_sim(dir.path(), &["sweep", "n=10"], &[]);
    assert!(!no_axis.status.success());
    assert!(String::from_utf8_lossy(&no_axis.stderr).contains("axis"));

    let threads = cascade_sim(dir.path(), &["run", "n=10", "steps=0"], &[("CASCADE_SIM_THREADS", "zero")]);
    assert!(!threads.status.success());
    assert!(String::from_utf8_lossy(&threads.stderr).contains("CASCADE_SIM_THREADS"));
}
