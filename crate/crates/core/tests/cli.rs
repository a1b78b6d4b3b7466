use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use internal_gn::io::{read_csv, verify_manifest, DIAGNOSTICS, MANIFEST};

fn gn(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_internal-gn"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

const SMALL: &str = "grid_n = 64\nt_end = 0.2\nsnapshot_times = 0.1\n";

#[test]
fn simulate_writes_a_verified_run_directory() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("small.conf"), SMALL).unwrap();
    let out = gn(&["simulate", "--config", "small.conf", "--out", "run"], dir.path());
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let run = dir.path().join("run");
    for name in [MANIFEST, DIAGNOSTICS, "config.conf", "snap_t0.100000.csv", "snap_t0.200000.csv", "spec_t0.200000.csv"] {
        assert!(run.join(name).exists(), "{name} missing");
    }
    assert!(verify_manifest(&run).unwrap().is_empty());
    let (header, rows) = read_csv(&run.join(DIAGNOSTICS)).unwrap();
    assert_eq!(header.join(","), "t,Z,V,I,H,M,C,hyp_margin,high_band");
    assert_eq!(rows.last().unwrap()[0], 0.2);
}

#[test]
fn finished_runs_are_protected_unless_forced() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("small.conf"), SMALL).unwrap();
    let args = ["simulate", "--config", "small.conf", "--out", "run"];
    assert_eq!(code(&gn(&args, dir.path())), 0);
    let again = gn(&args, dir.path());
    assert_eq!(code(&again), 2);
    assert!(String::from_utf8_lossy(&again.stderr).contains("--force"));
    let mut forced = args.to_vec();
    forced.push("--force");
    assert_eq!(code(&gn(&forced, dir.path())), 0);
}

#[test]
fn kelvin_helmholtz_blow_up_has_its_own_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("kh.conf"), "inv_bond = 0\n").unwrap();
    let out = gn(&["simulate", "--config", "kh.conf", "--multiplier", "id", "--out", "kh"], dir.path());
    assert_eq!(code(&out), 3, "{}", stdout(&out));
    assert!(stdout(&out).contains("blow-up"));
    let run = dir.path().join("kh");
    // the last healthy state is kept next to the initial one
    let snaps: Vec<String> = fs::read_dir(&run)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n.starts_with("snap_t"))
        .collect();
    assert_eq!(snaps.len(), 2, "{snaps:?}");
    assert!(verify_manifest(&run).unwrap().is_empty());
    let manifest = fs::read_to_string(run.join(MANIFEST)).unwrap();
    assert!(manifest.contains("status blow-up"));

    let out = gn(&["simulate", "--config", "kh.conf", "--multiplier", "reg", "--out", "smooth"], dir.path());
    assert_eq!(code(&out), 0);
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("bad.conf"), "gamma = 0.9\nbogus = 1\n").unwrap();
    let out = gn(&["simulate", "--config", "bad.conf"], dir.path());
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
    fs::write(dir.path().join("neg.conf"), "delta = -1\n").unwrap();
    assert_eq!(code(&gn(&["simulate", "--config", "neg.conf"], dir.path())), 2);
    assert_eq!(code(&gn(&["simulate", "--multiplier", "whitham"], dir.path())), 2);
    assert_eq!(code(&gn(&["--preset", "fig9"], dir.path())), 2);
    assert_eq!(code(&gn(&[], dir.path())), 2);
    assert_eq!(code(&gn(&["simulate", "--config", "missing.conf"], dir.path())), 1);
}

#[test]
fn stability_table_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out = gn(&["stability", "--out", "s"], dir.path());
    assert_eq!(code(&out), 0);
    let (header, rows) = read_csv(&dir.path().join("s/stability.csv")).unwrap();
    assert_eq!(
        header.join(","),
        "k,threshold_original,threshold_regularized,threshold_improved,threshold_euler"
    );
    assert_eq!(rows.len(), 1000);
    for r in &rows {
        assert!((r[3] - r[4]).abs() <= 1e-12 * r[4].abs(), "{r:?}");
        assert!(r[1..].iter().all(|t| *t > 0.0));
    }

    fs::write(dir.path().join("flat.conf"), "gamma = 0\n").unwrap();
    let out = gn(&["stability", "--config", "flat.conf", "--out", "g0"], dir.path());
    assert_eq!(code(&out), 0);
    let (_, rows) = read_csv(&dir.path().join("g0/stability.csv")).unwrap();
    assert!(rows.iter().all(|r| r[1..].iter().all(|t| t.is_nan())));

    fs::write(dir.path().join("one.conf"), "k_count = 1\nk_min = 3\nk_max = 3\n").unwrap();
    let out = gn(&["stability", "--config", "one.conf", "--out", "one"], dir.path());
    assert_eq!(code(&out), 0);
    let (_, rows) = read_csv(&dir.path().join("one/stability.csv")).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][0], 3.0);
}

#[test]
fn admissibility_reports() {
    let dir = tempfile::tempdir().unwrap();
    for (m, sigma) in [("id", "0"), ("reg", "1"), ("imp", "0.5")] {
        let out = gn(&["admissibility", "--multiplier", m], dir.path());
        assert_eq!(code(&out), 0);
        let text = stdout(&out);
        assert!(!text.contains("FAILED"), "{text}");
        assert!(text.contains(&format!("|k|^-{sigma}")), "{m}: {text}");
    }

    fs::write(dir.path().join("flat.csv"), "xi,F\n0,1\n10,1\n").unwrap();
    let flat = stdout(&gn(&["admissibility", "--multiplier", "custom:flat.csv"], dir.path()));
    let ident = stdout(&gn(&["admissibility", "--multiplier", "id"], dir.path()));
    let body = |s: &str| {
        s.lines()
            .filter(|l| !l.contains("multiplier,") && !l.starts_with("decay"))
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert_eq!(body(&flat), body(&ident));
    assert!(flat.contains("|k|^-0.000 (log-log fit"), "{flat}");

    fs::write(dir.path().join("bumpy.csv"), "xi,F\n0,1\n1,1\n2,0.2\n3,0.9\n100,0.9\n").unwrap();
    let out = gn(&["admissibility", "--multiplier", "custom:bumpy.csv", "--out", "adm"], dir.path());
    assert_eq!(code(&out), 0);
    let text = fs::read_to_string(dir.path().join("adm/admissibility.txt")).unwrap();
    assert!(text.contains("sub-additivity     FAILED"), "{text}");
}

#[test]
fn sv_and_comparison_subcommands() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("small.conf"), SMALL).unwrap();
    let out = gn(&["sv", "--config", "small.conf", "--out", "sv"], dir.path());
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let cfg = fs::read_to_string(dir.path().join("sv/config.conf")).unwrap();
    assert!(cfg.contains("model = saint_venant"), "{cfg}");

    let out = gn(&["diag-compare", "--config", "small.conf", "--out", "cmp"], dir.path());
    assert_eq!(code(&out), 0);
    let (header, rows) = read_csv(&dir.path().join("cmp/drift.csv")).unwrap();
    assert_eq!(header[0], "inv_bond");
    assert_eq!(rows.len(), 3);
    for tag in ["original", "regularized", "improved"] {
        assert!(dir.path().join("cmp").join(tag).join(MANIFEST).exists());
    }
}

#[test]
fn fig1_preset_recipe() {
    let dir = tempfile::tempdir().unwrap();
    let out = gn(&["--preset", "fig1", "--out", "fig1"], dir.path());
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("minimum threshold"));
    assert!(dir.path().join("fig1/stability.csv").exists());
    assert_eq!(code(&gn(&["--preset", "fig1", "--out", "fig1"], dir.path())), 2);
}

#[test]
fn identical_configs_give_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("small.conf"), SMALL).unwrap();
    for name in ["a", "b"] {
        assert_eq!(code(&gn(&["simulate", "--config", "small.conf", "--out", name], dir.path())), 0);
    }
    let mut compared = 0;
    for entry in fs::read_dir(dir.path().join("a")).unwrap() {
        let name = entry.unwrap().file_name();
        if name == MANIFEST {
            continue;
        }
        let a = fs::read(dir.path().join("a").join(&name)).unwrap();
        let b = fs::read(dir.path().join("b").join(&name)).unwrap();
        assert_eq!(a, b, "{name:?} differs");
        compared += 1;
    }
    assert!(compared >= 6);
}
