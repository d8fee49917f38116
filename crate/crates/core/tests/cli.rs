//! End-to-end runs of the command-line binary.

use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_invexkit"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn list_names_every_entry() {
    let o = run(&["list"]);
    assert!(o.status.success());
    let text = stdout(&o);
    for id in [
        "abslog",
        "fracx",
        "fraclog",
        "logreg",
        "powreg",
        "ratioreg",
        "pert1",
        "pert2",
        "sepPert",
        "noStat",
        "tangentDemo",
    ] {
        assert!(text.lines().any(|l| l.starts_with(id)), "{id} missing");
    }
    assert_eq!(text, stdout(&run(&["list"])));
}

#[test]
fn check_fraction_passes_requested_properties() {
    let o = run(&[
        "check",
        "fracx",
        "--properties",
        "invex,pseudoconvex",
        "--pairs",
        "20000",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let d = json(&o);
    assert_eq!(d["schema"], "invexkit/1");
    let e = &d["entries"][0];
    assert_eq!(
        e["observed_class"],
        serde_json::json!(["invex", "pseudoconvex"])
    );
    assert_eq!(e["properties"].as_array().unwrap().len(), 2);
}

#[test]
fn check_log_regularizer_fails_quasiconvexity_as_expected() {
    let o = run(&[
        "check",
        "logreg",
        "--properties",
        "quasiconvex",
        "--pairs",
        "20000",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let d = json(&o);
    let c = &d["entries"][0]["properties"][0]["checks"][0];
    assert_eq!(c["passed"], false);
    let w = &c["witness"];
    let (x, y) = (&w["x"], &w["y"]);
    // the worst pair lies near opposite axes
    let on_axis = |p: &serde_json::Value, i: usize| p[i].as_f64().unwrap().abs() < 0.5;
    assert!(
        (on_axis(x, 0) && on_axis(y, 1)) || (on_axis(x, 1) && on_axis(y, 0)),
        "{w}"
    );
    assert!(c["runtime"]["value"].as_u64().unwrap() > 0);
}

#[test]
fn saddle_free_function_is_vacuously_invex() {
    let o = run(&[
        "check",
        "noStat",
        "--properties",
        "invex",
        "--pairs",
        "20000",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let checks = json(&o)["entries"][0]["properties"][0]["checks"].clone();
    assert_eq!(checks[1]["check"], "stationary_global");
    assert_eq!(checks[1]["considered"], 0);
    assert_eq!(checks[1]["passed"], true);
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(run(&["check", "nope"]).status.code(), Some(2));
    assert_eq!(
        run(&["check", "fracx", "--properties", "smooth"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(run(&["plot-data", "fig9"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(
        run(&["minimize", "fracx", "--x0", "-1"]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(&["minimize", "fracx", "--x0", "1", "--step", "newton:1"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn minimize_perturbed_quadratic_with_polyak_steps() {
    let o = run(&["minimize", "pert2", "--x0", "8", "--step", "polyak:-6"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "iteration,x1,value,subgrad_norm");
    let last: Vec<f64> = text
        .lines()
        .last()
        .unwrap()
        .split(',')
        .map(|v| v.parse().unwrap())
        .collect();
    assert!(last[1].abs() <= 1e-6);
    assert!((last[2] + 6.0).abs() <= 1e-8);
}

#[test]
fn minimize_saddle_in_box_is_flagged() {
    let o = run(&[
        "minimize", "noStat", "--x0", "0,0", "--box", "-1,1", "--pairs", "20000",
    ]);
    assert!(o.status.success());
    let err = String::from_utf8(o.stderr.clone()).unwrap();
    assert!(err.contains("NON-GLOBAL-KKT"), "{err}");
    let last = stdout(&o).lines().last().unwrap().to_string();
    let row: Vec<f64> = last.split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!((row[1], row[2]), (-1.0, 0.0));
}

#[test]
fn minimize_fraction_from_its_minimum_stops_at_once() {
    let o = run(&["minimize", "fracx", "--x0", "1"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 2);
}

#[test]
fn plot_data_rows() {
    let fig1 = stdout(&run(&["plot-data", "fig1"]));
    let rows: Vec<Vec<f64>> = fig1
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 801);
    let at2 = rows.iter().find(|r| r[0] == 2.0).unwrap();
    assert!((at2[1] - 0.8).abs() <= 1e-15 && (at2[2] - 0.8).abs() <= 1e-15);
    assert!(rows.iter().all(|r| r[1] - r[2] >= -1e-12));

    let fig2 = stdout(&run(&["plot-data", "fig2"]));
    assert!(fig2.starts_with("x,y,f\n"));
    assert!(fig2
        .lines()
        .any(|l| l == "0.0000000000000000e0,0.0000000000000000e0,0.0000000000000000e0"));
    assert_eq!(fig2.lines().count(), 1 + 81 * 81);

    for (fig, rows) in [
        ("fig3a", 1001),
        ("fig5b", 2001),
        ("fig3b", 101 * 101),
        ("fig5a", 101 * 101),
        ("fig5c", 101 * 101),
    ] {
        let out = run(&["plot-data", fig]);
        assert!(out.status.success(), "{fig}");
        assert_eq!(stdout(&out).lines().count(), rows + 1, "{fig}");
    }
}
