use std::path::PathBuf;
use std::process::{Command, Output};

fn preset(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../presets").join(name)
}

fn liesym(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_liesym"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn p(name: &str) -> String {
    preset(name).display().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("liesym-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn verify_flags_time_translation_on_general_metric() {
    let o = liesym(&["verify", &p("vb_general.metric"), &p("vb_general.gens"), "--noether"]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("X2: FAIL"), "{out}");
    for x in ["X1", "X3", "X4", "X5"] {
        assert!(out.contains(&format!("{x}: PASS")), "{out}");
    }
    assert!(out.contains("4/5 generators pass"));
    assert!(out.contains("D(t, s)^2*D(M(t), t)/r - D(t, s)^2*D(Q(t), t)/r^2"), "{out}");
}

#[test]
fn csc_variant_fails_and_cot_variant_passes() {
    let csc = liesym(&["verify", &p("vb_general.metric"), &p("vb_general_noether.gens"), "--liepoint"]);
    assert_eq!(csc.status.code(), Some(1));
    assert!(stdout(&csc).contains("X5: FAIL"));
    let cot = stdout(&liesym(&["verify", &p("vb_general.metric"), &p("vb_general.gens"), "--liepoint"]));
    assert!(cot.contains("X5: PASS"), "{cot}");
}

#[test]
fn concrete_generator_files_verify() {
    for (m, g, mode) in [
        ("vaidya_bonner_M1_Qt.metric", "vb_M1_Qt_noether.gens", "--noether"),
        ("vaidya_bonner_M1_Qt.metric", "vb_M1_Qt_liepoint.gens", "--liepoint"),
        ("vaidya_bonner_Mt_Qt2.metric", "vb_Mt_Qt2_noether.gens", "--noether"),
        ("vaidya_bonner_Mt_Qt2.metric", "vb_Mt_Qt2_liepoint.gens", "--liepoint"),
    ] {
        let o = liesym(&["verify", &p(m), &p(g), mode]);
        assert_eq!(o.status.code(), Some(0), "{g}: {}", stdout(&o));
    }
    // The Lie point scaling is not a Noether symmetry.
    let o = liesym(&["verify", &p("vaidya_bonner_Mt_Qt2.metric"), &p("vb_Mt_Qt2_liepoint.gens"), "--noether"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn analyze_json_round_trips_through_verify() {
    for m in ["vaidya_bonner_M1_Qt.metric", "vaidya_bonner_Mt_Qt2.metric"] {
        let o = liesym(&["analyze", &p(m), "--format", "json"]);
        assert_eq!(o.status.code(), Some(0));
        let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        assert!(v["liepoint"]["dimension"].as_u64().unwrap() >= 5);
        let report = scratch(&format!("{m}.json"), &stdout(&o));
        for mode in ["--noether", "--liepoint"] {
            let r = liesym(&["verify", &p(m), report.to_str().unwrap(), mode]);
            assert_eq!(r.status.code(), Some(0), "{m} {mode}: {}", stdout(&r));
        }
    }
}

#[test]
fn analyze_liepoint_json_for_m1_qt() {
    let o = liesym(&["analyze", &p("vaidya_bonner_M1_Qt.metric"), "--liepoint", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v.get("noether").is_none());
    // d_s, s d_s and the rotation triple.
    assert_eq!(v["liepoint"]["dimension"], 5);
    assert!(v["liepoint"]["fields"].as_array().unwrap().iter().all(|f| f["verified"] == true));
}

#[test]
fn reports_are_byte_deterministic() {
    let args = ["analyze", &p("vaidya_bonner_Mt_Qt2.metric"), "--format", "json"];
    assert_eq!(liesym(&args).stdout, liesym(&args).stdout);
    let opt = ["optimal", &p("vb_general.gens"), "--metric", &p("vb_general.metric"), "--samples", "200", "--seed", "9"];
    assert_eq!(liesym(&opt).stdout, liesym(&opt).stdout);
}

#[test]
fn parse_errors_exit_two_with_position() {
    let text = std::fs::read_to_string(preset("vaidya_bonner.metric")).unwrap();
    let broken = scratch("broken.metric", &text.replace("g 2 2 = r^2", "g 2 2 = (r^2"));
    let o = liesym(&["analyze", broken.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("broken.metric:") && err.contains("column"), "{err}");

    let arity = scratch("arity.gens", "gen A = 0 | 1 | 0\n");
    let o = liesym(&["verify", &p("vb_general.metric"), arity.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("arity.gens:1"), "{}", stderr(&o));

    let o = liesym(&["verify", "/nonexistent.metric", &p("vb_general.gens")]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unsupported_math_exits_three() {
    let metric = scratch("flat.metric", "param s\ncoords x y\ng 0 0 = 1\ng 1 1 = 1\n");
    let gens = scratch("sqrt2.gens", "gen A = 0 | y | 2*x\ngen B = 0 | 1 | 0\ngen C = 0 | 0 | 1\n");
    let o = liesym(&["algebra", gens.to_str().unwrap(), "--metric", metric.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(stderr(&o).contains("minimal polynomial"));
}

#[test]
fn algebra_reports_structure() {
    let o = liesym(&["algebra", &p("vb_general.gens"), "--metric", &p("vb_general.metric"), "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["radical"], serde_json::json!(["X1", "X2"]));
    assert_eq!(v["levi"]["valid"], true);
    assert_eq!(v["killing_form"][2][2], "-2");
    assert_eq!(v["adjoint"][2]["matrix"][3][4], "-sin(q)");
    let tex = stdout(&liesym(&["algebra", &p("vb_general.gens"), "--metric", &p("vb_general.metric"), "--format", "latex"]));
    assert!(tex.contains("\\begin{tabular}") && tex.contains("\\cos"), "{tex}");
}

#[test]
fn optimal_cover_and_single_reduction() {
    let o = liesym(&["optimal", &p("vb_general.gens"), "--metric", &p("vb_general.metric"), "--samples", "300"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["unmatched"].as_array().unwrap().len(), 0);
    assert_eq!(v["separation_failures"].as_array().unwrap().len(), 9);
    let r = liesym(&[
        "optimal", &p("vb_general.gens"), "--metric", &p("vb_general.metric"), "--reduce", "1,2,3,4,0", "--format", "text",
    ]);
    assert_eq!(r.status.code(), Some(0));
    assert!(stdout(&r).contains("case 1: X1 + a2*X2 + a5*X5 [a2 = 2, a5 = 5]"), "{}", stdout(&r));
    let zero = liesym(&["optimal", &p("vb_general.gens"), "--metric", &p("vb_general.metric"), "--reduce", "0,0,0,0,0"]);
    assert_eq!(zero.status.code(), Some(2));
}

#[test]
fn integrate_reports_drift() {
    let o = liesym(&[
        "integrate", &p("vaidya_bonner.metric"), "--bind", "M=1", "--bind", "Q=t",
        "--init", "0,10,1,0,1,0.01,0.02,0.01", "--step", "1e-3", "--span", "2", "--format", "json",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let ints = v["integrals"].as_array().unwrap();
    let phi = ints.iter().find(|i| i["generator"] == "d_phi").unwrap();
    assert!(phi["drift"].as_f64().unwrap() < 1e-6);
    assert_eq!(phi["noether_symmetry"], true);
    let unbound = liesym(&[
        "integrate", &p("vaidya_bonner.metric"), "--bind", "M=1",
        "--init", "0,10,1,0,1,0.01,0.02,0.01", "--step", "1e-3", "--span", "1",
    ]);
    assert_eq!(unbound.status.code(), Some(2));
}
