use serde_json::Value;

use expsamp_wasm::{convergence, kernel_profile, names, reconstruct};

fn parse(s: Result<String, String>) -> Value {
    serde_json::from_str(&s.unwrap()).unwrap()
}

#[test]
fn names_lists_registries() {
    let v: Value = serde_json::from_str(&names()).unwrap();
    let kernels: Vec<&str> = v["kernels"].as_array().unwrap().iter().map(|k| k[0].as_str().unwrap()).collect();
    assert!(kernels.contains(&"bspline3") && kernels.contains(&"linc0"));
    assert!(v["functions"].as_array().unwrap().iter().any(|f| f == "psi"));
}

#[test]
fn reconstruct_curve_has_one_value_per_point() {
    let v = parse(reconstruct("S", "bspline2", "log", 8.0, -1.0, 1.0, 101));
    assert_eq!(v["log_x"].as_array().unwrap().len(), 101);
    assert_eq!(v["value"].as_array().unwrap().len(), 101);
    assert!(v["weighted_sup_error"].as_f64().unwrap() < 1e-12);
    let mg = parse(reconstruct("MG", "bspline3", "log", 8.0, -1.0, 1.0, 11));
    assert_eq!(mg["notes"].as_array().unwrap().len(), 1);
}

#[test]
fn kernel_profile_reports_moments() {
    let v = parse(kernel_profile("bspline3", -2.0, 2.0, 5));
    let phi: Vec<f64> = v["phi"].as_array().unwrap().iter().map(|p| p.as_f64().unwrap()).collect();
    assert_eq!(phi, [0.0, 0.125, 0.75, 0.125, 0.0]);
    assert_eq!(v["moments"][0][1], 0.75);
    assert!((v["eta"].as_f64().unwrap() - 0.125).abs() < 1e-3);
    let sinc = parse(kernel_profile("linc0", -1.0, 1.0, 3));
    assert!(sinc["moments"][2][1].is_null());
    assert_eq!(sinc["chi1_holds"], false);
}

#[test]
fn convergence_halves_errors() {
    let v = parse(convergence("bspline3", "weight", 4.0, 4));
    let w: Vec<f64> = v["w"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    assert_eq!(w, [4.0, 8.0, 16.0, 32.0]);
    let order = v["fitted_order"].as_f64().unwrap();
    assert!(order > 0.8 && order < 1.5, "{order}");
}

#[test]
fn bad_input_is_an_error_message() {
    assert!(reconstruct("X", "bspline3", "weight", 8.0, -1.0, 1.0, 11).unwrap_err().contains("operator"));
    assert!(reconstruct("MG", "bspline3", "weight", 8.0, 1.0, -1.0, 11).is_err());
    assert!(reconstruct("MG", "bspline3", "weight", 8.0, -1.0, 1.0, 1_000_000).is_err());
    assert!(kernel_profile("nope", -1.0, 1.0, 3).is_err());
    assert!(convergence("bspline3", "weight", 4.0, 0).is_err());
}
