//! Browser bindings: each export takes plain numbers and names and returns a
//! JSON string for the page to plot.

use serde::Serialize;
use wasm_bindgen::prelude::wasm_bindgen;

use expsamp::analysis::convergence_experiment;
use expsamp::kernels::{check_kernel_conditions_with, KERNEL_NAMES};
use expsamp::spaces::FUNCTION_NAMES;
use expsamp::{evaluate_on_grid, function_from_name, Kernel, LogGrid, OperatorKind, SamplingConfig, ScanPolicy, Tolerances};

const MAX_POINTS: usize = 4001;

fn json(value: &impl Serialize) -> Result<String, String> {
    serde_json::to_string(value).map_err(|e| e.to_string())
}

fn grid(log_min: f64, log_max: f64, points: usize) -> Result<LogGrid, String> {
    if points > MAX_POINTS {
        return Err(format!("at most {MAX_POINTS} points"));
    }
    LogGrid::new(log_min, log_max, points).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct Names {
    kernels: Vec<(&'static str, &'static str)>,
    functions: Vec<&'static str>,
}

/// Kernel and function registry names.
#[wasm_bindgen]
pub fn names() -> String {
    let names = Names {
        kernels: KERNEL_NAMES.to_vec(),
        functions: FUNCTION_NAMES.to_vec(),
    };
    serde_json::to_string(&names).expect("static names serialize")
}

#[derive(Serialize)]
struct Curve {
    log_x: Vec<f64>,
    f: Vec<f64>,
    value: Vec<Option<f64>>,
    weighted_sup_error: f64,
    failures: usize,
    notes: Vec<String>,
}

/// Operator `op` (`S`, `I`, `MG`, `E`) applied to `function` at rate `w`,
/// on a uniform grid of `log x`.
#[wasm_bindgen]
pub fn reconstruct(
    op: &str,
    kernel: &str,
    function: &str,
    w: f64,
    log_min: f64,
    log_max: f64,
    points: usize,
) -> Result<String, String> {
    let op: OperatorKind = op.parse().map_err(|e: expsamp::Error| e.to_string())?;
    let kernel = Kernel::from_name(kernel).map_err(|e| e.to_string())?;
    let f = function_from_name(function).map_err(|e| e.to_string())?;
    let grid = grid(log_min, log_max, points)?;
    let config = SamplingConfig::for_kernel(w, &kernel).map_err(|e| e.to_string())?;
    let eval = evaluate_on_grid(op, &f, &kernel, &config, &grid);
    json(&Curve {
        log_x: eval.rows.iter().map(|r| r.log_x).collect(),
        f: eval.rows.iter().map(|r| f.eval_log(r.log_x)).collect(),
        value: eval.values().collect(),
        weighted_sup_error: eval.rows.iter().filter_map(|r| r.weighted_error).fold(0.0, f64::max),
        failures: eval.failures(),
        notes: eval.notes,
    })
}

#[derive(Serialize)]
struct Profile {
    t: Vec<f64>,
    phi: Vec<f64>,
    moments: Vec<(f64, Option<f64>)>,
    eta: f64,
    chi1_holds: bool,
    chi2_holds: bool,
    chi3_holds: bool,
}

/// Log-domain profile `χ(e^t)` of a kernel with its moments `m_0, m_1, m_2` and η.
#[wasm_bindgen]
pub fn kernel_profile(kernel: &str, t_min: f64, t_max: f64, points: usize) -> Result<String, String> {
    let kernel = Kernel::from_name(kernel).map_err(|e| e.to_string())?;
    let grid = grid(t_min, t_max, points)?;
    let scan = ScanPolicy {
        u_points: 512,
        eta_points: 1025,
        max_window: 256,
        ..ScanPolicy::default()
    };
    let report = check_kernel_conditions_with(&kernel, 2.0, 1, &Tolerances::default(), &scan).map_err(|e| e.to_string())?;
    let t: Vec<f64> = grid.log_abscissae().collect();
    json(&Profile {
        phi: t.iter().map(|&t| kernel.eval_log(t)).collect(),
        t,
        moments: report.absolute_moments.iter().map(|m| (m.order, m.value)).collect(),
        eta: report.eta,
        chi1_holds: report.chi1_holds,
        chi2_holds: report.chi2_holds,
        chi3_holds: report.chi3_holds,
    })
}

#[derive(Serialize)]
struct Convergence {
    w: Vec<f64>,
    weighted_sup_error: Vec<f64>,
    fitted_order: Option<f64>,
}

/// Weighted sup errors of the max-product series at `w = w_min · 2^j`,
/// `j < doublings`, on `log x ∈ [-2, 2]`.
#[wasm_bindgen]
pub fn convergence(kernel: &str, function: &str, w_min: f64, doublings: u32) -> Result<String, String> {
    if !(1..=10).contains(&doublings) {
        return Err("doublings must be between 1 and 10".into());
    }
    let kernel = Kernel::from_name(kernel).map_err(|e| e.to_string())?;
    let f = function_from_name(function).map_err(|e| e.to_string())?;
    let w_list: Vec<f64> = (0..doublings).map(|j| w_min * f64::from(1u32 << j)).collect();
    let grid = grid(-2.0, 2.0, 257)?;
    let config = SamplingConfig::for_kernel(w_min, &kernel).map_err(|e| e.to_string())?;
    let table = convergence_experiment(&f, &kernel, &w_list, &grid, &config).map_err(|e| e.to_string())?;
    json(&Convergence {
        w: table.rows.iter().map(|r| r.w).collect(),
        weighted_sup_error: table.rows.iter().map(|r| r.weighted_sup_error).collect(),
        fitted_order: table.fitted_order,
    })
}
