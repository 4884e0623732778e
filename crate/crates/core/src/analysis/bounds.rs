//! Weighted image bound, operator norm and quantitative rate.

use serde::Serialize;

use super::{moments_and_eta, require_increasing, BoundCheck};
use crate::error::{Error, Result};
use crate::kernels::{Kernel, ScanPolicy};
use crate::operators::{evaluate_on_grid, ExpSamples, GridEvaluation, OperatorKind, SamplingConfig};
use crate::spaces::{
    default_modulus_grid, function_from_name, psi_log, weight_log, weighted_log_modulus, LogGrid, WeightedFunction,
};

const ABSOLUTE_TOL: f64 = 1e-12;

/// Tightest point of a family of pointwise inequalities `lhs(x) ≤ rhs(x)`.
struct Tightest {
    lhs: f64,
    rhs: f64,
    ratio: f64,
    witness: Option<f64>,
}

impl Tightest {
    fn new() -> Self {
        Self {
            lhs: 0.0,
            rhs: 0.0,
            ratio: f64::NEG_INFINITY,
            witness: None,
        }
    }

    fn push(&mut self, lhs: f64, rhs: f64, at: f64) {
        let ratio = if rhs > 0.0 {
            lhs / rhs
        } else if lhs > ABSOLUTE_TOL {
            f64::INFINITY
        } else {
            0.0
        };
        if ratio > self.ratio {
            *self = Self {
                lhs,
                rhs,
                ratio,
                witness: Some(at),
            };
        }
    }
}

fn ensure_evaluated(eval: &GridEvaluation) -> Result<()> {
    if eval.failures() == eval.rows.len() {
        let reason = eval.rows.first().and_then(|r| r.failure.clone()).unwrap_or_default();
        return Err(Error::InvalidArgument(format!("operator failed at every grid point: {reason}")));
    }
    Ok(())
}

fn successful(eval: &GridEvaluation) -> Result<impl Iterator<Item = (f64, f64)> + '_> {
    ensure_evaluated(eval)?;
    Ok(eval.rows.iter().filter_map(|r| r.value.map(|y| (r.log_x, y))))
}

fn failure_note(eval: &GridEvaluation) -> String {
    match eval.failures() {
        0 => String::new(),
        n => format!("; {n} grid points skipped"),
    }
}

/// `|MG_w(Ψ, x)| ≤ (Ψ(x)/η)[m_0 + (2/w) m_1 + (1/w²) m_2]` at every grid point.
///
/// Reports the values at the grid point where the ratio of the two sides is
/// largest.
pub fn verify_weighted_image_bound(kernel: &Kernel, config: &SamplingConfig, grid: &LogGrid) -> Result<BoundCheck> {
    let (m, eta) =
        moments_and_eta(kernel, &[0.0, 1.0, 2.0], &ScanPolicy::default()).map_err(Error::HypothesisNotMet)?;
    let w = config.w;
    let factor = (m[0] + 2.0 * m[1] / w + m[2] / (w * w)) / eta;
    let psi = function_from_name("psi")?;
    let eval = evaluate_on_grid(OperatorKind::MaxProduct, &psi, kernel, config, grid);
    let mut tightest = Tightest::new();
    for (v, y) in successful(&eval)? {
        tightest.push(y.abs(), psi_log(v) * factor, v);
    }
    Ok(BoundCheck::exact(
        format!("weighted image bound w={w}"),
        tightest.lhs,
        tightest.rhs,
        ABSOLUTE_TOL * tightest.rhs.max(1.0),
        tightest.witness,
    )
    .with_note(format!(
        "max ratio {:.6e}; m0={:.6e} m1={:.6e} m2={:.6e} η={:.6e}{}",
        tightest.ratio,
        m[0],
        m[1],
        m[2],
        eta,
        failure_note(&eval)
    )))
}

/// `‖MG_w f‖_ω̄ / ‖f‖_ω̄ ≤ (1/η²)[m_0 + (1/w²) m_2 + (2/w) m_1]` over `functions`.
///
/// `‖f‖_ω̄` is estimated over the grid and every sample node the operator
/// reads. The note records whether the tighter `1/η` form also held.
pub fn verify_operator_norm(
    kernel: &Kernel,
    config: &SamplingConfig,
    grid: &LogGrid,
    functions: &[WeightedFunction],
) -> Result<BoundCheck> {
    let (m, eta) =
        moments_and_eta(kernel, &[0.0, 1.0, 2.0], &ScanPolicy::default()).map_err(Error::HypothesisNotMet)?;
    if functions.is_empty() {
        return Err(Error::InvalidArgument("operator norm needs at least one function".into()));
    }
    let w = config.w;
    let bracket = m[0] + m[2] / (w * w) + 2.0 * m[1] / w;
    let displayed = bracket / (eta * eta);
    let tighter = bracket / eta;

    let sample_range = match config.interval {
        Some(_) => config.index_set()?,
        None => {
            let lo = config.active_range(kernel, grid.log_min)?;
            let hi = config.active_range(kernel, grid.log_max)?;
            *lo.start()..=*hi.end()
        }
    };

    let mut worst = 0.0f64;
    let mut worst_name = String::new();
    let mut witness = None;
    for f in functions {
        let eval = evaluate_on_grid(OperatorKind::MaxProduct, f, kernel, config, grid);
        let image = successful(&eval)?
            .map(|(v, y)| (v, weight_log(v) * y.abs()))
            .fold((0.0f64, None), |acc, (v, y)| if y > acc.0 { (y, Some(v)) } else { acc });
        let samples = ExpSamples::over(f, w, sample_range.clone())?;
        let sample_norm = samples
            .range()
            .zip(&samples.values)
            .map(|(k, y)| weight_log(k as f64 / w) * y.abs())
            .fold(0.0, f64::max);
        let grid_norm = grid
            .log_abscissae()
            .map(|v| weight_log(v) * f.eval_log(v).abs())
            .fold(0.0, f64::max);
        let norm = sample_norm.max(grid_norm);
        if norm == 0.0 {
            continue;
        }
        let ratio = image.0 / norm;
        if ratio > worst || witness.is_none() {
            worst = ratio;
            worst_name = f.name().to_string();
            witness = image.1;
        }
    }
    let tight_holds = worst <= tighter + ABSOLUTE_TOL;
    Ok(
        BoundCheck::exact(format!("operator norm w={w}"), worst, displayed, ABSOLUTE_TOL, witness).with_note(format!(
            "largest ratio from {worst_name}; 1/η form {} (rhs {tighter:.6e})",
            if tight_holds { "also holds" } else { "fails" }
        )),
    )
}

/// Settings for [`verify_quantitative_rate`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RateOptions {
    /// Multiplies the grid estimate of Ω before it enters the bound.
    pub safety_factor: f64,
    /// Relative slack for the `Consistent` verdict.
    pub slack: f64,
    /// Grid for the Ω estimate.
    pub modulus_grid: LogGrid,
    pub shift_points: usize,
    /// Window half-width; `None` takes the kernel default.
    pub window: Option<u32>,
}

impl Default for RateOptions {
    fn default() -> Self {
        Self {
            safety_factor: 1.0,
            slack: 0.05,
            modulus_grid: default_modulus_grid(),
            shift_points: 65,
            window: None,
        }
    }
}

/// `|MG_w f(x) - f(x)| ≤ 64 Ψ(x) Ω(f, 1/w) (m_0 + m_5) / η` for each `w`,
/// checked pointwise and in weighted-sup form (`Ψ` dropped, `‖·‖_ω̄` on the left).
///
/// Returns two checks per rate, pointwise first.
pub fn verify_quantitative_rate(
    f: &WeightedFunction,
    kernel: &Kernel,
    w_list: &[f64],
    grid: &LogGrid,
    options: &RateOptions,
) -> Result<Vec<BoundCheck>> {
    require_increasing(w_list)?;
    let (m, eta) = moments_and_eta(kernel, &[0.0, 5.0], &ScanPolicy::default()).map_err(Error::HypothesisNotMet)?;
    if f.weighted_bound().is_none() || !f.is_nonnegative() {
        return Err(Error::HypothesisNotMet(format!(
            "{} is not certified nonnegative and weighted-bounded",
            f.name()
        )));
    }
    if w_list[0] < 1.0 {
        return Err(Error::InvalidArgument("the rate bound needs w ≥ 1".into()));
    }
    let constant = 64.0 * (m[0] + m[1]) / eta;
    let mut checks = Vec::with_capacity(2 * w_list.len());
    for &w in w_list {
        let omega =
            weighted_log_modulus(f, 1.0 / w, &options.modulus_grid, options.shift_points)? * options.safety_factor;
        let mut config = SamplingConfig::new(w)?;
        config.window_half_width = options.window;
        let eval = evaluate_on_grid(OperatorKind::MaxProduct, f, kernel, &config, grid);
        let mut pointwise = Tightest::new();
        let mut weighted = (0.0f64, None);
        for row in &eval.rows {
            let (Some(err), Some(werr)) = (row.error_vs_f, row.weighted_error) else {
                continue;
            };
            pointwise.push(err, constant * psi_log(row.log_x) * omega, row.log_x);
            if werr > weighted.0 {
                weighted = (werr, Some(row.log_x));
            }
        }
        ensure_evaluated(&eval)?;
        let note = format!(
            "Ω(f,1/w) ≈ {omega:.6e}; M0=m0={:.6e}, M5=m5={:.6e}, η={eta:.6e}{}",
            m[0],
            m[1],
            failure_note(&eval)
        );
        checks.push(
            BoundCheck::estimated(
                format!("rate pointwise w={w}"),
                pointwise.lhs,
                pointwise.rhs,
                options.slack,
                ABSOLUTE_TOL,
                pointwise.witness,
            )
            .with_note(note.clone()),
        );
        checks.push(
            BoundCheck::estimated(
                format!("rate weighted-sup w={w}"),
                weighted.0,
                constant * omega,
                options.slack,
                ABSOLUTE_TOL,
                weighted.1,
            )
            .with_note(note),
        );
    }
    Ok(checks)
}
