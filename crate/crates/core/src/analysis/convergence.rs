//! Error tables for `MG_w f → f`.

use serde::Serialize;

use super::{rate_fit, require_increasing, ErrorRow, ErrorTable};
use crate::error::Result;
use crate::kernels::Kernel;
use crate::operators::{evaluate_on_grid, OperatorKind, SamplingConfig};
use crate::spaces::{LogGrid, WeightedFunction};

/// Sup and weighted-sup errors of `MG_w f` on `grid` for each rate in `w_list`.
///
/// `config` supplies the domain mode and truncation; its rate is replaced by
/// each entry of `w_list`. Points where the operator fails are counted in the
/// row and left out of the sups.
pub fn convergence_experiment(
    f: &WeightedFunction,
    kernel: &Kernel,
    w_list: &[f64],
    grid: &LogGrid,
    config: &SamplingConfig,
) -> Result<ErrorTable> {
    require_increasing(w_list)?;
    let mut rows = Vec::with_capacity(w_list.len());
    for &w in w_list {
        let cfg = config.with_rate(w)?;
        let eval = evaluate_on_grid(OperatorKind::MaxProduct, f, kernel, &cfg, grid);
        let mut sup = 0.0f64;
        let mut weighted = 0.0f64;
        for row in &eval.rows {
            if let (Some(e), Some(we)) = (row.error_vs_f, row.weighted_error) {
                sup = sup.max(e);
                weighted = weighted.max(we);
            }
        }
        rows.push(ErrorRow {
            w,
            sup_abs_error: sup,
            weighted_sup_error: weighted,
            grid: grid.to_string(),
            failed_points: eval.failures(),
        });
    }
    let mut table = ErrorTable {
        function_name: f.name().to_string(),
        kernel_name: kernel.name().to_string(),
        rows,
        fitted_order: None,
    };
    table.fitted_order = rate_fit(&table).ok();
    Ok(table)
}

/// `|MG_w f(x) - f(x)|` at fixed abscissae, one row per rate.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PointwiseErrors {
    pub function_name: String,
    pub kernel_name: String,
    pub log_x: Vec<f64>,
    pub w: Vec<f64>,
    /// `errors[i][j]` is the error at rate `w[i]` and abscissa `log_x[j]`.
    pub errors: Vec<Vec<Option<f64>>>,
}

impl PointwiseErrors {
    /// Errors at one abscissa across all rates.
    pub fn at(&self, j: usize) -> impl Iterator<Item = Option<f64>> + '_ {
        self.errors.iter().map(move |row| row[j])
    }
}

pub fn pointwise_errors(
    f: &WeightedFunction,
    kernel: &Kernel,
    w_list: &[f64],
    log_points: &[f64],
    config: &SamplingConfig,
) -> Result<PointwiseErrors> {
    require_increasing(w_list)?;
    let mut errors = Vec::with_capacity(w_list.len());
    for &w in w_list {
        let cfg = config.with_rate(w)?;
        let row = log_points
            .iter()
            .map(|&v| {
                let eval = evaluate_on_grid(OperatorKind::MaxProduct, f, kernel, &cfg, &LogGrid::single(v));
                eval.rows[0].error_vs_f
            })
            .collect();
        errors.push(row);
    }
    Ok(PointwiseErrors {
        function_name: f.name().to_string(),
        kernel_name: kernel.name().to_string(),
        log_x: log_points.to_vec(),
        w: w_list.to_vec(),
        errors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::function_from_name;

    #[test]
    fn constants_have_zero_error() {
        let k = Kernel::mellin_bspline(3).unwrap();
        let f = WeightedFunction::constant(1.5);
        let grid = LogGrid::new(-1.0, 1.0, 33).unwrap();
        let table = convergence_experiment(&f, &k, &[2.0, 4.0, 8.0], &grid, &SamplingConfig::new(1.0).unwrap()).unwrap();
        assert!(table.rows.iter().all(|r| r.sup_abs_error == 0.0 && r.weighted_sup_error == 0.0));
        assert_eq!(table.fitted_order, None);
    }

    #[test]
    fn weight_errors_decrease() {
        let k = Kernel::mellin_bspline(3).unwrap();
        let f = function_from_name("weight").unwrap();
        let grid = LogGrid::new(-2.0, 2.0, 257).unwrap();
        let ws = [4.0, 8.0, 16.0, 32.0, 64.0];
        let table = convergence_experiment(&f, &k, &ws, &grid, &SamplingConfig::new(1.0).unwrap()).unwrap();
        for pair in table.rows.windows(2) {
            assert!(pair[1].weighted_sup_error < pair[0].weighted_sup_error, "{table:?}");
        }
        assert!(table.fitted_order.unwrap() > 0.8);
    }

    #[test]
    fn jump_converges_only_at_continuity_points() {
        let k = Kernel::mellin_bspline(3).unwrap();
        let f = function_from_name("jump").unwrap();
        let ws = [8.0, 32.0, 128.0, 512.0];
        let points = [0.0, 0.3, 0.7, 1.0];
        let errs = pointwise_errors(&f, &k, &ws, &points, &SamplingConfig::new(1.0).unwrap()).unwrap();
        for j in 0..points.len() {
            let last = errs.at(j).last().unwrap().unwrap();
            assert_eq!(last, 0.0, "log x = {}", points[j]);
        }
        // just left of the jump the error stays of the size of the jump
        let grid = LogGrid::new(0.3, 0.5 - 1e-9, 257).unwrap();
        let table = convergence_experiment(&f, &k, &ws, &grid, &SamplingConfig::new(1.0).unwrap()).unwrap();
        assert!(table.rows.iter().all(|r| r.sup_abs_error >= 0.5));
    }
}
