//! Numerical verification of the approximation bounds, convergence rates and
//! asymptotic expansion of the max-product operator.
//!
//! Every check returns a [`BoundCheck`]. Inequalities that compare exactly
//! computed quantities get `Holds`/`Violated`; inequalities whose right side
//! uses a grid estimate of a supremum (Ω, norms) can only be `Consistent` with
//! the bound, up to a relative slack.

mod bounds;
mod convergence;
mod lemmas;
mod voronovskaja;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernels::{discrete_absolute_moment, eta_lower_bound, Kernel, ScanPolicy};

pub use bounds::{verify_operator_norm, verify_quantitative_rate, verify_weighted_image_bound, RateOptions};
pub use convergence::{convergence_experiment, pointwise_errors, PointwiseErrors};
pub use lemmas::{
    constant_consistency, lattice_property_check, lemma_suite, lemma_suite_with, modulus_property_suite,
    LemmaOptions, ModulusOptions,
};
pub use voronovskaja::{voronovskaja_check, MomentVariant, VoronovskajaOptions, VoronovskajaReport, VoronovskajaRow};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    /// Exact inequality holds within the absolute tolerance.
    Holds,
    /// Inequality against a grid estimate holds within the relative slack.
    Consistent,
    /// Violated beyond tolerance or slack.
    Violated,
    /// The hypotheses of the statement fail, so nothing was checked.
    HypothesisNotMet,
}

/// Outcome of checking `lhs ≤ rhs`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundCheck {
    pub bound_name: String,
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs ≤ rhs + tolerance`.
    pub holds: bool,
    /// `rhs - lhs`.
    pub slack: f64,
    pub tolerance: f64,
    /// Log-domain abscissa (or `log u`) of the tightest point.
    pub witness: Option<f64>,
    pub verdict: Verdict,
    pub note: String,
}

impl BoundCheck {
    /// Inequality between exactly computed quantities.
    pub fn exact(name: impl Into<String>, lhs: f64, rhs: f64, tolerance: f64, witness: Option<f64>) -> Self {
        let holds = lhs <= rhs + tolerance;
        Self {
            bound_name: name.into(),
            lhs,
            rhs,
            holds,
            slack: rhs - lhs,
            tolerance,
            witness,
            verdict: if holds { Verdict::Holds } else { Verdict::Violated },
            note: String::new(),
        }
    }

    /// Inequality whose right side comes from a lower estimate of a supremum;
    /// `relative_slack` scales with `|rhs|`.
    pub fn estimated(
        name: impl Into<String>,
        lhs: f64,
        rhs: f64,
        relative_slack: f64,
        absolute: f64,
        witness: Option<f64>,
    ) -> Self {
        let tolerance = relative_slack * rhs.abs() + absolute;
        let holds = lhs <= rhs + tolerance;
        Self {
            bound_name: name.into(),
            lhs,
            rhs,
            holds,
            slack: rhs - lhs,
            tolerance,
            witness,
            verdict: if holds { Verdict::Consistent } else { Verdict::Violated },
            note: String::new(),
        }
    }

    pub fn hypothesis_not_met(name: impl Into<String>, reason: impl Into<String>) -> Self {
        Self {
            bound_name: name.into(),
            lhs: f64::NAN,
            rhs: f64::NAN,
            holds: false,
            slack: f64::NAN,
            tolerance: 0.0,
            witness: None,
            verdict: Verdict::HypothesisNotMet,
            note: reason.into(),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }

    /// Violated while its hypotheses were met.
    pub fn is_violation(&self) -> bool {
        self.verdict == Verdict::Violated
    }
}

/// Errors of one operator run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ErrorRow {
    pub w: f64,
    pub sup_abs_error: f64,
    pub weighted_sup_error: f64,
    pub grid: String,
    /// Grid points where the operator could not be evaluated.
    pub failed_points: usize,
}

/// Errors over increasing rates `w`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ErrorTable {
    pub function_name: String,
    pub kernel_name: String,
    pub rows: Vec<ErrorRow>,
    pub fitted_order: Option<f64>,
}

/// Empirical order: the negated least-squares slope of
/// `log(weighted_sup_error)` against `log w`.
pub fn rate_fit(table: &ErrorTable) -> Result<f64> {
    let points: Vec<(f64, f64)> = table
        .rows
        .iter()
        .filter(|r| r.w > 0.0 && r.weighted_sup_error > 0.0 && r.weighted_sup_error.is_finite())
        .map(|r| (r.w.ln(), r.weighted_sup_error.ln()))
        .collect();
    if points.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "rate fit needs 3 rows with positive errors, got {}",
            points.len()
        )));
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientData("rate fit needs distinct w values".into()));
    }
    Ok(-sxy / sxx)
}

/// Absolute moments at `orders` and η, or the reason a hypothesis fails.
pub(crate) fn moments_and_eta(
    kernel: &Kernel,
    orders: &[f64],
    scan: &ScanPolicy,
) -> std::result::Result<(Vec<f64>, f64), String> {
    let mut values = Vec::with_capacity(orders.len());
    for &nu in orders {
        match discrete_absolute_moment(kernel, nu, scan) {
            Ok(m) => values.push(m.value),
            Err(e) => return Err(format!("(χ1) fails for {}: {e}", kernel.name())),
        }
    }
    let eta = eta_lower_bound(kernel, scan.eta_points).map_err(|e| e.to_string())?;
    if !(eta > 0.0) {
        return Err(format!("(χ2) fails for {}: η = {eta:e}", kernel.name()));
    }
    Ok((values, eta))
}

pub(crate) fn require_increasing(w_list: &[f64]) -> Result<()> {
    if w_list.is_empty() {
        return Err(Error::InvalidArgument("empty list of rates".into()));
    }
    if w_list.iter().any(|w| !(*w > 0.0 && w.is_finite())) {
        return Err(Error::InvalidArgument("rates must be positive".into()));
    }
    if w_list.windows(2).any(|p| p[0] >= p[1]) {
        return Err(Error::InvalidArgument("rates must be strictly increasing".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(errors: &[(f64, f64)]) -> ErrorTable {
        ErrorTable {
            function_name: "f".into(),
            kernel_name: "k".into(),
            rows: errors
                .iter()
                .map(|&(w, e)| ErrorRow {
                    w,
                    sup_abs_error: e,
                    weighted_sup_error: e,
                    grid: "-1:1:3".into(),
                    failed_points: 0,
                })
                .collect(),
            fitted_order: None,
        }
    }

    #[test]
    fn rate_fit_examples() {
        let ws = [4.0, 8.0, 16.0, 32.0];
        let first: Vec<_> = ws.iter().map(|&w| (w, 3.0 / w)).collect();
        assert!((rate_fit(&table(&first)).unwrap() - 1.0).abs() < 1e-12);
        let second: Vec<_> = ws.iter().map(|&w| (w, 0.5 / (w * w))).collect();
        assert!((rate_fit(&table(&second)).unwrap() - 2.0).abs() < 1e-12);
        let flat: Vec<_> = ws.iter().map(|&w| (w, 0.1)).collect();
        assert!(rate_fit(&table(&flat)).unwrap().abs() < 1e-12);
        assert!(matches!(
            rate_fit(&table(&[(4.0, 1.0), (8.0, 0.5)])),
            Err(Error::InsufficientData(_))
        ));
        assert!(rate_fit(&table(&[(4.0, 1.0), (8.0, 0.0), (16.0, 0.2)])).is_err());
    }

    #[test]
    fn bound_check_verdicts() {
        let c = BoundCheck::exact("x", 1.0, 1.0, 0.0, None);
        assert!(c.holds && c.verdict == Verdict::Holds && c.slack == 0.0);
        let c = BoundCheck::exact("x", 1.0 + 1e-13, 1.0, 1e-12, None);
        assert!(c.holds);
        let c = BoundCheck::estimated("x", 1.04, 1.0, 0.05, 0.0, None);
        assert_eq!(c.verdict, Verdict::Consistent);
        let c = BoundCheck::estimated("x", 1.06, 1.0, 0.05, 0.0, None);
        assert!(c.is_violation());
        let c = BoundCheck::hypothesis_not_met("x", "η = 0");
        assert!(!c.holds && !c.is_violation());
        let json = serde_json::to_value(&c).unwrap();
        assert_eq!(json["verdict"], "hypothesis-not-met");
        assert!(json["lhs"].is_null());
    }
}
