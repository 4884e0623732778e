//! Quantitative asymptotic expansion of `MG_w f`.
//!
//! For `f` with `r` Mellin derivatives the check compares
//!
//! ```text
//! L_w(x) = | w^r [ MG_w f(x) - (1/M_0) Σ_{t=0}^{r} θ^t f(x) M_t / (t! w^t) ] |
//! R_w(x) = 64 / (r! M_0) · Ψ(x) · Ω(θ^r f, 1/w) · (m_r + m_{r+5})
//! ```
//!
//! The moment constants `M_t` are read four ways: signed or absolute join,
//! and either at the reference point `u = 1` (`literal`) or at `u = x^w`
//! (`pointwise`, which matches the operator's own normalization).

use serde::Serialize;

use super::{moments_and_eta, require_increasing, BoundCheck};
use crate::error::{Error, Result};
use crate::kernels::{algebraic_moment_log, algebraic_variation, AlgebraicVariation, Kernel, ScanPolicy, Tolerances};
use crate::operators::{evaluate_on_grid, OperatorKind, SamplingConfig};
use crate::spaces::{default_modulus_grid, psi_log, weighted_log_modulus, LogGrid, WeightedFunction};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VoronovskajaOptions {
    /// Fail with `HypothesisNotMet` when the algebraic moments vary with `u`.
    pub strict: bool,
    pub slack: f64,
    pub tolerances: Tolerances,
    pub scan: ScanPolicy,
    /// Grid and shift count for `Ω(θ^r f, 1/w)`.
    pub modulus_grid: LogGrid,
    pub shift_points: usize,
}

impl Default for VoronovskajaOptions {
    fn default() -> Self {
        Self {
            strict: true,
            slack: 0.05,
            tolerances: Tolerances::default(),
            scan: ScanPolicy::default(),
            modulus_grid: default_modulus_grid(),
            shift_points: 65,
        }
    }
}

impl VoronovskajaOptions {
    /// Run even when (χ3) fails, attaching the measured variation.
    pub fn lenient() -> Self {
        Self {
            strict: false,
            ..Self::default()
        }
    }
}

/// Moment reading used in the expansion.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MomentVariant {
    LiteralSigned,
    LiteralAbsolute,
    PointwiseSigned,
    PointwiseAbsolute,
}

impl MomentVariant {
    pub const ALL: [MomentVariant; 4] = [
        Self::LiteralSigned,
        Self::LiteralAbsolute,
        Self::PointwiseSigned,
        Self::PointwiseAbsolute,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            Self::LiteralSigned => "literal-signed",
            Self::LiteralAbsolute => "literal-absolute",
            Self::PointwiseSigned => "pointwise-signed",
            Self::PointwiseAbsolute => "pointwise-absolute",
        }
    }

    fn absolute(&self) -> bool {
        matches!(self, Self::LiteralAbsolute | Self::PointwiseAbsolute)
    }

    fn pointwise(&self) -> bool {
        matches!(self, Self::PointwiseSigned | Self::PointwiseAbsolute)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VoronovskajaRow {
    pub w: f64,
    pub variant: MomentVariant,
    /// `max_x L_w(x)`.
    pub max_lhs: f64,
    pub max_lhs_at: Option<f64>,
    /// `L_w ≤ R_w` at the grid point where `L_w / R_w` is largest.
    pub check: BoundCheck,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VoronovskajaReport {
    pub function_name: String,
    pub kernel_name: String,
    pub r: u32,
    pub chi3_holds: bool,
    pub chi3_diagnostic: String,
    pub algebraic_moment_variation: Vec<AlgebraicVariation>,
    /// `M_t(χ, 1)`, signed join, `t = 0..=r`.
    pub literal_signed_moments: Vec<f64>,
    /// `M_t(χ, 1)` with absolute values, `t = 0..=r`.
    pub literal_absolute_moments: Vec<f64>,
    pub m_r: f64,
    pub m_r_plus_5: f64,
    pub eta: f64,
    /// `(w, Ω(θ^r f, 1/w))`.
    pub omega: Vec<(f64, f64)>,
    pub rows: Vec<VoronovskajaRow>,
}

impl VoronovskajaReport {
    pub fn checks(&self) -> impl Iterator<Item = &BoundCheck> {
        self.rows.iter().map(|r| &r.check)
    }

    pub fn row(&self, w: f64, variant: MomentVariant) -> Option<&VoronovskajaRow> {
        self.rows.iter().find(|r| r.w == w && r.variant == variant)
    }
}

/// Check the expansion of order `r` for each rate on `x_grid` (window mode,
/// kernel default truncation).
pub fn voronovskaja_check(
    f: &WeightedFunction,
    kernel: &Kernel,
    r: u32,
    w_list: &[f64],
    x_grid: &LogGrid,
    options: &VoronovskajaOptions,
) -> Result<VoronovskajaReport> {
    require_increasing(w_list)?;
    if r > 6 {
        return Err(Error::UnsupportedOrder(r));
    }
    let scan = &options.scan;
    let (m, eta) = moments_and_eta(kernel, &[r as f64, r as f64 + 5.0], scan).map_err(Error::HypothesisNotMet)?;
    let (m_r, m_r5) = (m[0], m[1]);

    let variation = algebraic_variation(kernel, r, scan);
    let worst = variation
        .iter()
        .find(|v| v.signed_spread() > options.tolerances.chi3_variation * (1.0 + v.signed_max.abs()));
    let (chi3_holds, chi3_diagnostic) = match worst {
        None => (true, format!("M_j(χ,u) constant over the u scan for j ≤ {r}")),
        Some(v) => (
            false,
            format!(
                "M_{}(χ,u) ranges over [{:.12e}, {:.12e}]",
                v.order, v.signed_min, v.signed_max
            ),
        ),
    };
    if !chi3_holds && options.strict {
        return Err(Error::HypothesisNotMet(format!("(χ3) fails for {}: {chi3_diagnostic}", kernel.name())));
    }

    let literal_signed: Vec<f64> = (0..=r).map(|t| algebraic_moment_log(kernel, t, 0.0, scan, false)).collect();
    let literal_absolute: Vec<f64> = (0..=r).map(|t| algebraic_moment_log(kernel, t, 0.0, scan, true)).collect();

    let derivatives: Vec<WeightedFunction> = (0..=r)
        .map(|t| if t == 0 { Ok(f.clone()) } else { f.mellin_derivative_function(t) })
        .collect::<Result<_>>()?;
    let theta_r = &derivatives[r as usize];
    // θ^t f(x) at every grid point, t = 0..=r
    let taylor: Vec<Vec<f64>> = x_grid
        .log_abscissae()
        .map(|v| derivatives.iter().map(|d| d.eval_log(v)).collect())
        .collect();
    let factorials: Vec<f64> = (0..=r).scan(1.0, |acc, t| {
        if t > 0 {
            *acc *= t as f64;
        }
        Some(*acc)
    })
    .collect();
    let r_fact = factorials[r as usize];

    let mut omega = Vec::with_capacity(w_list.len());
    let mut rows = Vec::with_capacity(4 * w_list.len());
    for &w in w_list {
        let om = weighted_log_modulus(theta_r, 1.0 / w, &options.modulus_grid, options.shift_points)?;
        omega.push((w, om));
        let config = SamplingConfig::for_kernel(w, kernel)?;
        let eval = evaluate_on_grid(OperatorKind::MaxProduct, f, kernel, &config, x_grid);
        for variant in MomentVariant::ALL {
            let mut max_lhs = 0.0f64;
            let mut max_lhs_at = None;
            let mut tight: Option<(f64, f64, f64, f64)> = None; // (ratio, lhs, rhs, v)
            for (i, row) in eval.rows.iter().enumerate() {
                let Some(value) = row.value else { continue };
                let v = row.log_x;
                let moments: Vec<f64> = if variant.pointwise() {
                    (0..=r)
                        .map(|t| algebraic_moment_log(kernel, t, w * v, scan, variant.absolute()))
                        .collect()
                } else if variant.absolute() {
                    literal_absolute.clone()
                } else {
                    literal_signed.clone()
                };
                let m0 = moments[0];
                let expansion: f64 = (0..=r as usize)
                    .map(|t| taylor[i][t] * moments[t] / (factorials[t] * w.powi(t as i32)))
                    .sum::<f64>()
                    / m0;
                let lhs = (w.powi(r as i32) * (value - expansion)).abs();
                let rhs = 64.0 / (r_fact * m0) * psi_log(v) * om * (m_r + m_r5);
                if lhs > max_lhs || max_lhs_at.is_none() {
                    max_lhs = lhs;
                    max_lhs_at = Some(v);
                }
                let ratio = if rhs > 0.0 {
                    lhs / rhs
                } else if lhs > 1e-12 {
                    f64::INFINITY
                } else {
                    0.0
                };
                if tight.map_or(true, |t| ratio > t.0) {
                    tight = Some((ratio, lhs, rhs, v));
                }
            }
            let check = match tight {
                Some((ratio, lhs, rhs, v)) => BoundCheck::estimated(
                    format!("voronovskaja r={r} w={w} {}", variant.label()),
                    lhs,
                    rhs,
                    options.slack,
                    1e-12,
                    Some(v),
                )
                .with_note(format!(
                    "max ratio {ratio:.6e}; Ω(θ^r f,1/w) ≈ {om:.6e}{}",
                    if chi3_holds { "" } else { "; (χ3) fails, expansion outside hypotheses" }
                )),
                None => BoundCheck::hypothesis_not_met(
                    format!("voronovskaja r={r} w={w} {}", variant.label()),
                    "operator failed at every grid point",
                ),
            };
            rows.push(VoronovskajaRow {
                w,
                variant,
                max_lhs,
                max_lhs_at,
                check,
            });
        }
    }

    Ok(VoronovskajaReport {
        function_name: f.name().to_string(),
        kernel_name: kernel.name().to_string(),
        r,
        chi3_holds,
        chi3_diagnostic,
        algebraic_moment_variation: variation,
        literal_signed_moments: literal_signed,
        literal_absolute_moments: literal_absolute,
        m_r,
        m_r_plus_5: m_r5,
        eta,
        omega,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::function_from_name;

    fn fast() -> VoronovskajaOptions {
        VoronovskajaOptions {
            scan: ScanPolicy {
                u_points: 512,
                ..ScanPolicy::default()
            },
            modulus_grid: LogGrid::new(-8.0, 8.0, 801).unwrap(),
            ..VoronovskajaOptions::lenient()
        }
    }

    #[test]
    fn strict_mode_reports_chi3_failure() {
        let k = Kernel::mellin_bspline(3).unwrap();
        let f = function_from_name("damped-log2").unwrap();
        let grid = LogGrid::new(-1.0, 1.0, 9).unwrap();
        let opts = VoronovskajaOptions {
            strict: true,
            ..fast()
        };
        let err = voronovskaja_check(&f, &k, 1, &[8.0], &grid, &opts).unwrap_err();
        assert!(matches!(err, Error::HypothesisNotMet(ref s) if s.contains("M_0")), "{err}");
    }

    #[test]
    fn constants_have_zero_left_side() {
        let k = Kernel::mellin_bspline(3).unwrap();
        let f = WeightedFunction::constant(3.0);
        let grid = LogGrid::new(-1.0, 1.0, 17).unwrap();
        for r in [0, 1, 2] {
            let report = voronovskaja_check(&f, &k, r, &[4.0, 8.0], &grid, &fast()).unwrap();
            for row in &report.rows {
                assert!(row.max_lhs < 1e-12, "r={r} {row:?}");
                assert!(row.check.holds);
            }
        }
    }

    #[test]
    fn literal_moments_of_bspline3() {
        let k = Kernel::mellin_bspline(3).unwrap();
        let f = function_from_name("damped-log2").unwrap();
        let grid = LogGrid::new(-1.0, 1.0, 9).unwrap();
        let report = voronovskaja_check(&f, &k, 1, &[8.0], &grid, &fast()).unwrap();
        assert!(!report.chi3_holds);
        assert_eq!(report.literal_signed_moments[0], 0.75);
        // M_1(χ,1) = max_k B_3(-k) k = B_3(1)·1
        assert_eq!(report.literal_signed_moments[1], 0.125);
        assert_eq!(report.rows.len(), 4);
        assert!(report.checks().all(|c| c.holds), "{report:?}");
    }
}
