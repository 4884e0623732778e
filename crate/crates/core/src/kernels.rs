//! Mellin kernels and their max-product moments.
//!
//! A kernel `χ` lives on the positive reals but every quantity used by the
//! sampling operators depends on it only through `t = log x`, so kernels are
//! stored as log-domain profiles `φ(t) = χ(e^t)`. With this convention the
//! shifted argument `χ(e^{-k} x^w)` becomes `φ(w log x - k)`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};

/// Log-domain profile `t ↦ χ(e^t)`.
pub type LogProfile = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Closed-form description of a built-in kernel.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum KernelShape {
    /// Centered cardinal B-spline `B_n(log x)`.
    BSpline { order: u32 },
    /// `exp(-α log² x)`.
    Gaussian { alpha: f64 },
    /// `x^{-c} sinc(log x)`.
    Lin { c: f64 },
}

#[derive(Clone)]
enum Profile {
    Builtin(KernelShape),
    Custom(LogProfile),
}

/// A bounded kernel on the positive reals together with its support metadata.
#[derive(Clone)]
pub struct Kernel {
    name: String,
    profile: Profile,
    log_support_radius: Option<f64>,
    claimed_mu: f64,
}

impl fmt::Debug for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Kernel")
            .field("name", &self.name)
            .field("shape", &self.shape())
            .field("log_support_radius", &self.log_support_radius)
            .field("claimed_mu", &self.claimed_mu)
            .finish()
    }
}

/// Centered cardinal B-spline of order `n` (support `[-n/2, n/2]`) via Cox–de Boor.
pub fn cardinal_bspline(order: u32, t: f64) -> f64 {
    let n = order as usize;
    debug_assert!((1..=6).contains(&n));
    let s = t + order as f64 / 2.0;
    if !(0.0..order as f64).contains(&s) {
        return 0.0;
    }
    let mut basis = [0.0f64; 6];
    basis[s.floor() as usize] = 1.0;
    for k in 2..=n {
        let denom = (k - 1) as f64;
        for i in 0..=(n - k) {
            let left = (s - i as f64) * basis[i];
            let right = ((i + k) as f64 - s) * basis[i + 1];
            basis[i] = (left + right) / denom;
        }
    }
    basis[0]
}

/// `sin(πt)/(πt)`, exactly zero at nonzero integers.
pub fn sinc(t: f64) -> f64 {
    if t == 0.0 {
        return 1.0;
    }
    let n = t.round();
    let r = t - n;
    if r == 0.0 {
        return 0.0;
    }
    let parity = if (n as i64).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    parity * (PI * r).sin() / (PI * t)
}

impl Kernel {
    /// Mellin B-spline `B_n(log x)` of order `1 ≤ n ≤ 6`.
    pub fn mellin_bspline(order: u32) -> Result<Self> {
        if !(1..=6).contains(&order) {
            return Err(Error::InvalidArgument(format!(
                "B-spline order must be in 1..=6, got {order}"
            )));
        }
        Ok(Self {
            name: format!("bspline{order}"),
            profile: Profile::Builtin(KernelShape::BSpline { order }),
            log_support_radius: Some(order as f64 / 2.0),
            claimed_mu: f64::INFINITY,
        })
    }

    /// Mellin Gaussian `exp(-α log² x)`.
    pub fn mellin_gaussian(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "Gaussian shape must be positive, got {alpha}"
            )));
        }
        Ok(Self {
            name: format!("gauss{alpha}"),
            profile: Profile::Builtin(KernelShape::Gaussian { alpha }),
            log_support_radius: None,
            claimed_mu: f64::INFINITY,
        })
    }

    /// The classical exponential sampling kernel `lin_c(x) = x^{-c} sinc(log x)`.
    pub fn lin(c: f64) -> Self {
        Self {
            name: format!("linc{c}"),
            profile: Profile::Builtin(KernelShape::Lin { c }),
            log_support_radius: None,
            claimed_mu: 0.0,
        }
    }

    /// A user kernel given by its log-domain profile `t ↦ χ(e^t)`.
    pub fn custom(
        name: impl Into<String>,
        profile: impl Fn(f64) -> f64 + Send + Sync + 'static,
        log_support_radius: Option<f64>,
        claimed_mu: f64,
    ) -> Self {
        Self {
            name: name.into(),
            profile: Profile::Custom(Arc::new(profile)),
            log_support_radius,
            claimed_mu,
        }
    }

    /// Resolve a registry name such as `bspline3`, `gauss1` or `linc0`.
    pub fn from_name(name: &str) -> Result<Self> {
        let unknown = || Error::UnknownName {
            kind: "kernel",
            name: name.to_string(),
        };
        let parse = |rest: &str| rest.parse::<f64>().map_err(|_| unknown());
        if let Some(rest) = name.strip_prefix("bspline") {
            let order = rest.parse::<u32>().map_err(|_| unknown())?;
            Self::mellin_bspline(order)
        } else if let Some(rest) = name.strip_prefix("gauss") {
            Self::mellin_gaussian(parse(rest)?)
        } else if let Some(rest) = name.strip_prefix("linc") {
            Ok(Self::lin(parse(rest)?))
        } else {
            Err(unknown())
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn shape(&self) -> Option<KernelShape> {
        match self.profile {
            Profile::Builtin(shape) => Some(shape),
            Profile::Custom(_) => None,
        }
    }

    pub fn log_support_radius(&self) -> Option<f64> {
        self.log_support_radius
    }

    /// Order for which (χ1) is claimed; `f64::INFINITY` when every moment is finite.
    pub fn claimed_mu(&self) -> f64 {
        self.claimed_mu
    }

    /// `χ(x)`; non-positive `x` yields NaN.
    pub fn evaluate(&self, x: f64) -> f64 {
        if x > 0.0 {
            self.eval_log(x.ln())
        } else {
            f64::NAN
        }
    }

    /// `χ(e^t)`.
    #[inline]
    pub fn eval_log(&self, t: f64) -> f64 {
        match &self.profile {
            Profile::Builtin(KernelShape::BSpline { order }) => cardinal_bspline(*order, t),
            Profile::Builtin(KernelShape::Gaussian { alpha }) => (-alpha * t * t).exp(),
            Profile::Builtin(KernelShape::Lin { c }) => (-c * t).exp() * sinc(t),
            Profile::Custom(f) => f(t),
        }
    }

    /// Whether the kernel is known to be nonnegative everywhere.
    pub fn is_nonnegative(&self) -> bool {
        matches!(
            self.profile,
            Profile::Builtin(KernelShape::BSpline { .. } | KernelShape::Gaussian { .. })
        )
    }

    /// Default half-width of the integer window for operator sums.
    pub fn default_window(&self) -> u32 {
        match self.log_support_radius {
            Some(r) => r.ceil() as u32 + 2,
            None => 64,
        }
    }

    /// Upper bound for `sup_{|t| ≥ from} |φ(t)|`, when known in closed form.
    pub fn envelope(&self, from: f64) -> Option<f64> {
        let from = from.max(0.0);
        if let Some(r) = self.log_support_radius {
            if from > r {
                return Some(0.0);
            }
        }
        match self.shape()? {
            KernelShape::BSpline { .. } => Some(1.0),
            KernelShape::Gaussian { alpha } => Some((-alpha * from * from).exp()),
            KernelShape::Lin { c: 0.0 } => Some(if from >= 1.0 {
                1.0 / (PI * from)
            } else {
                1.0
            }),
            KernelShape::Lin { .. } => Some(f64::INFINITY),
        }
    }

    /// Upper bound for `sup_{|t| ≥ from} |φ(t)| |t|^ν`, when known in closed form.
    pub fn moment_tail_bound(&self, from: f64, nu: f64) -> Option<f64> {
        let from = from.max(0.0);
        if let Some(r) = self.log_support_radius {
            if from > r {
                return Some(0.0);
            }
        }
        match self.shape()? {
            KernelShape::Gaussian { alpha } => {
                let peak = (nu / (2.0 * alpha)).sqrt();
                let tau = from.max(peak);
                Some((-alpha * tau * tau).exp() * tau.powf(nu))
            }
            KernelShape::Lin { c } if c == 0.0 && nu <= 1.0 && from >= 1.0 => {
                Some(from.powf(nu - 1.0) / PI)
            }
            KernelShape::Lin { .. } => Some(f64::INFINITY),
            KernelShape::BSpline { .. } => None,
        }
    }
}

/// Registered kernel names with one-line descriptions. Other orders and
/// parameters are reachable through the same prefixes (`bspline<n>`,
/// `gauss<α>`, `linc<c>`).
pub const KERNEL_NAMES: &[(&str, &str)] = &[
    ("bspline1", "B_1(log x), indicator of |log x| < 1/2"),
    ("bspline2", "B_2(log x), hat function"),
    ("bspline3", "B_3(log x), quadratic spline"),
    ("bspline4", "B_4(log x), cubic spline"),
    ("bspline5", "B_5(log x), quartic spline"),
    ("bspline6", "B_6(log x), quintic spline"),
    ("gauss0.5", "exp(-0.5 log² x)"),
    ("gauss1", "exp(-log² x)"),
    ("gauss2", "exp(-2 log² x)"),
    ("linc0", "sinc(log x)"),
    ("linc1", "x^{-1} sinc(log x)"),
];

/// How suprema over `u > 0` and joins over `k ∈ ℤ` are discretized.
///
/// The lattice joins are 1-periodic in `log u`, so `u` only ranges over one
/// period `log u ∈ [0, 1)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanPolicy {
    /// Uniform points for the fractional part of `log u`.
    pub u_points: usize,
    /// Fixed integer half-width `W`; `None` picks it from the kernel.
    pub window: Option<u32>,
    /// Starting half-width when doubling for non-compact kernels.
    pub initial_window: u32,
    /// Largest half-width tried before giving up on convergence.
    pub max_window: u32,
    /// Uniform points on `[1, e]` (in log scale) for the η estimate.
    pub eta_points: usize,
}

impl Default for ScanPolicy {
    fn default() -> Self {
        Self {
            u_points: 4096,
            window: None,
            initial_window: 8,
            max_window: 1024,
            eta_points: 4097,
        }
    }
}

impl ScanPolicy {
    /// Fractional parts `j / u_points` of `log u`.
    pub fn log_u_grid(&self) -> impl Iterator<Item = f64> + '_ {
        let n = self.u_points.max(1);
        (0..n).map(move |j| j as f64 / n as f64)
    }

    /// Half-width used for single evaluations (no doubling).
    pub fn resolve_window(&self, kernel: &Kernel) -> u32 {
        self.window.unwrap_or_else(|| match kernel.log_support_radius() {
            Some(r) => r.ceil() as u32 + 1,
            None => 64,
        })
    }
}

/// Estimate of a discrete absolute moment `m_ν(χ)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MomentEstimate {
    pub order: f64,
    pub value: f64,
    /// Integer half-width the estimate was taken over.
    pub window: u32,
    /// Bound on the contribution of `|k - log u| > window`; `Some(0)` for compact kernels.
    pub tail_bound: Option<f64>,
    /// `log u` and `k` attaining the maximum.
    pub witness_log_u: f64,
    pub witness_k: i64,
}

struct ScanMax {
    value: f64,
    log_u: f64,
    k: i64,
}

fn scan_absolute(kernel: &Kernel, nu: f64, scan: &ScanPolicy, window: u32) -> ScanMax {
    let w = window as i64;
    let mut best = ScanMax {
        value: 0.0,
        log_u: 0.0,
        k: 0,
    };
    for s in scan.log_u_grid() {
        for k in -w..=w {
            let t = s - k as f64;
            let term = kernel.eval_log(t).abs() * t.abs().powf(nu);
            if !term.is_finite() {
                return ScanMax {
                    value: f64::INFINITY,
                    log_u: s,
                    k,
                };
            }
            if term > best.value {
                best = ScanMax {
                    value: term,
                    log_u: s,
                    k,
                };
            }
        }
    }
    best
}

/// `m_ν(χ) = sup_u max_k |χ(e^{-k}u)| |k - log u|^ν`.
///
/// Compact kernels use a fixed window `ceil(R) + 1`. Otherwise the window
/// doubles until the estimate stabilizes (change below `1e-12`) or grows by
/// at least 1.5x on three consecutive doublings, which is reported as
/// divergence.
pub fn discrete_absolute_moment(kernel: &Kernel, nu: f64, scan: &ScanPolicy) -> Result<MomentEstimate> {
    if !(nu >= 0.0 && nu.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "moment order must be a nonnegative real, got {nu}"
        )));
    }
    let divergent = |m: &ScanMax, last: f64| Error::DivergentMoment {
        order: nu,
        log_u: m.log_u,
        k: m.k,
        last_estimate: last,
    };
    let finish = |m: ScanMax, window: u32| MomentEstimate {
        order: nu,
        value: m.value,
        window,
        tail_bound: kernel.moment_tail_bound(window as f64, nu),
        witness_log_u: m.log_u,
        witness_k: m.k,
    };

    let fixed = scan
        .window
        .or_else(|| kernel.log_support_radius().map(|r| r.ceil() as u32 + 1));
    if let Some(window) = fixed {
        let m = scan_absolute(kernel, nu, scan, window);
        if !m.value.is_finite() {
            return Err(divergent(&m, m.value));
        }
        return Ok(finish(m, window));
    }

    let mut window = scan.initial_window.max(1);
    let mut current = scan_absolute(kernel, nu, scan, window);
    if !current.value.is_finite() {
        return Err(divergent(&current, current.value));
    }
    let mut growth_streak = 0;
    while window * 2 <= scan.max_window {
        let next = scan_absolute(kernel, nu, scan, window * 2);
        window *= 2;
        if !next.value.is_finite() {
            return Err(divergent(&next, current.value));
        }
        if (next.value - current.value).abs() <= 1e-12 * current.value.abs().max(1.0) {
            return Ok(finish(next, window));
        }
        if next.value >= 1.5 * current.value {
            growth_streak += 1;
            if growth_streak >= 3 {
                return Err(divergent(&next, next.value));
            }
        } else {
            growth_streak = 0;
        }
        current = next;
    }
    let estimate = finish(current, window);
    match estimate.tail_bound {
        Some(tail) if !tail.is_finite() => Err(Error::DivergentMoment {
            order: nu,
            log_u: estimate.witness_log_u,
            k: estimate.witness_k,
            last_estimate: estimate.value,
        }),
        _ => Ok(estimate),
    }
}

fn lattice_range(log_u: f64, window: u32) -> std::ops::RangeInclusive<i64> {
    let base = log_u.floor() as i64;
    let w = window as i64;
    (base - w)..=(base + w + 1)
}

/// Signed algebraic moment `M_j(χ, u) = max_k χ(e^{-k}u) (k - log u)^j`.
pub fn algebraic_moment(kernel: &Kernel, j: u32, u: f64, scan: &ScanPolicy) -> Result<f64> {
    if !(u > 0.0) {
        return Err(Error::Domain(u));
    }
    Ok(algebraic_moment_log(kernel, j, u.ln(), scan, false))
}

/// `max_k |χ(e^{-k}u)| |k - log u|^j`, the absolute-value reading of `M_j`.
pub fn absolute_algebraic_moment(kernel: &Kernel, j: u32, u: f64, scan: &ScanPolicy) -> Result<f64> {
    if !(u > 0.0) {
        return Err(Error::Domain(u));
    }
    Ok(algebraic_moment_log(kernel, j, u.ln(), scan, true))
}

pub(crate) fn algebraic_moment_log(
    kernel: &Kernel,
    j: u32,
    log_u: f64,
    scan: &ScanPolicy,
    absolute: bool,
) -> f64 {
    let window = scan.resolve_window(kernel);
    lattice_range(log_u, window)
        .map(|k| {
            let d = k as f64 - log_u;
            let value = kernel.eval_log(log_u - k as f64) * d.powi(j as i32);
            if absolute {
                value.abs()
            } else {
                value
            }
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

/// `max_k |χ(e^{-k}u)|` over the full lattice window, the denominator join of
/// the max-product operator at `x^w = u`.
pub fn lattice_join(kernel: &Kernel, log_u: f64, window: u32) -> f64 {
    lattice_range(log_u, window)
        .map(|k| kernel.eval_log(log_u - k as f64).abs())
        .fold(0.0, f64::max)
}

/// Minimum of χ over a uniform log-grid on `[1, e]`, endpoints included.
pub fn eta_lower_bound(kernel: &Kernel, grid_points: usize) -> Result<f64> {
    if grid_points < 2 {
        return Err(Error::InvalidArgument(format!(
            "η grid needs at least 2 points, got {grid_points}"
        )));
    }
    let last = (grid_points - 1) as f64;
    Ok((0..grid_points)
        .map(|i| kernel.eval_log(i as f64 / last))
        .fold(f64::INFINITY, f64::min))
}

/// Thresholds for turning measured quantities into verdicts.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Tolerances {
    /// (χ2) holds when η exceeds this.
    pub eta_min: f64,
    /// (χ3) holds when `max - min ≤ chi3_variation · (1 + |max|)` for every order.
    pub chi3_variation: f64,
    /// Relative slack for verdicts based on lower-bound estimates.
    pub slack: f64,
    /// Absolute tolerance for exact inequalities.
    pub absolute: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            eta_min: 0.0,
            chi3_variation: 1e-9,
            slack: 0.05,
            absolute: 1e-12,
        }
    }
}

/// One entry of [`MomentReport::absolute_moments`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MomentEntry {
    pub order: f64,
    /// `None` when the moment diverges.
    pub value: Option<f64>,
    pub tail_bound: Option<f64>,
    /// `(log u, k)` attaining the estimate or witnessing divergence.
    pub witness: (f64, i64),
}

/// Range of `M_j(χ, u)` over the `u` scan.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AlgebraicVariation {
    pub order: u32,
    pub signed_min: f64,
    pub signed_max: f64,
    pub absolute_min: f64,
    pub absolute_max: f64,
}

impl AlgebraicVariation {
    pub fn signed_spread(&self) -> f64 {
        self.signed_max - self.signed_min
    }
}

/// Kernel condition verdicts with the measured quantities behind them.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MomentReport {
    pub kernel_name: String,
    pub mu: f64,
    pub r: u32,
    pub absolute_moments: Vec<MomentEntry>,
    pub eta: f64,
    pub algebraic_moment_variation: Vec<AlgebraicVariation>,
    pub chi1_holds: bool,
    pub chi1_diagnostic: String,
    pub chi2_holds: bool,
    pub chi2_diagnostic: String,
    pub chi3_holds: bool,
    pub chi3_diagnostic: String,
}

impl MomentReport {
    /// Finite `m_ν` at the given order, if it was computed.
    pub fn moment(&self, order: f64) -> Option<f64> {
        self.absolute_moments
            .iter()
            .find(|e| e.order == order)
            .and_then(|e| e.value)
    }
}

/// Scan `M_j(χ, u)` over one period of `log u` for `j = 0..=r`.
pub fn algebraic_variation(kernel: &Kernel, r: u32, scan: &ScanPolicy) -> Vec<AlgebraicVariation> {
    (0..=r)
        .map(|j| {
            let mut v = AlgebraicVariation {
                order: j,
                signed_min: f64::INFINITY,
                signed_max: f64::NEG_INFINITY,
                absolute_min: f64::INFINITY,
                absolute_max: f64::NEG_INFINITY,
            };
            for s in scan.log_u_grid() {
                let signed = algebraic_moment_log(kernel, j, s, scan, false);
                let absolute = algebraic_moment_log(kernel, j, s, scan, true);
                v.signed_min = v.signed_min.min(signed);
                v.signed_max = v.signed_max.max(signed);
                v.absolute_min = v.absolute_min.min(absolute);
                v.absolute_max = v.absolute_max.max(absolute);
            }
            v
        })
        .collect()
}

/// Check (χ1) at order `mu`, (χ2), and (χ3) up to order `r` with the default scan.
pub fn check_kernel_conditions(kernel: &Kernel, mu: f64, r: u32, tol: &Tolerances) -> Result<MomentReport> {
    check_kernel_conditions_with(kernel, mu, r, tol, &ScanPolicy::default())
}

pub fn check_kernel_conditions_with(
    kernel: &Kernel,
    mu: f64,
    r: u32,
    tol: &Tolerances,
    scan: &ScanPolicy,
) -> Result<MomentReport> {
    if !(mu >= 0.0 && mu.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "μ must be a nonnegative real, got {mu}"
        )));
    }
    let mut orders: Vec<f64> = (0..=(mu.floor() as u32)).map(f64::from).collect();
    if mu.fract() != 0.0 {
        orders.push(mu);
    }

    let absolute_moments: Vec<MomentEntry> = orders
        .iter()
        .map(|&order| match discrete_absolute_moment(kernel, order, scan) {
            Ok(m) => MomentEntry {
                order,
                value: Some(m.value),
                tail_bound: m.tail_bound,
                witness: (m.witness_log_u, m.witness_k),
            },
            Err(Error::DivergentMoment { log_u, k, .. }) => MomentEntry {
                order,
                value: None,
                tail_bound: None,
                witness: (log_u, k),
            },
            Err(_) => unreachable!("orders are validated nonnegative reals"),
        })
        .collect();

    let top = absolute_moments.last().expect("order 0 is always present");
    let (chi1_holds, chi1_diagnostic) = match top.value {
        Some(v) => (true, format!("m_{mu} = {v:.12e}")),
        None => (
            false,
            format!(
                "m_{mu} diverges; witness log u = {}, k = {}",
                top.witness.0, top.witness.1
            ),
        ),
    };

    let eta = eta_lower_bound(kernel, scan.eta_points)?;
    let chi2_holds = eta > tol.eta_min;
    let chi2_diagnostic = if chi2_holds {
        format!("η = {eta:.12e} > {}", tol.eta_min)
    } else {
        format!("η = {eta:.12e} does not exceed {}", tol.eta_min)
    };

    let algebraic_moment_variation = algebraic_variation(kernel, r, scan);
    let worst = algebraic_moment_variation
        .iter()
        .find(|v| v.signed_spread() > tol.chi3_variation * (1.0 + v.signed_max.abs()));
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

    Ok(MomentReport {
        kernel_name: kernel.name().to_string(),
        mu,
        r,
        absolute_moments,
        eta,
        algebraic_moment_variation,
        chi1_holds,
        chi1_diagnostic,
        chi2_holds,
        chi2_diagnostic,
        chi3_holds,
        chi3_diagnostic,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Truncated-power form of the centered B-spline, independent of Cox–de Boor.
    fn bspline_truncated_power(n: u32, t: f64) -> f64 {
        let s = t + n as f64 / 2.0;
        let mut binom = 1.0;
        let mut fact = 1.0;
        for i in 1..n {
            fact *= i as f64;
        }
        let mut acc = 0.0;
        for j in 0..=n {
            if j > 0 {
                binom = binom * (n - j + 1) as f64 / j as f64;
            }
            let base = s - j as f64;
            if base > 0.0 {
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                acc += sign * binom * base.powi(n as i32 - 1);
            }
        }
        acc / fact
    }

    #[test]
    fn bspline_point_values() {
        assert_eq!(Kernel::mellin_bspline(2).unwrap().evaluate(1.0), 1.0);
        let b3 = Kernel::mellin_bspline(3).unwrap();
        assert!((b3.evaluate(1.0) - 0.75).abs() < 1e-15);
        assert!((b3.evaluate(std::f64::consts::E) - 0.125).abs() < 1e-15);
        assert_eq!(b3.log_support_radius(), Some(1.5));
        assert!(b3.claimed_mu().is_infinite());
    }

    #[test]
    fn bspline_matches_truncated_power_form() {
        for n in 1..=6 {
            for i in -400..=400 {
                let t = i as f64 / 97.0;
                let a = cardinal_bspline(n, t);
                let b = bspline_truncated_power(n, t);
                assert!((a - b).abs() < 1e-12, "n={n} t={t}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn bspline_order_out_of_range() {
        assert!(matches!(Kernel::mellin_bspline(0), Err(Error::InvalidArgument(_))));
        assert!(matches!(Kernel::mellin_bspline(7), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn gaussian_values_and_errors() {
        let g = Kernel::mellin_gaussian(1.0).unwrap();
        assert_eq!(g.evaluate(1.0), 1.0);
        assert!((g.evaluate(std::f64::consts::E) - 0.367_879_441_171_442_3).abs() < 1e-15);
        let g = Kernel::mellin_gaussian(0.5).unwrap();
        assert!((g.eval_log(2.0) - 0.135_335_283_236_612_7).abs() < 1e-15);
        assert!(Kernel::mellin_gaussian(0.0).is_err());
        assert!(Kernel::mellin_gaussian(-1.0).is_err());
    }

    #[test]
    fn lin_kernel_values() {
        let l0 = Kernel::lin(0.0);
        assert_eq!(l0.evaluate(1.0), 1.0);
        assert_eq!(l0.eval_log(1.0), 0.0);
        assert_eq!(l0.claimed_mu(), 0.0);
        // mpmath: e^{-1/2} · 2/π
        let l1 = Kernel::lin(1.0);
        assert!((l1.eval_log(0.5) - 0.386_129_410_520_215_63).abs() < 1e-15);
    }

    #[test]
    fn registry_names() {
        assert_eq!(Kernel::from_name("bspline3").unwrap().name(), "bspline3");
        assert_eq!(Kernel::from_name("gauss1").unwrap().name(), "gauss1");
        assert_eq!(Kernel::from_name("linc0").unwrap().name(), "linc0");
        assert_eq!(Kernel::from_name("gauss0.5").unwrap().name(), "gauss0.5");
        assert!(matches!(Kernel::from_name("hann"), Err(Error::UnknownName { .. })));
        assert!(Kernel::from_name("bspline9").is_err());
    }

    #[test]
    fn moments_of_hat_kernel() {
        let scan = ScanPolicy::default();
        let b2 = Kernel::mellin_bspline(2).unwrap();
        let m0 = discrete_absolute_moment(&b2, 0.0, &scan).unwrap();
        assert!((m0.value - 1.0).abs() < 1e-12);
        assert_eq!(m0.tail_bound, Some(0.0));
        let m1 = discrete_absolute_moment(&b2, 1.0, &scan).unwrap();
        assert!((m1.value - 0.25).abs() < 1e-12);
    }

    #[test]
    fn zeroth_moment_brackets_kernel_sup() {
        let scan = ScanPolicy::default();
        for name in ["bspline3", "gauss1", "linc0", "bspline5"] {
            let k = Kernel::from_name(name).unwrap();
            let m0 = discrete_absolute_moment(&k, 0.0, &scan).unwrap().value;
            let grid_max = scan
                .log_u_grid()
                .map(|s| k.eval_log(s).abs())
                .fold(0.0, f64::max);
            assert!(m0 >= grid_max - 1e-15, "{name}");
            assert!(m0 <= 1.0 + 1e-15, "{name}");
        }
    }

    #[test]
    fn lin_kernel_second_moment_diverges() {
        let l0 = Kernel::lin(0.0);
        let err = discrete_absolute_moment(&l0, 2.0, &ScanPolicy::default()).unwrap_err();
        assert!(matches!(err, Error::DivergentMoment { order, .. } if order == 2.0));
        // First order is bounded by 1/π.
        let m1 = discrete_absolute_moment(&l0, 1.0, &ScanPolicy::default()).unwrap();
        assert!((m1.value - 1.0 / PI).abs() < 1e-9);
    }

    #[test]
    fn gaussian_moments_converge() {
        let g = Kernel::mellin_gaussian(1.0).unwrap();
        let m5 = discrete_absolute_moment(&g, 5.0, &ScanPolicy::default()).unwrap();
        // sup_t e^{-t²} t^5 at t² = 5/2
        let exact = (-2.5f64).exp() * 2.5f64.powf(2.5);
        assert!(m5.value <= exact + 1e-12);
        assert!(m5.value > exact * 0.999);
        assert!(m5.tail_bound.unwrap() < 1e-100);
    }

    #[test]
    fn algebraic_moment_examples() {
        let scan = ScanPolicy::default();
        let b3 = Kernel::mellin_bspline(3).unwrap();
        assert!((algebraic_moment(&b3, 0, 1.0, &scan).unwrap() - 0.75).abs() < 1e-15);
        let b2 = Kernel::mellin_bspline(2).unwrap();
        let m = algebraic_moment(&b2, 1, 0.5f64.exp(), &scan).unwrap();
        assert!((m - 0.25).abs() < 1e-12);
        assert!(algebraic_moment(&b2, 1, 0.0, &scan).is_err());
        for u in [0.3, 1.0, 2.7, 11.0] {
            let j0 = algebraic_moment(&b3, 0, u, &scan).unwrap();
            let join = lattice_join(&b3, f64::ln(u), 3);
            assert!((j0 - join).abs() < 1e-15);
        }
    }

    #[test]
    fn eta_examples() {
        let b3 = Kernel::mellin_bspline(3).unwrap();
        assert!((eta_lower_bound(&b3, 4097).unwrap() - 0.125).abs() < 1e-15);
        let g = Kernel::mellin_gaussian(1.0).unwrap();
        assert!((eta_lower_bound(&g, 4097).unwrap() - (-1.0f64).exp()).abs() < 1e-15);
        let b2 = Kernel::mellin_bspline(2).unwrap();
        assert_eq!(eta_lower_bound(&b2, 4097).unwrap(), 0.0);
        assert!(eta_lower_bound(&b2, 1).is_err());
    }

    #[test]
    fn condition_checker_verdicts() {
        let tol = Tolerances::default();
        let b3 = Kernel::mellin_bspline(3).unwrap();
        let rep = check_kernel_conditions(&b3, 5.0, 1, &tol).unwrap();
        assert!(rep.chi1_holds && rep.chi2_holds);
        assert!((rep.eta - 0.125).abs() < 1e-15);
        assert_eq!(rep.absolute_moments.len(), 6);
        // The B-spline join M_0 oscillates between B_3(1/2) and B_3(0).
        assert!(!rep.chi3_holds);
        let v0 = &rep.algebraic_moment_variation[0];
        assert!((v0.signed_min - 0.5).abs() < 1e-6 && (v0.signed_max - 0.75).abs() < 1e-12);

        let b2 = Kernel::mellin_bspline(2).unwrap();
        let rep = check_kernel_conditions(&b2, 2.0, 0, &tol).unwrap();
        assert!(!rep.chi2_holds);

        let l0 = Kernel::lin(0.0);
        let rep = check_kernel_conditions(&l0, 2.0, 0, &tol).unwrap();
        assert!(!rep.chi1_holds);
        assert!(rep.chi1_diagnostic.contains("diverges"));
        assert!(rep.absolute_moments[2].value.is_none());

        let zero = Kernel::custom("zero", |_| 0.0, Some(1.0), f64::INFINITY);
        let rep = check_kernel_conditions(&zero, 1.0, 0, &tol).unwrap();
        assert!(!rep.chi2_holds);
    }

    #[test]
    fn report_serializes_with_stable_names() {
        let b3 = Kernel::mellin_bspline(3).unwrap();
        let rep = check_kernel_conditions(&b3, 2.0, 1, &Tolerances::default()).unwrap();
        let json = serde_json::to_value(&rep).unwrap();
        for key in [
            "kernel_name",
            "absolute_moments",
            "eta",
            "algebraic_moment_variation",
            "chi1_holds",
            "chi2_holds",
            "chi3_holds",
        ] {
            assert!(json.get(key).is_some(), "{key}");
        }
    }
}
