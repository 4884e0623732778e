//! Weighted function spaces on the positive reals.
//!
//! The weight is `ω̄(x) = 1/(1 + log² x)` and its reciprocal `Ψ = 1/ω̄`.
//! Functions are stored through their log-domain form `v ↦ f(e^v)`, which is
//! also where Mellin derivatives become ordinary derivatives:
//! `θ^r f(x) = d^r/dv^r f(e^v)` at `v = log x`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};

type LogFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// `ω̄(x) = 1/(1 + log² x)`.
pub fn weight(x: f64) -> Result<f64> {
    if x > 0.0 {
        Ok(weight_log(x.ln()))
    } else {
        Err(Error::Domain(x))
    }
}

/// `Ψ(x) = 1 + log² x`.
pub fn psi(x: f64) -> Result<f64> {
    if x > 0.0 {
        Ok(psi_log(x.ln()))
    } else {
        Err(Error::Domain(x))
    }
}

#[inline]
pub fn weight_log(v: f64) -> f64 {
    1.0 / (1.0 + v * v)
}

#[inline]
pub fn psi_log(v: f64) -> f64 {
    1.0 + v * v
}

/// A point of the positive half-line carried together with its logarithm, so
/// that lattice-aligned points `e^{k/w}` can be addressed exactly.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Abscissa {
    pub x: f64,
    pub log_x: f64,
}

impl Abscissa {
    pub fn new(x: f64) -> Result<Self> {
        if x > 0.0 && x.is_finite() {
            Ok(Self { x, log_x: x.ln() })
        } else {
            Err(Error::Domain(x))
        }
    }

    pub fn from_log(log_x: f64) -> Self {
        Self {
            x: log_x.exp(),
            log_x,
        }
    }
}

/// Uniform grid in `log x`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LogGrid {
    pub log_min: f64,
    pub log_max: f64,
    pub points: usize,
}

impl LogGrid {
    pub fn new(log_min: f64, log_max: f64, points: usize) -> Result<Self> {
        let valid = log_min.is_finite()
            && log_max.is_finite()
            && match points {
                0 => false,
                1 => log_min == log_max,
                _ => log_min < log_max,
            };
        if !valid {
            return Err(Error::InvalidArgument(format!(
                "invalid log grid {log_min}:{log_max}:{points}"
            )));
        }
        Ok(Self {
            log_min,
            log_max,
            points,
        })
    }

    /// One-point grid at `log x = v`.
    pub fn single(v: f64) -> Self {
        Self {
            log_min: v,
            log_max: v,
            points: 1,
        }
    }

    /// Grid over `[log a, log b]`.
    pub fn over_interval(a: f64, b: f64, points: usize) -> Result<Self> {
        if !(a > 0.0 && b > 0.0) {
            return Err(Error::Domain(a.min(b)));
        }
        Self::new(a.ln(), b.ln(), points)
    }

    pub fn spacing(&self) -> f64 {
        if self.points < 2 {
            0.0
        } else {
            (self.log_max - self.log_min) / (self.points - 1) as f64
        }
    }

    pub fn log_abscissae(&self) -> impl Iterator<Item = f64> + '_ {
        let h = self.spacing();
        (0..self.points).map(move |i| {
            if i + 1 == self.points {
                self.log_max
            } else {
                self.log_min + h * i as f64
            }
        })
    }

    pub fn abscissae(&self) -> impl Iterator<Item = Abscissa> + '_ {
        self.log_abscissae().map(Abscissa::from_log)
    }
}

impl fmt::Display for LogGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.log_min, self.log_max, self.points)
    }
}

/// Parses `logmin:logmax:points`.
impl FromStr for LogGrid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("grid spec `{s}` is not logmin:logmax:points"));
        let mut parts = s.split(':');
        let (Some(a), Some(b), Some(n), None) = (parts.next(), parts.next(), parts.next(), parts.next())
        else {
            return Err(bad());
        };
        let a = a.trim().parse::<f64>().map_err(|_| bad())?;
        let b = b.trim().parse::<f64>().map_err(|_| bad())?;
        let n = n.trim().parse::<usize>().map_err(|_| bad())?;
        Self::new(a, b, n)
    }
}

/// A test function with the analytic facts the verifiers rely on.
#[derive(Clone)]
pub struct WeightedFunction {
    name: String,
    description: String,
    value: LogFn,
    weighted_bound: Option<f64>,
    mellin_derivatives: Vec<LogFn>,
    nonnegative: bool,
    log_lipschitz: Option<f64>,
}

impl fmt::Debug for WeightedFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WeightedFunction")
            .field("name", &self.name)
            .field("weighted_bound", &self.weighted_bound)
            .field("closed_form_derivatives", &self.mellin_derivatives.len())
            .field("nonnegative", &self.nonnegative)
            .field("log_lipschitz", &self.log_lipschitz)
            .finish()
    }
}

impl WeightedFunction {
    /// Build from the log-domain form `v ↦ f(e^v)`.
    pub fn from_log_fn(name: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            name: name.into(),
            description: String::new(),
            value: Arc::new(f),
            weighted_bound: None,
            mellin_derivatives: Vec::new(),
            nonnegative: false,
            log_lipschitz: None,
        }
    }

    pub fn with_description(mut self, description: impl Into<String>) -> Self {
        self.description = description.into();
        self
    }

    /// Certificate `ω̄(x)|f(x)| ≤ bound`.
    pub fn with_weighted_bound(mut self, bound: f64) -> Self {
        self.weighted_bound = Some(bound);
        self
    }

    /// Closed-form `θ^1 f, θ^2 f, ...` in log-domain form.
    pub fn with_derivative(mut self, d: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.mellin_derivatives.push(Arc::new(d));
        self
    }

    pub fn nonnegative(mut self) -> Self {
        self.nonnegative = true;
        self
    }

    /// Lipschitz constant of `v ↦ f(e^v)`.
    pub fn with_log_lipschitz(mut self, constant: f64) -> Self {
        self.log_lipschitz = Some(constant);
        self
    }

    pub fn constant(c: f64) -> Self {
        let mut f = Self::from_log_fn(format!("const:{c}"), move |_| c)
            .with_description("constant function")
            .with_weighted_bound(c.abs())
            .with_log_lipschitz(0.0);
        for _ in 0..6 {
            f = f.with_derivative(|_| 0.0);
        }
        if c >= 0.0 {
            f = f.nonnegative();
        }
        f
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    pub fn weighted_bound(&self) -> Option<f64> {
        self.weighted_bound
    }

    pub fn is_nonnegative(&self) -> bool {
        self.nonnegative
    }

    pub fn log_lipschitz(&self) -> Option<f64> {
        self.log_lipschitz
    }

    /// Number of closed-form Mellin derivatives available.
    pub fn closed_form_orders(&self) -> u32 {
        self.mellin_derivatives.len() as u32
    }

    /// `f(x)`; non-positive `x` yields NaN.
    pub fn evaluate(&self, x: f64) -> f64 {
        if x > 0.0 {
            (self.value)(x.ln())
        } else {
            f64::NAN
        }
    }

    /// `f(e^v)`.
    #[inline]
    pub fn eval_log(&self, v: f64) -> f64 {
        (self.value)(v)
    }

    /// Closed-form `θ^r f(e^v)` when registered.
    pub fn closed_form_derivative(&self, r: u32, v: f64) -> Option<f64> {
        if r == 0 {
            return Some(self.eval_log(v));
        }
        self.mellin_derivatives.get(r as usize - 1).map(|d| d(v))
    }

    /// `θ^r f` as a function of its own (closed form when available,
    /// otherwise central differences with the default step).
    pub fn mellin_derivative_function(&self, r: u32) -> Result<WeightedFunction> {
        check_order(r)?;
        let name = format!("theta{r}({})", self.name);
        if let Some(d) = self.mellin_derivatives.get(r as usize - 1).cloned() {
            let mut g = Self::from_log_fn(name, move |v| d(v));
            g.mellin_derivatives = self.mellin_derivatives[r as usize..].to_vec();
            return Ok(g);
        }
        let base = self.clone();
        let step = default_step(r);
        Ok(Self::from_log_fn(name, move |v| finite_difference(&base, r, v, step)))
    }
}

/// Resolve a registry name. Constants are written `const:<c>`.
pub fn function_from_name(name: &str) -> Result<WeightedFunction> {
    if let Some(rest) = name.strip_prefix("const:") {
        let c = rest.parse::<f64>().map_err(|_| Error::UnknownName {
            kind: "function",
            name: name.to_string(),
        })?;
        return Ok(WeightedFunction::constant(c));
    }
    let w = weight_log;
    let dw = |v: f64| -2.0 * v / (1.0 + v * v).powi(2);
    let d2w = |v: f64| (6.0 * v * v - 2.0) / (1.0 + v * v).powi(3);
    let f = match name {
        "one" => WeightedFunction::constant(1.0).rename("one"),
        "log" => WeightedFunction::from_log_fn("log", |v| v)
            .with_description("log x")
            .with_weighted_bound(0.5)
            .with_log_lipschitz(1.0)
            .with_derivative(|_| 1.0)
            .with_derivative(|_| 0.0)
            .with_derivative(|_| 0.0),
        "log2" => WeightedFunction::from_log_fn("log2", |v| v * v)
            .with_description("log² x")
            .with_weighted_bound(1.0)
            .nonnegative()
            .with_derivative(|v| 2.0 * v)
            .with_derivative(|_| 2.0)
            .with_derivative(|_| 0.0),
        "weight" => WeightedFunction::from_log_fn("weight", w)
            .with_description("the weight 1/(1 + log² x)")
            .with_weighted_bound(1.0)
            .nonnegative()
            .with_log_lipschitz(0.65)
            .with_derivative(dw)
            .with_derivative(d2w),
        "psi" => WeightedFunction::from_log_fn("psi", psi_log)
            .with_description("1 + log² x, the reciprocal weight")
            .with_weighted_bound(1.0)
            .nonnegative()
            .with_derivative(|v| 2.0 * v)
            .with_derivative(|_| 2.0)
            .with_derivative(|_| 0.0),
        "damped-log2" => WeightedFunction::from_log_fn("damped-log2", |v| v * v / (1.0 + v * v))
            .with_description("log² x / (1 + log² x)")
            .with_weighted_bound(0.25)
            .nonnegative()
            .with_log_lipschitz(0.65)
            .with_derivative(move |v| -dw(v))
            .with_derivative(move |v| -d2w(v)),
        "damped-sin-log" => {
            WeightedFunction::from_log_fn("damped-sin-log", |v| (1.0 + v.sin()) * weight_log(v))
                .with_description("(1 + sin log x) / (1 + log² x)")
                .with_weighted_bound(2.0)
                .nonnegative()
                .with_log_lipschitz(2.3)
                .with_derivative(move |v| v.cos() * w(v) + (1.0 + v.sin()) * dw(v))
                .with_derivative(move |v| {
                    -v.sin() * w(v) + 2.0 * v.cos() * dw(v) + (1.0 + v.sin()) * d2w(v)
                })
        }
        "damped-log-plus" => {
            WeightedFunction::from_log_fn("damped-log-plus", |v| v.max(0.0) * weight_log(v))
                .with_description("max(log x, 0) / (1 + log² x)")
                .with_weighted_bound(0.33)
                .nonnegative()
                .with_log_lipschitz(1.0)
        }
        "tent" => WeightedFunction::from_log_fn("tent", |v| (1.0 - v.abs()).max(0.0))
            .with_description("max(0, 1 - |log x|), bounded and not smooth")
            .with_weighted_bound(1.0)
            .nonnegative()
            .with_log_lipschitz(1.0),
        "jump" => WeightedFunction::from_log_fn("jump", |v| if v < 0.5 { 1.0 } else { 2.0 })
            .with_description("1 for log x < 1/2, 2 otherwise")
            .with_weighted_bound(2.0)
            .nonnegative(),
        _ => {
            return Err(Error::UnknownName {
                kind: "function",
                name: name.to_string(),
            })
        }
    };
    Ok(f)
}

impl WeightedFunction {
    fn rename(mut self, name: &str) -> Self {
        self.name = name.to_string();
        self
    }
}

/// Names accepted by [`function_from_name`], besides `const:<c>`.
pub const FUNCTION_NAMES: &[&str] = &[
    "one",
    "log",
    "log2",
    "weight",
    "psi",
    "damped-log2",
    "damped-sin-log",
    "damped-log-plus",
    "tent",
    "jump",
];

fn checked(f: &WeightedFunction, v: f64) -> Result<f64> {
    let y = f.eval_log(v);
    if y.is_finite() {
        Ok(y)
    } else {
        Err(Error::NonFinite {
            name: f.name.clone(),
            x: v.exp(),
        })
    }
}

/// `max_i ω̄(x_i)|f(x_i)|` on the grid, a lower estimate of `‖f‖_ω̄`.
pub fn weighted_norm(f: &WeightedFunction, grid: &LogGrid) -> Result<f64> {
    grid.log_abscissae().try_fold(0.0f64, |acc, v| {
        Ok(acc.max(weight_log(v) * checked(f, v)?.abs()))
    })
}

/// Default window for sup estimates over `x > 0`: `log x ∈ [-12, 12]`.
pub fn default_modulus_grid() -> LogGrid {
    LogGrid {
        log_min: -12.0,
        log_max: 12.0,
        points: 2401,
    }
}

#[inline]
fn modulus_ratio(f: &WeightedFunction, v: f64, s: f64) -> Result<f64> {
    let diff = (checked(f, v + s)? - checked(f, v)?).abs();
    Ok(diff * weight_log(v) * weight_log(s))
}

/// Grid estimate of the weighted logarithmic modulus of continuity
/// `Ω(f,δ) = sup_{|log t| ≤ δ, x > 0} |f(tx) - f(x)| / ((1 + log² x)(1 + log² t))`.
///
/// `x` runs over `grid` and `log t` over `shift_points` uniform points of
/// `[-δ, δ]`. The result never exceeds the true supremum.
pub fn weighted_log_modulus(
    f: &WeightedFunction,
    delta: f64,
    grid: &LogGrid,
    shift_points: usize,
) -> Result<f64> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InvalidArgument(format!("δ must be positive, got {delta}")));
    }
    let shifts = LogGrid::new(-delta, delta, shift_points.max(2))?;
    let mut best = 0.0f64;
    for s in shifts.log_abscissae() {
        for v in grid.log_abscissae() {
            best = best.max(modulus_ratio(f, v, s)?);
        }
    }
    Ok(best)
}

/// Ω estimates for a whole range of δ over one fixed shift lattice.
///
/// Shifts are `±j·h` with `h = max_delta / steps`, so the feasible shift sets
/// nest and `omega` is exactly monotone in δ.
#[derive(Clone, Debug)]
pub struct ModulusProfile {
    step: f64,
    /// Running maximum of the ratio over shifts `|s| ≤ (j + 1)·h`.
    cumulative: Vec<f64>,
}

impl ModulusProfile {
    pub fn new(f: &WeightedFunction, grid: &LogGrid, max_delta: f64, steps: usize) -> Result<Self> {
        if !(max_delta > 0.0) || steps == 0 {
            return Err(Error::InvalidArgument(
                "modulus profile needs max_delta > 0 and steps ≥ 1".into(),
            ));
        }
        let step = max_delta / steps as f64;
        let mut cumulative = Vec::with_capacity(steps);
        let mut running = 0.0f64;
        for j in 1..=steps {
            let s = step * j as f64;
            for v in grid.log_abscissae() {
                running = running.max(modulus_ratio(f, v, s)?).max(modulus_ratio(f, v, -s)?);
            }
            cumulative.push(running);
        }
        Ok(Self { step, cumulative })
    }

    pub fn max_delta(&self) -> f64 {
        self.step * self.cumulative.len() as f64
    }

    /// Ω estimate over the lattice shifts not exceeding δ.
    pub fn omega(&self, delta: f64) -> f64 {
        let j = (delta / self.step * (1.0 + 1e-12)).floor();
        if j < 1.0 {
            return 0.0;
        }
        let idx = (j as usize).min(self.cumulative.len()) - 1;
        self.cumulative[idx]
    }
}

fn check_order(r: u32) -> Result<()> {
    match r {
        0 => Err(Error::InvalidArgument("Mellin derivative order must be ≥ 1".into())),
        1..=6 => Ok(()),
        _ => Err(Error::UnsupportedOrder(r)),
    }
}

/// Default finite-difference spacing in `log x` for order `r`.
pub fn default_step(r: u32) -> f64 {
    if r <= 2 {
        1e-3
    } else {
        1e-2
    }
}

/// Second-order central difference coefficients `(offsets, weights, divisor)`
/// for `d^r/dv^r`, scaled by `h^{-r}/divisor`.
fn stencil(r: u32) -> (&'static [f64], f64) {
    match r {
        1 => (&[-1.0, 0.0, 1.0], 2.0),
        2 => (&[1.0, -2.0, 1.0], 1.0),
        3 => (&[-1.0, 2.0, 0.0, -2.0, 1.0], 2.0),
        4 => (&[1.0, -4.0, 6.0, -4.0, 1.0], 1.0),
        5 => (&[-1.0, 4.0, -5.0, 0.0, 5.0, -4.0, 1.0], 2.0),
        6 => (&[1.0, -6.0, 15.0, -20.0, 15.0, -6.0, 1.0], 1.0),
        _ => unreachable!("order validated by check_order"),
    }
}

fn finite_difference(f: &WeightedFunction, r: u32, v: f64, step: f64) -> f64 {
    let (weights, divisor) = stencil(r);
    let half = (weights.len() / 2) as f64;
    let sum: f64 = weights
        .iter()
        .enumerate()
        .filter(|(_, w)| **w != 0.0)
        .map(|(i, w)| w * f.eval_log(v + (i as f64 - half) * step))
        .sum();
    sum / (divisor * step.powi(r as i32))
}

/// Central finite-difference estimate of `θ^r f` at `log x = v`, ignoring any
/// closed form.
pub fn mellin_derivative_fd(f: &WeightedFunction, r: u32, v: f64, step: f64) -> Result<f64> {
    check_order(r)?;
    if !(step > 0.0) {
        return Err(Error::InvalidArgument(format!("step must be positive, got {step}")));
    }
    let d = finite_difference(f, r, v, step);
    if d.is_finite() {
        Ok(d)
    } else {
        Err(Error::NonFinite {
            name: format!("theta{r}({})", f.name),
            x: v.exp(),
        })
    }
}

/// `θ^r f(x)`: closed form when registered, central differences otherwise.
pub fn mellin_derivative(f: &WeightedFunction, r: u32, x: f64, step: f64) -> Result<f64> {
    check_order(r)?;
    if !(x > 0.0) {
        return Err(Error::Domain(x));
    }
    let v = x.ln();
    match f.closed_form_derivative(r, v) {
        Some(d) => Ok(d),
        None => mellin_derivative_fd(f, r, v, step),
    }
}

/// `f(u) - Σ_{t=0}^{r} θ^t f(x)/t! (log u - log x)^t`.
pub fn mellin_taylor_remainder(f: &WeightedFunction, r: u32, u: f64, x: f64, step: f64) -> Result<f64> {
    if !(u > 0.0) {
        return Err(Error::Domain(u));
    }
    if !(x > 0.0) {
        return Err(Error::Domain(x));
    }
    let d = u.ln() - x.ln();
    let mut poly = checked(f, x.ln())?;
    let mut factorial = 1.0;
    for t in 1..=r {
        factorial *= t as f64;
        poly += mellin_derivative(f, t, x, step)? / factorial * d.powi(t as i32);
    }
    Ok(checked(f, u.ln())? - poly)
}
