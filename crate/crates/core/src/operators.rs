//! Exponential sampling operators.
//!
//! All four operators share the lattice `e^{k/w}` and the kernel argument
//! `χ(e^{-k} x^w) = φ(w log x - k)`:
//!
//! * `E_{c,T}`: the classical exponential sampling formula with `lin_{c/T}`,
//! * `S_w`: the generalized exponential sampling series,
//! * `I_w`: its Kantorovich form with cell means of `f(e^u)`,
//! * `MG_w`: the max-product series, a ratio of two lattice joins.
//!
//! Index sets come in two modes. With an interval `[a, b]` the operators run
//! over `J_w = {⌈w log a⌉, …, ⌊w log b⌋}`; without one they run over the
//! integer window `|k - w log x| ≤ W`.

use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernels::Kernel;
use crate::quadrature::GaussLegendre;
use crate::spaces::{weight_log, Abscissa, LogGrid, WeightedFunction};

/// Smallest denominator join accepted by the max-product operator.
pub const MIN_DENOMINATOR: f64 = 1e-300;

const LATTICE_SNAP: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Interval {
    pub a: f64,
    pub b: f64,
    pub log_a: f64,
    pub log_b: f64,
}

impl Interval {
    pub fn contains_log(&self, v: f64) -> bool {
        v >= self.log_a - 1e-12 && v <= self.log_b + 1e-12
    }
}

/// Rate, domain mode and discretization of a sampling operator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SamplingConfig {
    pub w: f64,
    pub interval: Option<Interval>,
    /// `None` takes the kernel default (`ceil(R) + 2` or 64).
    pub window_half_width: Option<u32>,
    pub quadrature_points: usize,
}

fn ceil_snapped(y: f64) -> i64 {
    let r = y.round();
    if (y - r).abs() <= LATTICE_SNAP * y.abs().max(1.0) {
        r as i64
    } else {
        y.ceil() as i64
    }
}

fn floor_snapped(y: f64) -> i64 {
    let r = y.round();
    if (y - r).abs() <= LATTICE_SNAP * y.abs().max(1.0) {
        r as i64
    } else {
        y.floor() as i64
    }
}

impl SamplingConfig {
    /// Window mode at rate `w` with default truncation.
    pub fn new(w: f64) -> Result<Self> {
        if !(w > 0.0 && w.is_finite()) {
            return Err(Error::InvalidArgument(format!("sampling rate must be positive, got {w}")));
        }
        Ok(Self {
            w,
            interval: None,
            window_half_width: None,
            quadrature_points: 8,
        })
    }

    /// Window mode with the window pinned to the kernel default.
    pub fn for_kernel(w: f64, kernel: &Kernel) -> Result<Self> {
        Ok(Self::new(w)?.with_window(kernel.default_window()))
    }

    /// Interval mode on `[a, b]`; rejects an empty `J_w`.
    pub fn with_interval(self, a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && a < b && b.is_finite()) {
            return Err(Error::InvalidArgument(format!("interval [{a}, {b}] must satisfy 0 < a < b")));
        }
        self.with_log_interval(a.ln(), b.ln())
    }

    /// Interval mode on `[e^{log_a}, e^{log_b}]`.
    pub fn with_log_interval(mut self, log_a: f64, log_b: f64) -> Result<Self> {
        if !(log_a < log_b && log_a.is_finite() && log_b.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "log interval [{log_a}, {log_b}] must be increasing"
            )));
        }
        self.interval = Some(Interval {
            a: log_a.exp(),
            b: log_b.exp(),
            log_a,
            log_b,
        });
        self.index_set()?;
        Ok(self)
    }

    pub fn with_window(mut self, half_width: u32) -> Self {
        self.window_half_width = Some(half_width);
        self
    }

    pub fn with_quadrature_points(mut self, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("quadrature needs at least one point".into()));
        }
        self.quadrature_points = n;
        Ok(self)
    }

    pub fn with_rate(mut self, w: f64) -> Result<Self> {
        if !(w > 0.0 && w.is_finite()) {
            return Err(Error::InvalidArgument(format!("sampling rate must be positive, got {w}")));
        }
        self.w = w;
        if self.interval.is_some() {
            self.index_set()?;
        }
        Ok(self)
    }

    /// `J_w`; requires interval mode.
    pub fn index_set(&self) -> Result<RangeInclusive<i64>> {
        let iv = self
            .interval
            .ok_or_else(|| Error::InvalidArgument("index set J_w needs an interval".into()))?;
        let first = ceil_snapped(self.w * iv.log_a);
        let last = floor_snapped(self.w * iv.log_b);
        if first > last {
            return Err(Error::EmptyIndexSet {
                w: self.w,
                a: iv.a,
                b: iv.b,
            });
        }
        Ok(first..=last)
    }

    pub fn window_for(&self, kernel: &Kernel) -> u32 {
        self.window_half_width.unwrap_or_else(|| kernel.default_window())
    }

    fn window_range(&self, center_log: f64, window: u32) -> RangeInclusive<i64> {
        let c = self.w * center_log;
        let w = window as f64;
        ceil_snapped(c - w)..=floor_snapped(c + w)
    }

    /// Indices the operators join or sum over at `log x = v`.
    pub fn active_range(&self, kernel: &Kernel, v: f64) -> Result<RangeInclusive<i64>> {
        match self.interval {
            Some(iv) => {
                if !iv.contains_log(v) {
                    return Err(Error::InvalidArgument(format!(
                        "x = {} lies outside [{}, {}]",
                        v.exp(),
                        iv.a,
                        iv.b
                    )));
                }
                self.index_set()
            }
            None => Ok(self.window_range(v, self.window_for(kernel))),
        }
    }
}

/// `J_w` of an interval-mode configuration.
pub fn index_set(config: &SamplingConfig) -> Result<RangeInclusive<i64>> {
    config.index_set()
}

/// Sample values `f(e^{k/w})` over a contiguous range of `k`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExpSamples {
    pub w: f64,
    pub first: i64,
    pub values: Vec<f64>,
    /// Weighted bound of the sampled function, used for tail diagnostics.
    pub weighted_bound: Option<f64>,
}

impl ExpSamples {
    /// Sample `f` at every `k` in `range`.
    pub fn over(f: &WeightedFunction, w: f64, range: RangeInclusive<i64>) -> Result<Self> {
        let first = *range.start();
        let values = range
            .map(|k| {
                let y = f.eval_log(k as f64 / w);
                if y.is_finite() {
                    Ok(y)
                } else {
                    Err(Error::NonFinite {
                        name: format!("{} (sample k = {k})", f.name()),
                        x: (k as f64 / w).exp(),
                    })
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            w,
            first,
            values,
            weighted_bound: f.weighted_bound(),
        })
    }

    /// Wrap precomputed values starting at index `first`.
    pub fn from_values(w: f64, first: i64, values: Vec<f64>) -> Self {
        Self {
            w,
            first,
            values,
            weighted_bound: None,
        }
    }

    pub fn last(&self) -> i64 {
        self.first + self.values.len() as i64 - 1
    }

    pub fn range(&self) -> RangeInclusive<i64> {
        self.first..=self.last()
    }

    pub fn get(&self, k: i64) -> Result<f64> {
        if k < self.first || k > self.last() {
            return Err(Error::SampleCoverage {
                k,
                first: self.first,
                last: self.last(),
            });
        }
        Ok(self.values[(k - self.first) as usize])
    }

    /// Apply `g` to every sample value.
    pub fn map(&self, g: impl Fn(f64) -> f64) -> Self {
        Self {
            w: self.w,
            first: self.first,
            values: self.values.iter().map(|&y| g(y)).collect(),
            weighted_bound: None,
        }
    }

    fn cover(&self, range: &RangeInclusive<i64>) -> Result<()> {
        for k in [*range.start(), *range.end()] {
            self.get(k)?;
        }
        Ok(())
    }
}

/// Materialize `f(e^{k/w})` for the index set at `log x = center_log`.
pub fn take_samples(f: &WeightedFunction, config: &SamplingConfig, center_log: f64) -> Result<ExpSamples> {
    let range = match config.interval {
        Some(_) => config.index_set()?,
        None => config.window_range(center_log, config.window_half_width.unwrap_or(64)),
    };
    ExpSamples::over(f, config.w, range)
}

/// An operator value with the index range it used.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Evaluation {
    pub value: f64,
    pub first: i64,
    pub last: i64,
    /// Bound on the change from indices outside the window (window mode only).
    pub tail_bound: Option<f64>,
}

/// Bound on `|f(e^{k/w})|` over `|k| ≤ reach` from a weighted bound.
fn sample_bound(weighted_bound: f64, reach: f64, w: f64) -> f64 {
    weighted_bound * (1.0 + (reach / w).powi(2))
}

/// Tail of the window sum/join: terms at `|w log x - k| > W` weighted by the
/// sample growth allowed by the weighted bound. `join` selects max instead of sum.
fn window_tail(kernel: &Kernel, config: &SamplingConfig, v: f64, weighted_bound: Option<f64>, join: bool) -> Option<f64> {
    if config.interval.is_some() {
        return None;
    }
    let m_bound = weighted_bound?;
    let window = config.window_for(kernel) as f64;
    let center = (config.w * v).abs();
    if kernel.envelope(window)? == 0.0 {
        return Some(0.0);
    }
    let mut acc = 0.0f64;
    for m in 1..=200_000u32 {
        let env = kernel.envelope(window + m as f64 - 1.0)?;
        if !env.is_finite() {
            return Some(f64::INFINITY);
        }
        let term = 2.0 * env * sample_bound(m_bound, center + window + m as f64 + 1.0, config.w);
        if join {
            acc = acc.max(term);
        } else {
            acc += term;
        }
        if env == 0.0 || term <= 1e-18 * acc.max(f64::MIN_POSITIVE) {
            return Some(acc);
        }
    }
    Some(f64::INFINITY)
}

/// `MG_w(f, x) = max_k χ(e^{-k}x^w) f(e^{k/w}) / max_k χ(e^{-k}x^w)`.
///
/// Both joins are taken over the signed products.
pub fn max_product_series(
    kernel: &Kernel,
    samples: &ExpSamples,
    x: Abscissa,
    config: &SamplingConfig,
) -> Result<Evaluation> {
    let v = x.log_x;
    let range = config.active_range(kernel, v)?;
    samples.cover(&range)?;
    let wv = config.w * v;
    let mut numerator = f64::NEG_INFINITY;
    let mut denominator = f64::NEG_INFINITY;
    for k in range.clone() {
        let chi = kernel.eval_log(wv - k as f64);
        numerator = numerator.max(chi * samples.get(k)?);
        denominator = denominator.max(chi);
    }
    if !(denominator >= MIN_DENOMINATOR) {
        return Err(Error::DegenerateDenominator {
            x: x.x,
            w: config.w,
            first: *range.start(),
            last: *range.end(),
            denominator,
        });
    }
    let tail_bound = window_tail(kernel, config, v, samples.weighted_bound, true).map(|t| t / denominator);
    Ok(Evaluation {
        value: numerator / denominator,
        first: *range.start(),
        last: *range.end(),
        tail_bound,
    })
}

/// `S_w f(x) = Σ_k χ(e^{-k}x^w) f(e^{k/w})`, truncated to the active range.
pub fn generalized_series(
    kernel: &Kernel,
    samples: &ExpSamples,
    x: Abscissa,
    config: &SamplingConfig,
) -> Result<Evaluation> {
    let v = x.log_x;
    let range = config.active_range(kernel, v)?;
    samples.cover(&range)?;
    let wv = config.w * v;
    let mut sum = 0.0;
    for k in range.clone() {
        sum += kernel.eval_log(wv - k as f64) * samples.get(k)?;
    }
    if !sum.is_finite() {
        return Err(Error::NonFinite {
            name: format!("S_w partial sum with {}", kernel.name()),
            x: x.x,
        });
    }
    Ok(Evaluation {
        value: sum,
        first: *range.start(),
        last: *range.end(),
        tail_bound: window_tail(kernel, config, v, samples.weighted_bound, false),
    })
}

/// `I_w f(x) = Σ_k χ(e^{-k}x^w) w ∫_{k/w}^{(k+1)/w} f(e^u) du` with
/// Gauss–Legendre cell means.
pub fn kantorovich_series(
    kernel: &Kernel,
    f: &WeightedFunction,
    x: Abscissa,
    config: &SamplingConfig,
) -> Result<Evaluation> {
    let rule = GaussLegendre::new(config.quadrature_points);
    kantorovich_with_rule(kernel, f, x, config, &rule)
}

fn kantorovich_with_rule(
    kernel: &Kernel,
    f: &WeightedFunction,
    x: Abscissa,
    config: &SamplingConfig,
    rule: &GaussLegendre,
) -> Result<Evaluation> {
    let v = x.log_x;
    let range = config.active_range(kernel, v)?;
    let w = config.w;
    let wv = w * v;
    let mut sum = 0.0;
    for k in range.clone() {
        let chi = kernel.eval_log(wv - k as f64);
        if chi == 0.0 {
            continue;
        }
        let mean = rule.mean(k as f64 / w, (k + 1) as f64 / w, |u| f.eval_log(u));
        if !mean.is_finite() {
            return Err(Error::NonFinite {
                name: format!("{} (cell mean k = {k})", f.name()),
                x: (k as f64 / w).exp(),
            });
        }
        sum += chi * mean;
    }
    Ok(Evaluation {
        value: sum,
        first: *range.start(),
        last: *range.end(),
        tail_bound: window_tail(kernel, config, v + 1.0 / w, f.weighted_bound(), false),
    })
}

/// `E_{c,T} f(x) = Σ_k lin_{c/T}(e^{-k}x^T) f(e^{k/T})` over `|k - T log x| ≤ window`.
///
/// The tail diagnostic is the change from halving the window. Mellin
/// band-limited `f` (band `[-T, T]`) is reproduced exactly by the full series;
/// the truncated sum converges only conditionally.
pub fn classical_exponential_formula(
    f: &WeightedFunction,
    c: f64,
    t: f64,
    x: Abscissa,
    window: u32,
) -> Result<Evaluation> {
    let kernel = Kernel::lin(c / t);
    let config = SamplingConfig::new(t)?.with_window(window);
    let range = config.active_range(&kernel, x.log_x)?;
    let samples = ExpSamples::over(f, t, range)?;
    let full = generalized_series(&kernel, &samples, x, &config)?;
    let half_config = config.with_window(window / 2);
    let half = generalized_series(&kernel, &samples, x, &half_config)?;
    Ok(Evaluation {
        tail_bound: Some((full.value - half.value).abs()),
        ..full
    })
}

/// Operator selector used by grid evaluation and the CLI.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum OperatorKind {
    /// Generalized series `S_w`.
    Generalized,
    /// Kantorovich series `I_w`.
    Kantorovich,
    /// Max-product series `MG_w`.
    MaxProduct,
    /// Classical formula `E_{c,T}` with `T = w`.
    Classical { c: f64 },
}

impl OperatorKind {
    pub fn tag(&self) -> &'static str {
        match self {
            Self::Generalized => "S",
            Self::Kantorovich => "I",
            Self::MaxProduct => "MG",
            Self::Classical { .. } => "E",
        }
    }
}

impl fmt::Display for OperatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Parses `S`, `I`, `MG` or `E` (with `c = 0`).
impl FromStr for OperatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "S" => Ok(Self::Generalized),
            "I" => Ok(Self::Kantorovich),
            "MG" => Ok(Self::MaxProduct),
            "E" => Ok(Self::Classical { c: 0.0 }),
            _ => Err(Error::UnknownName {
                kind: "operator",
                name: s.to_string(),
            }),
        }
    }
}

/// One grid point of an operator evaluation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridRow {
    pub x: f64,
    pub log_x: f64,
    pub value: Option<f64>,
    pub error_vs_f: Option<f64>,
    pub weighted_error: Option<f64>,
    pub tail_bound: Option<f64>,
    pub failure: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridEvaluation {
    pub operator: String,
    pub kernel: String,
    pub function: String,
    pub config: SamplingConfig,
    pub grid: LogGrid,
    pub rows: Vec<GridRow>,
    /// Set when the run falls outside the convergence theorems' hypotheses.
    pub notes: Vec<String>,
}

impl GridEvaluation {
    pub fn values(&self) -> impl Iterator<Item = Option<f64>> + '_ {
        self.rows.iter().map(|r| r.value)
    }

    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| r.failure.is_some()).count()
    }
}

/// Apply an operator at every grid point. Failures are recorded per point.
pub fn evaluate_on_grid(
    op: OperatorKind,
    f: &WeightedFunction,
    kernel: &Kernel,
    config: &SamplingConfig,
    grid: &LogGrid,
) -> GridEvaluation {
    let mut notes = Vec::new();
    let kernel_used = match op {
        OperatorKind::Classical { c } => Kernel::lin(c / config.w),
        _ => kernel.clone(),
    };
    if op == OperatorKind::MaxProduct {
        if !kernel.is_nonnegative() {
            notes.push(format!(
                "kernel {} takes negative values: outside theorem hypotheses",
                kernel.name()
            ));
        }
        if !f.is_nonnegative() {
            notes.push(format!(
                "function {} is not certified nonnegative: outside theorem hypotheses",
                f.name()
            ));
        }
    }

    // One sample vector covering the whole grid, when the range is sampleable.
    let shared = match op {
        OperatorKind::Generalized | OperatorKind::MaxProduct => {
            let range = match config.interval {
                Some(_) => config.index_set().ok(),
                None => {
                    let lo = config.active_range(&kernel_used, grid.log_min).ok();
                    let hi = config.active_range(&kernel_used, grid.log_max).ok();
                    lo.zip(hi).map(|(lo, hi)| *lo.start()..=*hi.end())
                }
            };
            range.and_then(|r| ExpSamples::over(f, config.w, r).ok())
        }
        _ => None,
    };
    let rule = GaussLegendre::new(config.quadrature_points);

    let rows = grid
        .abscissae()
        .map(|x| {
            let result = match op {
                OperatorKind::Generalized | OperatorKind::MaxProduct => {
                    let samples = match &shared {
                        Some(s) => Ok(s.clone()),
                        None => config
                            .active_range(&kernel_used, x.log_x)
                            .and_then(|r| ExpSamples::over(f, config.w, r)),
                    };
                    samples.and_then(|s| {
                        if op == OperatorKind::MaxProduct {
                            max_product_series(&kernel_used, &s, x, config)
                        } else {
                            generalized_series(&kernel_used, &s, x, config)
                        }
                    })
                }
                OperatorKind::Kantorovich => kantorovich_with_rule(&kernel_used, f, x, config, &rule),
                OperatorKind::Classical { c } => classical_exponential_formula(
                    f,
                    c,
                    config.w,
                    x,
                    config.window_for(&kernel_used),
                ),
            };
            match result {
                Ok(e) => {
                    let err = (e.value - f.eval_log(x.log_x)).abs();
                    GridRow {
                        x: x.x,
                        log_x: x.log_x,
                        value: Some(e.value),
                        error_vs_f: Some(err),
                        weighted_error: Some(err * weight_log(x.log_x)),
                        tail_bound: e.tail_bound,
                        failure: None,
                    }
                }
                Err(e) => GridRow {
                    x: x.x,
                    log_x: x.log_x,
                    value: None,
                    error_vs_f: None,
                    weighted_error: None,
                    tail_bound: None,
                    failure: Some(e.to_string()),
                },
            }
        })
        .collect();

    GridEvaluation {
        operator: op.tag().to_string(),
        kernel: kernel_used.name().to_string(),
        function: f.name().to_string(),
        config: *config,
        grid: *grid,
        rows,
        notes,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::function_from_name;
    use std::f64::consts::E;

    fn b(n: u32) -> Kernel {
        Kernel::mellin_bspline(n).unwrap()
    }

    #[test]
    fn index_set_examples() {
        let c = SamplingConfig::new(3.0).unwrap().with_interval(1.0, E).unwrap();
        assert_eq!(index_set(&c).unwrap(), 0..=3);
        let c = SamplingConfig::new(1.0).unwrap().with_interval(1.0, E).unwrap();
        assert_eq!(index_set(&c).unwrap(), 0..=1);
        let c = SamplingConfig::new(2.0).unwrap().with_interval(E, E * E).unwrap();
        assert_eq!(index_set(&c).unwrap(), 2..=4);
        assert!(index_set(&SamplingConfig::new(2.0).unwrap()).is_err());
        let empty = SamplingConfig::new(0.5).unwrap().with_log_interval(0.1, 0.9);
        assert!(matches!(empty, Err(Error::EmptyIndexSet { .. })));
    }

    #[test]
    fn sample_examples() {
        let c = SamplingConfig::new(2.0).unwrap().with_window(3);
        let one = function_from_name("one").unwrap();
        let s = take_samples(&one, &c, 0.0).unwrap();
        assert_eq!(s.range(), -3..=3);
        assert!(s.values.iter().all(|&y| y == 1.0));
        let log = function_from_name("log").unwrap();
        let s = take_samples(&log, &c.with_window(8), 1.0).unwrap();
        assert_eq!(s.get(4).unwrap(), 2.0);
        assert!(matches!(s.get(100), Err(Error::SampleCoverage { .. })));
        let psi = function_from_name("psi").unwrap();
        let s = take_samples(&psi, &SamplingConfig::new(1.0).unwrap().with_window(2), 0.0).unwrap();
        assert_eq!(s.get(1).unwrap(), 2.0);
        let pole = WeightedFunction::from_log_fn("pole", |v| 1.0 / v);
        assert!(matches!(take_samples(&pole, &c, 0.0), Err(Error::NonFinite { .. })));
    }

    #[test]
    fn max_product_reproduces_constants() {
        let k = b(3);
        let c = SamplingConfig::for_kernel(8.0, &k).unwrap();
        let f = WeightedFunction::constant(2.5);
        let samples = ExpSamples::over(&f, 8.0, -100..=100).unwrap();
        for i in -50..=50 {
            let x = Abscissa::from_log(i as f64 / 37.0);
            let v = max_product_series(&k, &samples, x, &c).unwrap();
            assert_eq!(v.value, 2.5);
            assert_eq!(v.tail_bound, Some(0.0));
        }
    }

    #[test]
    fn max_product_matches_direct_ratio_in_interval_mode() {
        let k = b(3);
        let c = SamplingConfig::new(4.0).unwrap().with_interval(1.0, E).unwrap();
        let log = function_from_name("log").unwrap();
        let samples = take_samples(&log, &c, 0.0).unwrap();
        let x = Abscissa::from_log(0.5);
        let got = max_product_series(&k, &samples, x, &c).unwrap().value;
        // direct: B_3(2 - k) · k/4 over k = 0..=4
        let b3 = |t: f64| {
            let a = t.abs();
            if a <= 0.5 {
                0.75 - a * a
            } else if a <= 1.5 {
                0.5 * (1.5 - a).powi(2)
            } else {
                0.0
            }
        };
        let num = (0..=4).map(|k| b3(2.0 - k as f64) * k as f64 / 4.0).fold(f64::MIN, f64::max);
        let den = (0..=4).map(|k| b3(2.0 - k as f64)).fold(f64::MIN, f64::max);
        assert!((got - num / den).abs() < 1e-15);
        assert!((got - 0.5).abs() < 1e-15);
    }

    #[test]
    fn max_product_rejects_outside_interval_and_degenerate_denominator() {
        let k = b(2);
        let c = SamplingConfig::new(4.0).unwrap().with_interval(1.0, E).unwrap();
        let one = function_from_name("one").unwrap();
        let s = take_samples(&one, &c, 0.0).unwrap();
        assert!(max_product_series(&k, &s, Abscissa::from_log(2.0), &c).is_err());

        let narrow = Kernel::custom("spike", |t: f64| if t.abs() < 0.1 { 1.0 } else { 0.0 }, Some(0.1), f64::INFINITY);
        let c = SamplingConfig::new(1.0).unwrap().with_window(3);
        let s = ExpSamples::over(&one, 1.0, -10..=10).unwrap();
        let err = max_product_series(&narrow, &s, Abscissa::from_log(0.5), &c).unwrap_err();
        assert!(matches!(err, Error::DegenerateDenominator { .. }));
    }

    #[test]
    fn generalized_series_partition_of_unity() {
        let one = function_from_name("one").unwrap();
        for n in 1..=6 {
            let k = b(n);
            let c = SamplingConfig::for_kernel(5.0, &k).unwrap();
            let s = ExpSamples::over(&one, 5.0, -60..=60).unwrap();
            for i in -20..=20 {
                let x = Abscissa::from_log(i as f64 / 13.0);
                let v = generalized_series(&k, &s, x, &c).unwrap().value;
                assert!((v - 1.0).abs() < 1e-13, "n={n}: {v}");
            }
        }
        let zero = WeightedFunction::constant(0.0);
        let s = ExpSamples::over(&zero, 5.0, -60..=60).unwrap();
        let c = SamplingConfig::for_kernel(5.0, &b(3)).unwrap();
        assert_eq!(generalized_series(&b(3), &s, Abscissa::from_log(0.1), &c).unwrap().value, 0.0);
    }

    #[test]
    fn generalized_series_with_lin_kernel_at_lattice_points() {
        let one = function_from_name("one").unwrap();
        let k = Kernel::lin(0.0);
        let c = SamplingConfig::new(2.0).unwrap().with_window(40);
        let s = ExpSamples::over(&one, 2.0, -60..=60).unwrap();
        for m in -5..=5 {
            let x = Abscissa::from_log(m as f64 / 2.0);
            assert_eq!(generalized_series(&k, &s, x, &c).unwrap().value, 1.0);
        }
    }

    #[test]
    fn kantorovich_examples() {
        let one = function_from_name("one").unwrap();
        let log = function_from_name("log").unwrap();
        for n in [2, 3, 4] {
            let k = b(n);
            let c = SamplingConfig::for_kernel(6.0, &k).unwrap();
            for i in -10..=10 {
                let x = Abscissa::from_log(i as f64 / 7.0);
                let v = kantorovich_series(&k, &one, x, &c).unwrap().value;
                assert!((v - 1.0).abs() < 1e-13);
            }
        }
        let k = b(2);
        let w = 6.0;
        let c = SamplingConfig::for_kernel(w, &k).unwrap();
        for i in -10..=10 {
            let v = i as f64 / 7.0;
            let got = kantorovich_series(&k, &log, Abscissa::from_log(v), &c).unwrap().value;
            // brute-force: hat weights times exact cell means (k + 1/2)/w
            let oracle: f64 = (-100..=100)
                .map(|kk| {
                    let t = w * v - kk as f64;
                    (1.0 - t.abs()).max(0.0) * (kk as f64 + 0.5) / w
                })
                .sum();
            assert!((got - oracle).abs() < 1e-13);
            assert!((got - (v + 0.5 / w)).abs() < 1e-13);
        }
    }

    #[test]
    fn kantorovich_equals_generalized_on_constants() {
        let f = WeightedFunction::constant(3.0);
        for name in ["bspline3", "gauss1", "linc0"] {
            let k = Kernel::from_name(name).unwrap();
            let c = SamplingConfig::for_kernel(4.0, &k).unwrap();
            let x = Abscissa::from_log(0.3);
            let range = c.active_range(&k, 0.3).unwrap();
            let s = ExpSamples::over(&f, 4.0, range).unwrap();
            let a = generalized_series(&k, &s, x, &c).unwrap().value;
            let b = kantorovich_series(&k, &f, x, &c).unwrap().value;
            assert!((a - b).abs() < 1e-13 * a.abs().max(1.0), "{name}");
        }
    }

    #[test]
    fn classical_formula_interpolates_and_vanishes() {
        let f = function_from_name("damped-sin-log").unwrap();
        for t in [1.0, 2.0] {
            for m in -3..=3 {
                let x = Abscissa::from_log(m as f64 / t);
                let e = classical_exponential_formula(&f, 0.7, t, x, 50).unwrap();
                assert_eq!(e.value, f.eval_log(m as f64 / t));
            }
        }
        let zero = WeightedFunction::constant(0.0);
        let e = classical_exponential_formula(&zero, 0.0, 1.0, Abscissa::from_log(0.5), 100).unwrap();
        assert_eq!(e.value, 0.0);
    }

    #[test]
    fn classical_formula_conditional_convergence() {
        let one = function_from_name("one").unwrap();
        let x = Abscissa::from_log(0.5);
        let direct = |w: i64| -> f64 {
            (-w..=w)
                .map(|k| {
                    let t = 0.5 - k as f64;
                    (std::f64::consts::PI * t).sin() / (std::f64::consts::PI * t)
                })
                .sum()
        };
        for window in [1000u32, 10_000] {
            let e = classical_exponential_formula(&one, 0.0, 1.0, x, window).unwrap();
            // window around T log x = 0.5 covers k in [-999, 1000] etc.
            let oracle: f64 = direct(window as i64 - 1) + {
                let t = 0.5 - window as f64;
                (std::f64::consts::PI * t).sin() / (std::f64::consts::PI * t)
            };
            assert!((e.value - oracle).abs() < 1e-12, "{} vs {}", e.value, oracle);
            assert!((e.value - 1.0).abs() < 1e-3);
            assert!(e.tail_bound.unwrap() > 0.0);
        }
    }

    #[test]
    fn grid_evaluation_shape_and_constants() {
        let k = b(3);
        let c = SamplingConfig::for_kernel(8.0, &k).unwrap();
        let f = WeightedFunction::constant(2.0);
        let grid: LogGrid = "-1:1:101".parse().unwrap();
        for op in [OperatorKind::MaxProduct, OperatorKind::Generalized, OperatorKind::Kantorovich] {
            let out = evaluate_on_grid(op, &f, &k, &c, &grid);
            assert_eq!(out.rows.len(), 101);
            for v in out.values() {
                assert!((v.unwrap() - 2.0).abs() < 1e-13);
            }
        }
        let single = evaluate_on_grid(OperatorKind::MaxProduct, &f, &k, &c, &LogGrid::single(0.3));
        assert_eq!(single.rows.len(), 1);
        let samples = ExpSamples::over(&f, 8.0, -20..=20).unwrap();
        let direct = max_product_series(&k, &samples, Abscissa::from_log(0.3), &c).unwrap();
        assert_eq!(single.rows[0].value, Some(direct.value));
    }

    #[test]
    fn grid_evaluation_records_point_failures() {
        let k = b(3);
        let c = SamplingConfig::new(4.0).unwrap().with_interval(1.0, E).unwrap();
        let f = function_from_name("weight").unwrap();
        let grid = LogGrid::new(-0.5, 1.5, 21).unwrap();
        let out = evaluate_on_grid(OperatorKind::MaxProduct, &f, &k, &c, &grid);
        assert_eq!(out.rows.len(), 21);
        assert!(out.failures() > 0);
        assert!(out.rows[10].value.is_some());
        let lin = evaluate_on_grid(OperatorKind::MaxProduct, &f, &Kernel::lin(0.0), &c, &grid);
        assert!(!lin.notes.is_empty());
    }

    #[test]
    fn truncation_consistency_for_gaussian() {
        let k = Kernel::mellin_gaussian(1.0).unwrap();
        let f = function_from_name("damped-sin-log").unwrap();
        for w in [2.0, 8.0] {
            let narrow = SamplingConfig::new(w).unwrap().with_window(3);
            let wide = narrow.with_window(6);
            for i in -10..=10 {
                let x = Abscissa::from_log(i as f64 / 5.0);
                let s = ExpSamples::over(&f, w, -200..=200).unwrap();
                for (a, b) in [
                    (generalized_series(&k, &s, x, &narrow).unwrap(), generalized_series(&k, &s, x, &wide).unwrap()),
                    (max_product_series(&k, &s, x, &narrow).unwrap(), max_product_series(&k, &s, x, &wide).unwrap()),
                    (kantorovich_series(&k, &f, x, &narrow).unwrap(), kantorovich_series(&k, &f, x, &wide).unwrap()),
                ] {
                    let tail = a.tail_bound.unwrap();
                    assert!((a.value - b.value).abs() <= tail + 1e-15, "{} vs {} tail {tail}", a.value, b.value);
                }
            }
        }
    }

    #[test]
    fn operator_tags_round_trip() {
        for tag in ["S", "I", "MG", "E"] {
            assert_eq!(tag.parse::<OperatorKind>().unwrap().tag(), tag);
        }
        assert!("X".parse::<OperatorKind>().is_err());
    }
}
