//! Moment, lattice and modulus lemmas.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::BoundCheck;
use crate::error::{Error, Result};
use crate::kernels::{
    discrete_absolute_moment, eta_lower_bound, lattice_join, Kernel, KernelShape, ScanPolicy, Tolerances,
};
use crate::operators::{
    classical_exponential_formula, evaluate_on_grid, max_product_series, ExpSamples, OperatorKind, SamplingConfig,
};
use crate::spaces::{psi_log, weighted_norm, Abscissa, LogGrid, ModulusProfile, WeightedFunction};

/// Scope of [`lemma_suite_with`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LemmaOptions {
    /// Top order for moment dominance.
    pub mu: f64,
    pub tail_orders: Vec<f64>,
    pub deltas: Vec<f64>,
    pub tail_rates: Vec<f64>,
    /// `[log a, log b]` for the denominator bound.
    pub log_interval: (f64, f64),
    /// Rates for the denominator bound; each must be `≥ 1/(log b - log a)`.
    pub interval_rates: Vec<f64>,
    pub x_points: usize,
    pub scan: ScanPolicy,
}

impl Default for LemmaOptions {
    fn default() -> Self {
        Self {
            mu: 5.0,
            tail_orders: vec![1.0, 2.0, 5.0],
            deltas: vec![0.25, 0.5],
            tail_rates: vec![4.0, 8.0, 16.0, 32.0, 64.0, 128.0],
            log_interval: (0.0, 2.0),
            interval_rates: vec![0.5, 1.0, 2.0, 4.0, 8.0, 16.0],
            x_points: 257,
            scan: ScanPolicy::default(),
        }
    }
}

/// Moment dominance, tail decay, denominator lower bound and the
/// `ν = 0` cross-check with default scope.
pub fn lemma_suite(kernel: &Kernel, tol: &Tolerances) -> Vec<BoundCheck> {
    lemma_suite_with(kernel, tol, &LemmaOptions::default())
}

pub fn lemma_suite_with(kernel: &Kernel, tol: &Tolerances, options: &LemmaOptions) -> Vec<BoundCheck> {
    let mut checks = moment_dominance(kernel, tol, options);
    checks.extend(tail_decay(kernel, tol, options));
    checks.extend(denominator_bound(kernel, tol, options));
    checks.push(zero_order_consistency(kernel, options));
    checks
}

fn orders_up_to(mu: f64) -> Vec<f64> {
    let mut orders: Vec<f64> = (0..=(mu.floor() as u32)).map(f64::from).collect();
    if mu.fract() != 0.0 {
        orders.push(mu);
    }
    orders
}

/// `m_ν ≤ m_0 + m_μ` for `0 ≤ ν ≤ μ`.
fn moment_dominance(kernel: &Kernel, tol: &Tolerances, options: &LemmaOptions) -> Vec<BoundCheck> {
    let name = |nu: f64| format!("moment dominance ν={nu} μ={}", options.mu);
    let mut values = Vec::new();
    for nu in orders_up_to(options.mu) {
        match discrete_absolute_moment(kernel, nu, &options.scan) {
            Ok(m) => values.push((nu, m.value)),
            Err(e) => {
                return vec![BoundCheck::hypothesis_not_met(
                    name(options.mu),
                    format!("m_{nu} of {} diverges: {e}", kernel.name()),
                )]
            }
        }
    }
    let m0 = values[0].1;
    let m_mu = values.last().map(|p| p.1).unwrap_or(m0);
    values
        .iter()
        .map(|&(nu, m)| BoundCheck::exact(name(nu), m, m0 + m_mu, tol.absolute, None))
        .collect()
}

/// `max_{|k - w log u| > δw} |χ(e^{-k} u^w)| ≤ m_ν / (δw)^ν` over the scanned `u`.
fn tail_decay(kernel: &Kernel, tol: &Tolerances, options: &LemmaOptions) -> Vec<BoundCheck> {
    let scan = &options.scan;
    let window = scan.resolve_window(kernel) as f64;
    let mut checks = Vec::new();
    let mut moments = Vec::new();
    for &nu in &options.tail_orders {
        match discrete_absolute_moment(kernel, nu, scan) {
            Ok(m) => moments.push((nu, Some(m.value))),
            Err(e) => {
                checks.push(BoundCheck::hypothesis_not_met(
                    format!("tail decay ν={nu}"),
                    format!("m_{nu} of {} diverges: {e}", kernel.name()),
                ));
                moments.push((nu, None));
            }
        }
    }
    for &delta in &options.deltas {
        for &w in &options.tail_rates {
            let cut = delta * w;
            // The join depends on u^w only through the fractional part s of w log u.
            let mut measured = 0.0f64;
            let mut witness = 0.0;
            for s in scan.log_u_grid() {
                let lo = (s - cut - window).floor() as i64;
                let hi = (s + cut + window).ceil() as i64;
                for k in lo..=hi {
                    let t = s - k as f64;
                    if t.abs() > cut {
                        let y = kernel.eval_log(t).abs();
                        if y > measured {
                            measured = y;
                            witness = s;
                        }
                    }
                }
            }
            let beyond = kernel.envelope(cut + window).unwrap_or(0.0);
            let lhs = measured.max(beyond);
            for &(nu, m) in &moments {
                if let Some(m) = m {
                    let rhs = m / cut.powf(nu);
                    checks.push(BoundCheck::exact(
                        format!("tail decay ν={nu} δ={delta} w={w}"),
                        lhs,
                        rhs,
                        tol.absolute,
                        Some(witness),
                    ));
                }
            }
        }
    }
    checks
}

/// `max_{k ∈ J_w} χ(e^{-k} x^w) ≥ η` on `[a, b]`, and the same over the full window.
fn denominator_bound(kernel: &Kernel, tol: &Tolerances, options: &LemmaOptions) -> Vec<BoundCheck> {
    let (la, lb) = options.log_interval;
    let names = ["denominator bound on J_w", "denominator bound over all k"];
    let eta = match eta_lower_bound(kernel, options.scan.eta_points) {
        Ok(eta) if eta > tol.eta_min => eta,
        Ok(eta) => {
            return names
                .iter()
                .map(|n| BoundCheck::hypothesis_not_met(*n, format!("(χ2) fails: η = {eta:e}")))
                .collect()
        }
        Err(e) => return names.iter().map(|n| BoundCheck::hypothesis_not_met(*n, e.to_string())).collect(),
    };
    let grid = match LogGrid::new(la, lb, options.x_points.max(2)) {
        Ok(g) => g,
        Err(e) => return names.iter().map(|n| BoundCheck::hypothesis_not_met(*n, e.to_string())).collect(),
    };
    let window = options.scan.resolve_window(kernel);
    let mut interval_min = (f64::INFINITY, None);
    let mut full_min = (f64::INFINITY, None);
    for &w in &options.interval_rates {
        if w * (lb - la) < 1.0 {
            return names
                .iter()
                .map(|n| BoundCheck::hypothesis_not_met(*n, format!("w = {w} below 1/(log b - log a)")))
                .collect();
        }
        let range = match SamplingConfig::new(w).and_then(|c| c.with_log_interval(la, lb)).and_then(|c| c.index_set()) {
            Ok(r) => r,
            Err(e) => return names.iter().map(|n| BoundCheck::hypothesis_not_met(*n, e.to_string())).collect(),
        };
        for v in grid.log_abscissae() {
            let u = w * v;
            let on_interval = range.clone().map(|k| kernel.eval_log(u - k as f64)).fold(f64::NEG_INFINITY, f64::max);
            if on_interval < interval_min.0 {
                interval_min = (on_interval, Some(v));
            }
            let full = lattice_join(kernel, u, window);
            if full < full_min.0 {
                full_min = (full, Some(v));
            }
        }
    }
    let rates = format!("w ∈ {:?}", options.interval_rates);
    vec![
        BoundCheck::exact(names[0], eta, interval_min.0, tol.absolute, interval_min.1).with_note(rates.clone()),
        BoundCheck::exact(names[1], eta, full_min.0, tol.absolute, full_min.1).with_note(rates),
    ]
}

/// `m_0` from the moment scanner equals the lattice join maximized over `u`.
fn zero_order_consistency(kernel: &Kernel, options: &LemmaOptions) -> BoundCheck {
    let name = "m_0 equals max lattice join";
    let m0 = match discrete_absolute_moment(kernel, 0.0, &options.scan) {
        Ok(m) => m,
        Err(e) => return BoundCheck::hypothesis_not_met(name, e.to_string()),
    };
    let join = options
        .scan
        .log_u_grid()
        .map(|s| lattice_join(kernel, s, m0.window))
        .fold(0.0, f64::max);
    BoundCheck::exact(name, (m0.value - join).abs(), 0.0, 1e-12, None)
        .with_note(format!("m_0 = {:.15e}, join = {join:.15e}", m0.value))
}

/// Lattice properties of `MG_w` on random nonnegative sample vectors over
/// `J_w` of `[e^{log a}, e^{log b}]`: monotonicity, subadditivity,
/// `|MG f - MG g| ≤ MG |f - g|` and positive homogeneity.
///
/// Each check reports the largest violation `lhs - rhs` relative to
/// `max(1, |rhs|)`, so it holds when that stays below `1e-12`.
pub fn lattice_property_check(
    kernel: &Kernel,
    w: f64,
    log_interval: (f64, f64),
    grid_points: usize,
    trials: usize,
    seed: u64,
) -> Result<Vec<BoundCheck>> {
    let config = SamplingConfig::new(w)?.with_log_interval(log_interval.0, log_interval.1)?;
    let range = config.index_set()?;
    let first = *range.start();
    let n = range.count();
    let grid = LogGrid::new(log_interval.0, log_interval.1, grid_points)?;
    let xs: Vec<Abscissa> = grid.abscissae().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = [(f64::NEG_INFINITY, None); 4];
    let mg = |values: &[f64], x: Abscissa| -> Result<f64> {
        let samples = ExpSamples::from_values(w, first, values.to_vec());
        Ok(max_product_series(kernel, &samples, x, &config)?.value)
    };
    let mut record = |i: usize, lhs: f64, rhs: f64, at: f64| {
        let excess = (lhs - rhs) / rhs.abs().max(1.0);
        if excess > worst[i].0 {
            worst[i] = (excess, Some(at));
        }
    };
    for _ in 0..trials {
        let f: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..10.0)).collect();
        let g: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..10.0)).collect();
        let above: Vec<f64> = f.iter().map(|y| y + rng.gen_range(0.0..5.0)).collect();
        let lambda = 10f64.powf(rng.gen_range(-2.0..2.0));
        let sum: Vec<f64> = f.iter().zip(&g).map(|(a, b)| a + b).collect();
        let diff: Vec<f64> = f.iter().zip(&g).map(|(a, b)| (a - b).abs()).collect();
        let scaled: Vec<f64> = f.iter().map(|y| lambda * y).collect();
        for &x in &xs {
            let (mf, mg_, mabove) = (mg(&f, x)?, mg(&g, x)?, mg(&above, x)?);
            record(0, mf, mabove, x.log_x);
            record(1, mg(&sum, x)?, mf + mg_, x.log_x);
            record(2, (mf - mg_).abs(), mg(&diff, x)?, x.log_x);
            let ms = mg(&scaled, x)?;
            record(3, (ms - lambda * mf).abs(), 0.0, x.log_x);
        }
    }
    let names = [
        "MG monotone",
        "MG subadditive",
        "MG |f-g| bound",
        "MG positively homogeneous",
    ];
    Ok(names
        .iter()
        .zip(worst)
        .map(|(name, (excess, at))| {
            BoundCheck::exact(*name, excess, 0.0, 1e-12, at)
                .with_note(format!("{trials} trials, seed {seed}, {grid_points} grid points"))
        })
        .collect())
}

/// Scope of [`modulus_property_suite`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModulusOptions {
    pub grid: LogGrid,
    /// Shift lattice spacing is `max_delta / steps`.
    pub max_delta: f64,
    pub steps: usize,
    pub scaling_lambdas: Vec<f64>,
    pub scaling_deltas: Vec<f64>,
    /// Extra factor on Ω in the pointwise bound.
    pub pointwise_slack: f64,
    pub slack: f64,
    /// Check `Ω(f, δ) → 0`; only meaningful for log-uniformly continuous `f`.
    pub vanishing: bool,
}

impl Default for ModulusOptions {
    fn default() -> Self {
        Self {
            grid: LogGrid::new(-8.0, 8.0, 1601).expect("valid grid"),
            max_delta: 2.5,
            steps: 10240,
            scaling_lambdas: vec![0.5, 1.0, 2.0, 5.0],
            scaling_deltas: vec![0.1, 0.5],
            pointwise_slack: 1.05,
            slack: 0.05,
            vanishing: true,
        }
    }
}

/// Properties of the Ω estimate: monotonicity, finiteness, the scaling and
/// pointwise bounds, and vanishing as `δ → 0`.
pub fn modulus_property_suite(f: &WeightedFunction, options: &ModulusOptions) -> Result<Vec<BoundCheck>> {
    let profile = ModulusProfile::new(f, &options.grid, options.max_delta, options.steps)?;
    let h = options.max_delta / options.steps as f64;
    let mut checks = Vec::new();

    let mut worst_drop = 0.0f64;
    let mut prev = 0.0;
    for j in 1..=options.steps {
        let cur = profile.omega(j as f64 * h);
        worst_drop = worst_drop.max(prev - cur);
        prev = cur;
    }
    checks.push(BoundCheck::exact("Ω monotone in δ", worst_drop, 0.0, 0.0, None));

    let extended = LogGrid::new(
        options.grid.log_min - 1.0,
        options.grid.log_max + 1.0,
        options.grid.points + (2.0 / options.grid.spacing()).round() as usize,
    )?;
    let norm = weighted_norm(f, &extended)?;
    let omega_one = profile.omega(1.0);
    checks.push(BoundCheck::exact("Ω(f,1) ≤ 4‖f‖", omega_one, 4.0 * norm, 1e-12, None));

    for &delta in &options.scaling_deltas {
        for &lambda in &options.scaling_lambdas {
            let lhs = profile.omega(lambda * delta);
            let rhs = 2.0 * (1.0 + lambda).powi(3) * (1.0 + delta * delta) * profile.omega(delta);
            checks.push(BoundCheck::estimated(
                format!("Ω scaling λ={lambda} δ={delta}"),
                lhs,
                rhs,
                options.slack,
                1e-12,
                None,
            ));
        }
    }

    // |f(h) - f(x)| ≤ 16 (1+δ²)² Ψ(x) (1 + |log h - log x|⁵/δ⁵) Ω(f,δ)
    let stride = (options.steps / 256).max(1);
    for &delta in &options.scaling_deltas {
        let omega = profile.omega(delta) * options.pointwise_slack;
        let mut tight = (f64::NEG_INFINITY, 0.0, 0.0, None);
        for j in (stride..=options.steps).step_by(stride) {
            let s = j as f64 * h;
            for v in options.grid.log_abscissae() {
                let bound = 16.0 * (1.0 + delta * delta).powi(2) * psi_log(v) * (1.0 + (s / delta).powi(5)) * omega;
                for shift in [s, -s] {
                    let lhs = (f.eval_log(v + shift) - f.eval_log(v)).abs();
                    let ratio = if bound > 0.0 {
                        lhs / bound
                    } else if lhs > 1e-12 {
                        f64::INFINITY
                    } else {
                        0.0
                    };
                    if ratio > tight.0 {
                        tight = (ratio, lhs, bound, Some(v));
                    }
                }
            }
        }
        checks.push(BoundCheck::estimated(
            format!("Ω pointwise bound δ={delta}"),
            tight.1,
            tight.2,
            0.0,
            1e-12,
            tight.3,
        ));
    }

    if options.vanishing {
        let small = profile.omega(2f64.powi(-10));
        let mut increase = 0.0f64;
        for j in 1..10 {
            increase = increase.max(profile.omega(2f64.powi(-(j + 1))) - profile.omega(2f64.powi(-j)));
        }
        checks.push(BoundCheck::exact("Ω(f,2^-j) nonincreasing in j", increase, 0.0, 0.0, None));
        checks.push(
            BoundCheck::exact("Ω(f,2^-10) ≤ 1e-2 Ω(f,1)", small, 1e-2 * omega_one, 0.0, None)
                .with_note(format!("Ω(f,1) = {omega_one:.6e}")),
        );
    }
    Ok(checks)
}

/// All four operators return a constant: `MG_w` everywhere, `S_w` and `I_w`
/// for B-spline kernels (partition of unity), `E_{0,w}` at lattice points.
pub fn constant_consistency(kernel: &Kernel, c: f64, w: f64, grid: &LogGrid) -> Result<Vec<BoundCheck>> {
    let f = WeightedFunction::constant(c);
    let config = SamplingConfig::for_kernel(w, kernel)?;
    let scale = c.abs().max(1.0);
    let deviation = |op: OperatorKind| -> Result<(f64, Option<f64>)> {
        let eval = evaluate_on_grid(op, &f, kernel, &config, grid);
        let mut worst = (0.0f64, None);
        for row in &eval.rows {
            let Some(y) = row.value else {
                return Err(Error::InvalidArgument(row.failure.clone().unwrap_or_default()));
            };
            let d = (y - c).abs() / scale;
            if d > worst.0 || worst.1.is_none() {
                worst = (d, Some(row.log_x));
            }
        }
        Ok(worst)
    };
    let mut checks = Vec::new();
    let (d, at) = deviation(OperatorKind::MaxProduct)?;
    checks.push(BoundCheck::exact("MG reproduces constants", d, 0.0, 1e-14, at));
    let partition = matches!(kernel.shape(), Some(KernelShape::BSpline { .. }));
    for (op, name) in [
        (OperatorKind::Generalized, "S reproduces constants"),
        (OperatorKind::Kantorovich, "I reproduces constants"),
    ] {
        if partition {
            let (d, at) = deviation(op)?;
            checks.push(BoundCheck::exact(name, d, 0.0, 1e-12, at));
        } else {
            checks.push(BoundCheck::hypothesis_not_met(
                name,
                format!("{} is not a partition of unity", kernel.name()),
            ));
        }
    }
    let mut worst = (0.0f64, None);
    let lo = (grid.log_min * w).ceil() as i64;
    let hi = (grid.log_max * w).floor() as i64;
    for m in lo..=hi {
        let x = Abscissa::from_log(m as f64 / w);
        let y = classical_exponential_formula(&f, 0.0, w, x, 64)?.value;
        let d = (y - c).abs() / scale;
        if d > worst.0 || worst.1.is_none() {
            worst = (d, Some(x.log_x));
        }
    }
    checks.push(BoundCheck::exact("E reproduces constants at lattice points", worst.0, 0.0, 1e-14, worst.1));
    Ok(checks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::Verdict;
    use crate::spaces::function_from_name;

    fn quick() -> LemmaOptions {
        LemmaOptions {
            scan: ScanPolicy {
                u_points: 256,
                ..ScanPolicy::default()
            },
            ..LemmaOptions::default()
        }
    }

    #[test]
    fn bspline3_passes_every_lemma() {
        let k = Kernel::mellin_bspline(3).unwrap();
        let checks = lemma_suite_with(&k, &Tolerances::default(), &quick());
        for c in &checks {
            assert_eq!(c.verdict, Verdict::Holds, "{c:?}");
        }
        assert!(checks.iter().any(|c| c.bound_name.starts_with("tail decay")));
    }

    #[test]
    fn hat_kernel_fails_the_denominator_hypothesis() {
        let k = Kernel::mellin_bspline(2).unwrap();
        let checks = lemma_suite_with(&k, &Tolerances::default(), &quick());
        let denominators: Vec<_> = checks
            .iter()
            .filter(|c| c.bound_name.starts_with("denominator"))
            .collect();
        assert_eq!(denominators.len(), 2);
        assert!(denominators.iter().all(|c| c.verdict == Verdict::HypothesisNotMet));
        assert!(checks
            .iter()
            .filter(|c| !c.bound_name.starts_with("denominator"))
            .all(|c| c.holds));
    }

    #[test]
    fn sinc_kernel_moment_dominance_is_not_applicable() {
        let k = Kernel::lin(0.0);
        let checks = lemma_suite_with(&k, &Tolerances::default(), &quick());
        let dominance = &checks[0];
        assert_eq!(dominance.verdict, Verdict::HypothesisNotMet);
        assert!(dominance.note.contains("m_2"), "{}", dominance.note);
        assert!(!checks.iter().any(|c| c.is_violation()), "{checks:?}");
    }

    #[test]
    fn lattice_properties_hold() {
        let k = Kernel::mellin_bspline(3).unwrap();
        let checks = lattice_property_check(&k, 8.0, (0.0, 1.0), 33, 50, 7).unwrap();
        assert_eq!(checks.len(), 4);
        assert!(checks.iter().all(|c| c.holds), "{checks:?}");
        assert_eq!(checks, lattice_property_check(&k, 8.0, (0.0, 1.0), 33, 50, 7).unwrap());
    }

    #[test]
    fn modulus_suite_on_a_lipschitz_function() {
        let f = function_from_name("damped-sin-log").unwrap();
        let opts = ModulusOptions {
            grid: LogGrid::new(-6.0, 6.0, 241).unwrap(),
            steps: 2560,
            ..ModulusOptions::default()
        };
        let checks = modulus_property_suite(&f, &opts).unwrap();
        for c in &checks {
            assert!(c.holds, "{c:?}");
        }
    }

    #[test]
    fn constants_across_operators() {
        let grid = LogGrid::new(-1.0, 1.0, 41).unwrap();
        let checks = constant_consistency(&Kernel::mellin_bspline(3).unwrap(), 2.5, 8.0, &grid).unwrap();
        assert!(checks.iter().all(|c| c.verdict == Verdict::Holds), "{checks:?}");
        let checks = constant_consistency(&Kernel::mellin_gaussian(1.0).unwrap(), 2.5, 8.0, &grid).unwrap();
        assert_eq!(checks[0].verdict, Verdict::Holds);
        assert_eq!(checks[1].verdict, Verdict::HypothesisNotMet);
    }
}
