use serde_json::{json, Value};

use expsamp::analysis::{
    constant_consistency, convergence_experiment, lattice_property_check, lemma_suite, modulus_property_suite,
    verify_operator_norm, verify_quantitative_rate, verify_weighted_image_bound, voronovskaja_check, BoundCheck,
    ModulusOptions, MomentVariant, RateOptions, Verdict, VoronovskajaOptions,
};
use expsamp::{check_kernel_conditions, evaluate_on_grid, Error, MomentReport, Tolerances, WeightedFunction};

use crate::config::{Command, RunConfig};
use crate::error::CliError;
use crate::output::{cell, payload, verdict_label, Artifact, Table};
use crate::registry::Registry;

pub struct Outcome {
    pub artifact: Artifact,
    pub status: i32,
}

pub fn run(config: &RunConfig, registry: &Registry) -> Result<Outcome, CliError> {
    match config.command {
        Command::KernelCheck | Command::Moments => kernel_check(config, registry),
        Command::Reconstruct => reconstruct(config, registry),
        Command::Converge => converge(config, registry),
        Command::Rate => rate(config, registry),
        Command::Voronovskaja => voronovskaja(config, registry),
        Command::Suite => suite(config, registry),
    }
}

/// 1 for a violation whose hypotheses held, else 3 if some hypothesis failed.
fn check_status(checks: &[BoundCheck]) -> i32 {
    if checks.iter().any(BoundCheck::is_violation) {
        1
    } else if checks.iter().any(|c| c.verdict == Verdict::HypothesisNotMet) {
        3
    } else {
        0
    }
}

/// Turn a failed hypothesis into a check; other errors propagate.
fn or_unmet(name: String, result: expsamp::Result<Vec<BoundCheck>>) -> Result<Vec<BoundCheck>, CliError> {
    match result {
        Ok(checks) => Ok(checks),
        Err(Error::HypothesisNotMet(reason)) => Ok(vec![BoundCheck::hypothesis_not_met(name, reason)]),
        Err(e) => Err(e.into()),
    }
}

fn prefixed(prefix: &str, checks: Vec<BoundCheck>) -> impl Iterator<Item = BoundCheck> + '_ {
    checks.into_iter().map(move |mut c| {
        c.bound_name = format!("{prefix}: {}", c.bound_name);
        c
    })
}

fn functions(config: &RunConfig, registry: &Registry) -> Result<Vec<WeightedFunction>, CliError> {
    config.functions.iter().map(|name| registry.function(name)).collect()
}

fn moment_table(report: &MomentReport) -> Table {
    let mut table = Table::new(&["order", "value", "tail_bound", "witness_log_u", "witness_k"]);
    for m in &report.absolute_moments {
        table.rows.push(vec![
            cell(Some(m.order)),
            cell(m.value),
            cell(m.tail_bound),
            cell(Some(m.witness.0)),
            m.witness.1.to_string(),
        ]);
    }
    table.comments = vec![
        format!("eta: {}", cell(Some(report.eta))),
        format!("chi1: {} ({})", report.chi1_holds, report.chi1_diagnostic),
        format!("chi2: {} ({})", report.chi2_holds, report.chi2_diagnostic),
        format!("chi3: {} ({})", report.chi3_holds, report.chi3_diagnostic),
    ];
    table
}

fn kernel_check(config: &RunConfig, registry: &Registry) -> Result<Outcome, CliError> {
    let kernel = registry.kernel(&config.kernel)?;
    let report = check_kernel_conditions(&kernel, config.mu, config.r, &Tolerances::default())?;
    let condition = |name: &str, holds: bool, diagnostic: &str| {
        format!("{:<18} {name}: {diagnostic}", if holds { "holds" } else { "fails" })
    };
    let lines = vec![
        condition("(χ1)", report.chi1_holds, &report.chi1_diagnostic),
        condition("(χ2)", report.chi2_holds, &report.chi2_diagnostic),
        condition("(χ3)", report.chi3_holds, &report.chi3_diagnostic),
    ];
    let status = if report.chi1_holds && report.chi2_holds { 0 } else { 3 };
    Ok(Outcome {
        artifact: Artifact {
            title: format!("Kernel conditions for {}", kernel.name()),
            table: moment_table(&report),
            payload: payload(vec![("report", json!(report))]),
            checks: Vec::new(),
            lines,
            footer: Vec::new(),
        },
        status,
    })
}

fn reconstruct(config: &RunConfig, registry: &Registry) -> Result<Outcome, CliError> {
    let kernel = registry.kernel(&config.kernel)?;
    let f = registry.function(&config.function)?;
    let grid = config.log_grid()?;
    let op = config.operator()?;
    let sampling = config.sampling(config.w[0], &kernel)?;
    let eval = evaluate_on_grid(op, &f, &kernel, &sampling, &grid);

    let mut table = Table::new(&["x", "log_x", "value", "error_vs_f", "weighted_error"]);
    for row in &eval.rows {
        table.rows.push(vec![
            cell(Some(row.x)),
            cell(Some(row.log_x)),
            cell(row.value),
            cell(row.error_vs_f),
            cell(row.weighted_error),
        ]);
        if let Some(failure) = &row.failure {
            table.comments.push(format!("failed at log_x {}: {failure}", cell(Some(row.log_x))));
        }
    }
    table.comments.extend(eval.notes.iter().cloned());
    let sup = eval.rows.iter().filter_map(|r| r.weighted_error).fold(0.0, f64::max);
    let mut lines = vec![format!(
        "{op} {} of {} at w={}: {} points, {} failed, weighted sup error {sup:.6e}",
        kernel.name(),
        f.name(),
        sampling.w,
        eval.rows.len(),
        eval.failures()
    )];
    lines.extend(eval.notes.iter().cloned());
    Ok(Outcome {
        artifact: Artifact {
            title: format!("{op} reconstruction of {} with {}", f.name(), kernel.name()),
            table,
            payload: payload(vec![("evaluation", json!(eval))]),
            checks: Vec::new(),
            lines,
            footer: Vec::new(),
        },
        status: 0,
    })
}

fn converge(config: &RunConfig, registry: &Registry) -> Result<Outcome, CliError> {
    let kernel = registry.kernel(&config.kernel)?;
    let f = registry.function(&config.function)?;
    let grid = config.log_grid()?;
    let sampling = config.sampling(config.w[0], &kernel)?;
    let table_data = convergence_experiment(&f, &kernel, &config.w, &grid, &sampling)?;

    let mut table = Table::new(&["w", "sup_abs_error", "weighted_sup_error", "failed_points"]);
    let mut lines = Vec::new();
    for row in &table_data.rows {
        table.rows.push(vec![
            cell(Some(row.w)),
            cell(Some(row.sup_abs_error)),
            cell(Some(row.weighted_sup_error)),
            row.failed_points.to_string(),
        ]);
        lines.push(format!(
            "w={:<8} weighted sup error {:.6e} ({} failed points)",
            row.w, row.weighted_sup_error, row.failed_points
        ));
    }
    table.comments.push(format!("fitted_order: {}", cell(table_data.fitted_order)));
    lines.push(match table_data.fitted_order {
        Some(p) => format!("fitted order {p:.4}"),
        None => "fitted order unavailable".into(),
    });
    Ok(Outcome {
        artifact: Artifact {
            title: format!("MG convergence of {} with {}", f.name(), kernel.name()),
            table,
            payload: payload(vec![("table", json!(table_data))]),
            checks: Vec::new(),
            lines,
            footer: Vec::new(),
        },
        status: 0,
    })
}

fn rate_options(config: &RunConfig) -> RateOptions {
    RateOptions {
        window: config.window,
        ..RateOptions::default()
    }
}

fn rate(config: &RunConfig, registry: &Registry) -> Result<Outcome, CliError> {
    let kernel = registry.kernel(&config.kernel)?;
    let grid = config.log_grid()?;
    let options = rate_options(config);
    let mut checks = Vec::new();
    for f in functions(config, registry)? {
        let result = verify_quantitative_rate(&f, &kernel, &config.w, &grid, &options);
        checks.extend(prefixed(f.name(), or_unmet("rate".into(), result)?));
    }
    let status = check_status(&checks);
    Ok(Outcome {
        artifact: Artifact {
            title: format!("Quantitative rate with {}", kernel.name()),
            table: Table::of_checks(&checks),
            payload: payload(vec![("checks", json!(checks))]),
            checks,
            lines: Vec::new(),
            footer: Vec::new(),
        },
        status,
    })
}

fn voronovskaja(config: &RunConfig, registry: &Registry) -> Result<Outcome, CliError> {
    let kernel = registry.kernel(&config.kernel)?;
    let f = registry.function(&config.function)?;
    let grid = config.log_grid()?;
    let options = if config.strict {
        VoronovskajaOptions::default()
    } else {
        VoronovskajaOptions::lenient()
    };
    let report = voronovskaja_check(&f, &kernel, config.r, &config.w, &grid, &options)?;

    let mut table = Table::new(&["w", "variant", "max_lhs", "max_lhs_at", "verdict", "lhs", "rhs"]);
    for row in &report.rows {
        table.rows.push(vec![
            cell(Some(row.w)),
            row.variant.label().to_string(),
            cell(Some(row.max_lhs)),
            cell(row.max_lhs_at),
            verdict_label(row.check.verdict).to_string(),
            cell(Some(row.check.lhs)),
            cell(Some(row.check.rhs)),
        ]);
    }
    table.comments.push(format!("chi3: {} ({})", report.chi3_holds, report.chi3_diagnostic));
    let mut lines = vec![format!(
        "{:<18} (χ3): {}",
        if report.chi3_holds { "holds" } else { "fails" },
        report.chi3_diagnostic
    )];
    for variant in MomentVariant::ALL {
        let lhs: Vec<String> = report
            .rows
            .iter()
            .filter(|r| r.variant == variant)
            .map(|r| format!("{:.4e}", r.max_lhs))
            .collect();
        lines.push(format!("{:<18} max lhs over w: {}", variant.label(), lhs.join(" ")));
    }
    let checks: Vec<BoundCheck> = report.checks().cloned().collect();
    let status = match check_status(&checks) {
        _ if !report.chi3_holds => 3,
        s => s,
    };
    Ok(Outcome {
        artifact: Artifact {
            title: format!("Voronovskaja expansion of {} with {}", f.name(), kernel.name()),
            table,
            payload: payload(vec![("report", json!(report))]),
            checks,
            lines,
            footer: Vec::new(),
        },
        status,
    })
}

fn suite(config: &RunConfig, registry: &Registry) -> Result<Outcome, CliError> {
    let kernel = registry.kernel(&config.kernel)?;
    let grid = config.log_grid()?;
    let fs = functions(config, registry)?;
    let tol = Tolerances::default();
    let mut checks = lemma_suite(&kernel, &tol);

    if kernel.is_nonnegative() {
        checks.extend(lattice_property_check(&kernel, 8.0, (0.0, 1.0), 65, 100, config.seed)?);
    } else {
        checks.push(BoundCheck::hypothesis_not_met(
            "MG lattice properties",
            format!("kernel {} takes negative values", kernel.name()),
        ));
    }
    for &w in &config.w {
        checks.extend(constant_consistency(&kernel, 2.5, w, &grid)?);
        let sampling = config.sampling(w, &kernel)?;
        let image = verify_weighted_image_bound(&kernel, &sampling, &grid).map(|c| vec![c]);
        checks.extend(or_unmet(format!("weighted image w={w}"), image)?);
        let norm = verify_operator_norm(&kernel, &sampling, &grid, &fs).map(|c| vec![c]);
        checks.extend(or_unmet(format!("operator norm w={w}"), norm)?);
    }

    let rates: Vec<f64> = config.w.iter().copied().filter(|w| *w >= 1.0).collect();
    let mut tables = Vec::new();
    let mut expansions = Vec::new();
    let mut lines = Vec::new();
    let options = rate_options(config);
    for f in &fs {
        if !rates.is_empty() {
            let result = verify_quantitative_rate(f, &kernel, &rates, &grid, &options);
            checks.extend(prefixed(f.name(), or_unmet("rate".into(), result)?));
        }
        let modulus = ModulusOptions {
            vanishing: f.log_lipschitz().is_some(),
            ..ModulusOptions::default()
        };
        checks.extend(prefixed(f.name(), modulus_property_suite(f, &modulus)?));

        let sampling = config.sampling(config.w[0], &kernel)?;
        let table = convergence_experiment(f, &kernel, &config.w, &grid, &sampling)?;
        lines.push(format!(
            "{:<18} {}: weighted sup errors {}",
            "info",
            f.name(),
            table
                .rows
                .iter()
                .map(|r| format!("{:.4e}", r.weighted_sup_error))
                .collect::<Vec<_>>()
                .join(" ")
        ));
        tables.push(table);

        match voronovskaja_check(f, &kernel, config.r, &config.w, &grid, &VoronovskajaOptions::lenient()) {
            Ok(report) => {
                let consistent = report
                    .rows
                    .iter()
                    .filter(|r| r.variant == MomentVariant::LiteralSigned && !r.check.is_violation())
                    .count();
                lines.push(format!(
                    "{:<18} {}: Voronovskaja literal-signed within bound at {consistent}/{} rates, (χ3) {}",
                    "info",
                    f.name(),
                    config.w.len(),
                    if report.chi3_holds { "holds" } else { "fails" }
                ));
                expansions.push(json!(report));
            }
            Err(e) => lines.push(format!("{:<18} {}: Voronovskaja skipped: {e}", "info", f.name())),
        }
    }

    let status = if checks.iter().any(BoundCheck::is_violation) { 1 } else { 0 };
    let violated = checks.iter().filter(|c| c.is_violation()).count();
    let unmet = checks.iter().filter(|c| c.verdict == Verdict::HypothesisNotMet).count();
    let footer = vec![format!(
        "{:<18} {} checks, {violated} violated, {unmet} with hypotheses not met",
        "total",
        checks.len()
    )];
    Ok(Outcome {
        artifact: Artifact {
            title: format!("Verification suite for {}", kernel.name()),
            table: Table::of_checks(&checks),
            payload: payload(vec![
                ("checks", json!(checks)),
                ("convergence", json!(tables)),
                ("voronovskaja", Value::Array(expansions)),
            ]),
            checks,
            lines,
            footer,
        },
        status,
    })
}

