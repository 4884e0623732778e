use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use expsamp::{Kernel, LogGrid, OperatorKind, SamplingConfig};

use crate::error::CliError;
use crate::registry::Registry;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    KernelCheck,
    Moments,
    Reconstruct,
    Converge,
    Rate,
    Voronovskaja,
    Suite,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Self::KernelCheck => "kernel-check",
            Self::Moments => "moments",
            Self::Reconstruct => "reconstruct",
            Self::Converge => "converge",
            Self::Rate => "rate",
            Self::Voronovskaja => "voronovskaja",
            Self::Suite => "suite",
        }
    }

    fn default_rates(self) -> &'static [f64] {
        match self {
            Self::Reconstruct => &[8.0],
            Self::Converge => &[4.0, 8.0, 16.0, 32.0, 64.0],
            Self::Rate => &[8.0, 16.0, 32.0],
            Self::Voronovskaja => &[8.0, 16.0, 32.0, 64.0],
            Self::Suite => &[4.0, 16.0, 64.0],
            Self::KernelCheck | Self::Moments => &[],
        }
    }

    fn default_format(self) -> Format {
        match self {
            Self::Moments | Self::Reconstruct | Self::Converge => Format::Csv,
            _ => Format::Json,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Md,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Self::Csv => "csv",
            Self::Json => "json",
            Self::Md => "md",
        }
    }
}

/// Everything a run depends on. Unset fields take per-command defaults in
/// [`RunConfig::resolve`]; the resolved form is embedded in every artifact.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    #[serde(default = "default_kernel")]
    pub kernel: String,
    #[serde(default = "default_function")]
    pub function: String,
    /// Functions for `rate` and `suite`; empty means `function` alone
    /// (`rate`) or a fixed nonnegative trio (`suite`).
    #[serde(default)]
    pub functions: Vec<String>,
    #[serde(default)]
    pub w: Vec<f64>,
    /// Interval `[a, b]` in x; selects interval mode.
    #[serde(default)]
    pub interval: Option<(f64, f64)>,
    /// Half-width of the index window around `w log x`.
    #[serde(default)]
    pub window: Option<u32>,
    /// `logmin:logmax:points`.
    #[serde(default)]
    pub grid: Option<String>,
    #[serde(default = "default_op")]
    pub op: String,
    /// Parameter `c` of the classical formula.
    #[serde(default)]
    pub c: f64,
    #[serde(default = "default_quadrature")]
    pub quadrature: usize,
    #[serde(default = "default_mu")]
    pub mu: f64,
    #[serde(default = "default_r")]
    pub r: u32,
    /// Refuse the expansion check when the algebraic moments vary.
    #[serde(default)]
    pub strict: bool,
    #[serde(default)]
    pub format: Option<Format>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub registry: Option<PathBuf>,
}

fn default_kernel() -> String {
    "bspline3".into()
}

fn default_function() -> String {
    "weight".into()
}

fn default_op() -> String {
    "MG".into()
}

fn default_quadrature() -> usize {
    8
}

fn default_mu() -> f64 {
    5.0
}

fn default_r() -> u32 {
    1
}

/// 251 points: the spacing 1/62.5 is not a multiple of `1/w` for
/// power-of-two rates, so errors are not only sampled at lattice nodes.
pub const DEFAULT_GRID: &str = "-2:2:251";

pub const SUITE_FUNCTIONS: &[&str] = &["weight", "damped-log2", "damped-sin-log"];

impl RunConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            kernel: default_kernel(),
            function: default_function(),
            functions: Vec::new(),
            w: Vec::new(),
            interval: None,
            window: None,
            grid: None,
            op: default_op(),
            c: 0.0,
            quadrature: default_quadrature(),
            mu: default_mu(),
            r: default_r(),
            strict: false,
            format: None,
            seed: 0,
            output: None,
            registry: None,
        }
    }

    /// Fill defaults and validate names, rates and the grid.
    pub fn resolve(mut self, registry: &Registry) -> Result<Self, CliError> {
        if self.w.is_empty() {
            self.w = self.command.default_rates().to_vec();
        }
        if let Some(w) = self.w.iter().find(|w| !(**w > 0.0 && w.is_finite())) {
            return Err(CliError::Usage(format!("rates must be positive, got {w}")));
        }
        if self.command == Command::Reconstruct && self.w.len() != 1 {
            return Err(CliError::Usage("reconstruct takes a single rate".into()));
        }
        if self.format.is_none() {
            self.format = Some(self.command.default_format());
        }
        if self.functions.is_empty() {
            self.functions = match self.command {
                Command::Suite => SUITE_FUNCTIONS.iter().map(|s| s.to_string()).collect(),
                Command::Rate => vec![self.function.clone()],
                _ => Vec::new(),
            };
        }
        if let Some((a, b)) = self.interval {
            if !(a > 0.0 && a < b && b.is_finite()) {
                return Err(CliError::Usage(format!("interval needs 0 < a < b, got {a},{b}")));
            }
        }
        if self.grid.is_none() {
            self.grid = Some(match self.interval {
                Some((a, b)) => LogGrid::over_interval(a, b, 257)?.to_string(),
                None => DEFAULT_GRID.into(),
            });
        }
        self.log_grid()?;
        registry.kernel(&self.kernel)?;
        registry.function(&self.function)?;
        for name in &self.functions {
            registry.function(name)?;
        }
        self.operator()?;
        Ok(self)
    }

    pub fn log_grid(&self) -> Result<LogGrid, CliError> {
        let spec = self.grid.as_deref().unwrap_or(DEFAULT_GRID);
        spec.parse::<LogGrid>()
            .map_err(|e| CliError::Usage(format!("invalid grid `{spec}`: {e}")))
    }

    pub fn operator(&self) -> Result<OperatorKind, CliError> {
        match self.op.parse::<OperatorKind>()? {
            OperatorKind::Classical { .. } => Ok(OperatorKind::Classical { c: self.c }),
            op => Ok(op),
        }
    }

    pub fn format(&self) -> Format {
        self.format.unwrap_or(self.command.default_format())
    }

    /// Sampling setup at rate `w`.
    pub fn sampling(&self, w: f64, kernel: &Kernel) -> Result<SamplingConfig, CliError> {
        let mut config = SamplingConfig::for_kernel(w, kernel)?.with_quadrature_points(self.quadrature)?;
        if let Some((a, b)) = self.interval {
            config = config.with_interval(a, b)?;
        }
        if let Some(half) = self.window {
            config = config.with_window(half);
        }
        Ok(config)
    }

    /// The config as embedded in artifacts: no output or registry paths.
    pub fn embedded(&self) -> Self {
        Self {
            output: None,
            registry: None,
            ..self.clone()
        }
    }
}
