//! Built-in kernels and functions plus user aliases from a JSON file:
//!
//! ```json
//! {"kernels": {"smooth": "bspline6"}, "functions": {"bump": "tent"}}
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;

use expsamp::kernels::KERNEL_NAMES;
use expsamp::spaces::FUNCTION_NAMES;
use expsamp::{function_from_name, Kernel, WeightedFunction};

use crate::error::CliError;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Registry {
    #[serde(default)]
    kernels: BTreeMap<String, String>,
    #[serde(default)]
    functions: BTreeMap<String, String>,
}

impl Registry {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        if text.trim().is_empty() {
            return Ok(Self::default());
        }
        let registry: Self = serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        for (alias, target) in &registry.kernels {
            Kernel::from_name(target).map_err(|e| CliError::Usage(format!("kernel alias `{alias}`: {e}")))?;
        }
        for (alias, target) in &registry.functions {
            function_from_name(target).map_err(|e| CliError::Usage(format!("function alias `{alias}`: {e}")))?;
        }
        Ok(registry)
    }

    pub fn kernel(&self, name: &str) -> Result<Kernel, CliError> {
        let target = self.kernels.get(name).map(String::as_str).unwrap_or(name);
        Ok(Kernel::from_name(target)?)
    }

    pub fn function(&self, name: &str) -> Result<WeightedFunction, CliError> {
        let target = self.functions.get(name).map(String::as_str).unwrap_or(name);
        Ok(function_from_name(target)?)
    }

    /// Text listing of every resolvable name.
    pub fn listing(&self) -> String {
        let mut out = String::from("kernels:\n");
        for (name, description) in KERNEL_NAMES {
            out.push_str(&format!("  {name:<18} {description}\n"));
        }
        for (alias, target) in &self.kernels {
            out.push_str(&format!("  {alias:<18} alias for {target}\n"));
        }
        out.push_str("functions:\n");
        for name in FUNCTION_NAMES {
            let f = function_from_name(name).expect("built-in names resolve");
            out.push_str(&format!("  {name:<18} {}\n", f.description()));
        }
        out.push_str(&format!("  {:<18} constant c\n", "const:<c>"));
        for (alias, target) in &self.functions {
            out.push_str(&format!("  {alias:<18} alias for {target}\n"));
        }
        out
    }
}
