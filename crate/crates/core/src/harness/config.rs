//! Run configuration: a JSON document validated against a fixed schema.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::harness::problems::{ProblemDims, ProblemInstance, FAMILIES};
use crate::saddle::{DualMode, ScheduleOverrides, SearchOptions, Selection, Termination, DEFAULT_BUDGET_CAP};

/// JSON Schema of [`RunConfig`].
pub const CONFIG_SCHEMA: &str = r#"{
  "$schema": "https://json-schema.org/draft/2020-12/schema",
  "title": "minmax-fne run configuration",
  "type": "object",
  "additionalProperties": false,
  "required": ["problem", "eps_x", "eps_y"],
  "properties": {
    "problem": {
      "type": "object",
      "additionalProperties": false,
      "required": ["name"],
      "properties": {
        "name": { "enum": ["quad-bilinear", "max-of-quadratics", "scalar-remark54", "strongly-concave-toy"] },
        "seed": { "type": "integer", "minimum": 0, "default": 0 },
        "dims": {
          "type": "object",
          "additionalProperties": false,
          "properties": {
            "d": { "type": "integer", "minimum": 1, "default": 5 },
            "k": { "type": "integer", "minimum": 1, "default": 4 },
            "a": { "type": "number", "default": 1.0 },
            "mu": { "type": "number", "exclusiveMinimum": 0, "default": 1.0 }
          }
        }
      }
    },
    "eps_x": { "type": "number", "exclusiveMinimum": 0 },
    "eps_y": { "type": "number", "exclusiveMinimum": 0 },
    "mode": { "enum": ["concave", "strongly-concave"], "default": "concave" },
    "lambda_y": { "type": ["number", "null"], "exclusiveMinimum": 0 },
    "termination": { "enum": ["fixed", "adaptive"], "default": "fixed" },
    "selection": { "enum": ["step", "grad-norm"], "default": "step" },
    "budget_cap": { "type": ["number", "null"], "exclusiveMinimum": 0 },
    "output": {
      "type": "object",
      "additionalProperties": false,
      "properties": {
        "dir": { "type": "string", "default": "minmax-fne-out" },
        "trace": { "type": "string", "default": "trace.csv" },
        "summary": { "type": "string", "default": "summary.json" }
      }
    },
    "overrides": {
      "type": "object",
      "additionalProperties": false,
      "properties": {
        "tbar_x": { "type": ["integer", "null"], "minimum": 1 },
        "tbar_y": { "type": ["integer", "null"], "minimum": 1 },
        "s_y": { "type": ["integer", "null"], "minimum": 1 },
        "s_o": { "type": ["integer", "null"], "minimum": 1 }
      }
    }
  }
}"#;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemRef {
    pub name: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub dims: ProblemDims,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeChoice {
    #[default]
    Concave,
    StronglyConcave,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputPaths {
    pub dir: PathBuf,
    pub trace: String,
    pub summary: String,
}

impl Default for OutputPaths {
    fn default() -> Self {
        Self { dir: PathBuf::from("minmax-fne-out"), trace: "trace.csv".into(), summary: "summary.json".into() }
    }
}

impl OutputPaths {
    pub fn trace_path(&self) -> PathBuf {
        self.dir.join(&self.trace)
    }

    pub fn summary_path(&self) -> PathBuf {
        self.dir.join(&self.summary)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub problem: ProblemRef,
    pub eps_x: f64,
    pub eps_y: f64,
    #[serde(default)]
    pub mode: ModeChoice,
    /// Strong concavity modulus; defaults to the family's own when it has one.
    #[serde(default)]
    pub lambda_y: Option<f64>,
    #[serde(default = "default_termination")]
    pub termination: Termination,
    #[serde(default = "default_selection")]
    pub selection: Selection,
    #[serde(default)]
    pub budget_cap: Option<f64>,
    #[serde(default)]
    pub output: OutputPaths,
    #[serde(default)]
    pub overrides: ScheduleOverrides,
}

fn default_termination() -> Termination {
    Termination::Fixed
}

fn default_selection() -> Selection {
    Selection::Step
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            problem: ProblemRef { name: "scalar-remark54".into(), seed: 0, dims: ProblemDims::default() },
            eps_x: 0.05,
            eps_y: 0.05,
            mode: ModeChoice::Concave,
            lambda_y: None,
            termination: Termination::Fixed,
            selection: Selection::Step,
            budget_cap: None,
            output: OutputPaths::default(),
            overrides: ScheduleOverrides::default(),
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| invalid(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| invalid(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if !FAMILIES.contains(&self.problem.name.as_str()) {
            return Err(invalid(format!(
                "config: problem.name '{}' is not one of {FAMILIES:?}",
                self.problem.name
            )));
        }
        for (name, v) in [("eps_x", self.eps_x), ("eps_y", self.eps_y)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(invalid(format!("config: {name} must be positive and finite, got {v}")));
            }
        }
        if let Some(l) = self.lambda_y {
            if !(l > 0.0 && l.is_finite()) {
                return Err(invalid(format!("config: lambda_y must be positive, got {l}")));
            }
        }
        if let Some(cap) = self.budget_cap {
            if !(cap > 0.0) {
                return Err(invalid(format!("config: budget_cap must be positive, got {cap}")));
            }
        }
        for (name, v) in [
            ("tbar_x", self.overrides.tbar_x),
            ("tbar_y", self.overrides.tbar_y),
            ("s_y", self.overrides.s_y),
            ("s_o", self.overrides.s_o),
        ] {
            if v == Some(0) {
                return Err(invalid(format!("config: overrides.{name} must be at least 1")));
            }
        }
        Ok(())
    }

    /// The dual mode for the built instance.
    pub fn dual_mode(&self, instance: &ProblemInstance) -> Result<DualMode> {
        match self.mode {
            ModeChoice::Concave => Ok(DualMode::Concave),
            ModeChoice::StronglyConcave => {
                let lambda_y = self.lambda_y.or(instance.strong_concavity).ok_or_else(|| {
                    Error::InvalidArgument(format!(
                        "config: mode strongly-concave needs lambda_y for family '{}'",
                        instance.name
                    ))
                })?;
                Ok(DualMode::StronglyConcave { lambda_y })
            }
        }
    }

    pub fn search_options(&self, instance: &ProblemInstance) -> Result<SearchOptions> {
        Ok(SearchOptions {
            mode: self.dual_mode(instance)?,
            termination: self.termination,
            selection: self.selection,
            budget_cap: self.budget_cap.unwrap_or(DEFAULT_BUDGET_CAP),
            overrides: self.overrides,
            record_iterates: false,
        })
    }
}
