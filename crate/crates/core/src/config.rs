//! System configuration: components, set-up calendar, horizon and MC budget.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::calendar::{CalendarSpec, SetupCostCalendar};
use crate::costs::{CostModel, McSettings};
use crate::error::{Error, Result};
use crate::lifetime::ComponentSpec;

/// Configuration as written on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    /// Lifespan `T` in months.
    pub horizon: u32,
    #[serde(default = "default_lambda")]
    pub lambda: f64,
    /// Planning window length `r - s`.
    pub window: u32,
    pub components: Vec<ComponentSpec>,
    pub calendar: CalendarSpec,
    #[serde(default)]
    pub mc: McSettings,
}

fn default_lambda() -> f64 {
    3.0
}

/// Validated system configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SystemConfig {
    pub horizon: u32,
    pub lambda: f64,
    pub window: u32,
    pub components: Vec<ComponentSpec>,
    pub calendar: SetupCostCalendar,
    pub mc: McSettings,
    /// Accepted oddities, e.g. a CM cost below the PM cost.
    #[serde(skip)]
    pub warnings: Vec<String>,
}

impl SystemConfig {
    pub fn from_file(file: &ConfigFile) -> Result<Self> {
        let mut violations = Vec::new();
        if file.horizon < 1 {
            violations.push("horizon must be >= 1".to_string());
        }
        if file.window < 1 {
            violations.push("window must be >= 1".to_string());
        }
        if !(file.lambda.is_finite() && file.lambda > 0.0) {
            violations.push(format!("lambda must be > 0 (got {})", file.lambda));
        }
        if file.components.is_empty() {
            violations.push("at least one component is required".to_string());
        }
        if file.mc.replications < 1 {
            violations.push("mc.replications must be >= 1".to_string());
        }
        let mut ids: Vec<u32> = file.components.iter().map(|c| c.id).collect();
        ids.sort_unstable();
        if ids.windows(2).any(|w| w[0] == w[1]) {
            violations.push("component ids must be unique".to_string());
        }
        for c in &file.components {
            violations.extend(c.violations());
        }
        let calendar = match SetupCostCalendar::from_spec(file.horizon, &file.calendar) {
            Ok(cal) => Some(cal),
            Err(Error::InvalidConfig(v)) => {
                violations.extend(v);
                None
            }
            Err(e) => return Err(e),
        };
        if !violations.is_empty() {
            return Err(Error::InvalidConfig(violations));
        }
        Ok(Self {
            horizon: file.horizon,
            lambda: file.lambda,
            window: file.window,
            warnings: file.components.iter().flat_map(|c| c.warnings()).collect(),
            components: file.components.clone(),
            calendar: calendar.expect("validated"),
            mc: file.mc,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ConfigFile = serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        Self::from_file(&file)
    }

    pub fn n(&self) -> usize {
        self.components.len()
    }

    pub fn cost_model<'a>(&'a self, spec: &'a ComponentSpec) -> CostModel<'a> {
        CostModel::new(spec, &self.calendar, self.lambda, self.horizon)
    }

    /// Index of the component carrying label `id`.
    pub fn index_of(&self, id: u32) -> Option<usize> {
        self.components.iter().position(|c| c.id == id)
    }

    pub fn ids(&self, indices: &[usize]) -> Vec<u32> {
        indices.iter().map(|&j| self.components[j].id).collect()
    }

    pub fn with_calendar(&self, calendar: SetupCostCalendar) -> Self {
        Self {
            calendar,
            ..self.clone()
        }
    }

    /// Back to the on-disk form. Calendars built from explicit values are
    /// written as values; otherwise as their 12-month pattern.
    pub fn to_file(&self) -> ConfigFile {
        let calendar = match self.calendar.pattern() {
            Some(p) => CalendarSpec {
                pattern: Some(p.to_vec()),
                ..Default::default()
            },
            None => CalendarSpec {
                values: Some((1..=self.horizon).map(|m| self.calendar.month(m)).collect()),
                ..Default::default()
            },
        };
        ConfigFile {
            horizon: self.horizon,
            lambda: self.lambda,
            window: self.window,
            components: self.components.clone(),
            calendar,
            mc: self.mc,
        }
    }
}

pub fn load_config(path: impl AsRef<Path>) -> Result<SystemConfig> {
    let text = std::fs::read_to_string(path)?;
    SystemConfig::from_json(&text)
}

/// The four wind-turbine components used throughout the bundled examples.
pub fn wind_turbine_components() -> Vec<ComponentSpec> {
    vec![
        ComponentSpec::new(1, 100.0, 3.0, 162.0, 36.75).named("rotor"),
        ComponentSpec::new(2, 125.0, 2.0, 110.0, 23.75).named("main bearing"),
        ComponentSpec::new(3, 80.0, 3.0, 202.0, 46.75).named("gearbox"),
        ComponentSpec::new(4, 110.0, 2.0, 150.0, 33.75).named("generator"),
    ]
}

/// Four-component turbine, `T = 240`, window 80, `lambda = 3`.
pub fn wind_turbine(calendar: SetupCostCalendar, mc: McSettings) -> SystemConfig {
    SystemConfig {
        horizon: 240,
        lambda: 3.0,
        window: 80,
        components: wind_turbine_components(),
        calendar,
        mc,
        warnings: Vec::new(),
    }
}
