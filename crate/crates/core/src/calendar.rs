//! Month-indexed set-up costs `d_1..d_T`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Monthly set-up costs over months `1..=T`.
///
/// Month 0 reads as month 1. Months past `T` continue the 12-month pattern
/// when the calendar was built from one, and repeat `d_T` otherwise. A
/// continuous time `x` reads month `ceil(x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SetupCostCalendar {
    horizon: u32,
    values: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pattern: Option<Vec<f64>>,
}

/// How a calendar is written in a configuration file. Exactly one field is set.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CalendarSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constant: Option<f64>,
    /// Twelve monthly values; month 1 uses the first entry.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pattern: Option<Vec<f64>>,
    /// Explicit `d_1..d_T` (optionally one extra slack entry for `T+1`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
}

/// Set-up costs by calendar month, January first, with yearly mean 5.
pub const SEASONAL_PATTERN_D5: [f64; 12] =
    [7.5, 6.5, 5.5, 4.5, 3.5, 2.5, 2.5, 3.5, 4.5, 5.5, 6.5, 7.5];

/// Set-up costs by calendar month, January first, with yearly mean 10.
pub const SEASONAL_PATTERN_D10: [f64; 12] =
    [15.0, 13.0, 11.0, 9.0, 7.0, 5.0, 5.0, 7.0, 9.0, 11.0, 13.0, 15.0];

impl SetupCostCalendar {
    pub fn constant(horizon: u32, d: f64) -> Self {
        Self {
            horizon,
            values: vec![d; horizon as usize],
            pattern: Some(vec![d; 12]),
        }
    }

    /// Expands a 12-month template; month 1 takes `pattern[0]`.
    pub fn periodic(horizon: u32, pattern: &[f64]) -> Result<Self> {
        if pattern.len() != 12 {
            return Err(Error::InvalidConfig(vec![format!(
                "calendar pattern must have 12 entries, got {}",
                pattern.len()
            )]));
        }
        let values = (0..horizon as usize).map(|k| pattern[k % 12]).collect();
        let cal = Self {
            horizon,
            values,
            pattern: Some(pattern.to_vec()),
        };
        cal.check()?;
        Ok(cal)
    }

    /// Seasonal template starting in January (`winter`) or July (`summer`).
    pub fn seasonal(horizon: u32, pattern_from_january: &[f64; 12], summer_start: bool) -> Self {
        let mut p = pattern_from_january.to_vec();
        if summer_start {
            p.rotate_left(6);
        }
        Self::periodic(horizon, &p).expect("bundled patterns are valid")
    }

    /// Explicit values `d_1..d_T`, with an optional slack entry for `T+1`.
    pub fn from_values(horizon: u32, values: Vec<f64>) -> Result<Self> {
        let t = horizon as usize;
        if values.len() != t && values.len() != t + 1 {
            return Err(Error::InvalidConfig(vec![format!(
                "calendar has {} values, expected {t} (or {} with slack)",
                values.len(),
                t + 1
            )]));
        }
        let cal = Self {
            horizon,
            values,
            pattern: None,
        };
        cal.check()?;
        Ok(cal)
    }

    pub fn from_spec(horizon: u32, spec: &CalendarSpec) -> Result<Self> {
        match (&spec.constant, &spec.pattern, &spec.values) {
            (Some(d), None, None) => {
                let cal = Self::constant(horizon, *d);
                cal.check()?;
                Ok(cal)
            }
            (None, Some(p), None) => Self::periodic(horizon, p),
            (None, None, Some(v)) => Self::from_values(horizon, v.clone()),
            _ => Err(Error::InvalidConfig(vec![
                "calendar must set exactly one of constant, pattern, values".into(),
            ])),
        }
    }

    fn check(&self) -> Result<()> {
        let bad: Vec<String> = self
            .values
            .iter()
            .chain(self.pattern.iter().flatten())
            .enumerate()
            .filter(|(_, d)| !(d.is_finite() && **d >= 0.0))
            .map(|(k, d)| format!("set-up cost entry {} is {d}, must be finite and >= 0", k + 1))
            .collect();
        if bad.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidConfig(bad))
        }
    }

    /// Number of covered months `T` (the slack entry, if any, is excluded).
    pub fn horizon(&self) -> u32 {
        self.horizon
    }

    pub fn pattern(&self) -> Option<&[f64]> {
        self.pattern.as_deref()
    }

    /// `d_month` for an integer month.
    #[inline]
    pub fn month(&self, month: u32) -> f64 {
        let k = month.max(1) as usize;
        if k <= self.values.len() {
            return self.values[k - 1];
        }
        match &self.pattern {
            Some(p) => p[(k - 1) % 12],
            None => *self.values.last().unwrap_or(&0.0),
        }
    }

    /// `d_x = d_ceil(x)` for a continuous time `x >= 0`.
    #[inline]
    pub fn at(&self, x: f64) -> f64 {
        self.month(x.ceil() as u32)
    }

    /// Mean of `d_1..d_T`.
    pub fn mean(&self, horizon: u32) -> f64 {
        if horizon == 0 {
            return 0.0;
        }
        (1..=horizon).map(|m| self.month(m)).sum::<f64>() / horizon as f64
    }

    /// Multiplies every entry by `k`.
    pub fn scaled(&self, k: f64) -> Self {
        Self {
            horizon: self.horizon,
            values: self.values.iter().map(|d| d * k).collect(),
            pattern: self.pattern.as_ref().map(|p| p.iter().map(|d| d * k).collect()),
        }
    }
}
