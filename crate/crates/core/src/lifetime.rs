//! Weibull lifetime model for a single component.
//!
//! Life lengths are in months. `P(L > t) = exp(-(t/alpha)^beta)`.

use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{domain, Result};
use crate::rng::open_unit;

/// Weibull parameters and maintenance costs of one component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentSpec {
    /// Label used in reports (1-based in the bundled fixtures).
    pub id: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    /// Scale, months.
    pub alpha: f64,
    /// Shape.
    pub beta: f64,
    /// Corrective maintenance cost, kUSD.
    pub cm_cost: f64,
    /// Preventive maintenance cost, kUSD.
    pub pm_cost: f64,
}

/// Mean and variance of the life length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LifetimeMoments {
    pub mean: f64,
    pub variance: f64,
}

impl ComponentSpec {
    pub fn new(id: u32, alpha: f64, beta: f64, cm_cost: f64, pm_cost: f64) -> Self {
        Self {
            id,
            name: None,
            alpha,
            beta,
            cm_cost,
            pm_cost,
        }
    }

    pub fn named(mut self, name: &str) -> Self {
        self.name = Some(name.to_owned());
        self
    }

    /// Hard violations: non-positive or non-finite parameters, negative costs.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let label = format!("component {}", self.id);
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            out.push(format!("{label}: alpha must be > 0 (got {})", self.alpha));
        }
        if !(self.beta.is_finite() && self.beta > 0.0) {
            out.push(format!("{label}: beta must be > 0 (got {})", self.beta));
        }
        if !(self.cm_cost.is_finite() && self.cm_cost >= 0.0) {
            out.push(format!("{label}: cm_cost must be >= 0 (got {})", self.cm_cost));
        }
        if !(self.pm_cost.is_finite() && self.pm_cost >= 0.0) {
            out.push(format!("{label}: pm_cost must be >= 0 (got {})", self.pm_cost));
        }
        out
    }

    /// Soft issues that are reported but accepted.
    pub fn warnings(&self) -> Vec<String> {
        if self.cm_cost < self.pm_cost {
            vec![format!(
                "component {}: cm_cost {} is below pm_cost {}",
                self.id, self.cm_cost, self.pm_cost
            )]
        } else {
            Vec::new()
        }
    }

    /// Survival probability `P(L > t)`.
    pub fn survival(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(domain(format!("survival needs t >= 0, got {t}")));
        }
        Ok((-(t / self.alpha).powf(self.beta)).exp())
    }

    /// Weibull density.
    pub fn density(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(domain(format!("density needs t >= 0, got {t}")));
        }
        let z = t / self.alpha;
        Ok(self.beta / self.alpha * z.powf(self.beta - 1.0) * (-z.powf(self.beta)).exp())
    }

    pub fn cdf(&self, t: f64) -> Result<f64> {
        self.survival(t).map(|s| 1.0 - s)
    }

    pub fn moments(&self) -> LifetimeMoments {
        let mean = self.alpha * gamma(1.0 + 1.0 / self.beta);
        let variance = self.alpha * self.alpha * gamma(1.0 + 2.0 / self.beta) - mean * mean;
        LifetimeMoments { mean, variance }
    }

    pub fn mean_life(&self) -> f64 {
        self.moments().mean
    }

    /// Inverse-CDF life for a given uniform `u` in (0, 1).
    #[inline]
    pub fn life_from_uniform(&self, u: f64) -> f64 {
        self.alpha * (-u.ln()).powf(1.0 / self.beta)
    }

    /// Total life conditioned on exceeding `age`, from a uniform `u` in (0, 1).
    #[inline]
    pub fn conditional_life_from_uniform(&self, age: f64, u: f64) -> f64 {
        let cumulative_hazard = (age / self.alpha).powf(self.beta);
        self.alpha * (cumulative_hazard - u.ln()).powf(1.0 / self.beta)
    }

    pub fn sample_life<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.life_from_uniform(open_unit(rng))
    }

    /// Draws a TOTAL life `L` given `L > age`. The remaining life is `L - age`.
    pub fn sample_residual_life<R: Rng + ?Sized>(&self, age: f64, rng: &mut R) -> Result<f64> {
        if !(age >= 0.0) {
            return Err(domain(format!("residual life needs age >= 0, got {age}")));
        }
        let u = open_unit(rng);
        let life = self.conditional_life_from_uniform(age, u);
        // powf round-off can land exactly on `age` when -ln(u) is tiny
        Ok(if life > age { life } else { next_up(age) })
    }
}

fn next_up(x: f64) -> f64 {
    if x == 0.0 {
        f64::MIN_POSITIVE
    } else {
        f64::from_bits(x.to_bits() + 1)
    }
}
