//! The rescheduling loop: plan the next PM, then either carry it out or
//! react to a failure with corrective plus opportunistic maintenance, and
//! plan again from the new state.

mod lifecycle;
mod study;

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::config::SystemConfig;
use crate::costs::{ComponentTable, CostTables, McSettings};
use crate::error::{domain, Result};
use crate::solver::{solve_next_om, solve_next_pm, NextOmProblem, NextPmProblem, OmPlan, PmPlan};

pub use lifecycle::{
    run_lifecycle, FailureClock, LifeSource, LifecycleResult, SampledLives, ScriptedLives, Strategy,
};
pub use study::{run_study, StrategySummary, StudyReport};

/// Where the system stands at month `s`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemState {
    pub s: u32,
    /// Month each component was last renewed.
    pub last_maintenance: Vec<u32>,
    /// End of the current planning window.
    pub r: u32,
    pub horizon: u32,
    /// Window length carried between iterations.
    pub window: u32,
}

impl SystemState {
    /// All components new at month 0.
    pub fn fresh(config: &SystemConfig) -> Self {
        Self {
            s: 0,
            last_maintenance: vec![0; config.n()],
            r: config.window.min(config.horizon),
            horizon: config.horizon,
            window: config.window,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.s > self.r || self.r > self.horizon {
            return Err(domain(format!(
                "state needs s <= r <= T, got s={}, r={}, T={}",
                self.s, self.r, self.horizon
            )));
        }
        if let Some(t) = self.last_maintenance.iter().find(|&&t| t > self.s) {
            return Err(domain(format!("last maintenance {t} is after s={}", self.s)));
        }
        Ok(())
    }

    pub fn ages(&self) -> Vec<u32> {
        self.last_maintenance.iter().map(|&t| self.s - t).collect()
    }

    /// Moves to month `s` after renewing `renewed` there.
    pub fn moved_to(&self, s: u32, renewed: &[usize]) -> Self {
        let mut last = self.last_maintenance.clone();
        for &j in renewed {
            last[j] = s;
        }
        Self {
            s,
            last_maintenance: last,
            r: (s + self.window).min(self.horizon),
            horizon: self.horizon,
            window: self.window,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MaintenanceKind {
    /// Repair after failure, possibly with opportunistic PM of others.
    #[serde(rename = "CM")]
    Corrective,
    #[serde(rename = "PM")]
    Preventive,
}

/// One maintenance occasion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaintenanceEvent {
    pub time: u32,
    pub kind: MaintenanceKind,
    /// Repaired components (one under the rescheduling loop).
    pub corrective: Vec<usize>,
    /// Preventively renewed components; opportunistic when `kind` is CM.
    pub preventive: Vec<usize>,
    pub setup_cost: f64,
    pub cost: f64,
}

impl MaintenanceEvent {
    pub fn new(config: &SystemConfig, time: u32, corrective: Vec<usize>, preventive: Vec<usize>) -> Self {
        let kind = if corrective.is_empty() {
            MaintenanceKind::Preventive
        } else {
            MaintenanceKind::Corrective
        };
        let setup_cost = config.calendar.month(time);
        let mut event = Self {
            time,
            kind,
            corrective,
            preventive,
            setup_cost,
            cost: 0.0,
        };
        event.cost = event.recompute(config);
        event
    }

    /// `d_time + sum of b over repairs + sum of c over PM/OM`.
    pub fn recompute(&self, config: &SystemConfig) -> f64 {
        let repairs: f64 = self.corrective.iter().map(|&j| config.components[j].cm_cost).sum();
        let planned: f64 = self.preventive.iter().map(|&j| config.components[j].pm_cost).sum();
        config.calendar.month(self.time) + repairs + planned
    }

    pub fn label(&self) -> &'static str {
        match (self.kind, self.preventive.is_empty()) {
            (MaintenanceKind::Preventive, _) => "PM",
            (MaintenanceKind::Corrective, true) => "CM",
            (MaintenanceKind::Corrective, false) => "CM+OM",
        }
    }

    pub fn renewed(&self) -> Vec<usize> {
        let mut all: Vec<usize> = self.corrective.iter().chain(&self.preventive).copied().collect();
        all.sort_unstable();
        all
    }
}

type CacheKey = (usize, u32, u32, u32);

/// Builds cost tables and solves the planning problems for a configuration.
///
/// Table draws are keyed by `(seed, component, s, t_j)`, so a table is a
/// pure function of the state it describes. That makes memoisation
/// (`with_cache`) invisible in the results.
#[derive(Debug)]
pub struct Planner<'a> {
    config: &'a SystemConfig,
    mc: McSettings,
    cache: Option<Mutex<HashMap<CacheKey, Arc<ComponentTable>>>>,
}

impl<'a> Planner<'a> {
    pub fn new(config: &'a SystemConfig) -> Self {
        Self::with_settings(config, config.mc)
    }

    pub fn with_settings(config: &'a SystemConfig, mc: McSettings) -> Self {
        Self {
            config,
            mc,
            cache: None,
        }
    }

    pub fn with_cache(mut self) -> Self {
        self.cache = Some(Mutex::new(HashMap::new()));
        self
    }

    pub fn config(&self) -> &SystemConfig {
        self.config
    }

    pub fn settings(&self) -> &McSettings {
        &self.mc
    }

    /// Tables over months `[s+1, r+1]`.
    pub fn tables(&self, s: u32, last: &[u32], r: u32) -> Result<CostTables> {
        if r < s + 1 || r > self.config.horizon {
            return Err(domain(format!("window end {r} must lie in [{}, {}]", s + 1, self.config.horizon)));
        }
        if last.len() != self.config.n() {
            return Err(domain("last-maintenance vector has the wrong length"));
        }
        let components = self
            .config
            .components
            .iter()
            .enumerate()
            .map(|(j, spec)| {
                let build = || self.config.cost_model(spec).table(s, last[j], s + 1, r + 1, &self.mc);
                match &self.cache {
                    None => build(),
                    Some(cache) => {
                        let key = (j, s, last[j], r);
                        if let Some(hit) = cache.lock().expect("cache lock").get(&key) {
                            return Ok(hit.as_ref().clone());
                        }
                        let table = build()?;
                        cache.lock().expect("cache lock").insert(key, Arc::new(table.clone()));
                        Ok(table)
                    }
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(CostTables {
            s,
            r,
            horizon: self.config.horizon,
            settings: self.mc,
            components,
        })
    }

    /// Solves the next-PM problem for `state`'s window.
    pub fn step_plan(&self, state: &SystemState) -> Result<(PmPlan, CostTables)> {
        state.validate()?;
        let tables = self.tables(state.s, &state.last_maintenance, state.r)?;
        let problem = NextPmProblem::from_tables(&tables, &self.config.calendar);
        let plan = solve_next_pm(&problem)?;
        Ok((plan, tables))
    }

    /// Solves the opportunistic problem for a failure of `failed` during
    /// month `u + 1`, with last-maintenance times `last`.
    pub fn opportunistic(&self, u: u32, last: &[u32], failed: usize) -> Result<(OmPlan, CostTables)> {
        if u + 1 > self.config.horizon {
            return Err(domain(format!("corrective visit at {} is past the horizon", u + 1)));
        }
        if failed >= self.config.n() {
            return Err(domain(format!("component index {failed} out of range")));
        }
        let tables = self.tables(u, last, u + 1)?;
        let problem = NextOmProblem::from_tables(&tables, &self.config.calendar, failed);
        Ok((solve_next_om(&problem)?, tables))
    }

    /// Components whose assigned-month benefit is within one standard error
    /// of zero.
    pub fn benefit_marginal(plan: &PmPlan, tables: &CostTables) -> Vec<usize> {
        plan.assignment
            .iter()
            .enumerate()
            .filter(|&(_, &t)| t <= tables.r)
            .filter(|&(j, &t)| {
                tables.components[j]
                    .benefit_at(t)
                    .is_some_and(|e| e.mean.abs() <= e.stderr)
            })
            .map(|(j, _)| j)
            .collect()
    }
}

/// Outcome of one pass through the rescheduling loop.
#[derive(Debug, Clone, PartialEq)]
pub enum Advance {
    /// The plan's month is at or beyond the horizon: the loop ends.
    Stop,
    Moved {
        state: SystemState,
        events: Vec<MaintenanceEvent>,
        opportunistic: Option<OmPlan>,
    },
}

/// Applies `plan` against the failure clock.
///
/// The earliest failure at or before `tau` preempts the plan: with
/// `u = floor(failure)` the failed component is repaired at `u + 1`
/// together with the opportunistic set. Failures that fell before `s`
/// (a second failure inside an already handled month) are handled at
/// `s + 1`. Without a failure the PM is carried out at `tau`.
pub fn advance(
    planner: &Planner<'_>,
    state: &SystemState,
    plan: &PmPlan,
    clock: &mut FailureClock,
    lives: &mut dyn LifeSource,
) -> Result<Advance> {
    state.validate()?;
    let config = planner.config();
    if plan.tau >= state.horizon {
        return Ok(Advance::Stop);
    }
    if let Some((failed, at)) = clock.earliest_until(plan.tau as f64) {
        let u = (at.floor() as u32).max(state.s);
        let (om, _) = planner.opportunistic(u, &state.last_maintenance, failed)?;
        let visit = u + 1;
        let event = MaintenanceEvent::new(config, visit, vec![failed], om.opportunistic.clone());
        let renewed = event.renewed();
        clock.renew(&renewed, visit as f64, lives)?;
        return Ok(Advance::Moved {
            state: state.moved_to(visit, &renewed),
            events: vec![event],
            opportunistic: Some(om),
        });
    }
    let mut events = Vec::new();
    if !plan.maintained.is_empty() {
        let event = MaintenanceEvent::new(config, plan.tau, Vec::new(), plan.maintained.clone());
        clock.renew(&plan.maintained, plan.tau as f64, lives)?;
        events.push(event);
    }
    Ok(Advance::Moved {
        state: state.moved_to(plan.tau, &plan.maintained),
        events,
        opportunistic: None,
    })
}
