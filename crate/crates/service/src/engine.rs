//! The live rescheduling loop behind the API.
//!
//! Readers take a cheap snapshot (`Arc<PersistedState>`); writers are
//! serialised by `writer`, compute the next state from a snapshot without
//! blocking readers, then swap it in and persist it.

use std::path::PathBuf;
use std::sync::{Arc, Mutex, RwLock};

use nextpm::{
    CalendarSpec, MaintenanceEvent, McSettings, Planner, SetupCostCalendar, SystemConfig, SystemState,
};
use serde::{Deserialize, Serialize};

use crate::error::{Result, ServiceError};
use crate::store::{config_hash, EventView, HistoryEntry, PersistedState, PlanView, Report};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureRequest {
    pub component: u32,
    /// Continuous failure time in months.
    pub time: f64,
    pub request_id: String,
    /// When given, must match the server's configuration hash.
    #[serde(default)]
    pub config_hash: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaintenanceRequest {
    pub components: Vec<u32>,
    pub time: u32,
    pub request_id: String,
    #[serde(default)]
    pub config_hash: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WhatIfRequest {
    #[serde(default)]
    pub calendar: Option<CalendarSpec>,
    #[serde(default)]
    pub lambda: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OmView {
    pub failed: u32,
    /// Renewed alongside the repair.
    pub opportunistic: Vec<u32>,
    pub objective: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureOutcome {
    pub om: OmView,
    pub event: EventView,
    pub state: SystemState,
    /// Rescheduled plan; `None` once the lifespan is over.
    pub plan: Option<PlanView>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaintenanceOutcome {
    pub event: EventView,
    pub state: SystemState,
    pub plan: Option<PlanView>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WhatIfOutcome {
    pub plan: Option<PlanView>,
    pub current_objective: Option<f64>,
    /// `plan.objective - current_objective`.
    pub objective_delta: Option<f64>,
}

#[derive(Debug)]
pub struct Engine {
    config: Arc<SystemConfig>,
    hash: String,
    path: Option<PathBuf>,
    /// Set when the state file was written under another configuration.
    stale: Option<String>,
    snapshot: RwLock<Arc<PersistedState>>,
    writer: Mutex<()>,
}

impl Engine {
    /// Loads `path` if it exists, otherwise starts from the fresh system.
    /// A state file whose history does not replay to its recorded state is
    /// rejected; one saved under another configuration is kept read-only.
    pub fn open(config: SystemConfig, path: Option<PathBuf>) -> Result<Self> {
        let hash = config_hash(&config);
        let (persisted, stale) = match path.as_deref().filter(|p| p.exists()) {
            None => (PersistedState::fresh(&config), None),
            Some(p) => {
                let loaded = PersistedState::load(p)?;
                if loaded.config_hash != hash {
                    let why = format!(
                        "state file {} was written under configuration {}, server runs {}",
                        p.display(),
                        loaded.config_hash,
                        hash
                    );
                    (loaded, Some(why))
                } else {
                    let replayed = loaded.replay(&config)?;
                    if replayed != loaded.state {
                        return Err(ServiceError::Conflict(format!(
                            "history in {} does not replay to the recorded state",
                            p.display()
                        )));
                    }
                    (loaded, None)
                }
            }
        };
        Ok(Self {
            config: Arc::new(config),
            hash,
            path,
            stale,
            snapshot: RwLock::new(Arc::new(persisted)),
            writer: Mutex::new(()),
        })
    }

    pub fn config(&self) -> &SystemConfig {
        &self.config
    }

    pub fn config_hash(&self) -> &str {
        &self.hash
    }

    pub fn settings(&self) -> McSettings {
        self.config.mc
    }

    pub fn stale(&self) -> Option<&str> {
        self.stale.as_deref()
    }

    pub fn snapshot(&self) -> Arc<PersistedState> {
        self.snapshot.read().expect("snapshot lock").clone()
    }

    /// The current plan, computed and stored on first use.
    pub fn plan(&self) -> Result<Option<PlanView>> {
        if let Some(plan) = &self.snapshot().last_plan {
            return Ok(Some(plan.clone()));
        }
        if !self.plannable(&self.snapshot().state) {
            return Ok(None);
        }
        let _guard = self.writer.lock().expect("writer lock");
        let current = self.snapshot();
        if let Some(plan) = &current.last_plan {
            return Ok(Some(plan.clone()));
        }
        let plan = self.plan_for(&self.config, &current.state)?;
        if self.stale.is_none() {
            let mut next = (*current).clone();
            next.last_plan = plan.clone();
            self.commit(next)?;
        }
        Ok(plan)
    }

    /// Failure of `component` at continuous time `time`, with
    /// `s < time <= tau` for the current plan's `tau`.
    pub fn report_failure(&self, req: &FailureRequest) -> Result<FailureOutcome> {
        let _guard = self.writer.lock().expect("writer lock");
        let current = self.snapshot();
        self.check_mutation(&current, &req.request_id, req.config_hash.as_deref())?;
        let failed = self.index(req.component)?;
        let state = &current.state;
        let tau = match &current.last_plan {
            Some(p) => p.tau,
            None => match self.plan_for(&self.config, state)? {
                Some(p) => p.tau,
                None => state.horizon,
            },
        };
        let latest = (tau.min(state.horizon)) as f64;
        if !(req.time.is_finite() && req.time > state.s as f64 && req.time <= latest) {
            return Err(ServiceError::Validation(format!(
                "failure time {} must lie in ({}, {latest}]",
                req.time, state.s
            )));
        }
        let u = req.time.floor() as u32;
        if u + 1 > state.horizon {
            return Err(ServiceError::Validation(format!(
                "the repair month {} would be past the lifespan {}",
                u + 1,
                state.horizon
            )));
        }

        let planner = Planner::new(&self.config);
        let (om, _) = planner.opportunistic(u, &state.last_maintenance, failed)?;
        let event = MaintenanceEvent::new(&self.config, u + 1, vec![failed], om.opportunistic.clone());
        let next_state = state.moved_to(u + 1, &event.renewed());
        let plan = self.plan_for(&self.config, &next_state)?;

        let view = EventView::new(&self.config, &event);
        let mut next = (*current).clone();
        next.history.push(HistoryEntry {
            request_id: req.request_id.clone(),
            report: Report::Failure {
                component: req.component,
                time: req.time,
            },
            event: view.clone(),
            opportunistic_objective: Some(om.objective),
        });
        next.state = next_state.clone();
        next.last_plan = plan.clone();
        self.commit(next)?;
        Ok(FailureOutcome {
            om: OmView {
                failed: req.component,
                opportunistic: self.config.ids(&om.opportunistic),
                objective: om.objective,
            },
            event: view,
            state: next_state,
            plan,
        })
    }

    /// Completed preventive maintenance of `components` at month `time`.
    pub fn record_maintenance(&self, req: &MaintenanceRequest) -> Result<MaintenanceOutcome> {
        let _guard = self.writer.lock().expect("writer lock");
        let current = self.snapshot();
        self.check_mutation(&current, &req.request_id, req.config_hash.as_deref())?;
        if req.components.is_empty() {
            return Err(ServiceError::Validation("no components given".into()));
        }
        let mut renewed = req
            .components
            .iter()
            .map(|&id| self.index(id))
            .collect::<Result<Vec<_>>>()?;
        renewed.sort_unstable();
        renewed.dedup();
        let state = &current.state;
        if req.time <= state.s || req.time > state.horizon {
            return Err(ServiceError::Validation(format!(
                "maintenance month {} must lie in ({}, {}]",
                req.time, state.s, state.horizon
            )));
        }
        let event = MaintenanceEvent::new(&self.config, req.time, Vec::new(), renewed.clone());
        let next_state = state.moved_to(req.time, &renewed);
        let plan = self.plan_for(&self.config, &next_state)?;

        let view = EventView::new(&self.config, &event);
        let mut next = (*current).clone();
        next.history.push(HistoryEntry {
            request_id: req.request_id.clone(),
            report: Report::Maintenance {
                components: req.components.clone(),
                time: req.time,
            },
            event: view.clone(),
            opportunistic_objective: None,
        });
        next.state = next_state.clone();
        next.last_plan = plan.clone();
        self.commit(next)?;
        Ok(MaintenanceOutcome {
            event: view,
            state: next_state,
            plan,
        })
    }

    /// The plan the current state would get under another calendar or
    /// discount exponent. Nothing is stored.
    pub fn whatif(&self, req: &WhatIfRequest) -> Result<WhatIfOutcome> {
        let current = self.snapshot();
        let mut config = (*self.config).clone();
        if let Some(spec) = &req.calendar {
            config.calendar = SetupCostCalendar::from_spec(config.horizon, spec).map_err(validation)?;
        }
        if let Some(lambda) = req.lambda {
            if !(lambda.is_finite() && lambda > 0.0) {
                return Err(ServiceError::Validation(format!("lambda must be > 0 (got {lambda})")));
            }
            config.lambda = lambda;
        }
        let plan = self.plan_for(&config, &current.state)?;
        let baseline = match &current.last_plan {
            Some(p) => Some(p.objective),
            None => self.plan_for(&self.config, &current.state)?.map(|p| p.objective),
        };
        Ok(WhatIfOutcome {
            objective_delta: plan.as_ref().zip(baseline).map(|(p, b)| p.objective - b),
            plan,
            current_objective: baseline,
        })
    }

    fn plannable(&self, state: &SystemState) -> bool {
        state.s < state.horizon && state.r > state.s
    }

    fn plan_for(&self, config: &SystemConfig, state: &SystemState) -> Result<Option<PlanView>> {
        if !self.plannable(state) {
            return Ok(None);
        }
        let (plan, tables) = Planner::new(config).step_plan(state)?;
        Ok(Some(PlanView::new(config, state, &plan, &tables)))
    }

    fn index(&self, id: u32) -> Result<usize> {
        self.config
            .index_of(id)
            .ok_or_else(|| ServiceError::NotFound(format!("no component with id {id}")))
    }

    fn check_mutation(&self, current: &PersistedState, request_id: &str, hash: Option<&str>) -> Result<()> {
        if let Some(why) = &self.stale {
            return Err(ServiceError::Conflict(why.clone()));
        }
        if let Some(h) = hash.filter(|h| *h != self.hash) {
            return Err(ServiceError::Conflict(format!(
                "request was made against configuration {h}, server runs {}",
                self.hash
            )));
        }
        if request_id.is_empty() {
            return Err(ServiceError::Validation("request_id must not be empty".into()));
        }
        if current.has_request(request_id) {
            return Err(ServiceError::Conflict(format!("request {request_id} was already applied")));
        }
        Ok(())
    }

    fn commit(&self, next: PersistedState) -> Result<()> {
        if let Some(path) = &self.path {
            next.save(path)?;
        }
        *self.snapshot.write().expect("snapshot lock") = Arc::new(next);
        Ok(())
    }
}

fn validation(e: nextpm::Error) -> ServiceError {
    match e {
        nextpm::Error::InvalidConfig(v) => ServiceError::Validation(v.join("; ")),
        other => ServiceError::Model(other),
    }
}
