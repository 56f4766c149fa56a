//! Persisted loop state and the JSON shapes the API returns.
//!
//! Components are addressed by their configured `id` everywhere in the
//! API; indices stay internal.

use std::path::{Path, PathBuf};

use nextpm::{CostTables, McSettings, MaintenanceEvent, PmPlan, SystemConfig, SystemState};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Result, ServiceError};

/// Environment variable naming the directory that holds `state.json`.
pub const STATE_DIR_ENV: &str = "NEXTPM_STATE_DIR";
pub const STATE_FILE: &str = "state.json";

/// Explicit path first, then `$NEXTPM_STATE_DIR/state.json`.
pub fn resolve_state_path(explicit: Option<&Path>) -> Option<PathBuf> {
    explicit
        .map(Path::to_path_buf)
        .or_else(|| std::env::var_os(STATE_DIR_ENV).map(|d| PathBuf::from(d).join(STATE_FILE)))
}

/// SHA-256 over the canonical JSON of the configuration, MC settings included.
pub fn config_hash(config: &SystemConfig) -> String {
    let canonical = serde_json::to_vec(&config.to_file()).expect("configuration serialises");
    hex::encode(Sha256::digest(&canonical))
}

/// A maintenance occasion as shown to clients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventView {
    pub time: u32,
    /// `PM`, `CM` or `CM+OM`.
    pub kind: String,
    pub corrective: Vec<u32>,
    pub preventive: Vec<u32>,
    pub setup_cost: f64,
    pub cost: f64,
}

impl EventView {
    pub fn new(config: &SystemConfig, event: &MaintenanceEvent) -> Self {
        Self {
            time: event.time,
            kind: event.label().to_string(),
            corrective: config.ids(&event.corrective),
            preventive: config.ids(&event.preventive),
            setup_cost: event.setup_cost,
            cost: event.cost,
        }
    }

    /// Component ids renewed by the event.
    pub fn renewed(&self) -> impl Iterator<Item = u32> + '_ {
        self.corrective.iter().chain(&self.preventive).copied()
    }
}

/// Cost-table cells behind one component's assignment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentSummary {
    pub component: u32,
    pub age: u32,
    /// Assigned month, `None` for the deferral slot `r + 1`.
    pub month: Option<u32>,
    pub expected_cost: f64,
    pub expected_cost_stderr: f64,
    pub benefit: Option<f64>,
    pub benefit_stderr: Option<f64>,
}

/// A next-PM plan as shown to clients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanView {
    pub s: u32,
    pub r: u32,
    pub tau: u32,
    pub maintained: Vec<u32>,
    pub objective: f64,
    /// The loop ends with this plan (`tau >= T`).
    pub stops: bool,
    pub components: Vec<ComponentSummary>,
}

impl PlanView {
    pub fn new(config: &SystemConfig, state: &SystemState, plan: &PmPlan, tables: &CostTables) -> Self {
        let components = config
            .components
            .iter()
            .enumerate()
            .map(|(j, spec)| {
                let t = plan.assignment[j];
                let table = &tables.components[j];
                let cost = table.cost_at(t).expect("assigned month lies in the table");
                let benefit = table.benefit_at(t);
                ComponentSummary {
                    component: spec.id,
                    age: state.s - state.last_maintenance[j],
                    month: (t <= state.r).then_some(t),
                    expected_cost: cost.mean,
                    expected_cost_stderr: cost.stderr,
                    benefit: benefit.map(|b| b.mean),
                    benefit_stderr: benefit.map(|b| b.stderr),
                }
            })
            .collect();
        Self {
            s: state.s,
            r: state.r,
            tau: plan.tau,
            maintained: config.ids(&plan.maintained),
            objective: plan.objective,
            stops: plan.tau >= state.horizon,
            components,
        }
    }
}

/// What the operator reported.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "report", rename_all = "snake_case")]
pub enum Report {
    Failure { component: u32, time: f64 },
    Maintenance { components: Vec<u32>, time: u32 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistoryEntry {
    pub request_id: String,
    #[serde(flatten)]
    pub report: Report,
    pub event: EventView,
    /// Objective of the opportunistic solve, for failure reports.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub opportunistic_objective: Option<f64>,
}

/// Everything written to the state file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PersistedState {
    pub config_hash: String,
    pub mc: McSettings,
    pub state: SystemState,
    pub history: Vec<HistoryEntry>,
    pub last_plan: Option<PlanView>,
}

impl PersistedState {
    pub fn fresh(config: &SystemConfig) -> Self {
        Self {
            config_hash: config_hash(config),
            mc: config.mc,
            state: SystemState::fresh(config),
            history: Vec::new(),
            last_plan: None,
        }
    }

    pub fn has_request(&self, request_id: &str) -> bool {
        self.history.iter().any(|h| h.request_id == request_id)
    }

    /// Rebuilds the loop state from the fresh system by applying every
    /// recorded event in order.
    pub fn replay(&self, config: &SystemConfig) -> Result<SystemState> {
        let mut state = SystemState::fresh(config);
        for entry in &self.history {
            let renewed = entry
                .event
                .renewed()
                .map(|id| {
                    config
                        .index_of(id)
                        .ok_or_else(|| ServiceError::NotFound(format!("component {id} in history is not configured")))
                })
                .collect::<Result<Vec<_>>>()?;
            state = state.moved_to(entry.event.time, &renewed);
        }
        Ok(state)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Ok(serde_json::from_slice(&std::fs::read(path)?)?)
    }

    /// Writes through a temporary file so a crash never leaves half a state.
    pub fn save(&self, path: &Path) -> Result<()> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)?;
        }
        let tmp = path.with_extension("json.tmp");
        std::fs::write(&tmp, serde_json::to_vec_pretty(self)?)?;
        std::fs::rename(tmp, path)?;
        Ok(())
    }
}
