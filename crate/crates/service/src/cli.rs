//! Command-line front end.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nextpm::pmspic::{compare_first_pm, write_comparison_csv, SearchLimits};
use nextpm::scheduler::{run_study, Strategy};
use nextpm::{load_config, McSettings, Planner, SystemConfig, SystemState};
use serde_json::json;

use crate::error::{Result, ServiceError};
use crate::store::{resolve_state_path, EventView, PersistedState, PlanView};

#[derive(Debug, Parser)]
#[command(name = "nextpm", version, about = "Next preventive-maintenance planner")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the next-PM plan for the configured system (JSON).
    Plan(ModelArgs),
    /// Solve one opportunistic-maintenance instance for a failure.
    Om {
        #[command(flatten)]
        model: ModelArgs,
        /// Id of the failed component.
        #[arg(long)]
        component: u32,
        /// Continuous failure time, months.
        #[arg(long)]
        time: f64,
    },
    /// Simulate lifecycles under one or both strategies.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum, default_value_t = StrategyArg::Both)]
        strategy: StrategyArg,
        /// Number of simulated lifecycles.
        #[arg(long, default_value_t = 500)]
        reps: usize,
        /// Monte Carlo replications per cost-table cell inside the loop.
        #[arg(long, default_value_t = 2_000)]
        table_reps: u64,
        /// Seed of the lifecycle draws.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Study report CSV.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Export the cost tables of the current window as CSV.
    Tables(ModelArgs),
    /// Compare first planned PMs with the full-horizon interval model.
    PmspicCompare {
        #[command(flatten)]
        model: ModelArgs,
        /// Horizon of the full-horizon model; exact up to 36, time-limited beyond.
        #[arg(long, default_value_t = 36)]
        horizon: u32,
        /// Time limit of the full-horizon search, seconds.
        #[arg(long, default_value_t = 10)]
        seconds: u64,
    },
    /// Run the HTTP API.
    Serve {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 8080)]
        port: u16,
    },
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// State file; defaults to $NEXTPM_STATE_DIR/state.json when that is set.
    #[arg(long)]
    pub state: Option<PathBuf>,
    /// Overrides the configured Monte Carlo seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Overrides the configured replications per table cell.
    #[arg(long)]
    pub reps: Option<u64>,
    /// Output file instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    Nextpm,
    CmOnly,
    Both,
}

impl ModelArgs {
    pub fn load(&self) -> Result<SystemConfig> {
        let mut config = load_config(&self.config)?;
        if let Some(seed) = self.seed {
            config.mc.seed = seed;
        }
        if let Some(reps) = self.reps {
            config.mc.replications = reps;
        }
        Ok(config)
    }

    pub fn state_path(&self) -> Option<PathBuf> {
        resolve_state_path(self.state.as_deref())
    }

    /// The persisted loop state, or the fresh system when there is none.
    fn system_state(&self, config: &SystemConfig) -> Result<SystemState> {
        match self.state_path().filter(|p| p.exists()) {
            Some(p) => Ok(PersistedState::load(&p)?.replay(config)?),
            None => Ok(SystemState::fresh(config)),
        }
    }
}

/// Runs every subcommand except `serve`.
pub fn run(command: &Command, stdout: &mut dyn Write) -> Result<()> {
    match command {
        Command::Plan(args) => {
            let config = args.load()?;
            let state = args.system_state(&config)?;
            if state.s >= state.horizon || state.r <= state.s {
                return emit(args.out.as_deref(), stdout, &json!({ "plan": null, "state": state }));
            }
            let (plan, tables) = Planner::new(&config).step_plan(&state)?;
            let view = PlanView::new(&config, &state, &plan, &tables);
            let doc = json!({ "seed": config.mc.seed, "mc": config.mc, "state": state, "plan": view });
            emit(args.out.as_deref(), stdout, &doc)
        }
        Command::Om { model, component, time } => {
            let config = model.load()?;
            let state = model.system_state(&config)?;
            let failed = config
                .index_of(*component)
                .ok_or_else(|| ServiceError::NotFound(format!("no component with id {component}")))?;
            if !(time.is_finite() && *time > state.s as f64) {
                return Err(ServiceError::Validation(format!("failure time {time} must be after month {}", state.s)));
            }
            let u = time.floor() as u32;
            let (om, _) = Planner::new(&config).opportunistic(u, &state.last_maintenance, failed)?;
            let event = nextpm::MaintenanceEvent::new(&config, u + 1, vec![failed], om.opportunistic.clone());
            let doc = json!({
                "seed": config.mc.seed,
                "mc": config.mc,
                "failed": component,
                "repair_month": u + 1,
                "opportunistic": config.ids(&om.opportunistic),
                "objective": om.objective,
                "event": EventView::new(&config, &event),
            });
            emit(model.out.as_deref(), stdout, &doc)
        }
        Command::Simulate {
            config,
            strategy,
            reps,
            table_reps,
            seed,
            out,
        } => {
            let config = load_config(config)?;
            let strategies: &[Strategy] = match strategy {
                StrategyArg::Nextpm => &[Strategy::NextPm],
                StrategyArg::CmOnly => &[Strategy::CmOnly],
                StrategyArg::Both => &[Strategy::NextPm, Strategy::CmOnly],
            };
            let planner = Planner::with_settings(&config, McSettings::new(*table_reps, config.mc.seed)).with_cache();
            let report = run_study(&planner, strategies, *reps, *seed)?;
            for s in &report.strategies {
                writeln!(
                    stdout,
                    "{:<8} mean rate {:.4} kUSD/month (stderr {:.4}, 95% CI [{:.4}, {:.4}]){}",
                    s.strategy.label(),
                    s.mean_rate,
                    s.stderr,
                    s.ci95.0,
                    s.ci95.1,
                    s.saving_vs_cm_only_pct
                        .filter(|_| s.strategy != Strategy::CmOnly)
                        .map(|p| format!(", saving {p:.1}%"))
                        .unwrap_or_default()
                )?;
            }
            writeln!(stdout, "cm-only renewal approximation {:.4}", report.cm_only_approximation)?;
            if let (Some(f), Some(p)) = (report.planning_objective, report.planning_saving_pct) {
                writeln!(stdout, "first planning objective {f:.4} ({p:.1}% below the approximation)")?;
            }
            if let Some(path) = out {
                report.write_csv(std::fs::File::create(path)?)?;
            }
            Ok(())
        }
        Command::Tables(args) => {
            let config = args.load()?;
            let state = args.system_state(&config)?;
            let tables = Planner::new(&config).tables(state.s, &state.last_maintenance, state.r)?;
            match &args.out {
                Some(path) => tables.write_csv(std::fs::File::create(path)?)?,
                None => tables.write_csv(&mut *stdout)?,
            }
            Ok(())
        }
        Command::PmspicCompare { model, horizon, seconds } => {
            let config = model.load()?;
            let limits = SearchLimits {
                max_nodes: u64::MAX,
                time_limit: Duration::from_secs(*seconds),
            };
            let rows = compare_first_pm(&config, *horizon, limits)?;
            match &model.out {
                Some(path) => write_comparison_csv(&rows, std::fs::File::create(path)?)?,
                None => write_comparison_csv(&rows, &mut *stdout)?,
            }
            Ok(())
        }
        Command::Serve { .. } => Err(ServiceError::Validation("serve runs through the async entry point".into())),
    }
}

fn emit(out: Option<&Path>, stdout: &mut dyn Write, doc: &serde_json::Value) -> Result<()> {
    let text = serde_json::to_string_pretty(doc)?;
    match out {
        Some(path) => std::fs::write(path, text + "\n")?,
        None => writeln!(stdout, "{text}")?,
    }
    Ok(())
}
