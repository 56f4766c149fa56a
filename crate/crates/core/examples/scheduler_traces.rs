//! Two deterministic passes through the rescheduling loop on the
//! four-component turbine with constant set-up cost 5.
//!
//! 1. No component ever fails and the plan is a PM of everything at 50.
//! 2. The gearbox fails at 12.4 months while the PM is planned at 50.
//!
//! cargo run --release --example scheduler_traces

use nextpm::load_config;
use nextpm::scheduler::{advance, Advance, FailureClock, ScriptedLives};
use nextpm::{Planner, PmPlan, SystemState};

fn main() -> nextpm::Result<()> {
    let config = load_config(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/turbine_d5.json"))?;
    let planner = Planner::new(&config);
    let state = SystemState::fresh(&config);
    let plan = PmPlan {
        tau: 50,
        maintained: vec![0, 1, 2, 3],
        objective: f64::NAN,
        assignment: vec![50; 4],
    };

    println!("start: s={} r={} last={:?}", state.s, state.r, state.last_maintenance);

    let mut lives = ScriptedLives::immortal(4);
    let mut clock = FailureClock::from_times(vec![f64::INFINITY; 4]);
    report("no failure", advance(&planner, &state, &plan, &mut clock, &mut lives)?, &config);

    let mut lives = ScriptedLives::immortal(4);
    let mut clock = FailureClock::from_times(vec![f64::INFINITY, f64::INFINITY, 12.4, f64::INFINITY]);
    report("gearbox fails at 12.4", advance(&planner, &state, &plan, &mut clock, &mut lives)?, &config);
    Ok(())
}

fn report(title: &str, outcome: Advance, config: &nextpm::SystemConfig) {
    println!("\n{title}");
    match outcome {
        Advance::Stop => println!("  loop stops"),
        Advance::Moved { state, events, opportunistic } => {
            for e in &events {
                println!(
                    "  {} at {}: repaired {:?}, renewed {:?}, set-up {} + work = {}",
                    e.label(),
                    e.time,
                    config.ids(&e.corrective),
                    config.ids(&e.preventive),
                    e.setup_cost,
                    e.cost
                );
            }
            if let Some(om) = opportunistic {
                println!("  opportunistic objective {:.4}", om.objective);
            }
            println!("  now: s={} r={} last={:?}", state.s, state.r, state.last_maintenance);
        }
    }
}
