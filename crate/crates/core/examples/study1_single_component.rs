//! Single gearbox, constant set-up cost 10: when is the first PM worth it?
//!
//! cargo run --release --example study1_single_component [replications]

use std::time::Instant;

use nextpm::{load_config, solve_next_pm, McSettings, NextPmProblem, Planner, SystemState};

fn main() -> nextpm::Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/gearbox_d10.json");
    let config = load_config(path)?;
    let reps = std::env::args()
        .nth(1)
        .and_then(|a| a.parse().ok())
        .unwrap_or(config.mc.replications);
    let planner = Planner::with_settings(&config, McSettings::new(reps, config.mc.seed));
    let state = SystemState::fresh(&config);

    let started = Instant::now();
    let tables = planner.tables(state.s, &state.last_maintenance, state.r)?;
    let built = started.elapsed();
    let problem = NextPmProblem::from_tables(&tables, &config.calendar);
    let solve_started = Instant::now();
    let plan = solve_next_pm(&problem)?;
    let solved = solve_started.elapsed();

    println!("replications per cell: {reps}");
    println!("tables built in {:.2?}, solved in {:.2?}", built, solved);
    println!("next PM at month {} with rate {:.4} kUSD/month", plan.tau, plan.objective);
    println!("\n  t   cost/(t-s)   benefit");
    for t in (10..=80).step_by(5) {
        let c = tables.cost(0, t);
        let d = tables.benefit(0, t).unwrap_or(f64::NAN);
        println!("{t:>3}   {:>10.4}   {d:>7.3}", (config.calendar.month(t) + c) / t as f64);
    }
    Ok(())
}
