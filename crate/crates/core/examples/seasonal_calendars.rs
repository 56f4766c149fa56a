//! Four-component turbine under constant, summer-start and winter-start
//! set-up calendars, for mean set-up costs 5 and 10.
//!
//! cargo run --release --example seasonal_calendars [replications] [seed]

use nextpm::calendar::{SetupCostCalendar, SEASONAL_PATTERN_D10, SEASONAL_PATTERN_D5};
use nextpm::config::wind_turbine;
use nextpm::{cm_only_rate, McSettings, Planner, SystemState};

fn main() -> nextpm::Result<()> {
    let reps = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(100_000);
    let seed = std::env::args().nth(2).and_then(|a| a.parse().ok()).unwrap_or(2024);
    let mc = McSettings::new(reps, seed);
    for (mean, pattern) in [(5.0, SEASONAL_PATTERN_D5), (10.0, SEASONAL_PATTERN_D10)] {
        println!("mean set-up cost {mean}");
        let scenarios = [
            ("constant", SetupCostCalendar::constant(240, mean)),
            ("summer start", SetupCostCalendar::seasonal(240, &pattern, true)),
            ("winter start", SetupCostCalendar::seasonal(240, &pattern, false)),
        ];
        for (name, calendar) in scenarios {
            let config = wind_turbine(calendar, mc);
            let planner = Planner::new(&config);
            let (plan, _) = planner.step_plan(&SystemState::fresh(&config))?;
            let months: Vec<String> = plan
                .assignment
                .iter()
                .map(|&t| if t <= plan.tau { t.to_string() } else { "x".into() })
                .collect();
            println!(
                "  {name:<13} tau={:<3} plan=[{}] rate={:.4}  cm-only={:.3}",
                plan.tau,
                months.join(" "),
                plan.objective,
                cm_only_rate(&config)
            );
        }
    }
    Ok(())
}
