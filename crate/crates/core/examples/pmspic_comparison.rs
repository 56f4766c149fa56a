//! First planned PM of the next-PM planner against the full-horizon
//! interval-cost model, for constant set-up costs 1, 5 and 10.
//!
//! The full-horizon model is solved exactly at a reduced horizon and by a
//! time-limited search at the full lifespan; the latter reports its gap.
//!
//! cargo run --release --example pmspic_comparison [replications] [seconds]

use std::time::Duration;

use nextpm::calendar::SetupCostCalendar;
use nextpm::config::wind_turbine;
use nextpm::pmspic::{compare_first_pm, write_comparison_csv, SearchLimits};
use nextpm::McSettings;

fn main() -> nextpm::Result<()> {
    let mut args = std::env::args().skip(1);
    let reps = args.next().and_then(|a| a.parse().ok()).unwrap_or(20_000);
    let seconds = args.next().and_then(|a| a.parse().ok()).unwrap_or(5);
    let limits = SearchLimits {
        max_nodes: u64::MAX,
        time_limit: Duration::from_secs(seconds),
    };
    let mut rows = Vec::new();
    for d in [1.0, 5.0, 10.0] {
        let config = wind_turbine(SetupCostCalendar::constant(240, d), McSettings::new(reps, 2024));
        for horizon in [36, 240] {
            for row in compare_first_pm(&config, horizon, limits)? {
                if row.strategy == "NextPM" && horizon != 36 {
                    continue;
                }
                println!(
                    "d={d:<4} {:<7} T={:<4} first PM {:?}  monthly {:.4}  {:.3}s{}",
                    row.strategy,
                    row.horizon,
                    row.first_pm,
                    row.monthly_cost,
                    row.solve_seconds,
                    match (row.total_cost, row.lower_bound) {
                        (Some(total), Some(lb)) if !row.optimal => {
                            format!("  (total {total:.2}, not proven optimal, gap {:.2}%)", 100.0 * (total - lb) / total)
                        }
                        _ => String::new(),
                    }
                );
                rows.push(row);
            }
        }
    }
    write_comparison_csv(&rows, std::io::stdout())?;
    Ok(())
}
