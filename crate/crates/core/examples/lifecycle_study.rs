//! Paired-seed lifecycle simulation: the rescheduling loop against
//! repair-on-failure, on the summer-start calendar with mean set-up cost 5.
//!
//! cargo run --release --example lifecycle_study [lifecycles] [table replications]

use std::time::Instant;

use nextpm::load_config;
use nextpm::scheduler::{run_study, Strategy};
use nextpm::{McSettings, Planner};

fn main() -> nextpm::Result<()> {
    let mut args = std::env::args().skip(1);
    let lifecycles = args.next().and_then(|a| a.parse().ok()).unwrap_or(100);
    let table_reps = args.next().and_then(|a| a.parse().ok()).unwrap_or(2_000);
    let config = load_config(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/summer_d5.json"))?;
    let planner = Planner::with_settings(&config, McSettings::new(table_reps, config.mc.seed)).with_cache();

    let started = Instant::now();
    let report = run_study(&planner, &[Strategy::NextPm, Strategy::CmOnly], lifecycles, 7)?;
    println!("{lifecycles} lifecycles in {:.1?}", started.elapsed());
    for s in &report.strategies {
        println!(
            "{:<8} mean {:.3} kUSD/month, 95% CI [{:.3}, {:.3}], saving {:.1}%",
            s.strategy.label(),
            s.mean_rate,
            s.ci95.0,
            s.ci95.1,
            s.saving_vs_cm_only_pct.unwrap_or(0.0)
        );
    }
    println!("CM-only renewal approximation {:.3}", report.cm_only_approximation);
    if let (Some(f), Some(p)) = (report.planning_objective, report.planning_saving_pct) {
        println!("first planning objective {f:.3} ({p:.1}% below the approximation)");
    }
    report.write_csv(std::io::stdout())?;
    Ok(())
}
