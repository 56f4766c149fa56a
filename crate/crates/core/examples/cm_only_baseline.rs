//! Repair-on-failure cost rates: the long-run renewal approximation and a
//! finite-lifespan simulation.
//!
//! cargo run --release --example cm_only_baseline [lifecycles]

use nextpm::lifetime::LifetimeMoments;
use nextpm::scheduler::{run_study, Strategy};
use nextpm::{cm_only_rate, load_config, Planner};

fn main() -> nextpm::Result<()> {
    let lifecycles = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(500);
    for name in ["summer_d5", "summer_d10"] {
        let path = format!("{}/fixtures/{name}.json", env!("CARGO_MANIFEST_DIR"));
        let config = load_config(path)?;
        println!("{name}");
        for c in &config.components {
            let LifetimeMoments { mean, variance } = c.moments();
            println!(
                "  {:<13} mean life {mean:>7.3}  sd {:>6.3}",
                c.name.as_deref().unwrap_or("?"),
                variance.sqrt()
            );
        }
        let planner = Planner::new(&config);
        let report = run_study(&planner, &[Strategy::CmOnly], lifecycles, 11)?;
        let sim = report.summary(Strategy::CmOnly).expect("simulated");
        println!("  long-run approximation {:.3} kUSD/month", cm_only_rate(&config));
        println!(
            "  simulated over {} months: {:.3} +- {:.3}",
            config.horizon, sim.mean_rate, sim.stderr
        );
    }
    Ok(())
}
