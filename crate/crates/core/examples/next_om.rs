//! Which healthy components should be renewed while the crew is on site
//! for a repair? Solves the opportunistic problem for each possible failed
//! component of a turbine that has never been maintained, at month 60 and
//! at month 150. Deferring to the next month halves the rate of the
//! deferred work, so only components with a high failure risk over the
//! next two months are renewed alongside.
//!
//! cargo run --release --example next_om

use nextpm::{load_config, Planner};

fn main() -> nextpm::Result<()> {
    let config = load_config(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/summer_d5.json"))?;
    let planner = Planner::new(&config);
    let last = vec![0; config.n()];
    for (u, failed) in [60, 150].into_iter().flat_map(|u| (0..config.n()).map(move |j| (u, j))) {
        let (plan, tables) = planner.opportunistic(u, &last, failed)?;
        let benefits: Vec<String> = (0..config.n())
            .map(|j| format!("{:.1}", tables.benefit(j, u + 1).unwrap_or(f64::NAN)))
            .collect();
        println!(
            "component {} fails in month {}: renew {:?} alongside, rate {:.3}, PM benefits now [{}]",
            config.components[failed].id,
            u + 1,
            config.ids(&plan.opportunistic),
            plan.objective,
            benefits.join(", ")
        );
    }
    Ok(())
}
