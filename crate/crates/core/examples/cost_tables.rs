//! Expected PM cost and PM benefit tables for a system part way through
//! its life, written as CSV.
//!
//! cargo run --release --example cost_tables > tables.csv

use nextpm::{build_cost_tables, load_config, McSettings};

fn main() -> nextpm::Result<()> {
    let config = load_config(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/turbine_d10.json"))?;
    // month 60; the gearbox was replaced at 35, the rest are original
    let last = [0, 0, 35, 0];
    let tables = build_cost_tables(&config, 60, &last, 100, &McSettings::new(20_000, 5))?;
    tables.write_csv(std::io::stdout())
}
