use std::process::ExitCode;
use std::sync::Arc;

use clap::Parser;
use nextpm_service::cli::{run, Cli, Command};
use nextpm_service::{api, Engine};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Serve { model, port } => serve(model, *port),
        other => run(other, &mut std::io::stdout().lock()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn serve(model: &nextpm_service::cli::ModelArgs, port: u16) -> nextpm_service::Result<()> {
    let config = model.load()?;
    for w in &config.warnings {
        eprintln!("warning: {w}");
    }
    let path = model.state_path();
    if path.is_none() {
        eprintln!("no --state or NEXTPM_STATE_DIR given; state is kept in memory only");
    }
    let engine = Arc::new(Engine::open(config, path)?);
    if let Some(why) = engine.stale() {
        eprintln!("warning: {why}; mutating requests will be refused");
    }
    tokio::runtime::Runtime::new()?.block_on(api::serve(engine, port))?;
    Ok(())
}
