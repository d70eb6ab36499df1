//! Command line and HTTP front ends for `colstd-core`.

pub mod commands;
pub mod opts;
pub mod server;

use std::time::Duration;

use commands::Failure;
use opts::{Cli, Command, ServeArgs};
use server::ServerConfig;

pub fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Infer(a) => commands::infer(&a),
        Command::Standardize(a) => commands::standardize(&a),
        Command::Evaluate(a) => commands::evaluate(&a),
        Command::Serve(a) => serve(&a),
    }
}

pub fn server_config(args: &ServeArgs) -> Result<ServerConfig, Failure> {
    Ok(ServerConfig {
        workflow: args.engine.workflow().map_err(Failure::usage)?,
        settings: args.engine.settings("input.csv").map_err(Failure::usage)?,
        ingest: args.table.ingest(),
        session_ttl: Duration::from_secs(args.session_ttl.max(1)),
        static_dir: args.static_dir.clone(),
    })
}

fn serve(args: &ServeArgs) -> Result<(), Failure> {
    // built outside the runtime: the HTTP model client blocks
    let config = server_config(args)?;
    let runtime = tokio::runtime::Runtime::new().map_err(|e| Failure::run(e.to_string()))?;
    runtime.block_on(async {
        let addr = format!("{}:{}", args.host, args.port);
        let listener = tokio::net::TcpListener::bind(&addr)
            .await
            .map_err(|e| Failure::run(format!("cannot listen on {addr}: {e}")))?;
        let local = listener.local_addr().map_err(|e| Failure::run(e.to_string()))?;
        eprintln!("listening on http://{local}");
        server::serve(listener, config, async {
            let _ = tokio::signal::ctrl_c().await;
            eprintln!("shutting down");
        })
        .await
        .map_err(|e| Failure::run(e.to_string()))
    })
}
