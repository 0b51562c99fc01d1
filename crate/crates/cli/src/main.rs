use std::io::IsTerminal;
use std::process::ExitCode;
use std::time::Duration;

use clap::Parser;
use siskit_cli::render::Style;
use siskit_cli::{run, Cli, Command, EXIT_UNREADABLE};
use siskit_service::ServiceConfig;

fn color_for(is_tty: bool) -> Style {
    Style { color: is_tty && std::env::var_os("SISKIT_NO_COLOR").is_none() }
}

fn serve(cli: &Cli) -> anyhow::Result<()> {
    let Command::Serve { port, host, idle_timeout_minutes, snapshot_dir, verify_rescore } = &cli.command else {
        unreachable!("serve called for another command");
    };
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()),
        )
        .with_writer(std::io::stderr)
        .with_ansi(color_for(std::io::stderr().is_terminal()).color)
        .init();
    let config = ServiceConfig {
        idle_timeout: Duration::from_secs(idle_timeout_minutes.max(&1) * 60),
        snapshot_dir: snapshot_dir.clone(),
        verify_rescore: *verify_rescore,
    };
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(async {
        let listener = tokio::net::TcpListener::bind((*host, *port)).await?;
        eprintln!("siskit service listening on http://{}", listener.local_addr()?);
        siskit_service::serve(listener, config).await?;
        Ok(())
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if matches!(cli.command, Command::Serve { .. }) {
        return match serve(&cli) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("ERROR serve: {e:#}");
                ExitCode::from(EXIT_UNREADABLE)
            }
        };
    }
    let style = color_for(std::io::stdout().is_terminal());
    let err_style = color_for(std::io::stderr().is_terminal());
    let mut out = std::io::stdout().lock();
    let mut err = std::io::stderr().lock();
    ExitCode::from(run(&cli, style, err_style, &mut out, &mut err))
}
