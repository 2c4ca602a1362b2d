use std::io::Write;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use clap::Args;
use crashpbo_service::{serve, ServiceConfig, SessionStore};

use crate::CliError;

#[derive(Debug, Args)]
pub struct ServeArgs {
    /// Listen address [env: CRASHPBO_ADDR, default 127.0.0.1:8080].
    #[arg(long)]
    addr: Option<SocketAddr>,
    /// Session directory [env: CRASHPBO_DATA_DIR, default ./crashpbo-data].
    #[arg(long)]
    data_dir: Option<PathBuf>,
    /// Allowed browser origin, or `*` [env: CRASHPBO_CORS_ORIGIN].
    #[arg(long)]
    cors_origin: Option<String>,
}

async fn shutdown_signal() {
    let ctrl_c = async {
        let _ = tokio::signal::ctrl_c().await;
    };
    #[cfg(unix)]
    let term = async {
        match tokio::signal::unix::signal(tokio::signal::unix::SignalKind::terminate()) {
            Ok(mut s) => {
                s.recv().await;
            }
            Err(_) => std::future::pending::<()>().await,
        }
    };
    #[cfg(not(unix))]
    let term = std::future::pending::<()>();
    tokio::select! {
        _ = ctrl_c => {}
        _ = term => {}
    }
    tracing::info!("shutdown requested");
}

pub fn run(args: ServeArgs) -> Result<(), CliError> {
    let mut config = ServiceConfig::from_env().map_err(CliError::Usage)?;
    if let Some(a) = args.addr {
        config.addr = a;
    }
    if let Some(d) = args.data_dir {
        config.data_dir = d;
    }
    if args.cors_origin.is_some() {
        config.cors_origin = args.cors_origin;
    }
    let store = Arc::new(
        SessionStore::open(&config.data_dir)
            .map_err(|e| CliError::Runtime(format!("{}: {}", config.data_dir.display(), e.message)))?,
    );
    let runtime =
        tokio::runtime::Builder::new_multi_thread().enable_all().build().map_err(CliError::runtime)?;
    runtime.block_on(async {
        let listener = tokio::net::TcpListener::bind(config.addr)
            .await
            .map_err(|e| CliError::Runtime(format!("cannot bind {}: {e}", config.addr)))?;
        let local = listener.local_addr().map_err(CliError::runtime)?;
        println!("listening on http://{local}");
        let _ = std::io::stdout().flush();
        eprintln!("{} sessions loaded from {}", store.ids().len(), config.data_dir.display());
        serve(listener, store.clone(), config.cors_origin.as_deref(), shutdown_signal())
            .await
            .map_err(CliError::runtime)
    })?;
    store.flush_all().map_err(|e| CliError::Runtime(format!("persisting sessions: {}", e.message)))?;
    eprintln!("stopped; {} sessions persisted", store.ids().len());
    Ok(())
}
