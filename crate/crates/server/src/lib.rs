//! Session-based HTTP play API: a human plays against the engine and can ask
//! for analysis and hints.

mod api;
pub mod session;

use std::net::SocketAddr;

pub use api::{router, ApiError, AppState, CreateGame};
pub use session::{GameSession, Mover, Status};

/// Serves the API until the process is stopped.
pub async fn serve(addr: SocketAddr, state: AppState) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    tracing::info!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(state)).await
}
