//! JSON HTTP facade over `tss-core` for interactive exploration.
//!
//! Routes:
//!
//! | method | path                   | purpose                                         |
//! |--------|------------------------|-------------------------------------------------|
//! | GET    | `/api/datasets`        | datasets in the data directory with descriptors |
//! | POST   | `/api/simplify`        | one instance simplified at one `alpha_c`        |
//! | POST   | `/api/resolve-loyalty` | smallest `alpha_c` meeting a loyalty target     |
//! | GET    | `/api/curve`           | full loyalty/complexity curve                   |
//! | GET    | `/api/jobs/{id}`       | status of a sweep that outlived the wait        |
//! | GET    | `/api/prototypes`      | per-class k-medoid prototypes, simplified       |

mod error;
mod routes;
mod state;

use std::net::SocketAddr;
use std::sync::Arc;

use axum::routing::{get, post};
use axum::Router;
use tower_http::cors::{Any, CorsLayer};
use tower_http::services::ServeDir;

pub use error::ApiError;
pub use state::{AppState, ServerConfig};

pub const DEFAULT_PORT: u16 = 8787;

pub fn router(state: Arc<AppState>) -> Router {
    let ui_dir = state.config.ui_dir.clone();
    let api = Router::new()
        .route("/api/datasets", get(routes::list_datasets))
        .route("/api/simplify", post(routes::simplify))
        .route("/api/resolve-loyalty", post(routes::resolve_loyalty))
        .route("/api/curve", get(routes::curve))
        .route("/api/jobs/{id}", get(routes::job_status))
        .route("/api/prototypes", get(routes::prototypes))
        .with_state(state);
    let app = match ui_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    };
    app.layer(
        CorsLayer::new()
            .allow_origin(Any)
            .allow_methods(Any)
            .allow_headers(Any),
    )
}

/// Serves until the process is stopped.
pub async fn serve(config: ServerConfig, addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(AppState::new(config))).await
}
