//! HTTP routes.

use std::path::PathBuf;
use std::sync::Arc;

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use dashmap::DashMap;
use serde::{Deserialize, Serialize};
use serde_json::json;
use tokio::sync::Mutex;

use necklace_core::oracle::{Budget, Oracle};
use necklace_core::{Descriptor, Error, GameSpec, Move};

use crate::session::{GameSession, Mover, SessionError};

/// Sessions plus one oracle per game, shared by every session playing it.
#[derive(Clone, Default)]
pub struct AppState {
    sessions: Arc<DashMap<String, Arc<Mutex<GameSession>>>>,
    oracles: Arc<DashMap<GameSpec, Arc<Oracle>>>,
    snapshots: Option<PathBuf>,
    budget: Budget,
}

impl AppState {
    pub fn new() -> Self {
        AppState::default()
    }

    pub fn with_budget(mut self, budget: Budget) -> Self {
        self.budget = budget;
        self
    }

    /// Writes every session to `dir/<id>.json` after each change, and loads
    /// the snapshots already there.
    pub fn with_snapshots(mut self, dir: PathBuf) -> std::io::Result<Self> {
        std::fs::create_dir_all(&dir)?;
        for entry in std::fs::read_dir(&dir)? {
            let path = entry?.path();
            if path.extension().is_some_and(|e| e == "json") {
                let text = std::fs::read_to_string(&path)?;
                match serde_json::from_str::<GameSession>(&text) {
                    Ok(s) => {
                        self.sessions.insert(s.id().to_string(), Arc::new(Mutex::new(s)));
                    }
                    Err(e) => tracing::warn!("skipping snapshot {}: {e}", path.display()),
                }
            }
        }
        self.snapshots = Some(dir);
        Ok(self)
    }

    pub fn session_count(&self) -> usize {
        self.sessions.len()
    }

    fn oracle(&self, spec: &GameSpec) -> Arc<Oracle> {
        self.oracles
            .entry(spec.clone())
            .or_insert_with(|| Arc::new(Oracle::with_budget(spec.clone(), self.budget)))
            .clone()
    }

    fn session(&self, id: &str) -> Result<Arc<Mutex<GameSession>>, ApiError> {
        self.sessions
            .get(id)
            .map(|s| s.clone())
            .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, "not_found", format!("no game {id:?}")))
    }

    fn persist(&self, session: &GameSession) -> Result<(), ApiError> {
        let Some(dir) = &self.snapshots else {
            return Ok(());
        };
        let text = serde_json::to_string_pretty(session).map_err(ApiError::internal)?;
        std::fs::write(dir.join(format!("{}.json", session.id())), text).map_err(ApiError::internal)
    }
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    code: &'static str,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        ApiError {
            status,
            code,
            message: message.into(),
        }
    }

    fn internal(e: impl std::fmt::Display) -> Self {
        ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string())
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Parameter(_) | Error::Position(_) | Error::IllegalMove(_) | Error::Domain(_) => {
                StatusCode::BAD_REQUEST
            }
            Error::Resource(_) => StatusCode::SERVICE_UNAVAILABLE,
            Error::Inconsistent(_) => StatusCode::INTERNAL_SERVER_ERROR,
        };
        ApiError::new(status, e.code(), e.to_string())
    }
}

impl From<SessionError> for ApiError {
    fn from(e: SessionError) -> Self {
        let message = e.to_string();
        match e {
            SessionError::Engine(e) => e.into(),
            SessionError::WrongTurn(_) => ApiError::new(StatusCode::CONFLICT, "wrong_turn", message),
            SessionError::GameOver => ApiError::new(StatusCode::CONFLICT, "game_over", message),
            SessionError::TerminalStart => {
                ApiError::new(StatusCode::BAD_REQUEST, "terminal_start", message)
            }
        }
    }
}

impl From<JsonRejection> for ApiError {
    fn from(e: JsonRejection) -> Self {
        ApiError::new(StatusCode::BAD_REQUEST, "bad_request", e.body_text())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = json!({"error": {"code": self.code, "message": self.message}});
        (self.status, Json(body)).into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

/// `POST /games` body: a descriptor with heights, plus who moves first.
#[derive(Debug, Deserialize)]
pub struct CreateGame {
    #[serde(flatten)]
    pub spec: Descriptor,
    #[serde(default = "human")]
    pub first: Mover,
}

fn human() -> Mover {
    Mover::Human
}

#[derive(Deserialize)]
struct AnalysisQuery {
    #[serde(default)]
    hint: bool,
}

#[derive(Serialize)]
struct EngineMoveResponse {
    game: GameSession,
    #[serde(flatten)]
    reply: crate::session::EngineReply,
}

async fn create_game(
    State(state): State<AppState>,
    body: Result<Json<CreateGame>, JsonRejection>,
) -> ApiResult<(StatusCode, Json<GameSession>)> {
    let Json(req) = body?;
    let (spec, pos) = req.spec.resolve()?;
    let pos = pos.ok_or_else(|| Error::Position("heights are required".into()))?;
    let id = uuid::Uuid::new_v4().simple().to_string();
    let session = GameSession::new(id.clone(), spec, pos, req.first)?;
    state.persist(&session)?;
    state.sessions.insert(id, Arc::new(Mutex::new(session.clone())));
    Ok((StatusCode::CREATED, Json(session)))
}

async fn get_game(State(state): State<AppState>, Path(id): Path<String>) -> ApiResult<Json<GameSession>> {
    let session = state.session(&id)?;
    let guard = session.lock().await;
    Ok(Json(guard.clone()))
}

/// Runs `f` on the locked session off the async threads.
async fn with_session<T, F>(state: &AppState, id: &str, f: F) -> ApiResult<T>
where
    T: Send + 'static,
    F: FnOnce(&AppState, &mut GameSession, &Oracle) -> ApiResult<T> + Send + 'static,
{
    let session = state.session(id)?;
    let mut guard = session.lock_owned().await;
    let oracle = state.oracle(guard.spec());
    let state = state.clone();
    tokio::task::spawn_blocking(move || f(&state, &mut guard, &oracle))
        .await
        .map_err(ApiError::internal)?
}

async fn human_move(
    State(state): State<AppState>,
    Path(id): Path<String>,
    body: Result<Json<Move>, JsonRejection>,
) -> ApiResult<Json<GameSession>> {
    let Json(mv) = body?;
    with_session(&state, &id, move |state, s, _| {
        s.apply_human_move(mv)?;
        state.persist(s)?;
        Ok(Json(s.clone()))
    })
    .await
}

async fn engine_move(
    State(state): State<AppState>,
    Path(id): Path<String>,
) -> ApiResult<Json<EngineMoveResponse>> {
    with_session(&state, &id, |state, s, oracle| {
        let reply = s.engine_reply(oracle)?;
        state.persist(s)?;
        Ok(Json(EngineMoveResponse {
            game: s.clone(),
            reply,
        }))
    })
    .await
}

async fn analysis(
    State(state): State<AppState>,
    Path(id): Path<String>,
    Query(q): Query<AnalysisQuery>,
) -> ApiResult<Json<crate::session::Analysis>> {
    with_session(&state, &id, move |_, s, oracle| Ok(Json(s.analysis(oracle, q.hint)?))).await
}

async fn hint(State(state): State<AppState>, Path(id): Path<String>) -> ApiResult<Json<crate::session::Hint>> {
    with_session(&state, &id, |_, s, oracle| Ok(Json(s.hint(oracle)?))).await
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/games", post(create_game))
        .route("/games/{id}", get(get_game))
        .route("/games/{id}/moves", post(human_move))
        .route("/games/{id}/engine-move", post(engine_move))
        .route("/games/{id}/analysis", get(analysis))
        .route("/games/{id}/hint", get(hint))
        .with_state(state)
}
