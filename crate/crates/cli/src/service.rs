//! HTTP session service. Requests for distinct sessions run concurrently;
//! each session sits behind its own lock, so requests for one session are
//! serialized.

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::{Arc, Mutex};

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use fracgame::domination::neighborhood_hypergraph;
use fracgame::format::parse_preload;
use fracgame::{
    format_rational, parse_rational, DominationVariant, GameSpec, Graph, Hypergraph, Move, Player, Submove,
    Variant,
};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::session::{MoveView, Session, SessionError, SessionView};

type Shared = Arc<Mutex<Session>>;

#[derive(Clone, Default)]
pub struct AppState {
    sessions: Arc<Mutex<HashMap<String, Shared>>>,
    replay_dir: Option<PathBuf>,
}

impl AppState {
    pub fn new(replay_dir: Option<PathBuf>) -> Self {
        AppState { sessions: Arc::default(), replay_dir }
    }

    fn get(&self, id: &str) -> Result<Shared, ApiError> {
        self.sessions
            .lock()
            .expect("session table lock")
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::UnknownSession(id.to_string()))
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/session", post(create))
        .route("/session/{id}", get(show))
        .route("/session/{id}/submove", post(submove))
        .route("/session/{id}/hint", post(hint))
        .with_state(state)
}

#[derive(Debug)]
pub enum ApiError {
    Session(SessionError),
    UnknownSession(String),
    BadRequest(String),
}

impl From<SessionError> for ApiError {
    fn from(e: SessionError) -> Self {
        ApiError::Session(e)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let (status, body) = match self {
            ApiError::UnknownSession(id) => {
                (StatusCode::NOT_FOUND, json!({"error": "UnknownSession", "message": format!("no session `{id}`")}))
            }
            ApiError::BadRequest(message) => {
                (StatusCode::BAD_REQUEST, json!({"error": "InvalidRequest", "message": message}))
            }
            ApiError::Session(e) => {
                let message = e.to_string();
                match e {
                    SessionError::IllegalSubmove(r) => (
                        StatusCode::BAD_REQUEST,
                        json!({
                            "error": "IllegalSubmove",
                            "violation": r.violation,
                            "message": message,
                            "max_permitted": r.max_permitted.as_ref().map(format_rational),
                            "suggestions": r.suggestions.iter().map(format_rational).collect::<Vec<_>>(),
                        }),
                    ),
                    SessionError::NotHumanTurn => {
                        (StatusCode::CONFLICT, json!({"error": "NotHumanTurn", "message": message}))
                    }
                    SessionError::GameOver => (StatusCode::CONFLICT, json!({"error": "GameOver", "message": message})),
                    SessionError::InvalidRequest(_) | SessionError::Game(_) => {
                        (StatusCode::BAD_REQUEST, json!({"error": "InvalidRequest", "message": message}))
                    }
                    SessionError::Replay(_) => {
                        (StatusCode::INTERNAL_SERVER_ERROR, json!({"error": "Internal", "message": message}))
                    }
                }
            }
        };
        (status, Json(body)).into_response()
    }
}

fn parse_body<T: DeserializeOwned>(body: &Bytes) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError::BadRequest(e.to_string()))
}

/// Runs blocking engine work off the async workers.
async fn blocking<T: Send + 'static>(f: impl FnOnce() -> Result<T, ApiError> + Send + 'static) -> Result<T, ApiError> {
    tokio::task::spawn_blocking(f).await.map_err(|e| ApiError::BadRequest(format!("request aborted: {e}")))?
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CreateRequest {
    pub n: usize,
    /// Hyperedges, or graph edges for the domination variants.
    pub edges: Vec<Vec<usize>>,
    #[serde(default)]
    pub variant: Variant,
    pub grid: u32,
    pub starter: Player,
    pub human_role: Player,
    #[serde(default)]
    pub preload: Option<Vec<String>>,
    #[serde(default)]
    pub greedy_order: Option<Vec<usize>>,
    /// Moves replayed before the engine takes over, alternating from the
    /// starter.
    #[serde(default)]
    pub opening: Vec<Vec<SubmoveRequest>>,
}

impl CreateRequest {
    pub fn spec(&self) -> Result<GameSpec, ApiError> {
        let bad = |e: &dyn std::fmt::Display| ApiError::BadRequest(e.to_string());
        let h = match self.variant {
            Variant::Transversal => Hypergraph::new(self.n, self.edges.clone()).map_err(|e| bad(&e))?,
            Variant::Domination | Variant::TotalDomination => {
                let pairs = self
                    .edges
                    .iter()
                    .map(|e| match e[..] {
                        [u, v] => Ok((u, v)),
                        _ => Err(ApiError::BadRequest("graph edges must have two endpoints".into())),
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                let g = Graph::new(self.n, pairs).map_err(|e| bad(&e))?;
                let which = if self.variant == Variant::Domination {
                    DominationVariant::Domination
                } else {
                    DominationVariant::TotalDomination
                };
                neighborhood_hypergraph(&g, which).map_err(|e| bad(&e))?
            }
        };
        let mut spec = GameSpec::new(h, self.starter, self.grid).with_variant(self.variant);
        if let Some(pre) = &self.preload {
            let loads = parse_preload(&pre.join(" "), &spec.h).map_err(|e| bad(&e))?;
            spec = spec.with_preload(loads);
        }
        if let Some(order) = &self.greedy_order {
            spec = spec.with_greedy_order(order.clone());
        }
        Ok(spec)
    }

    pub fn opening(&self) -> Result<Vec<Move>, ApiError> {
        self.opening
            .iter()
            .map(|mv| mv.iter().map(SubmoveRequest::submove).collect::<Result<Vec<_>, _>>().map(Move::new))
            .collect()
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubmoveRequest {
    pub vertex: usize,
    pub weight: String,
}

impl SubmoveRequest {
    pub fn submove(&self) -> Result<Submove, ApiError> {
        let weight = parse_rational(&self.weight)
            .ok_or_else(|| ApiError::BadRequest(format!("`{}` is not a rational `p/q`", self.weight)))?;
        Ok(Submove::new(self.vertex, weight))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SubmoveResponse {
    pub accepted: bool,
    pub slot: usize,
    pub human_move_complete: bool,
    pub engine_reply: Option<MoveView>,
    pub predicted_value: String,
    pub state: SessionView,
}

#[derive(Debug, Clone, Serialize)]
pub struct HintResponse {
    pub vertex: usize,
    pub weight: String,
    pub slot: usize,
    pub forced: bool,
}

async fn create(State(app): State<AppState>, body: Bytes) -> Result<Response, ApiError> {
    let request: CreateRequest = parse_body(&body)?;
    let spec = request.spec()?;
    let human = request.human_role;
    let opening = request.opening()?;
    let id = uuid::Uuid::new_v4().to_string();
    let replay = app.replay_dir.as_ref().map(|dir| dir.join(format!("{id}.moves")));
    let (session, view) = blocking(move || {
        let mut session = Session::new(id, spec, human, &opening, replay)?;
        let view = session.view()?;
        Ok((session, view))
    })
    .await?;
    app.sessions
        .lock()
        .expect("session table lock")
        .insert(view.id.clone(), Arc::new(Mutex::new(session)));
    Ok((StatusCode::CREATED, Json(view)).into_response())
}

async fn show(State(app): State<AppState>, Path(id): Path<String>) -> Result<Json<SessionView>, ApiError> {
    let session = app.get(&id)?;
    blocking(move || Ok(session.lock().expect("session lock").view()?)).await.map(Json)
}

async fn submove(
    State(app): State<AppState>,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<Json<SubmoveResponse>, ApiError> {
    let session = app.get(&id)?;
    let submove = parse_body::<SubmoveRequest>(&body)?.submove()?;
    blocking(move || {
        let mut s = session.lock().expect("session lock");
        if !s.is_over() && !s.human_turn() {
            return Err(SessionError::NotHumanTurn.into());
        }
        let out = s.submit(submove.vertex, &submove.weight)?;
        let state = s.view()?;
        let engine = Some(s.human().other());
        Ok(SubmoveResponse {
            accepted: true,
            slot: out.slot,
            human_move_complete: out.move_complete,
            engine_reply: out.engine_reply.as_ref().map(|m| MoveView::of(engine, m)),
            predicted_value: state.predicted_value.clone(),
            state,
        })
    })
    .await
    .map(Json)
}

async fn hint(State(app): State<AppState>, Path(id): Path<String>) -> Result<Json<HintResponse>, ApiError> {
    let session = app.get(&id)?;
    blocking(move || {
        let h = session.lock().expect("session lock").hint()?;
        Ok(HintResponse { vertex: h.vertex, weight: format_rational(&h.weight), slot: h.slot, forced: h.forced })
    })
    .await
    .map(Json)
}

/// Serves the session protocol on `127.0.0.1:port` until the process ends.
pub async fn serve(port: u16, replay_dir: Option<PathBuf>) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(("127.0.0.1", port)).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(AppState::new(replay_dir))).await
}
