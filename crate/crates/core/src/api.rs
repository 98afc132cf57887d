//! Local JSON-over-HTTP service for game sessions and fractal data.
//!
//! Every error body is `{"code", "message", "http_status"}` with `code` drawn
//! from a closed set: `illegal_move`, `wrong_turn`, `not_found`,
//! `budget_exceeded`, `bad_request`, `terminal_game`.

use std::collections::HashMap;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{Path, Query, State};
use axum::http::{header, Method, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::ser::SerializeSeq;
use serde::{Deserialize, Serialize, Serializer};
use tokio::net::TcpListener;
use tower_http::cors::{Any, CorsLayer};
use tower_http::services::ServeDir;

use crate::engine::{GameSession, HistoryEntry, Hint, Player, SessionId, SessionIdSource, Status};
use crate::error::Error;
use crate::fractal::{generate_streamed, Budget, IterationSpec, PointSet};
use crate::geometry::shadow;
use crate::nim::{Classification, Move, Position};

pub const DEFAULT_PORT: u16 = 8715;
pub const DEFAULT_SESSION_TTL: Duration = Duration::from_secs(60 * 60);

#[derive(Debug, Clone)]
pub struct ServerConfig {
    pub port: u16,
    pub ui_dir: Option<PathBuf>,
    pub budget: Budget,
    pub session_ttl: Duration,
    /// Seed for session tokens; `None` draws from the OS.
    pub id_seed: Option<u64>,
}

impl Default for ServerConfig {
    fn default() -> Self {
        ServerConfig {
            port: DEFAULT_PORT,
            ui_dir: None,
            budget: Budget::default(),
            session_ttl: DEFAULT_SESSION_TTL,
            id_seed: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApiError {
    pub code: &'static str,
    pub message: String,
    pub http_status: u16,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub limit: Option<u32>,
}

impl ApiError {
    fn new(code: &'static str, status: StatusCode, message: impl Into<String>) -> Self {
        ApiError {
            code,
            message: message.into(),
            http_status: status.as_u16(),
            limit: None,
        }
    }

    pub fn bad_request(message: impl Into<String>) -> Self {
        ApiError::new("bad_request", StatusCode::BAD_REQUEST, message)
    }

    pub fn not_found(message: impl Into<String>) -> Self {
        ApiError::new("not_found", StatusCode::NOT_FOUND, message)
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        let status = match e.code() {
            "budget_exceeded" => StatusCode::PAYLOAD_TOO_LARGE,
            "illegal_move" => StatusCode::UNPROCESSABLE_ENTITY,
            "wrong_turn" | "terminal_game" => StatusCode::CONFLICT,
            "bad_request" => StatusCode::BAD_REQUEST,
            _ => StatusCode::INTERNAL_SERVER_ERROR,
        };
        let code = match e.code() {
            "io_error" => "bad_request",
            code => code,
        };
        let mut err = ApiError::new(code, status, e.to_string());
        if let Error::BudgetExceeded { limit, .. } = e {
            err.limit = Some(limit);
        }
        err
    }
}

impl From<JsonRejection> for ApiError {
    fn from(e: JsonRejection) -> Self {
        ApiError::bad_request(e.body_text())
    }
}

impl From<QueryRejection> for ApiError {
    fn from(e: QueryRejection) -> Self {
        ApiError::bad_request(e.body_text())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = StatusCode::from_u16(self.http_status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
        (status, Json(self)).into_response()
    }
}

type ApiResult<T> = Result<Json<T>, ApiError>;

struct Slot {
    session: GameSession,
    last_used: Instant,
}

/// Shared server state: sessions behind one map lock, each session behind its
/// own lock so moves on one session serialize without blocking others.
pub struct AppState {
    sessions: Mutex<HashMap<SessionId, Arc<Mutex<Slot>>>>,
    ids: Mutex<SessionIdSource>,
    budget: Budget,
    ttl: Duration,
}

impl AppState {
    pub fn new(config: &ServerConfig) -> Self {
        let ids = match config.id_seed {
            Some(seed) => SessionIdSource::seeded(seed),
            None => SessionIdSource::from_os_rng(),
        };
        AppState {
            sessions: Mutex::new(HashMap::new()),
            ids: Mutex::new(ids),
            budget: config.budget,
            ttl: config.session_ttl,
        }
    }

    fn expire_idle(&self) {
        let now = Instant::now();
        let ttl = self.ttl;
        self.sessions.lock().unwrap().retain(|_, slot| {
            // a slot locked by an in-flight request is in use
            slot.try_lock()
                .map(|s| now.duration_since(s.last_used) < ttl)
                .unwrap_or(true)
        });
    }

    fn slot(&self, id: &str) -> Result<Arc<Mutex<Slot>>, ApiError> {
        self.expire_idle();
        self.sessions
            .lock()
            .unwrap()
            .get(&SessionId::new(id))
            .cloned()
            .ok_or_else(|| ApiError::not_found(format!("no game with id {id:?}")))
    }

    pub fn session_count(&self) -> usize {
        self.sessions.lock().unwrap().len()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SessionView {
    pub id: SessionId,
    pub position: Position,
    pub to_move: Player,
    pub status: Status,
    pub classification: Classification,
    pub history: Vec<HistoryEntry>,
}

impl From<&GameSession> for SessionView {
    fn from(s: &GameSession) -> Self {
        SessionView {
            id: s.id().clone(),
            position: s.position().clone(),
            to_move: s.to_move(),
            status: s.status(),
            classification: s.classification(),
            history: s.history().to_vec(),
        }
    }
}

#[derive(Debug, Deserialize)]
struct NewGameRequest {
    piles: Vec<u64>,
    #[serde(default = "default_true")]
    human_first: bool,
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Deserialize)]
struct MoveRequest {
    pile_index: usize,
    new_size: u64,
    /// Number of history entries the client has seen; a stale value is
    /// rejected as `wrong_turn`.
    #[serde(default)]
    expected_ply: Option<usize>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct MoveResponse {
    #[serde(flatten)]
    pub session: SessionView,
    pub human_move: Move,
    pub engine_move: Option<Move>,
}

async fn create_game(
    State(state): State<Arc<AppState>>,
    body: Result<Json<NewGameRequest>, JsonRejection>,
) -> Result<(StatusCode, Json<SessionView>), ApiError> {
    let Json(req) = body?;
    let piles = Position::new(req.piles)?;
    let id = state.ids.lock().unwrap().next_id();
    let mut session = GameSession::new_game(id.clone(), piles, req.human_first)?;
    if !req.human_first {
        session.engine_move()?;
    }
    let view = SessionView::from(&session);
    state.expire_idle();
    state.sessions.lock().unwrap().insert(
        id,
        Arc::new(Mutex::new(Slot {
            session,
            last_used: Instant::now(),
        })),
    );
    Ok((StatusCode::CREATED, Json(view)))
}

async fn get_game(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<SessionView> {
    let slot = state.slot(&id)?;
    let mut slot = slot.lock().unwrap();
    slot.last_used = Instant::now();
    Ok(Json(SessionView::from(&slot.session)))
}

/// Applies the human move and, if the game continues, the engine reply. Both
/// are committed together or not at all.
async fn post_move(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Result<Json<MoveRequest>, JsonRejection>,
) -> ApiResult<MoveResponse> {
    let Json(req) = body?;
    let slot = state.slot(&id)?;
    let mut slot = slot.lock().unwrap();
    slot.last_used = Instant::now();
    if let Some(ply) = req.expected_ply {
        if ply != slot.session.history().len() && !slot.session.status().is_terminal() {
            return Err(Error::WrongTurn.into());
        }
    }
    let mut next = slot.session.clone();
    let human_move = Move::new(req.pile_index, req.new_size);
    next.apply_human_move(human_move)?;
    let engine_move = if next.status().is_terminal() {
        None
    } else {
        Some(next.engine_move()?)
    };
    slot.session = next;
    Ok(Json(MoveResponse {
        session: SessionView::from(&slot.session),
        human_move,
        engine_move,
    }))
}

async fn get_hint(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<Hint> {
    let slot = state.slot(&id)?;
    let mut slot = slot.lock().unwrap();
    slot.last_used = Instant::now();
    Ok(Json(slot.session.hint()?))
}

#[derive(Debug, Deserialize)]
struct FractalQuery {
    d: usize,
    n: u32,
}

struct PointsJson<'a>(&'a PointSet);

impl Serialize for PointsJson<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.0.len()))?;
        for p in self.0 {
            seq.serialize_element(p)?;
        }
        seq.end()
    }
}

#[derive(Serialize)]
struct FractalResponse<'a> {
    d: usize,
    n: u32,
    count: usize,
    points: PointsJson<'a>,
}

async fn get_fractal(
    State(state): State<Arc<AppState>>,
    query: Result<Query<FractalQuery>, QueryRejection>,
) -> Result<Response, ApiError> {
    let Query(q) = query?;
    let spec = IterationSpec::new(q.d, q.n)?;
    let budget = state.budget;
    let ps = tokio::task::spawn_blocking(move || generate_streamed(spec, budget))
        .await
        .map_err(|e| ApiError::bad_request(e.to_string()))??;
    let body = FractalResponse {
        d: spec.d(),
        n: spec.n(),
        count: ps.len(),
        points: PointsJson(&ps),
    };
    let bytes = serde_json::to_vec(&body).map_err(|e| ApiError::bad_request(e.to_string()))?;
    Ok(([(header::CONTENT_TYPE, "application/json")], bytes).into_response())
}

#[derive(Debug, Deserialize)]
struct ShadowQuery {
    d: usize,
    n: u32,
    axis: usize,
    #[serde(default)]
    include_counts: bool,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ShadowCell {
    pub cell: Vec<u64>,
    pub count: u64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ShadowResponse {
    pub d: usize,
    pub n: u32,
    pub axis: usize,
    pub all_ones: bool,
    pub cells: usize,
    pub total: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counts: Option<Vec<ShadowCell>>,
}

async fn get_shadow(
    State(state): State<Arc<AppState>>,
    query: Result<Query<ShadowQuery>, QueryRejection>,
) -> ApiResult<ShadowResponse> {
    let Query(q) = query?;
    let spec = IterationSpec::new(q.d, q.n)?;
    let budget = state.budget;
    let grid = tokio::task::spawn_blocking(move || shadow(spec, q.axis, budget))
        .await
        .map_err(|e| ApiError::bad_request(e.to_string()))??;
    Ok(Json(ShadowResponse {
        d: q.d,
        n: q.n,
        axis: q.axis,
        all_ones: grid.all_ones(),
        cells: grid.counts().len(),
        total: grid.total(),
        counts: q.include_counts.then(|| {
            grid.cells()
                .map(|(cell, count)| ShadowCell { cell, count })
                .collect()
        }),
    }))
}

async fn not_found() -> ApiError {
    ApiError::not_found("no such endpoint")
}

pub fn router(state: Arc<AppState>, ui_dir: Option<PathBuf>) -> Router {
    let cors = CorsLayer::new()
        .allow_origin(Any)
        .allow_methods([Method::GET, Method::POST])
        .allow_headers([header::CONTENT_TYPE]);
    let api = Router::new()
        .route("/games", post(create_game))
        .route("/games/{id}", get(get_game))
        .route("/games/{id}/moves", post(post_move))
        .route("/games/{id}/hint", get(get_hint))
        .route("/fractal", get(get_fractal))
        .route("/fractal/shadow", get(get_shadow));
    let api = match ui_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api.fallback(not_found),
    };
    api.layer(cors).with_state(state)
}

/// Serves on an already-bound listener until `shutdown` resolves.
pub async fn serve_with_shutdown<F>(listener: TcpListener, config: ServerConfig, shutdown: F) -> std::io::Result<()>
where
    F: std::future::Future<Output = ()> + Send + 'static,
{
    let state = Arc::new(AppState::new(&config));
    axum::serve(listener, router(state, config.ui_dir))
        .with_graceful_shutdown(shutdown)
        .await
}

/// Binds `127.0.0.1:port` and serves until interrupted.
pub async fn serve(config: ServerConfig) -> std::io::Result<()> {
    let addr = SocketAddr::from(([127, 0, 0, 1], config.port));
    let listener = TcpListener::bind(addr).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    serve_with_shutdown(listener, config, async {
        let _ = tokio::signal::ctrl_c().await;
    })
    .await
}

#[cfg(test)]
mod tests {
    use super::*;
    use axum::body::Body;
    use axum::http::Request;
    use http_body_util::BodyExt;
    use tower::ServiceExt;

    fn app() -> Router {
        let config = ServerConfig {
            id_seed: Some(42),
            ..ServerConfig::default()
        };
        router(Arc::new(AppState::new(&config)), None)
    }

    async fn call(app: &Router, method: &str, uri: &str, body: Option<&str>) -> (StatusCode, serde_json::Value) {
        let req = Request::builder()
            .method(method)
            .uri(uri)
            .header(header::CONTENT_TYPE, "application/json")
            .body(body.map(|b| Body::from(b.to_owned())).unwrap_or_else(Body::empty))
            .unwrap();
        let resp = app.clone().oneshot(req).await.unwrap();
        let status = resp.status();
        let bytes = resp.into_body().collect().await.unwrap().to_bytes();
        (status, serde_json::from_slice(&bytes).unwrap())
    }

    #[tokio::test]
    async fn create_game_reports_classification() {
        let app = app();
        let (status, body) = call(&app, "POST", "/games", Some(r#"{"piles":[4,6,9],"human_first":true}"#)).await;
        assert_eq!(status, StatusCode::CREATED);
        assert_eq!(body["classification"], "N");
        assert_eq!(body["status"], "in_progress");
        assert_eq!(body["to_move"], "human");

        let (_, body) = call(&app, "POST", "/games", Some(r#"{"piles":[1,2,3],"human_first":true}"#)).await;
        assert_eq!(body["classification"], "P");

        for bad in [r#"{"piles":[0,0]}"#, r#"{"piles":[]}"#, r#"{"piles":[-1]}"#, "not json"] {
            let (status, body) = call(&app, "POST", "/games", Some(bad)).await;
            assert_eq!(status, StatusCode::BAD_REQUEST, "{bad}");
            assert_eq!(body["code"], "bad_request");
            assert_eq!(body["http_status"], 400);
        }
    }

    #[tokio::test]
    async fn move_gets_engine_reply() {
        let app = app();
        let (_, game) = call(&app, "POST", "/games", Some(r#"{"piles":[4,6,9]}"#)).await;
        let id = game["id"].as_str().unwrap();
        let (status, body) = call(
            &app,
            "POST",
            &format!("/games/{id}/moves"),
            Some(r#"{"pile_index":0,"new_size":0}"#),
        )
        .await;
        assert_eq!(status, StatusCode::OK);
        assert_eq!(body["engine_move"], serde_json::json!({"pile_index":2,"new_size":6}));
        assert_eq!(body["position"], serde_json::json!([0, 6, 6]));
        assert_eq!(body["classification"], "P");
        assert_eq!(body["history"].as_array().unwrap().len(), 2);

        let (status, body) = call(
            &app,
            "POST",
            &format!("/games/{id}/moves"),
            Some(r#"{"pile_index":1,"new_size":6}"#),
        )
        .await;
        assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
        assert_eq!(body["code"], "illegal_move");

        let (status, body) = call(
            &app,
            "POST",
            &format!("/games/{id}/moves"),
            Some(r#"{"pile_index":1,"new_size":0,"expected_ply":0}"#),
        )
        .await;
        assert_eq!(status, StatusCode::CONFLICT);
        assert_eq!(body["code"], "wrong_turn");
    }

    #[tokio::test]
    async fn last_stone_ends_game_without_reply() {
        let app = app();
        let (_, game) = call(&app, "POST", "/games", Some(r#"{"piles":[3]}"#)).await;
        let id = game["id"].as_str().unwrap();
        let (_, body) = call(&app, "POST", &format!("/games/{id}/moves"), Some(r#"{"pile_index":0,"new_size":0}"#)).await;
        assert_eq!(body["status"], "human_won");
        assert!(body["engine_move"].is_null());
        let (status, body) = call(&app, "POST", &format!("/games/{id}/moves"), Some(r#"{"pile_index":0,"new_size":0}"#)).await;
        assert_eq!(status, StatusCode::CONFLICT);
        assert_eq!(body["code"], "terminal_game");
        let (_, body) = call(&app, "GET", &format!("/games/{id}/hint"), None).await;
        assert_eq!(body["code"], "terminal_game");
    }

    #[tokio::test]
    async fn engine_first_game_starts_with_reply() {
        let app = app();
        let (_, body) = call(&app, "POST", "/games", Some(r#"{"piles":[4,6,9],"human_first":false}"#)).await;
        assert_eq!(body["position"], serde_json::json!([4, 6, 2]));
        assert_eq!(body["to_move"], "human");
    }

    #[tokio::test]
    async fn hint_and_unknown_ids() {
        let app = app();
        let (_, game) = call(&app, "POST", "/games", Some(r#"{"piles":[1,1,1]}"#)).await;
        let id = game["id"].as_str().unwrap();
        let (_, hint) = call(&app, "GET", &format!("/games/{id}/hint"), None).await;
        assert_eq!(hint["classification"], "N");
        assert_eq!(hint["winning_moves"].as_array().unwrap().len(), 3);

        let (status, body) = call(&app, "GET", "/games/nope/hint", None).await;
        assert_eq!(status, StatusCode::NOT_FOUND);
        assert_eq!(body["code"], "not_found");
        let (_, body) = call(&app, "GET", "/nothing/here", None).await;
        assert_eq!(body["code"], "not_found");
    }

    #[tokio::test]
    async fn fractal_endpoints() {
        let app = app();
        let (_, body) = call(&app, "GET", "/fractal?d=3&n=1", None).await;
        assert_eq!(body["count"], 4);
        assert_eq!(body["points"], serde_json::json!([[0, 0, 0], [0, 1, 1], [1, 0, 1], [1, 1, 0]]));

        let (_, body) = call(&app, "GET", "/fractal?d=3&n=6", None).await;
        assert_eq!(body["count"], 4096);

        let (status, body) = call(&app, "GET", "/fractal?d=3&n=13", None).await;
        assert_eq!(status, StatusCode::PAYLOAD_TOO_LARGE);
        assert_eq!(body["code"], "budget_exceeded");
        assert_eq!(body["limit"], 24);

        let (status, body) = call(&app, "GET", "/fractal?d=3&n=0", None).await;
        assert_eq!(status, StatusCode::BAD_REQUEST);
        assert_eq!(body["code"], "bad_request");
        let (_, body) = call(&app, "GET", "/fractal?d=x", None).await;
        assert_eq!(body["code"], "bad_request");

        let (_, body) = call(&app, "GET", "/fractal/shadow?d=3&n=3&axis=2", None).await;
        assert_eq!(body["all_ones"], true);
        assert!(body.get("counts").is_none());
        let (_, body) = call(&app, "GET", "/fractal/shadow?d=2&n=1&axis=0&include_counts=true", None).await;
        assert_eq!(body["counts"], serde_json::json!([{"cell":[0],"count":1},{"cell":[1],"count":1}]));
        let (_, body) = call(&app, "GET", "/fractal/shadow?d=2&n=1&axis=2", None).await;
        assert_eq!(body["code"], "bad_request");
    }

    #[tokio::test]
    async fn idle_sessions_expire() {
        let config = ServerConfig {
            id_seed: Some(1),
            session_ttl: Duration::from_millis(0),
            ..ServerConfig::default()
        };
        let state = Arc::new(AppState::new(&config));
        let app = router(state.clone(), None);
        let (_, game) = call(&app, "POST", "/games", Some(r#"{"piles":[2]}"#)).await;
        let id = game["id"].as_str().unwrap();
        let (status, _) = call(&app, "GET", &format!("/games/{id}"), None).await;
        assert_eq!(status, StatusCode::NOT_FOUND);
        assert_eq!(state.session_count(), 0);
    }
}
