//! HTTP backend for playing games against the agents and collecting ratings.
//!
//! Cells are named algebraically (a1..h8); player One starts on rows 1-3.

mod error;
mod games;
mod ratings;
mod session;

use std::collections::HashMap;
use std::convert::Infallible;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};
use std::time::{SystemTime, UNIX_EPOCH};

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::sse::{Event, KeepAlive, Sse};
use axum::response::IntoResponse;
use axum::routing::{get, post};
use axum::{Json, Router};
use boardforge::agents::AgentKind;
use boardforge::analysis::Rating;
use boardforge::engine::{Cell, Move, Player, Status};
use boardforge::seed::derived_rng;
use futures::Stream;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use tokio::sync::broadcast;

pub use error::{ApiError, StartupError};
pub use games::GameEntry;
pub use session::{HistoryEntry, RulesSummary};

use ratings::{Insert, RatingStore};
use session::{summarize, Session};

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    /// Archive directory (containing `archive.tsv`) or the file itself.
    pub archive: Option<PathBuf>,
    pub ratings_path: PathBuf,
    pub seed: u64,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            archive: None,
            ratings_path: PathBuf::from("ratings.jsonl"),
            seed: 0,
        }
    }
}

struct AppState {
    games: Vec<GameEntry>,
    sessions: Mutex<HashMap<u64, Arc<Mutex<Session>>>>,
    next_id: AtomicU64,
    ratings: Mutex<RatingStore>,
    seed: u64,
}

type Shared = Arc<AppState>;

impl AppState {
    fn game(&self, id: &str) -> Option<&GameEntry> {
        self.games.iter().find(|g| g.id == id)
    }

    fn session(&self, id: u64) -> Result<Arc<Mutex<Session>>, ApiError> {
        lock(&self.sessions)
            .get(&id)
            .cloned()
            .ok_or(ApiError::UnknownSession(id))
    }
}

fn lock<T>(m: &Mutex<T>) -> std::sync::MutexGuard<'_, T> {
    m.lock().unwrap_or_else(|poisoned| poisoned.into_inner())
}

pub fn build_app(config: &ServiceConfig) -> Result<Router, StartupError> {
    let mut games = games::fixture_games();
    if let Some(path) = &config.archive {
        games.extend(games::archive_games(path)?);
    }
    let ratings = RatingStore::open(&config.ratings_path)?;
    log::info!(
        "{} games, {} stored ratings in {}",
        games.len(),
        ratings.len(),
        ratings.path().display()
    );
    let state = Arc::new(AppState {
        games,
        sessions: Mutex::new(HashMap::new()),
        next_id: AtomicU64::new(1),
        ratings: Mutex::new(ratings),
        seed: config.seed,
    });
    Ok(Router::new()
        .route("/games", get(list_games))
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(read_session))
        .route("/sessions/{id}/moves", get(legal_moves).post(play))
        .route("/sessions/{id}/events", get(events))
        .route("/ratings", post(rate))
        .with_state(state))
}

#[derive(Debug, thiserror::Error)]
pub enum ServeError {
    #[error(transparent)]
    Startup(#[from] StartupError),
    #[error("server: {0}")]
    Io(#[from] std::io::Error),
}

pub async fn serve(config: &ServiceConfig, addr: SocketAddr) -> Result<(), ServeError> {
    let app = build_app(config)?;
    let listener = tokio::net::TcpListener::bind(addr).await?;
    log::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, app).await?;
    Ok(())
}

fn parse_body<T: DeserializeOwned>(body: &Bytes) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError::BadRequest(e.to_string()))
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct GameView {
    id: String,
    display_name: String,
    source: &'static str,
    chromosome: String,
    rules: RulesSummary,
}

async fn list_games(State(app): State<Shared>) -> Json<Vec<GameView>> {
    let views = app
        .games
        .iter()
        .map(|g| GameView {
            id: g.id.clone(),
            display_name: g.display_name.clone(),
            source: g.source,
            chromosome: g.chromosome.to_string(),
            rules: summarize(&g.rules),
        })
        .collect();
    Json(views)
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct PieceView {
    cell: Cell,
    owner: Player,
    #[serde(rename = "type")]
    kind: u8,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SessionView {
    session_id: u64,
    game_id: String,
    human_side: Player,
    opponent: AgentKind,
    run_index: u8,
    board: Vec<PieceView>,
    side_to_move: Player,
    ply: u32,
    status: Status,
    human_to_move: bool,
    history: Vec<HistoryEntry>,
}

fn view(s: &Session) -> SessionView {
    let board = Cell::all()
        .filter_map(|c| {
            s.state.at(c).map(|p| PieceView {
                cell: c,
                owner: p.owner,
                kind: p.kind.id(),
            })
        })
        .collect();
    SessionView {
        session_id: s.id,
        game_id: s.game_id.clone(),
        human_side: s.human,
        opponent: s.opponent,
        run_index: s.run_index,
        board,
        side_to_move: s.state.side_to_move(),
        ply: s.state.ply(),
        status: s.status(),
        human_to_move: s.human_to_move(),
        history: s.history.clone(),
    }
}

fn publish(s: &Session) {
    if let Ok(text) = serde_json::to_string(&view(s)) {
        // No subscribers is fine.
        let _ = s.events.send(text);
    }
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct CreateSession {
    game_ref: String,
    human_side: Player,
    opponent: AgentKind,
    #[serde(default = "first_run")]
    run_index: u8,
}

fn first_run() -> u8 {
    1
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct Created {
    session_id: u64,
    state: SessionView,
    rules: RulesSummary,
}

async fn create_session(
    State(app): State<Shared>,
    body: Bytes,
) -> Result<impl IntoResponse, ApiError> {
    let req: CreateSession = parse_body(&body)?;
    if !(1..=3).contains(&req.run_index) {
        return Err(ApiError::BadRequest(format!(
            "runIndex {} outside 1..3",
            req.run_index
        )));
    }
    session::opponent_agent(req.opponent)?;
    let game = app
        .game(&req.game_ref)
        .ok_or_else(|| ApiError::UnknownGame(req.game_ref.clone()))?;
    let id = app.next_id.fetch_add(1, Ordering::Relaxed);
    let rng = derived_rng(app.seed, &format!("session/{id}"));
    let mut s = Session::new(
        id,
        game.id.clone(),
        game.rules.clone(),
        req.human_side,
        req.opponent,
        req.run_index,
        rng,
    );
    s.agent_reply()?;
    let body = Created {
        session_id: id,
        state: view(&s),
        rules: summarize(&s.rules),
    };
    lock(&app.sessions).insert(id, Arc::new(Mutex::new(s)));
    Ok((StatusCode::CREATED, Json(body)))
}

async fn read_session(
    State(app): State<Shared>,
    Path(id): Path<u64>,
) -> Result<Json<SessionView>, ApiError> {
    let s = app.session(id)?;
    let s = lock(&s);
    Ok(Json(view(&s)))
}

#[derive(Deserialize)]
struct MovesQuery {
    from: Option<String>,
}

fn parse_cell(name: &str) -> Result<Cell, ApiError> {
    name.parse().map_err(ApiError::BadRequest)
}

async fn legal_moves(
    State(app): State<Shared>,
    Path(id): Path<u64>,
    Query(q): Query<MovesQuery>,
) -> Result<Json<Vec<Move>>, ApiError> {
    let from = q.from.as_deref().map(parse_cell).transpose()?;
    let s = app.session(id)?;
    let s = lock(&s);
    Ok(Json(s.moves_from(from)))
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct PlayRequest {
    from: Cell,
    to: Cell,
    chain_path: Option<Vec<Cell>>,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct PlayResponse {
    human: Move,
    agent: Option<Move>,
    state: SessionView,
}

async fn play(
    State(app): State<Shared>,
    Path(id): Path<u64>,
    body: Bytes,
) -> Result<Json<PlayResponse>, ApiError> {
    let s = app.session(id)?;
    let req: PlayRequest = parse_body(&body)?;
    let mut s = lock(&s);
    let mv = s.resolve(req.from, req.to, req.chain_path.as_deref())?;
    s.play_human(mv.clone());
    publish(&s);
    let agent = s.agent_reply()?;
    if agent.is_some() {
        publish(&s);
    }
    debug_assert!(
        s.replay().is_ok_and(|r| r == s.state),
        "history replay diverged"
    );
    Ok(Json(PlayResponse {
        human: mv,
        agent,
        state: view(&s),
    }))
}

async fn events(
    State(app): State<Shared>,
    Path(id): Path<u64>,
) -> Result<Sse<impl Stream<Item = Result<Event, Infallible>>>, ApiError> {
    let s = app.session(id)?;
    let (first, rx) = {
        let s = lock(&s);
        (
            serde_json::to_string(&view(&s)).map_err(|e| ApiError::Internal(e.to_string()))?,
            s.events.subscribe(),
        )
    };
    let stream = futures::stream::unfold((Some(first), rx), |(pending, mut rx)| async move {
        if let Some(text) = pending {
            return Some((Ok(Event::default().event("state").data(text)), (None, rx)));
        }
        loop {
            match rx.recv().await {
                Ok(text) => {
                    return Some((Ok(Event::default().event("state").data(text)), (None, rx)))
                }
                Err(broadcast::error::RecvError::Lagged(_)) => continue,
                Err(broadcast::error::RecvError::Closed) => return None,
            }
        }
    });
    Ok(Sse::new(stream).keep_alive(KeepAlive::default()))
}

async fn rate(State(app): State<Shared>, body: Bytes) -> Result<impl IntoResponse, ApiError> {
    let mut rating: Rating = parse_body(&body)?;
    if rating.subject_id.trim().is_empty() {
        return Err(ApiError::BadRequest("subjectId is empty".into()));
    }
    if !(1..=3).contains(&rating.run_index) {
        return Err(ApiError::BadRequest(format!(
            "runIndex {} outside 1..3",
            rating.run_index
        )));
    }
    if app.game(&rating.game_id).is_none() {
        return Err(ApiError::UnknownGame(rating.game_id));
    }
    if rating.timestamp == 0 {
        rating.timestamp = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map_or(0, |d| d.as_secs());
    }
    let outcome = lock(&app.ratings)
        .insert(&rating)
        .map_err(|e| ApiError::Internal(e.to_string()))?;
    match outcome {
        Insert::Stored => Ok((StatusCode::CREATED, Json(rating))),
        Insert::Duplicate => Err(ApiError::Conflict(format!(
            "subject {} already rated {} run {}",
            rating.subject_id, rating.game_id, rating.run_index
        ))),
    }
}
