//! HTTP API over the standardization workflow.
//!
//! Sessions live in memory, keyed by a random id, and are dropped after a
//! period without requests. Each run happens on a blocking thread; its
//! transcript is mirrored into the session as it grows so readers never wait
//! for a run to finish.

use std::collections::HashMap;
use std::convert::Infallible;
use std::future::Future;
use std::path::PathBuf;
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use axum::extract::{DefaultBodyLimit, Multipart, Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::sse::{Event, KeepAlive, Sse};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use colstd_core::orchestrate::{run_in_place, Override, SessionError, SessionSettings, SessionState, Status, TranscriptEvent, Workflow, WorkflowEvent};
use colstd_core::{load_csv, save_csv, Cell, IngestOptions};
use futures::stream::{self, Stream};
use indexmap::IndexMap;
use serde::Deserialize;
use serde_json::{json, Value};
use tokio::sync::broadcast;
use tower_http::services::ServeDir;
use uuid::Uuid;

/// Everything a server needs besides its socket.
#[derive(Clone)]
pub struct ServerConfig {
    pub workflow: Workflow,
    pub settings: SessionSettings,
    pub ingest: IngestOptions,
    pub session_ttl: Duration,
    pub static_dir: Option<PathBuf>,
}

struct Live {
    state: SessionState,
    /// Mirrors `state.transcript()`, plus events of the run in progress.
    transcript: Vec<TranscriptEvent>,
    status: Status,
    running: bool,
    touched: Instant,
}

struct Session {
    id: String,
    live: Mutex<Live>,
    wake: broadcast::Sender<()>,
}

impl Session {
    fn lock(&self) -> std::sync::MutexGuard<'_, Live> {
        // a panicking run must not take the session down with it
        self.live.lock().unwrap_or_else(|e| e.into_inner())
    }

    fn notify(&self) {
        let _ = self.wake.send(());
    }
}

struct Inner {
    config: ServerConfig,
    sessions: Mutex<HashMap<String, Arc<Session>>>,
}

#[derive(Clone)]
pub struct AppState(Arc<Inner>);

impl AppState {
    pub fn new(config: ServerConfig) -> Self {
        Self(Arc::new(Inner { config, sessions: Mutex::new(HashMap::new()) }))
    }

    fn sessions(&self) -> std::sync::MutexGuard<'_, HashMap<String, Arc<Session>>> {
        self.0.sessions.lock().unwrap_or_else(|e| e.into_inner())
    }

    fn find(&self, id: &str) -> Result<Arc<Session>, ApiError> {
        let session = self.sessions().get(id).cloned().ok_or(ApiError::NotFound)?;
        session.lock().touched = Instant::now();
        Ok(session)
    }

    /// Drops idle sessions. Running ones are kept whatever their age.
    pub fn evict_expired(&self) -> usize {
        let ttl = self.0.config.session_ttl;
        let mut sessions = self.sessions();
        let before = sessions.len();
        sessions.retain(|_, s| {
            let live = s.lock();
            live.running || live.touched.elapsed() < ttl
        });
        before - sessions.len()
    }

    pub fn session_count(&self) -> usize {
        self.sessions().len()
    }
}

#[derive(Debug)]
enum ApiError {
    NotFound,
    BadRequest(String),
    Conflict(String),
}

impl From<SessionError> for ApiError {
    fn from(e: SessionError) -> Self {
        match e {
            SessionError::SessionActive => ApiError::Conflict(e.to_string()),
            _ => ApiError::BadRequest(e.to_string()),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let (code, message) = match self {
            ApiError::NotFound => (StatusCode::NOT_FOUND, "no such session".to_owned()),
            ApiError::BadRequest(m) => (StatusCode::BAD_REQUEST, m),
            ApiError::Conflict(m) => (StatusCode::CONFLICT, m),
        };
        (code, Json(json!({ "error": message }))).into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

pub fn router(state: AppState) -> Router {
    let api = Router::new()
        .route("/api/health", get(health))
        .route("/api/sessions", post(create_session))
        .route("/api/sessions/{id}", get(session_info))
        .route("/api/sessions/{id}/start", post(start))
        .route("/api/sessions/{id}/events", get(events))
        .route("/api/sessions/{id}/annotations", get(annotations).post(set_annotations))
        .route("/api/sessions/{id}/result", get(result))
        .route("/api/sessions/{id}/requirements", post(add_requirement))
        .layer(DefaultBodyLimit::max(64 * 1024 * 1024));
    let app = match &state.0.config.static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    };
    app.with_state(state)
}

/// Serves until `shutdown` resolves, then lets open requests finish.
pub async fn serve(
    listener: tokio::net::TcpListener,
    config: ServerConfig,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    let state = AppState::new(config);
    let sweeper = {
        let state = state.clone();
        let period = (state.0.config.session_ttl / 4).clamp(Duration::from_millis(100), Duration::from_secs(60));
        tokio::spawn(async move {
            let mut tick = tokio::time::interval(period);
            loop {
                tick.tick().await;
                state.evict_expired();
            }
        })
    };
    let outcome = axum::serve(listener, router(state)).with_graceful_shutdown(shutdown).await;
    sweeper.abort();
    outcome
}

async fn health() -> Json<Value> {
    Json(json!({ "status": "ok" }))
}

fn summary(session: &Session, live: &Live) -> Value {
    let table = live.state.table();
    json!({
        "id": session.id,
        "rows": table.row_count(),
        "cols": table.column_count(),
        "columns": table.columns(),
        "status": live.status,
        "attempts": live.state.attempts(),
        "requirements": live.state.requirements(),
        "error": live.state.last_error().map(|e| e.to_string()),
    })
}

async fn create_session(State(app): State<AppState>, mut form: Multipart) -> ApiResult<Response> {
    let mut upload = None;
    while let Some(field) = form.next_field().await.map_err(|e| ApiError::BadRequest(e.to_string()))? {
        if field.name() == Some("file") || upload.is_none() {
            let name = field.file_name().map(str::to_owned);
            let bytes = field.bytes().await.map_err(|e| ApiError::BadRequest(e.to_string()))?;
            upload = Some((name, bytes));
        }
    }
    let (name, bytes) = upload.ok_or_else(|| ApiError::BadRequest("expected a multipart field named file".into()))?;
    let config = &app.0.config;
    let table = load_csv(&bytes[..], &config.ingest).map_err(|e| ApiError::BadRequest(e.to_string()))?;
    let mut settings = config.settings.clone();
    if let Some(name) = name.filter(|n| !n.is_empty()) {
        settings.source_name = name;
    }
    let state = SessionState::new(table, settings);
    let id = Uuid::new_v4().to_string();
    let session = Arc::new(Session {
        id: id.clone(),
        live: Mutex::new(Live {
            transcript: state.transcript().to_vec(),
            status: state.status(),
            state,
            running: false,
            touched: Instant::now(),
        }),
        wake: broadcast::channel(64).0,
    });
    let body = summary(&session, &session.lock());
    app.sessions().insert(id, session);
    Ok((StatusCode::CREATED, Json(body)).into_response())
}

async fn session_info(State(app): State<AppState>, Path(id): Path<String>) -> ApiResult<Json<Value>> {
    let session = app.find(&id)?;
    let body = summary(&session, &session.lock());
    Ok(Json(body))
}

/// Takes a copy of the pending state and runs it on a blocking thread.
fn launch(app: &AppState, session: &Arc<Session>, live: &mut Live) {
    live.running = true;
    live.status = Status::Pending;
    live.transcript = live.state.transcript().to_vec();
    let mut state = live.state.clone();
    let sink = session.clone();
    let workflow = app.0.config.workflow.clone().with_observer(Arc::new(move |event| {
        {
            let mut live = sink.lock();
            match event {
                WorkflowEvent::Message(e) => live.transcript.push(e.clone()),
                WorkflowEvent::Status(s) => live.status = s,
            }
        }
        sink.notify();
    }));
    let session = session.clone();
    tokio::task::spawn_blocking(move || {
        let outcome = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| run_in_place(&mut state, &workflow)));
        let mut live = session.lock();
        if outcome.is_ok() {
            live.transcript = state.transcript().to_vec();
            live.status = state.status();
            live.state = state;
        } else {
            live.status = Status::Failed;
        }
        live.running = false;
        live.touched = Instant::now();
        drop(live);
        session.notify();
    });
}

#[derive(Debug, Default, Deserialize)]
struct StartBody {
    #[serde(default)]
    requirements: Option<String>,
}

async fn start(State(app): State<AppState>, Path(id): Path<String>, body: Option<Json<StartBody>>) -> ApiResult<Response> {
    let session = app.find(&id)?;
    let mut live = session.lock();
    if live.running {
        return Err(ApiError::Conflict("a run is already in progress".into()));
    }
    let text = body.and_then(|Json(b)| b.requirements).filter(|t| !t.trim().is_empty());
    match text {
        Some(t) => live.state.add_requirement(&t)?,
        None if live.state.status() != Status::Pending => live.state.restart()?,
        None => {}
    }
    launch(&app, &session, &mut live);
    let body = summary(&session, &live);
    Ok((StatusCode::ACCEPTED, Json(body)).into_response())
}

#[derive(Debug, Deserialize)]
struct RequirementBody {
    text: String,
}

async fn add_requirement(
    State(app): State<AppState>,
    Path(id): Path<String>,
    Json(body): Json<RequirementBody>,
) -> ApiResult<Response> {
    let session = app.find(&id)?;
    let mut live = session.lock();
    if live.running {
        return Err(ApiError::Conflict("a run is already in progress".into()));
    }
    live.state.add_requirement(&body.text)?;
    launch(&app, &session, &mut live);
    let body = summary(&session, &live);
    Ok((StatusCode::ACCEPTED, Json(body)).into_response())
}

fn annotation_body(live: &Live) -> Value {
    let state = &live.state;
    let types: IndexMap<&str, &str> = match state.annotations() {
        Some(a) => a.assignments.iter().map(|(c, t)| (c.as_str(), t.label())).collect(),
        None => state.overrides().iter().map(|(c, o)| (c.as_str(), o.kind.label())).collect(),
    };
    let overrides: IndexMap<&str, String> = state.overrides().iter().map(|(c, o)| (c.as_str(), o.to_string())).collect();
    json!({ "annotations": types, "overrides": overrides })
}

async fn annotations(State(app): State<AppState>, Path(id): Path<String>) -> ApiResult<Json<Value>> {
    let session = app.find(&id)?;
    let body = annotation_body(&session.lock());
    Ok(Json(body))
}

/// Body: `{"column": "type"}` or `{"column": "type:format"}`.
async fn set_annotations(
    State(app): State<AppState>,
    Path(id): Path<String>,
    Json(body): Json<IndexMap<String, String>>,
) -> ApiResult<Json<Value>> {
    let session = app.find(&id)?;
    let mut live = session.lock();
    if live.running {
        return Err(ApiError::Conflict("a run is already in progress".into()));
    }
    let parsed = body
        .iter()
        .map(|(c, v)| v.parse::<Override>().map(|o| (c, o)).map_err(|e| ApiError::BadRequest(format!("{c}: {e}"))))
        .collect::<Result<Vec<_>, _>>()?;
    // validate all columns first so a bad request changes nothing
    if let Some((c, _)) = parsed.iter().find(|(c, _)| live.state.table().column_index(c).is_none()) {
        return Err(ApiError::BadRequest(format!("unknown column {c:?}")));
    }
    for (c, o) in parsed {
        live.state.set_override(c, o)?;
    }
    live.status = live.state.status();
    Ok(Json(annotation_body(&live)))
}

#[derive(Debug, Deserialize)]
struct ResultQuery {
    #[serde(default)]
    format: Option<String>,
}

async fn result(
    State(app): State<AppState>,
    Path(id): Path<String>,
    Query(q): Query<ResultQuery>,
) -> ApiResult<Response> {
    let session = app.find(&id)?;
    let live = session.lock();
    let table = match (live.running, live.state.result()) {
        (false, Some(t)) => t,
        _ => return Err(ApiError::Conflict(format!("no result yet; status is {:?}", live.status).to_lowercase())),
    };
    match q.format.as_deref().unwrap_or("csv") {
        "csv" => {
            let mut out = Vec::new();
            save_csv(table, &mut out, &app.0.config.ingest).map_err(|e| ApiError::BadRequest(e.to_string()))?;
            Ok(([(header::CONTENT_TYPE, "text/csv; charset=utf-8")], out).into_response())
        }
        "json" => {
            let rows: Vec<Vec<Option<&str>>> =
                table.rows().iter().map(|r| r.iter().map(Cell::as_text).collect()).collect();
            Ok(Json(json!({ "columns": table.columns(), "rows": rows })).into_response())
        }
        other => Err(ApiError::BadRequest(format!("unknown format {other:?}; use csv or json"))),
    }
}

#[derive(Debug, Deserialize)]
struct EventsQuery {
    /// Only events with a larger sequence number are sent.
    #[serde(default)]
    after: Option<u64>,
}

struct Cursor {
    session: Arc<Session>,
    wake: broadcast::Receiver<()>,
    next: u64,
    done: bool,
}

/// Transcript events as they happen, then one `status` event once the
/// session is finished and idle.
async fn events(
    State(app): State<AppState>,
    Path(id): Path<String>,
    Query(q): Query<EventsQuery>,
) -> ApiResult<Sse<impl Stream<Item = Result<Event, Infallible>>>> {
    let session = app.find(&id)?;
    let cursor = Cursor {
        wake: session.wake.subscribe(),
        session,
        next: q.after.map_or(0, |a| a + 1),
        done: false,
    };
    let stream = stream::unfold(cursor, |mut c| async move {
        if c.done {
            return None;
        }
        loop {
            let (batch, finished) = {
                let live = c.session.lock();
                let batch: Vec<Event> = live
                    .transcript
                    .iter()
                    .filter(|e| e.seq >= c.next)
                    .map(|e| {
                        Event::default()
                            .event("message")
                            .id(e.seq.to_string())
                            .data(serde_json::to_string(e).expect("events serialize"))
                    })
                    .collect();
                if let Some(last) = live.transcript.last() {
                    c.next = c.next.max(last.seq + 1);
                }
                let finished = (!live.running && live.status.is_finished()).then(|| {
                    json!({
                        "status": live.status,
                        "attempts": live.state.attempts(),
                        "error": live.state.last_error().map(|e| e.to_string()),
                    })
                });
                (batch, finished)
            };
            if !batch.is_empty() || finished.is_some() {
                let mut items: Vec<Result<Event, Infallible>> = batch.into_iter().map(Ok).collect();
                if let Some(status) = finished {
                    items.push(Ok(Event::default().event("status").data(status.to_string())));
                    c.done = true;
                }
                return Some((stream::iter(items), c));
            }
            match c.wake.recv().await {
                Ok(()) | Err(broadcast::error::RecvError::Lagged(_)) => {}
                Err(broadcast::error::RecvError::Closed) => return None,
            }
        }
    });
    Ok(Sse::new(futures::StreamExt::flatten(stream)).keep_alive(KeepAlive::default()))
}
