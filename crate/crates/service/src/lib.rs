//! Stateless JSON API over the projection engine.
//!
//! Routes:
//! - `GET /api/health`: status and engine version.
//! - `GET /api/scenarios`: bundled scenarios plus those in the scenario
//!   directory.
//! - `POST /api/project`: `{base, overrides, sections}`; overrides are a
//!   partial scenario merged onto `base`.

use std::path::PathBuf;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::State;
use axum::http::{header, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use costcurve::export;
use costcurve::projection::{run_projection, SectionName};
use costcurve::scenario::{self, ScenarioError, ScenarioInfo};
use costcurve::ENGINE_VERSION;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use tower_http::cors::{AllowOrigin, Any, CorsLayer};

#[derive(Debug, Clone, Default)]
pub struct Settings {
    /// Extra scenario files, looked up by file stem.
    pub scenario_dir: Option<PathBuf>,
    /// Allowed browser origin; any origin when unset.
    pub cors_origin: Option<String>,
}

impl Settings {
    pub fn from_env() -> Self {
        Self {
            scenario_dir: std::env::var_os("COSTCURVE_SCENARIO_DIR").map(PathBuf::from),
            cors_origin: std::env::var("COSTCURVE_CORS_ORIGIN").ok().filter(|s| !s.is_empty()),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProjectRequest {
    #[serde(default = "default_base")]
    pub base: String,
    #[serde(default)]
    pub overrides: Option<Value>,
    /// All sections when absent.
    #[serde(default)]
    pub sections: Option<Vec<SectionName>>,
}

fn default_base() -> String {
    "base-2030".into()
}

#[derive(Debug, Serialize)]
struct Health {
    status: &'static str,
    version: &'static str,
}

pub struct ApiError {
    status: StatusCode,
    body: Value,
}

impl ApiError {
    fn new(status: StatusCode, kind: &str, message: impl ToString, field: Option<String>) -> Self {
        let mut body = json!({ "error": kind, "message": message.to_string() });
        if let Some(field) = field {
            body["field"] = Value::String(field);
        }
        Self { status, body }
    }
}

impl From<ScenarioError> for ApiError {
    fn from(e: ScenarioError) -> Self {
        match e {
            ScenarioError::Validation { field, message } => {
                ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "validation", message, Some(field))
            }
            ScenarioError::Unknown(name) => ApiError::new(
                StatusCode::NOT_FOUND,
                "unknown_scenario",
                format!("unknown scenario `{name}`"),
                None,
            ),
            // Base files on disk that fail to parse or read are a server problem.
            other => ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", other, None),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

/// Parse a request body, reporting the JSON path of type errors.
pub fn parse_request(body: &[u8]) -> Result<ProjectRequest, ApiError> {
    let mut de = serde_json::Deserializer::from_slice(body);
    let request: ProjectRequest = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        if inner.is_syntax() || inner.is_eof() {
            ApiError::new(StatusCode::BAD_REQUEST, "malformed_json", inner, None)
        } else {
            ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "validation", inner, Some(path))
        }
    })?;
    de.end()
        .map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, "malformed_json", e, None))?;
    Ok(request)
}

async fn health() -> Json<Health> {
    Json(Health {
        status: "ok",
        version: ENGINE_VERSION,
    })
}

async fn scenarios(State(settings): State<Arc<Settings>>) -> Json<Vec<ScenarioInfo>> {
    Json(scenario::list_scenarios(settings.scenario_dir.as_deref()))
}

async fn project(State(settings): State<Arc<Settings>>, body: Bytes) -> Result<Response, ApiError> {
    let request = parse_request(&body)?;
    let base = scenario::resolve(&request.base, settings.scenario_dir.as_deref())?;
    let scenario = match request.overrides {
        Some(overrides) => base.with_json_overrides(overrides)?,
        None => base,
    };
    let sections = request.sections.unwrap_or_else(|| SectionName::ALL.to_vec());
    let text = tokio::task::spawn_blocking(move || export::to_json(&run_projection(&scenario, &sections)))
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e, None))?
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e, None))?;
    Ok(([(header::CONTENT_TYPE, HeaderValue::from_static("application/json"))], text).into_response())
}

fn cors(settings: &Settings) -> CorsLayer {
    let origin = match settings.cors_origin.as_deref().map(HeaderValue::from_str) {
        Some(Ok(value)) => AllowOrigin::exact(value),
        _ => AllowOrigin::from(Any),
    };
    CorsLayer::new()
        .allow_origin(origin)
        .allow_methods(Any)
        .allow_headers([header::CONTENT_TYPE])
}

pub fn app(settings: Settings) -> Router {
    let layer = cors(&settings);
    Router::new()
        .route("/api/health", get(health))
        .route("/api/scenarios", get(scenarios))
        .route("/api/project", post(project))
        .layer(layer)
        .with_state(Arc::new(settings))
}
