//! Stateless HTTP front end over [`crate::pipeline`].

use std::time::Duration;

use axum::body::Bytes;
use axum::extract::rejection::{BytesRejection, QueryRejection};
use axum::extract::{DefaultBodyLimit, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use qubopath::Scheme;
use serde::Deserialize;
use serde_json::value::RawValue;

use crate::pipeline::{
    self, Failure, FailureKind, InputKind, Limits, OutputFormat, SolverOptions, SCHEMA_VERSION,
};

#[derive(Clone, Copy, Debug)]
pub struct ServiceConfig {
    pub limits: Limits,
    /// Largest accepted request body, in bytes.
    pub body_limit: usize,
    /// Compute budget per request; exceeding it yields 408.
    pub timeout: Duration,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            limits: Limits::default(),
            body_limit: 4 * 1024 * 1024,
            timeout: Duration::from_secs(30),
        }
    }
}

pub fn router(config: ServiceConfig) -> Router {
    Router::new()
        .route("/api/health", get(health))
        .route("/api/generate", post(generate))
        .route("/api/suggest", post(suggest))
        .route("/api/solve", post(solve))
        .layer(DefaultBodyLimit::max(config.body_limit))
        .with_state(config)
}

fn json(status: u16, body: String) -> Response {
    let status = StatusCode::from_u16(status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
    (status, [(header::CONTENT_TYPE, "application/json")], body).into_response()
}

fn failure(f: Failure) -> Response {
    json(f.http_status(), f.to_json())
}

async fn health() -> Response {
    json(
        200,
        format!("{{\n  \"schema_version\": \"{SCHEMA_VERSION}\",\n  \"status\": \"ok\"\n}}\n"),
    )
}

fn body_bytes(body: Result<Bytes, BytesRejection>) -> Result<Bytes, Failure> {
    body.map_err(|e| {
        if e.status() == StatusCode::PAYLOAD_TOO_LARGE {
            Failure::new(FailureKind::TooLarge, "E_BODY_TOO_LARGE", e.body_text())
        } else {
            Failure::new(FailureKind::Input, "E_BODY", e.body_text())
        }
    })
}

/// Runs `work` on the blocking pool under the configured compute budget.
async fn compute<F>(config: &ServiceConfig, work: F) -> Response
where
    F: FnOnce() -> Result<String, Failure> + Send + 'static,
{
    match tokio::time::timeout(config.timeout, tokio::task::spawn_blocking(work)).await {
        Ok(Ok(Ok(body))) => json(200, body),
        Ok(Ok(Err(f))) => failure(f),
        Ok(Err(join)) => failure(Failure::new(
            FailureKind::Internal,
            "E_INTERNAL",
            format!("request handler failed: {join}"),
        )),
        Err(_) => failure(Failure::new(
            FailureKind::Timeout,
            "E_TIMEOUT",
            format!("computation exceeded {} ms", config.timeout.as_millis()),
        )),
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct GenerateQuery {
    format: Option<String>,
    encoding: Option<String>,
    input: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecQuery {
    input: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SolveQuery {
    encoding: Option<String>,
}

fn query_failure(e: QueryRejection) -> Failure {
    Failure::new(FailureKind::Input, "E_QUERY", e.body_text())
}

fn parse_param<T: std::str::FromStr<Err = String>>(
    v: Option<String>,
    name: &str,
) -> Result<Option<T>, Failure> {
    v.map(|s| {
        s.parse::<T>()
            .map_err(|e| Failure::new(FailureKind::Input, "E_QUERY", format!("{name}: {e}")))
    })
    .transpose()
}

async fn generate(
    State(config): State<ServiceConfig>,
    query: Result<Query<GenerateQuery>, QueryRejection>,
    body: Result<Bytes, BytesRejection>,
) -> Response {
    let prepared = (|| {
        let Query(q) = query.map_err(query_failure)?;
        let format = parse_param::<OutputFormat>(q.format, "format")?.unwrap_or_default();
        let input = parse_param::<InputKind>(q.input, "input")?.unwrap_or_default();
        let encoding = parse_param::<Scheme>(q.encoding, "encoding")?;
        Ok::<_, Failure>((format, input, encoding, body_bytes(body)?))
    })();
    let (format, input, encoding, bytes) = match prepared {
        Ok(p) => p,
        Err(f) => return failure(f),
    };
    let limits = config.limits;
    compute(&config, move || {
        let spec = pipeline::load_spec(&bytes, input, encoding)?;
        Ok(pipeline::generate(&spec, format, &limits)?.to_json())
    })
    .await
}

async fn suggest(
    State(config): State<ServiceConfig>,
    query: Result<Query<SpecQuery>, QueryRejection>,
    body: Result<Bytes, BytesRejection>,
) -> Response {
    let prepared = (|| {
        let Query(q) = query.map_err(query_failure)?;
        let input = parse_param::<InputKind>(q.input, "input")?.unwrap_or_default();
        Ok::<_, Failure>((input, body_bytes(body)?))
    })();
    let (input, bytes) = match prepared {
        Ok(p) => p,
        Err(f) => return failure(f),
    };
    let limits = config.limits;
    compute(&config, move || {
        let spec = pipeline::load_spec(&bytes, input, None)?;
        Ok(pipeline::suggest(&spec, &limits)?.to_json())
    })
    .await
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SolveRequest<'a> {
    #[serde(borrow)]
    spec: &'a RawValue,
    #[serde(default)]
    solver: SolverOptions,
}

async fn solve(
    State(config): State<ServiceConfig>,
    query: Result<Query<SolveQuery>, QueryRejection>,
    body: Result<Bytes, BytesRejection>,
) -> Response {
    let prepared = (|| {
        let Query(q) = query.map_err(query_failure)?;
        let encoding = parse_param::<Scheme>(q.encoding, "encoding")?;
        Ok::<_, Failure>((encoding, body_bytes(body)?))
    })();
    let (encoding, bytes) = match prepared {
        Ok(p) => p,
        Err(f) => return failure(f),
    };
    let limits = config.limits;
    compute(&config, move || {
        let request: SolveRequest = serde_json::from_slice(&bytes).map_err(|e| {
            Failure::new(
                FailureKind::Input,
                "E_REQUEST",
                format!("invalid solve request: {e}"),
            )
        })?;
        let spec = pipeline::load_spec(request.spec.get().as_bytes(), InputKind::Json, encoding)?;
        Ok(pipeline::solve(&spec, &request.solver, &limits)?.to_json())
    })
    .await
}
