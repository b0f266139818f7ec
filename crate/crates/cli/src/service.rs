//! Stateless JSON API over the model.
//!
//! Request bodies are flat objects of parameter overrides (`delta`, `u1`,
//! ..., `ppkm_level`) plus a few endpoint-specific keys.

use axum::extract::rejection::JsonRejection;
use axum::extract::Json;
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Map, Value};
use tower_http::cors::CorsLayer;

use sveiqhr::config::{InitialSpec, IntegratorSection, ParameterOverrides, DEFAULT_BOOSTS};
use sveiqhr::dynamics::{simulate, Trajectory};
use sveiqhr::equilibrium::compute_r0;
use sveiqhr::error::{ConfigError, DynamicsError, StrategyError};
use sveiqhr::model::{table1_default, ModelParameters, ParamName, State};
use sveiqhr::strategy::{intervention_sweep, region_geometry, significance_ranking, PPKM_U2};

/// Largest number of stored samples a single request may produce.
pub const MAX_POINTS: usize = 1_000_000;

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    kind: &'static str,
    field: Option<String>,
    message: String,
}

impl ApiError {
    fn bad_request(field: impl Into<String>, message: impl Into<String>) -> Self {
        ApiError {
            status: StatusCode::BAD_REQUEST,
            kind: "ValidationError",
            field: Some(field.into()),
            message: message.into(),
        }
    }

    fn domain(kind: &'static str, message: String) -> Self {
        ApiError {
            status: StatusCode::UNPROCESSABLE_ENTITY,
            kind,
            field: None,
            message,
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let mut body = json!({ "error": self.kind, "message": self.message });
        if let Some(f) = self.field {
            body["field"] = Value::String(f);
        }
        (self.status, Json(body)).into_response()
    }
}

impl From<ConfigError> for ApiError {
    fn from(e: ConfigError) -> Self {
        match e {
            ConfigError::Validation { field, message } => ApiError::bad_request(field, message),
            other => ApiError::bad_request("body", other.to_string()),
        }
    }
}

impl From<DynamicsError> for ApiError {
    fn from(e: DynamicsError) -> Self {
        match e {
            DynamicsError::Param(p) => ApiError::bad_request(p.field(), p.to_string()),
            DynamicsError::InvalidConfig(m) => ApiError::bad_request("integrator", m),
            other => ApiError::domain("DynamicsError", other.to_string()),
        }
    }
}

impl From<StrategyError> for ApiError {
    fn from(e: StrategyError) -> Self {
        match e {
            StrategyError::SingularL1 { .. } => ApiError::domain("SingularL1", e.to_string()),
            StrategyError::ZeroR0 => ApiError::domain("ZeroR0", e.to_string()),
            StrategyError::Dynamics(d) => d.into(),
            StrategyError::Param(p) => ApiError::bad_request(p.field(), p.to_string()),
            StrategyError::NotAnIntervention(_) => ApiError::bad_request("targets", e.to_string()),
            StrategyError::InvalidBoost(_) => ApiError::bad_request("boosts", e.to_string()),
            other => ApiError::bad_request("body", other.to_string()),
        }
    }
}

type ApiResult = Result<Json<Value>, ApiError>;

fn body_object(body: Result<Json<Value>, JsonRejection>) -> Result<Map<String, Value>, ApiError> {
    match body {
        Ok(Json(Value::Object(m))) => Ok(m),
        Ok(Json(_)) => Err(ApiError::bad_request("body", "expected a JSON object")),
        Err(rej) => Err(ApiError::bad_request("body", rej.body_text())),
    }
}

/// Removes an endpoint-specific key and deserializes it.
fn take<T: DeserializeOwned>(m: &mut Map<String, Value>, key: &str) -> Result<Option<T>, ApiError> {
    match m.remove(key) {
        None | Some(Value::Null) => Ok(None),
        Some(v) => serde_json::from_value(v)
            .map(Some)
            .map_err(|e| ApiError::bad_request(key, e.to_string())),
    }
}

/// Whatever remains after endpoint keys are removed must be parameters.
fn overrides(m: Map<String, Value>) -> Result<ParameterOverrides, ApiError> {
    for key in m.keys() {
        if key != "ppkm_level" && key.parse::<ParamName>().is_err() {
            return Err(ApiError::bad_request(key.clone(), "unknown field"));
        }
    }
    serde_json::from_value(Value::Object(m)).map_err(|e| ApiError::bad_request("body", e.to_string()))
}

fn to_json<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("response types serialize")
}

async fn blocking<F>(f: F) -> ApiResult
where
    F: FnOnce() -> ApiResult + Send + 'static,
{
    tokio::task::spawn_blocking(f)
        .await
        .unwrap_or_else(|e| {
            Err(ApiError {
                status: StatusCode::INTERNAL_SERVER_ERROR,
                kind: "InternalError",
                field: None,
                message: e.to_string(),
            })
        })
}

/// `{"r0": ...}` for a set of parameter overrides.
pub fn r0_response(o: &ParameterOverrides) -> Result<Value, ConfigError> {
    Ok(json!({ "r0": compute_r0(&o.resolve()?) }))
}

async fn r0(body: Result<Json<Value>, JsonRejection>) -> ApiResult {
    let o = overrides(body_object(body)?)?;
    Ok(Json(r0_response(&o)?))
}

fn trajectory_json(t: &Trajectory) -> Value {
    json!({
        "times": t.times(),
        "states": t.states(),
        "total": t.total(),
        "non_healthy": t.non_healthy(),
    })
}

struct RunSetup {
    params: ModelParameters,
    initial: State,
    integrator: sveiqhr::dynamics::IntegratorConfig,
}

fn run_setup(m: &mut Map<String, Value>) -> Result<RunSetup, ApiError> {
    let initial: InitialSpec = take(m, "initial")?.unwrap_or_default();
    let section: IntegratorSection = take(m, "integrator")?.unwrap_or_default();
    let params = overrides(std::mem::take(m))?.resolve()?;
    let integrator = section.resolve()?;
    Ok(RunSetup {
        initial: initial.resolve(&params)?,
        params,
        integrator,
    })
}

async fn simulate_handler(body: Result<Json<Value>, JsonRejection>) -> ApiResult {
    let mut m = body_object(body)?;
    let s = run_setup(&mut m)?;
    if s.integrator.sample_count() > MAX_POINTS {
        return Err(ApiError::bad_request(
            "integrator",
            format!("more than {MAX_POINTS} samples requested"),
        ));
    }
    blocking(move || {
        let traj = simulate(&s.params, &s.initial, &s.integrator)?;
        Ok(Json(json!({
            "r0": compute_r0(&s.params),
            "trajectory": trajectory_json(&traj),
        })))
    })
    .await
}

async fn sensitivity(body: Result<Json<Value>, JsonRejection>) -> ApiResult {
    let params = overrides(body_object(body)?)?.resolve()?;
    let table = significance_ranking(&params)?;
    Ok(Json(json!({
        "r0": compute_r0(&params),
        "table": to_json(&table),
        "ordering": table.ordering(),
    })))
}

async fn region(body: Result<Json<Value>, JsonRejection>) -> ApiResult {
    let mut o = overrides(body_object(body)?)?;
    let delta = o
        .delta
        .ok_or_else(|| ApiError::bad_request("delta", "required"))?;
    // the geometry lives in the (u1, u2) plane; any placeholder will do
    if o.u2.is_none() && o.ppkm_level.is_none() {
        o.u2 = Some(0.0);
    }
    let params = o.resolve()?;
    Ok(Json(to_json(&region_geometry(&params, delta)?)))
}

async fn sweep(body: Result<Json<Value>, JsonRejection>) -> ApiResult {
    let mut m = body_object(body)?;
    let targets: Vec<ParamName> =
        take(&mut m, "targets")?.unwrap_or_else(|| ParamName::INTERVENTIONS.to_vec());
    let boosts: Vec<f64> = take(&mut m, "boosts")?.unwrap_or_else(|| DEFAULT_BOOSTS.to_vec());
    let s = run_setup(&mut m)?;
    let runs = 1 + targets.len() * boosts.len();
    if s.integrator.sample_count().saturating_mul(runs) > MAX_POINTS {
        return Err(ApiError::bad_request(
            "integrator",
            format!("more than {MAX_POINTS} samples requested across {runs} runs"),
        ));
    }
    blocking(move || {
        let rep = intervention_sweep(&s.params, &s.initial, &s.integrator, &targets, &boosts)?;
        Ok(Json(to_json(&rep)))
    })
    .await
}

/// Tabulated defaults; δ and u2 have none and are reported as null.
pub fn defaults_json() -> Value {
    let mut m = Map::new();
    for name in ParamName::ALL {
        m.insert(
            name.as_str().to_string(),
            table1_default(name).map_or(Value::Null, |v| json!(v)),
        );
    }
    json!({ "parameters": m, "ppkm_levels": PPKM_U2 })
}

async fn defaults() -> Json<Value> {
    Json(defaults_json())
}

async fn health() -> Json<Value> {
    Json(json!({ "status": "ok", "version": env!("CARGO_PKG_VERSION") }))
}

pub fn router() -> Router {
    Router::new()
        .route("/api/r0", post(r0))
        .route("/api/simulate", post(simulate_handler))
        .route("/api/sensitivity", post(sensitivity))
        .route("/api/region", post(region))
        .route("/api/sweep", post(sweep))
        .route("/api/defaults", get(defaults))
        .route("/api/health", get(health))
        .layer(CorsLayer::permissive())
}

pub async fn serve(bind: &str) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(bind).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router()).await
}
