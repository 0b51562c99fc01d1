use std::sync::Arc;

use axum::extract::{FromRequestParts, Path, Query, State};
use axum::http::request::Parts;
use axum::http::StatusCode;
use axum::response::IntoResponse;
use axum::Json;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use siskit_core::analysis::{
    apply_whatif, find_synergy_chains, find_tradeoffs, most_affected_qas, AffectedRanking, CellOverride,
    ChangedChain, PairDelta, SynergyChain, TradeoffRecord, TradeoffScope, WhatIfOptions, WhatIfOutcome,
    WhatIfPatch,
};
use siskit_core::model::{parse_model, to_document, validate_model, Dimension, DimensionPair, Effect, EffectMatrix};
use siskit_core::scoring::{resolve_priorities, PriorityMode, PrioritySet, ScoreOptions, SIS_TOLERANCE};
use siskit_core::{score_model, AssessmentModel, ScoreReport};

use crate::error::ApiError;
use crate::session::{Session, SessionInfo};
use crate::AppState;

type ApiResult<T> = Result<T, ApiError>;

/// Query extractor whose rejections use the service error body.
pub struct ApiQuery<T>(pub T);

impl<T, S> FromRequestParts<S> for ApiQuery<T>
where
    T: serde::de::DeserializeOwned,
    S: Send + Sync,
{
    type Rejection = ApiError;

    async fn from_request_parts(parts: &mut Parts, state: &S) -> Result<Self, Self::Rejection> {
        Query::<T>::from_request_parts(parts, state)
            .await
            .map(|Query(q)| ApiQuery(q))
            .map_err(|e| ApiError::bad_request("invalid_query", e.body_text()))
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(default)]
pub struct CreateQuery {
    raw_priorities: bool,
    scenario: Option<String>,
    allow_optimal_edit: bool,
}

#[derive(Serialize)]
struct Created {
    session: SessionInfo,
    warnings: Vec<String>,
    scores: ScoreReport,
}

pub async fn create_session(
    State(state): State<Arc<AppState>>,
    ApiQuery(query): ApiQuery<CreateQuery>,
    body: String,
) -> ApiResult<impl IntoResponse> {
    let model = parse_model(&body)?;
    let warnings = validate_model(&model).iter().map(|d| d.to_string()).collect();
    let options = WhatIfOptions {
        score: ScoreOptions {
            scenario: query.scenario,
            priority_mode: if query.raw_priorities { PriorityMode::Raw } else { PriorityMode::Normalized },
            require_optimal: false,
        },
        allow_optimal_edit: query.allow_optimal_edit,
    };
    // Refuse models that cannot be scored at all up front.
    let scores = score_model(&model, &options.score)?;
    let id = state.sessions.create(model, options);
    let session = state.sessions.acquire(&id).await?;
    tracing::info!(session = %id, "session created");
    Ok((StatusCode::CREATED, Json(Created { session: session.info(), warnings, scores })))
}

pub async fn get_session(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<Json<SessionInfo>> {
    Ok(Json(state.sessions.acquire(&id).await?.info()))
}

pub async fn delete_session(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<StatusCode> {
    drop(state.sessions.acquire(&id).await?);
    state.sessions.remove(&id);
    Ok(StatusCode::NO_CONTENT)
}

#[derive(Debug, Default, Deserialize)]
#[serde(default)]
pub struct PendingQuery {
    pending: bool,
}

pub async fn get_model(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    ApiQuery(query): ApiQuery<PendingQuery>,
) -> ApiResult<Json<AssessmentModel>> {
    let session = state.sessions.acquire(&id).await?;
    let model = if query.pending { current_model(&session)? } else { session.baseline.clone() };
    Ok(Json(model))
}

#[derive(Debug, Deserialize)]
#[serde(default)]
pub struct ScoresQuery {
    pending: bool,
    normalize: bool,
}

impl Default for ScoresQuery {
    fn default() -> Self {
        ScoresQuery { pending: false, normalize: true }
    }
}

pub async fn get_scores(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    ApiQuery(query): ApiQuery<ScoresQuery>,
) -> ApiResult<Json<ScoreReport>> {
    let session = state.sessions.acquire(&id).await?;
    let mut score = session.options.score.clone();
    score.require_optimal = query.normalize;
    if !query.pending || session.pending.is_empty() {
        return Ok(Json(score_model(&session.baseline, &score)?));
    }
    let options = WhatIfOptions { score, ..session.options.clone() };
    let outcome = apply_whatif(&session.baseline, &session.pending, &options)?;
    if state.config.verify_rescore {
        verify_rescore(&outcome, &options)?;
    }
    Ok(Json(outcome.patched))
}

#[derive(Serialize)]
struct AlternativeMatrices {
    id: String,
    name: String,
    is_theoretical_optimal: bool,
    matrices: Vec<EffectMatrix>,
}

#[derive(Serialize)]
struct MatricesView {
    priority_mode: PriorityMode,
    priorities: PrioritySet,
    alternatives: Vec<AlternativeMatrices>,
    pending: Vec<CellOverride>,
}

/// Effect grids per alternative, the shape an editor renders directly.
pub async fn get_matrices(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    ApiQuery(query): ApiQuery<PendingQuery>,
) -> ApiResult<impl IntoResponse> {
    let session = state.sessions.acquire(&id).await?;
    let model = if query.pending { current_model(&session)? } else { session.baseline.clone() };
    let priorities = resolve_priorities(&model, session.options.score.scenario.as_deref())?;
    let alternatives = model
        .alternatives
        .iter()
        .map(|alt| {
            Ok(AlternativeMatrices {
                id: alt.id.clone(),
                name: alt.name.clone(),
                is_theoretical_optimal: alt.is_theoretical_optimal,
                matrices: alt.effective_matrices(&model)?,
            })
        })
        .collect::<Result<Vec<_>, siskit_core::model::ModelError>>()?;
    Ok(Json(MatricesView {
        priority_mode: session.options.score.priority_mode,
        priorities,
        alternatives,
        pending: session.pending.overrides.clone(),
    }))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CellRequest {
    alternative: String,
    #[serde(default)]
    pair: Option<String>,
    #[serde(default)]
    dim_from: Option<String>,
    #[serde(default)]
    dim_to: Option<String>,
    row_qa: String,
    col_qa: String,
    effect: Value,
}

impl CellRequest {
    fn into_override(self) -> ApiResult<CellOverride> {
        let pair = match (&self.pair, &self.dim_from, &self.dim_to) {
            (Some(p), None, None) => p.parse::<DimensionPair>().map_err(|e| ApiError::bad_request("invalid_request", e.to_string()))?,
            (None, Some(from), Some(to)) => {
                let dim = |s: &str| s.parse::<Dimension>().map_err(|e| ApiError::bad_request("invalid_request", e.to_string()));
                DimensionPair::new(dim(from)?, dim(to)?)
            }
            _ => return Err(ApiError::bad_request("invalid_request", "give either 'pair' or both 'dim_from' and 'dim_to'")),
        };
        let effect = self
            .effect
            .as_i64()
            .and_then(|v| Effect::try_from(v).ok())
            .ok_or_else(|| {
                ApiError::bad_request("invalid_effect", format!("effect {} is not one of -1, 0, +1", self.effect))
            })?;
        Ok(CellOverride {
            alternative: self.alternative,
            dim_from: pair.from,
            dim_to: pair.to,
            row_qa: self.row_qa,
            col_qa: self.col_qa,
            effect,
        })
    }
}

#[derive(Serialize)]
struct CellPatched {
    /// Old values are the session state before this write, new ones after it.
    pair: Option<PairDelta>,
    changed_chains: Vec<ChangedChain>,
    pending_overrides: usize,
}

pub async fn patch_cell(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: String,
) -> ApiResult<impl IntoResponse> {
    let request: CellRequest =
        serde_json::from_str(&body).map_err(|e| ApiError::bad_request("invalid_request", e.to_string()))?;
    let cell = request.into_override()?;
    let mut session = state.sessions.acquire(&id).await?;

    let before = current_model(&session)?;
    let step = apply_whatif(&before, &WhatIfPatch { overrides: vec![cell.clone()] }, &session.options)?;
    let mut merged = session.pending.clone();
    merged.merge(cell.clone());
    // The merged patch must stay valid against the baseline before it is kept.
    let full = apply_whatif(&session.baseline, &merged, &session.options)?;
    if state.config.verify_rescore {
        verify_rescore(&full, &session.options)?;
        verify_same_scores(&full.patched, &step.patched)?;
    }
    session.pending = merged;
    Ok(Json(CellPatched {
        pair: step.report.pair(cell.pair()).cloned(),
        changed_chains: step.report.changed_chains,
        pending_overrides: session.pending.overrides.len(),
    }))
}

#[derive(Serialize)]
struct Committed {
    committed: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    snapshot: Option<String>,
    scores: ScoreReport,
}

pub async fn commit(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<impl IntoResponse> {
    let mut session = state.sessions.acquire(&id).await?;
    let committed = session.pending.overrides.len();
    if committed > 0 {
        let outcome = apply_whatif(&session.baseline, &session.pending, &session.options)?;
        session.baseline = outcome.model;
        session.pending = WhatIfPatch::default();
    }
    let snapshot = match (&state.config.snapshot_dir, committed) {
        (Some(dir), n) if n > 0 => {
            let path = dir.join(format!("{}.json", session.id));
            std::fs::write(&path, to_document(&session.baseline))
                .map_err(|e| ApiError::internal(format!("cannot write snapshot {}: {e}", path.display())))?;
            Some(path.display().to_string())
        }
        _ => None,
    };
    let scores = score_model(&session.baseline, &session.options.score)?;
    Ok(Json(Committed { committed, snapshot, scores }))
}

pub async fn reset(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<impl IntoResponse> {
    let mut session = state.sessions.acquire(&id).await?;
    let discarded = session.pending.overrides.len();
    session.pending = WhatIfPatch::default();
    Ok(Json(serde_json::json!({ "discarded": discarded })))
}

#[derive(Debug, Deserialize)]
#[serde(default)]
pub struct AnalysisQuery {
    pending: bool,
    min_length: usize,
}

impl Default for AnalysisQuery {
    fn default() -> Self {
        AnalysisQuery { pending: false, min_length: 2 }
    }
}

#[derive(Serialize)]
struct RenderedChain {
    #[serde(flatten)]
    chain: SynergyChain,
    rendered: String,
}

#[derive(Serialize)]
struct AlternativeAnalysis {
    alternative: String,
    is_theoretical_optimal: bool,
    tradeoffs: Vec<TradeoffRecord>,
    synergy_chains: Vec<RenderedChain>,
    affected: AffectedRanking,
}

pub async fn get_analysis(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    ApiQuery(query): ApiQuery<AnalysisQuery>,
) -> ApiResult<impl IntoResponse> {
    let session = state.sessions.acquire(&id).await?;
    let model = if query.pending { current_model(&session)? } else { session.baseline.clone() };
    let mut out = Vec::with_capacity(model.alternatives.len());
    for alt in &model.alternatives {
        let chains = find_synergy_chains(&alt.effective_dmap(&model)?, &model, query.min_length);
        out.push(AlternativeAnalysis {
            alternative: alt.id.clone(),
            is_theoretical_optimal: alt.is_theoretical_optimal,
            tradeoffs: find_tradeoffs(alt, &model, TradeoffScope::All)?,
            synergy_chains: chains.into_iter().map(|c| RenderedChain { rendered: c.to_string(), chain: c }).collect(),
            affected: most_affected_qas(alt, &model)?,
        });
    }
    Ok(Json(serde_json::json!({ "alternatives": out })))
}

pub async fn health() -> Json<Value> {
    Json(serde_json::json!({ "status": "ok" }))
}

pub async fn not_found() -> ApiError {
    ApiError::new(StatusCode::NOT_FOUND, "not_found", "no such endpoint")
}

/// Baseline with the pending patch applied.
fn current_model(session: &Session) -> ApiResult<AssessmentModel> {
    if session.pending.is_empty() {
        return Ok(session.baseline.clone());
    }
    Ok(apply_whatif(&session.baseline, &session.pending, &session.options)?.model)
}

fn verify_rescore(outcome: &WhatIfOutcome, options: &WhatIfOptions) -> ApiResult<()> {
    let fresh = score_model(&outcome.model, &options.score)?;
    verify_same_scores(&outcome.patched, &fresh)
}

/// Raw SIS per (pair, alternative) must agree; a pair missing on one side
/// counts as all zeros.
fn verify_same_scores(a: &ScoreReport, b: &ScoreReport) -> ApiResult<()> {
    let pairs = a.results.iter().chain(&b.results).map(|r| r.pair());
    for pair in pairs {
        for alt in &a.alternatives {
            let raw = |r: &ScoreReport| r.result(pair).and_then(|res| res.raw_for(alt)).unwrap_or(0.0);
            let (x, y) = (raw(a), raw(b));
            if (x - y).abs() > SIS_TOLERANCE {
                return Err(ApiError::internal(format!("rescore mismatch for {} on {pair}: {x} vs {y}", alt.id)));
            }
        }
    }
    Ok(())
}
