use std::sync::Arc;

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, Query, State};
use axum::http::header;
use axum::response::{IntoResponse, Response};
use axum::Json;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use tvr_core::io::{render_schematic, ObjectRecord, StatsReport};
use tvr_core::metrics::{aggregate, evaluate_predictions, reward_from_score, ScoredPrediction};
use tvr_core::transform::solve;
use tvr_core::{eval_multi, AtomicTransformation, MultiScore, Sample, Transformation, View};

use crate::api::*;
use crate::error::ApiError;
use crate::sessions::SessionMode;
use crate::AppState;

type Shared = State<Arc<AppState>>;

/// Default number of samples in a session when none is requested.
const DEFAULT_SESSION_SIZE: usize = 100;

fn body<T>(payload: Result<Json<T>, JsonRejection>) -> Result<T, ApiError> {
    payload.map(|Json(v)| v).map_err(ApiError::from)
}

fn json_text(text: String) -> Response {
    ([(header::CONTENT_TYPE, "application/json")], text).into_response()
}

pub async fn health(State(state): Shared) -> Json<serde_json::Value> {
    Json(serde_json::json!({ "status": "ok", "samples": state.dataset.samples.len() }))
}

pub async fn get_vocabulary() -> Json<Vec<VocabularyEntry>> {
    Json(vocabulary())
}

pub async fn get_sample(State(state): Shared, Path(id): Path<String>) -> Result<Json<SampleView>, ApiError> {
    let sample = state.sample(&id)?;
    Ok(Json(SampleView::new(sample, state.trusted)))
}

#[derive(Debug, Deserialize)]
pub struct SchematicQuery {
    view: Option<View>,
}

/// `state` is `initial` or `final`. The initial scene defaults to the center
/// camera and the final scene to the sample's own camera.
pub async fn get_schematic(
    State(state): Shared,
    Path((id, which)): Path<(String, String)>,
    Query(q): Query<SchematicQuery>,
) -> Result<Response, ApiError> {
    let sample = state.sample(&id)?;
    let (scene, default_view) = match which.as_str() {
        "initial" => (&sample.initial, View::Center),
        "final" => (&sample.final_scene, sample.view),
        other => {
            return Err(ApiError::MalformedRequest(format!("unknown scene `{other}` (expected initial or final)")))
        }
    };
    let svg = render_schematic(scene, q.view.unwrap_or(default_view));
    Ok(([(header::CONTENT_TYPE, "image/svg+xml")], svg).into_response())
}

pub async fn get_solution(State(state): Shared, Path(id): Path<String>) -> Result<Json<Solution>, ApiError> {
    if !state.trusted {
        return Err(ApiError::Forbidden("solutions are only served in trusted mode"));
    }
    solution_of(state.sample(&id)?).map(Json)
}

fn solution_of(sample: &Sample) -> Result<Solution, ApiError> {
    let transformations = solve(&sample.initial, &sample.final_scene).map_err(|e| ApiError::Internal(e.to_string()))?;
    Ok(Solution { id: sample.id.clone(), transformations })
}

pub async fn post_evaluate(
    State(state): Shared,
    payload: Result<Json<EvaluateRequest>, JsonRejection>,
) -> Result<Response, ApiError> {
    let request = body(payload)?;
    let report = tokio::task::spawn_blocking(move || {
        evaluate_predictions(&state.by_id(), &request.predictions).map_err(|e| match e {
            tvr_core::metrics::EvaluateError::UnknownSample(id) => ApiError::UnknownSample(id),
            other => ApiError::MalformedRequest(other.to_string()),
        })
    })
    .await
    .map_err(|e| ApiError::Internal(e.to_string()))??;
    Ok(json_text(report.to_json()))
}

fn reward_one(state: &AppState, q: &RewardQuery) -> Result<RewardResult, ApiError> {
    let sample = state.sample(&q.id)?;
    let score = eval_multi(&q.transformations, sample);
    Ok(RewardResult { id: q.id.clone(), kind: q.kind, reward: reward_from_score(&score, q.kind), score })
}

pub async fn post_reward(
    State(state): Shared,
    payload: Result<Json<RewardRequest>, JsonRejection>,
) -> Result<Response, ApiError> {
    match body(payload)? {
        RewardRequest::Single(q) => Ok(Json(reward_one(&state, &q)?).into_response()),
        RewardRequest::Batch { queries } => {
            let results = queries.iter().map(|q| reward_one(&state, q)).collect::<Result<Vec<_>, _>>()?;
            Ok(Json(RewardBatch { results }).into_response())
        }
    }
}

pub async fn get_stats(State(state): Shared, Path(split): Path<String>) -> Result<Json<StatsReport>, ApiError> {
    state.stats.get(&split).cloned().map(Json).ok_or(ApiError::UnknownSplit(split))
}

pub async fn post_session(
    State(state): Shared,
    payload: Result<Json<CreateSessionRequest>, JsonRejection>,
) -> Result<Json<SessionCreated>, ApiError> {
    let request = body(payload)?;
    let ids: Vec<String> = match request.ids {
        Some(ids) => {
            for id in &ids {
                state.sample(id)?;
            }
            ids
        }
        None => {
            let split = match request.split {
                Some(s) => s,
                None => state.default_split().ok_or_else(|| ApiError::UnknownSplit(String::new()))?,
            };
            if !state.stats.contains_key(&split) {
                return Err(ApiError::UnknownSplit(split));
            }
            let mut ids: Vec<String> = state.dataset.split(&split).iter().map(|s| s.id.clone()).collect();
            if let Some(seed) = request.seed {
                ids.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
            }
            ids.truncate(request.count.unwrap_or(DEFAULT_SESSION_SIZE));
            ids
        }
    };
    if ids.is_empty() {
        return Err(ApiError::MalformedRequest("a session needs at least one sample".into()));
    }
    let session = state.sessions.create(request.mode, ids)?;
    Ok(Json(SessionCreated { id: session.id, mode: session.mode, total: session.sample_ids.len() }))
}

pub async fn get_next(State(state): Shared, Path(id): Path<String>) -> Result<Json<NextSample>, ApiError> {
    let session = state.sessions.get(&id)?;
    let sample_id = session.current().ok_or_else(|| ApiError::SessionComplete(id.clone()))?;
    let sample = state.sample(sample_id)?;
    let cfg = sample.initial.config();
    Ok(Json(NextSample {
        session_id: session.id.clone(),
        index: session.cursor(),
        total: session.sample_ids.len(),
        sample_id: sample.id.clone(),
        view: sample.view,
        initial_svg: render_schematic(&sample.initial, View::Center),
        final_svg: render_schematic(&sample.final_scene, sample.view),
        objects: sample.initial.objects().iter().filter(|o| o.is_visible(cfg)).map(ObjectRecord::from).collect(),
        vocabulary: vocabulary(),
    }))
}

fn parse_step(v: &serde_json::Value) -> Result<AtomicTransformation, String> {
    match v {
        serde_json::Value::String(text) => text.parse().map_err(|e| format!("`{text}`: {e}")),
        other => serde_json::from_value(other.clone()).map_err(|e| format!("`{other}`: {e}")),
    }
}

pub async fn post_answer(
    State(state): Shared,
    Path(id): Path<String>,
    payload: Result<Json<AnswerRequest>, JsonRejection>,
) -> Result<Json<AnswerResult>, ApiError> {
    let request = payload.map(|Json(v)| v).map_err(|e| ApiError::MalformedAnswer(e.body_text()))?;
    let steps = request
        .transformations
        .iter()
        .enumerate()
        .map(|(i, v)| parse_step(v).map_err(|e| ApiError::MalformedAnswer(format!("step {i}: {e}"))))
        .collect::<Result<Vec<_>, _>>()?;
    let result = state.sessions.update(&id, |session| {
        let index = session.cursor();
        let current = session.current().ok_or_else(|| ApiError::SessionComplete(session.id.clone()))?.to_string();
        if let Some(claimed) = &request.sample_id {
            if *claimed != current {
                return Err(ApiError::MalformedAnswer(format!(
                    "answer is for `{claimed}` but the current sample is `{current}`"
                )));
            }
        }
        let sample = state.sample(&current)?;
        let score = eval_multi(&steps, sample);
        session.answers.push(crate::sessions::SessionAnswer {
            sample_id: current.clone(),
            transformations: Transformation(steps),
            score,
            elapsed_ms: request.elapsed_ms,
        });
        Ok(AnswerResult {
            session_id: session.id.clone(),
            index,
            sample_id: current,
            score,
            reference: sample.reference.clone(),
            remaining: session.sample_ids.len() - session.cursor(),
        })
    })?;
    Ok(Json(result))
}

pub async fn get_report(State(state): Shared, Path(id): Path<String>) -> Result<Json<SessionReport>, ApiError> {
    let session = state.sessions.get(&id)?;
    let scores: Vec<ScoredPrediction> =
        session.answers.iter().map(|a| ScoredPrediction { id: a.sample_id.clone(), score: a.score }).collect();
    let plain: Vec<MultiScore> = scores.iter().map(|s| s.score).collect();
    Ok(Json(SessionReport {
        session_id: session.id.clone(),
        mode: session.mode,
        total: session.sample_ids.len(),
        answered: session.answers.len(),
        complete: session.current().is_none(),
        report: aggregate(&plain).ok(),
        scores,
        answers: session.answers,
    }))
}

/// Solution of the current sample of a practice session.
pub async fn get_session_solution(State(state): Shared, Path(id): Path<String>) -> Result<Json<Solution>, ApiError> {
    let session = state.sessions.get(&id)?;
    if session.mode != SessionMode::Practice && !state.trusted {
        return Err(ApiError::Forbidden("solutions are only revealed in practice sessions"));
    }
    let current = session.current().ok_or_else(|| ApiError::SessionComplete(id.clone()))?;
    solution_of(state.sample(current)?).map(Json)
}
