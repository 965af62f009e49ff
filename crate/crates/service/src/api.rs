//! Request and response bodies.

use serde::{Deserialize, Serialize};
use tvr_core::io::{ObjectRecord, PredictionRecord};
use tvr_core::metrics::ScoredPrediction;
use tvr_core::transform::Attribute;
use tvr_core::{AggregateReport, MultiScore, RewardKind, Sample, Setting, TransformValue, Transformation, View};

use crate::sessions::{SessionAnswer, SessionMode};

/// A sample as served to clients. `transformations` is present only when the
/// service runs in trusted mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleView {
    pub id: String,
    pub setting: Setting,
    pub view: View,
    pub objects: Vec<ObjectRecord>,
    pub final_objects: Vec<ObjectRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transformations: Option<Transformation>,
    pub split: String,
}

impl SampleView {
    pub fn new(sample: &Sample, with_reference: bool) -> Self {
        SampleView {
            id: sample.id.clone(),
            setting: sample.setting,
            view: sample.view,
            objects: sample.initial.objects().iter().map(ObjectRecord::from).collect(),
            final_objects: sample.final_scene.objects().iter().map(ObjectRecord::from).collect(),
            transformations: with_reference.then(|| sample.reference.clone()),
            split: sample.split.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluateRequest {
    pub predictions: Vec<PredictionRecord>,
}

fn default_kind() -> RewardKind {
    RewardKind::CorrAndDist
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RewardQuery {
    pub id: String,
    pub transformations: Transformation,
    #[serde(default = "default_kind")]
    pub kind: RewardKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RewardRequest {
    Batch { queries: Vec<RewardQuery> },
    Single(RewardQuery),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RewardResult {
    pub id: String,
    pub kind: RewardKind,
    pub reward: f64,
    pub score: MultiScore,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RewardBatch {
    pub results: Vec<RewardResult>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CreateSessionRequest {
    #[serde(default)]
    pub mode: SessionMode,
    /// Explicit sample ids; takes precedence over `split` and `count`.
    #[serde(default)]
    pub ids: Option<Vec<String>>,
    #[serde(default)]
    pub split: Option<String>,
    #[serde(default)]
    pub count: Option<usize>,
    /// Shuffles the split before taking `count` samples.
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionCreated {
    pub id: String,
    pub mode: SessionMode,
    pub total: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VocabularyEntry {
    pub index: usize,
    pub token: String,
    pub attribute: Attribute,
}

pub fn vocabulary() -> Vec<VocabularyEntry> {
    TransformValue::all()
        .map(|v| VocabularyEntry { index: v.index(), token: v.token(), attribute: v.attribute() })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NextSample {
    pub session_id: String,
    pub index: usize,
    pub total: usize,
    pub sample_id: String,
    pub view: View,
    pub initial_svg: String,
    pub final_svg: String,
    /// Objects visible in the initial scene.
    pub objects: Vec<ObjectRecord>,
    pub vocabulary: Vec<VocabularyEntry>,
}

/// Answer body. Each step is either `{"obj": 3, "value": "blue"}` or the
/// text form `"(3, blue)"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnswerRequest {
    #[serde(default)]
    pub sample_id: Option<String>,
    pub transformations: Vec<serde_json::Value>,
    #[serde(default)]
    pub elapsed_ms: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnswerResult {
    pub session_id: String,
    pub index: usize,
    pub sample_id: String,
    pub score: MultiScore,
    pub reference: Transformation,
    pub remaining: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionReport {
    pub session_id: String,
    pub mode: SessionMode,
    pub total: usize,
    pub answered: usize,
    pub complete: bool,
    pub answers: Vec<SessionAnswer>,
    pub scores: Vec<ScoredPrediction>,
    pub report: Option<AggregateReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub id: String,
    pub transformations: Transformation,
}
