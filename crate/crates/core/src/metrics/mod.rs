//! Reconstruction-based scoring.
//!
//! Single-step predictions are compared directly with the reference. Multi-step
//! predictions are applied to the initial scene and the result is compared
//! with the reference final scene, counting attribute-level differences of
//! visible objects. Loose application (no constraints) gives the distance;
//! strict application additionally decides whether the predicted order is
//! feasible.

mod evaluate;
mod order;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sampler::Sample;
use crate::scene::{ObjectState, PlaneConfig, SceneGraph};
use crate::transform::{apply_sequence, ApplyMode, AtomicTransformation};

pub use evaluate::{evaluate_predictions, EvaluateError, EvaluationReport, ScoredPrediction};
pub use order::{order_analysis, order_sensitive_subset, random_order_eo, OrderAnalysis, OrderSensitiveSubset};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricsError {
    #[error("scenes do not share the same object ids")]
    MismatchedIds,
    #[error("cannot aggregate an empty list of scores")]
    EmptyInput,
}

/// Direct comparison of two single atomics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasicScore {
    pub obj_correct: bool,
    pub attr_correct: bool,
    pub val_correct: bool,
    pub all_correct: bool,
}

pub fn eval_basic(pred: &AtomicTransformation, reference: &AtomicTransformation) -> BasicScore {
    let obj_correct = pred.object_id == reference.object_id;
    let attr_correct = pred.value.attribute() == reference.value.attribute();
    let val_correct = pred.value == reference.value;
    BasicScore { obj_correct, attr_correct, val_correct, all_correct: obj_correct && attr_correct && val_correct }
}

fn object_distance(a: &ObjectState, b: &ObjectState, cfg: &PlaneConfig) -> u32 {
    let (seen_a, seen_b) = (a.is_visible(cfg), b.is_visible(cfg));
    if !seen_a && !seen_b {
        return 0;
    }
    let position = if seen_a != seen_b { 1 } else { u32::from(a.position != b.position) };
    position
        + u32::from(a.size != b.size)
        + u32::from(a.color != b.color)
        + u32::from(a.shape != b.shape)
        + u32::from(a.material != b.material)
}

/// Attribute-level difference between two scenes over the same objects.
///
/// Objects hidden in both scenes count nothing. Position counts one when the
/// object is visible in only one scene, or visible in both at different
/// coordinates. Each intrinsic attribute counts one when it differs and the
/// object is visible in at least one scene.
pub fn scene_distance(a: &SceneGraph, b: &SceneGraph) -> Result<u32, MetricsError> {
    if a.len() != b.len() || a.objects().iter().zip(b.objects()).any(|(x, y)| x.id != y.id) {
        return Err(MetricsError::MismatchedIds);
    }
    let cfg = a.config();
    Ok(a.objects().iter().zip(b.objects()).map(|(x, y)| object_distance(x, y, cfg)).sum())
}

/// Score of one multi-step prediction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MultiScore {
    pub distance: u32,
    pub normalized_distance: f64,
    pub strict_correct: bool,
    pub loose_correct: bool,
    pub reference_length: usize,
    /// Steps rejected under strict application.
    pub failed_steps: usize,
}

pub fn eval_multi(pred: &[AtomicTransformation], sample: &Sample) -> MultiScore {
    let loose = apply_sequence(&sample.initial, pred, ApplyMode::Loose);
    let distance = scene_distance(&loose.scene, &sample.final_scene).expect("same object set");
    let strict = apply_sequence(&sample.initial, pred, ApplyMode::Strict);
    let failed_steps = strict.failed_steps();
    let strict_correct =
        failed_steps == 0 && scene_distance(&strict.scene, &sample.final_scene).expect("same object set") == 0;
    let reference_length = sample.reference.len();
    MultiScore {
        distance,
        normalized_distance: f64::from(distance) / reference_length.max(1) as f64,
        strict_correct,
        loose_correct: distance == 0,
        reference_length,
        failed_steps,
    }
}

/// `(LAcc - Acc) / LAcc`, defined as 0 when nothing is loosely correct.
pub fn error_of_order(lacc: f64, acc: f64) -> f64 {
    if lacc > 0.0 {
        (lacc - acc) / lacc
    } else {
        0.0
    }
}

/// Corpus-level metrics for one group of scores.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricSummary {
    pub samples: usize,
    pub ad: f64,
    pub and: f64,
    pub acc: f64,
    pub lacc: f64,
    pub eo: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LengthSummary {
    pub length: usize,
    #[serde(flatten)]
    pub metrics: MetricSummary,
}

/// AD, AND, Acc, LAcc and EO over a list of scores, with a per-length breakdown.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateReport {
    pub samples: usize,
    pub ad: f64,
    pub and: f64,
    pub acc: f64,
    pub lacc: f64,
    pub eo: f64,
    pub by_length: Vec<LengthSummary>,
}

#[derive(Default)]
struct Totals {
    samples: usize,
    distance: u64,
    normalized: f64,
    strict: usize,
    loose: usize,
}

impl Totals {
    fn add(&mut self, s: &MultiScore) {
        self.samples += 1;
        self.distance += u64::from(s.distance);
        self.normalized += s.normalized_distance;
        self.strict += usize::from(s.strict_correct);
        self.loose += usize::from(s.loose_correct);
    }

    fn summary(&self) -> MetricSummary {
        let n = self.samples as f64;
        let acc = self.strict as f64 / n;
        let lacc = self.loose as f64 / n;
        MetricSummary {
            samples: self.samples,
            ad: self.distance as f64 / n,
            and: self.normalized / n,
            acc,
            lacc,
            eo: error_of_order(lacc, acc),
        }
    }
}

pub fn aggregate(scores: &[MultiScore]) -> Result<AggregateReport, MetricsError> {
    if scores.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    let mut overall = Totals::default();
    let mut per_length: std::collections::BTreeMap<usize, Totals> = Default::default();
    for s in scores {
        overall.add(s);
        per_length.entry(s.reference_length).or_default().add(s);
    }
    let o = overall.summary();
    Ok(AggregateReport {
        samples: o.samples,
        ad: o.ad,
        and: o.and,
        acc: o.acc,
        lacc: o.lacc,
        eo: o.eo,
        by_length: per_length.into_iter().map(|(length, t)| LengthSummary { length, metrics: t.summary() }).collect(),
    })
}

/// Scalar training signal for reinforcement learning.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RewardKind {
    /// 1 if strictly correct, else 0.
    Corr,
    /// Negative normalized distance.
    Dist,
    /// Sum of the two.
    CorrAndDist,
}

impl std::str::FromStr for RewardKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "corr" => Ok(RewardKind::Corr),
            "dist" => Ok(RewardKind::Dist),
            "corr_and_dist" => Ok(RewardKind::CorrAndDist),
            _ => Err(format!("unknown reward kind `{s}` (expected corr, dist or corr_and_dist)")),
        }
    }
}

pub fn reward_from_score(score: &MultiScore, kind: RewardKind) -> f64 {
    let corr = if score.strict_correct { 1.0 } else { 0.0 };
    let dist = -score.normalized_distance;
    match kind {
        RewardKind::Corr => corr,
        RewardKind::Dist => dist,
        RewardKind::CorrAndDist => corr + dist,
    }
}

pub fn reward(pred: &[AtomicTransformation], sample: &Sample, kind: RewardKind) -> f64 {
    reward_from_score(&eval_multi(pred, sample), kind)
}
