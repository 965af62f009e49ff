use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{aggregate, eval_multi, AggregateReport, MultiScore};
use crate::io::PredictionRecord;
use crate::sampler::Sample;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvaluateError {
    #[error("prediction refers to unknown sample `{0}`")]
    UnknownSample(String),
    #[error("no predictions to evaluate")]
    Empty,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredPrediction {
    pub id: String,
    #[serde(flatten)]
    pub score: MultiScore,
}

/// Per-prediction scores, in input order, plus their aggregate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub scores: Vec<ScoredPrediction>,
    pub report: AggregateReport,
}

impl EvaluationReport {
    /// Canonical JSON form shared by the CLI and the service.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

/// Scores `predictions` against `samples` (looked up by id). Scoring runs in
/// parallel; the result does not depend on the thread count.
pub fn evaluate_predictions(
    samples: &HashMap<&str, &Sample>,
    predictions: &[PredictionRecord],
) -> Result<EvaluationReport, EvaluateError> {
    if predictions.is_empty() {
        return Err(EvaluateError::Empty);
    }
    let pairs = predictions
        .iter()
        .map(|p| samples.get(p.id.as_str()).map(|s| (p, *s)).ok_or_else(|| EvaluateError::UnknownSample(p.id.clone())))
        .collect::<Result<Vec<_>, _>>()?;
    let scores: Vec<ScoredPrediction> = pairs
        .par_iter()
        .map(|(p, s)| ScoredPrediction { id: p.id.clone(), score: eval_multi(&p.transformations, s) })
        .collect();
    let plain: Vec<MultiScore> = scores.iter().map(|s| s.score).collect();
    let report = aggregate(&plain).expect("non-empty");
    Ok(EvaluationReport { scores, report })
}
