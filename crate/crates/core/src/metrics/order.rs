use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{aggregate, eval_multi, AggregateReport, MetricsError, MultiScore};
use crate::sampler::Sample;
use crate::transform::{is_order_sensitive, SequenceTooLong};

/// Samples whose reference atomics admit an infeasible permutation.
#[derive(Debug, Clone)]
pub struct OrderSensitiveSubset<'a> {
    pub samples: Vec<&'a Sample>,
    pub fraction: f64,
}

pub fn order_sensitive_subset(samples: &[Sample]) -> Result<OrderSensitiveSubset<'_>, SequenceTooLong> {
    let mut subset = Vec::new();
    for sample in samples {
        if is_order_sensitive(&sample.initial, &sample.reference)? {
            subset.push(sample);
        }
    }
    let fraction = if samples.is_empty() { 0.0 } else { subset.len() as f64 / samples.len() as f64 };
    Ok(OrderSensitiveSubset { samples: subset, fraction })
}

/// Mean EO over `trials` runs that answer every sample with its reference
/// atomics in a uniformly random order.
pub fn random_order_eo(samples: &[&Sample], trials: usize, seed: u64) -> Result<f64, MetricsError> {
    if samples.is_empty() || trials == 0 {
        return Err(MetricsError::EmptyInput);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut total = 0.0;
    for _ in 0..trials {
        let scores: Vec<MultiScore> = samples
            .iter()
            .map(|s| {
                let mut order = s.reference.0.clone();
                order.shuffle(&mut rng);
                eval_multi(&order, s)
            })
            .collect();
        total += aggregate(&scores)?.eo;
    }
    Ok(total / trials as f64)
}

/// Order analysis of a dataset, optionally with a prediction set scored on the
/// order-sensitive subset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderAnalysis {
    pub samples: usize,
    pub order_sensitive: usize,
    pub fraction: f64,
    pub trials: usize,
    pub seed: u64,
    /// `None` when the subset is empty.
    pub random_order_eo: Option<f64>,
    /// Predictions restricted to the subset, when predictions were given.
    pub predictions: Option<AggregateReport>,
}

/// `scores` pairs each sample id with the score of its prediction.
pub fn order_analysis(
    samples: &[Sample],
    scores: Option<&[(String, MultiScore)]>,
    trials: usize,
    seed: u64,
) -> Result<OrderAnalysis, SequenceTooLong> {
    let subset = order_sensitive_subset(samples)?;
    let random_order_eo = random_order_eo(&subset.samples, trials, seed).ok();
    let predictions = scores.and_then(|scores| {
        let ids: std::collections::HashSet<&str> = subset.samples.iter().map(|s| s.id.as_str()).collect();
        let picked: Vec<MultiScore> =
            scores.iter().filter(|(id, _)| ids.contains(id.as_str())).map(|(_, s)| *s).collect();
        aggregate(&picked).ok()
    });
    Ok(OrderAnalysis {
        samples: samples.len(),
        order_sensitive: subset.samples.len(),
        fraction: subset.fraction,
        trials,
        seed,
        random_order_eo,
        predictions,
    })
}
