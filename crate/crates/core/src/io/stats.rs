//! Balance statistics of a dataset: histograms of every balanced factor and
//! n-gram coverage of the reference transformations.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::sampler::{MoveType, Sample};
use crate::scene::{Color, Material, Shape, Size};
use crate::transform::{apply_in_place, ApplyMode, TransformValue};

const DEFAULT_OBJECTS: usize = 10;
const DEFAULT_MAX_LENGTH: usize = 4;
const MAX_NGRAM: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bin {
    pub value: String,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Histogram {
    pub total: u64,
    pub bins: Vec<Bin>,
}

impl Histogram {
    fn new<S: ToString>(labels: impl IntoIterator<Item = S>) -> Self {
        Histogram { total: 0, bins: labels.into_iter().map(|l| Bin { value: l.to_string(), count: 0 }).collect() }
    }

    fn add(&mut self, index: usize) {
        self.bins[index].count += 1;
        self.total += 1;
    }

    pub fn count(&self, value: &str) -> Option<u64> {
        self.bins.iter().find(|b| b.value == value).map(|b| b.count)
    }

    /// Share of each bin, all zero when the histogram is empty.
    pub fn fractions(&self) -> Vec<f64> {
        self.bins.iter().map(|b| if self.total == 0 { 0.0 } else { b.count as f64 / self.total as f64 }).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NGramStats {
    pub n: usize,
    pub options: u64,
    pub windows: u64,
    pub distinct: u64,
    pub min: u64,
    pub max: u64,
    pub median: f64,
    pub mean: f64,
    pub std: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsReport {
    pub samples: u64,
    pub size: Histogram,
    pub color: Histogram,
    pub shape: Histogram,
    pub material: Histogram,
    pub visible_object_count: Histogram,
    pub transformation_length: Histogram,
    pub object_number: Histogram,
    pub move_type: Histogram,
    pub value: Histogram,
    pub ngrams: Vec<NGramStats>,
}

fn ngram_stats(n: usize, counts: &HashMap<&[usize], u64>) -> NGramStats {
    let options = (TransformValue::COUNT as u64).pow(n as u32);
    let mut nonzero: Vec<u64> = counts.values().copied().collect();
    nonzero.sort_unstable();
    let distinct = nonzero.len() as u64;
    let zeros = options - distinct;
    let windows: u64 = nonzero.iter().sum();
    // k-th smallest count when the options never seen are included as zeros
    let kth = |k: u64| if k < zeros { 0 } else { nonzero[(k - zeros) as usize] };
    let median =
        if options % 2 == 1 { kth(options / 2) as f64 } else { (kth(options / 2 - 1) + kth(options / 2)) as f64 / 2.0 };
    let mean = windows as f64 / options as f64;
    let sum_sq: f64 = nonzero.iter().map(|&c| (c as f64) * (c as f64)).sum();
    let var = (sum_sq / options as f64 - mean * mean).max(0.0);
    NGramStats {
        n,
        options,
        windows,
        distinct,
        min: if zeros > 0 { 0 } else { nonzero.first().copied().unwrap_or(0) },
        max: nonzero.last().copied().unwrap_or(0),
        median,
        mean,
        std: var.sqrt(),
    }
}

/// Computes the statistics report of `samples`. An empty input yields
/// histograms with the default bins and all counts zero.
pub fn stats_report(samples: &[Sample]) -> StatsReport {
    let objects = samples.iter().map(|s| s.initial.len()).max().unwrap_or(0).max(DEFAULT_OBJECTS);
    let max_len = samples.iter().map(|s| s.reference.len()).max().unwrap_or(0).max(DEFAULT_MAX_LENGTH);

    let mut size = Histogram::new(Size::ALL.iter().map(|v| v.token()));
    let mut color = Histogram::new(Color::ALL.iter().map(|v| v.token()));
    let mut shape = Histogram::new(Shape::ALL.iter().map(|v| v.token()));
    let mut material = Histogram::new(Material::ALL.iter().map(|v| v.token()));
    let mut visible = Histogram::new(0..=objects);
    let mut length = Histogram::new(1..=max_len);
    let mut object_number = Histogram::new(0..objects);
    let mut move_type = Histogram::new(MoveType::ALL.iter().map(|m| m.token()));
    let mut value = Histogram::new(TransformValue::all().map(|v| v.token()));

    let sequences: Vec<Vec<usize>> =
        samples.iter().map(|s| s.reference.iter().map(|t| t.value.index()).collect()).collect();

    for sample in samples {
        for o in sample.initial.objects() {
            size.add(o.size.index());
            color.add(o.color.index());
            shape.add(o.shape.index());
            material.add(o.material.index());
        }
        visible.add(sample.initial.visible_count());
        if !sample.reference.is_empty() {
            length.add(sample.reference.len() - 1);
        }
        let cfg = *sample.initial.config();
        let mut current = sample.initial.clone();
        for step in sample.reference.iter() {
            object_number.add(step.object_id);
            value.add(step.value.index());
            let before = current.object(step.object_id).map(|o| o.position);
            if apply_in_place(&mut current, step, ApplyMode::Loose).is_err() || !step.value.is_move() {
                continue;
            }
            let after = current.object(step.object_id).map(|o| o.position);
            if let (Some(from), Some(to)) = (before, after) {
                if let Some(m) = MoveType::classify(from, to, &cfg) {
                    move_type.add(m as usize);
                }
            }
        }
    }

    let ngrams = (1..=MAX_NGRAM)
        .map(|n| {
            let mut counts: HashMap<&[usize], u64> = HashMap::new();
            for seq in &sequences {
                for w in seq.windows(n) {
                    *counts.entry(w).or_insert(0) += 1;
                }
            }
            ngram_stats(n, &counts)
        })
        .collect();

    StatsReport {
        samples: samples.len() as u64,
        size,
        color,
        shape,
        material,
        visible_object_count: visible,
        transformation_length: length,
        object_number,
        move_type,
        value,
        ngrams,
    }
}
