use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::Setting;
use crate::scene::{ConfigError as PlaneConfigError, PlaneConfig};

/// Inclusive integer range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountRange {
    pub min: usize,
    pub max: usize,
}

impl CountRange {
    pub fn values(self) -> impl Iterator<Item = usize> {
        self.min..=self.max
    }

    pub fn len(self) -> usize {
        self.max + 1 - self.min
    }

    pub fn is_empty(self) -> bool {
        self.max < self.min
    }
}

/// How View-setting samples are derived from Event samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ViewMode {
    /// One sample per camera.
    Exhaustive,
    /// One randomly chosen camera per sample.
    Sampled,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitSize {
    pub name: String,
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeneratorConfigError {
    #[error(transparent)]
    Plane(#[from] PlaneConfigError),
    #[error("visible_count range {min}..={max} must lie within 1..={objects}")]
    VisibleRange { min: usize, max: usize, objects: usize },
    #[error("transformation lengths must be a non-empty subset of 1..=4")]
    Lengths,
    #[error("tolerance must be positive, got {0}")]
    Tolerance(f64),
    #[error("n-gram orders must be a non-empty subset of 1..=4")]
    NGramOrders,
    #[error("the basic setting needs length 1 among the transformation lengths")]
    BasicWithoutSingleSteps,
    #[error("split names must be non-empty, unique and free of path separators")]
    Splits,
}

/// Everything needed to regenerate a dataset bit for bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub seed: u64,
    pub setting: Setting,
    pub objects_per_scene: usize,
    pub visible_count: CountRange,
    pub lengths: Vec<usize>,
    pub tolerance: f64,
    pub ngram_orders: Vec<usize>,
    pub splits: Vec<SplitSize>,
    pub view_mode: ViewMode,
    pub max_retries: usize,
    pub plane: PlaneConfig,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            seed: 0,
            setting: Setting::Event,
            objects_per_scene: 10,
            visible_count: CountRange { min: 3, max: 8 },
            lengths: vec![1, 2, 3, 4],
            tolerance: 0.1,
            ngram_orders: vec![1, 2],
            splits: vec![SplitSize { name: "test".into(), size: 1000 }],
            view_mode: ViewMode::Exhaustive,
            max_retries: 100,
            plane: PlaneConfig::default(),
        }
    }
}

impl GeneratorConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_setting(mut self, setting: Setting) -> Self {
        self.setting = setting;
        self
    }

    /// Replaces the splits with a single one.
    pub fn with_split(mut self, name: &str, size: usize) -> Self {
        self.splits = vec![SplitSize { name: name.to_string(), size }];
        self
    }

    pub fn validate(&self) -> Result<(), GeneratorConfigError> {
        self.plane.validate()?;
        let range = self.visible_count;
        if range.is_empty() || range.min < 1 || range.max > self.objects_per_scene {
            return Err(GeneratorConfigError::VisibleRange {
                min: range.min,
                max: range.max,
                objects: self.objects_per_scene,
            });
        }
        let in_range = |v: &Vec<usize>| !v.is_empty() && v.iter().all(|n| (1..=4).contains(n));
        if !in_range(&self.lengths) {
            return Err(GeneratorConfigError::Lengths);
        }
        if !in_range(&self.ngram_orders) {
            return Err(GeneratorConfigError::NGramOrders);
        }
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(GeneratorConfigError::Tolerance(self.tolerance));
        }
        if self.setting == Setting::Basic && !self.lengths.contains(&1) {
            return Err(GeneratorConfigError::BasicWithoutSingleSteps);
        }
        let mut names: Vec<&str> = self.splits.iter().map(|s| s.name.as_str()).collect();
        names.sort_unstable();
        let unique = names.windows(2).all(|w| w[0] != w[1]);
        let clean =
            names.iter().all(|n| !n.is_empty() && n.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-'));
        if !unique || !clean {
            return Err(GeneratorConfigError::Splits);
        }
        Ok(())
    }
}
