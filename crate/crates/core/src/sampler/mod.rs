//! Bias-balanced generation of samples.
//!
//! Scenes are drawn with balanced visible-object counts and attribute values.
//! Transformations are drawn with balanced lengths, target objects, values
//! (conditioned on the preceding values to balance n-grams) and move types.
//! Basic and View samples are derived from Event samples.

mod balance;
mod config;
mod generate;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::scene::{is_visible, PlaneConfig, Position, SceneGraph};
use crate::transform::Transformation;

pub use balance::{balanced_probabilities, CountTable, NGramTable};
pub use config::{CountRange, GeneratorConfig, GeneratorConfigError, SplitSize, ViewMode};
pub use generate::{
    derive_basic, expand_views, generate_dataset, generate_sample, sample_scene, sample_transformation, SampleError,
    SamplerTables,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Setting {
    Basic,
    Event,
    View,
}

impl Setting {
    pub fn token(self) -> &'static str {
        match self {
            Setting::Basic => "basic",
            Setting::Event => "event",
            Setting::View => "view",
        }
    }
}

impl fmt::Display for Setting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for Setting {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "basic" => Ok(Setting::Basic),
            "event" => Ok(Setting::Event),
            "view" => Ok(Setting::View),
            _ => Err(format!("unknown setting `{s}` (expected basic, event or view)")),
        }
    }
}

/// Camera used for the final state. The initial state is always seen from the center.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum View {
    Left,
    Center,
    Right,
}

impl View {
    pub const ALL: [View; 3] = [View::Left, View::Center, View::Right];

    pub fn token(self) -> &'static str {
        match self {
            View::Left => "left",
            View::Center => "center",
            View::Right => "right",
        }
    }
}

impl fmt::Display for View {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for View {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "left" => Ok(View::Left),
            "center" => Ok(View::Center),
            "right" => Ok(View::Right),
            _ => Err(format!("unknown view `{s}` (expected left, center or right)")),
        }
    }
}

/// How a move relates to the visible area.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MoveType {
    /// Hidden before, visible after.
    In,
    /// Visible before, hidden after.
    Out,
    /// Visible before and after.
    Inside,
}

impl MoveType {
    pub const ALL: [MoveType; 3] = [MoveType::In, MoveType::Out, MoveType::Inside];

    pub fn token(self) -> &'static str {
        match self {
            MoveType::In => "in",
            MoveType::Out => "out",
            MoveType::Inside => "inside",
        }
    }

    /// `None` for hidden-to-hidden moves.
    pub fn classify(from: Position, to: Position, cfg: &PlaneConfig) -> Option<MoveType> {
        match (is_visible(from, cfg), is_visible(to, cfg)) {
            (false, true) => Some(MoveType::In),
            (true, false) => Some(MoveType::Out),
            (true, true) => Some(MoveType::Inside),
            (false, false) => None,
        }
    }
}

/// One task instance: initial scene, reference transformation and final scene.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub id: String,
    pub setting: Setting,
    pub view: View,
    pub initial: SceneGraph,
    pub final_scene: SceneGraph,
    pub reference: Transformation,
    pub split: String,
}
