//! Scene-graph engine for transformation-driven visual reasoning.
//!
//! Given an initial and a final scene, the task is to name the sequence of
//! atomic transformations `(object, value)` that turns one into the other.
//! This crate provides:
//!
//! - [`scene`]: objects, vocabularies, visibility and collision on the plane
//! - [`transform`]: the 33-value transformation space, strict/loose
//!   application, the exact solver and order-sensitivity checks
//! - [`sampler`]: bias-balanced generation of samples
//! - [`metrics`]: reconstruction-based scoring, aggregate reports and rewards
//! - [`io`]: dataset files, manifests, statistics, encodings and schematics

pub mod io;
pub mod metrics;
pub mod sampler;
pub mod scene;
pub mod transform;

pub use metrics::{aggregate, eval_basic, eval_multi, reward, scene_distance, AggregateReport, MultiScore, RewardKind};
pub use sampler::{GeneratorConfig, Sample, Setting, View};
pub use scene::{ObjectState, PlaneConfig, Position, SceneGraph};
pub use transform::{AtomicTransformation, TransformValue, Transformation};
