use serde::{Deserialize, Serialize};

use crate::sampler::{Sample, Setting, View};
use crate::scene::{Color, Material, ObjectState, PlaneConfig, Position, SceneError, SceneGraph, Shape, Size};
use crate::transform::{apply_sequence, ApplyMode, Transformation};

/// Flat object row of a sample record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectRecord {
    pub id: usize,
    pub size: Size,
    pub color: Color,
    pub shape: Shape,
    pub material: Material,
    pub x: i32,
    pub y: i32,
}

impl From<&ObjectState> for ObjectRecord {
    fn from(o: &ObjectState) -> Self {
        ObjectRecord {
            id: o.id,
            size: o.size,
            color: o.color,
            shape: o.shape,
            material: o.material,
            x: o.position.x,
            y: o.position.y,
        }
    }
}

impl From<&ObjectRecord> for ObjectState {
    fn from(o: &ObjectRecord) -> Self {
        ObjectState {
            id: o.id,
            size: o.size,
            color: o.color,
            shape: o.shape,
            material: o.material,
            position: Position::new(o.x, o.y),
        }
    }
}

/// One line of a split file. `objects` is the initial scene; the final scene
/// is recovered by applying `transformations`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleRecord {
    pub id: String,
    pub setting: Setting,
    pub view: View,
    pub objects: Vec<ObjectRecord>,
    pub transformations: Transformation,
    pub split: String,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RecordError {
    #[error(transparent)]
    Scene(#[from] SceneError),
    #[error("initial scene violates the plane constraints")]
    InvalidScene,
    #[error("reference step {step} cannot be applied: {message}")]
    Reference { step: usize, message: String },
}

impl SampleRecord {
    pub fn from_sample(sample: &Sample) -> Self {
        SampleRecord {
            id: sample.id.clone(),
            setting: sample.setting,
            view: sample.view,
            objects: sample.initial.objects().iter().map(ObjectRecord::from).collect(),
            transformations: sample.reference.clone(),
            split: sample.split.clone(),
        }
    }

    pub fn into_sample(self, plane: PlaneConfig) -> Result<Sample, RecordError> {
        let initial = SceneGraph::new(self.objects.iter().map(ObjectState::from).collect(), plane)?;
        if !initial.is_valid() {
            return Err(RecordError::InvalidScene);
        }
        let outcome = apply_sequence(&initial, &self.transformations, ApplyMode::Strict);
        if let Some((step, Err(e))) = outcome.statuses.iter().enumerate().find(|(_, s)| s.is_err()) {
            return Err(RecordError::Reference { step, message: e.to_string() });
        }
        Ok(Sample {
            id: self.id,
            setting: self.setting,
            view: self.view,
            initial,
            final_scene: outcome.scene,
            reference: self.transformations,
            split: self.split,
        })
    }

    /// The record as served to a tester: same fields, reference withheld.
    pub fn without_reference(&self) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("record serializes");
        v.as_object_mut().expect("record is an object").remove("transformations");
        v
    }
}

/// A prediction: the same record format as references, keyed by sample id.
/// Fields other than `id` and `transformations` are ignored.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub id: String,
    pub transformations: Transformation,
}
