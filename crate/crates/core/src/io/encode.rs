//! Fixed-width numeric encodings for external learners.

use crate::scene::{Color, Material, ObjectState, PlaneConfig, Shape, Size};
use crate::transform::TransformValue;

pub const OBJECT_ENCODING_LEN: usize = Color::ALL.len() + Size::ALL.len() + Shape::ALL.len() + Material::ALL.len() + 2;

/// One-hot color, size, shape and material blocks followed by the position
/// scaled into `[-1, 1]` by the plane bound.
pub type ObjectEncoding = [f32; OBJECT_ENCODING_LEN];

pub fn encode_object(o: &ObjectState, cfg: &PlaneConfig) -> ObjectEncoding {
    let mut out = [0.0; OBJECT_ENCODING_LEN];
    let mut base = 0;
    for (index, width) in [
        (o.color.index(), Color::ALL.len()),
        (o.size.index(), Size::ALL.len()),
        (o.shape.index(), Shape::ALL.len()),
        (o.material.index(), Material::ALL.len()),
    ] {
        out[base + index] = 1.0;
        base += width;
    }
    let bound = cfg.plane_bound as f32;
    out[base] = o.position.x as f32 / bound;
    out[base + 1] = o.position.y as f32 / bound;
    out
}

/// Class index in `[0, 33)`.
pub fn encode_value(v: TransformValue) -> usize {
    v.index()
}

pub fn decode_value(index: usize) -> Option<TransformValue> {
    TransformValue::from_index(index)
}
