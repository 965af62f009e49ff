use std::fmt;
use std::ops::Deref;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::value::{TransformValue, UnknownValue};
use crate::scene::{ObjectState, Position, SceneGraph};

/// One attribute-level change of one object.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AtomicTransformation {
    #[serde(rename = "obj")]
    pub object_id: usize,
    pub value: TransformValue,
}

impl AtomicTransformation {
    pub fn new(object_id: usize, value: TransformValue) -> Self {
        AtomicTransformation { object_id, value }
    }
}

impl fmt::Display for AtomicTransformation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.object_id, self.value)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseAtomicError {
    #[error("expected `(object_id, value)`, got `{0}`")]
    Syntax(String),
    #[error(transparent)]
    Value(#[from] UnknownValue),
}

impl FromStr for AtomicTransformation {
    type Err = ParseAtomicError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let syntax = || ParseAtomicError::Syntax(s.to_string());
        let inner = s.trim().strip_prefix('(').and_then(|r| r.strip_suffix(')')).ok_or_else(syntax)?;
        let (obj, value) = inner.split_once(',').ok_or_else(syntax)?;
        let object_id = obj.trim().parse().map_err(|_| syntax())?;
        Ok(AtomicTransformation { object_id, value: value.trim().parse()? })
    }
}

/// Ordered sequence of atomic transformations.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Transformation(pub Vec<AtomicTransformation>);

impl Transformation {
    pub fn new(steps: Vec<AtomicTransformation>) -> Self {
        Transformation(steps)
    }

    pub fn steps(&self) -> &[AtomicTransformation] {
        &self.0
    }
}

impl Deref for Transformation {
    type Target = [AtomicTransformation];

    fn deref(&self) -> &Self::Target {
        &self.0
    }
}

impl From<Vec<AtomicTransformation>> for Transformation {
    fn from(steps: Vec<AtomicTransformation>) -> Self {
        Transformation(steps)
    }
}

impl FromIterator<AtomicTransformation> for Transformation {
    fn from_iter<I: IntoIterator<Item = AtomicTransformation>>(iter: I) -> Self {
        Transformation(iter.into_iter().collect())
    }
}

impl fmt::Display for Transformation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, t) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{t}")?;
        }
        f.write_str("]")
    }
}

/// Whether constraints are enforced while applying.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ApplyMode {
    /// No overlaps, no leaving the plane, no intrinsic no-ops.
    Strict,
    /// Everything goes except unknown objects.
    Loose,
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
#[serde(tag = "code", rename_all = "snake_case")]
pub enum ApplyError {
    #[error("object {object_id} does not exist")]
    ObjectNotFound { object_id: usize },
    #[error("object {object_id} would overlap object {other_id}")]
    OverlapViolation { object_id: usize, other_id: usize },
    #[error("object {object_id} would leave the plane at {position}")]
    OutOfPlane { object_id: usize, position: Position },
    #[error("object {object_id} already has value {value}")]
    NoOp { object_id: usize, value: TransformValue },
}

/// The object as it would be after applying `t`, without touching the scene.
pub(crate) fn resolve_atomic(
    scene: &SceneGraph,
    t: &AtomicTransformation,
    mode: ApplyMode,
) -> Result<ObjectState, ApplyError> {
    let object_id = t.object_id;
    let current = *scene.object(object_id).ok_or(ApplyError::ObjectNotFound { object_id })?;
    let mut next = current;
    match t.value {
        TransformValue::Size(v) => next.size = v,
        TransformValue::Color(v) => next.color = v,
        TransformValue::Shape(v) => next.shape = v,
        TransformValue::Material(v) => next.material = v,
        TransformValue::Move(m) => {
            let (dx, dy) = m.displacement(scene.config().step_unit);
            next.position = current.position.offset(dx, dy);
        }
    }

    if mode == ApplyMode::Strict {
        if next == current {
            return Err(ApplyError::NoOp { object_id, value: t.value });
        }
        let cfg = scene.config();
        if !cfg.in_plane(next.position) {
            return Err(ApplyError::OutOfPlane { object_id, position: next.position });
        }
        // only size and position changes can create an overlap
        if next.size != current.size || next.position != current.position {
            if let Some(other_id) = scene.collides_with_others(&next) {
                return Err(ApplyError::OverlapViolation { object_id, other_id });
            }
        }
    }
    Ok(next)
}

/// Applies `t` to `scene` in place. On error the scene is left untouched.
pub(crate) fn apply_in_place(
    scene: &mut SceneGraph,
    t: &AtomicTransformation,
    mode: ApplyMode,
) -> Result<(), ApplyError> {
    let next = resolve_atomic(scene, t, mode)?;
    *scene.object_mut(t.object_id).expect("resolved above") = next;
    Ok(())
}

/// `f: S x T -> S` for a single atomic. The input scene is never modified.
pub fn apply_atomic(scene: &SceneGraph, t: &AtomicTransformation, mode: ApplyMode) -> Result<SceneGraph, ApplyError> {
    let mut next = scene.clone();
    apply_in_place(&mut next, t, mode)?;
    Ok(next)
}

/// Final scene of [`apply_sequence`] plus the outcome of every step.
#[derive(Debug, Clone, PartialEq)]
pub struct SequenceOutcome {
    pub scene: SceneGraph,
    pub statuses: Vec<Result<(), ApplyError>>,
}

impl SequenceOutcome {
    pub fn failed_steps(&self) -> usize {
        self.statuses.iter().filter(|s| s.is_err()).count()
    }

    pub fn all_applied(&self) -> bool {
        self.statuses.iter().all(Result::is_ok)
    }
}

/// Folds [`apply_atomic`] left to right. A step that fails is skipped and
/// recorded; later steps still run against the scene as it stands.
pub fn apply_sequence(scene: &SceneGraph, steps: &[AtomicTransformation], mode: ApplyMode) -> SequenceOutcome {
    let mut current = scene.clone();
    let statuses = steps.iter().map(|t| apply_in_place(&mut current, t, mode)).collect();
    SequenceOutcome { scene: current, statuses }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::{Color, Material, ObjectState, PlaneConfig, Shape, Size};
    use crate::transform::value::{Direction, MoveValue};
    use proptest::prelude::*;

    fn object(id: usize, size: Size, x: i32, y: i32) -> ObjectState {
        ObjectState {
            id,
            size,
            color: Color::Red,
            shape: Shape::Sphere,
            material: Material::Metal,
            position: Position::new(x, y),
        }
    }

    fn mv(d: Direction, s: u8) -> TransformValue {
        TransformValue::Move(MoveValue::new(d, s).unwrap())
    }

    fn scene(objects: Vec<ObjectState>) -> SceneGraph {
        SceneGraph::new(objects, PlaneConfig::default()).unwrap()
    }

    /// Object 0 sits at (20,0) and wants to move to (10,0); object 1 blocks
    /// that cell until it moves from (0,0) to (-10,0).
    pub(crate) fn dependency_scene() -> (SceneGraph, AtomicTransformation, AtomicTransformation) {
        let s = scene(vec![object(0, Size::Large, 20, 0), object(1, Size::Large, 0, 0)]);
        let a = AtomicTransformation::new(1, mv(Direction::W, 1));
        let b = AtomicTransformation::new(0, mv(Direction::W, 1));
        (s, a, b)
    }

    #[test]
    fn atomic_token_round_trip() {
        let t: AtomicTransformation = "(3, move_NE_2)".parse().unwrap();
        assert_eq!(t, AtomicTransformation::new(3, mv(Direction::NE, 2)));
        assert_eq!(t.to_string(), "(3, move_NE_2)");
        assert!("3, blue".parse::<AtomicTransformation>().is_err());
        assert!("(x, blue)".parse::<AtomicTransformation>().is_err());
        assert!(matches!("(1, teal)".parse::<AtomicTransformation>(), Err(ParseAtomicError::Value(_))));
        let json = serde_json::to_string(&t).unwrap();
        assert_eq!(json, r#"{"obj":3,"value":"move_NE_2"}"#);
    }

    #[test]
    fn intrinsic_change_on_single_object() {
        let s = scene(vec![object(0, Size::Small, 0, 0)]);
        let t = AtomicTransformation::new(0, TransformValue::Color(Color::Blue));
        let next = apply_atomic(&s, &t, ApplyMode::Strict).unwrap();
        assert_eq!(next.object(0).unwrap().color, Color::Blue);
        assert_eq!(s.object(0).unwrap().color, Color::Red);
    }

    #[test]
    fn one_step_is_ten_units() {
        let s = scene(vec![object(0, Size::Small, 0, 0)]);
        let next = apply_atomic(&s, &AtomicTransformation::new(0, mv(Direction::E, 1)), ApplyMode::Strict).unwrap();
        assert_eq!(next.object(0).unwrap().position, Position::new(10, 0));
    }

    #[test]
    fn strict_errors() {
        let s = scene(vec![object(0, Size::Large, 0, 0), object(1, Size::Large, 20, 0)]);
        let err = apply_atomic(&s, &AtomicTransformation::new(0, mv(Direction::E, 1)), ApplyMode::Strict).unwrap_err();
        assert_eq!(err, ApplyError::OverlapViolation { object_id: 0, other_id: 1 });

        let err = apply_atomic(&s, &AtomicTransformation::new(5, mv(Direction::E, 1)), ApplyMode::Strict).unwrap_err();
        assert_eq!(err, ApplyError::ObjectNotFound { object_id: 5 });

        let s2 = scene(vec![object(0, Size::Small, 35, 0)]);
        let err = apply_atomic(&s2, &AtomicTransformation::new(0, mv(Direction::E, 1)), ApplyMode::Strict).unwrap_err();
        assert_eq!(err, ApplyError::OutOfPlane { object_id: 0, position: Position::new(45, 0) });

        let err =
            apply_atomic(&s2, &AtomicTransformation::new(0, TransformValue::Color(Color::Red)), ApplyMode::Strict)
                .unwrap_err();
        assert!(matches!(err, ApplyError::NoOp { object_id: 0, .. }));

        // growing into a neighbour is an overlap too
        let s3 = scene(vec![object(0, Size::Small, 0, 0), object(1, Size::Large, 10, 0)]);
        let err =
            apply_atomic(&s3, &AtomicTransformation::new(0, TransformValue::Size(Size::Large)), ApplyMode::Strict)
                .unwrap_err();
        assert_eq!(err, ApplyError::OverlapViolation { object_id: 0, other_id: 1 });
    }

    #[test]
    fn loose_mode_ignores_constraints() {
        let s = scene(vec![object(0, Size::Large, 0, 0), object(1, Size::Large, 20, 0)]);
        let next = apply_atomic(&s, &AtomicTransformation::new(0, mv(Direction::E, 1)), ApplyMode::Loose).unwrap();
        assert!(!next.is_valid());
        let far = apply_atomic(&s, &AtomicTransformation::new(1, mv(Direction::E, 2)), ApplyMode::Loose).unwrap();
        assert_eq!(far.object(1).unwrap().position, Position::new(40, 0));
        let out = apply_atomic(&far, &AtomicTransformation::new(1, mv(Direction::E, 2)), ApplyMode::Loose).unwrap();
        assert_eq!(out.object(1).unwrap().position, Position::new(60, 0));
        assert!(apply_atomic(&s, &AtomicTransformation::new(0, TransformValue::Color(Color::Red)), ApplyMode::Loose)
            .is_ok());
        assert_eq!(
            apply_atomic(&s, &AtomicTransformation::new(9, mv(Direction::E, 1)), ApplyMode::Loose),
            Err(ApplyError::ObjectNotFound { object_id: 9 })
        );
    }

    #[test]
    fn empty_sequence_is_identity() {
        let (s, _, _) = dependency_scene();
        let out = apply_sequence(&s, &[], ApplyMode::Strict);
        assert_eq!(out.scene, s);
        assert!(out.statuses.is_empty());
    }

    #[test]
    fn dependent_moves_only_work_in_one_order() {
        let (s, a, b) = dependency_scene();
        let ok = apply_sequence(&s, &[a, b], ApplyMode::Strict);
        assert!(ok.all_applied());
        assert!(ok.scene.is_valid());

        let bad = apply_sequence(&s, &[b, a], ApplyMode::Strict);
        assert!(bad.statuses[0].is_err());
        assert!(bad.statuses[1].is_ok());
        assert_eq!(bad.failed_steps(), 1);

        let loose = apply_sequence(&s, &[b, a], ApplyMode::Loose);
        assert!(loose.all_applied());
        assert_eq!(loose.scene, ok.scene);
        let mid = apply_atomic(&s, &b, ApplyMode::Loose).unwrap();
        assert_eq!(mid.validity().colliding_pairs, vec![(0, 1)]);
    }

    fn arb_value() -> impl Strategy<Value = TransformValue> {
        (0..TransformValue::COUNT).prop_map(|i| TransformValue::from_index(i).unwrap())
    }

    fn arb_scene() -> impl Strategy<Value = SceneGraph> {
        prop::collection::vec((0usize..3, 0usize..8, -40i32..=40, -40i32..=40), 1..6).prop_map(|raw| {
            let objects = raw
                .into_iter()
                .enumerate()
                .map(|(id, (size, color, x, y))| ObjectState {
                    id,
                    size: Size::ALL[size],
                    color: Color::ALL[color],
                    shape: Shape::Cube,
                    material: Material::Glass,
                    position: Position::new(x, y),
                })
                .collect();
            scene(objects)
        })
    }

    proptest! {
        #[test]
        fn application_is_pure_and_frame_invariant(s in arb_scene(), obj in 0usize..6, v in arb_value()) {
            let before = s.clone();
            let t = AtomicTransformation::new(obj, v);
            for mode in [ApplyMode::Strict, ApplyMode::Loose] {
                let first = apply_atomic(&s, &t, mode);
                prop_assert_eq!(&s, &before);
                prop_assert_eq!(&first, &apply_atomic(&s, &t, mode));
                if let Ok(next) = first {
                    for (old, new) in s.objects().iter().zip(next.objects()) {
                        if old.id != obj {
                            prop_assert_eq!(old, new);
                            continue;
                        }
                        if v.is_move() {
                            prop_assert_eq!((old.size, old.color, old.shape, old.material),
                                            (new.size, new.color, new.shape, new.material));
                        } else {
                            prop_assert_eq!(old.position, new.position);
                        }
                    }
                }
            }
        }

        #[test]
        fn strict_success_matches_loose(s in arb_scene(), steps in prop::collection::vec((0usize..6, arb_value()), 0..5)) {
            let steps: Vec<_> = steps.into_iter().map(|(o, v)| AtomicTransformation::new(o, v)).collect();
            let strict = apply_sequence(&s, &steps, ApplyMode::Strict);
            if strict.all_applied() {
                let loose = apply_sequence(&s, &steps, ApplyMode::Loose);
                prop_assert_eq!(strict.scene, loose.scene);
            }
        }

        #[test]
        fn opposite_moves_cancel_in_loose_mode(s in arb_scene(), d in 0usize..8, step in 1u8..=2) {
            let obj = 0;
            let there = AtomicTransformation::new(obj, mv(Direction::ALL[d], step));
            let back = AtomicTransformation::new(obj, mv(Direction::ALL[d].opposite(), step));
            let out = apply_sequence(&s, &[there, back], ApplyMode::Loose);
            prop_assert_eq!(out.scene, s);
        }
    }
}
