//! Exact reconstruction of a transformation from a pair of scenes.
//!
//! The atomics are read off per-object attribute differences, restricted to
//! what is observable: objects hidden in both scenes contribute nothing, and
//! an object that ends up hidden may leave by any move that lands in the
//! hidden margin. An order is then found by depth-first search over the
//! pending atomics, trying lower object ids first, so the first answer found
//! is deterministic.

use thiserror::Error;

use super::apply::{apply_in_place, ApplyMode, AtomicTransformation, Transformation};
use super::value::{Direction, MoveValue, TransformValue};
use crate::scene::{is_visible, ObjectState, SceneGraph};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("scenes do not share the same object ids and plane configuration")]
    MismatchedIds,
    #[error("{count} attribute differences exceed the search budget of {max}")]
    TooManyDiffs { count: usize, max: usize },
    #[error("no ordering of the required atomics satisfies the constraints")]
    Unsolvable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolveOptions {
    pub max_diffs: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { max_diffs: 8 }
    }
}

/// One required change with the values that realise it, preferred first.
#[derive(Debug, Clone)]
struct Pending {
    object_id: usize,
    candidates: Vec<TransformValue>,
}

pub fn solve(initial: &SceneGraph, target: &SceneGraph) -> Result<Transformation, SolveError> {
    solve_with(initial, target, SolveOptions::default())
}

pub fn solve_with(initial: &SceneGraph, target: &SceneGraph, opts: SolveOptions) -> Result<Transformation, SolveError> {
    if initial.len() != target.len() || initial.config() != target.config() {
        return Err(SolveError::MismatchedIds);
    }
    let mut pending = Vec::new();
    for (a, b) in initial.objects().iter().zip(target.objects()) {
        if a.id != b.id {
            return Err(SolveError::MismatchedIds);
        }
        object_diff(a, b, initial, &mut pending)?;
    }
    if pending.len() > opts.max_diffs {
        return Err(SolveError::TooManyDiffs { count: pending.len(), max: opts.max_diffs });
    }

    let mut used = vec![false; pending.len()];
    let mut order = Vec::with_capacity(pending.len());
    if search(initial, &pending, &mut used, &mut order) {
        Ok(Transformation(order))
    } else {
        Err(SolveError::Unsolvable)
    }
}

fn object_diff(a: &ObjectState, b: &ObjectState, scene: &SceneGraph, out: &mut Vec<Pending>) -> Result<(), SolveError> {
    let cfg = scene.config();
    let seen_before = is_visible(a.position, cfg);
    let seen_after = is_visible(b.position, cfg);
    if !seen_before && !seen_after {
        return Ok(());
    }
    let id = a.id;
    let mut push = |value| out.push(Pending { object_id: id, candidates: vec![value] });
    if a.size != b.size {
        push(TransformValue::Size(b.size));
    }
    if a.color != b.color {
        push(TransformValue::Color(b.color));
    }
    if a.shape != b.shape {
        push(TransformValue::Shape(b.shape));
    }
    if a.material != b.material {
        push(TransformValue::Material(b.material));
    }

    if a.position == b.position {
        return Ok(());
    }
    let exact = MoveValue::from_displacement(b.position.x - a.position.x, b.position.y - a.position.y, cfg.step_unit);
    let mut candidates: Vec<TransformValue> = exact.map(TransformValue::Move).into_iter().collect();
    if !seen_after {
        // any move into the hidden margin is observationally the same
        for d in Direction::ALL {
            for s in MoveValue::STEPS {
                let m = MoveValue::new(d, s).expect("valid step");
                let (dx, dy) = m.displacement(cfg.step_unit);
                let p = a.position.offset(dx, dy);
                if Some(m) != exact && cfg.in_plane(p) && !is_visible(p, cfg) {
                    candidates.push(TransformValue::Move(m));
                }
            }
        }
    }
    if candidates.is_empty() {
        return Err(SolveError::Unsolvable);
    }
    out.push(Pending { object_id: id, candidates });
    Ok(())
}

fn search(scene: &SceneGraph, pending: &[Pending], used: &mut [bool], order: &mut Vec<AtomicTransformation>) -> bool {
    if order.len() == pending.len() {
        return true;
    }
    for i in 0..pending.len() {
        if used[i] {
            continue;
        }
        for value in &pending[i].candidates {
            let t = AtomicTransformation::new(pending[i].object_id, *value);
            let mut next = scene.clone();
            if apply_in_place(&mut next, &t, ApplyMode::Strict).is_err() {
                continue;
            }
            used[i] = true;
            order.push(t);
            if search(&next, pending, used, order) {
                return true;
            }
            order.pop();
            used[i] = false;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::{Color, Material, PlaneConfig, Position, Shape, Size};
    use crate::transform::apply::{apply_sequence, ApplyMode};

    fn object(id: usize, size: Size, x: i32, y: i32) -> ObjectState {
        ObjectState {
            id,
            size,
            color: Color::Red,
            shape: Shape::Sphere,
            material: Material::Rubber,
            position: Position::new(x, y),
        }
    }

    fn scene(objects: Vec<ObjectState>) -> SceneGraph {
        SceneGraph::new(objects, PlaneConfig::default()).unwrap()
    }

    fn mv(d: Direction, s: u8) -> TransformValue {
        TransformValue::Move(MoveValue::new(d, s).unwrap())
    }

    #[test]
    fn identical_scenes_need_nothing() {
        let s = scene((0..4).map(|i| object(i, Size::Small, i as i32 * 10 - 15, 0)).collect());
        assert_eq!(solve(&s, &s).unwrap(), Transformation::default());
    }

    #[test]
    fn single_material_change() {
        let objects: Vec<_> = (0..5).map(|i| object(i, Size::Small, i as i32 * 8 - 16, 0)).collect();
        let initial = scene(objects.clone());
        let mut changed = objects;
        changed[3].material = Material::Glass;
        let target = scene(changed);
        let t = solve(&initial, &target).unwrap();
        assert_eq!(t.steps(), &[AtomicTransformation::new(3, TransformValue::Material(Material::Glass))]);
    }

    #[test]
    fn finds_the_only_feasible_order() {
        // object 0 can only move into (10,0) after object 1 has left (0,0)
        let initial = scene(vec![object(0, Size::Large, 20, 0), object(1, Size::Large, 0, 0)]);
        let target = scene(vec![object(0, Size::Large, 10, 0), object(1, Size::Large, -10, 0)]);
        let t = solve(&initial, &target).unwrap();
        let a = AtomicTransformation::new(1, mv(Direction::W, 1));
        let b = AtomicTransformation::new(0, mv(Direction::W, 1));
        assert_eq!(t.steps(), &[a, b]);
        assert!(apply_sequence(&initial, &[a, b], ApplyMode::Strict).all_applied());
        assert!(!apply_sequence(&initial, &[b, a], ApplyMode::Strict).all_applied());
    }

    #[test]
    fn hidden_objects_are_ignored() {
        let initial = scene(vec![object(0, Size::Small, 30, 30)]);
        let mut hidden = object(0, Size::Large, 35, 30);
        hidden.color = Color::Blue;
        let target = scene(vec![hidden]);
        assert_eq!(solve(&initial, &target).unwrap(), Transformation::default());
    }

    #[test]
    fn moving_out_accepts_any_exit() {
        let initial = scene(vec![object(0, Size::Small, 15, 0), object(1, Size::Large, 35, 0)]);
        // (22,0) is not a single move, but the object only has to end up hidden
        let target = scene(vec![object(0, Size::Small, 37, -20), object(1, Size::Large, 35, 0)]);
        let t = solve(&initial, &target).unwrap();
        assert_eq!(t.len(), 1);
        let out = apply_sequence(&initial, &t, ApplyMode::Strict);
        assert!(out.all_applied());
        assert!(!out.scene.object(0).unwrap().is_visible(initial.config()));
    }

    #[test]
    fn error_paths() {
        let a = scene(vec![object(0, Size::Small, 0, 0)]);
        let b = scene(vec![object(0, Size::Small, 0, 0), object(1, Size::Small, 10, 10)]);
        assert_eq!(solve(&a, &b), Err(SolveError::MismatchedIds));

        let jump = scene(vec![object(0, Size::Small, 13, 0)]);
        assert_eq!(solve(&a, &jump), Err(SolveError::Unsolvable));

        let crowded = scene(vec![object(0, Size::Large, 0, 0), object(1, Size::Large, 20, 0)]);
        let swapped = scene(vec![object(0, Size::Large, 20, 0), object(1, Size::Large, 0, 0)]);
        assert_eq!(solve(&crowded, &swapped), Err(SolveError::Unsolvable));

        let mut many = object(0, Size::Large, 0, 0);
        many.color = Color::Blue;
        many.shape = Shape::Cube;
        many.material = Material::Glass;
        let target = scene(vec![many]);
        let initial = scene(vec![object(0, Size::Small, 0, 0)]);
        assert_eq!(
            solve_with(&initial, &target, SolveOptions { max_diffs: 2 }),
            Err(SolveError::TooManyDiffs { count: 4, max: 2 })
        );
    }
}
