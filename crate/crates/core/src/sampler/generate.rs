use std::collections::HashSet;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::balance::{pick_balanced, CountTable, NGramTable};
use super::config::{GeneratorConfig, GeneratorConfigError, ViewMode};
use super::{MoveType, Sample, Setting, View};
use crate::scene::{Color, Material, ObjectState, Position, SceneGraph, Shape, Size};
use crate::transform::{
    apply_in_place, apply_sequence, resolve_atomic, ApplyMode, AtomicTransformation, Attribute, TransformValue,
    Transformation,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SampleError {
    #[error(transparent)]
    Config(#[from] GeneratorConfigError),
    #[error("could not place object {object_id} after {attempts} attempts; the configuration is too dense")]
    PlacementFailure { object_id: usize, attempts: usize },
    #[error("no admissible atomic transformation at step {step} of {length}")]
    SamplingFailure { step: usize, length: usize },
}

/// All count tables driving balanced generation.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplerTables {
    pub visible_count: CountTable,
    pub size: CountTable,
    pub color: CountTable,
    pub shape: CountTable,
    pub material: CountTable,
    pub length: CountTable,
    pub object: CountTable,
    pub move_type: CountTable,
    pub values: NGramTable,
}

impl SamplerTables {
    pub fn new(cfg: &GeneratorConfig) -> Self {
        SamplerTables {
            visible_count: CountTable::new("visible_object_count", cfg.visible_count.values().map(|n| n.to_string())),
            size: CountTable::new("size", Size::ALL.iter().map(|v| v.token())),
            color: CountTable::new("color", Color::ALL.iter().map(|v| v.token())),
            shape: CountTable::new("shape", Shape::ALL.iter().map(|v| v.token())),
            material: CountTable::new("material", Material::ALL.iter().map(|v| v.token())),
            length: CountTable::new("transformation_length", cfg.lengths.iter().map(|n| n.to_string())),
            object: CountTable::new("object_number", (0..cfg.objects_per_scene).map(|n| n.to_string())),
            move_type: CountTable::new("move_type", MoveType::ALL.iter().map(|m| m.token())),
            values: NGramTable::new(TransformValue::COUNT, &cfg.ngram_orders),
        }
    }
}

/// Draws a valid scene with balanced visible count and attribute values.
pub fn sample_scene<R: Rng + ?Sized>(
    cfg: &GeneratorConfig,
    tables: &mut SamplerTables,
    rng: &mut R,
) -> Result<SceneGraph, SampleError> {
    let t = cfg.tolerance;
    let plane = cfg.plane;
    let n = cfg.objects_per_scene;
    let visible = cfg.visible_count.min + tables.visible_count.balanced_sample_all(t, rng);
    let mut shown = vec![false; n];
    for i in index::sample(rng, n, visible) {
        shown[i] = true;
    }

    let mut scene = SceneGraph::empty(plane);
    let mut objects: Vec<ObjectState> = Vec::with_capacity(n);
    for (id, &is_shown) in shown.iter().enumerate() {
        let mut object = ObjectState {
            id,
            size: Size::ALL[tables.size.balanced_sample_all(t, rng)],
            color: Color::ALL[tables.color.balanced_sample_all(t, rng)],
            shape: Shape::ALL[tables.shape.balanced_sample_all(t, rng)],
            material: Material::ALL[tables.material.balanced_sample_all(t, rng)],
            position: Position::new(0, 0),
        };
        let mut placed = false;
        for _ in 0..cfg.max_retries.max(1) {
            object.position = if is_shown {
                let b = plane.visible_bound;
                Position::new(rng.gen_range(-b..=b), rng.gen_range(-b..=b))
            } else {
                hidden_position(&plane, rng)
            };
            if scene.collides_with_others(&object).is_none() {
                placed = true;
                break;
            }
        }
        if !placed {
            return Err(SampleError::PlacementFailure { object_id: id, attempts: cfg.max_retries.max(1) });
        }
        objects.push(object);
        scene = SceneGraph::new(objects.clone(), plane).expect("ids assigned in order");
    }
    Ok(scene)
}

fn hidden_position<R: Rng + ?Sized>(plane: &crate::scene::PlaneConfig, rng: &mut R) -> Position {
    let b = plane.plane_bound;
    loop {
        let p = Position::new(rng.gen_range(-b..=b), rng.gen_range(-b..=b));
        if !crate::scene::is_visible(p, plane) {
            return p;
        }
    }
}

/// An admissible next step and how it moves the object, if it does.
#[derive(Debug, Clone, Copy)]
struct Candidate {
    object_id: usize,
    value: usize,
    move_type: Option<MoveType>,
}

fn admissible_steps(
    scene: &SceneGraph,
    used: &HashSet<(usize, Attribute)>,
    recolored: &HashSet<usize>,
) -> Vec<Candidate> {
    let cfg = scene.config();
    let mut out = Vec::new();
    for object in scene.objects() {
        let seen = object.is_visible(cfg);
        for value in TransformValue::all() {
            if used.contains(&(object.id, value.attribute())) {
                continue;
            }
            // intrinsic changes of hidden objects are unobservable
            if !value.is_move() && !seen {
                continue;
            }
            let t = AtomicTransformation::new(object.id, value);
            let Ok(next) = resolve_atomic(scene, &t, ApplyMode::Strict) else {
                continue;
            };
            let move_type = if value.is_move() {
                match MoveType::classify(object.position, next.position, cfg) {
                    None => continue,
                    // an intrinsic change would be hidden by leaving afterwards
                    Some(MoveType::Out) if recolored.contains(&object.id) => continue,
                    other => other,
                }
            } else {
                None
            };
            out.push(Candidate { object_id: object.id, value: value.index(), move_type });
        }
    }
    out
}

/// Draws a reference transformation for `scene` with balanced length, objects,
/// values and move types. Every step is valid under strict application.
pub fn sample_transformation<R: Rng + ?Sized>(
    scene: &SceneGraph,
    tables: &mut SamplerTables,
    cfg: &GeneratorConfig,
    rng: &mut R,
) -> Result<Transformation, SampleError> {
    let t = cfg.tolerance;
    let length = cfg.lengths[tables.length.balanced_sample_all(t, rng)];
    let mut current = scene.clone();
    let mut steps = Vec::with_capacity(length);
    let mut history: Vec<usize> = Vec::with_capacity(length);
    let mut used = HashSet::new();
    let mut recolored = HashSet::new();

    for step in 0..length {
        let candidates = admissible_steps(&current, &used, &recolored);
        if candidates.is_empty() {
            return Err(SampleError::SamplingFailure { step, length });
        }

        let values = distinct(candidates.iter().map(|c| c.value));
        let row = tables.values.row(&history);
        let row_counts: Vec<u64> = values.iter().map(|&v| row[v]).collect();
        let mut value = values[pick_balanced(&row_counts, t, rng)];

        // The move type is drawn over every type some move can realise here.
        // If the drawn value cannot realise it, the value is redrawn among the
        // move values that can.
        let move_type = if TransformValue::from_index(value).is_some_and(|v| v.is_move()) {
            let types = distinct(candidates.iter().filter_map(|c| c.move_type.map(|m| m as usize)));
            let m = MoveType::ALL[tables.move_type.choose(&types, t, rng)];
            if !candidates.iter().any(|c| c.value == value && c.move_type == Some(m)) {
                let able = distinct(candidates.iter().filter(|c| c.move_type == Some(m)).map(|c| c.value));
                let able_counts: Vec<u64> = able.iter().map(|&v| row[v]).collect();
                value = able[pick_balanced(&able_counts, t, rng)];
            }
            Some(m)
        } else {
            None
        };

        let objects: Vec<usize> =
            candidates.iter().filter(|c| c.value == value && c.move_type == move_type).map(|c| c.object_id).collect();
        let object_id = tables.object.choose(&objects, t, rng);

        tables.values.record(&history, value);
        tables.object.record(object_id);
        if let Some(m) = move_type {
            tables.move_type.record(m as usize);
        }

        let value = TransformValue::from_index(value).expect("candidate values are in range");
        let atomic = AtomicTransformation::new(object_id, value);
        apply_in_place(&mut current, &atomic, ApplyMode::Strict).expect("candidates were checked");
        used.insert((object_id, value.attribute()));
        if !value.is_move() {
            recolored.insert(object_id);
        }
        history.push(value.index());
        steps.push(atomic);
    }
    Ok(Transformation(steps))
}

fn distinct(items: impl Iterator<Item = usize>) -> Vec<usize> {
    let mut v: Vec<usize> = items.collect();
    v.sort_unstable();
    v.dedup();
    v
}

fn sample_id(seed: u64, seq: u64) -> String {
    format!("s{seed}-{seq:07}")
}

/// Generates the `seq`-th Event sample of a run. Failed attempts are retried
/// with a fresh scene; their draws are rolled back out of the count tables.
pub fn generate_sample<R: Rng + ?Sized>(
    cfg: &GeneratorConfig,
    tables: &mut SamplerTables,
    rng: &mut R,
    seq: u64,
) -> Result<Sample, SampleError> {
    let mut last_err = None;
    for _ in 0..cfg.max_retries.max(1) {
        let snapshot = tables.clone();
        let attempt = sample_scene(cfg, tables, rng)
            .and_then(|scene| sample_transformation(&scene, tables, cfg, rng).map(|t| (scene, t)));
        match attempt {
            Ok((initial, reference)) => {
                let outcome = apply_sequence(&initial, &reference, ApplyMode::Strict);
                debug_assert!(outcome.all_applied());
                return Ok(Sample {
                    id: sample_id(cfg.seed, seq),
                    setting: Setting::Event,
                    view: View::Center,
                    initial,
                    final_scene: outcome.scene,
                    reference,
                    split: String::new(),
                });
            }
            Err(err) => {
                *tables = snapshot;
                last_err = Some(err);
            }
        }
    }
    Err(last_err.expect("at least one attempt"))
}

/// Keeps the one-step samples and relabels them as Basic.
pub fn derive_basic(samples: &[Sample]) -> Vec<Sample> {
    samples
        .iter()
        .filter(|s| s.setting == Setting::Event && s.reference.len() == 1)
        .map(|s| Sample { setting: Setting::Basic, ..s.clone() })
        .collect()
}

/// Turns an Event sample into View samples: one per camera, or one random camera.
pub fn expand_views<R: Rng + ?Sized>(sample: &Sample, mode: ViewMode, rng: &mut R) -> Vec<Sample> {
    let relabel = |view: View| Sample {
        id: format!("{}-{}", sample.id, view.token()),
        setting: Setting::View,
        view,
        ..sample.clone()
    };
    match mode {
        ViewMode::Exhaustive => View::ALL.iter().map(|v| relabel(*v)).collect(),
        ViewMode::Sampled => vec![relabel(View::ALL[rng.gen_range(0..View::ALL.len())])],
    }
}

/// Generates every split of `cfg`, in order, from a single seeded stream.
///
/// Sizes count Event draws for the Event and View settings (View emits three
/// samples per draw in exhaustive mode) and retained samples for Basic.
pub fn generate_dataset(cfg: &GeneratorConfig) -> Result<Vec<Sample>, SampleError> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut tables = SamplerTables::new(cfg);
    let mut seq = 0u64;
    let mut out = Vec::new();
    for split in &cfg.splits {
        let mut kept = 0;
        while kept < split.size {
            let mut sample = generate_sample(cfg, &mut tables, &mut rng, seq)?;
            seq += 1;
            sample.split = split.name.clone();
            match cfg.setting {
                Setting::Event => out.push(sample),
                Setting::Basic => {
                    let basic = derive_basic(std::slice::from_ref(&sample));
                    if basic.is_empty() {
                        continue;
                    }
                    out.extend(basic);
                }
                Setting::View => out.extend(expand_views(&sample, cfg.view_mode, &mut rng)),
            }
            kept += 1;
        }
    }
    Ok(out)
}
