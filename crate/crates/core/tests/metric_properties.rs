use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tvr_core::metrics::{aggregate, error_of_order, eval_basic, eval_multi, scene_distance};
use tvr_core::sampler::{generate_dataset, MoveType};
use tvr_core::scene::{is_visible, Color, Material, Shape, Size};
use tvr_core::transform::{AtomicTransformation, TransformValue};
use tvr_core::{GeneratorConfig, ObjectState, PlaneConfig, Position, SceneGraph};

fn arb_object(id: usize) -> impl Strategy<Value = ObjectState> {
    (0..3usize, 0..8usize, 0..3usize, 0..3usize, -40i32..=40, -40i32..=40).prop_map(move |(s, c, sh, m, x, y)| {
        ObjectState {
            id,
            size: Size::ALL[s],
            color: Color::ALL[c],
            shape: Shape::ALL[sh],
            material: Material::ALL[m],
            position: Position::new(x, y),
        }
    })
}

fn arb_scene(n: usize) -> impl Strategy<Value = SceneGraph> {
    (0..n)
        .map(arb_object)
        .collect::<Vec<_>>()
        .prop_map(|objects| SceneGraph::new(objects, PlaneConfig::default()).unwrap())
}

/// Derives a second scene from `a` by perturbing a few attributes, so that
/// equal and near-equal pairs are common.
fn perturbed(a: &SceneGraph, seed: u64) -> SceneGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let objects = a
        .objects()
        .iter()
        .map(|o| {
            let mut o = *o;
            match rng.gen_range(0..8) {
                0 => o.color = Color::ALL[rng.gen_range(0..8)],
                1 => o.size = Size::ALL[rng.gen_range(0..3)],
                2 => o.position = Position::new(rng.gen_range(-40..=40), rng.gen_range(-40..=40)),
                3 => o.material = Material::ALL[rng.gen_range(0..3)],
                _ => {}
            }
            o
        })
        .collect();
    SceneGraph::new(objects, *a.config()).unwrap()
}

/// Equivalence as seen by a camera: every object is hidden in both scenes,
/// or visible in both with identical attributes.
fn visible_equivalent(a: &SceneGraph, b: &SceneGraph) -> bool {
    let cfg = a.config();
    a.objects().iter().zip(b.objects()).all(|(x, y)| {
        let (vx, vy) = (is_visible(x.position, cfg), is_visible(y.position, cfg));
        (!vx && !vy) || (vx && vy && x == y)
    })
}

fn same_visibility(scenes: &[&SceneGraph]) -> bool {
    let cfg = scenes[0].config();
    (0..scenes[0].len()).all(|i| {
        let first = is_visible(scenes[0].objects()[i].position, cfg);
        scenes.iter().all(|s| is_visible(s.objects()[i].position, cfg) == first)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn distance_is_symmetric(a in arb_scene(10), b in arb_scene(10)) {
        prop_assert_eq!(scene_distance(&a, &b).unwrap(), scene_distance(&b, &a).unwrap());
    }

    #[test]
    fn distance_is_zero_iff_visible_equivalent(a in arb_scene(10), seed in any::<u64>()) {
        let b = perturbed(&a, seed);
        let d = scene_distance(&a, &b).unwrap();
        prop_assert_eq!(d == 0, visible_equivalent(&a, &b));
        prop_assert_eq!(scene_distance(&a, &a).unwrap(), 0);
    }

    #[test]
    fn triangle_inequality_when_visibility_agrees(a in arb_scene(6), s1 in any::<u64>(), s2 in any::<u64>()) {
        let b = perturbed(&a, s1);
        let c = perturbed(&a, s2);
        prop_assume!(same_visibility(&[&a, &b, &c]));
        let ab = scene_distance(&a, &b).unwrap();
        let ac = scene_distance(&a, &c).unwrap();
        let cb = scene_distance(&c, &b).unwrap();
        prop_assert!(ab <= ac + cb);
    }
}

#[test]
fn triangle_inequality_fails_across_visibility_changes() {
    let cfg = PlaneConfig::default();
    let obj = |color, x| ObjectState {
        id: 0,
        size: Size::Small,
        color,
        shape: Shape::Cube,
        material: Material::Rubber,
        position: Position::new(x, 0),
    };
    let a = SceneGraph::new(vec![obj(Color::Red, 0)], cfg).unwrap();
    let b = SceneGraph::new(vec![obj(Color::Blue, 30)], cfg).unwrap();
    let c = SceneGraph::new(vec![obj(Color::Red, 30)], cfg).unwrap();
    assert_eq!(scene_distance(&a, &b).unwrap(), 2);
    assert_eq!(scene_distance(&a, &c).unwrap(), 1);
    assert_eq!(scene_distance(&c, &b).unwrap(), 0);
}

fn random_prediction(rng: &mut ChaCha8Rng, objects: usize) -> Vec<AtomicTransformation> {
    let len = rng.gen_range(0..=5);
    (0..len)
        .map(|_| {
            // ids beyond the scene are allowed: they fail in both modes
            let id = rng.gen_range(0..objects + 2);
            AtomicTransformation::new(id, TransformValue::from_index(rng.gen_range(0..33)).unwrap())
        })
        .collect()
}

#[test]
fn random_predictions_respect_metric_identities() {
    let cfg = GeneratorConfig::default().with_seed(21).with_split("test", 1000);
    let samples = generate_dataset(&cfg).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut scores = Vec::new();
    for (i, s) in samples.iter().enumerate() {
        // mix random guesses with partially correct answers
        let pred = match i % 3 {
            0 => random_prediction(&mut rng, s.initial.len()),
            1 => s.reference[..s.reference.len() / 2].to_vec(),
            _ => {
                let mut p = s.reference.0.clone();
                p.reverse();
                p
            }
        };
        let score = eval_multi(&pred, s);
        assert!(!score.strict_correct || score.loose_correct);
        assert_eq!(score.loose_correct, score.distance == 0);
        assert!(score.normalized_distance >= 0.0);
        scores.push(score);
    }
    let report = aggregate(&scores).unwrap();
    assert!(report.acc <= report.lacc);
    assert!((report.eo - error_of_order(report.lacc, report.acc)).abs() < 1e-15);
    for group in &report.by_length {
        assert!(group.metrics.acc <= group.metrics.lacc);
    }
}

#[test]
fn single_step_scores_agree_with_basic_scores() {
    let cfg = GeneratorConfig::default().with_seed(8).with_split("test", 400);
    let samples = generate_dataset(&cfg).unwrap();
    let plane = PlaneConfig::default();
    let mut checked = 0;
    for s in samples.iter().filter(|s| s.reference.len() == 1) {
        let reference = s.reference[0];
        let before = s.initial.object(reference.object_id).unwrap().position;
        let after = s.final_scene.object(reference.object_id).unwrap().position;
        // every move that lands in the margin reproduces a move-out, so exact
        // value agreement is only required for other references
        if MoveType::classify(before, after, &plane) == Some(MoveType::Out) {
            continue;
        }
        for value in TransformValue::all() {
            for object_id in 0..s.initial.len() {
                let pred = AtomicTransformation::new(object_id, value);
                let multi = eval_multi(&[pred], s);
                let basic = eval_basic(&pred, &reference);
                assert_eq!(multi.strict_correct, basic.all_correct, "{} {pred}", s.id);
            }
        }
        checked += 1;
    }
    assert!(checked > 50);
}
