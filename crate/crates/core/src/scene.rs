//! Objects, attribute vocabularies and the bounded integer plane they live on.
//!
//! A scene is a fixed set of objects with stable ids. Each object carries four
//! intrinsic attributes (size, color, shape, material) and an integer position.
//! The plane is a closed square `|x|, |y| <= plane_bound`; the centered square
//! `|x|, |y| <= visible_bound` is the part a camera sees. Objects are modelled
//! as discs whose radius depends on their size, and two objects overlap when
//! their centers are closer than the sum of their radii.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Error raised when parsing an attribute token.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown {kind} token `{token}`")]
pub struct UnknownToken {
    pub kind: &'static str,
    pub token: String,
}

macro_rules! vocabulary {
    ($(#[$meta:meta])* $name:ident, $kind:literal, [$($variant:ident => $token:literal),+ $(,)?]) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        #[serde(rename_all = "lowercase")]
        pub enum $name {
            $($variant),+
        }

        impl $name {
            /// Every member in canonical order.
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn token(self) -> &'static str {
                match self {
                    $($name::$variant => $token),+
                }
            }

            /// Position of this member in [`Self::ALL`].
            pub fn index(self) -> usize {
                self as usize
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.token())
            }
        }

        impl FromStr for $name {
            type Err = UnknownToken;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                match s {
                    $($token => Ok($name::$variant),)+
                    _ => Err(UnknownToken { kind: $kind, token: s.to_string() }),
                }
            }
        }
    };
}

vocabulary!(
    /// Object size; also selects the collision radius.
    Size, "size", [Small => "small", Medium => "medium", Large => "large"]
);

vocabulary!(
    Color, "color", [
        Gray => "gray",
        Red => "red",
        Blue => "blue",
        Green => "green",
        Brown => "brown",
        Purple => "purple",
        Cyan => "cyan",
        Yellow => "yellow",
    ]
);

vocabulary!(Shape, "shape", [Cube => "cube", Sphere => "sphere", Cylinder => "cylinder"]);

vocabulary!(Material, "material", [Rubber => "rubber", Metal => "metal", Glass => "glass"]);

/// Integer coordinates on the plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Position {
    pub x: i32,
    pub y: i32,
}

impl Position {
    pub const fn new(x: i32, y: i32) -> Self {
        Position { x, y }
    }

    pub fn offset(self, dx: i32, dy: i32) -> Self {
        Position::new(self.x + dx, self.y + dy)
    }

    /// Squared Euclidean distance, exact in integer arithmetic.
    pub fn distance_squared(self, other: Position) -> i64 {
        let dx = i64::from(self.x) - i64::from(other.x);
        let dy = i64::from(self.y) - i64::from(other.y);
        dx * dx + dy * dy
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Collision radius per object size, in plane units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollisionRadii {
    pub small: f64,
    pub medium: f64,
    pub large: f64,
}

impl CollisionRadii {
    pub fn radius(&self, size: Size) -> f64 {
        match size {
            Size::Small => self.small,
            Size::Medium => self.medium,
            Size::Large => self.large,
        }
    }
}

impl Default for CollisionRadii {
    fn default() -> Self {
        CollisionRadii { small: 3.0, medium: 4.5, large: 6.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("visible_bound {visible} must satisfy 0 < visible_bound < plane_bound ({plane})")]
    VisibleBound { visible: i32, plane: i32 },
    #[error("collision radii must be positive and strictly increasing with size")]
    Radii,
    #[error("twice the largest radius ({diameter}) must be smaller than visible_bound ({visible})")]
    VisibleTooSmall { diameter: f64, visible: i32 },
    #[error("step_unit must be positive, got {0}")]
    StepUnit(i32),
}

/// Geometry of the plane. Serialized into every dataset manifest.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlaneConfig {
    pub plane_bound: i32,
    pub visible_bound: i32,
    pub collision_radius: CollisionRadii,
    pub step_unit: i32,
}

impl Default for PlaneConfig {
    fn default() -> Self {
        PlaneConfig { plane_bound: 40, visible_bound: 20, collision_radius: CollisionRadii::default(), step_unit: 10 }
    }
}

impl PlaneConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.visible_bound <= 0 || self.visible_bound >= self.plane_bound {
            return Err(ConfigError::VisibleBound { visible: self.visible_bound, plane: self.plane_bound });
        }
        let r = &self.collision_radius;
        if !(r.small > 0.0 && r.small < r.medium && r.medium < r.large) {
            return Err(ConfigError::Radii);
        }
        if 2.0 * r.large >= f64::from(self.visible_bound) {
            return Err(ConfigError::VisibleTooSmall { diameter: 2.0 * r.large, visible: self.visible_bound });
        }
        if self.step_unit <= 0 {
            return Err(ConfigError::StepUnit(self.step_unit));
        }
        Ok(())
    }

    pub fn radius(&self, size: Size) -> f64 {
        self.collision_radius.radius(size)
    }

    pub fn in_plane(&self, p: Position) -> bool {
        p.x.abs() <= self.plane_bound && p.y.abs() <= self.plane_bound
    }
}

/// True iff `p` lies in the closed visible square. Out-of-plane points are never visible.
pub fn is_visible(p: Position, cfg: &PlaneConfig) -> bool {
    cfg.in_plane(p) && p.x.abs() <= cfg.visible_bound && p.y.abs() <= cfg.visible_bound
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ObjectState {
    pub id: usize,
    pub size: Size,
    pub color: Color,
    pub shape: Shape,
    pub material: Material,
    pub position: Position,
}

impl ObjectState {
    pub fn is_visible(&self, cfg: &PlaneConfig) -> bool {
        is_visible(self.position, cfg)
    }
}

/// Disc overlap test: centers strictly closer than the sum of the radii.
pub fn collides(a: &ObjectState, b: &ObjectState, cfg: &PlaneConfig) -> bool {
    let reach = cfg.radius(a.size) + cfg.radius(b.size);
    (a.position.distance_squared(b.position) as f64) < reach * reach
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SceneError {
    #[error("object at index {index} has id {id}; ids must be 0..n-1 in order")]
    BadId { index: usize, id: usize },
}

/// The state `S`: objects ordered by id, together with the plane they live on.
#[derive(Debug, Clone, PartialEq)]
pub struct SceneGraph {
    objects: Vec<ObjectState>,
    config: PlaneConfig,
}

impl SceneGraph {
    /// Builds a scene, checking that ids run 0..n-1 in order. Geometry is not
    /// checked here; use [`SceneGraph::validity`] for that.
    pub fn new(objects: Vec<ObjectState>, config: PlaneConfig) -> Result<Self, SceneError> {
        for (index, object) in objects.iter().enumerate() {
            if object.id != index {
                return Err(SceneError::BadId { index, id: object.id });
            }
        }
        Ok(SceneGraph { objects, config })
    }

    pub fn empty(config: PlaneConfig) -> Self {
        SceneGraph { objects: Vec::new(), config }
    }

    pub fn objects(&self) -> &[ObjectState] {
        &self.objects
    }

    pub fn object(&self, id: usize) -> Option<&ObjectState> {
        self.objects.get(id)
    }

    pub(crate) fn object_mut(&mut self, id: usize) -> Option<&mut ObjectState> {
        self.objects.get_mut(id)
    }

    pub fn config(&self) -> &PlaneConfig {
        &self.config
    }

    pub fn len(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }

    pub fn visible_count(&self) -> usize {
        self.objects.iter().filter(|o| o.is_visible(&self.config)).count()
    }

    /// First member (other than the one sharing its id) that `object` overlaps.
    pub fn collides_with_others(&self, object: &ObjectState) -> Option<usize> {
        self.objects
            .iter()
            .find(|other| other.id != object.id && collides(object, other, &self.config))
            .map(|other| other.id)
    }

    pub fn validity(&self) -> ValidityReport {
        scene_valid(self)
    }

    pub fn is_valid(&self) -> bool {
        self.validity().is_valid()
    }
}

/// Result of [`scene_valid`].
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidityReport {
    /// Colliding id pairs, each as `(lower, higher)`.
    pub colliding_pairs: Vec<(usize, usize)>,
    pub out_of_plane: Vec<usize>,
}

impl ValidityReport {
    pub fn is_valid(&self) -> bool {
        self.colliding_pairs.is_empty() && self.out_of_plane.is_empty()
    }
}

pub fn scene_valid(scene: &SceneGraph) -> ValidityReport {
    let cfg = scene.config();
    let objects = scene.objects();
    let mut report = ValidityReport::default();
    for (i, a) in objects.iter().enumerate() {
        if !cfg.in_plane(a.position) {
            report.out_of_plane.push(a.id);
        }
        for b in &objects[i + 1..] {
            if collides(a, b, cfg) {
                report.colliding_pairs.push((a.id.min(b.id), a.id.max(b.id)));
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn object(id: usize, size: Size, x: i32, y: i32) -> ObjectState {
        ObjectState {
            id,
            size,
            color: Color::Gray,
            shape: Shape::Cube,
            material: Material::Rubber,
            position: Position::new(x, y),
        }
    }

    #[test]
    fn vocabularies_have_expected_cardinality() {
        assert_eq!(Size::ALL.len(), 3);
        assert_eq!(Color::ALL.len(), 8);
        assert_eq!(Shape::ALL.len(), 3);
        assert_eq!(Material::ALL.len(), 3);
        for c in Color::ALL {
            assert_eq!(c.token().parse::<Color>().unwrap(), *c);
        }
        assert!("violet".parse::<Color>().is_err());
    }

    #[test]
    fn visibility_examples() {
        let cfg = PlaneConfig::default();
        assert!(is_visible(Position::new(0, 0), &cfg));
        assert!(!is_visible(Position::new(21, 0), &cfg));
        assert!(is_visible(Position::new(20, -20), &cfg));
        assert!(!is_visible(Position::new(60, 0), &cfg));
    }

    #[test]
    fn collision_examples() {
        let cfg = PlaneConfig::default();
        assert!(!collides(&object(0, Size::Small, 0, 0), &object(1, Size::Small, 10, 0), &cfg));
        assert!(collides(&object(0, Size::Large, 0, 0), &object(1, Size::Large, 10, 0), &cfg));
        for a in Size::ALL {
            for b in Size::ALL {
                assert!(collides(&object(0, *a, 5, 5), &object(1, *b, 5, 5), &cfg));
            }
        }
        // touching discs do not overlap
        assert!(!collides(&object(0, Size::Large, 0, 0), &object(1, Size::Large, 12, 0), &cfg));
    }

    #[test]
    fn validity_examples() {
        let cfg = PlaneConfig::default();
        assert!(SceneGraph::empty(cfg).is_valid());

        let scene = SceneGraph::new(
            vec![object(0, Size::Large, 0, 0), object(1, Size::Large, 10, 0), object(2, Size::Small, 30, 30)],
            cfg,
        )
        .unwrap();
        let report = scene.validity();
        assert_eq!(report.colliding_pairs, vec![(0, 1)]);
        assert!(report.out_of_plane.is_empty());
        assert!(!report.is_valid());

        let scene = SceneGraph::new(vec![object(0, Size::Small, 41, 0)], cfg).unwrap();
        assert_eq!(scene.validity().out_of_plane, vec![0]);
    }

    #[test]
    fn scene_rejects_unordered_ids() {
        let cfg = PlaneConfig::default();
        let err = SceneGraph::new(vec![object(1, Size::Small, 0, 0)], cfg).unwrap_err();
        assert_eq!(err, SceneError::BadId { index: 0, id: 1 });
    }

    #[test]
    fn config_validation() {
        assert!(PlaneConfig::default().validate().is_ok());
        let cfg = PlaneConfig { visible_bound: 40, ..Default::default() };
        assert!(matches!(cfg.validate(), Err(ConfigError::VisibleBound { .. })));
        let mut cfg = PlaneConfig::default();
        cfg.collision_radius.medium = 3.0;
        assert_eq!(cfg.validate(), Err(ConfigError::Radii));
        let mut cfg = PlaneConfig::default();
        cfg.collision_radius.large = 10.0;
        assert!(matches!(cfg.validate(), Err(ConfigError::VisibleTooSmall { .. })));
    }

    fn arb_size() -> impl Strategy<Value = Size> {
        prop::sample::select(Size::ALL.to_vec())
    }

    proptest! {
        #[test]
        fn visibility_is_sign_symmetric(x in -50i32..=50, y in -50i32..=50) {
            let cfg = PlaneConfig::default();
            let v = is_visible(Position::new(x, y), &cfg);
            prop_assert_eq!(v, is_visible(Position::new(-x, y), &cfg));
            prop_assert_eq!(v, is_visible(Position::new(x, -y), &cfg));
            prop_assert_eq!(v, is_visible(Position::new(-x, -y), &cfg));
        }

        #[test]
        fn collision_is_symmetric(
            sa in arb_size(), sb in arb_size(),
            ax in -40i32..=40, ay in -40i32..=40, bx in -40i32..=40, by in -40i32..=40,
        ) {
            let cfg = PlaneConfig::default();
            let a = object(0, sa, ax, ay);
            let b = object(1, sb, bx, by);
            prop_assert_eq!(collides(&a, &b, &cfg), collides(&b, &a, &cfg));
        }

        #[test]
        fn collision_is_monotone_in_size(
            sa in arb_size(), sb in arb_size(),
            ax in -40i32..=40, ay in -40i32..=40, bx in -40i32..=40, by in -40i32..=40,
        ) {
            let cfg = PlaneConfig::default();
            let base = collides(&object(0, sa, ax, ay), &object(1, sb, bx, by), &cfg);
            for bigger in Size::ALL.iter().filter(|s| **s >= sa) {
                if base {
                    prop_assert!(collides(&object(0, *bigger, ax, ay), &object(1, sb, bx, by), &cfg));
                }
            }
        }
    }
}
