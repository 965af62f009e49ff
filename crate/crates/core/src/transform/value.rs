use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::scene::{Color, Material, Shape, Size};

/// Compass direction of a move. `N` is `+y`, `E` is `+x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    N,
    NE,
    E,
    SE,
    S,
    SW,
    W,
    NW,
}

impl Direction {
    /// Clockwise from north.
    pub const ALL: [Direction; 8] = [
        Direction::N,
        Direction::NE,
        Direction::E,
        Direction::SE,
        Direction::S,
        Direction::SW,
        Direction::W,
        Direction::NW,
    ];

    pub fn unit(self) -> (i32, i32) {
        match self {
            Direction::N => (0, 1),
            Direction::NE => (1, 1),
            Direction::E => (1, 0),
            Direction::SE => (1, -1),
            Direction::S => (0, -1),
            Direction::SW => (-1, -1),
            Direction::W => (-1, 0),
            Direction::NW => (-1, 1),
        }
    }

    pub fn token(self) -> &'static str {
        match self {
            Direction::N => "N",
            Direction::NE => "NE",
            Direction::E => "E",
            Direction::SE => "SE",
            Direction::S => "S",
            Direction::SW => "SW",
            Direction::W => "W",
            Direction::NW => "NW",
        }
    }

    pub fn opposite(self) -> Direction {
        Direction::ALL[(self as usize + 4) % 8]
    }
}

/// A relative move: direction and a step count of 1 or 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MoveValue {
    direction: Direction,
    step: u8,
}

impl MoveValue {
    pub const STEPS: [u8; 2] = [1, 2];

    /// Returns `None` unless `step` is 1 or 2.
    pub fn new(direction: Direction, step: u8) -> Option<Self> {
        Self::STEPS.contains(&step).then_some(MoveValue { direction, step })
    }

    pub fn direction(self) -> Direction {
        self.direction
    }

    pub fn step(self) -> u8 {
        self.step
    }

    /// Displacement on the plane. Diagonals move `step * step_unit` along both axes.
    pub fn displacement(self, step_unit: i32) -> (i32, i32) {
        let (dx, dy) = self.direction.unit();
        let len = i32::from(self.step) * step_unit;
        (dx * len, dy * len)
    }

    /// The single move with displacement `(dx, dy)`, if there is one.
    pub fn from_displacement(dx: i32, dy: i32, step_unit: i32) -> Option<Self> {
        Direction::ALL.iter().find_map(|d| {
            Self::STEPS.iter().find_map(|s| {
                let m = MoveValue { direction: *d, step: *s };
                (m.displacement(step_unit) == (dx, dy)).then_some(m)
            })
        })
    }
}

/// Attribute touched by a transformation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Attribute {
    Size,
    Color,
    Shape,
    Material,
    Position,
}

impl Attribute {
    pub const ALL: [Attribute; 5] =
        [Attribute::Size, Attribute::Color, Attribute::Shape, Attribute::Material, Attribute::Position];

    pub fn token(self) -> &'static str {
        match self {
            Attribute::Size => "size",
            Attribute::Color => "color",
            Attribute::Shape => "shape",
            Attribute::Material => "material",
            Attribute::Position => "position",
        }
    }
}

impl fmt::Display for Attribute {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

/// Target value of an atomic transformation. The attribute is implied by the value.
///
/// Canonical order (and [`TransformValue::index`]): the 3 sizes, 8 colors,
/// 3 shapes, 3 materials, then 16 moves ordered by direction (clockwise from
/// `N`) and step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TransformValue {
    Size(Size),
    Color(Color),
    Shape(Shape),
    Material(Material),
    Move(MoveValue),
}

const MOVE_OFFSET: usize = 3 + 8 + 3 + 3;

impl TransformValue {
    pub const COUNT: usize = MOVE_OFFSET + 16;

    pub fn all() -> impl Iterator<Item = TransformValue> + Clone {
        (0..Self::COUNT).map(|i| Self::from_index(i).expect("index in range"))
    }

    pub fn attribute(self) -> Attribute {
        match self {
            TransformValue::Size(_) => Attribute::Size,
            TransformValue::Color(_) => Attribute::Color,
            TransformValue::Shape(_) => Attribute::Shape,
            TransformValue::Material(_) => Attribute::Material,
            TransformValue::Move(_) => Attribute::Position,
        }
    }

    pub fn index(self) -> usize {
        match self {
            TransformValue::Size(v) => v.index(),
            TransformValue::Color(v) => 3 + v.index(),
            TransformValue::Shape(v) => 11 + v.index(),
            TransformValue::Material(v) => 14 + v.index(),
            TransformValue::Move(m) => MOVE_OFFSET + 2 * (m.direction as usize) + usize::from(m.step - 1),
        }
    }

    pub fn from_index(index: usize) -> Option<Self> {
        Some(match index {
            0..=2 => TransformValue::Size(Size::ALL[index]),
            3..=10 => TransformValue::Color(Color::ALL[index - 3]),
            11..=13 => TransformValue::Shape(Shape::ALL[index - 11]),
            14..=16 => TransformValue::Material(Material::ALL[index - 14]),
            i if i < Self::COUNT => {
                let k = i - MOVE_OFFSET;
                TransformValue::Move(MoveValue { direction: Direction::ALL[k / 2], step: (k % 2 + 1) as u8 })
            }
            _ => return None,
        })
    }

    pub fn as_move(self) -> Option<MoveValue> {
        match self {
            TransformValue::Move(m) => Some(m),
            _ => None,
        }
    }

    pub fn is_move(self) -> bool {
        matches!(self, TransformValue::Move(_))
    }

    /// Token such as `blue`, `glass` or `move_NE_2`.
    pub fn token(self) -> String {
        match self {
            TransformValue::Size(v) => v.token().to_string(),
            TransformValue::Color(v) => v.token().to_string(),
            TransformValue::Shape(v) => v.token().to_string(),
            TransformValue::Material(v) => v.token().to_string(),
            TransformValue::Move(m) => format!("move_{}_{}", m.direction.token(), m.step),
        }
    }
}

/// Shorthand for `attribute_of`.
pub fn attribute_of(value: TransformValue) -> Attribute {
    value.attribute()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown transformation value `{0}`")]
pub struct UnknownValue(pub String);

impl FromStr for TransformValue {
    type Err = UnknownValue;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if let Some(rest) = s.strip_prefix("move_") {
            let (dir, step) = rest.rsplit_once('_').ok_or_else(|| UnknownValue(s.to_string()))?;
            let direction =
                Direction::ALL.iter().copied().find(|d| d.token() == dir).ok_or_else(|| UnknownValue(s.to_string()))?;
            let step: u8 = step.parse().map_err(|_| UnknownValue(s.to_string()))?;
            return MoveValue::new(direction, step)
                .map(TransformValue::Move)
                .ok_or_else(|| UnknownValue(s.to_string()));
        }
        if let Ok(v) = s.parse() {
            return Ok(TransformValue::Size(v));
        }
        if let Ok(v) = s.parse() {
            return Ok(TransformValue::Color(v));
        }
        if let Ok(v) = s.parse() {
            return Ok(TransformValue::Shape(v));
        }
        if let Ok(v) = s.parse() {
            return Ok(TransformValue::Material(v));
        }
        Err(UnknownValue(s.to_string()))
    }
}

impl fmt::Display for TransformValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.token())
    }
}

impl Serialize for TransformValue {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.token())
    }
}

impl<'de> Deserialize<'de> for TransformValue {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let token = String::deserialize(deserializer)?;
        token.parse().map_err(serde::de::Error::custom)
    }
}
