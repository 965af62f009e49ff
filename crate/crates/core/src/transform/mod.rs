//! The transformation space and the application function `S x T -> S`.

mod apply;
mod order;
mod solve;
mod value;

pub use apply::{
    apply_atomic, apply_sequence, ApplyError, ApplyMode, AtomicTransformation, ParseAtomicError, SequenceOutcome,
    Transformation,
};
pub use order::{
    answer_space_size, is_order_sensitive, is_order_sensitive_with_budget, SequenceTooLong, DEFAULT_PERMUTATION_BUDGET,
};
pub use solve::{solve, solve_with, SolveError, SolveOptions};
pub use value::{attribute_of, Attribute, Direction, MoveValue, TransformValue, UnknownValue};

pub(crate) use apply::{apply_in_place, resolve_atomic};
