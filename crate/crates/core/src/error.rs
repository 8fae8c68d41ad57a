use alloc::vec::Vec;

use crate::data::Violation;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid dataset: {}", first_violation(.0))]
    InvalidDataset(Vec<Violation>),
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: &'static str },
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("subsample size {subsample_size} must be smaller than the number of objects {n_objects}")]
    SubsampleTooLarge { subsample_size: usize, n_objects: usize },
    #[error("empty candidate pool: {0}")]
    EmptyPool(&'static str),
    #[error("scores must be finite and non-negative (index {0})")]
    InvalidScore(usize),
    #[error("labels must contain at least one outlier and one inlier")]
    SingleClass,
    #[error("length mismatch: {0}")]
    LengthMismatch(&'static str),
}

fn first_violation(v: &[Violation]) -> alloc::string::String {
    use alloc::string::ToString;
    match v.first() {
        Some(first) if v.len() > 1 => alloc::format!("{first} (+{} more)", v.len() - 1),
        Some(first) => first.to_string(),
        None => "unknown".into(),
    }
}
