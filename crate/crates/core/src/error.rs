use alloc::string::String;
use core::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Error {
    DuplicateId(String),
    UnknownVertex(String),
    NotAcyclic,
    /// A directed cycle made only of weight-0 arrows; path spaces would be infinite.
    WeightZeroCycle,
    NotDynkin,
    InhomogeneousRelator(String),
    TruncationOverflow { weight: u32, max_weight: u32 },
    FragmentTooSmall { required_depth: usize },
    NotATriangle(String),
    Inconsistent(String),
    InvalidArgument(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DuplicateId(id) => write!(f, "duplicate id `{id}`"),
            Error::UnknownVertex(v) => write!(f, "unknown vertex `{v}`"),
            Error::NotAcyclic => write!(f, "quiver is not acyclic"),
            Error::WeightZeroCycle => write!(f, "quiver has a directed cycle of weight 0"),
            Error::NotDynkin => write!(f, "quiver is not of Dynkin type"),
            Error::InhomogeneousRelator(r) => write!(f, "relator is not bidegree-homogeneous: {r}"),
            Error::TruncationOverflow { weight, max_weight } => {
                write!(f, "weight {weight} exceeds the truncation {max_weight}")
            }
            Error::FragmentTooSmall { required_depth } => {
                write!(f, "knitted fragment too small, depth {required_depth} required")
            }
            Error::NotATriangle(why) => write!(f, "not a recognized triangle: {why}"),
            Error::Inconsistent(why) => write!(f, "internal inconsistency: {why}"),
            Error::InvalidArgument(why) => write!(f, "invalid argument: {why}"),
        }
    }
}

pub type Result<T> = core::result::Result<T, Error>;
