//! Cut and project sets, their acceptance domains and shape deformations,
//! with exact arithmetic in a real quadratic field.

pub mod acceptance;
pub mod config;
pub mod deform;
pub mod error;
pub mod intervals;
pub mod quadfield;
pub mod report;
pub mod scalar;
pub mod scheme;
pub mod substitution;

pub use config::{Mode, RunConfig};
pub use error::{Error, ErrorKind, Result};
pub use intervals::{Interval, IntervalSet, Location};
pub use quadfield::{FieldError, QuadField, QuadReal, Rational};
pub use scalar::{Scalar, FLOAT_TOLERANCE};
pub use scheme::{
    BoundaryConvention, Cell, CutProjectScheme, LatticePoint, PhysBox, PointSample, TorsionElem, WindowRegion, Xi,
};
pub use substitution::SubstitutionSystem;
