//! Elliptic curves with everywhere good reduction and rational j-invariant
//! over quadratic fields.

pub mod arith;
pub mod constructor;
pub mod density;
pub mod quadfield;
pub mod reduction;
pub mod setzer;

pub use constructor::{CurveModel, Witness};
pub use density::{CountReport, FamilySpec};
pub use quadfield::{FieldElement, PrimeIdeal, QuadraticField};
pub use reduction::{Kodaira, LocalReduction};
pub use setzer::{EgrVerdict, GoodDRecord, GoodTable, Status};
