//! Experience-curve cost projections for electrolyzers, electrolytic
//! hydrogen, direct air capture and e-kerosene.

pub mod curves;
pub mod dac;
pub mod ekerosene;
pub mod electrolysis;
pub mod export;
pub mod finance;
pub mod hydrogen;
pub mod range;
pub mod projection;
pub mod scenario;

pub use curves::{CurveError, LearningCurve};
pub use finance::FinancialAssumptions;
pub use range::{Bounds, Corner, ProjectionRange};

pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");

