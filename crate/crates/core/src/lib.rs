//! Exact combinatorics of weighted compactifications of configuration spaces.

pub mod arrangements;
pub mod engine;
pub mod git;
pub mod index_set;
pub mod linalg;
pub mod oracle;
pub mod poly;
pub mod rational;
mod strata;
pub mod toric;
pub mod trees;
pub mod weights;

pub use arrangements::{
    factors, heavy_sets, is_nested, relative_order, sha_dimensions, AmbientDescriptor,
    AmbientKind, ArrangementError, BuildingSet, HeavySet, OrderSpec, PartialPartition,
    RelativeOrder,
};
pub use index_set::IndexSet;
pub use poly::PoincarePolynomial;
pub use rational::Rational;
pub use weights::{DomainKind, WeightError, WeightVector};
pub use engine::{
    ambient_poincare, divisor_poincare, run, twist_report, EngineError, EngineResult,
};
