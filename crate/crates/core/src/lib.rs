//! Incremental conceptual clustering (COBWEB) with three interchangeable
//! category-utility evaluators:
//!
//! * nominal: exact value frequencies,
//! * rectangular: numeric attributes binned onto a grid, then counted,
//! * Gaussian: numeric attributes with graded membership at every grid node.
//!
//! Evaluators are generic over the scalar type. Counting-based scores accept
//! exact rationals ([`Rational`]); anything touching the Gaussian kernel
//! needs `f32` or `f64`.
//!
//! ```
//! use cobweb_core::{AttributeDecl, Dataset, Hierarchy64, HierarchyConfig, Instance, Schema};
//!
//! let schema = Schema::new(vec![AttributeDecl::numeric("x")]).unwrap();
//! let data = Dataset::new(
//!     schema,
//!     [0.0, 0.3, 10.0, 10.4].map(|x| Instance::numeric([x])).to_vec(),
//! )
//! .unwrap();
//! let tree = Hierarchy64::fit(&data, HierarchyConfig::default()).unwrap();
//! assert_eq!(tree.len(), 4);
//! ```

pub mod error;
pub mod export;
pub mod grid;
pub mod membership;
pub mod metrics;
pub mod partition;
pub mod scalar;
pub mod schema;
pub mod stats;
pub mod tree;
pub mod utility;

pub use error::{Error, Result};
pub use export::{NodeSnapshot, TreeSnapshot, SNAPSHOT_FORMAT};
pub use grid::{build_grid, build_grid_with_layout, Grid, GridLayout, SigmaPolicy, SIGMA_FLOOR};
pub use membership::{
    gaussian_membership, membership_vector, rectangular_cell, rectangular_membership,
    MembershipKind,
};
pub use metrics::adjusted_rand_index;
pub use partition::Partition;
pub use scalar::{Real, Scalar};
pub use schema::{
    validate_instance, AttributeDecl, AttributeKind, Dataset, Instance, Schema, Value,
};
pub use stats::{ClusterStats, Profile};
pub use tree::{
    ConceptNode, GridBounds, Hierarchy, HierarchyConfig, InsertTrace, LevelTrace, Move, MoveScores,
    MoveScoring, NodeId, ScoredMove,
};
pub use utility::{
    fuzzy_cu, fuzzy_predictability, fuzzy_predictiveness, fuzzy_weight, mixed_cu, nominal_cu,
    report_from_stats, UtilityReport, UtilityTerm,
};

/// Exact rational scalar for counting-based utilities.
pub type Rational = num_rational::Ratio<i64>;

pub type Grid64 = Grid<f64>;
pub type Dataset64 = Dataset<f64>;
pub type Hierarchy64 = Hierarchy<f64>;
pub type Hierarchy32 = Hierarchy<f32>;
pub type UtilityReport64 = UtilityReport<f64>;
pub type RationalReport = UtilityReport<Rational>;
