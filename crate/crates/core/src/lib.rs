//! Exact linear-region analysis for ReLU feed-forward networks.
//!
//! A ReLU network computes a continuous piecewise-affine map. Every choice of
//! active/inactive state for the hidden neurons (an [`ActivationPattern`])
//! selects a polyhedral cell of the input space on which the network is a
//! single affine map. This crate:
//!
//! * tracks the network symbolically as a difference of two max-plus
//!   polynomials ([`tropical`]), layer by layer, including additive skip
//!   connections;
//! * turns a pattern into its bounding half-spaces and end-to-end affine map
//!   and enumerates every full-dimensional region with a pruned tree search
//!   ([`regions`]);
//! * decides full-dimensionality with a Chebyshev-ball linear program solved
//!   by a small dense simplex ([`geometry`]);
//! * caches per-region affine maps for fast prediction ([`cache`]);
//! * runs the skip-versus-no-skip region-count comparison with a one-tailed
//!   Mann-Whitney U test ([`stats`], [`experiments`]).

pub mod cache;
pub mod experiments;
pub mod geometry;
pub mod network;
pub mod pattern;
pub mod phi;
pub mod regions;
pub mod stats;
pub mod svg;
pub mod tropical;

pub use cache::{hit_rate, predict, warm_cache, CacheError, Prediction, RegionCache};
pub use geometry::{
    clip_to_polygon, feasible, polygon_area, BoundingBox, Feasibility, FeasibilityStatus,
    GeometryError, HalfSpace,
};
pub use network::{init_kaiming, load_network, save_network, Dense, ForwardTrace, NetworkError, NetworkSpec, Skip};
pub use pattern::{ActivationPattern, PatternError};
pub use phi::{phi_dataset, PhiFunction};
pub use regions::{
    brute_force_enumerate, enumerate_regions, find_linear_region, locate_region, EnumerationOptions,
    LinearRegion, RegionError, RegionOutcome, RegionSet, TraversalStats,
};
pub use stats::{mann_whitney_one_tailed, mann_whitney_with, summarize, Alternative, PValueMethod, Summary, UTestResult};
pub use tropical::{
    initial_state, propagate, select_f, split_pos_neg, trace_pattern, AffineMap, Propagated, SignedSplit, StateChain,
    TropicalError, TropicalLayerState,
};

/// Numerical tolerances shared by every module.
pub mod tol {
    /// Chebyshev radius above which a polyhedron counts as full-dimensional.
    pub const FEASIBILITY: f64 = 1e-7;
    /// Half-spaces whose normal has infinity norm at or below this are constant.
    pub const DEGENERATE_ROW: f64 = 1e-12;
    /// Slack allowed when checking equalities and witness margins.
    pub const EQUALITY: f64 = 1e-9;
    /// Without a bounding box, witnesses are sought within this multiple of
    /// the largest hyperplane distance from the origin (at least 1).
    pub const SEARCH_SCALE: f64 = 1e3;
}
