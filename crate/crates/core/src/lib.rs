//! Triple Product Property (TPP) triples in small finite groups.
//!
//! - [`group`]: Cayley-table groups and the built-in catalog.
//! - [`setcalc`]: element subsets and right quotients.
//! - [`tpp`]: the TPP check, normalization, necessary conditions and bounds.
//! - [`search`]: branch-and-bound search and exhaustive enumeration.
//! - [`realize`]: group-ring arithmetic and matrix multiplication through
//!   a TPP triple.
//! - [`cli`]: the `tppforge` command line.

pub mod cli;
pub mod group;
pub mod realize;
pub mod search;
pub mod setcalc;
pub mod tpp;

pub use group::{build_group, catalog, Element, Group, GroupError, GroupSpec, IDENTITY};
pub use search::{enumerate_all_tpp, search_max_triple, Pruning, SearchConfig, SearchReport};
pub use setcalc::{right_quotient, ElementSet, SetError};
pub use tpp::{
    bounds, minimal_disjointness_ok, normalize, q_intersections_trivial, tpp_check, BoundsReport,
    TppError, TppTriple,
};
