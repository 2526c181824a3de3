//! Exact combinatorics for the Ulam metric on permutations.
//!
//! The Ulam (deletion) distance between two permutations of `{1..n}` is the
//! least number of symbols that must be deleted from both before the
//! remaining strings agree. This crate computes distances, balls and ball
//! intersections, the vertex-cover view of common deletion sets, exact
//! closed-form bounds, and the maximum size `f_k(n)` of a family of
//! diameter at most `k`.
//!
//! Modules:
//! - [`perm`]: permutations, deletion, relabeling, LIS, distance, ranks.
//! - [`graph`], [`cover`]: inversion graphs, the disagreement graph of two
//!   permutations, minimum vertex covers and cover censuses.
//! - [`bounds`]: arbitrary-precision evaluation of the size bounds.
//! - [`enumeration`]: exhaustive scans of `S_n`.
//! - [`anticode`], [`clique`]: cylinders, lifting and exact search.

pub mod anticode;
pub mod bits;
pub mod bounds;
pub mod clique;
pub mod cover;
pub mod enumeration;
mod error;
pub mod graph;
pub mod perm;

pub use anticode::{
    compatibility_graph, cylinder, family_diameter, is_cylinder, max_anticode, tensor_lift,
    verify_conjecture, ConjectureReport, Family, SearchCap, SearchReport, SearchStatus, Verdict,
};
pub use bounds::BigCount;
pub use cover::{
    count_vertex_covers, cover_count_bound, covers_via_encoding, is_vertex_cover, min_vertex_cover,
    MinCover,
};
pub use enumeration::{
    ball_intersection, ball_size, sphere_sizes, transposition_pair, BallSpec, DistanceProfile,
    ScanCap,
};
pub use error::{Error, Result};
pub use graph::{inversion_graph, ulam_graph, UndirectedGraph};
pub use perm::{
    enumerate_permutations, lis, ulam_distance, ulam_distance_oracle, Permutation, Sequence,
    SymbolSet,
};
