//! Exact workbench for DP-coloring (correspondence coloring): covers of
//! graphs, transversal search and counting, exhaustive color-function and
//! chromatic-number scans, labeling characterizations for cycles, and bad
//! covers of Cartesian products with complete bipartite graphs.

pub mod cover;
pub mod error;
pub mod exhaustive;
pub mod graph;
pub mod labeling;
pub mod product;
pub mod solver;
pub mod verify;

pub use cover::{
    canonical_cover, cover_to_dot, full_completion, make_twister, random_full_cover, relabel,
    subcover, zero_fold_cover, Cover, Relabeling,
};
pub use error::{Error, Result, Violation};
pub use exhaustive::{chi_dp_exhaustive, pdp_exhaustive, ExhaustiveResult, DEFAULT_BUDGET};
pub use graph::{coloring_number, standard_graph, DegeneracyOrdering, Graph, ProductGraph};
pub use labeling::{detect_canonical, detect_twisted_canonical, tree_labeling, LabelKind, LabelingWitness};
pub use solver::{
    count_colorings, enumerate_colorings, find_coloring, greedy_coloring, is_valid_coloring,
    HColoring, SearchStats,
};

use num_bigint::BigUint;

/// Renders a big count as a JSON number when it fits in u64, otherwise as a
/// decimal string.
pub fn biguint_json(value: &BigUint) -> serde_json::Value {
    match u64::try_from(value) {
        Ok(v) => serde_json::Value::from(v),
        Err(_) => serde_json::Value::from(value.to_string()),
    }
}
