//! Causal-order discovery and error extraction for linear non-Gaussian SEMs.

mod extract;
mod independence;
mod measure;
mod search;
mod standardize;

pub use extract::{
    apply_extraction, direct_lingam, local_direct_lingam, local_plus, ErrorExtraction, RootFinder,
};
pub use independence::independence_pvalue;
pub(crate) use independence::welch_stats;
pub use measure::{approx_entropy, entropy_max, pairwise_measure, residualize};
pub use search::{
    find_root, find_root_plus, find_root_plus_with_stats, find_root_with_stats, SearchState,
};
pub use standardize::{apply_standardize, standardize, StandardizationParams};
