//! UniMorph feature schemas, dataset I/O, segmentation, paradigms,
//! derivations and Universal Dependencies evaluation.

pub mod dataset;
pub mod derivation;
pub mod diagnostic;
pub mod paradigm;
pub mod schema;
pub mod segment;
pub mod udeval;

pub use schema::{
    bundles_equal, FeatureBundle, FeatureNode, FeatureTag, Inventory, LanguageProfile,
};
