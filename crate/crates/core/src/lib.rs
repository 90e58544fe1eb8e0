//! Subset-minimal sufficient explanations ("PI-explanations") for extended
//! linear classifiers and for naive Bayes classifiers reduced to them.
//!
//! A smallest explanation is found greedily after sorting the per-feature
//! deltas, and all explanations are enumerated by a pruned depth-first
//! search with linear work between consecutive outputs.
//!
//! ```
//! use xlc_explain::{enumerate, find_one, ExplanationProblem, Instance, XlcModel};
//!
//! let model = XlcModel::categorical(-2.5, vec![vec![3.0, 0.0], vec![2.0, 0.0], vec![1.0, 0.0]])?;
//! let problem = ExplanationProblem::derive(&model, &Instance::new(vec![1.0, 1.0, 1.0]))?;
//! assert_eq!(find_one(&problem)?.features(), &[0]);
//! assert_eq!(enumerate(&problem, None).count(), 2);
//! # Ok::<(), xlc_explain::Error>(())
//! ```

pub mod error;
pub mod eval;
pub mod explain;
pub mod io;
pub mod nbc;
pub mod oracle;
pub mod problem;
pub mod synth;
pub mod xlc;

pub use error::{Error, Result};
pub use eval::{frequency, hit_score, top_common, FeatureFrequency};
pub use explain::{
    backtrack_to_valid, delay_probe, enumerate, find_one, EnumerationState, Enumerator, Flip,
    PiExplanation, Step,
};
pub use nbc::{train, LabeledDataset, NbcFeature, NbcModel, Priors};
pub use oracle::{all_minimal_explanations, entails, nbc_predict_direct, OracleResult};
pub use problem::ExplanationProblem;
pub use xlc::{ClassLabel, Feature, FeatureSpec, Instance, Literal, Relation, XlcModel};
