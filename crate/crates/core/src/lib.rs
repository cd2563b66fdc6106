//! Learning classifiers from arbitrary, possibly indefinite, similarity
//! functions.
//!
//! Points are embedded into a *landmarked space* whose coordinates are
//! transferred similarity differences `f(K(x, x⁺) − K(x, x⁻))` against a set
//! of landmark pairs, and a large-margin linear classifier is trained there.
//! The transfer function `f` is chosen from a family by validation
//! ([`ftune`]), landmarks can be picked for diversity ([`landmark::dselect`]),
//! and the [`goodness`] module checks the guarantees behind the construction
//! empirically on planted instances.
//!
//! Module map:
//!
//! * [`data`]: datasets, kernels and train/validation/test splits.
//! * [`transfer`]: antisymmetric transfer functions (ramps, sign, identity).
//! * [`landmark`]: random and diversity-based landmark selection.
//! * [`embedding`]: the landmarked-space embedding and linear decision rule.
//! * [`trainer`]: hinge (dual coordinate descent) and logistic training.
//! * [`ftune`]: transfer-function search, single and per-class.
//! * [`goodness`]: goodness estimators, planted instances, bound verifiers.
//! * [`harness`]: repeated-split experiments, Welch t-tests and reports.
//! * [`synth`]: synthetic datasets used by tests, benches and demos.

pub mod data;
pub mod embedding;
mod error;
pub mod ftune;
pub mod goodness;
pub mod harness;
pub mod landmark;
mod matrix;
pub mod seed;
pub mod synth;
pub mod trainer;
pub mod transfer;

pub use data::{
    BinaryLabels, DataPaths, Dataset, Kernel, KernelKind, KernelSpec, Point, SplitSpec, Splits,
};
pub use embedding::{EmbeddedDataset, LandmarkSource};
pub use error::{Error, Result};
pub use ftune::{BinaryFtune, FtuneResult, FtuneVariant, SingletonFit};
pub use goodness::{GoodnessParams, WeightFunction};
pub use harness::{ExperimentConfig, ExperimentReport, Method};
pub use landmark::{LandmarkPairSet, LandmarkSet, SelectionMode};
pub use matrix::Matrix;
pub use trainer::{LinearModel, LossFunction, LossKind};
pub use transfer::{TransferFamily, TransferFunction};
