//! The two scoring functions: a fast short-term KNN and a slow long-term linear SVM.

mod knn;
mod snapshot;
mod store;
mod svm;

pub use knn::KnnModel;
pub use store::{Label, LabeledStore, Retention};
pub use svm::{hinge_objective, SvmModel, TrainReport};
