//! K-fold cross-validation with averaged, row-normalised confusion matrices.

mod confusion;
mod crossval;
mod folds;
mod report;

pub use confusion::ConfusionMatrix;
pub use crossval::{cross_validate, EvalReport, KnnConfig};
pub use folds::{make_folds, make_folds_for_labels, FoldPlan};
pub use report::{format_accuracy, parse_report_csv, render_report, ReportFormat};
