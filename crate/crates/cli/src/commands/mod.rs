pub mod assist;
pub mod evaluate;
pub mod ingest;
pub mod learn;
pub mod predict;

use nextact_core::ausm::PredictionResult;

/// Prints a ranked prediction, one suggestion per line.
pub(crate) fn print_prediction(result: &PredictionResult) {
    if result.fallback {
        println!("[fallback] no known current action; ranking by the next-action marginal");
    }
    for (rank, entry) in result.entries.iter().enumerate() {
        println!(
            "{}. {} {:.6} {} {}",
            rank + 1,
            entry.action,
            entry.probability,
            entry.topic_id,
            entry.topic_title
        );
    }
}
