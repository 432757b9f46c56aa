//! Evaluation protocols: k-fold cross-validation of next-action
//! accuracy, and replay of a session log with a top-1/2/3 hit
//! breakdown.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use crate::ausm::{Ausm, HelpTopicMap, NullSink, QueryError, RecordError};
use crate::bbn::dataset::{records_to_instances, DatasetError, FieldSelection};
use crate::bbn::{Dag, ModelError, Network, PriorConfig};
use crate::event_log::{SessionLog, TransitionRecord};
use crate::inference::predict_next;
use crate::math::sqrt;
use crate::rng::{Xoshiro256, ALGORITHM};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("need at least 2 folds, got {0}")]
    BadFoldCount(usize),
    #[error("{records} records cannot fill {folds} folds")]
    TooFewRecords { records: usize, folds: usize },
    #[error("no records to evaluate")]
    EmptyRecords,
    #[error("top-k must be at least 1")]
    InvalidTopK,
    #[error("fold {fold} has an empty training partition")]
    EmptyTrainingPartition { fold: usize },
    #[error("replay needs a session of at least 3 events, got {events}")]
    SessionTooShort { events: usize },
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Query(#[from] QueryError),
    #[error(transparent)]
    Record(#[from] RecordError),
}

fn pct(count: u64, total: u64) -> f64 {
    if total == 0 {
        0.0
    } else {
        100.0 * count as f64 / total as f64
    }
}

/// Cross-validation outcome: per-fold top-k accuracy, the mean, and a
/// 95% normal-approximation half-width over the folds.
#[derive(Debug, Clone, PartialEq)]
pub struct CvReport {
    pub folds: usize,
    pub fold_accuracy: Vec<f64>,
    pub mean: f64,
    pub half_width: f64,
    pub top_k: usize,
    pub ess: f64,
    pub seed: u64,
}

impl CvReport {
    /// Stable line-oriented text; percentages carry three decimals.
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str("cross-validation report\n");
        out.push_str(&format!("folds: {}\n", self.folds));
        out.push_str(&format!("metric: top-{} accuracy\n", self.top_k));
        out.push_str(&format!("ess: {}\n", self.ess));
        out.push_str(&format!("seed: {}\n", self.seed));
        out.push_str(&format!("rng: {ALGORITHM}\n"));
        out.push_str("fold accuracy:");
        for acc in &self.fold_accuracy {
            out.push_str(&format!(" {:.3}%", acc * 100.0));
        }
        out.push('\n');
        out.push_str(&format!("mean accuracy: {:.3}%\n", self.mean * 100.0));
        out.push_str(&format!(
            "95% half-width: \u{b1}{:.3}%\n",
            self.half_width * 100.0
        ));
        out
    }
}

impl fmt::Display for CvReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Replay outcome: at which rank the performed action appeared among
/// the suggestions, per query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReplayReport {
    pub total: u64,
    pub hit_top1: u64,
    pub hit_top2: u64,
    pub hit_top3: u64,
    pub miss: u64,
}

impl ReplayReport {
    pub fn pct_top1(&self) -> f64 {
        pct(self.hit_top1, self.total)
    }

    pub fn pct_top2(&self) -> f64 {
        pct(self.hit_top2, self.total)
    }

    pub fn pct_top3(&self) -> f64 {
        pct(self.hit_top3, self.total)
    }

    pub fn pct_miss(&self) -> f64 {
        pct(self.miss, self.total)
    }

    /// The sum of the three hit percentages.
    pub fn overall_pct(&self) -> f64 {
        self.pct_top1() + self.pct_top2() + self.pct_top3()
    }

    /// Stable line-oriented text; percentages carry three decimals.
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str("replay report\n");
        out.push_str(&format!("total queries: {}\n", self.total));
        out.push_str(&format!(
            "top-1 hits: {} ({:.3}%)\n",
            self.hit_top1,
            self.pct_top1()
        ));
        out.push_str(&format!(
            "top-2 hits: {} ({:.3}%)\n",
            self.hit_top2,
            self.pct_top2()
        ));
        out.push_str(&format!(
            "top-3 hits: {} ({:.3}%)\n",
            self.hit_top3,
            self.pct_top3()
        ));
        out.push_str(&format!(
            "misses: {} ({:.3}%)\n",
            self.miss,
            self.pct_miss()
        ));
        out.push_str(&format!("overall top-3: {:.3}%\n", self.overall_pct()));
        out
    }
}

impl fmt::Display for ReplayReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

fn fold_index_sets(n: usize, folds: usize, seed: u64) -> Vec<Vec<usize>> {
    let mut indices: Vec<usize> = (0..n).collect();
    Xoshiro256::from_seed(seed).shuffle(&mut indices);
    let base = n / folds;
    let extra = n % folds;
    let mut out = Vec::with_capacity(folds);
    let mut cursor = 0;
    for f in 0..folds {
        let size = base + usize::from(f < extra);
        out.push(indices[cursor..cursor + size].to_vec());
        cursor += size;
    }
    out
}

/// Splits records into `folds` disjoint folds: a seeded uniform shuffle
/// followed by a contiguous partition, fold sizes differing by at most
/// one. Deterministic given the seed.
pub fn kfold_split<T: Clone>(
    records: &[T],
    folds: usize,
    seed: u64,
) -> Result<Vec<Vec<T>>, EvalError> {
    if folds < 2 {
        return Err(EvalError::BadFoldCount(folds));
    }
    if records.len() < folds {
        return Err(EvalError::TooFewRecords {
            records: records.len(),
            folds,
        });
    }
    Ok(fold_index_sets(records.len(), folds, seed)
        .into_iter()
        .map(|idx| idx.into_iter().map(|i| records[i].clone()).collect())
        .collect())
}

/// K-fold cross-validation of next-action prediction.
///
/// Each fold trains tables over the fixed chain Paction -> Caction ->
/// Naction on the remaining records and counts a hit when the held-out
/// record's next action appears among the top-k predictions for its
/// current action. Test states absent from the training partition are
/// automatic misses, never errors.
pub fn cross_validate(
    records: &[TransitionRecord],
    folds: usize,
    ess: f64,
    top_k: usize,
    seed: u64,
) -> Result<CvReport, EvalError> {
    if records.is_empty() {
        return Err(EvalError::EmptyRecords);
    }
    if folds < 2 {
        return Err(EvalError::BadFoldCount(folds));
    }
    if records.len() < folds {
        return Err(EvalError::TooFewRecords {
            records: records.len(),
            folds,
        });
    }
    if top_k == 0 {
        return Err(EvalError::InvalidTopK);
    }
    let prior = PriorConfig::new(ess)?;
    let folds_idx = fold_index_sets(records.len(), folds, seed);
    let mut fold_accuracy = Vec::with_capacity(folds);
    for (f, test_idx) in folds_idx.iter().enumerate() {
        let in_test = |i: usize| test_idx.contains(&i);
        let train: Vec<TransitionRecord> = (0..records.len())
            .filter(|&i| !in_test(i))
            .map(|i| records[i].clone())
            .collect();
        if train.is_empty() {
            return Err(EvalError::EmptyTrainingPartition { fold: f });
        }
        let dataset = records_to_instances(&train, &FieldSelection::actions_only())?;
        let dag = Dag::chain(dataset.variables().to_vec())?;
        let network = Network::fit("cv", dag, &dataset, &prior)?;
        let mut hits = 0usize;
        for &i in test_idx {
            let record = &records[i];
            let prediction =
                predict_next(&network, record.caction()).map_err(QueryError::Inference)?;
            if prediction.fallback {
                continue; // unseen current action: automatic miss
            }
            let hit = prediction
                .posterior
                .ranked()
                .into_iter()
                .take(top_k)
                .any(|(action, _)| action == record.naction());
            if hit {
                hits += 1;
            }
        }
        fold_accuracy.push(hits as f64 / test_idx.len() as f64);
    }
    let mean = fold_accuracy.iter().sum::<f64>() / folds as f64;
    let variance = fold_accuracy
        .iter()
        .map(|a| (a - mean) * (a - mean))
        .sum::<f64>()
        / (folds - 1) as f64;
    let half_width = 1.96 * sqrt(variance) / sqrt(folds as f64);
    Ok(CvReport {
        folds,
        fold_accuracy,
        mean,
        half_width,
        top_k,
        ess,
        seed,
    })
}

/// Replays a session through the streaming module: before each event
/// from the third onward, queries the top-k suggestions and records the
/// rank (1, 2, 3, or miss) at which the actually-performed action
/// appeared. Ranks beyond the report's three buckets count as misses.
pub fn replay_evaluate(
    network: &Network,
    session: &SessionLog,
    topics: &HelpTopicMap,
    k: usize,
) -> Result<ReplayReport, EvalError> {
    if session.events.len() < 3 {
        return Err(EvalError::SessionTooShort {
            events: session.events.len(),
        });
    }
    if k == 0 {
        return Err(EvalError::InvalidTopK);
    }
    let mut ausm = Ausm::new(network.clone(), topics.clone(), NullSink);
    let mut report = ReplayReport {
        total: 0,
        hit_top1: 0,
        hit_top2: 0,
        hit_top3: 0,
        miss: 0,
    };
    for (fed, event) in session.events.iter().enumerate() {
        if fed >= 2 {
            let result = ausm.query_help(k)?;
            let rank = result
                .entries
                .iter()
                .position(|e| e.action == event.action())
                .map(|pos| pos + 1);
            report.total += 1;
            match rank {
                Some(1) => report.hit_top1 += 1,
                Some(2) => report.hit_top2 += 1,
                Some(3) => report.hit_top3 += 1,
                _ => report.miss += 1,
            }
        }
        ausm.record_action(event.clone())?;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bbn::{Cpt, Variable};
    use crate::event_log::{build_transitions, ActionEvent};
    use alloc::collections::BTreeSet;
    use alloc::vec;

    const ACTIONS: [&str; 5] = ["Choose", "Connect", "Insert", "Run", "Save"];

    fn next_of(action: &str) -> &'static str {
        let i = ACTIONS.iter().position(|a| *a == action).unwrap();
        ACTIONS[(i + 1) % ACTIONS.len()]
    }

    fn deterministic_records(n: usize, seed: u64) -> Vec<TransitionRecord> {
        let mut rng = Xoshiro256::from_seed(seed);
        (0..n)
            .map(|i| {
                let c = ACTIONS[rng.next_below(ACTIONS.len() as u64) as usize];
                let p = ACTIONS[rng.next_below(ACTIONS.len() as u64) as usize];
                let t = i as u64;
                TransitionRecord::new((p, None, t), (c, None, t + 1), (next_of(c), None, t + 2))
                    .unwrap()
            })
            .collect()
    }

    fn uniform_records(n: usize, seed: u64) -> Vec<TransitionRecord> {
        let mut rng = Xoshiro256::from_seed(seed);
        let acts = ["A", "B", "C", "D"];
        (0..n)
            .map(|i| {
                let pick = |rng: &mut Xoshiro256| acts[rng.next_below(4) as usize];
                let (p, c, n_) = (pick(&mut rng), pick(&mut rng), pick(&mut rng));
                let t = i as u64;
                TransitionRecord::new((p, None, t), (c, None, t + 1), (n_, None, t + 2)).unwrap()
            })
            .collect()
    }

    #[test]
    fn kfold_even_split() {
        let records: Vec<u32> = (0..100).collect();
        let folds = kfold_split(&records, 10, 0).unwrap();
        assert!(folds.iter().all(|f| f.len() == 10));
    }

    #[test]
    fn kfold_uneven_split_sizes() {
        let records: Vec<u32> = (0..23).collect();
        let folds = kfold_split(&records, 10, 1).unwrap();
        let mut sizes: Vec<usize> = folds.iter().map(Vec::len).collect();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![2, 2, 2, 2, 2, 2, 2, 3, 3, 3]);
    }

    #[test]
    fn kfold_is_deterministic_and_partitions() {
        let records: Vec<u32> = (0..37).collect();
        let a = kfold_split(&records, 5, 9).unwrap();
        let b = kfold_split(&records, 5, 9).unwrap();
        assert_eq!(a, b);
        let mut seen: Vec<u32> = a.into_iter().flatten().collect();
        seen.sort_unstable();
        assert_eq!(seen, records);
    }

    #[test]
    fn kfold_guards() {
        let records: Vec<u32> = (0..5).collect();
        assert_eq!(
            kfold_split(&records, 1, 0).unwrap_err(),
            EvalError::BadFoldCount(1)
        );
        assert_eq!(
            kfold_split(&records, 6, 0).unwrap_err(),
            EvalError::TooFewRecords {
                records: 5,
                folds: 6
            }
        );
    }

    #[test]
    fn cv_deterministic_mapping_scores_perfectly() {
        let records = deterministic_records(500, 42);
        // brute-force precondition: every held-out current action is in training
        let folds = fold_index_sets(records.len(), 10, 0);
        for test_idx in &folds {
            let train_actions: BTreeSet<&str> = (0..records.len())
                .filter(|i| !test_idx.contains(i))
                .map(|i| records[i].caction())
                .collect();
            for &i in test_idx {
                assert!(train_actions.contains(records[i].caction()));
            }
        }
        let report = cross_validate(&records, 10, 1.0, 1, 0).unwrap();
        assert_eq!(report.mean, 1.0);
        assert_eq!(report.half_width, 0.0);
        assert!(report.fold_accuracy.iter().all(|&a| a == 1.0));
    }

    #[test]
    fn cv_uniform_next_actions_score_at_chance() {
        let records = uniform_records(2000, 7);
        let report = cross_validate(&records, 10, 1.0, 1, 0).unwrap();
        assert!((report.mean - 0.25).abs() < 0.05, "mean = {}", report.mean);
    }

    #[test]
    fn cv_accuracy_is_monotone_in_k() {
        let records = uniform_records(400, 3);
        let mut last = 0.0;
        for k in 1..=4 {
            let report = cross_validate(&records, 5, 1.0, k, 11).unwrap();
            assert!(report.mean >= last - 1e-12, "k = {k}");
            last = report.mean;
        }
        // top-k covering every state is always a hit on seen actions
        let all = cross_validate(&records, 5, 1.0, 4, 11).unwrap();
        assert!(all.mean > 0.9);
    }

    #[test]
    fn cv_is_deterministic() {
        let records = uniform_records(100, 1);
        let a = cross_validate(&records, 4, 1.0, 1, 5).unwrap();
        let b = cross_validate(&records, 4, 1.0, 1, 5).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.render(), b.render());
    }

    #[test]
    fn cv_guards() {
        assert_eq!(
            cross_validate(&[], 10, 1.0, 1, 0).unwrap_err(),
            EvalError::EmptyRecords
        );
        let records = deterministic_records(5, 0);
        assert!(matches!(
            cross_validate(&records, 10, 1.0, 1, 0).unwrap_err(),
            EvalError::TooFewRecords { .. }
        ));
        assert!(matches!(
            cross_validate(&records, 2, 1.0, 0, 0).unwrap_err(),
            EvalError::InvalidTopK
        ));
        assert!(matches!(
            cross_validate(&records, 2, 0.0, 1, 0).unwrap_err(),
            EvalError::Model(_)
        ));
    }

    /// Caction -> Naction where each current action forces one next.
    fn forcing_network() -> Network {
        let vars = vec![
            Variable::new("Caction", ACTIONS).unwrap(),
            Variable::new("Naction", ACTIONS).unwrap(),
        ];
        let dag = Dag::chain(vars).unwrap();
        let rows: Vec<Vec<f64>> = (0..ACTIONS.len())
            .map(|i| {
                let mut row = vec![0.0; ACTIONS.len()];
                row[(i + 1) % ACTIONS.len()] = 1.0;
                row
            })
            .collect();
        let cpts = vec![
            Cpt::from_rows(vec![vec![0.2; 5]]).unwrap(),
            Cpt::from_rows(rows).unwrap(),
        ];
        Network::new("forcing", dag, cpts).unwrap()
    }

    fn forced_session(n: usize) -> SessionLog {
        let mut action = "Choose";
        let events = (0..n)
            .map(|i| {
                let e = ActionEvent::new(i as u64, action, None).unwrap();
                action = next_of(action);
                e
            })
            .collect();
        SessionLog::new("forced", events)
    }

    #[test]
    fn replay_deterministic_network_hits_top1_always() {
        let session = forced_session(50);
        let report = replay_evaluate(
            &forcing_network(),
            &session,
            &HelpTopicMap::builtin_default(),
            3,
        )
        .unwrap();
        assert_eq!(report.total, 48);
        assert_eq!(report.hit_top1, 48);
        assert_eq!(report.miss, 0);
        assert!((report.pct_top1() - 100.0).abs() < 1e-12);
    }

    #[test]
    fn replay_counts_always_sum_to_total() {
        let session = forced_session(30);
        let report = replay_evaluate(
            &forcing_network(),
            &session,
            &HelpTopicMap::builtin_default(),
            2,
        )
        .unwrap();
        assert_eq!(
            report.hit_top1 + report.hit_top2 + report.hit_top3 + report.miss,
            report.total
        );
        // streaming replay answers exactly one query per batch transition
        let offline = build_transitions(&session).unwrap();
        assert_eq!(report.total as usize, offline.len());
    }

    #[test]
    fn replay_short_session_is_rejected() {
        let session = forced_session(2);
        assert_eq!(
            replay_evaluate(
                &forcing_network(),
                &session,
                &HelpTopicMap::builtin_default(),
                3
            )
            .unwrap_err(),
            EvalError::SessionTooShort { events: 2 }
        );
    }

    #[test]
    fn render_matches_reference_shapes() {
        let report = CvReport {
            folds: 10,
            fold_accuracy: vec![0.8843; 10],
            mean: 0.8843,
            half_width: 0.0136,
            top_k: 1,
            ess: 1.0,
            seed: 0,
        };
        let text = report.render();
        assert!(text.contains("88.430%"), "{text}");
        assert!(text.contains("\u{b1}1.360%"), "{text}");
        assert_eq!(text, report.render());

        let replay = ReplayReport {
            total: 141,
            hit_top1: 63,
            hit_top2: 34,
            hit_top3: 12,
            miss: 32,
        };
        let text = replay.render();
        assert!(text.contains("44.681%"), "{text}");
        assert!(text.contains("24.113%"), "{text}");
        assert!(text.contains("8.511%"), "{text}");
        assert!(text.contains("77.305%"), "{text}");

        let empty_bucket = ReplayReport {
            total: 10,
            hit_top1: 10,
            hit_top2: 0,
            hit_top3: 0,
            miss: 0,
        };
        assert!(empty_bucket.render().contains("top-2 hits: 0 (0.000%)"));
    }

    #[test]
    fn overall_is_sum_of_hit_percentages() {
        let replay = ReplayReport {
            total: 141,
            hit_top1: 63,
            hit_top2: 34,
            hit_top3: 12,
            miss: 32,
        };
        let want = replay.pct_top1() + replay.pct_top2() + replay.pct_top3();
        assert_eq!(replay.overall_pct(), want);
        assert!((replay.overall_pct() - 77.305).abs() < 1e-3);
    }
}
