//! Bayesian model scoring and structure search.
//!
//! The score of a structure is the log marginal likelihood of the data
//! under a Dirichlet parameter prior with equivalent sample size N'
//! spread uniformly over parent configurations and states:
//!
//! ```text
//! P(D|M) = prod_i prod_j  Γ(N'/q_i) / Γ(N'/q_i + N_ij)
//!                 prod_k  Γ(N'/(r_i q_i) + N_ijk) / Γ(N'/(r_i q_i))
//! ```
//!
//! Everything is computed in log space via [`crate::math::ln_gamma`].
//! Structure priors are equal, so model comparison reduces to score
//! differences.

use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::bbn::dataset::Dataset;
use crate::bbn::{tally_counts, CountTable, Dag, FamilyCounts, ModelError, Variable};
use crate::math::ln_gamma;

/// Two scores within this distance count as tied and fall through to
/// the structural tie-break (fewer edges, then lexicographic edges).
pub const SCORE_TIE_EPS: f64 = 1e-9;

/// Largest variable count accepted by exhaustive enumeration.
pub const MAX_EXHAUSTIVE_VARS: usize = 4;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScoreError {
    #[error("equivalent sample size must be positive, got {0}")]
    NonPositiveEss(f64),
    #[error("exhaustive mode handles at most {limit} variables, got {count}")]
    TooManyVariables { count: usize, limit: usize },
    #[error("graphs are not over the same variables")]
    VariableMismatch,
    #[error("count table was not built against this graph")]
    CountsMismatch,
    #[error("cannot select a structure from an empty dataset")]
    EmptyDataset,
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// A structure with its log marginal likelihood.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredModel {
    pub dag: Dag,
    pub log_score: f64,
}

/// Log marginal likelihood contribution of a single family. Rows with
/// N_ij = 0 contribute exactly zero and are skipped, which also makes
/// the empty-data score exactly 0.
pub fn family_log_score(family: &FamilyCounts, ess: f64) -> f64 {
    let q = family.configs() as f64;
    let r = family.states() as f64;
    let row_prior = ess / q;
    let cell_prior = ess / (r * q);
    let ln_row_prior = ln_gamma(row_prior);
    let ln_cell_prior = ln_gamma(cell_prior);
    let mut total = 0.0;
    for j in 0..family.configs() {
        let n_ij = family.row_total(j);
        if n_ij == 0 {
            continue;
        }
        total += ln_row_prior - ln_gamma(row_prior + n_ij as f64);
        for &n_ijk in family.row(j) {
            if n_ijk > 0 {
                total += ln_gamma(cell_prior + n_ijk as f64) - ln_cell_prior;
            }
        }
    }
    total
}

/// Natural log of P(D|M) for counts tallied against `dag`.
pub fn log_marginal_likelihood(
    dag: &Dag,
    counts: &CountTable,
    ess: f64,
) -> Result<f64, ScoreError> {
    if !ess.is_finite() || ess <= 0.0 {
        return Err(ScoreError::NonPositiveEss(ess));
    }
    if counts.families().len() != dag.var_count() {
        return Err(ScoreError::CountsMismatch);
    }
    for (i, family) in counts.families().iter().enumerate() {
        if family.configs() != dag.config_count(i)
            || family.states() != dag.variable(i).cardinality()
        {
            return Err(ScoreError::CountsMismatch);
        }
    }
    Ok(counts
        .families()
        .iter()
        .map(|family| family_log_score(family, ess))
        .sum())
}

/// Tallies and scores in one step.
pub fn score_dataset(dag: &Dag, dataset: &Dataset, ess: f64) -> Result<f64, ScoreError> {
    if !ess.is_finite() || ess <= 0.0 {
        return Err(ScoreError::NonPositiveEss(ess));
    }
    let counts = tally_counts(dataset, dag)?;
    log_marginal_likelihood(dag, &counts, ess)
}

/// log P(D|M1) - log P(D|M2); positive means M1 is the more probable
/// model under equal structure priors.
pub fn model_log_ratio(
    dag1: &Dag,
    dag2: &Dag,
    dataset: &Dataset,
    ess: f64,
) -> Result<f64, ScoreError> {
    if dag1.variables() != dag2.variables() {
        return Err(ScoreError::VariableMismatch);
    }
    Ok(score_dataset(dag1, dataset, ess)? - score_dataset(dag2, dataset, ess)?)
}

/// All labeled DAGs over `variables` with at most `max_parents` parents
/// per node, in a fixed deterministic order.
pub fn enumerate_dags(variables: &[Variable], max_parents: usize) -> Result<Vec<Dag>, ScoreError> {
    let n = variables.len();
    if n == 0 {
        return Err(ScoreError::Model(ModelError::NoVariables));
    }
    if n > MAX_EXHAUSTIVE_VARS {
        return Err(ScoreError::TooManyVariables {
            count: n,
            limit: MAX_EXHAUSTIVE_VARS,
        });
    }
    // candidate parent bitmasks per node, ascending
    let masks_per_node: Vec<Vec<u32>> = (0..n)
        .map(|v| {
            (0u32..(1 << n))
                .filter(|m| m & (1 << v) == 0 && m.count_ones() as usize <= max_parents)
                .collect()
        })
        .collect();
    let mut dags = Vec::new();
    let mut choice = vec![0usize; n];
    loop {
        let masks: Vec<u32> = (0..n).map(|v| masks_per_node[v][choice[v]]).collect();
        if masks_acyclic(&masks) {
            let parents: Vec<Vec<usize>> = masks
                .iter()
                .map(|&m| (0..n).filter(|&p| m & (1 << p) != 0).collect())
                .collect();
            dags.push(Dag::new(variables.to_vec(), parents)?);
        }
        // odometer over nodes, last node fastest
        let mut pos = n;
        loop {
            if pos == 0 {
                return Ok(dags);
            }
            pos -= 1;
            choice[pos] += 1;
            if choice[pos] < masks_per_node[pos].len() {
                break;
            }
            choice[pos] = 0;
        }
    }
}

fn masks_acyclic(masks: &[u32]) -> bool {
    let n = masks.len();
    let mut placed = 0u32;
    let mut placed_count = 0;
    while placed_count < n {
        let mut advanced = false;
        for (v, &mask) in masks.iter().enumerate() {
            if placed & (1 << v) == 0 && mask & !placed == 0 {
                placed |= 1 << v;
                placed_count += 1;
                advanced = true;
            }
        }
        if !advanced {
            return false;
        }
    }
    true
}

/// How [`select_best_structure`] explores structure space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMode {
    /// Score every DAG (at most [`MAX_EXHAUSTIVE_VARS`] variables).
    Exhaustive,
    /// Hill climbing over single-edge add/remove/reverse moves from the
    /// empty graph; deterministic, single restart.
    Greedy,
}

/// Picks the best-scoring structure for the dataset. Deterministic
/// given (dataset, ess, mode, max_parents): score ties within
/// [`SCORE_TIE_EPS`] prefer fewer edges, then the lexicographically
/// smallest edge list.
pub fn select_best_structure(
    dataset: &Dataset,
    ess: f64,
    mode: SearchMode,
    max_parents: usize,
) -> Result<ScoredModel, ScoreError> {
    if dataset.is_empty() {
        return Err(ScoreError::EmptyDataset);
    }
    if !ess.is_finite() || ess <= 0.0 {
        return Err(ScoreError::NonPositiveEss(ess));
    }
    match mode {
        SearchMode::Exhaustive => {
            let candidates = enumerate_dags(dataset.variables(), max_parents)?;
            let scored = candidates
                .into_iter()
                .map(|dag| {
                    let log_score = score_dataset(&dag, dataset, ess)?;
                    Ok(ScoredModel { dag, log_score })
                })
                .collect::<Result<Vec<_>, ScoreError>>()?;
            Ok(pick_preferred(scored).expect("enumeration yields at least the empty graph"))
        }
        SearchMode::Greedy => {
            let mut current = {
                let dag = Dag::empty(dataset.variables().to_vec())?;
                let log_score = score_dataset(&dag, dataset, ess)?;
                ScoredModel { dag, log_score }
            };
            loop {
                let neighbors = neighbor_dags(&current.dag, max_parents);
                let scored = neighbors
                    .into_iter()
                    .map(|dag| {
                        let log_score = score_dataset(&dag, dataset, ess)?;
                        Ok(ScoredModel { dag, log_score })
                    })
                    .collect::<Result<Vec<_>, ScoreError>>()?;
                match pick_preferred(scored) {
                    Some(best) if best.log_score > current.log_score + SCORE_TIE_EPS => {
                        current = best;
                    }
                    _ => return Ok(current),
                }
            }
        }
    }
}

/// Highest score wins; ties within [`SCORE_TIE_EPS`] of the maximum go
/// to the fewest edges, then the lexicographically smallest edge list.
fn pick_preferred(scored: Vec<ScoredModel>) -> Option<ScoredModel> {
    let max = scored
        .iter()
        .map(|s| s.log_score)
        .fold(f64::NEG_INFINITY, f64::max);
    scored
        .into_iter()
        .filter(|s| s.log_score >= max - SCORE_TIE_EPS)
        .min_by(|a, b| {
            a.dag
                .edge_count()
                .cmp(&b.dag.edge_count())
                .then_with(|| a.dag.edges().cmp(&b.dag.edges()))
        })
}

/// Single-edge add/remove/reverse neighbors that stay acyclic and
/// within the parent bound.
fn neighbor_dags(dag: &Dag, max_parents: usize) -> Vec<Dag> {
    let n = dag.var_count();
    let variables = dag.variables().to_vec();
    let parents: Vec<Vec<usize>> = (0..n).map(|v| dag.parents_of(v).to_vec()).collect();
    let has_edge = |ps: &[Vec<usize>], from: usize, to: usize| ps[to].contains(&from);
    let mut out = Vec::new();
    let mut push = |lists: Vec<Vec<usize>>| {
        if let Ok(candidate) = Dag::new(variables.clone(), lists) {
            out.push(candidate);
        }
    };
    for from in 0..n {
        for to in 0..n {
            if from == to {
                continue;
            }
            if has_edge(&parents, from, to) {
                // remove
                let mut lists = parents.clone();
                lists[to].retain(|&p| p != from);
                push(lists);
                // reverse
                if !has_edge(&parents, to, from) && parents[from].len() < max_parents {
                    let mut lists = parents.clone();
                    lists[to].retain(|&p| p != from);
                    lists[from].push(to);
                    lists[from].sort_unstable();
                    push(lists);
                }
            } else if parents[to].len() < max_parents && !has_edge(&parents, to, from) {
                // add
                let mut lists = parents.clone();
                lists[to].push(from);
                lists[to].sort_unstable();
                push(lists);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bbn::dataset::Dataset;
    use crate::rng::Xoshiro256;

    fn binary_vars(names: &[&str]) -> Vec<Variable> {
        names
            .iter()
            .map(|n| {
                Variable::new(
                    *n,
                    [
                        alloc::format!("{}0", n.to_lowercase()),
                        alloc::format!("{}1", n.to_lowercase()),
                    ],
                )
                .unwrap()
            })
            .collect()
    }

    fn single_binary(tokens: &[&str]) -> Dataset {
        let vars = vec![Variable::new("A", ["a0", "a1"]).unwrap()];
        let rows: Vec<Vec<&str>> = tokens.iter().map(|t| vec![*t]).collect();
        Dataset::from_tokens(vars, &rows).unwrap()
    }

    #[test]
    fn empty_data_scores_exactly_zero() {
        let vars = binary_vars(&["A", "B"]);
        let data = Dataset::from_tokens(vars.clone(), &Vec::<Vec<&str>>::new()).unwrap();
        for dag in [Dag::empty(vars.clone()).unwrap(), Dag::chain(vars).unwrap()] {
            assert_eq!(score_dataset(&dag, &data, 1.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn half_integer_gamma_cases() {
        // one binary variable, ess = 1
        let data = single_binary(&["a0", "a1"]);
        let dag = Dag::empty(data.variables().to_vec()).unwrap();
        let got = score_dataset(&dag, &data, 1.0).unwrap();
        assert!((got - (1.0f64 / 8.0).ln()).abs() < 1e-12, "got {got}");

        let data = single_binary(&["a0", "a0"]);
        let got = score_dataset(&dag, &data, 1.0).unwrap();
        assert!((got - (3.0f64 / 8.0).ln()).abs() < 1e-12, "got {got}");
    }

    fn correlated_pair() -> Dataset {
        let vars = binary_vars(&["A", "B"]);
        let rows = [
            vec!["a0", "b0"],
            vec!["a0", "b0"],
            vec!["a1", "b1"],
            vec!["a1", "b1"],
        ];
        Dataset::from_tokens(vars, &rows).unwrap()
    }

    #[test]
    fn model_ratio_on_correlated_pairs() {
        let data = correlated_pair();
        let vars = data.variables().to_vec();
        let dependent = Dag::chain(vars.clone()).unwrap();
        let independent = Dag::empty(vars).unwrap();
        let ratio = model_log_ratio(&dependent, &independent, &data, 1.0).unwrap();
        assert!(
            (ratio - (200.0f64 / 27.0).ln()).abs() < 1e-9,
            "ratio {ratio}"
        );
        let back = model_log_ratio(&independent, &dependent, &data, 1.0).unwrap();
        assert!((ratio + back).abs() < 1e-12);
        assert_eq!(
            model_log_ratio(&dependent, &dependent, &data, 1.0).unwrap(),
            0.0
        );
    }

    #[test]
    fn ratio_rejects_mismatched_variables() {
        let data = correlated_pair();
        let other = Dag::empty(binary_vars(&["A", "C"])).unwrap();
        let chain = Dag::chain(data.variables().to_vec()).unwrap();
        assert_eq!(
            model_log_ratio(&chain, &other, &data, 1.0).unwrap_err(),
            ScoreError::VariableMismatch
        );
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(enumerate_dags(&binary_vars(&["A"]), 2).unwrap().len(), 1);
        assert_eq!(
            enumerate_dags(&binary_vars(&["A", "B"]), 1).unwrap().len(),
            3
        );
        assert_eq!(
            enumerate_dags(&binary_vars(&["A", "B", "C"]), 2)
                .unwrap()
                .len(),
            25
        );
        assert!(matches!(
            enumerate_dags(&binary_vars(&["A", "B", "C", "D", "E"]), 2),
            Err(ScoreError::TooManyVariables { count: 5, limit: 4 })
        ));
    }

    #[test]
    fn enumeration_respects_parent_bound() {
        let dags = enumerate_dags(&binary_vars(&["A", "B", "C"]), 1).unwrap();
        assert!(dags
            .iter()
            .all(|d| (0..3).all(|v| d.parents_of(v).len() <= 1)));
        // rooted labeled forests on 3 nodes: (n+1)^(n-1) = 16
        assert_eq!(dags.len(), 16);
    }

    #[test]
    fn exhaustive_selects_single_edge_on_correlated_data() {
        let data = correlated_pair();
        let best = select_best_structure(&data, 1.0, SearchMode::Exhaustive, 2).unwrap();
        assert_eq!(best.dag.edge_count(), 1);
        // tie-break picks the lexicographically smaller orientation: A -> B
        assert_eq!(best.dag.edges(), vec![(0, 1)]);
    }

    #[test]
    fn exhaustive_selects_empty_graph_on_noise() {
        let vars = binary_vars(&["A", "B"]);
        let mut rng = Xoshiro256::from_seed(2024);
        let rows: Vec<Vec<&str>> = (0..500)
            .map(|_| {
                vec![
                    if rng.next_f64() < 0.5 { "a0" } else { "a1" },
                    if rng.next_f64() < 0.5 { "b0" } else { "b1" },
                ]
            })
            .collect();
        let data = Dataset::from_tokens(vars, &rows).unwrap();
        let best = select_best_structure(&data, 1.0, SearchMode::Exhaustive, 2).unwrap();
        assert_eq!(best.dag.edge_count(), 0, "edges: {:?}", best.dag.edges());
    }

    #[test]
    fn greedy_matches_exhaustive_on_correlated_pair() {
        let data = correlated_pair();
        let exhaustive = select_best_structure(&data, 1.0, SearchMode::Exhaustive, 2).unwrap();
        let greedy = select_best_structure(&data, 1.0, SearchMode::Greedy, 2).unwrap();
        assert!((exhaustive.log_score - greedy.log_score).abs() < 1e-9);
        assert_eq!(greedy.dag.edge_count(), 1);
    }

    #[test]
    fn empty_dataset_is_rejected() {
        let vars = binary_vars(&["A", "B"]);
        let data = Dataset::from_tokens(vars, &Vec::<Vec<&str>>::new()).unwrap();
        assert_eq!(
            select_best_structure(&data, 1.0, SearchMode::Exhaustive, 2).unwrap_err(),
            ScoreError::EmptyDataset
        );
    }

    #[test]
    fn nonpositive_ess_is_rejected() {
        let data = correlated_pair();
        let dag = Dag::empty(data.variables().to_vec()).unwrap();
        assert!(matches!(
            score_dataset(&dag, &data, 0.0),
            Err(ScoreError::NonPositiveEss(_))
        ));
    }
}
