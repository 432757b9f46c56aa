//! Probabilistic queries over a network: joint probabilities, exact
//! posteriors by enumeration, and likelihood-weighted Monte Carlo
//! posteriors.
//!
//! Exact inference enumerates every completion of the evidence, which
//! is exponential in the variable count and entirely adequate for the
//! handful of variables these models carry; it doubles as the reference
//! the sampler is checked against.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::bbn::dataset::Field;
use crate::bbn::Network;
use crate::rng::Xoshiro256;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InferenceError {
    #[error("unknown variable {0}")]
    UnknownVariable(String),
    #[error("variable {variable} has no state {state:?}")]
    UnknownState { variable: String, state: String },
    #[error("assignment misses variable {variable}")]
    IncompleteAssignment { variable: String },
    #[error("query variable {variable} is already in the evidence")]
    QueryInEvidence { variable: String },
    #[error("evidence has zero probability under the network")]
    InconsistentEvidence,
    #[error("no sample had positive weight; evidence has no support")]
    NoSupport,
    #[error("sample count must be at least 1")]
    InvalidSampleCount,
    #[error("network lacks required variable {0}")]
    MissingVariable(String),
    #[error("variable {variable} has parents beyond the current-action node")]
    UnsupportedStructure { variable: String },
}

/// A partial assignment of observed states, keyed by variable name.
/// Setting a variable twice keeps the latest state.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Evidence {
    entries: BTreeMap<String, String>,
}

impl Evidence {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, variable: impl Into<String>, state: impl Into<String>) -> Self {
        self.set(variable, state);
        self
    }

    pub fn set(&mut self, variable: impl Into<String>, state: impl Into<String>) {
        self.entries.insert(variable.into(), state.into());
    }

    pub fn get(&self, variable: &str) -> Option<&str> {
        self.entries.get(variable).map(String::as_str)
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }
}

/// A distribution over one variable's states.
#[derive(Debug, Clone, PartialEq)]
pub struct Posterior {
    variable: String,
    states: Vec<String>,
    probs: Vec<f64>,
}

impl Posterior {
    fn new(variable: String, states: Vec<String>, probs: Vec<f64>) -> Self {
        debug_assert_eq!(states.len(), probs.len());
        Self {
            variable,
            states,
            probs,
        }
    }

    pub fn variable(&self) -> &str {
        &self.variable
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob_of(&self, state: &str) -> Option<f64> {
        self.states
            .iter()
            .position(|s| s == state)
            .map(|k| self.probs[k])
    }

    /// States ordered by probability descending, ties broken by the
    /// lexicographically smaller token. The order is total, so equal
    /// inputs rank identically across runs.
    pub fn ranked(&self) -> Vec<(&str, f64)> {
        let mut pairs: Vec<(&str, f64)> = self
            .states
            .iter()
            .map(String::as_str)
            .zip(self.probs.iter().copied())
            .collect();
        pairs.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        pairs
    }
}

/// Evidence resolved to a per-variable optional state index.
fn resolve(network: &Network, evidence: &Evidence) -> Result<Vec<Option<usize>>, InferenceError> {
    let dag = network.dag();
    let mut resolved = vec![None; dag.var_count()];
    for (name, state) in evidence.iter() {
        let v = dag
            .var_index(name)
            .ok_or_else(|| InferenceError::UnknownVariable(name.to_string()))?;
        let k = dag
            .variable(v)
            .state_index(state)
            .ok_or_else(|| InferenceError::UnknownState {
                variable: name.to_string(),
                state: state.to_string(),
            })?;
        resolved[v] = Some(k);
    }
    Ok(resolved)
}

fn joint_of(network: &Network, assignment: &[usize]) -> f64 {
    let dag = network.dag();
    let mut p = 1.0;
    for v in 0..dag.var_count() {
        let j = dag.config_index_in(v, assignment);
        p *= network.cpt(v).prob(j, assignment[v]);
    }
    p
}

/// Probability of a complete assignment: the product of each variable's
/// table entry under its parents (the chain-rule factorization).
pub fn joint_probability(network: &Network, assignment: &Evidence) -> Result<f64, InferenceError> {
    let resolved = resolve(network, assignment)?;
    let mut full = Vec::with_capacity(resolved.len());
    for (v, slot) in resolved.iter().enumerate() {
        match slot {
            Some(k) => full.push(*k),
            None => {
                return Err(InferenceError::IncompleteAssignment {
                    variable: network.dag().variable(v).name().to_string(),
                })
            }
        }
    }
    Ok(joint_of(network, &full))
}

/// P(query | evidence) by summing the joint over every completion and
/// normalizing. This enumeration is the reference oracle for the
/// sampler and the prediction fast path.
pub fn posterior_exact(
    network: &Network,
    evidence: &Evidence,
    query: &str,
) -> Result<Posterior, InferenceError> {
    let dag = network.dag();
    let q = dag
        .var_index(query)
        .ok_or_else(|| InferenceError::UnknownVariable(query.to_string()))?;
    let resolved = resolve(network, evidence)?;
    if resolved[q].is_some() {
        return Err(InferenceError::QueryInEvidence {
            variable: query.to_string(),
        });
    }
    let free: Vec<usize> = (0..dag.var_count())
        .filter(|&v| resolved[v].is_none())
        .collect();
    let mut assignment: Vec<usize> = resolved.iter().map(|s| s.unwrap_or(0)).collect();
    let q_states = dag.variable(q).cardinality();
    let mut weights = vec![0.0f64; q_states];
    'outer: loop {
        weights[assignment[q]] += joint_of(network, &assignment);
        // odometer over the free variables, last fastest
        for &v in free.iter().rev() {
            assignment[v] += 1;
            if assignment[v] < dag.variable(v).cardinality() {
                continue 'outer;
            }
            assignment[v] = 0;
        }
        break;
    }
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return Err(InferenceError::InconsistentEvidence);
    }
    for w in &mut weights {
        *w /= total;
    }
    Ok(Posterior::new(
        query.to_string(),
        dag.variable(q).states().to_vec(),
        weights,
    ))
}

fn sample_state(row: &[f64], rng: &mut Xoshiro256) -> usize {
    let u = rng.next_f64();
    let mut cumulative = 0.0;
    for (k, &p) in row.iter().enumerate() {
        cumulative += p;
        if u < cumulative {
            return k;
        }
    }
    row.len() - 1 // numeric slack: the row sums to 1 within tolerance
}

/// Draws one complete assignment by sampling each variable from its
/// table in topological order.
pub fn sample_assignment(network: &Network, rng: &mut Xoshiro256) -> Vec<usize> {
    let dag = network.dag();
    let mut assignment = vec![0usize; dag.var_count()];
    for &v in dag.topological_order() {
        let j = dag.config_index_in(v, &assignment);
        assignment[v] = sample_state(network.cpt(v).row(j), rng);
    }
    assignment
}

/// P(query | evidence) by likelihood weighting: non-evidence variables
/// are sampled forward, each sample weighted by the probability of the
/// evidence values under their parents. Deterministic given the seed.
pub fn posterior_lw(
    network: &Network,
    evidence: &Evidence,
    query: &str,
    n_samples: usize,
    seed: u64,
) -> Result<Posterior, InferenceError> {
    if n_samples == 0 {
        return Err(InferenceError::InvalidSampleCount);
    }
    let dag = network.dag();
    let q = dag
        .var_index(query)
        .ok_or_else(|| InferenceError::UnknownVariable(query.to_string()))?;
    let resolved = resolve(network, evidence)?;
    if resolved[q].is_some() {
        return Err(InferenceError::QueryInEvidence {
            variable: query.to_string(),
        });
    }
    let mut rng = Xoshiro256::from_seed(seed);
    let mut tallies = vec![0.0f64; dag.variable(q).cardinality()];
    let mut assignment = vec![0usize; dag.var_count()];
    for _ in 0..n_samples {
        let mut weight = 1.0;
        for &v in dag.topological_order() {
            let j = dag.config_index_in(v, &assignment);
            let row = network.cpt(v).row(j);
            match resolved[v] {
                Some(k) => {
                    assignment[v] = k;
                    weight *= row[k];
                }
                None => assignment[v] = sample_state(row, &mut rng),
            }
        }
        tallies[assignment[q]] += weight;
    }
    let total: f64 = tallies.iter().sum();
    if total <= 0.0 {
        return Err(InferenceError::NoSupport);
    }
    for t in &mut tallies {
        *t /= total;
    }
    Ok(Posterior::new(
        query.to_string(),
        dag.variable(q).states().to_vec(),
        tallies,
    ))
}

/// A next-action distribution plus whether it came from the fallback
/// (marginal) path.
#[derive(Debug, Clone, PartialEq)]
pub struct NextActionPrediction {
    pub posterior: Posterior,
    pub fallback: bool,
}

/// Distribution of the next action given the current one.
///
/// Requires variables named `Caction` and `Naction` where `Naction`'s
/// parents are a subset of `{Caction}`. When the sole parent is
/// `Caction` the answer is the table row itself; conditioning on the
/// one parent makes every other variable irrelevant. Unknown current
/// actions fall back to the `Naction` marginal with the flag set.
pub fn predict_next(
    network: &Network,
    current_action: &str,
) -> Result<NextActionPrediction, InferenceError> {
    let caction = Field::Caction.variable_name();
    let naction = Field::Naction.variable_name();
    let dag = network.dag();
    let c = dag
        .var_index(caction)
        .ok_or_else(|| InferenceError::MissingVariable(caction.to_string()))?;
    let n = dag
        .var_index(naction)
        .ok_or_else(|| InferenceError::MissingVariable(naction.to_string()))?;
    let n_parents = dag.parents_of(n);
    if !n_parents.iter().all(|&p| p == c) {
        return Err(InferenceError::UnsupportedStructure {
            variable: naction.to_string(),
        });
    }
    match dag.variable(c).state_index(current_action) {
        Some(k) => {
            let posterior = if n_parents == [c] {
                Posterior::new(
                    naction.to_string(),
                    dag.variable(n).states().to_vec(),
                    network.cpt(n).row(k).to_vec(),
                )
            } else {
                // Naction is parentless; conditioning still matters if it
                // has descendants, so fall through to exact inference.
                let evidence = Evidence::new().with(caction, current_action);
                posterior_exact(network, &evidence, naction)?
            };
            Ok(NextActionPrediction {
                posterior,
                fallback: false,
            })
        }
        None => Ok(NextActionPrediction {
            posterior: posterior_exact(network, &Evidence::new(), naction)?,
            fallback: true,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bbn::{Cpt, Dag, Network, Variable};

    /// A -> B with P(a1) and P(b1 | a).
    fn pair_network(p_a1: f64, p_b1_a1: f64, p_b1_a2: f64) -> Network {
        let vars = vec![
            Variable::new("A", ["a1", "a2"]).unwrap(),
            Variable::new("B", ["b1", "b2"]).unwrap(),
        ];
        let dag = Dag::chain(vars).unwrap();
        let cpts = vec![
            Cpt::from_rows(vec![vec![p_a1, 1.0 - p_a1]]).unwrap(),
            Cpt::from_rows(vec![
                vec![p_b1_a1, 1.0 - p_b1_a1],
                vec![p_b1_a2, 1.0 - p_b1_a2],
            ])
            .unwrap(),
        ];
        Network::new("pair", dag, cpts).unwrap()
    }

    fn chain_network(seed: u64) -> Network {
        let vars = vec![
            Variable::new("Paction", ["p1", "p2"]).unwrap(),
            Variable::new("Caction", ["c1", "c2"]).unwrap(),
            Variable::new("Naction", ["n1", "n2"]).unwrap(),
        ];
        let dag = Dag::chain(vars).unwrap();
        let mut rng = Xoshiro256::from_seed(seed);
        let mut row = || {
            let p = 0.05 + 0.9 * rng.next_f64();
            vec![p, 1.0 - p]
        };
        let cpts = vec![
            Cpt::from_rows(vec![row()]).unwrap(),
            Cpt::from_rows(vec![row(), row()]).unwrap(),
            Cpt::from_rows(vec![row(), row()]).unwrap(),
        ];
        Network::new("chain", dag, cpts).unwrap()
    }

    #[test]
    fn joint_two_factor_product() {
        let network = pair_network(0.6, 0.9, 0.2);
        let p =
            joint_probability(&network, &Evidence::new().with("A", "a1").with("B", "b1")).unwrap();
        assert!((p - 0.54).abs() < 1e-12);
    }

    #[test]
    fn joint_zero_entry_absorbs() {
        let network = pair_network(1.0, 0.5, 0.5);
        let p =
            joint_probability(&network, &Evidence::new().with("A", "a2").with("B", "b1")).unwrap();
        assert_eq!(p, 0.0);
    }

    #[test]
    fn joint_deterministic_network_is_one() {
        let network = pair_network(1.0, 1.0, 0.0);
        let p =
            joint_probability(&network, &Evidence::new().with("A", "a1").with("B", "b1")).unwrap();
        assert_eq!(p, 1.0);
    }

    #[test]
    fn joint_requires_complete_assignment() {
        let network = pair_network(0.6, 0.9, 0.2);
        assert!(matches!(
            joint_probability(&network, &Evidence::new().with("A", "a1")),
            Err(InferenceError::IncompleteAssignment { .. })
        ));
    }

    #[test]
    fn exact_bayes_hand_case() {
        let network = pair_network(0.6, 0.9, 0.2);
        let posterior = posterior_exact(&network, &Evidence::new().with("B", "b1"), "A").unwrap();
        let want = 0.54 / 0.62;
        assert!((posterior.prob_of("a1").unwrap() - want).abs() < 1e-12);
        assert!((posterior.probs().iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn exact_root_marginal_is_its_row() {
        let network = pair_network(0.6, 0.9, 0.2);
        let posterior = posterior_exact(&network, &Evidence::new(), "A").unwrap();
        assert!((posterior.prob_of("a1").unwrap() - 0.6).abs() < 1e-12);
    }

    #[test]
    fn exact_rejects_query_in_evidence_and_zero_evidence() {
        let network = pair_network(0.6, 0.9, 0.2);
        assert!(matches!(
            posterior_exact(&network, &Evidence::new().with("A", "a1"), "A"),
            Err(InferenceError::QueryInEvidence { .. })
        ));
        let dead = pair_network(0.6, 0.0, 0.0); // b1 impossible
        assert_eq!(
            posterior_exact(&dead, &Evidence::new().with("B", "b1"), "A").unwrap_err(),
            InferenceError::InconsistentEvidence
        );
    }

    #[test]
    fn chain_evidence_on_first_node_is_screened_off() {
        for seed in 0..10 {
            let network = chain_network(seed);
            let with_p = posterior_exact(
                &network,
                &Evidence::new().with("Caction", "c1").with("Paction", "p2"),
                "Naction",
            )
            .unwrap();
            let without_p =
                posterior_exact(&network, &Evidence::new().with("Caction", "c1"), "Naction")
                    .unwrap();
            for (a, b) in with_p.probs().iter().zip(without_p.probs()) {
                assert!((a - b).abs() < 1e-12, "seed {seed}");
            }
        }
    }

    #[test]
    fn lw_tracks_exact_on_hand_case() {
        let network = pair_network(0.6, 0.9, 0.2);
        let evidence = Evidence::new().with("B", "b1");
        let exact = posterior_exact(&network, &evidence, "A").unwrap();
        let sampled = posterior_lw(&network, &evidence, "A", 100_000, 7).unwrap();
        for (e, s) in exact.probs().iter().zip(sampled.probs()) {
            assert!((e - s).abs() < 0.02);
        }
        // same seed, same answer
        let again = posterior_lw(&network, &evidence, "A", 100_000, 7).unwrap();
        assert_eq!(sampled, again);
    }

    #[test]
    fn lw_without_evidence_matches_marginal() {
        let network = pair_network(0.6, 0.9, 0.2);
        let exact = posterior_exact(&network, &Evidence::new(), "B").unwrap();
        let sampled = posterior_lw(&network, &Evidence::new(), "B", 100_000, 11).unwrap();
        for (e, s) in exact.probs().iter().zip(sampled.probs()) {
            assert!((e - s).abs() < 0.02);
        }
    }

    #[test]
    fn lw_errors_without_support_or_samples() {
        let dead = pair_network(0.6, 0.0, 0.0);
        assert_eq!(
            posterior_lw(&dead, &Evidence::new().with("B", "b1"), "A", 1000, 3).unwrap_err(),
            InferenceError::NoSupport
        );
        let network = pair_network(0.6, 0.9, 0.2);
        assert_eq!(
            posterior_lw(&network, &Evidence::new(), "A", 0, 3).unwrap_err(),
            InferenceError::InvalidSampleCount
        );
    }

    #[test]
    fn predict_next_is_the_table_row() {
        let network = chain_network(5);
        let n = network.var_index("Naction").unwrap();
        let prediction = predict_next(&network, "c1").unwrap();
        assert!(!prediction.fallback);
        assert_eq!(prediction.posterior.probs(), network.cpt(n).row(0));
    }

    #[test]
    fn predict_next_fast_path_matches_exact() {
        for seed in 0..20 {
            let network = chain_network(seed);
            for token in ["c1", "c2"] {
                let fast = predict_next(&network, token).unwrap();
                let exact =
                    posterior_exact(&network, &Evidence::new().with("Caction", token), "Naction")
                        .unwrap();
                for (a, b) in fast.posterior.probs().iter().zip(exact.probs()) {
                    assert!((a - b).abs() < 1e-12, "seed {seed} token {token}");
                }
            }
        }
    }

    #[test]
    fn predict_next_unknown_token_falls_back_to_marginal() {
        let network = chain_network(5);
        let prediction = predict_next(&network, "never-seen").unwrap();
        assert!(prediction.fallback);
        let marginal = posterior_exact(&network, &Evidence::new(), "Naction").unwrap();
        for (a, b) in prediction.posterior.probs().iter().zip(marginal.probs()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn predict_next_requires_the_action_variables() {
        let network = pair_network(0.6, 0.9, 0.2);
        assert!(matches!(
            predict_next(&network, "a1"),
            Err(InferenceError::MissingVariable(_))
        ));
    }

    #[test]
    fn ranked_breaks_ties_lexicographically() {
        let posterior = Posterior::new(
            "X".into(),
            vec!["b".into(), "a".into(), "c".into()],
            vec![0.25, 0.25, 0.5],
        );
        let ranked = posterior.ranked();
        assert_eq!(ranked[0].0, "c");
        assert_eq!(ranked[1].0, "a");
        assert_eq!(ranked[2].0, "b");
    }
}
