//! Discrete Bayesian belief networks: variables with finite state
//! spaces, a directed acyclic graph, sufficient statistics, and one
//! conditional probability table per variable.
//!
//! Table layout convention: the rows of a CPT (and of a count table)
//! are indexed by the mixed-radix parent configuration with the *last*
//! listed parent varying fastest. Parentless variables have a single
//! row. The convention is fixed so serialized networks are bit-stable.

pub mod dataset;
pub mod format;

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::bbn::dataset::Dataset;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("variable name is empty or contains whitespace: {0:?}")]
    BadVariableName(String),
    #[error("variable {variable} has no states")]
    NoStates { variable: String },
    #[error("variable {variable} repeats state {state:?}")]
    DuplicateState { variable: String, state: String },
    #[error("duplicate variable name {0}")]
    DuplicateVariable(String),
    #[error("network has no variables")]
    NoVariables,
    #[error("variable {variable}: parent index {index} out of range")]
    ParentOutOfRange { variable: String, index: usize },
    #[error("variable {variable} lists a parent twice")]
    DuplicateParent { variable: String },
    #[error("variable {variable} is its own parent")]
    SelfParent { variable: String },
    #[error("parent graph contains a cycle")]
    Cycle,
    #[error("variable {variable}: expected {expected} parent states, got {found}")]
    ParentStateCount {
        variable: String,
        expected: usize,
        found: usize,
    },
    #[error("variable {variable}: parent state index {index} out of range")]
    ParentStateRange { variable: String, index: usize },
    #[error("cpt row {row} sums to {sum}, not 1")]
    RowNotNormalized { row: usize, sum: f64 },
    #[error("cpt row {row} has probability {value} outside [0, 1]")]
    ProbabilityOutOfRange { row: usize, value: f64 },
    #[error("cpt rows have unequal widths")]
    RaggedRows,
    #[error("cpt has no rows")]
    EmptyCpt,
    #[error("variable {variable}: cpt shape is {rows}x{cols}, expected {want_rows}x{want_cols}")]
    CptShape {
        variable: String,
        rows: usize,
        cols: usize,
        want_rows: usize,
        want_cols: usize,
    },
    #[error("expected one cpt per variable: {variables} variables, {cpts} cpts")]
    CptCount { variables: usize, cpts: usize },
    #[error("dataset variables do not match the graph variables")]
    VariableMismatch,
    #[error("equivalent sample size must be positive, got {0}")]
    NonPositiveEss(f64),
}

/// A named categorical variable with a fixed, ordered state list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Variable {
    name: String,
    states: Vec<String>,
}

impl Variable {
    pub fn new<S: Into<String>>(
        name: impl Into<String>,
        states: impl IntoIterator<Item = S>,
    ) -> Result<Self, ModelError> {
        let name = name.into();
        if name.is_empty()
            || name
                .chars()
                .any(|c| c.is_whitespace() || matches!(c, '{' | '}' | '|' | ',' | '#'))
        {
            return Err(ModelError::BadVariableName(name));
        }
        let states: Vec<String> = states.into_iter().map(Into::into).collect();
        if states.is_empty() {
            return Err(ModelError::NoStates { variable: name });
        }
        for (i, s) in states.iter().enumerate() {
            if states[..i].contains(s) {
                return Err(ModelError::DuplicateState {
                    variable: name,
                    state: s.clone(),
                });
            }
        }
        Ok(Self { name, states })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    /// Number of states r_i.
    pub fn cardinality(&self) -> usize {
        self.states.len()
    }

    pub fn state_index(&self, token: &str) -> Option<usize> {
        self.states.iter().position(|s| s == token)
    }
}

/// Variables plus a parent list per variable, checked acyclic.
#[derive(Debug, Clone, PartialEq)]
pub struct Dag {
    variables: Vec<Variable>,
    parents: Vec<Vec<usize>>,
    topo_order: Vec<usize>,
}

impl Dag {
    pub fn new(variables: Vec<Variable>, parents: Vec<Vec<usize>>) -> Result<Self, ModelError> {
        if variables.is_empty() {
            return Err(ModelError::NoVariables);
        }
        for (i, v) in variables.iter().enumerate() {
            if variables[..i].iter().any(|u| u.name == v.name) {
                return Err(ModelError::DuplicateVariable(v.name.clone()));
            }
        }
        if parents.len() != variables.len() {
            return Err(ModelError::CptCount {
                variables: variables.len(),
                cpts: parents.len(),
            });
        }
        for (child, list) in parents.iter().enumerate() {
            for (pos, &p) in list.iter().enumerate() {
                if p >= variables.len() {
                    return Err(ModelError::ParentOutOfRange {
                        variable: variables[child].name.clone(),
                        index: p,
                    });
                }
                if p == child {
                    return Err(ModelError::SelfParent {
                        variable: variables[child].name.clone(),
                    });
                }
                if list[..pos].contains(&p) {
                    return Err(ModelError::DuplicateParent {
                        variable: variables[child].name.clone(),
                    });
                }
            }
        }
        let topo_order = topological_order(variables.len(), &parents).ok_or(ModelError::Cycle)?;
        Ok(Self {
            variables,
            parents,
            topo_order,
        })
    }

    /// A chain linking consecutive variables: v0 -> v1 -> ... -> vn.
    pub fn chain(variables: Vec<Variable>) -> Result<Self, ModelError> {
        let parents = (0..variables.len())
            .map(|i| if i == 0 { vec![] } else { vec![i - 1] })
            .collect();
        Self::new(variables, parents)
    }

    /// The fully disconnected graph over the same variables.
    pub fn empty(variables: Vec<Variable>) -> Result<Self, ModelError> {
        let parents = vec![vec![]; variables.len()];
        Self::new(variables, parents)
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn variable(&self, index: usize) -> &Variable {
        &self.variables[index]
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v.name == name)
    }

    pub fn var_count(&self) -> usize {
        self.variables.len()
    }

    pub fn parents_of(&self, variable: usize) -> &[usize] {
        &self.parents[variable]
    }

    /// Parent-configuration count q_i (1 for parentless variables).
    pub fn config_count(&self, variable: usize) -> usize {
        self.parents[variable]
            .iter()
            .map(|&p| self.variables[p].cardinality())
            .product()
    }

    /// Indices in an order where every parent precedes its children.
    pub fn topological_order(&self) -> &[usize] {
        &self.topo_order
    }

    /// Mixed-radix row index for an explicit parent-state assignment,
    /// aligned with `parents_of(variable)`. The last parent varies
    /// fastest; parentless variables map to 0.
    pub fn parent_config_index(
        &self,
        variable: usize,
        parent_states: &[usize],
    ) -> Result<usize, ModelError> {
        let parents = &self.parents[variable];
        if parent_states.len() != parents.len() {
            return Err(ModelError::ParentStateCount {
                variable: self.variables[variable].name.clone(),
                expected: parents.len(),
                found: parent_states.len(),
            });
        }
        let mut index = 0;
        for (&p, &s) in parents.iter().zip(parent_states) {
            let card = self.variables[p].cardinality();
            if s >= card {
                return Err(ModelError::ParentStateRange {
                    variable: self.variables[variable].name.clone(),
                    index: s,
                });
            }
            index = index * card + s;
        }
        Ok(index)
    }

    /// Row index for `variable` under a full assignment (one state index
    /// per variable, in variable order).
    pub(crate) fn config_index_in(&self, variable: usize, assignment: &[usize]) -> usize {
        let mut index = 0;
        for &p in &self.parents[variable] {
            index = index * self.variables[p].cardinality() + assignment[p];
        }
        index
    }

    /// Directed edges as sorted (parent, child) pairs.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut edges: Vec<(usize, usize)> = self
            .parents
            .iter()
            .enumerate()
            .flat_map(|(child, ps)| ps.iter().map(move |&p| (p, child)))
            .collect();
        edges.sort_unstable();
        edges
    }

    pub fn edge_count(&self) -> usize {
        self.parents.iter().map(Vec::len).sum()
    }
}

fn topological_order(n: usize, parents: &[Vec<usize>]) -> Option<Vec<usize>> {
    let mut placed = vec![false; n];
    let mut order = Vec::with_capacity(n);
    while order.len() < n {
        let mut advanced = false;
        for v in 0..n {
            if !placed[v] && parents[v].iter().all(|&p| placed[p]) {
                placed[v] = true;
                order.push(v);
                advanced = true;
            }
        }
        if !advanced {
            return None; // remaining nodes all wait on each other
        }
    }
    Some(order)
}

/// Sufficient statistics for one (structure, dataset) pair: per variable
/// a q_i x r_i matrix of counts N_ijk with row sums N_ij.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountTable {
    families: Vec<FamilyCounts>,
    records: u64,
}

/// The count matrix of a single variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyCounts {
    configs: usize,
    states: usize,
    data: Vec<u64>,
}

impl FamilyCounts {
    fn zeros(configs: usize, states: usize) -> Self {
        Self {
            configs,
            states,
            data: vec![0; configs * states],
        }
    }

    /// q_i.
    pub fn configs(&self) -> usize {
        self.configs
    }

    /// r_i.
    pub fn states(&self) -> usize {
        self.states
    }

    /// N_ijk.
    pub fn count(&self, config: usize, state: usize) -> u64 {
        self.data[config * self.states + state]
    }

    pub fn row(&self, config: usize) -> &[u64] {
        &self.data[config * self.states..(config + 1) * self.states]
    }

    /// N_ij.
    pub fn row_total(&self, config: usize) -> u64 {
        self.row(config).iter().sum()
    }

    pub fn total(&self) -> u64 {
        self.data.iter().sum()
    }
}

impl CountTable {
    pub fn families(&self) -> &[FamilyCounts] {
        &self.families
    }

    pub fn family(&self, variable: usize) -> &FamilyCounts {
        &self.families[variable]
    }

    /// Number of records tallied.
    pub fn dataset_size(&self) -> u64 {
        self.records
    }
}

/// Counts N_ijk over the dataset for every family of the graph. The
/// dataset's variables must match the graph's exactly (same names,
/// states, and order).
pub fn tally_counts(dataset: &Dataset, dag: &Dag) -> Result<CountTable, ModelError> {
    if dataset.variables() != dag.variables() {
        return Err(ModelError::VariableMismatch);
    }
    let mut families: Vec<FamilyCounts> = (0..dag.var_count())
        .map(|i| FamilyCounts::zeros(dag.config_count(i), dag.variable(i).cardinality()))
        .collect();
    for row in dataset.rows() {
        for (i, fam) in families.iter_mut().enumerate() {
            let j = dag.config_index_in(i, row);
            fam.data[j * fam.states + row[i]] += 1;
        }
    }
    Ok(CountTable {
        families,
        records: dataset.rows().len() as u64,
    })
}

/// Dirichlet prior strength: the equivalent sample size N'.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PriorConfig {
    ess: f64,
}

impl PriorConfig {
    pub fn new(ess: f64) -> Result<Self, ModelError> {
        if !ess.is_finite() || ess <= 0.0 {
            return Err(ModelError::NonPositiveEss(ess));
        }
        Ok(Self { ess })
    }

    pub fn ess(&self) -> f64 {
        self.ess
    }
}

impl Default for PriorConfig {
    fn default() -> Self {
        Self { ess: 1.0 }
    }
}

/// One conditional probability table: a distribution over the child's
/// states per parent configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct Cpt {
    states: usize,
    probs: Vec<f64>,
}

impl Cpt {
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self, ModelError> {
        let states = match rows.first() {
            Some(first) if !first.is_empty() => first.len(),
            _ => return Err(ModelError::EmptyCpt),
        };
        let mut probs = Vec::with_capacity(rows.len() * states);
        for (j, row) in rows.iter().enumerate() {
            if row.len() != states {
                return Err(ModelError::RaggedRows);
            }
            let mut sum = 0.0;
            for &p in row {
                if !(0.0..=1.0).contains(&p) {
                    return Err(ModelError::ProbabilityOutOfRange { row: j, value: p });
                }
                sum += p;
            }
            if (sum - 1.0).abs() > 1e-9 {
                return Err(ModelError::RowNotNormalized { row: j, sum });
            }
            probs.extend_from_slice(row);
        }
        Ok(Self { states, probs })
    }

    pub fn config_count(&self) -> usize {
        self.probs.len() / self.states
    }

    pub fn state_count(&self) -> usize {
        self.states
    }

    pub fn row(&self, config: usize) -> &[f64] {
        &self.probs[config * self.states..(config + 1) * self.states]
    }

    pub fn prob(&self, config: usize, state: usize) -> f64 {
        self.probs[config * self.states + state]
    }
}

/// Posterior-mean parameter estimate under the N'-derived Dirichlet
/// prior: entry(i,j,k) = (N_ijk + N'/(r_i q_i)) / (N_ij + N'/q_i).
/// Every entry is strictly positive, so top-k rankings are total.
pub fn estimate_cpts(counts: &CountTable, prior: &PriorConfig) -> Vec<Cpt> {
    counts
        .families()
        .iter()
        .map(|fam| {
            let q = fam.configs() as f64;
            let r = fam.states() as f64;
            let cell_prior = prior.ess() / (r * q);
            let row_prior = prior.ess() / q;
            let rows: Vec<Vec<f64>> = (0..fam.configs())
                .map(|j| {
                    let denom = fam.row_total(j) as f64 + row_prior;
                    fam.row(j)
                        .iter()
                        .map(|&n| (n as f64 + cell_prior) / denom)
                        .collect()
                })
                .collect();
            Cpt::from_rows(rows).expect("posterior-mean rows are normalized by construction")
        })
        .collect()
}

/// A graph plus one fitted table per variable.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    name: String,
    dag: Dag,
    cpts: Vec<Cpt>,
}

impl Network {
    pub fn new(name: impl Into<String>, dag: Dag, cpts: Vec<Cpt>) -> Result<Self, ModelError> {
        if cpts.len() != dag.var_count() {
            return Err(ModelError::CptCount {
                variables: dag.var_count(),
                cpts: cpts.len(),
            });
        }
        for (i, cpt) in cpts.iter().enumerate() {
            let want_rows = dag.config_count(i);
            let want_cols = dag.variable(i).cardinality();
            if cpt.config_count() != want_rows || cpt.state_count() != want_cols {
                return Err(ModelError::CptShape {
                    variable: dag.variable(i).name().to_string(),
                    rows: cpt.config_count(),
                    cols: cpt.state_count(),
                    want_rows,
                    want_cols,
                });
            }
        }
        Ok(Self {
            name: name.into(),
            dag,
            cpts,
        })
    }

    /// Tallies the dataset against the graph and fits posterior-mean
    /// tables in one step.
    pub fn fit(
        name: impl Into<String>,
        dag: Dag,
        dataset: &Dataset,
        prior: &PriorConfig,
    ) -> Result<Self, ModelError> {
        let counts = tally_counts(dataset, &dag)?;
        let cpts = estimate_cpts(&counts, prior);
        Self::new(name, dag, cpts)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dag(&self) -> &Dag {
        &self.dag
    }

    pub fn cpt(&self, variable: usize) -> &Cpt {
        &self.cpts[variable]
    }

    pub fn cpts(&self) -> &[Cpt] {
        &self.cpts
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.dag.var_index(name)
    }
}
