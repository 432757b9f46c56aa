//! Turning transition records into a categorical dataset: one variable
//! per selected field, state lists sorted over the observed tokens.

use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use thiserror::Error;

use crate::bbn::{ModelError, Variable};
use crate::event_log::{TransitionRecord, NIL_PROPERTY};

/// Record fields a model variable can be built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Field {
    Paction,
    Pprop,
    Caction,
    Cprop,
    Naction,
    Nprop,
    CpTimeBin,
}

impl Field {
    pub const ALL: [Field; 7] = [
        Field::Paction,
        Field::Pprop,
        Field::Caction,
        Field::Cprop,
        Field::Naction,
        Field::Nprop,
        Field::CpTimeBin,
    ];

    /// Variable name used in networks and network files.
    pub fn variable_name(self) -> &'static str {
        match self {
            Field::Paction => "Paction",
            Field::Pprop => "Pprop",
            Field::Caction => "Caction",
            Field::Cprop => "Cprop",
            Field::Naction => "Naction",
            Field::Nprop => "Nprop",
            Field::CpTimeBin => "CPTimeBin",
        }
    }

    /// Lower-case token used on the command line.
    pub fn token(self) -> &'static str {
        match self {
            Field::Paction => "paction",
            Field::Pprop => "pprop",
            Field::Caction => "caction",
            Field::Cprop => "cprop",
            Field::Naction => "naction",
            Field::Nprop => "nprop",
            Field::CpTimeBin => "cptime_bin",
        }
    }

    pub fn parse(token: &str) -> Option<Field> {
        Field::ALL.into_iter().find(|f| f.token() == token)
    }
}

/// Seconds thresholds splitting the current-previous delta into bins
/// `<=5`, `<=15`, `<=60`, `>60`.
pub const DEFAULT_TIME_THRESHOLDS: [u64; 3] = [5, 15, 60];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DatasetError {
    #[error("no records to build a dataset from")]
    EmptyRecords,
    #[error("field selection is empty")]
    EmptyFieldSelection,
    #[error("field {0} selected twice")]
    DuplicateField(&'static str),
    #[error("unknown field token {0:?}")]
    UnknownField(String),
    #[error("time thresholds must be strictly increasing and non-empty")]
    BadThresholds,
    #[error("record {record}: expected {expected} values, found {found}")]
    WidthMismatch {
        record: usize,
        expected: usize,
        found: usize,
    },
    #[error("record {record}: unknown state {token:?} for variable {variable}")]
    UnknownState {
        record: usize,
        variable: String,
        token: String,
    },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Which record fields become variables, plus the time-bin thresholds.
/// Fields are kept in the canonical order of [`Field::ALL`] regardless
/// of the order given.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldSelection {
    fields: Vec<Field>,
    thresholds: Vec<u64>,
}

impl FieldSelection {
    pub fn new(fields: impl IntoIterator<Item = Field>) -> Result<Self, DatasetError> {
        let mut selected: Vec<Field> = Vec::new();
        for f in fields {
            if selected.contains(&f) {
                return Err(DatasetError::DuplicateField(f.token()));
            }
            selected.push(f);
        }
        if selected.is_empty() {
            return Err(DatasetError::EmptyFieldSelection);
        }
        selected.sort_unstable();
        Ok(Self {
            fields: selected,
            thresholds: DEFAULT_TIME_THRESHOLDS.to_vec(),
        })
    }

    /// Parses a comma-separated list such as `paction,caction,naction`.
    pub fn parse(text: &str) -> Result<Self, DatasetError> {
        let fields = text
            .split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(|t| Field::parse(t).ok_or_else(|| DatasetError::UnknownField(t.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(fields)
    }

    /// The default model: previous, current, and next action only.
    pub fn actions_only() -> Self {
        Self::new([Field::Paction, Field::Caction, Field::Naction])
            .expect("static selection is valid")
    }

    pub fn with_time_thresholds(mut self, thresholds: Vec<u64>) -> Result<Self, DatasetError> {
        if thresholds.is_empty() || thresholds.windows(2).any(|w| w[0] >= w[1]) {
            return Err(DatasetError::BadThresholds);
        }
        self.thresholds = thresholds;
        Ok(self)
    }

    pub fn fields(&self) -> &[Field] {
        &self.fields
    }

    fn bin_label(&self, delta_s: u64) -> String {
        for &t in &self.thresholds {
            if delta_s <= t {
                return alloc::format!("le{t}s");
            }
        }
        alloc::format!("gt{}s", self.thresholds.last().expect("non-empty"))
    }

    fn extract(&self, field: Field, record: &TransitionRecord) -> String {
        let prop = |p: Option<&str>| p.unwrap_or(NIL_PROPERTY).to_string();
        match field {
            Field::Paction => record.paction().to_string(),
            Field::Pprop => prop(record.pprop()),
            Field::Caction => record.caction().to_string(),
            Field::Cprop => prop(record.cprop()),
            Field::Naction => record.naction().to_string(),
            Field::Nprop => prop(record.nprop()),
            Field::CpTimeBin => self.bin_label(record.cp_time_delta_s()),
        }
    }
}

impl Default for FieldSelection {
    fn default() -> Self {
        Self::actions_only()
    }
}

/// A complete categorical dataset: variables plus one state index per
/// variable per row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    variables: Vec<Variable>,
    rows: Vec<Vec<usize>>,
}

impl Dataset {
    /// Builds a dataset from token rows, resolving each token against
    /// its variable's state list.
    pub fn from_tokens<S: AsRef<str>>(
        variables: Vec<Variable>,
        token_rows: &[Vec<S>],
    ) -> Result<Self, DatasetError> {
        let mut rows = Vec::with_capacity(token_rows.len());
        for (record, tokens) in token_rows.iter().enumerate() {
            if tokens.len() != variables.len() {
                return Err(DatasetError::WidthMismatch {
                    record,
                    expected: variables.len(),
                    found: tokens.len(),
                });
            }
            let mut row = Vec::with_capacity(tokens.len());
            for (variable, token) in variables.iter().zip(tokens) {
                let token = token.as_ref();
                let k = variable
                    .state_index(token)
                    .ok_or_else(|| DatasetError::UnknownState {
                        record,
                        variable: variable.name().to_string(),
                        token: token.to_string(),
                    })?;
                row.push(k);
            }
            rows.push(row);
        }
        Ok(Self { variables, rows })
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// Builds the modeling dataset from transition records: one variable
/// per selected field, states sorted lexicographically over the tokens
/// actually observed, one instance per record. Absent properties enter
/// as the `-` placeholder; time deltas as their bin label.
pub fn records_to_instances(
    records: &[TransitionRecord],
    selection: &FieldSelection,
) -> Result<Dataset, DatasetError> {
    if records.is_empty() {
        return Err(DatasetError::EmptyRecords);
    }
    let token_rows: Vec<Vec<String>> = records
        .iter()
        .map(|r| {
            selection
                .fields()
                .iter()
                .map(|&f| selection.extract(f, r))
                .collect()
        })
        .collect();
    let variables = selection
        .fields()
        .iter()
        .enumerate()
        .map(|(col, &field)| {
            let states: BTreeSet<&String> = token_rows.iter().map(|row| &row[col]).collect();
            Variable::new(field.variable_name(), states.into_iter().cloned())
        })
        .collect::<Result<Vec<_>, _>>()?;
    Dataset::from_tokens(variables, &token_rows)
}
