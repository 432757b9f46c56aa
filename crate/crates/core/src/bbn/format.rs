//! The network text format.
//!
//! ```text
//! net <name>
//! var <name> { <state1>, <state2>, ... }
//! cpt <child> | <parent1> <parent2> ... {
//!   <p ... p>     # one line per parent configuration, last parent fastest
//! }
//! ```
//!
//! UTF-8, line oriented; `#` starts a comment. Parentless variables use
//! `cpt <child> {` with a single row. All `var` lines precede the first
//! `cpt`, and every variable gets exactly one cpt. Probabilities are
//! written in scientific notation with 17 significant digits, so a
//! written network reads back bit-identically. State tokens may contain
//! spaces and `->`; commas, braces, `#`, and control characters cannot
//! be represented and are rejected on export.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use crate::bbn::{Cpt, Dag, ModelError, Network, Variable};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExportError {
    #[error("variable {variable}: state {state:?} cannot be written in the text format")]
    UnsupportedStateToken { variable: String, state: String },
    #[error("network name {0:?} cannot be written in the text format")]
    UnsupportedName(String),
    #[error("formatting failed")]
    Fmt(#[from] fmt::Error),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ImportError {
    #[error("line {line}: expected `net <name>` first")]
    MissingNet { line: usize },
    #[error("line {line}: repeated `net` line")]
    DuplicateNet { line: usize },
    #[error("line {line}: malformed {what} line")]
    Malformed { line: usize, what: &'static str },
    #[error("line {line}: duplicate variable {name}")]
    DuplicateVar { line: usize, name: String },
    #[error("line {line}: `var` lines must precede all `cpt` blocks")]
    VarAfterCpt { line: usize },
    #[error("line {line}: unknown variable {name}")]
    UnknownVariable { line: usize, name: String },
    #[error("line {line}: unknown parent {name}")]
    UnknownParent { line: usize, name: String },
    #[error("line {line}: duplicate cpt for {name}")]
    DuplicateCpt { line: usize, name: String },
    #[error("line {line}: bad probability {token:?}")]
    BadProbability { line: usize, token: String },
    #[error("line {line}: probability {value} outside [0, 1]")]
    OutOfRange { line: usize, value: f64 },
    #[error("line {line}: row sums to {sum}, not 1")]
    RowNotNormalized { line: usize, sum: f64 },
    #[error("line {line}: row has {found} probabilities, expected {expected}")]
    RowWidth {
        line: usize,
        found: usize,
        expected: usize,
    },
    #[error("line {line}: cpt for {name} has {found} rows, expected {expected}")]
    RowCount {
        line: usize,
        name: String,
        found: usize,
        expected: usize,
    },
    #[error("unexpected end of file inside a cpt block")]
    UnexpectedEof,
    #[error("missing cpt for variable {0}")]
    MissingCpt(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

fn state_writable(token: &str) -> bool {
    !token.is_empty()
        && !token
            .chars()
            .any(|c| c.is_control() || matches!(c, ',' | '{' | '}' | '#'))
        && token == token.trim()
}

/// Writes the network in the text format.
pub fn export_network<W: fmt::Write>(network: &Network, out: &mut W) -> Result<(), ExportError> {
    let name = network.name();
    if name.is_empty() || name.chars().any(|c| c.is_control() || c == '#') {
        return Err(ExportError::UnsupportedName(name.to_string()));
    }
    writeln!(out, "net {name}")?;
    let dag = network.dag();
    for variable in dag.variables() {
        for state in variable.states() {
            if !state_writable(state) {
                return Err(ExportError::UnsupportedStateToken {
                    variable: variable.name().to_string(),
                    state: state.clone(),
                });
            }
        }
        writeln!(
            out,
            "var {} {{ {} }}",
            variable.name(),
            variable.states().join(", ")
        )?;
    }
    for (i, variable) in dag.variables().iter().enumerate() {
        let parents = dag.parents_of(i);
        if parents.is_empty() {
            writeln!(out, "cpt {} {{", variable.name())?;
        } else {
            let names: Vec<&str> = parents.iter().map(|&p| dag.variable(p).name()).collect();
            writeln!(out, "cpt {} | {} {{", variable.name(), names.join(" "))?;
        }
        let cpt = network.cpt(i);
        for j in 0..cpt.config_count() {
            out.write_str(" ")?;
            for &p in cpt.row(j) {
                write!(out, " {p:.16e}")?;
            }
            out.write_char('\n')?;
        }
        writeln!(out, "}}")?;
    }
    Ok(())
}

/// Convenience wrapper returning the text as a string.
pub fn network_to_string(network: &Network) -> Result<String, ExportError> {
    let mut out = String::new();
    export_network(network, &mut out)?;
    Ok(out)
}

struct PendingCpt {
    child: usize,
    parents: Vec<usize>,
    rows: Vec<Vec<f64>>,
}

/// Parses the text format back into a [`Network`]. Rows whose sum
/// strays from 1 by more than 1e-6 are rejected; rows inside that
/// tolerance but beyond the table invariant of 1e-9 are renormalized.
pub fn import_network(text: &str) -> Result<Network, ImportError> {
    let mut name: Option<String> = None;
    let mut variables: Vec<Variable> = Vec::new();
    let mut parents: Vec<Option<Vec<usize>>> = Vec::new();
    let mut cpts: Vec<Option<Vec<Vec<f64>>>> = Vec::new();
    let mut seen_cpt = false;
    let mut pending: Option<PendingCpt> = None;
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let content = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let content = content.trim();
        if content.is_empty() {
            continue;
        }

        if let Some(block) = pending.as_mut() {
            if content == "}" {
                let block = pending.take().expect("pending block");
                let expected: usize = block
                    .parents
                    .iter()
                    .map(|&p| variables[p].cardinality())
                    .product();
                if block.rows.len() != expected {
                    return Err(ImportError::RowCount {
                        line,
                        name: variables[block.child].name().to_string(),
                        found: block.rows.len(),
                        expected,
                    });
                }
                parents[block.child] = Some(block.parents);
                cpts[block.child] = Some(block.rows);
                continue;
            }
            let mut row = Vec::new();
            for token in content.split_whitespace() {
                let value: f64 = token.parse().map_err(|_| ImportError::BadProbability {
                    line,
                    token: token.to_string(),
                })?;
                if !(0.0..=1.0).contains(&value) {
                    return Err(ImportError::OutOfRange { line, value });
                }
                row.push(value);
            }
            let expected = variables[block.child].cardinality();
            if row.len() != expected {
                return Err(ImportError::RowWidth {
                    line,
                    found: row.len(),
                    expected,
                });
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > 1e-6 {
                return Err(ImportError::RowNotNormalized { line, sum });
            }
            if (sum - 1.0).abs() > 1e-9 {
                for p in &mut row {
                    *p /= sum;
                }
            }
            block.rows.push(row);
            continue;
        }

        if let Some(rest) = content.strip_prefix("net ") {
            if name.is_some() {
                return Err(ImportError::DuplicateNet { line });
            }
            let rest = rest.trim();
            if rest.is_empty() {
                return Err(ImportError::Malformed { line, what: "net" });
            }
            name = Some(rest.to_string());
            continue;
        }
        if name.is_none() {
            return Err(ImportError::MissingNet { line });
        }

        if let Some(rest) = content.strip_prefix("var ") {
            if seen_cpt {
                return Err(ImportError::VarAfterCpt { line });
            }
            let (var_name, states) =
                parse_var_line(rest).ok_or(ImportError::Malformed { line, what: "var" })?;
            if variables.iter().any(|v| v.name() == var_name) {
                return Err(ImportError::DuplicateVar {
                    line,
                    name: var_name.to_string(),
                });
            }
            let variable = Variable::new(var_name, states)?;
            variables.push(variable);
            parents.push(None);
            cpts.push(None);
            continue;
        }

        if let Some(rest) = content.strip_prefix("cpt ") {
            seen_cpt = true;
            let (child_name, parent_names) =
                parse_cpt_header(rest).ok_or(ImportError::Malformed { line, what: "cpt" })?;
            let child = variables
                .iter()
                .position(|v| v.name() == child_name)
                .ok_or_else(|| ImportError::UnknownVariable {
                    line,
                    name: child_name.to_string(),
                })?;
            if cpts[child].is_some() {
                return Err(ImportError::DuplicateCpt {
                    line,
                    name: child_name.to_string(),
                });
            }
            let mut parent_idx = Vec::with_capacity(parent_names.len());
            for p in parent_names {
                let i = variables
                    .iter()
                    .position(|v| v.name() == p)
                    .ok_or_else(|| ImportError::UnknownParent {
                        line,
                        name: p.to_string(),
                    })?;
                parent_idx.push(i);
            }
            pending = Some(PendingCpt {
                child,
                parents: parent_idx,
                rows: Vec::new(),
            });
            continue;
        }

        return Err(ImportError::Malformed {
            line,
            what: "directive",
        });
    }

    if pending.is_some() {
        return Err(ImportError::UnexpectedEof);
    }
    let name = name.ok_or(ImportError::MissingNet {
        line: last_line.max(1),
    })?;
    for (i, cpt) in cpts.iter().enumerate() {
        if cpt.is_none() {
            return Err(ImportError::MissingCpt(variables[i].name().to_string()));
        }
    }
    let parent_lists: Vec<Vec<usize>> = parents
        .into_iter()
        .map(|p| p.expect("checked alongside cpts"))
        .collect();
    let dag = Dag::new(variables, parent_lists)?;
    let tables = cpts
        .into_iter()
        .map(|rows| Cpt::from_rows(rows.expect("checked above")))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Network::new(name, dag, tables)?)
}

/// `<name> { s1, s2, ... }` -> (name, states)
fn parse_var_line(rest: &str) -> Option<(&str, Vec<&str>)> {
    let open = rest.find('{')?;
    let name = rest[..open].trim();
    if name.is_empty() {
        return None;
    }
    let tail = rest[open + 1..].trim_end();
    let inner = tail.strip_suffix('}')?;
    let states: Vec<&str> = inner.split(',').map(str::trim).collect();
    if states.iter().any(|s| s.is_empty()) {
        return None;
    }
    Some((name, states))
}

/// `<child> {` or `<child> | <p1> <p2> ... {` -> (child, parents)
fn parse_cpt_header(rest: &str) -> Option<(&str, Vec<&str>)> {
    let head = rest.trim_end().strip_suffix('{')?.trim_end();
    match head.split_once('|') {
        Some((child, parents)) => {
            let child = child.trim();
            let parents: Vec<&str> = parents.split_whitespace().collect();
            if child.is_empty() || parents.is_empty() {
                None
            } else {
                Some((child, parents))
            }
        }
        None => {
            let child = head.trim();
            if child.is_empty() || child.contains(char::is_whitespace) {
                None
            } else {
                Some((child, Vec::new()))
            }
        }
    }
}
