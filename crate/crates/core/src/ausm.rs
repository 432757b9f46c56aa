//! The adaptive user support module: consumes the live action stream,
//! persists each completed three-event window to a transition sink, and
//! answers help queries with the top-k most probable next actions
//! mapped to help topics.
//!
//! The module never refits the network itself; appended records only
//! grow the persisted database, and the in-memory network changes
//! solely through [`Ausm::reload_network`]. Queries hold an `Arc` to
//! the network, so a reload never disturbs a query already underway.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;

use thiserror::Error;

use crate::bbn::dataset::Field;
use crate::bbn::format::{import_network, ImportError};
use crate::bbn::Network;
use crate::event_log::{ActionEvent, TransitionError, TransitionRecord};
use crate::inference::{posterior_exact, predict_next, Evidence, InferenceError, Posterior};

pub const DEFAULT_TOPIC_ID: &str = "HELP.GENERIC";
pub const DEFAULT_TOPIC_TITLE: &str = "General help";

/// A help topic reference resolved by the host.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HelpTopic {
    pub id: String,
    pub title: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TopicMapError {
    #[error("line {line}: expected `action<TAB>topic_id<TAB>title`")]
    Malformed { line: usize },
    #[error("line {line}: duplicate entry for action {action:?}")]
    DuplicateAction { line: usize, action: String },
}

/// Maps action tokens to help topics, with a default topic for any
/// unmapped action.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HelpTopicMap {
    entries: BTreeMap<String, HelpTopic>,
    default_topic: HelpTopic,
}

impl HelpTopicMap {
    /// The built-in map: no entries, generic default.
    pub fn builtin_default() -> Self {
        Self {
            entries: BTreeMap::new(),
            default_topic: HelpTopic {
                id: DEFAULT_TOPIC_ID.to_string(),
                title: DEFAULT_TOPIC_TITLE.to_string(),
            },
        }
    }

    /// Parses tab-separated `action  topic_id  title` lines. A line with
    /// action `*` declares the default topic; without one the built-in
    /// default applies. Blank lines are skipped.
    pub fn parse(text: &str) -> Result<Self, TopicMapError> {
        let mut map = Self::builtin_default();
        let mut saw_default = false;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            if raw.trim().is_empty() {
                continue;
            }
            let columns: Vec<&str> = raw.split('\t').map(str::trim).collect();
            let [action, id, title] = columns.as_slice() else {
                return Err(TopicMapError::Malformed { line });
            };
            if action.is_empty() || id.is_empty() || title.is_empty() {
                return Err(TopicMapError::Malformed { line });
            }
            let topic = HelpTopic {
                id: id.to_string(),
                title: title.to_string(),
            };
            if *action == "*" {
                if saw_default {
                    return Err(TopicMapError::DuplicateAction {
                        line,
                        action: "*".to_string(),
                    });
                }
                saw_default = true;
                map.default_topic = topic;
            } else if map.entries.insert(action.to_string(), topic).is_some() {
                return Err(TopicMapError::DuplicateAction {
                    line,
                    action: action.to_string(),
                });
            }
        }
        Ok(map)
    }

    /// The topic for an action, falling back to the default.
    pub fn lookup(&self, action: &str) -> &HelpTopic {
        self.entries.get(action).unwrap_or(&self.default_topic)
    }

    pub fn default_topic(&self) -> &HelpTopic {
        &self.default_topic
    }

    pub fn entry_count(&self) -> usize {
        self.entries.len()
    }
}

/// Failure reported by a transition sink.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("transition sink failure: {message}")]
pub struct SinkError {
    message: String,
}

impl SinkError {
    pub fn new(message: impl Into<String>) -> Self {
        Self {
            message: message.into(),
        }
    }
}

/// Destination for completed transition records.
pub trait TransitionSink {
    fn append(&mut self, record: &TransitionRecord) -> Result<(), SinkError>;
}

impl TransitionSink for Vec<TransitionRecord> {
    fn append(&mut self, record: &TransitionRecord) -> Result<(), SinkError> {
        self.push(record.clone());
        Ok(())
    }
}

impl<T: TransitionSink + ?Sized> TransitionSink for alloc::boxed::Box<T> {
    fn append(&mut self, record: &TransitionRecord) -> Result<(), SinkError> {
        (**self).append(record)
    }
}

/// Discards every record; replay evaluation uses it to avoid polluting
/// any real database.
#[derive(Debug, Default, Clone, Copy)]
pub struct NullSink;

impl TransitionSink for NullSink {
    fn append(&mut self, _record: &TransitionRecord) -> Result<(), SinkError> {
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RecordError {
    #[error(transparent)]
    Transition(#[from] TransitionError),
    #[error(transparent)]
    Sink(#[from] SinkError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QueryError {
    #[error("k must be at least 1")]
    InvalidK,
    #[error(transparent)]
    Inference(#[from] InferenceError),
}

/// One ranked help suggestion.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedTopic {
    pub action: String,
    pub probability: f64,
    pub topic_id: String,
    pub topic_title: String,
}

/// The ranked suggestions for one help query. `fallback` is set when
/// the ranking came from the next-action marginal because no current
/// action was known (cold start or unseen token).
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionResult {
    pub entries: Vec<RankedTopic>,
    pub fallback: bool,
}

/// The module state: the sliding two-event window, the active network,
/// the topic map, and the sink that receives completed transitions.
///
/// One writer per instance; queries take `&self` and may run
/// concurrently with each other.
#[derive(Debug)]
pub struct Ausm<S> {
    previous: Option<ActionEvent>,
    current: Option<ActionEvent>,
    network: Arc<Network>,
    topics: HelpTopicMap,
    sink: S,
    recorded: u64,
}

impl<S: TransitionSink> Ausm<S> {
    pub fn new(network: impl Into<Arc<Network>>, topics: HelpTopicMap, sink: S) -> Self {
        Self {
            previous: None,
            current: None,
            network: network.into(),
            topics,
            sink,
            recorded: 0,
        }
    }

    /// Feeds one action. Once previous, current, and the incoming event
    /// are all present, the completed window is appended to the sink and
    /// the window slides; the first two events only fill the window.
    ///
    /// On a sink failure the state is left untouched (the events that
    /// make up the record stay in the window), so the same event can be
    /// retried once the sink recovers.
    pub fn record_action(
        &mut self,
        event: ActionEvent,
    ) -> Result<Option<TransitionRecord>, RecordError> {
        let record = match (&self.previous, &self.current) {
            (Some(prev), Some(cur)) => Some(TransitionRecord::from_window(prev, cur, &event)?),
            _ => None,
        };
        if let Some(record) = &record {
            self.sink.append(record)?;
            self.recorded += 1;
        }
        self.previous = self.current.take();
        self.current = Some(event);
        Ok(record)
    }

    /// The top-k next actions for the current interaction state, each
    /// mapped to its help topic. Never fails for an empty or unknown
    /// state: it degrades to the next-action marginal with the fallback
    /// flag set.
    pub fn query_help(&self, k: usize) -> Result<PredictionResult, QueryError> {
        if k == 0 {
            return Err(QueryError::InvalidK);
        }
        let (posterior, fallback) = match &self.current {
            Some(event) => {
                let prediction = predict_next(&self.network, event.action())?;
                (prediction.posterior, prediction.fallback)
            }
            None => (self.naction_marginal()?, true),
        };
        Ok(self.rank(&posterior, k, fallback))
    }

    fn naction_marginal(&self) -> Result<Posterior, InferenceError> {
        posterior_exact(
            &self.network,
            &Evidence::new(),
            Field::Naction.variable_name(),
        )
    }

    fn rank(&self, posterior: &Posterior, k: usize, fallback: bool) -> PredictionResult {
        let entries = posterior
            .ranked()
            .into_iter()
            .take(k)
            .map(|(action, probability)| {
                let topic = self.topics.lookup(action);
                RankedTopic {
                    action: action.to_string(),
                    probability,
                    topic_id: topic.id.clone(),
                    topic_title: topic.title.clone(),
                }
            })
            .collect();
        PredictionResult { entries, fallback }
    }

    /// Swaps in a network parsed from the text format. On any parse
    /// error the previous network stays active.
    pub fn reload_network(&mut self, text: &str) -> Result<(), ImportError> {
        let network = import_network(text)?;
        self.network = Arc::new(network);
        Ok(())
    }

    /// Snapshot of the active network. A holder keeps the old network
    /// alive across reloads.
    pub fn network(&self) -> Arc<Network> {
        Arc::clone(&self.network)
    }

    pub fn topics(&self) -> &HelpTopicMap {
        &self.topics
    }

    pub fn current_action(&self) -> Option<&str> {
        self.current.as_ref().map(ActionEvent::action)
    }

    pub fn transitions_recorded(&self) -> u64 {
        self.recorded
    }

    pub fn sink(&self) -> &S {
        &self.sink
    }

    pub fn into_sink(self) -> S {
        self.sink
    }
}
