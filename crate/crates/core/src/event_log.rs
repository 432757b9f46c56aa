//! Interaction-log ingestion: parse timestamped action lines, slide a
//! three-wide window over each session to build transition records, and
//! encode/decode the tab-separated transition database.
//!
//! A log line is `timestamp  action  [property]` where the separator is
//! one or more tabs or a run of two or more spaces. Timestamps are
//! session-relative `HH:MM:SS`, optionally padded with single spaces
//! around the colons. Single spaces inside a property are content, not
//! separators.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

/// Header line of the transition database format.
pub const TRANSITION_DB_HEADER: &str =
    "paction\tpprop\tptime\tcaction\tcprop\tctime\tnaction\tnprop\tntime\tcptime_d";

/// Placeholder for an absent property in the database format.
pub const NIL_PROPERTY: &str = "-";

/// One timestamped log line: session-relative time, action token, and an
/// optional property.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionEvent {
    timestamp_s: u64,
    action: String,
    property: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EventError {
    #[error("action token is empty")]
    EmptyAction,
    #[error("{field} contains a tab or newline")]
    IllegalCharacter { field: &'static str },
}

impl ActionEvent {
    /// Builds an event, normalizing an empty property to `None`.
    pub fn new(
        timestamp_s: u64,
        action: impl Into<String>,
        property: Option<&str>,
    ) -> Result<Self, EventError> {
        let action = action.into();
        if action.is_empty() {
            return Err(EventError::EmptyAction);
        }
        if action.contains(['\t', '\n', '\r']) {
            return Err(EventError::IllegalCharacter { field: "action" });
        }
        let property = match property.map(str::trim) {
            None | Some("") => None,
            Some(p) => {
                if p.contains(['\t', '\n', '\r']) {
                    return Err(EventError::IllegalCharacter { field: "property" });
                }
                Some(p.to_string())
            }
        };
        Ok(Self {
            timestamp_s,
            action,
            property,
        })
    }

    pub fn timestamp_s(&self) -> u64 {
        self.timestamp_s
    }

    pub fn action(&self) -> &str {
        &self.action
    }

    pub fn property(&self) -> Option<&str> {
        self.property.as_deref()
    }
}

/// All events of one log file, in file order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SessionLog {
    pub source_id: String,
    pub events: Vec<ActionEvent>,
}

impl SessionLog {
    pub fn new(source_id: impl Into<String>, events: Vec<ActionEvent>) -> Self {
        Self {
            source_id: source_id.into(),
            events,
        }
    }
}

/// One preprocessed database row: the previous, current, and next action
/// of a three-event window plus the current-minus-previous time delta.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionRecord {
    paction: String,
    pprop: Option<String>,
    ptime_s: u64,
    caction: String,
    cprop: Option<String>,
    ctime_s: u64,
    naction: String,
    nprop: Option<String>,
    ntime_s: u64,
    cp_time_delta_s: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransitionError {
    #[error("current time {ctime_s}s precedes previous time {ptime_s}s")]
    TimeReversal { ptime_s: u64, ctime_s: u64 },
    #[error("invalid {slot} event: {source}")]
    Event {
        slot: &'static str,
        source: EventError,
    },
}

impl TransitionRecord {
    /// Builds a record from an explicit `(action, property, time)` triple
    /// per window slot. The time delta is computed, never supplied.
    pub fn new(
        previous: (&str, Option<&str>, u64),
        current: (&str, Option<&str>, u64),
        next: (&str, Option<&str>, u64),
    ) -> Result<Self, TransitionError> {
        let mk = |slot, (action, property, time): (&str, Option<&str>, u64)| {
            ActionEvent::new(time, action, property)
                .map_err(|source| TransitionError::Event { slot, source })
        };
        let prev = mk("previous", previous)?;
        let cur = mk("current", current)?;
        let next = mk("next", next)?;
        Self::from_window(&prev, &cur, &next)
    }

    /// Builds a record from three consecutive events.
    pub fn from_window(
        prev: &ActionEvent,
        cur: &ActionEvent,
        next: &ActionEvent,
    ) -> Result<Self, TransitionError> {
        let cp_time_delta_s =
            cur.timestamp_s
                .checked_sub(prev.timestamp_s)
                .ok_or(TransitionError::TimeReversal {
                    ptime_s: prev.timestamp_s,
                    ctime_s: cur.timestamp_s,
                })?;
        Ok(Self {
            paction: prev.action.clone(),
            pprop: prev.property.clone(),
            ptime_s: prev.timestamp_s,
            caction: cur.action.clone(),
            cprop: cur.property.clone(),
            ctime_s: cur.timestamp_s,
            naction: next.action.clone(),
            nprop: next.property.clone(),
            ntime_s: next.timestamp_s,
            cp_time_delta_s,
        })
    }

    pub fn paction(&self) -> &str {
        &self.paction
    }
    pub fn pprop(&self) -> Option<&str> {
        self.pprop.as_deref()
    }
    pub fn ptime_s(&self) -> u64 {
        self.ptime_s
    }
    pub fn caction(&self) -> &str {
        &self.caction
    }
    pub fn cprop(&self) -> Option<&str> {
        self.cprop.as_deref()
    }
    pub fn ctime_s(&self) -> u64 {
        self.ctime_s
    }
    pub fn naction(&self) -> &str {
        &self.naction
    }
    pub fn nprop(&self) -> Option<&str> {
        self.nprop.as_deref()
    }
    pub fn ntime_s(&self) -> u64 {
        self.ntime_s
    }
    pub fn cp_time_delta_s(&self) -> u64 {
        self.cp_time_delta_s
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TimestampError {
    #[error("malformed timestamp {0:?}: expected HH:MM:SS")]
    Malformed(String),
    #[error("non-digit characters in timestamp {0:?}")]
    NonDigit(String),
    #[error("minutes out of range in timestamp {0:?}")]
    MinutesOutOfRange(String),
    #[error("seconds out of range in timestamp {0:?}")]
    SecondsOutOfRange(String),
}

/// Parses `HH:MM:SS` (single spaces around the colons allowed) into
/// seconds since session start.
pub fn parse_timestamp(text: &str) -> Result<u64, TimestampError> {
    let malformed = || TimestampError::Malformed(text.to_string());
    let mut fields = [0u64; 3];
    let mut count = 0;
    for field in text.split(':') {
        if count == 3 {
            return Err(malformed());
        }
        // at most one space of padding on either side of the colon
        let field = field.strip_prefix(' ').unwrap_or(field);
        let field = field.strip_suffix(' ').unwrap_or(field);
        if field.len() != 2 {
            return Err(malformed());
        }
        if !field.bytes().all(|b| b.is_ascii_digit()) {
            return Err(TimestampError::NonDigit(text.to_string()));
        }
        fields[count] = field.parse::<u64>().expect("two ascii digits");
        count += 1;
    }
    if count != 3 {
        return Err(malformed());
    }
    let [hours, minutes, seconds] = fields;
    if minutes >= 60 {
        return Err(TimestampError::MinutesOutOfRange(text.to_string()));
    }
    if seconds >= 60 {
        return Err(TimestampError::SecondsOutOfRange(text.to_string()));
    }
    Ok(hours * 3600 + minutes * 60 + seconds)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LogParseError {
    #[error("line {line}: {source}")]
    Timestamp {
        line: usize,
        #[source]
        source: TimestampError,
    },
    #[error("line {line}: missing action column")]
    MissingAction { line: usize },
    #[error("line {line}: expected at most 3 columns, found {found}")]
    TooManyColumns { line: usize, found: usize },
    #[error("line {line}: {source}")]
    Event {
        line: usize,
        #[source]
        source: EventError,
    },
}

/// A soft problem noticed while parsing; the events are kept as-is.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LogWarning {
    TimestampDecreased {
        line: usize,
        previous_s: u64,
        found_s: u64,
    },
}

impl fmt::Display for LogWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LogWarning::TimestampDecreased {
                line,
                previous_s,
                found_s,
            } => write!(
                f,
                "line {line}: timestamp {found_s}s precedes {previous_s}s; kept in file order"
            ),
        }
    }
}

/// Splits a line into columns. A separator is any whitespace run that
/// contains a tab or at least two spaces; a lone space stays inside the
/// column. Trailing empty columns (from trailing separators) are dropped.
fn split_columns(line: &str) -> Vec<&str> {
    let mut columns = Vec::new();
    let bytes = line.as_bytes();
    let mut start = 0;
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'\t' || bytes[i] == b' ' {
            let run_start = i;
            let mut has_tab = false;
            let mut spaces = 0usize;
            while i < bytes.len() && (bytes[i] == b'\t' || bytes[i] == b' ') {
                if bytes[i] == b'\t' {
                    has_tab = true;
                } else {
                    spaces += 1;
                }
                i += 1;
            }
            if has_tab || spaces >= 2 {
                columns.push(&line[start..run_start]);
                start = i;
            }
        } else {
            i += 1;
        }
    }
    columns.push(&line[start..]);
    while columns.last().is_some_and(|c| c.trim().is_empty()) {
        columns.pop();
    }
    columns
}

/// Parses one log line. Blank lines yield `Ok(None)` (skip, not error).
pub fn parse_log_line(
    text: &str,
    line_number: usize,
) -> Result<Option<ActionEvent>, LogParseError> {
    let text = text.strip_suffix('\r').unwrap_or(text);
    if text.trim().is_empty() {
        return Ok(None);
    }
    let columns = split_columns(text);
    if columns.len() > 3 {
        return Err(LogParseError::TooManyColumns {
            line: line_number,
            found: columns.len(),
        });
    }
    let timestamp_s =
        parse_timestamp(columns[0].trim()).map_err(|source| LogParseError::Timestamp {
            line: line_number,
            source,
        })?;
    let action = columns.get(1).map(|c| c.trim()).unwrap_or("");
    if action.is_empty() {
        return Err(LogParseError::MissingAction { line: line_number });
    }
    let property = columns.get(2).map(|c| c.trim());
    ActionEvent::new(timestamp_s, action, property)
        .map(Some)
        .map_err(|source| LogParseError::Event {
            line: line_number,
            source,
        })
}

/// A parsed session plus any soft warnings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedLog {
    pub log: SessionLog,
    pub warnings: Vec<LogWarning>,
}

/// Parses a whole log file as one session. Blank lines are skipped; the
/// first hard line error aborts. Decreasing timestamps are reported as
/// warnings and the events kept in file order.
pub fn parse_log(text: &str, source_id: &str) -> Result<ParsedLog, LogParseError> {
    let mut events = Vec::new();
    let mut warnings = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line_number = idx + 1;
        if let Some(event) = parse_log_line(line, line_number)? {
            if let Some(prev) = events.last() {
                let prev: &ActionEvent = prev;
                if event.timestamp_s < prev.timestamp_s {
                    warnings.push(LogWarning::TimestampDecreased {
                        line: line_number,
                        previous_s: prev.timestamp_s,
                        found_s: event.timestamp_s,
                    });
                }
            }
            events.push(event);
        }
    }
    Ok(ParsedLog {
        log: SessionLog::new(source_id, events),
        warnings,
    })
}

/// Slides the three-wide window over one session. Sessions with fewer
/// than 3 events yield no records (boundary rows are dropped); callers
/// that care should warn. Windows never span sessions.
pub fn build_transitions(session: &SessionLog) -> Result<Vec<TransitionRecord>, TransitionError> {
    let events = &session.events;
    if events.len() < 3 {
        return Ok(Vec::new());
    }
    let mut records = Vec::with_capacity(events.len() - 2);
    for window in events.windows(3) {
        records.push(TransitionRecord::from_window(
            &window[0], &window[1], &window[2],
        )?);
    }
    Ok(records)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DbWriteError {
    #[error(
        "record {row}: property is the literal {NIL_PROPERTY:?}, which is reserved for absent"
    )]
    NilPropertyLiteral { row: usize },
    #[error("formatting failed")]
    Fmt(#[from] fmt::Error),
}

fn encode_property(p: Option<&str>) -> &str {
    p.unwrap_or(NIL_PROPERTY)
}

/// Encodes one record as a tab-separated row (no trailing newline).
pub fn encode_transition_row(record: &TransitionRecord) -> Result<String, DbWriteError> {
    for (prop, _slot) in [
        (record.pprop(), "previous"),
        (record.cprop(), "current"),
        (record.nprop(), "next"),
    ] {
        if prop == Some(NIL_PROPERTY) {
            return Err(DbWriteError::NilPropertyLiteral { row: 0 });
        }
    }
    Ok(alloc::format!(
        "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
        record.paction(),
        encode_property(record.pprop()),
        record.ptime_s(),
        record.caction(),
        encode_property(record.cprop()),
        record.ctime_s(),
        record.naction(),
        encode_property(record.nprop()),
        record.ntime_s(),
        record.cp_time_delta_s(),
    ))
}

/// Writes the full database: header line, then one row per record.
pub fn write_transition_db<W: fmt::Write>(
    records: &[TransitionRecord],
    out: &mut W,
) -> Result<(), DbWriteError> {
    out.write_str(TRANSITION_DB_HEADER)?;
    out.write_char('\n')?;
    for (row, record) in records.iter().enumerate() {
        let line = encode_transition_row(record).map_err(|e| match e {
            DbWriteError::NilPropertyLiteral { .. } => {
                DbWriteError::NilPropertyLiteral { row: row + 1 }
            }
            other => other,
        })?;
        out.write_str(&line)?;
        out.write_char('\n')?;
    }
    Ok(())
}

/// Convenience wrapper returning the database as a string.
pub fn transition_db_to_string(records: &[TransitionRecord]) -> Result<String, DbWriteError> {
    let mut out = String::new();
    write_transition_db(records, &mut out)?;
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DbReadError {
    #[error("line 1: missing or wrong header line")]
    Header,
    #[error("line {line}: expected 10 columns, found {found}")]
    ColumnCount { line: usize, found: usize },
    #[error("line {line}: column {column} is not a number: {text:?}")]
    BadNumber {
        line: usize,
        column: &'static str,
        text: String,
    },
    #[error("line {line}: cptime_d is {stored} but ctime - ptime is {computed}")]
    DeltaMismatch {
        line: usize,
        stored: u64,
        computed: u64,
    },
    #[error("line {line}: {source}")]
    Record {
        line: usize,
        #[source]
        source: TransitionError,
    },
}

fn decode_property(field: &str) -> Option<&str> {
    if field == NIL_PROPERTY {
        None
    } else {
        Some(field)
    }
}

/// Parses the database format back into records; exact inverse of
/// [`write_transition_db`].
pub fn read_transition_db(text: &str) -> Result<Vec<TransitionRecord>, DbReadError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header == TRANSITION_DB_HEADER => {}
        _ => return Err(DbReadError::Header),
    }
    let mut records = Vec::new();
    for (idx, line) in lines {
        let line_number = idx + 1;
        let columns: Vec<&str> = line.split('\t').collect();
        if columns.len() != 10 {
            return Err(DbReadError::ColumnCount {
                line: line_number,
                found: columns.len(),
            });
        }
        let number = |column: &'static str, text: &str| -> Result<u64, DbReadError> {
            text.parse::<u64>().map_err(|_| DbReadError::BadNumber {
                line: line_number,
                column,
                text: text.to_string(),
            })
        };
        let ptime = number("ptime", columns[2])?;
        let ctime = number("ctime", columns[5])?;
        let ntime = number("ntime", columns[8])?;
        let stored_delta = number("cptime_d", columns[9])?;
        let record = TransitionRecord::new(
            (columns[0], decode_property(columns[1]), ptime),
            (columns[3], decode_property(columns[4]), ctime),
            (columns[6], decode_property(columns[7]), ntime),
        )
        .map_err(|source| DbReadError::Record {
            line: line_number,
            source,
        })?;
        if record.cp_time_delta_s != stored_delta {
            return Err(DbReadError::DeltaMismatch {
                line: line_number,
                stored: stored_delta,
                computed: record.cp_time_delta_s,
            });
        }
        records.push(record);
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn event(t: u64, action: &str, prop: Option<&str>) -> ActionEvent {
        ActionEvent::new(t, action, prop).unwrap()
    }

    #[test]
    fn timestamp_with_spaces() {
        assert_eq!(parse_timestamp("00 : 08 : 14").unwrap(), 494);
        assert_eq!(parse_timestamp("00:08:14").unwrap(), 494);
        assert_eq!(parse_timestamp("00:00:00").unwrap(), 0);
        assert_eq!(parse_timestamp("01:02:03").unwrap(), 3723);
    }

    #[test]
    fn timestamp_seconds_out_of_range() {
        assert_eq!(
            parse_timestamp("01 : 00 : 60"),
            Err(TimestampError::SecondsOutOfRange("01 : 00 : 60".into()))
        );
        assert_eq!(
            parse_timestamp("01:60:00"),
            Err(TimestampError::MinutesOutOfRange("01:60:00".into()))
        );
    }

    #[test]
    fn timestamp_rejects_garbage() {
        assert!(matches!(
            parse_timestamp("00:08"),
            Err(TimestampError::Malformed(_))
        ));
        assert!(matches!(
            parse_timestamp("0:08:14"),
            Err(TimestampError::Malformed(_))
        ));
        assert!(matches!(
            parse_timestamp("a0:08:14"),
            Err(TimestampError::NonDigit(_))
        ));
        assert!(matches!(
            parse_timestamp("00:08:14:22"),
            Err(TimestampError::Malformed(_))
        ));
    }

    #[test]
    fn line_with_property() {
        let got = parse_log_line("00 : 08 : 19\tChooseAttribute\tGrowth->Plant", 1)
            .unwrap()
            .unwrap();
        assert_eq!(got, event(499, "ChooseAttribute", Some("Growth->Plant")));
    }

    #[test]
    fn line_without_property() {
        let got = parse_log_line("00 : 10 : 00\tRunModel", 4)
            .unwrap()
            .unwrap();
        assert_eq!(got, event(600, "RunModel", None));
        // trailing tab leaves the third column blank
        let got = parse_log_line("00 : 10 : 00\tRunModel\t", 4)
            .unwrap()
            .unwrap();
        assert_eq!(got, event(600, "RunModel", None));
    }

    #[test]
    fn line_with_spaced_property_and_double_space_separator() {
        let got = parse_log_line("00 : 09 : 07  ConnectRelation  Intensity of Light", 9)
            .unwrap()
            .unwrap();
        assert_eq!(
            got,
            event(547, "ConnectRelation", Some("Intensity of Light"))
        );
    }

    #[test]
    fn blank_line_is_skip_not_error() {
        assert_eq!(parse_log_line("", 3).unwrap(), None);
        assert_eq!(parse_log_line("   \t ", 3).unwrap(), None);
    }

    #[test]
    fn garbage_line_errors_with_line_number() {
        let err = parse_log_line("garbage line", 12).unwrap_err();
        match err {
            LogParseError::Timestamp { line, .. } => assert_eq!(line, 12),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn too_many_columns_rejected() {
        let err = parse_log_line("00:00:01\ta\tb\tc", 2).unwrap_err();
        assert_eq!(err, LogParseError::TooManyColumns { line: 2, found: 4 });
    }

    #[test]
    fn parse_log_empty_text() {
        let parsed = parse_log("", "empty").unwrap();
        assert!(parsed.log.events.is_empty());
        assert!(parsed.warnings.is_empty());
    }

    #[test]
    fn parse_log_reports_first_bad_line() {
        let text = "00:00:01\tA\n00:00:02\tB\nnot a line\n";
        let err = parse_log(text, "s").unwrap_err();
        match err {
            LogParseError::Timestamp { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn parse_log_warns_on_decreasing_timestamps() {
        let text = "00:00:05\tA\n00:00:03\tB\n";
        let parsed = parse_log(text, "s").unwrap();
        assert_eq!(parsed.log.events.len(), 2);
        assert_eq!(
            parsed.warnings,
            vec![LogWarning::TimestampDecreased {
                line: 2,
                previous_s: 5,
                found_s: 3
            }]
        );
    }

    #[test]
    fn transitions_first_window() {
        let session = SessionLog::new(
            "fig",
            vec![
                event(494, "InsertObject", Some("Plant")),
                event(499, "ChooseAttribute", Some("Growth->Plant")),
                event(517, "InsertObject", Some("Leaf")),
            ],
        );
        let records = build_transitions(&session).unwrap();
        assert_eq!(records.len(), 1);
        let r = &records[0];
        assert_eq!(r.paction(), "InsertObject");
        assert_eq!(r.pprop(), Some("Plant"));
        assert_eq!(r.ptime_s(), 494);
        assert_eq!(r.caction(), "ChooseAttribute");
        assert_eq!(r.cprop(), Some("Growth->Plant"));
        assert_eq!(r.ctime_s(), 499);
        assert_eq!(r.naction(), "InsertObject");
        assert_eq!(r.nprop(), Some("Leaf"));
        assert_eq!(r.ntime_s(), 517);
        assert_eq!(r.cp_time_delta_s(), 5);
    }

    #[test]
    fn transitions_short_session_is_empty() {
        let session = SessionLog::new("s", vec![event(1, "A", None), event(2, "B", None)]);
        assert_eq!(build_transitions(&session).unwrap(), Vec::new());
        let empty = SessionLog::new("s", vec![]);
        assert_eq!(build_transitions(&empty).unwrap(), Vec::new());
    }

    #[test]
    fn transitions_time_reversal_is_an_error() {
        let session = SessionLog::new(
            "s",
            vec![
                event(10, "A", None),
                event(5, "B", None),
                event(6, "C", None),
            ],
        );
        assert_eq!(
            build_transitions(&session).unwrap_err(),
            TransitionError::TimeReversal {
                ptime_s: 10,
                ctime_s: 5
            }
        );
    }

    #[test]
    fn db_round_trip_and_nil_property() {
        let session = SessionLog::new(
            "s",
            vec![
                event(1, "A", Some("x->y")),
                event(3, "B", None),
                event(6, "C", Some("with space")),
                event(6, "D", None),
            ],
        );
        let records = build_transitions(&session).unwrap();
        let text = transition_db_to_string(&records).unwrap();
        assert!(text.starts_with(TRANSITION_DB_HEADER));
        // absent property is the "-" placeholder
        assert!(text.lines().nth(2).unwrap().contains("\t-\t"));
        let back = read_transition_db(&text).unwrap();
        assert_eq!(back, records);
        // byte stability
        assert_eq!(transition_db_to_string(&back).unwrap(), text);
    }

    #[test]
    fn db_rejects_literal_dash_property() {
        let record =
            TransitionRecord::new(("A", Some("-"), 1), ("B", None, 2), ("C", None, 3)).unwrap();
        assert!(matches!(
            encode_transition_row(&record),
            Err(DbWriteError::NilPropertyLiteral { .. })
        ));
    }

    #[test]
    fn db_read_errors_name_the_line() {
        let good = "A\t-\t1\tB\t-\t2\tC\t-\t3\t1";
        let text = alloc::format!("{TRANSITION_DB_HEADER}\n{good}\nA\t-\t1\tB\t-\t2\tC\t-\t3\n");
        assert_eq!(
            read_transition_db(&text).unwrap_err(),
            DbReadError::ColumnCount { line: 3, found: 9 }
        );

        let text = alloc::format!("{TRANSITION_DB_HEADER}\nA\t-\tx\tB\t-\t2\tC\t-\t3\t1\n");
        assert!(matches!(
            read_transition_db(&text).unwrap_err(),
            DbReadError::BadNumber {
                line: 2,
                column: "ptime",
                ..
            }
        ));

        let text = alloc::format!("{TRANSITION_DB_HEADER}\nA\t-\t1\tB\t-\t2\tC\t-\t3\t7\n");
        assert!(matches!(
            read_transition_db(&text).unwrap_err(),
            DbReadError::DeltaMismatch {
                line: 2,
                stored: 7,
                computed: 1
            }
        ));

        assert_eq!(
            read_transition_db("nope\n").unwrap_err(),
            DbReadError::Header
        );
    }
}
