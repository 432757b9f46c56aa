//! File-backed plumbing around the core codecs: reading logs, loading
//! networks and topic maps, and the append-mode transition database.

use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use nextact_core::ausm::{HelpTopicMap, SinkError, TransitionSink};
use nextact_core::bbn::format::import_network;
use nextact_core::bbn::Network;
use nextact_core::event_log::{
    encode_transition_row, read_transition_db, TransitionRecord, TRANSITION_DB_HEADER,
};

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

pub fn load_network(path: &Path) -> Result<Network> {
    let text = read_text(path)?;
    import_network(&text).with_context(|| format!("invalid network file {}", path.display()))
}

/// Loads a topic map, or the built-in default when no path is given.
pub fn load_topics(path: Option<&Path>) -> Result<HelpTopicMap> {
    match path {
        Some(path) => {
            let text = read_text(path)?;
            HelpTopicMap::parse(&text)
                .with_context(|| format!("invalid topic map {}", path.display()))
        }
        None => Ok(HelpTopicMap::builtin_default()),
    }
}

pub fn read_db(path: &Path) -> Result<Vec<TransitionRecord>> {
    let text = read_text(path)?;
    read_transition_db(&text)
        .with_context(|| format!("invalid transition database {}", path.display()))
}

/// Checks that an existing database file starts with the expected
/// header line.
fn check_db_header(path: &Path) -> Result<()> {
    let file = File::open(path).with_context(|| format!("cannot read {}", path.display()))?;
    let mut header = String::new();
    BufReader::new(file)
        .read_line(&mut header)
        .with_context(|| format!("cannot read {}", path.display()))?;
    if header.trim_end_matches('\n') != TRANSITION_DB_HEADER {
        bail!(
            "{} is not a transition database (bad header)",
            path.display()
        );
    }
    Ok(())
}

/// Appends records to the database at `path`, creating it (with the
/// header line) when missing. Returns the number of rows written.
pub fn append_records(path: &Path, records: &[TransitionRecord]) -> Result<usize> {
    let mut file = open_db_for_append(path)?;
    for record in records {
        let row = encode_transition_row(record)?;
        writeln!(file, "{row}").with_context(|| format!("cannot write {}", path.display()))?;
    }
    file.flush()?;
    Ok(records.len())
}

fn open_db_for_append(path: &Path) -> Result<File> {
    let exists = path.exists();
    if exists {
        check_db_header(path)?;
    }
    let mut file = OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .with_context(|| format!("cannot open {}", path.display()))?;
    if !exists {
        writeln!(file, "{TRANSITION_DB_HEADER}")
            .with_context(|| format!("cannot write {}", path.display()))?;
    }
    Ok(file)
}

/// A [`TransitionSink`] appending rows to a database file as they
/// arrive; every append is flushed so an interrupted session loses
/// nothing.
pub struct FileSink {
    path: PathBuf,
    file: File,
}

impl FileSink {
    pub fn open(path: &Path) -> Result<Self> {
        let file = open_db_for_append(path)?;
        Ok(Self {
            path: path.to_path_buf(),
            file,
        })
    }
}

impl TransitionSink for FileSink {
    fn append(&mut self, record: &TransitionRecord) -> Result<(), SinkError> {
        let row = encode_transition_row(record).map_err(|e| SinkError::new(e.to_string()))?;
        writeln!(self.file, "{row}")
            .and_then(|()| self.file.flush())
            .map_err(|e| SinkError::new(format!("{}: {e}", self.path.display())))
    }
}
