use anyhow::Context;
use nextact_core::event_log::{build_transitions, parse_log};

use crate::files;
use crate::{CliError, IngestArgs};

/// Each log file is one session; windows never span files.
pub fn run(args: &IngestArgs) -> Result<(), CliError> {
    let mut all_records = Vec::new();
    let mut total_events = 0usize;
    for path in &args.logs {
        let text = files::read_text(path)?;
        let source_id = path.display().to_string();
        let parsed = parse_log(&text, &source_id)
            .with_context(|| format!("cannot parse {source_id}"))
            .map_err(CliError::Data)?;
        for warning in &parsed.warnings {
            eprintln!("warning: {source_id}: {warning}");
        }
        let records = build_transitions(&parsed.log)
            .with_context(|| format!("cannot build transitions from {source_id}"))
            .map_err(CliError::Data)?;
        let events = parsed.log.events.len();
        if events < 3 {
            eprintln!("warning: {source_id}: fewer than 3 events, no transitions");
        }
        println!("{source_id}: {events} events, {} records", records.len());
        total_events += events;
        all_records.extend(records);
    }
    let written = files::append_records(&args.db, &all_records)?;
    println!(
        "total: {total_events} events, {written} records appended to {}",
        args.db.display()
    );
    Ok(())
}
