use std::io::{self, BufRead, Write};

use nextact_core::ausm::{Ausm, TransitionSink};
use nextact_core::event_log::ActionEvent;

use crate::commands::print_prediction;
use crate::files::{self, FileSink};
use crate::{AssistArgs, CliError};

/// Counts without storing; used when no database path is given.
struct CountingSink;

impl TransitionSink for CountingSink {
    fn append(
        &mut self,
        _record: &nextact_core::event_log::TransitionRecord,
    ) -> Result<(), nextact_core::ausm::SinkError> {
        Ok(())
    }
}

/// Line protocol on stdin: `ACTION [property]` records an action, `?`
/// asks for help, `quit` exits. Timestamps are synthesized as one
/// second per accepted action.
pub fn run(args: &AssistArgs) -> Result<(), CliError> {
    if args.top_k == 0 {
        return Err(CliError::Usage("--top-k must be at least 1".into()));
    }
    let network = files::load_network(&args.net)?;
    let topics = files::load_topics(args.topics.as_deref())?;
    let sink: Box<dyn TransitionSink> = match &args.db {
        Some(path) => Box::new(FileSink::open(path)?),
        None => Box::new(CountingSink),
    };
    let mut ausm = Ausm::new(network, topics, sink);

    let stdin = io::stdin();
    let mut clock = 0u64;
    for line in stdin.lock().lines() {
        let line = line.map_err(|e| CliError::Data(e.into()))?;
        let input = line.trim();
        if input.is_empty() {
            continue;
        }
        if input == "quit" {
            break;
        }
        if input == "?" {
            let result = ausm.query_help(args.top_k).map_err(anyhow::Error::from)?;
            print_prediction(&result);
            io::stdout().flush().ok();
            continue;
        }
        let (action, property) = match input.split_once(char::is_whitespace) {
            Some((action, rest)) => (action, Some(rest.trim())),
            None => (input, None),
        };
        let event = match ActionEvent::new(clock, action, property) {
            Ok(event) => event,
            Err(e) => {
                eprintln!("warning: ignored line {input:?}: {e}");
                continue;
            }
        };
        match ausm.record_action(event) {
            Ok(_) => clock += 1,
            Err(e) => eprintln!("warning: action not recorded: {e}"),
        }
    }
    println!("{} transitions recorded", ausm.transitions_recorded());
    Ok(())
}
