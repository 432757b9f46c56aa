use anyhow::Context;
use nextact_core::eval::{cross_validate, replay_evaluate};
use nextact_core::event_log::parse_log;

use crate::files;
use crate::{CliError, CvArgs, ReplayArgs};

pub fn run_cv(args: &CvArgs) -> Result<(), CliError> {
    let top_k = args.top_k.unwrap_or(1);
    if top_k == 0 {
        return Err(CliError::Usage("--top-k must be at least 1".into()));
    }
    if args.folds < 2 {
        return Err(CliError::Usage("--folds must be at least 2".into()));
    }
    if args.ess <= 0.0 {
        return Err(CliError::Usage("--ess must be positive".into()));
    }
    let records = files::read_db(&args.db)?;
    let report = cross_validate(&records, args.folds, args.ess, top_k, args.seed)
        .map_err(anyhow::Error::from)?;
    print!("{report}");
    Ok(())
}

pub fn run_replay(args: &ReplayArgs) -> Result<(), CliError> {
    let top_k = args.top_k.unwrap_or(3);
    if top_k == 0 {
        return Err(CliError::Usage("--top-k must be at least 1".into()));
    }
    let text = files::read_text(&args.log)?;
    let source_id = args.log.display().to_string();
    let parsed = parse_log(&text, &source_id)
        .with_context(|| format!("cannot parse {source_id}"))
        .map_err(CliError::Data)?;
    for warning in &parsed.warnings {
        eprintln!("warning: {source_id}: {warning}");
    }
    let network = files::load_network(&args.net)?;
    let topics = files::load_topics(args.topics.as_deref())?;
    let report =
        replay_evaluate(&network, &parsed.log, &topics, top_k).map_err(anyhow::Error::from)?;
    print!("{report}");
    Ok(())
}
