use nextact_core::ausm::{Ausm, NullSink};
use nextact_core::event_log::ActionEvent;

use crate::commands::print_prediction;
use crate::files;
use crate::{CliError, PredictArgs};

pub fn run(args: &PredictArgs) -> Result<(), CliError> {
    if args.top_k == 0 {
        return Err(CliError::Usage("--top-k must be at least 1".into()));
    }
    let network = files::load_network(&args.net)?;
    let topics = files::load_topics(args.topics.as_deref())?;
    let event = ActionEvent::new(0, args.action.as_str(), None)
        .map_err(|e| CliError::Usage(format!("bad action token: {e}")))?;
    let mut ausm = Ausm::new(network, topics, NullSink);
    ausm.record_action(event).map_err(anyhow::Error::from)?;
    let result = ausm.query_help(args.top_k).map_err(anyhow::Error::from)?;
    print_prediction(&result);
    Ok(())
}
