use anyhow::anyhow;
use nextact_core::bbn::dataset::{records_to_instances, FieldSelection};
use nextact_core::bbn::format::network_to_string;
use nextact_core::bbn::{Dag, Network, PriorConfig};
use nextact_core::scoring::{
    score_dataset, select_best_structure, ScoreError, SearchMode, MAX_EXHAUSTIVE_VARS,
};

use crate::files;
use crate::{CliError, LearnArgs, LearnMode};

pub fn run(args: &LearnArgs) -> Result<(), CliError> {
    let selection = FieldSelection::parse(&args.fields)
        .map_err(|e| CliError::Usage(format!("--fields: {e}")))?;
    if args.ess <= 0.0 {
        return Err(CliError::Usage("--ess must be positive".into()));
    }
    let records = files::read_db(&args.db)?;
    if records.is_empty() {
        return Err(CliError::Data(anyhow!(
            "database {} has no records",
            args.db.display()
        )));
    }
    let dataset = records_to_instances(&records, &selection).map_err(anyhow::Error::from)?;

    let (dag, log_score) =
        match args.mode {
            LearnMode::FixedChain => {
                let dag = Dag::chain(dataset.variables().to_vec()).map_err(anyhow::Error::from)?;
                let score = score_dataset(&dag, &dataset, args.ess).map_err(anyhow::Error::from)?;
                (dag, score)
            }
            LearnMode::Exhaustive | LearnMode::Greedy => {
                let mode = if args.mode == LearnMode::Exhaustive {
                    SearchMode::Exhaustive
                } else {
                    SearchMode::Greedy
                };
                let best = select_best_structure(&dataset, args.ess, mode, args.max_parents)
                    .map_err(|e| match e {
                        ScoreError::TooManyVariables { count, .. } => CliError::Data(anyhow!(
                            "exhaustive mode handles at most {MAX_EXHAUSTIVE_VARS} variables but \
                         {count} fields are selected; use --mode greedy"
                        )),
                        other => CliError::Data(other.into()),
                    })?;
                (best.dag, best.log_score)
            }
        };

    let prior = PriorConfig::new(args.ess).map_err(anyhow::Error::from)?;
    let name = args
        .out
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("bbn")
        .to_string();
    let network = Network::fit(name, dag, &dataset, &prior).map_err(anyhow::Error::from)?;
    let text = network_to_string(&network).map_err(anyhow::Error::from)?;
    files::write_text(&args.out, &text)?;

    let dag = network.dag();
    let edges: Vec<String> = dag
        .edges()
        .into_iter()
        .map(|(p, c)| format!("{}->{}", dag.variable(p).name(), dag.variable(c).name()))
        .collect();
    println!(
        "learned {} over {} records: {} variables, edges [{}]",
        args.out.display(),
        records.len(),
        dag.var_count(),
        edges.join(", ")
    );
    println!("log score: {log_score:.6}");
    Ok(())
}
