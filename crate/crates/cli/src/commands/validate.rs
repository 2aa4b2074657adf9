use std::path::PathBuf;

use clap::Args;
use parcs_core::guideline::{parse_guideline, Guideline};
use parcs_core::pdl::parse_description;
use parcs_core::randomize::draw_trace;

use crate::error::CliError;
use crate::files::read_text;
use crate::manifest::RunRecord;
use crate::{record, Common};

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// Graph description (`.pdl`) or randomization guideline (`.gdl`).
    pub file: PathBuf,
    #[command(flatten)]
    pub common: Common,
}

pub fn run(args: &ValidateArgs) -> Result<RunRecord, CliError> {
    let path = args.file.display();
    let text = read_text(&args.file)?;
    if args.file.extension().is_some_and(|e| e == "gdl") {
        parse_guideline(&text).map_err(|e| CliError::user(format!("{path}:{e}")))?;
        println!("{path}: ok (guideline)");
        return Ok(record(vec![args.file.clone()], Vec::new(), Vec::new()));
    }
    let pg = parse_description(&text).map_err(|e| CliError::user(format!("{path}:{e}")))?;
    if pg.is_fully_specified() {
        pg.to_graph().map_err(|e| CliError::user(format!("{path}: {e}")))?;
        println!("{path}: ok ({} nodes, {} edges)", pg.nodes.len(), pg.edges.len());
    } else {
        // structural checks of the mandatory part
        draw_trace(&pg, &Guideline::default(), 0).map_err(|e| CliError::user(format!("{path}: {e}")))?;
        println!(
            "{path}: ok ({} nodes, {} edges, {} holes; partial, complete it with `parcs randomize`)",
            pg.nodes.len(),
            pg.edges.len(),
            pg.hole_count()
        );
    }
    Ok(record(vec![args.file.clone()], Vec::new(), Vec::new()))
}
