//! `hiertext taxonomy dump`: emit the compiled-in three-level label
//! taxonomy as JSON, for documentation and downstream tooling.

use crate::errors::{io_at, CliResult};
use hiertext_core::taxonomy::Taxonomy;
use std::path::PathBuf;

#[derive(Debug, clap::Subcommand)]
pub enum TaxonomyAction {
    /// Print the label hierarchy (keys, display names, parent links).
    Dump {
        /// Write to a file instead of stdout.
        #[arg(long, value_name = "FILE")]
        output: Option<PathBuf>,
    },
}

pub fn run(action: TaxonomyAction) -> CliResult<()> {
    match action {
        TaxonomyAction::Dump { output } => {
            let json = serde_json::to_string_pretty(&Taxonomy::dump_json())
                .expect("the taxonomy serializes");
            match output {
                Some(path) => {
                    std::fs::write(&path, json + "\n").map_err(io_at(&path))?
                }
                None => println!("{json}"),
            }
            Ok(())
        }
    }
}
