//! Run the whole pipeline from a config file and write every output.
//!
//! cargo run --example pipeline_from_config -- configs/default.cfg out/

use std::path::PathBuf;

use condensate_linear::config::RunConfig;
use condensate_linear::output::to_json;
use condensate_linear::pipeline::{run_pipeline, summary_json};

fn main() -> condensate_linear::Result<()> {
    let mut args = std::env::args().skip(1);
    let cfg = match args.next() {
        Some(path) => RunConfig::load(&PathBuf::from(path))?,
        None => RunConfig::from_toml(condensate_linear::acceptance::DEFAULT_CFG)?,
    };
    let out = args.next().map(PathBuf::from);
    let a = run_pipeline(&cfg, out.as_deref())?;
    print!("{}", to_json(&summary_json(&a.report)));
    if let Some(dir) = out {
        println!("outputs written to {}", dir.display());
    }
    Ok(())
}
