//! Run a seeded experiment suite programmatically and emit its report:
//! the same entry point the command-line binary uses.

use anyhow::Result;
use isomonodromy::experiments::{
    emit_report, format_summary, run_experiment, ExperimentConfig, ReportFormat,
};

fn main() -> Result<()> {
    let mut cfg = ExperimentConfig::for_experiment("transversality");
    cfg.samples = 10;
    cfg.seed = 42;
    cfg.out = Some(std::env::temp_dir().join("transversality_report.json"));

    let report = run_experiment(&cfg)?;
    print!("{}", format_summary(&report));

    let bytes = emit_report(&report, ReportFormat::Json)?;
    println!(
        "wrote {bytes} bytes of JSON to {}",
        report.config.out.as_ref().unwrap().display()
    );

    // The csv-summary format holds one row per case for spreadsheets.
    let mut csv_cfg = report.config.clone();
    csv_cfg.out = Some(std::env::temp_dir().join("transversality_report.csv"));
    let csv_report = run_experiment(&csv_cfg)?;
    let bytes = emit_report(&csv_report, ReportFormat::CsvSummary)?;
    println!(
        "wrote {bytes} bytes of CSV to {}",
        csv_cfg.out.as_ref().unwrap().display()
    );
    Ok(())
}
