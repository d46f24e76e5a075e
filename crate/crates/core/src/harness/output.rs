use std::io::Write;

use super::ExperimentResult;
use crate::error::Result;

/// Column layout of the CSV output. `error_rate` is named `mean_regret` in
/// cumulative-regret mode, and lower-bound sweeps insert a `member` column
/// after `policy`.
pub const CSV_COLUMNS: [&str; 7] = [
    "policy",
    "T",
    "N",
    "error_rate",
    "ci_half_width",
    "censored",
    "wall_time_ms",
];

/// One row per cell, in cell order. Floats use the shortest representation
/// that round-trips, so identical results give identical bytes. An absent
/// wall time is written as an empty field.
pub fn write_csv<W: Write>(result: &ExperimentResult, writer: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(writer);
    let members = result.has_members();
    let value_column = if result.mode().is_loss() {
        "error_rate"
    } else {
        "mean_regret"
    };
    let mut header: Vec<&str> = vec!["policy"];
    if members {
        header.push("member");
    }
    header.extend(["T", "N", value_column, "ci_half_width", "censored", "wall_time_ms"]);
    out.write_record(&header)?;
    for cell in &result.cells {
        let mut row = vec![cell.policy.clone()];
        if members {
            row.push(cell.member.clone().unwrap_or_default());
        }
        row.push(cell.horizon.to_string());
        row.push(cell.estimate.replications.to_string());
        row.push(cell.estimate.value.to_string());
        row.push(cell.estimate.half_width.to_string());
        row.push(cell.estimate.censored.to_string());
        row.push(cell.wall_time_ms.map(|t| format!("{t:.3}")).unwrap_or_default());
        out.write_record(&row)?;
    }
    out.flush()?;
    Ok(())
}
