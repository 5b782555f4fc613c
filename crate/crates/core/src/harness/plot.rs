use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::{HarnessError, Result, RunRecord};

/// Gnuplot script for a record stored at `csv`. Columns are referenced by header name.
pub fn plot_script(record: &RunRecord, csv: &Path) -> Result<String> {
    if record.rows.is_empty() {
        return Err(HarnessError::Io(format!("{}: record has no samples to plot", csv.display())));
    }
    let file = csv.file_name().map_or_else(|| csv.display().to_string(), |f| f.to_string_lossy().into_owned());
    let stem = csv.file_stem().map_or_else(|| "record".into(), |s| s.to_string_lossy().into_owned());
    let mut s = String::new();
    let _ = writeln!(s, "# {} / {}", record.problem, record.integrator);
    let _ = writeln!(s, "set datafile separator ','");
    let _ = writeln!(s, "set datafile commentschars '#'");
    let _ = writeln!(s, "set key autotitle columnhead");
    let _ = writeln!(s, "set terminal pngcairo size 900,600");
    let _ = writeln!(s, "data = '{file}'");
    let has = |name: &str| record.column_index(name).is_some();

    for err in record.error_columns() {
        let _ = writeln!(s, "\nset output '{stem}_{err}.png'");
        let _ = writeln!(s, "set xlabel 't'\nset ylabel '{err}'\nset logscale y");
        let _ = writeln!(
            s,
            "plot data using (column('t')):(abs(column('{err}'))) with lines title '{err}'"
        );
        let _ = writeln!(s, "unset logscale y");
    }
    let lax: Vec<&String> = record.columns.iter().filter(|c| c.starts_with("lax_")).collect();
    if !lax.is_empty() {
        let _ = writeln!(s, "\nset output '{stem}_lax.png'\nset xlabel 't'\nset ylabel 'Lax eigenvalues'");
        let parts: Vec<String> = lax
            .iter()
            .map(|c| format!("data using (column('t')):(column('{c}')) with lines title '{c}'"))
            .collect();
        let _ = writeln!(s, "plot {}", parts.join(", \\\n     "));
    }
    if has("theta1") && has("theta2") {
        let _ = writeln!(s, "\nset output '{stem}_angles.png'\nset xlabel 't'\nset ylabel 'angle'");
        let _ = writeln!(
            s,
            "plot data using (column('t')):(column('theta1')) with lines title 'theta1', \\\n     \
             data using (column('t')):(column('theta2')) with lines title 'theta2'"
        );
    }
    if record.problem.starts_with("duffing") && has("u0") && has("u1") {
        let window = if record.problem.starts_with("duffing_forced") {
            "(column('t') >= 40 && column('t') <= 1000 ? column('u0') : NaN)"
        } else {
            "(column('u0'))"
        };
        let _ = writeln!(s, "\nset output '{stem}_phase.png'\nset xlabel 'u'\nset ylabel 'du/dt'");
        let _ = writeln!(
            s,
            "plot data using {window}:(column('u1')) with dots title 'phase portrait'"
        );
    }
    if s.lines().filter(|l| l.starts_with("plot")).count() == 0 {
        let _ = writeln!(s, "\nset output '{stem}_state.png'\nset xlabel 't'");
        let n = record.state_len().min(6);
        let parts: Vec<String> = (0..n)
            .map(|i| format!("data using (column('t')):(column('u{i}')) with lines title 'u{i}'"))
            .collect();
        let _ = writeln!(s, "plot {}", parts.join(", \\\n     "));
    }
    Ok(s)
}

/// Writes `<stem>.gp` next to the CSV and returns its path.
pub fn emit_plot_scripts(record: &RunRecord, csv: &Path) -> Result<PathBuf> {
    let script = plot_script(record, csv)?;
    let path = csv.with_extension("gp");
    fs::write(&path, script).map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))?;
    Ok(path)
}
