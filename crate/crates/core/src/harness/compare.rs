use std::fmt;
use std::path::{Path, PathBuf};

use super::{run_scenario, HarnessError, Result, RunRecord, Scenario, Summary};

/// One line of a [`Comparison`]; ratios are taken against the first entry.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub label: String,
    pub integrator: String,
    pub summary: Summary,
    pub step_ratio: f64,
    pub error_ratio: f64,
    pub cpu_ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub problem: String,
    pub error_column: Option<String>,
    pub rows: Vec<ComparisonRow>,
}

/// Aligns completed records of the same problem.
pub fn compare(records: &[(String, RunRecord)]) -> Result<Comparison> {
    if records.len() < 2 {
        return Err(HarnessError::Validation(format!(
            "comparison needs at least 2 records, got {}",
            records.len()
        )));
    }
    let problem = &records[0].1.problem;
    for (_, r) in records {
        if &r.problem != problem {
            return Err(HarnessError::MismatchedProblem {
                expected: problem.clone(),
                found: r.problem.clone(),
            });
        }
        if let Some(msg) = &r.failure {
            return Err(HarnessError::Validation(format!("record did not complete: {msg}")));
        }
    }
    let first = records[0].1.summary();
    let rows = records
        .iter()
        .map(|(label, r)| {
            let summary = r.summary();
            ComparisonRow {
                label: label.clone(),
                integrator: r.integrator.clone(),
                summary,
                step_ratio: summary.mean_step / first.mean_step,
                error_ratio: summary.mean_error / first.mean_error,
                cpu_ratio: summary.total_cpu_ns / first.total_cpu_ns,
            }
        })
        .collect();
    Ok(Comparison {
        problem: problem.clone(),
        error_column: records[0].1.primary_error().map(str::to_string),
        rows,
    })
}

impl fmt::Display for Comparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let err = self.error_column.as_deref().unwrap_or("error");
        writeln!(f, "problem: {}", self.problem)?;
        writeln!(
            f,
            "{:<24} {:<16} {:>12} {:>12} {:>12} {:>12} {:>10} {:>10} {:>10}",
            "label",
            "integrator",
            "mean_step",
            format!("mean_{err}"),
            format!("max_{err}"),
            "cpu_ms",
            "step/1st",
            "err/1st",
            "cpu/1st"
        )?;
        for r in &self.rows {
            writeln!(
                f,
                "{:<24} {:<16} {:>12.4e} {:>12.4e} {:>12.4e} {:>12.3} {:>10.3} {:>10.3e} {:>10.3}",
                r.label,
                r.integrator,
                r.summary.mean_step,
                r.summary.mean_error,
                r.summary.max_error,
                r.summary.total_cpu_ns / 1e6,
                r.step_ratio,
                r.error_ratio,
                r.cpu_ratio
            )?;
        }
        Ok(())
    }
}

/// Output path of one sweep member: `<stem>_<key>_<value>.<ext>`.
pub fn sweep_output(out: &Path, key: &str, value: &str) -> PathBuf {
    let stem = out.file_stem().map_or_else(|| "record".into(), |s| s.to_string_lossy().into_owned());
    let ext = out.extension().map_or_else(|| "csv".into(), |s| s.to_string_lossy().into_owned());
    let safe: String = value
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '.' || c == '-' { c } else { '_' })
        .collect();
    out.with_file_name(format!("{stem}_{key}_{safe}.{ext}"))
}

/// Runs `base` once per value of `key`. Members with an output path get their own file.
pub fn sweep(base: &Scenario, key: &str, values: &[String], base_dir: &Path) -> Result<Vec<(String, RunRecord)>> {
    if values.is_empty() {
        return Err(HarnessError::Validation("sweep needs at least one value".into()));
    }
    let scenarios = values
        .iter()
        .map(|v| {
            let mut s = base.with_override(key, v, base_dir)?;
            if key != "out" {
                s.out = base.out.as_ref().map(|o| sweep_output(o, key, v));
            }
            Ok(s)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out = Vec::with_capacity(values.len());
    for (v, s) in values.iter().zip(&scenarios) {
        let record = run_scenario(s)?;
        if let Some(path) = &s.out {
            record.write(path)?;
        }
        out.push((format!("{key}={v}"), record));
    }
    Ok(out)
}

/// Plain table of sweep results (no ratios, works across problems).
pub fn sweep_table(results: &[(String, RunRecord)]) -> String {
    let mut s = format!(
        "{:<24} {:>12} {:>12} {:>12} {:>12} {:>12}\n",
        "value", "mean_step", "mean_error", "final_error", "max_error", "cpu_ms"
    );
    for (label, r) in results {
        let m = r.summary();
        s.push_str(&format!(
            "{:<24} {:>12.4e} {:>12.4e} {:>12.4e} {:>12.4e} {:>12.3}\n",
            label,
            m.mean_step,
            m.mean_error,
            m.final_error,
            m.max_error,
            m.total_cpu_ns / 1e6
        ));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(problem: &str, integrator: &str, err: f64, cpu: f64) -> RunRecord {
        let mut r = RunRecord::new(problem.into(), integrator.into(), 1, &["H_err".into()]);
        r.push(vec![0.0, 1.0, 0.0, 0.0, 0.0]);
        r.push(vec![1.0, 1.0, err, 0.5, cpu]);
        r
    }

    #[test]
    fn ratios_against_first_entry() {
        let c = compare(&[
            ("a".into(), record("toda", "rk4", 2e-3, 100.0)),
            ("b".into(), record("toda", "bpl", 1e-3, 300.0)),
        ])
        .unwrap();
        assert_eq!(c.rows[1].error_ratio, 0.5);
        assert_eq!(c.rows[1].cpu_ratio, 3.0);
        assert_eq!(c.rows[0].step_ratio, 1.0);
        assert!(c.to_string().contains("mean_H_err"));
    }

    #[test]
    fn mismatch_and_single_record_are_rejected() {
        let one = [("a".to_string(), record("toda", "rk4", 1e-3, 1.0))];
        assert!(matches!(compare(&one), Err(HarnessError::Validation(_))));
        let two = [
            ("a".to_string(), record("toda", "rk4", 1e-3, 1.0)),
            ("b".to_string(), record("kdv:64", "bpl", 1e-3, 1.0)),
        ];
        assert!(matches!(compare(&two), Err(HarnessError::MismatchedProblem { .. })));
    }

    #[test]
    fn sweep_paths() {
        let p = sweep_output(Path::new("/tmp/run.csv"), "order", "12");
        assert_eq!(p, PathBuf::from("/tmp/run_order_12.csv"));
        let p = sweep_output(Path::new("out/x"), "problem", "kdv:32");
        assert_eq!(p, PathBuf::from("out/x_problem_kdv_32.csv"));
    }
}
