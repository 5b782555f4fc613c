use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::{HarnessError, Result};

/// Recorded trajectory: one row per sample with columns `t, u0.., <invariants>.., step, cpu_ns`.
///
/// `step` is the mean step size since the previous sample, `cpu_ns` the cumulative time spent
/// stepping. Columns whose name ends in `_err` are error measures; the first of them is the
/// primary error used by [`Summary`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunRecord {
    pub problem: String,
    pub integrator: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub failure: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub samples: usize,
    pub steps: f64,
    pub mean_step: f64,
    /// Largest primary error over the samples.
    pub max_error: f64,
    /// `(1/t_f) ∫ error dt` by the trapezoidal rule on the recorded grid.
    pub mean_error: f64,
    pub final_error: f64,
    pub total_cpu_ns: f64,
}

impl RunRecord {
    pub fn new(problem: String, integrator: String, state_len: usize, invariants: &[String]) -> Self {
        let mut columns = vec!["t".to_string()];
        columns.extend((0..state_len).map(|i| format!("u{i}")));
        columns.extend(invariants.iter().cloned());
        columns.push("step".into());
        columns.push("cpu_ns".into());
        Self {
            problem,
            integrator,
            columns,
            rows: Vec::new(),
            failure: None,
        }
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.column_index(name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn times(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r[0]).collect()
    }

    pub fn state_len(&self) -> usize {
        self.columns
            .iter()
            .skip(1)
            .take_while(|c| c.strip_prefix('u').is_some_and(|d| d.parse::<usize>().is_ok()))
            .count()
    }

    pub fn state(&self, row: usize) -> &[f64] {
        &self.rows[row][1..1 + self.state_len()]
    }

    pub fn invariant_names(&self) -> &[String] {
        let n = self.columns.len();
        &self.columns[1 + self.state_len()..n - 2]
    }

    pub fn error_columns(&self) -> Vec<&str> {
        self.invariant_names()
            .iter()
            .filter(|c| c.ends_with("_err"))
            .map(String::as_str)
            .collect()
    }

    pub fn primary_error(&self) -> Option<&str> {
        self.error_columns().first().copied()
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// Recomputes the summary from the rows.
    pub fn summary(&self) -> Summary {
        let t = self.times();
        let n = self.columns.len();
        let steps: f64 = self
            .rows
            .windows(2)
            .map(|w| {
                let h = w[1][n - 2];
                if h > 0.0 {
                    (w[1][0] - w[0][0]) / h
                } else {
                    0.0
                }
            })
            .sum();
        let span = match (t.first(), t.last()) {
            (Some(a), Some(b)) => b - a,
            _ => 0.0,
        };
        let err = self.primary_error().and_then(|c| self.column(c));
        let (max_error, mean_error, final_error) = match &err {
            Some(e) if !e.is_empty() => {
                let max = e.iter().fold(0.0_f64, |m, x| if x.is_nan() { f64::NAN } else { m.max(x.abs()) });
                let integral: f64 = t
                    .windows(2)
                    .zip(e.windows(2))
                    .map(|(tw, ew)| 0.5 * (tw[1] - tw[0]) * (ew[0].abs() + ew[1].abs()))
                    .sum();
                let mean = if span > 0.0 { integral / span } else { e[0].abs() };
                (max, mean, e[e.len() - 1].abs())
            }
            _ => (f64::NAN, f64::NAN, f64::NAN),
        };
        Summary {
            samples: self.rows.len(),
            steps: steps.round(),
            mean_step: if steps > 0.0 { span / steps } else { 0.0 },
            max_error,
            mean_error,
            final_error,
            total_cpu_ns: self.rows.last().map_or(0.0, |r| r[n - 1]),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# problem={}", self.problem);
        let _ = writeln!(s, "# integrator={}", self.integrator);
        let mut w = csv::Writer::from_writer(Vec::new());
        // writing into memory cannot fail
        let _ = w.write_record(&self.columns);
        for row in &self.rows {
            let _ = w.write_record(row.iter().map(|x| format_value(*x)));
        }
        let body = w.into_inner().unwrap_or_default();
        s.push_str(&String::from_utf8_lossy(&body));
        if let Some(msg) = &self.failure {
            let _ = writeln!(s, "# FAILED: {}", msg.replace('\n', " "));
        }
        s
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut problem = String::new();
        let mut integrator = String::new();
        let mut failure = None;
        for comment in text.lines().filter_map(|l| l.trim().strip_prefix('#')) {
            let comment = comment.trim();
            if let Some(v) = comment.strip_prefix("problem=") {
                problem = v.to_string();
            } else if let Some(v) = comment.strip_prefix("integrator=") {
                integrator = v.to_string();
            } else if let Some(v) = comment.strip_prefix("FAILED:") {
                failure = Some(v.trim().to_string());
            }
        }
        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let io = |e: csv::Error| HarnessError::Io(e.to_string());
        let columns: Vec<String> = reader.headers().map_err(io)?.iter().map(str::to_string).collect();
        let valid = columns.len() >= 3
            && columns[0] == "t"
            && columns[columns.len() - 2] == "step"
            && columns[columns.len() - 1] == "cpu_ns";
        if !valid {
            return Err(HarnessError::Io(format!("unexpected header `{}`", columns.join(","))));
        }
        let mut rows = Vec::new();
        for rec in reader.records() {
            let rec = rec.map_err(io)?;
            let row = rec
                .iter()
                .map(|c| c.parse::<f64>())
                .collect::<std::result::Result<Vec<f64>, _>>()
                .map_err(|e| HarnessError::Io(format!("row {}: {e}", rows.len() + 1)))?;
            rows.push(row);
        }
        Ok(Self {
            problem,
            integrator,
            columns,
            rows,
            failure,
        })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir).map_err(|e| HarnessError::Io(format!("{}: {e}", dir.display())))?;
        }
        fs::write(path, self.to_csv()).map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))?;
        Self::from_csv(&text)
    }
}

/// Scientific notation with 17 significant digits, which round-trips every finite `f64`.
pub fn format_value(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}
