//! Command-line front end: run, compare and sweep scenarios, and emit plot scripts.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use horizon::harness::{
    compare, emit_plot_scripts, parse_config, run_scenario, sweep, sweep_output, sweep_table, HarnessError, RunRecord,
    Scenario,
};

#[derive(Parser)]
#[command(name = "horizon", version, about = "Long-horizon integrator experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write its record.
    Run {
        config: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Run several scenarios on the same problem and print a comparison table.
    Compare {
        #[arg(required = true, num_args = 1..)]
        configs: Vec<PathBuf>,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Run a scenario once per value of one configuration key.
    Sweep {
        #[arg(long)]
        param: String,
        /// Comma-separated values.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<String>,
        config: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Write a gnuplot script next to a record.
    Plot { record: PathBuf },
}

/// Flags taking precedence over configuration file entries.
#[derive(Args, Default)]
struct Overrides {
    #[arg(long)]
    problem: Option<String>,
    #[arg(long)]
    integrator: Option<String>,
    #[arg(long)]
    dt: Option<String>,
    #[arg(long)]
    eps_res: Option<String>,
    #[arg(long)]
    tol: Option<String>,
    #[arg(long)]
    t_final: Option<String>,
    #[arg(long)]
    order: Option<String>,
    #[arg(long)]
    pade_num: Option<String>,
    #[arg(long)]
    pade_den: Option<String>,
    #[arg(long)]
    quad_nodes: Option<String>,
    #[arg(long)]
    stride: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Overrides {
    /// Entries to merge; paths given on the command line are taken relative to the working
    /// directory.
    fn entries(&self) -> Vec<(&'static str, String)> {
        let cwd = std::env::current_dir().unwrap_or_default();
        let mut v = Vec::new();
        let text = [
            ("problem", &self.problem),
            ("dt", &self.dt),
            ("eps_res", &self.eps_res),
            ("tol", &self.tol),
            ("t_final", &self.t_final),
            ("order", &self.order),
            ("pade_num", &self.pade_num),
            ("pade_den", &self.pade_den),
            ("quad_nodes", &self.quad_nodes),
            ("stride", &self.stride),
        ];
        for (k, val) in text {
            if let Some(val) = val {
                v.push((k, val.clone()));
            }
        }
        if let Some(i) = &self.integrator {
            let resolved = match i.strip_prefix("irk:") {
                Some(p) => format!("irk:{}", cwd.join(p).display()),
                None => i.clone(),
            };
            v.push(("integrator", resolved));
        }
        if let Some(o) = &self.out {
            v.push(("out", cwd.join(o).display().to_string()));
        }
        v
    }
}

fn load(config: &Path, overrides: &Overrides) -> Result<(Scenario, PathBuf), HarnessError> {
    let text = fs::read_to_string(config).map_err(|e| HarnessError::Io(format!("{}: {e}", config.display())))?;
    let mut map: BTreeMap<String, String> = parse_config(&text)?;
    for (k, v) in overrides.entries() {
        map.insert(k.to_string(), v);
    }
    let base = config.parent().map(Path::to_path_buf).unwrap_or_default();
    Ok((Scenario::from_map(&map, &base)?, base))
}

fn write_outputs(record: &RunRecord, out: &Path) -> Result<(), HarnessError> {
    record.write(out)?;
    if !record.rows.is_empty() {
        emit_plot_scripts(record, out)?;
    }
    Ok(())
}

/// Runs a scenario; partial records of failed runs are still written.
fn execute(s: &Scenario) -> Result<RunRecord, HarnessError> {
    match run_scenario(s) {
        Ok(r) => {
            if let Some(out) = &s.out {
                write_outputs(&r, out)?;
            }
            Ok(r)
        }
        Err(HarnessError::Numerical { message, partial }) => {
            if let Some(out) = &s.out {
                write_outputs(&partial, out)?;
            }
            Err(HarnessError::Numerical { message, partial })
        }
        Err(e) => Err(e),
    }
}

fn print_summary(label: &str, r: &RunRecord) {
    let m = r.summary();
    let err = r.primary_error().unwrap_or("error");
    println!(
        "{label}: {} / {}: steps={} mean_step={:.6e} max_{err}={:.6e} mean_{err}={:.6e} final_{err}={:.6e} cpu_ms={:.3}",
        r.problem,
        r.integrator,
        m.steps,
        m.mean_step,
        m.max_error,
        m.mean_error,
        m.final_error,
        m.total_cpu_ns / 1e6
    );
}

fn dispatch(cli: Cli) -> Result<(), HarnessError> {
    match cli.command {
        Command::Run { config, overrides } => {
            let (s, _) = load(&config, &overrides)?;
            let r = execute(&s)?;
            if s.out.is_none() {
                print!("{}", r.to_csv());
            } else {
                print_summary(&config.display().to_string(), &r);
            }
        }
        Command::Compare { configs, overrides } => {
            if configs.len() < 2 {
                return Err(HarnessError::Validation("compare needs at least 2 configurations".into()));
            }
            let scenarios = configs
                .iter()
                .map(|c| load(c, &overrides).map(|(s, _)| (c.display().to_string(), s)))
                .collect::<Result<Vec<_>, _>>()?;
            if let Some((_, first)) = scenarios.first() {
                if let Some((_, other)) = scenarios.iter().find(|(_, s)| s.problem != first.problem) {
                    return Err(HarnessError::MismatchedProblem {
                        expected: first.problem.to_string(),
                        found: other.problem.to_string(),
                    });
                }
            }
            let mut records = Vec::new();
            for (label, s) in &scenarios {
                records.push((label.clone(), execute(s)?));
            }
            print!("{}", compare(&records)?);
        }
        Command::Sweep {
            param,
            values,
            config,
            overrides,
        } => {
            let (s, base) = load(&config, &overrides)?;
            let results = sweep(&s, &param, &values, &base)?;
            if let Some(out) = s.out.as_ref() {
                for (value, (_, r)) in values.iter().zip(&results) {
                    if !r.rows.is_empty() {
                        emit_plot_scripts(r, &sweep_output(out, &param, value))?;
                    }
                }
            }
            print!("{}", sweep_table(&results));
        }
        Command::Plot { record } => {
            let r = RunRecord::read(&record)?;
            let path = emit_plot_scripts(&r, &record)?;
            println!("{}", path.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
