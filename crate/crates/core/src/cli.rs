//! Command-line interface.
//!
//! Exit status: 0 on success, 2 for invalid input, 3 when an experiment is
//! refused because a theorem precondition fails, 1 for other failures.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::ConfigFile;
use crate::error::{Error, Result};
use crate::harness::run_experiment;
use crate::output::{write_outcome, write_plot_data};
use crate::schedules::{
    check_thm1_condition, check_thm2_condition, check_thm3_condition, cubic_sum, weighted_cubic_sum, RoundCount,
    Schedule, ScheduleSpec,
};

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "LOCALSGD_THREADS";

#[derive(Debug, Parser)]
#[command(name = "localsgd", version, about = "Local SGD simulator and convergence-bound checker")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the experiment described by a JSON config.
    Run {
        config: PathBuf,
        /// Write results here instead of the config's `output`.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Add this to every seed, for independent replications.
        #[arg(long, default_value_t = 0)]
        seed_offset: u64,
    },
    /// Print a schedule, its sums and its condition checks.
    Schedule(ScheduleArgs),
    /// Turn results CSVs into whitespace-separated plot data.
    Plotdata { results_dir: PathBuf },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Strategy {
    Fixed,
    Increasing,
    IncreasingPower,
    Decreasing,
    Explicit,
}

#[derive(Debug, Args)]
pub struct ScheduleArgs {
    pub strategy: Strategy,
    #[arg(long = "T")]
    pub total: Option<usize>,
    #[arg(long = "R")]
    pub rounds: Option<usize>,
    /// Constant interval for `fixed`, or a comma-separated list for `explicit`.
    #[arg(long = "H", value_delimiter = ',')]
    pub intervals: Vec<usize>,
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long)]
    pub s: Option<f64>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub mu: Option<f64>,
    #[arg(long = "L")]
    pub l: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long = "B")]
    pub b: Option<f64>,
}

fn need<T>(v: Option<T>, flag: &str, strategy: &str) -> Result<T> {
    v.ok_or_else(|| Error::Config(format!("{strategy} needs --{flag}")))
}

impl ScheduleArgs {
    fn build(&self) -> Result<Schedule> {
        let spec = match self.strategy {
            Strategy::Fixed => match (self.rounds, self.intervals.as_slice()) {
                (Some(r), []) => ScheduleSpec::Fixed { rounds: Some(RoundCount::Exact(r)), interval: None },
                (None, [h]) => ScheduleSpec::Fixed { rounds: None, interval: Some(*h) },
                _ => return Err(Error::Config("fixed needs exactly one of --R or --H".into())),
            },
            Strategy::Increasing => ScheduleSpec::Increasing {
                a: need(self.a, "a", "increasing")?,
                s: need(self.s, "s", "increasing")?,
            },
            Strategy::IncreasingPower => ScheduleSpec::IncreasingPower {
                p: need(self.p, "p", "increasing-power")?,
                rounds: RoundCount::Exact(need(self.rounds, "R", "increasing-power")?),
            },
            Strategy::Decreasing => ScheduleSpec::Decreasing {
                p: need(self.p, "p", "decreasing")?,
                rounds: RoundCount::Exact(need(self.rounds, "R", "decreasing")?),
            },
            Strategy::Explicit => {
                let s = Schedule::from_intervals(self.intervals.clone())?;
                if let Some(t) = self.total {
                    if t != s.total_steps() {
                        return Err(Error::Config(format!("Σ H_i = {} but --T {t}; Σ H_i must equal T", s.total_steps())));
                    }
                }
                return Ok(s);
            }
        };
        let total = need(self.total, "T", "this strategy")?;
        Ok(spec.build(total, self.n.unwrap_or(1))?.schedule)
    }
}

/// `10 ×3, 11, 9` style run-length form.
fn run_length(h: &[usize]) -> String {
    let mut out = String::new();
    let mut i = 0;
    while i < h.len() {
        let j = h[i..].iter().take_while(|&&v| v == h[i]).count();
        if !out.is_empty() {
            out.push_str(", ");
        }
        if j > 1 {
            let _ = write!(out, "{} ×{j}", h[i]);
        } else {
            let _ = write!(out, "{}", h[i]);
        }
        i += j;
    }
    out
}

/// The text printed by `localsgd schedule`.
pub fn describe_schedule(args: &ScheduleArgs) -> Result<String> {
    let s = args.build()?;
    let h = s.intervals();
    let mut out = String::new();
    let list: Vec<String> = h.iter().map(|v| v.to_string()).collect();
    let _ = writeln!(out, "H = [{}]", list.join(", "));
    let _ = writeln!(out, "{}; cubic_sum={}", run_length(h), cubic_sum(&s));
    let _ = writeln!(out, "R = {}, T = {}", s.rounds(), s.total_steps());
    if let Some(beta) = args.beta {
        let _ = writeln!(out, "weighted_cubic_sum(beta={beta}) = {}", weighted_cubic_sum(&s, beta));
    }
    if let (Some(mu), Some(l), Some(beta)) = (args.mu, args.l, args.beta) {
        if !(mu > 0.0) || !(l > 0.0) {
            return Err(Error::Config("--mu and --L must be > 0".into()));
        }
        let report = check_thm1_condition(&s, mu, l, beta);
        let _ = writeln!(out, "check_thm1_condition: H_i <= mu(beta + tau_(i-1))/(12L)");
        let _ = writeln!(out, "{:>6} {:>8} {:>14} result", "round", "H", "cap");
        for r in &report.rounds {
            let _ = writeln!(out, "{:>6} {:>8} {:>14.6} {}", r.round, r.interval, r.cap, if r.pass { "pass" } else { "FAIL" });
        }
        let _ = writeln!(out, "overall: {}", if report.all_pass { "pass" } else { "FAIL" });
    }
    if let (Some(l), Some(c), Some(n)) = (args.l, args.c, args.n) {
        let total = s.total_steps();
        let check = match args.b {
            Some(b) => ("check_thm3_condition", check_thm3_condition(&s, l, b, c, n, total)),
            None => ("check_thm2_condition", check_thm2_condition(&s, l, c, n, total)),
        };
        let _ = writeln!(
            out,
            "{}: max H = {} vs cap {:.6}: {}",
            check.0,
            check.1.max_interval,
            check.1.cap,
            if check.1.pass { "pass" } else { "FAIL" }
        );
    }
    Ok(out)
}

fn resolve_output(config_path: &Path, configured: &Path) -> PathBuf {
    if configured.is_absolute() {
        return configured.to_path_buf();
    }
    config_path.parent().unwrap_or(Path::new(".")).join(configured)
}

fn cmd_run(config: &Path, output: Option<&Path>, seed_offset: u64) -> Result<Vec<PathBuf>> {
    let file = ConfigFile::load(config)?;
    let dir = match output {
        Some(o) => o.to_path_buf(),
        None => resolve_output(config, &file.output),
    };
    let outcome = run_experiment(&file.spec(seed_offset))?;
    write_outcome(&dir, &outcome)
}

/// Sizes the global thread pool from [`THREADS_ENV`] when it is set.
pub fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| Error::Config(format!("{THREADS_ENV} must be a positive integer, got {raw:?}")))?;
    // a second call in the same process finds the pool already built
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    Ok(())
}

/// Runs a parsed command, printing to stdout/stderr; returns the exit code.
pub fn execute(cli: Cli) -> i32 {
    let result = configure_threads().and_then(|()| match &cli.command {
        Command::Run { config, output, seed_offset } => cmd_run(config, output.as_deref(), *seed_offset).map(|paths| {
            for p in paths {
                println!("wrote {}", p.display());
            }
        }),
        Command::Schedule(args) => describe_schedule(args).map(|text| print!("{text}")),
        Command::Plotdata { results_dir } => write_plot_data(results_dir).map(|paths| {
            for p in paths {
                println!("wrote {}", p.display());
            }
        }),
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(line: &str) -> ScheduleArgs {
        let cli = Cli::try_parse_from(format!("localsgd schedule {line}").split_whitespace()).unwrap();
        match cli.command {
            Command::Schedule(a) => a,
            _ => unreachable!(),
        }
    }

    #[test]
    fn schedule_summaries() {
        let text = describe_schedule(&args("fixed --T 100 --R 10")).unwrap();
        assert!(text.contains("10 ×10; cubic_sum=10000"), "{text}");
        let text = describe_schedule(&args("increasing --a 10 --s 0.2 --T 30")).unwrap();
        assert!(text.contains("[10, 11, 9]"), "{text}");
        let text = describe_schedule(&args("explicit --H 1,2,3")).unwrap();
        assert!(text.contains("R = 3, T = 6"), "{text}");
    }

    #[test]
    fn condition_table() {
        let text = describe_schedule(&args("increasing --a 1 --s 1 --T 10 --mu 1 --L 1 --beta 12")).unwrap();
        // H = [1, 2, 3, 4]; caps (12 + τ)/12 = 1, 13/12, 15/12, 18/12
        assert_eq!(text.matches("pass").count(), 1, "{text}");
        assert_eq!(text.matches("FAIL").count(), 4, "{text}");
        assert!(text.contains("overall: FAIL"));
        let text = describe_schedule(&args("fixed --T 4900 --R 980 --L 1 --c 1 --n 4")).unwrap();
        assert!(text.contains("check_thm2_condition: max H = 5 vs cap 5.000000: pass"), "{text}");
    }

    #[test]
    fn bad_parameters() {
        assert_eq!(describe_schedule(&args("fixed --T 3 --R 4")).unwrap_err().exit_code(), 2);
        assert_eq!(describe_schedule(&args("increasing --T 3")).unwrap_err().exit_code(), 2);
        assert_eq!(describe_schedule(&args("explicit --H 1,2 --T 4")).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn run_length_form() {
        assert_eq!(run_length(&[10, 10, 10, 11, 9]), "10 ×3, 11, 9");
    }
}
