use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;
use shaper::day::{run_day, summary_json, write_day_csv, PolicyChoice};
use shaper::error::{CliError, Result};
use shaper::gain::{gain_table, write_gain_csv};
use shaper::profiles::{load_profiles, synthetic_day, write_profiles, SyntheticDay};
use shaper::sweep::{linear_grid, sweep_gain, write_sweep_csv};
use shaper::validate::{run_suite, write_checks_csv, Suite};
use shaper::{load_config, Scenario};
use shaper_core::{analyze_queue, eots_decision, DerivedConstants, EnergyConfig, TrafficSnapshot};

#[derive(Parser)]
#[command(name = "shaper", version, about = "Energy-optimal traffic shaping for an energy-harvesting small cell")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the derived spectral efficiencies and cost constants as JSON.
    Constants {
        #[arg(long)]
        config: PathBuf,
    },
    /// Print M/D/1 energy-queue statistics as JSON (one joule per unit).
    Queue {
        #[arg(long)]
        lambda: f64,
        #[arg(long)]
        mu: f64,
        #[arg(long, default_value_t = 0.0)]
        c_ho: f64,
    },
    /// Tabulate the gain over the feasible consumption rates as CSV.
    Gain {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        lambda: f64,
        #[arg(long)]
        c_ho: f64,
        #[arg(long, default_value_t = 101)]
        grid: usize,
    },
    /// Print the EOTS decision for one snapshot as JSON.
    Optimize {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        rho_m: f64,
        #[arg(long)]
        rho_s: f64,
        #[arg(long)]
        lambda: f64,
        #[arg(long)]
        c_ho: f64,
    },
    /// Evaluate a daily profile; CSV rows to stdout (or --csv), JSON summary to stderr (or --summary).
    Day {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        profiles: PathBuf,
        #[arg(long, value_enum, default_value_t = PolicyChoice::Both)]
        policy: PolicyChoice,
        #[arg(long, value_delimiter = ',', required = true)]
        c_ho: Vec<f64>,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Sweep the optimal gain over energy arrival rates as CSV.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 100.0)]
        lambda_max: f64,
        #[arg(long, default_value_t = 50)]
        points: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        c_ho: Vec<f64>,
    },
    /// Write the synthetic daily profile as CSV.
    Profile {
        #[arg(long, default_value_t = 24)]
        periods: usize,
        #[arg(long, default_value_t = 5.0)]
        rho_m_max: f64,
        #[arg(long, default_value_t = 100.0)]
        rho_s_max: f64,
        #[arg(long, default_value_t = 60.0)]
        lambda_max: f64,
    },
    /// Compare closed forms with simulation; exits with 3 when a tolerance fails.
    Validate {
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
        #[arg(long, default_value_t = 200_000)]
        samples: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).expect("value is serializable");
    writeln!(io::stdout(), "{text}").map_err(|e| CliError::io("writing stdout", e))
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => {
            Box::new(BufWriter::new(File::create(p).map_err(|e| CliError::io(format!("creating {}", p.display()), e))?))
        }
        None => Box::new(io::stdout().lock()),
    })
}

fn scenario_with(path: &Path, lambda: f64, c_ho: f64) -> Result<Scenario> {
    let mut s = load_config(path)?;
    s.energy = s.energy.with_arrival_rate(lambda).with_handover_cost(c_ho);
    s.energy.validate()?;
    Ok(s)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Constants { config } => {
            let s = load_config(&config)?;
            print_json(&DerivedConstants::new(&s.net, &s.qos)?)
        }
        Command::Queue { lambda, mu, c_ho } => {
            let energy = EnergyConfig::new(lambda, 1.0, c_ho)?;
            print_json(&analyze_queue(&energy, mu)?)
        }
        Command::Gain { config, lambda, c_ho, grid } => {
            let s = scenario_with(&config, lambda, c_ho)?;
            write_gain_csv(output(None)?, &gain_table(&s, grid)?)
        }
        Command::Optimize { config, rho_m, rho_s, lambda, c_ho } => {
            let mut s = scenario_with(&config, lambda, c_ho)?;
            s.traffic = TrafficSnapshot::per_km2(rho_m, rho_s);
            print_json(&eots_decision(&s.traffic, &s.energy, &s.net, &s.qos)?)
        }
        Command::Day { config, profiles, policy, c_ho, csv, summary } => {
            let s = load_config(&config)?;
            let p = load_profiles(&profiles)?;
            let report = run_day(&p, &s, policy, &c_ho)?;
            write_day_csv(output(csv.as_deref())?, &report)?;
            let text = summary_json(&report, p.periods.len());
            match summary {
                Some(path) => std::fs::write(&path, text + "\n")
                    .map_err(|e| CliError::io(format!("writing {}", path.display()), e))?,
                None => eprintln!("{text}"),
            }
            if report.has_infeasible() {
                return Err(CliError::Infeasible(format!(
                    "macro cell infeasible in periods {:?}",
                    report.infeasible_periods
                )));
            }
            Ok(())
        }
        Command::Sweep { config, lambda_max, points, c_ho } => {
            let s = load_config(&config)?;
            write_sweep_csv(output(None)?, &sweep_gain(&s, &linear_grid(lambda_max, points), &c_ho)?)
        }
        Command::Profile { periods, rho_m_max, rho_s_max, lambda_max } => {
            if periods == 0 || 86_400 % periods != 0 {
                return Err(CliError::Input(format!("periods must divide 86400, got {periods}")));
            }
            let params = SyntheticDay {
                rho_m_max_per_km2: rho_m_max,
                rho_s_max_per_km2: rho_s_max,
                lambda_e_max_per_s: lambda_max,
                periods,
            };
            write_profiles(output(None)?, &synthetic_day(&params))
        }
        Command::Validate { suite, samples, seed } => {
            if samples == 0 {
                return Err(CliError::Input("samples must be positive".into()));
            }
            let checks = run_suite(suite, samples, seed)?;
            write_checks_csv(output(None)?, &checks)?;
            let failed: Vec<&str> = checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
            if failed.is_empty() {
                Ok(())
            } else {
                Err(CliError::Validation(failed.join(", ")))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
