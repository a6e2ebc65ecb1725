//! Command-line front end: binds economy files to the library operations and
//! emits machine-readable reports.
//!
//! Exit codes: 0 success, 1 modeling violations, 2 numerical failure, 3 I/O
//! or usage failure.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::analysis::partial_eq_curves;
use crate::consumer::{demand, PriceVector};
use crate::dynamics::{integrate_tatonnement, TatonnementConfig};
use crate::economy::{generate_random_economy, validate_economy, Economy};
use crate::error::{Error, Result};
use crate::excess::{excess_demand, wealth};
use crate::producer::supply;
use crate::solve::{equilibrium_index, find_equilibrium, verify_uniqueness};
use crate::surplus::aggregate_surplus_identity;

/// Result of one CLI invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommandOutcome {
    /// 0 success, 1 validation failure, 2 numerical failure, 3 I/O or usage
    /// failure.
    pub exit_code: i32,
    /// Files written by the invocation.
    pub artifacts: Vec<PathBuf>,
}

impl CommandOutcome {
    fn ok(artifacts: Vec<PathBuf>) -> CommandOutcome {
        CommandOutcome { exit_code: 0, artifacts }
    }
}

/// Parses a comma-separated list of decimal numbers, e.g. `1,0.5,2e-1`.
pub fn parse_number_list(text: &str) -> Result<Vec<f64>> {
    let trimmed = text.trim();
    if trimmed.is_empty() {
        return Err(Error::BadDimensions("empty number list".into()));
    }
    trimmed
        .split(',')
        .map(|piece| {
            piece
                .trim()
                .parse::<f64>()
                .map_err(|e| Error::BadDimensions(format!("bad number {piece:?}: {e}")))
        })
        .collect()
}

/// Parses a comma-separated price list into a validated price vector.
pub fn parse_price_list(text: &str) -> Result<PriceVector> {
    PriceVector::new(parse_number_list(text)?)
}

/// Parses a waypoint file: one comma-separated vector per line, blank lines
/// and `#` comment lines ignored.
pub fn parse_waypoints(text: &str) -> Result<Vec<Vec<f64>>> {
    let mut waypoints = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        waypoints.push(parse_number_list(line)?);
    }
    if waypoints.is_empty() {
        return Err(Error::BadDimensions("waypoint file has no waypoints".into()));
    }
    Ok(waypoints)
}

#[derive(Parser)]
#[command(name = "eqlab", about = "Quasi-linear general-equilibrium laboratory", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct EconArg {
    /// Economy JSON file.
    #[arg(long)]
    econ: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Check an economy file against the model assumptions.
    Validate(EconArg),
    /// Evaluate one consumer's demand at given prices.
    Demand {
        #[command(flatten)]
        econ: EconArg,
        /// Consumer number, 1-based.
        #[arg(long)]
        consumer: usize,
        /// Comma-separated prices, length L.
        #[arg(long)]
        prices: String,
        /// Wealth; defaults to the consumer's market wealth at the prices.
        #[arg(long)]
        wealth: Option<f64>,
    },
    /// Evaluate one producer's supply at given prices.
    Supply {
        #[command(flatten)]
        econ: EconArg,
        /// Producer number, 1-based.
        #[arg(long)]
        producer: usize,
        #[arg(long)]
        prices: String,
    },
    /// Evaluate aggregate excess demand at given prices.
    Excess {
        #[command(flatten)]
        econ: EconArg,
        #[arg(long)]
        prices: String,
    },
    /// Find the equilibrium price (normalized to unit norm).
    Solve {
        #[command(flatten)]
        econ: EconArg,
        /// Starting prices; defaults to all ones.
        #[arg(long)]
        p0: Option<String>,
    },
    /// Multi-start uniqueness verification.
    Unique {
        #[command(flatten)]
        econ: EconArg,
        #[arg(long, default_value_t = 50)]
        starts: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Integrate the price-adjustment ODE and write the trace.
    Tatonnement {
        #[command(flatten)]
        econ: EconArg,
        #[arg(long)]
        p0: String,
        /// Adjustment speeds; defaults to all ones.
        #[arg(long)]
        speeds: Option<String>,
        #[arg(long, default_value_t = 200.0)]
        tmax: f64,
        /// Trace CSV path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute the equilibrium index at a price (solves first if omitted).
    Index {
        #[command(flatten)]
        econ: EconArg,
        #[arg(long)]
        prices: Option<String>,
    },
    /// Consumer-surplus line integral and the aggregate identity.
    Surplus {
        #[command(flatten)]
        econ: EconArg,
        /// Start of the non-numeraire price path, length L-1.
        #[arg(long, conflicts_with = "path")]
        from: Option<String>,
        /// End of the non-numeraire price path, length L-1.
        #[arg(long, conflicts_with = "path", requires = "from")]
        to: Option<String>,
        /// Waypoint file; endpoints are its first and last lines.
        #[arg(long)]
        path: Option<PathBuf>,
        /// CSV output `lhs,rhs,gap`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tabulate two-good demand and supply curves over a price grid.
    Curves {
        #[command(flatten)]
        econ: EconArg,
        /// Comma-separated strictly increasing grid of good-1 prices.
        #[arg(long)]
        grid: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a random valid economy.
    Gen {
        #[arg(long)]
        seed: u64,
        /// Number of goods.
        #[arg(long, default_value_t = 2)]
        goods: usize,
        /// Number of consumers.
        #[arg(long, default_value_t = 1)]
        consumers: usize,
        /// Number of producers.
        #[arg(long, default_value_t = 0)]
        producers: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::Io(_) | Error::Json(_) | Error::InvalidEconomyFile(_) => 3,
        _ => 2,
    }
}

fn load_economy(path: &Path) -> std::result::Result<Economy, CommandOutcome> {
    Economy::from_json_file(path).map_err(|e| {
        eprintln!("eqlab: cannot load {}: {e}", path.display());
        CommandOutcome { exit_code: 3, artifacts: Vec::new() }
    })
}

fn write_artifact(path: &Path, content: &[u8]) -> std::result::Result<(), CommandOutcome> {
    std::fs::write(path, content).map_err(|e| {
        eprintln!("eqlab: cannot write {}: {e}", path.display());
        CommandOutcome { exit_code: 3, artifacts: Vec::new() }
    })
}

fn fmt_vec(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| format!("{v:.16e}"))
        .collect::<Vec<_>>()
        .join(",")
}

/// Runs the CLI on `argv` (including the program name) and returns the
/// outcome instead of exiting.
pub fn execute<I, S>(argv: I) -> CommandOutcome
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are successes; anything else is a
            // usage failure.
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 3,
            };
            let _ = e.print();
            return CommandOutcome { exit_code: code, artifacts: Vec::new() };
        }
    };
    match run(cli.command) {
        Ok(outcome) => outcome,
        Err(either) => match either {
            RunError::Outcome(outcome) => outcome,
            RunError::Lib(err) => {
                eprintln!("eqlab: {err}");
                CommandOutcome { exit_code: exit_code_for(&err), artifacts: Vec::new() }
            }
        },
    }
}

enum RunError {
    Lib(Error),
    Outcome(CommandOutcome),
}

impl From<Error> for RunError {
    fn from(e: Error) -> RunError {
        RunError::Lib(e)
    }
}

impl From<CommandOutcome> for RunError {
    fn from(o: CommandOutcome) -> RunError {
        RunError::Outcome(o)
    }
}

fn run(command: Command) -> std::result::Result<CommandOutcome, RunError> {
    match command {
        Command::Validate(EconArg { econ }) => {
            let economy = load_economy(&econ)?;
            let report = validate_economy(&economy);
            if report.ok {
                println!("ok");
                Ok(CommandOutcome::ok(Vec::new()))
            } else {
                for (rule, msg) in &report.violations {
                    println!("violation {rule}: {msg}");
                }
                Ok(CommandOutcome { exit_code: 1, artifacts: Vec::new() })
            }
        }
        Command::Demand { econ, consumer, prices, wealth: wealth_flag } => {
            let economy = load_economy(&econ.econ)?;
            let p = parse_price_list(&prices)?;
            if consumer < 1 || consumer > economy.consumers.len() {
                return Err(Error::IndexOutOfRange(consumer).into());
            }
            let m = match wealth_flag {
                Some(m) => m,
                None => wealth(&economy, consumer - 1, &p)?,
            };
            let d = demand(&economy.consumers[consumer - 1], economy.mode, &p, m)?;
            println!("wealth = {m:.16e}");
            println!("bundle = {}", fmt_vec(&d.bundle));
            println!("boundary = {}", d.boundary);
            println!("multiplier = {:.16e}", d.multiplier);
            Ok(CommandOutcome::ok(Vec::new()))
        }
        Command::Supply { econ, producer, prices } => {
            let economy = load_economy(&econ.econ)?;
            let p = parse_price_list(&prices)?;
            if producer < 1 || producer > economy.producers.len() {
                return Err(Error::IndexOutOfRange(producer).into());
            }
            let s = supply(&economy.producers[producer - 1], &p)?;
            println!("netput = {}", fmt_vec(&s.netput));
            println!("profit = {:.16e}", s.profit);
            Ok(CommandOutcome::ok(Vec::new()))
        }
        Command::Excess { econ, prices } => {
            let economy = load_economy(&econ.econ)?;
            let p = parse_price_list(&prices)?;
            let r = excess_demand(&economy, &p)?;
            println!("zeta = {}", fmt_vec(&r.zeta));
            println!("norm = {:.16e}", r.zeta_norm());
            println!("walras = {:.16e}", p.dot(&r.zeta));
            Ok(CommandOutcome::ok(Vec::new()))
        }
        Command::Solve { econ, p0 } => {
            let economy = load_economy(&econ.econ)?;
            let start = match p0 {
                Some(text) => parse_price_list(&text)?,
                None => PriceVector::new(vec![1.0; economy.l])?,
            };
            let report = find_equilibrium(&economy, &start)?;
            println!("p_star = {}", fmt_vec(report.p_star.values()));
            println!("residual = {:.16e}", report.residual);
            match report.index {
                Some(index) => println!("index = {index}"),
                None => println!("index = n/a"),
            }
            println!("iterations = {}", report.iterations);
            if report.converged {
                Ok(CommandOutcome::ok(Vec::new()))
            } else {
                eprintln!("eqlab: solver did not reach the residual tolerance");
                Ok(CommandOutcome { exit_code: 2, artifacts: Vec::new() })
            }
        }
        Command::Unique { econ, starts, seed } => {
            let economy = load_economy(&econ.econ)?;
            let report = verify_uniqueness(&economy, starts, seed)?;
            println!("starts = {}", report.starts);
            println!("clusters = {}", report.clusters.len());
            for (rep, members) in &report.clusters {
                println!("cluster {} x{}", fmt_vec(rep.values()), members);
            }
            println!("max_intra = {:.16e}", report.max_intra_cluster_distance);
            println!("max_inter = {:.16e}", report.max_inter_cluster_distance);
            println!("unique = {}", report.unique);
            Ok(CommandOutcome::ok(Vec::new()))
        }
        Command::Tatonnement { econ, p0, speeds, tmax, out } => {
            let economy = load_economy(&econ.econ)?;
            let p0 = parse_price_list(&p0)?;
            let speeds = match speeds {
                Some(text) => parse_number_list(&text)?,
                None => vec![1.0; economy.l],
            };
            let mut cfg = TatonnementConfig::with_defaults(speeds, tmax, &p0);
            // The V column needs the equilibrium ray; leave it NaN when the
            // solver cannot provide one.
            if let Ok(eq) = find_equilibrium(&economy, &p0) {
                if eq.converged {
                    cfg.v_reference = Some(eq.p_star.values().to_vec());
                }
            }
            let trace = integrate_tatonnement(&economy, &p0, &cfg)?;
            println!("verdict = {}", trace.verdict);
            println!("samples = {}", trace.samples.len());
            println!("h_drift = {:.16e}", trace.h_drift);
            if let Some(limit) = &trace.limit {
                println!("limit = {}", fmt_vec(limit.values()));
            }
            let mut artifacts = Vec::new();
            if let Some(path) = out {
                let mut buf = Vec::new();
                trace.write_csv(&mut buf).map_err(Error::Io)?;
                write_artifact(&path, &buf)?;
                artifacts.push(path);
            }
            Ok(CommandOutcome::ok(artifacts))
        }
        Command::Index { econ, prices } => {
            let economy = load_economy(&econ.econ)?;
            let p = match prices {
                Some(text) => parse_price_list(&text)?,
                None => {
                    let report =
                        find_equilibrium(&economy, &PriceVector::new(vec![1.0; economy.l])?)?;
                    if !report.converged {
                        return Err(Error::NoEquilibrium.into());
                    }
                    report.p_star
                }
            };
            let index = equilibrium_index(&economy, &p)?;
            println!("p = {}", fmt_vec(p.values()));
            println!("index = {index}");
            Ok(CommandOutcome::ok(Vec::new()))
        }
        Command::Surplus { econ, from, to, path, out } => {
            let economy = load_economy(&econ.econ)?;
            let (from, to) = match (from, to, path) {
                (Some(from), Some(to), None) => {
                    (parse_number_list(&from)?, parse_number_list(&to)?)
                }
                (None, None, Some(file)) => {
                    let text = std::fs::read_to_string(&file).map_err(Error::Io)?;
                    let waypoints = parse_waypoints(&text)?;
                    // The integral is path-independent, so the identity only
                    // needs the endpoints.
                    (waypoints[0].clone(), waypoints.last().unwrap().clone())
                }
                _ => {
                    eprintln!("eqlab: surplus needs either --from/--to or --path");
                    return Err(CommandOutcome { exit_code: 3, artifacts: Vec::new() }.into());
                }
            };
            let r = aggregate_surplus_identity(&economy.consumers, &from, &to)?;
            println!("lhs = {:.16e}", r.lhs);
            println!("rhs = {:.16e}", r.rhs);
            println!("gap = {:.16e}", r.gap);
            let mut artifacts = Vec::new();
            if let Some(path) = out {
                let csv = format!("lhs,rhs,gap\n{:.16e},{:.16e},{:.16e}\n", r.lhs, r.rhs, r.gap);
                write_artifact(&path, csv.as_bytes())?;
                artifacts.push(path);
            }
            Ok(CommandOutcome::ok(artifacts))
        }
        Command::Curves { econ, grid, out } => {
            let economy = load_economy(&econ.econ)?;
            let grid = parse_number_list(&grid)?;
            let table = partial_eq_curves(&economy, &grid)?;
            let mut buf = Vec::new();
            table.write_csv(&mut buf).map_err(Error::Io)?;
            let mut artifacts = Vec::new();
            match out {
                Some(path) => {
                    write_artifact(&path, &buf)?;
                    artifacts.push(path);
                }
                None => print!("{}", String::from_utf8_lossy(&buf)),
            }
            Ok(CommandOutcome::ok(artifacts))
        }
        Command::Gen { seed, goods, consumers, producers, out } => {
            let economy = generate_random_economy(seed, goods, consumers, producers)?;
            let text = economy.to_json_string();
            let mut artifacts = Vec::new();
            match out {
                Some(path) => {
                    write_artifact(&path, text.as_bytes())?;
                    artifacts.push(path);
                }
                None => println!("{text}"),
            }
            Ok(CommandOutcome::ok(artifacts))
        }
    }
}
