mod grid;
mod scan;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use zetatherm::ergopt::{critical_graph, h_max, DeviationFunction, InfMethod, TIGHT_TOL};
use zetatherm::thermo::{gibbs_cylinder, pressure, SPECTRAL_TOL};
use zetatherm::zeta::{truncated_sums, ZetaMeasure, ZetaParams, DEFAULT_N_CAP, DEFAULT_REL_TOL};
use zetatherm::CoreError;
use zetatherm_symbolic::{LocallyConstantPotential, PeriodicWord, ShiftSpec, Word};

use crate::grid::Grid;
use crate::scan::{run_scan, write_csv, Kind, Regime, ScanConfig};

#[derive(Debug, Parser)]
#[command(name = "zetatherm", version, about = "Pressure, Gibbs states, zeta measures and deviation functions")]
struct Cli {
    /// Shift JSON (`{"d":…, "transitions":[[…]]}`); defaults to the full shift on the symbols used.
    #[arg(long, global = true)]
    shift: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// P(csf) from the Perron root of the transfer matrix.
    Pressure {
        #[arg(long)]
        potential: PathBuf,
        #[arg(long)]
        c: f64,
        #[arg(long, default_value_t = 1.0)]
        s: f64,
    },
    /// Maximal ergodic average, critical graph and its entropy.
    Beta {
        #[arg(long)]
        potential: PathBuf,
    },
    /// Gibbs measure of a cylinder.
    Gibbs {
        #[arg(long)]
        potential: PathBuf,
        #[arg(long)]
        c: f64,
        #[arg(long)]
        cylinder: String,
    },
    /// Zeta measure of a cylinder with a certified tail.
    Zeta {
        #[arg(long)]
        potential: PathBuf,
        #[arg(long)]
        c: f64,
        #[arg(long)]
        s: f64,
        #[arg(long)]
        cylinder: String,
        #[arg(long, default_value_t = DEFAULT_REL_TOL)]
        rel_tol: f64,
        #[arg(long, default_value_t = DEFAULT_N_CAP)]
        n_cap: usize,
    },
    /// Periodic-orbit measure truncated at level N.
    Truncated {
        #[arg(long)]
        potential: PathBuf,
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long)]
        c: f64,
        #[arg(long = "N")]
        n: usize,
        #[arg(long)]
        cylinder: String,
    },
    /// Deviation function on an orbit, or its infimum over a cylinder.
    Devfun {
        #[arg(long)]
        potential: PathBuf,
        #[arg(long, conflicts_with_all = ["cylinder", "method", "cap"])]
        orbit: Option<String>,
        #[arg(long, required_unless_present = "orbit")]
        cylinder: Option<String>,
        #[arg(long, value_enum, default_value = "exact")]
        method: Method,
        #[arg(long, default_value_t = 12)]
        cap: usize,
    },
    /// Rows of measures and rates over a parameter grid.
    Scan {
        #[arg(long, value_enum)]
        regime: Regime,
        #[arg(long)]
        potential: PathBuf,
        /// e.g. `L=1,c=25:200:*2` or `c=2,s=0.9;0.99`.
        #[arg(long)]
        grid: String,
        #[arg(long, value_delimiter = ',', required = true)]
        cylinders: Vec<String>,
        /// Truncated measure used by the N-over-c regime.
        #[arg(long, value_enum, default_value = "pi")]
        kind: Kind,
        #[arg(long, default_value_t = DEFAULT_REL_TOL)]
        rel_tol: f64,
        #[arg(long, default_value_t = DEFAULT_N_CAP)]
        n_cap: usize,
        /// CSV destination; standard output if absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the rows as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
        /// Fill the wall_ms column, which makes output depend on the machine.
        #[arg(long)]
        timing: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum Method {
    Exact,
    Brute,
}

fn load_shift(path: &Path) -> Result<ShiftSpec> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(ShiftSpec::from_json(&text)?)
}

fn load_potential(path: &Path, shift: Option<&ShiftSpec>) -> Result<LocallyConstantPotential> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    LocallyConstantPotential::from_json(&text, shift).with_context(|| format!("parsing {}", path.display()))
}

fn word(text: &str, spec: &ShiftSpec) -> Result<Word> {
    Ok(Word::parse_for(text, spec)?)
}

/// Prints values within 1e-12 of zero as 0.
fn tidy(x: f64) -> f64 {
    if x.abs() < 1e-12 { 0.0 } else { x }
}

fn run(cli: Cli) -> Result<()> {
    let shift = cli.shift.as_deref().map(load_shift).transpose()?;
    let potential = |path: &Path| load_potential(path, shift.as_ref());
    match cli.command {
        Command::Pressure { potential: path, c, s } => {
            let f = potential(&path)?;
            let data = pressure(&f, c * s, SPECTRAL_TOL)?;
            println!("P={:?} residual={:e} iterations={}", data.log_lambda, data.residual, data.iterations);
        }
        Command::Beta { potential: path } => {
            let f = potential(&path)?;
            let critical = critical_graph(&f, TIGHT_TOL);
            let h = h_max(&critical)?;
            println!("beta={} h_f={}", tidy(critical.beta), tidy(h));
            let d = f.spec().d();
            let states: Vec<String> = critical.vertices.iter().map(|&v| critical.states[v].to_text(d)).collect();
            println!("critical_states={}", states.join(","));
            let edges: Vec<String> = critical
                .tight_edges
                .iter()
                .map(|&(from, to)| format!("{}>{}", critical.states[from].to_text(d), critical.states[to].to_text(d)))
                .collect();
            println!("critical_edges={}", edges.join(","));
            println!("components={}", critical.components.len());
        }
        Command::Gibbs { potential: path, c, cylinder } => {
            let f = potential(&path)?;
            let m = gibbs_cylinder(&f, c, &word(&cylinder, f.spec())?)?;
            if m.admissible {
                println!("mu={:?}", m.value);
            } else {
                println!("mu=0 inadmissible=true");
            }
        }
        Command::Zeta { potential: path, c, s, cylinder, rel_tol, n_cap } => {
            let f = potential(&path)?;
            let params = ZetaParams::new(c, s)?.with_rel_tol(rel_tol)?.with_n_cap(n_cap)?;
            let m = ZetaMeasure::new(&f, params)?.measure(&word(&cylinder, f.spec())?)?;
            println!(
                "value={:?} n_used={} tail_bound={:e} certified={}",
                m.value, m.n_used, m.tail_bound, m.certified
            );
        }
        Command::Truncated { potential: path, kind, c, n, cylinder } => {
            let f = potential(&path)?;
            let w = word(&cylinder, f.spec())?;
            let sums = truncated_sums(&f, kind.into(), c, n, std::slice::from_ref(&w))?;
            println!("value={:?}", sums.measure(0));
        }
        Command::Devfun { potential: path, orbit, cylinder, method, cap } => {
            let f = potential(&path)?;
            let dev = DeviationFunction::new(&f);
            if let Some(orbit) = orbit {
                let x = PeriodicWord::new(f.spec(), word(&orbit, f.spec())?)?;
                println!("I={:?}", tidy(dev.deviation(&x)?));
            } else {
                let w = word(cylinder.as_deref().expect("required by clap"), f.spec())?;
                let method = match method {
                    Method::Exact => InfMethod::Exact,
                    Method::Brute => InfMethod::Brute { period_cap: cap },
                };
                println!("inf_I={:?}", tidy(dev.inf_cylinder(&w, method)?));
            }
        }
        Command::Scan { regime, potential: path, grid, cylinders, kind, rel_tol, n_cap, out, json, timing } => {
            let f = potential(&path)?;
            let cylinders = cylinders.iter().map(|c| word(c.trim(), f.spec())).collect::<Result<Vec<_>>>()?;
            if cylinders.is_empty() {
                bail!("--cylinders is empty");
            }
            let config = ScanConfig { regime, grid: Grid::parse(&grid)?, cylinders, kind, rel_tol, n_cap, timing };
            let rows = run_scan(&f, &config)?;
            match out {
                Some(path) => {
                    let file = fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?;
                    write_csv(&rows, file)?;
                }
                None => write_csv(&rows, std::io::stdout().lock())?,
            }
            if let Some(path) = json {
                fs::write(&path, serde_json::to_string_pretty(&rows)?)
                    .with_context(|| format!("writing {}", path.display()))?;
            }
        }
    }
    Ok(())
}

/// 3 for numerical failures, 2 for everything else (bad input, unreadable files).
fn exit_code(error: &anyhow::Error) -> u8 {
    let numeric = error
        .chain()
        .any(|cause| cause.downcast_ref::<CoreError>().is_some_and(CoreError::is_numeric));
    if numeric { 3 } else { 2 }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = std::env::var("ZETATHERM_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        // only fails if a pool already exists, which cannot happen this early
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads.max(1)).build_global();
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(error) => {
            eprintln!("error: {error:#}");
            ExitCode::from(exit_code(&error))
        }
    }
}
