use std::path::PathBuf;

use clap::{Args, Parser, ValueEnum};
use serde::Serialize;

use qsine::polyenc::FlagMode;
use qsine::reflection::ShiftImpl;

pub const AFTER_HELP: &str = "\
OUTPUT FILES
  Every experiment writes <out>/results.csv and <out>/manifest.json.
  CSV files have a header row, comma separators and '.' decimals.

  poisson1d, poisson1d-inhom, poisson2d   results.csv
    n,p,l2_error_quantum,l2_error_classical,success_probability
  fractional1d                            results.csv
    n,beta,nu,method,p,amplitude,rel_error
  fractional1d --samples K                samples.csv (smallest n, each beta)
    beta,sample,index,x,value
  fractional2d                            results.csv
    n,method,p,k_split,rel_error_matern,rel_error_exact
  gatecount-uf, gatecount-ur, gatecount-solver   results.csv
    series,n,n_qubits,n_ancilla,cnot,u3,total
  gatecount-*                             exponents.csv
    series,exponent,bound,within_bound
  plotdata                                <out>/plotdata.csv, or stdout
    series,x,y

  For gatecount-uf n is the register width m, for gatecount-ur the number of
  qubits n, for gatecount-solver the physical grid size. Exponents are fitted
  to log(total) against log(register qubits). Every series is checked
  against --exponent-bound; all files are still written, and any violation
  is listed in the manifest and exits with status 3.

ENVIRONMENT
  QSINE_THREADS   worker threads (default: all cores)";

#[derive(Parser, Debug)]
#[command(
    name = "qsine",
    version,
    about = "Convergence and gate-count experiments for the quantum sine-transform solver",
    after_help = AFTER_HELP
)]
pub struct Cli {
    pub experiment: Experiment,
    #[command(flatten)]
    pub opts: Options,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Poisson1d,
    Poisson1dInhom,
    Fractional1d,
    Poisson2d,
    Fractional2d,
    GatecountUf,
    GatecountUr,
    GatecountSolver,
    Plotdata,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ShiftArg {
    Mcx,
    Ripple,
    Both,
}

impl ShiftArg {
    pub fn impls(self) -> Vec<ShiftImpl> {
        match self {
            ShiftArg::Mcx => vec![ShiftImpl::Mcx],
            ShiftArg::Ripple => vec![ShiftImpl::Ripple],
            ShiftArg::Both => vec![ShiftImpl::Mcx, ShiftImpl::Ripple],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FlagArg {
    Window,
    Cumulative,
}

impl From<FlagArg> for FlagMode {
    fn from(f: FlagArg) -> Self {
        match f {
            FlagArg::Window => FlagMode::Window,
            FlagArg::Cumulative => FlagMode::Cumulative,
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct Options {
    /// Grid sizes (or register widths for gatecount-uf and gatecount-ur).
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub n: Option<Vec<usize>>,
    /// Polynomial degrees.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub p: Option<Vec<usize>>,
    /// Forward-shift implementation; gate-count runs default to both.
    #[arg(long, value_enum)]
    pub shift: Option<ShiftArg>,
    #[arg(long, value_enum, default_value = "window")]
    pub flag_mode: FlagArg,
    /// Side of the fitted 2D cell; 6 for p ≤ 3 and 8 otherwise.
    #[arg(long)]
    pub k_split: Option<usize>,
    /// 1D segment partition as lo:hi pairs, e.g. 1:5,5:9,9:16.
    #[arg(long, value_delimiter = ',')]
    pub partition: Option<Vec<String>>,
    #[arg(long)]
    pub kappa: Option<f64>,
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub beta: Option<Vec<f64>>,
    #[arg(long)]
    pub tau: Option<f64>,
    /// Random-field samples to draw (fractional1d).
    #[arg(long, default_value_t = 0)]
    pub samples: usize,
    /// Fine grid of the 2D Poisson reference solution.
    #[arg(long, default_value_t = 512)]
    pub reference: usize,
    /// Bound on fitted gate-count exponents.
    #[arg(long, default_value_t = 4.0)]
    pub exponent_bound: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output directory.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Input CSV (plotdata).
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// x column (plotdata); defaults to the first column.
    #[arg(long)]
    pub x: Option<String>,
    /// Columns whose values label the series (plotdata).
    #[arg(long, value_delimiter = ',')]
    pub group: Vec<String>,
}

/// Fully resolved configuration, recorded in the manifest.
#[derive(Clone, Debug, Serialize)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub n: Vec<usize>,
    pub p: Vec<usize>,
    pub shift: Vec<ShiftImpl>,
    pub flag_mode: FlagMode,
    pub k_split: Option<usize>,
    pub partition: Option<Vec<(usize, usize)>>,
    pub kappa: f64,
    pub beta: Vec<f64>,
    pub tau: f64,
    pub samples: usize,
    pub reference: usize,
    pub exponent_bound: f64,
    pub seed: u64,
    pub out: PathBuf,
}

fn parse_partition(items: &[String]) -> Result<Vec<(usize, usize)>, String> {
    items
        .iter()
        .map(|s| {
            let (lo, hi) = s
                .split_once(':')
                .ok_or_else(|| format!("partition entry '{s}' is not lo:hi"))?;
            let lo = lo
                .trim()
                .parse()
                .map_err(|_| format!("bad bound in '{s}'"))?;
            let hi = hi
                .trim()
                .parse()
                .map_err(|_| format!("bad bound in '{s}'"))?;
            if lo >= hi {
                return Err(format!("empty partition entry '{s}'"));
            }
            Ok((lo, hi))
        })
        .collect()
}

impl ExperimentConfig {
    pub fn resolve(experiment: Experiment, o: &Options) -> Result<Self, String> {
        use Experiment::*;
        let default_n: Vec<usize> = match experiment {
            Poisson1d | Poisson1dInhom | Fractional1d => (4..=10).map(|l| 1 << l).collect(),
            Poisson2d => vec![8, 16, 32, 64],
            Fractional2d => vec![16, 32],
            GatecountUf => (2..=12).collect(),
            GatecountUr => (3..=10).collect(),
            GatecountSolver => (4..=10).map(|l| 1 << l).collect(),
            Plotdata => vec![],
        };
        let default_p = match experiment {
            Poisson1d | Poisson1dInhom | Fractional2d => vec![3, 4],
            _ => vec![4],
        };
        let n = o.n.clone().unwrap_or(default_n);
        let p = o.p.clone().unwrap_or(default_p);
        let is_gatecount = matches!(experiment, GatecountUf | GatecountUr | GatecountSolver);
        let shift = o
            .shift
            .unwrap_or(if is_gatecount {
                ShiftArg::Both
            } else {
                ShiftArg::Ripple
            })
            .impls();
        let two_d = matches!(experiment, Poisson2d | Fractional2d);
        let kappa = o
            .kappa
            .unwrap_or(if two_d { 10.0 / 2f64.sqrt() } else { 40.0 });
        let tau = o.tau.unwrap_or(if two_d { 0.01995 } else { 4.279e-5 });
        let beta = o.beta.clone().unwrap_or(match experiment {
            Fractional2d => vec![1.0],
            _ => vec![0.5, 1.0, 1.5],
        });
        let partition = o.partition.as_deref().map(parse_partition).transpose()?;

        if experiment != Plotdata {
            if n.is_empty() {
                return Err("--n needs at least one size".into());
            }
            if p.is_empty() {
                return Err("--p needs at least one degree".into());
            }
        }
        if let Some(&bad) = p.iter().find(|&&v| !(1..=6).contains(&v)) {
            return Err(format!("p = {bad} outside 1..=6"));
        }
        match experiment {
            GatecountUf | GatecountUr => {
                let min = if experiment == GatecountUf { 1 } else { 2 };
                if let Some(&bad) = n.iter().find(|&&v| v < min || v > 24) {
                    return Err(format!("register width {bad} outside {min}..=24"));
                }
            }
            Plotdata => {
                if o.input.is_none() {
                    return Err("plotdata needs --input".into());
                }
            }
            _ => {
                let min = if two_d { 4 } else { 8 };
                if let Some(&bad) = n.iter().find(|&&v| !v.is_power_of_two() || v < min) {
                    return Err(format!(
                        "grid size {bad} is not a power of two of at least {min}"
                    ));
                }
            }
        }
        if experiment == Poisson2d {
            if !o.reference.is_power_of_two() {
                return Err(format!(
                    "reference size {} is not a power of two",
                    o.reference
                ));
            }
            if let Some(&bad) = n.iter().find(|&&v| v > o.reference) {
                return Err(format!("grid size {bad} exceeds the reference grid"));
            }
        }
        if kappa.is_nan() || tau.is_nan() || kappa <= 0.0 || tau <= 0.0 {
            return Err("kappa and tau must be positive".into());
        }
        if beta.iter().any(|b| b.is_nan() || *b <= 0.0) {
            return Err("beta must be positive".into());
        }
        Ok(ExperimentConfig {
            experiment,
            n,
            p,
            shift,
            flag_mode: o.flag_mode.into(),
            k_split: o.k_split,
            partition,
            kappa,
            beta,
            tau,
            samples: o.samples,
            reference: o.reference,
            exponent_bound: o.exponent_bound,
            seed: o.seed,
            out: o.out.clone(),
        })
    }

    pub fn k_split_for(&self, p: usize) -> usize {
        self.k_split.unwrap_or(if p <= 3 { 6 } else { 8 })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts(args: &[&str]) -> (Experiment, Options) {
        let cli =
            Cli::try_parse_from(std::iter::once("qsine").chain(args.iter().copied())).unwrap();
        (cli.experiment, cli.opts)
    }

    #[test]
    fn defaults_per_experiment() {
        let (e, o) = opts(&["poisson1d"]);
        let c = ExperimentConfig::resolve(e, &o).unwrap();
        assert_eq!(c.n, vec![16, 32, 64, 128, 256, 512, 1024]);
        assert_eq!(c.p, vec![3, 4]);
        assert_eq!(c.shift, vec![ShiftImpl::Ripple]);

        let (e, o) = opts(&["gatecount-ur"]);
        let c = ExperimentConfig::resolve(e, &o).unwrap();
        assert_eq!(c.n, (3..=10).collect::<Vec<_>>());
        assert_eq!(c.shift, vec![ShiftImpl::Mcx, ShiftImpl::Ripple]);
    }

    #[test]
    fn rejects_bad_sizes_and_degrees() {
        let (e, o) = opts(&["poisson1d", "--n", "24"]);
        assert!(ExperimentConfig::resolve(e, &o).is_err());
        let (e, o) = opts(&["poisson1d", "--p", "7"]);
        assert!(ExperimentConfig::resolve(e, &o).is_err());
        let (e, o) = opts(&["plotdata"]);
        assert!(ExperimentConfig::resolve(e, &o).is_err());
    }

    #[test]
    fn partition_pairs() {
        let p = parse_partition(&["1:5".into(), "5:16".into()]).unwrap();
        assert_eq!(p, vec![(1, 5), (5, 16)]);
        assert!(parse_partition(&["5:5".into()]).is_err());
        assert!(parse_partition(&["7".into()]).is_err());
    }

    #[test]
    fn k_split_follows_degree() {
        let (e, o) = opts(&["fractional2d"]);
        let c = ExperimentConfig::resolve(e, &o).unwrap();
        assert_eq!((c.k_split_for(3), c.k_split_for(4)), (6, 8));
    }
}
