use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use cusp_core::hajlasz::{
    certify_pointwise, constructive_gradient_2d_with, constructive_gradient_with, optimal_gradient_with,
    stratified_cloud, SolverOptions,
};
use cusp_core::maximal::{m_chi_interval_with, m_chi_on_grid, m_tau_of_m_chi_with, m_tau_with, Algorithm};
use cusp_core::{build_grid, extend_domain, sample_function, CuspDomain, Exponent, Grid, GridFunction, StripFunction};

use cusp_lab::config::{ConfigError, ExperimentConfig, PairSpec};
use cusp_lab::formats::{self, read_grid_function};
use cusp_lab::slit::{run_slit_counterexample, write_slit_csv, SlitSpec};
use cusp_lab::{density, plot, sweep};

#[derive(Parser)]
#[command(name = "cusp-lab", version, about = "Sobolev and Hajłasz norms on discretised cusp domains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum OperatorArg {
    Tau,
    Chi,
    ChiInterval,
    TauOfChi,
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgorithmArg {
    Fast,
    Exhaustive,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Constructive,
    Constructive2d,
    Optimal,
    Certify,
}

#[derive(clap::Args)]
struct GridArgs {
    /// Experiment config giving the domain, grid and default family.
    #[arg(long)]
    config: PathBuf,
    /// Grid function to read; the config family is sampled when omitted.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Refinement level of the config grid (1 = as configured).
    #[arg(long, default_value_t = 1)]
    level: u32,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Norm-equivalence sweep: writes sweep.csv and sweep.svg.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Slit-disk counterexample: writes slit.csv.
    Slit {
        #[arg(long)]
        levels: u32,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1.0 / 16.0)]
        h0: f64,
        #[arg(long, default_value_t = 1.5)]
        p: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 60)]
        cloud_size: usize,
    },
    /// Measure-density probe along the axis: writes density.csv.
    Density {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Applies a maximal operator to a grid function.
    Maximal {
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, value_enum)]
        operator: OperatorArg,
        #[arg(long, value_enum, default_value = "fast")]
        algorithm: AlgorithmArg,
    },
    /// Writes the reflection extension of a grid function.
    Extend {
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Pointwise gradients: constructive recipes, the convex optimum on a
    /// cloud, or certification of a given gradient.
    Hajlasz {
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, value_enum)]
        mode: Mode,
        /// Exponent of the reported norm (a number or `inf`).
        #[arg(long, default_value = "2")]
        p: f64,
        /// all | adversarial | random:N | default
        #[arg(long, default_value = "default")]
        pairs: String,
        /// Overrides the config seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Gradient file checked in `certify` mode.
        #[arg(long)]
        gradient: Option<PathBuf>,
    },
    /// Redraws the SVG of a sweep CSV.
    Plot {
        #[arg(long)]
        csv: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

enum Outcome {
    Ok,
    Partial,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Partial) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn create(path: &Path) -> anyhow::Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    Ok(BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?))
}

fn out_dir(dir: &Path) -> anyhow::Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

fn run(command: Command) -> anyhow::Result<Outcome> {
    match command {
        Command::Sweep { config, out } => {
            let cfg = ExperimentConfig::load(&config)?;
            cfg.family()?;
            if cfg.p.is_empty() {
                return Err(ConfigError::Invalid("a sweep needs at least one exponent in `p`".into()).into());
            }
            out_dir(&out)?;
            let rows = sweep::run_equivalence_sweep(&cfg);
            let mut buf = Vec::new();
            sweep::write_sweep_csv(&mut buf, &rows)?;
            fs::write(out.join("sweep.csv"), &buf)?;
            let svg = plot::sweep_svg(std::str::from_utf8(&buf)?)?;
            fs::write(out.join("sweep.svg"), svg)?;
            let failed = rows.iter().filter(|r| r.error.is_some()).count();
            if failed > 0 {
                eprintln!("{failed} of {} rows failed", rows.len());
                return Ok(Outcome::Partial);
            }
            Ok(Outcome::Ok)
        }
        Command::Slit { levels, out, h0, p, seed, cloud_size } => {
            let spec = SlitSpec { h0, p, cloud_size, seed };
            let rows = run_slit_counterexample(&spec, levels)?;
            out_dir(&out)?;
            write_slit_csv(create(&out.join("slit.csv"))?, &spec, &rows)?;
            Ok(Outcome::Ok)
        }
        Command::Density { config, out } => {
            let cfg = ExperimentConfig::load(&config)?;
            let rows = density::run_measure_density_probe(&cfg)?;
            out_dir(&out)?;
            density::write_density_csv(create(&out.join("density.csv"))?, &cfg, &rows)?;
            Ok(Outcome::Ok)
        }
        Command::Maximal { grid, operator, algorithm } => {
            let (cfg, _, g) = load_grid(&grid)?;
            let u = load_function(&grid, &cfg, &g)?;
            let alg = match algorithm {
                AlgorithmArg::Fast => Algorithm::Fast,
                AlgorithmArg::Exhaustive => Algorithm::Exhaustive,
            };
            let result = match operator {
                OperatorArg::Tau => m_tau_with(&u, alg),
                OperatorArg::ChiInterval => m_chi_interval_with(&u, alg)?,
                OperatorArg::Chi => m_chi_on_grid(&StripFunction::from_grid_function(&u), &g, alg, None)?,
                OperatorArg::TauOfChi => m_tau_of_m_chi_with(&StripFunction::from_grid_function(&u), &g, alg, None)?,
            };
            formats::write_maximal(create(&grid.out)?, &result)?;
            Ok(Outcome::Ok)
        }
        Command::Extend { grid } => {
            let (cfg, domain, g) = load_grid(&grid)?;
            let u = load_function(&grid, &cfg, &g)?;
            let ext = extend_domain(&u, &domain)?;
            formats::write_extended(create(&grid.out)?, &g, &ext)?;
            Ok(Outcome::Ok)
        }
        Command::Hajlasz { grid, mode, p, pairs, seed, gradient } => {
            let (cfg, domain, g) = load_grid(&grid)?;
            let u = load_function(&grid, &cfg, &g)?;
            let p = Exponent::new(p).map_err(|e| ConfigError::Invalid(e.to_string()))?;
            let seed = seed.unwrap_or(cfg.seed);
            let pair_set = PairSpec::parse(&pairs)?.build(&g, seed);
            let summary = match mode {
                Mode::Constructive | Mode::Constructive2d => {
                    let w = match mode {
                        Mode::Constructive => constructive_gradient_with(&u, &domain, &pair_set)?,
                        _ => constructive_gradient_2d_with(&u, &pair_set)?,
                    };
                    let c = w.certified_constant;
                    let norm = w.g.scale(c).lp_norm(p);
                    formats::write_witness(create(&grid.out)?, &w)?;
                    formats::witness_summary(c, Some(norm), w.pairs.count, seed)
                }
                Mode::Optimal => {
                    let cloud = stratified_cloud(&u, cfg.cloud_size, seed)?;
                    let opt = optimal_gradient_with(&cloud, p, &SolverOptions::default())?;
                    let nodes = cloud.nodes().unwrap_or(&[]);
                    formats::write_cloud_function(create(&grid.out)?, &g, nodes, cloud.weights(), &opt.g)?;
                    let pair_count = nodes.len() * nodes.len().saturating_sub(1) / 2;
                    formats::witness_summary(1.0, Some(opt.norm), pair_count, seed)
                }
                Mode::Certify => {
                    let Some(path) = gradient else { bail!("certify mode needs --gradient FILE") };
                    let gf = read_grid_function(BufReader::new(File::open(&path)?), &g)
                        .with_context(|| format!("reading {}", path.display()))?;
                    let c = certify_pointwise(&u, &gf, &pair_set);
                    formats::write_grid_function(create(&grid.out)?, &gf.scale(c))?;
                    formats::witness_summary(c, Some(gf.scale(c).lp_norm(p)), pair_set.len(), seed)
                }
            };
            let mut stdout = std::io::stdout().lock();
            writeln!(stdout, "{summary}")?;
            Ok(Outcome::Ok)
        }
        Command::Plot { csv, out } => {
            let text = fs::read_to_string(&csv).with_context(|| format!("reading {}", csv.display()))?;
            fs::write(&out, plot::sweep_svg(&text)?)?;
            Ok(Outcome::Ok)
        }
    }
}

/// Config, domain (first `s`) and grid for the pass-through subcommands.
fn load_grid(args: &GridArgs) -> anyhow::Result<(ExperimentConfig, CuspDomain, Grid)> {
    let cfg = ExperimentConfig::load(&args.config)?;
    if args.level == 0 {
        return Err(ConfigError::Invalid("--level starts at 1".into()).into());
    }
    let s = cfg.s_list()[0];
    let domain = cfg.domain_for(s)?;
    let grid = build_grid(&domain, &cfg.grid_spec(args.level - 1)?)?;
    Ok((cfg, domain, grid))
}

fn load_function<'g>(args: &GridArgs, cfg: &ExperimentConfig, grid: &'g Grid) -> anyhow::Result<GridFunction<'g>> {
    match &args.input {
        Some(path) => Ok(read_grid_function(BufReader::new(File::open(path)?), grid)
            .with_context(|| format!("reading {}", path.display()))?),
        None => Ok(sample_function(grid, &cfg.family()?)?),
    }
}
