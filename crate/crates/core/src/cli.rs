//! Command-line front end.
//!
//! Exit codes: 0 when the outcome is optimal or confirmed, 2 when a model is
//! infeasible or a claim is refuted, 1 on usage, input or tool errors.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::claims::{check_claim, run_sweep, ClaimId, SweepSummary, Verdict};
use crate::error::{Error, Result};
use crate::formulation::{build_model, BigMMode, DistributionCost, Eq20Mode, ModelKind, ModelOptions, OcuObjective};
use crate::instance::{generate_instance, load_instance, save_instance, CostMode, GeneratorConfig, Instance};
use crate::milp::solve_milp;
use crate::regret::{compute_baselines, solve_regret_with, RegretReport};
use crate::report::{to_json, write_atomic, SolveReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_REFUTED: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "collab-hub", version, about = "Hub location models under setup-cost uncertainty")]
pub struct Cli {
    /// Log progress to stderr; repeat for more detail.
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a seeded random instance.
    Gen(GenArgs),
    /// Solve one model on an instance.
    Solve(SolveArgs),
    /// Solve a regret model and report per-scenario regrets.
    Regret(SolveArgs),
    /// Check one claim on an instance, or on a seeded sweep.
    Verify(VerifyArgs),
    /// Check every claim on a seeded sweep.
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 4)]
    pub nodes: usize,
    #[arg(long, default_value_t = 2)]
    pub chains: usize,
    #[arg(long, default_value_t = 2)]
    pub scenarios: usize,
    /// Fraction of nodes shared between chains.
    #[arg(long, default_value_t = 0.0)]
    pub overlap: f64,
    #[arg(long, default_value_t = 0.5)]
    pub density: f64,
    #[arg(long, value_enum, default_value_t = CostArg::Euclidean)]
    pub costs: CostArg,
    #[arg(long, default_value_t = 0.6)]
    pub tightness: f64,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum CostArg {
    Euclidean,
    Uniform,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModelArg {
    Nc,
    Cc,
    Ccu,
    Ocu,
}

impl From<ModelArg> for ModelKind {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Nc => ModelKind::Nc,
            ModelArg::Cc => ModelKind::Cc,
            ModelArg::Ccu => ModelKind::Ccu,
            ModelArg::Ocu => ModelKind::Ocu,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum DistArg {
    Literal,
    Standard,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ObjArg {
    AsWritten,
    Split,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Eq20Arg {
    Omit,
    Linearized,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum BigMArg {
    Total,
    Tight,
}

#[derive(Debug, Clone, Copy, Args)]
pub struct ModelFlags {
    #[arg(long, value_enum, default_value_t = DistArg::Standard)]
    pub distribution_cost: DistArg,
    #[arg(long, value_enum, default_value_t = ObjArg::AsWritten)]
    pub ocu_objective: ObjArg,
    #[arg(long, value_enum, default_value_t = Eq20Arg::Linearized)]
    pub eq20: Eq20Arg,
    #[arg(long, value_enum, default_value_t = BigMArg::Tight)]
    pub big_m: BigMArg,
}

impl ModelFlags {
    pub fn options(&self) -> ModelOptions {
        ModelOptions {
            distribution_cost: match self.distribution_cost {
                DistArg::Literal => DistributionCost::LiteralCij,
                DistArg::Standard => DistributionCost::StandardClj,
            },
            ocu_objective: match self.ocu_objective {
                ObjArg::AsWritten => OcuObjective::AsWritten,
                ObjArg::Split => OcuObjective::CollaborativeSplit,
            },
            eq20_mode: match self.eq20 {
                Eq20Arg::Omit => Eq20Mode::Omit,
                Eq20Arg::Linearized => Eq20Mode::Linearized,
            },
            big_m_mode: match self.big_m {
                BigMArg::Total => BigMMode::TotalDemand,
                BigMArg::Tight => BigMMode::PerConstraintTight,
            },
        }
    }
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long, value_enum)]
    pub model: ModelArg,
    #[command(flatten)]
    pub flags: ModelFlags,
    pub input: PathBuf,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ClaimArg {
    Thm1,
    Eq20,
    Tk,
    Ivar,
    Ccnc,
}

impl From<ClaimArg> for ClaimId {
    fn from(c: ClaimArg) -> Self {
        match c {
            ClaimArg::Thm1 => ClaimId::Thm1,
            ClaimArg::Eq20 => ClaimId::Eq20Redundant,
            ClaimArg::Tk => ClaimId::TkNeverOne,
            ClaimArg::Ivar => ClaimId::IRedundant,
            ClaimArg::Ccnc => ClaimId::CcNcConsistency,
        }
    }
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub claim: ClaimArg,
    /// Number of generated instances; ignored when an input file is given.
    #[arg(long, default_value_t = 1)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub flags: ModelFlags,
    /// Instance file. Without it a sweep CSV is produced.
    pub input: Option<PathBuf>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, default_value_t = 30)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub flags: ModelFlags,
    /// Per-row CSV destination.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Verdict tally destination (JSON); stdout when absent.
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

/// Parses `argv` (including the program name) and runs the command.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
        }
    };
    init_logging(cli.verbose);
    match execute(&cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}

fn init_logging(verbose: u8) {
    let level = match verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        2 => log::LevelFilter::Debug,
        _ => log::LevelFilter::Trace,
    };
    let _ = env_logger::Builder::new().filter_level(level).format_timestamp(None).try_init();
}

fn emit(output: Option<&Path>, contents: &str) -> Result<()> {
    match output {
        Some(path) => write_atomic(path, contents),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn read_instance(path: &Path) -> Result<Instance> {
    load_instance(&std::fs::read_to_string(path)?)
}

pub fn execute(command: &Command) -> Result<i32> {
    match command {
        Command::Gen(a) => {
            let cfg = GeneratorConfig {
                seed: a.seed,
                n: a.nodes,
                chain_count: a.chains,
                overlap_fraction: a.overlap,
                scenario_count: a.scenarios,
                demand_density: a.density,
                cost_mode: match a.costs {
                    CostArg::Euclidean => CostMode::Euclidean,
                    CostArg::Uniform => CostMode::Uniform,
                },
                capacity_tightness: a.tightness,
            };
            emit(a.output.as_deref(), &save_instance(&generate_instance(&cfg)?))?;
            Ok(EXIT_OK)
        }
        Command::Solve(a) => {
            let inst = read_instance(&a.input)?;
            let opts = a.flags.options();
            let kind = ModelKind::from(a.model);
            let baselines = if kind.needs_baselines() {
                if kind == ModelKind::Ocu && inst.chains().len() < 2 {
                    return Err(Error::ChainCount(inst.chains().len()));
                }
                Some(compute_baselines(&inst, &opts)?.values().to_vec())
            } else {
                None
            };
            let model = build_model(&inst, kind, baselines.as_deref(), &opts)?;
            let sol = solve_milp(&model)?;
            let report = SolveReport::new(&inst, kind, &opts, &sol, baselines.as_deref());
            emit(a.output.as_deref(), &to_json(&report)?)?;
            Ok(if sol.is_optimal() { EXIT_OK } else { EXIT_REFUTED })
        }
        Command::Regret(a) => {
            let kind = ModelKind::from(a.model);
            if !kind.needs_baselines() {
                return Err(Error::InvalidModel("regret needs --model ccu or ocu".into()));
            }
            let inst = read_instance(&a.input)?;
            let opts = a.flags.options();
            if kind == ModelKind::Ocu && inst.chains().len() < 2 {
                return Err(Error::ChainCount(inst.chains().len()));
            }
            let baselines = compute_baselines(&inst, &opts)?;
            let r = solve_regret_with(&inst, kind, baselines, &opts)?;
            emit(a.output.as_deref(), &to_json(&RegretReport::new(&r))?)?;
            Ok(if r.is_optimal() { EXIT_OK } else { EXIT_REFUTED })
        }
        Command::Verify(a) => {
            let claim = ClaimId::from(a.claim);
            let opts = a.flags.options();
            match &a.input {
                Some(path) => {
                    let report = check_claim(claim, &read_instance(path)?, &opts)?;
                    emit(a.output.as_deref(), &to_json(&report)?)?;
                    Ok(match report.verdict {
                        Verdict::Counterexample => EXIT_REFUTED,
                        _ => EXIT_OK,
                    })
                }
                None => {
                    let summary = run_sweep(&[claim], a.seed, a.trials, &opts)?;
                    emit(a.output.as_deref(), &summary.to_csv()?)?;
                    Ok(sweep_exit(&summary))
                }
            }
        }
        Command::Sweep(a) => {
            let summary = run_sweep(&ClaimId::ALL, a.seed, a.trials, &a.flags.options())?;
            let csv = summary.to_csv()?;
            let tally = to_json(&summary)?;
            match &a.output {
                Some(path) => {
                    write_atomic(path, &csv)?;
                    emit(a.summary.as_deref(), &tally)?;
                }
                None => {
                    print!("{csv}");
                    if let Some(path) = &a.summary {
                        write_atomic(path, &tally)?;
                    }
                }
            }
            Ok(sweep_exit(&summary))
        }
    }
}

fn sweep_exit(summary: &SweepSummary) -> i32 {
    let t = summary.tally.values();
    if t.clone().any(|t| t.errors > 0) {
        EXIT_ERROR
    } else if t.clone().any(|t| t.counterexample > 0) {
        EXIT_REFUTED
    } else {
        EXIT_OK
    }
}
