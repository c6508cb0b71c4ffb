//! `qtv`: runs the verification suites and writes reports.

mod render;
mod suites;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use qtv_core::Tolerances;

use render::Format;
use suites::{BasisName, Ctx, Protocol, Report};

#[derive(Parser, Debug)]
#[command(
    name = "qtv",
    version,
    about = "Verify seven-qubit teleportation and state-sharing protocols"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Seed for the random trial inputs.
    #[arg(long, global = true, default_value_t = 7)]
    seed: u64,
    /// Random inputs per protocol run.
    #[arg(long, global = true, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
    trials: u64,
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Max pairwise overlap in an orthonormal family [1e-10].
    #[arg(long, global = true)]
    tol_orthonormality: Option<f64>,
    /// A state counts as recovered when fidelity >= 1 - this [1e-9].
    #[arg(long, global = true)]
    tol_fidelity: Option<f64>,
    /// Allowed deviation of a probability sum [1e-12].
    #[arg(long, global = true)]
    tol_probability_sum: Option<f64>,
    /// Outcomes below this probability are treated as impossible [1e-14].
    #[arg(long, global = true)]
    tol_zero_probability: Option<f64>,
    /// Singular values at or below this count as zero [1e-9].
    #[arg(long, global = true)]
    tol_rank: Option<f64>,
    /// Eigenvalues below this are dropped from entropies [1e-12].
    #[arg(long, global = true)]
    tol_eigenvalue_floor: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Majority-vote reconstruction of the channel.
    Channel {
        #[command(subcommand)]
        action: ChannelAction,
    },
    /// Run a protocol over seeded random inputs.
    Verify {
        #[arg(value_enum)]
        protocol: Protocol,
        /// Report file (stdout when absent).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Derive a correction table and diff it against the printed one.
    Derive {
        #[arg(value_enum)]
        what: DeriveWhat,
        #[arg(value_enum)]
        protocol: Protocol,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Orthonormality and completeness of a measurement family.
    Check {
        #[arg(value_enum)]
        what: CheckWhat,
        #[arg(value_enum)]
        name: BasisName,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Completeness of the three-qubit decomposition.
    Appendix2 {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Entropy of every bipartition.
    Entanglement {
        /// State file to audit instead of the channel.
        #[arg(long)]
        state: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Preparation circuit for a state file.
    Synth {
        statefile: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Every suite in a fixed order.
    All {
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
enum ChannelAction {
    Reconstruct {
        /// Where to write the reconstructed state file; the report goes to
        /// stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum DeriveWhat {
    Corrections,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum CheckWhat {
    Basis,
}

fn tolerances(a: &RunArgs) -> Result<Tolerances> {
    let mut t = Tolerances::default();
    let set = |slot: &mut f64, v: Option<f64>| {
        if let Some(v) = v {
            *slot = v;
        }
    };
    set(&mut t.orthonormality, a.tol_orthonormality);
    set(&mut t.fidelity, a.tol_fidelity);
    set(&mut t.probability_sum, a.tol_probability_sum);
    set(&mut t.zero_probability, a.tol_zero_probability);
    set(&mut t.rank, a.tol_rank);
    set(&mut t.eigenvalue_floor, a.tol_eigenvalue_floor);
    t.validate()?;
    Ok(t)
}

fn emit(report: &Report, format: Format, out: Option<&PathBuf>) -> Result<()> {
    let text = render::render(report, format)?;
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<u8> {
    let ctx = Ctx {
        seed: cli.run.seed,
        trials: cli.run.trials as usize,
        tol: tolerances(&cli.run)?,
    };
    let (report, out) = match &cli.command {
        Command::Channel {
            action: ChannelAction::Reconstruct { out },
        } => {
            let (report, state) = suites::channel_reconstruct(&ctx)?;
            if let Some(p) = out {
                fs::write(p, state).with_context(|| format!("cannot write {}", p.display()))?;
            }
            (report, None)
        }
        Command::Verify { protocol, out } => {
            (suites::verify_protocol(&ctx, *protocol)?, out.as_ref())
        }
        Command::Derive {
            what: DeriveWhat::Corrections,
            protocol,
            out,
        } => (suites::derive_corrections(&ctx, *protocol)?, out.as_ref()),
        Command::Check {
            what: CheckWhat::Basis,
            name,
            out,
        } => (suites::check_basis(&ctx, *name)?, out.as_ref()),
        Command::Appendix2 { out } => (suites::appendix2(&ctx)?, out.as_ref()),
        Command::Entanglement { state, out } => {
            let text = state
                .as_ref()
                .map(|p| {
                    fs::read_to_string(p).with_context(|| format!("cannot read {}", p.display()))
                })
                .transpose()?;
            (suites::entanglement(&ctx, text.as_deref())?, out.as_ref())
        }
        Command::Synth { statefile, out } => {
            let text = fs::read_to_string(statefile)
                .with_context(|| format!("cannot read {}", statefile.display()))?;
            (suites::synth(&ctx, &text)?, out.as_ref())
        }
        Command::All { out } => (suites::all(&ctx)?, out.as_ref()),
    };
    emit(&report, cli.run.format, out)?;
    Ok(report.exit_code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("qtv: {e:#}");
            ExitCode::from(2)
        }
    }
}
