//! Command-line interface.
//!
//! Exit status: 0 on success, 1 when the invocation or config is invalid,
//! 2 when the work itself fails.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::designs::{design_report, haar_statistics};
use crate::ensembles::sample_haar_state;
use crate::error::Error;
use crate::experiments::{format_g17, run_to_dir, ExperimentConfig, RunOptions};
use crate::linalg::{DimensionSpec, PureState};
use crate::projected::build_projected_ensemble;
use crate::rmt::{bessel_zero_times, sample_gue};
use crate::weingarten::{cycle_type_label, weingarten_table};

#[derive(Debug, Parser)]
#[command(name = "projdesign", version, about = "Projected-ensemble design experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run an experiment from a TOML config.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; overrides `output_dir` in the config.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides `seed` in the config.
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads, 0 for one per core.
        #[arg(long, default_value_t = 0)]
        threads: usize,
        #[arg(long)]
        quiet: bool,
    },
    /// Print the first positive times t with J1(2t) = 0.
    BesselRoots {
        #[arg(long)]
        count: usize,
    },
    /// Print the Weingarten function of S_q at dimension N as CSV.
    WgTable {
        #[arg(long)]
        q: usize,
        #[arg(long)]
        n: usize,
    },
    /// Design metrics of one projected ensemble.
    Report {
        #[arg(long)]
        na: u32,
        #[arg(long)]
        nb: u32,
        #[arg(long)]
        k: usize,
        #[arg(long, value_enum, default_value_t = Source::Gue)]
        state: Source,
        /// Evolution time for `--state gue`; defaults to the first Bessel root.
        #[arg(long)]
        t: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also compute the exact trace distance to the Haar moment.
        #[arg(long)]
        l1: bool,
    },
    /// Closed-form projected statistics of Haar-random states.
    HaarStats {
        #[arg(long)]
        na: u32,
        #[arg(long)]
        nb: u32,
        #[arg(long)]
        k: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Source {
    /// `e^{-iGt}|0…0⟩` with `G` from the GUE.
    Gue,
    /// A Haar-random global state.
    Haar,
    /// Bell pairs between `A` and `B` (needs `na = nb`).
    Bell,
}

/// A failed command and its exit status.
#[derive(Debug)]
pub enum Failure {
    Invalid(String),
    Runtime(String),
}

impl Failure {
    pub fn code(&self) -> i32 {
        match self {
            Failure::Invalid(_) => 1,
            Failure::Runtime(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Invalid(m) | Failure::Runtime(m) => m,
        }
    }
}

fn invalid(e: Error) -> Failure {
    Failure::Invalid(e.to_string())
}

/// Errors raised while checking inputs are validation failures; anything
/// else is a runtime failure.
fn classify(e: Error) -> Failure {
    match e {
        Error::Config(_)
        | Error::InvalidArgument(_)
        | Error::InvalidDimensions(_)
        | Error::GuardExceeded(_)
        | Error::SingularGram { .. } => Failure::Invalid(e.to_string()),
        _ => Failure::Runtime(e.to_string()),
    }
}

/// Parses `args` (program name first), runs the command, and returns the
/// exit status. Diagnostics go to `err` as a single line.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return 0;
            }
            let text = e.to_string();
            let line = text.lines().find(|l| !l.trim().is_empty()).unwrap_or("invalid arguments");
            let _ = writeln!(err, "{line}");
            return 1;
        }
    };
    match dispatch(cli.command, out) {
        Ok(()) => 0,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message().replace('\n', " "));
            f.code()
        }
    }
}

pub fn dispatch(command: Command, out: &mut dyn Write) -> Result<(), Failure> {
    let io = |e: std::io::Error| Failure::Runtime(format!("cannot write output: {e}"));
    match command {
        Command::Run {
            config,
            out: out_dir,
            seed,
            threads,
            quiet,
        } => {
            let mut cfg = ExperimentConfig::from_path(&config).map_err(invalid)?;
            if let Some(dir) = out_dir {
                cfg.output_dir = dir;
            }
            if let Some(seed) = seed {
                cfg.seed = seed;
            }
            cfg.validate().map_err(invalid)?;
            let result = run_to_dir(&cfg, &RunOptions { threads, quiet }).map_err(|e| match e {
                Error::Config(_) => invalid(e),
                e => Failure::Runtime(e.to_string()),
            })?;
            let s = &result.summary;
            if !quiet {
                let passed = s.checks.iter().filter(|c| c.passed).count();
                writeln!(
                    out,
                    "{}\trecords={}\tfailures={}\tchecks_passed={}/{}\toutput={}",
                    s.experiment,
                    result.records.len(),
                    s.failures.len(),
                    passed,
                    s.checks.len(),
                    cfg.output_dir.display()
                )
                .map_err(io)?;
            }
            if s.run_failed {
                return Err(Failure::Runtime(format!(
                    "{} of {} records failed, above the allowed fraction {}",
                    s.failures.len(),
                    result.records.len(),
                    s.thresholds.max_failure_fraction
                )));
            }
            Ok(())
        }
        Command::BesselRoots { count } => {
            if count == 0 {
                return Err(Failure::Invalid("--count must be at least 1".into()));
            }
            for t in bessel_zero_times(count) {
                writeln!(out, "{}", format_g17(t)).map_err(io)?;
            }
            Ok(())
        }
        Command::WgTable { q, n } => {
            let table = weingarten_table(q, n).map_err(classify)?;
            writeln!(out, "q,N,cycle_type,value").map_err(io)?;
            for (class, v) in table.classes().iter().zip(table.values()) {
                writeln!(out, "{q},{n},{},{}", cycle_type_label(class), format_g17(*v)).map_err(io)?;
            }
            Ok(())
        }
        Command::Report {
            na,
            nb,
            k,
            state,
            t,
            seed,
            l1,
        } => {
            let dims = DimensionSpec::new(na, nb).map_err(classify)?;
            if k == 0 {
                return Err(Failure::Invalid("--k must be at least 1".into()));
            }
            let n = dims.dim();
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            let psi = match state {
                Source::Haar => sample_haar_state(n, &mut rng).map_err(classify)?,
                Source::Gue => {
                    let t = t.unwrap_or_else(|| bessel_zero_times(1)[0]);
                    let g = sample_gue(n, &mut rng).map_err(classify)?;
                    g.decomposition()
                        .evolve(t, &PureState::basis(n, 0).map_err(classify)?)
                        .map_err(classify)?
                }
                Source::Bell => bell_pairs(dims).map_err(classify)?,
            };
            let ens = build_projected_ensemble(&psi, dims).map_err(classify)?;
            let rep = design_report(&ens, k, l1).map_err(classify)?;
            let rows = [
                ("f_k", Some(rep.frame_potential)),
                ("f_haar", Some(rep.haar_frame_potential)),
                ("delta", Some(rep.delta)),
                ("delta_sq", Some(rep.delta_sq())),
                ("l1_exact", rep.l1_exact),
                ("outcomes", Some(ens.len() as f64)),
            ];
            for (name, v) in rows {
                if let Some(v) = v {
                    writeln!(out, "{name}\t{}", format_g17(v)).map_err(io)?;
                }
            }
            Ok(())
        }
        Command::HaarStats { na, nb, k } => {
            let hs = haar_statistics(na, nb, k).map_err(classify)?;
            let rows = [
                ("mu_k", hs.mu_k),
                ("overlap_moment", hs.overlap_moment),
                ("jensen_gap", hs.jensen_gap_bound),
                ("r_k", hs.r_k),
                ("delta_gap", hs.delta_gap),
            ];
            for (name, v) in rows {
                writeln!(out, "{name}\t{}", format_g17(v)).map_err(io)?;
            }
            Ok(())
        }
    }
}

/// `⊗_i (|00⟩ + |11⟩)/√2` pairing qubit `i` of `A` with qubit `i` of `B`.
fn bell_pairs(dims: DimensionSpec) -> crate::Result<PureState> {
    if dims.n_a != dims.n_b {
        return Err(Error::InvalidDimensions(format!(
            "Bell pairs need n_a = n_b, got {} and {}",
            dims.n_a, dims.n_b
        )));
    }
    let mut amps = vec![crate::linalg::C64::new(0.0, 0.0); dims.dim()];
    for a in 0..dims.dim_a() {
        amps[a * dims.dim_b() + a] = crate::linalg::C64::new(1.0, 0.0);
    }
    PureState::from_unnormalized(amps)
}
