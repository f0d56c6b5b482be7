//! `kzlie` command-line interface.
//!
//! Every subcommand prints one JSON document on standard output. Exit codes:
//! 0 success, 1 failed check, 2 usage or input error, 3 resource limit,
//! 4 accuracy not reached.

mod checks;
mod commands;
mod config;
mod error;
mod parse;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{BraidArgs, PbwMode, Report, VolterraArgs};
use config::RunConfig;
use error::CliError;

#[derive(Parser)]
#[command(name = "kzlie", version, about = "Shuffle algebras, Lyndon bases, braid quotients and Chen-series numerics")]
struct Cli {
    /// JSON run configuration; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Emit JSON (the only output mode; accepted for scripts).
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Lyndon words up to a length, in increasing order.
    Lyndon {
        #[arg(long, default_value = "x0,x1")]
        alphabet: String,
        #[arg(long)]
        max_len: Option<usize>,
    },
    /// Shuffle product of two words or polynomial files (`@file.json`).
    Shuffle {
        #[arg(long, default_value = "x0,x1")]
        alphabet: String,
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
    },
    /// Half-shuffle product.
    Halfshuffle {
        #[arg(long, default_value = "x0,x1")]
        alphabet: String,
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
    },
    /// PBW basis elements, decompositions and MRS factorizations.
    Pbw {
        #[arg(long, default_value = "x0,x1")]
        alphabet: String,
        #[arg(long)]
        cap: Option<usize>,
        /// Print `P_w` and `S_w`.
        #[arg(long, conflicts_with_all = ["decompose", "mrs"])]
        word: Option<String>,
        /// Coefficients on the PBW basis of a polynomial.
        #[arg(long, conflicts_with = "mrs")]
        decompose: Option<String>,
        /// Lyndon exponents of a grouplike polynomial.
        #[arg(long)]
        mrs: Option<String>,
    },
    /// Projection of a word onto the free Lie algebra.
    Pi1 {
        #[arg(long, default_value = "x0,x1")]
        alphabet: String,
        #[arg(long)]
        word: String,
    },
    /// Diagonal-series identities.
    Diagonal {
        #[arg(long, value_parser = ["mrs", "log", "split"])]
        check: String,
        #[arg(long, default_value = "x0,x1")]
        alphabet: String,
        /// Braid alphabet on `n` points (required for `split`).
        #[arg(long)]
        n: Option<u32>,
        #[arg(long)]
        cap: Option<usize>,
    },
    /// Quotient of the free Lie algebra by the braid ideal.
    Braid {
        #[arg(long, default_value_t = 3)]
        n: u32,
        #[arg(long, default_value = "R")]
        variant: String,
        #[arg(long)]
        cap: Option<usize>,
        #[arg(long, default_value = "dims", value_parser = ["dims", "central", "flat"])]
        check: String,
        #[arg(long, default_value_t = 5)]
        samples: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Chen series of the KZ forms along a path.
    Chen {
        #[arg(long, default_value_t = 3)]
        n: u32,
        /// JSON `{"waypoints": [[[re, im], ...], ...]}`.
        #[arg(long)]
        path: Option<PathBuf>,
        #[arg(long)]
        cap: Option<usize>,
        /// Factor multiplying every form.
        #[arg(long, default_value = "1")]
        scale: String,
    },
    /// Multiple polylogarithm of a word over x0, x1.
    Li {
        #[arg(long)]
        word: String,
        #[arg(long)]
        z: String,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Hyperlogarithm with singularities `0, a1, ..., aN`.
    Hyperlog {
        #[arg(long)]
        sing: String,
        #[arg(long)]
        word: String,
        #[arg(long)]
        z: String,
        #[arg(long)]
        path: Option<PathBuf>,
    },
    /// Volterra expansion of the KZ Chen series around a base sub-alphabet.
    Volterra {
        #[arg(long, default_value_t = 3)]
        n: u32,
        /// `T<n>` or comma-separated base letters such as `t12`.
        #[arg(long, default_value = "T3")]
        split: String,
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[arg(long)]
        path: Option<PathBuf>,
        #[arg(long, default_value = "0.5")]
        scale: String,
        /// Use the abelianized base factor.
        #[arg(long)]
        abelian: bool,
    },
    /// Check the three-point KZ solution modulo the braid ideal.
    Kz3 {
        #[arg(long)]
        verify: bool,
        #[arg(long)]
        cap: Option<usize>,
        #[arg(long, default_value = "consistent")]
        variant: String,
        /// JSON array of `[[re, im], [re, im], [re, im]]` points.
        #[arg(long)]
        samples: Option<PathBuf>,
    },
    /// Exact check of the four-point connection in cubic coordinates.
    Kz4 {
        #[arg(long)]
        connection_check: bool,
    },
    /// Run the whole acceptance suite.
    Checkall {
        #[arg(long, default_value = "fast", value_parser = ["fast", "full"])]
        profile: String,
    },
}

fn dispatch(cli: Cli) -> Result<Report, CliError> {
    let cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    match cli.cmd {
        Cmd::Lyndon { alphabet, max_len } => commands::lyndon(&cfg, &alphabet, max_len),
        Cmd::Shuffle { alphabet, left, right } => commands::shuffle(&alphabet, &left, &right, false),
        Cmd::Halfshuffle { alphabet, left, right } => commands::shuffle(&alphabet, &left, &right, true),
        Cmd::Pbw { alphabet, cap, word, decompose, mrs } => {
            let mode = match (word, decompose, mrs) {
                (Some(w), _, _) => PbwMode::Word(w),
                (_, Some(d), _) => PbwMode::Decompose(d),
                (_, _, Some(m)) => PbwMode::Mrs(m),
                _ => return Err(CliError::Usage("pbw needs one of --word, --decompose, --mrs".into())),
            };
            commands::pbw(&cfg, &alphabet, cap, mode)
        }
        Cmd::Pi1 { alphabet, word } => commands::pi1(&alphabet, &word),
        Cmd::Diagonal { check, alphabet, n, cap } => commands::diagonal(&cfg, &check, &alphabet, n, cap),
        Cmd::Braid { n, variant, cap, check, samples, seed } => {
            commands::braid(&cfg, BraidArgs { n, variant, cap, check, samples, seed })
        }
        Cmd::Chen { n, path, cap, scale } => commands::chen(&cfg, n, path.as_ref(), cap, &scale),
        Cmd::Li { word, z, tol } => commands::li(&cfg, &word, &z, tol),
        Cmd::Hyperlog { sing, word, z, path } => commands::hyperlog(&cfg, &sing, &word, &z, path.as_ref()),
        Cmd::Volterra { n, split, k, path, scale, abelian } => {
            commands::volterra(&cfg, VolterraArgs { n, split, k, path, scale, abelian })
        }
        Cmd::Kz3 { verify, cap, variant, samples } => {
            if !verify {
                return Err(CliError::Usage("kz3 needs --verify".into()));
            }
            commands::kz3(&cfg, cap, &variant, samples.as_ref())
        }
        Cmd::Kz4 { connection_check } => {
            if !connection_check {
                return Err(CliError::Usage("kz4 needs --connection-check".into()));
            }
            commands::kz4()
        }
        Cmd::Checkall { profile } => {
            let profile = checks::Profile::parse(&profile).expect("validated by clap");
            let (value, failing) = checks::run(profile, &cfg.quad());
            Ok(Report { value, ok: failing.is_empty() })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(report) => {
            println!("{}", serde_json::to_string_pretty(&report.value).expect("serializable"));
            if report.ok {
                ExitCode::SUCCESS
            } else {
                eprintln!("check failed");
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
