use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use cs_forge::analysis::DEFAULT_OVERSAMPLE;
use cs_forge::encoder::SeedPair;
use cs_forge::qam::{Rule, DEFAULT_ENUM_LIMIT};
use cs_forge_cli::commands::{self, EnumerateArgs};
use cs_forge_cli::error::{CliError, CliResult};
use cs_forge_cli::records::{emit, read_json, VerifyInput};
use cs_forge_cli::simulate::{simulate, Codebook, EbN0};
use cs_forge_cli::source::{SeedArgs, SourceArgs};
use serde::Serialize;

/// Encode, verify and analyse complementary sequences.
#[derive(Parser)]
#[command(name = "cs-forge", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Oversampling factor for envelope power
    #[arg(long, default_value_t = DEFAULT_OVERSAMPLE)]
    oversample: usize,
    /// Output file (standard output when omitted)
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct Guard {
    /// Largest enumeration allowed
    #[arg(long, env = "CS_FORGE_MAX_ENUM", default_value_t = DEFAULT_ENUM_LIMIT)]
    max_enum: u128,
}

#[derive(Subcommand)]
enum Command {
    /// Encode a complementary pair and print it as JSON records
    Encode {
        #[command(flatten)]
        source: SourceArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Check complementarity, PAPR, alphabet and layout of stored sequences
    Verify {
        /// Records written by `encode`, or a pair `{"a": .., "b": ..}`
        file: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Count the sequences of the QAM rules, optionally by exhaustive dedup
    Enumerate {
        /// One rule; all rules and their total when omitted
        #[arg(long)]
        rule: Option<String>,
        #[arg(long = "s", default_value_t = 1)]
        s: u32,
        #[arg(long = "m", default_value_t = 3)]
        m: usize,
        /// Seed length N
        #[arg(long = "n", default_value_t = 1)]
        n: usize,
        /// Encode every combination and count distinct sequences
        #[arg(long)]
        dedup: bool,
        #[command(flatten)]
        seed: SeedArgs,
        #[command(flatten)]
        guard: Guard,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Oversampled PAPR; `--out` receives the power trace as CSV
    Papr {
        #[command(flatten)]
        source: SourceArgs,
        /// Take the first record of a file instead of encoding
        #[arg(long, value_name = "FILE", conflicts_with_all = ["params", "rule"])]
        input: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Bit error rate of a codebook under AWGN with minimum-distance decoding
    Simulate {
        /// Codebook from a rule family
        #[arg(long)]
        rule: Option<String>,
        #[arg(long = "s", default_value_t = 1)]
        s: u32,
        #[arg(long = "m", default_value_t = 2)]
        m: usize,
        /// Keep only this variable order
        #[arg(long, value_delimiter = ',')]
        pi: Vec<usize>,
        /// Codebook from the records of a file
        #[arg(long, value_name = "FILE", conflicts_with = "rule")]
        codebook: Option<PathBuf>,
        /// Eb/N0 values in dB; `inf` for a noiseless channel
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "0")]
        ebn0: Vec<EbN0>,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        rng_seed: u64,
        #[command(flatten)]
        seed: SeedArgs,
        #[command(flatten)]
        guard: Guard,
        #[command(flatten)]
        common: Common,
    },
}

fn to_json<T: Serialize>(value: &T) -> CliResult<String> {
    Ok(serde_json::to_string_pretty(value)?)
}

fn run(cli: Cli) -> CliResult<u8> {
    match cli.command {
        Command::Encode { source, common } => {
            let resolved = source.resolve()?;
            let records = commands::encode(&resolved.params, resolved.rule, common.oversample)?;
            emit(&to_json(&records)?, common.out.as_deref())?;
            Ok(0)
        }
        Command::Verify { file, common } => {
            let report = commands::verify(&file, common.oversample)?;
            emit(&to_json(&report)?, common.out.as_deref())?;
            Ok(commands::verify_status(&report))
        }
        Command::Enumerate {
            rule,
            s,
            m,
            n,
            dedup,
            seed,
            guard,
            out,
        } => {
            let args = EnumerateArgs {
                rule: rule.map(|r| r.parse::<Rule>()).transpose()?,
                s,
                m,
                n,
                dedup,
                seed: seed.resolve()?,
                limit: guard.max_enum,
            };
            let report = commands::enumerate(&args)?;
            emit(&to_json(&report)?, out.as_deref())?;
            Ok(if report.all_match() { 0 } else { cs_forge_cli::error::EXIT_VERIFY })
        }
        Command::Papr {
            source,
            input,
            common,
        } => {
            let c = match input {
                Some(path) => match read_json::<VerifyInput>(&path)? {
                    VerifyInput::Records(r) => r
                        .first()
                        .ok_or_else(|| CliError::invalid("no records in file"))?
                        .values
                        .to_seq()?,
                    VerifyInput::Record(r) => r.values.to_seq()?,
                    VerifyInput::Pair(p) => p.a.to_seq()?,
                },
                None => cs_forge::encoder::encode_pair(&source.resolve()?.params)?.c,
            };
            let (report, csv) = commands::papr(&c, common.oversample)?;
            if let Some(path) = &common.out {
                emit(&csv, Some(path))?;
            }
            println!("{}", to_json(&report)?);
            Ok(0)
        }
        Command::Simulate {
            rule,
            s,
            m,
            pi,
            codebook,
            ebn0,
            trials,
            rng_seed,
            seed,
            guard,
            common,
        } => {
            commands::check_oversample(common.oversample)?;
            let book = match (codebook, rule) {
                (Some(path), _) => {
                    let entries = match read_json::<VerifyInput>(&path)? {
                        VerifyInput::Records(r) => r
                            .iter()
                            .map(|r| r.values.to_seq())
                            .collect::<CliResult<Vec<_>>>()?,
                        VerifyInput::Record(r) => vec![r.values.to_seq()?],
                        VerifyInput::Pair(p) => vec![p.a.to_seq()?, p.b.to_seq()?],
                    };
                    Codebook::new(entries)?
                }
                (None, Some(rule)) => {
                    let seed = seed.resolve()?.unwrap_or_else(SeedPair::trivial);
                    let pi = (!pi.is_empty()).then_some(pi.as_slice());
                    Codebook::from_rule(rule.parse()?, s, m, pi, &seed, guard.max_enum)?
                }
                (None, None) => {
                    return Err(CliError::invalid("simulate needs --rule or --codebook"))
                }
            };
            let report = simulate(&book, &ebn0, trials, rng_seed, common.oversample)?;
            emit(&to_json(&report)?, common.out.as_deref())?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { cs_forge_cli::error::EXIT_INVALID } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code)
        }
    }
}
