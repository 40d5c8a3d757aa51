//! `boardforge`: evolve, evaluate and analyse board games from the shell.

mod commands;
mod error;

use std::net::IpAddr;
use std::path::PathBuf;
use std::process::ExitCode;

use boardforge::agents::AgentKind;
use boardforge::analysis::{Coding, DEFAULT_ALPHA, DIVERSITY_THRESHOLD};
use clap::{Args, Parser, Subcommand};

use error::CliError;

#[derive(Parser)]
#[command(
    name = "boardforge",
    version,
    about = "Evolve and analyse two-player board games"
)]
struct Cli {
    /// Worker threads for playouts (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

/// A rule set given either as a chromosome file or a bundled fixture id.
#[derive(Args, Clone)]
#[group(required = true, multiple = false)]
pub struct GameSource {
    /// File holding 50 comma-separated genes.
    #[arg(long)]
    chromosome: Option<PathBuf>,
    /// Bundled game: game1, game2, game3 or random.
    #[arg(long)]
    fixture: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the family-based evolution and write archive.tsv and trace.jsonl.
    Evolve {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        iterations: u32,
        #[arg(long, default_value_t = 10)]
        families: usize,
        /// Playouts per metric batch.
        #[arg(long, default_value_t = 20)]
        playouts: usize,
        #[arg(long, default_value_t = 0.3)]
        mutation_rate: f64,
        /// Rank weights for duration, intelligence, dynamism, usability.
        #[arg(long, value_delimiter = ',', default_values_t = [1.0, 1.0, 1.0, 1.0])]
        weights: Vec<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compute the metrics vector of one game.
    Eval {
        #[command(flatten)]
        game: GameSource,
        #[arg(long, default_value_t = 20)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Play games between two agents and print one match record per line.
    Simulate {
        #[command(flatten)]
        game: GameSource,
        #[arg(long, default_value_t = 1)]
        games: usize,
        /// Agents for player One and player Two.
        #[arg(long, value_delimiter = ',', default_values_t = [AgentKind::Random, AgentKind::Random])]
        agents: Vec<AgentKind>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write records here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Diversity counts over an archive and the most diverse games.
    Diversity {
        /// Archive directory or archive.tsv file.
        #[arg(long)]
        archive: PathBuf,
        #[arg(long, default_value_t = DIVERSITY_THRESHOLD)]
        threshold: f64,
        #[arg(long, default_value_t = 3)]
        select: usize,
    },
    /// Coevolve neural players on each game and compare iteration counts.
    Learnability {
        /// Fixture ids or chromosome files.
        #[arg(long, value_delimiter = ',', default_values_t = ["game1".to_string(), "game2".to_string(), "game3".to_string(), "random".to_string()])]
        games: Vec<String>,
        /// TOML file with coevolution settings and seeds.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Game the others are compared against (default: random, when listed).
        #[arg(long)]
        baseline: Option<String>,
    },
    /// Correlation and p-value per game from a ratings file.
    SurveyStats {
        #[arg(long)]
        ratings: PathBuf,
        #[arg(long, default_value_t = DEFAULT_ALPHA)]
        alpha: f64,
        #[arg(long, default_value = "signed")]
        coding: Coding,
        /// Monte Carlo draws when exact enumeration is too large.
        #[arg(long, default_value_t = boardforge::analysis::survey::DEFAULT_TRIALS)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Start the HTTP service.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: IpAddr,
        #[arg(long)]
        archive: Option<PathBuf>,
        #[arg(long, default_value = "ratings.jsonl")]
        ratings: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Render a trace and/or archive as text.
    Report {
        #[arg(long, required_unless_present = "archive")]
        trace: Option<PathBuf>,
        #[arg(long)]
        archive: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        error::ensure(n >= 1, || "--threads must be at least 1".into())?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Runtime(e.to_string()))?;
    }
    let mut out = std::io::stdout().lock();
    match cli.command {
        Command::Evolve {
            seed,
            iterations,
            families,
            playouts,
            mutation_rate,
            weights,
            out: dir,
        } => {
            error::ensure(weights.len() == 4, || {
                "--weights takes four comma-separated values".into()
            })?;
            let config = boardforge::evolve::EvolutionConfig {
                families,
                iterations,
                playouts,
                mutation_rate,
                weights: [weights[0], weights[1], weights[2], weights[3]],
                seed,
            };
            commands::evolve(&config, &dir, &mut out)
        }
        Command::Eval { game, n, seed } => commands::eval(&game, n, seed, &mut out),
        Command::Simulate {
            game,
            games,
            agents,
            seed,
            out: file,
        } => {
            error::ensure(agents.len() == 2, || {
                "--agents takes two agents, for player One and player Two".into()
            })?;
            commands::simulate(
                &game,
                games,
                [agents[0], agents[1]],
                seed,
                file.as_deref(),
                &mut out,
            )
        }
        Command::Diversity {
            archive,
            threshold,
            select,
        } => commands::diversity(&archive, threshold, select, &mut out),
        Command::Learnability {
            games,
            config,
            baseline,
        } => commands::learnability(&games, config.as_deref(), baseline.as_deref(), &mut out),
        Command::SurveyStats {
            ratings,
            alpha,
            coding,
            trials,
            seed,
        } => commands::survey_stats(&ratings, alpha, coding, trials, seed, &mut out),
        Command::Serve {
            port,
            host,
            archive,
            ratings,
            seed,
        } => {
            let config = boardforge_service::ServiceConfig {
                archive,
                ratings_path: ratings,
                seed,
            };
            let runtime =
                tokio::runtime::Runtime::new().map_err(|e| CliError::Runtime(e.to_string()))?;
            runtime
                .block_on(boardforge_service::serve(&config, (host, port).into()))
                .map_err(|e| match e {
                    boardforge_service::ServeError::Startup(s) => {
                        CliError::Validation(s.to_string())
                    }
                    other => CliError::Runtime(other.to_string()),
                })
        }
        Command::Report { trace, archive } => {
            commands::report(trace.as_deref(), archive.as_deref(), &mut out)
        }
    }
}
