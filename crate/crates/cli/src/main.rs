mod commands;
mod table;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "prefclust", version, about = "Pick one nearby venue per preference class")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum Style {
    Osm,
    Terrain,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum Backend {
    Live,
    Fixture,
}

impl Backend {
    fn as_str(self) -> &'static str {
        match self {
            Backend::Live => "live",
            Backend::Fixture => "fixture",
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Cluster a tree file and print the optimization matrix.
    Cluster(ClusterArgs),
    /// Query the venue backend and write a tree CSV.
    Fetch(FetchArgs),
    /// Run the HTTP service until interrupted.
    Serve(ServeArgs),
}

#[derive(clap::Args)]
pub struct ClusterArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Defaults to json for `.json` files, csv otherwise.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub geojson: Option<PathBuf>,
    #[arg(long)]
    pub html: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "osm")]
    pub style: Style,
    /// Send the tree to a running service instead of clustering in-process.
    #[arg(long, env = "PREFCLUST_SERVER")]
    pub server: Option<String>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(clap::Args)]
pub struct FetchArgs {
    /// Place name, or `lat,lon`.
    #[arg(long)]
    pub place: String,
    #[arg(long)]
    pub radius_km: f64,
    /// Comma-separated, in priority order.
    #[arg(long, value_delimiter = ',', required = true)]
    pub prefs: Vec<String>,
    #[arg(long, default_value_t = prefclust_core::provider::DEFAULT_LIMIT_PER_CLASS)]
    pub limit: usize,
    #[arg(long, value_enum)]
    pub backend: Option<Backend>,
    #[arg(long)]
    pub fixtures: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(clap::Args)]
pub struct ServeArgs {
    #[arg(long)]
    pub listen: Option<String>,
    #[arg(long, value_enum)]
    pub backend: Option<Backend>,
    #[arg(long)]
    pub fixtures: Option<PathBuf>,
    #[arg(long)]
    pub webui_dir: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// How a command failed; decides the exit status.
#[derive(Debug)]
pub enum Failure {
    Io(String),
    Validation(String),
    Provider(String),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Io(_) => 1,
            Failure::Validation(_) => 2,
            Failure::Provider(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Io(m) | Failure::Validation(m) | Failure::Provider(m) => m,
        }
    }
}

fn init_logging(default: &str) {
    let filter = tracing_subscriber::EnvFilter::try_from_default_env()
        .unwrap_or_else(|_| tracing_subscriber::EnvFilter::new(default));
    tracing_subscriber::fmt().with_env_filter(filter).with_writer(std::io::stderr).init();
}

#[tokio::main]
async fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Cluster(args) => {
            init_logging("warn");
            commands::cluster(args).await
        }
        Command::Fetch(args) => {
            init_logging("warn");
            commands::fetch(args).await
        }
        Command::Serve(args) => {
            init_logging("info");
            commands::serve(args).await
        }
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            let one_line = failure.message().split_whitespace().collect::<Vec<_>>().join(" ");
            eprintln!("error: {one_line}");
            ExitCode::from(failure.exit_code())
        }
    }
}
