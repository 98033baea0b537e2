use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use logtrop_cli::commands::{self, Options};
use logtrop_cli::{table, CliError, Outcome};

#[derive(Parser)]
#[command(name = "logtrop", version, about = "Exact tropical combinatorics of logarithmic degenerations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Add the intermediate quantities to the report
    #[arg(long, global = true)]
    explain: bool,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long, global = true)]
    max_vertices: Option<usize>,
    #[arg(long, global = true)]
    max_edges: Option<usize>,
    /// Bound on each coordinate of an edge contact order
    #[arg(long, global = true)]
    max_u: Option<u32>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Subcommand)]
enum Command {
    /// Check a cone complex: faces, saturation, simplicity, and its slice
    ValidateComplex { complex: PathBuf },
    /// Check that positions and lengths define a tropical map of the type
    ValidateMap { complex: PathBuf, map: PathBuf },
    /// Decide rigidity of a type under its point conditions
    Rigid { complex: PathBuf, r#type: PathBuf },
    /// Multiplicity of a rigid type
    Multiplicity { complex: PathBuf, r#type: PathBuf },
    /// Basic monoid of a type and the pull-back of the base generator
    BasicMonoid { complex: PathBuf, r#type: PathBuf },
    /// Number of logarithmic enhancements of a transverse pre-log map
    EnhanceCount { transverse: PathBuf },
    /// Decomposition ledger: multiplicities, automorphisms, weighted total
    Decompose { complex: PathBuf, ledger: PathBuf },
    /// Multiplicities of the components of the central fibre
    ToricCheck { complex: PathBuf },
    /// Enumerate rigid types of a class within the caps
    Enumerate { complex: PathBuf, class: PathBuf },
}

fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let o = Options {
        explain: cli.common.explain,
        max_vertices: cli.common.max_vertices,
        max_edges: cli.common.max_edges,
        max_u: cli.common.max_u,
    };
    match &cli.command {
        Command::ValidateComplex { complex } => commands::validate_complex(complex, o),
        Command::ValidateMap { complex, map } => commands::validate_map(complex, map, o),
        Command::Rigid { complex, r#type } => commands::rigid(complex, r#type, o),
        Command::Multiplicity { complex, r#type } => commands::multiplicity(complex, r#type, o),
        Command::BasicMonoid { complex, r#type } => commands::basic_monoid_cmd(complex, r#type, o),
        Command::EnhanceCount { transverse } => commands::enhance_count(transverse, o),
        Command::Decompose { complex, ledger } => commands::decompose(complex, ledger, o),
        Command::ToricCheck { complex } => commands::toric_check(complex, o),
        Command::Enumerate { complex, class } => commands::enumerate(complex, class, o),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            let text = match cli.common.format {
                Format::Json => serde_json::to_string_pretty(&out.report).expect("reports serialize"),
                Format::Table => table(&out.report),
            };
            // a closed pipe (e.g. `| head`) is not an error
            let _ = writeln!(std::io::stdout().lock(), "{text}");
            ExitCode::from(out.code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code as u8)
        }
    }
}
