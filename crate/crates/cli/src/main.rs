use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use arcshot_cli::commands::{self, BenchArgs, ExecuteArgs, PlanArgs, RenderArgs, Summary};
use arcshot_cli::CliError;
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "arcshot", version, about = "Plan, execute, benchmark and render aerial arc shots")]
struct Cli {
    /// Output style for summaries and errors.
    #[arg(long, value_enum, global = true, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Machine,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Plan a collision-free arc shot.
    Plan {
        #[arg(long)]
        world: PathBuf,
        #[arg(long)]
        shot: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Overrides the config seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Also write trees.json and draw the RRT* trees.
        #[arg(long)]
        overlay_tree: bool,
    },
    /// Fly a planned path with the kinematic follower.
    Execute {
        #[arg(long)]
        path: PathBuf,
        #[arg(long)]
        world: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Time planning over several loop budgets.
    Bench {
        #[arg(long)]
        world: PathBuf,
        #[arg(long)]
        shot: PathBuf,
        #[arg(long)]
        bench: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Seed of repetition 0; repetition r uses seed + r.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Draw any combination of world, shot, path, trajectory and trees.
    Render {
        #[arg(long)]
        world: PathBuf,
        #[arg(long)]
        shot: Option<PathBuf>,
        #[arg(long)]
        path: Option<PathBuf>,
        #[arg(long)]
        trajectory: Option<PathBuf>,
        #[arg(long)]
        tree: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

fn run(cmd: Command) -> Result<Summary, CliError> {
    match cmd {
        Command::Plan {
            world,
            shot,
            config,
            seed,
            out,
            overlay_tree,
        } => commands::plan(&PlanArgs {
            world,
            shot,
            config,
            seed,
            out,
            overlay_tree,
        }),
        Command::Execute {
            path,
            world,
            config,
            out,
        } => commands::execute(&ExecuteArgs {
            path,
            world,
            config,
            out,
        }),
        Command::Bench {
            world,
            shot,
            bench,
            config,
            seed,
            out,
        } => commands::bench(&BenchArgs {
            world,
            shot,
            bench,
            config,
            seed,
            out,
        }),
        Command::Render {
            world,
            shot,
            path,
            trajectory,
            tree,
            config,
            out,
        } => commands::render(&RenderArgs {
            world,
            shot,
            path,
            trajectory,
            tree,
            config,
            out,
        }),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(summary) => {
            // A closed stdout (e.g. piped into `head`) is not a failure.
            let mut out = std::io::stdout().lock();
            let _ = match cli.format {
                Format::Text => summary.lines.iter().try_for_each(|l| writeln!(out, "{l}")),
                Format::Machine => writeln!(out, "{}", summary.json),
            };
            ExitCode::SUCCESS
        }
        Err(e) => {
            let mut err = std::io::stderr().lock();
            let _ = match cli.format {
                Format::Text => writeln!(err, "error: {e}"),
                Format::Machine => writeln!(err, "{}", e.to_json()),
            };
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
