//! `re100` command-line tool.

mod commands;
mod config;
mod input;
mod output;
mod plot;

use std::process::ExitCode;

use clap::{CommandFactory, Parser, Subcommand};

use commands::{
    BottleneckArgs, CalibrateArgs, CostfnArgs, GdCurveArgs, LpArgs, OracleArgs, ProdfnArgs,
};

#[derive(Parser, Debug)]
#[command(
    name = "re100",
    version,
    about = "Storage and cost analysis of 100% renewable power systems"
)]
pub struct Cli {
    /// Key-value file with default flag values; flags on the command line win.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<std::path::PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Production function x_s(x_g) of a demand/generation pair.
    Prodfn(ProdfnArgs),
    /// Cost function and iso-cost contours.
    Costfn(CostfnArgs),
    /// Partial sums of generation and demand with their upper hull.
    GdCurve(GdCurveArgs),
    /// Capacity-expansion linear program.
    Lp(LpArgs),
    /// Binding interval across a sweep of generation capacities.
    Bottleneck(BottleneckArgs),
    /// Grid search of generation and storage costs against a target cost.
    Calibrate(CalibrateArgs),
    /// Brute-force reference values.
    Oracle(OracleArgs),
}

/// Exit status for an error: 1 for bad input, 2 for infeasible problems,
/// 3 for resource limits and solver failures.
fn exit_code(err: &anyhow::Error) -> u8 {
    use re100::Error::*;
    match err.downcast_ref::<re100::Error>() {
        Some(Infeasible { .. }) => 2,
        Some(Resource(_) | Solver(_)) => 3,
        _ => 1,
    }
}

fn run(args: Vec<String>) -> anyhow::Result<()> {
    let args = config::merge(&Cli::command(), args)?;
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            e.print()?;
            return Ok(());
        }
        Err(e) => {
            let text = e.render().to_string();
            let text = text
                .strip_prefix("error: ")
                .unwrap_or(&text)
                .trim_end()
                .to_string();
            return Err(anyhow::anyhow!(text));
        }
    };
    let run = output::Provenance::new(&args);
    match cli.command {
        Command::Prodfn(a) => commands::prodfn(&run, a),
        Command::Costfn(a) => commands::costfn(&run, a),
        Command::GdCurve(a) => commands::gd_curve(&run, a),
        Command::Lp(a) => commands::lp(&run, a),
        Command::Bottleneck(a) => commands::bottleneck(&run, a),
        Command::Calibrate(a) => commands::calibrate(&run, a),
        Command::Oracle(a) => commands::oracle(&run, a),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(std::env::args().collect()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
