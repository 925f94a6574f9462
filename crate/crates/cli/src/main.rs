//! `hmlbn` — experiment harness for the hierarchical mobility
//! performance models.
//!
//! Exit codes: 0 success, 2 usage error, 3 configuration or figure-id
//! error, 4 i/o error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use hmlbn_cli::config::ExperimentConfig;
use hmlbn_cli::figures::{self, FigureError, FigureId};
use hmlbn_cli::pipeline;
use hmlbn_model::metrics::Interpretation;
use hmlbn_model::movement::CrossingMode;
use hmlbn_model::sim::compare_empirical;

const EXIT_CONFIG: u8 = 3;
const EXIT_IO: u8 = 4;

#[derive(Parser)]
#[command(
    name = "hmlbn",
    about = "Analytical mobility-management performance models and their Monte-Carlo verification",
    version
)]
struct Cli {
    /// Configuration file (INI-style); defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output path: a directory for `figure`/`all`, a file for
    /// `simulate`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Override the simulation seed from the configuration.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Crossing-probability coefficients to use.
    #[arg(long, value_enum, global = true, default_value = "paper-approx")]
    mode: ModeArg,

    /// Crossing expectations weighting the MIP hand-off types.
    #[arg(long, value_enum, global = true, default_value = "table2-literal")]
    interpretation: InterpretationArg,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    /// Reduced closed-form coefficients.
    #[value(name = "paper-approx")]
    PaperApprox,
    /// Unreduced 17/36 and 35/32 coefficients.
    Exact,
}

#[derive(Clone, Copy, ValueEnum)]
enum InterpretationArg {
    /// In-area expectations for every scheme.
    #[value(name = "table2-literal")]
    Table2Literal,
    /// Unscaled expectations for the MIP schemes.
    #[value(name = "figure-match")]
    FigureMatch,
}

#[derive(Subcommand)]
enum Command {
    /// Produce the CSV data of one figure (16..25).
    Figure {
        /// Figure number.
        id: String,
    },
    /// Produce every figure plus a machine-readable manifest.
    All,
    /// Run the movement simulation at the first configured rho_c and
    /// write per-life records.
    Simulate,
    /// Parse and validate the configuration, then exit.
    ValidateConfig,
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig, (u8, String)> {
    let mut config = match &cli.config {
        None => ExperimentConfig::default(),
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| (EXIT_IO, format!("cannot read {}: {e}", path.display())))?;
            ExperimentConfig::parse(&text).map_err(|e| (EXIT_CONFIG, e.to_string()))?
        }
    };
    if let Some(seed) = cli.seed {
        config.simulation.seed = seed;
    }
    config.analytic_mode = match cli.mode {
        ModeArg::PaperApprox => CrossingMode::Approx,
        ModeArg::Exact => CrossingMode::Exact,
    };
    config.interpretation = match cli.interpretation {
        InterpretationArg::Table2Literal => Interpretation::TableLiteral,
        InterpretationArg::FigureMatch => Interpretation::FigureMatch,
    };
    config.validate().map_err(|e| (EXIT_CONFIG, e.to_string()))?;
    Ok(config)
}

fn figure_exit(err: &FigureError) -> u8 {
    match err {
        FigureError::UnknownFigure(_) => EXIT_CONFIG,
        FigureError::Io { .. } => EXIT_IO,
        FigureError::Model(_) => EXIT_CONFIG,
    }
}

fn ensure_out_dir(out: &Option<PathBuf>) -> Result<PathBuf, (u8, String)> {
    let dir = out.clone().unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir)
        .map_err(|e| (EXIT_IO, format!("cannot create {}: {e}", dir.display())))?;
    Ok(dir)
}

fn run(cli: &Cli) -> Result<(), (u8, String)> {
    let config = load_config(cli)?;
    match &cli.command {
        Command::ValidateConfig => {
            println!("configuration OK");
            Ok(())
        }
        Command::Figure { id } => {
            let id = FigureId::parse(id)
                .map_err(|e| (figure_exit(&e), e.to_string()))?;
            let dir = ensure_out_dir(&cli.out)?;
            let files = figures::run_figure(id, &config, &dir)
                .map_err(|e| (figure_exit(&e), e.to_string()))?;
            for file in files {
                println!("{}", file.display());
            }
            Ok(())
        }
        Command::All => {
            let dir = ensure_out_dir(&cli.out)?;
            let manifest = figures::run_all(&config, &dir)
                .map_err(|e| (figure_exit(&e), e.to_string()))?;
            for figure in &manifest.figures {
                println!(
                    "figure {:>2}: {} ({} ms)",
                    figure.id,
                    figure.files.join(", "),
                    figure.wall_ms
                );
            }
            println!("manifest.json");
            Ok(())
        }
        Command::Simulate => {
            let rho = config.mobility.rho_c[0];
            let (analysis, summary) = pipeline::simulate(&config, rho)
                .map_err(|e| (EXIT_CONFIG, e.to_string()))?;
            let d = &analysis.distributions;
            println!("rho_c = {rho}, lives = {}", summary.records.len());
            println!(
                "empirical mean C/R/A = {:.4}/{:.4}/{:.4}",
                summary.cell_pmf.mean(),
                summary.region_pmf.mean(),
                summary.area_pmf.mean()
            );
            println!(
                "analytic  mean C/R/A = {:.4}/{:.4}/{:.4}",
                d.mean_cell, d.mean_region, d.mean_area
            );
            println!(
                "survival fraction = {:.6} (p_c = {:.6})",
                summary.survival_fraction, analysis.params.survive_cell_prob
            );
            println!(
                "region/area exit fractions = {:.6}/{:.6} (model transit probs {:.6}/{:.6})",
                summary.region_exit_fraction,
                summary.area_exit_fraction,
                analysis.model.region_transit_prob,
                analysis.model.area_transit_prob
            );
            for (label, empirical, analytic) in [
                ("C", &summary.cell_pmf, &d.cell_crossings),
                ("R", &summary.region_pmf, &d.region_crossings),
                ("A", &summary.area_pmf, &d.area_crossings),
            ] {
                let report = compare_empirical(empirical, analytic)
                    .map_err(|e| (EXIT_CONFIG, e.to_string()))?;
                println!(
                    "{label}: tv = {:.5}, chi2 = {:.2} ({} dof)",
                    report.tv_distance, report.chi_square, report.chi_square_dof
                );
            }
            if let Some(path) = &cli.out {
                figures::write_records(&summary.records, path)
                    .map_err(|e| (figure_exit(&e), e.to_string()))?;
                println!("records written to {}", path.display());
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err((code, message)) => {
            eprintln!("error: {message}");
            ExitCode::from(code)
        }
    }
}
