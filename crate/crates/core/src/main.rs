use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use vacpack::calibrate::{calibrate_etch, read_observations};
use vacpack::designer::{equivalent_thickness_with, min_cap_thickness_with, CapEvaluator, MatchMode};
use vacpack::pipeline::{run_molding, run_recipe, sweep};
use vacpack::recipe::read_recipe;
use vacpack::report::{emit_calibration, emit_molding, emit_report, emit_sweep, tabular, Format, Row};
use vacpack::units::UM;
use vacpack::{Error, Result};

#[derive(Parser)]
#[command(name = "vacpack", version, about = "Thin-film vacuum package process simulator")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Text)]
    format: OutputFormat,
    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Text,
    Tabular,
}

#[derive(Clone, Copy, ValueEnum)]
enum Match {
    Deflection,
    FailureMargin,
}

#[derive(Subcommand)]
enum Command {
    /// Run release, clogging, residue and molding for a recipe.
    Simulate {
        recipe: PathBuf,
        /// Also dump the molding deflection field as x_um,y_um,w_nm.
        #[arg(long)]
        field: Option<PathBuf>,
    },
    /// Run a recipe for each value of one parameter.
    Sweep {
        recipe: PathBuf,
        /// Field path, e.g. holes.a.diameter or stack.sacrificial_thickness.
        #[arg(long)]
        param: String,
        /// Comma separated values with units, e.g. 2um,4um,6um.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<String>,
    },
    /// Fit the etch model to measured underetch data.
    CalibrateEtch { data: PathBuf },
    /// Check the cap of a recipe against the molding load.
    CheckMolding {
        recipe: PathBuf,
        #[arg(long)]
        field: Option<PathBuf>,
    },
    /// Thinnest cap meeting the recipe's molding limits, optionally with the
    /// equivalent thickness in another material.
    Design {
        recipe: PathBuf,
        /// Material to compare against the structural material.
        #[arg(long)]
        compare: Option<String>,
        #[arg(long = "match", value_enum, default_value_t = Match::Deflection)]
        match_mode: Match,
    },
}

fn write_out(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => File::create(p)?.write_all(text.as_bytes())?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn write_field(path: &Path, sol: &vacpack::mechanics::PlateSolution) -> Result<()> {
    sol.write_field(std::io::BufWriter::new(File::create(path)?))?;
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode> {
    let format = match cli.format {
        OutputFormat::Text => Format::Text,
        OutputFormat::Tabular => Format::Tabular,
    };
    let out = cli.out.as_deref();
    let verdict = |pass: bool| if pass { ExitCode::SUCCESS } else { ExitCode::from(1) };
    match cli.command {
        Command::Simulate { recipe, field } => {
            let recipe = read_recipe(&recipe)?;
            let report = run_recipe(&recipe)?;
            if let Some(path) = field {
                write_field(&path, &run_molding(&recipe)?.1)?;
            }
            write_out(out, &emit_report(&report, format))?;
            Ok(verdict(report.pass()))
        }
        Command::Sweep { recipe, param, values } => {
            let recipe = read_recipe(&recipe)?;
            let table = sweep(&recipe, &param, &values)?;
            write_out(out, &emit_sweep(&table, format))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::CalibrateEtch { data } => {
            let obs = read_observations(&data)?;
            let cal = calibrate_etch(&obs)?;
            write_out(out, &emit_calibration(&cal, format))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::CheckMolding { recipe, field } => {
            let recipe = read_recipe(&recipe)?;
            let (report, sol) = run_molding(&recipe)?;
            if let Some(path) = field {
                write_field(&path, &sol)?;
            }
            write_out(out, &emit_molding(&report, format))?;
            Ok(verdict(report.pass()))
        }
        Command::Design { recipe, compare, match_mode } => {
            let recipe = read_recipe(&recipe)?;
            let eval = CapEvaluator::new(&recipe.molding.constraints())?;
            let base = recipe.material(&recipe.structural);
            let t = min_cap_thickness_with(&eval, base)?;
            let r = eval.response(base, t)?;
            let mut rows = vec![
                Row { field: format!("{}.min_thickness", base.name), units: "um", value: t / UM },
                Row { field: format!("{}.w_max", base.name), units: "nm", value: r.w_max / vacpack::units::NM },
                Row {
                    field: format!("{}.sigma_max", base.name),
                    units: "MPa",
                    value: r.sigma_max / vacpack::units::MPA,
                },
            ];
            if let Some(other) = compare {
                let m = recipe
                    .materials
                    .get(&other)
                    .ok_or_else(|| Error::InvalidInput(format!("unknown material '{other}'")))?;
                let mode = match match_mode {
                    Match::Deflection => MatchMode::Deflection,
                    Match::FailureMargin => MatchMode::FailureMargin,
                };
                let te = equivalent_thickness_with(&eval, base, t, m, mode)?;
                rows.push(Row { field: format!("{}.equivalent_thickness", m.name), units: "um", value: te / UM });
            }
            let text = match format {
                Format::Tabular => tabular(&rows),
                Format::Text => rows
                    .iter()
                    .map(|r| format!("{:<28} {} {}\n", r.field, vacpack::units::fmt_sig6(r.value), r.units))
                    .collect(),
            };
            write_out(out, &text)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
