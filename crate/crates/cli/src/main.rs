use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use vqi_core::compliance::standard_key;
use vqi_core::project::Fraction;
use vqi_core::report::{
    emit_compliance_csv, emit_grid_csv, emit_scores_csv, emit_series_csv, evaluate, f6, project_schedules,
    project_spatial, render_text,
};
use vqi_core::{parse_project, vci, Error, ShadeMaterial};

#[derive(Parser)]
#[command(name = "vqi", version, about = "Window view quality: content, access and clarity scores")]
struct Cli {
    /// Also write machine-readable CSV files into this directory.
    #[arg(long, global = true, value_name = "DIR")]
    csv: Option<PathBuf>,
    /// Suppress the human-readable output.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Full report for every observer and window.
    Evaluate { file: PathBuf },
    /// Spatial-assessment grid as CSV.
    Grid { file: PathBuf },
    /// View Clarity Index of one shade material.
    Vci {
        /// Openness factor, as a fraction or percentage ("5%").
        #[arg(long = "of", value_parser = fraction)]
        openness: f64,
        /// Visible transmittance, as a fraction or percentage.
        #[arg(long, value_parser = fraction)]
        tv: f64,
    },
    /// Compliance rows for one standard or certification.
    Comply {
        file: PathBuf,
        #[arg(long)]
        standard: String,
    },
    /// Clarity time series for a shading schedule.
    Schedule {
        file: PathBuf,
        /// Schedule id; required when the project has more than one.
        #[arg(long)]
        id: Option<String>,
    },
}

fn fraction(s: &str) -> Result<f64, String> {
    Fraction::parse(s).ok_or_else(|| format!("malformed number `{s}`"))
}

enum Failure {
    User(String),
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_user_error() {
            Failure::User(e.to_string())
        } else {
            Failure::Internal(e.to_string())
        }
    }
}

fn write_out(dir: &Path, name: &str, bytes: &[u8]) -> Result<(), Failure> {
    std::fs::create_dir_all(dir)
        .and_then(|_| std::fs::write(dir.join(name), bytes))
        .map_err(|e| Failure::Internal(format!("cannot write {}: {e}", dir.join(name).display())))
}

fn print(bytes: &[u8]) -> Result<(), Failure> {
    let mut out = std::io::stdout().lock();
    out.write_all(bytes)
        .and_then(|_| out.flush())
        .map_err(|e| Failure::Internal(format!("cannot write to stdout: {e}")))
}

fn run(cli: Cli) -> Result<(), Failure> {
    let show = !cli.quiet;
    match cli.command {
        Command::Evaluate { file } => {
            let project = parse_project(&file)?;
            let report = evaluate(&project)?;
            if show {
                print(render_text(&report).as_bytes())?;
            }
            if let Some(dir) = &cli.csv {
                write_out(dir, "grid.csv", &emit_grid_csv(&report.spatial.assessment))?;
                write_out(dir, "compliance.csv", &emit_compliance_csv(&report.compliance_rows()))?;
                write_out(dir, "scores.csv", &emit_scores_csv(&report))?;
                for (id, series) in &report.schedules {
                    write_out(dir, &format!("schedule_{id}.csv"), &emit_series_csv(series))?;
                }
            }
        }
        Command::Grid { file } => {
            let project = parse_project(&file)?;
            let assessment = project_spatial(&project)?;
            let bytes = emit_grid_csv(&assessment);
            if show {
                print(&bytes)?;
                eprintln!(
                    "fraction {} ({} of {} cells), two-direction fraction {}",
                    f6(assessment.fraction),
                    assessment.qualified_count(),
                    assessment.cells.len(),
                    f6(assessment.multi_direction_fraction)
                );
            }
            if let Some(dir) = &cli.csv {
                write_out(dir, "grid.csv", &bytes)?;
            }
        }
        Command::Vci { openness, tv } => {
            let material = ShadeMaterial::new("cli", openness, tv)?;
            let v = vci(&material)?;
            if show {
                print(format!("{}\n", f6(v)).as_bytes())?;
            }
        }
        Command::Comply { file, standard } => {
            let project = parse_project(&file)?;
            let report = evaluate(&project)?;
            let key = standard_key(&standard);
            let rows: Vec<_> = report
                .compliance_rows()
                .into_iter()
                .filter(|(_, r)| !key.is_empty() && standard_key(r.standard).starts_with(&key))
                .collect();
            if rows.is_empty() {
                return Err(Error::UnknownStandard(standard).into());
            }
            let bytes = emit_compliance_csv(&rows);
            if show {
                print(&bytes)?;
            }
            if let Some(dir) = &cli.csv {
                write_out(dir, "compliance.csv", &bytes)?;
            }
        }
        Command::Schedule { file, id } => {
            let project = parse_project(&file)?;
            let all = project_schedules(&project)?;
            let chosen: Vec<_> = match &id {
                Some(id) => match all.get_key_value(id) {
                    Some(kv) => vec![kv],
                    None => return Err(Failure::User(format!("no schedule `{id}` in the project"))),
                },
                None => all.iter().collect(),
            };
            if chosen.is_empty() {
                return Err(Failure::User("the project defines no schedules".into()));
            }
            if show {
                if chosen.len() > 1 {
                    let ids: Vec<&str> = chosen.iter().map(|(k, _)| k.as_str()).collect();
                    return Err(Failure::User(format!("several schedules ({}); pick one with --id", ids.join(", "))));
                }
                print(&emit_series_csv(chosen[0].1))?;
            }
            if let Some(dir) = &cli.csv {
                for (id, series) in chosen {
                    write_out(dir, &format!("schedule_{id}.csv"), &emit_series_csv(series))?;
                }
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::User(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(2)
        }
    }
}
