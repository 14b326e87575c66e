use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use redform_cli::document::{render_matrix, RunMode};
use redform_cli::{
    build_ve, read_document, run, sym_power_of, verify_gauge, CliError, RunOverrides, EXIT_GAUGE_MISMATCH,
};

#[derive(Parser)]
#[command(name = "redform", version, about = "Reduced forms of variational equations and an abelianity test")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Structured,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Full,
    Simplified,
}

#[derive(clap::Args)]
struct Output {
    /// Rendering printed on standard output.
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Also write the structured rendering to this file.
    #[arg(long)]
    output: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Build, reduce and test every order up to p_max.
    Run {
        document: String,
        #[arg(long)]
        p_max: Option<u32>,
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        #[arg(long)]
        degree_cap: Option<usize>,
        /// Add wall-clock timings to the report (makes it non-reproducible).
        #[arg(long)]
        timings: bool,
        #[command(flatten)]
        out: Output,
    },
    /// Check P[A] = B exactly.
    VerifyGauge {
        document: String,
        #[command(flatten)]
        out: Output,
    },
    /// Print the linearized variational equation of one order.
    BuildVe {
        document: String,
        #[arg(long, default_value_t = 1)]
        order: u32,
        #[command(flatten)]
        out: Output,
    },
    /// Print the symmetric power of verify.a (or of A1).
    SymPower {
        document: String,
        #[arg(long, default_value_t = 2)]
        power: u32,
        #[command(flatten)]
        out: Output,
    },
}

fn emit(out: &Output, text: String, structured: String) -> Result<(), CliError> {
    if let Some(path) = &out.output {
        std::fs::write(path, &structured).map_err(|source| CliError::Io { path: path.clone(), source })?;
    }
    match out.format {
        Format::Text => print!("{text}"),
        Format::Structured => print!("{structured}"),
    }
    Ok(())
}

fn matrix_text(rows: &[Vec<String>]) -> String {
    rows.iter().map(|r| format!("[{}]\n", r.join(", "))).collect()
}

fn matrix_json(rows: &[Vec<String>]) -> String {
    let mut s = serde_json::to_string_pretty(&serde_json::json!({ "schema_version": 1, "matrix": rows }))
        .expect("serializable");
    s.push('\n');
    s
}

fn execute(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Run { document, p_max, mode, degree_cap, timings, out } => {
            let doc = read_document(&document)?;
            let mode = mode.map(|m| match m {
                ModeArg::Full => RunMode::Full,
                ModeArg::Simplified => RunMode::Simplified,
            });
            let o = run(&doc, &RunOverrides { p_max, mode, degree_cap, timings })?;
            emit(&out, o.report.to_text(), o.report.to_json())?;
            Ok(o.exit_code)
        }
        Command::VerifyGauge { document, out } => {
            let doc = read_document(&document)?;
            let check = verify_gauge(&doc)?;
            let mut text = format!("gauge relation holds: {}\n", check.holds);
            if let Some(d) = &check.difference {
                text.push_str("P[A] - B:\n");
                text.push_str(&matrix_text(d));
            }
            let mut json = serde_json::to_string_pretty(&check).expect("serializable");
            json.push('\n');
            emit(&out, text, json)?;
            Ok(if check.holds { 0 } else { EXIT_GAUGE_MISMATCH })
        }
        Command::BuildVe { document, order, out } => {
            let doc = read_document(&document)?;
            let rows = render_matrix(&build_ve(&doc, order)?);
            emit(&out, matrix_text(&rows), matrix_json(&rows))?;
            Ok(0)
        }
        Command::SymPower { document, power, out } => {
            let doc = read_document(&document)?;
            let rows = render_matrix(&sym_power_of(&doc, power)?);
            emit(&out, matrix_text(&rows), matrix_json(&rows))?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

