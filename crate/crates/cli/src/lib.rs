//! `oamfid` command-line front end.
//!
//! [`execute`] parses an argument vector and returns the result bytes and the
//! manifest describing them without writing anything; [`run`] adds the file
//! and stream handling used by the binary.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod input;
pub mod manifest;
pub mod table;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{CommandFactory, FromArgMatches};

use args::{Cli, Command, Format};
use commands::Product;
pub use error::{CliError, Result};
use manifest::{sha256_hex, sidecar_path, RunManifest};

/// Environment variable naming the directory relative `--out` paths resolve against.
pub const OUTPUT_DIR_ENV: &str = "OAMFID_OUTPUT_DIR";

/// A finished command: its output bytes and the manifest to store beside them.
#[derive(Debug, Clone)]
pub struct Execution {
    pub cli: Cli,
    pub product: Product,
    pub manifest: RunManifest,
}

fn clap_command() -> clap::Command {
    Cli::command()
        .args_override_self(true)
        .mut_subcommands(|s| s.args_override_self(true).allow_negative_numbers(true))
}

/// Parses `argv` (program name first), expanding any `--config` file.
pub fn parse(argv: Vec<OsString>) -> Result<(Cli, Vec<String>)> {
    let cmd = clap_command();
    let argv = config::expand(argv, &cmd)?;
    let matches = cmd
        .try_get_matches_from(&argv)
        .map_err(|e| CliError::Usage(e.render().to_string()))?;
    let cli = Cli::from_arg_matches(&matches).map_err(|e| CliError::Usage(e.to_string()))?;
    let argv = argv.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    Ok((cli, argv))
}

fn output_path(out: Option<&Path>, output_dir: Option<&Path>) -> Option<PathBuf> {
    out.map(|p| match output_dir {
        Some(dir) if p.is_relative() => dir.join(p),
        _ => p.to_path_buf(),
    })
}

fn output_args(command: &Command) -> Option<&args::OutputArgs> {
    match command {
        Command::Probability(a) => Some(&a.output),
        Command::Fidelity(a) => Some(&a.output),
        Command::Sweep(a) => Some(&a.output),
        Command::Simulate(a) => Some(&a.output),
        Command::Bayes(a) => Some(&a.output),
        Command::Fit(a) => Some(&a.output),
        Command::Synthesize(a) => Some(&a.output),
        Command::Replay(_) => None,
    }
}

/// Parses and runs one invocation in memory.
pub fn execute(argv: Vec<OsString>, output_dir: Option<&Path>) -> Result<Execution> {
    let (cli, argv) = parse(argv)?;
    let product = commands::dispatch(&cli.command)?;
    let out = output_args(&cli.command).and_then(|o| output_path(o.out.as_deref(), output_dir));
    let manifest = RunManifest {
        tool: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command: cli.command.name().into(),
        argv,
        parameters: serde_json::to_value(&cli.command).expect("arguments always serialize"),
        seed: product.seed,
        rng: product.rng.map(str::to_owned),
        grid_sizes: product.grid_sizes.clone(),
        format: match product.format {
            Format::Csv => "csv",
            Format::Json => "json",
        }
        .into(),
        output: out.map_or_else(|| "-".into(), |p| p.display().to_string()),
        output_sha256: sha256_hex(&product.bytes),
        timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
    };
    Ok(Execution {
        cli,
        product,
        manifest,
    })
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    std::fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

fn replay(a: &args::ReplayArgs, output_dir: Option<&Path>, stdout: &mut dyn Write) -> Result<()> {
    let recorded = RunManifest::read(&a.manifest)?;
    let argv = recorded.argv.iter().map(OsString::from).collect();
    let again = execute(argv, output_dir)?;
    match output_path(a.out.as_deref(), output_dir) {
        Some(path) => write_file(&path, &again.product.bytes)?,
        None => stdout
            .write_all(&again.product.bytes)
            .map_err(|e| CliError::io("<stdout>", e))?,
    }
    if again.manifest.output_sha256 != recorded.output_sha256 {
        return Err(CliError::Mismatch(format!(
            "replay of {} differs from the recorded output (sha256 {} vs {})",
            a.manifest.display(),
            again.manifest.output_sha256,
            recorded.output_sha256
        )));
    }
    Ok(())
}

/// Runs one invocation, writing results, manifest and diagnostics.
pub fn run(argv: Vec<OsString>, output_dir: Option<&Path>, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    let cmd = clap_command();
    // help and version are successful runs, not usage errors
    if let Err(e) = cmd.clone().try_get_matches_from(&argv) {
        if matches!(e.kind(), clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion) {
            return write!(stdout, "{}", e.render()).map_err(|e| CliError::io("<stdout>", e));
        }
    }
    let (cli, _) = parse(argv.clone())?;
    if let Command::Replay(a) = &cli.command {
        return replay(a, output_dir, stdout);
    }

    let exec = execute(argv, output_dir)?;
    let output = output_args(&exec.cli.command).expect("replay handled above");
    let out = output_path(output.out.as_deref(), output_dir);
    match &out {
        Some(path) => write_file(path, &exec.product.bytes)?,
        None => stdout
            .write_all(&exec.product.bytes)
            .map_err(|e| CliError::io("<stdout>", e))?,
    }
    let manifest_bytes = table::json_bytes(&exec.manifest);
    match output_path(output.manifest.as_deref(), output_dir).or_else(|| out.as_deref().map(sidecar_path)) {
        Some(path) => write_file(&path, &manifest_bytes),
        None => stderr
            .write_all(&manifest_bytes)
            .map_err(|e| CliError::io("<stderr>", e)),
    }
}

/// Entry point of the binary; returns the process exit code.
pub fn main_entry() -> i32 {
    let output_dir = std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from);
    let mut stdout = std::io::stdout().lock();
    let mut stderr = std::io::stderr().lock();
    match run(std::env::args_os().collect(), output_dir.as_deref(), &mut stdout, &mut stderr) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.to_string().trim_end());
            e.exit_code()
        }
    }
}
