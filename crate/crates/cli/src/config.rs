//! Config files supply flag defaults. The file is turned into ordinary
//! `--flag value` arguments placed before the user's own, and every argument
//! overrides itself, so anything given on the command line wins.
//!
//! ```toml
//! n = 3            # used by every subcommand that has --n
//!
//! [fidelity]
//! strategy = "parity"
//! grid-exponent = 13
//! ```

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::Command;

use crate::error::{CliError, Result};

/// Position and value of `--config` in `argv`, if present.
fn find_config(argv: &[OsString]) -> Result<Option<(usize, usize, PathBuf)>> {
    for (i, arg) in argv.iter().enumerate().skip(1) {
        let Some(s) = arg.to_str() else { continue };
        if s == "--" {
            break;
        }
        if s == "--config" {
            let value = argv
                .get(i + 1)
                .ok_or_else(|| CliError::Usage("--config needs a file".into()))?;
            return Ok(Some((i, 2, PathBuf::from(value))));
        }
        if let Some(v) = s.strip_prefix("--config=") {
            return Ok(Some((i, 1, PathBuf::from(v))));
        }
    }
    Ok(None)
}

fn subcommand_index(argv: &[OsString], cli: &Command) -> Option<usize> {
    argv.iter()
        .enumerate()
        .skip(1)
        .find(|(_, a)| a.to_str().is_some_and(|s| cli.find_subcommand(s).is_some()))
        .map(|(i, _)| i)
}

fn render(key: &str, value: &toml::Value, source: &Path) -> Result<Vec<String>> {
    let flag = format!("--{}", key.replace('_', "-"));
    let scalar = |v: &toml::Value| -> Result<String> {
        match v {
            toml::Value::String(s) => Ok(s.clone()),
            toml::Value::Integer(i) => Ok(i.to_string()),
            toml::Value::Float(f) => Ok(f.to_string()),
            other => Err(CliError::parse(
                source.display().to_string(),
                None,
                format!("unsupported value for {key}: {other}"),
            )),
        }
    };
    Ok(match value {
        toml::Value::Boolean(true) => vec![flag],
        toml::Value::Boolean(false) => vec![],
        toml::Value::Array(items) => {
            let joined = items.iter().map(scalar).collect::<Result<Vec<_>>>()?.join(",");
            vec![format!("{flag}={joined}")]
        }
        v => vec![format!("{flag}={}", scalar(v)?)],
    })
}

/// Replaces `--config FILE` in `argv` with the flags the file sets for the
/// chosen subcommand.
pub fn expand(argv: Vec<OsString>, cli: &Command) -> Result<Vec<OsString>> {
    let Some((at, width, path)) = find_config(&argv)? else {
        return Ok(argv);
    };
    let mut argv = argv;
    argv.drain(at..at + width);
    let Some(sub_at) = subcommand_index(&argv, cli) else {
        return Ok(argv);
    };
    let sub_name = argv[sub_at].to_string_lossy().into_owned();
    let sub = cli.find_subcommand(&sub_name).expect("looked up above");
    let accepted: Vec<String> = sub
        .get_arguments()
        .filter_map(|a| a.get_long().map(str::to_owned))
        .collect();

    let text = std::fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
    let table: toml::Table = text.parse().map_err(|e: toml::de::Error| {
        let line = e
            .span()
            .map(|s| text[..s.start].matches('\n').count() as u64 + 1);
        CliError::parse(path.display().to_string(), line, e.message().to_owned())
    })?;

    let mut flags = Vec::new();
    for (key, value) in &table {
        if value.is_table() {
            continue;
        }
        // shared keys only reach subcommands that know them
        if accepted.contains(&key.replace('_', "-")) {
            flags.extend(render(key, value, &path)?);
        }
    }
    if let Some(section) = table.get(&sub_name) {
        let section = section.as_table().ok_or_else(|| {
            CliError::parse(path.display().to_string(), None, format!("[{sub_name}] must be a table"))
        })?;
        for (key, value) in section {
            if !accepted.contains(&key.replace('_', "-")) {
                return Err(CliError::Usage(format!(
                    "{}: `{sub_name}` has no option --{key}",
                    path.display()
                )));
            }
            flags.extend(render(key, value, &path)?);
        }
    }
    let tail = argv.split_off(sub_at + 1);
    argv.extend(flags.into_iter().map(OsString::from));
    argv.extend(tail);
    Ok(argv)
}
