//! Flag defaults from a `key = value` file.
//!
//! Keys are long flag names without the leading dashes; underscores and
//! dashes are interchangeable. A key may repeat for repeatable flags. Boolean
//! flags take `true` or `false`. Keys not understood by the running
//! subcommand are ignored so one file can serve every subcommand, but a key
//! that no subcommand knows is an error.

use std::collections::BTreeSet;
use std::fs;

use anyhow::Context;
use clap::{ArgAction, Command};

fn config_path(args: &[String]) -> Option<String> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            return it.next().cloned();
        }
        if let Some(p) = a.strip_prefix("--config=") {
            return Some(p.to_string());
        }
    }
    None
}

fn parse(text: &str, path: &str) -> anyhow::Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| re100::Error::Format {
            line: i + 1,
            message: format!("{path}: expected `key = value`, found `{line}`"),
        })?;
        out.push((k.trim().replace('_', "-"), v.trim().to_string()));
    }
    Ok(out)
}

/// Appends flags from the config file named by `--config` for every key
/// not already given on the command line.
pub fn merge(cli: &Command, mut args: Vec<String>) -> anyhow::Result<Vec<String>> {
    let Some(path) = config_path(&args) else {
        return Ok(args);
    };
    let text = fs::read_to_string(&path)
        .map_err(|e| re100::Error::Io(format!("{path}: {e}")))
        .context("reading config file")?;
    let entries = parse(&text, &path)?;

    let Some(sub) = args
        .iter()
        .skip(1)
        .find_map(|a| cli.get_subcommands().find(|s| s.get_name() == a))
    else {
        return Ok(args);
    };
    let known: BTreeSet<&str> = cli
        .get_subcommands()
        .flat_map(|s| s.get_arguments().filter_map(|a| a.get_long()))
        .collect();
    let given: BTreeSet<String> = args
        .iter()
        .filter_map(|a| a.strip_prefix("--"))
        .map(|a| a.split('=').next().unwrap_or(a).to_string())
        .collect();

    for (key, value) in entries {
        if key == "config" {
            continue;
        }
        if !known.contains(key.as_str()) {
            return Err(re100::Error::Validation(format!("{path}: unknown key `{key}`")).into());
        }
        let Some(arg) = sub
            .get_arguments()
            .find(|a| a.get_long() == Some(key.as_str()))
        else {
            continue;
        };
        if given.contains(&key) {
            continue;
        }
        if matches!(arg.get_action(), ArgAction::SetTrue) {
            match value.as_str() {
                "true" => args.push(format!("--{key}")),
                "false" => {}
                other => {
                    return Err(re100::Error::Validation(format!(
                        "{path}: `{key}` expects true or false, got `{other}`"
                    ))
                    .into())
                }
            }
        } else {
            args.push(format!("--{key}={value}"));
        }
    }
    Ok(args)
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::{Arg, ArgAction};

    fn cli() -> Command {
        Command::new("t").subcommand(
            Command::new("run")
                .arg(Arg::new("steps").long("steps"))
                .arg(
                    Arg::new("contour")
                        .long("contour")
                        .action(ArgAction::Append),
                )
                .arg(
                    Arg::new("no-plot")
                        .long("no-plot")
                        .action(ArgAction::SetTrue),
                ),
        )
    }

    fn args(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn file_values_fill_missing_flags() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.conf");
        fs::write(
            &path,
            "steps = 48\ncontour = 10\ncontour = 20\nno_plot = true\n",
        )
        .unwrap();
        let p = path.to_str().unwrap();
        let merged = merge(&cli(), args(&["t", "run", "--config", p, "--steps", "24"])).unwrap();
        assert_eq!(
            merged[4..],
            args(&["--steps", "24", "--contour=10", "--contour=20", "--no-plot"])[..]
        );
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.conf");
        fs::write(&path, "colour = blue\n").unwrap();
        let p = path.to_str().unwrap();
        assert!(merge(&cli(), args(&["t", "run", "--config", p])).is_err());
    }
}
