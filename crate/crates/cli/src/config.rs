//! Flat `key = value` configuration files. Every key is a long flag name
//! of the subcommand; the file's settings are inserted before the
//! command-line flags, so flags given on the command line win.

use std::fs;

use anyhow::{bail, Context, Result};

/// Keys that are switches rather than flags with a value.
const SWITCHES: &[&str] = &["simulator", "timing", "chosen"];

/// Turns config-file text into flags.
pub fn config_flags(text: &str) -> Result<Vec<String>> {
    let mut flags = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            bail!("config line {}: expected `key = value`", n + 1);
        };
        let (key, value) = (key.trim().replace('_', "-"), value.trim());
        if key.is_empty() || key == "config" {
            bail!("config line {}: invalid key `{key}`", n + 1);
        }
        if SWITCHES.contains(&key.as_str()) {
            match value {
                "true" => flags.push(format!("--{key}")),
                "false" => {}
                _ => bail!("config line {}: `{key}` must be true or false", n + 1),
            }
        } else {
            flags.push(format!("--{key}"));
            flags.push(value.to_string());
        }
    }
    Ok(flags)
}

/// Removes `--config FILE` from the arguments and splices the file's
/// flags in right after the subcommand name.
pub fn expand_config(args: Vec<String>) -> Result<Vec<String>> {
    let mut out = Vec::with_capacity(args.len());
    let mut path = None;
    let mut it = args.into_iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            path = Some(it.next().context("`--config` needs a file name")?);
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        } else {
            out.push(a);
        }
    }
    let Some(path) = path else {
        return Ok(out);
    };
    let text =
        fs::read_to_string(&path).with_context(|| format!("cannot read config file `{path}`"))?;
    let flags = config_flags(&text).with_context(|| format!("in config file `{path}`"))?;
    // program name and subcommand come first
    let at = out.len().min(2);
    out.splice(at..at, flags);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keys_become_flags() {
        let flags = config_flags(
            "# campaign\nmode = baseline\nmax_executions=500\ntiming = true\nchosen = false\n",
        )
        .unwrap();
        assert_eq!(
            flags,
            ["--mode", "baseline", "--max-executions", "500", "--timing"]
        );
        assert!(config_flags("mode baseline").is_err());
        assert!(config_flags("timing = yes").is_err());
    }

    #[test]
    fn file_flags_precede_command_line_flags() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.conf");
        fs::write(&path, "seed = 3\n").unwrap();
        let args = [
            "bbcheck",
            "check",
            "--config",
            path.to_str().unwrap(),
            "--seed",
            "9",
        ]
        .map(String::from)
        .to_vec();
        assert_eq!(
            expand_config(args).unwrap(),
            ["bbcheck", "check", "--seed", "3", "--seed", "9"]
        );
    }
}
