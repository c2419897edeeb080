//! `key = value` configuration files.
//!
//! Entries become `--key value` flags inserted right after the subcommand,
//! ahead of the real arguments, so that the command line wins on conflict.
//! `true`/`false` values toggle bare flags. A `command` key names the
//! subcommand when the command line does not.

use std::fs;
use std::path::Path;

pub const SUBCOMMANDS: [&str; 7] = [
    "constants",
    "sharp",
    "verify",
    "rate",
    "inequalities",
    "l1",
    "liouville",
];

#[derive(Debug, PartialEq)]
pub struct ConfigError(pub String);

pub fn parse(text: &str) -> Result<Vec<(String, String)>, ConfigError> {
    let mut entries = Vec::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(ConfigError(format!(
                "line {}: expected `key = value`, got `{line}`",
                no + 1
            )));
        };
        let key = key.trim();
        if key.is_empty() || key.contains(char::is_whitespace) {
            return Err(ConfigError(format!("line {}: invalid key `{key}`", no + 1)));
        }
        entries.push((key.replace('_', "-"), value.trim().to_string()));
    }
    Ok(entries)
}

/// Pulls `--config FILE` out of `argv`.
fn take_config(argv: &mut Vec<String>) -> Result<Option<String>, ConfigError> {
    let mut i = 0;
    let mut found = None;
    while i < argv.len() {
        if argv[i] == "--config" {
            if i + 1 >= argv.len() {
                return Err(ConfigError("--config needs a file".into()));
            }
            found = Some(argv.remove(i + 1));
            argv.remove(i);
        } else if let Some(path) = argv[i].strip_prefix("--config=") {
            found = Some(path.to_string());
            argv.remove(i);
        } else {
            i += 1;
        }
    }
    Ok(found)
}

/// The argument vector with config entries spliced in.
pub fn assemble(mut argv: Vec<String>) -> Result<Vec<String>, ConfigError> {
    let Some(path) = take_config(&mut argv)? else {
        return Ok(argv);
    };
    let text =
        fs::read_to_string(Path::new(&path)).map_err(|e| ConfigError(format!("cannot read config `{path}`: {e}")))?;
    let entries = parse(&text)?;

    let mut flags = Vec::new();
    let mut command = None;
    for (key, value) in entries {
        if key == "command" {
            command = Some(value);
            continue;
        }
        match value.as_str() {
            "true" => flags.push(format!("--{key}")),
            "false" => {}
            _ => {
                flags.push(format!("--{key}"));
                flags.push(value);
            }
        }
    }

    let position = argv.iter().position(|a| SUBCOMMANDS.contains(&a.as_str()));
    let at = match (position, command) {
        (Some(i), _) => i + 1,
        (None, Some(cmd)) => {
            if !SUBCOMMANDS.contains(&cmd.as_str()) {
                return Err(ConfigError(format!("config key `command`: unknown command `{cmd}`")));
            }
            argv.insert(1.min(argv.len()), cmd);
            2.min(argv.len())
        }
        (None, None) => {
            return Err(ConfigError(
                "no command given on the command line or in the config".into(),
            ))
        }
    };
    argv.splice(at..at, flags);
    Ok(argv)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn strings(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn parses_comments_and_flags() {
        let entries = parse("# header\np = 2\nrate = true  # trailing\n\nr_max=1e6\n").unwrap();
        assert_eq!(
            entries,
            vec![
                ("p".into(), "2".into()),
                ("rate".into(), "true".into()),
                ("r-max".into(), "1e6".into())
            ]
        );
        assert!(parse("p 2").unwrap_err().0.contains("line 1"));
    }

    #[test]
    fn splices_after_subcommand() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.conf");
        fs::write(&path, "p = 3\nrate = true\nmu = 0\n").unwrap();
        let argv = strings(&["growthlab", "sharp", "--config", path.to_str().unwrap(), "--p", "2"]);
        let out = assemble(argv).unwrap();
        assert_eq!(
            out,
            strings(&["growthlab", "sharp", "--p", "3", "--rate", "--mu", "0", "--p", "2"])
        );
    }

    #[test]
    fn command_from_config() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.conf");
        fs::write(&path, "command = liouville\ngrowth = 1.9\n").unwrap();
        let argv = strings(&["growthlab", &format!("--config={}", path.display())]);
        let out = assemble(argv).unwrap();
        assert_eq!(out, strings(&["growthlab", "liouville", "--growth", "1.9"]));
    }
}
