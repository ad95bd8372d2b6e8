//! `--config path` files: flat `key=value` lines mirroring long flags.
//!
//! ```text
//! # comment
//! command = count
//! curve = poly:0,0,1
//! interval = 0,1
//! Q = 3
//! delta = 1/10
//! timings = false
//! ```
//!
//! The file expands to flags placed before the explicit command-line flags,
//! so explicit flags win.

use std::fs;

use crate::error::{Error, Result};

const SUBCOMMANDS: [&str; 10] = [
    "count",
    "scan",
    "expsum",
    "discrepancy",
    "poisson",
    "vdc",
    "dualsum",
    "fit",
    "examples",
    "dual",
];

/// Global flags that take a value, so their value is never mistaken for a
/// subcommand name.
const VALUED_GLOBALS: [&str; 5] = ["--config", "--threads", "--out", "--format", "--emit-plot"];

/// Parsed config file: optional subcommand path and flag tokens.
#[derive(Debug, Default, PartialEq, Eq)]
pub struct ConfigFile {
    pub command: Vec<String>,
    pub flags: Vec<String>,
}

pub fn parse_config(text: &str) -> Result<ConfigFile> {
    let mut cfg = ConfigFile::default();
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("config line {}: expected key=value", no + 1)))?;
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() {
            return Err(Error::Parse(format!("config line {}: empty key", no + 1)));
        }
        match (key, value) {
            ("command", v) => cfg.command = v.split_whitespace().map(String::from).collect(),
            ("config", _) => {
                return Err(Error::Parse("config files cannot include other config files".into()))
            }
            (_, "true") => cfg.flags.push(format!("--{key}")),
            (_, "false") => {}
            _ => {
                cfg.flags.push(format!("--{key}"));
                cfg.flags.push(value.to_string());
            }
        }
    }
    Ok(cfg)
}

/// Splits `args` (without the program name) into the subcommand path, the
/// `--config` path if any, and the remaining flags.
fn split_args(args: &[String]) -> (Vec<String>, Option<String>, Vec<String>) {
    let mut command = Vec::new();
    let mut config = None;
    let mut rest = Vec::new();
    let mut i = 0;
    while i < args.len() {
        let a = &args[i];
        if let Some(path) = a.strip_prefix("--config=") {
            config = Some(path.to_string());
        } else if a == "--config" {
            config = args.get(i + 1).cloned();
            i += 1;
        } else if command.is_empty() && SUBCOMMANDS.contains(&a.as_str()) {
            command.push(a.clone());
            if a == "examples" {
                if let Some(next) = args.get(i + 1).filter(|n| !n.starts_with('-')) {
                    command.push(next.clone());
                    i += 1;
                }
            }
        } else {
            rest.push(a.clone());
            if command.is_empty() && VALUED_GLOBALS.contains(&a.as_str()) {
                if let Some(v) = args.get(i + 1) {
                    rest.push(v.clone());
                    i += 1;
                }
            }
        }
        i += 1;
    }
    (command, config, rest)
}

/// Expands `--config` into flags. The result is
/// `program, subcommand path, config flags, explicit flags`.
pub fn expand_args(argv: Vec<String>) -> Result<Vec<String>> {
    let mut it = argv.into_iter();
    let program = it.next().unwrap_or_else(|| "nearcurve".into());
    let args: Vec<String> = it.collect();
    let (mut command, config, rest) = split_args(&args);
    let mut out = vec![program];
    let mut flags = Vec::new();
    if let Some(path) = config {
        let text = fs::read_to_string(&path)
            .map_err(|e| Error::Parse(format!("cannot read config `{path}`: {e}")))?;
        let cfg = parse_config(&text)?;
        if command.is_empty() {
            command = cfg.command;
        } else if !cfg.command.is_empty() && cfg.command != command {
            return Err(Error::Parse(format!(
                "config names command `{}` but the command line names `{}`",
                cfg.command.join(" "),
                command.join(" ")
            )));
        }
        flags = cfg.flags;
    }
    out.extend(command);
    out.extend(flags);
    out.extend(rest);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|x| x.to_string()).collect()
    }

    #[test]
    fn parses_flags_and_booleans() {
        let c = parse_config("# run\ncommand = examples parabola\nQ = 100\ntimings=true\nx=false\n").unwrap();
        assert_eq!(c.command, s(&["examples", "parabola"]));
        assert_eq!(c.flags, s(&["--Q", "100", "--timings"]));
        assert!(parse_config("novalue").is_err());
    }

    #[test]
    fn config_flags_precede_explicit_ones() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.cfg");
        fs::write(&path, "command=count\nQ=3\ndelta=1/10\n").unwrap();
        let p = path.to_str().unwrap();
        let out = expand_args(s(&["nc", "--threads", "2", "--config", p, "--Q", "5"])).unwrap();
        assert_eq!(
            out,
            s(&["nc", "count", "--Q", "3", "--delta", "1/10", "--threads", "2", "--Q", "5"])
        );
        let out = expand_args(s(&["nc", "count", &format!("--config={p}")])).unwrap();
        assert_eq!(out, s(&["nc", "count", "--Q", "3", "--delta", "1/10"]));
        assert!(expand_args(s(&["nc", "scan", "--config", p])).is_err());
    }

    #[test]
    fn without_config_args_pass_through() {
        let argv = s(&["nc", "--out", "count", "count", "--Q", "3"]);
        assert_eq!(expand_args(argv.clone()).unwrap(), s(&["nc", "count", "--out", "count", "--Q", "3"]));
    }
}
