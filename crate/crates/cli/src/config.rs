//! Key-value config files.
//!
//! One `key = value` pair per line; `#` starts a comment. Keys are the long flag
//! names, with `_` accepted for `-`. The pairs are spliced in front of the
//! command-line flags, so flags given explicitly win. One file can serve several
//! commands: keys that only other commands take are skipped, keys no command takes
//! are rejected.

use std::path::Path;

use crate::error::CliError;

pub fn parse(text: &str, origin: &Path) -> Result<Vec<(String, String)>, CliError> {
    let mut pairs = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(CliError::Config(format!("{}:{}: expected `key = value`", origin.display(), i + 1)));
        };
        let key = k.trim().replace('_', "-");
        if key.is_empty() || key == "config" {
            return Err(CliError::Config(format!("{}:{}: invalid key `{}`", origin.display(), i + 1, k.trim())));
        }
        pairs.push((key, v.trim().to_string()));
    }
    Ok(pairs)
}

fn config_path(args: &[String]) -> Option<String> {
    let mut it = args.iter();
    let mut found = None;
    while let Some(a) = it.next() {
        if a == "--config" {
            found = it.next().cloned();
        } else if let Some(p) = a.strip_prefix("--config=") {
            found = Some(p.to_string());
        }
    }
    found
}

fn longs(cmd: &clap::Command) -> Vec<String> {
    cmd.get_arguments().filter_map(|a| a.get_long()).map(String::from).collect()
}

/// Splices the pairs of the `--config` file, if any, between the subcommand and its
/// flags.
pub fn expand(argv: Vec<String>, cli: &clap::Command) -> Result<Vec<String>, CliError> {
    if argv.len() < 2 || argv[1].starts_with('-') {
        return Ok(argv);
    }
    let Some(sub) = cli.find_subcommand(&argv[1]) else {
        return Ok(argv);
    };
    let Some(path) = config_path(&argv[2..]) else {
        return Ok(argv);
    };
    let text = std::fs::read_to_string(&path).map_err(|e| CliError::Io { path: path.clone().into(), source: e })?;
    let mut out = argv[..2].to_vec();
    let own = longs(sub);
    let any: Vec<String> = cli.get_subcommands().flat_map(longs).collect();
    for (k, v) in parse(&text, Path::new(&path))? {
        if own.contains(&k) {
            out.push(format!("--{k}"));
            out.push(v);
        } else if !any.contains(&k) {
            return Err(CliError::Config(format!("{path}: unknown key `{k}`")));
        }
    }
    out.extend_from_slice(&argv[2..]);
    Ok(out)
}

/// Renders pairs in the format read by [`parse`].
pub fn render(pairs: &[(&str, String)]) -> String {
    pairs.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
}
