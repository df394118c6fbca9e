//! `key = value` run files. Each key is a long flag name of the chosen
//! subcommand; flags given on the command line win over the file.

use std::path::Path;

use anyhow::{bail, Context, Result};

/// `(key, tokens)` per entry: `--key value`, or `--key` alone for `true`
/// and nothing for `false`.
pub fn file_arguments(path: &Path) -> Result<Vec<(String, Vec<String>)>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    parse(&text).with_context(|| format!("in config {}", path.display()))
}

fn parse(text: &str) -> Result<Vec<(String, Vec<String>)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            bail!("line {}: expected `key = value`, got `{line}`", i + 1);
        };
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() || key.starts_with('-') || key == "config" {
            bail!("line {}: invalid key `{key}`", i + 1);
        }
        let tokens = match value {
            "true" => vec![format!("--{key}")],
            "false" => vec![],
            _ => vec![format!("--{key}"), value.to_string()],
        };
        out.push((key.to_string(), tokens));
    }
    Ok(out)
}

/// Inserts the file arguments right after the subcommand, dropping keys the
/// command line already sets.
pub fn expand(args: Vec<String>, subcommands: &[&str]) -> Result<Vec<String>> {
    let mut config = None;
    let mut iter = args.iter().enumerate();
    while let Some((i, a)) = iter.next() {
        if a == "--config" {
            config = Some(args.get(i + 1).context("--config needs a path")?.clone());
            iter.next();
        } else if let Some(p) = a.strip_prefix("--config=") {
            config = Some(p.to_string());
        }
    }
    let Some(path) = config else { return Ok(args) };
    let Some(pos) = args.iter().position(|a| subcommands.contains(&a.as_str())) else {
        return Ok(args);
    };
    let given: Vec<&str> = args[pos + 1..]
        .iter()
        .filter_map(|a| a.strip_prefix("--").map(|k| k.split('=').next().unwrap_or(k)))
        .chain(args[pos + 1..].iter().any(|a| a == "-L").then_some("L"))
        .collect();
    let mut out = args[..=pos].to_vec();
    for (key, tokens) in file_arguments(Path::new(&path))? {
        if !given.contains(&key.as_str()) {
            out.extend(tokens);
        }
    }
    out.extend_from_slice(&args[pos + 1..]);
    Ok(out)
}
