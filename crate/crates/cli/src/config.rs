//! `--config FILE` support: each `key = value` line of the file becomes a
//! `--key value` flag placed before the explicit flags, so the command line
//! wins on conflicts.

use std::ffi::OsString;

use anyhow::{Context, Result};
use sbm_core::io::parse_key_values;

pub fn expand(args: Vec<OsString>) -> Result<Vec<OsString>> {
    let mut path = None;
    let mut rest = Vec::with_capacity(args.len());
    let mut it = args.into_iter();
    while let Some(arg) = it.next() {
        let s = arg.to_string_lossy();
        if s == "--config" {
            path = Some(it.next().context("--config needs a file")?);
        } else if let Some(p) = s.strip_prefix("--config=") {
            path = Some(OsString::from(p));
        } else {
            rest.push(arg);
        }
    }
    let Some(path) = path else {
        return Ok(rest);
    };
    let text = std::fs::read_to_string(&path)
        .with_context(|| format!("reading {}", path.to_string_lossy()))?;
    let mut flags = Vec::new();
    for (_, key, value) in parse_key_values(&text)? {
        let flag = format!("--{}", key.replace('_', "-"));
        match value.as_str() {
            "true" => flags.push(OsString::from(flag)),
            "false" => {}
            _ => {
                flags.push(OsString::from(flag));
                flags.push(OsString::from(value));
            }
        }
    }
    // program name, subcommand, config flags, then explicit flags
    let split = rest.len().min(2);
    let mut out: Vec<OsString> = rest[..split].to_vec();
    out.extend(flags);
    out.extend(rest[split..].iter().cloned());
    Ok(out)
}
