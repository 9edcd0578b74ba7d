//! `key=value` instance files, merged into the argument list ahead of the
//! command-line flags so that the flags win.

use std::ffi::OsString;

use anyhow::{bail, Context, Result};

pub const SUBCOMMANDS: [&str; 5] = ["exact", "couple", "bounds", "sample", "curves"];

/// Parse `key=value` lines; blank lines and `#` comments are skipped.
pub fn parse(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            bail!("line {}: expected key=value", k + 1);
        };
        let key = key.trim().replace('_', "-");
        if key.is_empty() || key == "config" {
            bail!("line {}: bad key {key:?}", k + 1);
        }
        out.push((key, value.trim().to_string()));
    }
    Ok(out)
}

fn config_path(args: &[OsString]) -> Option<OsString> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            return it.next().cloned();
        }
        if let Some(p) = s.strip_prefix("--config=") {
            return Some(p.into());
        }
    }
    None
}

/// Splice the pairs from `--config FILE` right after the subcommand name.
/// Flags parse with later-wins semantics, so anything given explicitly
/// overrides the file.
pub fn merge(args: Vec<OsString>) -> Result<Vec<OsString>> {
    let Some(path) = config_path(&args) else {
        return Ok(args);
    };
    let text = std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.to_string_lossy()))?;
    let pairs = parse(&text)?;
    let Some(at) = args.iter().position(|a| SUBCOMMANDS.contains(&a.to_string_lossy().as_ref())) else {
        return Ok(args);
    };
    let mut extra = Vec::new();
    for (k, v) in pairs {
        match v.as_str() {
            "true" => extra.push(format!("--{k}").into()),
            "false" => {}
            _ => {
                extra.push(format!("--{k}").into());
                extra.push(v.into());
            }
        }
    }
    let mut out = args[..=at].to_vec();
    out.extend(extra);
    out.extend_from_slice(&args[at + 1..]);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_pairs() {
        let p = parse("# hexagon\nfamily = hex\na=2\n\nsweep_mode=random # trailing\n").unwrap();
        assert_eq!(p, vec![
            ("family".into(), "hex".into()),
            ("a".into(), "2".into()),
            ("sweep-mode".into(), "random".into()),
        ]);
        assert!(parse("a 2").is_err());
    }
}
