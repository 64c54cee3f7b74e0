//! `--config` files are spliced into the argument list as flags, placed
//! before the ones typed on the command line so that those win.

use std::fs;

use serde::Deserialize;
use serde_json::{Map, Value};

use crate::args::COMMANDS;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunConfigFile {
    command: Option<String>,
    #[serde(default)]
    params: Map<String, Value>,
    #[serde(default)]
    outputs: Map<String, Value>,
    seed: Option<u64>,
    workers: Option<usize>,
    /// Echoed by every artifact; accepted and ignored so artifacts can be replayed.
    #[serde(default, rename = "version")]
    _version: Option<String>,
}

fn flag_given(tokens: &[String], key: &str) -> bool {
    let flag = format!("--{key}");
    tokens
        .iter()
        .any(|t| *t == flag || t.starts_with(&format!("{flag}=")))
}

fn to_tokens(
    map: &Map<String, Value>,
    user: &[String],
    out: &mut Vec<String>,
) -> Result<(), String> {
    for (k, v) in map {
        let key = k.replace('_', "-");
        if flag_given(user, &key) {
            continue;
        }
        match v {
            Value::Null | Value::Bool(false) => {}
            Value::Bool(true) => out.push(format!("--{key}")),
            Value::Number(n) => out.push(format!("--{key}={n}")),
            Value::String(s) => out.push(format!("--{key}={s}")),
            _ => {
                return Err(format!(
                    "config value for {k:?} must be a string, number or boolean"
                ))
            }
        }
    }
    Ok(())
}

pub fn expand(argv: Vec<String>) -> Result<Vec<String>, String> {
    let mut user = Vec::new();
    let mut path = None;
    let mut it = argv.into_iter();
    let bin = it.next().unwrap_or_else(|| "chardyn".into());
    while let Some(t) = it.next() {
        if t == "--config" {
            path = Some(it.next().ok_or("--config needs a path")?);
        } else if let Some(p) = t.strip_prefix("--config=") {
            path = Some(p.to_string());
        } else {
            user.push(t);
        }
    }
    let Some(path) = path else {
        return Ok(std::iter::once(bin).chain(user).collect());
    };
    let text = fs::read_to_string(&path).map_err(|e| format!("cannot read config {path}: {e}"))?;
    let cfg: RunConfigFile =
        serde_json::from_str(&text).map_err(|e| format!("bad config {path}: {e}"))?;
    let mut globals = Vec::new();
    if let Some(s) = cfg.seed.filter(|_| !flag_given(&user, "seed")) {
        globals.push(format!("--seed={s}"));
    }
    if let Some(w) = cfg.workers.filter(|_| !flag_given(&user, "workers")) {
        globals.push(format!("--workers={w}"));
    }
    let mut params = Vec::new();
    to_tokens(&cfg.params, &user, &mut params)?;
    to_tokens(&cfg.outputs, &user, &mut params)?;
    let mut out = vec![bin];
    out.extend(globals);
    match user.iter().position(|t| COMMANDS.contains(&t.as_str())) {
        Some(k) => {
            out.extend(user[..=k].iter().cloned());
            out.extend(params);
            out.extend(user[k + 1..].iter().cloned());
        }
        None => {
            let command = cfg
                .command
                .ok_or("no command given on the command line or in the config")?;
            out.push(command);
            out.extend(params);
            out.extend(user);
        }
    }
    Ok(out)
}
