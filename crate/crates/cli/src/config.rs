//! `--config <json>` support: the JSON object is rewritten into ordinary
//! flags placed before the explicit ones, so explicit flags win.

use std::ffi::OsString;

use serde_json::Value;

use crate::{CliError, SUBCOMMANDS};

const GLOBAL_KEYS: [&str; 3] = ["seed", "out_dir", "threads"];

fn config_path(args: &[OsString]) -> Result<Option<OsString>, CliError> {
    let mut found = None;
    let mut i = 1;
    while i < args.len() {
        let a = args[i].to_string_lossy();
        if a == "--config" {
            let v = args.get(i + 1).ok_or_else(|| CliError::usage("--config needs a file argument"))?;
            found = Some(v.clone());
            i += 2;
            continue;
        }
        if let Some(v) = a.strip_prefix("--config=") {
            found = Some(OsString::from(v));
        }
        i += 1;
    }
    Ok(found)
}

fn value_tokens(key: &str, value: &Value) -> Result<Vec<String>, CliError> {
    let flag = format!("--{}", key.replace('_', "-"));
    let scalar = |v: &Value| -> Result<String, CliError> {
        match v {
            Value::Number(x) => Ok(x.to_string()),
            Value::String(s) => Ok(s.clone()),
            Value::Bool(b) => Ok(b.to_string()),
            _ => Err(CliError::usage(format!("config key `{key}`: unsupported value {v}"))),
        }
    };
    Ok(match value {
        Value::Null | Value::Bool(false) => Vec::new(),
        Value::Bool(true) => vec![flag],
        Value::Array(items) => {
            let parts: Vec<String> = items.iter().map(scalar).collect::<Result<_, _>>()?;
            vec![flag, parts.join(",")]
        }
        Value::Object(_) => return Err(CliError::usage(format!("config key `{key}`: nested objects are not supported"))),
        v => vec![flag, scalar(v)?],
    })
}

/// Expand the `--config` file named in `args`, if any, into flags.
pub fn merge_config(args: Vec<OsString>) -> Result<Vec<OsString>, CliError> {
    let Some(path) = config_path(&args)? else {
        return Ok(args);
    };
    let text = std::fs::read_to_string(&path).map_err(|e| CliError::io(&format!("reading config {}", path.to_string_lossy()), e))?;
    let json: Value = serde_json::from_str(&text).map_err(|e| CliError::usage(format!("config is not valid JSON: {e}")))?;
    let Value::Object(map) = json else {
        return Err(CliError::usage("config must be a JSON object"));
    };
    let mut globals = Vec::new();
    let mut params = Vec::new();
    for (key, value) in &map {
        let tokens = value_tokens(key, value)?;
        if GLOBAL_KEYS.contains(&key.as_str()) {
            globals.extend(tokens);
        } else {
            params.extend(tokens);
        }
    }
    let Some(sub) = args.iter().skip(1).position(|a| SUBCOMMANDS.contains(&a.to_string_lossy().as_ref())) else {
        return Ok(args);
    };
    let sub = sub + 1;
    let mut out: Vec<OsString> = Vec::with_capacity(args.len() + globals.len() + params.len());
    out.push(args[0].clone());
    out.extend(globals.into_iter().map(OsString::from));
    out.extend(args[1..=sub].iter().cloned());
    out.extend(params.into_iter().map(OsString::from));
    out.extend(args[sub + 1..].iter().cloned());
    Ok(out)
}
