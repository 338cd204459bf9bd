use std::path::Path;

use clap::parser::ValueSource;
use clap::ArgMatches;
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::args::{Cmd, Globals};
use crate::output::CliError;

const SUBCOMMANDS: [&str; 6] = ["field", "cassels", "model", "limit", "dense", "bs"];
const GLOBAL_KEYS: [&str; 4] = ["seed", "out", "threads", "assert"];

pub fn load(path: &Path) -> Result<Map<String, Value>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    match serde_json::from_str(&text) {
        Ok(Value::Object(m)) => Ok(m),
        Ok(_) => Err(CliError::Usage("config must be a JSON object".into())),
        Err(e) => Err(CliError::Usage(format!("config {}: {e}", path.display()))),
    }
}

fn from_cli(m: &ArgMatches, id: &str) -> bool {
    m.try_get_raw(id).is_ok() && m.value_source(id) == Some(ValueSource::CommandLine)
}

/// Overlay `block` onto `args`, skipping keys the user set on the command line.
fn overlay<T: Serialize + DeserializeOwned>(args: T, m: &[&ArgMatches], block: &Map<String, Value>) -> Result<T, CliError> {
    let Value::Object(mut v) = serde_json::to_value(args).expect("args serialize") else { unreachable!() };
    for (k, val) in block {
        if !v.contains_key(k) {
            return Err(CliError::Usage(format!("unknown config key {k:?}")));
        }
        if !m.iter().any(|m| from_cli(m, k)) {
            v.insert(k.clone(), val.clone());
        }
    }
    serde_json::from_value(Value::Object(v)).map_err(|e| CliError::Usage(format!("config: {e}")))
}

fn split(file: &Map<String, Value>, name: &str) -> Result<(Map<String, Value>, Map<String, Value>), CliError> {
    let mut globals = Map::new();
    let mut block = Map::new();
    for (k, v) in file {
        if GLOBAL_KEYS.contains(&k.as_str()) {
            globals.insert(k.clone(), v.clone());
        } else if k == name {
            match v {
                Value::Object(b) => block.extend(b.clone()),
                _ => return Err(CliError::Usage(format!("config block {k:?} must be an object"))),
            }
        } else if !SUBCOMMANDS.contains(&k.as_str()) {
            block.insert(k.clone(), v.clone());
        }
    }
    Ok((globals, block))
}

pub fn merge_globals(g: Globals, top: &ArgMatches, sub: &ArgMatches, file: Option<&Map<String, Value>>) -> Result<Globals, CliError> {
    let Some(file) = file else { return Ok(g) };
    let name = top.subcommand_name().unwrap_or_default();
    let config = g.config.clone();
    let mut g = overlay(g, &[top, sub], &split(file, name)?.0)?;
    g.config = config;
    Ok(g)
}

pub fn merge_command(cmd: Cmd, name: &str, sub: &ArgMatches, file: Option<&Map<String, Value>>) -> Result<Cmd, CliError> {
    let Some(file) = file else { return Ok(cmd) };
    let (_, block) = split(file, name)?;
    let m = [sub];
    Ok(match cmd {
        Cmd::Field(a) => Cmd::Field(overlay(a, &m, &block)?),
        Cmd::Cassels(a) => Cmd::Cassels(overlay(a, &m, &block)?),
        Cmd::Model(a) => Cmd::Model(overlay(a, &m, &block)?),
        Cmd::Limit(a) => Cmd::Limit(overlay(a, &m, &block)?),
        Cmd::Dense(a) => Cmd::Dense(overlay(a, &m, &block)?),
        Cmd::Bs(a) => Cmd::Bs(overlay(a, &m, &block)?),
    })
}
