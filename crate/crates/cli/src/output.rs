use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{Map, Value};

use crate::args::Globals;

#[derive(Debug)]
pub enum CliError {
    Clap(clap::Error),
    Usage(String),
    Compute(hzlab::Error),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Clap(_) | CliError::Usage(_) => 2,
            CliError::Compute(e) => match e {
                hzlab::Error::InvalidParam(_) | hzlab::Error::InvalidField { .. } | hzlab::Error::PoleAt1 => 2,
                _ => 1,
            },
            CliError::Io(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Clap(e) => write!(f, "{e}"),
            CliError::Usage(m) | CliError::Io(m) => f.write_str(m),
            CliError::Compute(e) => write!(f, "{e}"),
        }
    }
}

impl From<hzlab::Error> for CliError {
    fn from(e: hzlab::Error) -> Self {
        CliError::Compute(e)
    }
}

pub fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Bulk rows written next to the JSON report.
pub struct Table {
    pub path: PathBuf,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

pub struct Report {
    pub body: Map<String, Value>,
    pub pass: bool,
    pub table: Option<Table>,
}

impl Report {
    pub fn new(body: impl Serialize, pass: bool) -> Self {
        let Value::Object(body) = serde_json::to_value(body).expect("report serializes") else {
            panic!("report must be a JSON object")
        };
        Report { body, pass, table: None }
    }

    pub fn with_table(mut self, path: Option<&Path>, header: Vec<&'static str>, rows: Vec<Vec<String>>) -> Self {
        self.table = path.map(|p| Table { path: p.to_path_buf(), header, rows });
        self
    }
}

pub fn emit(command: &str, report: &Report, g: &Globals) -> Result<(), CliError> {
    let mut body = report.body.clone();
    body.insert("schema".into(), "v1".into());
    body.insert("command".into(), command.into());
    body.insert("pass".into(), report.pass.into());
    let text = serde_json::to_string_pretty(&Value::Object(body)).expect("JSON encodes") + "\n";
    match &g.out {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?,
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| CliError::Io(e.to_string()))?,
    }
    if let Some(t) = &report.table {
        let io = |e: csv::Error| CliError::Io(format!("{}: {e}", t.path.display()));
        let mut w = csv::Writer::from_path(&t.path).map_err(io)?;
        w.write_record(&t.header).map_err(io)?;
        for r in &t.rows {
            w.write_record(r).map_err(io)?;
        }
        w.flush().map_err(|e| CliError::Io(e.to_string()))?;
    }
    Ok(())
}
