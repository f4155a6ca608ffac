use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use serde::Serialize;
use serde_json::Value;

use crate::config::{Format, RunConfig};
use crate::CliError;

/// Environment variable naming the default output directory.
pub const OUTPUT_DIR_VAR: &str = "DEFECT_OUTPUT_DIR";

/// Where the artifact of a run goes: `--output`, else a file named after
/// the command under `DEFECT_OUTPUT_DIR`, else standard output.
pub fn destination(cfg: &RunConfig, extension: &str) -> Option<PathBuf> {
    let dir = std::env::var_os(OUTPUT_DIR_VAR).map(PathBuf::from);
    match (&cfg.output, dir) {
        (Some(p), Some(dir)) if p.is_relative() => Some(dir.join(p)),
        (Some(p), _) => Some(p.clone()),
        (None, Some(dir)) => Some(dir.join(format!("{}.{extension}", cfg.command().name()))),
        (None, None) => None,
    }
}

pub fn open(path: Option<&PathBuf>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => {
            if let Some(parent) = p.parent().filter(|p| !p.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent)
                    .map_err(|e| CliError::Io(format!("{}: {e}", parent.display())))?;
            }
            let f = File::create(p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
            Box::new(BufWriter::new(f))
        }
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

/// A float with 17 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Tabular result; serialized as CSV with a config comment or as JSON.
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

pub enum Cell {
    Int(u64),
    Float(f64),
    Text(String),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => num(*v),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => Value::from(*v),
            Cell::Float(v) => serde_json::Number::from_f64(*v).map_or(Value::Null, Value::Number),
            Cell::Text(s) => Value::from(s.as_str()),
            Cell::Empty => Value::Null,
        }
    }
}

pub fn config_line(cfg: &RunConfig) -> String {
    format!(
        "# config: {}",
        serde_json::to_string(cfg).expect("config serializes")
    )
}

pub fn write_table(cfg: &RunConfig, table: &Table, extra: Option<Value>) -> Result<(), CliError> {
    let format = cfg.format.unwrap_or(Format::Csv);
    let ext = if format == Format::Csv { "csv" } else { "json" };
    let path = destination(cfg, ext);
    let mut out = open(path.as_ref())?;
    let io_err = |e: io::Error| CliError::Io(e.to_string());
    match format {
        Format::Csv => {
            writeln!(out, "{}", config_line(cfg)).map_err(io_err)?;
            writeln!(out, "{}", table.columns.join(",")).map_err(io_err)?;
            for row in &table.rows {
                let line: Vec<String> = row.iter().map(Cell::csv).collect();
                writeln!(out, "{}", line.join(",")).map_err(io_err)?;
            }
        }
        Format::Json => {
            let rows: Vec<Value> = table
                .rows
                .iter()
                .map(|r| {
                    let map = table
                        .columns
                        .iter()
                        .zip(r)
                        .map(|(c, v)| (c.to_string(), v.json()))
                        .collect::<serde_json::Map<_, _>>();
                    Value::Object(map)
                })
                .collect();
            let mut doc = serde_json::json!({ "config": cfg, "rows": rows });
            if let Some(extra) = extra {
                doc["summary"] = extra;
            }
            serde_json::to_writer_pretty(&mut out, &doc)
                .map_err(|e| CliError::Io(e.to_string()))?;
            writeln!(out).map_err(io_err)?;
        }
    }
    out.flush().map_err(io_err)
}

/// A JSON document `{config, result}`, whatever the requested format.
pub fn write_json<T: Serialize>(cfg: &RunConfig, result: &T) -> Result<(), CliError> {
    let path = destination(cfg, "json");
    let mut out = open(path.as_ref())?;
    let doc = serde_json::json!({ "config": cfg, "result": result });
    serde_json::to_writer_pretty(&mut out, &doc).map_err(|e| CliError::Io(e.to_string()))?;
    writeln!(out).map_err(|e| CliError::Io(e.to_string()))?;
    out.flush().map_err(|e| CliError::Io(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for x in [
            std::f64::consts::PI,
            1.0 / 3.0,
            12.111438819668401,
            -2.5e-300,
        ] {
            let s = num(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
            let mantissa = s.split('e').next().unwrap().replace(['-', '.'], "");
            assert_eq!(mantissa.len(), 17);
        }
    }
}
