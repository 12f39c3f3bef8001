//! Report records and their three encodings.
//!
//! A run produces a stream of records: rows, warnings, and one closing
//! summary. Each record is written as soon as it exists, so scans can be
//! interrupted without losing finished blocks. Human output is rendered
//! record by record from the same values that jsonl carries, which makes
//! `render_human(parse_jsonl(jsonl)) == human` hold exactly.

use std::io::{self, Write};

use anyhow::{bail, Context, Result};
use serde_json::{Map, Value};

pub const SCHEMA_VERSION: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Human,
    Jsonl,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "human" => Ok(Format::Human),
            "jsonl" => Ok(Format::Jsonl),
            "csv" => Ok(Format::Csv),
            _ => Err(format!("unknown format {s:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Record {
    Row(Map<String, Value>),
    Warning(String),
    Summary { ok: bool, fields: Map<String, Value> },
}

/// Command name plus the arguments that shaped the result.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Echo {
    pub command: String,
    pub args: String,
}

pub fn cell(v: &Value) -> String {
    match v {
        Value::Null => "-".into(),
        Value::String(s) => s.clone(),
        Value::Array(items) if items.is_empty() => "-".into(),
        Value::Array(items) => items.iter().map(cell).collect::<Vec<_>>().join(" "),
        Value::Object(m) => m
            .iter()
            .map(|(k, v)| format!("{k}:{}", cell(v)))
            .collect::<Vec<_>>()
            .join(" "),
        other => other.to_string(),
    }
}

const MIN_WIDTH: usize = 6;

/// Human renderer state: the columns of the current table.
#[derive(Debug, Default)]
pub struct HumanState {
    columns: Option<Vec<String>>,
}

fn pad_line(cells: &[String], widths: &[usize]) -> String {
    let mut line = String::new();
    for (i, c) in cells.iter().enumerate() {
        if i + 1 == cells.len() {
            line.push_str(c);
        } else {
            line.push_str(&format!("{c:<w$}  ", w = widths[i]));
        }
    }
    line
}

impl HumanState {
    pub fn render(&mut self, rec: &Record) -> String {
        match rec {
            Record::Row(fields) => {
                let keys: Vec<String> = fields.keys().cloned().collect();
                let widths: Vec<usize> = keys.iter().map(|k| k.len().max(MIN_WIDTH)).collect();
                let mut out = String::new();
                if self.columns.as_ref() != Some(&keys) {
                    out.push_str(&pad_line(&keys, &widths));
                    out.push('\n');
                    self.columns = Some(keys);
                }
                let cells: Vec<String> = fields.values().map(cell).collect();
                out.push_str(&pad_line(&cells, &widths));
                out.push('\n');
                out
            }
            Record::Warning(msg) => format!("warning: {msg}\n"),
            Record::Summary { ok, fields } => {
                self.columns = None;
                let mut out = String::from("\n");
                for (k, v) in fields {
                    out.push_str(&format!("{k}: {}\n", cell(v)));
                }
                out.push_str(&format!("ok: {ok}\n"));
                out
            }
        }
    }
}

pub fn human_header(echo: &Echo) -> String {
    format!("# {} {}\n", echo.command, echo.args).replace(" \n", "\n")
}

pub fn jsonl_line(echo: &Echo, rec: &Record) -> String {
    let mut m = Map::new();
    m.insert("schema_version".into(), SCHEMA_VERSION.into());
    m.insert("command".into(), echo.command.clone().into());
    m.insert("args".into(), echo.args.clone().into());
    match rec {
        Record::Row(fields) => {
            m.insert("kind".into(), "row".into());
            m.insert("data".into(), Value::Object(fields.clone()));
        }
        Record::Warning(msg) => {
            m.insert("kind".into(), "warning".into());
            m.insert("message".into(), msg.clone().into());
        }
        Record::Summary { ok, fields } => {
            m.insert("kind".into(), "summary".into());
            m.insert("ok".into(), (*ok).into());
            m.insert("data".into(), Value::Object(fields.clone()));
        }
    }
    let mut line = Value::Object(m).to_string();
    line.push('\n');
    line
}

/// Parses jsonl output back into records.
pub fn parse_jsonl(text: &str) -> Result<(Echo, Vec<Record>)> {
    let mut echo = None;
    let mut records = Vec::new();
    for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let v: Value = serde_json::from_str(line).with_context(|| format!("line {}", i + 1))?;
        let get = |k: &str| v.get(k).with_context(|| format!("line {}: missing {k}", i + 1));
        if get("schema_version")?.as_u64() != Some(SCHEMA_VERSION) {
            bail!("line {}: unsupported schema version", i + 1);
        }
        let this = Echo {
            command: get("command")?.as_str().unwrap_or_default().to_string(),
            args: get("args")?.as_str().unwrap_or_default().to_string(),
        };
        echo.get_or_insert(this);
        let data = || -> Result<Map<String, Value>> {
            get("data")?.as_object().cloned().context("data is not an object")
        };
        records.push(match get("kind")?.as_str() {
            Some("row") => Record::Row(data()?),
            Some("warning") => Record::Warning(get("message")?.as_str().unwrap_or_default().into()),
            Some("summary") => Record::Summary {
                ok: get("ok")?.as_bool().context("ok is not a boolean")?,
                fields: data()?,
            },
            other => bail!("line {}: unknown record kind {other:?}", i + 1),
        });
    }
    Ok((echo.context("no records")?, records))
}

pub fn render_human(echo: &Echo, records: &[Record]) -> String {
    let mut state = HumanState::default();
    let mut out = human_header(echo);
    for r in records {
        out.push_str(&state.render(r));
    }
    out
}

/// Writes records to `out` as they arrive. Warnings and the summary of
/// csv output go to `diag`, keeping `out` a plain table.
pub struct Emitter<'a> {
    format: Format,
    echo: Echo,
    out: Box<dyn Write + 'a>,
    diag: Box<dyn Write + 'a>,
    human: HumanState,
    csv_columns: Option<Vec<String>>,
    started: bool,
    ok: bool,
}

impl<'a> Emitter<'a> {
    pub fn new(format: Format, echo: Echo, out: Box<dyn Write + 'a>, diag: Box<dyn Write + 'a>) -> Self {
        Emitter {
            format,
            echo,
            out,
            diag,
            human: HumanState::default(),
            csv_columns: None,
            started: false,
            ok: true,
        }
    }

    pub fn stdout(format: Format, echo: Echo) -> Emitter<'static> {
        Emitter::new(format, echo, Box::new(io::stdout().lock()), Box::new(io::stderr()))
    }

    /// Whether every summary so far reported success.
    pub fn ok(&self) -> bool {
        self.ok
    }

    fn start(&mut self) -> io::Result<()> {
        if !self.started && self.format == Format::Human {
            self.out.write_all(human_header(&self.echo).as_bytes())?;
        }
        self.started = true;
        Ok(())
    }

    pub fn emit(&mut self, rec: Record) -> io::Result<()> {
        self.start()?;
        if let Record::Summary { ok, .. } = &rec {
            self.ok &= ok;
        }
        match self.format {
            Format::Human => {
                let text = self.human.render(&rec);
                self.out.write_all(text.as_bytes())
            }
            Format::Jsonl => self.out.write_all(jsonl_line(&self.echo, &rec).as_bytes()),
            Format::Csv => match &rec {
                Record::Row(fields) => {
                    let keys: Vec<String> = fields.keys().cloned().collect();
                    let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
                    if self.csv_columns.as_ref() != Some(&keys) {
                        w.write_record(&keys)?;
                        self.csv_columns = Some(keys);
                    }
                    w.write_record(fields.values().map(cell))?;
                    let bytes = w.into_inner().map_err(|e| e.into_error())?;
                    self.out.write_all(&bytes)
                }
                other => {
                    let text = HumanState::default().render(other);
                    for line in text.lines().filter(|l| !l.is_empty()) {
                        writeln!(self.diag, "# {line}")?;
                    }
                    Ok(())
                }
            },
        }
    }

    pub fn row(&mut self, fields: Map<String, Value>) -> io::Result<()> {
        self.emit(Record::Row(fields))
    }

    pub fn warning(&mut self, msg: impl Into<String>) -> io::Result<()> {
        self.emit(Record::Warning(msg.into()))
    }

    pub fn summary(&mut self, ok: bool, fields: Map<String, Value>) -> io::Result<()> {
        self.emit(Record::Summary { ok, fields })
    }

    pub fn flush(&mut self) -> io::Result<()> {
        self.start()?;
        self.out.flush()?;
        self.diag.flush()
    }

    pub fn diag(&mut self) -> &mut dyn Write {
        &mut *self.diag
    }
}

/// Builds a field map in insertion order.
#[macro_export]
macro_rules! fields {
    ($($k:expr => $v:expr),* $(,)?) => {{
        #[allow(unused_mut)]
        let mut m = serde_json::Map::new();
        $( m.insert($k.to_string(), serde_json::json!($v)); )*
        m
    }};
}
