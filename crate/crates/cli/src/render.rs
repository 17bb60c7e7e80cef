//! Human-readable tables and CSV for batches of results of one kind.

use std::collections::{BTreeMap, BTreeSet};
use std::io::IsTerminal;

use serde_json::Value;

use crate::job::CliError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

/// `MUKAI_COLOR`: `auto` (default) colours only terminals.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColorMode {
    Auto,
    Always,
    Never,
}

impl ColorMode {
    pub fn from_env() -> Result<ColorMode, CliError> {
        match std::env::var("MUKAI_COLOR") {
            Err(_) => Ok(ColorMode::Auto),
            Ok(v) => match v.as_str() {
                "" | "auto" => Ok(ColorMode::Auto),
                "always" => Ok(ColorMode::Always),
                "never" => Ok(ColorMode::Never),
                other => Err(CliError::input(
                    "invalid-env",
                    format!("MUKAI_COLOR must be auto, always or never, got {other:?}"),
                    None,
                )),
            },
        }
    }

    pub fn enabled(self) -> bool {
        match self {
            ColorMode::Auto => std::io::stdout().is_terminal(),
            ColorMode::Always => true,
            ColorMode::Never => false,
        }
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Bool(b) => if *b { "yes" } else { "no" }.into(),
        Value::Number(n) => n.to_string(),
        Value::Object(m) if m.contains_key("text") => cell(&m["text"]),
        other => other.to_string(),
    }
}

fn results_of_one_kind(results: &[Value]) -> Result<(String, Vec<&Value>), CliError> {
    let mut kind: Option<&str> = None;
    let mut out = Vec::new();
    for (i, r) in results.iter().enumerate() {
        let path = Some(format!("results[{i}]"));
        let cmd = r
            .get("command")
            .and_then(Value::as_str)
            .ok_or_else(|| CliError::input("schema", "a result needs a `command` field", path.clone()))?;
        if r.get("ok") != Some(&Value::Bool(true)) {
            return Err(CliError::input("failed-result", format!("result {i} is an error and has no table"), path));
        }
        match kind {
            None => kind = Some(cmd),
            Some(k) if k != cmd => {
                return Err(CliError::input(
                    "mixed-kinds",
                    format!("cannot tabulate `{k}` and `{cmd}` results together"),
                    path,
                ))
            }
            _ => {}
        }
        out.push(r.get("result").ok_or_else(|| CliError::input("schema", "missing `result`", path.clone()))?);
    }
    let kind = kind.ok_or_else(|| CliError::input("empty-report", "no results to report", None))?;
    Ok((kind.to_string(), out))
}

pub fn build_table(results: &[Value]) -> Result<Table, CliError> {
    let (kind, results) = results_of_one_kind(results)?;
    Ok(match kind.as_str() {
        "classify" => classify_table(&results),
        "deform" => deform_table(&results),
        _ => generic_table(&results),
    })
}

fn strings(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|x| x.to_string()).collect()
}

fn classify_table(results: &[&Value]) -> Table {
    let mut rows = Vec::new();
    for r in results {
        let v = cell(&r["v"]);
        for verdict in r["verdicts"].as_array().into_iter().flatten() {
            let target = &verdict["target"];
            rows.push(vec![
                v.clone(),
                cell(&verdict["theorem"]),
                cell(&verdict["applicable"]),
                cell(&verdict["sign"]),
                cell(&target["kind"]),
                cell(&target["vector"]),
            ]);
        }
    }
    Table { header: strings(&["v", "theorem", "applicable", "sign", "kind", "target"]), rows }
}

/// One row per invariant tuple, listing the vectors that share it.
fn deform_table(results: &[&Value]) -> Table {
    let mut groups: BTreeMap<String, (String, Vec<String>)> = BTreeMap::new();
    for r in results {
        for c in r["classes"].as_array().into_iter().flatten() {
            let key = c["class"]
                .as_object()
                .map(|m| m.iter().map(|(k, v)| format!("{k}={}", cell(v))).collect::<Vec<_>>().join(", "))
                .unwrap_or_default();
            let entry = groups.entry(key).or_insert_with(|| (cell(&c["model"]), Vec::new()));
            entry.1.push(cell(&c["v"]));
        }
    }
    let rows =
        groups.into_iter().map(|(key, (model, vs))| vec![key, model, vs.len().to_string(), vs.join("; ")]).collect();
    Table { header: strings(&["invariants", "model", "count", "vectors"]), rows }
}

fn generic_table(results: &[&Value]) -> Table {
    let keys: BTreeSet<&String> = results.iter().filter_map(|r| r.as_object()).flat_map(|m| m.keys()).collect();
    let header: Vec<String> = keys.iter().map(|k| k.to_string()).collect();
    let rows =
        results.iter().map(|r| header.iter().map(|k| r.get(k).map(cell).unwrap_or_default()).collect()).collect();
    Table { header, rows }
}

fn paint(text: &str, padded: String, color: bool) -> String {
    if !color {
        return padded;
    }
    match text {
        "yes" => format!("\x1b[32m{padded}\x1b[0m"),
        "no" => format!("\x1b[2m{padded}\x1b[0m"),
        _ => padded,
    }
}

pub fn format_table(t: &Table, color: bool) -> String {
    let widths: Vec<usize> = (0..t.header.len())
        .map(|j| {
            std::iter::once(&t.header[j])
                .chain(t.rows.iter().map(|r| &r[j]))
                .map(|c| c.chars().count())
                .max()
                .unwrap_or(0)
        })
        .collect();
    let line = |cells: &[String], color: bool| -> String {
        let parts: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, &w)| paint(c, format!("{c}{}", " ".repeat(w - c.chars().count())), color))
            .collect();
        parts.join("  ").trim_end().to_string()
    };
    let mut out = vec![line(&t.header, false)];
    out.push(widths.iter().map(|&w| "-".repeat(w)).collect::<Vec<_>>().join("  "));
    out.extend(t.rows.iter().map(|r| line(r, color)));
    out.join("\n") + "\n"
}

pub fn render_table(results: &[Value], color: bool) -> Result<String, CliError> {
    Ok(format_table(&build_table(results)?, color))
}

pub fn table_to_csv(t: &Table) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&t.header).expect("in-memory write");
    for r in &t.rows {
        w.write_record(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("cells are UTF-8")
}

pub fn render_csv(results: &[Value]) -> Result<String, CliError> {
    Ok(table_to_csv(&build_table(results)?))
}

pub fn parse_csv(text: &str) -> Result<Table, CliError> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let bad = |e: csv::Error| CliError::input("malformed-csv", e.to_string(), None);
    let header = r.headers().map_err(bad)?.iter().map(str::to_string).collect();
    let rows = r
        .records()
        .map(|rec| rec.map(|x| x.iter().map(str::to_string).collect()))
        .collect::<Result<_, _>>()
        .map_err(bad)?;
    Ok(Table { header, rows })
}
