//! CSV and JSON writers with a configuration echo.

use serde_json::{Map, Value};

use crate::config::{Format, RunConfig};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(usize),
    Num(f64),
    Text(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Num(v) => format!("{:.14e}", v + 0.0),
            Cell::Text(s) if s.contains([',', '"', '\n']) => {
                format!("\"{}\"", s.replace('"', "\"\""))
            }
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => Value::from(*v),
            Cell::Num(v) => Value::from(*v + 0.0),
            Cell::Text(s) => Value::from(s.as_str()),
        }
    }
}

/// Result table plus the header lines describing how it was produced.
#[derive(Debug, Clone, PartialEq)]
pub struct Document {
    pub command: &'static str,
    /// `(key, value)` pairs echoed into the header.
    pub header: Vec<(String, String)>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Document {
    pub fn new(cfg: &RunConfig, columns: Vec<&'static str>) -> Self {
        let mut header = cfg.echo.clone();
        header.push(("scale".into(), cfg.command.scale(cfg.model).into()));
        header.push(("precision".into(), "f64".into()));
        Self {
            command: cfg.command.name(),
            header,
            columns,
            rows: Vec::new(),
        }
    }

    pub fn note(&mut self, key: &str, value: impl Into<String>) {
        self.header.push((key.to_string(), value.into()));
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("# deltatrain {}\n", self.command);
        for (k, v) in &self.header {
            out.push_str(&format!("# {k} = {v}\n"));
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.iter().map(Cell::csv).collect::<Vec<_>>().join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut config = Map::new();
        for (k, v) in &self.header {
            config.insert(k.clone(), Value::from(v.as_str()));
        }
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(c, cell)| (c.to_string(), cell.json()))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        let mut doc = Map::new();
        doc.insert("command".into(), Value::from(self.command));
        doc.insert("config".into(), Value::Object(config));
        doc.insert("columns".into(), Value::from(self.columns.clone()));
        doc.insert("rows".into(), Value::Array(rows));
        let mut text = serde_json::to_string_pretty(&Value::Object(doc))
            .expect("JSON values always serialise");
        text.push('\n');
        text
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Document {
        Document {
            command: "jc-converge",
            header: vec![("N".into(), "10,30".into())],
            columns: vec!["N", "value", "label"],
            rows: vec![vec![
                Cell::Int(10),
                Cell::Num(0.1),
                Cell::Text("a,b".into()),
            ]],
        }
    }

    #[test]
    fn csv_has_echo_and_full_precision() {
        let csv = sample().to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "# deltatrain jc-converge");
        assert_eq!(lines[1], "# N = 10,30");
        assert_eq!(lines[2], "N,value,label");
        assert_eq!(lines[3], "10,1.00000000000000e-1,\"a,b\"");
        let parsed: f64 = "1.00000000000000e-1".parse().unwrap();
        assert_eq!(parsed, 0.1);
    }

    #[test]
    fn json_round_trips() {
        let v: Value = serde_json::from_str(&sample().to_json()).unwrap();
        assert_eq!(v["config"]["N"], "10,30");
        assert_eq!(v["rows"][0]["value"], 0.1);
        assert_eq!(v["rows"][0]["N"], 10);
    }
}
