use serde_json::{Map, Number, Value};

use crate::error::{CliError, Result};

/// Rectangular result table with named columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

/// JSON number for a finite float; non-finite values become null.
pub fn num(x: f64) -> Value {
    Number::from_f64(x).map_or(Value::Null, Value::Number)
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        // serde_json prints floats with ryu, the shortest round-trip form
        other => other.to_string(),
    }
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// Comma-separated, header first, LF line endings.
    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        let failed = |e: csv::Error| CliError::Usage(format!("cannot encode CSV: {e}"));
        w.write_record(&self.columns).map_err(failed)?;
        for row in &self.rows {
            w.write_record(row.iter().map(cell)).map_err(failed)?;
        }
        w.into_inner()
            .map_err(|e| CliError::Usage(format!("cannot encode CSV: {e}")))
    }

    /// Array of row objects keyed by column name.
    pub fn to_json_value(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| {
                    let obj: Map<String, Value> = self.columns.iter().cloned().zip(row.iter().cloned()).collect();
                    Value::Object(obj)
                })
                .collect(),
        )
    }
}

/// Pretty JSON with a trailing newline.
pub fn json_bytes<T: serde::Serialize>(value: &T) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("result types always serialize");
    bytes.push(b'\n');
    bytes
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_uses_shortest_round_trip_floats() {
        let mut t = Table::new(["theta", "p", "label"]);
        t.push(vec![num(0.1), num(1e-8), Value::String("z".into())]);
        t.push(vec![num(-3.0), num(0.36787944117144233), Value::Null]);
        let text = String::from_utf8(t.to_csv().unwrap()).unwrap();
        assert_eq!(text, "theta,p,label\n0.1,1e-8,z\n-3.0,0.36787944117144233,\n");
        for line in text.lines().skip(1) {
            let v: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
            assert!(v == 1e-8 || v == 0.36787944117144233);
        }
    }

    #[test]
    fn json_rows_keep_column_order() {
        let mut t = Table::new(["b", "a"]);
        t.push(vec![num(1.0), num(2.0)]);
        let s = serde_json::to_string(&t.to_json_value()).unwrap();
        assert_eq!(s, r#"[{"b":1.0,"a":2.0}]"#);
    }
}
