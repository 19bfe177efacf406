//! Tabular results with CSV and JSON renderings.
//!
//! Reals are written with 17 significant digits so that a CSV round trip
//! reproduces every `f64` bit for bit. Metadata lines (`# key: value`) are the
//! only part of the output that callers may want to strip when diffing runs.

use serde_json::{json, Map};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Int(i64),
    Real(f64),
    Text(String),
}

impl Value {
    /// Text rendering used in CSV cells and the `repr` field of JSON cells.
    pub fn render(&self) -> String {
        match self {
            Value::Int(i) => i.to_string(),
            Value::Real(x) => format_real(*x),
            Value::Text(s) => s.clone(),
        }
    }

    pub fn as_real(&self) -> Option<f64> {
        match self {
            Value::Real(x) => Some(*x),
            Value::Int(i) => Some(*i as f64),
            Value::Text(_) => None,
        }
    }
}

/// 17 significant digits in scientific notation; enough to round-trip.
pub fn format_real(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{x:.16e}")
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ScanTable {
    columns: Vec<String>,
    rows: Vec<Vec<Value>>,
    meta: Vec<(String, String)>,
}

impl ScanTable {
    pub fn new(columns: Vec<String>) -> Self {
        Self {
            columns,
            rows: Vec::new(),
            meta: Vec::new(),
        }
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<Value>] {
        &self.rows
    }

    pub fn meta(&self) -> &[(String, String)] {
        &self.meta
    }

    pub fn push_meta(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.meta.push((key.into(), value.into()));
    }

    pub fn push_row(&mut self, row: Vec<Value>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::Dimension(format!(
                "row has {} cells, table has {} columns",
                row.len(),
                self.columns.len()
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// All real values of column `name`, in row order.
    pub fn real_column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.column_index(name)?;
        self.rows.iter().map(|r| r[idx].as_real()).collect()
    }

    pub fn to_csv(&self, with_meta: bool) -> String {
        let mut out = String::new();
        if with_meta {
            for (k, v) in &self.meta {
                out.push_str(&format!("# {k}: {v}\n"));
            }
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        let write = |w: &mut csv::Writer<Vec<u8>>| -> csv::Result<()> {
            w.write_record(&self.columns)?;
            for row in &self.rows {
                w.write_record(row.iter().map(Value::render))?;
            }
            w.flush()?;
            Ok(())
        };
        write(&mut w).expect("writing CSV to memory cannot fail");
        let body = w.into_inner().expect("in-memory CSV buffer");
        out.push_str(&String::from_utf8(body).expect("CSV cells are UTF-8"));
        out
    }

    /// JSON object with `meta` (omitted when `with_meta` is false), `columns`
    /// and `rows`. Each real cell is `{"repr": "<17 digits>", "value": x}`;
    /// non-finite values carry `null`.
    pub fn to_json(&self, with_meta: bool) -> serde_json::Value {
        let rows: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut obj = Map::new();
                for (name, cell) in self.columns.iter().zip(row) {
                    let v = match cell {
                        Value::Int(i) => json!(i),
                        Value::Text(s) => json!(s),
                        Value::Real(x) => json!({
                            "repr": format_real(*x),
                            "value": if x.is_finite() { json!(x) } else { serde_json::Value::Null },
                        }),
                    };
                    obj.insert(name.clone(), v);
                }
                serde_json::Value::Object(obj)
            })
            .collect();
        let mut top = Map::new();
        if with_meta {
            let meta: Map<String, serde_json::Value> = self
                .meta
                .iter()
                .map(|(k, v)| (k.clone(), json!(v)))
                .collect();
            top.insert("meta".into(), serde_json::Value::Object(meta));
        }
        top.insert("columns".into(), json!(self.columns));
        top.insert("rows".into(), serde_json::Value::Array(rows));
        serde_json::Value::Object(top)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sample() -> ScanTable {
        let mut t = ScanTable::new(vec!["x".into(), "n".into(), "tag".into()]);
        t.push_meta("tool", "test");
        t.push_row(vec![
            Value::Real(0.1),
            Value::Int(3),
            Value::Text("plus".into()),
        ])
        .unwrap();
        t
    }

    #[test]
    fn csv_layout() {
        let csv = sample().to_csv(true);
        assert_eq!(csv, "# tool: test\nx,n,tag\n1.0000000000000001e-1,3,plus\n");
        assert!(!sample().to_csv(false).contains('#'));
    }

    #[test]
    fn json_layout() {
        let j = sample().to_json(true);
        assert_eq!(j["meta"]["tool"], "test");
        assert_eq!(j["rows"][0]["x"]["value"], 0.1);
        assert_eq!(j["rows"][0]["x"]["repr"], "1.0000000000000001e-1");
        assert_eq!(j["rows"][0]["n"], 3);
        assert!(sample().to_json(false).get("meta").is_none());
        let mut t = ScanTable::new(vec!["x".into()]);
        t.push_row(vec![Value::Real(f64::NAN)]).unwrap();
        assert!(t.to_json(false)["rows"][0]["x"]["value"].is_null());
    }

    #[test]
    fn csv_quotes_commas() {
        let mut t = ScanTable::new(vec!["name".into()]);
        t.push_row(vec![Value::Text("a,b".into())]).unwrap();
        assert_eq!(t.to_csv(false), "name\n\"a,b\"\n");
    }

    #[test]
    fn row_width_is_checked() {
        let mut t = sample();
        assert!(t.push_row(vec![Value::Int(1)]).is_err());
    }

    proptest! {
        #[test]
        fn rendered_reals_round_trip(x in any::<f64>().prop_filter("finite", |x| x.is_finite())) {
            let back: f64 = format_real(x).parse().unwrap();
            prop_assert_eq!(back.to_bits(), x.to_bits());
        }
    }
}
