//! Output formats. JSON is the payload itself; CSV and text flatten it by path.

use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

pub fn render(v: &Value, format: Format) -> String {
    match format {
        Format::Json => format!("{v}\n"),
        Format::Csv => {
            let mut rows = Vec::new();
            flatten(v, String::new(), &mut rows);
            rows.iter().map(|(path, cells)| format!("{}\n", csv_row(path, cells))).collect()
        }
        Format::Text => {
            if let Value::String(s) = v {
                return if s.ends_with('\n') { s.clone() } else { format!("{s}\n") };
            }
            let mut rows = Vec::new();
            flatten(v, String::new(), &mut rows);
            rows.iter()
                .map(|(path, cells)| {
                    let label = if path.is_empty() { "value" } else { path.as_str() };
                    format!("{label}: {}\n", cells.join(" "))
                })
                .collect()
        }
    }
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some(String::new()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        _ => None,
    }
}

/// Leaves become `(path, [value])`; arrays of scalars (polynomials, index
/// sets, coordinates) stay on one row.
fn flatten(v: &Value, path: String, out: &mut Vec<(String, Vec<String>)>) {
    let join = |k: &str| if path.is_empty() { k.to_string() } else { format!("{path}.{k}") };
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                flatten(x, join(k), out);
            }
        }
        Value::Array(a) => {
            if let Some(cells) = a.iter().map(scalar).collect::<Option<Vec<_>>>() {
                out.push((path, cells));
            } else {
                for (i, x) in a.iter().enumerate() {
                    flatten(x, join(&i.to_string()), out);
                }
            }
        }
        leaf => out.push((path, vec![scalar(leaf).unwrap_or_default()])),
    }
}

fn csv_row(path: &str, cells: &[String]) -> String {
    std::iter::once(path)
        .chain(cells.iter().map(String::as_str))
        .map(|c| {
            if c.contains([',', '"', '\n']) {
                format!("\"{}\"", c.replace('"', "\"\""))
            } else {
                c.to_string()
            }
        })
        .collect::<Vec<_>>()
        .join(",")
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn csv_keeps_polynomials_on_one_row() {
        let v = json!({"poincare": [1, 4, 4, 1], "euler": 10, "centers": [{"I": [1, 2], "codim": 2}]});
        let s = render(&v, Format::Csv);
        assert!(s.contains("poincare,1,4,4,1\n"));
        assert!(s.contains("centers.0.I,1,2\n"));
        assert!(s.contains("euler,10\n"));
    }
}
