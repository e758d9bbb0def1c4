//! Configuration, output formats, SVG rendering and verification suites for the
//! command-line tool.

mod config;
mod tessellation;
mod verify;

use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};

pub use config::RunConfig;
pub use tessellation::{regions, render_svg, Arc, Circle, Region, TessellationSpec};
pub use verify::{run_suite, Suite};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

impl FromStr for OutputFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            _ => Err(Error::Parse(format!("unknown format {s:?} (expected json or csv)"))),
        }
    }
}

/// Pretty JSON with a trailing newline; field order follows the struct, so
/// equal inputs give byte-identical output.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

/// Rows of `key,value` pairs for a flat JSON object, or a header (the union of
/// all keys) plus rows for an array of flat objects. Nested values are written as compact JSON.
pub fn to_csv<T: Serialize>(value: &T) -> String {
    let v = serde_json::to_value(value).expect("report types serialize");
    let cell = |v: &serde_json::Value| match v {
        serde_json::Value::String(s) => csv_escape(s),
        serde_json::Value::Null => String::new(),
        other => csv_escape(&other.to_string()),
    };
    let mut out = String::new();
    match &v {
        serde_json::Value::Array(rows) if rows.iter().all(|r| r.is_object()) && !rows.is_empty() => {
            let mut keys: Vec<&String> = Vec::new();
            for r in rows {
                for k in r.as_object().expect("object").keys() {
                    if !keys.contains(&k) {
                        keys.push(k);
                    }
                }
            }
            out.push_str(&keys.iter().map(|k| k.as_str()).collect::<Vec<_>>().join(","));
            out.push('\n');
            for r in rows {
                let o = r.as_object().expect("object");
                let cells: Vec<String> = keys.iter().map(|k| o.get(*k).map(cell).unwrap_or_default()).collect();
                out.push_str(&cells.join(","));
                out.push('\n');
            }
        }
        serde_json::Value::Object(o) => {
            out.push_str("key,value\n");
            for (k, val) in o {
                out.push_str(&format!("{},{}\n", csv_escape(k), cell(val)));
            }
        }
        other => {
            out.push_str(&cell(other));
            out.push('\n');
        }
    }
    out
}

fn csv_escape(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::check::CheckReport;

    #[test]
    fn csv_shapes() {
        let rows = vec![CheckReport::pass("a"), CheckReport::fail("b", "x,y")];
        let csv = to_csv(&rows);
        assert_eq!(csv, "check,status,witness\na,pass,\nb,fail,\"x,y\"\n");
        let obj = to_csv(&CheckReport::fail("b", "x,y"));
        assert_eq!(obj, "key,value\ncheck,b\nstatus,fail\nwitness,\"x,y\"\n");
    }
}
