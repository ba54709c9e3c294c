//! CSV output: comma separated, one header row under a versioned schema
//! comment, `.` decimal separator, empty fields for absent values,
//! UTF-8, LF line endings. Identical inputs produce identical bytes.

use std::io::Write;
use std::path::Path;

use crate::error::CliResult;

/// One CSV cell. Absent quantities are [`Field::Empty`], never zeros.
#[derive(Debug, Clone, PartialEq)]
pub enum Field {
    F64(f64),
    U64(u64),
    Str(String),
    Empty,
}

impl Field {
    pub fn opt_f64(v: Option<f64>) -> Field {
        v.map_or(Field::Empty, Field::F64)
    }

    fn render(&self, out: &mut String) {
        match self {
            // `{}` is the shortest round-trip representation; it is
            // deterministic for a given binary
            Field::F64(v) => {
                debug_assert!(v.is_finite(), "populated CSV columns must be finite");
                out.push_str(&format!("{v}"));
            }
            Field::U64(v) => out.push_str(&format!("{v}")),
            Field::Str(s) => {
                debug_assert!(
                    !s.contains([',', '\n', '"']),
                    "CSV string fields must not need quoting"
                );
                out.push_str(s);
            }
            Field::Empty => {}
        }
    }
}

impl From<f64> for Field {
    fn from(v: f64) -> Self {
        Field::F64(v)
    }
}

impl From<u64> for Field {
    fn from(v: u64) -> Self {
        Field::U64(v)
    }
}

impl From<usize> for Field {
    fn from(v: usize) -> Self {
        Field::U64(v as u64)
    }
}

impl From<&str> for Field {
    fn from(v: &str) -> Self {
        Field::Str(v.to_string())
    }
}

/// In-memory CSV table with a versioned schema tag.
#[derive(Debug)]
pub struct Table {
    schema: String,
    header: Vec<String>,
    rows: Vec<Vec<Field>>,
}

impl Table {
    pub fn new(schema: &str, header: &[&str]) -> Self {
        Self {
            schema: schema.to_string(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Field>) {
        assert_eq!(row.len(), self.header.len(), "row width must match the header");
        self.rows.push(row);
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut text = String::new();
        text.push_str("# schema: ");
        text.push_str(&self.schema);
        text.push('\n');
        text.push_str(&self.header.join(","));
        text.push('\n');
        for row in &self.rows {
            for (i, field) in row.iter().enumerate() {
                if i > 0 {
                    text.push(',');
                }
                field.render(&mut text);
            }
            text.push('\n');
        }
        text.into_bytes()
    }

    pub fn write_to(&self, path: &Path) -> CliResult<()> {
        if let Some(parent) = path.parent() {
            if !parent.as_os_str().is_empty() {
                std::fs::create_dir_all(parent)?;
            }
        }
        let mut file = std::fs::File::create(path)?;
        file.write_all(&self.to_bytes())?;
        Ok(())
    }
}
