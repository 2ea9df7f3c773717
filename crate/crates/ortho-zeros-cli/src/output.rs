//! CSV and file-writing helpers. All tables are RFC-4180: comma separated,
//! CRLF line endings, header row first; numbers use the shortest
//! round-trip decimal form.

use std::path::Path;

use crate::config::CliError;

pub fn fmt_f(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else {
        format!("{v}")
    }
}

pub struct Csv {
    text: String,
    columns: usize,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut csv = Csv {
            text: String::new(),
            columns: header.len(),
        };
        csv.push_line(header.iter().map(|s| s.to_string()));
        csv
    }

    pub fn row(&mut self, fields: &[String]) {
        assert_eq!(fields.len(), self.columns, "ragged CSV row");
        self.push_line(fields.iter().cloned());
    }

    fn push_line(&mut self, fields: impl Iterator<Item = String>) {
        let mut first = true;
        for field in fields {
            if !first {
                self.text.push(',');
            }
            self.text.push_str(&field);
            first = false;
        }
        self.text.push_str("\r\n");
    }

    pub fn into_string(self) -> String {
        self.text
    }
}

pub fn linspace(a: f64, b: f64, edges: usize) -> Vec<f64> {
    assert!(edges >= 2);
    let step = (b - a) / (edges - 1) as f64;
    let mut out: Vec<f64> = (0..edges).map(|i| a + step * i as f64).collect();
    out[edges - 1] = b;
    out
}

/// Create the output directory and prove it is writable before any long
/// computation starts.
pub fn prepare_out_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| {
        CliError::Config(format!("output directory {} is not usable: {e}", dir.display()))
    })?;
    let probe = dir.join(".write-probe");
    std::fs::write(&probe, b"ok").map_err(|e| {
        CliError::Config(format!("output directory {} is not writable: {e}", dir.display()))
    })?;
    std::fs::remove_file(&probe).ok();
    Ok(())
}

pub fn write_files(dir: &Path, files: &[(String, String)]) -> Result<(), CliError> {
    for (name, contents) in files {
        std::fs::write(dir.join(name), contents)?;
    }
    Ok(())
}
