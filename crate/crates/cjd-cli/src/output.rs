//! CSV emission with fixed formatting.
//!
//! Every float is written with 17 significant digits (`{:.16e}`), so a
//! rerun with the same config and seed reproduces each file byte for byte.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::CliError;

/// Format a float for CSV: 17 significant digits, locale-free.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Collects the CSV files of one run under the output directory.
pub struct OutputSink {
    dir: PathBuf,
    files: Vec<String>,
}

impl OutputSink {
    pub fn create(dir: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// Names of the files written so far, in write order.
    pub fn files(&self) -> &[String] {
        &self.files
    }

    /// Write a CSV file from a header and preformatted rows.
    pub fn write_csv(
        &mut self,
        name: &str,
        header: &str,
        rows: impl IntoIterator<Item = String>,
    ) -> Result<(), CliError> {
        let path = self.dir.join(name);
        let mut out = fs::File::create(&path)?;
        writeln!(out, "{header}")?;
        for row in rows {
            writeln!(out, "{row}")?;
        }
        self.files.push(name.to_string());
        Ok(())
    }

    /// Write a plain text file (used for the manifest).
    pub fn write_text(&mut self, name: &str, content: &str) -> Result<(), CliError> {
        let path = self.dir.join(name);
        fs::write(path, content)?;
        Ok(())
    }
}

/// Rows of recorded trajectories: `path,time,<state columns>`.
pub fn trajectory_rows<'a>(
    paths: impl IntoIterator<Item = (usize, &'a cjd_core::PathSample)> + 'a,
    split_state: impl Fn(&nalgebra::DVector<f64>, &nalgebra::DVector<f64>) -> Vec<f64> + 'a,
) -> Vec<String> {
    let mut rows = Vec::new();
    for (idx, path) in paths {
        for (t, (x1, x2)) in path.times().iter().zip(path.states()) {
            let mut row = format!("{idx},{}", fmt_f64(*t));
            for v in split_state(x1, x2) {
                row.push(',');
                row.push_str(&fmt_f64(v));
            }
            rows.push(row);
        }
    }
    rows
}

/// Rows of an occupation measure: `index,weight,<coordinates>`.
pub fn occupation_rows(occ: &cjd_core::stability::OccupationMeasure) -> Vec<String> {
    occ.samples()
        .iter()
        .zip(occ.weights())
        .enumerate()
        .map(|(i, (s, w))| {
            let mut row = format!("{i},{}", fmt_f64(*w));
            for v in s.iter() {
                row.push(',');
                row.push_str(&fmt_f64(*v));
            }
            row
        })
        .collect()
}
