//! Output directory handling: CSV tables, JSON documents and the marker that
//! flags a run as incomplete until it finishes.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::CliError;

pub const MARKER: &str = "INCOMPLETE";

/// A CSV column: header text (quantity, definition, unit).
pub type Column = &'static str;

pub struct OutDir {
    root: PathBuf,
    written: Vec<String>,
}

impl OutDir {
    /// Creates the directory if needed and drops the incomplete-run marker.
    pub fn open(root: &Path, command: &str) -> Result<OutDir, CliError> {
        fs::create_dir_all(root).map_err(|e| CliError::Io(root.to_path_buf(), e))?;
        let out = OutDir {
            root: root.to_path_buf(),
            written: Vec::new(),
        };
        out.write_marker(&format!(
            "{command} started; files in this directory are partial until this marker is removed\n"
        ))?;
        Ok(out)
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn written(&self) -> &[String] {
        &self.written
    }

    fn write_marker(&self, text: &str) -> Result<(), CliError> {
        let p = self.path(MARKER);
        fs::write(&p, text).map_err(|e| CliError::Io(p, e))
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let p = self.path(name);
        let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Core(e.into()))?;
        text.push('\n');
        fs::write(&p, text).map_err(|e| CliError::Io(p.clone(), e))?;
        self.written.push(name.to_string());
        Ok(())
    }

    pub fn write_text(&mut self, name: &str, text: &str) -> Result<(), CliError> {
        let p = self.path(name);
        fs::write(&p, text).map_err(|e| CliError::Io(p.clone(), e))?;
        self.written.push(name.to_string());
        Ok(())
    }

    /// Numbers are written in shortest round-trip exponent form, so identical
    /// inputs give byte-identical files.
    pub fn write_csv<I>(&mut self, name: &str, header: &[Column], rows: I) -> Result<(), CliError>
    where
        I: IntoIterator<Item = Vec<f64>>,
    {
        let p = self.path(name);
        let io = |e: csv::Error| CliError::Io(p.clone(), e.into());
        let mut w = csv::Writer::from_path(&p).map_err(io)?;
        w.write_record(header).map_err(io)?;
        for row in rows {
            debug_assert_eq!(row.len(), header.len());
            w.write_record(row.iter().map(|x| format!("{x:e}"))).map_err(io)?;
        }
        w.flush().map_err(|e| CliError::Io(p.clone(), e))?;
        self.written.push(name.to_string());
        Ok(())
    }

    pub fn finish(self) -> Result<Vec<String>, CliError> {
        let p = self.path(MARKER);
        fs::remove_file(&p).map_err(|e| CliError::Io(p, e))?;
        Ok(self.written)
    }

    /// Leaves the marker in place, now carrying the failure.
    pub fn fail(&self, err: &CliError) {
        let _ = self.write_marker(&format!("run failed: {err}\nfiles written before the failure: {:?}\n", self.written));
    }
}
