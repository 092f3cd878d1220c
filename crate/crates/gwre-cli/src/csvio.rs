//! CSV with a `# key=value` metadata comment block: all parameters of the
//! producing run, then a header row, then the payload.

use crate::CliError;
use std::io::{BufWriter, Write};
use std::path::Path;

pub fn write_csv(
    path: &Path,
    meta: &[(String, String)],
    columns: &[&str],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> Result<(), CliError> {
    fn emit(
        w: &mut impl Write,
        meta: &[(String, String)],
        columns: &[&str],
        rows: impl IntoIterator<Item = Vec<String>>,
    ) -> std::io::Result<()> {
        for (k, v) in meta {
            writeln!(w, "# {k}={v}")?;
        }
        writeln!(w, "{}", columns.join(","))?;
        for row in rows {
            writeln!(w, "{}", row.join(","))?;
        }
        w.flush()
    }
    let file = std::fs::File::create(path)
        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", path.display())))?;
    let mut w = BufWriter::new(file);
    emit(&mut w, meta, columns, rows)
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

#[derive(Debug, Clone)]
pub struct CsvTable {
    pub meta: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl CsvTable {
    /// Values of the named column.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }
}

pub fn read_csv(path: &Path) -> Result<CsvTable, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
    let mut meta = Vec::new();
    let mut columns: Option<Vec<String>> = None;
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if let Some((k, v)) = comment.trim().split_once('=') {
                meta.push((k.trim().to_string(), v.trim().to_string()));
            }
            continue;
        }
        match &columns {
            None => columns = Some(line.split(',').map(|c| c.trim().to_string()).collect()),
            Some(cols) => {
                let mut row = Vec::with_capacity(cols.len());
                for cell in line.split(',') {
                    let cell = cell.trim();
                    row.push(cell.parse::<f64>().map_err(|_| {
                        CliError::Config(format!(
                            "{}:{}: not a number: {cell:?}",
                            path.display(),
                            lineno + 1
                        ))
                    })?);
                }
                if row.len() != cols.len() {
                    return Err(CliError::Config(format!(
                        "{}:{}: expected {} cells, found {}",
                        path.display(),
                        lineno + 1,
                        cols.len(),
                        row.len()
                    )));
                }
                rows.push(row);
            }
        }
    }
    let columns = columns
        .ok_or_else(|| CliError::Config(format!("{}: no header row", path.display())))?;
    Ok(CsvTable {
        meta,
        columns,
        rows,
    })
}
