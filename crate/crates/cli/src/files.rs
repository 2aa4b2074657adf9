use std::fs;
use std::io::BufWriter;
use std::path::Path;

use parcs_core::graph::Table;
use parcs_core::io::{read_table, write_table, CsvError};
use sha2::{Digest, Sha256};

use crate::error::{csv_error, CliError};

pub fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::InvalidData => CliError::user(format!("{}: not valid UTF-8 text", path.display())),
        _ => CliError::io(path, e),
    })
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    ensure_parent(path)?;
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

pub fn ensure_parent(path: &Path) -> Result<(), CliError> {
    match path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() => fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e)),
        _ => Ok(()),
    }
}

pub fn create_dir(path: &Path) -> Result<(), CliError> {
    fs::create_dir_all(path).map_err(|e| CliError::io(path, e))
}

pub fn read_csv(path: &Path) -> Result<Table, CliError> {
    let f = fs::File::open(path).map_err(|e| CliError::io(path, e))?;
    read_table(f).map_err(|e| csv_error(path, e))
}

pub fn write_csv(path: &Path, t: &Table) -> Result<(), CliError> {
    write_with(path, |w| write_table(w, t))
}

pub fn write_with(
    path: &Path,
    f: impl FnOnce(&mut BufWriter<fs::File>) -> Result<(), CsvError>,
) -> Result<(), CliError> {
    ensure_parent(path)?;
    let file = fs::File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut w = BufWriter::new(file);
    f(&mut w).map_err(|e| csv_error(path, e))
}

pub fn sha256_file(path: &Path) -> Result<String, CliError> {
    let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}
