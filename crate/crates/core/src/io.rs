//! Run directories and the CSV files inside them.
//!
//! A run directory holds `config.conf`, `diag.csv`, one `snap_t<time>.csv`
//! and (optionally) one `spec_t<time>.csv` per snapshot, and a
//! `manifest.txt` with SHA-256 checksums of every data file. Floats are
//! written with 17 significant digits so they read back bit-exactly.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::diagnostics::{amplitude_spectrum, DiagnosticsRow};
use crate::error::{Error, Result};
use crate::spectral::Field;

pub const MANIFEST: &str = "manifest.txt";
pub const CONFIG: &str = "config.conf";
pub const DIAGNOSTICS: &str = "diag.csv";

pub fn snapshot_name(t: f64) -> String {
    format!("snap_t{t:.6}.csv")
}

pub fn spectrum_name(t: f64) -> String {
    format!("spec_t{t:.6}.csv")
}

fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes a CSV file with the given header and numeric rows.
pub fn write_csv<I, R>(path: &Path, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = R>,
    R: AsRef<[f64]>,
{
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    let mut body = header.join(",");
    body.push('\n');
    for row in rows {
        let line: Vec<String> = row.as_ref().iter().map(|&x| fmt(x)).collect();
        body.push_str(&line.join(","));
        body.push('\n');
    }
    out.write_all(body.as_bytes())
        .and_then(|_| out.flush())
        .map_err(|e| Error::io(path, e))
}

/// Reads a numeric CSV file written by this module: header plus rows.
pub fn read_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text.lines();
    let header: Vec<String> = lines
        .next()
        .ok_or_else(|| Error::Format {
            path: path.to_path_buf(),
            message: "empty file".into(),
        })?
        .split(',')
        .map(str::to_owned)
        .collect();
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let row = line
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::Format {
                path: path.to_path_buf(),
                message: format!("line {}: {e}", i + 2),
            })?;
        if row.len() != header.len() {
            return Err(Error::Format {
                path: path.to_path_buf(),
                message: format!("line {}: expected {} columns, found {}", i + 2, header.len(), row.len()),
            });
        }
        rows.push(row);
    }
    Ok((header, rows))
}

/// `x,zeta,w` at every grid node.
pub fn write_snapshot(path: &Path, zeta: &Field, w: &Field) -> Result<()> {
    let grid = zeta.grid();
    if w.grid() != grid {
        return Err(Error::GridMismatch);
    }
    let rows = (0..grid.n()).map(|j| [grid.node(j), zeta.values()[j], w.values()[j]]);
    write_csv(path, &["x", "zeta", "w"], rows)
}

/// Reads a snapshot back as `(x, zeta, w)` columns.
pub fn read_snapshot(path: &Path) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    let (header, rows) = read_csv(path)?;
    if header != ["x", "zeta", "w"] {
        return Err(Error::Format {
            path: path.to_path_buf(),
            message: format!("unexpected header {header:?}"),
        });
    }
    let col = |c: usize| rows.iter().map(|r| r[c]).collect();
    Ok((col(0), col(1), col(2)))
}

/// `k,abs_zeta_hat` over the nonnegative wavenumbers.
pub fn write_spectrum(path: &Path, zeta: &Field) -> Result<()> {
    let rows = amplitude_spectrum(zeta).into_iter().map(|(k, a)| [k, a]);
    write_csv(path, &["k", "abs_zeta_hat"], rows)
}

fn sha256_hex(path: &Path) -> Result<String> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect())
}

/// Summary written to `manifest.txt` when a run finishes.
#[derive(Clone, Debug, Default)]
pub struct ManifestInfo {
    pub status: String,
    pub t_final: f64,
    pub wall_time_s: f64,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    pub rhs_evals: usize,
    pub cg_solves: usize,
    pub cg_iterations: usize,
}

/// A run directory being written.
#[derive(Debug)]
pub struct RunDir {
    dir: PathBuf,
    diag: BufWriter<File>,
    files: Vec<String>,
}

impl RunDir {
    /// Creates (or reuses) `dir`, copies the configuration and opens
    /// `diag.csv`. A directory that already holds a manifest is only
    /// overwritten with `force`.
    pub fn create(dir: &Path, config_text: &str, force: bool) -> Result<Self> {
        let manifest = dir.join(MANIFEST);
        if manifest.exists() && !force {
            return Err(Error::Exists { path: manifest });
        }
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        if manifest.exists() {
            fs::remove_file(&manifest).map_err(|e| Error::io(&manifest, e))?;
        }
        // stale snapshots from an earlier run would otherwise be mixed in
        let entries = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
        for entry in entries {
            let path = entry.map_err(|e| Error::io(dir, e))?.path();
            let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("");
            if (name.starts_with("snap_t") || name.starts_with("spec_t")) && name.ends_with(".csv") {
                fs::remove_file(&path).map_err(|e| Error::io(&path, e))?;
            }
        }
        let config_path = dir.join(CONFIG);
        fs::write(&config_path, config_text).map_err(|e| Error::io(&config_path, e))?;
        let diag_path = dir.join(DIAGNOSTICS);
        let file = File::create(&diag_path).map_err(|e| Error::io(&diag_path, e))?;
        let mut diag = BufWriter::new(file);
        writeln!(diag, "{}", DiagnosticsRow::HEADER)
            .and_then(|_| diag.flush())
            .map_err(|e| Error::io(&diag_path, e))?;
        Ok(RunDir {
            dir: dir.to_path_buf(),
            diag,
            files: vec![CONFIG.into(), DIAGNOSTICS.into()],
        })
    }

    pub fn path(&self) -> &Path {
        &self.dir
    }

    /// Appends one row and flushes, so the file survives a crash.
    pub fn append_diagnostics(&mut self, row: &DiagnosticsRow) -> Result<()> {
        writeln!(self.diag, "{}", row.to_csv())
            .and_then(|_| self.diag.flush())
            .map_err(|e| Error::io(self.dir.join(DIAGNOSTICS), e))
    }

    pub fn snapshot(&mut self, t: f64, zeta: &Field, w: &Field, spectrum: bool) -> Result<()> {
        let name = snapshot_name(t);
        write_snapshot(&self.dir.join(&name), zeta, w)?;
        if !self.files.contains(&name) {
            self.files.push(name);
        }
        if spectrum {
            let name = spectrum_name(t);
            write_spectrum(&self.dir.join(&name), zeta)?;
            if !self.files.contains(&name) {
                self.files.push(name);
            }
        }
        Ok(())
    }

    /// Writes `manifest.txt`, checksumming every data file of the run.
    pub fn finish(mut self, info: &ManifestInfo) -> Result<PathBuf> {
        self.diag
            .flush()
            .map_err(|e| Error::io(self.dir.join(DIAGNOSTICS), e))?;
        let mut text = String::new();
        text.push_str(&format!("version {}\n", env!("CARGO_PKG_VERSION")));
        text.push_str(&format!("status {}\n", info.status));
        text.push_str(&format!("t_final {}\n", info.t_final));
        text.push_str(&format!("wall_time_s {:.3}\n", info.wall_time_s));
        text.push_str(&format!("accepted_steps {}\n", info.accepted_steps));
        text.push_str(&format!("rejected_steps {}\n", info.rejected_steps));
        text.push_str(&format!("rhs_evals {}\n", info.rhs_evals));
        text.push_str(&format!("cg_solves {}\n", info.cg_solves));
        text.push_str(&format!("cg_iterations {}\n", info.cg_iterations));
        for name in &self.files {
            text.push_str(&format!("sha256 {}  {name}\n", sha256_hex(&self.dir.join(name))?));
        }
        let path = self.dir.join(MANIFEST);
        fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
        Ok(path)
    }
}

/// Checks every `sha256` line of a manifest against the files on disk and
/// returns the names that no longer match.
pub fn verify_manifest(dir: &Path) -> Result<Vec<String>> {
    let path = dir.join(MANIFEST);
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    let mut bad = Vec::new();
    for line in text.lines() {
        if let Some(rest) = line.strip_prefix("sha256 ") {
            let (hash, name) = rest.split_once("  ").ok_or_else(|| Error::Format {
                path: path.clone(),
                message: format!("bad checksum line `{line}`"),
            })?;
            let file = dir.join(name);
            if !file.exists() || sha256_hex(&file)? != hash {
                bad.push(name.to_owned());
            }
        }
    }
    Ok(bad)
}
