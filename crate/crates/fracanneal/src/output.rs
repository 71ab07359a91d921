//! Output files: staged CSV writers, number formatting and the run manifest.

use std::fs::{self, File};
use std::io::{BufWriter, Read};
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};
use crate::scenario::Run;

/// Formats a float with 17 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub type CsvWriter = csv::Writer<BufWriter<File>>;

/// Output directory whose files only appear once the command succeeds.
///
/// Files are written under hidden `.partial` names and renamed by
/// [`Staging::commit`]; dropping an uncommitted staging removes them.
pub struct Staging {
    dir: PathBuf,
    staged: Vec<(PathBuf, PathBuf)>,
    committed: bool,
}

impl Staging {
    pub fn new(dir: &Path) -> CliResult<Self> {
        fs::create_dir_all(dir).map_err(|e| CliError::io(format!("{}: {e}", dir.display())))?;
        let probe = dir.join(".fracanneal.probe");
        File::create(&probe).map_err(|e| CliError::io(format!("{} is not writable: {e}", dir.display())))?;
        let _ = fs::remove_file(probe);
        Ok(Self {
            dir: dir.to_path_buf(),
            staged: Vec::new(),
            committed: false,
        })
    }

    /// Opens `name` for writing and emits the header row.
    pub fn csv(&mut self, name: &str, header: &[&str]) -> CliResult<CsvWriter> {
        let tmp = self.dir.join(format!(".{name}.partial"));
        let file = File::create(&tmp).map_err(|e| CliError::io(format!("{}: {e}", tmp.display())))?;
        self.staged.push((tmp, self.dir.join(name)));
        let mut w = csv::WriterBuilder::new().from_writer(BufWriter::new(file));
        w.write_record(header)?;
        Ok(w)
    }

    /// Moves every staged file into place; returns the final paths.
    pub fn commit(mut self) -> CliResult<Vec<PathBuf>> {
        for (tmp, dst) in &self.staged {
            fs::rename(tmp, dst).map_err(|e| CliError::io(format!("{}: {e}", dst.display())))?;
        }
        self.committed = true;
        Ok(self.staged.iter().map(|(_, d)| d.clone()).collect())
    }
}

impl Drop for Staging {
    fn drop(&mut self) {
        if !self.committed {
            for (tmp, _) in &self.staged {
                let _ = fs::remove_file(tmp);
            }
        }
    }
}

/// Flushes a writer, surfacing IO errors.
pub fn finish(mut w: CsvWriter) -> CliResult<()> {
    w.flush()?;
    Ok(())
}

pub fn sha256_file(path: &Path) -> CliResult<String> {
    let mut f = File::open(path)?;
    let mut h = Sha256::new();
    let mut buf = vec![0u8; 1 << 16];
    loop {
        let n = f.read(&mut buf)?;
        if n == 0 {
            break;
        }
        h.update(&buf[..n]);
    }
    Ok(hex::encode(h.finalize()))
}

/// Writes `manifest.txt`: tool version, timestamp, effective seed, the
/// scenario echo and the digest of every data file.
pub fn write_manifest(dir: &Path, command: &str, run: &Run, threads: usize, files: &[PathBuf]) -> CliResult<PathBuf> {
    let mut text = String::new();
    text.push_str(&format!("tool = \"fracanneal {}\"\n", env!("CARGO_PKG_VERSION")));
    text.push_str(&format!("command = \"{command}\"\n"));
    text.push_str(&format!("timestamp = \"{}\"\n", chrono::Utc::now().to_rfc3339()));
    text.push_str(&format!("effective_seed = {}\n", run.seed()));
    text.push_str(&format!("threads = {threads}\n"));
    text.push_str(&format!("scenario = '''\n{}'''\n", run.scenario.to_toml()));
    text.push_str("\n[digests]\n");
    for f in files {
        let name = f.file_name().and_then(|n| n.to_str()).unwrap_or_default();
        text.push_str(&format!("\"{name}\" = \"sha256:{}\"\n", sha256_file(f)?));
    }
    let path = dir.join("manifest.txt");
    fs::write(&path, text).map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_significant_digits() {
        assert_eq!(num(0.1), "1.0000000000000001e-1");
        assert_eq!(num(1.0), "1.0000000000000000e0");
        for x in [std::f64::consts::PI, 1e-300, -2.5e17] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn uncommitted_files_vanish() {
        let dir = tempfile::tempdir().unwrap();
        {
            let mut s = Staging::new(dir.path()).unwrap();
            let w = s.csv("a.csv", &["x"]).unwrap();
            finish(w).unwrap();
        }
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 0);
        let mut s = Staging::new(dir.path()).unwrap();
        finish(s.csv("a.csv", &["x"]).unwrap()).unwrap();
        let files = s.commit().unwrap();
        assert_eq!(fs::read_to_string(&files[0]).unwrap(), "x\n");
    }
}
