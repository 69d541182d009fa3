//! Output directory handling: atomic writes, checksums and the run manifest.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::CliError;

/// Record of one invocation, written after every other artifact.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command_line: String,
    pub config: BTreeMap<String, String>,
    pub seeds: Vec<u64>,
    /// File name to hex sha256.
    pub artifacts: BTreeMap<String, String>,
    pub tool_version: String,
    pub wall_time_s: f64,
}

pub const MANIFEST_NAME: &str = "run_manifest.json";

/// Collects artifacts written into one directory.
pub struct OutputDir {
    root: PathBuf,
    artifacts: BTreeMap<String, String>,
}

impl OutputDir {
    pub fn create(root: &Path) -> Result<Self, CliError> {
        std::fs::create_dir_all(root)
            .map_err(|e| CliError::Usage(format!("cannot create output directory {}: {e}", root.display())))?;
        Ok(OutputDir { root: root.to_path_buf(), artifacts: BTreeMap::new() })
    }

    /// Writes `name` (a bare file name) via a temp file and rename.
    pub fn write(&mut self, name: &str, contents: &[u8]) -> Result<PathBuf, CliError> {
        check_bare_name(name)?;
        let path = self.root.join(name);
        let mut tmp = tempfile::NamedTempFile::new_in(&self.root).map_err(io_error)?;
        tmp.write_all(contents).map_err(io_error)?;
        tmp.as_file().sync_all().map_err(io_error)?;
        tmp.persist(&path).map_err(|e| io_error(e.error))?;
        if name != MANIFEST_NAME {
            self.artifacts.insert(name.to_string(), hex::encode(Sha256::digest(contents)));
        }
        Ok(path)
    }

    pub fn artifacts(&self) -> &BTreeMap<String, String> {
        &self.artifacts
    }
}

/// Output names may not carry directories, so nothing lands outside the
/// output directory.
pub fn check_bare_name(name: &str) -> Result<(), CliError> {
    let p = Path::new(name);
    let bare = p.file_name().is_some_and(|f| f == p.as_os_str()) && name != "." && name != "..";
    if bare {
        Ok(())
    } else {
        Err(CliError::Usage(format!("output name `{name}` must be a plain file name inside --out-dir")))
    }
}

fn io_error(e: std::io::Error) -> CliError {
    CliError::Usage(format!("write failed: {e}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_paths() {
        assert!(check_bare_name("a.csv").is_ok());
        assert!(check_bare_name("../a.csv").is_err());
        assert!(check_bare_name("sub/a.csv").is_err());
        assert!(check_bare_name("/tmp/a.csv").is_err());
        assert!(check_bare_name("..").is_err());
    }

    #[test]
    fn checksums_recorded() {
        let dir = tempfile::tempdir().unwrap();
        let mut out = OutputDir::create(dir.path()).unwrap();
        out.write("x.txt", b"abc").unwrap();
        assert_eq!(
            out.artifacts()["x.txt"],
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
        assert_eq!(std::fs::read(dir.path().join("x.txt")).unwrap(), b"abc");
    }
}
