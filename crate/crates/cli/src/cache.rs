use std::collections::HashMap;
use std::fs::{self, File, OpenOptions};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, OnceLock};

use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};
use crate::inputs::Inputs;
use crate::report::{Report, ARTIFACT_VERSION};

/// Content-addressed report store: `<root>/<key[..2]>/<key>.json`, keyed by
/// the artifact version and the canonical inputs.
#[derive(Debug, Clone)]
pub struct Cache {
    root: PathBuf,
}

fn key_locks() -> &'static Mutex<HashMap<String, Arc<Mutex<()>>>> {
    static LOCKS: OnceLock<Mutex<HashMap<String, Arc<Mutex<()>>>>> = OnceLock::new();
    LOCKS.get_or_init(Default::default)
}

impl Cache {
    pub fn open(root: &Path) -> Result<Self> {
        fs::create_dir_all(root).map_err(|e| CliError::io(root, e))?;
        Ok(Cache { root: root.to_path_buf() })
    }

    pub fn key(inputs: &Inputs) -> String {
        let mut h = Sha256::new();
        h.update(ARTIFACT_VERSION.as_bytes());
        h.update(b"\n");
        h.update(inputs.canonical().as_bytes());
        hex::encode(h.finalize())
    }

    pub fn path(&self, key: &str) -> PathBuf {
        self.root.join(&key[..2]).join(format!("{key}.json"))
    }

    /// Returns the stored report for `inputs`, or computes and stores it.
    /// Each key is held exclusively (threads and processes) while computing.
    pub fn get_or_compute(&self, inputs: &Inputs, compute: impl FnOnce() -> Result<Report>) -> Result<Report> {
        let key = Cache::key(inputs);
        let slot = key_locks().lock().unwrap().entry(key.clone()).or_default().clone();
        let _thread_guard = slot.lock().unwrap();
        let path = self.path(&key);
        let dir = path.parent().expect("entry has a parent");
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        let lock_path = path.with_extension("lock");
        let lock = OpenOptions::new()
            .create(true)
            .truncate(false)
            .write(true)
            .open(&lock_path)
            .map_err(|e| CliError::io(&lock_path, e))?;
        lock.lock().map_err(|e| CliError::io(&lock_path, e))?;

        if let Some(hit) = self.load(&path) {
            return Ok(hit);
        }
        let report = compute()?;
        let tmp = path.with_extension("tmp");
        write_file(&tmp, report.to_json().as_bytes())?;
        fs::rename(&tmp, &path).map_err(|e| CliError::io(&path, e))?;
        Ok(report)
    }

    /// A stored report, unless it is unreadable or from another artifact version.
    fn load(&self, path: &Path) -> Option<Report> {
        let text = fs::read_to_string(path).ok()?;
        let report = Report::from_json(&text).ok()?;
        (report.artifact_version == ARTIFACT_VERSION).then_some(report)
    }

    pub fn contains(&self, inputs: &Inputs) -> bool {
        self.load(&self.path(&Cache::key(inputs))).is_some()
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    use std::io::Write;
    let mut f = File::create(path).map_err(|e| CliError::io(path, e))?;
    f.write_all(bytes).and_then(|_| f.sync_all()).map_err(|e| CliError::io(path, e))
}
