//! File-based result store.
//!
//! ```text
//! <root>/analyses/<video_id>/<config_digest>.json
//! <root>/reports/<report_id>.json
//! <root>/uploads/
//! ```
//!
//! Files are written to a temporary name in the same directory and then
//! linked into place without replacing an existing file, so readers never
//! see partial records and the first record for a key wins.

use std::io::Write as _;
use std::path::{Path, PathBuf};

use crate::canonical;
use crate::eval::EvalReport;
use crate::record::AnalysisRecord;

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("store I/O on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("invalid id {0:?}")]
    BadId(String),
    #[error("stored file {path} is corrupt: {reason}")]
    Corrupt { path: PathBuf, reason: String },
}

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> StoreError + '_ {
    move |source| StoreError::Io { path: path.to_path_buf(), source }
}

/// Ids become file names: allow only `[A-Za-z0-9_-]`, 1-128 chars.
pub fn check_id(id: &str) -> Result<(), StoreError> {
    let ok = !id.is_empty()
        && id.len() <= 128
        && id.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_');
    if ok {
        Ok(())
    } else {
        Err(StoreError::BadId(id.to_string()))
    }
}

#[derive(Debug, Clone)]
pub struct Store {
    root: PathBuf,
}

impl Store {
    pub fn open(root: impl Into<PathBuf>) -> Result<Self, StoreError> {
        let root = root.into();
        for sub in ["analyses", "reports", "uploads"] {
            let dir = root.join(sub);
            std::fs::create_dir_all(&dir).map_err(io(&dir))?;
        }
        Ok(Self { root })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn uploads_dir(&self) -> PathBuf {
        self.root.join("uploads")
    }

    pub fn analysis_path(&self, video_id: &str, config_digest: &str) -> Result<PathBuf, StoreError> {
        check_id(video_id)?;
        check_id(config_digest)?;
        Ok(self.root.join("analyses").join(video_id).join(format!("{config_digest}.json")))
    }

    /// Write `bytes` at `path` unless something is already there. Returns
    /// the bytes that end up stored.
    fn put_once(&self, path: &Path, bytes: Vec<u8>) -> Result<Vec<u8>, StoreError> {
        let dir = path.parent().expect("store paths have a parent");
        std::fs::create_dir_all(dir).map_err(io(dir))?;
        let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io(dir))?;
        tmp.write_all(&bytes).map_err(io(tmp.path()))?;
        tmp.as_file().sync_all().map_err(io(path))?;
        match tmp.persist_noclobber(path) {
            Ok(_) => Ok(bytes),
            Err(e) if e.error.kind() == std::io::ErrorKind::AlreadyExists => {
                std::fs::read(path).map_err(io(path))
            }
            Err(e) => Err(StoreError::Io { path: path.to_path_buf(), source: e.error }),
        }
    }

    pub fn get_analysis_bytes(
        &self,
        video_id: &str,
        config_digest: &str,
    ) -> Result<Option<Vec<u8>>, StoreError> {
        let path = self.analysis_path(video_id, config_digest)?;
        match std::fs::read(&path) {
            Ok(bytes) => Ok(Some(bytes)),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
            Err(e) => Err(StoreError::Io { path, source: e }),
        }
    }

    /// Store a record; an existing record for the same key is kept and
    /// returned instead.
    pub fn put_analysis(&self, record: &AnalysisRecord) -> Result<Vec<u8>, StoreError> {
        let path = self.analysis_path(&record.video_id, &record.config_digest)?;
        let bytes = canonical::to_bytes(record)
            .map_err(|e| StoreError::Corrupt { path: path.clone(), reason: e.to_string() })?;
        self.put_once(&path, bytes)
    }

    pub fn decode_analysis(path: &Path, bytes: &[u8]) -> Result<AnalysisRecord, StoreError> {
        canonical::from_bytes(bytes)
            .map_err(|e| StoreError::Corrupt { path: path.to_path_buf(), reason: e.to_string() })
    }

    /// Config digests with a stored record for `video_id`, oldest first.
    pub fn analysis_digests(&self, video_id: &str) -> Result<Vec<String>, StoreError> {
        check_id(video_id)?;
        let dir = self.root.join("analyses").join(video_id);
        let entries = match std::fs::read_dir(&dir) {
            Ok(entries) => entries,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(vec![]),
            Err(e) => return Err(StoreError::Io { path: dir, source: e }),
        };
        let mut found = Vec::new();
        for entry in entries {
            let entry = entry.map_err(io(&dir))?;
            let path = entry.path();
            if path.extension().is_some_and(|e| e == "json") {
                let modified = entry.metadata().and_then(|m| m.modified()).ok();
                let stem = path.file_stem().unwrap_or_default().to_string_lossy().into_owned();
                found.push((modified, stem));
            }
        }
        found.sort();
        Ok(found.into_iter().map(|(_, stem)| stem).collect())
    }

    pub fn report_path(&self, id: &str) -> Result<PathBuf, StoreError> {
        check_id(id)?;
        Ok(self.root.join("reports").join(format!("{id}.json")))
    }

    pub fn put_report(&self, id: &str, report: &EvalReport) -> Result<(), StoreError> {
        let path = self.report_path(id)?;
        let bytes = canonical::to_bytes(report)
            .map_err(|e| StoreError::Corrupt { path: path.clone(), reason: e.to_string() })?;
        self.put_once(&path, bytes).map(|_| ())
    }

    pub fn get_report(&self, id: &str) -> Result<Option<EvalReport>, StoreError> {
        let path = self.report_path(id)?;
        match std::fs::read(&path) {
            Ok(bytes) => canonical::from_bytes(&bytes)
                .map(Some)
                .map_err(|e| StoreError::Corrupt { path, reason: e.to_string() }),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
            Err(e) => Err(StoreError::Io { path, source: e }),
        }
    }

    pub fn list_reports(&self) -> Result<Vec<String>, StoreError> {
        let dir = self.root.join("reports");
        let mut ids: Vec<String> = std::fs::read_dir(&dir)
            .map_err(io(&dir))?
            .filter_map(|e| e.ok())
            .map(|e| e.path())
            .filter(|p| p.extension().is_some_and(|e| e == "json"))
            .filter_map(|p| p.file_stem().map(|s| s.to_string_lossy().into_owned()))
            .collect();
        ids.sort();
        Ok(ids)
    }
}
