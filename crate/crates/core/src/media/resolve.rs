//! Turning a user-supplied source string into a local file.

use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};

use super::IngestError;

pub trait SourceResolver: Send + Sync {
    /// Whether resolving `source` downloads into a scratch directory.
    fn needs_scratch(&self, source: &str) -> bool;
    fn resolve(&self, source: &str, scratch: Option<&Path>) -> Result<PathBuf, IngestError>;
}

fn is_remote(source: &str) -> bool {
    source.starts_with("http://") || source.starts_with("https://")
}

/// Plain paths and `file://` URLs.
#[derive(Debug, Default, Clone, Copy)]
pub struct LocalFileResolver;

impl SourceResolver for LocalFileResolver {
    fn needs_scratch(&self, _source: &str) -> bool {
        false
    }

    fn resolve(&self, source: &str, _scratch: Option<&Path>) -> Result<PathBuf, IngestError> {
        if is_remote(source) {
            return Err(IngestError::Unreadable(format!(
                "no URL resolver configured for {source}"
            )));
        }
        let path = PathBuf::from(source.strip_prefix("file://").unwrap_or(source));
        if !path.is_file() {
            return Err(IngestError::Unreadable(format!("{} is not a readable file", path.display())));
        }
        Ok(path)
    }
}

/// Delegates URLs to a deployment-supplied command:
/// `<command> <url> <out_dir>`, which prints the downloaded path on stdout.
#[derive(Debug, Clone)]
pub struct CommandResolver {
    command: String,
}

impl CommandResolver {
    pub fn new(command: String) -> Self {
        Self { command }
    }
}

impl SourceResolver for CommandResolver {
    fn needs_scratch(&self, _source: &str) -> bool {
        true
    }

    fn resolve(&self, source: &str, scratch: Option<&Path>) -> Result<PathBuf, IngestError> {
        let scratch = scratch.ok_or_else(|| IngestError::Unreadable("no scratch directory".into()))?;
        let output = Command::new(&self.command)
            .arg(source)
            .arg(scratch)
            .stdin(Stdio::null())
            .output()
            .map_err(|e| IngestError::Unreadable(format!("cannot run resolver: {e}")))?;
        if !output.status.success() {
            return Err(IngestError::Unreadable(format!(
                "resolver failed for {source}: {}",
                String::from_utf8_lossy(&output.stderr).trim()
            )));
        }
        let printed = String::from_utf8_lossy(&output.stdout).trim().to_string();
        let path = PathBuf::from(printed);
        if !path.is_file() {
            return Err(IngestError::Unreadable(format!(
                "resolver did not produce a file for {source}"
            )));
        }
        Ok(path)
    }
}

/// Local files directly; URLs through the command resolver when configured.
#[derive(Debug, Clone, Default)]
pub struct DefaultResolver {
    remote: Option<CommandResolver>,
}

impl DefaultResolver {
    pub fn new(remote: Option<CommandResolver>) -> Self {
        Self { remote }
    }
}

impl SourceResolver for DefaultResolver {
    fn needs_scratch(&self, source: &str) -> bool {
        is_remote(source) && self.remote.is_some()
    }

    fn resolve(&self, source: &str, scratch: Option<&Path>) -> Result<PathBuf, IngestError> {
        match (&self.remote, is_remote(source)) {
            (Some(remote), true) => remote.resolve(source, scratch),
            _ => LocalFileResolver.resolve(source, scratch),
        }
    }
}
