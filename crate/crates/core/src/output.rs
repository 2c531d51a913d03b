//! All-or-nothing output: files are staged in a temporary directory next to
//! the destination and moved into place only when the command succeeds.

use std::fs;
use std::path::{Path, PathBuf};

use tempfile::TempDir;

use crate::Error;

pub struct OutputStage {
    target: PathBuf,
    staging: TempDir,
    files: Vec<String>,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

impl OutputStage {
    pub fn new(target: impl Into<PathBuf>) -> Result<Self, Error> {
        let target = target.into();
        let parent = match target.parent() {
            Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
            _ => PathBuf::from("."),
        };
        fs::create_dir_all(&parent).map_err(io_err(&parent))?;
        let staging = tempfile::Builder::new()
            .prefix(".wnn-staging-")
            .tempdir_in(&parent)
            .map_err(io_err(&parent))?;
        Ok(Self {
            target,
            staging,
            files: Vec::new(),
        })
    }

    pub fn target(&self) -> &Path {
        &self.target
    }

    pub fn write(&mut self, name: &str, contents: impl AsRef<[u8]>) -> Result<(), Error> {
        let path = self.staging.path().join(name);
        fs::write(&path, contents).map_err(io_err(&path))?;
        if !self.files.iter().any(|f| f == name) {
            self.files.push(name.to_string());
        }
        Ok(())
    }

    /// Moves every staged file into the target directory, creating it if needed.
    pub fn commit(self) -> Result<Vec<PathBuf>, Error> {
        fs::create_dir_all(&self.target).map_err(io_err(&self.target))?;
        let mut written = Vec::with_capacity(self.files.len());
        for name in &self.files {
            let dest = self.target.join(name);
            fs::rename(self.staging.path().join(name), &dest).map_err(io_err(&dest))?;
            written.push(dest);
        }
        Ok(written)
    }
}
