//! All-or-nothing output: every file is written to a temporary name in the
//! target directory and renamed into place only once all writes succeeded.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};

pub struct Staged {
    dir: PathBuf,
    files: Vec<(String, Vec<u8>)>,
}

impl Staged {
    /// Creates `dir` if needed.
    pub fn new(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir)
            .with_context(|| format!("cannot create output directory {}", dir.display()))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    pub fn add(&mut self, name: impl Into<String>, contents: impl Into<Vec<u8>>) {
        self.files.push((name.into(), contents.into()));
    }

    pub fn commit(self) -> Result<Vec<PathBuf>> {
        let mut temps = Vec::new();
        let written: Result<()> = self.files.iter().try_for_each(|(name, data)| {
            let tmp = self.dir.join(format!(".{name}.{}.tmp", std::process::id()));
            temps.push(tmp.clone());
            fs::write(&tmp, data).with_context(|| format!("cannot write {}", tmp.display()))
        });
        if let Err(e) = written {
            for t in &temps {
                let _ = fs::remove_file(t);
            }
            return Err(e);
        }
        let mut finals = Vec::new();
        for (tmp, (name, _)) in temps.iter().zip(&self.files) {
            let dest = self.dir.join(name);
            fs::rename(tmp, &dest)
                .with_context(|| format!("cannot move {} into place", dest.display()))?;
            log::debug!("wrote {}", dest.display());
            finals.push(dest);
        }
        Ok(finals)
    }
}
