//! Output staging: files are collected in memory and written only once a
//! command has fully succeeded, each through a temporary file and a rename.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

#[derive(Debug, Default)]
pub struct Outputs {
    files: Vec<(PathBuf, String)>,
}

impl Outputs {
    pub fn add(&mut self, path: impl Into<PathBuf>, contents: String) {
        self.files.push((path.into(), contents));
    }

    pub fn paths(&self) -> impl Iterator<Item = &Path> {
        self.files.iter().map(|(p, _)| p.as_path())
    }

    pub fn commit(self) -> io::Result<()> {
        let mut staged = Vec::with_capacity(self.files.len());
        for (path, contents) in &self.files {
            let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
            fs::create_dir_all(dir)?;
            let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
            let tmp = dir.join(format!(".{name}.tmp-{}", std::process::id()));
            if let Err(e) = fs::write(&tmp, contents) {
                let _ = fs::remove_file(&tmp);
                for (t, _) in &staged {
                    let _ = fs::remove_file(t);
                }
                return Err(e);
            }
            staged.push((tmp, path.clone()));
        }
        for (tmp, path) in staged {
            fs::rename(&tmp, &path)?;
        }
        Ok(())
    }
}
