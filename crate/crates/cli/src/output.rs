use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

/// Where artifacts go. Existing files are only replaced under `--force`, and
/// every target is checked before any work starts.
pub struct Output {
    dir: Option<PathBuf>,
    force: bool,
}

impl Output {
    pub fn new(path: &Path, force: bool) -> Self {
        let dir = (path != Path::new("-")).then(|| path.to_path_buf());
        Self { dir, force }
    }

    pub fn is_stdout(&self) -> bool {
        self.dir.is_none()
    }

    pub fn path(&self, name: &str) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(name))
    }

    pub fn check(&self, names: &[String]) -> Result<(), String> {
        if self.force {
            return Ok(());
        }
        for name in names {
            if let Some(p) = self.path(name) {
                if p.exists() {
                    return Err(format!("{} exists; pass --force to overwrite", p.display()));
                }
            }
        }
        Ok(())
    }

    pub fn write(&self, name: &str, bytes: &[u8]) -> Result<(), String> {
        match &self.dir {
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(bytes).and_then(|_| out.flush()).map_err(|e| e.to_string())
            }
            Some(dir) => {
                fs::create_dir_all(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
                let p = dir.join(name);
                fs::write(&p, bytes).map_err(|e| format!("{}: {e}", p.display()))
            }
        }
    }
}
