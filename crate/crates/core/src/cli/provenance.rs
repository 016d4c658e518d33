use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

/// Record of how an artifact was produced. Holds no timestamps so that
/// identical invocations yield identical files.
#[derive(Debug, Clone, PartialEq)]
pub struct Provenance {
    pub command: String,
    pub seed: u64,
    pub config_digest: Option<String>,
    pub version: &'static str,
}

impl Provenance {
    pub fn new(args: &[String], seed: u64, config_digest: Option<String>) -> Self {
        Self {
            command: args.join(" "),
            seed,
            config_digest,
            version: env!("CARGO_PKG_VERSION"),
        }
    }

    pub fn render(&self) -> String {
        format!(
            "command={}\nseed={}\nconfig_sha256={}\nversion={}\n",
            self.command,
            self.seed,
            self.config_digest.as_deref().unwrap_or("none"),
            self.version
        )
    }

    /// Sidecar path for an output file: `<out>.provenance`.
    pub fn sidecar(out: &Path) -> PathBuf {
        let mut name = out.as_os_str().to_owned();
        name.push(".provenance");
        PathBuf::from(name)
    }

    pub fn write_beside(&self, out: &Path) -> Result<()> {
        let path = Self::sidecar(out);
        fs::write(&path, self.render()).map_err(|e| Error::io(path, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn render_and_sidecar() {
        let p = Provenance::new(&["score".into(), "--pred".into(), "p.csv".into()], 7, None);
        let text = p.render();
        assert!(text.starts_with("command=score --pred p.csv\nseed=7\nconfig_sha256=none\nversion="));
        assert_eq!(Provenance::sidecar(Path::new("out/r.txt")), PathBuf::from("out/r.txt.provenance"));
    }
}
