//! Content-addressed result cache: one file per key, a header line naming
//! the format and code version, then the JSON record.

use std::fs;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::config::{Command, Params};
use crate::error::CliError;
use crate::record::ResultRecord;

pub const HEADER: &str = concat!("ogc-cache/1 ogc-core/", env!("CARGO_PKG_VERSION"));

/// Hex sha256 of the header, command and parameters.
pub fn key(command: Command, params: &Params) -> String {
    let mut hasher = Sha256::new();
    hasher.update(HEADER.as_bytes());
    hasher.update(b"\n");
    hasher.update(command.to_string().as_bytes());
    hasher.update(b"\n");
    hasher.update(serde_json::to_string(params).expect("params serialize").as_bytes());
    hasher.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn new(dir: &Path) -> Cache {
        Cache { dir: dir.to_path_buf() }
    }

    pub fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    pub fn load(&self, key: &str) -> Result<Option<ResultRecord>, CliError> {
        let path = self.path(key);
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(e.into()),
        };
        let corrupt = |reason: String| CliError::CorruptCache { key: key.to_string(), reason };
        let (header, body) = text.split_once('\n').ok_or_else(|| corrupt("missing header".into()))?;
        if header != HEADER {
            return Err(corrupt(format!("header `{header}`, expected `{HEADER}`")));
        }
        serde_json::from_str(body).map(Some).map_err(|e| corrupt(e.to_string()))
    }

    /// Writes through a temporary file so readers never see a partial entry.
    pub fn store(&self, key: &str, record: &ResultRecord) -> Result<(), CliError> {
        let tmp = self.dir.join(format!("{key}.tmp"));
        fs::write(&tmp, format!("{HEADER}\n{}\n", record.to_json()))?;
        fs::rename(&tmp, self.path(key))?;
        Ok(())
    }
}
