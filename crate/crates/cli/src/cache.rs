//! Content-addressed record cache.
//!
//! An entry is a JSON-lines file named by the sha256 of the run's key
//! material. Its first line repeats the schema version and the key
//! material; entries that do not match both are ignored and rewritten.

use std::path::{Path, PathBuf};

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::CliError;
use crate::output::{parse_jsonl, to_jsonl, SCHEMA_VERSION};

pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn new(dir: &Path) -> Self {
        Cache { dir: dir.to_path_buf() }
    }

    fn path(&self, material: &str) -> PathBuf {
        let digest = Sha256::digest(material.as_bytes());
        self.dir.join(format!("{}.jsonl", hex::encode(digest)))
    }

    fn header(material: &str) -> Value {
        json!({"cache_key": material, "schema_version": SCHEMA_VERSION})
    }

    pub fn load(&self, material: &str) -> Option<Vec<Value>> {
        let text = std::fs::read_to_string(self.path(material)).ok()?;
        let mut records = parse_jsonl(&text).ok()?;
        if records.is_empty() || records[0] != Self::header(material) {
            return None;
        }
        records.remove(0);
        Some(records)
    }

    pub fn store(&self, material: &str, records: &[Value]) -> Result<(), CliError> {
        std::fs::create_dir_all(&self.dir).map_err(|e| CliError::io(e, &self.dir))?;
        let mut all = vec![Self::header(material)];
        all.extend_from_slice(records);
        let path = self.path(material);
        // write then rename so a concurrent reader never sees half an entry
        let tmp = path.with_extension("tmp");
        std::fs::write(&tmp, to_jsonl(&all)).map_err(|e| CliError::io(e, &tmp))?;
        std::fs::rename(&tmp, &path).map_err(|e| CliError::io(e, &path))
    }
}
