//! Sessions and reports kept in one JSON file; images stored by content hash.

use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::api::Session;
use protopredict::report::BenchmarkReport;

pub const STORE_SCHEMA: &str = "protopredict/store-v1";
pub const STORE_FILE: &str = "store.json";
pub const IMAGE_DIR: &str = "images";

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("store I/O: {0}")]
    Io(#[from] std::io::Error),
    #[error("store file {path}: {reason}")]
    Format { path: PathBuf, reason: String },
}

#[derive(Debug, Default, Serialize, Deserialize)]
struct StoreData {
    schema: String,
    sessions: BTreeMap<String, Session>,
    reports: BTreeMap<String, BenchmarkReport>,
}

/// In-memory when opened without a directory.
#[derive(Debug)]
pub struct Store {
    dir: Option<PathBuf>,
    data: Mutex<StoreData>,
    memory_images: Mutex<HashMap<String, Vec<u8>>>,
}

impl Store {
    pub fn in_memory() -> Self {
        Store {
            dir: None,
            data: Mutex::new(StoreData {
                schema: STORE_SCHEMA.into(),
                ..StoreData::default()
            }),
            memory_images: Mutex::default(),
        }
    }

    pub fn open(dir: &Path) -> Result<Self, StoreError> {
        std::fs::create_dir_all(dir.join(IMAGE_DIR))?;
        let path = dir.join(STORE_FILE);
        let data = if path.exists() {
            let text = std::fs::read_to_string(&path)?;
            let data: StoreData = serde_json::from_str(&text).map_err(|e| StoreError::Format {
                path: path.clone(),
                reason: e.to_string(),
            })?;
            if data.schema != STORE_SCHEMA {
                return Err(StoreError::Format {
                    path,
                    reason: format!("unsupported schema {:?}", data.schema),
                });
            }
            data
        } else {
            StoreData {
                schema: STORE_SCHEMA.into(),
                ..StoreData::default()
            }
        };
        Ok(Store {
            dir: Some(dir.to_owned()),
            data: Mutex::new(data),
            memory_images: Mutex::default(),
        })
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    fn lock(&self) -> std::sync::MutexGuard<'_, StoreData> {
        self.data.lock().unwrap_or_else(|p| p.into_inner())
    }

    fn persist(&self, data: &StoreData) -> Result<(), StoreError> {
        let Some(dir) = &self.dir else { return Ok(()) };
        let tmp = dir.join(format!("{STORE_FILE}.tmp"));
        std::fs::write(&tmp, serde_json::to_vec(data).expect("store serializes"))?;
        std::fs::rename(tmp, dir.join(STORE_FILE))?;
        Ok(())
    }

    pub fn session(&self, id: &str) -> Option<Session> {
        self.lock().sessions.get(id).cloned()
    }

    pub fn put_session(&self, s: Session) -> Result<(), StoreError> {
        let mut d = self.lock();
        d.sessions.insert(s.session_id.clone(), s);
        self.persist(&d)
    }

    pub fn report(&self, run_id: &str) -> Option<BenchmarkReport> {
        self.lock().reports.get(run_id).cloned()
    }

    pub fn put_report(&self, r: BenchmarkReport) -> Result<(), StoreError> {
        let mut d = self.lock();
        d.reports.insert(r.manifest.run_id.clone(), r);
        self.persist(&d)
    }

    /// Stores image bytes under their SHA-256; returns the hex digest and,
    /// for on-disk stores, the file path.
    pub fn put_image(&self, bytes: &[u8], extension: &str) -> Result<(String, Option<PathBuf>), StoreError> {
        let digest = hex(&Sha256::digest(bytes));
        let Some(dir) = &self.dir else {
            self.memory_images
                .lock()
                .unwrap_or_else(|p| p.into_inner())
                .insert(digest.clone(), bytes.to_vec());
            return Ok((digest, None));
        };
        let path = image_path(dir, &digest, extension);
        if !path.exists() {
            std::fs::write(&path, bytes)?;
        }
        Ok((digest, Some(path)))
    }

    /// A reference the predictor can load: a file path, or a `data:` URL for
    /// in-memory stores.
    pub fn image_ref(&self, digest: &str, media_type: &str) -> Option<String> {
        match &self.dir {
            Some(dir) => {
                let path = image_path(dir, digest, extension_for(media_type));
                path.exists().then(|| path.to_string_lossy().into_owned())
            }
            None => {
                use base64::Engine as _;
                let images = self.memory_images.lock().unwrap_or_else(|p| p.into_inner());
                let bytes = images.get(digest)?;
                let b64 = base64::engine::general_purpose::STANDARD.encode(bytes);
                Some(format!("data:{media_type};base64,{b64}"))
            }
        }
    }
}

fn image_path(dir: &Path, digest: &str, extension: &str) -> PathBuf {
    dir.join(IMAGE_DIR).join(format!("{digest}.{extension}"))
}

pub fn extension_for(media_type: &str) -> &'static str {
    match media_type {
        "image/png" => "png",
        "image/jpeg" => "jpg",
        "image/gif" => "gif",
        "image/webp" => "webp",
        _ => "bin",
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}
