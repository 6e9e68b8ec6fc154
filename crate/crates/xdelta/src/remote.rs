//! Fetching single curve records over HTTP, with a per-label disk cache.
//!
//! The endpoint answers `GET` with one JSON object in the CSV row layout
//! (see [`crate::dataset::Row`]). A URL containing `{label}` has it
//! substituted; otherwise `/{label}` is appended.

use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::Duration;

use xdelta_core::ellcurve::EllipticCurveRecord;

use crate::dataset::Row;
use crate::{DataError, Result};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RemoteConfig {
    /// `None` means offline: only the cache is consulted.
    pub base_url: Option<String>,
    pub cache_dir: Option<PathBuf>,
    pub timeout: Option<Duration>,
}

impl RemoteConfig {
    /// From `XDQ_LMFDB_URL` (unset or empty is offline) and `XDQ_CACHE_DIR`.
    pub fn from_env() -> Self {
        let base_url = std::env::var("XDQ_LMFDB_URL")
            .ok()
            .filter(|s| !s.trim().is_empty());
        let cache_dir = std::env::var_os("XDQ_CACHE_DIR")
            .filter(|s| !s.is_empty())
            .map(PathBuf::from);
        Self {
            base_url,
            cache_dir,
            timeout: Some(Duration::from_secs(30)),
        }
    }
}

/// `11a1`, `37b2`, `1728ba3`: conductor, class letters, curve number.
pub fn is_valid_label(label: &str) -> bool {
    let rest = label.trim_start_matches(|c: char| c.is_ascii_digit());
    let digits = label.len() - rest.len();
    let number = rest.trim_start_matches(|c: char| c.is_ascii_lowercase());
    let letters = rest.len() - number.len();
    digits > 0
        && !label.starts_with('0')
        && letters > 0
        && !number.is_empty()
        && number.bytes().all(|b| b.is_ascii_digit())
}

pub struct RemoteClient {
    config: RemoteConfig,
    agent: ureq::Agent,
    write_lock: Mutex<()>,
}

impl RemoteClient {
    pub fn new(config: RemoteConfig) -> Self {
        let agent = ureq::Agent::config_builder()
            .timeout_global(config.timeout)
            .build()
            .into();
        Self {
            config,
            agent,
            write_lock: Mutex::new(()),
        }
    }

    pub fn from_env() -> Self {
        Self::new(RemoteConfig::from_env())
    }

    pub fn config(&self) -> &RemoteConfig {
        &self.config
    }

    fn url(&self, base: &str, label: &str) -> String {
        if base.contains("{label}") {
            base.replace("{label}", label)
        } else {
            format!("{}/{label}", base.trim_end_matches('/'))
        }
    }

    fn cache_path(&self, label: &str) -> Option<PathBuf> {
        self.config
            .cache_dir
            .as_ref()
            .map(|d| d.join(format!("{label}.json")))
    }

    /// Online: fetch, validate and cache. Offline: the cached copy.
    pub fn fetch(&self, label: &str) -> Result<EllipticCurveRecord> {
        if !is_valid_label(label) {
            return Err(DataError::UnknownLabel(label.into()));
        }
        let Some(base) = self.config.base_url.as_deref() else {
            return match self.cached(label)? {
                Some(r) => Ok(r),
                None => Err(DataError::Offline(label.into())),
            };
        };
        let body = self.get(&self.url(base, label), label)?;
        let rec = decode(label, &body)?;
        if let Some(path) = self.cache_path(label) {
            self.store(&path, &body)?;
        }
        Ok(rec)
    }

    /// The cached record, revalidated.
    pub fn cached(&self, label: &str) -> Result<Option<EllipticCurveRecord>> {
        let Some(path) = self.cache_path(label) else {
            return Ok(None);
        };
        match std::fs::read_to_string(&path) {
            Ok(text) => decode(label, &text).map(Some),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
            Err(source) => Err(DataError::Io { path, source }),
        }
    }

    fn get(&self, url: &str, label: &str) -> Result<String> {
        let network = |msg: String| DataError::Network {
            label: label.into(),
            msg,
        };
        match self
            .agent
            .get(url)
            .header("Accept", "application/json")
            .call()
        {
            Ok(mut resp) => resp
                .body_mut()
                .read_to_string()
                .map_err(|e| network(e.to_string())),
            Err(ureq::Error::StatusCode(404)) => Err(DataError::UnknownLabel(label.into())),
            Err(ureq::Error::StatusCode(code)) => Err(network(format!("HTTP status {code}"))),
            Err(e) => Err(network(e.to_string())),
        }
    }

    fn store(&self, path: &Path, body: &str) -> Result<()> {
        use std::io::Write;
        let io = |source| DataError::Io {
            path: path.into(),
            source,
        };
        let dir = path.parent().expect("cache file has a parent");
        let _guard = self.write_lock.lock().unwrap_or_else(|p| p.into_inner());
        std::fs::create_dir_all(dir).map_err(io)?;
        let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
        tmp.write_all(body.as_bytes()).map_err(io)?;
        tmp.persist(path).map_err(|e| io(e.error))?;
        Ok(())
    }
}

fn decode(label: &str, body: &str) -> Result<EllipticCurveRecord> {
    let drift = |msg: String| DataError::SchemaDrift {
        label: label.into(),
        msg,
    };
    let row: Row = serde_json::from_str(body).map_err(|e| drift(e.to_string()))?;
    if row.label != label {
        return Err(drift(format!("response is for {}", row.label)));
    }
    row.into_record().map_err(drift)
}
