//! On-disk store of computed `f_k(n)` values, one JSON file per `(n, k)`.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use ulam_core::SearchReport;

pub const EXACT: &str = "exact";
pub const LOWER_BOUND: &str = "lower_bound";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheEntry {
    #[serde(with = "decimal")]
    pub n: u64,
    #[serde(with = "decimal")]
    pub k: u64,
    pub value: String,
    pub status: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<String>>,
    pub source: String,
    #[serde(with = "decimal")]
    pub elapsed_ms: u64,
    pub created_at: String,
}

impl CacheEntry {
    pub fn from_report(report: &SearchReport, source: &str) -> Self {
        CacheEntry {
            n: report.n as u64,
            k: report.k as u64,
            value: report.best_size.to_string(),
            status: report.status.as_str().to_string(),
            witness: Some(
                report
                    .witness
                    .members()
                    .iter()
                    .map(|p| p.to_string())
                    .collect(),
            ),
            source: source.to_string(),
            elapsed_ms: report.elapsed_ms,
            created_at: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        }
    }

    pub fn is_exact(&self) -> bool {
        self.status == EXACT
    }

    pub fn value(&self) -> Result<BigUint> {
        self.value
            .parse()
            .with_context(|| format!("cache value {:?} is not a nonnegative integer", self.value))
    }

    fn validate(&self) -> Result<()> {
        self.value()?;
        if self.status != EXACT && self.status != LOWER_BOUND {
            bail!("unknown status {:?}", self.status);
        }
        Ok(())
    }

    /// Whether `self` should replace `old` in the cache.
    fn improves_on(&self, old: &CacheEntry) -> Result<bool> {
        Ok(match (old.is_exact(), self.is_exact()) {
            (true, _) => false,
            (false, true) => true,
            (false, false) => self.value()? > old.value()?,
        })
    }
}

pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)
            .with_context(|| format!("cannot create cache directory {}", dir.display()))?;
        Ok(Cache { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path(&self, n: u64, k: u64) -> PathBuf {
        self.dir.join(format!("f_{n}_{k}.json"))
    }

    /// Reads the entry for `(n, k)`. A file that does not parse is renamed
    /// aside with a warning and treated as missing.
    pub fn load(&self, n: u64, k: u64) -> Result<Option<CacheEntry>> {
        let path = self.path(n, k);
        let text = match fs::read_to_string(&path) {
            Ok(text) => text,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(e).with_context(|| format!("cannot read {}", path.display())),
        };
        let parsed = serde_json::from_str::<CacheEntry>(&text)
            .map_err(anyhow::Error::from)
            .and_then(|entry| {
                entry.validate()?;
                if (entry.n, entry.k) != (n, k) {
                    bail!("entry is for n = {}, k = {}", entry.n, entry.k);
                }
                Ok(entry)
            });
        match parsed {
            Ok(entry) => Ok(Some(entry)),
            Err(e) => {
                let aside = path.with_extension("json.corrupt");
                fs::rename(&path, &aside)
                    .with_context(|| format!("cannot quarantine {}", path.display()))?;
                eprintln!(
                    "warning: corrupt cache entry {} ({e:#}); moved to {}",
                    path.display(),
                    aside.display()
                );
                Ok(None)
            }
        }
    }

    /// Writes `entry` unless the stored one is at least as good, and
    /// returns whichever entry is stored afterwards.
    pub fn store(&self, entry: CacheEntry) -> Result<CacheEntry> {
        entry.validate()?;
        if let Some(old) = self.load(entry.n, entry.k)? {
            if !entry.improves_on(&old)? {
                return Ok(old);
            }
        }
        let path = self.path(entry.n, entry.k);
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir)
            .with_context(|| format!("cannot create a temporary file in {}", self.dir.display()))?;
        serde_json::to_writer_pretty(&mut tmp, &entry)?;
        tmp.write_all(b"\n")?;
        tmp.as_file().sync_all()?;
        tmp.persist(&path)
            .with_context(|| format!("cannot write {}", path.display()))?;
        Ok(entry)
    }

    /// Every readable entry, ordered by `(n, k)`.
    pub fn entries(&self) -> Result<Vec<CacheEntry>> {
        let mut keys = Vec::new();
        for item in fs::read_dir(&self.dir)? {
            let name = item?.file_name();
            let Some(name) = name.to_str() else { continue };
            let Some(stem) = name
                .strip_prefix("f_")
                .and_then(|s| s.strip_suffix(".json"))
            else {
                continue;
            };
            if let Some((n, k)) = stem.split_once('_') {
                if let (Ok(n), Ok(k)) = (n.parse::<u64>(), k.parse::<u64>()) {
                    keys.push((n, k));
                }
            }
        }
        keys.sort_unstable();
        let mut out = Vec::new();
        for (n, k) in keys {
            out.extend(self.load(n, k)?);
        }
        Ok(out)
    }
}

/// Integers written as JSON strings.
mod decimal {
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(value: &u64, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&value.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<u64, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(D::Error::custom)
    }
}
