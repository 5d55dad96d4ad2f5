//! On-disk JSON cache of density tables, one file per `(mode, genus)`.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::hierarchy::{densities, recursion_residuals, DensityTable, Mode};
use crate::json;

/// Environment variable that supplies the cache directory when no path is given explicitly.
pub const CACHE_ENV: &str = "QKDV_CACHE";

/// Directory used when neither a path nor the environment variable is set.
pub const DEFAULT_CACHE_DIR: &str = ".qkdv-cache";

#[derive(Clone, Debug)]
pub struct DensityCache {
    dir: PathBuf,
}

/// How much of a cached table to re-derive on load.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Validation {
    /// Residuals of the step into the top entry only.
    TopEntry,
    /// Residuals of every step.
    Full,
}

impl DensityCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        DensityCache { dir: dir.into() }
    }

    /// Explicit path, else the environment variable, else the default directory.
    pub fn resolve(explicit: Option<&Path>) -> Self {
        match explicit {
            Some(p) => DensityCache::new(p),
            None => DensityCache::new(std::env::var_os(CACHE_ENV).map(PathBuf::from).unwrap_or_else(|| DEFAULT_CACHE_DIR.into())),
        }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn file_name(mode: Mode) -> String {
        match mode {
            Mode::Kdv => "kdv.json".into(),
            Mode::Ilw { genus } => format!("ilw-G{genus}.json"),
        }
    }

    pub fn path(&self, mode: Mode) -> PathBuf {
        self.dir.join(Self::file_name(mode))
    }

    /// Computes the table up to `k_max` and writes it; returns the file path.
    pub fn build(&self, mode: Mode, k_max: i32) -> Result<PathBuf> {
        let table = densities(mode, k_max)?;
        self.store(&table)
    }

    pub fn store(&self, table: &DensityTable) -> Result<PathBuf> {
        fs::create_dir_all(&self.dir)?;
        let path = self.path(table.mode);
        let tmp = path.with_extension("json.tmp");
        fs::write(&tmp, json::to_string_pretty(&encode(table)))?;
        fs::rename(&tmp, &path)?;
        Ok(path)
    }

    /// Reads the cached table for `mode`, if a file exists, and validates it.
    pub fn load(&self, mode: Mode, validation: Validation) -> Result<Option<DensityTable>> {
        let path = self.path(mode);
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(e.into()),
        };
        let value: Value = serde_json::from_str(&text)?;
        let table = decode(&value)?;
        if table.mode != mode {
            return Err(Error::CacheInvalid(format!("{} holds mode {}, expected {}", path.display(), table.mode, mode)));
        }
        validate(&table, validation)?;
        Ok(Some(table))
    }

    /// Loads a table covering `k`, computing and storing a fresh one if the cache is absent or short.
    pub fn get_or_build(&self, mode: Mode, k: i32) -> Result<DensityTable> {
        if let Some(t) = self.load(mode, Validation::TopEntry)? {
            if t.k_max() >= k {
                return Ok(t);
            }
        }
        let table = densities(mode, k)?;
        self.store(&table)?;
        Ok(table)
    }

    /// Removes the file for `mode`, or every cache file when `mode` is `None`; returns the removed paths.
    pub fn clear(&self, mode: Option<Mode>) -> Result<Vec<PathBuf>> {
        let mut removed = Vec::new();
        let targets: Vec<PathBuf> = match mode {
            Some(m) => vec![self.path(m)],
            None => match fs::read_dir(&self.dir) {
                Ok(entries) => entries
                    .filter_map(|e| e.ok().map(|e| e.path()))
                    .filter(|p| p.file_name().and_then(|n| n.to_str()).is_some_and(is_cache_file_name))
                    .collect(),
                Err(e) if e.kind() == std::io::ErrorKind::NotFound => Vec::new(),
                Err(e) => return Err(e.into()),
            },
        };
        for p in targets {
            match fs::remove_file(&p) {
                Ok(()) => removed.push(p),
                Err(e) if e.kind() == std::io::ErrorKind::NotFound => {}
                Err(e) => return Err(e.into()),
            }
        }
        removed.sort();
        Ok(removed)
    }
}

fn is_cache_file_name(name: &str) -> bool {
    name == "kdv.json"
        || name.strip_prefix("ilw-G").and_then(|r| r.strip_suffix(".json")).is_some_and(|g| g.parse::<u32>().is_ok())
}

pub fn encode(table: &DensityTable) -> Value {
    let entries: Vec<Value> = table.iter().map(|(k, g)| json!({"k": k, "density": json::diffpoly_to_json(g)})).collect();
    let genus = match table.mode {
        Mode::Kdv => Value::Null,
        Mode::Ilw { genus } => json!(genus),
    };
    json!({"mode": table.mode.name(), "G": genus, "k_max": table.k_max(), "densities": entries})
}

pub fn decode(v: &Value) -> Result<DensityTable> {
    let bad = |m: String| Error::CacheInvalid(m);
    let mode = match (v.get("mode").and_then(Value::as_str), v.get("G")) {
        (Some("kdv"), Some(Value::Null) | None) => Mode::Kdv,
        (Some("ilw"), Some(g)) => {
            let genus = g.as_u64().and_then(|g| u32::try_from(g).ok()).filter(|g| *g >= 1);
            Mode::Ilw { genus: genus.ok_or_else(|| bad(format!("invalid genus {g}")))? }
        }
        _ => return Err(bad("missing or unknown mode".into())),
    };
    let k_max = v
        .get("k_max")
        .and_then(Value::as_i64)
        .filter(|k| (-2..=i32::MAX as i64).contains(k))
        .ok_or_else(|| bad("missing or invalid k_max".into()))?;
    let entries = v.get("densities").and_then(Value::as_array).ok_or_else(|| bad("missing densities".into()))?;
    let mut map = BTreeMap::new();
    for e in entries {
        let k = e.get("k").and_then(Value::as_i64).ok_or_else(|| bad("entry without k".into()))?;
        let g = json::diffpoly_from_json(e.get("density").ok_or_else(|| bad(format!("entry {k} without density")))?)?;
        if map.insert(k as i32, g.with_trunc(mode.trunc())).is_some() {
            return Err(bad(format!("duplicate entry {k}")));
        }
    }
    let expected: Vec<i32> = (-2..=k_max as i32).collect();
    if map.keys().copied().collect::<Vec<_>>() != expected {
        return Err(bad(format!("entries do not cover -2..={k_max} exactly")));
    }
    Ok(DensityTable::new(mode, false, map))
}

/// Checks the seed entries, the recursion residuals of the requested steps and, since residuals
/// cannot see constants in the top entry, that the reduced form of each checked entry is
/// weight-homogeneous and constant-free.
pub fn validate(table: &DensityTable, validation: Validation) -> Result<()> {
    let fresh = densities(table.mode, (-1).min(table.k_max()))?;
    for (k, g) in fresh.iter() {
        if table.get(*k) != Some(g) {
            return Err(Error::CacheInvalid(format!("seed density {k} differs from the recursion")));
        }
    }
    let top = table.k_max();
    let first = match validation {
        Validation::TopEntry => top - 1,
        Validation::Full => -2,
    };
    for k in first.max(-2)..top {
        let (a, b) = recursion_residuals(table, k).expect("consecutive entries exist");
        if !a.is_zero() || !b.is_zero() {
            return Err(Error::CacheInvalid(format!("recursion residual nonzero at step {k} -> {}", k + 1)));
        }
    }
    for k in first.max(-2) + 1..=top {
        let reduced = table.get(k).expect("entry exists").b_operator(true).with_trunc(table.mode.trunc());
        if !reduced.is_homogeneous(k as i64 + 2) || (k >= -1 && !reduced.constant_term().is_zero()) {
            return Err(Error::CacheInvalid(format!("reduced density {k} is not homogeneous and constant-free")));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn build_validate_rebuild() {
        let dir = tempfile::tempdir().unwrap();
        let cache = DensityCache::new(dir.path());
        let path = cache.build(Mode::Kdv, 4).unwrap();
        assert!(path.ends_with("kdv.json"));
        let first = fs::read(&path).unwrap();
        let t = cache.load(Mode::Kdv, Validation::Full).unwrap().unwrap();
        assert_eq!(t.k_max(), 4);
        assert_eq!(t.get(2), densities(Mode::Kdv, 2).unwrap().get(2));
        cache.build(Mode::Kdv, 4).unwrap();
        assert_eq!(fs::read(&path).unwrap(), first);
    }

    #[test]
    fn tamper_is_detected() {
        let dir = tempfile::tempdir().unwrap();
        let cache = DensityCache::new(dir.path());
        let path = cache.build(Mode::Kdv, 3).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        // the u0^2/2 coefficient of g_0
        let tampered = text.replacen("\"1/2\"", "\"1/3\"", 1);
        assert_ne!(tampered, text);
        fs::write(&path, tampered).unwrap();
        assert!(matches!(cache.load(Mode::Kdv, Validation::Full), Err(Error::CacheInvalid(_))));
    }

    #[test]
    fn constant_in_top_entry_is_detected() {
        let dir = tempfile::tempdir().unwrap();
        let cache = DensityCache::new(dir.path());
        let table = densities(Mode::Kdv, 3).unwrap();
        let mut map: BTreeMap<i32, _> = table.iter().map(|(k, g)| (*k, g.clone())).collect();
        let top = map.get_mut(&3).unwrap();
        *top = top.add(&crate::diffpoly::DiffPoly::one());
        cache.store(&DensityTable::new(Mode::Kdv, false, map)).unwrap();
        assert!(matches!(cache.load(Mode::Kdv, Validation::TopEntry), Err(Error::CacheInvalid(_))));
    }

    #[test]
    fn ilw_file_and_mode_mismatch() {
        let dir = tempfile::tempdir().unwrap();
        let cache = DensityCache::new(dir.path());
        let path = cache.build(Mode::Ilw { genus: 2 }, 1).unwrap();
        assert!(path.ends_with("ilw-G2.json"));
        assert!(cache.load(Mode::Ilw { genus: 2 }, Validation::Full).unwrap().is_some());
        fs::copy(&path, cache.path(Mode::Ilw { genus: 3 })).unwrap();
        assert!(matches!(cache.load(Mode::Ilw { genus: 3 }, Validation::TopEntry), Err(Error::CacheInvalid(_))));
        assert_eq!(cache.clear(None).unwrap().len(), 2);
        assert!(cache.load(Mode::Ilw { genus: 2 }, Validation::Full).unwrap().is_none());
    }

    #[test]
    fn get_or_build_extends() {
        let dir = tempfile::tempdir().unwrap();
        let cache = DensityCache::new(dir.path());
        cache.build(Mode::Kdv, 1).unwrap();
        assert_eq!(cache.get_or_build(Mode::Kdv, 3).unwrap().k_max(), 3);
        assert_eq!(cache.load(Mode::Kdv, Validation::TopEntry).unwrap().unwrap().k_max(), 3);
    }
}
