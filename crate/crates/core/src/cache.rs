//! Prediction through cached per-region affine maps.
//!
//! A query point's activation pattern is its cache key. On a miss the
//! region's affine map is rebuilt from the symbolic recurrences along that
//! pattern; the query point itself proves the region is non-empty, so no
//! feasibility test is needed.

use std::collections::{BTreeMap, HashMap};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::RwLock;

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::network::{NetworkError, NetworkSpec};
use crate::tropical::{trace_pattern, AffineMap, TropicalError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CacheError {
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Tropical(#[from] TropicalError),
    #[error("cache is full ({0} entries)")]
    Full(usize),
    #[error("malformed cache document: {0}")]
    Malformed(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub output: Array1<f64>,
    pub key: String,
    pub hit: bool,
}

/// Pattern string -> affine map of the network on that region.
#[derive(Debug, Default)]
pub struct RegionCache {
    entries: RwLock<HashMap<String, AffineMap>>,
    hits: AtomicU64,
    misses: AtomicU64,
    max_entries: Option<usize>,
}

#[derive(Serialize, Deserialize)]
struct EntryDocument {
    #[serde(rename = "M")]
    m: Vec<Vec<f64>>,
    c: Vec<f64>,
}

impl RegionCache {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserting beyond `limit` distinct keys fails instead of evicting.
    pub fn with_max_entries(limit: usize) -> Self {
        RegionCache {
            max_entries: Some(limit),
            ..Self::default()
        }
    }

    pub fn len(&self) -> usize {
        self.entries.read().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn hits(&self) -> u64 {
        self.hits.load(Ordering::Relaxed)
    }

    pub fn misses(&self) -> u64 {
        self.misses.load(Ordering::Relaxed)
    }

    pub fn contains(&self, key: &str) -> bool {
        self.entries.read().unwrap().contains_key(key)
    }

    pub fn get(&self, key: &str) -> Option<AffineMap> {
        self.entries.read().unwrap().get(key).cloned()
    }

    pub fn keys(&self) -> Vec<String> {
        let mut keys: Vec<String> = self.entries.read().unwrap().keys().cloned().collect();
        keys.sort();
        keys
    }

    fn insert(&self, key: String, map: AffineMap) -> Result<(), CacheError> {
        let mut entries = self.entries.write().unwrap();
        if let Some(limit) = self.max_entries {
            if entries.len() >= limit && !entries.contains_key(&key) {
                return Err(CacheError::Full(limit));
            }
        }
        // Values for a key are identical whoever computes them.
        entries.entry(key).or_insert(map);
        Ok(())
    }

    /// Evaluates the network at `x` through the cache.
    pub fn predict_detailed(&self, net: &NetworkSpec, x: &[f64]) -> Result<Prediction, CacheError> {
        let pattern = net.activation_pattern(x)?;
        let key = pattern.to_string();
        if let Some(map) = self.entries.read().unwrap().get(&key) {
            self.hits.fetch_add(1, Ordering::Relaxed);
            return Ok(Prediction {
                output: map.apply(x),
                key,
                hit: true,
            });
        }
        let (chain, _) = trace_pattern(net, &pattern)?;
        let map = chain.network_map(net);
        let output = map.apply(x);
        self.insert(key.clone(), map)?;
        self.misses.fetch_add(1, Ordering::Relaxed);
        Ok(Prediction { output, key, hit: false })
    }

    /// `{pattern: {"M": [[..]], "c": [..]}}` with keys sorted.
    pub fn to_json(&self) -> String {
        let entries = self.entries.read().unwrap();
        let doc: BTreeMap<&str, EntryDocument> = entries
            .iter()
            .map(|(k, v)| {
                (
                    k.as_str(),
                    EntryDocument {
                        m: v.m.rows().into_iter().map(|r| r.to_vec()).collect(),
                        c: v.c.to_vec(),
                    },
                )
            })
            .collect();
        serde_json::to_string_pretty(&doc).expect("cache documents always serialize")
    }

    /// Loads entries written by [`RegionCache::to_json`]; counters start at 0.
    pub fn from_json(text: &str) -> Result<Self, CacheError> {
        let doc: BTreeMap<String, EntryDocument> =
            serde_json::from_str(text).map_err(|e| CacheError::Malformed(e.to_string()))?;
        let mut entries = HashMap::with_capacity(doc.len());
        for (key, entry) in doc {
            key.parse::<crate::pattern::ActivationPattern>()
                .map_err(|e| CacheError::Malformed(format!("key `{key}`: {e}")))?;
            let rows = entry.m.len();
            let cols = entry.m.first().map_or(0, Vec::len);
            if entry.m.iter().any(|r| r.len() != cols) || entry.c.len() != rows {
                return Err(CacheError::Malformed(format!("entry `{key}` has inconsistent shapes")));
            }
            let m = Array2::from_shape_vec((rows, cols), entry.m.into_iter().flatten().collect())
                .map_err(|e| CacheError::Malformed(e.to_string()))?;
            entries.insert(key, AffineMap { m, c: Array1::from(entry.c) });
        }
        Ok(RegionCache {
            entries: RwLock::new(entries),
            ..Self::default()
        })
    }
}

pub fn predict(net: &NetworkSpec, cache: &RegionCache, x: &[f64]) -> Result<Array1<f64>, CacheError> {
    cache.predict_detailed(net, x).map(|p| p.output)
}

/// A cache holding the region of every point; `len()` is the number of
/// distinct regions hit.
pub fn warm_cache<P: AsRef<[f64]>>(net: &NetworkSpec, points: &[P]) -> Result<RegionCache, CacheError> {
    let cache = RegionCache::new();
    for p in points {
        cache.predict_detailed(net, p.as_ref())?;
    }
    Ok(cache)
}

/// Fraction of `test_points` whose region already holds a training point.
/// Returns 0 when either list is empty.
pub fn hit_rate<P: AsRef<[f64]>, Q: AsRef<[f64]>>(
    net: &NetworkSpec,
    train_points: &[P],
    test_points: &[Q],
) -> Result<f64, CacheError> {
    let cache = warm_cache(net, train_points)?;
    if test_points.is_empty() {
        return Ok(0.0);
    }
    let mut hits = 0usize;
    for q in test_points {
        if cache.contains(&net.activation_pattern(q.as_ref())?.to_string()) {
            hits += 1;
        }
    }
    Ok(hits as f64 / test_points.len() as f64)
}
