//! Labeled text manifests, word windows and control/evaluation splits.
//!
//! A manifest is JSON Lines, one `{"id": "...", "path": "...", "label": "..."}`
//! record per line. Relative paths are resolved against the manifest's directory.

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tokenize::TokenStream;

pub const DEFAULT_CATEGORIES: [&str; 2] = ["novel", "news"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub id: String,
    /// As written in the manifest.
    pub path: PathBuf,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusManifest {
    entries: Vec<ManifestEntry>,
    categories: [String; 2],
    base_dir: PathBuf,
}

fn default_categories() -> [String; 2] {
    DEFAULT_CATEGORIES.map(String::from)
}

impl CorpusManifest {
    /// Validates ids and labels; paths are not touched.
    pub fn new(entries: Vec<ManifestEntry>, categories: [String; 2], base_dir: impl Into<PathBuf>) -> Result<Self> {
        let mut seen = HashSet::new();
        for e in &entries {
            if !seen.insert(e.id.as_str()) {
                return Err(Error::DuplicateId(e.id.clone()));
            }
            if !categories.contains(&e.label) {
                return Err(Error::UnknownLabel {
                    label: e.label.clone(),
                    expected: categories.to_vec(),
                });
            }
        }
        Ok(CorpusManifest {
            entries,
            categories,
            base_dir: base_dir.into(),
        })
    }

    pub fn entries(&self) -> &[ManifestEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn categories(&self) -> &[String; 2] {
        &self.categories
    }

    pub fn base_dir(&self) -> &Path {
        &self.base_dir
    }

    pub fn resolve(&self, entry: &ManifestEntry) -> PathBuf {
        self.base_dir.join(&entry.path)
    }

    pub fn count(&self, label: &str) -> usize {
        self.entries.iter().filter(|e| e.label == label).count()
    }

    pub fn read_text(&self, entry: &ManifestEntry) -> Result<String> {
        let path = self.resolve(entry);
        fs::read_to_string(&path).map_err(|e| Error::io(path, e))
    }

    fn with_entries(&self, entries: Vec<ManifestEntry>) -> Self {
        CorpusManifest {
            entries,
            categories: self.categories.clone(),
            base_dir: self.base_dir.clone(),
        }
    }

    pub fn to_jsonl(&self) -> Result<String> {
        let mut out = String::new();
        for e in &self.entries {
            out.push_str(&serde_json::to_string(e)?);
            out.push('\n');
        }
        Ok(out)
    }
}

/// Loads a manifest whose labels are `novel` and `news`.
pub fn load_manifest(path: impl AsRef<Path>) -> Result<CorpusManifest> {
    load_manifest_with(path, default_categories())
}

pub fn load_manifest_with(path: impl AsRef<Path>, categories: [String; 2]) -> Result<CorpusManifest> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let mut entries = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let entry: ManifestEntry = serde_json::from_str(line).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: i + 1,
            message: e.to_string(),
        })?;
        entries.push(entry);
    }
    let manifest = CorpusManifest::new(entries, categories, base_dir)?;
    for e in manifest.entries() {
        let p = manifest.resolve(e);
        match fs::metadata(&p) {
            Ok(m) if m.is_file() => {}
            Ok(_) => {
                return Err(Error::io(
                    p,
                    std::io::Error::new(std::io::ErrorKind::InvalidInput, "not a regular file"),
                ))
            }
            Err(err) => return Err(Error::io(p, err)),
        }
    }
    Ok(manifest)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleWindow {
    pub sample_id: String,
    pub start_word: usize,
    pub length_words: usize,
}

pub fn extract_window(tokens: &TokenStream, window: &SampleWindow) -> Result<TokenStream> {
    tokens.window(window.start_word, window.length_words)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "placement", content = "seed")]
pub enum WindowPlacement {
    /// Every window starts at word 0.
    #[default]
    Start,
    /// Start drawn uniformly among positions where the window fits, from a
    /// generator seeded by the run seed and the sample id.
    Random(u64),
}

fn fnv1a(s: &str) -> u64 {
    s.bytes()
        .fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3))
}

/// Window of `length` words for a stream of `available` words. Does not check
/// that the window fits when `available < length`; extraction reports that.
pub fn place_window(sample_id: &str, available: usize, length: usize, placement: WindowPlacement) -> SampleWindow {
    let start_word = match placement {
        WindowPlacement::Start => 0,
        WindowPlacement::Random(seed) => {
            let slack = available.saturating_sub(length);
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ fnv1a(sample_id));
            rng.gen_range(0..=slack)
        }
    };
    SampleWindow {
        sample_id: sample_id.to_owned(),
        start_word,
        length_words: length,
    }
}

/// Per-category random partition: `floor(fraction · n)` entries go to control,
/// the rest to evaluation. Both keep manifest order.
pub fn split_control_eval(manifest: &CorpusManifest, fraction: f64, seed: u64) -> Result<(CorpusManifest, CorpusManifest)> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "control fraction must lie in (0, 1), got {fraction}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut in_control = vec![false; manifest.len()];
    for label in manifest.categories() {
        let mut members: Vec<usize> = (0..manifest.len())
            .filter(|&i| &manifest.entries[i].label == label)
            .collect();
        let n = members.len();
        let n_control = (fraction * n as f64).floor() as usize;
        if n < 2 || n_control == 0 || n_control == n {
            return Err(Error::CategoryTooSmall {
                label: label.clone(),
                count: n,
                fraction,
            });
        }
        members.shuffle(&mut rng);
        for &i in &members[..n_control] {
            in_control[i] = true;
        }
    }
    let (control, eval): (Vec<_>, Vec<_>) = manifest
        .entries
        .iter()
        .cloned()
        .zip(in_control)
        .partition(|(_, c)| *c);
    Ok((
        manifest.with_entries(control.into_iter().map(|(e, _)| e).collect()),
        manifest.with_entries(eval.into_iter().map(|(e, _)| e).collect()),
    ))
}
