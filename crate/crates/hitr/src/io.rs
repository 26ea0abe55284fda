//! Reading raw text inputs.

use std::collections::BTreeSet;
use std::fs;
use std::io::{BufRead, BufReader};
use std::path::Path;

use anyhow::{bail, Context, Result};
use hitr_core::corpus::RawDocument;
use serde::Deserialize;

#[derive(Deserialize)]
struct JsonLine {
    id: String,
    text: String,
    #[serde(default)]
    group: Option<String>,
    #[serde(default)]
    label: Option<String>,
}

/// Loads raw documents from a directory of `.txt` files (the file stem is
/// the document id, files are read in name order) or from a JSON-lines file
/// with `id`, `text` and optional `group` and `label` fields.
pub fn read_raw_documents(path: &Path) -> Result<Vec<RawDocument>> {
    if path.is_dir() {
        read_text_dir(path)
    } else {
        read_json_lines(path)
    }
}

fn read_text_dir(dir: &Path) -> Result<Vec<RawDocument>> {
    let mut files = Vec::new();
    for entry in fs::read_dir(dir).with_context(|| format!("listing {}", dir.display()))? {
        let path = entry?.path();
        if path.is_file() && path.extension().is_some_and(|e| e == "txt") {
            files.push(path);
        }
    }
    files.sort();
    files
        .into_iter()
        .map(|path| {
            let id = path
                .file_stem()
                .and_then(|s| s.to_str())
                .with_context(|| format!("non UTF-8 file name {}", path.display()))?
                .to_string();
            let text =
                fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
            Ok(RawDocument::new(id, text))
        })
        .collect()
}

fn read_json_lines(path: &Path) -> Result<Vec<RawDocument>> {
    let file = fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let mut docs = Vec::new();
    let mut seen = BTreeSet::new();
    for (n, line) in BufReader::new(file).lines().enumerate() {
        let line = line.with_context(|| format!("reading {}", path.display()))?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: JsonLine = serde_json::from_str(&line)
            .with_context(|| format!("{}:{}: malformed JSON line", path.display(), n + 1))?;
        if !seen.insert(rec.id.clone()) {
            bail!(
                "{}:{}: duplicate document id {:?}",
                path.display(),
                n + 1,
                rec.id
            );
        }
        docs.push(RawDocument {
            id: rec.id,
            text: rec.text,
            group: rec.group,
            label: rec.label,
        });
    }
    Ok(docs)
}

/// One token per line; blank lines are ignored and tokens are lowercased.
pub fn read_stopwords(path: &Path) -> Result<BTreeSet<String>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(text
        .lines()
        .map(|l| l.trim().to_lowercase())
        .filter(|l| !l.is_empty())
        .collect())
}
