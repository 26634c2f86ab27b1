//! Frequency datasets from raw text and from `value,count` files.

use std::collections::HashMap;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::estimate::FrequencyDataset;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusConfig {
    pub lowercase: bool,
    /// Words seen fewer times than this are dropped.
    pub min_count: u64,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        CorpusConfig {
            lowercase: true,
            min_count: 1,
        }
    }
}

/// Tokens are maximal runs of alphabetic characters.
pub fn tokenize<'a>(text: &'a str) -> impl Iterator<Item = &'a str> + 'a {
    text.split(|c: char| !c.is_alphabetic())
        .filter(|t| !t.is_empty())
}

/// Occurrences per distinct word.
pub fn word_frequencies(text: &str, config: &CorpusConfig) -> HashMap<String, u64> {
    let mut counts: HashMap<String, u64> = HashMap::new();
    for token in tokenize(text) {
        let word = if config.lowercase {
            token.to_lowercase()
        } else {
            token.to_owned()
        };
        *counts.entry(word).or_insert(0) += 1;
    }
    counts.retain(|_, c| *c >= config.min_count);
    counts
}

/// The dataset whose observations are per-word occurrence counts: it maps
/// each frequency to the number of distinct words having that frequency.
pub fn word_counts(text: &str, config: &CorpusConfig) -> Result<FrequencyDataset> {
    let frequencies = word_frequencies(text, config);
    if frequencies.is_empty() {
        return Err(Error::EmptyDataset("text contains no words".into()));
    }
    FrequencyDataset::from_counts(frequencies.into_values().map(|f| (f, 1)))
}

pub fn read_text<P: AsRef<Path>>(path: P) -> Result<String> {
    let mut text = String::new();
    File::open(path.as_ref())
        .and_then(|mut f| f.read_to_string(&mut text))
        .map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))?;
    Ok(text)
}

/// Parses `value,count` records. A leading `value,count` header is allowed;
/// duplicate values are merged.
pub fn parse_counts<R: Read>(reader: R) -> Result<FrequencyDataset> {
    let mut csv = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(reader);
    let mut pairs = Vec::new();
    for (idx, record) in csv.records().enumerate() {
        let record = record.map_err(|e| Error::Parse {
            line: e.position().map_or(idx as u64 + 1, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(idx as u64 + 1, |p| p.line());
        if idx == 0 && record.get(0) == Some("value") {
            continue;
        }
        if record.len() != 2 {
            return Err(Error::Parse {
                line,
                message: format!("expected 2 fields, found {}", record.len()),
            });
        }
        let field = |i: usize| -> Result<i128> {
            record[i].parse::<i128>().map_err(|e| Error::Parse {
                line,
                message: format!("'{}': {e}", &record[i]),
            })
        };
        let (value, count) = (field(0)?, field(1)?);
        if value < 1 || value > u64::MAX as i128 {
            return Err(Error::ValueDomain {
                line,
                message: format!("value {value} must be a positive integer"),
            });
        }
        if count < 1 || count > u64::MAX as i128 {
            return Err(Error::ValueDomain {
                line,
                message: format!("count {count} must be a positive integer"),
            });
        }
        pairs.push((value as u64, count as u64));
    }
    if pairs.is_empty() {
        return Err(Error::EmptyDataset("no count records".into()));
    }
    FrequencyDataset::from_counts(pairs)
}

pub fn read_counts<P: AsRef<Path>>(path: P) -> Result<FrequencyDataset> {
    let file = File::open(path.as_ref())
        .map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))?;
    parse_counts(file)
}

pub fn write_counts<W: Write>(data: &FrequencyDataset, mut out: W) -> Result<()> {
    writeln!(out, "value,count")?;
    for (v, c) in data.iter() {
        writeln!(out, "{v},{c}")?;
    }
    Ok(())
}
