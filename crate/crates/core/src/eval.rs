//! Human-evaluation support: sampling words and entries for rating sheets,
//! reading/writing sheets, and scoring them (mean score and percent agreement).

use std::collections::{BTreeMap, HashSet};
use std::io::{Read, Write};

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::dict::{fold, BilingualDictionary};

pub const DEFAULT_WORD_SAMPLE: usize = 100;
pub const DEFAULT_ENTRY_SAMPLE: usize = 50;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("cannot sample {requested} words: only {available} non-stopwords available")]
    NotEnoughWords { requested: usize, available: usize },
    #[error("no sampled words present in dictionary")]
    NoSampledWords,
    #[error("no rated entries")]
    NoRatings,
    #[error("rating sheets disagree: {0}")]
    MismatchedSheets(String),
    #[error("rating sheet line {line}: {message}")]
    Sheet { line: usize, message: String },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Uniform sample without replacement of `n` words from `common_words` minus
/// `stopwords` (case-folded, duplicates removed). Deterministic per seed.
pub fn sample_words(
    common_words: &[String],
    stopwords: &HashSet<String>,
    n: usize,
    seed: u64,
) -> Result<Vec<String>, EvalError> {
    let mut seen = HashSet::new();
    let pool: Vec<String> = common_words
        .iter()
        .map(|w| w.trim().to_lowercase())
        .filter(|w| !w.is_empty() && !stopwords.contains(w) && seen.insert(w.clone()))
        .collect();
    if n > pool.len() {
        return Err(EvalError::NotEnoughWords {
            requested: n,
            available: pool.len(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(index::sample(&mut rng, pool.len(), n)
        .into_iter()
        .map(|i| pool[i].clone())
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampledEntry {
    pub unit: String,
    pub senses: Vec<String>,
}

/// Samples up to `k` entries whose unit is one of `words`, returned in dictionary order.
pub fn sample_entries(
    dict: &BilingualDictionary,
    words: &[String],
    k: usize,
    seed: u64,
) -> Result<Vec<SampledEntry>, EvalError> {
    let wanted: HashSet<String> = words.iter().map(|w| fold(w)).collect();
    let candidates: Vec<_> = dict
        .entries()
        .iter()
        .filter(|e| wanted.contains(&fold(e.lexical_unit())))
        .collect();
    if candidates.is_empty() {
        return Err(EvalError::NoSampledWords);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked = index::sample(&mut rng, candidates.len(), k.min(candidates.len())).into_vec();
    picked.sort_unstable();
    Ok(picked
        .into_iter()
        .map(|i| SampledEntry {
            unit: candidates[i].lexical_unit().to_string(),
            senses: candidates[i].senses().to_vec(),
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SheetRow {
    pub entry_id: u32,
    pub unit: String,
    pub senses: Vec<String>,
    /// 1..=5, or `None` while unrated.
    pub score: Option<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatingSheet {
    pub dictionary_id: String,
    pub rater_id: String,
    pub rows: Vec<SheetRow>,
}

pub const SHEET_HEADER: [&str; 4] = ["entry_id", "unit", "senses", "score"];

impl RatingSheet {
    /// A blank sheet with entry ids numbered from 1.
    pub fn blank(dictionary_id: &str, rater_id: &str, entries: &[SampledEntry]) -> Self {
        RatingSheet {
            dictionary_id: dictionary_id.to_string(),
            rater_id: rater_id.to_string(),
            rows: entries
                .iter()
                .zip(1..)
                .map(|(e, id)| SheetRow {
                    entry_id: id,
                    unit: e.unit.clone(),
                    senses: e.senses.clone(),
                    score: None,
                })
                .collect(),
        }
    }

    /// CSV with header `entry_id,unit,senses,score`; senses joined by `|`.
    pub fn write_csv(&self, out: impl Write) -> Result<(), EvalError> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        w.write_record(SHEET_HEADER)?;
        for row in &self.rows {
            if let Some(s) = row.senses.iter().find(|s| s.contains('|')) {
                return Err(EvalError::Sheet {
                    line: 0,
                    message: format!("sense {s:?} contains '|'"),
                });
            }
            w.write_record([
                row.entry_id.to_string(),
                row.unit.clone(),
                row.senses.join("|"),
                row.score.map(|s| s.to_string()).unwrap_or_default(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv(
        input: impl Read,
        dictionary_id: &str,
        rater_id: &str,
    ) -> Result<Self, EvalError> {
        let mut r = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(input);
        let header = r.headers()?.clone();
        if header.iter().map(str::trim).ne(SHEET_HEADER) {
            return Err(EvalError::Sheet {
                line: 1,
                message: format!("expected header {:?}", SHEET_HEADER.join(",")),
            });
        }
        let mut rows = Vec::new();
        for (i, rec) in r.records().enumerate() {
            let line = i + 2;
            let rec = rec?;
            let bad = |message: String| EvalError::Sheet { line, message };
            let field = |k: usize| rec.get(k).unwrap_or("").trim();
            let entry_id = field(0)
                .parse()
                .map_err(|_| bad(format!("bad entry_id {:?}", field(0))))?;
            let score = match field(3) {
                "" => None,
                s => match s.parse::<u8>() {
                    Ok(v @ 1..=5) => Some(v),
                    _ => return Err(bad(format!("score {s:?} is not in 1..=5"))),
                },
            };
            rows.push(SheetRow {
                entry_id,
                unit: field(1).to_string(),
                senses: field(2)
                    .split('|')
                    .map(str::to_string)
                    .filter(|s| !s.is_empty())
                    .collect(),
                score,
            });
        }
        Ok(RatingSheet {
            dictionary_id: dictionary_id.to_string(),
            rater_id: rater_id.to_string(),
            rows,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntryScore {
    pub entry_id: u32,
    pub unit: String,
    pub mean: Option<f64>,
    pub ratings: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalSummary {
    pub dictionary_id: String,
    pub per_entry_mean: Vec<EntryScore>,
    /// Mean of the per-entry means over entries with at least one rating.
    pub overall_mean: f64,
    /// Fraction of (entry, rater pair) comparisons with identical scores;
    /// `None` when no entry was rated by two raters.
    pub agreement: Option<f64>,
    pub rater_count: usize,
    pub entry_count: usize,
}

/// Unit, senses and per-rater scores of one sheet row.
type Cell<'a> = (&'a str, &'a [String], Vec<Option<u8>>);

pub fn score_ratings(sheets: &[RatingSheet]) -> Result<EvalSummary, EvalError> {
    let Some(first) = sheets.first() else {
        return Err(EvalError::NoRatings);
    };
    for s in &sheets[1..] {
        if s.dictionary_id != first.dictionary_id {
            return Err(EvalError::MismatchedSheets(format!(
                "dictionary {:?} vs {:?}",
                s.dictionary_id, first.dictionary_id
            )));
        }
    }

    // entry_id -> (unit, senses, scores by rater)
    let mut grid: BTreeMap<u32, Cell<'_>> = BTreeMap::new();
    for (r, sheet) in sheets.iter().enumerate() {
        if sheet.rows.len() != first.rows.len() {
            return Err(EvalError::MismatchedSheets(format!(
                "rater {:?} has {} entries, rater {:?} has {}",
                sheet.rater_id,
                sheet.rows.len(),
                first.rater_id,
                first.rows.len()
            )));
        }
        let mut seen = HashSet::new();
        for row in &sheet.rows {
            if !seen.insert(row.entry_id) {
                return Err(EvalError::MismatchedSheets(format!(
                    "entry {} appears twice for rater {:?}",
                    row.entry_id, sheet.rater_id
                )));
            }
            let cell = grid
                .entry(row.entry_id)
                .or_insert_with(|| (&row.unit, &row.senses, vec![None; sheets.len()]));
            if cell.0 != row.unit || cell.1 != row.senses.as_slice() {
                return Err(EvalError::MismatchedSheets(format!(
                    "entry {} differs for rater {:?}",
                    row.entry_id, sheet.rater_id
                )));
            }
            cell.2[r] = row.score;
        }
    }
    if grid.len() != first.rows.len() {
        return Err(EvalError::MismatchedSheets(
            "entry ids differ between sheets".into(),
        ));
    }

    let mut per_entry = Vec::with_capacity(grid.len());
    let mut means = Vec::new();
    let (mut comparisons, mut agreements) = (0usize, 0usize);
    for (&entry_id, (unit, _, scores)) in &grid {
        let rated: Vec<u8> = scores.iter().flatten().copied().collect();
        let mean = (!rated.is_empty())
            .then(|| rated.iter().map(|&s| s as f64).sum::<f64>() / rated.len() as f64);
        if let Some(m) = mean {
            means.push(m);
        }
        for a in 0..rated.len() {
            for b in (a + 1)..rated.len() {
                comparisons += 1;
                agreements += (rated[a] == rated[b]) as usize;
            }
        }
        per_entry.push(EntryScore {
            entry_id,
            unit: unit.to_string(),
            mean,
            ratings: rated.len(),
        });
    }
    if means.is_empty() {
        return Err(EvalError::NoRatings);
    }

    Ok(EvalSummary {
        dictionary_id: first.dictionary_id.clone(),
        overall_mean: means.iter().sum::<f64>() / means.len() as f64,
        per_entry_mean: per_entry,
        agreement: (comparisons > 0).then(|| agreements as f64 / comparisons as f64),
        rater_count: sheets.len(),
        entry_count: grid.len(),
    })
}
