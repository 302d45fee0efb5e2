//! Reverse-dictionary construction: direct reversal (DR), reversal widened
//! by WordNet distance (DRwD) and reversal widened by ExpansionSet overlap
//! (DRwS).
//!
//! All three produce (sense, unit) pairs and hand them to
//! [`merge_pairs`](crate::dict::merge_pairs). Pair loops run on the current
//! rayon pool; results are collected in index order so the output does not
//! depend on the number of threads.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::dict::{merge_pairs, BilingualDictionary, LangCode, LexicalEntry};
use crate::similarity::{
    entry_expansion, overlap_score, tokenize, DistanceCache, RelationFlags, SimilarityConfig,
};
use crate::wordnet::WordnetStore;

#[derive(Debug, Error)]
pub enum ReversalError {
    #[error("{0} needs a WordNet store")]
    MissingStore(Algorithm),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Dr,
    Drwd,
    Drws,
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Dr => "DR",
            Algorithm::Drwd => "DRwD",
            Algorithm::Drws => "DRwS",
        })
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "dr" => Ok(Algorithm::Dr),
            "drwd" => Ok(Algorithm::Drwd),
            "drws" => Ok(Algorithm::Drws),
            other => Err(format!("unknown algorithm {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReversalConfig {
    pub algorithm: Algorithm,
    /// DRwD keeps pairs whose distance is at most `alpha`.
    pub alpha: f64,
    /// DRwS keeps entry pairs whose overlap score is at least `beta`.
    pub beta: f64,
    pub relations: RelationFlags,
    pub max_sense_tokens: usize,
    pub stopwords: BTreeSet<String>,
    /// Language described by the WordNet store.
    pub wordnet_lang: LangCode,
    /// Forces unit-based (true) or sense-based (false) comparison. When unset,
    /// units are compared iff the source language is `wordnet_lang`.
    pub units_in_wordnet_language: Option<bool>,
}

impl Default for ReversalConfig {
    fn default() -> Self {
        ReversalConfig {
            algorithm: Algorithm::Dr,
            alpha: 0.0,
            beta: 0.9,
            relations: RelationFlags::ALL,
            max_sense_tokens: 4,
            stopwords: BTreeSet::new(),
            wordnet_lang: LangCode::new("eng").expect("valid code"),
            units_in_wordnet_language: None,
        }
    }
}

impl ReversalConfig {
    pub fn new(algorithm: Algorithm) -> Self {
        ReversalConfig {
            algorithm,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<(), ReversalError> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(ReversalError::InvalidConfig(format!(
                "alpha {} outside [0,1]",
                self.alpha
            )));
        }
        if !(0.0..=1.0).contains(&self.beta) {
            return Err(ReversalError::InvalidConfig(format!(
                "beta {} outside [0,1]",
                self.beta
            )));
        }
        if self.max_sense_tokens == 0 {
            return Err(ReversalError::InvalidConfig(
                "max_sense_tokens must be at least 1".into(),
            ));
        }
        if !self.relations.any() {
            return Err(ReversalError::InvalidConfig("no relation enabled".into()));
        }
        Ok(())
    }

    pub fn units_in_wordnet_language(&self, dict: &BilingualDictionary) -> bool {
        self.units_in_wordnet_language
            .unwrap_or_else(|| dict.source_lang() == &self.wordnet_lang)
    }

    pub fn similarity_config(&self) -> SimilarityConfig {
        SimilarityConfig {
            relations: self.relations,
            stopwords: self.stopwords.iter().map(|w| w.to_lowercase()).collect(),
            max_phrase_tokens: self.max_sense_tokens,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfigEcho {
    pub algorithm: Algorithm,
    pub alpha: f64,
    pub beta: f64,
    pub relations: RelationFlags,
    pub max_sense_tokens: usize,
    pub units_in_wordnet_language: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReversalReport {
    pub input_entry_count: usize,
    pub output_entry_count: usize,
    pub output_pair_count: usize,
    pub skipped_complex_senses: usize,
    pub config: ConfigEcho,
}

/// Senses that read like definitions rather than glosses: too many tokens,
/// or sentence punctuation.
pub fn is_complex_sense(sense: &str, cfg: &ReversalConfig) -> bool {
    sense.split_whitespace().count() > cfg.max_sense_tokens || sense.contains(['.', ';', '—'])
}

/// Usable senses of one entry.
struct Slots<'d> {
    entry: &'d LexicalEntry,
    senses: Vec<&'d str>,
}

fn slots<'d>(dict: &'d BilingualDictionary, cfg: &ReversalConfig) -> (Vec<Slots<'d>>, usize) {
    let mut skipped = 0;
    let slots = dict
        .entries()
        .iter()
        .map(|entry| {
            let senses: Vec<&str> = entry
                .senses()
                .iter()
                .map(String::as_str)
                .filter(|s| {
                    let complex = is_complex_sense(s, cfg);
                    skipped += complex as usize;
                    !complex
                })
                .collect();
            Slots { entry, senses }
        })
        .collect();
    (slots, skipped)
}

fn direct_pairs<'d>(slots: &[Slots<'d>]) -> Vec<(&'d str, &'d str)> {
    slots
        .iter()
        .flat_map(|s| {
            s.senses
                .iter()
                .map(|&sense| (sense, s.entry.lexical_unit()))
        })
        .collect()
}

fn finish(
    dict: &BilingualDictionary,
    cfg: &ReversalConfig,
    pairs: Vec<(&str, &str)>,
    skipped: usize,
) -> (BilingualDictionary, ReversalReport) {
    let provenance = match dict.provenance() {
        "" => format!(
            "{} reversal of {}-{}",
            cfg.algorithm,
            dict.source_lang(),
            dict.target_lang()
        ),
        p => format!(
            "{} reversal of {}-{} ({p})",
            cfg.algorithm,
            dict.source_lang(),
            dict.target_lang()
        ),
    };
    let out = merge_pairs(pairs, dict.languages().swapped()).with_provenance(provenance);
    let report = ReversalReport {
        input_entry_count: dict.len(),
        output_entry_count: out.len(),
        output_pair_count: out.pair_count(),
        skipped_complex_senses: skipped,
        config: ConfigEcho {
            algorithm: cfg.algorithm,
            alpha: cfg.alpha,
            beta: cfg.beta,
            relations: cfg.relations,
            max_sense_tokens: cfg.max_sense_tokens,
            units_in_wordnet_language: cfg.units_in_wordnet_language(dict),
        },
    };
    (out, report)
}

/// Swaps every (unit, sense) pair, skipping complex senses.
pub fn dr(
    dict: &BilingualDictionary,
    cfg: &ReversalConfig,
) -> (BilingualDictionary, ReversalReport) {
    let (slots, skipped) = slots(dict, cfg);
    let pairs = direct_pairs(&slots);
    finish(dict, cfg, pairs, skipped)
}

/// For every (entry_i, sense_j) and (entry_u, sense_v) whose distance is at
/// most alpha, emits (sense_j, unit_u). Distance compares units when they are
/// in the WordNet language and senses otherwise. The diagonal always counts.
pub fn drwd(
    dict: &BilingualDictionary,
    store: &WordnetStore,
    cfg: &ReversalConfig,
) -> (BilingualDictionary, ReversalReport) {
    let (slots, skipped) = slots(dict, cfg);
    let sim_cfg = cfg.similarity_config();
    let cache = DistanceCache::new(store);
    let mut pairs = direct_pairs(&slots);

    if cfg.units_in_wordnet_language(dict) {
        // distance depends on the two entries only
        let live: Vec<usize> = (0..slots.len())
            .filter(|&i| !slots[i].senses.is_empty())
            .collect();
        let units: Vec<Vec<String>> = live
            .iter()
            .map(|&i| tokenize(slots[i].entry.lexical_unit()))
            .collect();
        let extra: Vec<Vec<(&str, &str)>> = live
            .par_iter()
            .enumerate()
            .map(|(a, &i)| {
                let mut out = Vec::new();
                for (b, &u) in live.iter().enumerate() {
                    if cache.phrase_distance(&units[a], &units[b], &sim_cfg) <= cfg.alpha {
                        let unit = slots[u].entry.lexical_unit();
                        out.extend(slots[i].senses.iter().map(|&s| (s, unit)));
                    }
                }
                out
            })
            .collect();
        pairs.extend(extra.into_iter().flatten());
    } else {
        // distance depends on the two sense phrases only: work on distinct phrases
        let mut phrase_ids: HashMap<Vec<String>, usize> = HashMap::new();
        let mut phrases: Vec<Vec<String>> = Vec::new();
        let mut holders: Vec<Vec<usize>> = Vec::new();
        let mut slot_phrase: Vec<Vec<usize>> = Vec::with_capacity(slots.len());
        for (i, s) in slots.iter().enumerate() {
            let mut ids = Vec::with_capacity(s.senses.len());
            for sense in &s.senses {
                let tokens = tokenize(sense);
                let id = *phrase_ids.entry(tokens.clone()).or_insert_with(|| {
                    phrases.push(tokens);
                    holders.push(Vec::new());
                    phrases.len() - 1
                });
                if holders[id].last() != Some(&i) {
                    holders[id].push(i);
                }
                ids.push(id);
            }
            slot_phrase.push(ids);
        }

        let links: Vec<Vec<usize>> = (0..phrases.len())
            .into_par_iter()
            .map(|p| {
                (0..phrases.len())
                    .filter(|&q| {
                        cache.phrase_distance(&phrases[p], &phrases[q], &sim_cfg) <= cfg.alpha
                    })
                    .collect()
            })
            .collect();

        let extra: Vec<Vec<(&str, &str)>> = slots
            .par_iter()
            .zip(slot_phrase.par_iter())
            .map(|(s, ids)| {
                let mut out = Vec::new();
                for (&sense, &p) in s.senses.iter().zip(ids) {
                    let mut units: BTreeSet<usize> = BTreeSet::new();
                    for &q in &links[p] {
                        units.extend(holders[q].iter().copied());
                    }
                    out.extend(
                        units
                            .into_iter()
                            .map(|u| (sense, slots[u].entry.lexical_unit())),
                    );
                }
                out
            })
            .collect();
        pairs.extend(extra.into_iter().flatten());
    }
    finish(dict, cfg, pairs, skipped)
}

/// Starts from DR and, for every entry pair whose ExpansionSet overlap score
/// reaches beta, attaches each entry's senses to the other's unit.
pub fn drws(
    dict: &BilingualDictionary,
    store: &WordnetStore,
    cfg: &ReversalConfig,
) -> (BilingualDictionary, ReversalReport) {
    let (slots, skipped) = slots(dict, cfg);
    let sim_cfg = cfg.similarity_config();
    let by_unit = cfg.units_in_wordnet_language(dict);

    let expansions: Vec<_> = dict
        .entries()
        .par_iter()
        .map(|e| entry_expansion(e, store, &sim_cfg, by_unit))
        .collect();
    // intern lemmas so intersections become merges of sorted integer lists
    let mut ids: HashMap<&str, u32> = HashMap::new();
    let interned: Vec<Vec<u32>> = expansions
        .iter()
        .map(|e| {
            let mut v: Vec<u32> = e
                .lemmas
                .iter()
                .map(|l| {
                    let next = ids.len() as u32;
                    *ids.entry(l.as_str()).or_insert(next)
                })
                .collect();
            v.sort_unstable();
            v
        })
        .collect();

    let matches: Vec<Vec<usize>> = (0..interned.len())
        .into_par_iter()
        .map(|i| {
            ((i + 1)..interned.len())
                .filter(|&j| {
                    let shared = sorted_intersection_len(&interned[i], &interned[j]);
                    overlap_score(shared, interned[i].len(), interned[j].len()) >= cfg.beta
                })
                .collect()
        })
        .collect();

    let mut pairs = direct_pairs(&slots);
    for (i, js) in matches.iter().enumerate() {
        for &j in js {
            let (a, b) = (&slots[i], &slots[j]);
            pairs.extend(a.senses.iter().map(|&s| (s, b.entry.lexical_unit())));
            pairs.extend(b.senses.iter().map(|&s| (s, a.entry.lexical_unit())));
        }
    }
    finish(dict, cfg, pairs, skipped)
}

fn sorted_intersection_len(a: &[u32], b: &[u32]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

/// Runs the algorithm selected in `cfg`.
pub fn reverse(
    dict: &BilingualDictionary,
    store: Option<&WordnetStore>,
    cfg: &ReversalConfig,
) -> Result<(BilingualDictionary, ReversalReport), ReversalError> {
    cfg.validate()?;
    match (cfg.algorithm, store) {
        (Algorithm::Dr, _) => Ok(dr(dict, cfg)),
        (Algorithm::Drwd, Some(store)) => Ok(drwd(dict, store, cfg)),
        (Algorithm::Drws, Some(store)) => Ok(drws(dict, store, cfg)),
        (algo, None) => Err(ReversalError::MissingStore(algo)),
    }
}
