//! Word and phrase distances over the hypernym hierarchy, ExpansionSets and
//! the min-normalized overlap score between two dictionary entries.

use std::collections::{BTreeSet, HashSet};

use dashmap::DashMap;
use serde::{Deserialize, Serialize};

use crate::dict::LexicalEntry;
use crate::wordnet::{Subsumer, Synset, WordnetStore};

/// Which WordNet relations feed an ExpansionSet. `synset` and `synonyms` are
/// aliases: both contribute the lemmas of the token's own synsets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationFlags {
    pub use_synset: bool,
    pub use_synonyms: bool,
    pub use_hyponyms: bool,
    pub use_hypernyms: bool,
}

impl RelationFlags {
    pub const ALL: RelationFlags = RelationFlags {
        use_synset: true,
        use_synonyms: true,
        use_hyponyms: true,
        use_hypernyms: true,
    };

    pub const SYNSET_ONLY: RelationFlags = RelationFlags {
        use_synset: true,
        use_synonyms: false,
        use_hyponyms: false,
        use_hypernyms: false,
    };

    pub fn any(&self) -> bool {
        self.use_synset || self.use_synonyms || self.use_hyponyms || self.use_hypernyms
    }

    fn members(&self) -> bool {
        self.use_synset || self.use_synonyms
    }

    /// Parses a comma-separated list such as `synset,hypernyms`.
    pub fn parse_list(list: &str) -> Result<RelationFlags, String> {
        let mut flags = RelationFlags {
            use_synset: false,
            use_synonyms: false,
            use_hyponyms: false,
            use_hypernyms: false,
        };
        for name in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            match name {
                "synset" => flags.use_synset = true,
                "synonyms" => flags.use_synonyms = true,
                "hyponyms" => flags.use_hyponyms = true,
                "hypernyms" => flags.use_hypernyms = true,
                other => return Err(format!("unknown relation {other:?}")),
            }
        }
        if !flags.any() {
            return Err("at least one relation must be enabled".into());
        }
        Ok(flags)
    }
}

impl Default for RelationFlags {
    fn default() -> Self {
        RelationFlags::ALL
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityConfig {
    pub relations: RelationFlags,
    /// Lowercase words ignored by every operation here.
    pub stopwords: HashSet<String>,
    /// Senses with more tokens than this are left out of an entry's ExpansionSet.
    pub max_phrase_tokens: usize,
}

impl Default for SimilarityConfig {
    fn default() -> Self {
        SimilarityConfig {
            relations: RelationFlags::ALL,
            stopwords: HashSet::new(),
            max_phrase_tokens: 4,
        }
    }
}

impl SimilarityConfig {
    pub fn with_stopwords<I, S>(mut self, words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        self.stopwords = words
            .into_iter()
            .map(|w| w.as_ref().to_lowercase())
            .collect();
        self
    }

    fn is_stopword(&self, token: &str) -> bool {
        self.stopwords.contains(token)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ExpansionSet {
    pub lemmas: BTreeSet<String>,
    pub source: String,
}

impl ExpansionSet {
    pub fn len(&self) -> usize {
        self.lemmas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lemmas.is_empty()
    }

    pub fn contains(&self, lemma: &str) -> bool {
        self.lemmas.contains(lemma)
    }
}

/// Splits on whitespace, trims punctuation from both ends of each token and
/// case-folds. Inner hyphens, apostrophes and dots survive.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split_whitespace()
        .map(|t| {
            t.trim_matches(|c: char| !c.is_alphanumeric())
                .to_lowercase()
        })
        .filter(|t| !t.is_empty())
        .collect()
}

/// Wu–Palmer similarity 2·d(lcs) / (d_a + d_b), 0 when the synsets share no
/// ancestor. `d_a` and `d_b` are measured along the paths through the lcs
/// (d(lcs) plus the hops down to each synset); on a tree these are the plain
/// depths, and with multiple inheritance they keep the score within [0, 1].
pub fn wu_palmer(store: &WordnetStore, a: &Synset, b: &Synset) -> f64 {
    wu_palmer_of(store.lcs_of(&store.ancestors(a.id), &store.ancestors(b.id)))
}

fn wu_palmer_of(lcs: Option<Subsumer>) -> f64 {
    match lcs {
        Some(l) => {
            let d = l.depth as f64;
            2.0 * d / (2.0 * d + l.hops_a as f64 + l.hops_b as f64)
        }
        None => 0.0,
    }
}

/// 0 when the words share a synset; otherwise 1 minus the best Wu–Palmer
/// score over same-family synset pairs. Words missing from the store are at
/// distance 1 from everything.
pub fn word_distance(store: &WordnetStore, w1: &str, w2: &str) -> f64 {
    let s1 = store.synsets_of(w1, None);
    let s2 = store.synsets_of(w2, None);
    if s1.is_empty() || s2.is_empty() {
        return 1.0;
    }
    if s1.iter().any(|a| s2.iter().any(|b| a.id == b.id)) {
        return 0.0;
    }
    let anc1: Vec<_> = s1.iter().map(|s| store.ancestors(s.id)).collect();
    let anc2: Vec<_> = s2.iter().map(|s| store.ancestors(s.id)).collect();
    let mut best = 0.0_f64;
    for (a, aa) in s1.iter().zip(&anc1) {
        for (b, ab) in s2.iter().zip(&anc2) {
            if a.id.pos == b.id.pos {
                best = best.max(wu_palmer_of(store.lcs_of(aa, ab)));
            }
        }
    }
    1.0 - best
}

/// Mean word distance over the cross product of the two phrases' usable
/// tokens (in-store, not stopwords); 1.0 when either side has none.
pub fn phrase_distance<S: AsRef<str>>(
    store: &WordnetStore,
    p1: &[S],
    p2: &[S],
    cfg: &SimilarityConfig,
) -> f64 {
    phrase_distance_by(store, p1, p2, cfg, |a, b| word_distance(store, a, b))
}

fn phrase_distance_by<S, F>(
    store: &WordnetStore,
    p1: &[S],
    p2: &[S],
    cfg: &SimilarityConfig,
    word_dist: F,
) -> f64
where
    S: AsRef<str>,
    F: Fn(&str, &str) -> f64,
{
    let usable = |p: &[S]| -> Vec<String> {
        p.iter()
            .map(|t| t.as_ref().to_lowercase())
            .filter(|t| !t.is_empty() && !cfg.is_stopword(t) && store.contains_lemma(t))
            .collect()
    };
    let mut left = usable(p1);
    let mut right = usable(p2);
    if left.is_empty() || right.is_empty() {
        return 1.0;
    }
    // fixed argument order keeps the floating-point sum exactly symmetric
    if left > right {
        std::mem::swap(&mut left, &mut right);
    }
    let mut total = 0.0;
    for a in &left {
        for b in &right {
            total += word_dist(a, b);
        }
    }
    total / (left.len() * right.len()) as f64
}

/// Union of the enabled relations over every token. In-store tokens always
/// include themselves; unknown tokens contribute only themselves; stopwords
/// contribute nothing.
pub fn expansion_set<S: AsRef<str>>(
    store: &WordnetStore,
    tokens: &[S],
    cfg: &SimilarityConfig,
) -> ExpansionSet {
    let mut lemmas = BTreeSet::new();
    for token in tokens {
        let token = token.as_ref().to_lowercase();
        if token.is_empty() || cfg.is_stopword(&token) {
            continue;
        }
        extend_with_token(store, &token, cfg.relations, &mut lemmas);
    }
    ExpansionSet {
        lemmas,
        source: tokens
            .iter()
            .map(AsRef::as_ref)
            .collect::<Vec<_>>()
            .join(" "),
    }
}

fn extend_with_token(
    store: &WordnetStore,
    token: &str,
    relations: RelationFlags,
    out: &mut BTreeSet<String>,
) {
    let synsets = store.synsets_of(token, None);
    if synsets.is_empty() {
        out.insert(token.to_string());
        return;
    }
    out.insert(crate::wordnet::normalize_lemma(token));
    for s in synsets {
        if relations.members() {
            out.extend(s.lemmas.iter().cloned());
        }
        if relations.use_hyponyms {
            for h in s.hyponyms.iter().filter_map(|&id| store.synset(id)) {
                out.extend(h.lemmas.iter().cloned());
            }
        }
        if relations.use_hypernyms {
            for h in s.hypernyms.iter().filter_map(|&id| store.synset(id)) {
                out.extend(h.lemmas.iter().cloned());
            }
        }
    }
}

/// The ExpansionSet an entry contributes to [`sim_value`]: built from its
/// LexicalUnit when units are in the WordNet language, otherwise from the
/// union of its senses (senses longer than `max_phrase_tokens` skipped).
pub fn entry_expansion(
    entry: &LexicalEntry,
    store: &WordnetStore,
    cfg: &SimilarityConfig,
    units_in_wordnet_language: bool,
) -> ExpansionSet {
    if units_in_wordnet_language {
        let mut set = expansion_set(store, &tokenize(entry.lexical_unit()), cfg);
        set.source = entry.lexical_unit().to_string();
        return set;
    }
    let mut lemmas = BTreeSet::new();
    for sense in entry.senses() {
        let tokens = tokenize(sense);
        if tokens.len() > cfg.max_phrase_tokens {
            continue;
        }
        lemmas.extend(expansion_set(store, &tokens, cfg).lemmas);
    }
    ExpansionSet {
        lemmas,
        source: entry.senses().join("|"),
    }
}

/// min(|E_i ∩ E_j| / |E_i|, |E_i ∩ E_j| / |E_j|), or 0 when either set is empty.
pub fn overlap_score(shared: usize, n: usize, m: usize) -> f64 {
    if n == 0 || m == 0 {
        return 0.0;
    }
    let k = shared as f64;
    (k / n as f64).min(k / m as f64)
}

pub fn sim_value(
    entry_i: &LexicalEntry,
    entry_j: &LexicalEntry,
    store: &WordnetStore,
    cfg: &SimilarityConfig,
    units_in_wordnet_language: bool,
) -> f64 {
    let ei = entry_expansion(entry_i, store, cfg, units_in_wordnet_language);
    let ej = entry_expansion(entry_j, store, cfg, units_in_wordnet_language);
    let shared = ei.lemmas.intersection(&ej.lemmas).count();
    overlap_score(shared, ei.len(), ej.len())
}

/// Memoizing wrapper around [`word_distance`], safe to share between threads.
/// Cached and uncached results are identical.
pub struct DistanceCache<'s> {
    store: &'s WordnetStore,
    memo: DashMap<(String, String), f64>,
}

impl<'s> DistanceCache<'s> {
    pub fn new(store: &'s WordnetStore) -> Self {
        DistanceCache {
            store,
            memo: DashMap::new(),
        }
    }

    pub fn word_distance(&self, w1: &str, w2: &str) -> f64 {
        let key = if w1 <= w2 {
            (w1.to_string(), w2.to_string())
        } else {
            (w2.to_string(), w1.to_string())
        };
        if let Some(d) = self.memo.get(&key) {
            return *d;
        }
        let d = word_distance(self.store, &key.0, &key.1);
        self.memo.insert(key, d);
        d
    }

    pub fn phrase_distance<S: AsRef<str>>(
        &self,
        p1: &[S],
        p2: &[S],
        cfg: &SimilarityConfig,
    ) -> f64 {
        phrase_distance_by(self.store, p1, p2, cfg, |a, b| self.word_distance(a, b))
    }

    pub fn len(&self) -> usize {
        self.memo.len()
    }

    pub fn is_empty(&self) -> bool {
        self.memo.is_empty()
    }
}
