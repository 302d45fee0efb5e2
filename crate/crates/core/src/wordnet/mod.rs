//! In-memory WordNet: synsets, the lemma index and the hypernym graph.
//!
//! The store is built once (from the wndb flat files, see [`load_wordnet`], or
//! from a [`StoreBuilder`] for hand-made fixtures) and is read-only afterwards.

mod wndb;

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;
use std::path::PathBuf;

use thiserror::Error;

pub use wndb::{load_wordnet, WORDNET_VERSION};

#[derive(Debug, Error)]
pub enum WordnetError {
    #[error("missing {name}")]
    MissingFile { name: String, path: PathBuf },
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{file}:{line}: {message}")]
    Parse {
        file: String,
        line: usize,
        message: String,
    },
    #[error("integrity error: {0}")]
    Integrity(String),
}

/// WordNet part of speech, one variant per `ss_type` code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pos {
    Noun,
    Verb,
    Adjective,
    AdjectiveSatellite,
    Adverb,
}

impl Pos {
    pub const ALL: [Pos; 5] = [
        Pos::Noun,
        Pos::Verb,
        Pos::Adjective,
        Pos::AdjectiveSatellite,
        Pos::Adverb,
    ];

    /// The four lookup families, in the order used when no Pos is requested.
    pub const FAMILIES: [Pos; 4] = [Pos::Noun, Pos::Verb, Pos::Adjective, Pos::Adverb];

    pub fn from_code(code: &str) -> Option<Pos> {
        match code {
            "n" => Some(Pos::Noun),
            "v" => Some(Pos::Verb),
            "a" => Some(Pos::Adjective),
            "s" => Some(Pos::AdjectiveSatellite),
            "r" => Some(Pos::Adverb),
            _ => None,
        }
    }

    pub fn code(self) -> char {
        match self {
            Pos::Noun => 'n',
            Pos::Verb => 'v',
            Pos::Adjective => 'a',
            Pos::AdjectiveSatellite => 's',
            Pos::Adverb => 'r',
        }
    }

    /// Satellites belong to the adjective family; every other Pos is its own family.
    pub fn family(self) -> Pos {
        match self {
            Pos::AdjectiveSatellite => Pos::Adjective,
            p => p,
        }
    }

    /// Suffix of the `index.*` / `data.*` file holding this Pos.
    pub fn file_suffix(self) -> &'static str {
        match self.family() {
            Pos::Noun => "noun",
            Pos::Verb => "verb",
            Pos::Adverb => "adv",
            _ => "adj",
        }
    }

    fn family_slot(self) -> usize {
        match self.family() {
            Pos::Noun => 0,
            Pos::Verb => 1,
            Pos::Adjective => 2,
            _ => 3,
        }
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Pos::Noun => "noun",
            Pos::Verb => "verb",
            Pos::Adjective => "adjective",
            Pos::AdjectiveSatellite => "adjective-satellite",
            Pos::Adverb => "adverb",
        };
        f.write_str(name)
    }
}

/// Synset identity: byte offset in the data file plus the Pos family of that
/// file. Satellites share `data.adj` with head adjectives, so their ids carry
/// [`Pos::Adjective`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SynsetId {
    pub offset: u32,
    pub pos: Pos,
}

impl SynsetId {
    pub fn new(offset: u32, pos: Pos) -> Self {
        SynsetId {
            offset,
            pos: pos.family(),
        }
    }
}

impl fmt::Display for SynsetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:08}-{}", self.offset, self.pos.code())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Synset {
    pub id: SynsetId,
    /// Exact `ss_type`, so satellites stay distinguishable from head adjectives.
    pub pos: Pos,
    /// Lowercase, underscore-joined, duplicate-free, in data-file order.
    pub lemmas: Vec<String>,
    pub gloss: String,
    pub hypernyms: Vec<SynsetId>,
    pub hyponyms: Vec<SynsetId>,
}

/// Lowercases and joins multiword lemmas with underscores, the way index files spell them.
pub fn normalize_lemma(lemma: &str) -> String {
    lemma
        .split_whitespace()
        .collect::<Vec<_>>()
        .join("_")
        .to_lowercase()
}

#[derive(Debug, Clone, PartialEq)]
pub struct WordnetStore {
    version: String,
    synsets: Vec<Synset>,
    by_id: HashMap<SynsetId, usize>,
    depths: Vec<u32>,
    index: HashMap<String, [Vec<SynsetId>; 4]>,
}

impl WordnetStore {
    pub fn version(&self) -> &str {
        &self.version
    }

    pub fn len(&self) -> usize {
        self.synsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.synsets.is_empty()
    }

    /// All synsets, ordered by family (noun, verb, adjective, adverb) then offset.
    pub fn iter(&self) -> impl Iterator<Item = &Synset> {
        self.synsets.iter()
    }

    pub fn synset(&self, id: SynsetId) -> Option<&Synset> {
        self.by_id.get(&id).map(|&i| &self.synsets[i])
    }

    /// Number of synsets stored in the data file of `pos`'s family.
    pub fn synset_count(&self, pos: Pos) -> usize {
        self.synsets
            .iter()
            .filter(|s| s.id.pos == pos.family())
            .count()
    }

    /// Number of distinct (lemma, Pos family) index keys.
    pub fn lemma_count(&self) -> usize {
        self.index
            .values()
            .map(|slots| slots.iter().filter(|ids| !ids.is_empty()).count())
            .sum()
    }

    /// Iterates over every indexed lemma with its Pos family and sense-ordered ids.
    pub fn index_entries(&self) -> impl Iterator<Item = (&str, Pos, &[SynsetId])> {
        self.index.iter().flat_map(|(lemma, slots)| {
            Pos::FAMILIES
                .iter()
                .zip(slots.iter())
                .filter(|(_, ids)| !ids.is_empty())
                .map(move |(&pos, ids)| (lemma.as_str(), pos, ids.as_slice()))
        })
    }

    pub fn contains_lemma(&self, lemma: &str) -> bool {
        self.index.contains_key(&normalize_lemma(lemma))
    }

    /// Synsets of `lemma` in WordNet sense order. With no Pos, results are
    /// concatenated noun, verb, adjective (satellites included), adverb.
    pub fn synsets_of(&self, lemma: &str, pos: Option<Pos>) -> Vec<&Synset> {
        self.synset_ids_of(lemma, pos)
            .into_iter()
            .filter_map(|id| self.synset(id))
            .collect()
    }

    pub fn synset_ids_of(&self, lemma: &str, pos: Option<Pos>) -> Vec<SynsetId> {
        let key = normalize_lemma(lemma);
        if key.is_empty() {
            return Vec::new();
        }
        let Some(slots) = self.index.get(&key) else {
            return Vec::new();
        };
        match pos {
            Some(p) => slots[p.family_slot()].clone(),
            None => slots.iter().flatten().copied().collect(),
        }
    }

    /// Node count of the shortest hypernym path from `id` up to a root; roots have depth 1.
    pub fn depth_of(&self, id: SynsetId) -> u32 {
        self.by_id.get(&id).map(|&i| self.depths[i]).unwrap_or(1)
    }

    pub fn depth(&self, synset: &Synset) -> u32 {
        self.depth_of(synset.id)
    }

    /// Every hypernym ancestor of `id` (itself included, at distance 0) with
    /// its hop distance from `id`, in breadth-first order.
    pub fn ancestors(&self, id: SynsetId) -> Vec<(SynsetId, u32)> {
        let mut seen = vec![(id, 0)];
        let mut next = 0;
        while next < seen.len() {
            let (cur, dist) = seen[next];
            next += 1;
            if let Some(s) = self.synset(cur) {
                for &h in &s.hypernyms {
                    if !seen.iter().any(|&(x, _)| x == h) {
                        seen.push((h, dist + 1));
                    }
                }
            }
        }
        seen
    }

    /// Lowest common subsumer: the deepest shared ancestor (inclusive), ties
    /// going to the smaller offset.
    pub fn lcs(&self, a: &Synset, b: &Synset) -> Option<&Synset> {
        let found = self.lcs_of(&self.ancestors(a.id), &self.ancestors(b.id))?;
        self.synset(found.id)
    }

    /// [`WordnetStore::lcs`] over precomputed [`WordnetStore::ancestors`] lists.
    pub fn lcs_of(
        &self,
        ancestors_a: &[(SynsetId, u32)],
        ancestors_b: &[(SynsetId, u32)],
    ) -> Option<Subsumer> {
        ancestors_a
            .iter()
            .filter_map(|&(id, hops_a)| {
                let &(_, hops_b) = ancestors_b.iter().find(|(x, _)| *x == id)?;
                Some(Subsumer {
                    id,
                    depth: self.depth_of(id),
                    hops_a,
                    hops_b,
                })
            })
            .max_by(|x, y| x.depth.cmp(&y.depth).then(y.id.cmp(&x.id)))
    }
}

/// A common subsumer of two synsets with its depth and its distance from each.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Subsumer {
    pub id: SynsetId,
    pub depth: u32,
    pub hops_a: u32,
    pub hops_b: u32,
}

/// Assembles a [`WordnetStore`] and checks its invariants on [`StoreBuilder::build`].
#[derive(Debug, Default)]
pub struct StoreBuilder {
    version: String,
    synsets: BTreeMap<(usize, u32), Synset>,
    index: Vec<(String, Pos, Vec<SynsetId>)>,
}

impl StoreBuilder {
    pub fn new(version: impl Into<String>) -> Self {
        StoreBuilder {
            version: version.into(),
            ..Default::default()
        }
    }

    /// Adds a synset without links. Lemmas are normalized and deduplicated.
    pub fn add_synset(&mut self, offset: u32, pos: Pos, lemmas: &[&str], gloss: &str) -> SynsetId {
        let id = SynsetId::new(offset, pos);
        self.insert(Synset {
            id,
            pos,
            lemmas: lemmas.iter().map(|l| l.to_string()).collect(),
            gloss: gloss.to_string(),
            hypernyms: Vec::new(),
            hyponyms: Vec::new(),
        });
        id
    }

    /// Inserts a synset with whatever links it already carries, replacing any
    /// synset with the same id.
    pub fn insert(&mut self, mut synset: Synset) {
        let mut lemmas: Vec<String> = Vec::with_capacity(synset.lemmas.len());
        for l in synset.lemmas.iter().map(|l| normalize_lemma(l)) {
            if !l.is_empty() && !lemmas.contains(&l) {
                lemmas.push(l);
            }
        }
        synset.lemmas = lemmas;
        synset.id = SynsetId::new(synset.id.offset, synset.pos);
        self.synsets
            .insert((synset.pos.family_slot(), synset.id.offset), synset);
    }

    /// Records `parent` as a hypernym of `child` and `child` as a hyponym of `parent`.
    pub fn link_hypernym(&mut self, child: SynsetId, parent: SynsetId) {
        if let Some(c) = self
            .synsets
            .get_mut(&(child.pos.family_slot(), child.offset))
        {
            if !c.hypernyms.contains(&parent) {
                c.hypernyms.push(parent);
            }
        }
        if let Some(p) = self
            .synsets
            .get_mut(&(parent.pos.family_slot(), parent.offset))
        {
            if !p.hyponyms.contains(&child) {
                p.hyponyms.push(child);
            }
        }
    }

    /// Declares the sense-ordered synsets of `lemma`. Lemmas never declared are
    /// indexed from synset membership in offset order.
    pub fn index_lemma(&mut self, lemma: &str, pos: Pos, ids: Vec<SynsetId>) {
        self.index.push((normalize_lemma(lemma), pos.family(), ids));
    }

    pub fn build(self) -> Result<WordnetStore, WordnetError> {
        let synsets: Vec<Synset> = self.synsets.into_values().collect();
        let by_id: HashMap<SynsetId, usize> =
            synsets.iter().enumerate().map(|(i, s)| (s.id, i)).collect();

        for s in &synsets {
            if s.lemmas.is_empty() {
                return Err(WordnetError::Integrity(format!(
                    "synset {} has no lemmas",
                    s.id
                )));
            }
            for (kind, links) in [("hypernym", &s.hypernyms), ("hyponym", &s.hyponyms)] {
                for target in links {
                    let Some(&t) = by_id.get(target) else {
                        return Err(WordnetError::Integrity(format!(
                            "synset {} has dangling {kind} {target}",
                            s.id
                        )));
                    };
                    if target.pos != s.id.pos {
                        return Err(WordnetError::Integrity(format!(
                            "{kind} link {} -> {target} crosses Pos families",
                            s.id
                        )));
                    }
                    let back = match kind {
                        "hypernym" => &synsets[t].hyponyms,
                        _ => &synsets[t].hypernyms,
                    };
                    if !back.contains(&s.id) {
                        return Err(WordnetError::Integrity(format!(
                            "{kind} link {} -> {target} has no inverse link",
                            s.id
                        )));
                    }
                }
            }
        }

        let depths = compute_depths(&synsets, &by_id)?;

        let mut index: HashMap<String, [Vec<SynsetId>; 4]> = HashMap::new();
        for (lemma, pos, ids) in self.index {
            for id in &ids {
                if !by_id.contains_key(id) {
                    return Err(WordnetError::Integrity(format!(
                        "index entry {lemma} ({pos}) points at missing synset {id}"
                    )));
                }
            }
            let slot = &mut index.entry(lemma).or_default()[pos.family_slot()];
            for id in ids {
                if !slot.contains(&id) {
                    slot.push(id);
                }
            }
        }
        for s in &synsets {
            for lemma in &s.lemmas {
                let slot = &mut index.entry(lemma.clone()).or_default()[s.pos.family_slot()];
                if !slot.contains(&s.id) {
                    slot.push(s.id);
                }
            }
        }

        Ok(WordnetStore {
            version: self.version,
            synsets,
            by_id,
            depths,
            index,
        })
    }
}

/// Shortest-path depths for every synset, found by a breadth-first walk
/// down from the roots. WordNet 3.0 has a two-verb hypernym cycle
/// (restrain/inhibit) with no way up to a root; members of such cycles are
/// treated as roots. Noun cycles are rejected.
fn compute_depths(
    synsets: &[Synset],
    by_id: &HashMap<SynsetId, usize>,
) -> Result<Vec<u32>, WordnetError> {
    check_noun_acyclic(synsets, by_id)?;

    let mut depths: Vec<Option<u32>> = vec![None; synsets.len()];
    let roots: Vec<usize> = (0..synsets.len())
        .filter(|&i| synsets[i].hypernyms.is_empty())
        .collect();
    descend(synsets, by_id, &mut depths, roots);

    let stranded: Vec<usize> = (0..synsets.len())
        .filter(|&i| depths[i].is_none())
        .filter(|&i| {
            let id = synsets[i].id;
            synsets[i]
                .hypernyms
                .iter()
                .any(|&h| ancestors_by_index(synsets, by_id, h).contains(&id))
        })
        .collect();
    descend(synsets, by_id, &mut depths, stranded);

    depths
        .into_iter()
        .enumerate()
        .map(|(i, d)| {
            d.ok_or_else(|| {
                WordnetError::Integrity(format!("synset {} has no depth", synsets[i].id))
            })
        })
        .collect()
}

fn descend(
    synsets: &[Synset],
    by_id: &HashMap<SynsetId, usize>,
    depths: &mut [Option<u32>],
    seeds: Vec<usize>,
) {
    let mut queue = VecDeque::new();
    for s in seeds {
        if depths[s].is_none() {
            depths[s] = Some(1);
            queue.push_back(s);
        }
    }
    while let Some(node) = queue.pop_front() {
        let d = depths[node].unwrap_or(1);
        for h in &synsets[node].hyponyms {
            let child = by_id[h];
            if depths[child].is_none() {
                depths[child] = Some(d + 1);
                queue.push_back(child);
            }
        }
    }
}

fn ancestors_by_index(
    synsets: &[Synset],
    by_id: &HashMap<SynsetId, usize>,
    start: SynsetId,
) -> Vec<SynsetId> {
    let mut seen = vec![start];
    let mut queue = VecDeque::from([start]);
    while let Some(cur) = queue.pop_front() {
        for &h in &synsets[by_id[&cur]].hypernyms {
            if !seen.contains(&h) {
                seen.push(h);
                queue.push_back(h);
            }
        }
    }
    seen
}

/// Kahn's algorithm over noun hypernym edges.
fn check_noun_acyclic(
    synsets: &[Synset],
    by_id: &HashMap<SynsetId, usize>,
) -> Result<(), WordnetError> {
    let nouns: Vec<usize> = (0..synsets.len())
        .filter(|&i| synsets[i].id.pos == Pos::Noun)
        .collect();
    let mut pending: HashMap<usize, usize> = nouns
        .iter()
        .map(|&i| (i, synsets[i].hypernyms.len()))
        .collect();
    let mut ready: Vec<usize> = nouns.iter().copied().filter(|i| pending[i] == 0).collect();
    let mut done = 0;
    while let Some(node) = ready.pop() {
        done += 1;
        for h in &synsets[node].hyponyms {
            let child = by_id[h];
            let left = pending.get_mut(&child).expect("noun hyponym");
            *left -= 1;
            if *left == 0 {
                ready.push(child);
            }
        }
    }
    if done == nouns.len() {
        return Ok(());
    }
    let culprit = nouns
        .iter()
        .find(|i| pending[i] > 0)
        .map(|&i| synsets[i].id.to_string())
        .unwrap_or_default();
    Err(WordnetError::Integrity(format!(
        "noun hypernym cycle through {culprit}"
    )))
}
