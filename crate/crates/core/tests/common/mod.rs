#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};
use std::path::PathBuf;
use std::sync::OnceLock;

use lexireverse::dict::{fold, BilingualDictionary, LanguagePair, LexicalEntry};
use lexireverse::similarity::{phrase_distance, sim_value, tokenize, word_distance};
use lexireverse::wordnet::{load_wordnet, Pos, WordnetStore};
use lexireverse::{ReversalConfig, WORDNET_DIR_ENV};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn repo_root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

pub fn data_path(rel: &str) -> PathBuf {
    repo_root().join("data").join(rel)
}

pub fn fixture_path(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(rel)
}

pub fn wordnet_dir() -> PathBuf {
    std::env::var_os(WORDNET_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| data_path("wordnet-3.0"))
}

/// WordNet 3.0, loaded once per test binary.
pub fn store() -> &'static WordnetStore {
    static STORE: OnceLock<WordnetStore> = OnceLock::new();
    STORE.get_or_init(|| {
        let dir = wordnet_dir();
        load_wordnet(&dir).unwrap_or_else(|e| {
            panic!(
                "WordNet 3.0 not loadable from {} ({e}); run scripts/fetch-wordnet.sh",
                dir.display()
            )
        })
    })
}

pub fn mini_store() -> WordnetStore {
    load_wordnet(fixture_path("wn-mini")).expect("wn-mini fixture loads")
}

pub fn entry(unit: &str, senses: &[&str]) -> LexicalEntry {
    LexicalEntry::new(unit, senses.iter()).unwrap()
}

pub fn dictionary(source: &str, target: &str, entries: Vec<LexicalEntry>) -> BilingualDictionary {
    BilingualDictionary::new(LanguagePair::parse(source, target).unwrap(), entries, "")
}

/// Case-folded (sense, unit) pairs of a reversed dictionary.
pub fn pair_set(d: &BilingualDictionary) -> BTreeSet<(String, String)> {
    d.pairs().map(|(u, s)| (fold(u), fold(s))).collect()
}

/// Lemma groups taken from a fixed random selection of WordNet synsets, so
/// random dictionaries share synonyms often enough to trigger DRwD and DRwS.
pub fn lemma_pool(store: &WordnetStore, synsets: usize, seed: u64) -> Vec<Vec<String>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let candidates: Vec<Vec<String>> = store
        .iter()
        .filter(|s| matches!(s.id.pos, Pos::Noun | Pos::Verb | Pos::Adjective))
        .map(|s| {
            s.lemmas
                .iter()
                .filter(|l| l.len() > 1 && l.chars().all(|c| c.is_ascii_lowercase()))
                .cloned()
                .collect::<Vec<_>>()
        })
        .filter(|ls| !ls.is_empty())
        .collect();
    (0..synsets)
        .map(|_| candidates[rng.gen_range(0..candidates.len())].clone())
        .collect()
}

/// A random dictionary of up to `max_entries` entries. Units are WordNet
/// lemmas when `source` is "eng", invented words otherwise; senses are one
/// or two pool lemmas, occasionally an overlong phrase.
pub fn random_dictionary(
    pool: &[Vec<String>],
    source: &str,
    target: &str,
    max_entries: usize,
    rng: &mut ChaCha8Rng,
) -> BilingualDictionary {
    let pick = |rng: &mut ChaCha8Rng| -> String {
        let group = pool.choose(rng).unwrap();
        group.choose(rng).unwrap().clone()
    };
    let n = rng.gen_range(1..=max_entries);
    let mut entries = Vec::with_capacity(n);
    for i in 0..n {
        let unit = if source == "eng" {
            pick(rng)
        } else {
            format!("w{i}x{}", rng.gen_range(0..1000))
        };
        let k = rng.gen_range(1..=3);
        let senses: Vec<String> = (0..k)
            .map(|_| match rng.gen_range(0..10) {
                0 => format!("{} {}", pick(rng), pick(rng)),
                1 => format!("a {} that is {} and {}", pick(rng), pick(rng), pick(rng)),
                _ => pick(rng),
            })
            .collect();
        entries.push(LexicalEntry::new(&unit, senses).unwrap());
    }
    dictionary(source, target, entries)
}

/// Sense filter written out independently of the reversal module.
fn usable(sense: &str, max_tokens: usize) -> bool {
    sense.split_whitespace().count() <= max_tokens
        && !sense.contains('.')
        && !sense.contains(';')
        && !sense.contains('—')
}

/// Plain DR: every usable (sense, unit).
pub fn naive_dr(dict: &BilingualDictionary, cfg: &ReversalConfig) -> BTreeSet<(String, String)> {
    let mut out = BTreeSet::new();
    for e in dict.entries() {
        for s in e.senses() {
            if usable(s, cfg.max_sense_tokens) {
                out.insert((fold(s), fold(e.lexical_unit())));
            }
        }
    }
    out
}

/// Quadruple loop over (entry_i, sense_j) x (entry_u, sense_v) with an
/// uncached distance, memoized only by exact argument pair.
pub fn naive_drwd(
    dict: &BilingualDictionary,
    store: &WordnetStore,
    cfg: &ReversalConfig,
) -> BTreeSet<(String, String)> {
    let sim_cfg = cfg.similarity_config();
    let by_unit = cfg.units_in_wordnet_language(dict);
    let mut memo: HashMap<(String, String), f64> = HashMap::new();
    let mut dist = |a: &str, b: &str| -> f64 {
        *memo
            .entry((a.to_string(), b.to_string()))
            .or_insert_with(|| phrase_distance(store, &tokenize(a), &tokenize(b), &sim_cfg))
    };
    let mut out = naive_dr(dict, cfg);
    let entries = dict.entries();
    for ei in entries {
        for sj in ei
            .senses()
            .iter()
            .filter(|s| usable(s, cfg.max_sense_tokens))
        {
            for eu in entries {
                for sv in eu
                    .senses()
                    .iter()
                    .filter(|s| usable(s, cfg.max_sense_tokens))
                {
                    let d = if by_unit {
                        dist(ei.lexical_unit(), eu.lexical_unit())
                    } else {
                        dist(sj, sv)
                    };
                    if d <= cfg.alpha {
                        out.insert((fold(sj), fold(eu.lexical_unit())));
                    }
                }
            }
        }
    }
    out
}

/// DR plus, for every ordered entry pair with simValue >= beta, each sense of
/// the first under the unit of the second.
pub fn naive_drws(
    dict: &BilingualDictionary,
    store: &WordnetStore,
    cfg: &ReversalConfig,
) -> BTreeSet<(String, String)> {
    let sim_cfg = cfg.similarity_config();
    let by_unit = cfg.units_in_wordnet_language(dict);
    let mut out = naive_dr(dict, cfg);
    for (i, ei) in dict.entries().iter().enumerate() {
        for (u, eu) in dict.entries().iter().enumerate() {
            if i == u || sim_value(ei, eu, store, &sim_cfg, by_unit) < cfg.beta {
                continue;
            }
            for s in ei
                .senses()
                .iter()
                .filter(|s| usable(s, cfg.max_sense_tokens))
            {
                out.insert((fold(s), fold(eu.lexical_unit())));
            }
        }
    }
    out
}

/// Brute-force Wu–Palmer word distance: full ancestor maps by depth-first
/// walk, every common ancestor scanned, path depths taken through the chosen
/// subsumer.
pub fn oracle_word_distance(store: &WordnetStore, a: &str, b: &str) -> f64 {
    let sa = store.synsets_of(a, None);
    let sb = store.synsets_of(b, None);
    if sa.is_empty() || sb.is_empty() {
        return 1.0;
    }
    if sa.iter().any(|x| sb.iter().any(|y| x.id == y.id)) {
        return 0.0;
    }
    let hops = |start| {
        let mut best: HashMap<_, u32> = HashMap::new();
        let mut stack = vec![(start, 0u32)];
        while let Some((id, h)) = stack.pop() {
            if best.get(&id).is_some_and(|&old| old <= h) {
                continue;
            }
            best.insert(id, h);
            for &p in &store.synset(id).unwrap().hypernyms {
                stack.push((p, h + 1));
            }
        }
        best
    };
    let mut top = 0.0_f64;
    for x in &sa {
        for y in &sb {
            if x.id.pos != y.id.pos {
                continue;
            }
            let (hx, hy) = (hops(x.id), hops(y.id));
            let lcs = hx
                .keys()
                .filter(|k| hy.contains_key(k))
                .max_by(|p, q| store.depth_of(**p).cmp(&store.depth_of(**q)).then(q.cmp(p)));
            if let Some(l) = lcs {
                let d = store.depth_of(*l) as f64;
                top = top.max(2.0 * d / ((d + hx[l] as f64) + (d + hy[l] as f64)));
            }
        }
    }
    1.0 - top
}

/// Sanity check of the word-distance oracle against the library.
pub fn word_distance_matches_oracle(store: &WordnetStore, a: &str, b: &str) -> bool {
    word_distance(store, a, b) == oracle_word_distance(store, a, b)
}

/// Exactly `n` entries with distinct invented units and one to three pool
/// lemmas as senses.
pub fn synthetic_dictionary(pool: &[Vec<String>], n: usize, seed: u64) -> BilingualDictionary {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let entries = (0..n).map(|i| {
        let k = rng.gen_range(1..=3);
        let senses: Vec<String> = (0..k)
            .map(|_| {
                pool.choose(&mut rng)
                    .unwrap()
                    .choose(&mut rng)
                    .unwrap()
                    .clone()
            })
            .collect();
        LexicalEntry::new(&format!("syn{i:05}"), senses).unwrap()
    });
    dictionary("qaa", "eng", entries.collect())
}
