//! Acceptance checks, one PASS/FAIL line per criterion. Runs as a plain
//! binary so the lines show up in `cargo test` output.

mod common;

use std::collections::BTreeSet;
use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use lexireverse::dict::{
    parse_dictionary, serialize_dictionary, DictFormat, LanguagePair, LexicalEntry,
};
use lexireverse::eval::{score_ratings, RatingSheet, SheetRow};
use lexireverse::reversal::{reverse, Algorithm, ReversalConfig};
use lexireverse::similarity::{sim_value, word_distance, RelationFlags, SimilarityConfig};
use lexireverse::wordnet::{load_wordnet, Pos, StoreBuilder};
use lexireverse::{BilingualDictionary, WordnetStore};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{
    data_path, entry, lemma_pool, naive_dr, naive_drwd, naive_drws, pair_set, random_dictionary,
    store, synthetic_dictionary, wordnet_dir,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn run_with(
    dict: &BilingualDictionary,
    store: &WordnetStore,
    algo: Algorithm,
    alpha: f64,
    beta: f64,
) -> BTreeSet<(String, String)> {
    let mut cfg = ReversalConfig::new(algo);
    cfg.alpha = alpha;
    cfg.beta = beta;
    pair_set(&reverse(dict, Some(store), &cfg).unwrap().0)
}

fn bundled(rel: &str) -> BilingualDictionary {
    parse_dictionary(
        fs::read(data_path(rel)).unwrap().as_slice(),
        DictFormat::Tsv,
    )
    .unwrap()
}

fn parse_fidelity() -> Outcome {
    let dir = wordnet_dir();
    let start = Instant::now();
    let s = load_wordnet(&dir).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let mut detail = Vec::new();
    for (pos, file) in [
        (Pos::Noun, "data.noun"),
        (Pos::Verb, "data.verb"),
        (Pos::Adjective, "data.adj"),
        (Pos::Adverb, "data.adv"),
    ] {
        let lines = fs::read(dir.join(file))
            .map_err(|e| e.to_string())?
            .split(|&b| b == b'\n')
            .filter(|l| !l.is_empty() && !l.starts_with(b"  "))
            .count();
        let got = s.synset_count(pos);
        ensure(got == lines, || {
            format!("{file}: {got} synsets vs {lines} lines")
        })?;
        detail.push(format!("{}={got}", pos.file_suffix()));
    }
    ensure(elapsed < Duration::from_secs(10), || {
        format!("load took {elapsed:?}")
    })?;
    Ok(format!(
        "{} in {:.2}s",
        detail.join(" "),
        elapsed.as_secs_f64()
    ))
}

fn shared_synset_distances() -> Outcome {
    let s = store();
    let start = Instant::now();
    let a = word_distance(s, "handwriting", "script");
    let b = word_distance(s, "slow", "dense");
    let elapsed = start.elapsed();
    ensure(a == 0.0 && b == 0.0, || {
        format!("handwriting/script={a} slow/dense={b}")
    })?;
    Ok(format!("both 0.0 in {:.1}ms", elapsed.as_secs_f64() * 1e3))
}

fn known_failure() -> Outcome {
    let d = bundled("fixtures/tuhbi-slow.tsv");
    let got = run_with(&d, store(), Algorithm::Drwd, 0.0, 0.9);
    let pair = ("slow".to_string(), "tuhbi".to_string());
    ensure(got.contains(&pair), || format!("pairs {got:?}"))?;
    Ok(format!("(slow, tuhbi) emitted among {} pairs", got.len()))
}

fn superset_laws() -> Outcome {
    let s = store();
    let pool = lemma_pool(s, 150, 101);
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    let alphas = [0.0, 0.15, 0.3, 0.5];
    let betas = [0.3, 0.6, 0.9, 1.0];
    let mut grew = 0;
    for n in 0..200 {
        let (src, tgt) = if n % 2 == 0 {
            ("qaa", "eng")
        } else {
            ("eng", "qaa")
        };
        let d = random_dictionary(&pool, src, tgt, 30, &mut rng);
        let dr = pair_set(
            &reverse(&d, None, &ReversalConfig::new(Algorithm::Dr))
                .unwrap()
                .0,
        );
        let wd: Vec<_> = alphas
            .iter()
            .map(|&a| run_with(&d, s, Algorithm::Drwd, a, 0.9))
            .collect();
        let ws: Vec<_> = betas
            .iter()
            .map(|&b| run_with(&d, s, Algorithm::Drws, 0.0, b))
            .collect();
        ensure(dr.is_subset(&wd[0]), || {
            format!("dict {n}: DR not within DRwD(0)")
        })?;
        for k in 1..alphas.len() {
            ensure(wd[k - 1].is_subset(&wd[k]), || {
                format!("dict {n}: DRwD alpha {} vs {}", alphas[k - 1], alphas[k])
            })?;
        }
        for k in 1..betas.len() {
            ensure(ws[k].is_subset(&ws[k - 1]), || {
                format!("dict {n}: DRwS beta {} vs {}", betas[k], betas[k - 1])
            })?;
        }
        for w in &ws {
            ensure(dr.is_subset(w), || format!("dict {n}: DR not within DRwS"))?;
        }
        grew += (wd[3].len() > dr.len()) as usize + (ws[0].len() > dr.len()) as usize;
    }
    Ok(format!(
        "200 dictionaries, 0 violations, {grew} strict enlargements"
    ))
}

fn oracle_equivalence() -> Outcome {
    let s = store();
    let pool = lemma_pool(s, 150, 201);
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut extra = 0;
    for n in 0..50 {
        let (src, tgt) = if n % 2 == 0 {
            ("qaa", "eng")
        } else {
            ("eng", "qaa")
        };
        let d = random_dictionary(&pool, src, tgt, 50, &mut rng);
        let mut wd = ReversalConfig::new(Algorithm::Drwd);
        wd.alpha = *[0.1, 0.25, 0.4].choose(&mut rng).unwrap();
        let mut ws = ReversalConfig::new(Algorithm::Drws);
        ws.beta = *[0.5, 0.7, 0.9].choose(&mut rng).unwrap();
        let fast_wd = pair_set(&reverse(&d, Some(s), &wd).unwrap().0);
        let slow_wd = naive_drwd(&d, s, &wd);
        ensure(fast_wd == slow_wd, || {
            format!(
                "dict {n}: DRwD differs ({} vs {})",
                fast_wd.len(),
                slow_wd.len()
            )
        })?;
        let fast_ws = pair_set(&reverse(&d, Some(s), &ws).unwrap().0);
        let slow_ws = naive_drws(&d, s, &ws);
        ensure(fast_ws == slow_ws, || {
            format!(
                "dict {n}: DRwS differs ({} vs {})",
                fast_ws.len(),
                slow_ws.len()
            )
        })?;
        let base = naive_dr(&d, &wd).len();
        extra += (fast_wd.len() - base) + (fast_ws.len() - base);
    }
    Ok(format!(
        "50 dictionaries, exact pair-set equality ({extra} pairs beyond DR)"
    ))
}

fn sim_value_properties() -> Outcome {
    let s = store();
    let cfg = SimilarityConfig::default();
    let pool = lemma_pool(s, 200, 301);
    let mut rng = ChaCha8Rng::seed_from_u64(302);
    let entries: Vec<LexicalEntry> = (0..60)
        .map(|i| {
            let senses: Vec<&String> = (0..rng.gen_range(1..=3))
                .map(|_| pool.choose(&mut rng).unwrap().choose(&mut rng).unwrap())
                .collect();
            LexicalEntry::new(&format!("e{i}"), senses).unwrap()
        })
        .collect();
    for e in &entries {
        let v = sim_value(e, e, s, &cfg, false);
        ensure(v == 1.0, || format!("sim({0:?},{0:?}) = {v}", e.senses()))?;
    }
    let mut worst: f64 = 0.0;
    for a in &entries {
        for b in &entries {
            worst = worst
                .max((sim_value(a, b, s, &cfg, false) - sim_value(b, a, s, &cfg, false)).abs());
        }
    }
    ensure(worst <= 1e-12, || format!("asymmetry {worst}"))?;

    let mut builder = StoreBuilder::new("fixture");
    builder.add_synset(10, Pos::Noun, &["a", "b", "c", "d"], "");
    builder.add_synset(20, Pos::Noun, &["e", "c", "d"], "");
    let fixture = builder.build().map_err(|e| e.to_string())?;
    let only = SimilarityConfig {
        relations: RelationFlags::SYNSET_ONLY,
        ..Default::default()
    };
    let v = sim_value(
        &entry("a", &["x"]),
        &entry("e", &["y"]),
        &fixture,
        &only,
        true,
    );
    ensure(v == 0.5, || format!("fixture gives {v}"))?;
    Ok(format!(
        "reflexive on 60 entries, max asymmetry {worst:e}, fixture 0.5"
    ))
}

fn sheet(rater: &str, scores: &[Option<u8>]) -> RatingSheet {
    RatingSheet {
        dictionary_id: "toy".into(),
        rater_id: rater.into(),
        rows: scores
            .iter()
            .zip(1..)
            .map(|(&score, id)| SheetRow {
                entry_id: id,
                unit: format!("u{id}"),
                senses: vec!["s".into()],
                score,
            })
            .collect(),
    }
}

fn toy_and_eval() -> Outcome {
    let d = bundled("toy/qaa-eng.tsv");
    let (dr, _) = reverse(&d, None, &ReversalConfig::new(Algorithm::Dr)).unwrap();
    let (ws, _) = reverse(&d, Some(store()), &ReversalConfig::new(Algorithm::Drws)).unwrap();
    ensure(ws.len() >= dr.len(), || {
        format!("DRwS {} < DR {}", ws.len(), dr.len())
    })?;

    let grid = score_ratings(&[
        sheet("r1", &[Some(5), Some(3), Some(2), Some(1)]),
        sheet("r2", &[Some(5), Some(3), Some(4), Some(2)]),
        sheet("r3", &[Some(4), Some(3), None, Some(3)]),
    ])
    .map_err(|e| e.to_string())?;
    ensure((grid.overall_mean - 19.0 / 6.0).abs() < 1e-12, || {
        format!("mean {}", grid.overall_mean)
    })?;
    ensure(grid.agreement == Some(0.4), || {
        format!("agreement {:?}", grid.agreement)
    })?;
    let split = score_ratings(&[sheet("a", &[Some(5); 10]), sheet("b", &[Some(4); 10])])
        .map_err(|e| e.to_string())?;
    ensure(
        split.overall_mean == 4.5 && split.agreement == Some(0.0),
        || format!("{split:?}"),
    )?;
    Ok(format!(
        "DR {} entries/{} pairs, DRwS {} entries/{} pairs; grid mean 19/6, agreement 0.4",
        dr.len(),
        dr.pair_count(),
        ws.len(),
        ws.pair_count()
    ))
}

fn cli_reverse(input: &Path, out: &Path, algo: &str, threads: &str) -> Result<Duration, String> {
    let start = Instant::now();
    let o = Command::new(env!("CARGO_BIN_EXE_lexireverse"))
        .args([
            "reverse",
            "--algo",
            algo,
            "--alpha",
            "0.3",
            "--threads",
            threads,
        ])
        .arg("--input")
        .arg(input)
        .arg("--output")
        .arg(out)
        .arg("--report")
        .arg(out.with_extension("json"))
        .arg("--wordnet")
        .arg(wordnet_dir())
        .output()
        .map_err(|e| e.to_string())?;
    ensure(o.status.success(), || {
        String::from_utf8_lossy(&o.stderr).into_owned()
    })?;
    Ok(start.elapsed())
}

fn determinism() -> Outcome {
    let s = store();
    let pool = lemma_pool(s, 2000, 401);
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let small = dir.path().join("small.tsv");
    fs::write(
        &small,
        serialize_dictionary(&synthetic_dictionary(&pool, 1000, 402), DictFormat::Tsv).unwrap(),
    )
    .map_err(|e| e.to_string())?;
    for algo in ["drwd", "drws"] {
        let (a, b) = (
            dir.path().join(format!("{algo}-1.tsv")),
            dir.path().join(format!("{algo}-8.tsv")),
        );
        cli_reverse(&small, &a, algo, "1")?;
        cli_reverse(&small, &b, algo, "8")?;
        let (x, y) = (fs::read(&a).unwrap(), fs::read(&b).unwrap());
        ensure(x == y, || format!("{algo}: --threads 1 and 8 differ"))?;
        let (x, y) = (
            fs::read(a.with_extension("json")).unwrap(),
            fs::read(b.with_extension("json")).unwrap(),
        );
        ensure(x == y, || format!("{algo}: reports differ"))?;
    }
    let big = dir.path().join("big.tsv");
    fs::write(
        &big,
        serialize_dictionary(&synthetic_dictionary(&pool, 5000, 403), DictFormat::Tsv).unwrap(),
    )
    .map_err(|e| e.to_string())?;
    let took = cli_reverse(&big, &dir.path().join("big-out.tsv"), "drws", "0")?;
    ensure(took < Duration::from_secs(300), || {
        format!("DRwS on 5000 entries took {took:?}")
    })?;
    Ok(format!(
        "1000 entries byte-identical for DRwD and DRwS; DRwS on 5000 entries in {:.1}s",
        took.as_secs_f64()
    ))
}

fn random_text(rng: &mut ChaCha8Rng, tricky: bool) -> String {
    const PLAIN: &[char] = &[
        'a', 'e', 'k', 'o', 's', 'é', 'ñ', 'ø', '\'', '-', ' ', 'ह', 'ư',
    ];
    const ODD: &[char] = &['\t', '|', '"', '\\', '—', '{', '\u{1F600}'];
    let len = rng.gen_range(1..10);
    let mut s: String = (0..len)
        .map(|_| {
            if tricky && rng.gen_bool(0.15) {
                *ODD.choose(rng).unwrap()
            } else {
                *PLAIN.choose(rng).unwrap()
            }
        })
        .collect();
    s = s.trim().to_string();
    if s.is_empty() {
        s.push('z');
    }
    s
}

fn random_format_dictionary(rng: &mut ChaCha8Rng, tricky: bool) -> BilingualDictionary {
    let entries: Vec<LexicalEntry> = (0..rng.gen_range(0..25))
        .map(|_| {
            let senses: Vec<String> = (0..rng.gen_range(1..5))
                .map(|_| random_text(rng, tricky))
                .collect();
            let pos = rng
                .gen_bool(0.3)
                .then(|| ["n", "v", "adj"].choose(rng).unwrap().to_string());
            let notes = rng.gen_bool(0.2).then(|| random_text(rng, false));
            LexicalEntry::new(&random_text(rng, false), senses)
                .unwrap()
                .with_pos_tag(pos)
                .with_notes(notes)
        })
        .collect();
    let provenance = if rng.gen_bool(0.5) {
        "random test dictionary"
    } else {
        ""
    };
    BilingualDictionary::new(
        LanguagePair::parse("qaa", "eng").unwrap(),
        entries,
        provenance,
    )
}

fn round_trips() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(501);
    for n in 0..100 {
        let d = random_format_dictionary(&mut rng, true);
        let bytes = serialize_dictionary(&d, DictFormat::Jsonl).map_err(|e| e.to_string())?;
        let back =
            parse_dictionary(bytes.as_slice(), DictFormat::Jsonl).map_err(|e| e.to_string())?;
        ensure(back == d, || format!("jsonl dictionary {n} changed"))?;

        let d = random_format_dictionary(&mut rng, false);
        let bytes = serialize_dictionary(&d, DictFormat::Tsv).map_err(|e| e.to_string())?;
        let back =
            parse_dictionary(bytes.as_slice(), DictFormat::Tsv).map_err(|e| e.to_string())?;
        ensure(back == d, || format!("tsv dictionary {n} changed"))?;
    }

    let sheet = RatingSheet {
        dictionary_id: "toy".into(),
        rater_id: "ann".into(),
        rows: (1..=30)
            .map(|i| SheetRow {
                entry_id: i,
                unit: random_text(&mut rng, false),
                senses: vec![
                    random_text(&mut rng, false),
                    "with, comma \"quoted\"".into(),
                ],
                score: (i % 6 != 0).then_some((i % 5 + 1) as u8),
            })
            .collect(),
    };
    let mut buf = Vec::new();
    sheet.write_csv(&mut buf).map_err(|e| e.to_string())?;
    let back = RatingSheet::read_csv(buf.as_slice(), "toy", "ann").map_err(|e| e.to_string())?;
    ensure(back == sheet, || "rating sheet changed".into())?;
    let summary = score_ratings(&[back]).map_err(|e| e.to_string())?;
    ensure(summary.entry_count == 30, || format!("{summary:?}"))?;
    Ok(
        "100 jsonl + 100 tsv dictionaries identical; 30-row rating sheet identical and scorable"
            .into(),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("WordNet parse fidelity and load time", parse_fidelity),
        (
            "handwriting/script and slow/dense at distance 0",
            shared_synset_distances,
        ),
        ("DRwD alpha=0 emits (slow, tuhbi)", known_failure),
        ("superset and monotonicity laws", superset_laws),
        (
            "optimized DRwD/DRwS equal naive reference",
            oracle_equivalence,
        ),
        (
            "simValue reflexive, symmetric, 0.5 fixture",
            sim_value_properties,
        ),
        ("toy DRwS >= DR and evaluation statistics", toy_and_eval),
        ("thread-count determinism and DRwS scale", determinism),
        ("jsonl/tsv and rating-sheet round trips", round_trips),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {} - {name}: {detail} [{secs:.1}s]", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {} - {name}: {why} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
