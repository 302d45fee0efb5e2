//! Reader for the Princeton wndb flat files (`index.{noun,verb,adj,adv}` and
//! `data.{noun,verb,adj,adv}`).

use std::fs;
use std::path::Path;

use super::{Pos, StoreBuilder, Synset, SynsetId, WordnetError, WordnetStore};

pub const WORDNET_VERSION: &str = "3.0";

const FILES: [(&str, Pos); 4] = [
    ("noun", Pos::Noun),
    ("verb", Pos::Verb),
    ("adj", Pos::Adjective),
    ("adv", Pos::Adverb),
];

/// Loads a WordNet database directory. Only hypernym (`@`, `@i`) and hyponym
/// (`~`, `~i`) pointers are kept.
pub fn load_wordnet(dir: impl AsRef<Path>) -> Result<WordnetStore, WordnetError> {
    let dir = dir.as_ref();
    // check presence of every file before doing any parsing work
    let mut paths = Vec::new();
    for (suffix, pos) in FILES {
        for kind in ["index", "data"] {
            let name = format!("{kind}.{suffix}");
            let path = dir.join(&name);
            if !path.is_file() {
                return Err(WordnetError::MissingFile { name, path });
            }
            paths.push((name, path, kind, pos));
        }
    }

    let mut builder = StoreBuilder::new(WORDNET_VERSION);
    let mut index_lines = Vec::new();
    for (name, path, kind, pos) in paths {
        let text = read_text(&path)?;
        if kind == "data" {
            for (lineno, line) in content_lines(&text) {
                builder.insert(parse_data_line(line, pos).map_err(|message| {
                    WordnetError::Parse {
                        file: name.clone(),
                        line: lineno,
                        message,
                    }
                })?);
            }
        } else {
            for (lineno, line) in content_lines(&text) {
                let (lemma, ids) =
                    parse_index_line(line, pos).map_err(|message| WordnetError::Parse {
                        file: name.clone(),
                        line: lineno,
                        message,
                    })?;
                index_lines.push((lemma, pos, ids));
            }
        }
    }
    for (lemma, pos, ids) in index_lines {
        builder.index_lemma(&lemma, pos, ids);
    }
    builder.build()
}

fn read_text(path: &Path) -> Result<String, WordnetError> {
    let bytes = fs::read(path).map_err(|source| WordnetError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    // wndb is ASCII in practice; tolerate stray Latin-1 bytes
    Ok(match String::from_utf8(bytes) {
        Ok(s) => s,
        Err(e) => e.into_bytes().iter().map(|&b| b as char).collect(),
    })
}

/// Non-comment lines with 1-based line numbers. License header lines start with two spaces.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.starts_with("  ") && !l.trim().is_empty())
}

struct Fields<'a> {
    iter: std::str::SplitAsciiWhitespace<'a>,
}

impl<'a> Fields<'a> {
    fn next(&mut self, what: &str) -> Result<&'a str, String> {
        self.iter
            .next()
            .ok_or_else(|| format!("truncated line: expected {what}"))
    }

    fn decimal(&mut self, what: &str) -> Result<u32, String> {
        let tok = self.next(what)?;
        tok.parse().map_err(|_| format!("bad {what} {tok:?}"))
    }

    fn hex(&mut self, what: &str) -> Result<u32, String> {
        let tok = self.next(what)?;
        u32::from_str_radix(tok, 16).map_err(|_| format!("bad {what} {tok:?}"))
    }
}

fn parse_pos(tok: &str) -> Result<Pos, String> {
    Pos::from_code(tok).ok_or_else(|| format!("bad part of speech {tok:?}"))
}

/// `offset lex_filenum ss_type w_cnt word lex_id [...] p_cnt [ptr...] [frames...] | gloss`
fn parse_data_line(line: &str, file_pos: Pos) -> Result<Synset, String> {
    let (body, gloss) = match line.find('|') {
        Some(i) => (&line[..i], line[i + 1..].trim()),
        None => (line, ""),
    };
    let mut f = Fields {
        iter: body.split_ascii_whitespace(),
    };
    let offset = f.decimal("synset_offset")?;
    f.decimal("lex_filenum")?;
    let pos = parse_pos(f.next("ss_type")?)?;
    if pos.family() != file_pos.family() {
        return Err(format!(
            "ss_type {} in data.{} file",
            pos.code(),
            file_pos.file_suffix()
        ));
    }
    let id = SynsetId::new(offset, pos);

    let w_cnt = f.hex("w_cnt")?;
    let mut lemmas = Vec::with_capacity(w_cnt as usize);
    for _ in 0..w_cnt {
        let word = f.next("word")?;
        f.hex("lex_id")?;
        lemmas.push(strip_adjective_marker(word).to_lowercase());
    }

    let p_cnt = f.decimal("p_cnt")?;
    let mut hypernyms = Vec::new();
    let mut hyponyms = Vec::new();
    for _ in 0..p_cnt {
        let symbol = f.next("pointer_symbol")?;
        let target_offset = f.decimal("pointer offset")?;
        let target_pos = parse_pos(f.next("pointer pos")?)?;
        let source_target = f.next("source/target")?;
        if source_target.len() != 4 || u16::from_str_radix(source_target, 16).is_err() {
            return Err(format!("bad source/target field {source_target:?}"));
        }
        let target = SynsetId::new(target_offset, target_pos);
        match symbol {
            "@" | "@i" => hypernyms.push(target),
            "~" | "~i" => hyponyms.push(target),
            _ => {}
        }
    }
    // verb frames (f_cnt + "+ f_num w_num" triples) are not needed

    Ok(Synset {
        id,
        pos,
        lemmas,
        gloss: gloss.to_string(),
        hypernyms,
        hyponyms,
    })
}

/// Drops the syntactic marker `(a)`, `(p)` or `(ip)` that adjective lemmas may carry.
fn strip_adjective_marker(word: &str) -> &str {
    for marker in ["(a)", "(p)", "(ip)"] {
        if let Some(stripped) = word.strip_suffix(marker) {
            return stripped;
        }
    }
    word
}

/// `lemma pos synset_cnt p_cnt [ptr_symbol...] sense_cnt tagsense_cnt synset_offset...`
fn parse_index_line(line: &str, file_pos: Pos) -> Result<(String, Vec<SynsetId>), String> {
    let mut f = Fields {
        iter: line.split_ascii_whitespace(),
    };
    let lemma = f.next("lemma")?;
    let pos = parse_pos(f.next("pos")?)?;
    if pos.family() != file_pos.family() {
        return Err(format!(
            "pos {} in index.{} file",
            pos.code(),
            file_pos.file_suffix()
        ));
    }
    let synset_cnt = f.decimal("synset_cnt")?;
    let p_cnt = f.decimal("p_cnt")?;
    for _ in 0..p_cnt {
        f.next("ptr_symbol")?;
    }
    f.decimal("sense_cnt")?;
    f.decimal("tagsense_cnt")?;
    let mut ids = Vec::with_capacity(synset_cnt as usize);
    for _ in 0..synset_cnt {
        ids.push(SynsetId::new(f.decimal("synset_offset")?, pos));
    }
    if let Some(extra) = f.iter.next() {
        return Err(format!("unexpected trailing field {extra:?}"));
    }
    Ok((lemma.to_string(), ids))
}
