//! Bilingual dictionaries: entries, language pairs, the jsonl/tsv formats and
//! the pair-merging back end shared by every reversal algorithm.

use std::collections::HashMap;
use std::fmt;
use std::io::Read;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DictError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid dictionary: {0}")]
    Invalid(String),
    #[error("cannot serialize as {format}: {message}")]
    Unserializable { format: DictFormat, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn parse_err(line: usize, message: impl Into<String>) -> DictError {
    DictError::Parse {
        line,
        message: message.into(),
    }
}

/// Comparison key: whitespace runs collapsed, case-folded.
pub fn fold(s: &str) -> String {
    s.split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
        .to_lowercase()
}

/// Three-letter lowercase ISO 639-3 code.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct LangCode(String);

impl LangCode {
    pub fn new(code: &str) -> Result<Self, DictError> {
        let code = code.trim().to_lowercase();
        if code.len() == 3 && code.bytes().all(|b| b.is_ascii_lowercase()) {
            Ok(LangCode(code))
        } else {
            Err(DictError::Invalid(format!("bad ISO 639-3 code {code:?}")))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for LangCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for LangCode {
    type Err = DictError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        LangCode::new(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LanguagePair {
    source: LangCode,
    target: LangCode,
}

impl LanguagePair {
    pub fn new(source: LangCode, target: LangCode) -> Result<Self, DictError> {
        if source == target {
            return Err(DictError::Invalid(format!(
                "source and target language are both {source}"
            )));
        }
        Ok(LanguagePair { source, target })
    }

    pub fn parse(source: &str, target: &str) -> Result<Self, DictError> {
        LanguagePair::new(LangCode::new(source)?, LangCode::new(target)?)
    }

    pub fn source(&self) -> &LangCode {
        &self.source
    }

    pub fn target(&self) -> &LangCode {
        &self.target
    }

    pub fn swapped(&self) -> LanguagePair {
        LanguagePair {
            source: self.target.clone(),
            target: self.source.clone(),
        }
    }
}

/// A headword and its senses. Units and senses are stored trimmed but
/// otherwise verbatim; duplicates are detected on the [`fold`]ed form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexicalEntry {
    lexical_unit: String,
    senses: Vec<String>,
    pos_tag: Option<String>,
    notes: Option<String>,
}

impl LexicalEntry {
    pub fn new<I, S>(unit: &str, senses: I) -> Result<Self, DictError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let unit = unit.trim();
        if unit.is_empty() {
            return Err(DictError::Invalid("empty lexical unit".into()));
        }
        let mut entry = LexicalEntry {
            lexical_unit: unit.to_string(),
            senses: Vec::new(),
            pos_tag: None,
            notes: None,
        };
        for s in senses {
            let s = s.as_ref().trim();
            if s.is_empty() {
                return Err(DictError::Invalid(format!("empty sense in entry {unit:?}")));
            }
            entry.push_sense(s);
        }
        if entry.senses.is_empty() {
            return Err(DictError::Invalid(format!("entry {unit:?} has no senses")));
        }
        Ok(entry)
    }

    pub fn with_pos_tag(mut self, pos: Option<String>) -> Self {
        self.pos_tag = pos.filter(|p| !p.trim().is_empty());
        self
    }

    pub fn with_notes(mut self, notes: Option<String>) -> Self {
        self.notes = notes.filter(|n| !n.trim().is_empty());
        self
    }

    pub fn lexical_unit(&self) -> &str {
        &self.lexical_unit
    }

    pub fn senses(&self) -> &[String] {
        &self.senses
    }

    pub fn pos_tag(&self) -> Option<&str> {
        self.pos_tag.as_deref()
    }

    pub fn notes(&self) -> Option<&str> {
        self.notes.as_deref()
    }

    fn push_sense(&mut self, sense: &str) {
        let key = fold(sense);
        if !self.senses.iter().any(|s| fold(s) == key) {
            self.senses.push(sense.to_string());
        }
    }

    fn absorb(&mut self, other: LexicalEntry) {
        for s in &other.senses {
            self.push_sense(s);
        }
        if self.pos_tag.is_none() {
            self.pos_tag = other.pos_tag;
        }
        if self.notes.is_none() {
            self.notes = other.notes;
        }
    }
}

/// Entries sorted by folded unit, one entry per unit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BilingualDictionary {
    languages: LanguagePair,
    entries: Vec<LexicalEntry>,
    provenance: String,
}

impl BilingualDictionary {
    /// Merges entries sharing a unit (first spelling wins, senses unioned in
    /// first-seen order) and sorts.
    pub fn new(
        languages: LanguagePair,
        entries: impl IntoIterator<Item = LexicalEntry>,
        provenance: impl Into<String>,
    ) -> Self {
        let mut merged: Vec<LexicalEntry> = Vec::new();
        let mut slot: HashMap<String, usize> = HashMap::new();
        for e in entries {
            let key = fold(&e.lexical_unit);
            match slot.get(&key) {
                Some(&i) => merged[i].absorb(e),
                None => {
                    slot.insert(key, merged.len());
                    merged.push(e);
                }
            }
        }
        merged.sort_by_cached_key(|e| fold(&e.lexical_unit));
        BilingualDictionary {
            languages,
            entries: merged,
            provenance: provenance.into(),
        }
    }

    pub fn with_provenance(mut self, provenance: impl Into<String>) -> Self {
        self.provenance = provenance.into();
        self
    }

    pub fn languages(&self) -> &LanguagePair {
        &self.languages
    }

    pub fn source_lang(&self) -> &LangCode {
        self.languages.source()
    }

    pub fn target_lang(&self) -> &LangCode {
        self.languages.target()
    }

    pub fn entries(&self) -> &[LexicalEntry] {
        &self.entries
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, unit: &str) -> Option<&LexicalEntry> {
        let key = fold(unit);
        self.entries
            .binary_search_by(|e| fold(&e.lexical_unit).cmp(&key))
            .ok()
            .map(|i| &self.entries[i])
    }

    /// Every (unit, sense) pair in entry order.
    pub fn pairs(&self) -> impl Iterator<Item = (&str, &str)> {
        self.entries
            .iter()
            .flat_map(|e| e.senses.iter().map(move |s| (e.lexical_unit(), s.as_str())))
    }

    pub fn pair_count(&self) -> usize {
        self.entries.iter().map(|e| e.senses.len()).sum()
    }
}

/// Groups (unit, sense) pairs into a dictionary. Pairs with an empty member are dropped.
pub fn merge_pairs<I, U, S>(pairs: I, languages: LanguagePair) -> BilingualDictionary
where
    I: IntoIterator<Item = (U, S)>,
    U: AsRef<str>,
    S: AsRef<str>,
{
    let entries = pairs
        .into_iter()
        .filter_map(|(u, s)| LexicalEntry::new(u.as_ref(), [s.as_ref()]).ok());
    BilingualDictionary::new(languages, entries, "")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DictFormat {
    Jsonl,
    Tsv,
}

impl DictFormat {
    /// Guesses from a `.jsonl`/`.json` or `.tsv`/`.txt` extension.
    pub fn from_path(path: &Path) -> Option<DictFormat> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "jsonl" | "json" => Some(DictFormat::Jsonl),
            "tsv" | "txt" => Some(DictFormat::Tsv),
            _ => None,
        }
    }
}

impl fmt::Display for DictFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DictFormat::Jsonl => "jsonl",
            DictFormat::Tsv => "tsv",
        })
    }
}

impl FromStr for DictFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "jsonl" => Ok(DictFormat::Jsonl),
            "tsv" => Ok(DictFormat::Tsv),
            other => Err(format!("unknown dictionary format {other:?}")),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct JsonHeader {
    source_lang: String,
    target_lang: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    provenance: String,
}

#[derive(Serialize, Deserialize)]
struct JsonEntry {
    unit: String,
    senses: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pos: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    notes: Option<String>,
}

/// Non-blank lines as (1-based number, text), each checked for valid UTF-8.
fn utf8_lines(bytes: &[u8]) -> Result<Vec<(usize, &str)>, DictError> {
    let mut lines = Vec::new();
    for (i, raw) in bytes.split(|&b| b == b'\n').enumerate() {
        let text = std::str::from_utf8(raw).map_err(|_| parse_err(i + 1, "invalid UTF-8"))?;
        let text = text.strip_suffix('\r').unwrap_or(text);
        if !text.trim().is_empty() {
            lines.push((i + 1, text));
        }
    }
    Ok(lines)
}

pub fn parse_dictionary(
    mut input: impl Read,
    format: DictFormat,
) -> Result<BilingualDictionary, DictError> {
    let mut bytes = Vec::new();
    input.read_to_end(&mut bytes)?;
    let lines = utf8_lines(&bytes)?;
    let Some(&(header_line, header)) = lines.first() else {
        return Err(parse_err(1, "missing header"));
    };
    let body = &lines[1..];
    match format {
        DictFormat::Jsonl => parse_jsonl(header_line, header, body),
        DictFormat::Tsv => parse_tsv(header_line, header, body),
    }
}

fn parse_jsonl(
    header_line: usize,
    header: &str,
    body: &[(usize, &str)],
) -> Result<BilingualDictionary, DictError> {
    let head: JsonHeader = serde_json::from_str(header)
        .map_err(|e| parse_err(header_line, format!("missing or bad header record: {e}")))?;
    let languages = LanguagePair::parse(&head.source_lang, &head.target_lang)
        .map_err(|e| parse_err(header_line, e.to_string()))?;
    let mut entries = Vec::with_capacity(body.len());
    for &(line, text) in body {
        let rec: JsonEntry =
            serde_json::from_str(text).map_err(|e| parse_err(line, e.to_string()))?;
        if rec.unit.trim().is_empty() {
            return Err(parse_err(line, "empty unit"));
        }
        if rec.senses.is_empty() {
            return Err(parse_err(
                line,
                format!("entry {:?} has no senses", rec.unit),
            ));
        }
        let entry = LexicalEntry::new(&rec.unit, &rec.senses)
            .map_err(|e| parse_err(line, e.to_string()))?
            .with_pos_tag(rec.pos)
            .with_notes(rec.notes);
        entries.push(entry);
    }
    Ok(BilingualDictionary::new(
        languages,
        entries,
        head.provenance,
    ))
}

/// `#source=XXX target=YYY` optionally followed by ` provenance=<free text>`.
fn parse_tsv_header(line: usize, header: &str) -> Result<(LanguagePair, String), DictError> {
    let bad = || parse_err(line, "missing header \"#source=XXX target=YYY\"");
    let rest = header.strip_prefix("#source=").ok_or_else(bad)?;
    let (source, rest) = rest.split_once(' ').ok_or_else(bad)?;
    let rest = rest.strip_prefix("target=").ok_or_else(bad)?;
    let (target, provenance) = match rest.split_once(' ') {
        Some((t, p)) => (
            t,
            p.strip_prefix("provenance=")
                .ok_or_else(|| parse_err(line, format!("unexpected header field {p:?}")))?,
        ),
        None => (rest, ""),
    };
    let languages =
        LanguagePair::parse(source, target).map_err(|e| parse_err(line, e.to_string()))?;
    Ok((languages, provenance.to_string()))
}

fn parse_tsv(
    header_line: usize,
    header: &str,
    body: &[(usize, &str)],
) -> Result<BilingualDictionary, DictError> {
    let (languages, provenance) = parse_tsv_header(header_line, header)?;
    let mut entries = Vec::with_capacity(body.len());
    for &(line, text) in body {
        // unit<TAB>senses[<TAB>pos[<TAB>notes]]
        let mut cols = text.split('\t');
        let unit = cols.next().unwrap_or_default();
        if unit.trim().is_empty() {
            return Err(parse_err(line, "empty unit"));
        }
        let senses: Vec<&str> = cols
            .next()
            .unwrap_or_default()
            .split('|')
            .filter(|s| !s.trim().is_empty())
            .collect();
        if senses.is_empty() {
            return Err(parse_err(
                line,
                format!("entry {:?} has no senses", unit.trim()),
            ));
        }
        let pos = cols.next().map(str::to_string);
        let notes = cols.next().map(str::to_string);
        if cols.next().is_some() {
            return Err(parse_err(line, "too many columns"));
        }
        let entry = LexicalEntry::new(unit, senses)
            .map_err(|e| parse_err(line, e.to_string()))?
            .with_pos_tag(pos)
            .with_notes(notes);
        entries.push(entry);
    }
    Ok(BilingualDictionary::new(languages, entries, provenance))
}

pub fn serialize_dictionary(
    dict: &BilingualDictionary,
    format: DictFormat,
) -> Result<Vec<u8>, DictError> {
    match format {
        DictFormat::Jsonl => Ok(to_jsonl(dict)),
        DictFormat::Tsv => to_tsv(dict),
    }
}

fn to_jsonl(dict: &BilingualDictionary) -> Vec<u8> {
    let mut out = Vec::new();
    let header = JsonHeader {
        source_lang: dict.source_lang().to_string(),
        target_lang: dict.target_lang().to_string(),
        provenance: dict.provenance.clone(),
    };
    // these structs always serialize
    serde_json::to_writer(&mut out, &header).expect("header serializes");
    out.push(b'\n');
    for e in &dict.entries {
        let rec = JsonEntry {
            unit: e.lexical_unit.clone(),
            senses: e.senses.clone(),
            pos: e.pos_tag.clone(),
            notes: e.notes.clone(),
        };
        serde_json::to_writer(&mut out, &rec).expect("entry serializes");
        out.push(b'\n');
    }
    out
}

fn to_tsv(dict: &BilingualDictionary) -> Result<Vec<u8>, DictError> {
    let reject = |what: &str, value: &str, why: &str| DictError::Unserializable {
        format: DictFormat::Tsv,
        message: format!("{what} {value:?} contains {why}"),
    };
    let check = |what: &str, value: &str, forbid_pipe: bool| -> Result<(), DictError> {
        if value.contains('\t') {
            return Err(reject(what, value, "a TAB"));
        }
        if value.contains('\n') || value.contains('\r') {
            return Err(reject(what, value, "a line break"));
        }
        if forbid_pipe && value.contains('|') {
            return Err(reject(what, value, "'|'"));
        }
        Ok(())
    };

    check("provenance", &dict.provenance, false)?;
    let mut out = format!(
        "#source={} target={}",
        dict.source_lang(),
        dict.target_lang()
    );
    if !dict.provenance.is_empty() {
        out.push_str(" provenance=");
        out.push_str(&dict.provenance);
    }
    out.push('\n');
    for e in &dict.entries {
        check("unit", &e.lexical_unit, false)?;
        for s in &e.senses {
            check("sense", s, true)?;
        }
        out.push_str(&e.lexical_unit);
        out.push('\t');
        out.push_str(&e.senses.join("|"));
        match (&e.pos_tag, &e.notes) {
            (None, None) => {}
            (pos, notes) => {
                let pos = pos.as_deref().unwrap_or("");
                check("pos tag", pos, false)?;
                out.push('\t');
                out.push_str(pos);
                if let Some(n) = notes {
                    check("notes", n, false)?;
                    out.push('\t');
                    out.push_str(n);
                }
            }
        }
        out.push('\n');
    }
    Ok(out.into_bytes())
}
