//! Reverse bilingual dictionary generation.
//!
//! Given a dictionary from some language into English, build the English to
//! that-language dictionary, optionally widened with WordNet: by hypernym
//! distance between senses ([`reversal::drwd`]) or by overlap of their
//! synonym/hyponym/hypernym neighbourhoods ([`reversal::drws`]).

pub mod dict;
pub mod eval;
pub mod reversal;
pub mod similarity;
pub mod wordnet;

pub use dict::{BilingualDictionary, DictFormat, LangCode, LanguagePair, LexicalEntry};
pub use reversal::{reverse, Algorithm, ReversalConfig, ReversalReport};
pub use wordnet::{load_wordnet, Pos, Synset, SynsetId, WordnetStore};

/// Environment variable consulted when no WordNet directory is given.
pub const WORDNET_DIR_ENV: &str = "LEXIREVERSE_WORDNET_DIR";
