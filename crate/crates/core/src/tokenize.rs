//! Raw text to lemma-grouped token streams.
//!
//! Words are maximal runs of Unicode letters and digits after full case
//! folding and NFC normalization. Everything else is a boundary, which means
//! punctuation is dropped, hyphenated compounds split in two and contractions
//! split at the apostrophe ("don't" becomes `don`, `t`). A bare `s` that
//! follows an apostrophe is dropped altogether, so both the possessive and the
//! "is" contraction vanish: "the dog's bone" becomes `the`, `dog`, `bone`.

use std::borrow::Cow;
use std::fmt;
use std::str::FromStr;

use rust_stemmers::{Algorithm, Stemmer};
use serde::{Deserialize, Serialize};
use unicode_normalization::UnicodeNormalization;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    /// The word as it appeared, case folded.
    pub surface: String,
    /// Canonical form; one network vertex per distinct lemma.
    pub lemma: String,
    /// 0-based word index in the stream.
    pub position: usize,
}

/// Ordered tokens of one text sample. Positions are always `0..n_words`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenStream {
    source_id: String,
    tokens: Vec<Token>,
}

impl TokenStream {
    /// Builds a stream from `(surface, lemma)` pairs, numbering positions from 0.
    pub fn from_pairs<I, S, L>(source_id: impl Into<String>, pairs: I) -> Self
    where
        I: IntoIterator<Item = (S, L)>,
        S: Into<String>,
        L: Into<String>,
    {
        let tokens = pairs
            .into_iter()
            .enumerate()
            .map(|(position, (surface, lemma))| Token {
                surface: surface.into(),
                lemma: lemma.into(),
                position,
            })
            .collect();
        TokenStream {
            source_id: source_id.into(),
            tokens,
        }
    }

    /// A stream whose lemmas are the given words verbatim.
    pub fn from_lemmas<I, S>(source_id: impl Into<String>, lemmas: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self::from_pairs(
            source_id,
            lemmas.into_iter().map(|l| {
                let l = l.into();
                (l.clone(), l)
            }),
        )
    }

    pub fn source_id(&self) -> &str {
        &self.source_id
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    /// `N_words`.
    pub fn n_words(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn lemmas(&self) -> impl Iterator<Item = &str> + '_ {
        self.tokens.iter().map(|t| t.lemma.as_str())
    }

    pub fn n_unique_lemmas(&self) -> usize {
        let mut lemmas: Vec<&str> = self.lemmas().collect();
        lemmas.sort_unstable();
        lemmas.dedup();
        lemmas.len()
    }

    /// Contiguous sub-stream `[start, start + length)` with positions re-indexed from 0.
    pub fn window(&self, start: usize, length: usize) -> Result<TokenStream> {
        let end = start.checked_add(length);
        match end {
            Some(end) if length >= 1 && end <= self.tokens.len() => Ok(Self::from_pairs(
                self.source_id.clone(),
                self.tokens[start..end]
                    .iter()
                    .map(|t| (t.surface.clone(), t.lemma.clone())),
            )),
            _ => Err(Error::WindowOutOfRange {
                start,
                length,
                available: self.tokens.len(),
            }),
        }
    }
}

fn is_apostrophe(c: char) -> bool {
    matches!(c, '\'' | '\u{2019}' | '\u{02BC}' | '\u{FF07}')
}

/// Splits raw text into case-folded surface words.
pub fn tokenize(text: &str) -> Vec<String> {
    let folded: String = caseless::default_case_fold_str(text).nfc().collect();
    let mut words = Vec::new();
    let mut current = String::new();
    let mut current_after_apostrophe = false;
    let mut prev_apostrophe = false;

    let mut flush = |current: &mut String, after_apostrophe: bool| {
        if current.is_empty() {
            return;
        }
        let word = std::mem::take(current);
        if !(after_apostrophe && word == "s") {
            words.push(word);
        }
    };

    for c in folded.chars() {
        if c.is_alphanumeric() {
            if current.is_empty() {
                current_after_apostrophe = prev_apostrophe;
            }
            current.push(c);
            prev_apostrophe = false;
        } else {
            flush(&mut current, current_after_apostrophe);
            prev_apostrophe = is_apostrophe(c);
        }
    }
    flush(&mut current, current_after_apostrophe);
    words
}

/// Maps a surface word to the lemma that names its vertex.
pub trait Lemmatizer: Send + Sync {
    fn lemmatize(&self, word: &str) -> String;

    fn kind(&self) -> LemmatizerKind;
}

/// Exact-match grouping: every distinct surface form is its own vertex.
#[derive(Debug, Clone, Copy, Default)]
pub struct IdentityLemmatizer;

impl Lemmatizer for IdentityLemmatizer {
    fn lemmatize(&self, word: &str) -> String {
        word.to_owned()
    }

    fn kind(&self) -> LemmatizerKind {
        LemmatizerKind::Identity
    }
}

/// Snowball English suffix stripping, preceded by a table of irregular
/// inflections ("eaten" → "eat", "went" → "go") that no suffix rule reaches.
///
/// The composition is iterated to a fixed point, which makes it idempotent.
pub struct StemLemmatizer {
    stemmer: Stemmer,
}

impl Default for StemLemmatizer {
    fn default() -> Self {
        StemLemmatizer {
            stemmer: Stemmer::create(Algorithm::English),
        }
    }
}

impl fmt::Debug for StemLemmatizer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("StemLemmatizer(english)")
    }
}

const MAX_FIXPOINT_ROUNDS: usize = 16;

impl StemLemmatizer {
    fn step<'a>(&self, word: &'a str) -> Cow<'a, str> {
        let base = irregular_base(word).unwrap_or(word);
        let stem = self.stemmer.stem(base);
        if stem.is_empty() {
            Cow::Borrowed(base)
        } else {
            Cow::Owned(stem.into_owned())
        }
    }
}

impl Lemmatizer for StemLemmatizer {
    fn lemmatize(&self, word: &str) -> String {
        let mut seen: Vec<String> = vec![word.to_owned()];
        for _ in 0..MAX_FIXPOINT_ROUNDS {
            let current = seen.last().expect("non-empty");
            let next = self.step(current).into_owned();
            if &next == current {
                return next;
            }
            if let Some(at) = seen.iter().position(|s| *s == next) {
                // cycle: every entry point settles on its smallest member
                return seen[at..].iter().min().expect("non-empty cycle").clone();
            }
            seen.push(next);
        }
        seen.pop().expect("non-empty")
    }

    fn kind(&self) -> LemmatizerKind {
        LemmatizerKind::Stemmer
    }
}

/// Irregular inflections → base form. Kept to forms that are not also
/// common words in their own right ("saw", "left", "felt" are absent).
const IRREGULAR: &[(&str, &str)] = &[
    ("am", "be"),
    ("are", "be"),
    ("ate", "eat"),
    ("been", "be"),
    ("began", "begin"),
    ("begun", "begin"),
    ("bitten", "bite"),
    ("blew", "blow"),
    ("blown", "blow"),
    ("bought", "buy"),
    ("broken", "break"),
    ("brought", "bring"),
    ("built", "build"),
    ("caught", "catch"),
    ("children", "child"),
    ("chose", "choose"),
    ("chosen", "choose"),
    ("did", "do"),
    ("does", "do"),
    ("done", "do"),
    ("drank", "drink"),
    ("drawn", "draw"),
    ("drew", "draw"),
    ("driven", "drive"),
    ("drove", "drive"),
    ("eaten", "eat"),
    ("fallen", "fall"),
    ("feet", "foot"),
    ("flew", "fly"),
    ("flown", "fly"),
    ("forgot", "forget"),
    ("forgotten", "forget"),
    ("fought", "fight"),
    ("froze", "freeze"),
    ("frozen", "freeze"),
    ("gave", "give"),
    ("geese", "goose"),
    ("given", "give"),
    ("gone", "go"),
    ("grew", "grow"),
    ("grown", "grow"),
    ("had", "have"),
    ("has", "have"),
    ("hidden", "hide"),
    ("is", "be"),
    ("knew", "know"),
    ("known", "know"),
    ("men", "man"),
    ("mice", "mouse"),
    ("ran", "run"),
    ("rang", "ring"),
    ("ridden", "ride"),
    ("risen", "rise"),
    ("rode", "ride"),
    ("rung", "ring"),
    ("said", "say"),
    ("sang", "sing"),
    ("seen", "see"),
    ("shaken", "shake"),
    ("shook", "shake"),
    ("sold", "sell"),
    ("sought", "seek"),
    ("spoke", "speak"),
    ("spoken", "speak"),
    ("stole", "steal"),
    ("stolen", "steal"),
    ("sung", "sing"),
    ("swam", "swim"),
    ("swum", "swim"),
    ("taken", "take"),
    ("taught", "teach"),
    ("teeth", "tooth"),
    ("thought", "think"),
    ("threw", "throw"),
    ("thrown", "throw"),
    ("told", "tell"),
    ("took", "take"),
    ("was", "be"),
    ("went", "go"),
    ("were", "be"),
    ("woke", "wake"),
    ("woken", "wake"),
    ("women", "woman"),
    ("won", "win"),
    ("wore", "wear"),
    ("worn", "wear"),
    ("written", "write"),
    ("wrote", "write"),
];

fn irregular_base(word: &str) -> Option<&'static str> {
    IRREGULAR
        .binary_search_by(|(form, _)| (*form).cmp(word))
        .ok()
        .map(|i| IRREGULAR[i].1)
}

/// Lemma of a single word under the default (stemming) lemmatizer.
pub fn lemmatize(word: &str) -> String {
    StemLemmatizer::default().lemmatize(word)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LemmatizerKind {
    #[default]
    Stemmer,
    Identity,
}

impl LemmatizerKind {
    pub fn build(self) -> Box<dyn Lemmatizer> {
        match self {
            LemmatizerKind::Stemmer => Box::new(StemLemmatizer::default()),
            LemmatizerKind::Identity => Box::new(IdentityLemmatizer),
        }
    }
}

impl fmt::Display for LemmatizerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LemmatizerKind::Stemmer => "stemmer",
            LemmatizerKind::Identity => "identity",
        })
    }
}

impl FromStr for LemmatizerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "stemmer" => Ok(LemmatizerKind::Stemmer),
            "identity" => Ok(LemmatizerKind::Identity),
            other => Err(Error::InvalidParameter(format!(
                "lemmatizer must be stemmer|identity, got {other:?}"
            ))),
        }
    }
}

/// Tokenizes and lemmatizes `text` into a stream.
pub fn make_stream(
    text: &str,
    source_id: impl Into<String>,
    lemmatizer: &dyn Lemmatizer,
) -> TokenStream {
    TokenStream::from_pairs(
        source_id,
        tokenize(text).into_iter().map(|surface| {
            let lemma = lemmatizer.lemmatize(&surface);
            (surface, lemma)
        }),
    )
}
