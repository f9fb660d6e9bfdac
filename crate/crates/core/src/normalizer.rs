//! Tweet normalization.
//!
//! A raw tweet goes through a fixed sequence of text-level rewrites (case
//! folding, dot and whitespace cleanup, retweet markers, URLs, mentions,
//! emoticons, hashtags) and is then split on whitespace, after which every
//! word is cleaned individually. URLs, mentions and emoticons are replaced by
//! the uppercase placeholders of [`SpecialToken`], which survive the word
//! level cleanup untouched.

use std::collections::BTreeSet;
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;
use std::sync::OnceLock;

use regex::Regex;
use thiserror::Error;

const DEFAULT_POSITIVE: &str = include_str!("../data/emoticons_pos.txt");
const DEFAULT_NEGATIVE: &str = include_str!("../data/emoticons_neg.txt");

/// Characters trimmed from both ends of every word.
const WORD_PUNCTUATION: &[char] = &['\'', '?', '!', '.', ',', '(', ')'];

/// Placeholder tokens inserted in place of URLs, mentions and emoticons.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SpecialToken {
    Url,
    UserMention,
    EmoPos,
    EmoNeg,
}

impl SpecialToken {
    pub const ALL: [SpecialToken; 4] = [
        SpecialToken::Url,
        SpecialToken::UserMention,
        SpecialToken::EmoPos,
        SpecialToken::EmoNeg,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SpecialToken::Url => "URL",
            SpecialToken::UserMention => "USER_MENTION",
            SpecialToken::EmoPos => "EMO_POS",
            SpecialToken::EmoNeg => "EMO_NEG",
        }
    }

    /// Recognizes the rendered form of a placeholder.
    pub fn parse(token: &str) -> Option<SpecialToken> {
        SpecialToken::ALL.into_iter().find(|t| t.as_str() == token)
    }
}

impl fmt::Display for SpecialToken {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Error raised while loading an emoticon table.
#[derive(Debug, Error)]
pub enum EmoticonTableError {
    #[error("emoticon table has no {0} forms")]
    Empty(&'static str),
    #[error("emoticon `{0}` is listed as both positive and negative")]
    Overlap(String),
    #[error("cannot read emoticon table {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Literal emoticon forms mapped to `EMO_POS` / `EMO_NEG`.
///
/// Forms are stored lowercased since matching runs on lowercased text.
#[derive(Debug, Clone)]
pub struct EmoticonTable {
    positive: BTreeSet<String>,
    negative: BTreeSet<String>,
    pattern: Regex,
}

impl EmoticonTable {
    pub fn new<P, N>(positive: P, negative: N) -> Result<Self, EmoticonTableError>
    where
        P: IntoIterator,
        P::Item: AsRef<str>,
        N: IntoIterator,
        N::Item: AsRef<str>,
    {
        let collect = |forms: Vec<String>| -> BTreeSet<String> {
            forms
                .into_iter()
                .map(|f| f.to_lowercase())
                .filter(|f| !f.is_empty())
                .collect()
        };
        let positive = collect(positive.into_iter().map(|s| s.as_ref().to_string()).collect());
        let negative = collect(negative.into_iter().map(|s| s.as_ref().to_string()).collect());
        if positive.is_empty() {
            return Err(EmoticonTableError::Empty("positive"));
        }
        if negative.is_empty() {
            return Err(EmoticonTableError::Empty("negative"));
        }
        if let Some(form) = positive.intersection(&negative).next() {
            return Err(EmoticonTableError::Overlap(form.clone()));
        }

        let mut forms: Vec<&String> = positive.iter().chain(negative.iter()).collect();
        // Leftmost-first alternation: longer forms must come first.
        forms.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
        let alternation = forms
            .iter()
            .map(|form| {
                let starts_word = form.chars().next().is_some_and(is_word_char);
                let ends_word = form.chars().last().is_some_and(is_word_char);
                format!(
                    "{}{}{}",
                    if starts_word { r"\b" } else { "" },
                    regex::escape(form),
                    if ends_word { r"\b" } else { "" }
                )
            })
            .collect::<Vec<_>>()
            .join("|");
        let pattern = Regex::new(&alternation).expect("escaped emoticon alternation is valid");

        Ok(EmoticonTable {
            positive,
            negative,
            pattern,
        })
    }

    /// Parses the one-form-per-line table format; `#` starts a comment line.
    pub fn parse(positive: &str, negative: &str) -> Result<Self, EmoticonTableError> {
        EmoticonTable::new(table_lines(positive), table_lines(negative))
    }

    pub fn load(positive: &Path, negative: &Path) -> Result<Self, EmoticonTableError> {
        let read = |path: &Path| {
            fs::read_to_string(path).map_err(|source| EmoticonTableError::Io {
                path: path.display().to_string(),
                source,
            })
        };
        EmoticonTable::parse(&read(positive)?, &read(negative)?)
    }

    pub fn positive_forms(&self) -> impl Iterator<Item = &str> {
        self.positive.iter().map(String::as_str)
    }

    pub fn negative_forms(&self) -> impl Iterator<Item = &str> {
        self.negative.iter().map(String::as_str)
    }

    fn kind_of(&self, form: &str) -> Option<SpecialToken> {
        if self.positive.contains(form) {
            Some(SpecialToken::EmoPos)
        } else if self.negative.contains(form) {
            Some(SpecialToken::EmoNeg)
        } else {
            None
        }
    }
}

impl Default for EmoticonTable {
    /// Smile, laugh, wink and love forms are positive; sad and cry are negative.
    fn default() -> Self {
        EmoticonTable::parse(DEFAULT_POSITIVE, DEFAULT_NEGATIVE)
            .expect("bundled emoticon tables are well formed")
    }
}

fn table_lines(text: &str) -> Vec<String> {
    text.lines()
        .filter(|line| !line.trim_start().starts_with('#'))
        .map(|line| line.trim_end_matches(['\r', '\n']).trim().to_string())
        .filter(|line| !line.is_empty())
        .collect()
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

/// A single token of a normalized tweet.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Token {
    Special(SpecialToken),
    Word(String),
}

impl Token {
    pub fn as_str(&self) -> &str {
        match self {
            Token::Special(s) => s.as_str(),
            Token::Word(w) => w,
        }
    }

    pub fn special(&self) -> Option<SpecialToken> {
        match self {
            Token::Special(s) => Some(*s),
            Token::Word(_) => None,
        }
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Canonical token sequence of one tweet.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct NormalizedTweet {
    tokens: Vec<Token>,
}

impl NormalizedTweet {
    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Rendered token strings, in order.
    pub fn terms(&self) -> impl Iterator<Item = &str> {
        self.tokens.iter().map(Token::as_str)
    }

    pub fn count_special(&self, kind: SpecialToken) -> usize {
        self.tokens
            .iter()
            .filter(|t| t.special() == Some(kind))
            .count()
    }
}

impl fmt::Display for NormalizedTweet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, token) in self.tokens.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            f.write_str(token.as_str())?;
        }
        Ok(())
    }
}

/// Error for token lists that violate the normalized-tweet invariants.
#[derive(Debug, Error, PartialEq, Eq)]
#[error("`{0}` is not a valid normalized token")]
pub struct InvalidToken(pub String);

impl FromStr for NormalizedTweet {
    type Err = InvalidToken;

    /// Reads back the space-joined form produced by `Display`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let tokens = s
            .split_whitespace()
            .map(|raw| match SpecialToken::parse(raw) {
                Some(special) => Ok(Token::Special(special)),
                None if is_valid_word(raw)
                    && !raw.chars().any(|c| c.is_uppercase())
                    && !has_letter_run(raw, 3) =>
                {
                    Ok(Token::Word(raw.to_string()))
                }
                None => Err(InvalidToken(raw.to_string())),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(NormalizedTweet { tokens })
    }
}

fn has_letter_run(word: &str, len: usize) -> bool {
    let mut run = 0;
    let mut prev = None;
    for c in word.chars() {
        if Some(c) == prev && c.is_alphabetic() {
            run += 1;
        } else {
            run = 1;
        }
        if run >= len && c.is_alphabetic() {
            return true;
        }
        prev = Some(c);
    }
    false
}

macro_rules! static_regex {
    ($name:ident, $re:expr) => {
        fn $name() -> &'static Regex {
            static RE: OnceLock<Regex> = OnceLock::new();
            RE.get_or_init(|| Regex::new($re).unwrap())
        }
    };
}

static_regex!(url_re, r"(www\.\S+)|(https?://\S+)");
static_regex!(mention_re, r"(^|\s)@\S+");
static_regex!(hashtag_re, r"#(\S+)");
static_regex!(retweet_re, r"\brt\b");
static_regex!(dots_re, r"\.{2,}");
static_regex!(spaces_re, r"\s+");

pub fn replace_urls(text: &str) -> String {
    url_re()
        .replace_all(text, SpecialToken::Url.as_str())
        .into_owned()
}

/// Replaces `@handle` with `USER_MENTION` when the `@` starts a token.
pub fn replace_user_mentions(text: &str) -> String {
    mention_re()
        .replace_all(text, |caps: &regex::Captures| {
            format!("{}{}", &caps[1], SpecialToken::UserMention.as_str())
        })
        .into_owned()
}

/// Replaces each emoticon occurrence with a space-padded `EMO_POS` or `EMO_NEG`.
pub fn replace_emoticons(text: &str, emoticons: &EmoticonTable) -> String {
    emoticons
        .pattern
        .replace_all(text, |caps: &regex::Captures| {
            let kind = emoticons
                .kind_of(&caps[0])
                .expect("pattern only matches table forms");
            format!(" {kind} ")
        })
        .into_owned()
}

pub fn replace_hashtags(text: &str) -> String {
    hashtag_re().replace_all(text, "$1").into_owned()
}

/// Removes standalone `rt`. Expects lowercased input.
pub fn remove_retweet_markers(text: &str) -> String {
    retweet_re().replace_all(text, "").into_owned()
}

/// A valid word starts with an ASCII letter followed by ASCII letters,
/// digits, `.` or `_`.
pub fn is_valid_word(word: &str) -> bool {
    let mut chars = word.chars();
    match chars.next() {
        Some(first) if first.is_ascii_alphabetic() => {
            chars.all(|c| c.is_ascii_alphanumeric() || c == '.' || c == '_')
        }
        _ => false,
    }
}

/// Compresses every run of three or more identical letters to two.
fn squeeze_letter_runs(word: &str) -> String {
    let mut out = String::with_capacity(word.len());
    let mut prev = None;
    let mut run = 0usize;
    for c in word.chars() {
        if Some(c) == prev {
            run += 1;
        } else {
            run = 1;
            prev = Some(c);
        }
        if run <= 2 || !c.is_alphabetic() {
            out.push(c);
        }
    }
    out
}

/// Cleans a single whitespace-free word, returning `None` if nothing valid
/// remains.
///
/// Edge punctuation is stripped again after `-`/`'` removal and run
/// compression, so that neither step can expose punctuation at an end or
/// join two letter runs into a triple.
pub fn normalize_word(word: &str) -> Option<String> {
    let stripped = word.trim_matches(WORD_PUNCTUATION);
    let joined: String = stripped.chars().filter(|&c| c != '-' && c != '\'').collect();
    let squeezed = squeeze_letter_runs(&joined);
    let cleaned = squeezed.trim_matches(WORD_PUNCTUATION);
    is_valid_word(cleaned).then(|| cleaned.to_string())
}

/// Runs the text-level rewrites, in order, and returns the rewritten text.
pub fn preprocess_text(raw: &str, emoticons: &EmoticonTable) -> String {
    let text = raw.to_lowercase();
    let text = dots_re().replace_all(&text, " ");
    let text = text.trim_matches([' ', '"', '\'']);
    let text = spaces_re().replace_all(text, " ");
    let text = remove_retweet_markers(&text);
    let text = replace_urls(&text);
    let text = replace_user_mentions(&text);
    let text = replace_emoticons(&text, emoticons);
    replace_hashtags(&text)
}

pub fn normalize_tweet(raw: &str, emoticons: &EmoticonTable) -> NormalizedTweet {
    let text = preprocess_text(raw, emoticons);
    let tokens = text
        .split_whitespace()
        .filter_map(|word| match SpecialToken::parse(word) {
            Some(special) => Some(Token::Special(special)),
            None => normalize_word(word).map(Token::Word),
        })
        .collect();
    NormalizedTweet { tokens }
}

/// Reusable normalizer bound to one emoticon table.
#[derive(Debug, Clone, Default)]
pub struct Normalizer {
    emoticons: EmoticonTable,
}

impl Normalizer {
    pub fn new(emoticons: EmoticonTable) -> Self {
        Normalizer { emoticons }
    }

    pub fn emoticons(&self) -> &EmoticonTable {
        &self.emoticons
    }

    pub fn normalize(&self, raw: &str) -> NormalizedTweet {
        normalize_tweet(raw, &self.emoticons)
    }
}
