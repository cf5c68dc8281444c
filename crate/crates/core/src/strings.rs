//! Exact string primitives: border array, smallest period, suffix/prefix
//! overlap and the non-overlapping prefix length.
//!
//! All functions work on raw byte slices. Validation (alphabet, case,
//! non-emptiness) happens once when a [`Sequence`] is constructed; the
//! checked free functions only reject empty input.

use std::fmt;

use serde::Serialize;

use crate::error::{Result, SspError};

/// Symbol set a [`Sequence`] is validated against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Alphabet {
    /// `A`, `C`, `G`, `T`.
    Dna,
    /// The 26 upper-case Latin letters.
    Protein,
    /// Any printable, non-whitespace ASCII byte.
    #[default]
    Any,
}

impl Alphabet {
    pub fn contains(self, b: u8) -> bool {
        match self {
            Alphabet::Dna => matches!(b, b'A' | b'C' | b'G' | b'T'),
            Alphabet::Protein => b.is_ascii_uppercase(),
            Alphabet::Any => b.is_ascii_graphic(),
        }
    }
}

impl std::str::FromStr for Alphabet {
    type Err = SspError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dna" => Ok(Alphabet::Dna),
            "protein" => Ok(Alphabet::Protein),
            "any" => Ok(Alphabet::Any),
            other => Err(SspError::Argument(format!("unknown alphabet `{other}`"))),
        }
    }
}

/// A validated, upper-cased, non-empty string of symbols.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(into = "String")]
pub struct Sequence(Vec<u8>);

impl Sequence {
    /// Upper-cases `raw` and checks every symbol against `alphabet`.
    pub fn new(raw: &[u8], alphabet: Alphabet) -> Result<Self> {
        if raw.is_empty() {
            return Err(SspError::Input("empty sequence".into()));
        }
        let symbols = raw.to_ascii_uppercase();
        if let Some(pos) = symbols.iter().position(|&b| !alphabet.contains(b)) {
            return Err(SspError::Input(format!(
                "symbol {:?} at offset {pos} is outside the {alphabet:?} alphabet",
                symbols[pos] as char
            )));
        }
        Ok(Sequence(symbols))
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn border_array(&self) -> Vec<usize> {
        border_array_unchecked(&self.0)
    }

    pub fn smallest_period(&self) -> usize {
        smallest_period_unchecked(&self.0)
    }

    pub(crate) fn from_vec_unchecked(v: Vec<u8>) -> Self {
        debug_assert!(!v.is_empty());
        Sequence(v)
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.0
    }
}

impl AsRef<[u8]> for Sequence {
    fn as_ref(&self) -> &[u8] {
        &self.0
    }
}

impl fmt::Display for Sequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&String::from_utf8_lossy(&self.0))
    }
}

impl fmt::Debug for Sequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Sequence({self})")
    }
}

impl From<Sequence> for String {
    fn from(s: Sequence) -> String {
        s.to_string()
    }
}

fn non_empty(s: &[u8]) -> Result<()> {
    if s.is_empty() {
        Err(SspError::Input("empty sequence".into()))
    } else {
        Ok(())
    }
}

/// Entry `k` (0-based) is the length of the longest proper border of `s[..=k]`.
pub fn border_array(s: &[u8]) -> Result<Vec<usize>> {
    non_empty(s)?;
    Ok(border_array_unchecked(s))
}

pub(crate) fn border_array_unchecked(s: &[u8]) -> Vec<usize> {
    let mut border = vec![0usize; s.len()];
    let mut k = 0;
    for i in 1..s.len() {
        while k > 0 && s[k] != s[i] {
            k = border[k - 1];
        }
        if s[k] == s[i] {
            k += 1;
        }
        border[i] = k;
    }
    border
}

/// Least `p` with `s[i] == s[i + p]` for every valid `i`.
pub fn smallest_period(s: &[u8]) -> Result<usize> {
    non_empty(s)?;
    Ok(smallest_period_unchecked(s))
}

pub(crate) fn smallest_period_unchecked(s: &[u8]) -> usize {
    s.len() - border_array_unchecked(s)[s.len() - 1]
}

/// Length of the longest suffix of `u` that is also a prefix of `v`.
pub fn overlap(u: &[u8], v: &[u8]) -> Result<usize> {
    non_empty(u)?;
    non_empty(v)?;
    Ok(overlap_unchecked(u, v))
}

/// Runs the failure function of `v` over the tail of `u`; the final match
/// length is the overlap.
pub(crate) fn overlap_unchecked(u: &[u8], v: &[u8]) -> usize {
    let k = u.len().min(v.len());
    let pattern = &v[..k];
    let border = border_array_unchecked(pattern);
    let mut matched = 0;
    for &b in &u[u.len() - k..] {
        while matched > 0 && (matched == k || pattern[matched] != b) {
            matched = border[matched - 1];
        }
        if pattern[matched] == b {
            matched += 1;
        }
    }
    matched
}

/// `|pref(u, v)| = |u| - |ov(u, v)|`.
pub fn prefix_len(u: &[u8], v: &[u8]) -> Result<usize> {
    Ok(u.len() - overlap(u, v)?)
}

/// The part of `u` preceding its overlap with `v`.
pub fn prefix<'a>(u: &'a [u8], v: &[u8]) -> Result<&'a [u8]> {
    Ok(&u[..prefix_len(u, v)?])
}
