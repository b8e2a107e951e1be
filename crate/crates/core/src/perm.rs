//! Permutations in one-line form and words over an integer alphabet.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PermError {
    #[error("size mismatch: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },
    #[error("not a permutation of 1..={n}: {reason}")]
    NotBijection { n: usize, reason: String },
    #[error("cannot parse `{0}` as a list of positive integers")]
    Parse(String),
}

/// A permutation of `{1, ..., n}` stored as its image list:
/// `images[i - 1] = α(i)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Permutation(Vec<u32>);

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation((1..=n as u32).collect())
    }

    pub fn from_images(images: Vec<u32>) -> Result<Self, PermError> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in &images {
            if x == 0 || x as usize > n {
                return Err(PermError::NotBijection { n, reason: format!("image {x} out of range") });
            }
            if std::mem::replace(&mut seen[(x - 1) as usize], true) {
                return Err(PermError::NotBijection { n, reason: format!("image {x} repeated") });
            }
        }
        Ok(Permutation(images))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &x)| x as usize == i + 1)
    }

    /// `α(i)` for `1 <= i <= n`.
    pub fn apply(&self, i: u32) -> u32 {
        self.0[(i - 1) as usize]
    }

    pub fn images(&self) -> &[u32] {
        &self.0
    }

    /// `self ∘ other`, i.e. `i ↦ self(other(i))`.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation, PermError> {
        if self.len() != other.len() {
            return Err(PermError::SizeMismatch { left: self.len(), right: other.len() });
        }
        Ok(Permutation(other.0.iter().map(|&g| self.apply(g)).collect()))
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.len()];
        for (i, &x) in self.0.iter().enumerate() {
            inv[(x - 1) as usize] = i as u32 + 1;
        }
        Permutation(inv)
    }

    /// `str(α) = α(1) α(2) ... α(n)`.
    pub fn to_word(&self) -> Word {
        Word(self.0.clone())
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_spaced(f, &self.0)
    }
}

impl FromStr for Permutation {
    type Err = PermError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Permutation::from_images(parse_list(s)?)
    }
}

/// A finite word over the positive integers.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(Vec<u32>);

impl Word {
    pub fn new(symbols: Vec<u32>) -> Self {
        Word(symbols)
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn symbols(&self) -> &[u32] {
        &self.0
    }

    pub fn into_symbols(self) -> Vec<u32> {
        self.0
    }

    /// `Perm(w, α) = w_{α(1)} ... w_{α(n)}`.
    pub fn permute(&self, alpha: &Permutation) -> Result<Word, PermError> {
        if self.len() != alpha.len() {
            return Err(PermError::SizeMismatch { left: self.len(), right: alpha.len() });
        }
        Ok(Word(alpha.0.iter().map(|&a| self.0[(a - 1) as usize]).collect()))
    }

    /// Applies `f` to every symbol.
    pub fn map_symbols(&self, f: impl Fn(u32) -> u32) -> Word {
        Word(self.0.iter().map(|&x| f(x)).collect())
    }

    /// Reads the word as the one-line form of a permutation.
    pub fn to_permutation(&self) -> Result<Permutation, PermError> {
        Permutation::from_images(self.0.clone())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_spaced(f, &self.0)
    }
}

impl FromStr for Word {
    type Err = PermError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(Word(parse_list(s)?))
    }
}

impl From<Vec<u32>> for Word {
    fn from(v: Vec<u32>) -> Self {
        Word(v)
    }
}

fn write_spaced(f: &mut fmt::Formatter<'_>, items: &[u32]) -> fmt::Result {
    for (i, x) in items.iter().enumerate() {
        if i > 0 {
            f.write_str(" ")?;
        }
        write!(f, "{x}")?;
    }
    Ok(())
}

fn parse_list(s: &str) -> Result<Vec<u32>, PermError> {
    s.split_whitespace()
        .map(|t| match t.parse::<u32>() {
            Ok(x) if x > 0 => Ok(x),
            _ => Err(PermError::Parse(s.to_string())),
        })
        .collect()
}

/// All permutations of `{1..n}` in lexicographic order.
pub fn all_permutations(n: usize) -> Vec<Permutation> {
    let mut out = Vec::new();
    let mut cur: Vec<u32> = (1..=n as u32).collect();
    loop {
        out.push(Permutation(cur.clone()));
        // next lexicographic permutation
        let Some(i) = (1..cur.len()).rev().find(|&i| cur[i - 1] < cur[i]) else {
            break;
        };
        let j = (i..cur.len()).rev().find(|&j| cur[j] > cur[i - 1]).unwrap();
        cur.swap(i - 1, j);
        cur[i..].reverse();
    }
    out
}
