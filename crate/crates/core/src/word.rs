//! Decision vectors: finite words over the binary alphabet {0, 1}.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// A word over {0, 1}. Bit `b` at position `j` records the branch taken at
/// the `j`-th branching node of a path (`true` for the 1-successor).
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct DecisionVector(Vec<bool>);

impl DecisionVector {
    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        Self(bits)
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn push(&mut self, bit: bool) {
        self.0.push(bit);
    }

    pub fn prefix(&self, len: usize) -> Self {
        Self(self.0[..len].to_vec())
    }

    pub fn starts_with(&self, other: &DecisionVector) -> bool {
        self.0.starts_with(&other.0)
    }

    pub fn concat(&self, other: &DecisionVector) -> Self {
        let mut bits = self.0.clone();
        bits.extend_from_slice(&other.0);
        Self(bits)
    }

    pub fn with(&self, bit: bool) -> Self {
        let mut bits = self.0.clone();
        bits.push(bit);
        Self(bits)
    }

    /// All prefixes, shortest first, including λ and the word itself.
    pub fn prefixes(&self) -> impl Iterator<Item = DecisionVector> + '_ {
        (0..=self.0.len()).map(move |n| self.prefix(n))
    }

    /// Every word of length at most `max_len`, in shortlex order.
    pub fn enumerate_up_to(max_len: usize) -> impl Iterator<Item = DecisionVector> {
        (0..=max_len).flat_map(|len| {
            (0u64..(1u64 << len)).map(move |n| {
                DecisionVector((0..len).rev().map(|i| (n >> i) & 1 == 1).collect())
            })
        })
    }
}

/// Shortlex: shorter words first, ties broken lexicographically with 0 < 1.
impl Ord for DecisionVector {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for DecisionVector {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for DecisionVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("λ");
        }
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for DecisionVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() || s == "λ" || s == "eps" {
            return Ok(Self::empty());
        }
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::InvalidParameter(format!(
                    "`{other}` is not a binary symbol"
                ))),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Self)
    }
}

impl From<DecisionVector> for String {
    fn from(w: DecisionVector) -> Self {
        w.to_string()
    }
}

impl TryFrom<String> for DecisionVector {
    type Error = Error;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<&str> for DecisionVector {
    /// Panics on non-binary characters; intended for literals.
    fn from(s: &str) -> Self {
        s.parse().expect("binary word literal")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_and_parse() {
        assert_eq!(DecisionVector::empty().to_string(), "λ");
        let w: DecisionVector = "0110".into();
        assert_eq!(w.to_string(), "0110");
        assert_eq!("λ".parse::<DecisionVector>().unwrap(), DecisionVector::empty());
        assert!("012".parse::<DecisionVector>().is_err());
    }

    #[test]
    fn shortlex_order() {
        let mut words: Vec<DecisionVector> = ["10", "0", "", "1", "00", "111"]
            .iter()
            .map(|&s| s.into())
            .collect();
        words.sort();
        let shown: Vec<String> = words.iter().map(|w| w.to_string()).collect();
        assert_eq!(shown, ["λ", "0", "1", "00", "10", "111"]);
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(DecisionVector::enumerate_up_to(0).count(), 1);
        assert_eq!(DecisionVector::enumerate_up_to(3).count(), 15);
        let words: Vec<_> = DecisionVector::enumerate_up_to(10).collect();
        assert!(words.windows(2).all(|p| p[0] < p[1]));
    }
}
