//! Bounded two's-complement integers and input valuations.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Machine integer width `W`. All program values are signed `W`-bit integers
/// with wraparound arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BitWidth(u32);

impl BitWidth {
    pub const DEFAULT: BitWidth = BitWidth(16);

    pub fn new(bits: u32) -> Result<Self> {
        if (2..=32).contains(&bits) {
            Ok(Self(bits))
        } else {
            Err(Error::InvalidParameter(format!(
                "bit width must be between 2 and 32, got {bits}"
            )))
        }
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn min(self) -> i64 {
        -(1i64 << (self.0 - 1))
    }

    pub fn max(self) -> i64 {
        (1i64 << (self.0 - 1)) - 1
    }

    /// `2^W`.
    pub fn modulus(self) -> i64 {
        1i64 << self.0
    }

    /// Reduce an arbitrary integer to its signed `W`-bit representative.
    pub fn wrap(self, v: i64) -> i64 {
        let shift = 64 - self.0;
        (v << shift) >> shift
    }

    pub fn wrap_i128(self, v: i128) -> i64 {
        let m = 1i128 << self.0;
        let r = v.rem_euclid(m) as i64;
        self.wrap(r)
    }

    pub fn contains(self, v: i64) -> bool {
        (self.min()..=self.max()).contains(&v)
    }
}

impl Default for BitWidth {
    fn default() -> Self {
        Self::DEFAULT
    }
}

impl fmt::Display for BitWidth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Values of a program's input variables, indexed by input id. Missing
/// entries read as 0.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Valuation(Vec<i64>);

impl Valuation {
    pub fn new(values: Vec<i64>) -> Self {
        Self(values)
    }

    pub fn zeros(len: usize) -> Self {
        Self(vec![0; len])
    }

    pub fn get(&self, input: usize) -> i64 {
        self.0.get(input).copied().unwrap_or(0)
    }

    pub fn set(&mut self, input: usize, value: i64) {
        if self.0.len() <= input {
            self.0.resize(input + 1, 0);
        }
        self.0[input] = value;
    }

    pub fn values(&self) -> &[i64] {
        &self.0
    }

    pub fn fits(&self, width: BitWidth) -> bool {
        self.0.iter().all(|&v| width.contains(v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wraparound() {
        let w = BitWidth::new(8).unwrap();
        assert_eq!(w.min(), -128);
        assert_eq!(w.max(), 127);
        assert_eq!(w.wrap(128), -128);
        assert_eq!(w.wrap(-129), 127);
        assert_eq!(w.wrap(256 + 5), 5);
        assert_eq!(w.wrap_i128(-(1 << 70) + 3), 3);
        assert!(BitWidth::new(1).is_err());
        assert!(BitWidth::new(33).is_err());
    }

    #[test]
    fn missing_inputs_read_as_zero() {
        let mut v = Valuation::default();
        assert_eq!(v.get(3), 0);
        v.set(2, -7);
        assert_eq!(v.values(), &[0, 0, -7]);
    }
}
