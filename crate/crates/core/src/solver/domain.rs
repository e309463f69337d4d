//! Finite integer domains as sorted lists of disjoint closed intervals.

use crate::value::BitWidth;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Domain(Vec<(i64, i64)>);

impl Domain {
    pub fn full(w: BitWidth) -> Self {
        Self(vec![(w.min(), w.max())])
    }

    pub fn single(v: i64) -> Self {
        Self(vec![(v, v)])
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    /// Builds a normalized domain from arbitrary intervals.
    pub fn from_intervals(mut ivs: Vec<(i64, i64)>) -> Self {
        ivs.retain(|(a, b)| a <= b);
        ivs.sort_unstable();
        let mut out: Vec<(i64, i64)> = Vec::with_capacity(ivs.len());
        for (a, b) in ivs {
            match out.last_mut() {
                Some(last) if a <= last.1.saturating_add(1) => last.1 = last.1.max(b),
                _ => out.push((a, b)),
            }
        }
        Self(out)
    }

    pub fn intervals(&self) -> &[(i64, i64)] {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn singleton(&self) -> Option<i64> {
        match self.0.as_slice() {
            [(a, b)] if a == b => Some(*a),
            _ => None,
        }
    }

    /// Smallest and largest member. Panics on an empty domain.
    pub fn hull(&self) -> (i64, i64) {
        (self.0[0].0, self.0[self.0.len() - 1].1)
    }

    pub fn size(&self) -> u64 {
        self.0.iter().map(|(a, b)| (b - a) as u64 + 1).sum()
    }

    pub fn contains(&self, v: i64) -> bool {
        let i = self.0.partition_point(|&(_, b)| b < v);
        i < self.0.len() && self.0[i].0 <= v
    }

    pub fn intersect(&self, other: &Domain) -> Domain {
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < self.0.len() && j < other.0.len() {
            let (a1, b1) = self.0[i];
            let (a2, b2) = other.0[j];
            let (lo, hi) = (a1.max(a2), b1.min(b2));
            if lo <= hi {
                out.push((lo, hi));
            }
            if b1 < b2 {
                i += 1;
            } else {
                j += 1;
            }
        }
        Domain(out)
    }

    pub fn restrict(&self, lo: i64, hi: i64) -> Domain {
        self.intersect(&Domain(vec![(lo, hi)]))
    }

    /// Smallest member `>= v`.
    fn next_ge(&self, v: i64) -> Option<i64> {
        let i = self.0.partition_point(|&(_, b)| b < v);
        self.0.get(i).map(|&(a, _)| a.max(v))
    }

    /// Largest member `<= v`.
    fn next_le(&self, v: i64) -> Option<i64> {
        let i = self.0.partition_point(|&(a, _)| a <= v);
        if i == 0 {
            None
        } else {
            Some(self.0[i - 1].1.min(v))
        }
    }

    /// Members ordered by magnitude, non-negative before negative on ties:
    /// `0, 1, -1, 2, -2, ...` restricted to the domain.
    pub fn preferred_order(&self) -> PreferredOrder<'_> {
        PreferredOrder {
            dom: self,
            pos: self.next_ge(0),
            neg: self.next_le(-1),
        }
    }

    /// The first member in [`Domain::preferred_order`].
    pub fn preferred(&self) -> Option<i64> {
        self.preferred_order().next()
    }
}

pub struct PreferredOrder<'a> {
    dom: &'a Domain,
    pos: Option<i64>,
    neg: Option<i64>,
}

impl Iterator for PreferredOrder<'_> {
    type Item = i64;

    fn next(&mut self) -> Option<i64> {
        let take_pos = match (self.pos, self.neg) {
            (None, None) => return None,
            (Some(_), None) => true,
            (None, Some(_)) => false,
            (Some(p), Some(n)) => p <= n.unsigned_abs() as i64,
        };
        if take_pos {
            let p = self.pos.unwrap();
            self.pos = p.checked_add(1).and_then(|q| self.dom.next_ge(q));
            Some(p)
        } else {
            let n = self.neg.unwrap();
            self.neg = n.checked_sub(1).and_then(|q| self.dom.next_le(q));
            Some(n)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalization_and_intersection() {
        let d = Domain::from_intervals(vec![(5, 7), (1, 2), (3, 3), (10, 9)]);
        assert_eq!(d.intervals(), &[(1, 3), (5, 7)]);
        let e = Domain::from_intervals(vec![(2, 6)]);
        assert_eq!(d.intersect(&e).intervals(), &[(2, 3), (5, 6)]);
        assert_eq!(d.size(), 6);
        assert!(d.contains(6) && !d.contains(4));
    }

    #[test]
    fn alternating_order() {
        let d = Domain::from_intervals(vec![(-3, 4)]);
        let order: Vec<i64> = d.preferred_order().collect();
        assert_eq!(order, vec![0, 1, -1, 2, -2, 3, -3, 4]);
        let d = Domain::from_intervals(vec![(-10, -8), (5, 6)]);
        let order: Vec<i64> = d.preferred_order().collect();
        assert_eq!(order, vec![5, 6, -8, -9, -10]);
        assert_eq!(Domain::empty().preferred(), None);
    }
}
