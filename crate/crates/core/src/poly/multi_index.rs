use std::fmt;

use num_bigint::BigInt;
use num_traits::One;

/// Exponent vector of a monomial, or the order vector of a partial derivative.
///
/// Ordering is lexicographic on the entries, which is also the term order used
/// by [`Polynomial`](super::Polynomial).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(entries: Vec<u32>) -> Self {
        MultiIndex(entries)
    }

    pub fn zero(n: usize) -> Self {
        MultiIndex(vec![0; n])
    }

    /// Unit index e_i of length n.
    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = vec![0; n];
        v[i] = 1;
        MultiIndex(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn get(&self, i: usize) -> u32 {
        self.0[i]
    }

    /// |α|
    pub fn order(&self) -> u32 {
        self.0.iter().sum()
    }

    /// α! as a big integer.
    pub fn factorial(&self) -> BigInt {
        self.0.iter().fold(BigInt::one(), |acc, &a| acc * factorial(a))
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        debug_assert_eq!(self.len(), other.len());
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// α − β when β ≤ α componentwise.
    pub fn checked_sub(&self, other: &MultiIndex) -> Option<MultiIndex> {
        debug_assert_eq!(self.len(), other.len());
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(MultiIndex)
    }

    pub fn divides(&self, other: &MultiIndex) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn with(&self, i: usize, value: u32) -> MultiIndex {
        let mut v = self.0.clone();
        v[i] = value;
        MultiIndex(v)
    }

    pub fn increment(&self, i: usize) -> MultiIndex {
        let mut v = self.0.clone();
        v[i] += 1;
        MultiIndex(v)
    }

    /// Concatenation, used for tensor products and adjoined variables.
    pub fn concat(&self, other: &MultiIndex) -> MultiIndex {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        MultiIndex(v)
    }

    pub fn slice(&self, start: usize, end: usize) -> MultiIndex {
        MultiIndex(self.0[start..end].to_vec())
    }

    /// All indices of length n with |α| = order, in descending lexicographic
    /// order (x1^order first).
    pub fn all_of_order(n: usize, order: u32) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        let mut cur = vec![0u32; n];
        fill(&mut cur, 0, order, &mut out);
        out
    }

    /// All indices with |α| ≤ max_order, graded: by order, then descending
    /// lexicographic inside each order.
    pub fn all_up_to(n: usize, max_order: u32) -> Vec<MultiIndex> {
        (0..=max_order)
            .flat_map(|k| MultiIndex::all_of_order(n, k))
            .collect()
    }

    /// Comma-joined form used in JSON keys, e.g. `2,0`.
    pub fn to_key(&self) -> String {
        self.0
            .iter()
            .map(|a| a.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn from_key(key: &str) -> Option<MultiIndex> {
        key.split(',')
            .map(|s| s.trim().parse::<u32>().ok())
            .collect::<Option<Vec<_>>>()
            .map(MultiIndex)
    }
}

fn fill(cur: &mut Vec<u32>, pos: usize, remaining: u32, out: &mut Vec<MultiIndex>) {
    let n = cur.len();
    if n == 0 {
        if remaining == 0 {
            out.push(MultiIndex(Vec::new()));
        }
        return;
    }
    if pos == n - 1 {
        cur[pos] = remaining;
        out.push(MultiIndex(cur.clone()));
        return;
    }
    for a in (0..=remaining).rev() {
        cur[pos] = a;
        fill(cur, pos + 1, remaining - a, out);
    }
    cur[pos] = 0;
}

pub fn factorial(a: u32) -> BigInt {
    (2..=a).fold(BigInt::one(), |acc, i| acc * i)
}

pub fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::from(0);
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// n(n−1)…(n−k+1)
pub fn falling(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::from(0);
    }
    (0..k).fold(BigInt::one(), |acc, i| acc * (n - i))
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.to_key())
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.to_key())
    }
}

impl From<Vec<u32>> for MultiIndex {
    fn from(v: Vec<u32>) -> Self {
        MultiIndex(v)
    }
}

impl<const N: usize> From<[u32; N]> for MultiIndex {
    fn from(v: [u32; N]) -> Self {
        MultiIndex(v.to_vec())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumeration_counts() {
        assert_eq!(MultiIndex::all_of_order(2, 4).len(), 5);
        assert_eq!(MultiIndex::all_of_order(3, 3).len(), 10);
        // C(n+k, k)
        assert_eq!(MultiIndex::all_up_to(2, 4).len(), 15);
        assert_eq!(MultiIndex::all_up_to(3, 3).len(), 20);
        assert_eq!(
            MultiIndex::all_of_order(2, 2),
            vec![[2, 0].into(), [1, 1].into(), [0, 2].into()]
        );
    }

    #[test]
    fn factorials_are_exact() {
        assert_eq!(MultiIndex::from([3, 2]).factorial(), BigInt::from(12));
        assert_eq!(factorial(25).to_string(), "15511210043330985984000000");
        assert_eq!(binomial(5, 2), BigInt::from(10));
        assert_eq!(falling(4, 2), BigInt::from(12));
        assert_eq!(falling(2, 3), BigInt::from(0));
    }

    #[test]
    fn key_round_trip() {
        let a = MultiIndex::from([4, 0, 1]);
        assert_eq!(MultiIndex::from_key(&a.to_key()), Some(a));
        assert_eq!(MultiIndex::from_key("1,x"), None);
    }
}
