//! Permutations in one-line notation, deletion, composition, LIS and the
//! Ulam distance.
//!
//! All public interfaces are 1-based: symbols are `1..=n` and positions are
//! `1..=n`. Storage is 0-based. Composition is symbolwise relabeling,
//! `relabel(s, p)[i] = s[p[i]]`, and is the only composition used anywhere
//! in the crate.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use crate::bits::BitSet;
use crate::error::{check_size, Error, Result};

/// Largest `n` for which full enumeration of `S_n` is permitted.
pub const ENUMERATION_CAP: usize = 13;

/// A bijection on `{1..n}` in one-line notation.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    // 0-based symbols; entries[i] is the symbol at position i.
    entries: Vec<u32>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation {
            entries: (0..n as u32).collect(),
        }
    }

    /// The strictly decreasing permutation `n ... 2 1`.
    pub fn reversal(n: usize) -> Self {
        Permutation {
            entries: (0..n as u32).rev().collect(),
        }
    }

    /// Builds a permutation from 1-based one-line notation.
    pub fn from_one_line(symbols: &[usize]) -> Result<Self> {
        let n = symbols.len();
        let mut seen = vec![false; n];
        let mut entries = Vec::with_capacity(n);
        for &s in symbols {
            if s == 0 || s > n {
                return Err(Error::InvalidPermutation(format!(
                    "symbol {s} outside 1..={n}"
                )));
            }
            if std::mem::replace(&mut seen[s - 1], true) {
                return Err(Error::InvalidPermutation(format!("symbol {s} repeated")));
            }
            entries.push((s - 1) as u32);
        }
        Ok(Permutation { entries })
    }

    /// Builds a permutation from 0-based entries. The caller guarantees
    /// bijectivity; checked in debug builds.
    pub(crate) fn from_zero_based(entries: Vec<u32>) -> Self {
        debug_assert!(is_bijection(&entries));
        Permutation { entries }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.entries.len()
    }

    /// Symbol at 1-based `position`.
    pub fn at(&self, position: usize) -> usize {
        self.entries[position - 1] as usize + 1
    }

    /// 1-based position of `symbol`.
    pub fn position_of(&self, symbol: usize) -> usize {
        self.entries
            .iter()
            .position(|&s| s as usize == symbol - 1)
            .expect("symbol in range")
            + 1
    }

    /// 1-based one-line notation.
    pub fn one_line(&self) -> Vec<usize> {
        self.entries.iter().map(|&s| s as usize + 1).collect()
    }

    /// 0-based entries.
    #[inline]
    pub fn as_slice(&self) -> &[u32] {
        &self.entries
    }

    pub fn is_identity(&self) -> bool {
        self.entries
            .iter()
            .enumerate()
            .all(|(i, &s)| i == s as usize)
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0u32; self.n()];
        for (i, &s) in self.entries.iter().enumerate() {
            inv[s as usize] = i as u32;
        }
        Permutation { entries: inv }
    }

    /// `relabel(self, p)[i] = self[p[i]]`.
    pub fn relabel(&self, p: &Permutation) -> Result<Permutation> {
        check_size(self.n(), p.n())?;
        Ok(Permutation {
            entries: p
                .entries
                .iter()
                .map(|&s| self.entries[s as usize])
                .collect(),
        })
    }

    /// Removes the symbols of `set`, preserving order.
    pub fn delete(&self, set: &SymbolSet) -> Result<Sequence> {
        check_size(self.n(), set.n())?;
        Ok(Sequence {
            entries: self
                .entries
                .iter()
                .copied()
                .filter(|&s| !set.bits.contains(s as usize))
                .collect(),
        })
    }

    pub fn as_sequence(&self) -> Sequence {
        Sequence {
            entries: self.entries.clone(),
        }
    }

    /// Inserts the new top symbol `n + 1` at 1-based `position` (1..=n+1).
    pub fn insert_top(&self, position: usize) -> Permutation {
        let mut entries = self.entries.clone();
        entries.insert(position - 1, self.n() as u32);
        Permutation { entries }
    }

    /// Lexicographic rank in `0..n!`.
    pub fn rank(&self) -> BigUint {
        let n = self.n();
        let mut rank = BigUint::zero();
        let mut used = vec![false; n];
        for (i, &s) in self.entries.iter().enumerate() {
            let smaller_unused = (0..s as usize).filter(|&t| !used[t]).count();
            rank = rank * (n - i) + smaller_unused;
            used[s as usize] = true;
        }
        rank
    }

    /// Lexicographic rank as a machine word; valid for `n <= 20`.
    pub fn rank_u64(&self) -> u64 {
        rank_slice(&self.entries)
    }

    pub fn unrank(n: usize, rank: &BigUint) -> Result<Permutation> {
        if *rank >= factorial_big(n) {
            return Err(Error::RankOutOfRange {
                n,
                rank: rank.to_string(),
            });
        }
        // Factorial-base digits, most significant first.
        let mut digits = vec![0usize; n];
        let mut r = rank.clone();
        for (i, d) in digits.iter_mut().enumerate().rev() {
            let base = n - i;
            *d = (&r % base).to_usize().expect("digit fits");
            r /= base;
        }
        let mut pool: Vec<u32> = (0..n as u32).collect();
        let entries = digits.into_iter().map(|d| pool.remove(d)).collect();
        Ok(Permutation { entries })
    }

    pub fn unrank_u64(n: usize, rank: u64) -> Result<Permutation> {
        Self::unrank(n, &BigUint::from(rank))
    }
}

pub(crate) fn is_bijection(entries: &[u32]) -> bool {
    let mut seen = vec![false; entries.len()];
    entries
        .iter()
        .all(|&s| (s as usize) < seen.len() && !std::mem::replace(&mut seen[s as usize], true))
}

/// Lexicographic rank of 0-based entries; `n <= 20`.
pub fn rank_slice(entries: &[u32]) -> u64 {
    let n = entries.len();
    debug_assert!(n <= 20);
    let mut rank = 0u64;
    let mut used = 0u32;
    for (i, &s) in entries.iter().enumerate() {
        let smaller_unused = s - (used & ((1u32 << s) - 1)).count_ones();
        rank = rank * (n - i) as u64 + smaller_unused as u64;
        used |= 1 << s;
    }
    rank
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", s + 1)?;
        }
        Ok(())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation({self})")
    }
}

impl FromStr for Permutation {
    type Err = Error;

    /// Accepts `4,5,2,3,1`, `4 5 2 3 1`, or the compact `45231` when the
    /// result has at most 9 symbols.
    fn from_str(input: &str) -> Result<Self> {
        let trimmed = input.trim();
        let parse_err = |reason: String| Error::Parse {
            input: input.to_string(),
            reason,
        };
        let symbols: Vec<usize> = if trimmed.contains(|c: char| c == ',' || c.is_whitespace()) {
            trimmed
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|t| !t.is_empty())
                .map(|t| {
                    t.parse::<usize>()
                        .map_err(|e| parse_err(format!("bad symbol {t:?}: {e}")))
                })
                .collect::<Result<_>>()?
        } else {
            if trimmed.len() > 9 {
                return Err(parse_err(
                    "compact digit strings are ambiguous for n >= 10; use commas".into(),
                ));
            }
            trimmed
                .chars()
                .map(|c| {
                    c.to_digit(10)
                        .map(|d| d as usize)
                        .ok_or_else(|| parse_err(format!("bad digit {c:?}")))
                })
                .collect::<Result<_>>()?
        };
        Permutation::from_one_line(&symbols).map_err(|e| parse_err(e.to_string()))
    }
}

/// A subset of `{1..n}`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SymbolSet {
    bits: BitSet,
}

impl SymbolSet {
    pub fn empty(n: usize) -> Self {
        SymbolSet {
            bits: BitSet::new(n),
        }
    }

    pub fn all(n: usize) -> Self {
        SymbolSet {
            bits: BitSet::full(n),
        }
    }

    /// From 1-based symbols.
    pub fn from_symbols(n: usize, symbols: &[usize]) -> Result<Self> {
        let mut bits = BitSet::new(n);
        for &s in symbols {
            if s == 0 || s > n {
                return Err(Error::InvalidArgument(format!(
                    "symbol {s} outside 1..={n}"
                )));
            }
            bits.insert(s - 1);
        }
        Ok(SymbolSet { bits })
    }

    pub(crate) fn from_bits(bits: BitSet) -> Self {
        SymbolSet { bits }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.bits.capacity()
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.bits.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn contains(&self, symbol: usize) -> bool {
        symbol >= 1 && self.bits.contains(symbol - 1)
    }

    pub fn insert(&mut self, symbol: usize) {
        self.bits.insert(symbol - 1);
    }

    pub fn remove(&mut self, symbol: usize) {
        if symbol >= 1 {
            self.bits.remove(symbol - 1);
        }
    }

    /// Members in increasing order, 1-based.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter().map(|i| i + 1)
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    #[inline]
    pub fn bits(&self) -> &BitSet {
        &self.bits
    }
}

impl fmt::Debug for SymbolSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// A string of distinct symbols, e.g. the result of a deletion.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Sequence {
    entries: Vec<u32>,
}

impl Sequence {
    /// From 1-based distinct symbols.
    pub fn from_symbols(symbols: &[usize]) -> Result<Self> {
        let mut sorted = symbols.to_vec();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) || sorted.first() == Some(&0) {
            return Err(Error::InvalidArgument(
                "sequence symbols must be distinct and positive".into(),
            ));
        }
        Ok(Sequence {
            entries: symbols.iter().map(|&s| (s - 1) as u32).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn symbols(&self) -> Vec<usize> {
        self.entries.iter().map(|&s| s as usize + 1).collect()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.entries
    }
}

impl fmt::Debug for Sequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Sequence({:?})", self.symbols())
    }
}

/// Length of the longest strictly increasing subsequence.
pub fn lis(seq: &Sequence) -> usize {
    lis_slice(&seq.entries, &mut Vec::with_capacity(seq.len()))
}

/// Patience-sorting LIS in `O(L log L)`. `tails` is scratch space reused
/// across calls in hot loops.
#[inline]
pub fn lis_slice(seq: &[u32], tails: &mut Vec<u32>) -> usize {
    tails.clear();
    for &x in seq {
        let at = tails.partition_point(|&t| t < x);
        if at == tails.len() {
            tails.push(x);
        } else {
            tails[at] = x;
        }
    }
    tails.len()
}

/// Ulam distance via `n - LIS(relabel(inverse(a), b))`.
pub fn ulam_distance(a: &Permutation, b: &Permutation) -> Result<usize> {
    check_size(a.n(), b.n())?;
    let pos = a.inverse();
    let mapped: Vec<u32> = b.entries.iter().map(|&s| pos.entries[s as usize]).collect();
    Ok(a.n() - lis_slice(&mapped, &mut Vec::with_capacity(a.n())))
}

/// Ulam distance from the definition: the least `|A|` with
/// `delete(a, A) == delete(b, A)`, searched by increasing `|A|`.
///
/// Exponential in `n`; intended for `n <= 12`.
pub fn ulam_distance_oracle(a: &Permutation, b: &Permutation) -> Result<usize> {
    check_size(a.n(), b.n())?;
    let n = a.n();
    for size in 0..=n {
        let mut found = false;
        for_each_subset_of_size(n, size, |subset| {
            let set = SymbolSet::from_symbols(n, subset).expect("valid subset");
            if a.delete(&set).expect("same n") == b.delete(&set).expect("same n") {
                found = true;
            }
            !found
        });
        if found {
            return Ok(size);
        }
    }
    unreachable!("deleting every symbol equalizes any pair")
}

/// Calls `f` on each `size`-subset of `{1..n}` (1-based, increasing,
/// lexicographic) until `f` returns false.
pub fn for_each_subset_of_size(n: usize, size: usize, mut f: impl FnMut(&[usize]) -> bool) {
    if size > n {
        return;
    }
    let mut idx: Vec<usize> = (1..=size).collect();
    loop {
        if !f(&idx) {
            return;
        }
        // Advance to the next combination.
        let mut i = size;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] < n - (size - 1 - i) {
                idx[i] += 1;
                for j in i + 1..size {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Rearranges 0-based entries into the next lexicographic permutation;
/// returns false (leaving the slice untouched) at the last one.
#[inline]
pub fn next_permutation(a: &mut [u32]) -> bool {
    if a.len() < 2 {
        return false;
    }
    let mut i = a.len() - 1;
    while i > 0 && a[i - 1] >= a[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = a.len() - 1;
    while a[j] <= a[i - 1] {
        j -= 1;
    }
    a.swap(i - 1, j);
    a[i..].reverse();
    true
}

pub fn factorial_u64(n: usize) -> u64 {
    assert!(n <= 20, "{n}! overflows u64");
    (1..=n as u64).product()
}

pub fn factorial_big(n: usize) -> BigUint {
    (1..=n).fold(BigUint::from(1u32), |acc, i| acc * i)
}

pub(crate) fn check_enumeration_cap(n: usize, cap: usize, what: &'static str) -> Result<()> {
    if n > cap {
        Err(Error::CapExceeded { what, n, cap })
    } else {
        Ok(())
    }
}

/// Lexicographic stream over a rank range of `S_n`.
pub struct Permutations {
    current: Vec<u32>,
    remaining: u64,
}

impl Iterator for Permutations {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        if self.remaining == 0 {
            return None;
        }
        let out = Permutation::from_zero_based(self.current.clone());
        self.remaining -= 1;
        if self.remaining > 0 {
            next_permutation(&mut self.current);
        }
        Some(out)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let r = self.remaining as usize;
        (r, Some(r))
    }
}

/// Every element of `S_n` once, in lexicographic order. `n <= 13`.
pub fn enumerate_permutations(n: usize) -> Result<Permutations> {
    check_enumeration_cap(n, ENUMERATION_CAP, "permutation enumeration")?;
    Ok(permutation_range(n, 0, factorial_u64(n)))
}

/// Permutations with lexicographic ranks in `start..end`, for splitting a
/// scan between workers.
pub fn permutation_range(n: usize, start: u64, end: u64) -> Permutations {
    let end = end.min(factorial_u64(n));
    if start >= end {
        return Permutations {
            current: Vec::new(),
            remaining: 0,
        };
    }
    let first = Permutation::unrank_u64(n, start).expect("start < n!");
    Permutations {
        current: first.entries,
        remaining: end - start,
    }
}

/// Visits the 0-based entries of every permutation with rank in
/// `start..end` without allocating per item.
pub fn for_each_in_range(n: usize, start: u64, end: u64, mut f: impl FnMut(&[u32])) {
    let end = end.min(factorial_u64(n));
    if start >= end {
        return;
    }
    let mut current = Permutation::unrank_u64(n, start)
        .expect("start < n!")
        .entries;
    for i in start..end {
        f(&current);
        if i + 1 < end {
            next_permutation(&mut current);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Permutation {
        s.parse().unwrap()
    }

    fn set(n: usize, s: &[usize]) -> SymbolSet {
        SymbolSet::from_symbols(n, s).unwrap()
    }

    #[test]
    fn deletion_examples() {
        assert_eq!(
            p("45231").delete(&set(5, &[1, 2])).unwrap().symbols(),
            vec![4, 5, 3]
        );
        assert_eq!(
            p("15243").delete(&set(5, &[5])).unwrap().symbols(),
            vec![1, 2, 4, 3]
        );
        assert_eq!(
            p("15243").delete(&SymbolSet::empty(5)).unwrap().symbols(),
            vec![1, 5, 2, 4, 3]
        );
        assert!(matches!(
            p("123").delete(&SymbolSet::empty(4)),
            Err(Error::SizeMismatch { .. })
        ));
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(p("123").inverse(), p("123"));
        assert_eq!(p("231").inverse(), p("312"));
        let q = p("21435");
        let inv = q.inverse();
        for i in 1..=5 {
            assert_eq!(inv.at(q.at(i)), i);
        }
        assert_eq!(inv, q);
    }

    #[test]
    fn relabel_examples() {
        let x = p("45231");
        assert_eq!(Permutation::identity(5).relabel(&x).unwrap(), x);
        assert_eq!(p("213").relabel(&p("312")).unwrap(), p("321"));
        assert!(x.inverse().relabel(&x).unwrap().is_identity());
        assert!(p("12").relabel(&p("123")).is_err());
    }

    #[test]
    fn lis_examples() {
        assert_eq!(lis(&Permutation::identity(7).as_sequence()), 7);
        assert_eq!(lis(&Permutation::reversal(7).as_sequence()), 1);
        assert_eq!(lis(&p("15243").as_sequence()), 3);
        assert_eq!(lis(&Sequence::from_symbols(&[]).unwrap()), 0);
    }

    #[test]
    fn distance_examples() {
        let x = p("45231");
        assert_eq!(ulam_distance(&x, &x).unwrap(), 0);
        for n in 1..8 {
            assert_eq!(
                ulam_distance(&Permutation::identity(n), &Permutation::reversal(n)).unwrap(),
                n - 1
            );
        }
        assert_eq!(ulam_distance(&p("12345"), &p("21435")).unwrap(), 2);
        assert_eq!(ulam_distance_oracle(&p("123"), &p("123")).unwrap(), 0);
        assert_eq!(ulam_distance_oracle(&p("132"), &p("312")).unwrap(), 1);
        assert_eq!(ulam_distance_oracle(&p("12"), &p("21")).unwrap(), 1);
        // Longest common subsequence 5,2,3.
        assert_eq!(ulam_distance_oracle(&p("45231"), &p("15243")).unwrap(), 2);
    }

    #[test]
    fn rank_examples() {
        assert_eq!(p("123").rank(), BigUint::from(0u32));
        assert_eq!(p("321").rank(), BigUint::from(5u32));
        assert_eq!(Permutation::unrank_u64(3, 2).unwrap(), p("213"));
        assert!(matches!(
            Permutation::unrank_u64(3, 6),
            Err(Error::RankOutOfRange { .. })
        ));
        let big = Permutation::reversal(25);
        let r = big.rank();
        assert_eq!(r, factorial_big(25) - 1u32);
        assert_eq!(Permutation::unrank(25, &r).unwrap(), big);
    }

    #[test]
    fn enumeration_examples() {
        let zero: Vec<_> = enumerate_permutations(0).unwrap().collect();
        assert_eq!(zero, vec![Permutation::identity(0)]);
        let three: Vec<_> = enumerate_permutations(3).unwrap().collect();
        assert_eq!(three.len(), 6);
        assert_eq!(three[0], p("123"));
        assert_eq!(three[5], p("321"));
        let four: Vec<_> = enumerate_permutations(4).unwrap().collect();
        let distinct: std::collections::HashSet<_> = four.iter().cloned().collect();
        assert_eq!(distinct.len(), 24);
        for (r, q) in four.iter().enumerate() {
            assert_eq!(q.rank_u64(), r as u64);
        }
        assert!(enumerate_permutations(14).is_err());
    }

    #[test]
    fn range_chunks_tile_the_space() {
        let whole: Vec<_> = enumerate_permutations(5).unwrap().collect();
        let mut chunked = Vec::new();
        for start in (0..120).step_by(17) {
            chunked.extend(permutation_range(5, start, start + 17));
        }
        assert_eq!(whole, chunked);
    }

    #[test]
    fn text_format() {
        assert_eq!(p("4,5,2,3,1"), p("45231"));
        assert_eq!(p("4 5 2 3 1"), p("45231"));
        assert_eq!(p("45231").to_string(), "4,5,2,3,1");
        assert!("1234567890".parse::<Permutation>().is_err());
        assert!("1,2,2".parse::<Permutation>().is_err());
        assert!("1,3".parse::<Permutation>().is_err());
        let ten: Permutation = "10,9,8,7,6,5,4,3,2,1".parse().unwrap();
        assert_eq!(ten, Permutation::reversal(10));
    }

    #[test]
    fn subsets_in_lexicographic_order() {
        let mut seen = Vec::new();
        for_each_subset_of_size(4, 2, |s| {
            seen.push(s.to_vec());
            true
        });
        assert_eq!(
            seen,
            vec![
                vec![1, 2],
                vec![1, 3],
                vec![1, 4],
                vec![2, 3],
                vec![2, 4],
                vec![3, 4]
            ]
        );
        let mut count = 0;
        for_each_subset_of_size(3, 0, |s| {
            assert!(s.is_empty());
            count += 1;
            true
        });
        assert_eq!(count, 1);
    }
}
