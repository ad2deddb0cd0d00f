//! Coordinate substrate shared by every algebra engine: total transformations
//! on a finite dimension, sets of coordinates, enumerated point spaces `^αU`,
//! and dense bitmask elements over those spaces.
//!
//! Conventions fixed here and relied on everywhere else:
//!
//! * composition is `(σ∘τ)(i) = σ(τ(i))`, matching `s_σ(s_τ X) = s_{σ∘τ} X`
//!   in set semantics;
//! * a point `s ∈ ^αU` is encoded as `Σ s(i)·u^(α−1−i)` — coordinate 0 is the
//!   most significant digit;
//! * elements are bit vectors with the least-significant bit at point index 0,
//!   printed as `0x<hex>:<bits>`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{capacity, PalgError, Result};

/// Dense bitmask elements are capped at this many bits.
pub const MAX_POINTS: usize = 1 << 16;

/// A total map `{0,…,dim−1} → {0,…,dim−1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Transformation {
    entries: Box<[u16]>,
}

impl Transformation {
    pub fn new(entries: Vec<u16>) -> Result<Self> {
        let dim = entries.len();
        for &e in &entries {
            if (e as usize) >= dim {
                return Err(PalgError::OutOfRange {
                    what: "transformation entry",
                    value: e as usize,
                    limit: dim.saturating_sub(1),
                });
            }
        }
        Ok(Transformation {
            entries: entries.into_boxed_slice(),
        })
    }

    pub fn identity(dim: u16) -> Self {
        Transformation {
            entries: (0..dim).collect::<Vec<_>>().into_boxed_slice(),
        }
    }

    pub fn dim(&self) -> u16 {
        self.entries.len() as u16
    }

    pub fn apply(&self, i: u16) -> u16 {
        self.entries[i as usize]
    }

    pub fn entries(&self) -> &[u16] {
        &self.entries
    }

    pub fn is_identity(&self) -> bool {
        self.entries.iter().enumerate().all(|(i, &e)| i == e as usize)
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = 0u64;
        for &e in self.entries.iter() {
            if seen >> e & 1 == 1 {
                return false;
            }
            seen |= 1 << e;
        }
        true
    }

    /// `(σ∘τ)(i) = σ(τ(i))`; under `s`, this satisfies `s_{σ∘τ} = s_σ ∘ s_τ`.
    pub fn compose(sigma: &Transformation, tau: &Transformation) -> Result<Transformation> {
        if sigma.dim() != tau.dim() {
            return Err(PalgError::DimensionMismatch {
                expected: sigma.dim() as usize,
                got: tau.dim() as usize,
            });
        }
        let entries = tau
            .entries
            .iter()
            .map(|&t| sigma.entries[t as usize])
            .collect();
        Ok(Transformation { entries })
    }

    /// Blocks of the equivalence `i ~ j ⇔ τ(i) = τ(j)`, ordered by least member.
    pub fn kernel_partition(&self) -> Vec<Vec<u16>> {
        let mut blocks: Vec<Vec<u16>> = Vec::new();
        let mut block_of_value: Vec<Option<usize>> = vec![None; self.entries.len()];
        for (i, &v) in self.entries.iter().enumerate() {
            match block_of_value[v as usize] {
                Some(b) => blocks[b].push(i as u16),
                None => {
                    block_of_value[v as usize] = Some(blocks.len());
                    blocks.push(vec![i as u16]);
                }
            }
        }
        blocks
    }

    /// Inverse of a bijective transformation.
    pub fn inverse(&self) -> Result<Transformation> {
        if !self.is_injective() {
            return Err(PalgError::Malformed(
                "cannot invert a non-bijective transformation".into(),
            ));
        }
        let mut entries = vec![0u16; self.entries.len()];
        for (i, &v) in self.entries.iter().enumerate() {
            entries[v as usize] = i as u16;
        }
        Ok(Transformation {
            entries: entries.into_boxed_slice(),
        })
    }
}

impl fmt::Display for Transformation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, "]")
    }
}

impl FromStr for Transformation {
    type Err = PalgError;

    fn from_str(s: &str) -> Result<Self> {
        let body = s
            .trim()
            .strip_prefix('[')
            .and_then(|t| t.strip_suffix(']'))
            .ok_or_else(|| PalgError::Malformed(format!("expected [..] transformation, got {s:?}")))?;
        let mut entries = Vec::new();
        if !body.trim().is_empty() {
            for part in body.split(',') {
                entries.push(
                    part.trim()
                        .parse::<u16>()
                        .map_err(|_| PalgError::Malformed(format!("bad entry {part:?} in {s:?}")))?,
                );
            }
        }
        Transformation::new(entries)
    }
}

impl Serialize for Transformation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.entries.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Transformation {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let entries = Vec::<u16>::deserialize(d)?;
        Transformation::new(entries).map_err(D::Error::custom)
    }
}

/// A subset of `{0,…,dim−1}`, dim ≤ 64.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DimensionSet {
    dim: u16,
    mask: u64,
}

impl DimensionSet {
    pub fn empty(dim: u16) -> Self {
        assert!(dim <= 64);
        DimensionSet { dim, mask: 0 }
    }

    pub fn full(dim: u16) -> Self {
        assert!(dim <= 64);
        let mask = if dim == 64 { u64::MAX } else { (1u64 << dim) - 1 };
        DimensionSet { dim, mask }
    }

    pub fn from_members<I: IntoIterator<Item = u16>>(dim: u16, members: I) -> Result<Self> {
        let mut set = DimensionSet::empty(dim);
        for m in members {
            if m >= dim {
                return Err(PalgError::OutOfRange {
                    what: "coordinate",
                    value: m as usize,
                    limit: dim.saturating_sub(1) as usize,
                });
            }
            set.mask |= 1 << m;
        }
        Ok(set)
    }

    pub fn from_mask(dim: u16, mask: u64) -> Result<Self> {
        let full = DimensionSet::full(dim);
        if mask & !full.mask != 0 {
            return Err(PalgError::OutOfRange {
                what: "coordinate mask",
                value: mask as usize,
                limit: full.mask as usize,
            });
        }
        Ok(DimensionSet { dim, mask })
    }

    pub fn dim(&self) -> u16 {
        self.dim
    }

    pub fn contains(&self, i: u16) -> bool {
        i < self.dim && self.mask >> i & 1 == 1
    }

    pub fn is_empty(&self) -> bool {
        self.mask == 0
    }

    pub fn len(&self) -> u32 {
        self.mask.count_ones()
    }

    pub fn members(&self) -> impl Iterator<Item = u16> + '_ {
        (0..self.dim).filter(|&i| self.contains(i))
    }

    pub fn union(&self, other: &DimensionSet) -> DimensionSet {
        debug_assert_eq!(self.dim, other.dim);
        DimensionSet {
            dim: self.dim,
            mask: self.mask | other.mask,
        }
    }

    pub fn intersection(&self, other: &DimensionSet) -> DimensionSet {
        debug_assert_eq!(self.dim, other.dim);
        DimensionSet {
            dim: self.dim,
            mask: self.mask & other.mask,
        }
    }

    pub fn complement(&self) -> DimensionSet {
        DimensionSet {
            dim: self.dim,
            mask: DimensionSet::full(self.dim).mask & !self.mask,
        }
    }

    pub fn is_subset(&self, other: &DimensionSet) -> bool {
        self.mask & !other.mask == 0
    }

    pub fn mask(&self) -> u64 {
        self.mask
    }

    /// All subsets of `{0,…,dim−1}` in mask order.
    pub fn all(dim: u16) -> impl Iterator<Item = DimensionSet> {
        assert!(dim <= 16);
        (0..(1u64 << dim)).map(move |mask| DimensionSet { dim, mask })
    }
}

impl fmt::Display for DimensionSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        let mut first = true;
        for m in self.members() {
            if !first {
                write!(f, ",")?;
            }
            first = false;
            write!(f, "{m}")?;
        }
        write!(f, "}}")
    }
}

impl DimensionSet {
    /// Parses `{0,2}` against an ambient dimension.
    pub fn parse(s: &str, dim: u16) -> Result<Self> {
        let body = s
            .trim()
            .strip_prefix('{')
            .and_then(|t| t.strip_suffix('}'))
            .ok_or_else(|| PalgError::Malformed(format!("expected {{..}} set, got {s:?}")))?;
        let mut members = Vec::new();
        if !body.trim().is_empty() {
            for part in body.split(',') {
                members.push(
                    part.trim()
                        .parse::<u16>()
                        .map_err(|_| PalgError::Malformed(format!("bad member {part:?} in {s:?}")))?,
                );
            }
        }
        DimensionSet::from_members(dim, members)
    }
}

/// The enumerated point space `^αU` with `|U| = base`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointSpace {
    dim: u16,
    base: u16,
    point_count: usize,
}

impl PointSpace {
    pub fn new(dim: u16, base: u16) -> Result<Self> {
        if base == 0 {
            return Err(PalgError::Malformed("base must be at least 1".into()));
        }
        let point_count = (base as usize)
            .checked_pow(dim as u32)
            .ok_or(PalgError::Capacity {
                what: "point count",
                requested: usize::MAX,
                limit: MAX_POINTS,
            })?;
        capacity("point count", point_count, MAX_POINTS)?;
        Ok(PointSpace {
            dim,
            base,
            point_count,
        })
    }

    pub fn dim(&self) -> u16 {
        self.dim
    }

    pub fn base(&self) -> u16 {
        self.base
    }

    pub fn point_count(&self) -> usize {
        self.point_count
    }

    /// `index(s) = Σ s(i)·u^(α−1−i)`.
    pub fn encode(&self, seq: &[u16]) -> Result<usize> {
        if seq.len() != self.dim as usize {
            return Err(PalgError::DimensionMismatch {
                expected: self.dim as usize,
                got: seq.len(),
            });
        }
        let mut idx = 0usize;
        for &v in seq {
            if v >= self.base {
                return Err(PalgError::OutOfRange {
                    what: "coordinate value",
                    value: v as usize,
                    limit: self.base as usize - 1,
                });
            }
            idx = idx * self.base as usize + v as usize;
        }
        Ok(idx)
    }

    pub fn decode(&self, mut idx: usize) -> Result<Vec<u16>> {
        if idx >= self.point_count {
            return Err(PalgError::OutOfRange {
                what: "point index",
                value: idx,
                limit: self.point_count - 1,
            });
        }
        let mut seq = vec![0u16; self.dim as usize];
        for i in (0..self.dim as usize).rev() {
            seq[i] = (idx % self.base as usize) as u16;
            idx /= self.base as usize;
        }
        Ok(seq)
    }

    pub fn points(&self) -> impl Iterator<Item = usize> {
        0..self.point_count
    }
}

/// A bit vector of fixed length; bit `k` stands for point index `k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Element {
    len: usize,
    words: Vec<u64>,
}

fn word_count(len: usize) -> usize {
    len.div_ceil(64)
}

impl Element {
    pub fn zeros(len: usize) -> Self {
        Element {
            len,
            words: vec![0; word_count(len)],
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut e = Element::zeros(len);
        for i in 0..len {
            e.set(i, true);
        }
        e
    }

    pub fn singleton(len: usize, idx: usize) -> Self {
        let mut e = Element::zeros(len);
        e.set(idx, true);
        e
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, idx: usize) -> bool {
        debug_assert!(idx < self.len);
        self.words[idx / 64] >> (idx % 64) & 1 == 1
    }

    pub fn set(&mut self, idx: usize, value: bool) {
        debug_assert!(idx < self.len);
        if value {
            self.words[idx / 64] |= 1 << (idx % 64);
        } else {
            self.words[idx / 64] &= !(1 << (idx % 64));
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut bits = w;
            std::iter::from_fn(move || {
                if bits == 0 {
                    None
                } else {
                    let b = bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    Some(wi * 64 + b)
                }
            })
        })
    }

    fn check_len(&self, other: &Element) -> Result<()> {
        if self.len != other.len {
            return Err(PalgError::DimensionMismatch {
                expected: self.len,
                got: other.len,
            });
        }
        Ok(())
    }

    pub fn and(&self, other: &Element) -> Result<Element> {
        self.check_len(other)?;
        Ok(Element {
            len: self.len,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a & b)
                .collect(),
        })
    }

    pub fn or(&self, other: &Element) -> Result<Element> {
        self.check_len(other)?;
        Ok(Element {
            len: self.len,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a | b)
                .collect(),
        })
    }

    pub fn xor(&self, other: &Element) -> Result<Element> {
        self.check_len(other)?;
        Ok(Element {
            len: self.len,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a ^ b)
                .collect(),
        })
    }

    /// Set difference `self ∖ other`.
    pub fn minus(&self, other: &Element) -> Result<Element> {
        self.check_len(other)?;
        Ok(Element {
            len: self.len,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a & !b)
                .collect(),
        })
    }

    /// Complement within the full space of `len` bits.
    pub fn not(&self) -> Element {
        let mut words: Vec<u64> = self.words.iter().map(|w| !w).collect();
        let tail = self.len % 64;
        if tail != 0 {
            if let Some(last) = words.last_mut() {
                *last &= (1u64 << tail) - 1;
            }
        }
        if self.len == 0 {
            words.clear();
        }
        Element {
            len: self.len,
            words,
        }
    }

    pub fn le(&self, other: &Element) -> bool {
        debug_assert_eq!(self.len, other.len);
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }

    /// Interprets the mask as an integer; only valid for len ≤ 64.
    pub fn as_u64(&self) -> u64 {
        debug_assert!(self.len <= 64);
        self.words.first().copied().unwrap_or(0)
    }

    pub fn from_u64(len: usize, mask: u64) -> Result<Element> {
        if len > 64 {
            return Err(PalgError::Capacity {
                what: "u64 mask length",
                requested: len,
                limit: 64,
            });
        }
        let top = if len == 64 {
            u64::MAX
        } else {
            (1u64 << len) - 1
        };
        if mask & !top != 0 {
            return Err(PalgError::InvalidElement(format!(
                "mask {mask:#x} has bits beyond length {len}"
            )));
        }
        Ok(Element {
            len,
            words: if len == 0 { vec![] } else { vec![mask] },
        })
    }

    /// All subsets of this element's bits, ascending in mask order.
    pub fn subsets(&self) -> Result<impl Iterator<Item = Element> + '_> {
        let positions: Vec<usize> = self.iter_ones().collect();
        capacity("subset enumeration", positions.len(), 16)?;
        let total = 1usize << positions.len();
        let len = self.len;
        Ok((0..total).map(move |combo| {
            let mut e = Element::zeros(len);
            for (j, &p) in positions.iter().enumerate() {
                if combo >> j & 1 == 1 {
                    e.set(p, true);
                }
            }
            e
        }))
    }

    pub fn to_hex(&self) -> String {
        let nibbles = self.len.div_ceil(4).max(1);
        let mut out = String::with_capacity(nibbles + 2);
        out.push_str("0x");
        for n in (0..nibbles).rev() {
            let mut nib = 0u8;
            for b in 0..4 {
                let idx = n * 4 + b;
                if idx < self.len && self.get(idx) {
                    nib |= 1 << b;
                }
            }
            out.push(char::from_digit(nib as u32, 16).unwrap());
        }
        out
    }

    /// Parses `0x..` against an expected bit length.
    pub fn parse_hex(s: &str, len: usize) -> Result<Element> {
        let body = s
            .trim()
            .strip_prefix("0x")
            .or_else(|| s.trim().strip_prefix("0X"))
            .ok_or_else(|| PalgError::Malformed(format!("expected 0x-prefixed mask, got {s:?}")))?;
        let mut e = Element::zeros(len);
        for (pos, ch) in body.chars().rev().enumerate() {
            let nib = ch
                .to_digit(16)
                .ok_or_else(|| PalgError::Malformed(format!("bad hex digit {ch:?} in {s:?}")))?
                as u64;
            for b in 0..4 {
                if nib >> b & 1 == 1 {
                    let idx = pos * 4 + b;
                    if idx >= len {
                        return Err(PalgError::InvalidElement(format!(
                            "mask {s} has bits beyond length {len}"
                        )));
                    }
                    e.set(idx, true);
                }
            }
        }
        Ok(e)
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.to_hex(), self.len)
    }
}

impl FromStr for Element {
    type Err = PalgError;

    /// Parses the explicit-length form `0x<hex>:<bits>`.
    fn from_str(s: &str) -> Result<Self> {
        let (hex, len) = s
            .rsplit_once(':')
            .ok_or_else(|| PalgError::Malformed(format!("expected 0x..:<bits>, got {s:?}")))?;
        let len: usize = len
            .trim()
            .parse()
            .map_err(|_| PalgError::Malformed(format!("bad bit length in {s:?}")))?;
        capacity("element length", len, MAX_POINTS)?;
        Element::parse_hex(hex, len)
    }
}

impl PartialOrd for Element {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Element {
    /// Numeric mask order; length is only a tie-breaker across spaces.
    fn cmp(&self, other: &Self) -> Ordering {
        let n = self.words.len().max(other.words.len());
        for i in (0..n).rev() {
            let a = self.words.get(i).copied().unwrap_or(0);
            let b = other.words.get(i).copied().unwrap_or(0);
            match a.cmp(&b) {
                Ordering::Equal => {}
                ord => return ord,
            }
        }
        self.len.cmp(&other.len)
    }
}

impl Serialize for Element {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Element {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn compose_matches_pointwise_evaluation() {
        // σ(τ(i)) evaluated by hand for each example.
        let swap = Transformation::new(vec![1, 0]).unwrap();
        let collapse = Transformation::new(vec![0, 0]).unwrap();
        assert_eq!(
            Transformation::compose(&swap, &swap).unwrap(),
            Transformation::identity(2)
        );
        assert_eq!(
            Transformation::compose(&swap, &collapse).unwrap(),
            Transformation::new(vec![1, 1]).unwrap()
        );
        let id = Transformation::identity(2);
        let ones = Transformation::new(vec![1, 1]).unwrap();
        assert_eq!(Transformation::compose(&id, &ones).unwrap(), ones);
    }

    #[test]
    fn compose_rejects_dimension_mismatch() {
        let a = Transformation::identity(2);
        let b = Transformation::identity(3);
        assert!(Transformation::compose(&a, &b).is_err());
    }

    #[test]
    fn kernel_partition_examples() {
        let t = Transformation::new(vec![0, 0, 2]).unwrap();
        assert_eq!(t.kernel_partition(), vec![vec![0, 1], vec![2]]);
        assert_eq!(
            Transformation::identity(3).kernel_partition(),
            vec![vec![0], vec![1], vec![2]]
        );
        let c = Transformation::new(vec![1, 1, 1]).unwrap();
        assert_eq!(c.kernel_partition(), vec![vec![0, 1, 2]]);
    }

    #[test]
    fn encode_examples() {
        let s22 = PointSpace::new(2, 2).unwrap();
        assert_eq!(s22.encode(&[1, 0]).unwrap(), 2); // 1·2 + 0
        assert_eq!(s22.encode(&[0, 0]).unwrap(), 0);
        let s13 = PointSpace::new(1, 3).unwrap();
        assert_eq!(s13.encode(&[2]).unwrap(), 2);
        assert!(s22.encode(&[2, 0]).is_err());
        assert!(s22.decode(4).is_err());
    }

    #[test]
    fn space_capacity_rejected() {
        assert!(PointSpace::new(17, 2).is_err()); // 2^17 > 2^16
        assert!(PointSpace::new(16, 2).is_ok());
    }

    #[test]
    fn hex_round_trip_examples() {
        let e = Element::from_u64(4, 0b1010).unwrap();
        assert_eq!(e.to_string(), "0xa:4");
        assert_eq!("0xa:4".parse::<Element>().unwrap(), e);
        assert!(Element::parse_hex("0x1f", 4).is_err());
        assert_eq!(Element::zeros(0).to_string(), "0x0:0");
    }

    #[test]
    fn subsets_ascend_in_mask_order() {
        let e = Element::from_u64(4, 0b1010).unwrap();
        let subs: Vec<u64> = e.subsets().unwrap().map(|s| s.as_u64()).collect();
        assert_eq!(subs, vec![0, 2, 8, 10]);
    }

    proptest! {
        #[test]
        fn compose_is_associative(dim in 1u16..5, seed in any::<u64>()) {
            let mut rng = crate::rng::SplitMix64::new(seed);
            let mut gen = || {
                Transformation::new((0..dim).map(|_| rng.below(dim as u64) as u16).collect()).unwrap()
            };
            let (a, b, c) = (gen(), gen(), gen());
            let left = Transformation::compose(&Transformation::compose(&a, &b).unwrap(), &c).unwrap();
            let right = Transformation::compose(&a, &Transformation::compose(&b, &c).unwrap()).unwrap();
            prop_assert_eq!(left, right);
        }

        #[test]
        fn identity_is_two_sided_unit(dim in 1u16..6, seed in any::<u64>()) {
            let mut rng = crate::rng::SplitMix64::new(seed);
            let t = Transformation::new((0..dim).map(|_| rng.below(dim as u64) as u16).collect()).unwrap();
            let id = Transformation::identity(dim);
            prop_assert_eq!(Transformation::compose(&t, &id).unwrap(), t.clone());
            prop_assert_eq!(Transformation::compose(&id, &t).unwrap(), t);
        }

        #[test]
        fn kernel_partition_is_a_partition(dim in 1u16..6, seed in any::<u64>()) {
            let mut rng = crate::rng::SplitMix64::new(seed);
            let t = Transformation::new((0..dim).map(|_| rng.below(dim as u64) as u16).collect()).unwrap();
            let blocks = t.kernel_partition();
            let mut seen = vec![false; dim as usize];
            for block in &blocks {
                for &i in block {
                    prop_assert!(!seen[i as usize], "blocks overlap");
                    seen[i as usize] = true;
                }
            }
            prop_assert!(seen.iter().all(|&s| s), "blocks do not cover");
            // ordered by minimum element
            let mins: Vec<u16> = blocks.iter().map(|b| *b.iter().min().unwrap()).collect();
            let mut sorted = mins.clone();
            sorted.sort_unstable();
            prop_assert_eq!(mins, sorted);
        }

        #[test]
        fn encode_decode_round_trip(dim in 0u16..5, base in 1u16..5, idx_seed in any::<u64>()) {
            let space = PointSpace::new(dim, base).unwrap();
            prop_assume!(space.point_count() <= 10_000);
            let idx = (idx_seed % space.point_count() as u64) as usize;
            let seq = space.decode(idx).unwrap();
            prop_assert_eq!(space.encode(&seq).unwrap(), idx);
        }

        #[test]
        fn element_hex_round_trip(len in 0usize..130, seed in any::<u64>()) {
            let mut rng = crate::rng::SplitMix64::new(seed);
            let mut e = Element::zeros(len);
            for i in 0..len {
                if rng.bool() {
                    e.set(i, true);
                }
            }
            let text = e.to_string();
            prop_assert_eq!(text.parse::<Element>().unwrap(), e);
        }

        #[test]
        fn boolean_laws_on_random_masks(len in 1usize..100, seed in any::<u64>()) {
            let mut rng = crate::rng::SplitMix64::new(seed);
            let mut gen = || {
                let mut e = Element::zeros(len);
                for i in 0..len {
                    if rng.bool() {
                        e.set(i, true);
                    }
                }
                e
            };
            let (x, y) = (gen(), gen());
            prop_assert_eq!(x.and(&y).unwrap(), y.and(&x).unwrap());
            prop_assert_eq!(x.or(&x.not()).unwrap(), Element::ones(len));
            prop_assert!(x.and(&y).unwrap().le(&x));
            prop_assert_eq!(x.not().not(), x);
        }
    }
}
