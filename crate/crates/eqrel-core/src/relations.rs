//! Canonical finite equivalence relations and the pairwise order predicates.
//!
//! A relation on points `1..=n` is stored as a restricted-growth string
//! (RGS): entry `i` is the class label of point `i + 1`, classes numbered by
//! first appearance. Two relations are isomorphic under contiguous
//! class-preserving bijections exactly when their RGS coincide, so `EqRel`
//! equality is literal equality and windows canonicalize by slice-and-relabel.

use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("empty relation text")]
    Empty,
    #[error("unterminated bar notation after `{tail}`")]
    Unterminated { tail: String },
    #[error("empty class in bar notation")]
    EmptyClass,
    #[error("invalid point token `{token}`")]
    InvalidPoint { token: String },
    #[error("point {point} appears more than once")]
    DuplicatePoint { point: u32 },
    #[error("points must be exactly 1..={n}; `{point}` is out of place")]
    PointOutOfRange { point: u32, n: usize },
    #[error("restricted-growth violation: entry `{value}` at position {position}")]
    InvalidGrowth { value: u32, position: usize },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("window {lo}..={hi} out of range for relation of length {len}")]
pub struct WindowError {
    pub lo: usize,
    pub hi: usize,
    pub len: usize,
}

/// A finite equivalence relation on `1..=n` in canonical restricted-growth
/// form. Always nonempty.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EqRel {
    rgs: Vec<u32>,
}

impl EqRel {
    /// Builds a relation from a restricted-growth string.
    pub fn from_rgs(rgs: Vec<u32>) -> Result<Self, ParseError> {
        if rgs.is_empty() {
            return Err(ParseError::Empty);
        }
        let mut max = 0u32;
        for (i, &v) in rgs.iter().enumerate() {
            if v == 0 || v > max + 1 {
                return Err(ParseError::InvalidGrowth {
                    value: v,
                    position: i + 1,
                });
            }
            max = max.max(v);
        }
        Ok(EqRel { rgs })
    }

    /// Parses bar notation `|1 4|2|3|` or a bare RGS `1 2 3 2`.
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let text = text.trim();
        if text.is_empty() {
            return Err(ParseError::Empty);
        }
        if text.starts_with('|') {
            Self::parse_bars(text)
        } else {
            let mut rgs = Vec::new();
            for token in text.split_whitespace() {
                let v: u32 = token.parse().map_err(|_| ParseError::InvalidPoint {
                    token: token.to_string(),
                })?;
                rgs.push(v);
            }
            Self::from_rgs(rgs)
        }
    }

    fn parse_bars(text: &str) -> Result<Self, ParseError> {
        let body = &text[1..];
        let Some(body) = body.strip_suffix('|') else {
            let tail = body.rsplit('|').next().unwrap_or(body);
            return Err(ParseError::Unterminated {
                tail: tail.trim().to_string(),
            });
        };
        let mut classes: Vec<Vec<u32>> = Vec::new();
        for segment in body.split('|') {
            let mut class = Vec::new();
            for token in segment.split_whitespace() {
                let point: u32 = token.parse().map_err(|_| ParseError::InvalidPoint {
                    token: token.to_string(),
                })?;
                class.push(point);
            }
            if class.is_empty() {
                return Err(ParseError::EmptyClass);
            }
            classes.push(class);
        }
        let n: usize = classes.iter().map(Vec::len).sum();
        let mut label_of = vec![0u32; n];
        for (idx, class) in classes.iter().enumerate() {
            for &point in class {
                if point == 0 || point as usize > n {
                    return Err(ParseError::PointOutOfRange { point, n });
                }
                let slot = &mut label_of[point as usize - 1];
                if *slot != 0 {
                    return Err(ParseError::DuplicatePoint { point });
                }
                *slot = idx as u32 + 1;
            }
        }
        // Relabel in order of first appearance to obtain the canonical RGS.
        Ok(EqRel {
            rgs: relabel(&label_of),
        })
    }

    pub fn len(&self) -> usize {
        self.rgs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn rgs(&self) -> &[u32] {
        &self.rgs
    }

    /// Number of equivalence classes.
    pub fn class_count(&self) -> u32 {
        *self.rgs.iter().max().expect("nonempty")
    }

    /// Class label of a point (1-based).
    pub fn class_of(&self, point: usize) -> u32 {
        self.rgs[point - 1]
    }

    /// Points of the class with the given label, ascending.
    pub fn class_members(&self, label: u32) -> Vec<usize> {
        (1..=self.len())
            .filter(|&p| self.rgs[p - 1] == label)
            .collect()
    }

    pub fn related(&self, i: usize, j: usize) -> bool {
        self.rgs[i - 1] == self.rgs[j - 1]
    }

    /// Restriction to the window `lo..=hi` (1-based, inclusive), renormalized
    /// onto `1..=(hi - lo + 1)`.
    pub fn restrict(&self, lo: usize, hi: usize) -> Result<EqRel, WindowError> {
        if lo < 1 || lo > hi || hi > self.len() {
            return Err(WindowError {
                lo,
                hi,
                len: self.len(),
            });
        }
        Ok(EqRel {
            rgs: relabel(&self.rgs[lo - 1..hi]),
        })
    }

    /// Class sizes in weakly decreasing order.
    pub fn class_sizes(&self) -> ClassSizeSeq {
        let mut counts = vec![0u32; self.class_count() as usize];
        for &label in &self.rgs {
            counts[label as usize - 1] += 1;
        }
        counts.sort_unstable_by(|a, b| b.cmp(a));
        ClassSizeSeq(counts)
    }

    /// True when every class has the same size.
    pub fn is_uniform(&self) -> bool {
        let sizes = self.class_sizes();
        sizes.entries().iter().all(|&s| s == sizes.entries()[0])
    }
}

/// Canonical relabeling of an arbitrary label sequence by first appearance.
pub(crate) fn relabel(labels: &[u32]) -> Vec<u32> {
    let mut map: Vec<(u32, u32)> = Vec::new();
    let mut out = Vec::with_capacity(labels.len());
    for &l in labels {
        let new = match map.iter().find(|&&(old, _)| old == l) {
            Some(&(_, new)) => new,
            None => {
                let new = map.len() as u32 + 1;
                map.push((l, new));
                new
            }
        };
        out.push(new);
    }
    out
}

impl fmt::Display for EqRel {
    /// Bar notation with classes ordered by smallest element, e.g. `|1 4|2|3|`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Label order is first-appearance order, which is smallest-element order.
        for label in 1..=self.class_count() {
            write!(f, "|")?;
            let mut first = true;
            for point in self.class_members(label) {
                if !first {
                    write!(f, " ")?;
                }
                write!(f, "{point}")?;
                first = false;
            }
        }
        write!(f, "|")
    }
}

impl Serialize for EqRel {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for EqRel {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        EqRel::parse(&text).map_err(D::Error::custom)
    }
}

/// Class sizes of a relation, weakly decreasing.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ClassSizeSeq(Vec<u32>);

impl ClassSizeSeq {
    /// Sorts the entries decreasingly; rejects zero sizes.
    pub fn new(mut sizes: Vec<u32>) -> Self {
        assert!(!sizes.is_empty() && sizes.iter().all(|&s| s > 0));
        sizes.sort_unstable_by(|a, b| b.cmp(a));
        ClassSizeSeq(sizes)
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }
}

/// Prefix domination: `a` has at most as many entries and is pointwise below.
pub fn prefix_dominates(a: &ClassSizeSeq, b: &ClassSizeSeq) -> bool {
    a.0.len() <= b.0.len() && a.0.iter().zip(&b.0).all(|(x, y)| x <= y)
}

/// Domination: `a` embeds entrywise into a subsequence of `b`.
pub fn dominates(a: &ClassSizeSeq, b: &ClassSizeSeq) -> bool {
    let mut j = 0;
    for &x in &a.0 {
        loop {
            if j == b.0.len() {
                return false;
            }
            j += 1;
            if x <= b.0[j - 1] {
                break;
            }
        }
    }
    true
}

/// Consecutive embedding: some window of `big` has exactly the pattern of
/// `small`.
pub fn embeds_cons(small: &EqRel, big: &EqRel) -> bool {
    let (n, m) = (small.len(), big.len());
    if n > m {
        return false;
    }
    (1..=m - n + 1).any(|k| big.restrict(k, k + n - 1).expect("window in range") == *small)
}

/// Non-consecutive embedding, via prefix domination of the class-size
/// sequences. The injective-search characterization lives in the oracle
/// module and is checked against this one exhaustively in tests.
pub fn embeds_noncons(small: &EqRel, big: &EqRel) -> bool {
    prefix_dominates(&small.class_sizes(), &big.class_sizes())
}
