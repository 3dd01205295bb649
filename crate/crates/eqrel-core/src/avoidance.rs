//! Bases, basis minimization, avoidance-set membership and enumeration.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::relations::{embeds_cons, embeds_noncons, prefix_dominates, EqRel, ParseError};

/// Which embedding order an avoidance set is taken under.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OrderKind {
    #[serde(rename = "non-consecutive")]
    NonConsecutive,
    #[serde(rename = "consecutive")]
    Consecutive,
}

impl OrderKind {
    pub fn embeds(self, small: &EqRel, big: &EqRel) -> bool {
        match self {
            OrderKind::NonConsecutive => embeds_noncons(small, big),
            OrderKind::Consecutive => embeds_cons(small, big),
        }
    }
}

/// A finite antichain of forbidden relations together with the order it is
/// taken under. Construction minimizes the raw set, so the avoidance set is
/// unchanged and the antichain property holds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Basis {
    elements: Vec<EqRel>,
    order: OrderKind,
}

impl Basis {
    /// Keeps only the order-minimal elements of `raw`. `Av` of the result
    /// equals `Av` of the input. Under the non-consecutive order two
    /// distinct canonical forms can embed into each other (equal class
    /// sizes); of such a group the lexicographically least survives.
    pub fn minimize(raw: impl IntoIterator<Item = EqRel>, order: OrderKind) -> Basis {
        let mut elements: Vec<EqRel> = raw.into_iter().collect();
        elements.sort_unstable();
        elements.dedup();
        let minimal: Vec<EqRel> = elements
            .iter()
            .filter(|r| {
                !elements
                    .iter()
                    .any(|s| s != *r && order.embeds(s, r) && (!order.embeds(r, s) || s < *r))
            })
            .cloned()
            .collect();
        Basis {
            elements: minimal,
            order,
        }
    }

    pub fn empty(order: OrderKind) -> Basis {
        Basis {
            elements: Vec::new(),
            order,
        }
    }

    pub fn order(&self) -> OrderKind {
        self.order
    }

    pub fn elements(&self) -> &[EqRel] {
        &self.elements
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Maximum length over the elements; `None` for the empty basis.
    pub fn max_len(&self) -> Option<usize> {
        self.elements.iter().map(EqRel::len).max()
    }

    /// True when no basis element embeds into `r` under the basis order.
    pub fn avoids(&self, r: &EqRel) -> bool {
        !self.elements.iter().any(|b| self.order.embeds(b, r))
    }

    /// All canonical relations of length exactly `n` avoiding this basis, in
    /// lexicographic RGS order.
    ///
    /// Consecutive order: incremental RGS extension, checking only the
    /// windows that end at each newly added point. Non-consecutive order:
    /// the order depends only on class sizes, so one representative per
    /// admissible class-size sequence is produced, classes materialized as
    /// contiguous blocks.
    pub fn enumerate(&self, n: usize) -> Vec<EqRel> {
        assert!(n >= 1);
        match self.order {
            OrderKind::Consecutive => {
                let mut out = Vec::new();
                let mut rgs = vec![1u32];
                if self.suffix_ok(&rgs) {
                    self.extend_cons(&mut rgs, n, &mut out);
                }
                out
            }
            OrderKind::NonConsecutive => {
                let mut out = Vec::new();
                let mut parts = Vec::new();
                self.extend_partition(&mut parts, n as u32, n as u32, &mut out);
                out
            }
        }
    }

    fn extend_cons(&self, rgs: &mut Vec<u32>, n: usize, out: &mut Vec<EqRel>) {
        if rgs.len() == n {
            out.push(EqRel::from_rgs(rgs.clone()).expect("valid rgs"));
            return;
        }
        let max = *rgs.iter().max().expect("nonempty");
        for label in 1..=max + 1 {
            rgs.push(label);
            if self.suffix_ok(rgs) {
                self.extend_cons(rgs, n, out);
            }
            rgs.pop();
        }
    }

    /// Checks the windows ending at the last point against every basis
    /// element; earlier windows were checked when their endpoint was added.
    fn suffix_ok(&self, rgs: &[u32]) -> bool {
        let len = rgs.len();
        for b in &self.elements {
            let w = b.len();
            if w <= len && crate::relations::relabel(&rgs[len - w..]) == b.rgs() {
                return false;
            }
        }
        true
    }

    /// Weakly decreasing class sizes summing to `remaining`, first part at
    /// most `cap`, generated in decreasing-lex order so that the block
    /// materializations come out in ascending RGS order.
    fn extend_partition(
        &self,
        parts: &mut Vec<u32>,
        remaining: u32,
        cap: u32,
        out: &mut Vec<EqRel>,
    ) {
        if remaining == 0 {
            // Admissible iff no basis element's size sequence prefix-dominates it.
            let seq = crate::relations::ClassSizeSeq::new(parts.clone());
            if !self
                .elements
                .iter()
                .any(|b| prefix_dominates(&b.class_sizes(), &seq))
            {
                out.push(blocks(parts));
            }
            return;
        }
        let mut first = cap.min(remaining);
        while first >= 1 {
            parts.push(first);
            self.extend_partition(parts, remaining - first, first, out);
            parts.pop();
            first -= 1;
        }
    }
}

/// Materializes a class-size sequence as contiguous blocks, e.g. (3, 2) as
/// `|1 2 3|4 5|`.
fn blocks(parts: &[u32]) -> EqRel {
    let mut rgs = Vec::new();
    for (i, &p) in parts.iter().enumerate() {
        for _ in 0..p {
            rgs.push(i as u32 + 1);
        }
    }
    EqRel::from_rgs(rgs).expect("valid rgs")
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{file}:{line}: {source}")]
pub struct BasisFileError {
    pub file: String,
    pub line: usize,
    #[source]
    pub source: ParseError,
}

/// Parses a basis file: one relation per line in bar or RGS notation, `#`
/// starts a comment line, blank lines ignored. The order is not stored in
/// the file.
pub fn parse_basis_text(file: &str, text: &str) -> Result<Vec<EqRel>, BasisFileError> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        match EqRel::parse(line) {
            Ok(rel) => out.push(rel),
            Err(source) => {
                return Err(BasisFileError {
                    file: file.to_string(),
                    line: idx + 1,
                    source,
                })
            }
        }
    }
    Ok(out)
}
