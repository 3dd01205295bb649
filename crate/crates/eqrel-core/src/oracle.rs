//! Independent brute-force implementations used in tests, cross-checks and
//! witness verification.
//!
//! Nothing here calls the optimized order predicates it is meant to check:
//! embeddings are found by explicit search over injections or windows, and
//! joint extensions by explicit enumeration of candidate relations.

use std::time::{Duration, Instant};

use thiserror::Error;

use crate::avoidance::{Basis, OrderKind};
use crate::factor_graph::{FactorGraph, Path};
use crate::relations::EqRel;

/// Bound for a joint-extension search.
#[derive(Debug, Clone)]
pub struct SearchBound {
    pub max_length: usize,
    pub deadline: Option<Duration>,
}

impl SearchBound {
    pub fn length(max_length: usize) -> Self {
        SearchBound {
            max_length,
            deadline: None,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("search deadline exceeded")]
pub struct DeadlineExceeded;

/// Embedding by exhaustive search: windows for the consecutive order, class
/// assignments (equivalently, injections) for the non-consecutive order.
pub fn embeds_bruteforce(small: &EqRel, big: &EqRel, order: OrderKind) -> bool {
    if small.len() > big.len() {
        return false;
    }
    match order {
        OrderKind::Consecutive => (1..=big.len() - small.len() + 1).any(|k| {
            (1..=small.len()).all(|i| {
                (1..=small.len()).all(|j| small.related(i, j) == big.related(k + i - 1, k + j - 1))
            })
        }),
        OrderKind::NonConsecutive => {
            // An injection preserving the relation exactly amounts to an
            // injective map from small classes to big classes that never
            // overfills a target.
            let small_sizes: Vec<u32> = (1..=small.class_count())
                .map(|l| small.class_members(l).len() as u32)
                .collect();
            let big_sizes: Vec<u32> = (1..=big.class_count())
                .map(|l| big.class_members(l).len() as u32)
                .collect();
            fn assign(
                small_sizes: &[u32],
                big_sizes: &[u32],
                used: &mut Vec<bool>,
                i: usize,
            ) -> bool {
                if i == small_sizes.len() {
                    return true;
                }
                for j in 0..big_sizes.len() {
                    if !used[j] && small_sizes[i] <= big_sizes[j] {
                        used[j] = true;
                        if assign(small_sizes, big_sizes, used, i + 1) {
                            used[j] = false;
                            return true;
                        }
                        used[j] = false;
                    }
                }
                false
            }
            let mut used = vec![false; big_sizes.len()];
            assign(&small_sizes, &big_sizes, &mut used, 0)
        }
    }
}

/// True when the relations are pairwise incomparable in both directions
/// under `order`.
pub fn verify_antichain(rs: &[EqRel], order: OrderKind) -> bool {
    for i in 0..rs.len() {
        for j in 0..rs.len() {
            if i != j && embeds_bruteforce(&rs[i], &rs[j], order) {
                return false;
            }
        }
    }
    true
}

/// Searches for a joint extension of `a` and `b` inside `Av(basis)`:
/// a relation `z` avoiding the basis with both `a` and `b` embedding into it
/// under the basis order. Candidates are enumerated in increasing length and,
/// within a length, lexicographic RGS order, pruning prefixes that already
/// contain a basis element or can no longer contain `a` and `b`; the first
/// hit is therefore the minimal witness. `Ok(None)` means no joint extension
/// within the bound.
pub fn jep_search(
    a: &EqRel,
    b: &EqRel,
    basis: &Basis,
    bound: &SearchBound,
) -> Result<Option<EqRel>, DeadlineExceeded> {
    let start = Instant::now();
    let lo = a.len().max(b.len());
    for n in lo..=bound.max_length {
        let mut search = JepSearch {
            a,
            b,
            basis,
            n,
            start,
            deadline: bound.deadline,
        };
        let mut rgs = vec![1u32];
        if let Some(z) = search.dfs(&mut rgs)? {
            return Ok(Some(z));
        }
    }
    Ok(None)
}

struct JepSearch<'a> {
    a: &'a EqRel,
    b: &'a EqRel,
    basis: &'a Basis,
    n: usize,
    start: Instant,
    deadline: Option<Duration>,
}

impl JepSearch<'_> {
    fn dfs(&mut self, rgs: &mut Vec<u32>) -> Result<Option<EqRel>, DeadlineExceeded> {
        if let Some(limit) = self.deadline {
            if self.start.elapsed() > limit {
                return Err(DeadlineExceeded);
            }
        }
        if !self.viable(rgs) {
            return Ok(None);
        }
        if rgs.len() == self.n {
            let z = EqRel::from_rgs(rgs.clone()).expect("valid rgs");
            let order = self.basis.order();
            if embeds_bruteforce(self.a, &z, order)
                && embeds_bruteforce(self.b, &z, order)
                && self
                    .basis
                    .elements()
                    .iter()
                    .all(|f| !embeds_bruteforce(f, &z, order))
            {
                return Ok(Some(z));
            }
            return Ok(None);
        }
        let max = *rgs.iter().max().expect("nonempty");
        for label in 1..=max + 1 {
            rgs.push(label);
            if let Some(z) = self.dfs(rgs)? {
                return Ok(Some(z));
            }
            rgs.pop();
        }
        Ok(None)
    }

    /// Prunes a partial RGS that already contains a forbidden relation or
    /// can no longer contain `a` and `b`.
    fn viable(&self, rgs: &[u32]) -> bool {
        let len = rgs.len();
        match self.basis.order() {
            OrderKind::Consecutive => {
                // Forbidden windows never disappear when the prefix grows.
                for f in self.basis.elements() {
                    let w = f.len();
                    if w <= len && crate::relations::relabel(&rgs[len - w..]) == f.rgs() {
                        return false;
                    }
                }
                self.window_feasible(self.a, rgs) && self.window_feasible(self.b, rgs)
            }
            OrderKind::NonConsecutive => {
                let partial = EqRel::from_rgs(rgs.to_vec()).expect("valid rgs");
                for f in self.basis.elements() {
                    if embeds_bruteforce(f, &partial, OrderKind::NonConsecutive) {
                        return false;
                    }
                }
                let budget = (self.n - len) as u32;
                self.sizes_feasible(self.a, &partial, budget)
                    && self.sizes_feasible(self.b, &partial, budget)
            }
        }
    }

    /// Consecutive case: `x` must sit in a window that is either already
    /// complete in the prefix or overlaps the unwritten suffix compatibly.
    fn window_feasible(&self, x: &EqRel, rgs: &[u32]) -> bool {
        let len = rgs.len();
        let w = x.len();
        if w > self.n {
            return false;
        }
        let last_start = self.n - w + 1;
        for p in 1..=last_start.min(len) {
            let have = (len - p + 1).min(w);
            if crate::relations::relabel(&rgs[p - 1..p - 1 + have])
                == crate::relations::relabel(&x.rgs()[..have])
            {
                return true;
            }
        }
        // A window starting beyond the prefix is unconstrained so far.
        last_start > len
    }

    /// Non-consecutive case: each class of `x` needs its own target class;
    /// targets may grow using the remaining point budget or be opened fresh.
    fn sizes_feasible(&self, x: &EqRel, partial: &EqRel, budget: u32) -> bool {
        let mut need: Vec<u32> = x.class_sizes().entries().to_vec();
        let mut have: Vec<u32> = partial.class_sizes().entries().to_vec();
        // Largest demands claim the largest targets; shortfalls draw on the
        // budget, as do classes beyond the targets we already have.
        have.resize(need.len().max(have.len()), 0);
        need.resize(have.len(), 0);
        let mut spend = 0u32;
        for (n, h) in need.iter().zip(&have) {
            spend += n.saturating_sub(*h);
        }
        spend <= budget
    }
}

/// Exact fiber of a path: all relations of the matching length whose window
/// walk equals `p`, by full enumeration and filtering.
pub fn sigma_bruteforce(p: &Path, g: &FactorGraph) -> Vec<EqRel> {
    let n = g.window_len() + p.len_edges();
    g.basis()
        .enumerate(n)
        .into_iter()
        .filter(|r| g.path_of(r).as_ref().ok() == Some(p))
        .collect()
}
