//! Shared fixtures for the integration suites.
#![allow(dead_code)] // each test binary uses its own subset

use eqrel_core::avoidance::Basis;
use eqrel_core::{EqRel, OrderKind};

pub fn r(text: &str) -> EqRel {
    EqRel::parse(text).unwrap()
}

pub fn basis_of(texts: &[&str], order: OrderKind) -> Basis {
    Basis::minimize(texts.iter().map(|t| r(t)), order)
}

/// All relations of length `n`, by an enumeration independent of the crate:
/// plain recursion over restricted-growth strings.
pub fn all_relations(n: usize) -> Vec<EqRel> {
    fn rec(rgs: &mut Vec<u32>, n: usize, out: &mut Vec<EqRel>) {
        if rgs.len() == n {
            out.push(EqRel::from_rgs(rgs.clone()).unwrap());
            return;
        }
        let max = rgs.iter().copied().max().unwrap_or(0);
        for label in 1..=max + 1 {
            rgs.push(label);
            rec(rgs, n, out);
            rgs.pop();
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), n, &mut out);
    out
}

pub fn relations_up_to(n: usize) -> Vec<EqRel> {
    (1..=n).flat_map(all_relations).collect()
}

/// The eight relations of length at most three; subsets of these form the
/// exhaustive basis sweep.
pub fn sweep_universe() -> Vec<EqRel> {
    relations_up_to(3)
}

/// Every subset of the sweep universe as a minimized basis.
pub fn sweep_bases(order: OrderKind) -> Vec<Basis> {
    let universe = sweep_universe();
    (0u32..1 << universe.len())
        .map(|mask| {
            Basis::minimize(
                universe
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask & (1 << i) != 0)
                    .map(|(_, r)| r.clone()),
                order,
            )
        })
        .collect()
}

/// `Eq_n` minus the kept patterns, as a consecutive-order basis.
pub fn complement_basis(n: usize, kept: &[&str]) -> Basis {
    let keep: Vec<EqRel> = kept.iter().map(|t| r(t)).collect();
    Basis::minimize(
        all_relations(n).into_iter().filter(|x| !keep.contains(x)),
        OrderKind::Consecutive,
    )
}

/// The basis whose factor graph keeps the six length-4 patterns drawn in
/// the six-vertex golden graph.
pub fn six_pattern_complement() -> Basis {
    complement_basis(
        4,
        &[
            "|1 2 3 4|",
            "|1 2 3|4|",
            "|1|2 4|3|",
            "|1 3 4|2|",
            "|1|2 3|4|",
            "|1 2 4|3|",
        ],
    )
}

/// The basis keeping `|1|2 3 4|` and `|1 2 3|4|`; its coloured factor graph
/// is the twelve-vertex golden example.
pub fn two_vertex_complement() -> Basis {
    complement_basis(4, &["|1|2 3 4|", "|1 2 3|4|"])
}

/// The basis keeping `|1|2 4|3|`, `|1 3|2 4|`, `|1 3|2|4|`; its fibers
/// branch at the one ambiguous vertex.
pub fn branching_complement() -> Basis {
    complement_basis(4, &["|1|2 4|3|", "|1 3|2 4|", "|1 3|2|4|"])
}

/// Runs one acceptance criterion, printing its pass/fail line before
/// panicking on failure.
pub fn check(criterion: &str, body: impl FnOnce() -> Result<(), String>) {
    let outcome = body();
    match &outcome {
        Ok(()) => println!("acceptance {criterion}: pass"),
        Err(detail) => println!("acceptance {criterion}: FAIL - {detail}"),
    }
    if let Err(detail) = outcome {
        panic!("{criterion} failed: {detail}");
    }
}
