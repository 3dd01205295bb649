//! Shared fixtures for the benchmarks.

use eqrel_core::{Basis, EqRel, OrderKind};

pub fn rel(text: &str) -> EqRel {
    EqRel::parse(text).unwrap()
}

pub fn basis(texts: &[&str], order: OrderKind) -> Basis {
    Basis::minimize(texts.iter().map(|t| rel(t)), order)
}

/// A window-length-4 basis whose graph carries cycles, branching and an
/// ambiguous vertex; a representative mid-size workload.
pub fn window_four_basis() -> Basis {
    let kept = [
        "|1 2 3 4|",
        "|1 2 3|4|",
        "|1|2 4|3|",
        "|1 3 4|2|",
        "|1|2 3|4|",
        "|1 2 4|3|",
    ];
    let keep: Vec<EqRel> = kept.iter().map(|t| rel(t)).collect();
    let all = Basis::empty(OrderKind::Consecutive).enumerate(4);
    Basis::minimize(
        all.into_iter().filter(|x| !keep.contains(x)),
        OrderKind::Consecutive,
    )
}
