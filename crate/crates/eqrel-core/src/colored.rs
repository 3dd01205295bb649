//! Coloured equivalence relations and the coloured factor graph.
//!
//! A colouring injects the classes of a relation into `1..=k`. For bounded
//! avoidance sets (no special vertex on a cycle) the coloured factor graph
//! on all `k`-colourings of the window-length members has a bijective
//! path/relation correspondence, which removes the branching the uncoloured
//! graph suffers at ambiguous vertices. This module is verification
//! machinery: the decision procedures do not depend on it at runtime.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::factor_graph::FactorGraph;
use crate::relations::EqRel;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ColorError {
    #[error("colouring must assign every class exactly one colour")]
    WrongArity,
    #[error("colouring must be injective")]
    NotInjective,
    #[error("colour {0} outside 1..=k")]
    ColorOutOfRange(u32),
    #[error("operands carry different colour bounds: {0} vs {1}")]
    MismatchedBound(u32, u32),
    #[error("avoidance set is unbounded: a special vertex lies on a cycle")]
    Unbounded,
    #[error("relation of length {len} is shorter than the window length {b}")]
    TooShort { len: usize, b: usize },
    #[error("coloured window at offset {0} is not a vertex")]
    NotAVertex(usize),
    #[error("step {from} -> {to} is not an edge")]
    NotAnEdge { from: usize, to: usize },
    #[error("a path must contain at least one vertex")]
    EmptyPath,
}

/// A relation together with an injective colouring of its classes into
/// `1..=k`. Equality is canonical: same pattern, same colours per class.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ColoredEqRel {
    base: EqRel,
    /// Colour of class label `i + 1`.
    colors: Vec<u32>,
    k: u32,
}

impl ColoredEqRel {
    pub fn new(base: EqRel, colors: Vec<u32>, k: u32) -> Result<Self, ColorError> {
        if colors.len() != base.class_count() as usize {
            return Err(ColorError::WrongArity);
        }
        if let Some(&c) = colors.iter().find(|&&c| c == 0 || c > k) {
            return Err(ColorError::ColorOutOfRange(c));
        }
        let mut seen = colors.clone();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != colors.len() {
            return Err(ColorError::NotInjective);
        }
        Ok(ColoredEqRel { base, colors, k })
    }

    pub fn base(&self) -> &EqRel {
        &self.base
    }

    pub fn len(&self) -> usize {
        self.base.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn bound(&self) -> u32 {
        self.k
    }

    pub fn color_of_class(&self, label: u32) -> u32 {
        self.colors[label as usize - 1]
    }

    pub fn color_of_point(&self, point: usize) -> u32 {
        self.color_of_class(self.base.class_of(point))
    }

    /// Restriction to a window, classes renormalized, colours carried over.
    pub fn restrict(&self, lo: usize, hi: usize) -> ColoredEqRel {
        let window = self.base.restrict(lo, hi).expect("window in range");
        let colors = (1..=window.class_count())
            .map(|new_label| {
                let point = window
                    .class_members(new_label)
                    .into_iter()
                    .next()
                    .expect("nonempty class");
                self.color_of_point(lo + point - 1)
            })
            .collect();
        ColoredEqRel {
            base: window,
            colors,
            k: self.k,
        }
    }
}

impl std::fmt::Display for ColoredEqRel {
    /// Bar notation with colour subscripts per class, e.g. `|1 2|_1|3|_2`.
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for label in 1..=self.base.class_count() {
            write!(f, "|")?;
            let members = self.base.class_members(label);
            let text: Vec<String> = members.iter().map(|p| p.to_string()).collect();
            write!(f, "{}", text.join(" "))?;
            write!(f, "|_{}", self.color_of_class(label))?;
        }
        Ok(())
    }
}

/// Colour-respecting consecutive embedding: some window of `big` equals
/// `small` as a coloured relation.
pub fn embeds_colored(small: &ColoredEqRel, big: &ColoredEqRel) -> Result<bool, ColorError> {
    if small.k != big.k {
        return Err(ColorError::MismatchedBound(small.k, big.k));
    }
    let (n, m) = (small.len(), big.len());
    if n > m {
        return Ok(false);
    }
    Ok((1..=m - n + 1).any(|p| big.restrict(p, p + n - 1) == *small))
}

/// Least upper bound on the class count over the avoidance set, or `None`
/// when the set is unbounded (a special vertex lies on a cycle). Members of
/// window length or longer realize `classes(start vertex) + special visits`
/// along their walk; shorter members are enumerated directly.
pub fn class_count_bound(g: &FactorGraph) -> Option<u32> {
    if g.special_vertex_in_cycle().is_some() {
        return None;
    }
    let n = g.vertex_count();
    let mut f: Vec<u32> = (0..n).map(|v| g.class_count_of(v)).collect();
    // Specials are never on cycles here, so the fixpoint is finite.
    loop {
        let mut changed = false;
        for v in 0..n {
            for &u in g.predecessors(v) {
                let via = f[u] + u32::from(g.is_special(v));
                if via > f[v] {
                    f[v] = via;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    let long = f.iter().copied().max().unwrap_or(0);
    let short = (1..g.window_len())
        .flat_map(|len| g.basis().enumerate(len))
        .map(|r| r.class_count())
        .max()
        .unwrap_or(0);
    Some(long.max(short))
}

#[derive(Debug, Clone)]
pub struct ColoredFactorGraph {
    b: usize,
    k: u32,
    vertices: Vec<ColoredEqRel>,
    index: BTreeMap<ColoredEqRel, usize>,
    out: Vec<Vec<usize>>,
}

impl ColoredFactorGraph {
    /// Builds the coloured factor graph on all injective `k`-colourings of
    /// the uncoloured vertices, with `k` the computed class-count bound.
    pub fn build(g: &FactorGraph) -> Result<ColoredFactorGraph, ColorError> {
        let k = class_count_bound(g).ok_or(ColorError::Unbounded)?;
        let mut vertices = Vec::new();
        for v in g.vertices() {
            let t = v.class_count();
            let mut colors = Vec::new();
            injections(t, k, &mut colors, &mut |c| {
                vertices.push(ColoredEqRel {
                    base: v.clone(),
                    colors: c.to_vec(),
                    k,
                });
            });
        }
        vertices.sort_unstable();
        let index: BTreeMap<ColoredEqRel, usize> = vertices.iter().cloned().zip(0..).collect();
        let b = g.window_len();
        let n = vertices.len();
        let mut out = vec![Vec::new(); n];
        if b >= 2 {
            let suffixes: Vec<ColoredEqRel> = vertices.iter().map(|v| v.restrict(2, b)).collect();
            let prefixes: Vec<ColoredEqRel> =
                vertices.iter().map(|v| v.restrict(1, b - 1)).collect();
            for u in 0..n {
                for (v, prefix) in prefixes.iter().enumerate() {
                    if suffixes[u] == *prefix {
                        out[u].push(v);
                    }
                }
            }
        }
        Ok(ColoredFactorGraph {
            b,
            k,
            vertices,
            index,
            out,
        })
    }

    pub fn window_len(&self) -> usize {
        self.b
    }

    pub fn bound(&self) -> u32 {
        self.k
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertices(&self) -> &[ColoredEqRel] {
        &self.vertices
    }

    pub fn vertex(&self, v: usize) -> &ColoredEqRel {
        &self.vertices[v]
    }

    pub fn vertex_index(&self, r: &ColoredEqRel) -> Option<usize> {
        self.index.get(r).copied()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.out[u].binary_search(&v).is_ok()
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut e: Vec<(usize, usize)> = (0..self.vertex_count())
            .flat_map(|u| self.out[u].iter().map(move |&v| (u, v)))
            .collect();
        e.sort_unstable();
        e
    }

    pub fn edge_count(&self) -> usize {
        self.out.iter().map(Vec::len).sum()
    }

    pub fn is_path(&self, vertices: &[usize]) -> bool {
        !vertices.is_empty() && vertices.windows(2).all(|p| self.has_edge(p[0], p[1]))
    }

    pub fn has_in_out_cycle(&self) -> bool {
        let mut inc = vec![Vec::new(); self.vertex_count()];
        for (u, v) in self.edges() {
            inc[v].push(u);
        }
        crate::factor_graph::has_in_out_cycle_of(&self.out, &inc)
    }

    /// The coloured window walk of a coloured member of length at least `b`.
    pub fn path_of(&self, r: &ColoredEqRel) -> Result<Vec<usize>, ColorError> {
        if r.len() < self.b {
            return Err(ColorError::TooShort {
                len: r.len(),
                b: self.b,
            });
        }
        (1..=r.len() - self.b + 1)
            .map(|i| {
                let window = r.restrict(i, i + self.b - 1);
                self.index
                    .get(&window)
                    .copied()
                    .ok_or(ColorError::NotAVertex(i))
            })
            .collect()
    }

    /// The unique coloured relation whose walk is the given path. At each
    /// step the new point's class is forced: either the window ties it to
    /// earlier points, or its colour names an existing (necessarily
    /// inactive) class, or it opens a new class of that colour.
    pub fn relation_of(&self, path: &[usize]) -> Result<ColoredEqRel, ColorError> {
        if path.is_empty() {
            return Err(ColorError::EmptyPath);
        }
        for pair in path.windows(2) {
            if !self.has_edge(pair[0], pair[1]) {
                return Err(ColorError::NotAnEdge {
                    from: pair[0],
                    to: pair[1],
                });
            }
        }
        let mut current = self.vertices[path[0]].clone();
        for &v in &path[1..] {
            let vertex = &self.vertices[v];
            let pattern = vertex.base.rgs();
            let last_label = pattern[self.b - 1];
            let color = vertex.color_of_class(last_label);
            let mut rgs = current.base.rgs().to_vec();
            let mut colors = current.colors.clone();
            if let Some(j) = (1..self.b).find(|&j| pattern[j - 1] == last_label) {
                // Tied to an earlier point of the window.
                let q = rgs.len() + 1 - self.b + j;
                rgs.push(rgs[q - 1]);
            } else if let Some(label) = colors.iter().position(|&c| c == color) {
                rgs.push(label as u32 + 1);
            } else {
                rgs.push(colors.len() as u32 + 1);
                colors.push(color);
            }
            current = ColoredEqRel {
                base: EqRel::from_rgs(rgs).expect("valid rgs"),
                colors,
                k: self.k,
            };
            debug_assert_eq!(
                current.restrict(current.len() - self.b + 1, current.len()),
                *vertex
            );
        }
        Ok(current)
    }

    /// Deterministic DOT rendering with colour subscripts in labels and
    /// wedged fills from a fixed 12-colour palette.
    pub fn to_dot(&self) -> String {
        const PALETTE: [&str; 12] = [
            "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
            "#bcbd22", "#17becf", "#aec7e8", "#ffbb78",
        ];
        let mut s =
            String::from("digraph colored_factor_graph {\n  rankdir=LR;\n  node [shape=ellipse, style=wedged];\n");
        for (i, v) in self.vertices.iter().enumerate() {
            let fills: Vec<&str> = v
                .colors
                .iter()
                .map(|&c| PALETTE[(c as usize - 1) % PALETTE.len()])
                .collect();
            let _ = writeln!(
                s,
                "  v{i} [label=\"{v}\", fillcolor=\"{}\"];",
                fills.join(":")
            );
        }
        for (u, v) in self.edges() {
            let _ = writeln!(s, "  v{u} -> v{v};");
        }
        s.push_str("}\n");
        s
    }
}

/// All injective maps `1..=t -> 1..=k` in lexicographic order.
fn injections(t: u32, k: u32, prefix: &mut Vec<u32>, emit: &mut impl FnMut(&[u32])) {
    if prefix.len() == t as usize {
        emit(prefix);
        return;
    }
    for c in 1..=k {
        if !prefix.contains(&c) {
            prefix.push(c);
            injections(t, k, prefix, emit);
            prefix.pop();
        }
    }
}

/// Every injective `k`-colouring of a relation, ascending.
pub fn colorings(r: &EqRel, k: u32) -> Vec<ColoredEqRel> {
    let mut out = Vec::new();
    let mut prefix = Vec::new();
    injections(r.class_count(), k, &mut prefix, &mut |c| {
        out.push(ColoredEqRel {
            base: r.clone(),
            colors: c.to_vec(),
            k,
        });
    });
    out
}
