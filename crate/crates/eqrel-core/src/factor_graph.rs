//! The factor graph of an avoidance set under the consecutive order, and the
//! digraph structure tests the decision procedures reduce to.
//!
//! Vertices are the window-length members of the avoidance set; there is an
//! edge from `u` to `v` exactly when the last `b - 1` points of `u` form the
//! same pattern as the first `b - 1` points of `v`. Members of length at
//! least `b` correspond to walks via the sliding-window map; a walk has a
//! nonempty fiber of relations, with branching only at ambiguous vertices.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::avoidance::{Basis, OrderKind};
use crate::relations::{relabel, EqRel};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("factor graph requires the consecutive order")]
    WrongOrder,
    #[error("factor graph is undefined for the empty basis")]
    EmptyBasis,
    #[error("relation of length {len} is shorter than the window length {b}")]
    TooShort { len: usize, b: usize },
    #[error("relation `{0}` does not avoid the basis")]
    NotAvoiding(EqRel),
    #[error("step {from} -> {to} is not an edge")]
    NotAnEdge { from: usize, to: usize },
    #[error("a path must contain at least one vertex")]
    EmptyPath,
    #[error("vertex index {0} out of range")]
    BadVertex(usize),
    #[error("fiber holds more than {cap} relations")]
    FiberOverflow { cap: usize },
    #[error("bounded sweep exceeded {cap} steps")]
    SweepOverflow { cap: usize },
}

/// A walk in a factor graph; consecutive entries are always edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Path {
    vertices: Vec<usize>,
}

impl Path {
    pub fn new(g: &FactorGraph, vertices: Vec<usize>) -> Result<Path, GraphError> {
        if vertices.is_empty() {
            return Err(GraphError::EmptyPath);
        }
        for &v in &vertices {
            if v >= g.vertex_count() {
                return Err(GraphError::BadVertex(v));
            }
        }
        for pair in vertices.windows(2) {
            if !g.has_edge(pair[0], pair[1]) {
                return Err(GraphError::NotAnEdge {
                    from: pair[0],
                    to: pair[1],
                });
            }
        }
        Ok(Path { vertices })
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    /// Edge count; one less than the number of vertex visits.
    pub fn len_edges(&self) -> usize {
        self.vertices.len() - 1
    }

    /// Contiguous-subsequence test.
    pub fn is_subpath_of(&self, other: &Path) -> bool {
        let (a, b) = (&self.vertices, &other.vertices);
        if a.len() > b.len() {
            return false;
        }
        (0..=b.len() - a.len()).any(|k| &b[k..k + a.len()] == a.as_slice())
    }
}

/// Decomposition of a bicycle: an initial simple cycle, a connecting simple
/// path (junctions included), and a terminal simple cycle. Cycles are vertex
/// lists in traversal order without the closing repeat; either may be empty,
/// and the path may be absent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bicycle {
    pub initial: Vec<usize>,
    pub path: Vec<usize>,
    pub terminal: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct FactorGraph {
    basis: Basis,
    b: usize,
    vertices: Vec<EqRel>,
    index: BTreeMap<EqRel, usize>,
    out: Vec<Vec<usize>>,
    inc: Vec<Vec<usize>>,
    special: Vec<bool>,
    ambiguous: Vec<bool>,
    /// Class count of each vertex.
    classes: Vec<u32>,
    /// Class count among the last `b - 1` points of each vertex: the number
    /// of classes a fiber member ending at the vertex has among its top
    /// `b - 1` points, hence the threshold above which an inactive class
    /// exists.
    suffix_classes: Vec<u32>,
}

impl FactorGraph {
    /// Builds the factor graph of `Av(basis)`: vertices are the members of
    /// window length `b`, edges follow the overlap rule.
    pub fn build(basis: &Basis) -> Result<FactorGraph, GraphError> {
        if basis.order() != OrderKind::Consecutive {
            return Err(GraphError::WrongOrder);
        }
        let Some(b) = basis.max_len() else {
            return Err(GraphError::EmptyBasis);
        };
        let vertices = basis.enumerate(b);
        let n = vertices.len();
        let index: BTreeMap<EqRel, usize> = vertices.iter().cloned().zip(0..).collect();
        let mut out = vec![Vec::new(); n];
        let mut inc = vec![Vec::new(); n];
        if b >= 2 {
            let suffixes: Vec<EqRel> = vertices
                .iter()
                .map(|v| v.restrict(2, b).expect("window"))
                .collect();
            let prefixes: Vec<EqRel> = vertices
                .iter()
                .map(|v| v.restrict(1, b - 1).expect("window"))
                .collect();
            for u in 0..n {
                for v in 0..n {
                    if suffixes[u] == prefixes[v] {
                        out[u].push(v);
                        inc[v].push(u);
                    }
                }
            }
        }
        let special: Vec<bool> = vertices
            .iter()
            .map(|v| v.class_members(v.class_of(v.len())).len() == 1)
            .collect();
        let classes: Vec<u32> = vertices.iter().map(EqRel::class_count).collect();
        let suffix_classes: Vec<u32> = vertices
            .iter()
            .map(|v| {
                if b >= 2 {
                    v.restrict(2, b).expect("window").class_count()
                } else {
                    0
                }
            })
            .collect();
        let mut g = FactorGraph {
            basis: basis.clone(),
            b,
            vertices,
            index,
            out,
            inc,
            special,
            ambiguous: Vec::new(),
            classes,
            suffix_classes,
        };
        g.ambiguous = g.classify_ambiguous();
        Ok(g)
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    /// Window length `b`.
    pub fn window_len(&self) -> usize {
        self.b
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertices(&self) -> &[EqRel] {
        &self.vertices
    }

    pub fn vertex(&self, v: usize) -> &EqRel {
        &self.vertices[v]
    }

    pub fn vertex_index(&self, r: &EqRel) -> Option<usize> {
        self.index.get(r).copied()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.out[u].binary_search(&v).is_ok()
    }

    /// All edges, sorted.
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

    pub fn successors(&self, v: usize) -> &[usize] {
        &self.out[v]
    }

    pub fn predecessors(&self, v: usize) -> &[usize] {
        &self.inc[v]
    }

    pub fn is_special(&self, v: usize) -> bool {
        self.special[v]
    }

    pub fn is_ambiguous(&self, v: usize) -> bool {
        self.ambiguous[v]
    }

    pub fn class_count_of(&self, v: usize) -> u32 {
        self.classes[v]
    }

    /// The window walk of a member of length at least `b`.
    pub fn path_of(&self, r: &EqRel) -> Result<Path, GraphError> {
        if r.len() < self.b {
            return Err(GraphError::TooShort {
                len: r.len(),
                b: self.b,
            });
        }
        if !self.basis.avoids(r) {
            return Err(GraphError::NotAvoiding(r.clone()));
        }
        let vertices = (1..=r.len() - self.b + 1)
            .map(|i| {
                let window = r.restrict(i, i + self.b - 1).expect("window");
                *self
                    .index
                    .get(&window)
                    .expect("windows of members are vertices")
            })
            .collect();
        Ok(Path { vertices })
    }

    /// The fiber of a path: every relation whose window walk is the path,
    /// built left to right. Each step is forced unless the entered vertex is
    /// special, in which case the new point starts a new class or joins any
    /// inactive class. Errors out when the fiber exceeds `max_count`.
    pub fn relations_of(&self, p: &Path, max_count: usize) -> Result<Vec<EqRel>, GraphError> {
        let mut out = Vec::new();
        let mut builder = SigmaBuilder::start(self, p.vertices[0]);
        self.fiber_rec(&p.vertices[1..], &mut builder, max_count, &mut out)?;
        out.sort_unstable();
        Ok(out)
    }

    fn fiber_rec(
        &self,
        rest: &[usize],
        builder: &mut SigmaBuilder,
        max_count: usize,
        out: &mut Vec<EqRel>,
    ) -> Result<(), GraphError> {
        let Some((&v, tail)) = rest.split_first() else {
            if out.len() == max_count {
                return Err(GraphError::FiberOverflow { cap: max_count });
            }
            out.push(builder.current());
            return Ok(());
        };
        if self.special[v] {
            builder.push_new(self, v);
            self.fiber_rec(tail, builder, max_count, out)?;
            builder.pop();
            for label in builder.inactive_labels(self.b) {
                builder.push_join(self, v, label);
                self.fiber_rec(tail, builder, max_count, out)?;
                builder.pop();
            }
        } else {
            builder.push_forced(self, v);
            self.fiber_rec(tail, builder, max_count, out)?;
            builder.pop();
        }
        Ok(())
    }

    /// The single fiber member that opens a new class at every special
    /// visit. It attains the maximum class count over the fiber.
    pub fn max_class_relation_of(&self, p: &Path) -> EqRel {
        let mut builder = SigmaBuilder::start(self, p.vertices[0]);
        for &v in &p.vertices[1..] {
            if self.special[v] {
                builder.push_new(self, v);
            } else {
                builder.push_forced(self, v);
            }
        }
        builder.current()
    }

    /// Ambiguity of every vertex, by the max-class reduction: a fiber member
    /// ending at `mu` has an inactive class exactly when its class count
    /// exceeds the class count of `mu`'s last `b - 1` points, and the
    /// maximum class count reachable at `mu` is `classes(start) + (special
    /// visits after the start)`, propagated as a capped fixpoint.
    fn classify_ambiguous(&self) -> Vec<bool> {
        let n = self.vertex_count();
        let cap = self.b as u32 + 1;
        let mut reach = vec![vec![false; cap as usize + 1]; n];
        let mut queue: Vec<(usize, u32)> = Vec::new();
        for (v, row) in reach.iter_mut().enumerate() {
            let c = self.classes[v].min(cap);
            row[c as usize] = true;
            queue.push((v, c));
        }
        while let Some((u, c)) = queue.pop() {
            for &v in &self.out[u] {
                let c2 = (c + u32::from(self.special[v])).min(cap);
                if !reach[v][c2 as usize] {
                    reach[v][c2 as usize] = true;
                    queue.push((v, c2));
                }
            }
        }
        let best: Vec<u32> = reach
            .iter()
            .map(|row| {
                (0..=cap)
                    .rev()
                    .find(|&c| row[c as usize])
                    .expect("every vertex is reachable from itself")
            })
            .collect();
        (0..n)
            .map(|v| {
                self.special[v]
                    && self.inc[v]
                        .iter()
                        .any(|&mu| best[mu] > self.suffix_classes[mu])
            })
            .collect()
    }

    /// Ambiguity by the bounded walk sweep: for a special vertex with `t`
    /// classes, examine every walk of length at most `t * (n - 1)` ending at
    /// an in-neighbour and ask whether some fiber member has an inactive
    /// class. Exponential; kept as an independent cross-check of
    /// `classify_ambiguous`.
    pub fn ambiguous_by_bounded_sweep(&self, step_cap: usize) -> Result<Vec<bool>, GraphError> {
        let n = self.vertex_count();
        let mut steps = 0usize;
        let mut result = vec![false; n];
        for (nu, flag) in result.iter_mut().enumerate() {
            if !self.special[nu] {
                continue;
            }
            let limit = self.classes[nu] as usize * n.saturating_sub(1);
            for &mu in &self.inc[nu] {
                let mut walk = vec![mu];
                if self.sweep_walks(&mut walk, limit, step_cap, &mut steps)? {
                    *flag = true;
                    break;
                }
            }
        }
        Ok(result)
    }

    /// Extends `walk` backwards (front grows) up to `limit` edges; returns
    /// true as soon as some walk has a fiber member with an inactive class.
    fn sweep_walks(
        &self,
        walk: &mut Vec<usize>,
        limit: usize,
        step_cap: usize,
        steps: &mut usize,
    ) -> Result<bool, GraphError> {
        *steps += 1;
        if *steps > step_cap {
            return Err(GraphError::SweepOverflow { cap: step_cap });
        }
        if self.fiber_has_inactive(walk, step_cap, steps)? {
            return Ok(true);
        }
        if walk.len() - 1 == limit {
            return Ok(false);
        }
        let head = walk[0];
        for &prev in &self.inc[head] {
            walk.insert(0, prev);
            let hit = self.sweep_walks(walk, limit, step_cap, steps)?;
            walk.remove(0);
            if hit {
                return Ok(true);
            }
        }
        Ok(false)
    }

    fn fiber_has_inactive(
        &self,
        walk: &[usize],
        step_cap: usize,
        steps: &mut usize,
    ) -> Result<bool, GraphError> {
        fn rec(
            g: &FactorGraph,
            rest: &[usize],
            builder: &mut SigmaBuilder,
            step_cap: usize,
            steps: &mut usize,
        ) -> Result<bool, GraphError> {
            *steps += 1;
            if *steps > step_cap {
                return Err(GraphError::SweepOverflow { cap: step_cap });
            }
            let Some((&v, tail)) = rest.split_first() else {
                return Ok(!builder.inactive_labels(g.b).is_empty());
            };
            if g.special[v] {
                builder.push_new(g, v);
                let hit = rec(g, tail, builder, step_cap, steps)?;
                builder.pop();
                if hit {
                    return Ok(true);
                }
                for label in builder.inactive_labels(g.b) {
                    builder.push_join(g, v, label);
                    let hit = rec(g, tail, builder, step_cap, steps)?;
                    builder.pop();
                    if hit {
                        return Ok(true);
                    }
                }
                Ok(false)
            } else {
                builder.push_forced(g, v);
                let hit = rec(g, tail, builder, step_cap, steps)?;
                builder.pop();
                Ok(hit)
            }
        }
        let mut builder = SigmaBuilder::start(self, walk[0]);
        rec(self, &walk[1..], &mut builder, step_cap, steps)
    }

    /// Strongly connected components in deterministic order; each component
    /// sorted ascending.
    pub fn sccs(&self) -> Vec<Vec<usize>> {
        sccs_of(&self.out, &self.inc)
    }

    fn has_self_loop(&self, v: usize) -> bool {
        self.has_edge(v, v)
    }

    fn component_has_cycle(&self, members: &[usize]) -> bool {
        members.len() >= 2 || self.has_self_loop(members[0])
    }

    /// True when the graph contains any cycle; equivalently, the avoidance
    /// set has members of unbounded length.
    pub fn has_cycle(&self) -> bool {
        self.sccs().iter().any(|c| self.component_has_cycle(c))
    }

    /// True when some cycle passes through `v`.
    pub fn is_on_cycle(&self, v: usize) -> bool {
        if self.has_self_loop(v) {
            return true;
        }
        let all: Vec<usize> = (0..self.vertex_count()).collect();
        self.shortest_path_within(&all, v, v).is_some()
    }

    /// True when a walk of at least one edge leads from `from` to `to`.
    pub fn reaches(&self, from: usize, to: usize) -> bool {
        let all: Vec<usize> = (0..self.vertex_count()).collect();
        self.shortest_path_within(&all, from, to).is_some()
    }

    /// Shortest path from `from` to `to` over the whole graph, length >= 1.
    pub fn shortest_path(&self, from: usize, to: usize) -> Option<Path> {
        let all: Vec<usize> = (0..self.vertex_count()).collect();
        self.shortest_path_within(&all, from, to)
            .map(|vertices| Path { vertices })
    }

    /// A walk ending at `mu` whose always-new fiber member has an inactive
    /// class, reconstructed from the capped class-count fixpoint; `None`
    /// when no fiber member ending at `mu` ever has one.
    pub(crate) fn inactive_witness_walk(&self, mu: usize) -> Option<Vec<usize>> {
        let n = self.vertex_count();
        let cap = self.b as u32 + 1;
        let idx = |v: usize, c: u32| v * (cap as usize + 1) + c as usize;
        let mut parent: Vec<Option<(usize, u32)>> = vec![None; n * (cap as usize + 1)];
        let mut seen = vec![false; n * (cap as usize + 1)];
        let mut queue = std::collections::VecDeque::new();
        for v in 0..n {
            let c = self.classes[v].min(cap);
            if !seen[idx(v, c)] {
                seen[idx(v, c)] = true;
                queue.push_back((v, c));
            }
        }
        let mut goal = None;
        'search: while let Some((u, c)) = queue.pop_front() {
            if u == mu && c > self.suffix_classes[mu] {
                goal = Some((u, c));
                break 'search;
            }
            for &v in &self.out[u] {
                let c2 = (c + u32::from(self.special[v])).min(cap);
                if !seen[idx(v, c2)] {
                    seen[idx(v, c2)] = true;
                    parent[idx(v, c2)] = Some((u, c));
                    queue.push_back((v, c2));
                }
            }
        }
        let mut state = goal?;
        let mut walk = vec![state.0];
        while let Some(prev) = parent[idx(state.0, state.1)] {
            walk.push(prev.0);
            state = prev;
        }
        walk.reverse();
        Some(walk)
    }

    /// Shortest path from `from` to `to` using only `allowed` vertices;
    /// `None` when unreachable. A nonempty result always has length >= 1, so
    /// with `from == to` it is a shortest cycle through the vertex.
    fn shortest_path_within(
        &self,
        allowed: &[usize],
        from: usize,
        to: usize,
    ) -> Option<Vec<usize>> {
        let ok = |v: usize| allowed.binary_search(&v).is_ok();
        let mut parent: BTreeMap<usize, usize> = BTreeMap::new();
        let mut queue = std::collections::VecDeque::new();
        for &w in &self.out[from] {
            if ok(w) && !parent.contains_key(&w) {
                parent.insert(w, from);
                queue.push_back(w);
            }
        }
        while let Some(v) = queue.pop_front() {
            if v == to {
                let mut path = vec![to];
                let mut cur = to;
                while cur != from || path.len() == 1 {
                    let p = parent[&cur];
                    path.push(p);
                    cur = p;
                    if cur == from {
                        break;
                    }
                }
                path.reverse();
                return Some(path);
            }
            for &w in &self.out[v] {
                if ok(w) && !parent.contains_key(&w) {
                    parent.insert(w, v);
                    queue.push_back(w);
                }
            }
        }
        None
    }

    /// A cycle (as a closed walk) containing a vertex of in-degree at least
    /// two and a vertex of out-degree at least two, degrees in the whole
    /// graph. Exists exactly when some component with a cycle has both.
    pub fn in_out_cycle(&self) -> Option<Path> {
        for members in self.sccs() {
            if !self.component_has_cycle(&members) {
                continue;
            }
            let u = members.iter().copied().find(|&v| self.inc[v].len() >= 2);
            let w = members.iter().copied().find(|&v| self.out[v].len() >= 2);
            let (Some(u), Some(w)) = (u, w) else { continue };
            let cycle = if u == w {
                if self.has_self_loop(u) {
                    vec![u, u]
                } else {
                    let mut c = self
                        .shortest_path_within(&members, u, u)
                        .expect("vertex of a cyclic component lies on a cycle");
                    if c.len() == 1 {
                        c.push(u);
                    }
                    c
                }
            } else {
                let first = self
                    .shortest_path_within(&members, u, w)
                    .expect("component is strongly connected");
                let back = self
                    .shortest_path_within(&members, w, u)
                    .expect("component is strongly connected");
                let mut c = first;
                c.extend_from_slice(&back[1..]);
                c
            };
            return Some(Path { vertices: cycle });
        }
        None
    }

    pub fn has_in_out_cycle(&self) -> bool {
        self.in_out_cycle().is_some()
    }

    /// The first special vertex lying on a cycle, with a witness cycle.
    pub fn special_vertex_in_cycle(&self) -> Option<(usize, Path)> {
        for v in 0..self.vertex_count() {
            if !self.special[v] {
                continue;
            }
            if self.has_self_loop(v) {
                return Some((
                    v,
                    Path {
                        vertices: vec![v, v],
                    },
                ));
            }
            let all: Vec<usize> = (0..self.vertex_count()).collect();
            if let Some(cycle) = self.shortest_path_within(&all, v, v) {
                let mut vertices = cycle;
                if vertices.len() == 1 {
                    vertices.push(v);
                }
                return Some((v, Path { vertices }));
            }
        }
        None
    }

    /// True for zero or one vertices; otherwise a single strongly connected
    /// component.
    pub fn is_strongly_connected(&self) -> bool {
        self.vertex_count() <= 1 || self.sccs().len() == 1
    }

    /// Simple cycles up to rotation, enumeration aborted once `cap` are
    /// found. Returned as vertex lists starting at their smallest vertex.
    fn simple_cycles(&self, cap: usize) -> Vec<Vec<usize>> {
        let mut cycles = Vec::new();
        let n = self.vertex_count();
        let mut stack = Vec::new();
        let mut on_stack = vec![false; n];
        fn dfs(
            g: &FactorGraph,
            s: usize,
            v: usize,
            stack: &mut Vec<usize>,
            on_stack: &mut Vec<bool>,
            cycles: &mut Vec<Vec<usize>>,
            cap: usize,
        ) {
            if cycles.len() >= cap {
                return;
            }
            stack.push(v);
            on_stack[v] = true;
            for &w in &g.out[v] {
                if cycles.len() >= cap {
                    break;
                }
                if w == s {
                    cycles.push(stack.clone());
                } else if w > s && !on_stack[w] {
                    dfs(g, s, w, stack, on_stack, cycles, cap);
                }
            }
            stack.pop();
            on_stack[v] = false;
        }
        for s in 0..n {
            if cycles.len() >= cap {
                break;
            }
            dfs(self, s, s, &mut stack, &mut on_stack, &mut cycles, cap);
        }
        cycles
    }

    /// Bicycle recognition: two disjoint simple cycles joined by a simple
    /// path whose interior avoids both, covering the whole graph; either
    /// cycle may be empty, and a lone simple path or lone cycle counts.
    pub fn bicycle(&self) -> Option<Bicycle> {
        let n = self.vertex_count();
        if n == 0 {
            return Some(Bicycle {
                initial: vec![],
                path: vec![],
                terminal: vec![],
            });
        }
        // Degree census: one junction may have out-degree 2, one in-degree 2,
        // nothing higher anywhere.
        if self.out.iter().filter(|a| a.len() >= 2).count() > 1
            || self.inc.iter().filter(|a| a.len() >= 2).count() > 1
            || self.out.iter().any(|a| a.len() > 2)
            || self.inc.iter().any(|a| a.len() > 2)
        {
            return None;
        }
        let cycles = self.simple_cycles(3);
        match cycles.len() {
            0 => self.cover_as_path().map(|path| Bicycle {
                initial: vec![],
                path,
                terminal: vec![],
            }),
            1 => self.cover_as_cycle_with_tail(&cycles[0]),
            2 => self.cover_as_two_cycles(&cycles[0], &cycles[1]),
            _ => None,
        }
    }

    pub fn is_bicycle(&self) -> bool {
        self.bicycle().is_some()
    }

    fn cycle_edges(cycle: &[usize]) -> Vec<(usize, usize)> {
        (0..cycle.len())
            .map(|i| (cycle[i], cycle[(i + 1) % cycle.len()]))
            .collect()
    }

    /// Covers the whole graph as one simple path, if possible.
    fn cover_as_path(&self) -> Option<Vec<usize>> {
        let n = self.vertex_count();
        if self.edge_count() != n - 1 {
            return None;
        }
        let start = (0..n).find(|&v| self.inc[v].is_empty())?;
        let mut path = vec![start];
        let mut cur = start;
        while let Some(&next) = self.out[cur].first() {
            path.push(next);
            cur = next;
        }
        let mut seen = path.clone();
        seen.sort_unstable();
        seen.dedup();
        (seen.len() == n && path.len() == n).then_some(path)
    }

    fn cover_as_cycle_with_tail(&self, cycle: &[usize]) -> Option<Bicycle> {
        let mut cycle_edge_set = Self::cycle_edges(cycle);
        cycle_edge_set.sort_unstable();
        let rest: Vec<(usize, usize)> = self
            .edges()
            .into_iter()
            .filter(|e| cycle_edge_set.binary_search(e).is_err())
            .collect();
        let on_cycle = |v: usize| cycle.contains(&v);
        if rest.is_empty() {
            return (cycle.len() == self.vertex_count()).then(|| Bicycle {
                initial: cycle.to_vec(),
                path: vec![],
                terminal: vec![],
            });
        }
        // The leftover edges must chain into one simple path touching the
        // cycle only at one end.
        let path = chain_edges(&rest)?;
        let covered = cycle.len() + path.len() - 1;
        if covered != self.vertex_count() {
            return None;
        }
        let interior_ok = path[1..path.len() - 1].iter().all(|&v| !on_cycle(v));
        if !interior_ok {
            return None;
        }
        match (on_cycle(path[0]), on_cycle(*path.last().expect("nonempty"))) {
            (true, false) => Some(Bicycle {
                initial: cycle.to_vec(),
                path,
                terminal: vec![],
            }),
            (false, true) => Some(Bicycle {
                initial: vec![],
                path,
                terminal: cycle.to_vec(),
            }),
            _ => None,
        }
    }

    fn cover_as_two_cycles(&self, c1: &[usize], c2: &[usize]) -> Option<Bicycle> {
        if c1.iter().any(|v| c2.contains(v)) {
            return None;
        }
        let mut cycle_edge_set: Vec<(usize, usize)> = Self::cycle_edges(c1);
        cycle_edge_set.extend(Self::cycle_edges(c2));
        cycle_edge_set.sort_unstable();
        let rest: Vec<(usize, usize)> = self
            .edges()
            .into_iter()
            .filter(|e| cycle_edge_set.binary_search(e).is_err())
            .collect();
        if rest.is_empty() {
            return None;
        }
        let path = chain_edges(&rest)?;
        if c1.len() + c2.len() + path.len() - 2 != self.vertex_count() {
            return None;
        }
        let interior_ok = path[1..path.len() - 1]
            .iter()
            .all(|&v| !c1.contains(&v) && !c2.contains(&v));
        if !interior_ok || path.len() < 2 {
            return None;
        }
        let (start, end) = (path[0], *path.last().expect("nonempty"));
        if c1.contains(&start) && c2.contains(&end) {
            Some(Bicycle {
                initial: c1.to_vec(),
                path,
                terminal: c2.to_vec(),
            })
        } else if c2.contains(&start) && c1.contains(&end) {
            Some(Bicycle {
                initial: c2.to_vec(),
                path,
                terminal: c1.to_vec(),
            })
        } else {
            None
        }
    }

    /// Deterministic DOT rendering: vertices in index (lexicographic RGS)
    /// order, special vertices drawn as diamonds, ambiguous ones outlined in
    /// red, edges sorted.
    pub fn to_dot(&self) -> String {
        let mut s =
            String::from("digraph factor_graph {\n  rankdir=LR;\n  node [shape=ellipse];\n");
        for (i, v) in self.vertices.iter().enumerate() {
            let mut attrs = format!("label=\"{v}\"");
            if self.special[i] {
                attrs.push_str(", shape=diamond");
            }
            if self.ambiguous[i] {
                attrs.push_str(", color=red");
            }
            let _ = writeln!(s, "  v{i} [{attrs}];");
        }
        for (u, v) in self.edges() {
            let _ = writeln!(s, "  v{u} -> v{v};");
        }
        s.push_str("}\n");
        s
    }
}

/// Kosaraju on plain adjacency lists; shared with the coloured graph.
pub(crate) fn sccs_of(out: &[Vec<usize>], inc: &[Vec<usize>]) -> Vec<Vec<usize>> {
    fn forward(v: usize, out: &[Vec<usize>], visited: &mut [bool], order: &mut Vec<usize>) {
        visited[v] = true;
        for &w in &out[v] {
            if !visited[w] {
                forward(w, out, visited, order);
            }
        }
        order.push(v);
    }
    fn backward(
        v: usize,
        inc: &[Vec<usize>],
        component: &mut [usize],
        id: usize,
        members: &mut Vec<usize>,
    ) {
        component[v] = id;
        members.push(v);
        for &w in &inc[v] {
            if component[w] == usize::MAX {
                backward(w, inc, component, id, members);
            }
        }
    }
    let n = out.len();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for s in 0..n {
        if !visited[s] {
            forward(s, out, &mut visited, &mut order);
        }
    }
    let mut component = vec![usize::MAX; n];
    let mut comps: Vec<Vec<usize>> = Vec::new();
    for &v in order.iter().rev() {
        if component[v] == usize::MAX {
            let id = comps.len();
            let mut members = Vec::new();
            backward(v, inc, &mut component, id, &mut members);
            members.sort_unstable();
            comps.push(members);
        }
    }
    comps
}

/// In-out-cycle existence on plain adjacency lists: some component with a
/// cycle holds a vertex of in-degree two and one of out-degree two.
pub(crate) fn has_in_out_cycle_of(out: &[Vec<usize>], inc: &[Vec<usize>]) -> bool {
    sccs_of(out, inc).iter().any(|members| {
        let cyclic = members.len() >= 2 || out[members[0]].binary_search(&members[0]).is_ok();
        cyclic
            && members.iter().any(|&v| inc[v].len() >= 2)
            && members.iter().any(|&v| out[v].len() >= 2)
    })
}

/// Chains a set of edges into one simple path; `None` when they do not form
/// one. The result has `edges.len() + 1` vertices.
fn chain_edges(edges: &[(usize, usize)]) -> Option<Vec<usize>> {
    let sources: Vec<usize> = edges.iter().map(|e| e.0).collect();
    let targets: Vec<usize> = edges.iter().map(|e| e.1).collect();
    let start = *sources.iter().find(|s| !targets.contains(s))?;
    let mut path = vec![start];
    let mut cur = start;
    for _ in 0..edges.len() {
        let mut nexts = edges.iter().filter(|e| e.0 == cur).map(|e| e.1);
        let next = nexts.next()?;
        if nexts.next().is_some() {
            return None;
        }
        path.push(next);
        cur = next;
    }
    let mut dedup = path.clone();
    dedup.sort_unstable();
    dedup.dedup();
    (dedup.len() == path.len()).then_some(path)
}

/// Labels of the classes of `r` that avoid its largest `b - 1` points.
pub fn inactive_classes(r: &EqRel, b: usize) -> Vec<u32> {
    assert!(r.len() + 1 >= b, "relation shorter than window overlap");
    let top_from = r.len().saturating_sub(b.saturating_sub(1)) + 1;
    let active: Vec<u32> = (top_from..=r.len()).map(|p| r.class_of(p)).collect();
    (1..=r.class_count())
        .filter(|l| !active.contains(l))
        .collect()
}

/// Incremental construction of a fiber member along a walk. Starts from the
/// first vertex and appends one point per step; the window after each step
/// always equals the entered vertex.
#[derive(Debug, Clone)]
pub(crate) struct SigmaBuilder {
    rgs: Vec<u32>,
}

impl SigmaBuilder {
    pub(crate) fn start(g: &FactorGraph, v: usize) -> SigmaBuilder {
        SigmaBuilder {
            rgs: g.vertices[v].rgs().to_vec(),
        }
    }

    pub(crate) fn from_relation(r: &EqRel) -> SigmaBuilder {
        SigmaBuilder {
            rgs: r.rgs().to_vec(),
        }
    }

    pub(crate) fn len(&self) -> usize {
        self.rgs.len()
    }

    pub(crate) fn label_of(&self, point: usize) -> u32 {
        self.rgs[point - 1]
    }

    /// Joins the class dictated by the window of a non-special vertex.
    pub(crate) fn push_forced(&mut self, g: &FactorGraph, v: usize) {
        let b = g.b;
        let pattern = g.vertices[v].rgs();
        let last = pattern[b - 1];
        let j = (1..b)
            .find(|&j| pattern[j - 1] == last)
            .expect("non-special vertex");
        let q = self.rgs.len() + 1 - b + j;
        let label = self.rgs[q - 1];
        self.rgs.push(label);
        debug_assert_eq!(relabel(&self.rgs[self.rgs.len() - b..]), pattern);
    }

    /// Opens a new class at a special vertex.
    pub(crate) fn push_new(&mut self, g: &FactorGraph, v: usize) {
        let label = *self.rgs.iter().max().expect("nonempty") + 1;
        self.rgs.push(label);
        debug_assert!(g.special[v]);
        debug_assert_eq!(
            relabel(&self.rgs[self.rgs.len() - g.b..]),
            g.vertices[v].rgs()
        );
    }

    /// Adds the point to an inactive class at a special vertex.
    pub(crate) fn push_join(&mut self, g: &FactorGraph, v: usize, label: u32) {
        debug_assert!(self.inactive_labels(g.b).contains(&label));
        self.rgs.push(label);
        debug_assert!(g.special[v]);
        debug_assert_eq!(
            relabel(&self.rgs[self.rgs.len() - g.b..]),
            g.vertices[v].rgs()
        );
    }

    /// Appends a point with an explicit class label; the window after the
    /// push must equal the entered vertex.
    pub(crate) fn push_checked(&mut self, g: &FactorGraph, v: usize, label: u32) {
        let max = *self.rgs.iter().max().expect("nonempty");
        assert!(label <= max + 1, "label out of range");
        self.rgs.push(label);
        assert_eq!(
            relabel(&self.rgs[self.rgs.len() - g.b..]),
            g.vertices[v].rgs(),
            "window after push must match the entered vertex"
        );
    }

    pub(crate) fn pop(&mut self) {
        self.rgs.pop();
    }

    /// Labels whose classes avoid the last `b - 1` points so far, ascending.
    pub(crate) fn inactive_labels(&self, b: usize) -> Vec<u32> {
        let len = self.rgs.len();
        let active = &self.rgs[len - (b - 1)..];
        let max = *self.rgs.iter().max().expect("nonempty");
        (1..=max).filter(|l| !active.contains(l)).collect()
    }

    pub(crate) fn current(&self) -> EqRel {
        EqRel::from_rgs(self.rgs.clone()).expect("valid rgs")
    }
}
