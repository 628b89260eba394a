//! Exact 3-coloring search: enumeration, counting, precoloring extension,
//! bichromatic faces, Kempe components and the contraction used for
//! low-degree vertices outside 5-cycles.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use num_rational::Ratio;
use thiserror::Error;

use crate::par::{self, Jobs};
use crate::plane_graph::{EmbeddingError, OuterFace, PlaneGraph, RotationBuilder, Vertex};

pub type Color = u8;

/// Bit mask over the colors 1..=3 (bit `c` set means color `c` allowed).
pub type ColorMask = u8;
pub const ALL_COLORS: ColorMask = 0b1110;

pub const fn mask_of(c: Color) -> ColorMask {
    1 << c
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ColoringError {
    #[error("precoloring is not proper: edge {0}-{1}")]
    ImproperPrecoloring(Vertex, Vertex),
    #[error("coloring has {got} entries, graph has {expected} vertices")]
    LengthMismatch { expected: usize, got: usize },
    #[error("color {0} is outside 1..=3")]
    BadColor(Color),
    #[error("bad precoloring of the cycle: {0}")]
    BadPrecoloring(String),
    #[error("two-extensions lemma violated: {0}")]
    LemmaViolation(String),
    #[error("hypothesis violated: {0}")]
    HypothesisViolation(String),
    #[error("no Kempe component {index} for colors {a},{b} ({available} components)")]
    BadComponent { a: Color, b: Color, index: usize, available: usize },
    #[error("vertex {0} lies on a 5-cycle")]
    VertexInFiveCycle(Vertex),
    #[error("contracted graph has a triangle {0:?}")]
    ResultHasTriangle([Vertex; 3]),
    #[error(transparent)]
    Embedding(#[from] EmbeddingError),
}

/// A partial or total map from vertices to colors 1..=3.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coloring {
    colors: Vec<Color>,
}

impl Coloring {
    pub fn empty(n: usize) -> Self {
        Coloring { colors: vec![0; n] }
    }

    /// Colors per vertex, 0 meaning unassigned.
    pub fn from_colors(colors: Vec<Color>) -> Result<Self, ColoringError> {
        if let Some(&c) = colors.iter().find(|&&c| c > 3) {
            return Err(ColoringError::BadColor(c));
        }
        Ok(Coloring { colors })
    }

    pub fn from_pairs(n: usize, pairs: &[(Vertex, Color)]) -> Result<Self, ColoringError> {
        let mut c = Coloring::empty(n);
        for &(v, col) in pairs {
            if col == 0 || col > 3 {
                return Err(ColoringError::BadColor(col));
            }
            c.colors[v] = col;
        }
        Ok(c)
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }

    pub fn get(&self, v: Vertex) -> Option<Color> {
        match self.colors[v] {
            0 => None,
            c => Some(c),
        }
    }

    pub fn set(&mut self, v: Vertex, c: Color) {
        debug_assert!((1..=3).contains(&c));
        self.colors[v] = c;
    }

    pub fn clear(&mut self, v: Vertex) {
        self.colors[v] = 0;
    }

    pub fn colors(&self) -> &[Color] {
        &self.colors
    }

    pub fn colors_mut(&mut self) -> &mut Vec<Color> {
        &mut self.colors
    }

    pub fn is_total(&self) -> bool {
        self.colors.iter().all(|&c| c != 0)
    }

    pub fn assigned(&self) -> impl Iterator<Item = (Vertex, Color)> + '_ {
        self.colors.iter().enumerate().filter(|(_, &c)| c != 0).map(|(v, &c)| (v, c))
    }

    /// An edge whose ends are assigned the same color.
    pub fn conflict(&self, g: &PlaneGraph) -> Option<(Vertex, Vertex)> {
        g.edges().into_iter().find(|&(u, v)| self.colors[u] != 0 && self.colors[u] == self.colors[v])
    }

    pub fn is_proper(&self, g: &PlaneGraph) -> bool {
        self.colors.len() == g.vertex_count() && self.conflict(g).is_none()
    }

    /// Exchanges colors `a` and `b` on the given vertices.
    pub fn swap_on(&mut self, vertices: &[Vertex], a: Color, b: Color) {
        for &v in vertices {
            if self.colors[v] == a {
                self.colors[v] = b;
            } else if self.colors[v] == b {
                self.colors[v] = a;
            }
        }
    }

    /// Applies a permutation of the colors (`perm[c-1]` is the image of `c`).
    pub fn permuted(&self, perm: [Color; 3]) -> Coloring {
        Coloring {
            colors: self.colors.iter().map(|&c| if c == 0 { 0 } else { perm[c as usize - 1] }).collect(),
        }
    }
}

pub(crate) fn check_precoloring(g: &PlaneGraph, pre: &Coloring) -> Result<(), ColoringError> {
    if pre.len() != g.vertex_count() {
        return Err(ColoringError::LengthMismatch { expected: g.vertex_count(), got: pre.len() });
    }
    if let Some((u, v)) = pre.conflict(g) {
        return Err(ColoringError::ImproperPrecoloring(u, v));
    }
    Ok(())
}

/// Backtracking state shared by enumeration, counting and the optimizers:
/// vertices in `order` are assigned colors from their masks, every other
/// vertex keeps its precolor.
#[derive(Debug, Clone)]
pub(crate) struct Search<'g> {
    pub g: &'g PlaneGraph,
    pub order: Vec<Vertex>,
    pub masks: Vec<ColorMask>,
    pub colors: Vec<Color>,
}

impl<'g> Search<'g> {
    pub fn new(g: &'g PlaneGraph, pre: &Coloring, order: Vec<Vertex>, masks: Vec<ColorMask>) -> Self {
        let mut colors = pre.colors.clone();
        for &v in &order {
            colors[v] = 0;
        }
        Search { g, order, masks, colors }
    }

    #[inline]
    pub fn allowed(&self, v: Vertex, c: Color) -> bool {
        self.masks[v] & mask_of(c) != 0 && self.g.neighbors(v).iter().all(|&u| self.colors[u] != c)
    }

    pub fn count_from(&mut self, depth: usize) -> u128 {
        if depth == self.order.len() {
            return 1;
        }
        let v = self.order[depth];
        let mut total = 0;
        for c in 1..=3 {
            if self.allowed(v, c) {
                self.colors[v] = c;
                total += self.count_from(depth + 1);
            }
        }
        self.colors[v] = 0;
        total
    }

    /// Calls `f` on every completion; stops early when `f` returns false.
    pub fn visit_from<F: FnMut(&[Color]) -> bool>(&mut self, depth: usize, f: &mut F) -> bool {
        if depth == self.order.len() {
            return f(&self.colors);
        }
        let v = self.order[depth];
        for c in 1..=3 {
            if self.allowed(v, c) {
                self.colors[v] = c;
                if !self.visit_from(depth + 1, f) {
                    self.colors[v] = 0;
                    return false;
                }
            }
        }
        self.colors[v] = 0;
        true
    }

    /// Depth-first search for any completion.
    pub fn find_from(&mut self, depth: usize) -> bool {
        if depth == self.order.len() {
            return true;
        }
        let v = self.order[depth];
        for c in 1..=3 {
            if self.allowed(v, c) {
                self.colors[v] = c;
                if self.find_from(depth + 1) {
                    return true;
                }
            }
        }
        self.colors[v] = 0;
        false
    }
}

/// Orders the free vertices so that each one has as many already-placed
/// neighbors as possible (precolored vertices count as placed). Ties go to
/// the smaller id.
pub fn connectivity_order(g: &PlaneGraph, free: &[bool]) -> Vec<Vertex> {
    let n = g.vertex_count();
    let mut placed_nbrs = vec![0usize; n];
    let mut done = vec![false; n];
    for v in 0..n {
        if !free[v] {
            done[v] = true;
            for &u in g.neighbors(v) {
                placed_nbrs[u] += 1;
            }
        }
    }
    let mut order = Vec::new();
    while order.len() < free.iter().filter(|&&f| f).count() {
        let v = (0..n)
            .filter(|&v| !done[v])
            .max_by_key(|&v| (placed_nbrs[v], std::cmp::Reverse(v)))
            .expect("free vertex left");
        done[v] = true;
        order.push(v);
        for &u in g.neighbors(v) {
            placed_nbrs[u] += 1;
        }
    }
    order
}

/// Maximizes `value` over the completions of `search`, returning the first
/// maximum in search order. Stops as soon as `ceiling` is reached. With
/// parallel jobs the first vertex's colors are explored concurrently; the
/// answer is the same as the sequential one.
pub(crate) fn maximize<F>(search: &Search<'_>, jobs: Jobs, ceiling: Option<i128>, value: F) -> Option<(i128, Vec<Color>)>
where
    F: Fn(&[Color]) -> i128 + Sync,
{
    let run = |mut s: Search<'_>, depth: usize| {
        let mut best: Option<(i128, Vec<Color>)> = None;
        s.visit_from(depth, &mut |colors| {
            let val = value(colors);
            if best.as_ref().is_none_or(|(b, _)| val > *b) {
                best = Some((val, colors.to_vec()));
            }
            ceiling.is_none_or(|c| val < c)
        });
        best
    };
    if search.order.is_empty() || !jobs.is_parallel() {
        return run(search.clone(), 0);
    }
    let root = search.order[0];
    let branches: Vec<Color> = (1..=3).collect();
    let results = par::map_ordered(&branches, jobs, |&c| {
        let mut s = search.clone();
        if !s.allowed(root, c) {
            return None;
        }
        s.colors[root] = c;
        run(s, 1)
    });
    let mut best: Option<(i128, Vec<Color>)> = None;
    for r in results.into_iter().flatten() {
        if best.as_ref().is_none_or(|(b, _)| r.0 > *b) {
            let done = ceiling.is_some_and(|c| r.0 >= c);
            best = Some(r);
            if done {
                break;
            }
        }
    }
    best
}

#[derive(Debug, Clone, Copy, Default)]
pub struct EnumOptions {
    pub limit: Option<usize>,
    /// Fix the color of the first free vertex to 1 when nothing is
    /// precolored, which divides the stream by three.
    pub fix_first: bool,
}

/// Stream of proper total extensions of a precoloring, in lexicographic order
/// of the color vectors.
#[derive(Debug, Clone)]
pub struct Colorings<'g> {
    search: Search<'g>,
    depth: usize,
    started: bool,
    finished: bool,
    emitted: usize,
    limit: Option<usize>,
}

impl Iterator for Colorings<'_> {
    type Item = Coloring;

    fn next(&mut self) -> Option<Coloring> {
        if self.finished || self.limit.is_some_and(|l| self.emitted >= l) {
            return None;
        }
        if self.advance() {
            self.emitted += 1;
            Some(Coloring { colors: self.search.colors.clone() })
        } else {
            self.finished = true;
            None
        }
    }
}

impl Colorings<'_> {
    fn advance(&mut self) -> bool {
        let len = self.search.order.len();
        if !self.started {
            self.started = true;
            if len == 0 {
                return true;
            }
            self.depth = 0;
        } else {
            if len == 0 {
                return false;
            }
            self.depth = len - 1;
        }
        loop {
            let v = self.search.order[self.depth];
            let mut c = self.search.colors[v] + 1;
            while c <= 3 && !self.search.allowed(v, c) {
                c += 1;
            }
            if c <= 3 {
                self.search.colors[v] = c;
                if self.depth + 1 == len {
                    return true;
                }
                self.depth += 1;
                let next = self.search.order[self.depth];
                self.search.colors[next] = 0;
            } else {
                self.search.colors[v] = 0;
                if self.depth == 0 {
                    return false;
                }
                self.depth -= 1;
            }
        }
    }
}

pub fn enumerate_colorings<'g>(
    g: &'g PlaneGraph,
    pre: &Coloring,
    limit: Option<usize>,
) -> Result<Colorings<'g>, ColoringError> {
    enumerate_colorings_with(g, pre, EnumOptions { limit, fix_first: false })
}

pub fn enumerate_colorings_with<'g>(
    g: &'g PlaneGraph,
    pre: &Coloring,
    opts: EnumOptions,
) -> Result<Colorings<'g>, ColoringError> {
    check_precoloring(g, pre)?;
    let order: Vec<Vertex> = (0..g.vertex_count()).filter(|&v| pre.colors[v] == 0).collect();
    let mut masks = vec![ALL_COLORS; g.vertex_count()];
    if opts.fix_first && pre.assigned().next().is_none() {
        if let Some(&first) = order.first() {
            masks[first] = mask_of(1);
        }
    }
    Ok(Colorings {
        search: Search::new(g, pre, order, masks),
        depth: 0,
        started: false,
        finished: false,
        emitted: 0,
        limit: opts.limit,
    })
}

/// Number of proper 3-colorings extending `pre`.
pub fn count_colorings(g: &PlaneGraph, pre: &Coloring) -> Result<u128, ColoringError> {
    count_colorings_with(g, pre, Jobs::Sequential)
}

/// Like [`count_colorings`], splitting the search over the colors of the
/// first free vertex when `jobs` is parallel.
pub fn count_colorings_with(g: &PlaneGraph, pre: &Coloring, jobs: Jobs) -> Result<u128, ColoringError> {
    check_precoloring(g, pre)?;
    let free: Vec<bool> = pre.colors.iter().map(|&c| c == 0).collect();
    let order = connectivity_order(g, &free);
    let masks = vec![ALL_COLORS; g.vertex_count()];
    if order.is_empty() || !jobs.is_parallel() {
        return Ok(Search::new(g, pre, order, masks).count_from(0));
    }
    let root = order[0];
    let branches: Vec<Color> = (1..=3).collect();
    let counts = par::map_ordered(&branches, jobs, |&c| {
        let mut s = Search::new(g, pre, order.clone(), masks.clone());
        if !s.allowed(root, c) {
            return 0;
        }
        s.colors[root] = c;
        s.count_from(1)
    });
    Ok(counts.into_iter().sum())
}

/// Some proper 3-coloring extending `pre`, if one exists.
pub fn find_coloring(g: &PlaneGraph, pre: &Coloring) -> Result<Option<Coloring>, ColoringError> {
    check_precoloring(g, pre)?;
    let free: Vec<bool> = pre.colors.iter().map(|&c| c == 0).collect();
    let order = connectivity_order(g, &free);
    let mut s = Search::new(g, pre, order, vec![ALL_COLORS; g.vertex_count()]);
    Ok(s.find_from(0).then(|| Coloring { colors: s.colors }))
}

/// Result of extending a precoloring of the outer cycle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtensionReport {
    pub count: u128,
    /// A vertex off the cycle adjacent to two differently colored cycle
    /// vertices; present whenever `count <= 1` and the graph is more than the
    /// cycle.
    pub witness: Option<Vertex>,
}

/// Counts extensions of a precoloring of the outer (<=5)-cycle, and when
/// there are fewer than two, locates the vertex with two differently colored
/// neighbors on the cycle.
pub fn extension_count_from_cycle(
    g: &PlaneGraph,
    cycle: &[Vertex],
    psi: &Coloring,
) -> Result<ExtensionReport, ColoringError> {
    if let Some(t) = g.find_triangle() {
        return Err(ColoringError::HypothesisViolation(format!("triangle {t:?}")));
    }
    if cycle.len() < 3 || cycle.len() > 5 {
        return Err(ColoringError::BadPrecoloring(format!("cycle length {} not in 3..=5", cycle.len())));
    }
    let outer = g.outer_face();
    let on_cycle: BTreeSet<Vertex> = cycle.iter().copied().collect();
    if !outer.is_cycle() || outer.vertex_set() != on_cycle || on_cycle.len() != cycle.len() {
        return Err(ColoringError::BadPrecoloring("cycle does not bound the outer face".into()));
    }
    for i in 0..cycle.len() {
        if !g.has_edge(cycle[i], cycle[(i + 1) % cycle.len()]) {
            return Err(ColoringError::BadPrecoloring(format!("{} and {} not adjacent", cycle[i], cycle[i + 1])));
        }
    }
    if psi.len() != g.vertex_count() {
        return Err(ColoringError::LengthMismatch { expected: g.vertex_count(), got: psi.len() });
    }
    for v in 0..g.vertex_count() {
        if on_cycle.contains(&v) != psi.get(v).is_some() {
            return Err(ColoringError::BadPrecoloring(format!("vertex {v} colored iff on the cycle")));
        }
    }
    if let Some((u, v)) = psi.conflict(g) {
        return Err(ColoringError::BadPrecoloring(format!("edge {u}-{v} monochromatic")));
    }
    let count = count_colorings(g, psi)?;
    let is_bare_cycle = g.vertex_count() == cycle.len() && g.edge_count() == cycle.len();
    if count >= 2 || is_bare_cycle {
        return Ok(ExtensionReport { count, witness: None });
    }
    let witness = (0..g.vertex_count()).filter(|v| !on_cycle.contains(v)).find(|&v| {
        let colors: BTreeSet<Color> =
            g.neighbors(v).iter().filter_map(|&u| on_cycle.contains(&u).then(|| psi.get(u)).flatten()).collect();
        colors.len() >= 2
    });
    match witness {
        Some(w) => Ok(ExtensionReport { count, witness: Some(w) }),
        None => Err(ColoringError::LemmaViolation(format!(
            "{count} extension(s) but no vertex sees two colors on the cycle"
        ))),
    }
}

/// Color-pair index: 0 = {1,2}, 1 = {2,3}, 2 = {1,3}.
pub const COLOR_PAIRS: [(Color, Color); 3] = [(1, 2), (2, 3), (1, 3)];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BichromaticReport {
    /// Number of bichromatic 4-faces.
    pub q: usize,
    pub four_faces: usize,
    /// Sum over faces of length at least 5 of (length - 4).
    pub s_plus: usize,
    /// Components of the subgraphs induced by the color pairs, in the order
    /// of [`COLOR_PAIRS`].
    pub c_pairs: [usize; 3],
    pub bound_exponent: Ratio<u64>,
}

impl BichromaticReport {
    pub fn c12(&self) -> usize {
        self.c_pairs[0]
    }

    pub fn c23(&self) -> usize {
        self.c_pairs[1]
    }

    pub fn c13(&self) -> usize {
        self.c_pairs[2]
    }

    /// s+ + 8 + q, the numerator of the bound exponent.
    pub fn exponent_numerator(&self) -> u64 {
        (self.s_plus + 8 + self.q) as u64
    }
}

/// Components of the subgraph induced by vertices colored `a` or `b`, each
/// sorted, ordered by smallest vertex.
pub fn kempe_components(g: &PlaneGraph, phi: &Coloring, a: Color, b: Color) -> Vec<Vec<Vertex>> {
    let n = g.vertex_count();
    let in_pair = |v: Vertex| phi.colors[v] == a || phi.colors[v] == b;
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for s in 0..n {
        if seen[s] || !in_pair(s) {
            continue;
        }
        seen[s] = true;
        let mut comp = vec![s];
        let mut stack = vec![s];
        while let Some(u) = stack.pop() {
            for &w in g.neighbors(u) {
                if !seen[w] && in_pair(w) {
                    seen[w] = true;
                    comp.push(w);
                    stack.push(w);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

pub fn bichromatic_report(g: &PlaneGraph, phi: &Coloring) -> BichromaticReport {
    let mut q = 0;
    let mut four_faces = 0;
    let mut s_plus = 0;
    for f in g.faces() {
        if f.length == 4 {
            four_faces += 1;
            let colors: BTreeSet<Color> = f.boundary.iter().map(|&v| phi.colors[v]).collect();
            if colors.len() == 2 {
                q += 1;
            }
        } else if f.length >= 5 {
            s_plus += f.length - 4;
        }
    }
    let c_pairs = COLOR_PAIRS.map(|(a, b)| kempe_components(g, phi, a, b).len());
    BichromaticReport { q, four_faces, s_plus, c_pairs, bound_exponent: Ratio::new((s_plus + 8 + q) as u64, 6) }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ManycolorCheck {
    pub report: BichromaticReport,
    /// 2^((s+ + 8 + q)/6), for display only.
    pub bound: f64,
    pub count: u128,
    /// count^6 >= 2^(s+ + 8 + q), exactly.
    pub ok: bool,
    /// 6 * max(c12, c23, c13) >= s+ + 8 + q.
    pub components_ok: bool,
}

pub fn check_manycolor_hypotheses(g: &PlaneGraph) -> Result<(), ColoringError> {
    if g.vertex_count() < 3 {
        return Err(ColoringError::HypothesisViolation(format!("only {} vertices", g.vertex_count())));
    }
    if !g.is_connected() {
        return Err(ColoringError::HypothesisViolation("graph is disconnected".into()));
    }
    if let Some(t) = g.find_triangle() {
        return Err(ColoringError::HypothesisViolation(format!("triangle {t:?}")));
    }
    Ok(())
}

/// Compares the number of 3-colorings against the bichromatic-face bound
/// for a given coloring.
pub fn verify_manycolor_bound(g: &PlaneGraph, phi: &Coloring) -> Result<ManycolorCheck, ColoringError> {
    check_manycolor_hypotheses(g)?;
    let count = count_colorings(g, &Coloring::empty(g.vertex_count()))?;
    manycolor_check_with_count(g, phi, count)
}

/// [`verify_manycolor_bound`] with a precomputed coloring count.
pub fn manycolor_check_with_count(
    g: &PlaneGraph,
    phi: &Coloring,
    count: u128,
) -> Result<ManycolorCheck, ColoringError> {
    if !phi.is_total() || !phi.is_proper(g) {
        return Err(ColoringError::HypothesisViolation("coloring must be total and proper".into()));
    }
    let report = bichromatic_report(g, phi);
    let exp = report.exponent_numerator();
    let lhs = BigUint::from(count).pow(6);
    let rhs = BigUint::from(1u8) << exp;
    let max_c = *report.c_pairs.iter().max().expect("three pairs") as u64;
    Ok(ManycolorCheck {
        bound: (exp as f64 / 6.0).exp2(),
        count,
        ok: lhs >= rhs,
        components_ok: 6 * max_c >= exp,
        report,
    })
}

/// Swaps colors `a` and `b` on one component of the subgraph induced by
/// those two colors.
pub fn kempe_swap(
    g: &PlaneGraph,
    phi: &Coloring,
    pair: (Color, Color),
    component_index: usize,
) -> Result<Coloring, ColoringError> {
    let (a, b) = pair;
    if a == b || !(1..=3).contains(&a) || !(1..=3).contains(&b) {
        return Err(ColoringError::BadComponent { a, b, index: component_index, available: 0 });
    }
    let comps = kempe_components(g, phi, a, b);
    let comp = comps.get(component_index).ok_or(ColoringError::BadComponent {
        a,
        b,
        index: component_index,
        available: comps.len(),
    })?;
    let mut out = phi.clone();
    out.swap_on(comp, a, b);
    Ok(out)
}

/// `G - v` with the neighbors of `v` identified.
#[derive(Debug, Clone)]
pub struct Contraction {
    pub graph: PlaneGraph,
    /// Vertex of the contracted graph for each original vertex (`None` for
    /// the removed vertex).
    pub vertex_map: Vec<Option<Vertex>>,
    /// The identified vertex, if `v` had a neighbor.
    pub merged: Option<Vertex>,
}

impl Contraction {
    /// Precoloring of the original graph induced by a coloring of the
    /// contracted one (the removed vertex stays free).
    pub fn lift(&self, h_coloring: &Coloring) -> Coloring {
        let colors = self.vertex_map.iter().map(|m| m.map_or(0, |x| h_coloring.colors[x])).collect();
        Coloring { colors }
    }
}

pub fn lies_on_cycle_of_length(g: &PlaneGraph, v: Vertex, length: usize) -> bool {
    fn walk(g: &PlaneGraph, start: Vertex, path: &mut Vec<Vertex>, length: usize) -> bool {
        let last = *path.last().expect("non-empty");
        if path.len() == length {
            return g.has_edge(last, start);
        }
        for &w in g.neighbors(last) {
            if !path.contains(&w) {
                path.push(w);
                if walk(g, start, path, length) {
                    return true;
                }
                path.pop();
            }
        }
        false
    }
    walk(g, v, &mut vec![v], length)
}

pub fn contract_for_minc(g: &PlaneGraph, v: Vertex) -> Result<Contraction, ColoringError> {
    if let Some(t) = g.find_triangle() {
        return Err(ColoringError::HypothesisViolation(format!("triangle {t:?}")));
    }
    if lies_on_cycle_of_length(g, v, 5) {
        return Err(ColoringError::VertexInFiveCycle(v));
    }
    let n = g.vertex_count();
    let nbrs: Vec<Vertex> = g.rotation(v).to_vec();
    let mut rot: Vec<Vec<Vertex>> = g.rotations().to_vec();
    let mut removed = vec![false; n];
    removed[v] = true;
    let merged_old = nbrs.first().copied();

    if nbrs.len() >= 2 {
        let m = nbrs[0];
        // Merged rotation: each neighbor's rotation read from just after v.
        let mut entries: Vec<(Vertex, Vertex)> = Vec::new();
        for &ni in &nbrs {
            let r = g.rotation(ni);
            let at = r.iter().position(|&x| x == v).expect("symmetric");
            for k in 1..r.len() {
                entries.push((r[(at + k) % r.len()], ni));
            }
        }
        let mut seen = BTreeSet::new();
        let mut kept = Vec::new();
        for (x, src) in entries {
            if seen.insert(x) {
                kept.push((x, src));
            } else {
                // Drop this copy of the edge at both ends.
                let i = rot[x].iter().position(|&y| y == src).expect("edge present");
                rot[x].remove(i);
            }
        }
        for &ni in &nbrs[1..] {
            removed[ni] = true;
            rot[ni].clear();
        }
        rot[m] = kept.iter().map(|&(x, _)| x).collect();
        for (x, r) in rot.iter_mut().enumerate() {
            if x == m || removed[x] {
                continue;
            }
            for y in r.iter_mut() {
                if nbrs[1..].contains(y) {
                    *y = m;
                }
            }
        }
    }
    for &ni in &nbrs {
        if let Some(i) = rot[ni].iter().position(|&y| y == v) {
            rot[ni].remove(i);
        }
    }
    rot[v].clear();

    let mut new_id = vec![None; n];
    let mut next = 0;
    for x in 0..n {
        if !removed[x] {
            new_id[x] = Some(next);
            next += 1;
        }
    }
    let mut builder = RotationBuilder::new(next);
    for x in 0..n {
        if let Some(nx) = new_id[x] {
            builder.set_rotation(nx, rot[x].iter().map(|&y| new_id[y].expect("kept")).collect());
        }
    }
    let map_old = |x: Vertex| -> Option<Vertex> {
        if x == v {
            None
        } else if nbrs.len() >= 2 && nbrs.contains(&x) {
            new_id[nbrs[0]]
        } else {
            new_id[x]
        }
    };
    let rotations = builder.into_rotations();
    let outer = g
        .outer_face()
        .darts()
        .filter_map(|(a, b)| Some((map_old(a)?, map_old(b)?)))
        .find(|&(a, b)| rotations[a].contains(&b))
        .map_or(OuterFace::Default, |(a, b)| OuterFace::Dart(a, b));
    let h = PlaneGraph::new(rotations, outer)?;
    if let Some(t) = h.find_triangle() {
        return Err(ColoringError::ResultHasTriangle(t));
    }
    let vertex_map = (0..n).map(map_old).collect();
    Ok(Contraction { graph: h, vertex_map, merged: merged_old.and_then(map_old) })
}
