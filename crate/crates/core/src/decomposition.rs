//! Maximal 5-cycle decompositions: laminar families of separating 5-cycles,
//! pieces, rich and poor nodes, suburbs and rearrangeable colorings.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::coloring::{connectivity_order, Color, Coloring, ColoringError, Search, ALL_COLORS};
use crate::par::{self, Jobs};
use crate::plane_graph::{CycleRef, EmbeddingError, OuterFace, PlaneGraph, Vertex};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecompError {
    #[error("poor piece at node {node} does not have the lemma's shape")]
    PoorShapeViolation { node: usize },
    #[error("no rearrangeable configuration found")]
    NoConfiguration,
    #[error("phi gives x and y different colors")]
    PrecolorMismatch,
    #[error("not a suburb: {0}")]
    NotASuburb(String),
    #[error("lemma violated: {0}")]
    LemmaViolation(String),
    #[error("not a laminar family: {0}")]
    NotLaminar(String),
    #[error(transparent)]
    Coloring(#[from] ColoringError),
    #[error(transparent)]
    Embedding(#[from] EmbeddingError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecompNode {
    pub id: usize,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    /// The boundary cycle; `None` for the root (the whole plane).
    pub cycle: Option<CycleRef>,
    /// Faces of the graph inside the region.
    pub faces: BTreeSet<usize>,
    pub depth: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiveCycleDecomposition {
    pub graph: PlaneGraph,
    /// Node 0 is the root; the others follow in breadth-first order with
    /// siblings sorted by cycle.
    pub nodes: Vec<DecompNode>,
    /// How the laminar family was chosen.
    pub construction: &'static str,
}

pub const CONSTRUCTION: &str = "greedy: separating 5-cycles by increasing number of inner faces, then lexicographically";

fn compatible(a: &BTreeSet<usize>, b: &BTreeSet<usize>) -> bool {
    a.is_subset(b) || b.is_subset(a) || a.is_disjoint(b)
}

pub fn build_decomposition(g: &PlaneGraph) -> FiveCycleDecomposition {
    let mut cycles = g.find_separating_cycles(5);
    cycles.sort_by(|a, b| (a.interior_faces.len(), &a.vertices).cmp(&(b.interior_faces.len(), &b.vertices)));
    let mut chosen: Vec<(CycleRef, BTreeSet<usize>)> = Vec::new();
    for c in cycles {
        let faces: BTreeSet<usize> = c.interior_faces.iter().copied().collect();
        if chosen.iter().all(|(_, f)| compatible(f, &faces)) {
            chosen.push((c, faces));
        }
    }
    assemble(g, chosen, CONSTRUCTION)
}

/// A decomposition with the given boundary cycles, which must be separating
/// 5-cycles whose regions are pairwise nested or disjoint.
pub fn decomposition_from_cycles(g: &PlaneGraph, cycles: &[Vec<Vertex>]) -> Result<FiveCycleDecomposition, DecompError> {
    let mut chosen: Vec<(CycleRef, BTreeSet<usize>)> = Vec::new();
    for c in cycles {
        let ok = c.len() == 5 && (0..5).all(|i| g.has_edge(c[i], c[(i + 1) % 5]));
        if !ok {
            return Err(DecompError::NotLaminar(format!("{c:?} is not a 5-cycle")));
        }
        let r = g.cycle_ref(c);
        if !r.separating {
            return Err(DecompError::NotLaminar(format!("{c:?} is not separating")));
        }
        let faces: BTreeSet<usize> = r.interior_faces.iter().copied().collect();
        if let Some((o, _)) = chosen.iter().find(|(_, f)| !compatible(f, &faces) || *f == faces) {
            return Err(DecompError::NotLaminar(format!("{c:?} crosses {:?}", o.vertices)));
        }
        chosen.push((r, faces));
    }
    Ok(assemble(g, chosen, "given"))
}

fn assemble(
    g: &PlaneGraph,
    chosen: Vec<(CycleRef, BTreeSet<usize>)>,
    construction: &'static str,
) -> FiveCycleDecomposition {
    // Parent: the smallest chosen region strictly containing this one.
    let parent_of: Vec<Option<usize>> = (0..chosen.len())
        .map(|i| {
            (0..chosen.len())
                .filter(|&j| j != i && chosen[i].1.is_subset(&chosen[j].1))
                .min_by_key(|&j| (chosen[j].1.len(), j))
        })
        .collect();
    let all_faces: BTreeSet<usize> = (0..g.faces().len()).collect();
    let mut nodes =
        vec![DecompNode { id: 0, parent: None, children: Vec::new(), cycle: None, faces: all_faces, depth: 0 }];
    let mut queue = std::collections::VecDeque::from([(None, 0usize)]);
    while let Some((key, node)) = queue.pop_front() {
        let mut kids: Vec<usize> = (0..chosen.len()).filter(|&i| parent_of[i] == key).collect();
        kids.sort_by(|&a, &b| chosen[a].0.vertices.cmp(&chosen[b].0.vertices));
        for i in kids {
            let id = nodes.len();
            let depth = nodes[node].depth + 1;
            nodes.push(DecompNode {
                id,
                parent: Some(node),
                children: Vec::new(),
                cycle: Some(chosen[i].0.clone()),
                faces: chosen[i].1.clone(),
                depth,
            });
            nodes[node].children.push(id);
            queue.push_back((Some(i), id));
        }
    }
    FiveCycleDecomposition { graph: g.clone(), nodes, construction }
}

/// Proper colorings of a cycle of length `k`, as color sequences.
pub fn cycle_precolorings(k: usize) -> Vec<Vec<Color>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(k: usize, cur: &mut Vec<Color>, out: &mut Vec<Vec<Color>>) {
        if cur.len() == k {
            if cur[0] != cur[k - 1] {
                out.push(cur.clone());
            }
            return;
        }
        for c in 1..=3 {
            if cur.last() != Some(&c) {
                cur.push(c);
                rec(k, cur, out);
                cur.pop();
            }
        }
    }
    rec(k, &mut cur, &mut out);
    out
}

/// Number of extensions of `pre` to `g`, counted up to `cap`.
pub(crate) fn extensions_capped(g: &PlaneGraph, pre: &Coloring, cap: u32) -> u32 {
    let free: Vec<bool> = pre.colors().iter().map(|&c| c == 0).collect();
    let order = connectivity_order(g, &free);
    let mut s = Search::new(g, pre, order, vec![ALL_COLORS; g.vertex_count()]);
    let mut seen = 0;
    s.visit_from(0, &mut |_| {
        seen += 1;
        seen < cap
    });
    seen
}

/// The smallest number of extensions (capped at 2) over all proper
/// precolorings of `cycle`, with a precoloring attaining it.
pub fn min_cycle_extensions(g: &PlaneGraph, cycle: &[Vertex]) -> (u32, Vec<Color>) {
    let mut best = (u32::MAX, Vec::new());
    for psi in cycle_precolorings(cycle.len()) {
        let mut pre = Coloring::empty(g.vertex_count());
        for (&v, &c) in cycle.iter().zip(&psi) {
            pre.set(v, c);
        }
        let got = extensions_capped(g, &pre, 2);
        if got < best.0 {
            best = (got, psi);
            if got == 0 {
                break;
            }
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Richness {
    Rich,
    Poor,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodePiece {
    pub node: usize,
    pub piece: PlaneGraph,
    /// Vertex ids of the piece in the whole graph.
    pub old_ids: Vec<Vertex>,
    /// Outer 5-cycle, in piece ids; `None` for the root.
    pub outer_cycle: Option<Vec<Vertex>>,
    pub richness: Richness,
}

impl FiveCycleDecomposition {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn root(&self) -> &DecompNode {
        &self.nodes[0]
    }

    /// Vertices of the closed region of `node` (all vertices for the root).
    pub fn closed_region(&self, node: usize) -> BTreeSet<Vertex> {
        match &self.nodes[node].cycle {
            None => (0..self.graph.vertex_count()).collect(),
            Some(c) => c.vertices.iter().chain(&c.interior).copied().collect(),
        }
    }

    /// Vertex set of the piece `G_v`.
    pub fn piece_vertices(&self, node: usize) -> BTreeSet<Vertex> {
        let mut keep = self.closed_region(node);
        for &ch in &self.nodes[node].children {
            for v in &self.nodes[ch].cycle.as_ref().expect("non-root").interior {
                keep.remove(v);
            }
        }
        keep
    }

    /// The plane graph induced on `keep`, with the outer face bounded by
    /// the cycle of `outer_node` (or the graph's outer face for the root).
    fn induced(&self, keep: &BTreeSet<Vertex>, outer_node: usize) -> Result<(PlaneGraph, Vec<Vertex>), EmbeddingError> {
        let g = &self.graph;
        let dart = match &self.nodes[outer_node].cycle {
            Some(c) => Some(g.outside_dart_of_cycle(&c.vertices)),
            None => g.outer_face().darts().find(|(u, v)| keep.contains(u) && keep.contains(v)),
        };
        g.induced_subgraph(keep, dart)
    }

    pub fn piece(&self, node: usize) -> Result<(PlaneGraph, Vec<Vertex>), EmbeddingError> {
        self.induced(&self.piece_vertices(node), node)
    }

    pub fn caught_vertices(&self) -> BTreeSet<Vertex> {
        self.nodes.iter().filter_map(|n| n.cycle.as_ref()).flat_map(|c| c.vertices.iter().copied()).collect()
    }

    pub fn classify_node(&self, node: usize) -> Result<NodePiece, DecompError> {
        let (piece, old_ids) = self.piece(node)?;
        let Some(cycle) = &self.nodes[node].cycle else {
            return Ok(NodePiece { node, piece, old_ids, outer_cycle: None, richness: Richness::Rich });
        };
        let local: Vec<Vertex> =
            cycle.vertices.iter().map(|v| old_ids.binary_search(v).expect("cycle in piece")).collect();
        let (min, _) = min_cycle_extensions(&piece, &local);
        let richness = if min >= 2 { Richness::Rich } else { Richness::Poor };
        if richness == Richness::Poor && !is_poor_shape(&piece, &local) {
            return Err(DecompError::PoorShapeViolation { node });
        }
        Ok(NodePiece { node, piece, old_ids, outer_cycle: Some(local), richness })
    }

    pub fn classify_all(&self, jobs: Jobs) -> Result<Vec<NodePiece>, DecompError> {
        let ids: Vec<usize> = (0..self.nodes.len()).collect();
        par::map_ordered(&ids, jobs, |&v| self.classify_node(v)).into_iter().collect()
    }

    /// Laminarity, separating boundary cycles, and maximality. Returns a
    /// description of each problem found.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        for a in &self.nodes {
            if let Some(c) = &a.cycle {
                if c.len() != 5 || !c.separating {
                    out.push(format!("node {} cycle {:?} is not a separating 5-cycle", a.id, c.vertices));
                }
            }
            for b in &self.nodes {
                if a.id >= b.id {
                    continue;
                }
                let (fa, fb) = (&a.faces, &b.faces);
                let nested = if self.is_ancestor(a.id, b.id) {
                    fb.is_subset(fa) && fb.len() < fa.len()
                } else if self.is_ancestor(b.id, a.id) {
                    fa.is_subset(fb) && fa.len() < fb.len()
                } else {
                    fa.is_disjoint(fb)
                };
                if !nested {
                    out.push(format!("nodes {} and {} are not laminar", a.id, b.id));
                }
            }
        }
        for v in 0..self.nodes.len() {
            match self.piece(v) {
                Ok((piece, _)) => {
                    if !piece.find_separating_cycles(5).is_empty() {
                        out.push(format!("piece of node {v} has a separating 5-cycle"));
                    }
                }
                Err(e) => out.push(format!("piece of node {v}: {e}")),
            }
        }
        out
    }

    pub fn is_ancestor(&self, a: usize, mut b: usize) -> bool {
        while let Some(p) = self.nodes[b].parent {
            if p == a {
                return true;
            }
            b = p;
        }
        false
    }

    /// Vertices on some 5-cycle that are neither caught nor on a 5-face.
    pub fn uncovered_five_cycle_vertices(&self) -> Vec<Vertex> {
        let g = &self.graph;
        let caught = self.caught_vertices();
        let on_five_face = five_face_vertices(g);
        let on_cycle: BTreeSet<Vertex> = g.cycles_of_length(5).into_iter().flatten().collect();
        on_cycle.into_iter().filter(|v| !caught.contains(v) && !on_five_face.contains(v)).collect()
    }

    /// Pairwise disjoint `k`-suburbs, cut greedily from the deepest end of
    /// each maximal chain of poor nodes.
    pub fn find_suburbs(&self, pieces: &[NodePiece], k: usize) -> Vec<Suburb> {
        if k == 0 {
            return Vec::new();
        }
        let poor = |v: usize| pieces[v].richness == Richness::Poor;
        let mut chains: Vec<Vec<usize>> = Vec::new();
        for n in &self.nodes {
            if !poor(n.id) || n.parent.is_some_and(poor) {
                continue;
            }
            let mut chain = vec![n.id];
            loop {
                let last = *chain.last().expect("non-empty");
                match self.nodes[last].children.iter().find(|&&c| poor(c)) {
                    Some(&c) => chain.push(c),
                    None => break,
                }
            }
            chains.push(chain);
        }
        chains.sort_by_key(|c| {
            let deepest = *c.last().expect("non-empty");
            (std::cmp::Reverse(self.nodes[deepest].depth), deepest)
        });
        let mut out = Vec::new();
        for chain in chains {
            let mut end = chain.len();
            while end >= k {
                out.push(Suburb { nodes: chain[end - k..end].to_vec(), upwardly_mobile: None });
                end -= k;
            }
        }
        out
    }

    /// `G_P` for a suburb: the union of its pieces with the outer face
    /// bounded by the first node's cycle.
    pub fn suburb_graph(&self, s: &Suburb) -> Result<SuburbGraph, DecompError> {
        let first = *s.nodes.first().ok_or_else(|| DecompError::NotASuburb("empty".into()))?;
        for w in s.nodes.windows(2) {
            if self.nodes[w[1]].parent != Some(w[0]) {
                return Err(DecompError::NotASuburb(format!("{} is not the parent of {}", w[0], w[1])));
            }
        }
        let keep: BTreeSet<Vertex> = s.nodes.iter().flat_map(|&v| self.piece_vertices(v)).collect();
        let (graph, old_ids) = self.induced(&keep, first)?;
        let local = |v: &Vertex| old_ids.binary_search(v).expect("in suburb");
        let mut cycles: Vec<Vec<Vertex>> = s
            .nodes
            .iter()
            .map(|&v| self.nodes[v].cycle.as_ref().expect("suburbs avoid the root").vertices.iter().map(local).collect())
            .collect();
        // Inner face of the last piece: its 5-face other than the outer one.
        let last = *s.nodes.last().expect("non-empty");
        let (piece, piece_ids) = self.piece(last)?;
        let inner = piece
            .faces()
            .iter()
            .find(|f| f.id != piece.outer_face_id() && f.length == 5)
            .ok_or_else(|| DecompError::NotASuburb(format!("node {last} has no inner 5-face")))?;
        cycles.push(inner.boundary.iter().map(|&v| local(&piece_ids[v])).collect());
        for i in 1..cycles.len() {
            cycles[i] = align(&cycles[i - 1], &cycles[i]);
        }
        Ok(SuburbGraph { graph, old_ids, cycles })
    }

    pub fn is_upwardly_mobile(&self, s: &Suburb) -> Result<bool, DecompError> {
        Ok(self.suburb_graph(s)?.is_upwardly_mobile())
    }
}

/// Rotates or reverses `b` to agree with `a` in as many positions as possible.
fn align(a: &[Vertex], b: &[Vertex]) -> Vec<Vertex> {
    let k = b.len();
    let mut best = b.to_vec();
    let mut best_hits = 0;
    for rev in [false, true] {
        for shift in 0..k {
            let cand: Vec<Vertex> =
                (0..k).map(|i| if rev { b[(shift + k - i) % k] } else { b[(shift + i) % k] }).collect();
            let hits = cand.iter().zip(a).filter(|(x, y)| x == y).count();
            if hits > best_hits {
                best = cand;
                best_hits = hits;
            }
        }
    }
    best
}

pub fn five_face_vertices(g: &PlaneGraph) -> BTreeSet<Vertex> {
    g.faces().iter().filter(|f| f.length == 5).flat_map(|f| f.boundary.iter().copied()).collect()
}

/// The outer 5-cycle plus one vertex adjacent to two of its vertices.
fn is_poor_shape(piece: &PlaneGraph, cycle: &[Vertex]) -> bool {
    if piece.vertex_count() != 6 || piece.edge_count() != 7 {
        return false;
    }
    let Some(x) = (0..6).find(|v| !cycle.contains(v)) else { return false };
    let nbrs = piece.neighbors(x);
    if nbrs.len() != 2 {
        return false;
    }
    let i = cycle.iter().position(|&v| v == nbrs[0]).expect("neighbor on cycle");
    let j = cycle.iter().position(|&v| v == nbrs[1]).expect("neighbor on cycle");
    matches!((i + 5 - j) % 5, 2 | 3)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Suburb {
    /// Tree nodes from the top of the suburb down.
    pub nodes: Vec<usize>,
    pub upwardly_mobile: Option<bool>,
}

impl Suburb {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// The graph of a suburb, with its nested 5-cycles `u^0, ..., u^k` (the
/// last one bounds the inner face).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuburbGraph {
    pub graph: PlaneGraph,
    pub old_ids: Vec<Vertex>,
    pub cycles: Vec<Vec<Vertex>>,
}

impl SuburbGraph {
    /// Boundary vertices of the outer and inner faces.
    pub fn frame(&self) -> BTreeSet<Vertex> {
        let first = self.cycles.first().expect("outer cycle");
        let last = self.cycles.last().expect("inner cycle");
        first.iter().chain(last).copied().collect()
    }

    pub fn is_upwardly_mobile(&self) -> bool {
        min_cycle_extensions(&self.graph, &self.cycles[0]).0 >= 2
    }

    /// Checks that consecutive cycles differ in one vertex, whose
    /// replacement is adjacent to the two cycle neighbors of the vertex it
    /// replaces, and that nothing else is in the graph.
    pub fn validate(&self) -> Result<(), DecompError> {
        let g = &self.graph;
        let mut seen: BTreeSet<Vertex> = self.cycles[0].iter().copied().collect();
        for (i, w) in self.cycles.windows(2).enumerate() {
            let (a, b) = (&w[0], &w[1]);
            let diff: Vec<usize> = (0..5).filter(|&j| a[j] != b[j]).collect();
            let [d] = diff[..] else {
                return Err(DecompError::NotASuburb(format!("cycles {i} and {} differ in {} places", i + 1, diff.len())));
            };
            let x = b[d];
            let want = [a[(d + 4) % 5], a[(d + 1) % 5]];
            if seen.contains(&x) || !want.iter().all(|&u| g.has_edge(x, u)) {
                return Err(DecompError::NotASuburb(format!("vertex {x} does not replace {}", a[d])));
            }
            seen.insert(x);
        }
        if seen.len() != g.vertex_count() || g.edge_count() != 5 + 2 * (self.cycles.len() - 1) {
            return Err(DecompError::NotASuburb("extra vertices or edges".into()));
        }
        Ok(())
    }
}

/// A suburb graph built from the index sequence: starting from a 5-cycle,
/// step `i` replaces the vertex at position `d[i]` (1-based) by a new vertex
/// adjacent to its two cycle neighbors, drawn inside. With `anchors`, a
/// pendant vertex is added outside the first cycle and inside the last one
/// so that both are separating.
pub fn suburb_from_sequence(d: &[usize], anchors: bool) -> (PlaneGraph, SuburbGraph) {
    let angle = |j: usize| std::f64::consts::FRAC_PI_2 - j as f64 * 2.0 * std::f64::consts::PI / 5.0;
    let mut pts: Vec<(f64, f64)> = (0..5).map(|j| (10.0 * angle(j).cos(), 10.0 * angle(j).sin())).collect();
    let mut radius = [10.0f64; 5];
    let mut cur: Vec<Vertex> = (0..5).collect();
    let mut cycles = vec![cur.clone()];
    let mut edges: Vec<(Vertex, Vertex)> = (0..5).map(|j| (j, (j + 1) % 5)).collect();
    for &di in d {
        assert!((1..=5).contains(&di), "positions are 1..=5");
        let j = di - 1;
        let x = pts.len();
        radius[j] *= 0.8;
        pts.push((radius[j] * angle(j).cos(), radius[j] * angle(j).sin()));
        edges.push((x, cur[(j + 4) % 5]));
        edges.push((x, cur[(j + 1) % 5]));
        cur[j] = x;
        cycles.push(cur.clone());
    }
    let core = pts.len();
    if anchors {
        pts.push((0.0, 14.0));
        edges.push((core, 0));
        pts.push((0.0, 0.0));
        edges.push((core + 1, cur[0]));
    }
    let g = PlaneGraph::from_straight_line(&pts, &edges, OuterFace::Default).expect("star-shaped drawing");
    let outer = if anchors {
        g.outer_face_id()
    } else {
        let want: BTreeSet<Vertex> = (0..5).collect();
        g.faces().iter().find(|f| f.length == 5 && f.vertex_set() == want).expect("outer pentagon").id
    };
    let g = g.with_outer_face(outer).expect("face exists");
    let keep: BTreeSet<Vertex> = (0..core).collect();
    let (graph, old_ids) = if anchors {
        g.induced_subgraph(&keep, Some(g.outside_dart_of_cycle(&cycles[0]))).expect("sub-drawing")
    } else {
        (g.clone(), (0..core).collect())
    };
    (g, SuburbGraph { graph, old_ids, cycles })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ConfigKind {
    I,
    II,
    III,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RearrangeablePair {
    pub x: Vertex,
    pub y: Vertex,
    /// The shared 4-face `x ? y u`, as a boundary walk.
    pub shared_face: Vec<Vertex>,
    pub kind: ConfigKind,
    /// The vertex opposite to the middle of the shared face.
    pub u: Vertex,
    /// Recolored vertices: `[z]`, `[z, z']` or `[z1, z, z2]`.
    pub movers: Vec<Vertex>,
}

fn four_faces_at(g: &PlaneGraph, z: Vertex) -> Option<Vec<Vec<Vertex>>> {
    let faces = g.faces_at(z);
    let mut out = Vec::new();
    for f in faces {
        let face = g.face(f);
        if face.length != 4 || !face.is_cycle() {
            return None;
        }
        out.push(face.boundary.clone());
    }
    Some(out)
}

/// The 4-face through `a - z - b` (as a walk) and its fourth vertex.
fn face_through(g: &PlaneGraph, z: Vertex, a: Vertex, b: Vertex) -> Option<(Vec<Vertex>, Vertex)> {
    g.faces_at(z).into_iter().find_map(|f| {
        let face = g.face(f);
        let s = face.vertex_set();
        (face.length == 4 && face.is_cycle() && s.contains(&a) && s.contains(&b)).then(|| {
            let u = *face.boundary.iter().find(|&&v| v != z && v != a && v != b).expect("four vertices");
            (face.boundary.clone(), u)
        })
    })
}

/// Every instance of the three configurations, in the order I, II, III and
/// then by vertex.
pub fn find_configurations(g: &PlaneGraph, frame: &BTreeSet<Vertex>) -> Vec<RearrangeablePair> {
    let n = g.vertex_count();
    let inside = |v: Vertex| !frame.contains(&v);
    let mut out = Vec::new();
    for z in (0..n).filter(|&z| inside(z) && g.degree(z) == 2) {
        let (a, b) = (g.neighbors(z)[0], g.neighbors(z)[1]);
        if let Some((face, u)) = face_through(g, z, a, b) {
            out.push(RearrangeablePair { x: a, y: b, shared_face: face, kind: ConfigKind::I, u, movers: vec![z] });
        }
    }
    for z in (0..n).filter(|&z| inside(z) && g.degree(z) == 3) {
        if four_faces_at(g, z).is_none() {
            continue;
        }
        for &zp in g.neighbors(z) {
            if !inside(zp) || g.degree(zp) != 3 {
                continue;
            }
            let others: Vec<Vertex> = g.neighbors(z).iter().copied().filter(|&w| w != zp).collect();
            if let Some((face, u)) = face_through(g, z, others[0], others[1]) {
                out.push(RearrangeablePair {
                    x: others[0],
                    y: others[1],
                    shared_face: face,
                    kind: ConfigKind::II,
                    u,
                    movers: vec![z, zp],
                });
            }
        }
    }
    for z in (0..n).filter(|&z| inside(z) && g.degree(z) == 4) {
        if four_faces_at(g, z).is_none() {
            continue;
        }
        let rot = g.rotation(z);
        for i in 0..4 {
            let (z1, z2) = (rot[i], rot[(i + 2) % 4]);
            if !inside(z1) || !inside(z2) || g.degree(z1) != 3 || g.degree(z2) != 3 || four_faces_at(g, z1).is_none() {
                continue;
            }
            let others: Vec<Vertex> = g.neighbors(z1).iter().copied().filter(|&w| w != z).collect();
            if let Some((face, u)) = face_through(g, z1, others[0], others[1]) {
                if face.contains(&z) {
                    continue;
                }
                out.push(RearrangeablePair {
                    x: others[0],
                    y: others[1],
                    shared_face: face,
                    kind: ConfigKind::III,
                    u,
                    movers: vec![z1, z, z2],
                });
            }
        }
    }
    out
}

pub fn find_rearrangeable_pair(g: &PlaneGraph, frame: &BTreeSet<Vertex>) -> Result<RearrangeablePair, DecompError> {
    find_configurations(g, frame).into_iter().next().ok_or(DecompError::NoConfiguration)
}

/// Recolors `phi` so that the shared face of `pair` becomes bichromatic,
/// touching only the pair's movers.
pub fn rearrange(g: &PlaneGraph, phi: &Coloring, pair: &RearrangeablePair) -> Result<Coloring, DecompError> {
    let (a, b) = (phi.get(pair.x), phi.get(pair.y));
    if a.is_none() || a != b {
        return Err(DecompError::PrecolorMismatch);
    }
    let a = a.expect("checked");
    let b = phi.get(pair.u).ok_or(DecompError::PrecolorMismatch)?;
    let c = 6 - a - b;
    let mut out = phi.clone();
    match pair.kind {
        ConfigKind::I => out.set(pair.movers[0], b),
        ConfigKind::II => {
            out.set(pair.movers[1], a);
            out.set(pair.movers[0], b);
        }
        ConfigKind::III => {
            let (z1, z, z2) = (pair.movers[0], pair.movers[1], pair.movers[2]);
            if phi.get(z) != Some(b) {
                out.set(z1, b);
            } else {
                out.set(z2, c);
                out.set(z, a);
                out.set(z1, b);
            }
        }
    }
    if !out.is_proper(g) {
        return Err(DecompError::LemmaViolation(format!("{:?} recoloring is not proper", pair.kind)));
    }
    let face: BTreeSet<Color> = pair.shared_face.iter().filter_map(|&v| out.get(v)).collect();
    if face.len() != 2 {
        return Err(DecompError::LemmaViolation("shared face is not bichromatic".into()));
    }
    Ok(out)
}

/// The example graph with a 13-node decomposition tree. Ids: u1..u5 = 0..4, u5' = 5,
/// u5'' = 6, u4' = 7, u2' = 8, u3' = 9, w2 = 10, w3 = 11, w4 = 12,
/// w4' = 13, w7 = 14, w5 = 15, w6 = 16, w8 = 17, w10 = 18, w9 = 19,
/// w6' = 20, w3' = 21, w7' = 22, w2' = 23.
pub fn figure2_graph() -> PlaneGraph {
    let polar = |deg: f64, r: f64| (r * deg.to_radians().cos(), r * deg.to_radians().sin());
    let add = |a: (f64, f64), b: (f64, f64)| (a.0 + b.0, a.1 + b.1);
    let mid = |a: (f64, f64), b: (f64, f64)| ((a.0 + b.0) / 2.0, (a.1 + b.1) / 2.0);
    let neg = |a: (f64, f64)| (-a.0, -a.1);
    let u1 = polar(90.0, 2.5);
    let u5 = polar(162.0, 2.5);
    let w2 = add(u1, polar(72.0, 2.9377));
    let w3 = add(w2, polar(-216.0, 2.9377));
    let w4 = add(w3, polar(216.0, 2.9377));
    let w4p = add(w4, (0.5, -0.25));
    let w7 = add(w4p, (0.8, -0.4));
    let w5 = add(w7, (-0.25, -1.0));
    let w6 = mid(w3, w7);
    let w8 = mid(w7, w2);
    let w10 = add(u5, neg(polar(245.0, 1.25)));
    let w9 = add(u1, neg(polar(312.0, 0.5)));
    let w6p = add(w6, (1.0, 0.0));
    let w3p = mid(w6p, w2);
    let w7p = mid(w6p, w8);
    let w2p = mid(w3p, w8);
    let pts = vec![
        u1,
        polar(18.0, 2.5),
        polar(306.0, 2.5),
        polar(234.0, 2.5),
        u5,
        polar(162.0, 1.9),
        polar(162.0, 1.3),
        polar(234.0, 1.9),
        polar(18.0, 1.9),
        polar(306.0, 1.3),
        w2,
        w3,
        w4,
        w4p,
        w7,
        w5,
        w6,
        w8,
        w10,
        w9,
        w6p,
        w3p,
        w7p,
        w2p,
    ];
    let (u2, u3, u4, u5p, u5pp, u4p, u2p, u3p) = (1, 2, 3, 5, 6, 7, 8, 9);
    let (u1, u5) = (0, 4);
    let (w2, w3, w4, w4p, w7, w5, w6, w8, w10, w9, w6p, w3p, w7p, w2p) =
        (10, 11, 12, 13, 14, 15, 16, 17, 18, 19, 20, 21, 22, 23);
    let edges = vec![
        (u1, u2),
        (u2, u3),
        (u3, u4),
        (u4, u5),
        (u5, u1),
        (u5pp, u4),
        (u4, u5p),
        (u5p, u1),
        (u1, u5pp),
        (u3, u2p),
        (u2p, u1),
        (u4p, u3p),
        (u3p, u2p),
        (u5pp, u4p),
        (u4p, u3),
        (w6p, w7p),
        (w7p, w8),
        (w3p, w2p),
        (w2p, w8),
        (w3, w6p),
        (w6p, w7),
        (w6p, w3p),
        (w3p, w2),
        (u1, w2),
        (w2, w8),
        (w8, w7),
        (w7, u5),
        (u5, w4),
        (w4, w3),
        (w3, w4p),
        (w4p, w5),
        (w5, w7),
        (w7, w6),
        (w6, w3),
        (w3, w2),
        (w2, w9),
        (w9, u5),
        (u5, w4p),
        (w7, w10),
        (w10, w9),
    ];
    crate::generate::drawn(&pts, &edges)
}

/// The separating cycles of the tree drawn with that graph, in the order
/// t'1..t'12.
pub fn figure2_cycles() -> Vec<Vec<Vertex>> {
    vec![
        vec![0, 10, 11, 13, 4],
        vec![19, 10, 11, 13, 4],
        vec![14, 16, 11, 13, 4],
        vec![14, 16, 11, 10, 17],
        vec![14, 20, 11, 10, 17],
        vec![14, 20, 21, 10, 17],
        vec![22, 20, 21, 10, 17],
        vec![19, 10, 17, 14, 4],
        vec![0, 8, 2, 3, 4],
        vec![0, 8, 2, 3, 5],
        vec![0, 8, 2, 3, 6],
        vec![0, 8, 2, 7, 6],
    ]
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::coloring::enumerate_colorings;
    use crate::generate::families;

    /// Oracle: a cycle is separating when both sides keep vertices after
    /// deleting it (checked by connectivity in the graph minus the cycle
    /// plus a virtual outside vertex adjacent to the outer face).
    fn separating_by_deletion(g: &PlaneGraph, cycle: &[Vertex]) -> bool {
        let sides = g.cycle_sides(cycle);
        !sides.inside_vertices.is_empty() && !sides.outside_vertices.is_empty()
    }

    #[test]
    fn c5_has_trivial_decomposition() {
        let d = build_decomposition(&families::cycle(5));
        assert_eq!(d.node_count(), 1);
        assert!(d.caught_vertices().is_empty());
        assert!(d.violations().is_empty());
    }

    #[test]
    fn precolorings_of_cycles() {
        assert_eq!(cycle_precolorings(5).len(), 30);
        assert_eq!(cycle_precolorings(4).len(), 18);
    }

    #[test]
    fn one_separating_cycle() {
        // C5 with a pendant inside and one outside.
        let (g, _) = suburb_from_sequence(&[], true);
        let seps: Vec<_> = g.cycles_of_length(5).into_iter().filter(|c| separating_by_deletion(&g, c)).collect();
        assert_eq!(seps.len(), 1);
        let d = build_decomposition(&g);
        assert_eq!(d.node_count(), 2);
        assert_eq!(d.caught_vertices(), (0..5).collect());
        assert!(d.violations().is_empty());
    }

    #[test]
    fn nested_cycles_form_a_chain() {
        let (g, s) = suburb_from_sequence(&[1], true);
        let d = build_decomposition(&g);
        assert_eq!(d.node_count(), 3);
        assert_eq!(d.nodes[2].parent, Some(1));
        assert!(d.nodes[2].faces.is_subset(&d.nodes[1].faces));
        let outer: BTreeSet<Vertex> = s.cycles[0].iter().copied().collect();
        assert_eq!(d.nodes[1].cycle.as_ref().unwrap().vertices.iter().copied().collect::<BTreeSet<_>>(), outer);
        let pieces = d.classify_all(Jobs::Sequential).unwrap();
        assert_eq!(pieces[1].richness, Richness::Poor);
        assert_eq!(pieces[2].richness, Richness::Rich);
    }

    #[test]
    fn poor_piece_example() {
        // y1..y5 = 0..4, x = 5 adjacent to y1 and y3.
        let g = families::c5_with_chord_vertex();
        let pre = Coloring::from_pairs(6, &[(0, 1), (1, 2), (2, 3), (3, 1), (4, 3)]).unwrap();
        assert_eq!(extensions_capped(&g, &pre, 10), 1);
        let (min, _) = min_cycle_extensions(&g, &[0, 1, 2, 3, 4]);
        assert_eq!(min, 1);
        assert!(is_poor_shape(&g, &[0, 1, 2, 3, 4]));
        // A bare 5-cycle extends each precoloring exactly once, but has no
        // sixth vertex, so it is not a poor piece.
        let c5 = families::cycle(5);
        assert_eq!(min_cycle_extensions(&c5, &[0, 1, 2, 3, 4]).0, 1);
        assert!(!is_poor_shape(&c5, &[0, 1, 2, 3, 4]));
    }

    #[test]
    fn decompositions_of_the_catalog() {
        for g in crate::generate::exhaustive_tfp(8) {
            let d = build_decomposition(&g);
            assert!(d.violations().is_empty(), "{:?}", d.violations());
            assert!(d.uncovered_five_cycle_vertices().is_empty());
            d.classify_all(Jobs::Sequential).unwrap();
        }
    }

    #[test]
    fn random_graphs_decompose() {
        for seed in 0..30 {
            let g = crate::generate::random_tfp(seed, 14);
            let d = build_decomposition(&g);
            assert!(d.violations().is_empty(), "seed {seed}: {:?}", d.violations());
            assert!(d.uncovered_five_cycle_vertices().is_empty(), "seed {seed}");
            d.classify_all(Jobs::Sequential).unwrap();
        }
    }

    #[test]
    fn suburbs_of_a_chain() {
        let (g, _) = suburb_from_sequence(&[1, 2, 1, 3], true);
        let d = build_decomposition(&g);
        let pieces = d.classify_all(Jobs::Sequential).unwrap();
        let poor = pieces.iter().filter(|p| p.richness == Richness::Poor).count();
        assert_eq!(poor, 4);
        let subs = d.find_suburbs(&pieces, 4);
        assert_eq!(subs.len(), 1);
        let two = d.find_suburbs(&pieces, 2);
        assert_eq!(two.len(), 2);
        for s in &two {
            let sg = d.suburb_graph(s).unwrap();
            sg.validate().unwrap();
            // Oracle: count extensions of every outer precoloring.
            let outer = &sg.cycles[0];
            let min = cycle_precolorings(5)
                .into_iter()
                .map(|psi| {
                    let mut pre = Coloring::empty(sg.graph.vertex_count());
                    for (&v, &c) in outer.iter().zip(&psi) {
                        pre.set(v, c);
                    }
                    crate::coloring::count_colorings(&sg.graph, &pre).unwrap()
                })
                .min()
                .unwrap();
            assert_eq!(d.is_upwardly_mobile(s).unwrap(), min >= 2);
        }
    }

    #[test]
    fn configuration_one_from_a_repeat() {
        let (_, s) = suburb_from_sequence(&[1, 2, 2, 3], false);
        s.validate().unwrap();
        let found = find_configurations(&s.graph, &s.frame());
        assert!(found.iter().any(|p| p.kind == ConfigKind::I));
    }

    #[test]
    fn configuration_two_from_alternation() {
        let (_, s) = suburb_from_sequence(&[3, 1, 2, 1, 2, 3], false);
        let found = find_configurations(&s.graph, &s.frame());
        assert!(found.iter().any(|p| p.kind == ConfigKind::II));
    }

    #[test]
    fn every_eleven_suburb_sequence_has_a_configuration() {
        for code in 0..3usize.pow(11) {
            let mut d = Vec::with_capacity(11);
            let mut c = code;
            for _ in 0..11 {
                d.push(c % 3 + 1);
                c /= 3;
            }
            let (_, s) = suburb_from_sequence(&d, false);
            let pair = find_rearrangeable_pair(&s.graph, &s.frame());
            assert!(pair.is_ok(), "{d:?}");
            let p = pair.unwrap();
            assert!(!s.graph.has_edge(p.x, p.y) && p.x != p.y);
        }
    }

    fn check_rearrangements(s: &SuburbGraph, pair: &RearrangeablePair) -> usize {
        let frame = s.frame();
        let mut checked = 0;
        for phi in enumerate_colorings(&s.graph, &Coloring::empty(s.graph.vertex_count()), None).unwrap() {
            if phi.get(pair.x) != phi.get(pair.y) {
                assert_eq!(rearrange(&s.graph, &phi, pair), Err(DecompError::PrecolorMismatch));
                continue;
            }
            let out = rearrange(&s.graph, &phi, pair).unwrap();
            assert!(out.is_proper(&s.graph));
            assert!(frame.iter().all(|&v| out.get(v) == phi.get(v)));
            checked += 1;
        }
        checked
    }

    #[test]
    fn rearrangements_of_each_kind() {
        let cases: [(&[usize], ConfigKind); 3] = [
            (&[1, 2, 2, 3], ConfigKind::I),
            (&[3, 1, 2, 1, 2, 3], ConfigKind::II),
            (&[2, 1, 3, 2, 1, 3, 2, 1, 2], ConfigKind::III),
        ];
        for (d, kind) in cases {
            let (_, s) = suburb_from_sequence(d, false);
            let pair = find_configurations(&s.graph, &s.frame())
                .into_iter()
                .find(|p| p.kind == kind)
                .unwrap_or_else(|| panic!("{kind:?} in {d:?}"));
            assert!(check_rearrangements(&s, &pair) > 0);
        }
    }

    #[test]
    fn kind_one_recolors_the_middle() {
        // Face x z y u colored (1, 3, 1, 2): z becomes 2.
        let g = families::cycle(4);
        let pair = RearrangeablePair { x: 0, y: 2, shared_face: vec![0, 1, 2, 3], kind: ConfigKind::I, u: 3, movers: vec![1] };
        let phi = Coloring::from_pairs(4, &[(0, 1), (1, 3), (2, 1), (3, 2)]).unwrap();
        let out = rearrange(&g, &phi, &pair).unwrap();
        assert_eq!(out.get(1), Some(2));
    }

    #[test]
    fn figure_tree_as_drawn() {
        let g = figure2_graph();
        assert!(g.is_triangle_free());
        let d = decomposition_from_cycles(&g, &figure2_cycles()).unwrap();
        assert_eq!(d.node_count(), 13);
        let by_cycle = |c: &[Vertex]| {
            let want: BTreeSet<Vertex> = c.iter().copied().collect();
            d.nodes.iter().position(|n| n.cycle.as_ref().is_some_and(|r| r.vertices.iter().copied().collect::<BTreeSet<_>>() == want)).unwrap()
        };
        let t: Vec<usize> = figure2_cycles().iter().map(|c| by_cycle(c)).collect();
        // Tree shape: t'1 under the root, t'2 under t'1, t'3, t'4, t'8 under t'2, ...
        assert_eq!(d.nodes[t[0]].parent, Some(0));
        assert_eq!(d.nodes[t[1]].parent, Some(t[0]));
        for k in [2, 3, 7] {
            assert_eq!(d.nodes[t[k]].parent, Some(t[1]));
        }
        for k in [4, 5, 6, 9, 10, 11] {
            assert_eq!(d.nodes[t[k]].parent, Some(t[k - 1]));
        }
        assert_eq!(d.nodes[t[8]].parent, Some(0));
        let pieces = d.classify_all(Jobs::default()).unwrap();
        let rich: Vec<usize> = pieces.iter().filter(|p| p.richness == Richness::Rich).map(|p| p.node).collect();
        assert_eq!(rich, vec![0, t[1]]);

        let subs = d.find_suburbs(&pieces, 4);
        assert_eq!(subs.len(), 2);
        let mut seen = Vec::new();
        for s in &subs {
            let sg = d.suburb_graph(s).unwrap();
            sg.validate().unwrap();
            let verts: BTreeSet<Vertex> = sg.old_ids.iter().copied().collect();
            seen.push((verts, sg.is_upwardly_mobile()));
        }
        let plain = BTreeSet::from([0, 2, 3, 4, 8, 9, 7, 5, 6]);
        let mobile = BTreeSet::from([10, 11, 16, 14, 17, 23, 21, 20, 22]);
        assert!(seen.iter().any(|(v, _)| *v == plain), "{seen:?}");
        assert!(seen.contains(&(mobile, true)), "{seen:?}");

        // The root piece still has the separating 5-cycle u1 u2 u3 u4 u5.
        let (root_piece, ids) = d.piece(0).unwrap();
        let seps: Vec<BTreeSet<Vertex>> = root_piece
            .find_separating_cycles(5)
            .into_iter()
            .map(|c| c.vertices.iter().map(|&v| ids[v]).collect())
            .collect();
        assert!(seps.contains(&BTreeSet::from([0, 1, 2, 3, 4])));
        assert!(!d.violations().is_empty());
    }

    #[test]
    fn figure_graph_greedy_decomposition() {
        let g = figure2_graph();
        let d = build_decomposition(&g);
        assert!(d.violations().is_empty(), "{:?}", d.violations());
        assert!(d.uncovered_five_cycle_vertices().is_empty());
        let pieces = d.classify_all(Jobs::default()).unwrap();
        assert_eq!(pieces[0].richness, Richness::Rich);
        let seps = g.find_separating_cycles(5);
        let faces = |c: &CycleRef| c.interior_faces.iter().copied().collect::<BTreeSet<usize>>();
        let crossing = seps
            .iter()
            .flat_map(|a| seps.iter().map(move |b| (a, b)))
            .find(|(a, b)| !compatible(&faces(a), &faces(b)))
            .expect("some crossing pair");
        let pair = [crossing.0.vertices.clone(), crossing.1.vertices.clone()];
        assert!(matches!(decomposition_from_cycles(&g, &pair), Err(DecompError::NotLaminar(_))));
    }
}
