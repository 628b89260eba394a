//! Request graphs: degree-2 vertices asking their two neighbors to agree
//! (equality requests) or differ (inequality requests).

use std::collections::{BTreeMap, BTreeSet};

use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::coloring::{self, connectivity_order, Color, Coloring, ColoringError, Search, ALL_COLORS};
use crate::par::Jobs;
use crate::plane_graph::{EmbeddingError, OuterFace, PlaneGraph, RotationBuilder, Vertex};

pub type Weight = Rational64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RequestError {
    #[error("vertex {0} is both an equality and an inequality request")]
    Overlap(Vertex),
    #[error("request {vertex} has degree {degree}, expected 2")]
    BadDegree { vertex: Vertex, degree: usize },
    #[error("requests {0} and {1} are adjacent")]
    NotIndependent(Vertex, Vertex),
    #[error("request {0} has a non-positive weight")]
    BadWeight(Vertex),
    #[error("vertex {0} has a weight but is not a request")]
    StrayWeight(Vertex),
    #[error("vertex {0} out of range")]
    OutOfRange(Vertex),
    #[error("coloring is not a proper total coloring")]
    ImproperColoring,
    #[error("graph has no 3-coloring")]
    Uncolorable,
    #[error("operation needs equality requests only")]
    NotAllEquality,
    #[error("graph without the chosen edges still has a triangle {0:?}")]
    StillHasTriangle([Vertex; 3]),
    #[error("edge {0}-{1} not in the graph")]
    MissingEdge(Vertex, Vertex),
    #[error("weight too large to scale to integers")]
    Overflow,
    #[error(transparent)]
    Embedding(#[from] EmbeddingError),
    #[error(transparent)]
    Coloring(#[from] ColoringError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RequestGraph {
    graph: PlaneGraph,
    r_eq: BTreeSet<Vertex>,
    r_neq: BTreeSet<Vertex>,
    weights: BTreeMap<Vertex, Weight>,
}

impl RequestGraph {
    /// Requests missing from `weights` get weight 1.
    pub fn new(
        graph: PlaneGraph,
        r_eq: BTreeSet<Vertex>,
        r_neq: BTreeSet<Vertex>,
        mut weights: BTreeMap<Vertex, Weight>,
    ) -> Result<Self, RequestError> {
        let n = graph.vertex_count();
        if let Some(&v) = r_eq.intersection(&r_neq).next() {
            return Err(RequestError::Overlap(v));
        }
        for &r in r_eq.iter().chain(&r_neq) {
            if r >= n {
                return Err(RequestError::OutOfRange(r));
            }
            if graph.degree(r) != 2 {
                return Err(RequestError::BadDegree { vertex: r, degree: graph.degree(r) });
            }
            for &u in graph.neighbors(r) {
                if r_eq.contains(&u) || r_neq.contains(&u) {
                    return Err(RequestError::NotIndependent(r.min(u), r.max(u)));
                }
            }
            let w = weights.entry(r).or_insert_with(Weight::one);
            if *w <= Weight::zero() {
                return Err(RequestError::BadWeight(r));
            }
        }
        if let Some(&v) = weights.keys().find(|v| !r_eq.contains(v) && !r_neq.contains(v)) {
            return Err(RequestError::StrayWeight(v));
        }
        Ok(RequestGraph { graph, r_eq, r_neq, weights })
    }

    pub fn graph(&self) -> &PlaneGraph {
        &self.graph
    }

    pub fn r_eq(&self) -> &BTreeSet<Vertex> {
        &self.r_eq
    }

    pub fn r_neq(&self) -> &BTreeSet<Vertex> {
        &self.r_neq
    }

    pub fn weights(&self) -> &BTreeMap<Vertex, Weight> {
        &self.weights
    }

    pub fn weight(&self, r: Vertex) -> Weight {
        self.weights[&r]
    }

    pub fn is_request(&self, v: Vertex) -> bool {
        self.r_eq.contains(&v) || self.r_neq.contains(&v)
    }

    pub fn requests(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.r_eq.iter().chain(&self.r_neq).copied()
    }

    pub fn request_count(&self) -> usize {
        self.r_eq.len() + self.r_neq.len()
    }

    pub fn total_weight(&self) -> Weight {
        self.weights.values().sum()
    }

    /// The two neighbors of a request, in rotation order.
    pub fn ends(&self, r: Vertex) -> (Vertex, Vertex) {
        let rot = self.graph.rotation(r);
        (rot[0], rot[1])
    }

    pub fn is_satisfied(&self, r: Vertex, colors: &[Color]) -> bool {
        let (a, b) = self.ends(r);
        let same = colors[a] == colors[b];
        if self.r_eq.contains(&r) {
            same
        } else {
            !same
        }
    }

    /// Least common multiple of the weight denominators.
    pub fn weight_scale(&self) -> Result<i64, RequestError> {
        let mut l: i64 = 1;
        for w in self.weights.values() {
            l = l.checked_mul(*w.denom() / l.gcd(w.denom())).ok_or(RequestError::Overflow)?;
        }
        Ok(l)
    }

    /// Weights multiplied by [`RequestGraph::weight_scale`].
    pub fn integer_weights(&self) -> Result<BTreeMap<Vertex, i64>, RequestError> {
        let l = self.weight_scale()?;
        self.weights
            .iter()
            .map(|(&r, w)| {
                let scaled = w.numer().checked_mul(l / w.denom()).ok_or(RequestError::Overflow)?;
                Ok((r, scaled))
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SatisfactionResult {
    pub coloring: Coloring,
    pub satisfied_weight: Weight,
    pub total_weight: Weight,
    pub fraction: Weight,
}

pub fn satisfied_fraction(rg: &RequestGraph, phi: &Coloring) -> Result<SatisfactionResult, RequestError> {
    if !phi.is_total() || !phi.is_proper(rg.graph()) {
        return Err(RequestError::ImproperColoring);
    }
    let satisfied_weight: Weight =
        rg.requests().filter(|&r| rg.is_satisfied(r, phi.colors())).map(|r| rg.weight(r)).sum();
    let total_weight = rg.total_weight();
    let fraction = if total_weight.is_zero() { Weight::one() } else { satisfied_weight / total_weight };
    Ok(SatisfactionResult { coloring: phi.clone(), satisfied_weight, total_weight, fraction })
}

/// Colors every uncolored vertex greedily with its smallest free color.
/// Only meant for vertices whose neighbors are all colored.
pub(crate) fn complete_greedily(g: &PlaneGraph, colors: &mut [Color], vertices: impl IntoIterator<Item = Vertex>) {
    for r in vertices {
        if colors[r] != 0 {
            continue;
        }
        let c = (1..=3).find(|&c| g.neighbors(r).iter().all(|&u| colors[u] != c)).expect("degree at most two");
        colors[r] = c;
    }
}

/// Exact maximum satisfied fraction over all proper 3-colorings.
pub fn best_fraction(rg: &RequestGraph) -> Result<SatisfactionResult, RequestError> {
    best_fraction_with(rg, Jobs::Sequential)
}

pub fn best_fraction_with(rg: &RequestGraph, jobs: Jobs) -> Result<SatisfactionResult, RequestError> {
    let g = rg.graph();
    let n = g.vertex_count();
    // A request always has a free color, so only the rest of the graph matters.
    let free: Vec<bool> = (0..n).map(|v| !rg.is_request(v)).collect();
    let order = connectivity_order(g, &free);
    let search = Search::new(g, &Coloring::empty(n), order, vec![ALL_COLORS; n]);
    let iw = rg.integer_weights()?;
    let reqs: Vec<(Vertex, i128)> = iw.iter().map(|(&r, &w)| (r, w as i128)).collect();
    let total: i128 = reqs.iter().map(|r| r.1).sum();
    let (_, mut colors) = coloring::maximize(&search, jobs, Some(total), |colors| {
        reqs.iter().filter(|(r, _)| rg.is_satisfied(*r, colors)).map(|r| r.1).sum()
    })
    .ok_or(RequestError::Uncolorable)?;
    complete_greedily(g, &mut colors, rg.requests());
    let phi = Coloring::from_colors(colors)?;
    satisfied_fraction(rg, &phi)
}

/// Replaces every inequality request `a - r - b` by the path `a - x - y - b`
/// where `x` is an equality request of the same weight. `r` keeps its id as
/// `x`; each `y` is appended.
pub fn gadget_neq_to_eq(rg: &RequestGraph) -> Result<RequestGraph, RequestError> {
    let mut b = rg.graph().builder();
    let mut r_eq = rg.r_eq().clone();
    for &r in rg.r_neq() {
        let (a, end) = rg.ends(r);
        let y = b.add_vertex();
        b.set_rotation(y, vec![r, end]);
        b.set_rotation(r, vec![a, y]);
        b.replace(end, r, y);
        r_eq.insert(r);
    }
    let g = b.build(outer_of(rg.graph()))?;
    RequestGraph::new(g, r_eq, BTreeSet::new(), rg.weights().clone())
}

/// Replaces every equality request `t - r - b` by the 4-cycle `t l b r'`
/// with an inequality request `s` joining `l` and `r'` inside it. `r` keeps
/// its id as the plain vertex `r'`; `l` and `s` are appended.
pub fn gadget_eq_to_neq(rg: &RequestGraph) -> Result<RequestGraph, RequestError> {
    let mut b = rg.graph().builder();
    let mut r_neq = rg.r_neq().clone();
    let mut weights = rg.weights().clone();
    for &r in rg.r_eq() {
        let (t, bottom) = rg.ends(r);
        let l = b.add_vertex();
        let s = b.add_vertex();
        b.insert_after(t, r, l);
        b.insert_before(bottom, r, l);
        b.set_rotation(l, vec![t, s, bottom]);
        b.set_rotation(r, vec![t, bottom, s]);
        b.set_rotation(s, vec![l, r]);
        let w = weights.remove(&r).expect("weighted request");
        weights.insert(s, w);
        r_neq.insert(s);
    }
    let g = b.build(outer_of(rg.graph()))?;
    RequestGraph::new(g, BTreeSet::new(), r_neq, weights)
}

fn outer_of(g: &PlaneGraph) -> OuterFace {
    // Transforms never touch the darts leaving non-request vertices towards
    // non-request vertices, so such a dart pins the outer face.
    let f = g.outer_face();
    f.darts()
        .find(|&(u, v)| g.degree(u) != 2 || g.degree(v) != 2)
        .or_else(|| f.darts().next())
        .map_or(OuterFace::Default, |(u, v)| OuterFace::Dart(u, v))
}

/// Replaces request `r = t - r - b` by `k` parallel clones. The first clone
/// reuses `r`'s id; the others are appended and returned.
fn clone_request(b: &mut RotationBuilder, r: Vertex, t: Vertex, bottom: Vertex, k: usize) -> Vec<Vertex> {
    let mut clones = vec![r];
    let mut prev = r;
    for _ in 1..k {
        let c = b.add_vertex();
        b.set_rotation(c, vec![t, bottom]);
        b.insert_after(t, prev, c);
        b.insert_before(bottom, prev, c);
        clones.push(c);
        prev = c;
    }
    clones
}

/// Scales weights to integers and replaces each request by that many
/// unit-weight clones.
pub fn integerize_and_clone(rg: &RequestGraph) -> Result<RequestGraph, RequestError> {
    if !rg.r_neq().is_empty() {
        return Err(RequestError::NotAllEquality);
    }
    let iw = rg.integer_weights()?;
    let mut b = rg.graph().builder();
    let mut r_eq = BTreeSet::new();
    for (&r, &k) in &iw {
        let (t, bottom) = rg.ends(r);
        r_eq.extend(clone_request(&mut b, r, t, bottom, k as usize));
    }
    let g = b.build(outer_of(rg.graph()))?;
    RequestGraph::new(g, r_eq, BTreeSet::new(), BTreeMap::new())
}

/// Subdivides every edge of `x`; the subdivision vertices become unit
/// inequality requests.
pub fn subdivide_for_tria(g: &PlaneGraph, x: &[(Vertex, Vertex)]) -> Result<RequestGraph, RequestError> {
    let set: BTreeSet<(Vertex, Vertex)> = x.iter().map(|&(u, v)| (u.min(v), u.max(v))).collect();
    for &(u, v) in &set {
        if u >= g.vertex_count() || v >= g.vertex_count() || !g.has_edge(u, v) {
            return Err(RequestError::MissingEdge(u, v));
        }
    }
    for (u, v) in g.edges() {
        if set.contains(&(u, v)) {
            continue;
        }
        for &w in g.neighbors(u) {
            if w != v
                && g.has_edge(v, w)
                && !set.contains(&(u.min(w), u.max(w)))
                && !set.contains(&(v.min(w), v.max(w)))
            {
                let mut t = [u, v, w];
                t.sort_unstable();
                return Err(RequestError::StillHasTriangle(t));
            }
        }
    }
    let mut b = g.builder();
    let mut r_neq = BTreeSet::new();
    for &(u, v) in &set {
        let s = b.add_vertex();
        b.set_rotation(s, vec![u, v]);
        b.replace(u, v, s);
        b.replace(v, u, s);
        r_neq.insert(s);
    }
    let outer = g.outer_face().darts().next().map_or(OuterFace::Default, |(u, v)| {
        if set.contains(&(u.min(v), u.max(v))) {
            OuterFace::Default
        } else {
            OuterFace::Dart(u, v)
        }
    });
    let h = b.build(outer)?;
    RequestGraph::new(h, BTreeSet::new(), r_neq, BTreeMap::new())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExplosionRow {
    /// Colors of the non-request vertices (requests left at 0).
    pub base: Coloring,
    pub satisfied: usize,
    pub extensions: u128,
    pub expected: u128,
}

#[derive(Debug, Clone)]
pub struct CloneExplosion {
    pub graph: PlaneGraph,
    pub clones: BTreeMap<Vertex, Vec<Vertex>>,
    pub rows: Vec<ExplosionRow>,
}

impl CloneExplosion {
    pub fn all_match(&self) -> bool {
        self.rows.iter().all(|r| r.extensions == r.expected)
    }
}

/// Replaces each equality request by `n` clones and, for every coloring of
/// the rest of the graph, counts its extensions to the clones.
pub fn clone_explosion(rg: &RequestGraph, n: usize) -> Result<CloneExplosion, RequestError> {
    if !rg.r_neq().is_empty() {
        return Err(RequestError::NotAllEquality);
    }
    if n == 0 {
        return Err(RequestError::BadWeight(usize::MAX));
    }
    let mut b = rg.graph().builder();
    let mut clones = BTreeMap::new();
    for &r in rg.r_eq() {
        let (t, bottom) = rg.ends(r);
        clones.insert(r, clone_request(&mut b, r, t, bottom, n));
    }
    let h = b.build(outer_of(rg.graph()))?;
    let base_n = rg.graph().vertex_count();
    let free: Vec<bool> = (0..h.vertex_count()).map(|v| v < base_n && !rg.is_request(v)).collect();
    let order = connectivity_order(&h, &free);
    let mut search = Search::new(&h, &Coloring::empty(h.vertex_count()), order, vec![ALL_COLORS; h.vertex_count()]);
    let mut rows = Vec::new();
    let mut err = None;
    search.visit_from(0, &mut |colors| {
        let pre = Coloring::from_colors(colors.to_vec()).expect("valid colors");
        let satisfied = rg.r_eq().iter().filter(|&&r| rg.is_satisfied(r, colors)).count();
        match coloring::count_colorings(&h, &pre) {
            Ok(extensions) => {
                let mut base = pre.clone();
                base.colors_mut().truncate(base_n);
                rows.push(ExplosionRow { base, satisfied, extensions, expected: 1u128 << (satisfied * n) });
                true
            }
            Err(e) => {
                err = Some(e);
                false
            }
        }
    });
    if let Some(e) = err {
        return Err(e.into());
    }
    Ok(CloneExplosion { graph: h, clones, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{families, random_request_graph};

    fn path_request(neq: bool) -> RequestGraph {
        let g = families::path(3);
        let set = BTreeSet::from([1]);
        if neq {
            RequestGraph::new(g, BTreeSet::new(), set, BTreeMap::new()).unwrap()
        } else {
            RequestGraph::new(g, set, BTreeSet::new(), BTreeMap::new()).unwrap()
        }
    }

    /// Oracle: every assignment in {1,2,3}^n, keeping the proper ones.
    fn brute_best(rg: &RequestGraph) -> Weight {
        let g = rg.graph();
        let n = g.vertex_count();
        let edges = g.edges();
        let mut best: Option<Weight> = None;
        for code in 0..3u64.pow(n as u32) {
            let mut x = code;
            let colors: Vec<u8> = (0..n)
                .map(|_| {
                    let c = (x % 3) as u8 + 1;
                    x /= 3;
                    c
                })
                .collect();
            if edges.iter().any(|&(u, v)| colors[u] == colors[v]) {
                continue;
            }
            let sat: Weight = rg.requests().filter(|&r| rg.is_satisfied(r, &colors)).map(|r| rg.weight(r)).sum();
            let f = if rg.request_count() == 0 { Weight::one() } else { sat / rg.total_weight() };
            best = Some(best.map_or(f, |b: Weight| b.max(f)));
        }
        best.expect("colorable")
    }

    #[test]
    fn fraction_on_a_path() {
        let rg = path_request(true);
        let phi = Coloring::from_colors(vec![1, 3, 2]).unwrap();
        assert_eq!(satisfied_fraction(&rg, &phi).unwrap().fraction, Weight::one());
        let phi = Coloring::from_colors(vec![1, 2, 1]).unwrap();
        assert_eq!(satisfied_fraction(&rg, &phi).unwrap().fraction, Weight::zero());
        assert_eq!(best_fraction(&rg).unwrap().fraction, Weight::one());
    }

    #[test]
    fn half_of_two_requests() {
        // 0 - 1 - 2 - 3 - 4 with requests 1 (neq) and 3 (eq).
        let g = families::path(5);
        let rg = RequestGraph::new(g, BTreeSet::from([3]), BTreeSet::from([1]), BTreeMap::new()).unwrap();
        let phi = Coloring::from_colors(vec![1, 3, 2, 1, 3]).unwrap();
        assert_eq!(satisfied_fraction(&rg, &phi).unwrap().fraction, Weight::new(1, 2));
    }

    #[test]
    fn empty_request_set_is_fully_satisfied() {
        let rg = RequestGraph::new(families::cycle(5), BTreeSet::new(), BTreeSet::new(), BTreeMap::new()).unwrap();
        let r = best_fraction(&rg).unwrap();
        assert_eq!(r.fraction, Weight::one());
        assert!(r.coloring.is_proper(rg.graph()));
    }

    #[test]
    fn invalid_request_sets() {
        let g = families::path(3);
        assert!(matches!(
            RequestGraph::new(g.clone(), BTreeSet::from([0]), BTreeSet::new(), BTreeMap::new()),
            Err(RequestError::BadDegree { vertex: 0, degree: 1 })
        ));
        assert!(matches!(
            RequestGraph::new(g.clone(), BTreeSet::from([1]), BTreeSet::from([1]), BTreeMap::new()),
            Err(RequestError::Overlap(1))
        ));
        let c4 = families::cycle(4);
        assert!(matches!(
            RequestGraph::new(c4, BTreeSet::from([0, 1]), BTreeSet::new(), BTreeMap::new()),
            Err(RequestError::NotIndependent(0, 1))
        ));
        assert!(matches!(
            RequestGraph::new(g, BTreeSet::from([1]), BTreeSet::new(), BTreeMap::from([(1, Weight::zero())])),
            Err(RequestError::BadWeight(1))
        ));
    }

    #[test]
    fn neq_gadget_shape() {
        let rg = path_request(true);
        let out = gadget_neq_to_eq(&rg).unwrap();
        assert_eq!(out.graph().vertex_count(), 4);
        assert!(out.r_neq().is_empty());
        assert_eq!(out.r_eq().len(), 1);
        assert!(out.graph().is_triangle_free());
        assert_eq!(best_fraction(&out).unwrap().fraction, best_fraction(&rg).unwrap().fraction);
        let none = path_request(false);
        assert_eq!(gadget_neq_to_eq(&none).unwrap(), none);
    }

    #[test]
    fn eq_gadget_shape() {
        let rg = path_request(false);
        let out = gadget_eq_to_neq(&rg).unwrap();
        let g = out.graph();
        assert_eq!(g.vertex_count(), 5);
        assert!(out.r_eq().is_empty());
        assert_eq!(out.r_neq().len(), 1);
        assert!(g.is_triangle_free());
        assert_eq!(g.cycles_of_length(4).len(), 3);
        assert_eq!(best_fraction(&out).unwrap().fraction, Weight::one());
        let none = path_request(true);
        assert_eq!(gadget_eq_to_neq(&none).unwrap(), none);
    }

    #[test]
    fn eq_gadget_local_behaviour() {
        // t = 0, b = 2, r' = 1, l = 3, s = 4.
        let out = gadget_eq_to_neq(&path_request(false)).unwrap();
        let s = *out.r_neq().iter().next().unwrap();
        for (ct, cb) in [(1, 1), (1, 2)] {
            let pre = Coloring::from_pairs(5, &[(0, ct), (2, cb)]).unwrap();
            let colorings: Vec<Coloring> = coloring::enumerate_colorings(out.graph(), &pre, None).unwrap().collect();
            let any_sat = colorings.iter().any(|c| out.is_satisfied(s, c.colors()));
            if ct == cb {
                assert!(any_sat);
            } else {
                assert!(colorings.iter().all(|c| c.get(1) == c.get(3)));
                assert!(!any_sat);
            }
        }
    }

    #[test]
    fn integerize_example() {
        let g = families::path(3);
        let rg =
            RequestGraph::new(g, BTreeSet::from([1]), BTreeSet::new(), BTreeMap::from([(1, Weight::new(3, 2))]))
                .unwrap();
        let out = integerize_and_clone(&rg).unwrap();
        assert_eq!(out.r_eq().len(), 3);
        assert!(out.weights().values().all(|w| *w == Weight::one()));
        assert_eq!(out.graph().faces().len(), 3);
        assert_eq!(best_fraction(&out).unwrap().fraction, best_fraction(&rg).unwrap().fraction);
    }

    #[test]
    fn subdivision_of_chord() {
        // C4 0-1-2-3 with the chord 0-2.
        let rot = vec![vec![1, 2, 3], vec![2, 0], vec![3, 0, 1], vec![0, 2]];
        let g = PlaneGraph::new(rot, OuterFace::Default).unwrap();
        let rg = subdivide_for_tria(&g, &[(0, 2)]).unwrap();
        assert_eq!(rg.r_neq().len(), 1);
        assert!(rg.graph().is_triangle_free());
        assert_eq!(rg.graph().vertex_count(), 5);
        let empty = subdivide_for_tria(&g, &[]);
        assert!(matches!(empty, Err(RequestError::StillHasTriangle(_))));
        let c4 = families::cycle(4);
        assert_eq!(subdivide_for_tria(&c4, &[]).unwrap().request_count(), 0);
    }

    #[test]
    fn subdivision_counts_bicolored_edges() {
        let rot = vec![vec![1, 2, 3], vec![2, 0], vec![3, 0, 1], vec![0, 2]];
        let g = PlaneGraph::new(rot, OuterFace::Default).unwrap();
        let rg = subdivide_for_tria(&g, &[(0, 2)]).unwrap();
        for phi in coloring::enumerate_colorings(rg.graph(), &Coloring::empty(5), None).unwrap() {
            let frac = satisfied_fraction(&rg, &phi).unwrap().fraction;
            let bicolored = phi.get(0) != phi.get(2);
            assert_eq!(frac, if bicolored { Weight::one() } else { Weight::zero() });
        }
    }

    #[test]
    fn clone_explosion_examples() {
        let rg = path_request(false);
        let ex = clone_explosion(&rg, 3).unwrap();
        assert!(ex.all_match());
        let equal = ex.rows.iter().find(|r| r.base.get(0) == r.base.get(2)).unwrap();
        assert_eq!(equal.extensions, 8);
        let differ = ex.rows.iter().find(|r| r.base.get(0) != r.base.get(2)).unwrap();
        assert_eq!(differ.extensions, 1);

        // Two requests on a path a - r1 - b - r2 - c.
        let g = families::path(5);
        let rg = RequestGraph::new(g, BTreeSet::from([1, 3]), BTreeSet::new(), BTreeMap::new()).unwrap();
        let ex = clone_explosion(&rg, 2).unwrap();
        assert!(ex.all_match());
        assert!(ex.rows.iter().any(|r| r.satisfied == 2 && r.extensions == 16));
    }

    #[test]
    fn transforms_preserve_best_fraction_on_random_instances() {
        for seed in 0..25 {
            let rg = random_request_graph(seed, 9, 3);
            let best = best_fraction(&rg).unwrap().fraction;
            assert_eq!(best, brute_best(&rg), "seed {seed}");
            let eq = gadget_neq_to_eq(&rg).unwrap();
            assert!(eq.graph().is_triangle_free());
            assert_eq!(best_fraction(&eq).unwrap().fraction, best, "seed {seed}");
            let neq = gadget_eq_to_neq(&rg).unwrap();
            assert!(neq.graph().is_triangle_free());
            assert_eq!(best_fraction(&neq).unwrap().fraction, best, "seed {seed}");
            let cloned = integerize_and_clone(&eq).unwrap();
            assert_eq!(best_fraction(&cloned).unwrap().fraction, best, "seed {seed}");
        }
    }

    #[test]
    fn parallel_best_matches_sequential() {
        for seed in 0..5 {
            let rg = random_request_graph(seed, 10, 4);
            assert_eq!(best_fraction_with(&rg, Jobs::Parallel(3)).unwrap(), best_fraction(&rg).unwrap());
        }
    }
}
