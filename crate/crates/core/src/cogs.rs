//! Cogs: plane graphs with a precolored path `P`, vertices `S` that must be
//! colored from {1,2}, and weighted demands `T` that are satisfied when they
//! avoid color 3.

use std::collections::{BTreeMap, BTreeSet};

use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::coloring::{self, check_precoloring, connectivity_order, mask_of, Color, Coloring, ColoringError, Search, ALL_COLORS};
use crate::generate::drawn;
use crate::listcolor::Condition;
use crate::par::Jobs;
use crate::plane_graph::{EmbeddingError, PlaneGraph, Vertex};
use crate::requests::{self, RequestError, RequestGraph, SatisfactionResult, Weight};

/// 1/562.
pub fn alpha1() -> Rational64 {
    Rational64::new(1, 562)
}

/// `alpha1 / 9`, that is 1/5058.
pub fn alpha0() -> Rational64 {
    alpha1() / 9
}

const S_MASK: u8 = mask_of(1) | mask_of(2);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CogError {
    #[error("vertex {0} out of range")]
    OutOfRange(Vertex),
    #[error("demand {0} has a non-positive weight")]
    BadWeight(Vertex),
    #[error("vertex {0} has a weight but is not a demand")]
    StrayWeight(Vertex),
    #[error("precoloring of P is not proper or has the wrong length")]
    BadPsi,
    #[error("no coloring extends the precoloring with S colored from {{1,2}}")]
    NoCogColoring,
    #[error("Q does not split the cog: {0}")]
    QNotSplitting(String),
    #[error("vertex {0} is not a request adjacent to the chosen vertex")]
    RequestNotAtV(Vertex),
    #[error("hypothesis violated: {0}")]
    HypothesisViolation(String),
    #[error("{lemma}: best fraction {fraction} is below {bound}")]
    StatementViolation { lemma: &'static str, fraction: Rational64, bound: Rational64 },
    #[error(transparent)]
    Request(#[from] RequestError),
    #[error(transparent)]
    Coloring(#[from] ColoringError),
    #[error(transparent)]
    Embedding(#[from] EmbeddingError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cog {
    pub graph: PlaneGraph,
    /// Vertices of the precolored path, in path order.
    pub p: Vec<Vertex>,
    pub s: BTreeSet<Vertex>,
    pub t: BTreeSet<Vertex>,
    pub w: BTreeMap<Vertex, Weight>,
}

impl Cog {
    /// Demands missing from `w` get weight 1.
    pub fn new(
        graph: PlaneGraph,
        p: Vec<Vertex>,
        s: BTreeSet<Vertex>,
        t: BTreeSet<Vertex>,
        mut w: BTreeMap<Vertex, Weight>,
    ) -> Result<Cog, CogError> {
        let n = graph.vertex_count();
        if let Some(&v) = p.iter().chain(&s).chain(&t).find(|&&v| v >= n) {
            return Err(CogError::OutOfRange(v));
        }
        for &v in &t {
            if *w.entry(v).or_insert_with(Weight::one) <= Weight::zero() {
                return Err(CogError::BadWeight(v));
            }
        }
        if let Some(&v) = w.keys().find(|v| !t.contains(v)) {
            return Err(CogError::StrayWeight(v));
        }
        Ok(Cog { graph, p, s, t, w })
    }

    pub fn total_weight(&self) -> Weight {
        self.w.values().sum()
    }

    pub fn weight(&self, t: Vertex) -> Weight {
        self.w.get(&t).copied().unwrap_or_else(Weight::zero)
    }

    /// The same cog with colors 1 and 2 exchanged in a precoloring of P.
    fn swap12(psi: &[Color]) -> Vec<Color> {
        psi.iter().map(|&c| match c {
            1 => 2,
            2 => 1,
            c => c,
        })
        .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CogReport {
    pub conditions: Vec<Condition>,
}

impl CogReport {
    /// S independent, the role sets disjoint and P a path.
    pub fn is_cog(&self) -> bool {
        self.conditions.iter().take(4).all(|c| c.holds)
    }

    /// Also P along the outer face and S, T on it.
    pub fn is_plane_cog(&self) -> bool {
        self.conditions.iter().all(|c| c.holds)
    }

    pub fn condition(&self, name: &str) -> Option<&Condition> {
        self.conditions.iter().find(|c| c.name == name)
    }
}

pub fn validate_cog(c: &Cog) -> CogReport {
    let g = &c.graph;
    let mut conditions = Vec::new();
    conditions.push(Condition::check("S and T are disjoint", {
        let both: Vec<Vertex> = c.s.intersection(&c.t).copied().collect();
        (!both.is_empty()).then_some(both)
    }));
    conditions.push(Condition::check("P avoids S and T", {
        let bad: Vec<Vertex> = c.p.iter().copied().filter(|v| c.s.contains(v) || c.t.contains(v)).collect();
        (!bad.is_empty()).then_some(bad)
    }));
    conditions.push(Condition::check("S is independent", edge_within(g, &c.s)));
    conditions.push(Condition::check("P is a path", {
        let distinct: BTreeSet<_> = c.p.iter().collect();
        let broken = distinct.len() != c.p.len() || c.p.windows(2).any(|e| !g.has_edge(e[0], e[1]));
        broken.then(|| c.p.clone())
    }));
    conditions.push(Condition::check("P lies along the outer face", {
        let off = c.p.iter().any(|&v| !g.is_on_outer_face(v)) || c.p.windows(2).any(|e| !g.is_outer_edge(e[0], e[1]));
        off.then(|| c.p.clone())
    }));
    conditions.push(Condition::check("S and T are on the outer face", {
        let off: Vec<Vertex> = c.s.iter().chain(&c.t).copied().filter(|&v| !g.is_on_outer_face(v)).collect();
        (!off.is_empty()).then_some(off)
    }));
    CogReport { conditions }
}

fn edge_within(g: &PlaneGraph, set: &BTreeSet<Vertex>) -> Option<Vec<Vertex>> {
    set.iter()
        .find_map(|&u| g.neighbors(u).iter().find(|v| set.contains(v)).map(|&v| vec![u, v]))
}

/// A path `t s t'` with `t, t'` in T and `s` in S, or an edge inside T.
pub fn polish_witness(c: &Cog) -> Option<Vec<Vertex>> {
    if let Some(e) = edge_within(&c.graph, &c.t) {
        return Some(e);
    }
    for &s in &c.s {
        let ts: Vec<Vertex> = c.graph.neighbors(s).iter().copied().filter(|v| c.t.contains(v)).collect();
        if ts.len() >= 2 {
            return Some(vec![ts[0], s, ts[1]]);
        }
    }
    None
}

pub fn is_polished(c: &Cog) -> bool {
    polish_witness(c).is_none()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ObstructionKind {
    A,
    B,
    C,
    D,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Role {
    P,
    S,
    T,
    /// Any vertex outside P.
    Plain,
}

impl ObstructionKind {
    pub const ALL: [ObstructionKind; 4] = [ObstructionKind::A, ObstructionKind::B, ObstructionKind::C, ObstructionKind::D];

    /// Roles around the pattern's cycle, P first.
    pub fn cycle_roles(self) -> &'static [Role] {
        use Role::*;
        match self {
            ObstructionKind::A => &[P, P, S, T, S],
            ObstructionKind::B => &[P, P, P, T, S],
            ObstructionKind::C => &[P, P, P, S, T, S],
            ObstructionKind::D => &[P, P, P, Plain, S, T, S, Plain],
        }
    }

    /// Edges besides the cycle, as positions on it.
    pub fn chords(self) -> &'static [(usize, usize)] {
        match self {
            ObstructionKind::D => &[(3, 7)],
            _ => &[],
        }
    }
}

/// An occurrence of a pattern: `vertex_map[i]` is the cog vertex playing
/// pattern position `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObstructionMatch {
    pub kind: ObstructionKind,
    pub vertex_map: Vec<Vertex>,
}

fn fits(c: &Cog, v: Vertex, role: Role) -> bool {
    match role {
        Role::P => c.p.contains(&v),
        Role::S => c.s.contains(&v),
        Role::T => c.t.contains(&v),
        Role::Plain => !c.p.contains(&v),
    }
}

/// Every subcog isomorphic to one of the obstruction patterns. Occurrences
/// that give the same vertices the same roles are reported once.
pub fn detect_obstructions(c: &Cog) -> Vec<ObstructionMatch> {
    let mut out = Vec::new();
    for kind in ObstructionKind::ALL {
        let roles = kind.cycle_roles();
        let k = roles.len();
        let mut seen = BTreeSet::new();
        for cyc in c.graph.cycles_of_length(k) {
            for start in 0..k {
                for dir in [1, k - 1] {
                    let map: Vec<Vertex> = (0..k).map(|i| cyc[(start + dir * i) % k]).collect();
                    let ok = (0..k).all(|i| fits(c, map[i], roles[i]))
                        && kind.chords().iter().all(|&(a, b)| c.graph.has_edge(map[a], map[b]));
                    if !ok {
                        continue;
                    }
                    let key: BTreeSet<(Vertex, Role)> = map.iter().copied().zip(roles.iter().copied()).collect();
                    if seen.insert(key) {
                        out.push(ObstructionMatch { kind, vertex_map: map });
                    }
                }
            }
        }
    }
    out
}

/// Outer walk positions and the two boundary arcs between the ends of `q`.
struct Split {
    side1: BTreeSet<Vertex>,
    side2: BTreeSet<Vertex>,
    dart1: (Vertex, Vertex),
    dart2: (Vertex, Vertex),
}

fn split_by(g: &PlaneGraph, q: &[Vertex]) -> Result<Split, CogError> {
    let bad = |m: &str| Err(CogError::QNotSplitting(m.to_string()));
    if q.len() < 2 {
        return bad("Q needs at least one edge");
    }
    let distinct: BTreeSet<_> = q.iter().collect();
    if distinct.len() != q.len() || q.iter().any(|&v| v >= g.vertex_count()) {
        return bad("Q repeats a vertex or is out of range");
    }
    for i in 0..q.len() {
        for j in i + 1..q.len() {
            if g.has_edge(q[i], q[j]) != (j == i + 1) {
                return bad("Q is not an induced path");
            }
        }
    }
    let (a, b) = (q[0], q[q.len() - 1]);
    if q[1..q.len() - 1].iter().any(|&v| g.is_on_outer_face(v)) || q.windows(2).any(|e| g.is_outer_edge(e[0], e[1])) {
        return bad("Q touches the outer face away from its ends");
    }
    let outer = g.outer_face();
    let walk = &outer.boundary[..outer.length];
    let pos = |x: Vertex| {
        let at: Vec<usize> = (0..walk.len()).filter(|&i| walk[i] == x).collect();
        (at.len() == 1).then(|| at[0])
    };
    let (Some(ia), Some(ib)) = (pos(a), pos(b)) else {
        return bad("an end of Q is not visited exactly once by the outer walk");
    };
    let len = walk.len();
    let arc = |from: usize, to: usize| {
        let mut out = vec![walk[from]];
        let mut i = from;
        while i != to {
            i = (i + 1) % len;
            out.push(walk[i]);
        }
        out
    };
    let inner: Vec<Vertex> = q[1..q.len() - 1].to_vec();
    let mut sides = Vec::new();
    for (from, to, back) in [(ia, ib, true), (ib, ia, false)] {
        let mut cyc = arc(from, to);
        if back {
            cyc.extend(inner.iter().rev());
        } else {
            cyc.extend(inner.iter());
        }
        let distinct: BTreeSet<_> = cyc.iter().collect();
        if distinct.len() != cyc.len() || cyc.len() < 3 {
            return bad("a boundary arc between the ends of Q is not a path");
        }
        let mut side: BTreeSet<Vertex> = cyc.iter().copied().collect();
        side.extend(g.cycle_sides(&cyc).inside_vertices);
        sides.push(side);
    }
    let common: BTreeSet<Vertex> = sides[0].intersection(&sides[1]).copied().collect();
    let all = sides[0].len() + sides[1].len() - common.len();
    if common != q.iter().copied().collect() || all != g.vertex_count() {
        return bad("the two sides do not meet exactly in Q");
    }
    let side2 = sides.pop().expect("two sides");
    let side1 = sides.pop().expect("two sides");
    Ok(Split { side1, side2, dart1: (walk[ia], walk[(ia + 1) % len]), dart2: (walk[ib], walk[(ib + 1) % len]) })
}

/// Restriction of `c` to `keep`, with `p` as the new precolored path and
/// `drop` removed from S and T.
fn restrict(c: &Cog, keep: &BTreeSet<Vertex>, dart: (Vertex, Vertex), p: &[Vertex], drop: &[Vertex]) -> Result<(Cog, Vec<Vertex>), CogError> {
    let (graph, old) = c.graph.induced_subgraph(keep, Some(dart))?;
    let new_id: BTreeMap<Vertex, Vertex> = old.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let map_set = |set: &BTreeSet<Vertex>| -> BTreeSet<Vertex> {
        set.iter().filter(|v| keep.contains(v) && !drop.contains(v)).map(|v| new_id[v]).collect()
    };
    let t = map_set(&c.t);
    let w = c.w.iter().filter(|(v, _)| keep.contains(v) && !drop.contains(v)).map(|(v, &x)| (new_id[v], x)).collect();
    let cog = Cog { graph, p: p.iter().map(|v| new_id[v]).collect(), s: map_set(&c.s), t, w };
    Ok((cog, old))
}

/// The two Q-components: `C1` keeps P, `C2` gets Q as its precolored path.
/// Each comes with the old id of every new vertex.
#[derive(Debug, Clone)]
pub struct QComponents {
    pub c1: Cog,
    pub old1: Vec<Vertex>,
    pub c2: Cog,
    pub old2: Vec<Vertex>,
}

pub fn q_components(c: &Cog, q: &[Vertex]) -> Result<QComponents, CogError> {
    let split = split_by(&c.graph, q)?;
    let p_in = |side: &BTreeSet<Vertex>| c.p.iter().all(|v| side.contains(v));
    let (g1, d1, g2, d2) = if p_in(&split.side1) {
        (split.side1, split.dart1, split.side2, split.dart2)
    } else if p_in(&split.side2) {
        (split.side2, split.dart2, split.side1, split.dart1)
    } else {
        return Err(CogError::QNotSplitting("P meets both sides".into()));
    };
    let (c1, old1) = restrict(c, &g1, d1, &c.p, &[])?;
    let (c2, old2) = restrict(c, &g2, d2, q, q)?;
    Ok(QComponents { c1, old1, c2, old2 })
}

/// Paths `a m b` through a vertex `m` off the outer face that split the cog,
/// with `a < b` and at least one end in S or T.
pub fn weak_2chords(c: &Cog) -> Vec<[Vertex; 3]> {
    two_chords(c).into_iter().filter(|q| [q[0], q[2]].iter().any(|v| c.s.contains(v) || c.t.contains(v))).collect()
}

fn two_chords(c: &Cog) -> Vec<[Vertex; 3]> {
    let g = &c.graph;
    let mut out = Vec::new();
    for m in 0..g.vertex_count() {
        if g.is_on_outer_face(m) {
            continue;
        }
        let ends: Vec<Vertex> = g.neighbors(m).iter().copied().filter(|&v| g.is_on_outer_face(v)).collect();
        for (i, &a) in ends.iter().enumerate() {
            for &b in &ends[i + 1..] {
                let q = [a.min(b), m, a.max(b)];
                if split_by(g, &q).is_ok() {
                    out.push(q);
                }
            }
        }
    }
    out.sort_unstable();
    out
}

/// Chords of the outer face that split the cog.
pub fn chords(c: &Cog) -> Vec<[Vertex; 2]> {
    let g = &c.graph;
    g.edges()
        .into_iter()
        .filter(|&(a, b)| g.is_on_outer_face(a) && g.is_on_outer_face(b) && split_by(g, &[a, b]).is_ok())
        .map(|(a, b)| [a, b])
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DemandResult {
    pub fraction: Rational64,
    pub satisfied_weight: Weight,
    pub total_weight: Weight,
    pub coloring: Coloring,
}

pub fn best_demand_fraction(c: &Cog, psi: &[Color]) -> Result<DemandResult, CogError> {
    best_demand_fraction_with(c, psi, Jobs::Sequential)
}

/// Exact maximum satisfied demand weight over the colorings that extend
/// `psi` (colors of `c.p` in order) and color S from {1,2}.
pub fn best_demand_fraction_with(c: &Cog, psi: &[Color], jobs: Jobs) -> Result<DemandResult, CogError> {
    let g = &c.graph;
    let n = g.vertex_count();
    if psi.len() != c.p.len() || psi.iter().any(|&x| !(1..=3).contains(&x)) {
        return Err(CogError::BadPsi);
    }
    let pairs: Vec<(Vertex, Color)> = c.p.iter().copied().zip(psi.iter().copied()).collect();
    let pre = Coloring::from_pairs(n, &pairs).map_err(|_| CogError::BadPsi)?;
    check_precoloring(g, &pre).map_err(|_| CogError::BadPsi)?;
    let free: Vec<bool> = (0..n).map(|v| !c.p.contains(&v)).collect();
    let order = connectivity_order(g, &free);
    let masks: Vec<u8> = (0..n).map(|v| if c.s.contains(&v) { S_MASK } else { ALL_COLORS }).collect();
    let search = Search::new(g, &pre, order, masks);
    let scale = c.w.values().fold(1i64, |l, w| l.lcm(w.denom()));
    let demands: Vec<(Vertex, i128)> = c.w.iter().map(|(&t, w)| (t, (w.numer() * (scale / w.denom())) as i128)).collect();
    let total: i128 = demands.iter().map(|d| d.1).sum();
    let (best, colors) = coloring::maximize(&search, jobs, Some(total), |colors| {
        demands.iter().filter(|(t, _)| colors[*t] != 3).map(|d| d.1).sum()
    })
    .ok_or(CogError::NoCogColoring)?;
    let total_weight = c.total_weight();
    let satisfied_weight = Rational64::new(best as i64, scale);
    let fraction = if c.t.is_empty() { Rational64::one() } else { satisfied_weight / total_weight };
    Ok(DemandResult { fraction, satisfied_weight, total_weight, coloring: Coloring::from_colors(colors)? })
}

/// All proper colorings of P, one from each pair related by exchanging
/// colors 1 and 2.
pub fn precolorings_of_p(c: &Cog) -> Vec<Vec<Color>> {
    let k = c.p.len();
    let mut out = Vec::new();
    for code in 0..3usize.pow(k as u32) {
        let psi: Vec<Color> = (0..k).map(|i| (code / 3usize.pow(i as u32) % 3) as Color + 1).collect();
        if psi.windows(2).any(|e| e[0] == e[1]) {
            continue;
        }
        if Cog::swap12(&psi) < psi {
            continue;
        }
        out.push(psi);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlphaLemma {
    /// Polished, girth at least 5, at most 3 precolored vertices, no obstruction.
    Polished,
    /// Girth at least 4, at most 2 precolored vertices.
    Full,
}

impl AlphaLemma {
    pub fn bound(self) -> Rational64 {
        match self {
            AlphaLemma::Polished => alpha1(),
            AlphaLemma::Full => alpha0(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            AlphaLemma::Polished => "alpha1",
            AlphaLemma::Full => "alpha0",
        }
    }

    pub fn hypotheses(self, c: &Cog) -> Vec<Condition> {
        let g = &c.graph;
        let report = validate_cog(c);
        let mut out = vec![Condition::check(
            "plane cog",
            report.conditions.iter().find(|x| !x.holds).map(|x| x.witness.clone().unwrap_or_default()),
        )];
        match self {
            AlphaLemma::Polished => {
                out.push(Condition::check("girth >= 5", short_cycle(g, 5)));
                out.push(Condition::check("polished", polish_witness(c)));
                out.push(Condition::check("|V(P)| <= 3", (c.p.len() > 3).then(|| c.p.clone())));
                out.push(Condition::check(
                    "no obstructing subcog",
                    detect_obstructions(c).into_iter().next().map(|m| m.vertex_map),
                ));
            }
            AlphaLemma::Full => {
                out.push(Condition::check("girth >= 4", g.find_triangle().map(|t| t.to_vec())));
                out.push(Condition::check("|V(P)| <= 2", (c.p.len() > 2).then(|| c.p.clone())));
                let free_end = c.p.len() <= 1 || c.p.iter().any(|&p| g.neighbors(p).iter().all(|v| !c.s.contains(v)));
                out.push(Condition::check("a vertex of P has no neighbor in S", (!free_end).then(|| c.p.clone())));
            }
        }
        out
    }
}

/// A cycle shorter than `girth`, if any.
fn short_cycle(g: &PlaneGraph, girth: usize) -> Option<Vec<Vertex>> {
    (3..girth).find_map(|k| g.cycles_of_length(k).into_iter().next())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LemmaCheck {
    pub lemma: AlphaLemma,
    pub conditions: Vec<Condition>,
}

impl LemmaCheck {
    pub fn applies(&self) -> bool {
        self.conditions.iter().all(|c| c.holds)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlphaReport {
    pub checks: Vec<LemmaCheck>,
    pub result: DemandResult,
}

/// Computes the best fraction for `psi` and compares it with the bound of
/// every lemma whose hypotheses hold.
pub fn verify_alpha_lemmas(c: &Cog, psi: &[Color]) -> Result<AlphaReport, CogError> {
    verify_alpha_lemmas_with(c, psi, Jobs::Sequential)
}

pub fn verify_alpha_lemmas_with(c: &Cog, psi: &[Color], jobs: Jobs) -> Result<AlphaReport, CogError> {
    let checks: Vec<LemmaCheck> = [AlphaLemma::Polished, AlphaLemma::Full]
        .into_iter()
        .map(|lemma| LemmaCheck { lemma, conditions: lemma.hypotheses(c) })
        .collect();
    let result = match best_demand_fraction_with(c, psi, jobs) {
        Err(CogError::NoCogColoring) if checks.iter().any(LemmaCheck::applies) => {
            let lemma = checks.iter().find(|x| x.applies()).expect("some lemma applies").lemma;
            return Err(CogError::StatementViolation { lemma: lemma.name(), fraction: Rational64::zero(), bound: lemma.bound() });
        }
        r => r?,
    };
    for check in checks.iter().filter(|x| x.applies()) {
        if result.fraction < check.lemma.bound() {
            return Err(CogError::StatementViolation {
                lemma: check.lemma.name(),
                fraction: result.fraction,
                bound: check.lemma.bound(),
            });
        }
    }
    Ok(AlphaReport { checks, result })
}

/// The cog of a request graph whose requests are all inequality requests at
/// `v`, and the old id of each cog vertex.
pub fn cog_at_vertex(rg: &RequestGraph, v: Vertex) -> Result<(Cog, Vec<Vertex>), CogError> {
    let g = rg.graph();
    if v >= g.vertex_count() {
        return Err(CogError::OutOfRange(v));
    }
    if let Some(&r) = rg.r_eq().iter().next() {
        return Err(CogError::RequestNotAtV(r));
    }
    if let Some(&r) = rg.r_neq().iter().find(|&&r| !g.has_edge(r, v)) {
        return Err(CogError::RequestNotAtV(r));
    }
    if let Some(t) = g.find_triangle() {
        return Err(CogError::HypothesisViolation(format!("triangle {t:?}")));
    }
    let mut w_old: BTreeMap<Vertex, Weight> = BTreeMap::new();
    for &r in rg.r_neq() {
        for &t in g.neighbors(r).iter().filter(|&&t| t != v) {
            *w_old.entry(t).or_insert_with(Weight::zero) += rg.weight(r);
        }
    }
    let s_old: BTreeSet<Vertex> = g.neighbors(v).iter().copied().filter(|u| !rg.is_request(*u)).collect();
    let keep: BTreeSet<Vertex> = (0..g.vertex_count()).filter(|&u| u != v && !rg.is_request(u)).collect();
    let (h, old) = g.induced_subgraph(&keep, None)?;
    let new_id: BTreeMap<Vertex, Vertex> = old.iter().enumerate().map(|(i, &u)| (u, i)).collect();
    let s: BTreeSet<Vertex> = s_old.iter().map(|u| new_id[u]).collect();
    let w: BTreeMap<Vertex, Weight> = w_old.iter().map(|(u, &x)| (new_id[u], x)).collect();
    let t: BTreeSet<Vertex> = w.keys().copied().collect();
    // The face that held v sees all of S and T.
    let roles: BTreeSet<Vertex> = s.union(&t).copied().collect();
    let face = h
        .faces()
        .iter()
        .filter(|f| roles.is_subset(&f.vertex_set()))
        .max_by_key(|f| (f.length, std::cmp::Reverse(f.id)))
        .map(|f| f.id);
    let graph = match face {
        Some(f) => h.with_outer_face(f)?,
        None => h,
    };
    Ok((Cog { graph, p: Vec::new(), s, t, w }, old))
}

/// Colors the cog exactly, gives `v` color 3 and each request a free color.
pub fn requests_at_vertex_pipeline(rg: &RequestGraph, v: Vertex) -> Result<SatisfactionResult, CogError> {
    requests_at_vertex_pipeline_with(rg, v, Jobs::Sequential)
}

pub fn requests_at_vertex_pipeline_with(rg: &RequestGraph, v: Vertex, jobs: Jobs) -> Result<SatisfactionResult, CogError> {
    let (cog, old) = cog_at_vertex(rg, v)?;
    let best = best_demand_fraction_with(&cog, &[], jobs)?;
    let g = rg.graph();
    let mut colors: Vec<Color> = vec![0; g.vertex_count()];
    for (i, &u) in old.iter().enumerate() {
        colors[u] = best.coloring.colors()[i];
    }
    colors[v] = 3;
    requests::complete_greedily(g, &mut colors, rg.requests());
    let phi = Coloring::from_colors(colors)?;
    let result = requests::satisfied_fraction(rg, &phi)?;
    if result.fraction < alpha0() {
        return Err(CogError::StatementViolation { lemma: "alpha0", fraction: result.fraction, bound: alpha0() });
    }
    Ok(result)
}

/// Demand classes used by the polished-lemma argument. Only descriptive.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DemandClasses {
    /// Demands with no neighbor in S or T.
    pub isolated: BTreeSet<Vertex>,
    /// Demands in a component of G[S ∪ T] that is a path with one edge.
    pub t1: BTreeSet<Vertex>,
    /// Demands in a component of G[S ∪ T] that is a path with two edges.
    pub t2: BTreeSet<Vertex>,
    /// Peripheral demands of T2 with their connectors.
    pub peripheral: BTreeMap<Vertex, Vertex>,
}

pub fn classify_demands(c: &Cog) -> DemandClasses {
    let g = &c.graph;
    let roles: BTreeSet<Vertex> = c.s.union(&c.t).copied().collect();
    let mut out = DemandClasses::default();
    let mut seen = BTreeSet::new();
    for &start in &roles {
        if !seen.insert(start) {
            continue;
        }
        let mut comp = vec![start];
        let mut i = 0;
        while i < comp.len() {
            for &u in g.neighbors(comp[i]) {
                if roles.contains(&u) && seen.insert(u) {
                    comp.push(u);
                }
            }
            i += 1;
        }
        let edges = comp.iter().map(|&u| g.neighbors(u).iter().filter(|x| roles.contains(x)).count()).sum::<usize>() / 2;
        let is_path = edges + 1 == comp.len() && comp.iter().all(|&u| g.neighbors(u).iter().filter(|x| roles.contains(x)).count() <= 2);
        let demands = comp.iter().copied().filter(|u| c.t.contains(u));
        match (is_path, edges) {
            (_, 0) => out.isolated.extend(demands),
            (true, 1) => out.t1.extend(demands),
            (true, 2) => out.t2.extend(demands),
            _ => {}
        }
    }
    let cuts: Vec<Vec<Vertex>> =
        chords(c).iter().map(|q| q.to_vec()).chain(weak_2chords(c).iter().map(|q| q.to_vec())).collect();
    for &z in &out.t2 {
        for q in &cuts {
            let Ok(parts) = q_components(c, q) else { continue };
            let cut_off: BTreeSet<Vertex> = parts.old2.iter().copied().collect();
            if !cut_off.contains(&z) || q.contains(&z) {
                continue;
            }
            let connector = [q[0], q[q.len() - 1]]
                .into_iter()
                .find(|&e| g.neighbors(e).iter().any(|x| c.s.contains(x) && !cut_off.contains(x)));
            if let Some(e) = connector {
                out.peripheral.insert(z, e);
                break;
            }
        }
    }
    out
}

fn polar(count: usize, radius: f64) -> Vec<(f64, f64)> {
    (0..count)
        .map(|i| {
            let t = -(i as f64) * 2.0 * std::f64::consts::PI / count as f64;
            (radius * t.cos(), radius * t.sin())
        })
        .collect()
}

fn roles_cog(g: PlaneGraph, roles: &[Role]) -> Cog {
    let pick = |r: Role| roles.iter().enumerate().filter(move |&(_, &x)| x == r).map(|(i, _)| i);
    let p = pick(Role::P).collect();
    let s = pick(Role::S).collect();
    let t = pick(Role::T).collect();
    Cog::new(g, p, s, t, BTreeMap::new()).expect("fixture cog")
}

/// The pattern itself as a cog with unit demands: the cycle drawn clockwise
/// from position 0, plus its chords.
pub fn obstruction_fixture(kind: ObstructionKind) -> Cog {
    let roles = kind.cycle_roles();
    let k = roles.len();
    let mut edges: Vec<(Vertex, Vertex)> = (0..k).map(|i| (i, (i + 1) % k)).collect();
    edges.extend(kind.chords());
    roles_cog(drawn(&polar(k, 1.0), &edges), roles)
}

/// The chorded 8-cycle with a second S,T,S path from its first P vertex to
/// its last plain vertex, drawn outside. The inner 2-chord from the plain
/// vertex cuts off the pattern.
pub fn figure4_fixture() -> Cog {
    let mut pts = polar(8, 1.0);
    let (c, s) = (std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2);
    pts.push((2.0, 0.0));
    pts.push((2.0 + c, s));
    pts.push((2.0, 2.0 * s));
    let mut edges: Vec<(Vertex, Vertex)> = (0..8).map(|i| (i, (i + 1) % 8)).collect();
    edges.extend([(3, 7), (0, 8), (8, 9), (9, 10), (10, 7)]);
    let mut roles = ObstructionKind::D.cycle_roles().to_vec();
    roles.extend([Role::S, Role::T, Role::S]);
    roles_cog(drawn(&pts, &edges), &roles)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{families, random_request_graph};
    use proptest::prelude::*;

    fn cycle_cog(k: usize, p: &[Vertex], s: &[Vertex], t: &[Vertex]) -> Cog {
        Cog::new(
            families::cycle(k),
            p.to_vec(),
            s.iter().copied().collect(),
            t.iter().copied().collect(),
            BTreeMap::new(),
        )
        .unwrap()
    }

    /// Brute force over all 3^n assignments.
    fn oracle(c: &Cog, psi: &[Color]) -> Option<Rational64> {
        let g = &c.graph;
        let n = g.vertex_count();
        let mut best: Option<Rational64> = None;
        for code in 0..3u64.pow(n as u32) {
            let col: Vec<Color> = (0..n).map(|i| (code / 3u64.pow(i as u32) % 3) as Color + 1).collect();
            if g.edges().iter().any(|&(a, b)| col[a] == col[b])
                || c.p.iter().zip(psi).any(|(&v, &x)| col[v] != x)
                || c.s.iter().any(|&v| col[v] == 3)
            {
                continue;
            }
            let sat: Rational64 = c.t.iter().filter(|&&t| col[t] != 3).map(|&t| c.weight(t)).sum();
            let f = if c.t.is_empty() { Rational64::one() } else { sat / c.total_weight() };
            best = Some(best.map_or(f, |b| b.max(f)));
        }
        best
    }

    #[test]
    fn alphas() {
        assert_eq!(alpha0(), Rational64::new(1, 5058));
        assert_eq!(alpha1() / 9, alpha0());
    }

    #[test]
    fn drawn_picks_the_unbounded_face() {
        let g = drawn(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0), (3.0, 0.5)], &[(0, 1), (1, 2), (2, 3), (3, 0), (1, 4)]);
        assert_eq!(g.outer_face().length, 6);
        let a = obstruction_fixture(ObstructionKind::A);
        assert_eq!(a.graph.outer_face().boundary, vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn validation() {
        let a = obstruction_fixture(ObstructionKind::A);
        let r = validate_cog(&a);
        assert!(r.is_plane_cog(), "{r:?}");
        assert!(is_polished(&a));
        let bad = cycle_cog(6, &[], &[0, 1], &[3]);
        let r = validate_cog(&bad);
        assert!(!r.is_cog());
        assert_eq!(r.condition("S is independent").unwrap().witness, Some(vec![0, 1]));
        let tst = cycle_cog(6, &[], &[1], &[0, 2]);
        assert!(validate_cog(&tst).is_cog());
        assert_eq!(polish_witness(&tst), Some(vec![0, 1, 2]));
        let tt = cycle_cog(6, &[], &[], &[0, 1]);
        assert!(!is_polished(&tt));
        let off = Cog::new(families::c5_with_chord_vertex(), vec![], BTreeSet::from([5]), BTreeSet::new(), BTreeMap::new()).unwrap();
        let r = validate_cog(&off);
        assert!(r.is_cog() && !r.is_plane_cog());
        assert!(Cog::new(families::cycle(5), vec![], BTreeSet::new(), BTreeSet::from([1]), BTreeMap::from([(2, Weight::one())])).is_err());
    }

    #[test]
    fn fixtures_match_their_own_pattern() {
        for kind in ObstructionKind::ALL {
            let c = obstruction_fixture(kind);
            let found = detect_obstructions(&c);
            assert!(found.iter().any(|m| m.kind == kind), "{kind:?}: {found:?}");
            let own: Vec<_> = found.iter().filter(|m| m.kind == kind).collect();
            assert_eq!(own.len(), 1, "{kind:?}");
            assert!(validate_cog(&c).is_plane_cog(), "{kind:?}");
        }
        let a = detect_obstructions(&obstruction_fixture(ObstructionKind::A));
        assert_eq!(a.len(), 1);
        assert_eq!(a[0].vertex_map, vec![0, 1, 2, 3, 4]);
    }

    /// Scan over every injective placement of the pattern, independent of
    /// the cycle enumeration.
    fn pattern_oracle(c: &Cog, kind: ObstructionKind) -> usize {
        let n = c.graph.vertex_count();
        let mut keys = BTreeSet::new();
        let mut map = Vec::new();
        fn rec(c: &Cog, kind: ObstructionKind, n: usize, map: &mut Vec<Vertex>, keys: &mut BTreeSet<Vec<(Vertex, Role)>>) {
            let roles = kind.cycle_roles();
            let i = map.len();
            if i == roles.len() {
                let k = roles.len();
                if c.graph.has_edge(map[k - 1], map[0]) && kind.chords().iter().all(|&(a, b)| c.graph.has_edge(map[a], map[b])) {
                    let mut key: Vec<(Vertex, Role)> = map.iter().copied().zip(roles.iter().copied()).collect();
                    key.sort();
                    keys.insert(key);
                }
                return;
            }
            for v in 0..n {
                if map.contains(&v) || !fits(c, v, roles[i]) || (i > 0 && !c.graph.has_edge(map[i - 1], v)) {
                    continue;
                }
                map.push(v);
                rec(c, kind, n, map, keys);
                map.pop();
            }
        }
        rec(c, kind, n, &mut map, &mut keys);
        keys.len()
    }

    #[test]
    fn detection_agrees_with_placement_scan() {
        let mut cogs = vec![figure4_fixture()];
        cogs.extend(ObstructionKind::ALL.map(obstruction_fixture));
        for seed in 0..30u64 {
            let g = crate::generate::random_tfp(seed, 9);
            let outer: Vec<Vertex> = g.outer_face().vertex_set().into_iter().collect();
            let mut s = BTreeSet::new();
            let mut t = BTreeSet::new();
            let mut p = Vec::new();
            if let Some(&(a, b)) = g.outer_face().darts().collect::<Vec<_>>().first() {
                p = vec![a, b];
            }
            for (i, &v) in outer.iter().enumerate() {
                if p.contains(&v) {
                    continue;
                }
                match (seed as usize + i) % 3 {
                    0 if g.neighbors(v).iter().all(|u| !s.contains(u)) => {
                        s.insert(v);
                    }
                    1 => {
                        t.insert(v);
                    }
                    _ => {}
                }
            }
            cogs.push(Cog::new(g, p, s, t, BTreeMap::new()).unwrap());
        }
        for c in &cogs {
            let found = detect_obstructions(c);
            for kind in ObstructionKind::ALL {
                assert_eq!(found.iter().filter(|m| m.kind == kind).count(), pattern_oracle(c, kind), "{kind:?} in {c:?}");
            }
        }
    }

    #[test]
    fn girth_five_without_s_t_edges_has_no_obstruction() {
        // Every pattern has an S vertex next to a T vertex.
        let c = cycle_cog(7, &[0, 1], &[3, 5], &[]);
        assert!(detect_obstructions(&c).is_empty());
        let c = cycle_cog(7, &[0, 1, 2], &[4], &[6]);
        assert!(detect_obstructions(&c).is_empty());
    }

    #[test]
    fn figure4_contains_the_chorded_pattern() {
        let c = figure4_fixture();
        assert!(validate_cog(&c).is_plane_cog());
        let d: Vec<_> = detect_obstructions(&c).into_iter().filter(|m| m.kind == ObstructionKind::D).collect();
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].vertex_map, vec![0, 1, 2, 3, 4, 5, 6, 7]);
        assert!(is_polished(&c));
        // Unless both ends of P get color 3, all demands can be met.
        for psi in precolorings_of_p(&c) {
            let f = best_demand_fraction(&c, &psi).unwrap().fraction;
            if psi[0] != 3 || psi[2] != 3 {
                assert_eq!(f, Rational64::one(), "{psi:?}");
            }
        }
    }

    #[test]
    fn weak_two_chord_and_split() {
        // Hexagon 0..6 with 6 inside joined to 0 and 3; 3 in S.
        let pts = [(2.0, 0.0), (1.0, -1.7), (-1.0, -1.7), (-2.0, 0.0), (-1.0, 1.7), (1.0, 1.7), (0.0, 0.0)];
        let edges = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0), (0, 6), (6, 3)];
        let g = drawn(&pts, &edges);
        let c = Cog::new(g.clone(), vec![1, 2], BTreeSet::from([3]), BTreeSet::from([5]), BTreeMap::from([(5, Weight::new(3, 2))])).unwrap();
        assert_eq!(weak_2chords(&c), vec![[0, 6, 3]]);
        let parts = q_components(&c, &[0, 6, 3]).unwrap();
        let v1: BTreeSet<_> = parts.old1.iter().copied().collect();
        let v2: BTreeSet<_> = parts.old2.iter().copied().collect();
        assert_eq!(v1, BTreeSet::from([0, 1, 2, 3, 6]));
        assert_eq!(v2, BTreeSet::from([0, 3, 4, 5, 6]));
        // P stays with C1, Q is the path of C2 and its ends leave S there.
        assert_eq!(parts.c1.p.iter().map(|&v| parts.old1[v]).collect::<Vec<_>>(), vec![1, 2]);
        assert_eq!(parts.c2.p.iter().map(|&v| parts.old2[v]).collect::<Vec<_>>(), vec![0, 6, 3]);
        assert_eq!(parts.c1.s.iter().map(|&v| parts.old1[v]).collect::<Vec<_>>(), vec![3]);
        assert!(parts.c2.s.is_empty());
        assert_eq!(parts.c1.total_weight() + parts.c2.total_weight(), c.total_weight());
        assert!(validate_cog(&parts.c1).is_plane_cog() && validate_cog(&parts.c2).is_plane_cog());
        // Same path with no end in S or T is not weak.
        let plain = Cog::new(g, vec![1, 2], BTreeSet::new(), BTreeSet::from([5]), BTreeMap::new()).unwrap();
        assert!(weak_2chords(&plain).is_empty());
        assert!(matches!(q_components(&plain, &[0, 1]), Err(CogError::QNotSplitting(_))));
        assert!(matches!(q_components(&plain, &[1, 0, 6]), Err(CogError::QNotSplitting(_))));
    }

    #[test]
    fn splits_partition_random_cogs() {
        for seed in 0..40u64 {
            let g = crate::generate::random_tfp(seed, 11);
            let outer = g.outer_vertices();
            let t: BTreeSet<Vertex> = outer.iter().copied().filter(|v| v % 2 == 0).collect();
            let w = t.iter().map(|&v| (v, Weight::new(v as i64 + 1, 3))).collect();
            let c = Cog::new(g.clone(), vec![], BTreeSet::new(), t, w).unwrap();
            for q in chords(&c).iter().map(|q| q.to_vec()).chain(two_chords(&c).iter().map(|q| q.to_vec())) {
                let parts = q_components(&c, &q).unwrap();
                let v1: BTreeSet<_> = parts.old1.iter().copied().collect();
                let v2: BTreeSet<_> = parts.old2.iter().copied().collect();
                let both: BTreeSet<_> = v1.intersection(&v2).copied().collect();
                assert_eq!(both, q.iter().copied().collect(), "seed {seed} q {q:?}");
                assert_eq!(v1.len() + v2.len() - both.len(), g.vertex_count());
                assert_eq!(parts.c1.total_weight() + parts.c2.total_weight(), c.total_weight());
                assert_eq!(parts.c1.graph.edge_count() + parts.c2.graph.edge_count(), g.edge_count() + q.len() - 1);
            }
        }
    }

    #[test]
    fn figure3_fixtures_have_zero_fraction_precolorings() {
        let a = obstruction_fixture(ObstructionKind::A);
        let r = best_demand_fraction(&a, &[1, 2]).unwrap();
        assert_eq!(r.fraction, Rational64::zero());
        assert_eq!(r.coloring.colors(), &[1, 2, 1, 3, 2]);
        assert_eq!(oracle(&a, &[1, 2]), Some(Rational64::zero()));
        assert_eq!(best_demand_fraction(&a, &[1, 3]).unwrap().fraction, Rational64::one());
        for kind in ObstructionKind::ALL {
            let c = obstruction_fixture(kind);
            let zero: Vec<_> = precolorings_of_p(&c)
                .into_iter()
                .filter(|psi| matches!(best_demand_fraction(&c, psi), Ok(r) if r.fraction.is_zero()))
                .collect();
            assert!(!zero.is_empty(), "{kind:?}");
            for psi in precolorings_of_p(&c) {
                let ours = best_demand_fraction(&c, &psi).ok().map(|r| r.fraction);
                assert_eq!(ours, oracle(&c, &psi), "{kind:?} {psi:?}");
            }
        }
        assert!(best_demand_fraction(&obstruction_fixture(ObstructionKind::B), &[1, 2, 1]).unwrap().fraction.is_zero());
        assert!(best_demand_fraction(&obstruction_fixture(ObstructionKind::C), &[2, 3, 1]).unwrap().fraction.is_zero());
    }

    #[test]
    fn fraction_edge_cases() {
        let c = cycle_cog(5, &[0], &[2], &[]);
        assert_eq!(best_demand_fraction(&c, &[3]).unwrap().fraction, Rational64::one());
        assert_eq!(best_demand_fraction(&c, &[1, 2]), Err(CogError::BadPsi));
        // S forced to 3 by both P neighbors.
        let c = cycle_cog(6, &[0, 1, 2], &[], &[4]);
        assert_eq!(best_demand_fraction(&c, &[1, 1, 2]), Err(CogError::BadPsi));
        let c = cycle_cog(4, &[0, 1], &[2, 0], &[]);
        assert!(!validate_cog(&c).is_cog());
        let p4 = Cog::new(families::path(3), vec![0, 2], BTreeSet::from([1]), BTreeSet::new(), BTreeMap::new()).unwrap();
        assert_eq!(best_demand_fraction(&p4, &[1, 2]), Err(CogError::NoCogColoring));
    }

    #[test]
    fn optimizer_matches_brute_force() {
        for seed in 0..25u64 {
            let g = crate::generate::random_tfp(seed, 8);
            let walk = g.outer_face().boundary.clone();
            let p: Vec<Vertex> = walk.iter().take(2).copied().collect();
            let mut s = BTreeSet::new();
            let mut t = BTreeSet::new();
            for (i, &v) in g.outer_vertices().iter().enumerate() {
                if p.contains(&v) {
                    continue;
                }
                if i % 2 == 0 && g.neighbors(v).iter().all(|u| !s.contains(u)) {
                    s.insert(v);
                } else {
                    t.insert(v);
                }
            }
            let w = t.iter().map(|&v| (v, Weight::new(1 + (v as i64 * 7 + seed as i64) % 5, 2))).collect();
            let c = Cog::new(g, p, s, t, w).unwrap();
            for psi in precolorings_of_p(&c) {
                let ours = best_demand_fraction(&c, &psi).ok();
                assert_eq!(ours.as_ref().map(|r| r.fraction), oracle(&c, &psi), "seed {seed}");
                if let Some(r) = ours {
                    assert!(r.coloring.is_proper(&c.graph));
                    assert!(c.s.iter().all(|&v| r.coloring.colors()[v] != 3));
                    let par = best_demand_fraction_with(&c, &psi, Jobs::Parallel(2)).unwrap();
                    assert_eq!(par, r);
                }
            }
        }
    }

    #[test]
    fn alpha_reports() {
        let c = obstruction_fixture(ObstructionKind::A);
        let r = verify_alpha_lemmas(&c, &[1, 3]).unwrap();
        let pol = &r.checks[0];
        assert!(!pol.applies());
        let failed = pol.conditions.iter().find(|x| !x.holds).unwrap();
        assert_eq!(failed.name, "no obstructing subcog");
        assert_eq!(failed.witness, Some(vec![0, 1, 2, 3, 4]));
        // The full lemma needs a P vertex without S neighbors.
        assert!(!r.checks[1].applies());
        let c = cycle_cog(7, &[0, 1], &[3], &[5]);
        let r = verify_alpha_lemmas(&c, &[1, 2]).unwrap();
        assert!(r.checks.iter().all(LemmaCheck::applies));
        assert_eq!(r.result.fraction, Rational64::one());
    }

    fn wheel_like() -> RequestGraph {
        // v = 0 at the center, C6 on 1..=6, requests 7, 8, 9 between v and 1, 3, 5.
        let mut pts = vec![(0.0, 0.0)];
        pts.extend(polar(6, 2.0));
        pts.extend(polar(6, 1.0).into_iter().step_by(2));
        let mut edges: Vec<(Vertex, Vertex)> = (0..6).map(|i| (i + 1, (i + 1) % 6 + 1)).collect();
        for (r, t) in [(7, 1), (8, 3), (9, 5)] {
            edges.push((0, r));
            edges.push((r, t));
        }
        let g = drawn(&pts, &edges);
        RequestGraph::new(g, BTreeSet::new(), BTreeSet::from([7, 8, 9]), BTreeMap::new()).unwrap()
    }

    #[test]
    fn pipeline_examples() {
        let rg = wheel_like();
        let r = requests_at_vertex_pipeline(&rg, 0).unwrap();
        assert_eq!(r.fraction, Rational64::one());
        assert_eq!(r.coloring.colors()[0], 3);
        assert!(r.coloring.is_proper(rg.graph()));
        let (cog, old) = cog_at_vertex(&rg, 0).unwrap();
        assert!(validate_cog(&cog).is_plane_cog());
        assert_eq!(cog.t.iter().map(|&v| old[v]).collect::<Vec<_>>(), vec![1, 3, 5]);
        assert!(cog.s.is_empty());

        let single = drawn(&[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0), (1.0, 1.0)], &[(0, 1), (1, 2), (0, 3)]);
        let rg = RequestGraph::new(single, BTreeSet::new(), BTreeSet::from([1]), BTreeMap::new()).unwrap();
        assert_eq!(requests_at_vertex_pipeline(&rg, 0).unwrap().fraction, Rational64::one());
        assert!(matches!(requests_at_vertex_pipeline(&rg, 3), Err(CogError::RequestNotAtV(1))));

        // A triangle away from the requests.
        let pts = [(0.0, 0.0), (1.0, 0.0), (2.0, 0.0), (-1.0, 1.0), (-1.0, -1.0)];
        let tri = drawn(&pts, &[(0, 1), (1, 2), (0, 3), (3, 4), (4, 0)]);
        let rg = RequestGraph::new(tri, BTreeSet::new(), BTreeSet::from([1]), BTreeMap::new()).unwrap();
        assert!(matches!(requests_at_vertex_pipeline(&rg, 0), Err(CogError::HypothesisViolation(_))));
    }

    #[test]
    fn pipeline_matches_exact_optimum() {
        // Coloring the common neighbor 3 loses nothing, so the pipeline
        // reaches the optimum over all colorings.
        let mut tried = 0;
        for seed in 0..300u64 {
            let rg = random_request_graph(seed, 11, 4);
            if !rg.r_eq().is_empty() {
                continue;
            }
            let g = rg.graph();
            let Some(v) = (0..g.vertex_count()).find(|&v| rg.r_neq().iter().all(|&r| g.has_edge(r, v))) else { continue };
            tried += 1;
            let ours = requests_at_vertex_pipeline(&rg, v).unwrap();
            assert!(ours.coloring.is_proper(g));
            assert_eq!(ours.coloring.colors()[v], 3);
            assert_eq!(ours.fraction, requests::best_fraction(&rg).unwrap().fraction, "seed {seed}");
        }
        assert!(tried >= 10, "only {tried} instances");
    }

    #[test]
    fn demand_classes() {
        // C8 with roles S T S on 2..=4 and T S on 6,7.
        let c = cycle_cog(8, &[0], &[2, 4, 7], &[3, 6]);
        let d = classify_demands(&c);
        assert_eq!(d.t2, BTreeSet::from([3]));
        assert_eq!(d.t1, BTreeSet::from([6]));
        assert!(d.isolated.is_empty() && d.peripheral.is_empty());
        let c = cycle_cog(8, &[0], &[], &[4]);
        assert_eq!(classify_demands(&c).isolated, BTreeSet::from([4]));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn swapping_one_and_two_keeps_the_value(seed in 0u64..1000, n in 5usize..10) {
            let g = crate::generate::random_tfp(seed, n);
            let walk = g.outer_face().boundary.clone();
            let p: Vec<Vertex> = walk.iter().take(1 + seed as usize % 3).copied().collect();
            let p = if p.windows(2).all(|e| g.is_outer_edge(e[0], e[1])) && p.iter().collect::<BTreeSet<_>>().len() == p.len() { p } else { p[..1].to_vec() };
            let mut s = BTreeSet::new();
            let mut t = BTreeSet::new();
            for &v in &g.outer_vertices() {
                if p.contains(&v) { continue; }
                if (v as u64 + seed) % 3 == 0 && g.neighbors(v).iter().all(|u| !s.contains(u)) { s.insert(v); }
                else if (v as u64 + seed) % 3 == 1 { t.insert(v); }
            }
            let c = Cog::new(g, p, s, t, BTreeMap::new()).unwrap();
            for psi in precolorings_of_p(&c) {
                let a = best_demand_fraction(&c, &psi).map(|r| r.fraction);
                let b = best_demand_fraction(&c, &Cog::swap12(&psi)).map(|r| r.fraction);
                prop_assert_eq!(a, b);
            }
        }
    }
}
