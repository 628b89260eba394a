//! List colorings: a brute-force solver, hypothesis checkers for the
//! girth-5 list-coloring statements, casings and the blocking relation.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::coloring::{connectivity_order, mask_of, Color, ColorMask, Coloring, Search, ALL_COLORS};
use crate::plane_graph::{EmbeddingError, OuterFace, PlaneGraph, RotationBuilder, Vertex};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ListError {
    #[error("list of vertex {0} is empty or has colors outside 1..=3")]
    BadList(Vertex),
    #[error("{0} lists for {1} vertices")]
    LengthMismatch(usize, usize),
    #[error("edges of X share vertex {0}")]
    XNotMatching(Vertex),
    #[error("edge of X meets P at {0}")]
    XMeetsP(Vertex),
    #[error("{0:?} is not on the outer face boundary")]
    NotOnOuterFace(Vec<Vertex>),
    #[error("P is not a path: {0:?}")]
    BadPath(Vec<Vertex>),
    #[error("statement violated: all hypotheses of {0:?} hold but no list coloring exists")]
    StatementViolation(Statement),
    #[error(transparent)]
    Embedding(#[from] EmbeddingError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ListAssignment {
    lists: Vec<ColorMask>,
}

impl ListAssignment {
    pub fn new(lists: Vec<ColorMask>) -> Result<Self, ListError> {
        for (v, &l) in lists.iter().enumerate() {
            if l == 0 || l & !ALL_COLORS != 0 {
                return Err(ListError::BadList(v));
            }
        }
        Ok(ListAssignment { lists })
    }

    pub fn full(n: usize) -> Self {
        ListAssignment { lists: vec![ALL_COLORS; n] }
    }

    pub fn from_sets(sets: &[&[Color]]) -> Result<Self, ListError> {
        ListAssignment::new(sets.iter().map(|s| s.iter().fold(0, |m, &c| m | mask_of(c))).collect())
    }

    pub fn set(&mut self, v: Vertex, colors: &[Color]) {
        self.lists[v] = colors.iter().fold(0, |m, &c| m | mask_of(c));
    }

    pub fn mask(&self, v: Vertex) -> ColorMask {
        self.lists[v]
    }

    pub fn size(&self, v: Vertex) -> usize {
        self.lists[v].count_ones() as usize
    }

    pub fn colors(&self, v: Vertex) -> Vec<Color> {
        (1..=3).filter(|&c| self.lists[v] & mask_of(c) != 0).collect()
    }

    pub fn len(&self) -> usize {
        self.lists.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lists.is_empty()
    }

    pub fn masks(&self) -> &[ColorMask] {
        &self.lists
    }
}

pub fn solve_list_coloring(g: &PlaneGraph, l: &ListAssignment) -> Option<Coloring> {
    let n = g.vertex_count();
    assert_eq!(l.len(), n, "one list per vertex");
    let order = connectivity_order(g, &vec![true; n]);
    let mut s = Search::new(g, &Coloring::empty(n), order, l.lists.clone());
    s.find_from(0).then(|| Coloring::from_colors(s.colors).expect("colors 1..=3"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Statement {
    ThreeChoos,
    DvoKaw,
    LemSame,
    LemDvoKawStrong,
    CycEx,
}

impl Statement {
    pub fn id(self) -> &'static str {
        match self {
            Statement::ThreeChoos => "THM_3CHOOS",
            Statement::DvoKaw => "THM_DVOKAW",
            Statement::LemSame => "LEM_SAME",
            Statement::LemDvoKawStrong => "LEM_DVOKAW_STRONG",
            Statement::CycEx => "THM_CYCEX",
        }
    }

    pub fn parse(s: &str) -> Option<Statement> {
        [Statement::ThreeChoos, Statement::DvoKaw, Statement::LemSame, Statement::LemDvoKawStrong, Statement::CycEx]
            .into_iter()
            .find(|st| st.id().eq_ignore_ascii_case(s))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Condition {
    pub name: &'static str,
    pub holds: bool,
    pub witness: Option<Vec<Vertex>>,
}

impl Condition {
    pub(crate) fn check(name: &'static str, witness: Option<Vec<Vertex>>) -> Self {
        Condition { name, holds: witness.is_none(), witness }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HypothesisReport {
    pub statement: Statement,
    pub conditions: Vec<Condition>,
    /// For the cycle-extension statement: the outer cycle has length 8 or 9
    /// and a chord.
    pub chord_exception: bool,
    /// For the cycle-extension statement: the outer cycle has length 9 and
    /// an inner vertex has three neighbors on it.
    pub triple_exception: bool,
    pub coloring: Option<Coloring>,
}

impl HypothesisReport {
    pub fn all_hold(&self) -> bool {
        self.conditions.iter().all(|c| c.holds)
    }

    pub fn condition(&self, name: &str) -> Option<&Condition> {
        self.conditions.iter().find(|c| c.name == name)
    }
}

/// A path on distinct vertices whose list sizes follow `sizes`, optionally
/// starting at `start` (whose own size is not checked).
pub fn find_sized_path(g: &PlaneGraph, l: &ListAssignment, start: Option<Vertex>, sizes: &[usize]) -> Option<Vec<Vertex>> {
    fn extend(g: &PlaneGraph, l: &ListAssignment, sizes: &[usize], path: &mut Vec<Vertex>) -> bool {
        let k = path.len();
        if k == sizes.len() {
            return true;
        }
        let last = *path.last().expect("non-empty");
        for &w in g.neighbors(last) {
            if !path.contains(&w) && l.size(w) == sizes[k] {
                path.push(w);
                if extend(g, l, sizes, path) {
                    return true;
                }
                path.pop();
            }
        }
        false
    }
    let starts: Vec<Vertex> = match start {
        Some(p) => vec![p],
        None => (0..g.vertex_count()).filter(|&v| l.size(v) == sizes[0]).collect(),
    };
    for s in starts {
        let mut path = vec![s];
        if extend(g, l, sizes, &mut path) {
            return Some(path);
        }
    }
    None
}

/// Does the edge `xy` block `p`: a path `p u v x y` (either orientation of
/// the edge) with `|L(u)| = 2` and `|L(v)| = 3`.
pub fn blocks(g: &PlaneGraph, l: &ListAssignment, xy: (Vertex, Vertex), p: Vertex) -> bool {
    blocking_path(g, l, xy, p).is_some()
}

pub fn blocking_path(g: &PlaneGraph, l: &ListAssignment, xy: (Vertex, Vertex), p: Vertex) -> Option<Vec<Vertex>> {
    for (x, y) in [xy, (xy.1, xy.0)] {
        if !g.has_edge(x, y) || p == x || p == y {
            continue;
        }
        for &u in g.neighbors(p) {
            if u == x || u == y || l.size(u) != 2 {
                continue;
            }
            for &v in g.neighbors(u) {
                if v != p && v != x && v != y && l.size(v) == 3 && g.has_edge(v, x) {
                    return Some(vec![p, u, v, x, y]);
                }
            }
        }
    }
    None
}

fn girth_condition(g: &PlaneGraph) -> Condition {
    let witness = match g.girth() {
        Some(k) if k < 5 => g.cycles_of_length(k).into_iter().next(),
        _ => None,
    };
    Condition::check("girth >= 5", witness)
}

fn path_condition(g: &PlaneGraph, p: &[Vertex]) -> Condition {
    let bad = p.len() > 3
        || p.iter().any(|&v| v >= g.vertex_count() || !g.is_on_outer_face(v))
        || p.windows(2).any(|w| !g.has_edge(w[0], w[1]) || !g.is_outer_edge(w[0], w[1]))
        || p.iter().collect::<BTreeSet<_>>().len() != p.len();
    Condition::check("P is a path of at most 3 vertices on the outer face", bad.then(|| p.to_vec()))
}

/// Condition (i): list sizes by position, with `outer_lists` the allowed
/// lists off `P` on the outer face (`None` = any list of size 2 or 3).
fn list_shape(g: &PlaneGraph, l: &ListAssignment, p: &[Vertex], outer_lists: Option<&[ColorMask]>) -> Condition {
    let mut bad = Vec::new();
    for v in 0..g.vertex_count() {
        let ok = if p.contains(&v) {
            l.size(v) == 1
        } else if g.is_on_outer_face(v) {
            match outer_lists {
                Some(allowed) => allowed.contains(&l.mask(v)),
                None => l.size(v) >= 2,
            }
        } else {
            l.mask(v) == ALL_COLORS
        };
        if !ok {
            bad.push(v);
        }
    }
    if bad.is_empty() {
        if let Some(w) = p.windows(2).find(|w| l.mask(w[0]) == l.mask(w[1])) {
            bad = w.to_vec();
        }
    }
    Condition::check("(i) list sizes", (!bad.is_empty()).then_some(bad))
}

fn no_three_twos(g: &PlaneGraph, l: &ListAssignment) -> Condition {
    Condition::check("(ii) no path with list sizes 2,2,2", find_sized_path(g, l, None, &[2, 2, 2]))
}

fn size_two_edges(g: &PlaneGraph, l: &ListAssignment) -> Vec<(Vertex, Vertex)> {
    g.edges().into_iter().filter(|&(u, v)| l.size(u) == 2 && l.size(v) == 2).collect()
}

/// Checks the hypotheses of `stmt` and, when they hold, that its conclusion
/// does too.
pub fn check_hypotheses(
    stmt: Statement,
    g: &PlaneGraph,
    p: &[Vertex],
    l: &ListAssignment,
    casing: Option<&Casing>,
) -> Result<HypothesisReport, ListError> {
    if l.len() != g.vertex_count() {
        return Err(ListError::LengthMismatch(l.len(), g.vertex_count()));
    }
    let mut conditions = vec![girth_condition(g)];
    let mut chord_exception = false;
    let mut triple_exception = false;
    match stmt {
        Statement::ThreeChoos => {
            conditions.push(path_condition(g, p));
            conditions.push(list_shape(g, l, p, None));
            let twos: Vec<Vertex> = (0..g.vertex_count()).filter(|&v| l.size(v) == 2).collect();
            let edge = twos.iter().find_map(|&u| twos.iter().find(|&&v| g.has_edge(u, v)).map(|&v| vec![u, v]));
            conditions.push(Condition::check("size-2 lists form an independent set", edge));
        }
        Statement::DvoKaw => {
            conditions.push(path_condition(g, p));
            conditions.push(list_shape(g, l, p, None));
            conditions.push(no_three_twos(g, l));
            conditions.push(Condition::check(
                "(iii) no path with list sizes 2,2,3,2,2",
                find_sized_path(g, l, None, &[2, 2, 3, 2, 2]),
            ));
            let witness = if p.len() == 3 {
                let free_end = [p[0], p[2]].into_iter().find(|&e| {
                    find_sized_path(g, l, Some(e), &[0, 2, 2]).is_none()
                        && find_sized_path(g, l, Some(e), &[0, 2, 3, 2, 2]).is_none()
                });
                free_end.is_none().then(|| p.to_vec())
            } else {
                None
            };
            conditions.push(Condition::check("(iv) an end of P starts no forbidden path", witness));
        }
        Statement::LemSame => {
            conditions.push(path_condition(g, p));
            let allowed = [mask_of(1) | mask_of(2), ALL_COLORS];
            conditions.push(list_shape(g, l, p, Some(&allowed)));
            conditions.push(no_three_twos(g, l));
            let witness = if p.len() == 3 {
                let ok = [p[0], p[2]].into_iter().any(|e| find_sized_path(g, l, Some(e), &[0, 2, 2]).is_none());
                (!ok).then(|| p.to_vec())
            } else {
                None
            };
            conditions.push(Condition::check("(iii) an end of P starts no path with sizes 2,2", witness));
        }
        Statement::LemDvoKawStrong => {
            conditions.push(path_condition(g, p));
            let mut shape = list_shape(g, l, p, None);
            if shape.holds {
                let inner = g
                    .edges()
                    .into_iter()
                    .find(|&(u, v)| l.size(u) < 3 && l.size(v) < 3 && !g.is_outer_edge(u, v));
                shape = Condition::check("(i') list sizes", inner.map(|(u, v)| vec![u, v]));
            } else {
                shape.name = "(i') list sizes";
            }
            conditions.push(shape);
            conditions.push(no_three_twos(g, l));
            let x = size_two_edges(g, l);
            let built;
            let casing = match casing {
                Some(c) => Ok(c),
                None => {
                    built = build_casing(g, p, &x);
                    built.as_ref().map_err(Clone::clone)
                }
            };
            let witness = match casing {
                Err(ListError::XNotMatching(v)) | Err(ListError::XMeetsP(v)) => Some(vec![v]),
                Err(ListError::NotOnOuterFace(vs)) => Some(vs),
                Err(_) => Some(Vec::new()),
                Ok(c) => order_violation(g, c, &x),
            };
            conditions.push(Condition::check("(iii') casing order condition", witness));
            let witness = if p.len() == 3 {
                if let Some(path) = find_sized_path(g, l, Some(p[0]), &[0, 2, 2]) {
                    Some(path)
                } else {
                    x.iter()
                        .find(|&&(a, b)| {
                            blocks(g, l, (a, b), p[0])
                                && !g.has_edge(a, p[2])
                                && !g.has_edge(b, p[2])
                                && (!blocks(g, l, (a, b), p[2]) || l.mask(p[1]) & !(l.mask(a) | l.mask(b)) != 0)
                        })
                        .map(|&(a, b)| vec![a, b])
                }
            } else {
                None
            };
            conditions.push(Condition::check("(iv') blocking condition at the ends of P", witness));
        }
        Statement::CycEx => {
            let outer = g.outer_face();
            let k = outer.length;
            let bad_cycle = !outer.is_cycle() || k > 9 || k < 3;
            conditions.push(Condition::check(
                "outer face bounded by a cycle of length at most 9",
                bad_cycle.then(|| outer.boundary.clone()),
            ));
            let mut bad = Vec::new();
            for v in 0..g.vertex_count() {
                let ok = if outer.boundary.contains(&v) { l.size(v) == 1 } else { l.mask(v) == ALL_COLORS };
                if !ok {
                    bad.push(v);
                }
            }
            if bad.is_empty() {
                if let Some((u, v)) = g.edges().into_iter().find(|&(u, v)| {
                    outer.boundary.contains(&u) && outer.boundary.contains(&v) && l.mask(u) == l.mask(v)
                }) {
                    bad = vec![u, v];
                }
            }
            conditions.push(Condition::check("lists: proper singletons on K, full elsewhere", (!bad.is_empty()).then_some(bad)));
            if !bad_cycle {
                let on_k = outer.vertex_set();
                let has_chord = g
                    .edges()
                    .into_iter()
                    .any(|(u, v)| on_k.contains(&u) && on_k.contains(&v) && !g.is_outer_edge(u, v));
                chord_exception = (k == 8 || k == 9) && has_chord;
                triple_exception = k == 9
                    && (0..g.vertex_count())
                        .any(|v| !on_k.contains(&v) && g.neighbors(v).iter().filter(|u| on_k.contains(u)).count() >= 3);
            }
        }
    }
    let coloring = solve_list_coloring(g, l);
    let report = HypothesisReport { statement: stmt, conditions, chord_exception, triple_exception, coloring };
    let excused = report.chord_exception || report.triple_exception;
    if report.all_hold() && report.coloring.is_none() && !excused {
        return Err(ListError::StatementViolation(stmt));
    }
    Ok(report)
}

/// Two edges `v1v2`, `v4v5` of `x` with `v1 < v2 < v4 < v5` where `v2, v4`
/// or `v1, v5` have a common neighbor.
fn order_violation(g: &PlaneGraph, casing: &Casing, x: &[(Vertex, Vertex)]) -> Option<Vec<Vertex>> {
    let rank: BTreeMap<Vertex, usize> = casing.order.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let oriented: Vec<(Vertex, Vertex)> =
        x.iter().map(|&(a, b)| if rank[&a] < rank[&b] { (a, b) } else { (b, a) }).collect();
    let common = |a: Vertex, b: Vertex| g.neighbors(a).iter().any(|&w| g.has_edge(w, b));
    for &(v1, v2) in &oriented {
        for &(v4, v5) in &oriented {
            if (v1, v2) != (v4, v5) && rank[&v2] < rank[&v4] && (common(v2, v4) || common(v1, v5)) {
                return Some(vec![v1, v2, v4, v5]);
            }
        }
    }
    None
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Casing {
    pub host: PlaneGraph,
    /// Vertices of the outer cycle in clockwise order from `k_p`.
    pub outer_cycle: Vec<Vertex>,
    /// `z -> k_z`.
    pub matching: BTreeMap<Vertex, Vertex>,
    /// Ends of the edges of `X`, in the order induced by the outer cycle.
    pub order: Vec<Vertex>,
}

impl Casing {
    /// Checks the defining properties against `g`, `p` and `x`.
    pub fn is_valid_for(&self, g: &PlaneGraph, p: &[Vertex], x: &[(Vertex, Vertex)]) -> bool {
        let n = g.vertex_count();
        let h = &self.host;
        let induced = (0..n).all(|u| (0..n).all(|v| g.has_edge(u, v) == h.has_edge(u, v)));
        let k = self.outer_cycle.len();
        let cycle_ok = k < 3 || {
            let outer = h.outer_face();
            outer.is_cycle() && outer.vertex_set() == self.outer_cycle.iter().copied().collect()
        };
        let matching_ok = self.matching.iter().all(|(&z, &kz)| {
            h.has_edge(z, kz) && h.neighbors(kz).iter().filter(|&&w| w < n).count() == 1
        });
        let mut edges: Vec<(Vertex, Vertex)> = x.to_vec();
        edges.extend(p.windows(2).map(|w| (w[0], w[1])));
        let faces_ok = edges.iter().all(|&(a, b)| {
            let (ka, kb) = (self.matching[&a], self.matching[&b]);
            let want = BTreeSet::from([a, b, ka, kb]);
            (k < 3 || h.has_edge(ka, kb)) && h.faces().iter().any(|f| f.length == 4 && f.vertex_set() == want)
        });
        induced && cycle_ok && matching_ok && faces_ok
    }
}

/// Builds the canonical casing: the outer cycle's vertices are attached at
/// the corners of the outer face walk where the edges of `P` and `x` are
/// traversed.
pub fn build_casing(g: &PlaneGraph, p: &[Vertex], x: &[(Vertex, Vertex)]) -> Result<Casing, ListError> {
    let mut used = BTreeSet::new();
    for &(a, b) in x {
        for v in [a, b] {
            if p.contains(&v) {
                return Err(ListError::XMeetsP(v));
            }
            if !used.insert(v) {
                return Err(ListError::XNotMatching(v));
            }
        }
    }
    if p.windows(2).any(|w| !g.has_edge(w[0], w[1])) {
        return Err(ListError::BadPath(p.to_vec()));
    }
    let walk: Vec<(Vertex, Vertex)> = g.outer_face().darts().collect();
    let len = walk.len();
    // Corner j sits at the head of dart j - 1 and the tail of dart j.
    let dart_index = |a: Vertex, b: Vertex| walk.iter().position(|&d| d == (a, b));
    let mut corner: BTreeMap<Vertex, usize> = BTreeMap::new();
    let edge_corners = |a: Vertex, b: Vertex| -> Option<[(Vertex, usize); 2]> {
        if let Some(i) = dart_index(a, b) {
            Some([(a, i), (b, (i + 1) % len)])
        } else {
            dart_index(b, a).map(|i| [(b, i), (a, (i + 1) % len)])
        }
    };
    for &(a, b) in x {
        let cs = edge_corners(a, b).ok_or_else(|| ListError::NotOnOuterFace(vec![a, b]))?;
        corner.extend(cs);
    }
    match p.len() {
        0 => {}
        1 => {
            let i = walk.iter().position(|&(t, _)| t == p[0]);
            match i {
                Some(i) => {
                    corner.insert(p[0], i);
                }
                None if g.degree(p[0]) == 0 => {}
                None => return Err(ListError::NotOnOuterFace(p.to_vec())),
            }
        }
        _ => {
            // Consecutive darts along P (in one direction or the other).
            let found = (0..len).find_map(|i| {
                let fwd = p.windows(2).enumerate().all(|(k, w)| walk[(i + k) % len] == (w[0], w[1]));
                let rev: Vec<Vertex> = p.iter().rev().copied().collect();
                let bwd = rev.windows(2).enumerate().all(|(k, w)| walk[(i + k) % len] == (w[0], w[1]));
                if fwd {
                    Some(p.iter().enumerate().map(|(k, &v)| (v, (i + k) % len)).collect::<Vec<_>>())
                } else if bwd {
                    Some(rev.iter().enumerate().map(|(k, &v)| (v, (i + k) % len)).collect())
                } else {
                    None
                }
            });
            corner.extend(found.ok_or_else(|| ListError::NotOnOuterFace(p.to_vec()))?);
        }
    }

    let n = g.vertex_count();
    let mut zs: Vec<(usize, Vertex)> = corner.iter().map(|(&z, &j)| (j, z)).collect();
    zs.sort_unstable();
    let kcount = zs.len() + usize::from(p.len() == 1 && g.degree(p[0]) == 0);
    let mut matching = BTreeMap::new();
    let host = if kcount == 0 {
        g.clone()
    } else if zs.is_empty() {
        // A single isolated vertex as P.
        let mut b = RotationBuilder::new(n + 1);
        for v in 0..n {
            b.set_rotation(v, g.rotation(v).to_vec());
        }
        b.set_rotation(p[0], vec![n]);
        b.set_rotation(n, vec![p[0]]);
        matching.insert(p[0], n);
        b.build(OuterFace::Dart(n, p[0]))?
    } else {
        let attempt = |flip: bool| -> Result<PlaneGraph, EmbeddingError> {
            let mut b = g.builder();
            let k = zs.len();
            for _ in 0..k {
                b.add_vertex();
            }
            for (i, &(j, z)) in zs.iter().enumerate() {
                let kz = n + i;
                let prev_dart = walk[(j + len - 1) % len];
                b.insert_after(z, prev_dart.0, kz);
                let (prev, next) = (n + (i + k - 1) % k, n + (i + 1) % k);
                let rot = match k {
                    1 => vec![z],
                    2 => vec![z, if i == 0 { n + 1 } else { n }],
                    _ if flip => vec![z, next, prev],
                    _ => vec![z, prev, next],
                };
                b.set_rotation(kz, rot);
            }
            let outer = if k >= 2 { OuterFace::Dart(n, n + 1) } else { OuterFace::Dart(n, zs[0].1) };
            let h = b.build(outer)?;
            if k >= 3 && h.outer_face().length != k {
                let id = h
                    .faces()
                    .iter()
                    .find(|f| f.length == k && f.boundary.iter().all(|&v| v >= n))
                    .map(|f| f.id)
                    .ok_or(EmbeddingError::BadOuterFace)?;
                return h.with_outer_face(id);
            }
            Ok(h)
        };
        let h = attempt(false).or_else(|_| attempt(true))?;
        for (i, &(_, z)) in zs.iter().enumerate() {
            matching.insert(z, n + i);
        }
        h
    };

    // Clockwise order of K from k_p, read off the outer face walk.
    let kset: BTreeSet<Vertex> = matching.values().copied().collect();
    let mut outer_cycle: Vec<Vertex> = if kset.len() >= 3 {
        host.outer_face().boundary.iter().copied().filter(|v| kset.contains(v)).collect()
    } else {
        kset.iter().copied().collect()
    };
    if let Some(kp) = p.first().and_then(|v| matching.get(v)) {
        let at = outer_cycle.iter().position(|v| v == kp).expect("k_p on K");
        outer_cycle.rotate_left(at);
    }
    let owner: BTreeMap<Vertex, Vertex> = matching.iter().map(|(&z, &k)| (k, z)).collect();
    let order: Vec<Vertex> = outer_cycle.iter().map(|k| owner[k]).filter(|z| used.contains(z)).collect();
    Ok(Casing { host, outer_cycle, matching, order })
}
