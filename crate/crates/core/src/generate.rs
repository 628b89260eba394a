//! Instance generators: small families, figure fixtures, seeded
//! random triangle-free plane graphs and the exhaustive catalog.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::hash::{Hash, Hasher};

use petgraph::graph::UnGraph;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::embed;
use crate::plane_graph::{OuterFace, PlaneGraph, Vertex};
use crate::requests::{RequestGraph, Weight};

pub mod families {
    use super::*;

    pub fn cycle(n: usize) -> PlaneGraph {
        assert!(n >= 3, "cycle needs 3 vertices");
        let rot = (0..n).map(|i| vec![(i + n - 1) % n, (i + 1) % n]).collect();
        PlaneGraph::new(rot, OuterFace::Default).expect("cycle")
    }

    pub fn path(n: usize) -> PlaneGraph {
        assert!(n >= 1);
        let rot = (0..n)
            .map(|i| {
                let mut r = Vec::new();
                if i > 0 {
                    r.push(i - 1);
                }
                if i + 1 < n {
                    r.push(i + 1);
                }
                r
            })
            .collect();
        PlaneGraph::new(rot, OuterFace::Default).expect("path")
    }

    /// `rows x cols` grid, vertex `r * cols + c`, outer face the boundary.
    pub fn grid(rows: usize, cols: usize) -> PlaneGraph {
        assert!(rows >= 1 && cols >= 1);
        let pts: Vec<(f64, f64)> = (0..rows * cols).map(|v| ((v % cols) as f64, -((v / cols) as f64))).collect();
        let mut edges = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                let v = r * cols + c;
                if c + 1 < cols {
                    edges.push((v, v + 1));
                }
                if r + 1 < rows {
                    edges.push((v, v + cols));
                }
            }
        }
        let outer = if rows > 1 && cols > 1 { OuterFace::Dart(cols, 0) } else { OuterFace::Default };
        PlaneGraph::from_straight_line(&pts, &edges, outer).expect("grid")
    }

    /// Two poles joined by three internally disjoint paths with the given
    /// numbers of edges (each at least 2). Pole ids are 0 and 1.
    pub fn theta(a: usize, b: usize, c: usize) -> Option<PlaneGraph> {
        if a < 2 || b < 2 || c < 2 {
            return None;
        }
        let mut pts = vec![(0.0, 0.0), (10.0, 0.0)];
        let mut edges = Vec::new();
        for (j, len) in [a, b, c].into_iter().enumerate() {
            let y = j as f64 - 1.0;
            let mut prev = 0;
            for k in 1..len {
                pts.push((10.0 * k as f64 / len as f64, y * (1.0 + k as f64 * 0.01)));
                let v = pts.len() - 1;
                edges.push((prev, v));
                prev = v;
            }
            edges.push((prev, 1));
        }
        PlaneGraph::from_straight_line(&pts, &edges, OuterFace::Default).ok()
    }

    /// Outer square 0..4, inner square 4..8.
    pub fn cube() -> PlaneGraph {
        let pts = [(-2.0, -2.0), (2.0, -2.0), (2.0, 2.0), (-2.0, 2.0), (-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)];
        let edges =
            [(0, 1), (1, 2), (2, 3), (3, 0), (4, 5), (5, 6), (6, 7), (7, 4), (0, 4), (1, 5), (2, 6), (3, 7)];
        PlaneGraph::from_straight_line(&pts, &edges, OuterFace::Dart(1, 0)).expect("cube")
    }

    /// Side of the cube's bipartition.
    pub fn cube_parity(v: Vertex) -> bool {
        if v < 4 {
            v % 2 == 0
        } else {
            v % 2 == 1
        }
    }

    pub(crate) fn pentagon(radius: f64) -> Vec<(f64, f64)> {
        (0..5)
            .map(|i| {
                let t = std::f64::consts::FRAC_PI_2 - i as f64 * 2.0 * std::f64::consts::PI / 5.0;
                (t.cos() * radius, t.sin() * radius)
            })
            .collect()
    }

    /// C5 `y0..y4` (outer face) with `x = 5` inside, adjacent to `y0` and `y2`.
    pub fn c5_with_chord_vertex() -> PlaneGraph {
        let mut pts = pentagon(3.0);
        pts.push((1.2, 0.6));
        let edges = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (5, 0), (5, 2)];
        let g = PlaneGraph::from_straight_line(&pts, &edges, OuterFace::Dart(0, 4)).expect("c5 + x");
        outer_by_vertices(g, &[0, 1, 2, 3, 4])
    }

    /// Outer cycle `1..=k` and a hub `0` inside, joined to each listed cycle
    /// position through its own degree-2 vertex.
    pub fn spoked_cycle(k: usize, spokes: &[usize]) -> PlaneGraph {
        let mut pts = vec![(0.0, 0.0)];
        for i in 0..k {
            let t = std::f64::consts::FRAC_PI_2 - i as f64 * 2.0 * std::f64::consts::PI / k as f64;
            pts.push((3.0 * t.cos(), 3.0 * t.sin()));
        }
        let mut edges: Vec<(Vertex, Vertex)> = (0..k).map(|i| (1 + i, 1 + (i + 1) % k)).collect();
        for &s in spokes {
            let (x, y) = pts[1 + s];
            pts.push((x * 0.5, y * 0.5));
            let m = pts.len() - 1;
            edges.push((0, m));
            edges.push((m, 1 + s));
        }
        let g = PlaneGraph::from_straight_line(&pts, &edges, OuterFace::Default).expect("spoked cycle");
        let ring: Vec<Vertex> = (1..=k).collect();
        outer_by_vertices(g, &ring)
    }
}

/// Makes the face with exactly the given vertex set the outer face.
pub fn outer_by_vertices(g: PlaneGraph, vertices: &[Vertex]) -> PlaneGraph {
    let want: BTreeSet<Vertex> = vertices.iter().copied().collect();
    let id = g
        .faces()
        .iter()
        .find(|f| f.vertex_set() == want && f.length == want.len())
        .expect("face with the requested boundary")
        .id;
    g.with_outer_face(id).expect("existing face")
}

fn face_corners(g: &PlaneGraph, face: usize) -> Vec<(Vertex, Vertex)> {
    g.face(face).darts().map(|(u, v)| (u, v)).collect()
}

/// Seeded random connected triangle-free plane graph on `n` vertices.
pub fn random_tfp(seed: u64, n: usize) -> PlaneGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_tfp_with(&mut rng, n)
}

fn random_tfp_with(rng: &mut ChaCha8Rng, n: usize) -> PlaneGraph {
    if n <= 1 {
        return PlaneGraph::new(vec![Vec::new(); n.max(1)], OuterFace::Default).expect("single vertex");
    }
    let mut g = families::path(2);
    loop {
        // Once all vertices are in, keep adding a few chords.
        if g.vertex_count() >= n && !rng.gen_bool(0.4) {
            break;
        }
        let face = rng.gen_range(0..g.faces().len());
        let corners = face_corners(&g, face);
        if corners.is_empty() {
            continue;
        }
        let mut b = g.builder();
        if g.vertex_count() < n && (g.vertex_count() < 4 || rng.gen_bool(0.7)) {
            // New vertex adjacent to an independent set of the face.
            let want = rng.gen_range(1..=3usize);
            let mut idx: Vec<usize> = (0..corners.len()).collect();
            idx.shuffle(rng);
            let mut chosen: Vec<usize> = Vec::new();
            for i in idx {
                let at = corners[i].1;
                if chosen.len() < want
                    && chosen.iter().all(|&j| corners[j].1 != at && !g.has_edge(corners[j].1, at))
                {
                    chosen.push(i);
                }
            }
            chosen.sort_unstable();
            let cs: Vec<_> = chosen.iter().map(|&i| corners[i]).collect();
            b.add_vertex_in_face(&cs);
        } else {
            // Chord between vertices at distance at least 3.
            let mut pairs = Vec::new();
            for i in 0..corners.len() {
                for j in i + 1..corners.len() {
                    let (a, c) = (corners[i].1, corners[j].1);
                    if a != c && !g.has_edge(a, c) && !g.neighbors(a).iter().any(|&w| g.has_edge(w, c)) {
                        pairs.push((i, j));
                    }
                }
            }
            let Some(&(i, j)) = pairs.choose(rng) else { continue };
            b.add_edge_in_face(corners[i], corners[j]);
        }
        g = b.build(OuterFace::Default).expect("insertion keeps planarity");
    }
    debug_assert!(g.is_triangle_free() && g.is_connected());
    g
}

/// Random request graph: a random base graph on `n - k` vertices plus
/// `k <= max_requests` requests of random kind and weight.
pub fn random_request_graph(seed: u64, n: usize, max_requests: usize) -> RequestGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_0f_2e9u64);
    let k = rng.gen_range(1..=max_requests.max(1)).min(n.saturating_sub(3));
    let mut g = random_tfp_with(&mut rng, n - k);
    let base_n = g.vertex_count();
    let mut r_eq = BTreeSet::new();
    let mut r_neq = BTreeSet::new();
    let mut weights = BTreeMap::new();
    let choices = [Weight::new(1, 1), Weight::new(2, 1), Weight::new(1, 2), Weight::new(3, 2), Weight::new(2, 3)];
    for _ in 0..k {
        let mut candidates = Vec::new();
        for f in g.faces() {
            let corners = face_corners(&g, f.id);
            for i in 0..corners.len() {
                for j in i + 1..corners.len() {
                    let (a, c) = (corners[i].1, corners[j].1);
                    if a < base_n && c < base_n && a != c && !g.has_edge(a, c) {
                        candidates.push((corners[i], corners[j]));
                    }
                }
            }
        }
        let Some(&(ca, cb)) = candidates.choose(&mut rng) else { break };
        let mut b = g.builder();
        let r = b.add_vertex_in_face(&[ca, cb]);
        g = b.build(OuterFace::Default).expect("request insertion");
        if rng.gen_bool(0.5) {
            r_eq.insert(r);
        } else {
            r_neq.insert(r);
        }
        weights.insert(r, *choices.choose(&mut rng).expect("non-empty"));
    }
    RequestGraph::new(g, r_eq, r_neq, weights).expect("valid random request graph")
}

/// Refined degree signature used to bucket candidate isomorphs.
fn invariant(adj: &[Vec<Vertex>]) -> u64 {
    let n = adj.len();
    let mut colors: Vec<u64> = adj.iter().map(|a| a.len() as u64).collect();
    for _ in 0..3 {
        colors = (0..n)
            .map(|v| {
                let mut nb: Vec<u64> = adj[v].iter().map(|&u| colors[u]).collect();
                nb.sort_unstable();
                let mut h = DefaultHasher::new();
                (colors[v], nb).hash(&mut h);
                h.finish()
            })
            .collect();
    }
    colors.sort_unstable();
    let mut h = DefaultHasher::new();
    (n, colors).hash(&mut h);
    h.finish()
}

fn to_petgraph(adj: &[Vec<Vertex>]) -> UnGraph<(), ()> {
    let mut edges = Vec::new();
    for (u, a) in adj.iter().enumerate() {
        for &v in a {
            if u < v {
                edges.push((u as u32, v as u32));
            }
        }
    }
    let mut g = UnGraph::<(), ()>::from_edges(edges);
    while g.node_count() < adj.len() {
        g.add_node(());
    }
    g
}

/// All connected triangle-free planar graphs on `1..=max_n` vertices, one
/// embedding each, up to isomorphism. Ordered by vertex count.
pub fn exhaustive_tfp(max_n: usize) -> Vec<PlaneGraph> {
    let mut out = Vec::new();
    if max_n == 0 {
        return out;
    }
    let mut level: Vec<Vec<Vec<Vertex>>> = vec![vec![Vec::new()]];
    out.push(embed::embed_graph(&level[0]).expect("single vertex"));
    for n in 2..=max_n {
        let mut next: Vec<Vec<Vec<Vertex>>> = Vec::new();
        let mut buckets: HashMap<u64, Vec<(usize, UnGraph<(), ()>)>> = HashMap::new();
        for parent in &level {
            let m = n - 1;
            for mask in 1u32..(1 << m) {
                let set: Vec<Vertex> = (0..m).filter(|&i| mask & (1 << i) != 0).collect();
                if set.iter().any(|&a| set.iter().any(|&b| parent[a].contains(&b))) {
                    continue;
                }
                let edges = parent.iter().map(Vec::len).sum::<usize>() / 2 + set.len();
                if n >= 3 && edges > 2 * n - 4 {
                    continue;
                }
                let mut adj = parent.clone();
                for &a in &set {
                    adj[a].push(m);
                }
                adj.push(set.clone());
                let key = invariant(&adj);
                let pg = to_petgraph(&adj);
                let bucket = buckets.entry(key).or_default();
                if bucket.iter().any(|(_, other)| petgraph::algo::is_isomorphic(other, &pg)) {
                    continue;
                }
                if embed::embed(&adj).is_none() {
                    continue;
                }
                bucket.push((next.len(), pg));
                next.push(adj);
            }
        }
        for adj in &next {
            out.push(embed::embed_graph(adj).expect("planar"));
        }
        level = next;
    }
    out
}

/// Builds a straight-line graph whose outer face is the unbounded one: with
/// clockwise rotations the outer walk is the only clockwise (negative area)
/// face walk of a connected drawing.
pub fn drawn(points: &[(f64, f64)], edges: &[(Vertex, Vertex)]) -> PlaneGraph {
    let g = PlaneGraph::from_straight_line(points, edges, OuterFace::Default).expect("planar drawing");
    let area = |f: &crate::plane_graph::Face| {
        f.darts().map(|(u, v)| points[u].0 * points[v].1 - points[v].0 * points[u].1).sum::<f64>()
    };
    let outer = g
        .faces()
        .iter()
        .min_by(|a, b| area(a).partial_cmp(&area(b)).expect("finite"))
        .expect("at least one face")
        .id;
    g.with_outer_face(outer).expect("existing face")
}
