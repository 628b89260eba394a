//! Plane graphs stored as rotation systems.
//!
//! Every vertex keeps its neighbors in clockwise order. A face is traced by
//! following a dart `u -> v` with `v -> w`, where `w` is the neighbor that comes
//! right after `u` in the rotation at `v`. One face is designated as the outer
//! face at construction time; everything that talks about "inside" and
//! "outside" of a cycle is relative to it.

use std::collections::{BTreeSet, VecDeque};

use thiserror::Error;

pub type Vertex = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EmbeddingError {
    #[error("graph has no vertices")]
    Empty,
    #[error("vertex {vertex} lists neighbor {neighbor}, which is out of range")]
    NeighborOutOfRange { vertex: Vertex, neighbor: Vertex },
    #[error("asymmetric rotation: {u} lists {v} {forward} time(s), {v} lists {u} {backward} time(s)")]
    AsymmetricRotation {
        u: Vertex,
        v: Vertex,
        forward: usize,
        backward: usize,
    },
    #[error("loop or multiple edge at vertex {0}")]
    LoopOrMultiedge(Vertex),
    #[error("outer face hint does not name a face of the embedding")]
    BadOuterFace,
    #[error("rotation system has positive genus (component of vertex {vertex}: n - e + f = {euler})")]
    NotPlanar { vertex: Vertex, euler: i64 },
}

/// Which face to treat as the outer face.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OuterFace {
    /// The face containing the first dart of vertex 0.
    #[default]
    Default,
    /// A face id, in traversal order.
    Face(usize),
    /// The face containing the dart `u -> v`.
    Dart(Vertex, Vertex),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Face {
    pub id: usize,
    /// Tails of the darts of the boundary walk, in walk order. An isolated
    /// vertex has a face whose boundary is just that vertex.
    pub boundary: Vec<Vertex>,
    /// Number of darts on the boundary walk (zero for an isolated vertex).
    pub length: usize,
}

impl Face {
    /// True if the boundary walk visits every vertex at most once.
    pub fn is_cycle(&self) -> bool {
        if self.length < 3 {
            return false;
        }
        let distinct: BTreeSet<_> = self.boundary.iter().collect();
        distinct.len() == self.boundary.len()
    }

    pub fn vertex_set(&self) -> BTreeSet<Vertex> {
        self.boundary.iter().copied().collect()
    }

    /// Darts `(tail, head)` of the boundary walk.
    pub fn darts(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        let len = self.boundary.len();
        (0..self.length).map(move |i| (self.boundary[i], self.boundary[(i + 1) % len]))
    }
}

/// A cycle of the graph, with its interior relative to the outer face.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleRef {
    pub vertices: Vec<Vertex>,
    pub separating: bool,
    pub interior: Vec<Vertex>,
    pub interior_faces: Vec<usize>,
}

impl CycleRef {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.vertices.contains(&v)
    }
}

/// The two sides of a cycle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleSides {
    pub inside_faces: Vec<usize>,
    pub inside_vertices: Vec<Vertex>,
    pub outside_vertices: Vec<Vertex>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlaneGraph {
    rotations: Vec<Vec<Vertex>>,
    dart_face: Vec<Vec<usize>>,
    faces: Vec<Face>,
    outer: usize,
    edge_count: usize,
    component: Vec<usize>,
    component_count: usize,
}

impl PlaneGraph {
    pub fn new(rotations: Vec<Vec<Vertex>>, outer: OuterFace) -> Result<Self, EmbeddingError> {
        let n = rotations.len();
        if n == 0 {
            return Err(EmbeddingError::Empty);
        }
        for (v, rot) in rotations.iter().enumerate() {
            for &u in rot {
                if u >= n {
                    return Err(EmbeddingError::NeighborOutOfRange { vertex: v, neighbor: u });
                }
                if u == v {
                    return Err(EmbeddingError::LoopOrMultiedge(v));
                }
            }
            let distinct: BTreeSet<_> = rot.iter().collect();
            if distinct.len() != rot.len() {
                return Err(EmbeddingError::LoopOrMultiedge(v));
            }
        }
        for (v, rot) in rotations.iter().enumerate() {
            for &u in rot {
                if !rotations[u].contains(&v) {
                    return Err(EmbeddingError::AsymmetricRotation {
                        u: v,
                        v: u,
                        forward: 1,
                        backward: 0,
                    });
                }
            }
        }
        let edge_count = rotations.iter().map(Vec::len).sum::<usize>() / 2;

        let mut dart_face: Vec<Vec<usize>> = rotations.iter().map(|r| vec![usize::MAX; r.len()]).collect();
        let mut faces = Vec::new();
        for v in 0..n {
            if rotations[v].is_empty() {
                let id = faces.len();
                faces.push(Face { id, boundary: vec![v], length: 0 });
                continue;
            }
            for i in 0..rotations[v].len() {
                if dart_face[v][i] != usize::MAX {
                    continue;
                }
                let id = faces.len();
                let mut boundary = Vec::new();
                let (mut tail, mut idx) = (v, i);
                loop {
                    dart_face[tail][idx] = id;
                    boundary.push(tail);
                    let head = rotations[tail][idx];
                    let back = position(&rotations[head], tail);
                    let next = (back + 1) % rotations[head].len();
                    tail = head;
                    idx = next;
                    if tail == v && idx == i {
                        break;
                    }
                }
                let length = boundary.len();
                faces.push(Face { id, boundary, length });
            }
        }

        let (component, component_count) = components(&rotations);
        let mut per_comp = vec![(0i64, 0i64, BTreeSet::new()); component_count];
        for v in 0..n {
            let c = &mut per_comp[component[v]];
            c.0 += 1;
            c.1 += rotations[v].len() as i64;
        }
        for f in &faces {
            per_comp[component[f.boundary[0]]].2.insert(f.id);
        }
        for v in 0..n {
            let c = &per_comp[component[v]];
            let euler = c.0 - c.1 / 2 + c.2.len() as i64;
            if euler != 2 {
                return Err(EmbeddingError::NotPlanar { vertex: v, euler });
            }
        }

        let outer = match outer {
            OuterFace::Default => dart_face[0].first().copied().unwrap_or_else(|| {
                faces.iter().position(|f| f.boundary == [0]).expect("isolated vertex face")
            }),
            OuterFace::Face(id) => {
                if id >= faces.len() {
                    return Err(EmbeddingError::BadOuterFace);
                }
                id
            }
            OuterFace::Dart(u, v) => {
                if u >= n {
                    return Err(EmbeddingError::BadOuterFace);
                }
                match rotations[u].iter().position(|&x| x == v) {
                    Some(i) => dart_face[u][i],
                    None => return Err(EmbeddingError::BadOuterFace),
                }
            }
        };

        Ok(PlaneGraph {
            rotations,
            dart_face,
            faces,
            outer,
            edge_count,
            component,
            component_count,
        })
    }

    /// Embeds a straight-line drawing: neighbors are sorted clockwise by angle.
    pub fn from_straight_line(
        points: &[(f64, f64)],
        edges: &[(Vertex, Vertex)],
        outer: OuterFace,
    ) -> Result<Self, EmbeddingError> {
        let mut rot: Vec<Vec<Vertex>> = vec![Vec::new(); points.len()];
        for &(u, v) in edges {
            if u >= points.len() || v >= points.len() {
                return Err(EmbeddingError::NeighborOutOfRange { vertex: u, neighbor: v });
            }
            rot[u].push(v);
            rot[v].push(u);
        }
        for (v, r) in rot.iter_mut().enumerate() {
            let (x0, y0) = points[v];
            // Decreasing angle is clockwise with the y axis pointing up.
            r.sort_by(|&a, &b| {
                let ta = (points[a].1 - y0).atan2(points[a].0 - x0);
                let tb = (points[b].1 - y0).atan2(points[b].0 - x0);
                tb.partial_cmp(&ta).expect("finite coordinates")
            });
        }
        PlaneGraph::new(rot, outer)
    }

    pub fn vertex_count(&self) -> usize {
        self.rotations.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn rotation(&self, v: Vertex) -> &[Vertex] {
        &self.rotations[v]
    }

    pub fn rotations(&self) -> &[Vec<Vertex>] {
        &self.rotations
    }

    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.rotations[v]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.rotations[v].len()
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        self.rotations[u].contains(&v)
    }

    /// Edges as `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> Vec<(Vertex, Vertex)> {
        let mut out = Vec::with_capacity(self.edge_count);
        for (u, rot) in self.rotations.iter().enumerate() {
            for &v in rot {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out.sort_unstable();
        out
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn face(&self, id: usize) -> &Face {
        &self.faces[id]
    }

    pub fn outer_face_id(&self) -> usize {
        self.outer
    }

    pub fn outer_face(&self) -> &Face {
        &self.faces[self.outer]
    }

    /// Face containing the dart `u -> v`.
    pub fn face_of_dart(&self, u: Vertex, v: Vertex) -> Option<usize> {
        self.rotations[u].iter().position(|&x| x == v).map(|i| self.dart_face[u][i])
    }

    /// Faces incident with `v`, without repetition, in rotation order.
    pub fn faces_at(&self, v: Vertex) -> Vec<usize> {
        if self.rotations[v].is_empty() {
            return vec![self.faces.iter().position(|f| f.boundary == [v]).expect("isolated face")];
        }
        let mut out = Vec::new();
        for &f in &self.dart_face[v] {
            if !out.contains(&f) {
                out.push(f);
            }
        }
        out
    }

    pub fn outer_vertices(&self) -> BTreeSet<Vertex> {
        self.outer_face().vertex_set()
    }

    pub fn is_on_outer_face(&self, v: Vertex) -> bool {
        self.outer_face().boundary.contains(&v)
    }

    /// True if the edge `uv` lies on the boundary of the outer face.
    pub fn is_outer_edge(&self, u: Vertex, v: Vertex) -> bool {
        self.face_of_dart(u, v) == Some(self.outer) || self.face_of_dart(v, u) == Some(self.outer)
    }

    /// Number of faces of each length, indexed by length.
    pub fn face_length_histogram(&self) -> Vec<usize> {
        let max = self.faces.iter().map(|f| f.length).max().unwrap_or(0);
        let mut hist = vec![0; max + 1];
        for f in &self.faces {
            hist[f.length] += 1;
        }
        hist
    }

    pub fn component_count(&self) -> usize {
        self.component_count
    }

    pub fn component_of(&self, v: Vertex) -> usize {
        self.component[v]
    }

    pub fn is_connected(&self) -> bool {
        self.component_count == 1
    }

    /// Length of a shortest cycle, `None` for forests.
    pub fn girth(&self) -> Option<usize> {
        let n = self.vertex_count();
        let mut best: Option<usize> = None;
        let mut dist = vec![usize::MAX; n];
        let mut parent = vec![usize::MAX; n];
        for root in 0..n {
            dist.iter_mut().for_each(|d| *d = usize::MAX);
            dist[root] = 0;
            let mut queue = VecDeque::from([root]);
            while let Some(u) = queue.pop_front() {
                if let Some(b) = best {
                    if 2 * dist[u] + 1 >= b {
                        break;
                    }
                }
                for &w in &self.rotations[u] {
                    if dist[w] == usize::MAX {
                        dist[w] = dist[u] + 1;
                        parent[w] = u;
                        queue.push_back(w);
                    } else if parent[u] != w {
                        let len = dist[u] + dist[w] + 1;
                        best = Some(best.map_or(len, |b| b.min(len)));
                    }
                }
            }
        }
        best
    }

    pub fn find_triangle(&self) -> Option<[Vertex; 3]> {
        for (u, v) in self.edges() {
            for &w in &self.rotations[u] {
                if w != v && self.has_edge(v, w) {
                    return Some([u, v, w]);
                }
            }
        }
        None
    }

    pub fn is_triangle_free(&self) -> bool {
        self.find_triangle().is_none()
    }

    /// All cycles of the given length, each listed once, starting from its
    /// smallest vertex and continuing towards the smaller of its two neighbors.
    pub fn cycles_of_length(&self, length: usize) -> Vec<Vec<Vertex>> {
        let mut out = Vec::new();
        if length < 3 {
            return out;
        }
        let n = self.vertex_count();
        let mut path = Vec::with_capacity(length);
        let mut on_path = vec![false; n];
        for start in 0..n {
            path.push(start);
            on_path[start] = true;
            self.extend_cycles(start, length, &mut path, &mut on_path, &mut out);
            on_path[start] = false;
            path.pop();
        }
        out
    }

    fn extend_cycles(
        &self,
        start: Vertex,
        length: usize,
        path: &mut Vec<Vertex>,
        on_path: &mut [bool],
        out: &mut Vec<Vec<Vertex>>,
    ) {
        let last = *path.last().expect("non-empty path");
        if path.len() == length {
            if self.has_edge(last, start) && path[1] < path[length - 1] {
                out.push(path.clone());
            }
            return;
        }
        for &w in &self.rotations[last] {
            if w > start && !on_path[w] {
                path.push(w);
                on_path[w] = true;
                self.extend_cycles(start, length, path, on_path, out);
                on_path[w] = false;
                path.pop();
            }
        }
    }

    /// Splits the faces and vertices by the given cycle; the outer face is
    /// always on the outside.
    pub fn cycle_sides(&self, cycle: &[Vertex]) -> CycleSides {
        let k = cycle.len();
        let mut on_cycle = vec![false; self.vertex_count()];
        for &v in cycle {
            on_cycle[v] = true;
        }
        let is_cycle_edge = |a: Vertex, b: Vertex| {
            (0..k).any(|i| {
                let (x, y) = (cycle[i], cycle[(i + 1) % k]);
                (x == a && y == b) || (x == b && y == a)
            })
        };
        // Dual adjacency across non-cycle edges.
        let nf = self.faces.len();
        let mut dual: Vec<Vec<usize>> = vec![Vec::new(); nf];
        for (u, rot) in self.rotations.iter().enumerate() {
            for (i, &v) in rot.iter().enumerate() {
                if u < v && !is_cycle_edge(u, v) {
                    let f1 = self.dart_face[u][i];
                    let f2 = self.face_of_dart(v, u).expect("reverse dart");
                    dual[f1].push(f2);
                    dual[f2].push(f1);
                }
            }
        }
        let cycle_comp = self.component[cycle[0]];
        let mut outside = vec![false; nf];
        let mut queue = VecDeque::new();
        for f in &self.faces {
            if f.id == self.outer || self.component[f.boundary[0]] != cycle_comp {
                outside[f.id] = true;
                queue.push_back(f.id);
            }
        }
        while let Some(f) = queue.pop_front() {
            for &g in &dual[f] {
                if !outside[g] {
                    outside[g] = true;
                    queue.push_back(g);
                }
            }
        }
        let inside_faces: Vec<usize> = (0..nf).filter(|&f| !outside[f]).collect();
        let mut inside_vertices = Vec::new();
        let mut outside_vertices = Vec::new();
        for v in 0..self.vertex_count() {
            if on_cycle[v] {
                continue;
            }
            let faces = self.faces_at(v);
            if faces.iter().any(|&f| !outside[f]) {
                inside_vertices.push(v);
            } else {
                outside_vertices.push(v);
            }
        }
        CycleSides { inside_faces, inside_vertices, outside_vertices }
    }

    pub fn cycle_ref(&self, cycle: &[Vertex]) -> CycleRef {
        let sides = self.cycle_sides(cycle);
        CycleRef {
            vertices: cycle.to_vec(),
            separating: !sides.inside_vertices.is_empty() && !sides.outside_vertices.is_empty(),
            interior: sides.inside_vertices,
            interior_faces: sides.inside_faces,
        }
    }

    /// All separating cycles of the given length, in the canonical order of
    /// [`PlaneGraph::cycles_of_length`].
    pub fn find_separating_cycles(&self, length: usize) -> Vec<CycleRef> {
        self.cycles_of_length(length)
            .into_iter()
            .map(|c| self.cycle_ref(&c))
            .filter(|c| c.separating)
            .collect()
    }

    /// Subgraph induced by `keep` (in increasing id order), with rotations
    /// restricted. The outer face is the one containing the surviving dart
    /// `outer_dart` (ids of this graph), or the default face if `None`.
    /// Returns the subgraph and the old id of each new vertex.
    pub fn induced_subgraph(
        &self,
        keep: &BTreeSet<Vertex>,
        outer_dart: Option<(Vertex, Vertex)>,
    ) -> Result<(PlaneGraph, Vec<Vertex>), EmbeddingError> {
        let old: Vec<Vertex> = keep.iter().copied().collect();
        let mut new_id = vec![usize::MAX; self.vertex_count()];
        for (i, &v) in old.iter().enumerate() {
            new_id[v] = i;
        }
        let rot: Vec<Vec<Vertex>> = old
            .iter()
            .map(|&v| {
                self.rotations[v]
                    .iter()
                    .filter(|&&u| new_id[u] != usize::MAX)
                    .map(|&u| new_id[u])
                    .collect()
            })
            .collect();
        let outer = match outer_dart {
            Some((u, v)) if new_id[u] != usize::MAX && new_id[v] != usize::MAX => {
                OuterFace::Dart(new_id[u], new_id[v])
            }
            Some(_) => return Err(EmbeddingError::BadOuterFace),
            None => OuterFace::Default,
        };
        Ok((PlaneGraph::new(rot, outer)?, old))
    }

    /// Same embedding with another face as the outer face.
    pub fn with_outer_face(&self, face: usize) -> Result<PlaneGraph, EmbeddingError> {
        if face >= self.faces.len() {
            return Err(EmbeddingError::BadOuterFace);
        }
        let mut g = self.clone();
        g.outer = face;
        Ok(g)
    }

    /// The outer dart of `cycle` edge `cycle[0] -> cycle[1]` or its reverse,
    /// whichever lies on the outside of the cycle.
    pub fn outside_dart_of_cycle(&self, cycle: &[Vertex]) -> (Vertex, Vertex) {
        let sides = self.cycle_sides(cycle);
        let (a, b) = (cycle[0], cycle[1]);
        let f = self.face_of_dart(a, b).expect("cycle edge");
        if sides.inside_faces.contains(&f) {
            (b, a)
        } else {
            (a, b)
        }
    }

    pub fn builder(&self) -> RotationBuilder {
        RotationBuilder { rotations: self.rotations.clone() }
    }
}

fn position(rot: &[Vertex], v: Vertex) -> usize {
    rot.iter().position(|&x| x == v).expect("symmetric rotation")
}

fn components(rot: &[Vec<Vertex>]) -> (Vec<usize>, usize) {
    let n = rot.len();
    let mut comp = vec![usize::MAX; n];
    let mut count = 0;
    for s in 0..n {
        if comp[s] != usize::MAX {
            continue;
        }
        comp[s] = count;
        let mut stack = vec![s];
        while let Some(u) = stack.pop() {
            for &w in &rot[u] {
                if comp[w] == usize::MAX {
                    comp[w] = count;
                    stack.push(w);
                }
            }
        }
        count += 1;
    }
    (comp, count)
}

/// Mutable rotation system used by the graph transforms. Nothing is checked
/// until [`RotationBuilder::build`].
#[derive(Debug, Clone, Default)]
pub struct RotationBuilder {
    rotations: Vec<Vec<Vertex>>,
}

impl RotationBuilder {
    pub fn new(n: usize) -> Self {
        RotationBuilder { rotations: vec![Vec::new(); n] }
    }

    pub fn vertex_count(&self) -> usize {
        self.rotations.len()
    }

    pub fn add_vertex(&mut self) -> Vertex {
        self.rotations.push(Vec::new());
        self.rotations.len() - 1
    }

    pub fn rotation(&self, v: Vertex) -> &[Vertex] {
        &self.rotations[v]
    }

    pub fn set_rotation(&mut self, v: Vertex, rot: Vec<Vertex>) {
        self.rotations[v] = rot;
    }

    /// Replaces the entry `old` in the rotation at `v` with `new`.
    pub fn replace(&mut self, v: Vertex, old: Vertex, new: Vertex) {
        let i = position(&self.rotations[v], old);
        self.rotations[v][i] = new;
    }

    /// Inserts `new` right after `anchor` (clockwise) in the rotation at `v`.
    pub fn insert_after(&mut self, v: Vertex, anchor: Vertex, new: Vertex) {
        let i = position(&self.rotations[v], anchor);
        self.rotations[v].insert(i + 1, new);
    }

    /// Inserts `new` right before `anchor` in the rotation at `v`.
    pub fn insert_before(&mut self, v: Vertex, anchor: Vertex, new: Vertex) {
        let i = position(&self.rotations[v], anchor);
        self.rotations[v].insert(i, new);
    }

    pub fn remove_entry(&mut self, v: Vertex, u: Vertex) {
        let i = position(&self.rotations[v], u);
        self.rotations[v].remove(i);
    }

    /// Adds a vertex inside the face whose boundary walk contains the given
    /// corners. Each corner `(prev, at)` is the dart `prev -> at` of that walk;
    /// the new vertex is attached to `at` in the angle following the dart.
    /// Corners must be listed in walk order.
    pub fn add_vertex_in_face(&mut self, corners: &[(Vertex, Vertex)]) -> Vertex {
        let x = self.add_vertex();
        for &(prev, at) in corners {
            self.insert_after(at, prev, x);
        }
        // The new vertex sees its neighbors in reverse walk order.
        self.rotations[x] = corners.iter().rev().map(|&(_, at)| at).collect();
        x
    }

    /// Adds the edge `ab` across a face, given the corners of `a` and `b` in
    /// that face (as darts `prev -> a` and `prev -> b`).
    pub fn add_edge_in_face(&mut self, corner_a: (Vertex, Vertex), corner_b: (Vertex, Vertex)) {
        let (pa, a) = corner_a;
        let (pb, b) = corner_b;
        self.insert_after(a, pa, b);
        self.insert_after(b, pb, a);
    }

    pub fn build(self, outer: OuterFace) -> Result<PlaneGraph, EmbeddingError> {
        PlaneGraph::new(self.rotations, outer)
    }

    pub fn into_rotations(self) -> Vec<Vec<Vertex>> {
        self.rotations
    }
}
