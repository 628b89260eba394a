//! Planar embedding of small abstract graphs (Demoucron, Malgrange and
//! Pertuiset path addition, run per biconnected block).

use std::collections::BTreeSet;

use crate::plane_graph::{OuterFace, PlaneGraph, Vertex};

/// Clockwise rotations of a planar embedding of the simple graph given by
/// adjacency lists, or `None` if the graph is not planar.
pub fn embed(adj: &[Vec<Vertex>]) -> Option<Vec<Vec<Vertex>>> {
    let n = adj.len();
    let mut rot: Vec<Vec<Vertex>> = vec![Vec::new(); n];
    for block in blocks(adj) {
        let block_rot = embed_block(adj, &block)?;
        for (v, seg) in block_rot {
            rot[v].extend(seg);
        }
    }
    Some(rot)
}

/// Embeds and builds the plane graph (default outer face).
pub fn embed_graph(adj: &[Vec<Vertex>]) -> Option<PlaneGraph> {
    let rot = embed(adj)?;
    Some(PlaneGraph::new(rot, OuterFace::Default).expect("embedding is planar"))
}

/// Edge sets of the biconnected blocks, each as sorted `(u, v)` with `u < v`.
fn blocks(adj: &[Vec<Vertex>]) -> Vec<Vec<(Vertex, Vertex)>> {
    let n = adj.len();
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut time = 0;
    let mut stack: Vec<(Vertex, Vertex)> = Vec::new();
    let mut out = Vec::new();

    for root in 0..n {
        if disc[root] != usize::MAX {
            continue;
        }
        disc[root] = time;
        low[root] = time;
        time += 1;
        // (vertex, parent, next neighbor index)
        let mut dfs: Vec<(Vertex, Vertex, usize)> = vec![(root, usize::MAX, 0)];
        while let Some(&mut (v, parent, ref mut i)) = dfs.last_mut() {
            if *i < adj[v].len() {
                let w = adj[v][*i];
                *i += 1;
                if disc[w] == usize::MAX {
                    stack.push((v, w));
                    disc[w] = time;
                    low[w] = time;
                    time += 1;
                    dfs.push((w, v, 0));
                } else if w != parent && disc[w] < disc[v] {
                    stack.push((v, w));
                    low[v] = low[v].min(disc[w]);
                }
            } else {
                dfs.pop();
                if let Some(&(p, _, _)) = dfs.last() {
                    low[p] = low[p].min(low[v]);
                    if low[v] >= disc[p] {
                        let mut block = Vec::new();
                        while let Some(e) = stack.pop() {
                            block.push((e.0.min(e.1), e.0.max(e.1)));
                            if e == (p, v) {
                                break;
                            }
                        }
                        block.sort_unstable();
                        out.push(block);
                    }
                }
            }
        }
    }
    out
}

/// Rotation segments of one block, or `None` if it is not planar.
fn embed_block(adj: &[Vec<Vertex>], edges: &[(Vertex, Vertex)]) -> Option<Vec<(Vertex, Vec<Vertex>)>> {
    if edges.len() == 1 {
        let (u, v) = edges[0];
        return Some(vec![(u, vec![v]), (v, vec![u])]);
    }
    let verts: BTreeSet<Vertex> = edges.iter().flat_map(|&(u, v)| [u, v]).collect();
    let edge_set: BTreeSet<(Vertex, Vertex)> = edges.iter().copied().collect();
    let in_block = |u: Vertex, v: Vertex| edge_set.contains(&(u.min(v), u.max(v)));
    let nbrs = |v: Vertex| adj[v].iter().copied().filter(move |&w| in_block(v, w));

    let cycle = find_cycle(&verts, &nbrs)?;
    let mut faces: Vec<Vec<Vertex>> = vec![cycle.clone(), cycle.iter().rev().copied().collect()];
    let mut placed: BTreeSet<Vertex> = cycle.iter().copied().collect();
    let mut embedded: BTreeSet<(Vertex, Vertex)> = BTreeSet::new();
    for i in 0..cycle.len() {
        let (a, b) = (cycle[i], cycle[(i + 1) % cycle.len()]);
        embedded.insert((a.min(b), a.max(b)));
    }

    while embedded.len() < edges.len() {
        let fragments = fragments(&verts, edges, &placed, &embedded, &nbrs);
        let mut choice: Option<(usize, usize)> = None;
        for (fi, frag) in fragments.iter().enumerate() {
            let ok: Vec<usize> =
                (0..faces.len()).filter(|&f| frag.attachments.iter().all(|a| faces[f].contains(a))).collect();
            match ok.len() {
                0 => return None,
                1 => {
                    choice = Some((fi, ok[0]));
                    break;
                }
                _ => {
                    if choice.is_none() {
                        choice = Some((fi, ok[0]));
                    }
                }
            }
        }
        let (fi, face) = choice.expect("some fragment remains");
        let path = fragment_path(&fragments[fi], &placed, &nbrs);
        for w in path.windows(2) {
            embedded.insert((w[0].min(w[1]), w[0].max(w[1])));
        }
        for &v in &path {
            placed.insert(v);
        }
        let (f1, f2) = split_face(&faces[face], &path);
        faces[face] = f1;
        faces.push(f2);
    }

    // succ_v(u) = w for consecutive u, v, w on a face walk.
    let mut out = Vec::new();
    for &v in &verts {
        let mut succ = std::collections::BTreeMap::new();
        for f in &faces {
            let k = f.len();
            for i in 0..k {
                if f[i] == v {
                    succ.insert(f[(i + k - 1) % k], f[(i + 1) % k]);
                }
            }
        }
        let start = *succ.keys().next().expect("vertex on a face");
        let mut rot = vec![start];
        let mut cur = succ[&start];
        while cur != start {
            rot.push(cur);
            cur = succ[&cur];
        }
        out.push((v, rot));
    }
    Some(out)
}

fn find_cycle<I: Iterator<Item = Vertex>>(verts: &BTreeSet<Vertex>, nbrs: &impl Fn(Vertex) -> I) -> Option<Vec<Vertex>> {
    let start = *verts.iter().next()?;
    let mut parent = std::collections::BTreeMap::from([(start, usize::MAX)]);
    let mut stack = vec![start];
    let mut order = Vec::new();
    while let Some(v) = stack.pop() {
        order.push(v);
        for w in nbrs(v) {
            if let Some(&pv) = parent.get(&v) {
                if w == pv {
                    continue;
                }
            }
            if parent.contains_key(&w) {
                // Walk both tree paths to their meeting point.
                let path_to_root = |mut x: Vertex| {
                    let mut p = vec![x];
                    while parent[&x] != usize::MAX {
                        x = parent[&x];
                        p.push(x);
                    }
                    p
                };
                let pv = path_to_root(v);
                let pw = path_to_root(w);
                let common = *pv.iter().find(|x| pw.contains(x))?;
                let mut cycle: Vec<Vertex> = pv.iter().copied().take_while(|&x| x != common).collect();
                cycle.push(common);
                let back: Vec<Vertex> = pw.iter().copied().take_while(|&x| x != common).collect();
                cycle.extend(back.into_iter().rev());
                if cycle.len() >= 3 {
                    return Some(cycle);
                }
            } else {
                parent.insert(w, v);
                stack.push(w);
            }
        }
    }
    None
}

struct Fragment {
    /// Interior vertices (empty for a single unembedded edge).
    inner: BTreeSet<Vertex>,
    edge: Option<(Vertex, Vertex)>,
    attachments: BTreeSet<Vertex>,
}

fn fragments<I: Iterator<Item = Vertex>>(
    verts: &BTreeSet<Vertex>,
    edges: &[(Vertex, Vertex)],
    placed: &BTreeSet<Vertex>,
    embedded: &BTreeSet<(Vertex, Vertex)>,
    nbrs: &impl Fn(Vertex) -> I,
) -> Vec<Fragment> {
    let mut out = Vec::new();
    for &(u, v) in edges {
        if placed.contains(&u) && placed.contains(&v) && !embedded.contains(&(u, v)) {
            out.push(Fragment { inner: BTreeSet::new(), edge: Some((u, v)), attachments: BTreeSet::from([u, v]) });
        }
    }
    let mut seen: BTreeSet<Vertex> = BTreeSet::new();
    for &s in verts {
        if placed.contains(&s) || seen.contains(&s) {
            continue;
        }
        let mut inner = BTreeSet::from([s]);
        let mut attachments = BTreeSet::new();
        let mut stack = vec![s];
        seen.insert(s);
        while let Some(x) = stack.pop() {
            for y in nbrs(x) {
                if placed.contains(&y) {
                    attachments.insert(y);
                } else if seen.insert(y) {
                    inner.insert(y);
                    stack.push(y);
                }
            }
        }
        out.push(Fragment { inner, edge: None, attachments });
    }
    out
}

/// A path through the fragment joining two distinct attachments.
fn fragment_path<I: Iterator<Item = Vertex>>(
    frag: &Fragment,
    placed: &BTreeSet<Vertex>,
    nbrs: &impl Fn(Vertex) -> I,
) -> Vec<Vertex> {
    if let Some((u, v)) = frag.edge {
        return vec![u, v];
    }
    let mut att = frag.attachments.iter().copied();
    let a = att.next().expect("attachment");
    let b = att.next().expect("blocks have two attachments per fragment");
    // BFS from a through the fragment interior until a vertex adjacent to b.
    let mut parent = std::collections::BTreeMap::new();
    let mut queue = std::collections::VecDeque::new();
    for y in nbrs(a) {
        if frag.inner.contains(&y) && !parent.contains_key(&y) {
            parent.insert(y, a);
            queue.push_back(y);
        }
    }
    while let Some(x) = queue.pop_front() {
        if nbrs(x).any(|y| y == b) {
            let mut path = vec![b, x];
            let mut cur = x;
            while parent[&cur] != a {
                cur = parent[&cur];
                path.push(cur);
            }
            path.push(a);
            path.reverse();
            return path;
        }
        for y in nbrs(x) {
            if frag.inner.contains(&y) && !placed.contains(&y) && !parent.contains_key(&y) {
                parent.insert(y, x);
                queue.push_back(y);
            }
        }
    }
    unreachable!("fragment is connected")
}

/// Splits the oriented face walk by a path between two of its vertices.
fn split_face(face: &[Vertex], path: &[Vertex]) -> (Vec<Vertex>, Vec<Vertex>) {
    let k = face.len();
    let a = path[0];
    let b = *path.last().expect("path");
    let i = face.iter().position(|&x| x == a).expect("a on face");
    let j = face.iter().position(|&x| x == b).expect("b on face");
    let inner = &path[1..path.len() - 1];
    let mut f1 = Vec::new();
    let mut t = i;
    loop {
        f1.push(face[t]);
        if t == j {
            break;
        }
        t = (t + 1) % k;
    }
    f1.extend(inner.iter().rev());
    let mut f2 = Vec::new();
    let mut t = j;
    loop {
        f2.push(face[t]);
        if t == i {
            break;
        }
        t = (t + 1) % k;
    }
    f2.extend(inner.iter());
    (f1, f2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn adj_from(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        adj
    }

    fn complete_bipartite(a: usize, b: usize) -> Vec<Vec<usize>> {
        let edges: Vec<_> = (0..a).flat_map(|i| (0..b).map(move |j| (i, a + j))).collect();
        adj_from(a + b, &edges)
    }

    #[test]
    fn k33_is_not_planar() {
        assert!(embed(&complete_bipartite(3, 3)).is_none());
    }

    #[test]
    fn k23_and_cube_embed() {
        let g = embed_graph(&complete_bipartite(2, 3)).unwrap();
        assert_eq!(g.faces().len(), 3);
        let cube = [(0, 1), (1, 2), (2, 3), (3, 0), (4, 5), (5, 6), (6, 7), (7, 4), (0, 4), (1, 5), (2, 6), (3, 7)];
        let g = embed_graph(&adj_from(8, &cube)).unwrap();
        assert_eq!(g.faces().len(), 6);
    }

    #[test]
    fn k5_is_not_planar() {
        let edges: Vec<_> = (0..5).flat_map(|i| (i + 1..5).map(move |j| (i, j))).collect();
        assert!(embed(&adj_from(5, &edges)).is_none());
        let k4: Vec<_> = (0..4).flat_map(|i| (i + 1..4).map(move |j| (i, j))).collect();
        assert!(embed(&adj_from(4, &k4)).is_some());
    }

    #[test]
    fn glued_blocks_and_trees() {
        // Two 4-cycles sharing vertex 0, plus a pendant path.
        let edges = [(0, 1), (1, 2), (2, 3), (3, 0), (0, 4), (4, 5), (5, 6), (6, 0), (2, 7), (7, 8)];
        let g = embed_graph(&adj_from(9, &edges)).unwrap();
        assert_eq!(g.faces().len(), 3);
        let star = adj_from(4, &[(0, 1), (0, 2), (0, 3)]);
        assert_eq!(embed_graph(&star).unwrap().faces().len(), 1);
        assert_eq!(embed_graph(&[vec![]]).unwrap().vertex_count(), 1);
    }

    #[test]
    fn petersen_is_not_planar() {
        let mut edges = Vec::new();
        for i in 0..5 {
            edges.push((i, (i + 1) % 5));
            edges.push((i, i + 5));
            edges.push((5 + i, 5 + (i + 2) % 5));
        }
        assert!(embed(&adj_from(10, &edges)).is_none());
    }
}
