//! The Clebsch graph on GF(16), homomorphisms into it, and the distance-3
//! colorings they induce.

use thiserror::Error;

use crate::plane_graph::{PlaneGraph, Vertex};

/// x^4 + x + 1.
const MODULUS: u8 = 0b1_0011;

pub fn gf16_mul(a: u8, b: u8) -> u8 {
    let (mut a, mut b, mut r) = (a, b, 0u8);
    while b != 0 {
        if b & 1 != 0 {
            r ^= a;
        }
        b >>= 1;
        a <<= 1;
        if a & 0x10 != 0 {
            a ^= MODULUS;
        }
    }
    r
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClebschGraph {
    /// The nonzero cubes.
    cubes: Vec<u8>,
    /// Bit `v` of `adj[u]` is set when `u ~ v`.
    adj: [u16; 16],
}

pub fn build_clebsch() -> ClebschGraph {
    let mut cubes: Vec<u8> = (1..16u8).map(|t| gf16_mul(gf16_mul(t, t), t)).collect();
    cubes.sort_unstable();
    cubes.dedup();
    let mut adj = [0u16; 16];
    for (u, row) in adj.iter_mut().enumerate() {
        for v in 0..16 {
            // Characteristic 2: the difference is the XOR.
            if cubes.contains(&((u ^ v) as u8)) {
                *row |= 1 << v;
            }
        }
    }
    ClebschGraph { cubes, adj }
}

impl ClebschGraph {
    pub fn vertex_count(&self) -> usize {
        16
    }

    pub fn cubes(&self) -> &[u8] {
        &self.cubes
    }

    pub fn adjacent(&self, u: u8, v: u8) -> bool {
        self.adj[u as usize] & (1 << v) != 0
    }

    pub fn neighbors(&self, u: u8) -> u16 {
        self.adj[u as usize]
    }

    pub fn degree(&self, u: u8) -> usize {
        self.adj[u as usize].count_ones() as usize
    }

    pub fn triangle_count(&self) -> usize {
        let mut count = 0;
        for u in 0..16u8 {
            for v in u + 1..16 {
                for w in v + 1..16 {
                    if self.adjacent(u, v) && self.adjacent(v, w) && self.adjacent(u, w) {
                        count += 1;
                    }
                }
            }
        }
        count
    }

    /// `(n, k, lambda, mu)` if the graph is strongly regular.
    pub fn srg_parameters(&self) -> Option<(usize, usize, usize, usize)> {
        let k = self.degree(0);
        let mut lambda = None;
        let mut mu = None;
        for u in 0..16u8 {
            if self.degree(u) != k {
                return None;
            }
            for v in 0..16u8 {
                if u == v {
                    continue;
                }
                let common = (self.adj[u as usize] & self.adj[v as usize]).count_ones() as usize;
                let slot = if self.adjacent(u, v) { &mut lambda } else { &mut mu };
                match *slot {
                    None => *slot = Some(common),
                    Some(c) if c != common => return None,
                    _ => {}
                }
            }
        }
        Some((16, k, lambda?, mu?))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClebschError {
    #[error("hypothesis violated: triangle {0:?}")]
    HypothesisViolation([Vertex; 3]),
    #[error("no homomorphism to the Clebsch graph found for a triangle-free planar graph")]
    StatementViolation,
}

/// Vertex images in GF(16).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Homomorphism {
    pub map: Vec<u8>,
}

impl Homomorphism {
    pub fn preserves_edges(&self, g: &PlaneGraph, c: &ClebschGraph) -> bool {
        g.edges().iter().all(|&(u, v)| c.adjacent(self.map[u], self.map[v]))
    }
}

/// Backtracking with forward checking, most constrained vertex first.
pub fn find_homomorphism(g: &PlaneGraph) -> Result<Homomorphism, ClebschError> {
    if let Some(t) = g.find_triangle() {
        return Err(ClebschError::HypothesisViolation(t));
    }
    let c = build_clebsch();
    let n = g.vertex_count();
    let mut domains = vec![u16::MAX; n];
    let mut assigned = vec![None::<u8>; n];
    // The Clebsch graph is vertex-transitive: pin one vertex per component.
    let mut pinned = vec![false; g.component_count()];
    for v in 0..n {
        let comp = g.component_of(v);
        if !pinned[comp] {
            pinned[comp] = true;
            domains[v] = 1;
        }
    }
    if search(g, &c, &mut domains, &mut assigned) {
        Ok(Homomorphism { map: assigned.into_iter().map(|x| x.expect("assigned")).collect() })
    } else {
        Err(ClebschError::StatementViolation)
    }
}

fn search(g: &PlaneGraph, c: &ClebschGraph, domains: &mut [u16], assigned: &mut [Option<u8>]) -> bool {
    let next = (0..g.vertex_count())
        .filter(|&v| assigned[v].is_none())
        .min_by_key(|&v| (domains[v].count_ones(), v));
    let Some(v) = next else { return true };
    let mut options = domains[v];
    while options != 0 {
        let x = options.trailing_zeros() as u8;
        options &= options - 1;
        let saved: Vec<(Vertex, u16)> = g.neighbors(v).iter().map(|&u| (u, domains[u])).collect();
        let mut ok = true;
        for &u in g.neighbors(v) {
            if assigned[u].is_none() {
                domains[u] &= c.neighbors(x);
                if domains[u] == 0 {
                    ok = false;
                }
            }
        }
        if ok {
            assigned[v] = Some(x);
            if search(g, c, domains, assigned) {
                return true;
            }
            assigned[v] = None;
        }
        for (u, d) in saved {
            domains[u] = d;
        }
    }
    false
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dist3Coloring {
    pub colors: Vec<u8>,
    pub proper: bool,
    pub dist3_ok: bool,
}

/// Every path `v0 v1 v2 v3` on distinct vertices whose ends share a color.
pub fn dist3_conflicts(g: &PlaneGraph, colors: &[u8]) -> Vec<[Vertex; 4]> {
    let mut out = Vec::new();
    for v0 in 0..g.vertex_count() {
        for &v1 in g.neighbors(v0) {
            for &v2 in g.neighbors(v1) {
                if v2 == v0 {
                    continue;
                }
                for &v3 in g.neighbors(v2) {
                    if v3 != v1 && v3 != v0 && v0 < v3 && colors[v0] == colors[v3] {
                        out.push([v0, v1, v2, v3]);
                    }
                }
            }
        }
    }
    out
}

pub fn dist3_coloring(g: &PlaneGraph) -> Result<Dist3Coloring, ClebschError> {
    let h = find_homomorphism(g)?;
    let proper = g.edges().iter().all(|&(u, v)| h.map[u] != h.map[v]);
    let dist3_ok = dist3_conflicts(g, &h.map).is_empty();
    Ok(Dist3Coloring { colors: h.map, proper, dist3_ok })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::families;
    use crate::plane_graph::OuterFace;

    #[test]
    fn field_arithmetic() {
        // x * x^3 = x^4 = x + 1.
        assert_eq!(gf16_mul(0b0010, 0b1000), 0b0011);
        for a in 1..16u8 {
            assert!((1..16u8).any(|b| gf16_mul(a, b) == 1), "{a} invertible");
            assert_eq!(gf16_mul(a, 1), a);
        }
    }

    #[test]
    fn clebsch_parameters() {
        let c = build_clebsch();
        assert_eq!(c.vertex_count(), 16);
        assert_eq!(c.cubes().len(), 5);
        assert!((0..16).all(|u| c.degree(u) == 5));
        assert_eq!(c.triangle_count(), 0);
        assert_eq!(c.srg_parameters(), Some((16, 5, 0, 2)));
    }

    #[test]
    fn cubes_are_the_index_three_subgroup() {
        // Oracle: powers g^(3k) of a generator of the multiplicative group.
        let c = build_clebsch();
        let g = 0b0010u8;
        let mut p = 1u8;
        let mut sub = Vec::new();
        for k in 0..15 {
            if k % 3 == 0 {
                sub.push(p);
            }
            p = gf16_mul(p, g);
        }
        sub.sort_unstable();
        assert_eq!(sub, c.cubes());
    }

    #[test]
    fn homomorphisms_of_small_graphs() {
        let c = build_clebsch();
        let edge = families::path(2);
        let h = find_homomorphism(&edge).unwrap();
        assert!(c.adjacent(h.map[0], h.map[1]));
        let c5 = families::cycle(5);
        let h = find_homomorphism(&c5).unwrap();
        assert!(h.preserves_edges(&c5, &c));
        let mut image = h.map.clone();
        image.sort_unstable();
        image.dedup();
        assert_eq!(image.len(), 5);
    }

    #[test]
    fn triangle_rejected() {
        let tri = PlaneGraph::new(vec![vec![1, 2], vec![2, 0], vec![0, 1]], OuterFace::Default).unwrap();
        assert!(matches!(find_homomorphism(&tri), Err(ClebschError::HypothesisViolation(_))));
    }

    #[test]
    fn distance_three_colorings() {
        let p4 = families::path(4);
        let d = dist3_coloring(&p4).unwrap();
        assert!(d.proper && d.dist3_ok);
        assert_ne!(d.colors[0], d.colors[3]);
        for g in [families::cycle(6), families::cube(), families::grid(3, 4)] {
            let d = dist3_coloring(&g).unwrap();
            assert!(d.proper && d.dist3_ok);
        }
        // C5 with a pendant at every vertex.
        let mut rot: Vec<Vec<usize>> = (0..5).map(|i| vec![(i + 4) % 5, (i + 1) % 5, i + 5]).collect();
        rot.extend((0..5).map(|i| vec![i]));
        let g = PlaneGraph::new(rot, OuterFace::Default).unwrap();
        let d = dist3_coloring(&g).unwrap();
        assert!(d.proper && d.dist3_ok);
    }

    #[test]
    fn conflict_finder_sees_bad_colorings() {
        let p4 = families::path(4);
        assert_eq!(dist3_conflicts(&p4, &[1, 2, 3, 1]), vec![[0, 1, 2, 3]]);
    }
}
