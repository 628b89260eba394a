//! Sweeps that check the library's statements over whole instance
//! families. Each sweep returns a summary listing every violation found.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::PathBuf;
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};
use std::time::{Duration, Instant};

use num_rational::Rational64;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::clebsch::{build_clebsch, dist3_conflicts, dist3_coloring, find_homomorphism};
use crate::cogs::{self, best_demand_fraction, detect_obstructions, is_polished, precolorings_of_p, validate_cog, AlphaLemma, Cog};
use crate::coloring::{
    bichromatic_report, count_colorings, enumerate_colorings, extension_count_from_cycle, find_coloring, kempe_components,
    kempe_swap, manycolor_check_with_count, Color, Coloring, COLOR_PAIRS,
};
use crate::decomposition::{build_decomposition, cycle_precolorings, find_configurations, five_face_vertices, rearrange, suburb_from_sequence, ConfigKind};
use crate::generate::{exhaustive_tfp, families, random_request_graph, random_tfp};
use crate::io::{emit_json_document, emit_planar_code, parse_json_document, parse_planar_code};
use crate::par::{map_ordered, Jobs};
use crate::plane_graph::{PlaneGraph, Vertex};
use crate::requests::{best_fraction, clone_explosion, gadget_eq_to_neq, gadget_neq_to_eq, integerize_and_clone, Weight};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CheckId {
    Cycles,
    Manycolor,
    Extension,
    Clebsch,
    Gadgets,
    Clones,
    Cogs,
    Rearrange,
    Decomposition,
    Formats,
}

impl CheckId {
    pub const ALL: [CheckId; 10] = [
        CheckId::Cycles,
        CheckId::Manycolor,
        CheckId::Extension,
        CheckId::Clebsch,
        CheckId::Gadgets,
        CheckId::Clones,
        CheckId::Cogs,
        CheckId::Rearrange,
        CheckId::Decomposition,
        CheckId::Formats,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CheckId::Cycles => "cycles",
            CheckId::Manycolor => "manycolor",
            CheckId::Extension => "extension",
            CheckId::Clebsch => "clebsch",
            CheckId::Gadgets => "gadgets",
            CheckId::Clones => "clones",
            CheckId::Cogs => "cogs",
            CheckId::Rearrange => "rearrange",
            CheckId::Decomposition => "decomposition",
            CheckId::Formats => "formats",
        }
    }

    /// Size bound used when none is given.
    pub fn default_max_n(self) -> usize {
        match self {
            CheckId::Cycles => 14,
            CheckId::Gadgets => 12,
            CheckId::Clones => 8,
            CheckId::Cogs => 8,
            CheckId::Rearrange => 12,
            _ => 9,
        }
    }
}

impl FromStr for CheckId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        CheckId::ALL.into_iter().find(|c| c.name() == s).ok_or_else(|| {
            let names: Vec<&str> = CheckId::ALL.iter().map(|c| c.name()).collect();
            format!("unknown check {s}; expected one of {}", names.join(", "))
        })
    }
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub max_n: Option<usize>,
    pub seed: u64,
    pub jobs: Jobs,
    /// Directory of shipped fixtures for the format check.
    pub fixture_dir: PathBuf,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            max_n: None,
            seed: 0,
            jobs: Jobs::default(),
            fixture_dir: PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CheckSummary {
    pub check: CheckId,
    pub max_n: usize,
    /// Instances examined (graphs, cogs, request graphs or files).
    pub instances: usize,
    /// Individual comparisons made.
    pub checks: u64,
    pub violations: Vec<String>,
    pub elapsed: Duration,
}

impl CheckSummary {
    pub fn passed(&self) -> bool {
        self.violations.is_empty() && self.instances > 0
    }
}

/// Per-instance outcome: comparisons made and violations found.
#[derive(Default)]
struct Tally {
    checks: u64,
    violations: Vec<String>,
}

impl Tally {
    fn check(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.violations.push(msg());
        }
    }

    fn fail(&mut self, msg: String) {
        self.checks += 1;
        self.violations.push(msg);
    }
}

/// The internal catalog, built once per bound.
pub fn catalog(max_n: usize) -> Arc<Vec<PlaneGraph>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Vec<PlaneGraph>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(c) = cache.lock().expect("catalog cache").get(&max_n) {
        return c.clone();
    }
    let built = Arc::new(exhaustive_tfp(max_n));
    cache.lock().expect("catalog cache").entry(max_n).or_insert(built).clone()
}

pub fn run_check(id: CheckId, opts: &VerifyOptions) -> CheckSummary {
    let start = Instant::now();
    let max_n = opts.max_n.unwrap_or(id.default_max_n());
    let tallies: Vec<Tally> = match id {
        CheckId::Cycles => (3..=max_n).map(cycle_count).collect(),
        CheckId::Manycolor => sweep(&catalog(max_n), opts.jobs, manycolor),
        CheckId::Extension => sweep(&catalog(max_n), opts.jobs, extension),
        CheckId::Clebsch => {
            let mut t = vec![clebsch_parameters()];
            t.extend(sweep(&catalog(max_n), opts.jobs, clebsch_map));
            t
        }
        CheckId::Gadgets => {
            let seeds: Vec<u64> = (0..200).map(|i| opts.seed.wrapping_add(i)).collect();
            map_ordered(&seeds, opts.jobs, |&s| gadgets(s, max_n))
        }
        CheckId::Clones => {
            let seeds: Vec<u64> = (0..60).map(|i| opts.seed.wrapping_add(i)).collect();
            map_ordered(&seeds, opts.jobs, |&s| clones(s, max_n))
        }
        CheckId::Cogs => {
            let mut t = figure_cogs();
            let work: Vec<(usize, Vec<Vertex>)> = catalog(max_n)
                .iter()
                .enumerate()
                .flat_map(|(i, g)| p_choices(g).into_iter().map(move |p| (i, p)))
                .collect();
            let graphs = catalog(max_n);
            t.extend(map_ordered(&work, opts.jobs, |(i, p)| cog_family(&graphs[*i], p, opts.seed)));
            t
        }
        CheckId::Rearrange => {
            let mut t = rearrangements();
            let seeds: Vec<u64> = (0..1000).map(|i| opts.seed.wrapping_add(i)).collect();
            t.extend(map_ordered(&seeds, opts.jobs, |&s| kempe_involution(s, max_n)));
            t
        }
        CheckId::Decomposition => sweep(&catalog(max_n), opts.jobs, decomposition),
        CheckId::Formats => formats(&opts.fixture_dir),
    };
    let instances = tallies.len();
    let checks = tallies.iter().map(|t| t.checks).sum();
    let violations = tallies.into_iter().flat_map(|t| t.violations).collect();
    CheckSummary { check: id, max_n, instances, checks, violations, elapsed: start.elapsed() }
}

fn sweep(graphs: &[PlaneGraph], jobs: Jobs, f: fn(&PlaneGraph) -> Tally) -> Vec<Tally> {
    map_ordered(graphs, jobs, f)
}

fn describe(g: &PlaneGraph) -> String {
    format!("graph {:?}", g.rotations())
}

fn cycle_count(n: usize) -> Tally {
    let mut t = Tally::default();
    let expected = (1i128 << n) + if n % 2 == 0 { 2 } else { -2 };
    let got = count_colorings(&families::cycle(n), &Coloring::empty(n)).map(|c| c as i128);
    t.check(got == Ok(expected), || format!("C{n}: {got:?} colorings, expected {expected}"));
    t
}

fn manycolor(g: &PlaneGraph) -> Tally {
    let mut t = Tally::default();
    if g.vertex_count() < 3 {
        return t;
    }
    let n = g.vertex_count();
    let count = match count_colorings(g, &Coloring::empty(n)) {
        Ok(c) => c,
        Err(e) => {
            t.fail(format!("{}: {e}", describe(g)));
            return t;
        }
    };
    for phi in enumerate_colorings(g, &Coloring::empty(n), None).expect("no precoloring") {
        match manycolor_check_with_count(g, &phi, count) {
            Ok(c) => {
                t.check(c.ok, || format!("{}: {count} colorings below the bound for {:?}", describe(g), phi.colors()));
                t.check(c.components_ok, || format!("{}: too few components for {:?}", describe(g), phi.colors()));
            }
            Err(e) => t.fail(format!("{}: {e}", describe(g))),
        }
    }
    t
}

/// Each face bounded by a cycle of length at most 5 in turn becomes the
/// outer face, and every proper precoloring of it is extended.
fn extension(g: &PlaneGraph) -> Tally {
    let mut t = Tally::default();
    let n = g.vertex_count();
    t.check(matches!(find_coloring(g, &Coloring::empty(n)), Ok(Some(_))), || format!("{}: no 3-coloring", describe(g)));
    for f in g.faces() {
        if !f.is_cycle() || f.length > 5 {
            continue;
        }
        let h = g.with_outer_face(f.id).expect("existing face");
        let cycle = f.boundary.clone();
        for psi in cycle_precolorings(cycle.len()) {
            let pairs: Vec<(Vertex, Color)> = cycle.iter().copied().zip(psi.iter().copied()).collect();
            let pre = Coloring::from_pairs(n, &pairs).expect("in range");
            match extension_count_from_cycle(&h, &cycle, &pre) {
                Ok(r) => {
                    t.check(r.count >= 1, || format!("{}: {psi:?} on {cycle:?} does not extend", describe(g)));
                    let bare = n == cycle.len();
                    t.check(r.count >= 2 || bare || r.witness.is_some(), || {
                        format!("{}: single extension of {psi:?} without witness", describe(g))
                    });
                }
                Err(e) => t.fail(format!("{}: {psi:?} on {cycle:?}: {e}", describe(g))),
            }
        }
    }
    t
}

fn clebsch_parameters() -> Tally {
    let mut t = Tally::default();
    let c = build_clebsch();
    t.check(c.srg_parameters() == Some((16, 5, 0, 2)), || format!("parameters {:?}", c.srg_parameters()));
    t.check(c.triangle_count() == 0, || "Clebsch graph has a triangle".into());
    t
}

fn clebsch_map(g: &PlaneGraph) -> Tally {
    let mut t = Tally::default();
    let c = build_clebsch();
    match find_homomorphism(g) {
        Ok(h) => t.check(h.preserves_edges(g, &c), || format!("{}: map breaks an edge", describe(g))),
        Err(e) => t.fail(format!("{}: {e}", describe(g))),
    }
    match dist3_coloring(g) {
        Ok(d) => {
            let proper = g.edges().iter().all(|&(u, v)| d.colors[u] != d.colors[v]);
            t.check(proper, || format!("{}: 16-coloring not proper", describe(g)));
            let conflicts = dist3_conflicts(g, &d.colors);
            t.check(conflicts.is_empty(), || format!("{}: distance-3 conflict {:?}", describe(g), conflicts[0]));
            t.check(d.colors.iter().all(|&x| x < 16), || format!("{}: color out of range", describe(g)));
        }
        Err(e) => t.fail(format!("{}: {e}", describe(g))),
    }
    t
}

fn gadgets(seed: u64, max_n: usize) -> Tally {
    let mut t = Tally::default();
    let rg = random_request_graph(seed, max_n, 4);
    let base = match best_fraction(&rg) {
        Ok(r) => r.fraction,
        Err(e) => {
            t.fail(format!("seed {seed}: {e}"));
            return t;
        }
    };
    let eq = gadget_neq_to_eq(&rg);
    let variants = [
        ("neq_to_eq", eq.clone()),
        ("eq_to_neq", gadget_eq_to_neq(&rg)),
        ("integerize_and_clone", eq.and_then(|e| integerize_and_clone(&e))),
    ];
    for (name, v) in variants {
        match v.and_then(|h| best_fraction(&h)) {
            Ok(r) => t.check(r.fraction == base, || format!("seed {seed}: {name} gives {} instead of {base}", r.fraction)),
            Err(e) => t.fail(format!("seed {seed}: {name}: {e}")),
        }
    }
    t
}

fn clones(seed: u64, max_n: usize) -> Tally {
    let mut t = Tally::default();
    let rg = random_request_graph(seed, max_n, 3);
    let rg = if rg.r_neq().is_empty() { rg } else { gadget_neq_to_eq(&rg).expect("gadget") };
    for n in 1..=3 {
        match clone_explosion(&rg, n) {
            Ok(x) => {
                for row in &x.rows {
                    t.check(row.extensions == row.expected, || {
                        format!("seed {seed}, N = {n}: {} extensions, expected {}", row.extensions, row.expected)
                    });
                }
            }
            Err(e) => t.fail(format!("seed {seed}, N = {n}: {e}")),
        }
    }
    t
}

/// Every obstruction fixture has a precoloring of P that no coloring can
/// improve on.
fn figure_cogs() -> Vec<Tally> {
    cogs::ObstructionKind::ALL
        .into_iter()
        .map(|kind| {
            let mut t = Tally::default();
            let c = cogs::obstruction_fixture(kind);
            let zero = precolorings_of_p(&c)
                .into_iter()
                .any(|psi| best_demand_fraction(&c, &psi).is_ok_and(|r| r.fraction.is_zero()));
            t.check(zero, || format!("obstruction {kind:?} has no zero-fraction precoloring"));
            t
        })
        .collect()
}

/// P candidates: empty, one outer vertex, an outer edge or an outer path of
/// three vertices.
fn p_choices(g: &PlaneGraph) -> Vec<Vec<Vertex>> {
    let mut out = vec![Vec::new()];
    let outer = g.outer_vertices();
    out.extend(outer.iter().map(|&v| vec![v]));
    let edges: Vec<(Vertex, Vertex)> = g.edges().into_iter().filter(|&(a, b)| g.is_outer_edge(a, b)).collect();
    out.extend(edges.iter().map(|&(a, b)| vec![a, b]));
    for &b in &outer {
        let ends: Vec<Vertex> = g.neighbors(b).iter().copied().filter(|&a| g.is_outer_edge(a, b)).collect();
        for (i, &a) in ends.iter().enumerate() {
            for &c in &ends[i + 1..] {
                out.push(vec![a.min(c), b, a.max(c)]);
            }
        }
    }
    out
}

/// All role assignments of the outer vertices off P, with unit weights and
/// with seeded random weights, checked against both lemmas.
fn cog_family(g: &PlaneGraph, p: &[Vertex], seed: u64) -> Tally {
    let mut t = Tally::default();
    let free: Vec<Vertex> = g.outer_vertices().into_iter().filter(|v| !p.contains(v)).collect();
    let girth5 = g.girth().is_none_or(|x| x >= 5);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (g.vertex_count() as u64) << 32 ^ g.edge_count() as u64);
    for code in 0..3usize.pow(free.len() as u32) {
        let mut s = BTreeSet::new();
        let mut tt = BTreeSet::new();
        for (i, &v) in free.iter().enumerate() {
            match code / 3usize.pow(i as u32) % 3 {
                1 => {
                    s.insert(v);
                }
                2 => {
                    tt.insert(v);
                }
                _ => {}
            }
        }
        if s.iter().any(|&u| g.neighbors(u).iter().any(|x| s.contains(x))) {
            continue;
        }
        let random: BTreeMap<Vertex, Weight> =
            tt.iter().map(|&v| (v, Rational64::new(rng.gen_range(1..=6), rng.gen_range(1..=3)))).collect();
        for w in [BTreeMap::new(), random] {
            let c = Cog::new(g.clone(), p.to_vec(), s.clone(), tt.clone(), w).expect("catalog cog");
            check_cog(&c, girth5, &mut t);
        }
    }
    t
}

fn check_cog(c: &Cog, girth5: bool, t: &mut Tally) {
    let plane = validate_cog(c).is_plane_cog();
    if !plane {
        return;
    }
    let full = c.p.len() <= 2 && (c.p.len() <= 1 || c.p.iter().any(|&v| c.graph.neighbors(v).iter().all(|u| !c.s.contains(u))));
    let polished = girth5 && c.p.len() <= 3 && is_polished(c) && detect_obstructions(c).is_empty();
    let bound = match (polished, full) {
        (true, _) => AlphaLemma::Polished.bound(),
        (false, true) => AlphaLemma::Full.bound(),
        (false, false) => return,
    };
    for psi in precolorings_of_p(c) {
        match best_demand_fraction(c, &psi) {
            Ok(r) => t.check(r.fraction >= bound, || {
                format!("cog P={:?} S={:?} T={:?} on {}: psi {psi:?} reaches {} < {bound}", c.p, c.s, c.t, describe(&c.graph), r.fraction)
            }),
            Err(e) => t.fail(format!("cog P={:?} S={:?} T={:?} on {}: psi {psi:?}: {e}", c.p, c.s, c.t, describe(&c.graph))),
        }
    }
}

/// Rearrangement on suburb fixtures containing each configuration kind, for
/// every coloring in which the pair agrees.
fn rearrangements() -> Vec<Tally> {
    let cases: [(&[usize], ConfigKind); 3] = [
        (&[1, 2, 2, 3], ConfigKind::I),
        (&[3, 1, 2, 1, 2, 3], ConfigKind::II),
        (&[2, 1, 3, 2, 1, 3, 2, 1, 2], ConfigKind::III),
    ];
    cases
        .into_iter()
        .map(|(d, kind)| {
            let mut t = Tally::default();
            let (_, s) = suburb_from_sequence(d, false);
            let frame = s.frame();
            let Some(pair) = find_configurations(&s.graph, &frame).into_iter().find(|p| p.kind == kind) else {
                t.fail(format!("no configuration {kind:?} in {d:?}"));
                return t;
            };
            let n = s.graph.vertex_count();
            for phi in enumerate_colorings(&s.graph, &Coloring::empty(n), None).expect("no precoloring") {
                if phi.get(pair.x) != phi.get(pair.y) {
                    continue;
                }
                match rearrange(&s.graph, &phi, &pair) {
                    Ok(out) => {
                        t.check(out.is_proper(&s.graph), || format!("{kind:?}: improper result"));
                        t.check(frame.iter().all(|&v| out.get(v) == phi.get(v)), || format!("{kind:?}: frame changed"));
                        t.check(bichromatic_report(&s.graph, &out).q >= 1, || format!("{kind:?}: no bichromatic 4-face"));
                    }
                    Err(e) => t.fail(format!("{kind:?} on {:?}: {e}", phi.colors())),
                }
            }
            t
        })
        .collect()
}

fn kempe_involution(seed: u64, max_n: usize) -> Tally {
    let mut t = Tally::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(4..=max_n.max(4));
    let g = random_tfp(rng.gen(), n);
    let sample: Vec<Coloring> = enumerate_colorings(&g, &Coloring::empty(n), Some(64)).expect("no precoloring").collect();
    let phi = &sample[rng.gen_range(0..sample.len())];
    let pair = COLOR_PAIRS[rng.gen_range(0..3)];
    let comps = kempe_components(&g, phi, pair.0, pair.1);
    if comps.is_empty() {
        return t;
    }
    let k = rng.gen_range(0..comps.len());
    let once = kempe_swap(&g, phi, pair, k).expect("component exists");
    t.check(once.is_proper(&g), || format!("seed {seed}: swap is improper"));
    // The swapped component is again a component, at the same index.
    let twice = kempe_swap(&g, &once, pair, k).expect("component exists");
    t.check(&twice == phi, || format!("seed {seed}: swapping twice changed the coloring"));
    t
}

fn decomposition(g: &PlaneGraph) -> Tally {
    let mut t = Tally::default();
    let d = build_decomposition(g);
    for v in d.violations() {
        t.fail(format!("{}: {v}", describe(g)));
    }
    t.checks += 1;
    if let Err(e) = d.classify_all(Jobs::Sequential) {
        t.fail(format!("{}: {e}", describe(g)));
    }
    t.checks += 1;
    let uncovered = d.uncovered_five_cycle_vertices();
    t.check(uncovered.is_empty(), || format!("{}: vertices {uncovered:?} neither caught nor on a 5-face", describe(g)));
    let mut covered = d.caught_vertices();
    covered.extend(five_face_vertices(g));
    let s5 = g.faces().iter().filter(|f| f.length == 5).count();
    t.check(covered.len() <= 5 * (d.node_count() + s5), || {
        format!("{}: {} covered vertices exceed 5({} + {s5})", describe(g), covered.len(), d.node_count())
    });
    t
}

/// Re-emits every fixture file and compares bytes.
fn formats(dir: &PathBuf) -> Vec<Tally> {
    let mut names: Vec<PathBuf> = match std::fs::read_dir(dir) {
        Ok(rd) => rd.filter_map(|e| e.ok().map(|e| e.path())).collect(),
        Err(e) => {
            let mut t = Tally::default();
            t.fail(format!("{}: {e}", dir.display()));
            return vec![t];
        }
    };
    names.sort();
    names
        .into_iter()
        .filter_map(|path| {
            let ext = path.extension()?.to_str()?.to_string();
            let bytes = std::fs::read(&path).ok()?;
            let mut t = Tally::default();
            let again = match ext.as_str() {
                "json" => std::str::from_utf8(&bytes)
                    .map_err(|e| e.to_string())
                    .and_then(|s| parse_json_document(s).map_err(|e| e.to_string()))
                    .map(|i| emit_json_document(&i).into_bytes()),
                "pc" => parse_planar_code(&bytes)
                    .and_then(|g| emit_planar_code(&g))
                    .map_err(|e| e.to_string()),
                _ => return None,
            };
            match again {
                Ok(b) => t.check(b == bytes, || format!("{}: re-emission differs", path.display())),
                Err(e) => t.fail(format!("{}: {e}", path.display())),
            }
            Some(t)
        })
        .collect()
}
