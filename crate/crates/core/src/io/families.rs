//! Named instance families, including one fixture per figure.

use std::collections::{BTreeMap, BTreeSet};
use std::str::FromStr;

use serde_json::json;

use crate::cogs::{figure4_fixture, obstruction_fixture, ObstructionKind};
use crate::decomposition::{figure2_cycles, figure2_graph};
use crate::generate::{self, drawn, families as fam};
use crate::requests::{gadget_eq_to_neq, gadget_neq_to_eq, RequestGraph};

use super::{Instance, IoError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Cycle,
    Path,
    Grid,
    Theta,
    Cube,
    Figure1a,
    Figure1b,
    Figure2,
    Figure3(ObstructionKind),
    Figure4,
    RandomTfp,
    ExhaustiveTfp,
}

impl Family {
    pub const NAMES: [&'static str; 15] = [
        "cycle",
        "path",
        "grid",
        "theta",
        "cube",
        "figure1a",
        "figure1b",
        "figure2",
        "figure3a",
        "figure3b",
        "figure3c",
        "figure3d",
        "figure4",
        "random_tfp",
        "exhaustive_tfp",
    ];

    /// Families that need no parameters.
    pub const FIXED: [&'static str; 10] =
        ["cube", "figure1a", "figure1b", "figure2", "figure3a", "figure3b", "figure3c", "figure3d", "figure4", "exhaustive_tfp"];
}

impl FromStr for Family {
    type Err = IoError;

    fn from_str(s: &str) -> Result<Self, IoError> {
        Ok(match s {
            "cycle" => Family::Cycle,
            "path" => Family::Path,
            "grid" => Family::Grid,
            "theta" => Family::Theta,
            "cube" => Family::Cube,
            "figure1a" => Family::Figure1a,
            "figure1b" => Family::Figure1b,
            "figure2" => Family::Figure2,
            "figure3a" => Family::Figure3(ObstructionKind::A),
            "figure3b" => Family::Figure3(ObstructionKind::B),
            "figure3c" => Family::Figure3(ObstructionKind::C),
            "figure3d" => Family::Figure3(ObstructionKind::D),
            "figure4" => Family::Figure4,
            "random_tfp" => Family::RandomTfp,
            "exhaustive_tfp" => Family::ExhaustiveTfp,
            _ => return Err(IoError::BadParams(format!("unknown family {s}"))),
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GenParams {
    pub n: Option<usize>,
    pub rows: Option<usize>,
    pub cols: Option<usize>,
    /// Path lengths of a theta graph.
    pub lengths: Option<Vec<usize>>,
    pub seed: Option<u64>,
    pub max_n: Option<usize>,
}

fn need<T: Copy>(v: Option<T>, name: &str) -> Result<T, IoError> {
    v.ok_or_else(|| IoError::BadParams(format!("missing --{name}")))
}

/// Largest catalog bound generated internally.
pub const MAX_INTERNAL_N: usize = 9;

pub fn generate(family: Family, params: &GenParams) -> Result<Vec<Instance>, IoError> {
    let bad = |m: &str| Err(IoError::BadParams(m.to_string()));
    let one = |g, name: &str| vec![Instance::from_graph(g).with_meta("family", name)];
    Ok(match family {
        Family::Cycle => {
            let n = need(params.n, "n")?;
            if n < 3 {
                return bad("a cycle needs n >= 3");
            }
            one(fam::cycle(n), "cycle")
        }
        Family::Path => {
            let n = need(params.n, "n")?;
            if n < 1 {
                return bad("a path needs n >= 1");
            }
            one(fam::path(n), "path")
        }
        Family::Grid => {
            let (r, c) = (need(params.rows, "rows")?, need(params.cols, "cols")?);
            if r < 1 || c < 1 {
                return bad("a grid needs rows, cols >= 1");
            }
            one(fam::grid(r, c), "grid")
        }
        Family::Theta => {
            let l = params.lengths.clone().ok_or_else(|| IoError::BadParams("missing --lengths".into()))?;
            let g = match l[..] {
                [a, b, c] => fam::theta(a, b, c),
                _ => None,
            };
            match g {
                Some(g) => one(g, "theta"),
                None => return bad("theta needs three path lengths, each at least 2"),
            }
        }
        Family::Cube => one(fam::cube(), "cube"),
        Family::Figure1a => gadget_pair(true),
        Family::Figure1b => gadget_pair(false),
        Family::Figure2 => {
            let cycles = figure2_cycles();
            one(figure2_graph(), "figure2").into_iter().map(|i| i.with_meta("tree_cycles", json!(cycles))).collect()
        }
        Family::Figure3(kind) => {
            let name = format!("figure3{}", format!("{kind:?}").to_lowercase());
            vec![Instance::from_cog(&obstruction_fixture(kind)).with_meta("family", name)]
        }
        Family::Figure4 => vec![Instance::from_cog(&figure4_fixture()).with_meta("family", "figure4")],
        Family::RandomTfp => {
            let n = need(params.n, "n")?;
            let seed = need(params.seed, "seed")?;
            if n < 1 {
                return bad("random_tfp needs n >= 1");
            }
            vec![Instance::from_graph(generate::random_tfp(seed, n))
                .with_meta("family", "random_tfp")
                .with_meta("seed", seed)]
        }
        Family::ExhaustiveTfp => {
            let max_n = params.max_n.unwrap_or(7);
            if max_n > MAX_INTERNAL_N {
                return bad("exhaustive_tfp is internal up to 9 vertices; read larger catalogs from planar_code");
            }
            generate::exhaustive_tfp(max_n)
                .into_iter()
                .map(|g| Instance::from_graph(g).with_meta("family", "exhaustive_tfp"))
                .collect()
        }
    })
}

/// The request `t - r - b` before and after its gadget replacement.
fn gadget_pair(neq: bool) -> Vec<Instance> {
    let g = drawn(&[(0.0, 2.0), (0.0, 0.5), (0.0, -1.0)], &[(0, 1), (1, 2)]);
    let (eq, ne) = if neq { (BTreeSet::new(), BTreeSet::from([1])) } else { (BTreeSet::from([1]), BTreeSet::new()) };
    let before = RequestGraph::new(g, eq, ne, BTreeMap::new()).expect("single request");
    let after = if neq { gadget_neq_to_eq(&before) } else { gadget_eq_to_neq(&before) }.expect("gadget");
    let name = if neq { "figure1a" } else { "figure1b" };
    vec![
        Instance::from_request_graph(&before).with_meta("family", name).with_meta("stage", "before"),
        Instance::from_request_graph(&after).with_meta("family", name).with_meta("stage", "after"),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cogs::validate_cog;

    #[test]
    fn every_family_builds_valid_instances() {
        let params = GenParams {
            n: Some(5),
            rows: Some(3),
            cols: Some(4),
            lengths: Some(vec![2, 3, 4]),
            seed: Some(7),
            max_n: Some(5),
        };
        for name in Family::NAMES {
            let fam: Family = name.parse().unwrap();
            let out = generate(fam, &params).unwrap();
            assert!(!out.is_empty(), "{name}");
            for inst in &out {
                if inst.has_requests() {
                    inst.request_graph().unwrap();
                }
                if let Some(c) = inst.cog().unwrap() {
                    assert!(validate_cog(&c).is_plane_cog(), "{name}");
                }
            }
        }
        assert!("nope".parse::<Family>().is_err());
    }

    #[test]
    fn examples() {
        let c5 = generate(Family::Cycle, &GenParams { n: Some(5), ..Default::default() }).unwrap();
        assert_eq!(c5[0].graph.vertex_count(), 5);
        assert_eq!(c5[0].graph.edge_count(), 5);
        let a = generate(Family::Figure3(ObstructionKind::A), &GenParams::default()).unwrap();
        let roles = a[0].cog.as_ref().unwrap();
        assert_eq!(roles.p, vec![0, 1]);
        assert_eq!(roles.s, BTreeSet::from([2, 4]));
        assert_eq!(roles.t, BTreeSet::from([3]));
        let p = GenParams { n: Some(12), seed: Some(7), ..Default::default() };
        assert_eq!(generate(Family::RandomTfp, &p).unwrap(), generate(Family::RandomTfp, &p).unwrap());
        let fig1a = generate(Family::Figure1a, &GenParams::default()).unwrap();
        assert_eq!(fig1a[1].graph.vertex_count(), 4);
        let fig1b = generate(Family::Figure1b, &GenParams::default()).unwrap();
        assert_eq!(fig1b[1].graph.vertex_count(), 5);
    }

    #[test]
    fn bad_params() {
        assert!(matches!(generate(Family::Cycle, &GenParams::default()), Err(IoError::BadParams(_))));
        assert!(matches!(generate(Family::Cycle, &GenParams { n: Some(2), ..Default::default() }), Err(IoError::BadParams(_))));
        let t = GenParams { lengths: Some(vec![1, 2, 2]), ..Default::default() };
        assert!(matches!(generate(Family::Theta, &t), Err(IoError::BadParams(_))));
        let big = GenParams { max_n: Some(12), ..Default::default() };
        assert!(matches!(generate(Family::ExhaustiveTfp, &big), Err(IoError::BadParams(_))));
    }
}
