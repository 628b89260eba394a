//! The shipped fixture files are exactly what the generators produce.
//! Run with `TFP_BLESS=1` to rewrite them.

use std::path::PathBuf;

use tfp_core::io::{emit_json_document, emit_planar_code, generate, Family, GenParams};

fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn expected() -> Vec<(String, Vec<u8>)> {
    let p = |n: Option<usize>| GenParams { n, ..Default::default() };
    let json = |name: &str, fam: &str, params: GenParams| {
        let inst = generate(fam.parse::<Family>().unwrap(), &params).unwrap();
        (format!("{name}.json"), emit_json_document(&inst).into_bytes())
    };
    let mut out = vec![
        json("c5", "cycle", p(Some(5))),
        json("c6", "cycle", p(Some(6))),
        json("p4", "path", p(Some(4))),
        json("grid_3x4", "grid", GenParams { rows: Some(3), cols: Some(4), ..Default::default() }),
        json("theta_2_3_4", "theta", GenParams { lengths: Some(vec![2, 3, 4]), ..Default::default() }),
        json("random_tfp_s7_n12", "random_tfp", GenParams { n: Some(12), seed: Some(7), ..Default::default() }),
    ];
    for name in ["cube", "figure1a", "figure1b", "figure2", "figure3a", "figure3b", "figure3c", "figure3d", "figure4"] {
        out.push(json(name, name, GenParams::default()));
    }
    let catalog = generate(Family::ExhaustiveTfp, &GenParams { max_n: Some(7), ..Default::default() }).unwrap();
    let graphs: Vec<_> = catalog.into_iter().map(|i| i.graph).collect();
    out.push(("catalog_n7.pc".to_string(), emit_planar_code(&graphs).unwrap()));
    out
}

#[test]
fn fixtures_match_generators() {
    let dir = fixture_dir();
    let bless = std::env::var_os("TFP_BLESS").is_some();
    for (name, bytes) in expected() {
        let path = dir.join(&name);
        if bless {
            std::fs::create_dir_all(&dir).unwrap();
            std::fs::write(&path, &bytes).unwrap();
            continue;
        }
        let on_disk = std::fs::read(&path).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert!(on_disk == bytes, "{name} is stale; rerun with TFP_BLESS=1");
    }
}
