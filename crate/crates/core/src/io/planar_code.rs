//! The `planar_code` format: a header, then per graph the vertex count and
//! each vertex's clockwise neighbors (1-based), closed by a 0.

use crate::plane_graph::{OuterFace, PlaneGraph};

use super::IoError;

pub const HEADER: &[u8] = b">>planar_code<<";

pub fn parse_planar_code(bytes: &[u8]) -> Result<Vec<PlaneGraph>, IoError> {
    let body = bytes.strip_prefix(HEADER).ok_or(IoError::BadHeader)?;
    let mut out = Vec::new();
    let mut i = 0;
    let next = |i: &mut usize| -> Result<u8, IoError> {
        let b = *body.get(*i).ok_or(IoError::Truncated)?;
        *i += 1;
        Ok(b)
    };
    while i < body.len() {
        let n = next(&mut i)? as usize;
        if n == 0 {
            return Err(IoError::Unsupported("two-byte planar_code entries".into()));
        }
        let mut rotations = Vec::with_capacity(n);
        for _ in 0..n {
            let mut rot = Vec::new();
            loop {
                let id = next(&mut i)? as usize;
                if id == 0 {
                    break;
                }
                if id > n {
                    return Err(IoError::IdOutOfRange(id));
                }
                rot.push(id - 1);
            }
            rotations.push(rot);
        }
        out.push(PlaneGraph::new(rotations, OuterFace::Default)?);
    }
    Ok(out)
}

pub fn emit_planar_code(graphs: &[PlaneGraph]) -> Result<Vec<u8>, IoError> {
    let mut out = HEADER.to_vec();
    for g in graphs {
        let n = g.vertex_count();
        if n == 0 || n > 255 {
            return Err(IoError::Unsupported(format!("{n} vertices")));
        }
        out.push(n as u8);
        for rot in g.rotations() {
            out.extend(rot.iter().map(|&u| (u + 1) as u8));
            out.push(0);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{exhaustive_tfp, families};

    #[test]
    fn triangle() {
        let mut bytes = HEADER.to_vec();
        bytes.extend([3, 2, 3, 0, 3, 1, 0, 1, 2, 0]);
        let gs = parse_planar_code(&bytes).unwrap();
        assert_eq!(gs.len(), 1);
        assert_eq!(gs[0].vertex_count(), 3);
        assert_eq!(gs[0].edge_count(), 3);
        assert_eq!(emit_planar_code(&gs).unwrap(), bytes);
    }

    #[test]
    fn errors() {
        assert!(matches!(parse_planar_code(b"planar_code"), Err(IoError::BadHeader)));
        let mut bytes = HEADER.to_vec();
        bytes.extend([3, 2, 3, 0, 3]);
        assert!(matches!(parse_planar_code(&bytes), Err(IoError::Truncated)));
        let mut bytes = HEADER.to_vec();
        bytes.extend([2, 5, 0, 1, 0]);
        assert!(matches!(parse_planar_code(&bytes), Err(IoError::IdOutOfRange(5))));
        assert!(parse_planar_code(HEADER).unwrap().is_empty());
    }

    #[test]
    fn catalog_round_trip() {
        let mut gs = exhaustive_tfp(7);
        gs.push(families::grid(3, 4));
        let bytes = emit_planar_code(&gs).unwrap();
        let back = parse_planar_code(&bytes).unwrap();
        assert_eq!(back.len(), gs.len());
        for (a, b) in gs.iter().zip(&back) {
            assert_eq!(a.rotations(), b.rotations());
        }
        assert_eq!(emit_planar_code(&back).unwrap(), bytes);
    }
}
