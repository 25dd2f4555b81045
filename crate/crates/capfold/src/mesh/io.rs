//! OFF and OBJ reading and writing (triangles only).

use std::fmt::Write as _;
use std::path::Path;

use crate::geom::{signed_area, Vec3};

use super::{ConvexCap, MeshError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshFormat {
    Off,
    Obj,
}

impl MeshFormat {
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "off" => Some(MeshFormat::Off),
            "obj" => Some(MeshFormat::Obj),
            _ => None,
        }
    }
}

#[derive(thiserror::Error, Debug)]
pub enum IoError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("face {face} has {count} vertices; only triangles are supported")]
    NonTriangle { face: usize, count: usize },
    #[error("unknown mesh format for {0}")]
    UnknownFormat(String),
    #[error(transparent)]
    Mesh(#[from] MeshError),
}

fn perr(line: usize, msg: impl Into<String>) -> IoError {
    IoError::Parse { line, msg: msg.into() }
}

/// Meaningful lines with their 1-based numbers, comments stripped.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then_some((i + 1, l))
    })
}

fn parse_f64(tok: &str, line: usize) -> Result<f64, IoError> {
    tok.parse::<f64>().map_err(|_| perr(line, format!("bad number {tok:?}")))
}

/// Parses an OFF document into raw vertices and triangles.
pub fn parse_off(text: &str) -> Result<(Vec<Vec3>, Vec<[usize; 3]>), IoError> {
    let mut tokens: Vec<(usize, &str)> = Vec::new();
    for (ln, l) in content_lines(text) {
        tokens.extend(l.split_whitespace().map(|t| (ln, t)));
    }
    let mut it = tokens.into_iter().peekable();
    match it.next() {
        Some((_, "OFF")) => {}
        Some((ln, t)) => return Err(perr(ln, format!("expected OFF header, found {t:?}"))),
        None => return Err(perr(1, "empty file")),
    }
    let mut count = |what: &str| -> Result<usize, IoError> {
        let (ln, t) = it.next().ok_or_else(|| perr(0, format!("missing {what} count")))?;
        t.parse::<usize>().map_err(|_| perr(ln, format!("bad {what} count {t:?}")))
    };
    let nv = count("vertex")?;
    let nf = count("face")?;
    let _ne = count("edge")?;
    let mut verts = Vec::with_capacity(nv);
    for _ in 0..nv {
        let mut c = [0.0; 3];
        for x in &mut c {
            let (ln, t) = it.next().ok_or_else(|| perr(0, "truncated vertex list"))?;
            *x = parse_f64(t, ln)?;
        }
        verts.push(Vec3::new(c[0], c[1], c[2]));
    }
    let mut faces = Vec::with_capacity(nf);
    for f in 0..nf {
        let (ln, t) = it.next().ok_or_else(|| perr(0, "truncated face list"))?;
        let k = t.parse::<usize>().map_err(|_| perr(ln, format!("bad face size {t:?}")))?;
        if k != 3 {
            return Err(IoError::NonTriangle { face: f, count: k });
        }
        let mut idx = [0usize; 3];
        for i in &mut idx {
            let (ln, t) = it.next().ok_or_else(|| perr(0, "truncated face"))?;
            *i = t.parse::<usize>().map_err(|_| perr(ln, format!("bad index {t:?}")))?;
        }
        // Skip optional per-face color values on the same line.
        while let Some(&(l2, _)) = it.peek() {
            if l2 == ln {
                it.next();
            } else {
                break;
            }
        }
        faces.push(idx);
    }
    Ok((verts, faces))
}

/// Parses an OBJ document (`v` and `f` records) into raw vertices and triangles.
pub fn parse_obj(text: &str) -> Result<(Vec<Vec3>, Vec<[usize; 3]>), IoError> {
    let mut verts = Vec::new();
    let mut faces = Vec::new();
    for (ln, l) in content_lines(text) {
        let mut parts = l.split_whitespace();
        match parts.next() {
            Some("v") => {
                let c: Vec<f64> = parts.take(3).map(|t| parse_f64(t, ln)).collect::<Result<_, _>>()?;
                if c.len() != 3 {
                    return Err(perr(ln, "vertex needs three coordinates"));
                }
                verts.push(Vec3::new(c[0], c[1], c[2]));
            }
            Some("f") => {
                let idx: Vec<&str> = parts.collect();
                if idx.len() != 3 {
                    return Err(IoError::NonTriangle { face: faces.len(), count: idx.len() });
                }
                let mut t = [0usize; 3];
                for (slot, tok) in t.iter_mut().zip(idx) {
                    let head = tok.split('/').next().unwrap_or("");
                    let i: i64 = head.parse().map_err(|_| perr(ln, format!("bad index {tok:?}")))?;
                    let abs = if i < 0 { verts.len() as i64 + i } else { i - 1 };
                    if abs < 0 {
                        return Err(perr(ln, format!("index {i} out of range")));
                    }
                    *slot = abs as usize;
                }
                faces.push(t);
            }
            _ => {}
        }
    }
    Ok((verts, faces))
}

/// Builds a cap from raw data, flipping all triangles if they are listed
/// clockwise as seen from above.
pub fn cap_from_raw(verts: Vec<Vec3>, mut faces: Vec<[usize; 3]>) -> Result<ConvexCap, IoError> {
    let n = verts.len();
    let area: f64 = faces
        .iter()
        .filter(|t| t.iter().all(|&i| i < n))
        .map(|t| signed_area(verts[t[0]].xy(), verts[t[1]].xy(), verts[t[2]].xy()))
        .sum();
    if area < 0.0 {
        for t in &mut faces {
            t.swap(1, 2);
        }
    }
    Ok(ConvexCap::new(verts, faces)?)
}

pub fn read_cap(path: &Path) -> Result<ConvexCap, IoError> {
    let fmt = MeshFormat::from_path(path)
        .ok_or_else(|| IoError::UnknownFormat(path.display().to_string()))?;
    let text = std::fs::read_to_string(path)?;
    let (v, f) = match fmt {
        MeshFormat::Off => parse_off(&text)?,
        MeshFormat::Obj => parse_obj(&text)?,
    };
    cap_from_raw(v, f)
}

/// OFF text of the cap; `tagged` edges are listed in `# forest-edge a b` comments.
pub fn to_off(cap: &ConvexCap, tagged: &[(usize, usize)]) -> String {
    let mut s = String::from("OFF\n");
    for &(a, b) in tagged {
        let _ = writeln!(s, "# forest-edge {a} {b}");
    }
    let _ = writeln!(s, "{} {} {}", cap.num_vertices(), cap.num_faces(), cap.edges().len());
    for p in cap.vertices() {
        let _ = writeln!(s, "{:?} {:?} {:?}", p.x, p.y, p.z);
    }
    for t in cap.triangles() {
        let _ = writeln!(s, "3 {} {} {}", t[0], t[1], t[2]);
    }
    s
}

/// OBJ text of the cap; `tagged` edges are listed in `# forest-edge a b`
/// comments (1-based, like the face records).
pub fn to_obj(cap: &ConvexCap, tagged: &[(usize, usize)]) -> String {
    let mut s = String::new();
    for &(a, b) in tagged {
        let _ = writeln!(s, "# forest-edge {} {}", a + 1, b + 1);
    }
    for p in cap.vertices() {
        let _ = writeln!(s, "v {:?} {:?} {:?}", p.x, p.y, p.z);
    }
    for t in cap.triangles() {
        let _ = writeln!(s, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1);
    }
    s
}

pub fn write_cap(cap: &ConvexCap, path: &Path, tagged: &[(usize, usize)]) -> Result<(), IoError> {
    let text = match MeshFormat::from_path(path) {
        Some(MeshFormat::Off) => to_off(cap, tagged),
        Some(MeshFormat::Obj) => to_obj(cap, tagged),
        None => return Err(IoError::UnknownFormat(path.display().to_string())),
    };
    std::fs::write(path, text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn off_round_trip_is_exact() {
        let cap = fixtures::icosahedron_cap();
        let text = to_off(&cap, &[(0, 1)]);
        assert!(text.contains("# forest-edge 0 1"));
        let (v, f) = parse_off(&text).unwrap();
        let back = cap_from_raw(v, f).unwrap();
        assert_eq!(back.vertices(), cap.vertices());
        assert_eq!(back.triangles(), cap.triangles());
    }

    #[test]
    fn obj_round_trip_is_exact() {
        let cap = fixtures::flat_hex_cap();
        let (v, f) = parse_obj(&to_obj(&cap, &[])).unwrap();
        let back = cap_from_raw(v, f).unwrap();
        assert_eq!(back.vertices(), cap.vertices());
        assert_eq!(back.triangles(), cap.triangles());
    }

    #[test]
    fn quad_rejected_with_index() {
        let text = "OFF\n4 2 0\n0 0 0\n1 0 0\n1 1 0\n0 1 0\n3 0 1 2\n4 0 1 2 3\n";
        assert!(matches!(parse_off(text), Err(IoError::NonTriangle { face: 1, count: 4 })));
        let obj = "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n";
        assert!(matches!(parse_obj(obj), Err(IoError::NonTriangle { face: 0, count: 4 })));
    }

    #[test]
    fn clockwise_input_is_normalized() {
        let text = "OFF\n3 1 3\n0 0 0\n0 1 0\n1 0 0\n3 0 1 2\n";
        let (v, f) = parse_off(text).unwrap();
        let cap = cap_from_raw(v, f).unwrap();
        assert_eq!(cap.triangles()[0], [0, 2, 1]);
    }

    #[test]
    fn obj_slashes_and_negative_indices() {
        let obj = "# c\nv 0 0 0\nv 1 0 0\nv 0 1 0\nf 1/1/1 2//2 -1\n";
        let (_, f) = parse_obj(obj).unwrap();
        assert_eq!(f, vec![[0, 1, 2]]);
    }

    #[test]
    fn bad_header() {
        assert!(matches!(parse_off("PLY\n"), Err(IoError::Parse { .. })));
    }
}
