use std::io::{BufRead, Write};
use std::path::Path;

use crate::error::{Result, SvemError};
use crate::mesh::SurfaceMesh;
use crate::scalar::Real;

pub fn write_off<T: Real, W: Write>(mesh: &SurfaceMesh<T>, mut w: W) -> Result<()> {
    writeln!(w, "OFF")?;
    writeln!(w, "{} {} 0", mesh.n_vertices(), mesh.n_faces())?;
    for v in mesh.vertices() {
        writeln!(w, "{:.16e} {:.16e} {:.16e}", v[0].as_f64(), v[1].as_f64(), v[2].as_f64())?;
    }
    for f in mesh.faces() {
        write!(w, "{}", f.len())?;
        for i in f {
            write!(w, " {i}")?;
        }
        writeln!(w)?;
    }
    w.flush()?;
    Ok(())
}

pub fn save_off<T: Real>(mesh: &SurfaceMesh<T>, path: impl AsRef<Path>) -> Result<()> {
    let f = std::fs::File::create(path)?;
    write_off(mesh, std::io::BufWriter::new(f))
}

fn parse_err(line: usize, msg: impl Into<String>) -> SvemError {
    SvemError::Parse { line, msg: msg.into() }
}

fn num<N: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<N> {
    let t = tok.ok_or_else(|| parse_err(line, format!("missing {what}")))?;
    t.parse().map_err(|_| parse_err(line, format!("invalid {what} '{t}'")))
}

/// Reads an OFF mesh. `#` comments and blank lines are ignored; extra
/// tokens after a face (colors) are ignored.
pub fn read_off<T: Real, R: BufRead>(r: R) -> Result<SurfaceMesh<T>> {
    let mut lines = Vec::new();
    for (i, l) in r.lines().enumerate() {
        let l = l?;
        let body = l.split('#').next().unwrap_or("").trim().to_string();
        if !body.is_empty() {
            lines.push((i + 1, body));
        }
    }
    let mut it = lines.into_iter();
    let (ln, first) = it.next().ok_or_else(|| parse_err(1, "empty file"))?;
    let mut header = first.as_str();
    if let Some(rest) = header.strip_prefix("OFF") {
        header = rest.trim();
    } else {
        return Err(parse_err(ln, "expected 'OFF' header"));
    }
    let (ln, counts) = if header.is_empty() {
        it.next().ok_or_else(|| parse_err(ln + 1, "missing counts line"))?
    } else {
        (ln, header.to_string())
    };
    let mut toks = counts.split_whitespace();
    let nv: usize = num(toks.next(), ln, "vertex count")?;
    let nf: usize = num(toks.next(), ln, "face count")?;

    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (ln, l) = it.next().ok_or_else(|| parse_err(ln, "unexpected end of file in vertex list"))?;
        let mut t = l.split_whitespace();
        let mut p = [T::zero(); 3];
        for c in &mut p {
            let v: f64 = num(t.next(), ln, "coordinate")?;
            if !v.is_finite() {
                return Err(parse_err(ln, "non-finite coordinate"));
            }
            *c = T::lit(v);
        }
        vertices.push(p);
    }
    let mut faces = Vec::with_capacity(nf);
    for _ in 0..nf {
        let (ln, l) = it.next().ok_or_else(|| parse_err(ln, "unexpected end of file in face list"))?;
        let mut t = l.split_whitespace();
        let k: usize = num(t.next(), ln, "face size")?;
        let mut f = Vec::with_capacity(k);
        for _ in 0..k {
            let i: usize = num(t.next(), ln, "vertex index")?;
            if i >= nv {
                return Err(parse_err(ln, format!("vertex index {i} out of range")));
            }
            f.push(i);
        }
        faces.push(f);
    }
    SurfaceMesh::new(vertices, faces)
}

pub fn load_off<T: Real>(path: impl AsRef<Path>) -> Result<SurfaceMesh<T>> {
    let f = std::fs::File::open(path)?;
    read_off(std::io::BufReader::new(f))
}
