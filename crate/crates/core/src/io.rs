//! File formats: fields and meshes as CSV, reports as JSON with sorted keys.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{Axis, GridSpec, ScalarField};
use crate::oracle::InterfaceMesh;
use crate::real::Real;

/// Shortest round-trip decimal; exponent form for very large or small magnitudes.
pub fn format_value<T: Real>(v: T) -> String {
    let a = v.abs();
    if a != T::zero() && a.is_finite() && (a >= T::lit(1e16) || a < T::lit(1e-5)) {
        format!("{v:e}")
    } else {
        format!("{v}")
    }
}

fn join<T: Real>(vals: impl IntoIterator<Item = T>) -> String {
    let mut s = String::new();
    for (i, v) in vals.into_iter().enumerate() {
        if i > 0 {
            s.push(',');
        }
        s.push_str(&format_value(v));
    }
    s
}

/// `# dim,nx[,ny],xmin,xmax[,ymin,ymax]`, then one row of values per grid line.
pub fn field_to_csv<T: Real>(field: &ScalarField<T>) -> String {
    let g = field.grid();
    let mut out = String::new();
    let mut header = vec![g.dim().to_string()];
    header.extend(g.axes().iter().map(|a| a.points.to_string()));
    for a in g.axes() {
        header.push(format_value(a.min));
        header.push(format_value(a.max));
    }
    let _ = writeln!(out, "# {}", header.join(","));
    let nx = g.points(0);
    for row in field.values().chunks(nx) {
        let _ = writeln!(out, "{}", join(row.iter().copied()));
    }
    out
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

fn parse_num<T: Real>(s: &str, line: usize) -> Result<T> {
    s.trim().parse::<T>().map_err(|_| parse_err(line, format!("'{}' is not a number", s.trim())))
}

pub fn field_from_csv<T: Real>(text: &str) -> Result<ScalarField<T>> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l)).filter(|(_, l)| !l.trim().is_empty());
    let (hl, header) = lines.next().ok_or_else(|| parse_err(1, "empty file"))?;
    let body = header.trim().strip_prefix('#').ok_or_else(|| parse_err(hl, "header must start with '#'"))?;
    let parts: Vec<&str> = body.split(',').map(str::trim).collect();
    let dim: usize = parts[0].parse().map_err(|_| parse_err(hl, format!("bad dimension '{}'", parts[0])))?;
    let expect = match dim {
        1 => 4,
        2 => 7,
        _ => return Err(parse_err(hl, format!("dimension {dim} is not 1 or 2"))),
    };
    if parts.len() != expect {
        return Err(parse_err(hl, format!("header has {} fields, expected {expect}", parts.len())));
    }
    let counts: Vec<usize> = parts[1..=dim]
        .iter()
        .map(|p| p.parse().map_err(|_| parse_err(hl, format!("bad point count '{p}'"))))
        .collect::<Result<_>>()?;
    let bounds: Vec<T> = parts[dim + 1..].iter().map(|p| parse_num(p, hl)).collect::<Result<_>>()?;
    let axes = (0..dim).map(|a| Axis::new(bounds[2 * a], bounds[2 * a + 1], counts[a])).collect();
    let grid = GridSpec::from_axes(axes).map_err(|e| parse_err(hl, e.to_string()))?;
    let nx = grid.points(0);
    let rows = grid.len() / nx;
    let mut values = Vec::with_capacity(grid.len());
    let mut seen = 0;
    for (ln, line) in lines {
        seen += 1;
        if seen > rows {
            return Err(parse_err(ln, format!("more than the {rows} rows announced in the header")));
        }
        let row: Vec<&str> = line.split(',').collect();
        if row.len() != nx {
            return Err(parse_err(ln, format!("row {seen} has {} values, expected {nx}", row.len())));
        }
        for v in row {
            values.push(parse_num(v, ln)?);
        }
    }
    if seen < rows {
        return Err(parse_err(text.lines().count() + 1, format!("{seen} rows, expected {rows}")));
    }
    ScalarField::new(grid, values)
}

pub fn write_field_csv<T: Real>(field: &ScalarField<T>, path: &Path) -> Result<()> {
    fs::write(path, field_to_csv(field))?;
    Ok(())
}

pub fn read_field_csv<T: Real>(path: &Path) -> Result<ScalarField<T>> {
    field_from_csv(&fs::read_to_string(path)?)
}

/// One segment per line, `x0,y0,x1,y1`.
pub fn mesh_to_csv<T: Real>(mesh: &InterfaceMesh<T>) -> String {
    let mut out = String::new();
    for s in mesh.segments() {
        let _ = writeln!(out, "{}", join([s[0][0], s[0][1], s[1][0], s[1][1]]));
    }
    out
}

pub fn mesh_from_csv<T: Real>(text: &str, dim: usize) -> Result<InterfaceMesh<T>> {
    let mut segs = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let v: Vec<T> = line.split(',').map(|p| parse_num(p, i + 1)).collect::<Result<_>>()?;
        if v.len() != 4 {
            return Err(parse_err(i + 1, format!("{} values, expected 4", v.len())));
        }
        segs.push([[v[0], v[1]], [v[2], v[3]]]);
    }
    Ok(if dim == 1 {
        InterfaceMesh::from_points(1, segs.into_iter().map(|s| s[0]).collect())
    } else {
        InterfaceMesh::from_segments(segs)
    })
}

pub fn write_mesh_csv<T: Real>(mesh: &InterfaceMesh<T>, path: &Path) -> Result<()> {
    fs::write(path, mesh_to_csv(mesh))?;
    Ok(())
}

/// Two-column CSV with a header line.
pub fn curve_to_csv<T: Real>(names: [&str; 2], rows: &[(T, T)]) -> String {
    let mut out = format!("{},{}\n", names[0], names[1]);
    for &(a, b) in rows {
        let _ = writeln!(out, "{}", join([a, b]));
    }
    out
}

/// Pretty JSON with object keys in sorted order, so equal reports are byte-identical.
pub fn to_canonical_json<S: Serialize>(value: &S) -> Result<String> {
    let v = serde_json::to_value(value)?;
    let mut s = serde_json::to_string_pretty(&v)?;
    s.push('\n');
    Ok(s)
}

pub fn write_json<S: Serialize>(value: &S, path: &Path) -> Result<()> {
    fs::write(path, to_canonical_json(value)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::sample_function;

    #[test]
    fn format_instance() {
        let g = GridSpec::<f64>::new_1d(0.0, 1.0, 3).unwrap();
        let f = sample_function(&g, |p| p[0]).unwrap();
        let csv = field_to_csv(&f);
        assert_eq!(csv, "# 1,3,0,1\n0,0.5,1\n");
    }

    #[test]
    fn round_trip_is_bitwise() {
        let g = GridSpec::<f64>::new_2d((-1.0, 2.0), (0.5, 1.5), 7, 4).unwrap();
        let f = sample_function(&g, |p| (p[0] * 1e7).sin() * 1e-9 + p[1].exp() * 1e17 * p[0]).unwrap();
        let back: ScalarField<f64> = field_from_csv(&field_to_csv(&f)).unwrap();
        assert_eq!(back.grid(), f.grid());
        for (a, b) in f.values().iter().zip(back.values()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
        let f32f = sample_function(&GridSpec::<f32>::new_1d(0.0, 1.0, 5).unwrap(), |p| p[0] / 3.0).unwrap();
        let back32: ScalarField<f32> = field_from_csv(&field_to_csv(&f32f)).unwrap();
        assert_eq!(back32, f32f);
    }

    #[test]
    fn malformed_files_name_the_line() {
        let bad = "# 2,3,3,0,1,0,1\n1,2,3\n4,5\n6,7,8\n";
        match field_from_csv::<f64>(bad) {
            Err(Error::Parse { line, message }) => {
                assert_eq!(line, 3);
                assert!(message.contains("row 2"), "{message}");
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(field_from_csv::<f64>("0,1\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(field_from_csv::<f64>("# 1,3,0,1\n0,x,1\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(field_from_csv::<f64>("# 1,3,0,1\n"), Err(Error::Parse { .. })));
        assert!(matches!(field_from_csv::<f64>("# 1,3,0,1\n0,1,2\n3,4,5\n"), Err(Error::Parse { line: 3, .. })));
        assert!(matches!(field_from_csv::<f64>("# 3,3,0,1\n"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn mesh_round_trip() {
        let m = InterfaceMesh::from_segments(vec![[[0.0, 0.1], [0.2, 0.3]], [[1.0, -1.0], [0.5, 0.25]]]);
        assert_eq!(mesh_from_csv::<f64>(&mesh_to_csv(&m), 2).unwrap(), m);
        assert_eq!(mesh_to_csv(&m).lines().next().unwrap(), "0,0.1,0.2,0.3");
        let p = InterfaceMesh::from_points(1, vec![[0.25, 0.0]]);
        assert_eq!(mesh_from_csv::<f64>(&mesh_to_csv(&p), 1).unwrap(), p);
    }

    #[test]
    fn json_keys_sorted() {
        #[derive(Serialize)]
        struct R {
            zeta: u8,
            alpha: u8,
        }
        let s = to_canonical_json(&R { zeta: 1, alpha: 2 }).unwrap();
        assert!(s.find("alpha").unwrap() < s.find("zeta").unwrap());
        assert_eq!(curve_to_csv(["t", "err"], &[(0.5f64, 1e-7)]), "t,err\n0.5,1e-7\n");
    }
}
