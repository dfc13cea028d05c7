//! File formats: `.tri` with directives, shape/target/path/curve JSON, and
//! JSON output with round-trip float precision.

use std::collections::BTreeMap;
use std::io;

use num_complex::Complex64;
use serde::ser::Serialize;
use serde::Deserialize;
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::error::{Error, Result};
use crate::gluing::ShapeConvention;
use crate::peripheral::{ArcPath, CurveSpec};
use crate::triangulation::{directives, Triangulation};

/// A parsed `.tri` file: the triangulation and an optional base-edge
/// override from a `#! base-edge:` directive.
#[derive(Clone, Debug, PartialEq)]
pub struct TriFile {
    pub triangulation: Triangulation,
    pub base_edges: Option<Vec<(usize, usize)>>,
}

impl TriFile {
    pub fn parse(text: &str) -> Result<TriFile> {
        let triangulation = Triangulation::parse(text)?;
        let mut base_edges = None;
        for (k, v) in directives(text) {
            if k == "base-edge" {
                base_edges = Some(parse_base_edges(&v, triangulation.tet_count())?);
            }
        }
        Ok(TriFile {
            triangulation,
            base_edges,
        })
    }

    pub fn convention(&self) -> ShapeConvention {
        match &self.base_edges {
            Some(edges) => ShapeConvention::from_base_edges(&self.triangulation, edges).expect("validated base edges"),
            None => ShapeConvention::standard(&self.triangulation),
        }
    }
}

fn parse_edge(s: &str) -> Option<(usize, usize)> {
    let d: Vec<usize> = s
        .trim()
        .chars()
        .map(|c| c.to_digit(10).map(|x| x as usize))
        .collect::<Option<_>>()?;
    match d.as_slice() {
        &[a, b] if a < 4 && b < 4 && a != b => Some((a, b)),
        _ => None,
    }
}

/// `"12"` for every tetrahedron, or `"0:12 1:03 ..."` per tetrahedron
/// (unlisted tetrahedra keep edge 01).
pub fn parse_base_edges(spec: &str, tets: usize) -> Result<Vec<(usize, usize)>> {
    let bad = || Error::Parse {
        line: 0,
        message: format!("bad base-edge specification {spec:?}"),
    };
    let spec = spec.trim();
    if !spec.contains(':') {
        let e = parse_edge(spec).ok_or_else(bad)?;
        return Ok(vec![e; tets]);
    }
    let mut out = vec![(0, 1); tets];
    for item in spec.split([' ', ',']).filter(|s| !s.is_empty()) {
        let (t, e) = item.split_once(':').ok_or_else(bad)?;
        let t: usize = t.trim().parse().map_err(|_| bad())?;
        if t >= tets {
            return Err(bad());
        }
        out[t] = parse_edge(e).ok_or_else(bad)?;
    }
    Ok(out)
}

/// Shape file: `{"0": [re, im], "1": [re, im], ...}` of preferred values.
pub fn parse_shapes(text: &str, tets: usize) -> Result<Vec<Complex64>> {
    let map: BTreeMap<String, Complex64> = serde_json::from_str(text)?;
    let mut out = vec![None; tets];
    for (k, v) in map {
        let i: usize = k
            .trim()
            .parse()
            .map_err(|_| Error::Json(format!("bad tetrahedron key {k:?}")))?;
        if i >= tets {
            return Err(Error::Json(format!("tetrahedron {i} out of range")));
        }
        out[i] = Some(v);
    }
    out.into_iter()
        .enumerate()
        .map(|(i, v)| v.ok_or_else(|| Error::Json(format!("missing shape for tetrahedron {i}"))))
        .collect()
}

pub fn shapes_json(values: &[Complex64]) -> BTreeMap<String, Complex64> {
    values.iter().enumerate().map(|(i, v)| (i.to_string(), *v)).collect()
}

#[derive(Clone, Debug, PartialEq, Deserialize, serde::Serialize)]
pub struct CurveFile {
    pub curves: Vec<CurveSpec>,
}

/// Resolved curves: names, index vectors and any arc paths.
#[derive(Clone, Debug, PartialEq)]
pub struct Curves {
    pub names: Vec<String>,
    pub ind: Vec<Vec<i64>>,
    pub paths: Vec<Option<ArcPath>>,
}

impl CurveFile {
    pub fn parse(text: &str) -> Result<CurveFile> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn resolve(&self, t: &Triangulation, conv: &ShapeConvention) -> Result<Curves> {
        let mut out = Curves {
            names: Vec::new(),
            ind: Vec::new(),
            paths: Vec::new(),
        };
        for c in &self.curves {
            let (ind, path) = c.resolve(t, conv)?;
            out.names.push(c.name().to_string());
            out.ind.push(ind);
            out.paths.push(path);
        }
        Ok(out)
    }
}

/// Target file `{"u": [[re, im], ...], "t": [[re, im], ...]}`.
pub fn parse_target(text: &str) -> Result<crate::solver::SolveTarget> {
    Ok(serde_json::from_str(text)?)
}

/// Continuation path file: fixed `u` and a list of holonomy targets.
#[derive(Clone, Debug, PartialEq, Deserialize, serde::Serialize)]
pub struct PathFile {
    pub u: Vec<Complex64>,
    pub path: Vec<Vec<Complex64>>,
}

pub fn parse_path(text: &str) -> Result<PathFile> {
    Ok(serde_json::from_str(text)?)
}

/// Pretty JSON with every float written to 17 significant digits.
struct PreciseFormatter<'a>(PrettyFormatter<'a>);

impl Formatter for PreciseFormatter<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            write!(w, "{value:.16e}")
        } else {
            w.write_all(b"null")
        }
    }
    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

pub fn to_json_string<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, PreciseFormatter(PrettyFormatter::new()));
    value.serialize(&mut ser)?;
    Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn base_edge_specs() {
        assert_eq!(parse_base_edges("12", 2).unwrap(), vec![(1, 2), (1, 2)]);
        assert_eq!(parse_base_edges("1:23", 3).unwrap(), vec![(0, 1), (2, 3), (0, 1)]);
        assert!(parse_base_edges("11", 2).is_err());
        assert!(parse_base_edges("5:12", 2).is_err());
    }

    #[test]
    fn shapes_round_trip() {
        let v = vec![Complex64::new(0.1, 0.2), Complex64::new(1.0 / 3.0, 2.0)];
        let text = to_json_string(&shapes_json(&v)).unwrap();
        assert_eq!(parse_shapes(&text, 2).unwrap(), v);
        assert!(parse_shapes(&text, 3).is_err());
    }

    #[test]
    fn precise_floats() {
        let s = to_json_string(&vec![0.1f64]).unwrap();
        assert!(s.contains("1.0000000000000001e-1"), "{s}");
        let back: Vec<f64> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, vec![0.1]);
    }
}
