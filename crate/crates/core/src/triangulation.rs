//! Face-pairing tables of oriented 3-simplices and their combinatorial skeleton.
//!
//! Faces of a tetrahedron are indexed in the column order of the `.tri`
//! format: face `k` has vertices `FACE_VERTICES[k]` and is opposite vertex
//! `3 - k`. A [`Triangulation`] is validated on construction and carries its
//! edge classes, vertex classes and vertex-link surfaces.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Vertex triples of the four faces, in column order 012, 013, 023, 123.
pub const FACE_VERTICES: [[usize; 3]; 4] = [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]];

/// The six edges of a tetrahedron in lexicographic order.
pub const TET_EDGES: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

#[inline]
pub fn opposite_vertex(face: usize) -> usize {
    3 - face
}

#[inline]
pub fn face_opposite(vertex: usize) -> usize {
    3 - vertex
}

/// Index of the edge `{a, b}` in [`TET_EDGES`].
pub fn edge_index(a: usize, b: usize) -> usize {
    let (a, b) = if a < b { (a, b) } else { (b, a) };
    TET_EDGES
        .iter()
        .position(|&e| e == (a, b))
        .expect("distinct vertices 0..4")
}

/// A permutation of `{0, 1, 2, 3}` stored as its image list.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Perm4([u8; 4]);

impl Perm4 {
    pub const IDENTITY: Perm4 = Perm4([0, 1, 2, 3]);

    pub fn new(images: [usize; 4]) -> Option<Perm4> {
        let mut seen = [false; 4];
        for &i in &images {
            if i > 3 || seen[i] {
                return None;
            }
            seen[i] = true;
        }
        Some(Perm4(images.map(|i| i as u8)))
    }

    #[inline]
    pub fn apply(self, i: usize) -> usize {
        self.0[i] as usize
    }

    pub fn inverse(self) -> Perm4 {
        let mut inv = [0u8; 4];
        for (i, &p) in self.0.iter().enumerate() {
            inv[p as usize] = i as u8;
        }
        Perm4(inv)
    }

    /// `self ∘ other`.
    pub fn compose(self, other: Perm4) -> Perm4 {
        Perm4(other.0.map(|i| self.0[i as usize]))
    }

    pub fn is_odd(self) -> bool {
        parity(&self.0.map(|x| x as usize))
    }

    pub fn images(self) -> [usize; 4] {
        self.0.map(|x| x as usize)
    }
}

impl fmt::Display for Perm4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &d in &self.0 {
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

/// True when the sequence is an odd permutation of its sorted values.
pub(crate) fn parity(seq: &[usize]) -> bool {
    let mut inversions = 0;
    for i in 0..seq.len() {
        for j in 0..i {
            if seq[j] > seq[i] {
                inversions += 1;
            }
        }
    }
    inversions % 2 == 1
}

/// Which orientation of the standard simplex `0123` is taken as positive.
///
/// `Reversed` triangulations use the mirror cyclic order on quadrilateral
/// types and the mirror orientation on vertex links.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    #[default]
    Standard,
    Reversed,
}

/// Face `f` of one tetrahedron is glued to face `3 - perm(3 - f)` of `tet`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Gluing {
    pub tet: usize,
    pub perm: Perm4,
}

impl Gluing {
    pub fn target_face(&self, face: usize) -> usize {
        face_opposite(self.perm.apply(opposite_vertex(face)))
    }
}

/// A tetrahedron edge in an edge class, oriented consistently with the
/// rest of its class.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeMember {
    pub tet: usize,
    pub tail: usize,
    pub head: usize,
}

impl EdgeMember {
    pub fn edge_index(&self) -> usize {
        edge_index(self.tail, self.head)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeClass {
    pub id: usize,
    pub members: Vec<EdgeMember>,
    /// Vertex classes at the tail and head of the orientation of `members`.
    pub endpoints: (usize, usize),
}

/// The triangulated vertex link of one vertex class.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinkSurface {
    /// One triangle per corner `(tet, vertex)`.
    pub triangles: Vec<(usize, usize)>,
    /// `neighbours[i][w]` is the triangle and side label glued to side `w`
    /// of triangle `i`; side `w` is cut by the face opposite vertex `w`.
    /// The entry at the triangle's own vertex is unused.
    pub neighbours: Vec<[(usize, usize); 4]>,
    pub link_vertices: usize,
    pub euler_characteristic: i64,
    pub genus: u32,
}

impl LinkSurface {
    pub fn triangle_index(&self, tet: usize, vertex: usize) -> Option<usize> {
        self.triangles.iter().position(|&c| c == (tet, vertex))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VertexClass {
    pub id: usize,
    pub members: Vec<(usize, usize)>,
    pub link: LinkSurface,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusSummary {
    pub tetrahedra: usize,
    pub edges: usize,
    pub vertices: usize,
    /// Link genera as a sorted multiset.
    pub genera: Vec<u32>,
    pub lemma_ok: bool,
}

/// A closed, oriented, validated face-pairing table.
#[derive(Clone, Debug)]
pub struct Triangulation {
    gluings: Vec<[Gluing; 4]>,
    orientation: Orientation,
    edges: Vec<EdgeClass>,
    vertices: Vec<VertexClass>,
    edge_lookup: Vec<[usize; 6]>,
    vertex_lookup: Vec<[usize; 4]>,
}

impl PartialEq for Triangulation {
    fn eq(&self, other: &Self) -> bool {
        self.gluings == other.gluings && self.orientation == other.orientation
    }
}

impl Triangulation {
    pub fn new(gluings: Vec<[Gluing; 4]>, orientation: Orientation) -> Result<Self> {
        validate_pairings(&gluings)?;
        let (vertex_lookup, vertex_members) = vertex_orbits(&gluings);
        let (edge_lookup, edge_members) = edge_orbits(&gluings)?;
        let edges: Vec<EdgeClass> = edge_members
            .into_iter()
            .enumerate()
            .map(|(id, members)| {
                let m = members[0];
                EdgeClass {
                    id,
                    endpoints: (vertex_lookup[m.tet][m.tail], vertex_lookup[m.tet][m.head]),
                    members,
                }
            })
            .collect();
        let mut vertices = Vec::with_capacity(vertex_members.len());
        for (id, members) in vertex_members.into_iter().enumerate() {
            let link_vertices = edges
                .iter()
                .map(|e| (e.endpoints.0 == id) as usize + (e.endpoints.1 == id) as usize)
                .sum();
            let link = build_link(&gluings, orientation, id, &members, link_vertices)?;
            vertices.push(VertexClass { id, members, link });
        }
        Ok(Triangulation {
            gluings,
            orientation,
            edges,
            vertices,
            edge_lookup,
            vertex_lookup,
        })
    }

    pub fn parse(text: &str) -> Result<Self> {
        text.parse()
    }

    pub fn tet_count(&self) -> usize {
        self.gluings.len()
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn gluing(&self, tet: usize, face: usize) -> Gluing {
        self.gluings[tet][face]
    }

    pub fn gluings(&self) -> &[[Gluing; 4]] {
        &self.gluings
    }

    pub fn edge_classes(&self) -> &[EdgeClass] {
        &self.edges
    }

    pub fn vertex_classes(&self) -> &[VertexClass] {
        &self.vertices
    }

    /// Edge class of the tetrahedron edge `{a, b}` of `tet`.
    pub fn edge_class_of(&self, tet: usize, a: usize, b: usize) -> usize {
        self.edge_lookup[tet][edge_index(a, b)]
    }

    pub fn vertex_class_of(&self, tet: usize, vertex: usize) -> usize {
        self.vertex_lookup[tet][vertex]
    }

    /// Same triangulation with the opposite orientation declared positive.
    pub fn with_orientation(&self, orientation: Orientation) -> Result<Self> {
        Triangulation::new(self.gluings.clone(), orientation)
    }

    /// Whether the link triangle at `vertex` lists `(a, b, c)` counter-clockwise
    /// when viewed from the cusp.
    pub fn link_ccw(&self, vertex: usize, a: usize, b: usize, c: usize) -> bool {
        link_ccw(self.orientation, vertex, a, b, c)
    }

    pub fn census_summary(&self) -> CensusSummary {
        let mut genera: Vec<u32> = self.vertices.iter().map(|v| v.link.genus).collect();
        genera.sort_unstable();
        let genus_sum: i64 = genera.iter().map(|&g| g as i64).sum();
        let lhs = self.tet_count() as i64 - self.edges.len() as i64 + self.vertices.len() as i64;
        CensusSummary {
            tetrahedra: self.tet_count(),
            edges: self.edges.len(),
            vertices: self.vertices.len(),
            genera,
            lemma_ok: lhs == genus_sum,
        }
    }

    pub fn genus_sum(&self) -> usize {
        self.vertices.iter().map(|v| v.link.genus as usize).sum()
    }

    /// Whether the dual graph (tetrahedra joined across faces) is connected.
    pub fn is_connected(&self) -> bool {
        let n = self.tet_count();
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        while let Some(s) = queue.pop_front() {
            for g in &self.gluings[s] {
                if !seen[g.tet] {
                    seen[g.tet] = true;
                    queue.push_back(g.tet);
                }
            }
        }
        seen.into_iter().all(|x| x)
    }

    /// Random closed, oriented, valid and connected triangulation with `n`
    /// tetrahedra. Faces are paired uniformly at random with random odd
    /// gluing permutations; invalid or disconnected draws are rejected.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Triangulation {
        assert!(n > 0, "need at least one tetrahedron");
        loop {
            let mut faces: Vec<(usize, usize)> = (0..n).flat_map(|s| (0..4).map(move |f| (s, f))).collect();
            faces.shuffle(rng);
            let placeholder = Gluing {
                tet: usize::MAX,
                perm: Perm4::IDENTITY,
            };
            let mut gluings = vec![[placeholder; 4]; n];
            for pair in faces.chunks(2) {
                let ((s, f), (t, g)) = (pair[0], pair[1]);
                let perm = random_odd_face_map(f, g, rng);
                gluings[s][f] = Gluing { tet: t, perm };
                gluings[t][g] = Gluing {
                    tet: s,
                    perm: perm.inverse(),
                };
            }
            if let Ok(tri) = Triangulation::new(gluings, Orientation::Standard) {
                if tri.is_connected() {
                    return tri;
                }
            }
        }
    }
}

fn random_odd_face_map<R: Rng + ?Sized>(from: usize, to: usize, rng: &mut R) -> Perm4 {
    let src = FACE_VERTICES[from];
    let mut dst = FACE_VERTICES[to];
    loop {
        dst.shuffle(rng);
        let mut images = [0usize; 4];
        for k in 0..3 {
            images[src[k]] = dst[k];
        }
        images[opposite_vertex(from)] = opposite_vertex(to);
        let perm = Perm4::new(images).expect("bijection");
        if perm.is_odd() {
            return perm;
        }
    }
}

pub(crate) fn link_ccw(orientation: Orientation, v: usize, a: usize, b: usize, c: usize) -> bool {
    parity(&[v, a, b, c]) == (orientation == Orientation::Standard)
}

fn validate_pairings(gluings: &[[Gluing; 4]]) -> Result<()> {
    let n = gluings.len();
    if n == 0 {
        return Err(Error::Parse {
            line: 0,
            message: "no tetrahedra".into(),
        });
    }
    for (s, row) in gluings.iter().enumerate() {
        for (f, g) in row.iter().enumerate() {
            if g.tet >= n {
                return Err(Error::UnpairedFace { tet: s, face: f });
            }
            let tf = g.target_face(f);
            if g.tet == s && tf == f {
                return Err(Error::SelfGluedFace { tet: s, face: f });
            }
            let back = gluings[g.tet][tf];
            if back.tet != s || back.perm != g.perm.inverse() {
                return Err(Error::NotInvolutive { tet: s, face: f });
            }
            if !g.perm.is_odd() {
                return Err(Error::NotOrientable { tet: s, face: f });
            }
        }
    }
    Ok(())
}

/// Per-tetrahedron class lookup together with the members of each class.
type Orbits<const K: usize, M> = (Vec<[usize; K]>, Vec<Vec<M>>);

fn vertex_orbits(gluings: &[[Gluing; 4]]) -> Orbits<4, (usize, usize)> {
    let n = gluings.len();
    let mut lookup = vec![[usize::MAX; 4]; n];
    let mut classes = Vec::new();
    for s in 0..n {
        for v in 0..4 {
            if lookup[s][v] != usize::MAX {
                continue;
            }
            let id = classes.len();
            let mut members = Vec::new();
            let mut queue = VecDeque::from([(s, v)]);
            lookup[s][v] = id;
            while let Some((t, w)) = queue.pop_front() {
                members.push((t, w));
                for (f, g) in gluings[t].iter().enumerate() {
                    if f == face_opposite(w) {
                        continue;
                    }
                    let (t2, w2) = (g.tet, g.perm.apply(w));
                    if lookup[t2][w2] == usize::MAX {
                        lookup[t2][w2] = id;
                        queue.push_back((t2, w2));
                    }
                }
            }
            members.sort_unstable();
            classes.push(members);
        }
    }
    (lookup, classes)
}

fn edge_orbits(gluings: &[[Gluing; 4]]) -> Result<Orbits<6, EdgeMember>> {
    let n = gluings.len();
    let mut lookup = vec![[usize::MAX; 6]; n];
    // Orientation assigned to each tetrahedron edge: the tail vertex.
    let mut tails = vec![[usize::MAX; 6]; n];
    let mut classes = Vec::new();
    for s in 0..n {
        for (k, &(a, b)) in TET_EDGES.iter().enumerate() {
            if lookup[s][k] != usize::MAX {
                continue;
            }
            let id = classes.len();
            let mut members = Vec::new();
            lookup[s][k] = id;
            tails[s][k] = a;
            let mut queue = VecDeque::from([EdgeMember {
                tet: s,
                tail: a,
                head: b,
            }]);
            while let Some(m) = queue.pop_front() {
                members.push(m);
                for v in 0..4 {
                    if v == m.tail || v == m.head {
                        continue;
                    }
                    let g = gluings[m.tet][face_opposite(v)];
                    let next = EdgeMember {
                        tet: g.tet,
                        tail: g.perm.apply(m.tail),
                        head: g.perm.apply(m.head),
                    };
                    let nk = next.edge_index();
                    if lookup[next.tet][nk] == usize::MAX {
                        lookup[next.tet][nk] = id;
                        tails[next.tet][nk] = next.tail;
                        queue.push_back(next);
                    } else if tails[next.tet][nk] != next.tail {
                        let (a, b) = TET_EDGES[nk];
                        return Err(Error::InvalidEdge { tet: next.tet, a, b });
                    }
                }
            }
            members.sort_unstable_by_key(|m| (m.tet, m.edge_index()));
            classes.push(members);
        }
    }
    Ok((lookup, classes))
}

fn build_link(
    gluings: &[[Gluing; 4]],
    orientation: Orientation,
    id: usize,
    members: &[(usize, usize)],
    link_vertices: usize,
) -> Result<LinkSurface> {
    let index_of = |c: (usize, usize)| members.binary_search(&c).expect("corner in class");
    let mut neighbours = Vec::with_capacity(members.len());
    for &(s, v) in members {
        let mut row = [(usize::MAX, usize::MAX); 4];
        for (w, slot) in row.iter_mut().enumerate() {
            if w == v {
                continue;
            }
            let g = gluings[s][face_opposite(w)];
            let (t, v2, w2) = (g.tet, g.perm.apply(v), g.perm.apply(w));
            *slot = (index_of((t, v2)), w2);
            // Side w runs between the two labels other than v and w; the
            // glued side must be traversed in the opposite direction.
            let (x, y) = side_endpoints(v, w);
            let forward = link_ccw(orientation, v, x, y, w);
            let forward_image = link_ccw(orientation, v2, g.perm.apply(x), g.perm.apply(y), w2);
            if forward == forward_image {
                return Err(Error::NonOrientableLink { vertex: id });
            }
        }
        neighbours.push(row);
    }
    // Connectivity of the link.
    let mut seen = vec![false; members.len()];
    let mut queue = VecDeque::from([0]);
    seen[0] = true;
    while let Some(i) = queue.pop_front() {
        for (w, &(j, _)) in neighbours[i].iter().enumerate() {
            if w != members[i].1 && !seen[j] {
                seen[j] = true;
                queue.push_back(j);
            }
        }
    }
    if seen.iter().any(|&x| !x) {
        return Err(Error::NonOrientableLink { vertex: id });
    }
    let faces = members.len() as i64;
    let chi = link_vertices as i64 - 3 * faces / 2 + faces;
    if chi % 2 != 0 || chi > 2 {
        return Err(Error::NonOrientableLink { vertex: id });
    }
    Ok(LinkSurface {
        triangles: members.to_vec(),
        neighbours,
        link_vertices,
        euler_characteristic: chi,
        genus: ((2 - chi) / 2) as u32,
    })
}

/// The two link-vertex labels bounding side `w` of the link triangle at `v`,
/// in increasing order.
pub(crate) fn side_endpoints(v: usize, w: usize) -> (usize, usize) {
    let mut it = (0..4).filter(|&x| x != v && x != w);
    let x = it.next().unwrap();
    let y = it.next().unwrap();
    (x, y)
}

/// `#! key: value` directive lines of a `.tri` file.
pub fn directives(text: &str) -> Vec<(String, String)> {
    text.lines()
        .filter_map(|l| l.trim().strip_prefix("#!"))
        .filter_map(|d| {
            let (k, v) = d.split_once(':')?;
            Some((k.trim().to_ascii_lowercase(), v.trim().to_string()))
        })
        .collect()
}

impl FromStr for Triangulation {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut orientation = Orientation::Standard;
        for (k, v) in directives(text) {
            if k == "orientation" {
                orientation = match v.to_ascii_lowercase().as_str() {
                    "standard" => Orientation::Standard,
                    "reversed" => Orientation::Reversed,
                    other => {
                        return Err(Error::Parse {
                            line: 0,
                            message: format!("unknown orientation {other:?}"),
                        })
                    }
                };
            }
        }
        let mut rows: Vec<(usize, usize, [Option<Gluing>; 4])> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let perr = |message: String| Error::Parse {
                line: lineno + 1,
                message,
            };
            let fields: Vec<&str> = line.split('|').map(str::trim).collect();
            if fields.len() != 5 {
                return Err(perr(format!("expected 5 '|'-separated fields, found {}", fields.len())));
            }
            let tet: usize = fields[0]
                .parse()
                .map_err(|_| perr(format!("bad tetrahedron index {:?}", fields[0])))?;
            let mut row = [None; 4];
            for (face, field) in fields[1..].iter().enumerate() {
                row[face] = parse_gluing(face, field).map_err(perr)?;
            }
            rows.push((lineno + 1, tet, row));
        }
        if rows.is_empty() {
            return Err(Error::Parse {
                line: 0,
                message: "no tetrahedra".into(),
            });
        }
        let n = rows
            .iter()
            .flat_map(|r| std::iter::once(r.1).chain(r.2.iter().flatten().map(|g| g.tet)))
            .max()
            .unwrap()
            + 1;
        let mut table: Vec<Option<[Option<Gluing>; 4]>> = vec![None; n];
        for (line, tet, row) in rows {
            if table[tet].is_some() {
                return Err(Error::Parse {
                    line,
                    message: format!("duplicate row for tetrahedron {tet}"),
                });
            }
            table[tet] = Some(row);
        }
        let mut gluings = Vec::with_capacity(n);
        for (tet, row) in table.into_iter().enumerate() {
            let row = row.ok_or(Error::UnpairedFace { tet, face: 0 })?;
            let mut full = [Gluing {
                tet: 0,
                perm: Perm4::IDENTITY,
            }; 4];
            for face in 0..4 {
                full[face] = row[face].ok_or(Error::UnpairedFace { tet, face })?;
            }
            gluings.push(full);
        }
        Triangulation::new(gluings, orientation)
    }
}

/// Parses `t (abc)`; `-` marks an unpaired face.
fn parse_gluing(face: usize, field: &str) -> std::result::Result<Option<Gluing>, String> {
    if field == "-" {
        return Ok(None);
    }
    let (t, rest) = field
        .split_once('(')
        .ok_or_else(|| format!("expected 't (abc)', found {field:?}"))?;
    let tet: usize = t
        .trim()
        .parse()
        .map_err(|_| format!("bad target tetrahedron {:?}", t.trim()))?;
    let digits = rest
        .trim()
        .strip_suffix(')')
        .ok_or_else(|| format!("missing ')' in {field:?}"))?
        .trim();
    let digits: Vec<usize> = digits
        .chars()
        .map(|c| c.to_digit(10).map(|d| d as usize).filter(|&d| d < 4))
        .collect::<Option<_>>()
        .ok_or_else(|| format!("bad permutation digits {digits:?}"))?;
    if digits.len() != 3 {
        return Err(format!("expected three digits, found {digits:?}"));
    }
    let mut images = [usize::MAX; 4];
    for (k, &v) in FACE_VERTICES[face].iter().enumerate() {
        images[v] = digits[k];
    }
    let missing: Vec<usize> = (0..4).filter(|d| !digits.contains(d)).collect();
    if missing.len() != 1 {
        return Err(format!("repeated digits in {digits:?}"));
    }
    images[opposite_vertex(face)] = missing[0];
    let perm = Perm4::new(images).ok_or_else(|| format!("not a permutation: {digits:?}"))?;
    Ok(Some(Gluing { tet, perm }))
}

impl fmt::Display for Triangulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.orientation == Orientation::Reversed {
            writeln!(f, "#! orientation: reversed")?;
        }
        for (s, row) in self.gluings.iter().enumerate() {
            write!(f, "{s}")?;
            for (face, g) in row.iter().enumerate() {
                let digits: String = FACE_VERTICES[face]
                    .iter()
                    .map(|&v| char::from(b'0' + g.perm.apply(v) as u8))
                    .collect();
                write!(f, " | {} ({digits})", g.tet)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct TriangulationData {
    orientation: Orientation,
    /// Per tetrahedron, per face: `[target tetrahedron, "perm images"]`.
    tetrahedra: Vec<Vec<(usize, String)>>,
}

impl Serialize for Triangulation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        TriangulationData {
            orientation: self.orientation,
            tetrahedra: self
                .gluings
                .iter()
                .map(|row| row.iter().map(|g| (g.tet, g.perm.to_string())).collect())
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Triangulation {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let data = TriangulationData::deserialize(d)?;
        let mut gluings = Vec::with_capacity(data.tetrahedra.len());
        for row in &data.tetrahedra {
            if row.len() != 4 {
                return Err(D::Error::custom("each tetrahedron needs four faces"));
            }
            let mut out = [Gluing {
                tet: 0,
                perm: Perm4::IDENTITY,
            }; 4];
            for (k, (tet, p)) in row.iter().enumerate() {
                let digits: Vec<usize> = p.chars().filter_map(|c| c.to_digit(10).map(|d| d as usize)).collect();
                let images: [usize; 4] = digits
                    .try_into()
                    .map_err(|_| D::Error::custom(format!("bad permutation {p:?}")))?;
                let perm = Perm4::new(images).ok_or_else(|| D::Error::custom(format!("bad permutation {p:?}")))?;
                out[k] = Gluing { tet: *tet, perm };
            }
            gluings.push(out);
        }
        Triangulation::new(gluings, data.orientation).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const TABLE2: &str = "\
0 | 2 (032) | 4 (012) | 2 (123) | 2 (120)
1 | 2 (013) | 1 (213) | 3 (013) | 1 (103)
2 | 0 (312) | 1 (012) | 0 (021) | 0 (023)
3 | 4 (013) | 1 (023) | 4 (312) | 4 (230)
4 | 0 (013) | 3 (012) | 3 (312) | 3 (230)
";

    #[test]
    fn perm_basics() {
        let p = Perm4::new([0, 3, 2, 1]).unwrap();
        assert!(p.is_odd());
        assert_eq!(p.compose(p.inverse()), Perm4::IDENTITY);
        assert!(Perm4::new([0, 0, 1, 2]).is_none());
        assert!(!Perm4::new([1, 2, 0, 3]).unwrap().is_odd());
    }

    #[test]
    fn parse_table2() {
        let t = Triangulation::parse(TABLE2).unwrap();
        assert_eq!(t.tet_count(), 5);
        assert_eq!(t.edge_classes().len(), 4);
        assert_eq!(t.vertex_classes().len(), 2);
        let s = t.census_summary();
        assert_eq!(s.genera, vec![1, 2]);
        assert!(s.lemma_ok);
    }

    #[test]
    fn empty_input_is_parse_error() {
        assert!(matches!(Triangulation::parse(""), Err(Error::Parse { .. })));
        assert!(matches!(
            Triangulation::parse("# only a comment\n"),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn malformed_rows() {
        assert!(matches!(
            Triangulation::parse("0 | 0 (01) | 0 (013) | 0 (023) | 0 (123)"),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            Triangulation::parse("0 | 0 (011) | 0 (013) | 0 (023) | 0 (123)"),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            Triangulation::parse("0 | 0 (012) | 0 (013)"),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn rejects_unpaired_and_bad_tables() {
        let unpaired = TABLE2.replace("4 (012) | 2 (123)", "- | 2 (123)");
        assert!(matches!(
            Triangulation::parse(&unpaired),
            Err(Error::UnpairedFace { tet: 0, face: 1 })
        ));
        // Drop the last row: tetrahedron 4 is referenced but missing.
        let missing: String = TABLE2.lines().take(4).map(|l| format!("{l}\n")).collect();
        assert!(matches!(
            Triangulation::parse(&missing),
            Err(Error::UnpairedFace { tet: 4, .. })
        ));
        // Break the inverse on one side.
        let broken = TABLE2.replace("2 (013) | 1 (213)", "2 (031) | 1 (213)");
        assert!(matches!(
            Triangulation::parse(&broken),
            Err(Error::NotInvolutive { .. }) | Err(Error::NotOrientable { .. })
        ));
    }

    #[test]
    fn rejects_orientation_preserving_gluing() {
        // Two tetrahedra glued by identity maps: involutive but even.
        let text = "0 | 1 (012) | 1 (013) | 1 (023) | 1 (123)\n1 | 0 (012) | 0 (013) | 0 (023) | 0 (123)\n";
        assert!(matches!(Triangulation::parse(text), Err(Error::NotOrientable { .. })));
    }

    #[test]
    fn orientation_directive_round_trip() {
        let text = format!("#! orientation: reversed\n{TABLE2}");
        let t = Triangulation::parse(&text).unwrap();
        assert_eq!(t.orientation(), Orientation::Reversed);
        let again = Triangulation::parse(&t.to_string()).unwrap();
        assert_eq!(t, again);
    }

    #[test]
    fn json_round_trip() {
        let t = Triangulation::parse(TABLE2).unwrap();
        let json = serde_json::to_string(&t).unwrap();
        let back: Triangulation = serde_json::from_str(&json).unwrap();
        assert_eq!(t, back);
    }

    #[test]
    fn edge_members_are_consistently_oriented() {
        let t = Triangulation::parse(TABLE2).unwrap();
        for e in t.edge_classes() {
            for m in &e.members {
                for v in (0..4).filter(|&v| v != m.tail && v != m.head) {
                    let g = t.gluing(m.tet, face_opposite(v));
                    let (tail, head) = (g.perm.apply(m.tail), g.perm.apply(m.head));
                    let img = e
                        .members
                        .iter()
                        .find(|x| x.tet == g.tet && x.edge_index() == edge_index(tail, head))
                        .expect("image is a member");
                    assert_eq!((img.tail, img.head), (tail, head));
                }
            }
        }
    }

    #[test]
    fn random_triangulations_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 1..8 {
            let t = Triangulation::random(n, &mut rng);
            assert_eq!(t.tet_count(), n);
            assert!(t.is_connected());
            assert!(t.census_summary().lemma_ok);
            let corners: usize = t.vertex_classes().iter().map(|v| v.members.len()).sum();
            assert_eq!(corners, 4 * n);
        }
    }
}
