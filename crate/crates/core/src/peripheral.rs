//! Normal curves on vertex links.
//!
//! A curve is a cyclic sequence of [`ArcStep`]s, each an arc in one link
//! triangle `(tet, vertex)` entering through one face of the tetrahedron and
//! leaving through another. The arc cuts off the corner labelled by the
//! vertex common to both faces (other than `vertex`), and that corner names
//! the quad type of the step.
//!
//! Sign convention: a link triangle with labels `(a, b, c)` is read
//! counter-clockwise from the cusp iff `(v, a, b, c)` is an odd permutation
//! (flipped for reversed triangulations). A step contributes `+1` when the
//! isolated corner lies to the right of the arc. With this choice
//! `pairing(ind(α), Q_β) = 2 ι(α, β)`, where `ι` counts a crossing `+1`
//! when β passes from the right of α to its left.

use std::collections::HashMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{lattice_contains, to_big};
use crate::gluing::{linear_log_gradient, slot_of_edge, QuadIncidence, ShapeAssignment, ShapeConvention};
use crate::triangulation::{face_opposite, link_ccw, Triangulation};

/// One oriented arc in the link triangle at `(tet, vertex)`. Faces use the
/// column indices 0..3 (face `k` is opposite vertex `3 - k`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ArcStep {
    pub tet: usize,
    pub vertex: usize,
    pub enter: usize,
    pub exit: usize,
}

impl ArcStep {
    /// Link-triangle side labels `(entry, exit, corner)`.
    fn labels(&self) -> (usize, usize, usize) {
        let a = face_opposite(self.enter);
        let b = face_opposite(self.exit);
        let c = (0..4).find(|&x| x != self.vertex && x != a && x != b).unwrap();
        (a, b, c)
    }

    /// Global index of the quad cut off by this arc.
    pub fn quad(&self) -> usize {
        let (_, _, c) = self.labels();
        3 * self.tet + slot_of_edge(self.vertex, c)
    }

    pub fn reversed(self) -> ArcStep {
        ArcStep {
            enter: self.exit,
            exit: self.enter,
            ..self
        }
    }
}

/// A closed normal curve on the link of one vertex class.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArcPath {
    pub vertex_class: usize,
    pub steps: Vec<ArcStep>,
}

impl ArcPath {
    /// Validates that the steps are arcs and consecutive steps are glued.
    pub fn new(t: &Triangulation, steps: Vec<ArcStep>) -> Result<ArcPath> {
        if steps.is_empty() {
            return Err(Error::InvalidPath("empty path".into()));
        }
        for (k, s) in steps.iter().enumerate() {
            if s.tet >= t.tet_count() || s.vertex > 3 || s.enter > 3 || s.exit > 3 {
                return Err(Error::InvalidPath(format!("step {k} out of range")));
            }
            if s.enter == s.exit {
                return Err(Error::InvalidPath(format!("step {k} enters and exits the same face")));
            }
            if s.enter == face_opposite(s.vertex) || s.exit == face_opposite(s.vertex) {
                return Err(Error::InvalidPath(format!(
                    "step {k} uses the face opposite its vertex"
                )));
            }
        }
        for k in 0..steps.len() {
            let s = steps[k];
            let next = steps[(k + 1) % steps.len()];
            let g = t.gluing(s.tet, s.exit);
            let (_, b, _) = s.labels();
            if g.tet != next.tet
                || g.perm.apply(s.vertex) != next.vertex
                || face_opposite(g.perm.apply(b)) != next.enter
            {
                return Err(Error::InvalidPath(format!(
                    "step {k} does not glue to step {}",
                    (k + 1) % steps.len()
                )));
            }
        }
        Ok(ArcPath {
            vertex_class: t.vertex_class_of(steps[0].tet, steps[0].vertex),
            steps,
        })
    }

    pub fn reversed(&self) -> ArcPath {
        ArcPath {
            vertex_class: self.vertex_class,
            steps: self.steps.iter().rev().map(|s| s.reversed()).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

/// `ind(q, α)`: signed count of the arcs of α cutting a corner of quad `q`.
pub fn index_vector(t: &Triangulation, path: &ArcPath) -> Vec<i64> {
    let mut ind = vec![0i64; 3 * t.tet_count()];
    for s in &path.steps {
        ind[s.quad()] += step_sign(t, s);
    }
    ind
}

fn step_sign(t: &Triangulation, s: &ArcStep) -> i64 {
    let (a, b, c) = s.labels();
    if link_ccw(t.orientation(), s.vertex, c, a, b) {
        1
    } else {
        -1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeEnd {
    Tail,
    Head,
}

/// The normal loop around the link vertex at one end of edge class `e`.
/// `orientation = +1` gives the loop with `ind = +i(·, e)` (corner on its
/// right, i.e. clockwise around the link vertex); `-1` the opposite loop.
pub fn curve_around_edge_endpoint(t: &Triangulation, e: usize, end: EdgeEnd, orientation: i32) -> ArcPath {
    let m = t.edge_classes()[e].members[0];
    let (v, c) = match end {
        EdgeEnd::Tail => (m.tail, m.head),
        EdgeEnd::Head => (m.head, m.tail),
    };
    let a = (0..4).find(|&x| x != v && x != c).unwrap();
    let start = (m.tet, v, c, a);
    let mut state = start;
    let mut steps = Vec::new();
    loop {
        let (s, v, c, a) = state;
        let b = (0..4).find(|&x| x != v && x != c && x != a).unwrap();
        steps.push(ArcStep {
            tet: s,
            vertex: v,
            enter: face_opposite(a),
            exit: face_opposite(b),
        });
        let g = t.gluing(s, face_opposite(b));
        state = (g.tet, g.perm.apply(v), g.perm.apply(c), g.perm.apply(b));
        if state == start {
            break;
        }
    }
    let path = ArcPath {
        vertex_class: t.vertex_class_of(m.tet, v),
        steps,
    };
    if step_sign(t, &path.steps[0]) == orientation.signum() as i64 {
        path
    } else {
        path.reversed()
    }
}

/// `h_α(z) = Σ_q ind(q,α) log z(q)`.
pub fn holonomy(ind: &[i64], z: &ShapeAssignment) -> Result<Complex64> {
    z.check_positive()?;
    Ok(ind.iter().zip(&z.z).map(|(&k, w)| w.ln() * k as f64).sum())
}

/// Stacked holonomies `H_L(z)`.
pub fn boundary_map(curves: &[Vec<i64>], z: &ShapeAssignment) -> Result<Vec<Complex64>> {
    curves.iter().map(|c| holonomy(c, z)).collect()
}

/// `dH_L` as a `|L| × |T|` matrix with respect to the preferred values.
pub fn jacobian_h(curves: &[Vec<i64>], conv: &ShapeConvention, z: &ShapeAssignment) -> Result<DMatrix<Complex64>> {
    z.check_positive()?;
    let w = z.preferred(conv);
    let mut m = DMatrix::zeros(curves.len(), conv.tet_count());
    for (r, c) in curves.iter().enumerate() {
        for (s, d) in linear_log_gradient(conv, &w, |q| c[q]).into_iter().enumerate() {
            m[(r, s)] = d;
        }
    }
    Ok(m)
}

/// Whether `ind(α) - ind(β)` lies in the integer lattice spanned by the
/// incidence columns, so that `h_α - h_β` is an integer combination of the
/// log-curvatures.
pub fn homology_gap_in_edge_lattice(inc: &QuadIncidence, ind_a: &[i64], ind_b: &[i64]) -> bool {
    let gens: Vec<_> = (0..inc.edges).map(|e| to_big(&inc.column(e))).collect();
    let diff: Vec<i64> = ind_a.iter().zip(ind_b).map(|(a, b)| a - b).collect();
    lattice_contains(&gens, &to_big(&diff))
}

type SideKey = (usize, usize, usize);

/// The lexicographically smaller of a link-triangle side and its glued image.
fn side_key(t: &Triangulation, s: usize, v: usize, w: usize) -> SideKey {
    let g = t.gluing(s, face_opposite(w));
    (s, v, w).min((g.tet, g.perm.apply(v), g.perm.apply(w)))
}

/// Position on the counter-clockwise perimeter `[0, 3)` of the link triangle
/// `(s, v)` of the point at parameter `p` on side `w`, where `p` is measured
/// on the canonical copy of the side from its smaller endpoint label.
fn perimeter_position(t: &Triangulation, s: usize, v: usize, w: usize, p: f64) -> f64 {
    let key = side_key(t, s, v, w);
    let x0 = (0..4).find(|&x| x != key.1 && x != key.2).unwrap();
    let x_local = if key == (s, v, w) {
        x0
    } else {
        t.gluing(key.0, face_opposite(key.2)).perm.apply(x0)
    };
    let labels: Vec<usize> = (0..4).filter(|&x| x != v).collect();
    let (a, b, c) = (labels[0], labels[1], labels[2]);
    let order = if t.link_ccw(v, a, b, c) { [a, b, c] } else { [a, c, b] };
    for k in 0..3 {
        let (x, y) = (order[k], order[(k + 1) % 3]);
        if x != w && y != w {
            return k as f64 + if x == x_local { p } else { 1.0 - p };
        }
    }
    unreachable!("side {w} of triangle at {v}")
}

/// Whether `x` lies strictly inside the counter-clockwise arc from `lo` to `hi`.
fn in_arc(x: f64, lo: f64, hi: f64) -> bool {
    let d = (x - lo).rem_euclid(3.0);
    d > 0.0 && d < (hi - lo).rem_euclid(3.0)
}

/// Algebraic intersection number `ι(α, β)` of two normal curves on the same
/// vertex link, counting crossings of corner arcs inside link triangles.
pub fn intersection_number(t: &Triangulation, alpha: &ArcPath, beta: &ArcPath) -> Result<i64> {
    if alpha.vertex_class != beta.vertex_class {
        return Err(Error::NotSameLink(alpha.vertex_class, beta.vertex_class));
    }
    let curves = [alpha, beta];
    let mut on_side: HashMap<SideKey, Vec<(usize, usize)>> = HashMap::new();
    for (cid, c) in curves.iter().enumerate() {
        for (k, s) in c.steps.iter().enumerate() {
            let (_, b, _) = s.labels();
            on_side
                .entry(side_key(t, s.tet, s.vertex, b))
                .or_default()
                .push((cid, k));
        }
    }
    let mut param: HashMap<(usize, usize), f64> = HashMap::new();
    for pts in on_side.values_mut() {
        pts.sort_unstable();
        let n = pts.len() as f64 + 1.0;
        for (r, &key) in pts.iter().enumerate() {
            param.insert(key, (r as f64 + 1.0) / n);
        }
    }
    let arcs = |cid: usize| -> Vec<((usize, usize), f64, f64)> {
        let c = curves[cid];
        let len = c.steps.len();
        c.steps
            .iter()
            .enumerate()
            .map(|(k, s)| {
                let (a, b, _) = s.labels();
                let p_in = param[&(cid, (k + len - 1) % len)];
                let p_out = param[&(cid, k)];
                (
                    (s.tet, s.vertex),
                    perimeter_position(t, s.tet, s.vertex, a, p_in),
                    perimeter_position(t, s.tet, s.vertex, b, p_out),
                )
            })
            .collect()
    };
    let (arcs_a, arcs_b) = (arcs(0), arcs(1));
    let mut total = 0;
    for (tri_a, a1, a2) in &arcs_a {
        for (tri_b, b1, b2) in &arcs_b {
            if tri_a != tri_b {
                continue;
            }
            let c = in_arc(*b1, *a1, *a2);
            let d = in_arc(*b2, *a1, *a2);
            if c && !d {
                total += 1;
            } else if d && !c {
                total -= 1;
            }
        }
    }
    Ok(total)
}

/// A random closed normal curve: a random walk through link triangles,
/// truncated to its first cycle. Starts on `vertex_class` if given.
pub fn random_closed_curve<R: Rng + ?Sized>(t: &Triangulation, rng: &mut R, vertex_class: Option<usize>) -> ArcPath {
    let (s, v) = match vertex_class {
        Some(vc) => {
            let members = &t.vertex_classes()[vc].members;
            members[rng.random_range(0..members.len())]
        }
        None => (rng.random_range(0..t.tet_count()), rng.random_range(0..4)),
    };
    let choices: Vec<usize> = (0..4).filter(|&x| x != v).collect();
    let a = choices[rng.random_range(0..3)];
    let mut seen: HashMap<(usize, usize, usize), usize> = HashMap::new();
    let mut steps = Vec::new();
    let mut state = (s, v, a);
    while !seen.contains_key(&state) {
        seen.insert(state, steps.len());
        let (s, v, a) = state;
        let exits: Vec<usize> = (0..4).filter(|&x| x != v && x != a).collect();
        let b = exits[rng.random_range(0..2)];
        steps.push(ArcStep {
            tet: s,
            vertex: v,
            enter: face_opposite(a),
            exit: face_opposite(b),
        });
        let g = t.gluing(s, face_opposite(b));
        state = (g.tet, g.perm.apply(v), g.perm.apply(b));
    }
    let start = seen[&state];
    let steps = steps.split_off(start);
    ArcPath {
        vertex_class: t.vertex_class_of(steps[0].tet, steps[0].vertex),
        steps,
    }
}

/// A curve given either as an arc path or directly as an index vector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "format", rename_all = "lowercase")]
pub enum CurveSpec {
    Arcpath { name: String, steps: Vec<ArcStep> },
    Indvector { name: String, entries: Vec<IndexEntry> },
}

/// One term of an index vector: coefficient on the quad of `tet` at the
/// given prime level (`"z"`, `"z'"` or `"z''"`) relative to the shape
/// convention in force.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexEntry {
    pub tet: usize,
    pub quad: String,
    pub coefficient: i64,
}

impl CurveSpec {
    pub fn name(&self) -> &str {
        match self {
            CurveSpec::Arcpath { name, .. } | CurveSpec::Indvector { name, .. } => name,
        }
    }

    /// The index vector of the curve, with the arc path if there is one.
    pub fn resolve(&self, t: &Triangulation, conv: &ShapeConvention) -> Result<(Vec<i64>, Option<ArcPath>)> {
        match self {
            CurveSpec::Arcpath { steps, .. } => {
                let path = ArcPath::new(t, steps.clone())?;
                Ok((index_vector(t, &path), Some(path)))
            }
            CurveSpec::Indvector { entries, .. } => {
                let mut ind = vec![0i64; 3 * t.tet_count()];
                for e in entries {
                    if e.tet >= t.tet_count() {
                        return Err(Error::InvalidPath(format!("tetrahedron {} out of range", e.tet)));
                    }
                    let level = match e.quad.trim() {
                        "z" => 0,
                        "z'" => 1,
                        "z''" => 2,
                        other => return Err(Error::InvalidPath(format!("unknown quad {other:?}"))),
                    };
                    ind[conv.quad_at_level(e.tet, level)] += e.coefficient;
                }
                Ok((ind, None))
            }
        }
    }
}

/// `Π z^{ind}` in preferred-value notation with numerator and denominator,
/// e.g. `z0' / z2''`.
pub fn holonomy_monomial_string(ind: &[i64], conv: &ShapeConvention) -> String {
    let mut num = Vec::new();
    let mut den = Vec::new();
    for s in 0..conv.tet_count() {
        for k in 0..3 {
            let m = ind[conv.quad_at_level(s, k)];
            let sym = format!("z{s}{}", "'".repeat(k));
            let term = if m.abs() == 1 {
                sym
            } else {
                format!("{sym}^{}", m.abs())
            };
            match m.signum() {
                1 => num.push(term),
                -1 => den.push(term),
                _ => {}
            }
        }
    }
    let num = if num.is_empty() { "1".to_string() } else { num.join(" ") };
    if den.is_empty() {
        num
    } else {
        format!("{num} / {}", den.join(" "))
    }
}
