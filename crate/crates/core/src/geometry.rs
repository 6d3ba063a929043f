//! Polyhedral cones with apex at the origin, their truncations, and the
//! distance functions to the singular set (apex plus edge rays).
//!
//! Indices of edges and faces are zero-based throughout the crate.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

pub type Vec3 = [f64; 3];

pub fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn norm(a: Vec3) -> f64 {
    dot(a, a).sqrt()
}

pub fn add(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub fn sub(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub fn scale(a: Vec3, c: f64) -> Vec3 {
    [a[0] * c, a[1] * c, a[2] * c]
}

pub fn normalize(a: Vec3) -> Option<Vec3> {
    let n = norm(a);
    (n > 0.0 && n.is_finite()).then(|| scale(a, 1.0 / n))
}

/// Triple product `a · (b × c)`.
pub fn det(a: Vec3, b: Vec3, c: Vec3) -> f64 {
    dot(a, cross(b, c))
}

/// Distance from `x` to the ray `{t e : t >= 0}` for a unit direction `e`.
pub fn distance_to_ray(x: Vec3, e: Vec3) -> f64 {
    let t = dot(x, e);
    if t <= 0.0 {
        norm(x)
    } else {
        norm(sub(x, scale(e, t)))
    }
}

/// Axis-aligned box.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Aabb {
    pub lo: Vec3,
    pub hi: Vec3,
}

impl Aabb {
    pub fn new(lo: Vec3, hi: Vec3) -> Self {
        Aabb { lo, hi }
    }

    pub fn center(&self) -> Vec3 {
        std::array::from_fn(|i| 0.5 * (self.lo[i] + self.hi[i]))
    }

    pub fn half_extent(&self) -> Vec3 {
        std::array::from_fn(|i| 0.5 * (self.hi[i] - self.lo[i]))
    }

    pub fn contains_point(&self, x: Vec3) -> bool {
        (0..3).all(|i| self.lo[i] <= x[i] && x[i] <= self.hi[i])
    }

    pub fn corners(&self) -> [Vec3; 8] {
        std::array::from_fn(|c| {
            std::array::from_fn(|i| if c >> i & 1 == 0 { self.lo[i] } else { self.hi[i] })
        })
    }

    /// Euclidean distance from the box to the point `p`.
    pub fn distance_to_point(&self, p: Vec3) -> f64 {
        let mut d2 = 0.0;
        for i in 0..3 {
            let excess = if p[i] < self.lo[i] {
                self.lo[i] - p[i]
            } else if p[i] > self.hi[i] {
                p[i] - self.hi[i]
            } else {
                0.0
            };
            d2 += excess * excess;
        }
        d2.sqrt()
    }

    /// Exact distance from the box to the ray `{t e : t >= 0}`.
    ///
    /// The squared distance is a convex piecewise quadratic in `t`; every
    /// piece is minimised in closed form.
    pub fn distance_to_ray(&self, e: Vec3) -> f64 {
        let mut breaks = [0.0f64; 7];
        let mut nb = 1;
        for i in 0..3 {
            if e[i] != 0.0 {
                for bound in [self.lo[i], self.hi[i]] {
                    let t = bound / e[i];
                    if t > 0.0 {
                        breaks[nb] = t;
                        nb += 1;
                    }
                }
            }
        }
        let breaks = &mut breaks[..nb];
        breaks.sort_by(f64::total_cmp);

        let dist2 = |t: f64| {
            let mut d2 = 0.0;
            for i in 0..3 {
                let v = t * e[i];
                let excess = if v < self.lo[i] {
                    self.lo[i] - v
                } else if v > self.hi[i] {
                    v - self.hi[i]
                } else {
                    0.0
                };
                d2 += excess * excess;
            }
            d2
        };

        let mut best = f64::INFINITY;
        for (idx, &t0) in breaks.iter().enumerate() {
            let t1 = breaks.get(idx + 1).copied().unwrap_or(f64::INFINITY);
            let probe = if t1.is_finite() { 0.5 * (t0 + t1) } else { t0 + 1.0 };
            // quadratic a t^2 + b t on this piece
            let (mut a, mut b) = (0.0, 0.0);
            for i in 0..3 {
                let v = probe * e[i];
                let bound = if v < self.lo[i] {
                    Some(self.lo[i])
                } else if v > self.hi[i] {
                    Some(self.hi[i])
                } else {
                    None
                };
                if let Some(c) = bound {
                    a += e[i] * e[i];
                    b -= 2.0 * e[i] * c;
                }
            }
            let t = if a > 0.0 { (-b / (2.0 * a)).clamp(t0, t1) } else { t0 };
            best = best.min(dist2(t));
            if t1.is_finite() {
                best = best.min(dist2(t1));
            }
        }
        best.max(0.0).sqrt()
    }

    /// Largest distance from a point of the box to the ray (attained at a
    /// corner, since the ray distance is convex).
    pub fn max_distance_to_ray(&self, e: Vec3) -> f64 {
        self.corners()
            .iter()
            .map(|&c| distance_to_ray(c, e))
            .fold(0.0, f64::max)
    }
}

/// One flat face of the cone, spanned by two edge rays.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Face {
    pub edges: [usize; 2],
    /// Outward unit normal.
    pub normal: Vec3,
}

/// Convex polyhedral cone given by generators and outward face normals.
#[derive(Clone, Debug)]
struct ConvexPiece {
    generators: Vec<Vec3>,
    normals: Vec<Vec3>,
}

impl ConvexPiece {
    fn contains(&self, x: Vec3) -> bool {
        self.normals.iter().all(|&n| dot(x, n) < 0.0)
    }

    /// Separating-axis test between the open box and the open cone.
    fn intersects_box(&self, aabb: &Aabb) -> bool {
        let c = aabb.center();
        let h = aabb.half_extent();
        let separated_on = |axis: Vec3| -> bool {
            let len = norm(axis);
            if len < 1e-14 {
                return false;
            }
            let mid = dot(c, axis);
            let rad = h[0] * axis[0].abs() + h[1] * axis[1].abs() + h[2] * axis[2].abs();
            let (bmin, bmax) = (mid - rad, mid + rad);
            let tol = 1e-12 * len * (1.0 + norm(c) + norm(h));
            let has_neg = self.generators.iter().any(|&g| dot(g, axis) < -1e-15 * len);
            let has_pos = self.generators.iter().any(|&g| dot(g, axis) > 1e-15 * len);
            let cmin = if has_neg { f64::NEG_INFINITY } else { 0.0 };
            let cmax = if has_pos { f64::INFINITY } else { 0.0 };
            bmax <= cmin + tol || bmin >= cmax - tol
        };
        for &n in &self.normals {
            if separated_on(n) {
                return false;
            }
        }
        for i in 0..3 {
            let mut axis = [0.0; 3];
            axis[i] = 1.0;
            if separated_on(axis) {
                return false;
            }
            for &g in &self.generators {
                if separated_on(cross(g, axis)) {
                    return false;
                }
            }
        }
        true
    }
}

/// An infinite polyhedral cone with apex at the origin.
#[derive(Clone, Debug)]
pub struct PolyhedralCone {
    edges: Vec<Vec3>,
    faces: Vec<Face>,
    convex: bool,
    /// Edge indices in boundary order, interior of the cap on the left.
    cycle: Vec<usize>,
    /// Face index between `cycle[i]` and `cycle[i + 1]`.
    cycle_faces: Vec<usize>,
    /// The two faces meeting at each edge, in boundary order (incoming, outgoing).
    edge_faces: Vec<[usize; 2]>,
    angles: Vec<f64>,
    pieces: Vec<ConvexPiece>,
    center: Vec3,
}

/// Tolerance below which an edge angle counts as flat.
const FLAT_TOL: f64 = 1e-9;

impl PolyhedralCone {
    /// Builds and validates a cone.
    ///
    /// Edge directions are normalised. A face normal may be `None`, in which
    /// case the face's edge pair is read in boundary order (interior of the
    /// cap on the left) and the outward normal is derived from it.
    /// `center` optionally names an interior direction from which the cap is
    /// star-shaped; it is only consulted for nonconvex cones.
    pub fn new(
        edges: Vec<Vec3>,
        faces: Vec<(usize, usize, Option<Vec3>)>,
        center: Option<Vec3>,
    ) -> Result<Self> {
        let n = edges.len();
        if n < 3 {
            return Err(Error::Geometry(format!(
                "a polyhedral cone needs at least 3 edges, got {n}"
            )));
        }
        if faces.len() != n {
            return Err(Error::Geometry(format!(
                "face count {} must equal edge count {n}",
                faces.len()
            )));
        }
        let edges: Vec<Vec3> = edges
            .into_iter()
            .enumerate()
            .map(|(j, e)| {
                normalize(e).ok_or_else(|| Error::Geometry(format!("edge {j} has zero direction")))
            })
            .collect::<Result<_>>()?;

        let mut built = Vec::with_capacity(n);
        for (f, (a, b, normal)) in faces.into_iter().enumerate() {
            if a >= n || b >= n || a == b {
                return Err(Error::Geometry(format!(
                    "face {f} references invalid edge pair ({a}, {b})"
                )));
            }
            let normal = match normal {
                Some(v) => normalize(v)
                    .ok_or_else(|| Error::Geometry(format!("face {f} has zero normal")))?,
                None => normalize(cross(edges[b], edges[a])).ok_or_else(|| {
                    Error::Geometry(format!("face {f}: edges {a} and {b} are collinear"))
                })?,
            };
            for e in [a, b] {
                if dot(edges[e], normal).abs() > 1e-10 {
                    return Err(Error::Geometry(format!(
                        "face {f}: edge {e} is not orthogonal to the face normal (dot = {:e})",
                        dot(edges[e], normal)
                    )));
                }
            }
            built.push(Face {
                edges: [a, b],
                normal,
            });
        }

        // adjacency: every edge in exactly two faces
        let mut incident: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (f, face) in built.iter().enumerate() {
            for &e in &face.edges {
                incident[e].push(f);
            }
        }
        if let Some(j) = incident.iter().position(|v| v.len() != 2) {
            return Err(Error::Geometry(format!(
                "edge {j} lies on {} faces; adjacent faces must share exactly one edge",
                incident[j].len()
            )));
        }

        // orient each face so the interior is on the left: (a x b) . n < 0
        for face in built.iter_mut() {
            let [a, b] = face.edges;
            let s = dot(cross(edges[a], edges[b]), face.normal);
            if s > 0.0 {
                face.edges = [b, a];
            } else if s == 0.0 {
                return Err(Error::Geometry("face spanned by collinear edges".into()));
            }
        }

        // walk the single boundary cycle
        let mut outgoing = vec![usize::MAX; n];
        let mut incoming = vec![usize::MAX; n];
        for (f, face) in built.iter().enumerate() {
            let [a, b] = face.edges;
            if outgoing[a] != usize::MAX || incoming[b] != usize::MAX {
                return Err(Error::Geometry(
                    "face normals are inconsistently oriented around the cap".into(),
                ));
            }
            outgoing[a] = f;
            incoming[b] = f;
        }
        let mut cycle = Vec::with_capacity(n);
        let mut cycle_faces = Vec::with_capacity(n);
        let mut e = 0;
        for _ in 0..n {
            cycle.push(e);
            let f = outgoing[e];
            cycle_faces.push(f);
            e = built[f].edges[1];
        }
        if e != 0 || {
            let mut seen = cycle.clone();
            seen.sort_unstable();
            seen.dedup();
            seen.len() != n
        } {
            return Err(Error::Geometry(
                "the face/edge adjacency graph is not a single cycle".into(),
            ));
        }
        let edge_faces: Vec<[usize; 2]> = (0..n).map(|j| [incoming[j], outgoing[j]]).collect();

        let mut cone = PolyhedralCone {
            edges,
            faces: built,
            convex: true,
            cycle,
            cycle_faces,
            edge_faces,
            angles: Vec::new(),
            pieces: Vec::new(),
            center: [0.0; 3],
        };
        cone.angles = (0..n).map(|j| cone.compute_edge_angle(j)).collect();
        if let Some(j) = cone.angles.iter().position(|t| (t - PI).abs() < FLAT_TOL) {
            return Err(Error::Geometry(format!(
                "edge {j} has angle pi (flat edge); flat edges are rejected as degenerate"
            )));
        }
        cone.convex = cone.angles.iter().all(|&t| t < PI);
        cone.build_pieces(center)?;
        Ok(cone)
    }

    /// Cone over a spherical polygon given by its vertices in counterclockwise
    /// order seen from outside (interior on the left).
    pub fn from_cap_polygon(vertices: &[Vec3], center: Option<Vec3>) -> Result<Self> {
        let n = vertices.len();
        let faces = (0..n).map(|i| (i, (i + 1) % n, None)).collect();
        Self::new(vertices.to_vec(), faces, center)
    }

    /// The positive octant `x, y, z > 0`.
    pub fn octant() -> Self {
        Self::from_cap_polygon(&[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]], None)
            .expect("octant is valid")
    }

    /// Complement of the closed positive octant (seven octants).
    pub fn fichera_complement() -> Self {
        Self::from_cap_polygon(
            &[[1.0, 0.0, 0.0], [0.0, 0.0, 1.0], [0.0, 1.0, 0.0]],
            Some([-1.0, -1.0, -1.0]),
        )
        .expect("Fichera complement is valid")
    }

    /// Cone over an L-shaped polygon in the plane `z = 1`. The edge along the
    /// `z` axis (index 0) is reentrant with angle `3 pi / 2`; its faces are the
    /// half-planes `{y = 0, x >= 0}` and `{x = 0, y >= 0}`.
    pub fn l_cone() -> Self {
        Self::from_cap_polygon(
            &[
                [0.0, 0.0, 1.0],
                [0.0, 1.0, 1.0],
                [-1.0, 1.0, 1.0],
                [-1.0, -1.0, 1.0],
                [1.0, -1.0, 1.0],
                [1.0, 0.0, 1.0],
            ],
            Some([-0.5, -0.5, 1.0]),
        )
        .expect("L-cone is valid")
    }

    pub fn n(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Vec3] {
        &self.edges
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn is_convex(&self) -> bool {
        self.convex
    }

    /// Edge indices in boundary order.
    pub fn cycle(&self) -> &[usize] {
        &self.cycle
    }

    /// Face joining `cycle()[i]` to `cycle()[i + 1]`.
    pub fn cycle_faces(&self) -> &[usize] {
        &self.cycle_faces
    }

    /// The two faces adjacent to edge `j`, as (incoming, outgoing) in
    /// boundary order.
    pub fn edge_faces(&self, j: usize) -> Result<[usize; 2]> {
        self.check_edge(j)?;
        Ok(self.edge_faces[j])
    }

    /// An interior direction from which the cap is star-shaped.
    pub fn center(&self) -> Vec3 {
        self.center
    }

    fn check_edge(&self, j: usize) -> Result<()> {
        if j >= self.n() {
            Err(Error::IndexOutOfRange {
                index: j,
                count: self.n(),
            })
        } else {
            Ok(())
        }
    }

    pub fn distance_to_vertex(x: Vec3) -> f64 {
        norm(x)
    }

    pub fn distance_to_edge(&self, x: Vec3, j: usize) -> Result<f64> {
        self.check_edge(j)?;
        Ok(distance_to_ray(x, self.edges[j]))
    }

    /// Distance to the singular set (apex and edge rays), not capped.
    pub fn singular_distance(&self, x: Vec3) -> f64 {
        self.edges
            .iter()
            .map(|&e| distance_to_ray(x, e))
            .fold(f64::INFINITY, f64::min)
    }

    /// `min(1, dist(x, S))`.
    pub fn min_singular_distance(&self, x: Vec3) -> f64 {
        self.singular_distance(x).min(1.0)
    }

    /// Membership of the open cone; the apex is excluded.
    pub fn contains(&self, x: Vec3) -> bool {
        if norm(x) == 0.0 {
            return false;
        }
        if self.convex {
            return self.pieces[0].contains(x);
        }
        self.winding_contains(x)
    }

    /// Great-circle crossing-parity test against an exterior reference point.
    fn winding_contains(&self, x: Vec3) -> bool {
        let Some(xh) = normalize(x) else {
            return false;
        };
        // exterior reference: just outside the face whose outward side faces x most
        let q = self
            .faces
            .iter()
            .map(|f| {
                let [a, b] = f.edges;
                let mid = normalize(add(self.edges[a], self.edges[b])).unwrap();
                normalize(add(mid, scale(f.normal, 1e-3))).unwrap()
            })
            .max_by(|a, b| dot(xh, *a).total_cmp(&dot(xh, *b)))
            .unwrap();
        let mut crossings = 0;
        for f in &self.faces {
            let [a, b] = f.edges;
            if arcs_cross(xh, q, self.edges[a], self.edges[b]) {
                crossings += 1;
            }
        }
        crossings % 2 == 1
    }

    /// Interior dihedral angle at edge `j`.
    pub fn edge_angle(&self, j: usize) -> Result<f64> {
        self.check_edge(j)?;
        Ok(self.angles[j])
    }

    fn compute_edge_angle(&self, j: usize) -> f64 {
        let e = self.edges[j];
        let [fin, fout] = self.edge_faces[j];
        let in_face_dir = |f: usize| {
            let other = self.faces[f].edges.iter().copied().find(|&k| k != j).unwrap();
            let o = self.edges[other];
            normalize(sub(o, scale(e, dot(o, e)))).unwrap()
        };
        let u = in_face_dir(fout);
        let w = in_face_dir(fin);
        let gamma = dot(u, w).clamp(-1.0, 1.0).acos();
        if dot(w, self.faces[fout].normal) < 0.0 {
            gamma
        } else {
            2.0 * PI - gamma
        }
    }

    fn build_pieces(&mut self, center: Option<Vec3>) -> Result<()> {
        if self.convex {
            self.center = normalize(self.edges.iter().fold([0.0; 3], |acc, &e| add(acc, e)))
                .ok_or_else(|| Error::Geometry("cone generators sum to zero".into()))?;
            self.pieces = vec![ConvexPiece {
                generators: self.edges.clone(),
                normals: self.faces.iter().map(|f| f.normal).collect(),
            }];
            return Ok(());
        }
        let sum = self.edges.iter().fold([0.0; 3], |acc, &e| add(acc, e));
        let nsum = self.faces.iter().fold([0.0; 3], |acc, f| add(acc, f.normal));
        let candidates: Vec<Vec3> = center
            .into_iter()
            .chain([scale(sum, -1.0), sum, scale(nsum, -1.0), nsum])
            .filter_map(normalize)
            .collect();
        for c in candidates {
            if let Some(pieces) = self.fan_pieces(c) {
                self.center = c;
                self.pieces = pieces;
                return Ok(());
            }
        }
        Err(Error::Geometry(
            "nonconvex cap is not star-shaped from any candidate center; supply one".into(),
        ))
    }

    /// Trihedral cones over the fan triangles (c, a, b) of every boundary arc,
    /// if they tile the cap.
    fn fan_pieces(&self, c: Vec3) -> Option<Vec<ConvexPiece>> {
        let mut total = 0.0;
        let mut pieces = Vec::new();
        for &f in &self.cycle_faces {
            let [a, b] = self.faces[f].edges;
            let (ea, eb) = (self.edges[a], self.edges[b]);
            if det(c, ea, eb) <= 1e-12 {
                return None;
            }
            // angle at c between the great circles towards a and b
            let ta = normalize(sub(ea, scale(c, dot(ea, c))))?;
            let tb = normalize(sub(eb, scale(c, dot(eb, c))))?;
            let ang = dot(cross(ta, tb), c).atan2(dot(ta, tb));
            if ang <= 0.0 {
                return None;
            }
            total += ang;
            let normals = vec![
                normalize(cross(eb, ea))?,
                normalize(cross(ea, c))?,
                normalize(cross(c, eb))?,
            ];
            pieces.push(ConvexPiece {
                generators: vec![c, ea, eb],
                normals,
            });
        }
        ((total - 2.0 * PI).abs() < 1e-8).then_some(pieces)
    }

    /// Whether the open box meets the open cone.
    pub fn intersects_box(&self, aabb: &Aabb) -> bool {
        self.pieces.iter().any(|p| p.intersects_box(aabb))
    }

    /// Spherical area of the cap `K ∩ S²` (Gauss–Bonnet).
    pub fn cap_area(&self) -> f64 {
        let n = self.n() as f64;
        // interior angles of the spherical polygon equal the dihedral angles
        self.angles.iter().sum::<f64>() - (n - 2.0) * PI
    }
}

/// Whether the minor great-circle arcs `p1p2` and `p3p4` cross.
fn arcs_cross(p1: Vec3, p2: Vec3, p3: Vec3, p4: Vec3) -> bool {
    let n1 = cross(p1, p2);
    let n2 = cross(p3, p4);
    let Some(d) = normalize(cross(n1, n2)) else {
        return false;
    };
    let on_arc = |c: Vec3, a: Vec3, b: Vec3, n: Vec3| dot(cross(a, c), n) >= 0.0 && dot(cross(c, b), n) >= 0.0;
    [d, scale(d, -1.0)]
        .into_iter()
        .any(|c| on_arc(c, p1, p2, n1) && on_arc(c, p3, p4, n2))
}

/// A cone cut off at a finite radius.
#[derive(Clone, Debug)]
pub struct TruncatedCone {
    pub cone: PolyhedralCone,
    pub radius: f64,
}

impl TruncatedCone {
    pub fn new(cone: PolyhedralCone, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::Geometry(format!(
                "truncation radius must be positive, got {radius}"
            )));
        }
        Ok(TruncatedCone { cone, radius })
    }

    pub fn contains(&self, x: Vec3) -> bool {
        norm(x) < self.radius && self.cone.contains(x)
    }

    /// Box meets the cone and the open ball. Near the truncation sphere this
    /// is a slight over-approximation of meeting `K ∩ B(0, r)`.
    pub fn intersects_box(&self, aabb: &Aabb) -> bool {
        aabb.distance_to_point([0.0; 3]) < self.radius && self.cone.intersects_box(aabb)
    }

    pub fn volume(&self) -> f64 {
        self.cone.cap_area() * self.radius.powi(3) / 3.0
    }
}

/// Geometry block of the config file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeometryConfig {
    #[serde(default)]
    pub preset: Option<String>,
    #[serde(default)]
    pub edges: Vec<Vec3>,
    #[serde(default)]
    pub faces: Vec<FaceConfig>,
    #[serde(default)]
    pub center: Option<Vec3>,
    pub truncation_radius: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FaceConfig {
    pub edges: [usize; 2],
    #[serde(default)]
    pub normal: Option<Vec3>,
}

impl GeometryConfig {
    pub fn build(&self) -> Result<TruncatedCone> {
        let cone = match self.preset.as_deref() {
            Some("octant") => PolyhedralCone::octant(),
            Some("fichera_complement") => PolyhedralCone::fichera_complement(),
            Some("l_cone") => PolyhedralCone::l_cone(),
            Some(other) => {
                return Err(Error::Geometry(format!("unknown geometry preset '{other}'")))
            }
            None => PolyhedralCone::new(
                self.edges.clone(),
                self.faces
                    .iter()
                    .map(|f| (f.edges[0], f.edges[1], f.normal))
                    .collect(),
                self.center,
            )?,
        };
        TruncatedCone::new(cone, self.truncation_radius)
    }
}
