//! Geodesic triangulations of the spherical cap `K ∩ S²`.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::geometry::{cross, det, dot, norm, normalize, scale, sub, PolyhedralCone, Vec3};

/// A base spherical triangle subdivided `resolution` times per side.
#[derive(Clone, Debug)]
struct Patch {
    corners: [Vec3; 3],
    resolution: usize,
    /// Triangle index for (i, j, up): `up[i * (k + 1) + j]`, `down[...]`.
    up: Vec<usize>,
    down: Vec<usize>,
}

/// Triangulated spherical cap with boundary arcs labelled by face index.
#[derive(Clone, Debug)]
pub struct SphericalCap {
    pub vertices: Vec<Vec3>,
    pub triangles: Vec<[usize; 3]>,
    /// Boundary mesh edges with the face label of the arc they lie on.
    pub boundary: Vec<([usize; 2], usize)>,
    patches: Vec<Patch>,
}

struct Builder {
    vertices: Vec<Vec3>,
    triangles: Vec<[usize; 3]>,
    boundary: Vec<([usize; 2], usize)>,
    patches: Vec<Patch>,
    edge_points: HashMap<(usize, usize, usize), usize>,
    corner_ids: Vec<usize>,
}

impl Builder {
    fn new(base: &[Vec3]) -> Self {
        let vertices: Vec<Vec3> = base.iter().map(|&v| normalize(v).unwrap()).collect();
        let corner_ids = (0..vertices.len()).collect();
        Builder {
            vertices,
            triangles: Vec::new(),
            boundary: Vec::new(),
            patches: Vec::new(),
            edge_points: HashMap::new(),
            corner_ids,
        }
    }

    /// Vertex at step `s` of `k` along the base edge `a -> b`.
    fn edge_point(&mut self, a: usize, b: usize, s: usize, k: usize) -> usize {
        if s == 0 {
            return self.corner_ids[a];
        }
        if s == k {
            return self.corner_ids[b];
        }
        let (lo, hi, step) = if a < b { (a, b, s) } else { (b, a, k - s) };
        if let Some(&id) = self.edge_points.get(&(lo, hi, step)) {
            return id;
        }
        let t = step as f64 / k as f64;
        let (p, q) = (self.vertices[lo], self.vertices[hi]);
        let v = normalize(std::array::from_fn(|i| (1.0 - t) * p[i] + t * q[i])).unwrap();
        self.vertices.push(v);
        let id = self.vertices.len() - 1;
        self.edge_points.insert((lo, hi, step), id);
        id
    }

    /// Subdivides base triangle (a, b, c); `labels[e]` tags base edge e
    /// (a-b, b-c, c-a) as a boundary arc.
    fn add_patch(&mut self, tri: [usize; 3], labels: [Option<usize>; 3], k: usize) {
        let [a, b, c] = tri;
        let corners = [self.vertices[a], self.vertices[b], self.vertices[c]];
        let stride = k + 1;
        let mut grid = vec![usize::MAX; stride * stride];
        for i in 0..=k {
            for j in 0..=(k - i) {
                let id = if j == 0 {
                    self.edge_point(a, b, i, k)
                } else if i == 0 {
                    self.edge_point(a, c, j, k)
                } else if i + j == k {
                    self.edge_point(b, c, j, k)
                } else {
                    let w = [(k - i - j) as f64, i as f64, j as f64];
                    let p = std::array::from_fn(|d| {
                        (w[0] * corners[0][d] + w[1] * corners[1][d] + w[2] * corners[2][d])
                            / k as f64
                    });
                    self.vertices.push(normalize(p).unwrap());
                    self.vertices.len() - 1
                };
                grid[i * stride + j] = id;
            }
        }
        let g = |i: usize, j: usize| grid[i * stride + j];
        let mut up = vec![usize::MAX; stride * stride];
        let mut down = vec![usize::MAX; stride * stride];
        for i in 0..k {
            for j in 0..(k - i) {
                self.triangles.push([g(i, j), g(i + 1, j), g(i, j + 1)]);
                up[i * stride + j] = self.triangles.len() - 1;
                if i + j + 1 < k {
                    self.triangles.push([g(i + 1, j), g(i + 1, j + 1), g(i, j + 1)]);
                    down[i * stride + j] = self.triangles.len() - 1;
                }
            }
        }
        if let Some(f) = labels[0] {
            for s in 0..k {
                self.boundary.push(([g(s, 0), g(s + 1, 0)], f));
            }
        }
        if let Some(f) = labels[1] {
            for s in 0..k {
                self.boundary.push(([g(k - s, s), g(k - s - 1, s + 1)], f));
            }
        }
        if let Some(f) = labels[2] {
            for s in 0..k {
                self.boundary.push(([g(0, k - s), g(0, k - s - 1)], f));
            }
        }
        self.patches.push(Patch {
            corners,
            resolution: k,
            up,
            down,
        });
    }

    fn finish(self) -> SphericalCap {
        SphericalCap {
            vertices: self.vertices,
            triangles: self.triangles,
            boundary: self.boundary,
            patches: self.patches,
        }
    }
}

fn check_resolution(resolution: usize) -> Result<()> {
    if resolution == 0 {
        Err(Error::InvalidParameter("mesh resolution must be at least 1".into()))
    } else {
        Ok(())
    }
}

impl SphericalCap {
    /// Triangulates the cap of `cone` with `resolution` subdivisions along
    /// every base arc.
    ///
    /// Convex caps are fanned from their first boundary vertex (a triangular
    /// cap is a single base triangle); nonconvex caps are fanned from the
    /// cone's star center.
    pub fn from_cone(cone: &PolyhedralCone, resolution: usize) -> Result<Self> {
        check_resolution(resolution)?;
        let cycle = cone.cycle();
        let faces = cone.cycle_faces();
        let n = cycle.len();
        if cone.cap_area() <= 0.0 {
            return Err(Error::Geometry("empty spherical cap".into()));
        }
        if cone.is_convex() {
            let base: Vec<Vec3> = cycle.iter().map(|&j| cone.edges()[j]).collect();
            let mut b = Builder::new(&base);
            for i in 1..n - 1 {
                let labels = [
                    (i == 1).then_some(faces[0]),
                    Some(faces[i]),
                    (i == n - 2).then_some(faces[n - 1]),
                ];
                b.add_patch([0, i, i + 1], labels, resolution);
            }
            Ok(b.finish())
        } else {
            let mut base: Vec<Vec3> = cycle.iter().map(|&j| cone.edges()[j]).collect();
            base.push(cone.center());
            let mut b = Builder::new(&base);
            for i in 0..n {
                b.add_patch([n, i, (i + 1) % n], [None, Some(faces[i]), None], resolution);
            }
            Ok(b.finish())
        }
    }

    /// Upper hemisphere `z > 0`; the equator carries face label 0.
    pub fn hemisphere(resolution: usize) -> Result<Self> {
        check_resolution(resolution)?;
        let mut b = Builder::new(&[
            [1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [-1.0, 0.0, 0.0],
            [0.0, -1.0, 0.0],
            [0.0, 0.0, 1.0],
        ]);
        for i in 0..4 {
            b.add_patch([i, (i + 1) % 4, 4], [Some(0), None, None], resolution);
        }
        Ok(b.finish())
    }

    /// The whole sphere (no boundary), from a subdivided octahedron.
    pub fn sphere(resolution: usize) -> Result<Self> {
        check_resolution(resolution)?;
        let mut b = Builder::new(&[
            [1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [-1.0, 0.0, 0.0],
            [0.0, -1.0, 0.0],
            [0.0, 0.0, 1.0],
            [0.0, 0.0, -1.0],
        ]);
        for i in 0..4 {
            let (p, q) = (i, (i + 1) % 4);
            b.add_patch([p, q, 4], [None; 3], resolution);
            b.add_patch([q, p, 5], [None; 3], resolution);
        }
        Ok(b.finish())
    }

    /// Vertices lying on a boundary arc with one of the given face labels.
    pub fn boundary_vertices(&self, labels: impl Fn(usize) -> bool) -> Vec<bool> {
        let mut mark = vec![false; self.vertices.len()];
        for &([a, b], f) in &self.boundary {
            if labels(f) {
                mark[a] = true;
                mark[b] = true;
            }
        }
        mark
    }

    /// Sum of flat triangle areas.
    pub fn area(&self) -> f64 {
        self.triangles
            .iter()
            .map(|t| {
                let [a, b, c] = t.map(|i| self.vertices[i]);
                0.5 * norm(cross(sub(b, a), sub(c, a)))
            })
            .sum()
    }

    pub fn max_edge_length(&self) -> f64 {
        self.triangles
            .iter()
            .flat_map(|t| {
                let [a, b, c] = t.map(|i| self.vertices[i]);
                [norm(sub(a, b)), norm(sub(b, c)), norm(sub(c, a))]
            })
            .fold(0.0, f64::max)
    }

    /// Triangle whose spherical image contains the direction `x`, with the
    /// barycentric weights of the radial projection onto the flat triangle.
    pub fn locate(&self, x: Vec3) -> Option<(usize, [f64; 3])> {
        let x = normalize(x)?;
        let tol = 1e-12;
        for patch in &self.patches {
            let [a, b, c] = patch.corners;
            let d = det(a, b, c);
            let wa = det(x, b, c) / d;
            let wb = det(a, x, c) / d;
            let wc = det(a, b, x) / d;
            if wa < -1e-9 || wb < -1e-9 || wc < -1e-9 {
                continue;
            }
            let s = wa + wb + wc;
            let k = patch.resolution;
            let stride = k + 1;
            let gi = ((wb / s) * k as f64) as isize;
            let gj = ((wc / s) * k as f64) as isize;
            for radius in [2isize, k as isize] {
                for i in (gi - radius).max(0)..=(gi + radius).min(k as isize - 1) {
                    for j in (gj - radius).max(0)..=(gj + radius).min(k as isize - 1 - i) {
                        let idx = i as usize * stride + j as usize;
                        for &t in [patch.up[idx], patch.down[idx]].iter() {
                            if t == usize::MAX {
                                continue;
                            }
                            if let Some(w) = self.spherical_barycentric(t, x, tol) {
                                return Some((t, w));
                            }
                        }
                    }
                }
            }
        }
        None
    }

    fn spherical_barycentric(&self, t: usize, x: Vec3, tol: f64) -> Option<[f64; 3]> {
        let [a, b, c] = self.triangles[t].map(|i| self.vertices[i]);
        let d = det(a, b, c);
        let w = [det(x, b, c) / d, det(a, x, c) / d, det(a, b, x) / d];
        if w.iter().all(|&v| v >= -tol) {
            let s: f64 = w.iter().sum();
            Some(w.map(|v| v / s))
        } else {
            None
        }
    }

    /// Geodesic center of a triangle.
    pub fn triangle_center(&self, t: usize) -> Vec3 {
        let [a, b, c] = self.triangles[t].map(|i| self.vertices[i]);
        normalize(scale([a[0] + b[0] + c[0], a[1] + b[1] + c[1], a[2] + b[2] + c[2]], 1.0 / 3.0))
            .unwrap()
    }
}

/// Angle at `a` of the spherical triangle (a, b, c).
pub fn spherical_angle(a: Vec3, b: Vec3, c: Vec3) -> f64 {
    let tb = sub(b, scale(a, dot(a, b)));
    let tc = sub(c, scale(a, dot(a, c)));
    (dot(tb, tc) / (norm(tb) * norm(tc))).clamp(-1.0, 1.0).acos()
}
