//! Edge and vertex pencil spectra for the Laplacian on a polyhedral cone.
//!
//! Edge eigenvalues are closed-form. Vertex eigenvalues come from the
//! Laplace–Beltrami operator on the spherical cap, discretised with
//! piecewise-linear surface finite elements.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{cross, dot, norm, sub, PolyhedralCone};
use crate::linalg::{lowest_eigenpairs, CsrMatrix};
use crate::mesh::SphericalCap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Bc {
    #[serde(rename = "D")]
    Dirichlet,
    #[serde(rename = "N")]
    Neumann,
}

impl Bc {
    pub fn symbol(self) -> &'static str {
        match self {
            Bc::Dirichlet => "D",
            Bc::Neumann => "N",
        }
    }
}

/// Boundary conditions of the two faces meeting at an edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeBc {
    DD,
    NN,
    Mixed,
}

impl EdgeBc {
    pub fn from_pair(a: Bc, b: Bc) -> Self {
        match (a, b) {
            (Bc::Dirichlet, Bc::Dirichlet) => EdgeBc::DD,
            (Bc::Neumann, Bc::Neumann) => EdgeBc::NN,
            _ => EdgeBc::Mixed,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            EdgeBc::DD => "D/D",
            EdgeBc::NN => "N/N",
            EdgeBc::Mixed => "D/N",
        }
    }
}

/// One boundary condition per face.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BcAssignment {
    faces: Vec<Bc>,
}

impl BcAssignment {
    pub fn new(faces: Vec<Bc>) -> Self {
        BcAssignment { faces }
    }

    pub fn uniform(n: usize, bc: Bc) -> Self {
        BcAssignment {
            faces: vec![bc; n],
        }
    }

    pub fn face(&self, f: usize) -> Bc {
        self.faces[f]
    }

    pub fn faces(&self) -> &[Bc] {
        &self.faces
    }

    pub fn check(&self, cone: &PolyhedralCone) -> Result<()> {
        if self.faces.len() != cone.n() {
            return Err(Error::Config(format!(
                "{} boundary conditions for {} faces",
                self.faces.len(),
                cone.n()
            )));
        }
        Ok(())
    }

    /// Face indices with Dirichlet data.
    pub fn dirichlet_faces(&self) -> Vec<usize> {
        (0..self.faces.len())
            .filter(|&f| self.faces[f] == Bc::Dirichlet)
            .collect()
    }

    pub fn neumann_faces(&self) -> Vec<usize> {
        (0..self.faces.len())
            .filter(|&f| self.faces[f] == Bc::Neumann)
            .collect()
    }

    pub fn edge_bc(&self, cone: &PolyhedralCone, j: usize) -> Result<EdgeBc> {
        let [a, b] = cone.edge_faces(j)?;
        Ok(EdgeBc::from_pair(self.faces[a], self.faces[b]))
    }

    /// Edges with at least one adjacent Dirichlet face.
    pub fn jtilde(&self, cone: &PolyhedralCone) -> Result<Vec<usize>> {
        let mut out = Vec::new();
        for j in 0..cone.n() {
            let [a, b] = cone.edge_faces(j)?;
            if self.faces[a] == Bc::Dirichlet || self.faces[b] == Bc::Dirichlet {
                out.push(j);
            }
        }
        Ok(out)
    }
}

fn check_theta(theta: f64) -> Result<()> {
    if !(theta > 0.0 && theta < 2.0 * PI + 1e-12) {
        return Err(Error::InvalidParameter(format!(
            "edge angle {theta} outside (0, 2π]"
        )));
    }
    Ok(())
}

/// Edge eigenvalues `λ_m` for each `m` in `ms`.
///
/// Neumann numbering starts at `m = 1` with `λ = 0`.
pub fn edge_eigenvalues(theta: f64, bc: EdgeBc, ms: impl IntoIterator<Item = u32>) -> Result<Vec<f64>> {
    check_theta(theta)?;
    ms.into_iter()
        .map(|m| {
            if m == 0 {
                return Err(Error::InvalidParameter("edge eigenvalue index starts at 1".into()));
            }
            let m = m as f64;
            Ok(match bc {
                EdgeBc::DD => m * PI / theta,
                EdgeBc::NN => (m - 1.0) * PI / theta,
                EdgeBc::Mixed => (m - 0.5) * PI / theta,
            })
        })
        .collect()
}

/// Half-widths `(δ₊, δ₋)` of the eigenvalue-free strip of the edge pencil.
pub fn edge_strip(theta: f64, bc: EdgeBc) -> Result<(f64, f64)> {
    check_theta(theta)?;
    let d = match bc {
        EdgeBc::DD | EdgeBc::NN => PI / theta,
        EdgeBc::Mixed => PI / (2.0 * theta),
    };
    Ok((d, d))
}

#[derive(Clone, Debug, Serialize)]
pub struct EdgeSpectrum {
    pub edge: usize,
    pub theta: f64,
    pub bc: &'static str,
    pub strip: (f64, f64),
    pub eigenvalues: Vec<f64>,
    /// Neumann edges carry the excluded eigenvalue `λ = 0` at `m = 1`.
    pub has_zero: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct VertexEigen {
    /// Pencil index: starts at 0 for pure Neumann caps, 1 otherwise.
    pub l: usize,
    pub lambda: f64,
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    pub error: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct PencilSpectrum {
    pub edges: Vec<EdgeSpectrum>,
    pub vertex: Vec<VertexEigen>,
    pub resolution: usize,
}

pub fn pencil_exponents(lambda: f64) -> (f64, f64) {
    let s = (lambda.max(0.0) + 0.25).sqrt();
    (-0.5 + s, -0.5 - s)
}

/// Stiffness and consistent mass matrices of P1 elements on the flat
/// triangles of the cap mesh, restricted to `free` vertices.
fn assemble(cap: &SphericalCap, free: &[Option<usize>], nfree: usize) -> (CsrMatrix, CsrMatrix) {
    let mut kt = Vec::with_capacity(9 * cap.triangles.len());
    let mut mt = Vec::with_capacity(9 * cap.triangles.len());
    for tri in &cap.triangles {
        let p = tri.map(|v| cap.vertices[v]);
        let twice_area = norm(cross(sub(p[1], p[0]), sub(p[2], p[0])));
        let area = 0.5 * twice_area;
        for a in 0..3 {
            let Some(ia) = free[tri[a]] else { continue };
            for b in 0..3 {
                let Some(ib) = free[tri[b]] else { continue };
                let kab = if a == b {
                    let e = sub(p[(a + 2) % 3], p[(a + 1) % 3]);
                    dot(e, e) / (2.0 * twice_area)
                } else {
                    let c = 3 - a - b;
                    let (u, v) = (sub(p[a], p[c]), sub(p[b], p[c]));
                    -dot(u, v) / (2.0 * twice_area)
                };
                kt.push((ia, ib, kab));
                mt.push((ia, ib, if a == b { area / 6.0 } else { area / 12.0 }));
            }
        }
    }
    (CsrMatrix::from_triplets(nfree, kt), CsrMatrix::from_triplets(nfree, mt))
}

/// Lowest Laplace–Beltrami eigenpairs on the cap with Dirichlet conditions on
/// arcs whose face label satisfies `dirichlet`.
pub fn laplace_beltrami(
    cap: &SphericalCap,
    dirichlet: impl Fn(usize) -> bool,
    count: usize,
) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let fixed = cap.boundary_vertices(dirichlet);
    let mut free = vec![None; cap.vertices.len()];
    let mut nfree = 0;
    for (v, slot) in free.iter_mut().enumerate() {
        if !fixed[v] {
            *slot = Some(nfree);
            nfree += 1;
        }
    }
    if nfree < count {
        return Err(Error::Geometry(format!(
            "mesh has {nfree} free vertices, {count} eigenvalues requested"
        )));
    }
    let (k, m) = assemble(cap, &free, nfree);
    let pairs = lowest_eigenpairs(&k, &m, count, -1.0, 1e-8, 2000)?;
    let vectors = pairs
        .vectors
        .iter()
        .map(|x| free.iter().map(|f| f.map_or(0.0, |i| x[i])).collect())
        .collect();
    Ok((pairs.values, vectors))
}

/// Vertex eigenvalues at resolution `2^refinements`, with a Richardson error
/// estimate from the previous resolution.
pub fn vertex_eigenvalues(
    cap_at: impl Fn(usize) -> Result<SphericalCap>,
    dirichlet: impl Fn(usize) -> bool + Copy,
    any_dirichlet: bool,
    count: usize,
    refinements: u32,
) -> Result<Vec<VertexEigen>> {
    if count == 0 {
        return Err(Error::InvalidParameter("count must be at least 1".into()));
    }
    if refinements == 0 {
        return Err(Error::InvalidParameter("need at least one refinement".into()));
    }
    let fine_res = 1usize << refinements;
    let (fine, _) = laplace_beltrami(&cap_at(fine_res)?, dirichlet, count)?;
    let coarse = laplace_beltrami(&cap_at(fine_res / 2)?, dirichlet, count)
        .map(|(v, _)| v)
        .ok();
    let base = usize::from(any_dirichlet);
    Ok(fine
        .iter()
        .enumerate()
        .map(|(i, &lambda)| {
            let lambda = lambda.max(0.0);
            let (lp, lm) = pencil_exponents(lambda);
            let error = coarse
                .as_ref()
                .map_or(f64::NAN, |c| (c[i] - lambda).abs() / 3.0);
            VertexEigen {
                l: base + i,
                lambda,
                lambda_plus: lp,
                lambda_minus: lm,
                error,
            }
        })
        .collect())
}

/// Full pencil data for a cone with the given boundary conditions.
pub fn pencil_spectrum(
    cone: &PolyhedralCone,
    bc: &BcAssignment,
    edge_count: u32,
    vertex_count: usize,
    refinements: u32,
) -> Result<PencilSpectrum> {
    bc.check(cone)?;
    let mut edges = Vec::with_capacity(cone.n());
    for j in 0..cone.n() {
        let theta = cone.edge_angle(j)?;
        let ebc = bc.edge_bc(cone, j)?;
        edges.push(EdgeSpectrum {
            edge: j,
            theta,
            bc: ebc.label(),
            strip: edge_strip(theta, ebc)?,
            eigenvalues: edge_eigenvalues(theta, ebc, 1..=edge_count)?,
            has_zero: ebc == EdgeBc::NN,
        });
    }
    let faces = bc.faces().to_vec();
    let dirichlet = move |f: usize| faces[f] == Bc::Dirichlet;
    let any_d = !bc.dirichlet_faces().is_empty();
    let vertex = vertex_eigenvalues(
        |res| SphericalCap::from_cone(cone, res),
        &dirichlet,
        any_d,
        vertex_count,
        refinements,
    )?;
    Ok(PencilSpectrum {
        edges,
        vertex,
        resolution: 1 << refinements,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct StripCheck {
    pub line: f64,
    pub free: bool,
    pub distance: f64,
    pub nearest: f64,
    pub tolerance: f64,
}

/// Whether the line `Re λ = l - β - 3/2` avoids the vertex pencil spectrum.
///
/// `tol` defaults to `1e-3`; each exponent also gets its own error estimate
/// as margin.
pub fn strip_free_check(l: u32, beta: f64, vertex: &[VertexEigen], tol: Option<f64>) -> Result<StripCheck> {
    let line = l as f64 - beta - 1.5;
    let (Some(top), Some(bottom)) = (
        vertex.iter().map(|v| v.lambda_plus).reduce(f64::max),
        vertex.iter().map(|v| v.lambda_minus).reduce(f64::min),
    ) else {
        return Err(Error::Insufficient("empty vertex spectrum".into()));
    };
    if line > top || line < bottom {
        return Err(Error::Insufficient(format!(
            "line {line} lies outside the computed spectrum range [{bottom}, {top}]"
        )));
    }
    let base = tol.unwrap_or(1e-3);
    let mut nearest = f64::NAN;
    let mut distance = f64::INFINITY;
    let mut tolerance = base;
    let mut margin = f64::INFINITY;
    for v in vertex {
        // error of λ̃ mapped to the exponent scale
        let err = if v.error.is_finite() {
            v.error / (2.0 * (v.lambda.max(0.0) + 0.25).sqrt())
        } else {
            0.0
        };
        for x in [v.lambda_plus, v.lambda_minus] {
            let d = (line - x).abs();
            if d - (base + err) < margin {
                margin = d - (base + err);
                distance = d;
                nearest = x;
                tolerance = base + err;
            }
        }
    }
    Ok(StripCheck {
        line,
        free: margin > 0.0,
        distance,
        nearest,
        tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edge_formulas() {
        assert_eq!(edge_eigenvalues(PI / 2.0, EdgeBc::DD, [1]).unwrap(), vec![2.0]);
        assert_eq!(edge_eigenvalues(2.0 * PI, EdgeBc::NN, [2]).unwrap(), vec![0.5]);
        assert_eq!(edge_eigenvalues(2.0 * PI, EdgeBc::Mixed, [1]).unwrap(), vec![0.25]);
        assert_eq!(edge_strip(PI / 2.0, EdgeBc::DD).unwrap(), (2.0, 2.0));
        let (a, b) = edge_strip(1.5 * PI, EdgeBc::DD).unwrap();
        assert!((a - 2.0 / 3.0).abs() < 1e-15 && a == b);
        assert_eq!(edge_strip(PI / 2.0, EdgeBc::Mixed).unwrap(), (1.0, 1.0));
        assert!(edge_strip(0.0, EdgeBc::DD).is_err());
        assert!(edge_eigenvalues(1.0, EdgeBc::DD, [0]).is_err());
    }

    #[test]
    fn pencil_pair_relations() {
        for lam in [0.0, 2.0, 6.5, 12.0] {
            let (p, m) = pencil_exponents(lam);
            assert!((p + m + 1.0).abs() < 1e-12);
            assert!((p * m + lam).abs() < 1e-10);
        }
    }

    #[test]
    fn jtilde_on_mixed_octant() {
        let cone = PolyhedralCone::octant();
        let bc = BcAssignment::new(vec![Bc::Dirichlet, Bc::Neumann, Bc::Neumann]);
        let jt = bc.jtilde(&cone).unwrap();
        assert_eq!(jt.len(), 2);
        let mixed = (0..3)
            .filter(|&j| bc.edge_bc(&cone, j).unwrap() == EdgeBc::Mixed)
            .count();
        assert_eq!(mixed, 2);
    }

    #[test]
    fn hemisphere_dirichlet() {
        let ev = vertex_eigenvalues(SphericalCap::hemisphere, |_| true, true, 1, 4).unwrap();
        assert!((ev[0].lambda - 2.0).abs() < 0.02 * 2.0, "{:?}", ev[0]);
        assert_eq!(ev[0].l, 1);
    }

    #[test]
    fn neumann_constant_mode() {
        let cap = SphericalCap::from_cone(&PolyhedralCone::octant(), 8).unwrap();
        let (vals, vecs) = laplace_beltrami(&cap, |_| false, 2).unwrap();
        assert!(vals[0].abs() < 1e-8);
        let v = &vecs[0];
        let spread = v.iter().cloned().fold(f64::MIN, f64::max) - v.iter().cloned().fold(f64::MAX, f64::min);
        assert!(spread < 1e-6 * v[0].abs());
        assert!(vals[1] > 1.0);
    }

    #[test]
    fn strip_check_examples() {
        let vertex: Vec<VertexEigen> = [12.0, 30.0]
            .iter()
            .enumerate()
            .map(|(i, &lambda)| {
                let (p, m) = pencil_exponents(lambda);
                VertexEigen { l: i + 1, lambda, lambda_plus: p, lambda_minus: m, error: 0.0 }
            })
            .collect();
        let ok = strip_free_check(2, 0.0, &vertex, None).unwrap();
        assert!(ok.free);
        assert!((ok.distance - 2.5).abs() < 1e-12);
        assert!(!strip_free_check(2, -2.5, &vertex, None).unwrap().free);
        assert!(strip_free_check(2, -10.0, &vertex, None).is_err());
    }
}
