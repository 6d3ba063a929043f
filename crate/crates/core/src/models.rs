//! Model singular functions with exact derivatives.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{cross, dot, normalize, scale, sub, PolyhedralCone, Vec3};
use crate::jet::Jet;
use crate::mesh::SphericalCap;
use crate::pencil::{edge_eigenvalues, laplace_beltrami, pencil_exponents, Bc, BcAssignment, EdgeBc};
use crate::weighted::DerivativeOracle;

/// Radial cutoff equal to one below `inner` and zero beyond `outer`, with a
/// quintic transition (twice continuously differentiable).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cutoff {
    pub inner: f64,
    pub outer: f64,
}

impl Cutoff {
    pub fn new(inner: f64, outer: f64) -> Result<Self> {
        if !(inner > 0.0 && outer > inner) {
            return Err(Error::InvalidParameter(format!(
                "cutoff radii ({inner}, {outer}) must satisfy 0 < inner < outer"
            )));
        }
        Ok(Cutoff { inner, outer })
    }

    /// Default radii `(0.5, 0.9)` times `radius`.
    pub fn scaled(radius: f64) -> Self {
        Cutoff {
            inner: 0.5 * radius,
            outer: 0.9 * radius,
        }
    }

    pub fn apply(&self, rho: &Jet) -> Jet {
        let r = rho.value;
        if r <= self.inner {
            return Jet::constant(1.0);
        }
        if r >= self.outer {
            return Jet::constant(0.0);
        }
        let w = self.outer - self.inner;
        let t = (r - self.inner) / w;
        let t2 = t * t;
        let f0 = 1.0 - t2 * t * (10.0 - 15.0 * t + 6.0 * t2);
        let f1 = -30.0 * t2 * (1.0 - t) * (1.0 - t) / w;
        let f2 = -60.0 * t * (1.0 - t) * (1.0 - 2.0 * t) / (w * w);
        rho.chain(f0, f1, f2)
    }
}

/// Orthonormal frame of an edge: `axis` along the edge, `first` along the
/// face at angle zero, `second` pointing into the cone from that face.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EdgeFrame {
    pub axis: Vec3,
    pub first: Vec3,
    pub second: Vec3,
}

impl EdgeFrame {
    /// The dihedron with edge along `z` and first face the half-plane `y = 0, x > 0`.
    pub fn standard() -> Self {
        EdgeFrame {
            axis: [0.0, 0.0, 1.0],
            first: [1.0, 0.0, 0.0],
            second: [0.0, 1.0, 0.0],
        }
    }

    /// Frame at edge `j` of `cone`, measuring the angle from `face`.
    pub fn at_edge(cone: &PolyhedralCone, j: usize, face: usize) -> Result<Self> {
        let faces = cone.edge_faces(j)?;
        if !faces.contains(&face) {
            return Err(Error::InvalidParameter(format!("face {face} is not adjacent to edge {j}")));
        }
        let f = &cone.faces()[face];
        let other = if f.edges[0] == j { f.edges[1] } else { f.edges[0] };
        let axis = cone.edges()[j];
        let e = cone.edges()[other];
        let first = normalize(sub(e, scale(axis, dot(e, axis))))
            .ok_or_else(|| Error::Geometry(format!("face {face} is degenerate at edge {j}")))?;
        let second = scale(f.normal, -1.0);
        debug_assert!(dot(cross(first, second), axis).abs() > 0.5);
        Ok(EdgeFrame {
            axis,
            first,
            second,
        })
    }
}

#[derive(Clone, Debug)]
pub enum VertexProfile {
    /// `xyz / ρ³` on the octant.
    OctantXyz,
    /// `z / ρ` on the upper hemisphere.
    HemisphereZ,
    Constant,
    /// Piecewise-linear eigenfunction on a cap mesh.
    Mesh { cap: SphericalCap, values: Vec<f64> },
}

#[derive(Clone, Debug)]
pub enum SingularKind {
    Edge {
        frame: EdgeFrame,
        theta: f64,
        bc: EdgeBc,
        m: u32,
    },
    Vertex {
        profile: VertexProfile,
    },
}

/// `χ(ρ) r^λ T(λφ)` near an edge, or `χ(ρ) ρ^Λ ψ(ω)` at the vertex.
#[derive(Clone, Debug)]
pub struct SingularFunction {
    pub kind: SingularKind,
    pub exponent: f64,
    pub cutoff: Cutoff,
}

/// Edge singularity in the standard dihedron frame.
pub fn edge_singularity(theta: f64, bc: EdgeBc, m: u32, cutoff: Cutoff) -> Result<SingularFunction> {
    edge_singularity_in(EdgeFrame::standard(), theta, bc, m, cutoff)
}

pub fn edge_singularity_in(
    frame: EdgeFrame,
    theta: f64,
    bc: EdgeBc,
    m: u32,
    cutoff: Cutoff,
) -> Result<SingularFunction> {
    if m == 0 {
        return Err(Error::InvalidParameter("m must be at least 1".into()));
    }
    let exponent = edge_eigenvalues(theta, bc, [m])?[0];
    Ok(SingularFunction {
        kind: SingularKind::Edge {
            frame,
            theta,
            bc,
            m,
        },
        exponent,
        cutoff,
    })
}

/// Edge singularity at edge `j` of a cone; for mixed edges the angle is
/// measured from the Dirichlet face.
pub fn edge_singularity_on(
    cone: &PolyhedralCone,
    bc: &BcAssignment,
    j: usize,
    m: u32,
    cutoff: Cutoff,
) -> Result<SingularFunction> {
    bc.check(cone)?;
    let [f0, f1] = cone.edge_faces(j)?;
    let face = if bc.face(f0) == Bc::Neumann && bc.face(f1) == Bc::Dirichlet { f1 } else { f0 };
    let frame = EdgeFrame::at_edge(cone, j, face)?;
    edge_singularity_in(frame, cone.edge_angle(j)?, bc.edge_bc(cone, j)?, m, cutoff)
}

/// Analytic vertex singularities for the octant and hemisphere.
pub fn vertex_singularity_analytic(profile: VertexProfile, cutoff: Cutoff) -> Result<SingularFunction> {
    let exponent = match profile {
        VertexProfile::OctantXyz => 3.0,
        VertexProfile::HemisphereZ => 1.0,
        VertexProfile::Constant => 0.0,
        VertexProfile::Mesh { .. } => {
            return Err(Error::InvalidParameter("mesh profiles need an eigenvector".into()))
        }
    };
    Ok(SingularFunction {
        kind: SingularKind::Vertex { profile },
        exponent,
        cutoff,
    })
}

/// Vertex singularity from the `lidx`-th Laplace–Beltrami eigenfunction of
/// the cap mesh (`lidx` counted from 0 without Dirichlet arcs, else from 1).
pub fn vertex_singularity(
    cap: &SphericalCap,
    dirichlet: impl Fn(usize) -> bool,
    any_dirichlet: bool,
    lidx: usize,
    cutoff: Cutoff,
) -> Result<SingularFunction> {
    let base = usize::from(any_dirichlet);
    if lidx < base {
        return Err(Error::IndexOutOfRange { index: lidx, count: base });
    }
    let idx = lidx - base;
    let (vals, vecs) = laplace_beltrami(cap, dirichlet, idx + 1)?;
    let mut values = vecs[idx].clone();
    let peak = values.iter().cloned().fold(0.0f64, |a, v| if v.abs() > a.abs() { v } else { a });
    if peak != 0.0 {
        values.iter_mut().for_each(|v| *v /= peak);
    }
    Ok(SingularFunction {
        kind: SingularKind::Vertex {
            profile: VertexProfile::Mesh {
                cap: cap.clone(),
                values,
            },
        },
        exponent: pencil_exponents(vals[idx]).0,
        cutoff,
    })
}

impl SingularFunction {
    pub fn is_edge(&self) -> bool {
        matches!(self.kind, SingularKind::Edge { .. })
    }

    /// Angle from the first face, with the branch cut in the middle of the
    /// exterior wedge so the function is smooth across both faces.
    fn edge_angle_coordinate(frame: &EdgeFrame, theta: f64, x: Vec3) -> f64 {
        let cut = 0.5 * (theta + 2.0 * PI);
        let a = dot(x, frame.second).atan2(dot(x, frame.first));
        if a >= cut - 2.0 * PI {
            a
        } else {
            a + 2.0 * PI
        }
    }

    fn edge_jet(&self, frame: &EdgeFrame, theta: f64, bc: EdgeBc, x: Vec3) -> Jet {
        let p = Jet::point(x);
        let u = Jet::dot(&p, frame.first);
        let v = Jet::dot(&p, frame.second);
        let lam = self.exponent;
        let r2 = u * u + v * v;
        let phi_val = Self::edge_angle_coordinate(frame, theta, x);
        let mut phi = v.atan2(&u);
        phi.value = phi_val;
        let angular = match bc {
            EdgeBc::NN => (phi * lam).cos(),
            EdgeBc::DD | EdgeBc::Mixed => (phi * lam).sin(),
        };
        let radial = if lam == 0.0 {
            Jet::constant(1.0)
        } else {
            r2.powf(0.5 * lam)
        };
        let chi = self.cutoff.apply(&Jet::norm(&p));
        chi * radial * angular
    }

    fn vertex_jet(&self, profile: &VertexProfile, x: Vec3) -> Jet {
        let p = Jet::point(x);
        let chi = self.cutoff.apply(&Jet::norm(&p));
        match profile {
            VertexProfile::OctantXyz => chi * p[0] * p[1] * p[2],
            VertexProfile::HemisphereZ => chi * p[2],
            VertexProfile::Constant => chi,
            VertexProfile::Mesh { cap, values } => {
                let Some((t, _)) = cap.locate(x) else {
                    return Jet::constant(0.0);
                };
                let tri = cap.triangles[t];
                let [a, b, c] = tri.map(|i| cap.vertices[i]);
                // dual basis: c_i(x) = x . d_i with x = Σ c_i v_i
                let d = crate::geometry::det(a, b, c);
                let duals = [cross(b, c), cross(c, a), cross(a, b)].map(|w| scale(w, 1.0 / d));
                let coeffs = duals.map(|w| Jet::dot(&p, w));
                let total = coeffs[0] + coeffs[1] + coeffs[2];
                let psi = (coeffs[0] * values[tri[0]] + coeffs[1] * values[tri[1]] + coeffs[2] * values[tri[2]])
                    / total;
                let rho = Jet::norm(&p);
                chi * rho.powf(self.exponent) * psi
            }
        }
    }

    pub fn value(&self, x: Vec3) -> f64 {
        self.jet(x).value
    }
}

impl DerivativeOracle for SingularFunction {
    fn max_order(&self) -> u32 {
        match &self.kind {
            SingularKind::Vertex {
                profile: VertexProfile::Mesh { .. },
            } => 1,
            _ => 2,
        }
    }

    fn jet(&self, x: Vec3) -> Jet {
        match &self.kind {
            SingularKind::Edge { frame, theta, bc, .. } => self.edge_jet(frame, *theta, *bc, x),
            SingularKind::Vertex { profile } => self.vertex_jet(profile, x),
        }
    }
}

/// Smallest weight exponent for which `f` lies in the order-`l` space with
/// `p = 2`: the edge exponent `δ` for edge functions, the vertex exponent `β`
/// for analytic vertex functions.
pub fn membership_threshold(f: &SingularFunction, l: u32) -> Result<f64> {
    let l = l as f64;
    match &f.kind {
        SingularKind::Edge { .. } => Ok(l - f.exponent - 1.0),
        SingularKind::Vertex {
            profile: VertexProfile::Mesh { .. },
        } => Err(Error::Unsupported(
            "membership threshold of a mesh-based vertex profile".into(),
        )),
        SingularKind::Vertex { .. } => Ok(l - f.exponent - 1.5),
    }
}

/// Function block of the config file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FunctionConfig {
    Edge {
        #[serde(default)]
        theta: Option<f64>,
        #[serde(default)]
        edge: Option<usize>,
        #[serde(default)]
        bc: Option<[Bc; 2]>,
        #[serde(default = "one")]
        m: u32,
        #[serde(default)]
        cutoff: Option<[f64; 2]>,
    },
    Vertex {
        profile: String,
        #[serde(default = "one_usize")]
        lidx: usize,
        #[serde(default)]
        cutoff: Option<[f64; 2]>,
    },
}

fn one() -> u32 {
    1
}

fn one_usize() -> usize {
    1
}

impl FunctionConfig {
    /// Builds the function on the given cone. An edge function with an
    /// `edge` index uses that edge's frame and angle, and the boundary
    /// conditions `bc` of the problem unless `bc` is given explicitly.
    pub fn build(&self, cone: &PolyhedralCone, radius: f64, faces_bc: Option<&BcAssignment>) -> Result<SingularFunction> {
        let cut = |c: &Option<[f64; 2]>| match c {
            Some([a, b]) => Cutoff::new(a * radius, b * radius),
            None => Ok(Cutoff::scaled(radius)),
        };
        match self {
            FunctionConfig::Edge {
                theta,
                edge,
                bc,
                m,
                cutoff,
            } => {
                let cutoff = cut(cutoff)?;
                let pair = bc.map(|[a, b]| EdgeBc::from_pair(a, b));
                match (edge, theta) {
                    (Some(j), _) => {
                        if let Some(pair) = pair {
                            let [f0, _] = cone.edge_faces(*j)?;
                            let face = match bc {
                                Some([Bc::Neumann, Bc::Dirichlet]) => cone.edge_faces(*j)?[1],
                                _ => f0,
                            };
                            let frame = EdgeFrame::at_edge(cone, *j, face)?;
                            edge_singularity_in(frame, cone.edge_angle(*j)?, pair, *m, cutoff)
                        } else {
                            let bcs = faces_bc.ok_or_else(|| {
                                Error::Config("edge function needs bc or a problem bc block".into())
                            })?;
                            edge_singularity_on(cone, bcs, *j, *m, cutoff)
                        }
                    }
                    (None, Some(t)) => edge_singularity(*t, pair.unwrap_or(EdgeBc::DD), *m, cutoff),
                    (None, None) => Err(Error::Config("edge function needs 'edge' or 'theta'".into())),
                }
            }
            FunctionConfig::Vertex {
                profile,
                lidx,
                cutoff,
            } => {
                let cutoff = cut(cutoff)?;
                let profile = match (profile.as_str(), lidx) {
                    ("octant_analytic", 1) => VertexProfile::OctantXyz,
                    ("hemisphere_analytic", 1) => VertexProfile::HemisphereZ,
                    ("constant", 0) => VertexProfile::Constant,
                    ("mesh", _) => {
                        let bcs = faces_bc.ok_or_else(|| {
                            Error::Config("mesh vertex profile needs a bc block".into())
                        })?;
                        let cap = SphericalCap::from_cone(cone, 16)?;
                        let faces = bcs.faces().to_vec();
                        let any = faces.contains(&Bc::Dirichlet);
                        return vertex_singularity(
                            &cap,
                            |f| faces[f] == Bc::Dirichlet,
                            any,
                            *lidx,
                            cutoff,
                        );
                    }
                    (p, i) => {
                        return Err(Error::Config(format!(
                            "unknown analytic vertex profile '{p}' with index {i}"
                        )))
                    }
                };
                vertex_singularity_analytic(profile, cutoff)
            }
        }
    }
}
