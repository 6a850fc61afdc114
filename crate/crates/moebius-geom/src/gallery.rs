//! Closed-form hypersurfaces with hand-checkable invariants.
//!
//! Every pipeline check is anchored here: a flat-metric cylinder, the
//! associated family of catenoid cylinders, a cone cylinder, a round sphere
//! for the degenerate error path, and the hyperbolic tube over Cartan's
//! minimal isoparametric hypersurface of the 4-sphere.

use std::f64::consts::PI;

use crate::error::{GeomError, Result};
use crate::hypersurface::ImmersionPatch;
use crate::jet::Jet;
use crate::linalg::{cross_product_columns, dot, JetMat};

/// Curvature scale of the hyperbolic factor in the Cartan example,
/// `m = sqrt((n-1)/n)` for `n = 5`.
pub const CARTAN_M: f64 = 0.894427190999915878; // sqrt(4/5)

/// Tube radius of Cartan's isoparametric hypersurface, `pi/6`.
pub const CARTAN_TUBE_RADIUS: f64 = PI / 6.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ExampleId {
    /// `(cos u1, sin u1, u2, ..., un)`: product of the unit circle with flat
    /// directions; the Moebius metric is flat and every Moebius invariant has
    /// rational closed form.
    RoundCylinder,
    /// `(cos(theta) catenoid + sin(theta) helicoid, y)`: the associated
    /// family of minimal-surface cylinders, isometric for every `theta` and
    /// Moebius-deformable.
    MinimalCylinder,
    /// Cone over the Clifford torus times a flat factor: minimal, rank two,
    /// surface-like.
    ConeCylinder,
    /// Round sphere in spherical coordinates: totally umbilic, the error
    /// path for degenerate Moebius data.
    UnitSphere,
    /// Conformal image of (hyperbolic plane) x (isoparametric tube): the
    /// rank-two hypersurface whose quotient surface is the Veronese surface.
    CartanExample,
}

impl ExampleId {
    pub const ALL: [ExampleId; 5] = [
        ExampleId::RoundCylinder,
        ExampleId::MinimalCylinder,
        ExampleId::ConeCylinder,
        ExampleId::UnitSphere,
        ExampleId::CartanExample,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ExampleId::RoundCylinder => "round_cylinder",
            ExampleId::MinimalCylinder => "minimal_cylinder",
            ExampleId::ConeCylinder => "cone_cylinder",
            ExampleId::UnitSphere => "unit_sphere",
            ExampleId::CartanExample => "cartan_example",
        }
    }

    pub fn parse(s: &str) -> Option<ExampleId> {
        ExampleId::ALL.iter().copied().find(|id| id.as_str() == s)
    }
}

/// A gallery entry plus its parameters.
#[derive(Clone, Copy, Debug)]
pub struct ExampleSpec {
    pub id: ExampleId,
    /// Hypersurface dimension. The Cartan example is pinned to `n = 5`.
    pub n: usize,
    /// Family parameter of the minimal cylinder, in `[0, 2 pi)`.
    pub theta: f64,
}

impl ExampleSpec {
    pub fn new(id: ExampleId) -> ExampleSpec {
        ExampleSpec { id, n: 5, theta: 0.0 }
    }

    pub fn with_theta(id: ExampleId, theta: f64) -> ExampleSpec {
        ExampleSpec { id, n: 5, theta }
    }

    /// Chart window on which grids are sampled by default: strictly inside
    /// the hard domain, away from chart singularities and frame
    /// degeneracies.
    pub fn default_window(&self) -> Vec<(f64, f64)> {
        let free = (-1.0, 1.0);
        match self.id {
            ExampleId::RoundCylinder => {
                let mut w = vec![(0.2, 1.4)];
                w.resize(self.n, free);
                w
            }
            ExampleId::MinimalCylinder => {
                let mut w = vec![(-0.75, 0.75), (-0.75, 0.75)];
                w.resize(self.n, free);
                w
            }
            ExampleId::ConeCylinder => {
                let mut w = vec![(0.8, 1.6), (0.2, 1.2), (0.2, 1.2)];
                w.resize(self.n, free);
                w
            }
            ExampleId::UnitSphere => vec![(0.5, 1.1); self.n],
            ExampleId::CartanExample => {
                vec![(0.8, 1.5), (-0.5, 0.5), (0.6, 1.0), (0.3, 0.7), (0.2, 0.8)]
            }
        }
    }
}

/// Build the immersion patch for a gallery entry.
pub fn make_example(spec: &ExampleSpec) -> ImmersionPatch {
    let n = spec.n;
    assert!((2..=crate::jet::MAX_VARS).contains(&n), "dimension {n} unsupported");
    assert!(
        (0.0..2.0 * PI).contains(&spec.theta),
        "theta {} outside [0, 2 pi)",
        spec.theta
    );
    match spec.id {
        ExampleId::RoundCylinder => {
            let domain = vec![(-50.0, 50.0); n];
            // Normal toward the axis: the circle direction has curvature +1.
            ImmersionPatch::new(n, domain, -1.0, move |u| {
                let mut out = vec![u[0].cos(), u[0].sin()];
                out.extend(u[1..].iter().cloned());
                Ok(out)
            })
        }
        ExampleId::MinimalCylinder => {
            assert!(n >= 2);
            let mut domain = vec![(-300.0, 300.0)];
            domain.resize(n, (-50.0, 50.0));
            let (st, ct) = spec.theta.sin_cos();
            ImmersionPatch::new(n, domain, 1.0, move |u| {
                let (v, w) = (&u[0], &u[1]);
                let (chv, shv) = (v.cosh(), v.sinh());
                let (cw, sw) = (w.cos(), w.sin());
                let cat = [&chv * &cw, &chv * &sw, v.clone()];
                let hel = [&shv * &sw, -(&shv * &cw), w.clone()];
                let mut out: Vec<Jet> = (0..3)
                    .map(|i| cat[i].scale(ct) + hel[i].scale(st))
                    .collect();
                out.extend(u[2..].iter().cloned());
                Ok(out)
            })
        }
        ExampleId::ConeCylinder => {
            assert!(n >= 3);
            let mut domain = vec![(1e-3, 50.0)];
            domain.resize(n, (-50.0, 50.0));
            let r = 0.5f64.sqrt();
            ImmersionPatch::new(n, domain, 1.0, move |u| {
                let rho = &u[0];
                if rho.value() <= 1e-6 {
                    return Err(GeomError::ChartSingularity { what: "rho", value: rho.value() });
                }
                let mut out = vec![
                    (rho * u[1].cos()).scale(r),
                    (rho * u[1].sin()).scale(r),
                    (rho * u[2].cos()).scale(r),
                    (rho * u[2].sin()).scale(r),
                ];
                out.extend(u[3..].iter().cloned());
                Ok(out)
            })
        }
        ExampleId::UnitSphere => {
            let mut domain = vec![(0.05, PI - 0.05); n - 1];
            domain.push((-50.0, 50.0));
            // The chart frame (f, df) is the polar-coordinate Jacobian frame,
            // so the raw cross-product normal points outward; flip to the
            // inward normal, for which A = I and H = 1.
            ImmersionPatch::new(n, domain, -1.0, move |u| {
                let one = Jet::constant(u[0].dim(), u[0].order(), 1.0);
                let mut out = Vec::with_capacity(n + 1);
                let mut prod = one;
                for x in u {
                    out.push(&prod * &x.cos());
                    prod = prod * x.sin();
                }
                out.push(prod);
                Ok(out)
            })
        }
        ExampleId::CartanExample => {
            assert_eq!(n, 5, "the Cartan example lives in dimension 5");
            let domain = vec![
                (1e-3, 50.0),
                (-50.0, 50.0),
                (0.05, PI - 0.05),
                (-50.0, 50.0),
                (-50.0, 50.0),
            ];
            ImmersionPatch::new(n, domain, 1.0, move |u| {
                let t = &u[0];
                if t.value() <= 1e-6 {
                    return Err(GeomError::ChartSingularity { what: "t", value: t.value() });
                }
                let psi = cartan_tube_jets(&u[2], &u[3], &u[4])?;
                let inv_t = t.recip();
                let mut out = vec![&u[1] * &inv_t];
                for c in &psi {
                    out.push((c * &inv_t).scale(CARTAN_M));
                }
                Ok(out)
            })
        }
    }
}

/// The Veronese map of the unit 2-sphere into the unit 4-sphere.
pub fn veronese_point(p: &[f64; 3]) -> [f64; 5] {
    let [x, y, z] = *p;
    let s3 = 3.0f64.sqrt();
    [
        s3 * y * z,
        s3 * z * x,
        s3 * x * y,
        0.5 * s3 * (x * x - y * y),
        0.5 * (x * x + y * y - 2.0 * z * z),
    ]
}

/// Spherical chart of S^2: `(sin u1 cos u2, sin u1 sin u2, cos u1)`.
fn sphere_chart_jets(u1: &Jet, u2: &Jet) -> [Jet; 3] {
    [u1.sin() * u2.cos(), u1.sin() * u2.sin(), u1.cos()]
}

fn sphere_chart_partials(u1: &Jet, u2: &Jet) -> ([Jet; 3], [Jet; 3]) {
    let d1 = [u1.cos() * u2.cos(), u1.cos() * u2.sin(), -u1.sin()];
    let d2 = [-(u1.sin() * u2.sin()), u1.sin() * u2.cos(), Jet::constant(u1.dim(), u1.order(), 0.0)];
    (d1, d2)
}

fn veronese_map_jets(xyz: &[Jet; 3]) -> [Jet; 5] {
    let [x, y, z] = xyz;
    let s3 = 3.0f64.sqrt();
    [
        (y * z).scale(s3),
        (z * x).scale(s3),
        (x * y).scale(s3),
        (x * x - y * y).scale(0.5 * s3),
        (x * x + y * y - (z * z).scale(2.0)).scale(0.5),
    ]
}

/// Differential of the Veronese map applied to a tangent jet vector.
fn veronese_differential_jets(xyz: &[Jet; 3], d: &[Jet; 3]) -> [Jet; 5] {
    let [x, y, z] = xyz;
    let [dx, dy, dz] = d;
    let s3 = 3.0f64.sqrt();
    [
        (y * dz + z * dy).scale(s3),
        (z * dx + x * dz).scale(s3),
        (x * dy + y * dx).scale(s3),
        (x * dx - y * dy).scale(s3),
        x * dx + y * dy - (z * dz).scale(2.0),
    ]
}

/// The Veronese point, its two chart tangents, and a Gram-Schmidt normal
/// frame in the 4-sphere, all as jets of the chart variables.
pub fn veronese_frame_jets(u1: &Jet, u2: &Jet) -> Result<VeroneseFrame> {
    let xyz = sphere_chart_jets(u1, u2);
    let (d1, d2) = sphere_chart_partials(u1, u2);
    let v = veronese_map_jets(&xyz);
    let t1 = veronese_differential_jets(&xyz, &d1);
    let t2 = veronese_differential_jets(&xyz, &d2);

    let e1 = normalize(&t1)?;
    let mut t2p: Vec<Jet> = t2.to_vec();
    project_out(&mut t2p, &e1);
    let e2 = normalize(&t2p)?;

    // Deterministic seeds; the normal space of the Veronese surface inside
    // T S^4 never degenerates against them on the charts used here.
    let dim = u1.dim();
    let order = u1.order();
    let seed = |k: usize| -> Vec<Jet> {
        (0..5).map(|i| Jet::constant(dim, order, if i == k { 1.0 } else { 0.0 })).collect()
    };
    let mut r1 = seed(0);
    project_out(&mut r1, &v);
    project_out(&mut r1, &e1);
    project_out(&mut r1, &e2);
    let xi1 = normalize(&r1)?;
    let mut r2 = seed(1);
    project_out(&mut r2, &v);
    project_out(&mut r2, &e1);
    project_out(&mut r2, &e2);
    project_out(&mut r2, &xi1);
    let xi2 = normalize(&r2)?;

    Ok(VeroneseFrame { point: v, tangent1: t1, tangent2: t2, normal1: xi1, normal2: xi2 })
}

/// Frame data of the Veronese surface at one chart point.
pub struct VeroneseFrame {
    pub point: [Jet; 5],
    pub tangent1: [Jet; 5],
    pub tangent2: [Jet; 5],
    pub normal1: Vec<Jet>,
    pub normal2: Vec<Jet>,
}

fn normalize(v: &[Jet]) -> Result<Vec<Jet>> {
    let nsq = dot(v, v);
    if nsq.value() <= 1e-8 {
        return Err(GeomError::FrameDegenerate { residual: nsq.value() });
    }
    let inv = nsq.sqrt().recip();
    Ok(v.iter().map(|c| c * &inv).collect())
}

fn project_out(v: &mut [Jet], unit: &[Jet]) {
    let c = dot(v, unit);
    for (vi, ui) in v.iter_mut().zip(unit) {
        *vi = &*vi - &(ui * &c);
    }
}

/// Radius-`pi/6` tube over the Veronese surface in the unit 4-sphere:
/// Cartan's minimal isoparametric hypersurface.
pub fn cartan_tube_jets(u1: &Jet, u2: &Jet, s: &Jet) -> Result<[Jet; 5]> {
    let frame = veronese_frame_jets(u1, u2)?;
    let (ct, st) = (CARTAN_TUBE_RADIUS.cos(), CARTAN_TUBE_RADIUS.sin());
    let (cs, ss) = (s.cos(), s.sin());
    let mut out = Vec::with_capacity(5);
    for i in 0..5 {
        let xi = &frame.normal1[i] * &cs + &frame.normal2[i] * &ss;
        out.push(frame.point[i].scale(ct) + xi.scale(st));
    }
    Ok(out.try_into().unwrap_or_else(|_| unreachable!()))
}

/// Metric and shape operator of a hypersurface of a centered sphere.
///
/// `coords` are the `k + 2` ambient coordinates of an immersion with `k`
/// chart variables whose image lies in a sphere about the origin; the normal
/// used is tangent to the sphere and orthogonal to the immersion.
pub fn spherical_shape(coords: &[Jet], nvars: usize) -> Result<(JetMat, JetMat)> {
    let amb = coords.len();
    assert_eq!(amb, nvars + 2, "hypersurface of a sphere: ambient = chart + 2");
    let d = JetMat::from_fn(amb, nvars, |a, i| coords[a].derivative(i));
    let metric = d.transpose().matmul(&d);
    let metric_inv = metric.inverse()?;
    let framed = JetMat::from_fn(amb, nvars + 1, |a, j| {
        if j == 0 {
            coords[a].clone()
        } else {
            d[(a, j - 1)].clone()
        }
    });
    let raw = cross_product_columns(&framed);
    let nu = normalize(&raw)?;
    let second = JetMat::from_fn(nvars, nvars, |i, j| {
        let col: Vec<Jet> = (0..amb).map(|a| d[(a, i)].derivative(j)).collect();
        dot(&col, &nu)
    });
    Ok((metric, metric_inv.matmul(&second)))
}
