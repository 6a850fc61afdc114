//! The central sphere congruence and its quotient surface.
//!
//! An umbilic-free hypersurface determines at each point the mean-curvature
//! sphere, encoded as a unit vector in the Lorentzian sphere of the light
//! cone model. This module builds that map, measures the rank of its
//! differential, and parametrizes the two-dimensional quotient surface that
//! appears when the rank is two.

use nalgebra::{DMatrix, DVector};

use crate::error::{GeomError, Result};
use crate::hypersurface::ImmersionPatch;
use crate::jet::Jet;
use crate::lorentz::{mink_inner_jets, LightConeChart};
use crate::moebius::{moebius_data, MoebiusData};

/// A singular value at or above this threshold counts toward the rank.
pub const RANK_SIGMA_KEEP: f64 = 1e-3;
/// A singular value at or below this threshold is treated as zero.
pub const RANK_SIGMA_DROP: f64 = 1e-9;

/// The mean-curvature sphere map as jets in the light cone model:
/// `s = H Psi(f) + dPsi_f(N)`, a unit spacelike vector whether or not `H`
/// vanishes.
pub fn sphere_map_jets(d: &MoebiusData, chart: &LightConeChart) -> Vec<Jet> {
    let psi_f = chart.embed_jets(&d.shape.f);
    let dpsi_n = chart.differential_jets(&d.shape.f, &d.shape.normal);
    let h = &d.shape.mean_curv;
    psi_f
        .iter()
        .zip(&dpsi_n)
        .map(|(p, q)| p * h + q)
        .collect()
}

/// Value-level differential of the sphere map, an `(n+3) x n` matrix.
pub fn sphere_map_differential(d: &MoebiusData, chart: &LightConeChart) -> DMatrix<f64> {
    let s = sphere_map_jets(d, chart);
    DMatrix::from_fn(s.len(), d.n, |c, z| s[c].derivative(z).value())
}

/// Singular values of the sphere map differential, descending.
pub fn sphere_map_singular_values(d: &MoebiusData, chart: &LightConeChart) -> Vec<f64> {
    let mut sv: Vec<f64> = sphere_map_differential(d, chart)
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Rank readable from singular values: `Some(r)` when the top `r` values
/// clear `keep` and all others fall below `drop`, `None` when some value
/// lands in the dead zone between the thresholds.
pub fn rank_from_singular_values(sigma: &[f64], keep: f64, drop: f64) -> Option<usize> {
    let r = sigma.iter().take_while(|s| **s >= keep).count();
    if sigma[r..].iter().all(|s| *s <= drop) {
        Some(r)
    } else {
        None
    }
}

/// Gap between the pulled-back congruence metric and its closed form:
/// `<ds Z, ds W> = g((A - H I) Z, (A - H I) W)`, max entry relative to the
/// larger of one and the entry scale.
pub fn congruence_metric_gap(d: &MoebiusData, chart: &LightConeChart) -> f64 {
    let n = d.n;
    let dd = sphere_map_differential(d, chart);
    let mut pulled = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let mut v = 0.0;
            for c in 0..dd.nrows() {
                let sign = if c == 0 { -1.0 } else { 1.0 };
                v += sign * dd[(c, i)] * dd[(c, j)];
            }
            pulled[(i, j)] = v;
        }
    }
    let g = d.shape.metric.value();
    let b = d.shape.shape_op.value() - DMatrix::identity(n, n) * d.shape.mean_curv.value();
    let closed = b.transpose() * g * b;
    let scale = pulled.amax().max(closed.amax()).max(1.0);
    (pulled - closed).amax() / scale
}

/// Pairing of the sphere map with the chart's null direction `w`. This is
/// the mean curvature `H`; it is constant exactly when the congruence lies
/// in a degenerate hyperplane, the mark of a minimal Euclidean
/// representative.
pub fn sphere_map_height(d: &MoebiusData, chart: &LightConeChart) -> f64 {
    let s = sphere_map_jets(d, chart);
    let w: Vec<Jet> = (0..s.len())
        .map(|c| Jet::constant(s[0].dim(), s[0].order(), chart.w[c]))
        .collect();
    mink_inner_jets(&s, &w).value()
}

/// A two-parameter affine slice of the chart: `u(a, b) = base + a d1 + b d2`.
#[derive(Clone, Debug)]
pub struct Section {
    pub base: Vec<f64>,
    pub dir1: DVector<f64>,
    pub dir2: DVector<f64>,
}

impl Section {
    pub fn at(&self, a: f64, b: f64) -> Vec<f64> {
        self.base
            .iter()
            .enumerate()
            .map(|(k, v)| v + a * self.dir1[k] + b * self.dir2[k])
            .collect()
    }
}

/// The quotient surface through one section point: second-order jets of the
/// sphere map in the section parameters, with its induced geometry.
pub struct QuotientPoint {
    /// `n + 3` jets in two variables, order 2.
    pub jets: Vec<Jet>,
    /// Induced metric of the surface, positive definite when spacelike.
    pub induced_metric: DMatrix<f64>,
    /// Norm of the trace of the second fundamental form of the surface in
    /// the Lorentzian sphere; zero for a minimal quotient.
    pub minimality_residual: f64,
}

/// Evaluate the quotient surface at section parameters `(a, b)`.
///
/// Fails with `SectionTangentToDelta` when the section directions do not
/// stay transversal to the kernel of the congruence differential, and with
/// `DegenerateInducedMetric` when the induced metric is not positive
/// definite.
pub fn quotient_point(
    patch: &ImmersionPatch,
    chart: &LightConeChart,
    section: &Section,
    ab: &[f64; 2],
) -> Result<QuotientPoint> {
    let u = section.at(ab[0], ab[1]);
    let d = moebius_data(patch, &u)?;
    let s5 = sphere_map_jets(&d, chart);

    let dd = sphere_map_differential(&d, chart);
    let pushed = DMatrix::from_fn(dd.nrows(), 2, |c, k| {
        let dir = if k == 0 { &section.dir1 } else { &section.dir2 };
        (0..d.n).map(|z| dd[(c, z)] * dir[z]).sum::<f64>()
    });
    let scale = dd.amax().max(1.0);
    let pushed_sv = pushed.svd(false, false).singular_values;
    let projected_rank = pushed_sv.iter().filter(|s| **s > 1e-8 * scale).count();
    if projected_rank < 2 {
        return Err(GeomError::SectionTangentToDelta { projected_rank });
    }

    let deltas: Vec<Jet> = (0..d.n)
        .map(|k| {
            Jet::variable(2, 2, 0, 0.0).scale(section.dir1[k])
                + Jet::variable(2, 2, 1, 0.0).scale(section.dir2[k])
        })
        .collect();
    let jets: Vec<Jet> = s5.iter().map(|c| c.compose(&deltas)).collect();

    let first: Vec<Vec<Jet>> = (0..2)
        .map(|a| jets.iter().map(|c| c.derivative(a)).collect())
        .collect();
    let induced_metric = DMatrix::from_fn(2, 2, |a, b| {
        mink_inner_jets(&first[a], &first[b]).value()
    });
    let eig = induced_metric.clone().symmetric_eigen().eigenvalues;
    let gscale = induced_metric.amax().max(1.0);
    if eig.min() <= 1e-10 * gscale {
        return Err(GeomError::DegenerateInducedMetric {
            eigenvalues: eig.iter().copied().collect(),
        });
    }

    let minimality_residual = minimality_residual(&jets, &induced_metric);
    Ok(QuotientPoint { jets, induced_metric, minimality_residual })
}

/// Euclidean norm of the metric trace of the second derivatives after
/// Minkowski-orthogonal projection away from the position and the tangent
/// plane. The projection absorbs both the tangential Christoffel terms and
/// the position term contributed by the curvature of the ambient sphere, so
/// the residual vanishes exactly on minimal quotients.
fn minimality_residual(jets: &[Jet], induced: &DMatrix<f64>) -> f64 {
    let m = jets.len();
    let pos = DVector::from_fn(m, |c, _| jets[c].value());
    let t1 = DVector::from_fn(m, |c, _| jets[c].derivative(0).value());
    let t2 = DVector::from_fn(m, |c, _| jets[c].derivative(1).value());
    let ginv = induced
        .clone()
        .try_inverse()
        .expect("induced metric checked positive definite");

    let mut trace = DVector::zeros(m);
    for a in 0..2 {
        for b in 0..2 {
            let second = DVector::from_fn(m, |c, _| jets[c].derivative(a).derivative(b).value());
            trace += second * ginv[(a, b)];
        }
    }

    let basis = [&pos, &t1, &t2];
    let mut gram = DMatrix::zeros(3, 3);
    let mut rhs = DVector::zeros(3);
    for i in 0..3 {
        for j in 0..3 {
            gram[(i, j)] = crate::lorentz::mink_inner(basis[i], basis[j]);
        }
        rhs[i] = crate::lorentz::mink_inner(basis[i], &trace);
    }
    let coeff = gram
        .lu()
        .solve(&rhs)
        .expect("span of position and tangents is nondegenerate");
    let mut residual = trace;
    for i in 0..3 {
        residual -= basis[i] * coeff[i];
    }
    residual.norm()
}
