//! Moebius-invariant data of an umbilic-free hypersurface.
//!
//! From the Euclidean shape data this module builds the conformal factor
//! `phi`, the Moebius metric `g* = phi^2 g`, the traceless Moebius shape
//! operator `S = phi^{-1}(A - H I)`, the Blaschke tensor `psi`, and the
//! Moebius form `omega`, and evaluates the compatibility equations that tie
//! them together.

use nalgebra::{DMatrix, DVector};

use crate::error::{GeomError, Result};
use crate::hypersurface::{shape_jets, ImmersionPatch, ShapeJets};
use crate::jet::Jet;
use crate::linalg::JetMat;

/// A point is treated as umbilic when `phi^2 <= tol * max(|alpha|^2, 1)`.
pub const UMBILIC_REL_TOL: f64 = 1e-12;

/// Christoffel symbols of a metric given by jets.
///
/// `gamma[k][(i, j)]` is `Gamma^k_{ij}`, one order below the metric entries.
pub fn christoffel(metric: &JetMat, metric_inv: &JetMat) -> Vec<JetMat> {
    let n = metric.rows();
    (0..n)
        .map(|k| {
            JetMat::from_fn(n, n, |i, j| {
                let mut sum: Option<Jet> = None;
                for m in 0..n {
                    let t = metric[(m, j)].derivative(i) + metric[(m, i)].derivative(j)
                        - metric[(i, j)].derivative(m);
                    let term = &metric_inv[(k, m)] * &t;
                    sum = Some(match sum {
                        None => term,
                        Some(s) => s + term,
                    });
                }
                sum.unwrap().scale(0.5)
            })
        })
        .collect()
}

/// Riemann tensor values `R^k_{l i j}` with the convention
/// `R(e_i, e_j) e_l = R^k_{l i j} e_k`, so the unit sphere has positive
/// sectional curvature.
pub struct CurvatureTensor {
    n: usize,
    data: Vec<f64>,
}

impl CurvatureTensor {
    pub fn at(&self, k: usize, l: usize, i: usize, j: usize) -> f64 {
        self.data[((k * self.n + l) * self.n + i) * self.n + j]
    }

    /// Ricci tensor `Ric_{lj} = R^k_{l k j}`.
    pub fn ricci(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |l, j| {
            (0..self.n).map(|k| self.at(k, l, k, j)).sum()
        })
    }
}

/// Curvature values from Christoffel jets of order at least one:
/// `R^k_{l i j} = d_i Gamma^k_{jl} - d_j Gamma^k_{il}
///  + Gamma^k_{im} Gamma^m_{jl} - Gamma^k_{jm} Gamma^m_{il}`.
pub fn riemann_values(gamma: &[JetMat]) -> CurvatureTensor {
    let n = gamma.len();
    let gv: Vec<DMatrix<f64>> = gamma.iter().map(JetMat::value).collect();
    let dgv: Vec<Vec<DMatrix<f64>>> = gamma
        .iter()
        .map(|gk| (0..n).map(|v| gk.derivative_value(v)).collect())
        .collect();
    let mut data = vec![0.0; n * n * n * n];
    for k in 0..n {
        for l in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let mut r = dgv[k][i][(j, l)] - dgv[k][j][(i, l)];
                    for m in 0..n {
                        r += gv[k][(i, m)] * gv[m][(j, l)] - gv[k][(j, m)] * gv[m][(i, l)];
                    }
                    data[((k * n + l) * n + i) * n + j] = r;
                }
            }
        }
    }
    CurvatureTensor { n, data }
}

/// Jet-level Moebius data at one chart point.
pub struct MoebiusData {
    pub n: usize,
    pub shape: ShapeJets,
    /// Conformal factor `phi = sqrt(n/(n-1) (|alpha|^2 - n H^2))`, order 2.
    pub phi: Jet,
    /// Moebius metric `g* = phi^2 g`.
    pub moebius_metric: JetMat,
    pub moebius_metric_inv: JetMat,
    /// Moebius shape operator `S = phi^{-1}(A - H I)`; traceless with
    /// `|S|*^2 = (n-1)/n`.
    pub moebius_shape: JetMat,
}

/// Full Moebius data from order-4 jets of the immersion.
pub fn moebius_data(patch: &ImmersionPatch, u: &[f64]) -> Result<MoebiusData> {
    moebius_from_shape(shape_jets(patch, u, 4)?)
}

/// Moebius data from precomputed shape jets (order at least 2; order 4 is
/// needed for curvature-level checks downstream).
pub fn moebius_from_shape(shape: ShapeJets) -> Result<MoebiusData> {
    let n = shape.n;
    let nf = n as f64;
    let h = &shape.mean_curv;
    let phi_sq = (&shape.alpha_norm_sq - &(h * h).scale(nf)).scale(nf / (nf - 1.0));
    let threshold = UMBILIC_REL_TOL * shape.alpha_norm_sq.value().max(1.0);
    if phi_sq.value() <= threshold {
        return Err(GeomError::UmbilicPoint { phi_sq: phi_sq.value(), threshold });
    }
    let phi = phi_sq.sqrt();
    let moebius_metric = shape.metric.scale_jet(&phi_sq);
    let moebius_metric_inv = shape.metric_inv.scale_jet(&phi_sq.recip());
    let h_id = JetMat::identity_like(n, h).scale_jet(h);
    let moebius_shape = shape.shape_op.sub(&h_id).scale_jet(&phi.recip());
    Ok(MoebiusData { n, shape, phi, moebius_metric, moebius_metric_inv, moebius_shape })
}

impl MoebiusData {
    /// Christoffel symbols of the Moebius metric, order-1 jets.
    pub fn star_christoffel(&self) -> Vec<JetMat> {
        christoffel(&self.moebius_metric, &self.moebius_metric_inv)
    }

    /// Partial derivatives of `phi` as values.
    fn phi_gradient_values(&self) -> DVector<f64> {
        DVector::from_fn(self.n, |j, _| self.phi.derivative(j).value())
    }
}

/// Blaschke tensor and Moebius form from their defining expressions in the
/// conformal factor.
pub struct BlaschkeData {
    /// Endomorphism `psi`, self-adjoint for `g*`.
    pub psi: DMatrix<f64>,
    /// Lowered form `<psi X, Y>*`.
    pub psi_form: DMatrix<f64>,
    /// Moebius form values `omega_j`.
    pub omega: DVector<f64>,
}

/// Definitional route to the Blaschke tensor:
/// `<psi X, Y>* = (H/phi) <S X, Y>*
///  + (|grad* phi|*^2 + H^2) / (2 phi^2) <X, Y>*
///  - (1/phi) Hess* phi (X, Y)`,
/// and `omega_j = -(1/phi) (d_j H + (g* S grad* phi)_j)`.
pub fn blaschke_form(d: &MoebiusData) -> BlaschkeData {
    let n = d.n;
    let gamma = d.star_christoffel();
    let gstar = d.moebius_metric.value();
    let gstar_inv = d.moebius_metric_inv.value();
    let s = d.moebius_shape.value();
    let phi = d.phi.value();
    let h = d.shape.mean_curv.value();

    let dphi = d.phi_gradient_values();
    let grad = &gstar_inv * &dphi;
    let grad_norm_sq = dphi.dot(&grad);
    let hess = DMatrix::from_fn(n, n, |i, j| {
        let mut v = d.phi.derivative(i).derivative(j).value();
        for k in 0..n {
            v -= gamma[k][(i, j)].value() * dphi[k];
        }
        v
    });

    let s_form = &gstar * &s;
    let psi_form = s_form * (h / phi) + &gstar * ((grad_norm_sq + h * h) / (2.0 * phi * phi))
        - hess / phi;
    let psi = &gstar_inv * &psi_form;

    let dh = DVector::from_fn(n, |j, _| d.shape.mean_curv.derivative(j).value());
    let omega = -(dh + &gstar * (&s * &grad)) / phi;

    BlaschkeData { psi, psi_form, omega }
}

/// Curvature route to the Blaschke tensor, through the Gauss equation of
/// the Moebius metric:
/// `tau = tr psi = (scal_raw + (n-1)/n) / (2n - 2)` with
/// `scal_raw = tr((g*)^{-1} Ric*)`, and
/// `psi = (Ric*# + S^2 - tau I) / (n - 2)`.
pub struct CurvatureBlaschke {
    pub psi: DMatrix<f64>,
    /// Trace of the Blaschke tensor.
    pub tau: f64,
    /// Normalized Moebius scalar curvature `(2 n tau - 1) / n^2`.
    pub norm_scal: f64,
}

pub fn blaschke_via_curvature(d: &MoebiusData) -> CurvatureBlaschke {
    let n = d.n;
    let nf = n as f64;
    assert!(n >= 3, "curvature route needs n >= 3");
    let gamma = d.star_christoffel();
    let riem = riemann_values(&gamma);
    let ric_sharp = d.moebius_metric_inv.value() * riem.ricci();
    let scal_raw = ric_sharp.trace();
    let tau = (scal_raw + (nf - 1.0) / nf) / (2.0 * nf - 2.0);
    let norm_scal = (2.0 * nf * tau - 1.0) / (nf * nf);
    let s = d.moebius_shape.value();
    let psi =
        (ric_sharp + &s * &s - DMatrix::identity(n, n) * tau) / (nf - 2.0);
    CurvatureBlaschke { psi, tau, norm_scal }
}

/// Largest entry gap between the two Blaschke routes, relative to the
/// larger of one and the entry scale.
pub fn blaschke_two_route_gap(d: &MoebiusData) -> f64 {
    let a = blaschke_form(d).psi;
    let b = blaschke_via_curvature(d).psi;
    crate::linalg::rel_entry_gap(&a, &b)
}

/// Residual of the conformal Gauss equation
/// `R*(X, Y) = S X ^* S Y + psi X ^* Y + X ^* psi Y`
/// where `(A ^* B) Z = <B, Z>* A - <A, Z>* B`, as a max-entry gap relative
/// to the larger of one and the entry scale.
pub fn conformal_gauss_residual(d: &MoebiusData) -> f64 {
    let n = d.n;
    let gamma = d.star_christoffel();
    let riem = riemann_values(&gamma);
    let gstar = d.moebius_metric.value();
    let s = d.moebius_shape.value();
    let psi = blaschke_form(d).psi;

    let wedge = |a: &DVector<f64>, b: &DVector<f64>| -> DMatrix<f64> {
        a * (&gstar * b).transpose() - b * (&gstar * a).transpose()
    };

    let mut max_abs = 0.0f64;
    let mut scale = 1.0f64;
    for i in 0..n {
        for j in 0..n {
            let x = DVector::from_fn(n, |r, _| if r == i { 1.0 } else { 0.0 });
            let y = DVector::from_fn(n, |r, _| if r == j { 1.0 } else { 0.0 });
            let rhs = wedge(&(&s * &x), &(&s * &y)) + wedge(&(&psi * &x), &y)
                + wedge(&x, &(&psi * &y));
            for k in 0..n {
                for l in 0..n {
                    let lhs = riem.at(k, l, i, j);
                    max_abs = max_abs.max((lhs - rhs[(k, l)]).abs());
                    scale = scale.max(lhs.abs()).max(rhs[(k, l)].abs());
                }
            }
        }
    }
    max_abs / scale
}

/// Residual of the conformal Codazzi equation
/// `(nabla*_X S) Y - (nabla*_Y S) X = omega(X) Y - omega(Y) X`,
/// relative to the larger of one and the entry scale.
pub fn conformal_codazzi_residual(d: &MoebiusData) -> f64 {
    let n = d.n;
    let gamma = d.star_christoffel();
    let omega = blaschke_form(d).omega;
    let s = &d.moebius_shape;
    let sv = s.value();
    let gv: Vec<DMatrix<f64>> = gamma.iter().map(JetMat::value).collect();

    // (nabla*_i S)^k_j = d_i S^k_j + Gamma*^k_{im} S^m_j - S^k_m Gamma*^m_{ij}
    let nabla = |i: usize, k: usize, j: usize| -> f64 {
        let mut v = s[(k, j)].derivative(i).value();
        for m in 0..n {
            v += gv[k][(i, m)] * sv[(m, j)] - sv[(k, m)] * gv[m][(i, j)];
        }
        v
    };

    let mut max_abs = 0.0f64;
    let mut scale = 1.0f64;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let lhs = nabla(i, k, j) - nabla(j, k, i);
                let rhs = omega[i] * delta(k, j) - omega[j] * delta(k, i);
                max_abs = max_abs.max((lhs - rhs).abs());
                scale = scale.max(lhs.abs()).max(rhs.abs());
            }
        }
    }
    max_abs / scale
}

fn delta(i: usize, j: usize) -> f64 {
    if i == j {
        1.0
    } else {
        0.0
    }
}
