//! Certificates for Moebius bendability.
//!
//! Two immersions with the same Moebius metric can differ in their Moebius
//! shape operators; this module measures how. It builds the four-component
//! pairing whose flatness characterizes genuine second-order deformations,
//! compares full Moebius data up to congruence, derives the splitting
//! tensor of the kernel distribution, classifies its pointwise structure,
//! and checks the rotation identity satisfied by an associated family.

use nalgebra::{DMatrix, DVector};

use crate::error::{GeomError, Result};
use crate::hypersurface::PrincipalStructure;
use crate::linalg::{op_norm_g, orthonormal_frame, rel_entry_gap, JetMat};
use crate::lorentz::sig22_inner;
use crate::moebius::{blaschke_form, christoffel, MoebiusData};

/// Side-by-side comparison of two Moebius structures over one chart point.
pub struct BendPair {
    /// Relative gap between the two Moebius metrics.
    pub metric_gap: f64,
    /// Distance between the Moebius shape operators, minimized over a
    /// global sign, in the operator norm of the first metric.
    pub shape_gap: f64,
    /// Largest flatness defect of the four-component pairing.
    pub flatness: f64,
    /// Largest absolute pairing value; small for a null pairing.
    pub nullity: f64,
}

/// Compare two immersions through their Moebius data at the same chart
/// point.
pub fn bend_pair(d1: &MoebiusData, d2: &MoebiusData) -> Result<BendPair> {
    let g1 = d1.moebius_metric.value();
    let g2 = d2.moebius_metric.value();
    let s1 = d1.moebius_shape.value();
    let s2 = d2.moebius_shape.value();
    let plus = op_norm_g(&(&s1 + &s2), &g1);
    let minus = op_norm_g(&(&s1 - &s2), &g1);
    let psi1 = blaschke_form(d1).psi;
    let psi2 = blaschke_form(d2).psi;
    let (flatness, nullity) = theta_form_from_parts(&g1, &s1, &psi1, &s2, &psi2)?;
    Ok(BendPair {
        metric_gap: rel_entry_gap(&g1, &g2),
        shape_gap: plus.min(minus),
        flatness,
        nullity,
    })
}

/// Flatness and nullity of the pairing
/// `Theta(X, Y) = (<S1 X, Y>*, <P+ X, Y>*/sqrt 2, <S2 X, Y>*, <P- X, Y>*/sqrt 2)`
/// with `P+- = I +- (psi1 - psi2)`, measured with the split-signature
/// product in a `g*`-orthonormal frame.
///
/// Flatness is `max |<<T(i,j), T(k,l)>> - <<T(i,l), T(k,j)>>|`; nullity is
/// `max |<<T(i,j), T(k,l)>>|`. A bendable pair is flat but not null.
pub fn theta_form_from_parts(
    gstar: &DMatrix<f64>,
    s1: &DMatrix<f64>,
    psi1: &DMatrix<f64>,
    s2: &DMatrix<f64>,
    psi2: &DMatrix<f64>,
) -> Result<(f64, f64)> {
    let n = gstar.nrows();
    let frame = orthonormal_frame(gstar)?;
    let lower = |t: &DMatrix<f64>| frame.transpose() * gstar * t * &frame;

    let half = std::f64::consts::FRAC_1_SQRT_2;
    let dpsi = psi1 - psi2;
    let id = DMatrix::identity(n, n);
    let comps = [
        lower(s1),
        lower(&(&id + &dpsi)) * half,
        lower(s2),
        lower(&(&id - &dpsi)) * half,
    ];
    let theta = |i: usize, j: usize| -> [f64; 4] {
        [comps[0][(i, j)], comps[1][(i, j)], comps[2][(i, j)], comps[3][(i, j)]]
    };

    let mut flatness = 0.0f64;
    let mut nullity = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let direct = sig22_inner(&theta(i, j), &theta(k, l));
                    let swapped = sig22_inner(&theta(i, l), &theta(k, j));
                    flatness = flatness.max((direct - swapped).abs());
                    nullity = nullity.max(direct.abs());
                }
            }
        }
    }
    Ok((flatness, nullity))
}

/// Residuals of the full Moebius congruence test: metric, shape operator
/// against `sign` times the other, Blaschke tensor, and Moebius form. All
/// four vanish exactly when the two immersions are Moebius congruent with
/// compatible normals.
pub struct CongruenceResiduals {
    pub metric: f64,
    pub shape: f64,
    pub blaschke: f64,
    pub form: f64,
}

pub fn congruence_residuals(d1: &MoebiusData, d2: &MoebiusData, sign: f64) -> CongruenceResiduals {
    let b1 = blaschke_form(d1);
    let b2 = blaschke_form(d2);
    let omega_gap = {
        let a = &b1.omega;
        let b = &b2.omega * sign;
        let scale = a.amax().max(b.amax()).max(1.0);
        (a - b).amax() / scale
    };
    CongruenceResiduals {
        metric: rel_entry_gap(&d1.moebius_metric.value(), &d2.moebius_metric.value()),
        shape: rel_entry_gap(&d1.moebius_shape.value(), &(d2.moebius_shape.value() * sign)),
        blaschke: rel_entry_gap(&b1.psi, &b2.psi),
        form: omega_gap,
    }
}

/// The global normal sign that best aligns the two shape operators.
pub fn resolve_shape_sign(d1: &MoebiusData, d2: &MoebiusData) -> f64 {
    let s1 = d1.moebius_shape.value();
    let s2 = d2.moebius_shape.value();
    if (&s1 - &s2).amax() <= (&s1 + &s2).amax() {
        1.0
    } else {
        -1.0
    }
}

/// Splitting tensors of the kernel distribution at one point.
///
/// For each unit kernel direction `T` the operator `C_T` on the cross space
/// comes from differentiating the eigenrelation `(A - lambda I) T = 0`:
/// `C_T X = [(A - lambda I)|_cross]^{-1} P_cross (nabla_X A) T`,
/// expressed as a 2 x 2 matrix in the basis of simple principal directions.
pub struct SplittingTensors {
    /// One matrix per column of the kernel basis, Euclidean connection.
    pub c: Vec<DMatrix<f64>>,
    /// Same construction with the Moebius metric's connection.
    pub c_star: Vec<DMatrix<f64>>,
    /// Largest entry residual of `C*_T = C_T - T(log phi) I`.
    pub conformal_residual: f64,
}

pub fn splitting_tensors(d: &MoebiusData, ps: &PrincipalStructure) -> SplittingTensors {
    let n = d.n;
    let g = d.shape.metric.value();

    let gamma = christoffel(&d.shape.metric, &d.shape.metric_inv);
    let c = splitting_from(
        &d.shape.shape_op,
        &gamma,
        &g,
        ps,
        ps.lambda,
        &ps.cross_values,
    );

    let gamma_star = d.star_christoffel();
    let phi = d.phi.value();
    let h = d.shape.mean_curv.value();
    let star_cross = [
        (ps.cross_values[0] - h) / phi,
        (ps.cross_values[1] - h) / phi,
    ];
    let star_lambda = (ps.lambda - h) / phi;
    let c_star = splitting_from(
        &d.moebius_shape,
        &gamma_star,
        &g,
        ps,
        star_lambda,
        &star_cross,
    );

    let mut conformal_residual = 0.0f64;
    for (m, (cm, csm)) in c.iter().zip(&c_star).enumerate() {
        let mut t_log_phi = 0.0;
        for k in 0..n {
            t_log_phi += ps.delta_basis[(k, m)] * d.phi.derivative(k).value();
        }
        t_log_phi /= phi;
        let expected = cm - DMatrix::identity(2, 2) * t_log_phi;
        conformal_residual = conformal_residual.max(rel_entry_gap(csm, &expected));
    }

    SplittingTensors { c, c_star, conformal_residual }
}

fn splitting_from(
    op: &JetMat,
    gamma: &[JetMat],
    g: &DMatrix<f64>,
    ps: &PrincipalStructure,
    lambda: f64,
    cross_values: &[f64; 2],
) -> Vec<DMatrix<f64>> {
    let n = op.rows();
    let opv = op.value();
    let gv: Vec<DMatrix<f64>> = gamma.iter().map(JetMat::value).collect();

    // (nabla_i Op)^k_j
    let nabla = |i: usize, k: usize, j: usize| -> f64 {
        let mut v = op[(k, j)].derivative(i).value();
        for m in 0..n {
            v += gv[k][(i, m)] * opv[(m, j)] - opv[(k, m)] * gv[m][(i, j)];
        }
        v
    };

    let kernel = ps.delta_basis.ncols();
    (0..kernel)
        .map(|m| {
            DMatrix::from_fn(2, 2, |r, s| {
                // w = (nabla_{X_s} Op) T_m, then its cross component r over
                // the eigenvalue gap.
                let mut w = DVector::zeros(n);
                for k in 0..n {
                    let mut v = 0.0;
                    for i in 0..n {
                        for j in 0..n {
                            v += ps.cross_basis[(i, s)] * nabla(i, k, j) * ps.delta_basis[(j, m)];
                        }
                    }
                    w[k] = v;
                }
                let coeff = (ps.cross_basis.column(r).transpose() * g * &w)[(0, 0)];
                coeff / (cross_values[r] - lambda)
            })
        })
        .collect()
}

/// Decomposition of one splitting matrix against the rotation generator
/// `J = [[0, -1], [1, 0]]`: `C = a I + b J + R` with `R` symmetric and
/// traceless.
pub struct SplittingDecomposition {
    pub a: f64,
    pub b: f64,
    /// Norm of the symmetric traceless part; zero when `C` lies in the
    /// algebra generated by `I` and `J`.
    pub sym_residual: f64,
}

pub fn decompose_splitting(c: &DMatrix<f64>) -> SplittingDecomposition {
    assert_eq!((c.nrows(), c.ncols()), (2, 2));
    let a = 0.5 * (c[(0, 0)] + c[(1, 1)]);
    let b = 0.5 * (c[(1, 0)] - c[(0, 1)]);
    let r00 = c[(0, 0)] - a;
    let r01 = 0.5 * (c[(0, 1)] + c[(1, 0)]);
    let sym_residual = (2.0 * (r00 * r00 + r01 * r01)).sqrt();
    SplittingDecomposition { a, b, sym_residual }
}

/// Defect of the compatibility condition that lets `J` rotate the cross
/// space inside the shape operator: `|k1 + k2 - 2 lambda|`.
pub fn j_symmetry_defect(ps: &PrincipalStructure) -> f64 {
    (ps.cross_values[0] + ps.cross_values[1] - 2.0 * ps.lambda).abs()
}

/// Residual of the associated-family rotation identity at one point.
pub struct FinalKey {
    /// Relative gap of `(A - H I) J_theta` against
    /// `flip * c * (A_t - H_t I)`.
    pub residual: f64,
    /// Trace-ratio conformal factor `c = tr(g_t) / tr(g)`.
    pub conformal_factor: f64,
}

/// Check that the second immersion arises from the first by the rotation
/// `J_theta = I + (cos theta - 1) P_cross + sin theta J` of the traceless
/// shape operator, up to the conformal factor of the metrics and a global
/// sign. `j_sign` orients `J`; `flip` is the overall sign.
pub fn finalkey_residual(
    base: &MoebiusData,
    ps: &PrincipalStructure,
    bent: &MoebiusData,
    theta: f64,
    j_sign: f64,
    flip: f64,
) -> Result<FinalKey> {
    let n = base.n;
    let g = base.shape.metric.value();
    let gt = bent.shape.metric.value();
    let conformal_factor = gt.trace() / g.trace();
    let back_scaled = &gt * (g.trace() / gt.trace());
    let rel_gap = rel_entry_gap(&back_scaled, &g);
    if rel_gap > 1e-7 {
        return Err(GeomError::MetricNotConformal { rel_gap });
    }

    let id = DMatrix::identity(n, n);
    let j_theta = if theta == 0.0 {
        id.clone()
    } else {
        let x1 = ps.cross_basis.column(0);
        let x2 = ps.cross_basis.column(1);
        let gx1 = &g * x1;
        let gx2 = &g * x2;
        let p_cross = x1 * gx1.transpose() + x2 * gx2.transpose();
        let j = (x2 * gx1.transpose() - x1 * gx2.transpose()) * j_sign;
        id + p_cross * (theta.cos() - 1.0) + j * theta.sin()
    };

    let b = base.shape.shape_op.value() - DMatrix::identity(n, n) * base.shape.mean_curv.value();
    let bt = bent.shape.shape_op.value() - DMatrix::identity(n, n) * bent.shape.mean_curv.value();
    let lhs = b * j_theta;
    let rhs = bt * (conformal_factor * flip);
    Ok(FinalKey { residual: rel_entry_gap(&lhs, &rhs), conformal_factor })
}

/// Pick the sign pair minimizing the rotation residual at one point; ties
/// resolve toward positive signs. Call once per grid, then reuse.
pub fn resolve_finalkey_signs(
    base: &MoebiusData,
    ps: &PrincipalStructure,
    bent: &MoebiusData,
    theta: f64,
) -> Result<(f64, f64)> {
    let mut best = (1.0, 1.0);
    let mut best_res = f64::INFINITY;
    for j_sign in [1.0, -1.0] {
        for flip in [1.0, -1.0] {
            let r = finalkey_residual(base, ps, bent, theta, j_sign, flip)?.residual;
            if r < best_res {
                best_res = r;
                best = (j_sign, flip);
            }
        }
    }
    Ok(best)
}
