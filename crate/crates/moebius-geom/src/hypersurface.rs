//! Euclidean hypersurface data from chart evaluators.
//!
//! An [`ImmersionPatch`] produces ambient coordinates as jets at any chart
//! point; from those this module derives the induced metric, unit normal,
//! shape operator, mean curvature and second-fundamental-form norm, all as
//! jets so that downstream covariant derivatives are exact. Principal
//! curvatures are clustered to detect the multiplicity-(n-2) eigenvalue that
//! drives the rank-two sphere congruences, and patches can be composed with
//! conformal (Moebius) transformations of the ambient space.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{GeomError, Result};
use crate::jet::Jet;
use crate::linalg::{cluster_eigenvalues, cross_product_columns, dot, eigen_g_self_adjoint, JetMat};

/// Squared-distance floor below which an inversion center counts as lying on
/// the image.
const INVERSION_CLEARANCE_SQ: f64 = 1e-16;

type Evaluator = dyn Fn(&[Jet]) -> Result<Vec<Jet>> + Send + Sync;

/// A hypersurface chart `U subset R^n -> R^{n+1}` evaluated in jet arithmetic.
///
/// The evaluator receives one jet per chart variable (not necessarily seeded
/// in the chart's own base space, which is what makes patches composable) and
/// returns the `n + 1` ambient coordinates.
#[derive(Clone)]
pub struct ImmersionPatch {
    n: usize,
    domain: Vec<(f64, f64)>,
    orientation: f64,
    eval: Arc<Evaluator>,
}

impl ImmersionPatch {
    pub fn new<F>(n: usize, domain: Vec<(f64, f64)>, orientation: f64, eval: F) -> ImmersionPatch
    where
        F: Fn(&[Jet]) -> Result<Vec<Jet>> + Send + Sync + 'static,
    {
        assert_eq!(domain.len(), n);
        assert!(orientation == 1.0 || orientation == -1.0);
        ImmersionPatch { n, domain, orientation, eval: Arc::new(eval) }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn ambient_dim(&self) -> usize {
        self.n + 1
    }

    pub fn domain(&self) -> &[(f64, f64)] {
        &self.domain
    }

    pub fn orientation(&self) -> f64 {
        self.orientation
    }

    pub fn contains(&self, u: &[f64]) -> bool {
        u.len() == self.n
            && u.iter().zip(&self.domain).all(|(x, (lo, hi))| x >= lo && x <= hi)
    }

    /// Evaluate on caller-provided jets (composition entry point).
    pub fn eval_raw(&self, vars: &[Jet]) -> Result<Vec<Jet>> {
        let f = (self.eval)(vars)?;
        assert_eq!(f.len(), self.n + 1, "evaluator must produce n+1 coordinates");
        Ok(f)
    }

    /// Ambient coordinates as jets of the given order at a chart point.
    pub fn jets_at(&self, u: &[f64], order: usize) -> Result<Vec<Jet>> {
        assert!(self.contains(u), "chart point {u:?} outside domain {:?}", self.domain);
        self.eval_raw(&Jet::variables(self.n, order, u))
    }

    /// Ambient position at a chart point.
    pub fn value_at(&self, u: &[f64]) -> Result<DVector<f64>> {
        let f = self.jets_at(u, 0)?;
        Ok(DVector::from_vec(f.iter().map(Jet::value).collect()))
    }

    /// The same chart post-composed with a Moebius transformation.
    pub fn transformed(&self, t: MoebiusTransform) -> ImmersionPatch {
        assert_eq!(t.dim, self.n + 1);
        let inner = Arc::clone(&self.eval);
        let n = self.n;
        ImmersionPatch {
            n,
            domain: self.domain.clone(),
            orientation: self.orientation,
            eval: Arc::new(move |vars: &[Jet]| {
                let f = inner(vars)?;
                t.apply_jets(&f)
            }),
        }
    }
}

/// First- and second-fundamental data at one chart point, all jet-valued.
pub struct ShapeJets {
    pub n: usize,
    pub u: Vec<f64>,
    /// Ambient coordinates, `n + 1` jets.
    pub f: Vec<Jet>,
    /// Differential, `(n+1) x n`.
    pub df: JetMat,
    /// Induced metric `df^T df`, `n x n`.
    pub metric: JetMat,
    pub metric_inv: JetMat,
    /// Unit normal, `n + 1` jets, oriented by the patch.
    pub normal: Vec<Jet>,
    /// Shape operator `A = g^{-1} <d^2 f, N>`, `n x n`.
    pub shape_op: JetMat,
    /// Mean curvature `H = tr A / n`.
    pub mean_curv: Jet,
    /// Squared norm of the second fundamental form, `tr A^2`.
    pub alpha_norm_sq: Jet,
}

/// Evaluate the fundamental data of a patch at `u`.
///
/// `order` is the jet order of the ambient coordinates; the metric comes out
/// one order lower and the shape operator two lower. Order 2 suffices for
/// point values, order 4 for curvature tensors of the conformal metric.
pub fn shape_jets(patch: &ImmersionPatch, u: &[f64], order: usize) -> Result<ShapeJets> {
    assert!(order >= 2, "shape data needs second derivatives");
    let n = patch.dim();
    let f = patch.jets_at(u, order)?;
    let df = JetMat::from_fn(n + 1, n, |a, i| f[a].derivative(i));

    let sv = df.value().svd(false, false).singular_values;
    let rank = sv.iter().filter(|&&s| s > 1e-12 * sv[0]).count();
    if rank < n {
        return Err(GeomError::JacobianRankDeficient { rank, needed: n });
    }

    let metric = df.transpose().matmul(&df);
    let metric_inv = metric.inverse()?;

    let raw = cross_product_columns(&df);
    let raw_norm = dot(&raw, &raw).sqrt();
    let inv_norm = raw_norm.recip().scale(patch.orientation());
    let normal: Vec<Jet> = raw.iter().map(|c| c * &inv_norm).collect();

    // Second fundamental form <d_i d_j f, N>.
    let second = JetMat::from_fn(n, n, |i, j| {
        let cols: Vec<Jet> = (0..=n).map(|a| df[(a, i)].derivative(j)).collect();
        dot(&cols, &normal)
    });
    let shape_op = metric_inv.matmul(&second);
    let mean_curv = shape_op.trace().scale(1.0 / n as f64);
    let alpha_norm_sq = shape_op.matmul(&shape_op).trace();

    Ok(ShapeJets {
        n,
        u: u.to_vec(),
        f,
        df,
        metric,
        metric_inv,
        normal,
        shape_op,
        mean_curv,
        alpha_norm_sq,
    })
}

/// Point values of the fundamental data.
#[derive(Clone, Debug)]
pub struct PointShape {
    pub u: Vec<f64>,
    pub position: DVector<f64>,
    pub metric: DMatrix<f64>,
    pub normal: DVector<f64>,
    pub shape_op: DMatrix<f64>,
    pub mean_curv: f64,
    pub alpha_norm_sq: f64,
}

impl ShapeJets {
    pub fn point(&self) -> PointShape {
        PointShape {
            u: self.u.clone(),
            position: DVector::from_vec(self.f.iter().map(Jet::value).collect()),
            metric: self.metric.value(),
            normal: DVector::from_vec(self.normal.iter().map(Jet::value).collect()),
            shape_op: self.shape_op.value(),
            mean_curv: self.mean_curv.value(),
            alpha_norm_sq: self.alpha_norm_sq.value(),
        }
    }
}

/// Fundamental data values at a chart point.
pub fn shape_data(patch: &ImmersionPatch, u: &[f64]) -> Result<PointShape> {
    Ok(shape_jets(patch, u, 2)?.point())
}

/// Eigenstructure of the shape operator split around the
/// multiplicity-(n-2) principal curvature.
#[derive(Clone, Debug)]
pub struct PrincipalStructure {
    /// All principal curvatures, descending.
    pub eigenvalues: Vec<f64>,
    /// The multiplicity-(n-2) principal curvature.
    pub lambda: f64,
    /// g-orthonormal basis of the lambda-eigenspace, `n x (n-2)`.
    pub delta_basis: DMatrix<f64>,
    /// g-orthonormal basis of the complementary eigenspaces, `n x 2`,
    /// ordered by descending eigenvalue.
    pub cross_basis: DMatrix<f64>,
    /// The two simple principal curvatures, descending.
    pub cross_values: [f64; 2],
}

/// Default relative gap tolerance for eigenvalue clustering.
pub const CLUSTER_REL_TOL: f64 = 1e-6;

/// Cluster the principal curvatures and extract the multiplicity-(n-2)
/// structure.
///
/// Clusters are separated by gaps above `rel_tol * max |k_i|`. An oversized
/// cluster that still has internal spread (largest internal gap above
/// `1e-3` of the threshold) admits competing sub-clusterings and is reported
/// as ambiguous; an oversized cluster of numerically identical values means
/// the multiplicity-(n-2) eigenvalue genuinely does not exist.
pub fn principal_structure(shape: &PointShape, rel_tol: f64) -> Result<PrincipalStructure> {
    let n = shape.metric.nrows();
    let want = n - 2;
    let (values, vectors) = eigen_g_self_adjoint(&shape.shape_op, &shape.metric)?;
    let clusters = cluster_eigenvalues(&values, rel_tol);
    let found: Vec<usize> = clusters.iter().map(|c| c.members.len()).collect();

    let exact: Vec<&crate::linalg::Cluster> =
        clusters.iter().filter(|c| c.members.len() == want).collect();
    let target = match exact.len() {
        1 => exact[0],
        0 => {
            let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let threshold = rel_tol * scale;
            for c in clusters.iter().filter(|c| c.members.len() > want && c.members.len() < n) {
                let spread = c
                    .members
                    .windows(2)
                    .map(|w| values[w[0]] - values[w[1]])
                    .fold(0.0f64, f64::max);
                if spread > 1e-3 * threshold {
                    return Err(GeomError::AmbiguousClustering { candidates: c.members.len() - want + 1 });
                }
            }
            return Err(GeomError::NoMultiplicityN2 { needed: want, found });
        }
        k => return Err(GeomError::AmbiguousClustering { candidates: k }),
    };

    let mut delta_basis = DMatrix::zeros(n, want);
    for (col, &idx) in target.members.iter().enumerate() {
        delta_basis.set_column(col, &vectors.column(idx));
    }
    let cross: Vec<usize> = (0..n).filter(|i| !target.members.contains(i)).collect();
    let mut cross_basis = DMatrix::zeros(n, 2);
    for (col, &idx) in cross.iter().enumerate() {
        cross_basis.set_column(col, &vectors.column(idx));
    }
    Ok(PrincipalStructure {
        lambda: target.value,
        delta_basis,
        cross_basis,
        cross_values: [values[cross[0]], values[cross[1]]],
        eigenvalues: values,
    })
}

/// One stage of a conformal transformation of `R^{n+1}`.
#[derive(Clone, Debug)]
pub enum MoebiusStep {
    /// `x -> Q x` with `Q` orthogonal.
    Orthogonal(DMatrix<f64>),
    /// `x -> s x` with `s > 0`.
    Scale(f64),
    /// `x -> x + t`.
    Translate(DVector<f64>),
    /// Unit-sphere inversion `x -> (x - c) / |x - c|^2`.
    Inversion(DVector<f64>),
}

/// A composition of similarities and at most one inversion, applied in order.
#[derive(Clone, Debug)]
pub struct MoebiusTransform {
    dim: usize,
    steps: Vec<MoebiusStep>,
}

impl MoebiusTransform {
    pub fn new(dim: usize, steps: Vec<MoebiusStep>) -> MoebiusTransform {
        let mut inversions = 0;
        for step in &steps {
            match step {
                MoebiusStep::Orthogonal(q) => {
                    assert_eq!(q.nrows(), dim);
                    assert_eq!(q.ncols(), dim);
                    let defect = (q.transpose() * q - DMatrix::identity(dim, dim)).norm();
                    assert!(defect <= 1e-10, "matrix is not orthogonal: defect {defect:e}");
                }
                MoebiusStep::Scale(s) => assert!(*s > 0.0, "scale must be positive"),
                MoebiusStep::Translate(t) => assert_eq!(t.len(), dim),
                MoebiusStep::Inversion(c) => {
                    assert_eq!(c.len(), dim);
                    inversions += 1;
                }
            }
        }
        assert!(inversions <= 1, "at most one inversion");
        MoebiusTransform { dim, steps }
    }

    pub fn identity(dim: usize) -> MoebiusTransform {
        MoebiusTransform { dim, steps: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn has_inversion(&self) -> bool {
        self.steps.iter().any(|s| matches!(s, MoebiusStep::Inversion(_)))
    }

    /// A seeded similarity: rotation, scale in `[0.6, 1.8]`, translation in
    /// `[-spread, spread]^dim`.
    pub fn random_similarity(dim: usize, seed: u64, spread: f64) -> MoebiusTransform {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let gauss = DMatrix::from_fn(dim, dim, |_, _| rng.gen::<f64>() - 0.5);
        let qr = gauss.qr();
        let mut q = qr.q();
        // Make the factorization unique in sign and the rotation proper.
        let r = qr.r();
        for j in 0..dim {
            if r[(j, j)] < 0.0 {
                let col = -q.column(j);
                q.set_column(j, &col);
            }
        }
        if q.determinant() < 0.0 {
            let col = -q.column(0);
            q.set_column(0, &col);
        }
        let scale = 0.6 + 1.2 * rng.gen::<f64>();
        let t = DVector::from_fn(dim, |_, _| spread * (2.0 * rng.gen::<f64>() - 1.0));
        MoebiusTransform::new(
            dim,
            vec![MoebiusStep::Orthogonal(q), MoebiusStep::Scale(scale), MoebiusStep::Translate(t)],
        )
    }

    /// Append an inversion step.
    pub fn then_inversion(mut self, center: DVector<f64>) -> MoebiusTransform {
        assert!(!self.has_inversion());
        assert_eq!(center.len(), self.dim);
        self.steps.push(MoebiusStep::Inversion(center));
        MoebiusTransform::new(self.dim, self.steps)
    }

    /// Apply to a point.
    pub fn apply_value(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        let mut y = x.clone();
        for step in &self.steps {
            y = match step {
                MoebiusStep::Orthogonal(q) => q * y,
                MoebiusStep::Scale(s) => y * *s,
                MoebiusStep::Translate(t) => y + t,
                MoebiusStep::Inversion(c) => {
                    let d = y - c;
                    let d2 = d.norm_squared();
                    if d2 <= INVERSION_CLEARANCE_SQ {
                        return Err(GeomError::InversionCenterOnImage { dist_sq: d2 });
                    }
                    d / d2
                }
            };
        }
        Ok(y)
    }

    /// Apply to jet coordinates; exact truncated arithmetic throughout.
    pub fn apply_jets(&self, x: &[Jet]) -> Result<Vec<Jet>> {
        assert_eq!(x.len(), self.dim);
        let mut y: Vec<Jet> = x.to_vec();
        for step in &self.steps {
            y = match step {
                MoebiusStep::Orthogonal(q) => (0..self.dim)
                    .map(|i| {
                        let mut acc = y[0].scale(q[(i, 0)]);
                        for j in 1..self.dim {
                            acc = acc + y[j].scale(q[(i, j)]);
                        }
                        acc
                    })
                    .collect(),
                MoebiusStep::Scale(s) => y.iter().map(|c| c.scale(*s)).collect(),
                MoebiusStep::Translate(t) => {
                    y.iter().enumerate().map(|(i, c)| c + t[i]).collect()
                }
                MoebiusStep::Inversion(center) => {
                    let d: Vec<Jet> = y.iter().enumerate().map(|(i, c)| c - center[i]).collect();
                    let d2 = dot(&d, &d);
                    if d2.value() <= INVERSION_CLEARANCE_SQ {
                        return Err(GeomError::InversionCenterOnImage { dist_sq: d2.value() });
                    }
                    let inv = d2.recip();
                    d.iter().map(|c| c * &inv).collect()
                }
            };
        }
        Ok(y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// Cylinder over the unit circle in R^3, normal toward the axis.
    fn circle_cylinder() -> ImmersionPatch {
        ImmersionPatch::new(2, vec![(-10.0, 10.0), (-10.0, 10.0)], -1.0, |u| {
            Ok(vec![u[0].cos(), u[0].sin(), u[1].clone()])
        })
    }

    /// Unit sphere in R^3 in spherical coordinates, inward normal.
    fn sphere2() -> ImmersionPatch {
        ImmersionPatch::new(2, vec![(0.2, 2.9), (-10.0, 10.0)], -1.0, |u| {
            Ok(vec![
                u[0].sin() * u[1].cos(),
                u[0].sin() * u[1].sin(),
                u[0].cos(),
            ])
        })
    }

    #[test]
    fn cylinder_shape_operator() {
        let shape = shape_data(&circle_cylinder(), &[0.7, -1.3]).unwrap();
        assert_relative_eq!(shape.shape_op[(0, 0)], 1.0, epsilon = 1e-12);
        assert_relative_eq!(shape.shape_op[(1, 1)], 0.0, epsilon = 1e-12);
        assert_relative_eq!(shape.shape_op[(0, 1)], 0.0, epsilon = 1e-12);
        assert_relative_eq!(shape.mean_curv, 0.5, epsilon = 1e-12);
        assert_relative_eq!(shape.alpha_norm_sq, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn sphere_is_umbilic_with_unit_curvature() {
        let shape = shape_data(&sphere2(), &[1.1, 0.4]).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert_relative_eq!(shape.shape_op[(i, j)], want, epsilon = 1e-11);
            }
        }
        assert_relative_eq!(shape.mean_curv, 1.0, epsilon = 1e-11);
    }

    #[test]
    fn graph_shape_operator_is_hessian_at_flat_point() {
        let patch = ImmersionPatch::new(2, vec![(-1.0, 1.0), (-1.0, 1.0)], 1.0, |u| {
            Ok(vec![u[0].clone(), u[1].clone(), &u[0] * &u[0] - &u[1] * &u[1]])
        });
        let shape = shape_data(&patch, &[0.0, 0.0]).unwrap();
        assert_relative_eq!(shape.shape_op[(0, 0)], 2.0, epsilon = 1e-12);
        assert_relative_eq!(shape.shape_op[(1, 1)], -2.0, epsilon = 1e-12);
        assert_relative_eq!(shape.normal[2], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn degenerate_jacobian_is_rejected() {
        let patch = ImmersionPatch::new(2, vec![(-1.0, 1.0), (-1.0, 1.0)], 1.0, |u| {
            // Second coordinate duplicates the first direction.
            Ok(vec![u[0].clone(), u[0].clone(), &u[0] * &u[1] * 0.0])
        });
        assert!(matches!(
            shape_data(&patch, &[0.2, 0.2]),
            Err(GeomError::JacobianRankDeficient { .. })
        ));
    }

    fn graph5(diag: [f64; 5]) -> ImmersionPatch {
        // With five chart variables the cross-product normal of a graph points
        // down; flip orientation so A matches the Hessian.
        ImmersionPatch::new(5, vec![(-1.0, 1.0); 5], -1.0, move |u| {
            let mut h = Jet::constant(u[0].dim(), u[0].order(), 0.0);
            for (i, d) in diag.iter().enumerate() {
                h = h + (&u[i] * &u[i]).scale(0.5 * d);
            }
            let mut out: Vec<Jet> = u.to_vec();
            out.push(h);
            Ok(out)
        })
    }

    #[test]
    fn principal_structure_finds_triple_cluster() {
        let shape = shape_data(&graph5([0.25, 2.0, 0.25, -1.0, 0.25]), &[0.0; 5]).unwrap();
        let ps = principal_structure(&shape, CLUSTER_REL_TOL).unwrap();
        assert_relative_eq!(ps.lambda, 0.25, epsilon = 1e-12);
        assert_eq!(ps.eigenvalues.len(), 5);
        assert_relative_eq!(ps.cross_values[0], 2.0, epsilon = 1e-12);
        assert_relative_eq!(ps.cross_values[1], -1.0, epsilon = 1e-12);
        // Bases are g-orthonormal (g = I at the flat point) and invariant.
        let gram = ps.delta_basis.transpose() * &ps.delta_basis;
        assert_relative_eq!((gram - DMatrix::identity(3, 3)).norm(), 0.0, epsilon = 1e-10);
        for col in 0..3 {
            let v = ps.delta_basis.column(col);
            let av = &shape.shape_op * v;
            assert_relative_eq!((av - v * ps.lambda).norm(), 0.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn principal_structure_rejects_wrong_multiplicities() {
        let shape = shape_data(&graph5([1.0, 0.0, 0.0, 0.0, 0.0]), &[0.0; 5]).unwrap();
        match principal_structure(&shape, CLUSTER_REL_TOL) {
            Err(GeomError::NoMultiplicityN2 { needed: 3, found }) => {
                assert_eq!(found, vec![1, 4]);
            }
            other => panic!("expected NoMultiplicityN2, got {other:?}"),
        }
    }

    #[test]
    fn principal_structure_flags_boundary_ties() {
        let shape = shape_data(&graph5([1.0, 1.0 + 5e-7, 1.0, 1.0, 2.0]), &[0.0; 5]).unwrap();
        assert!(matches!(
            principal_structure(&shape, CLUSTER_REL_TOL),
            Err(GeomError::AmbiguousClustering { .. })
        ));
    }

    #[test]
    fn identity_transform_is_exact() {
        let patch = sphere2();
        let moved = patch.transformed(MoebiusTransform::identity(3));
        let a = shape_data(&patch, &[1.0, 0.5]).unwrap();
        let b = shape_data(&moved, &[1.0, 0.5]).unwrap();
        assert_eq!(a.shape_op, b.shape_op);
    }

    #[test]
    fn scaling_covariance() {
        let patch = sphere2();
        let t = MoebiusTransform::new(3, vec![MoebiusStep::Scale(2.5)]);
        let scaled = patch.transformed(t);
        let a = shape_data(&patch, &[1.0, 0.5]).unwrap();
        let b = shape_data(&scaled, &[1.0, 0.5]).unwrap();
        assert_relative_eq!(
            (b.metric.clone() - &a.metric * 2.5f64.powi(2)).norm(),
            0.0,
            epsilon = 1e-12
        );
        assert_relative_eq!(
            (b.shape_op.clone() - &a.shape_op / 2.5).norm(),
            0.0,
            epsilon = 1e-12
        );
        assert_relative_eq!(b.mean_curv, a.mean_curv / 2.5, epsilon = 1e-12);
    }

    #[test]
    fn inversion_centered_on_image_fails() {
        let patch = sphere2();
        let center = patch.value_at(&[1.0, 0.5]).unwrap();
        let t = MoebiusTransform::identity(3).then_inversion(center);
        let moved = patch.transformed(t);
        assert!(matches!(
            shape_data(&moved, &[1.0, 0.5]),
            Err(GeomError::InversionCenterOnImage { .. })
        ));
    }

    #[test]
    fn random_similarity_is_deterministic_in_seed() {
        let a = MoebiusTransform::random_similarity(6, 42, 1.0);
        let b = MoebiusTransform::random_similarity(6, 42, 1.0);
        let x = DVector::from_vec(vec![1.0, -2.0, 0.5, 0.0, 3.0, -1.0]);
        assert_eq!(a.apply_value(&x).unwrap(), b.apply_value(&x).unwrap());
    }
}
