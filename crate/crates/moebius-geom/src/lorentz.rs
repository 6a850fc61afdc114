//! Lorentzian arithmetic and the light-cone model of the conformal sphere.
//!
//! Minkowski space `L^m` carries the inner product
//! `<u, v> = -u_0 v_0 + sum_{i>=1} u_i v_i`. A [`LightConeChart`] isometrically
//! identifies Euclidean space `R^{n+1}` with a slice of the forward light
//! cone in `L^{n+3}` through `Psi(x) = v + C x - (|x|^2 / 2) w`, where `v, w`
//! are null with `<v, w> = 1` and `C` maps the Euclidean coordinates onto
//! space-like directions orthogonal to both. Sphere congruences live in the
//! unit de Sitter slice `<S, S> = 1` of the same Minkowski space.

use nalgebra::{DMatrix, DVector};

use crate::jet::Jet;
use crate::linalg::dot;

/// Minkowski inner product with one time-like direction at index 0.
pub fn mink_inner(u: &DVector<f64>, v: &DVector<f64>) -> f64 {
    assert_eq!(u.len(), v.len());
    let mut acc = -u[0] * v[0];
    for i in 1..u.len() {
        acc += u[i] * v[i];
    }
    acc
}

/// Minkowski inner product of jet vectors.
pub fn mink_inner_jets(u: &[Jet], v: &[Jet]) -> Jet {
    assert_eq!(u.len(), v.len());
    let mut acc = -(&u[0] * &v[0]);
    for i in 1..u.len() {
        acc = acc + &u[i] * &v[i];
    }
    acc
}

/// Signature-(2,2) pairing on `R^4`: `a_0 b_0 + a_1 b_1 - a_2 b_2 - a_3 b_3`.
pub fn sig22_inner(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    a[0] * b[0] + a[1] * b[1] - a[2] * b[2] - a[3] * b[3]
}

/// Isometric chart of `R^{n+1}` onto the light cone of `L^{n+3}`.
pub struct LightConeChart {
    /// Euclidean dimension `n + 1`.
    pub euclid_dim: usize,
    /// Minkowski dimension `n + 3`.
    pub mink_dim: usize,
    /// Null vector with `Psi(0) = v`.
    pub v: DVector<f64>,
    /// Null vector dual to `v`; `<Psi(x), w> = 1` for every `x`.
    pub w: DVector<f64>,
    /// Isometric injection of `R^{n+1}` into `span{v, w}^perp`.
    pub c: DMatrix<f64>,
}

impl LightConeChart {
    /// The standard chart: `w = e_0 + e_{m-1}`, `v = (e_{m-1} - e_0) / 2`,
    /// and `C` the inclusion onto coordinates `1 ..= n+1`.
    pub fn standard(hypersurface_dim: usize) -> LightConeChart {
        let euclid_dim = hypersurface_dim + 1;
        let mink_dim = hypersurface_dim + 3;
        let mut v = DVector::zeros(mink_dim);
        v[0] = -0.5;
        v[mink_dim - 1] = 0.5;
        let mut w = DVector::zeros(mink_dim);
        w[0] = 1.0;
        w[mink_dim - 1] = 1.0;
        let mut c = DMatrix::zeros(mink_dim, euclid_dim);
        for j in 0..euclid_dim {
            c[(j + 1, j)] = 1.0;
        }
        let chart = LightConeChart { euclid_dim, mink_dim, v, w, c };
        chart.validate();
        chart
    }

    fn validate(&self) {
        let tol = 1e-12;
        assert!(mink_inner(&self.v, &self.v).abs() <= tol, "v must be null");
        assert!(mink_inner(&self.w, &self.w).abs() <= tol, "w must be null");
        assert!((mink_inner(&self.v, &self.w) - 1.0).abs() <= tol, "<v, w> must be 1");
        for j in 0..self.euclid_dim {
            let cj = DVector::from(self.c.column(j).into_owned());
            assert!(mink_inner(&cj, &self.v).abs() <= tol);
            assert!(mink_inner(&cj, &self.w).abs() <= tol);
            for k in 0..self.euclid_dim {
                let ck = DVector::from(self.c.column(k).into_owned());
                let want = if j == k { 1.0 } else { 0.0 };
                assert!((mink_inner(&cj, &ck) - want).abs() <= tol, "C must be isometric");
            }
        }
    }

    /// `Psi(x) = v + C x - (|x|^2 / 2) w`.
    pub fn embed(&self, x: &DVector<f64>) -> DVector<f64> {
        assert_eq!(x.len(), self.euclid_dim);
        &self.v + &self.c * x - &self.w * (0.5 * x.norm_squared())
    }

    /// `dPsi_x(X) = C X - <x, X> w`.
    pub fn differential(&self, x: &DVector<f64>, big_x: &DVector<f64>) -> DVector<f64> {
        assert_eq!(x.len(), self.euclid_dim);
        assert_eq!(big_x.len(), self.euclid_dim);
        &self.c * big_x - &self.w * x.dot(big_x)
    }

    /// Jet-valued `Psi(x)`; `x` has one jet per Euclidean coordinate.
    pub fn embed_jets(&self, x: &[Jet]) -> Vec<Jet> {
        assert_eq!(x.len(), self.euclid_dim);
        let half_norm = dot(x, x).scale(0.5);
        (0..self.mink_dim)
            .map(|row| {
                let mut acc = Jet::constant(x[0].dim(), x[0].order(), self.v[row]);
                for (j, xj) in x.iter().enumerate() {
                    if self.c[(row, j)] != 0.0 {
                        acc = acc + xj.scale(self.c[(row, j)]);
                    }
                }
                if self.w[row] != 0.0 {
                    acc = acc - half_norm.scale(self.w[row]);
                }
                acc
            })
            .collect()
    }

    /// Jet-valued `dPsi_x(X)` for jet vectors `x` and `X`.
    pub fn differential_jets(&self, x: &[Jet], big_x: &[Jet]) -> Vec<Jet> {
        assert_eq!(x.len(), self.euclid_dim);
        assert_eq!(big_x.len(), self.euclid_dim);
        let pairing = dot(x, big_x);
        (0..self.mink_dim)
            .map(|row| {
                let mut acc = Jet::constant(x[0].dim(), x[0].order(), 0.0);
                for (j, xj) in big_x.iter().enumerate() {
                    if self.c[(row, j)] != 0.0 {
                        acc = acc + xj.scale(self.c[(row, j)]);
                    }
                }
                if self.w[row] != 0.0 {
                    acc = acc - pairing.scale(self.w[row]);
                }
                acc
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn ev(m: usize, i: usize) -> DVector<f64> {
        let mut v = DVector::zeros(m);
        v[i] = 1.0;
        v
    }

    #[test]
    fn inner_product_signature() {
        let m = 4;
        assert_relative_eq!(mink_inner(&ev(m, 0), &ev(m, 0)), -1.0);
        assert_relative_eq!(mink_inner(&ev(m, 1), &ev(m, 1)), 1.0);
        let null = ev(m, 0) + ev(m, 1);
        assert_relative_eq!(mink_inner(&null, &null), 0.0);
    }

    #[test]
    fn chart_maps_origin_to_v() {
        let chart = LightConeChart::standard(5);
        let psi = chart.embed(&DVector::zeros(6));
        assert_relative_eq!((psi - &chart.v).norm(), 0.0);
    }

    #[test]
    fn embedding_is_null_with_unit_w_pairing() {
        let chart = LightConeChart::standard(5);
        let x = DVector::from_vec(vec![1.0, -2.0, 0.5, 3.0, -0.25, 2.0]);
        let psi = chart.embed(&x);
        assert_relative_eq!(mink_inner(&psi, &psi), 0.0, epsilon = 1e-12);
        assert_relative_eq!(mink_inner(&psi, &chart.w), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn differential_at_origin_is_inclusion() {
        let chart = LightConeChart::standard(5);
        let x = DVector::zeros(6);
        let big_x = DVector::from_vec(vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        let d = chart.differential(&x, &big_x);
        assert_relative_eq!((&d - &chart.c * &big_x).norm(), 0.0);
    }

    #[test]
    fn differential_is_isometric_and_tangent() {
        let chart = LightConeChart::standard(5);
        let x = DVector::from_vec(vec![0.3, -1.2, 0.7, 2.0, -0.5, 1.1]);
        let a = DVector::from_vec(vec![1.0, 0.5, -2.0, 0.25, 3.0, -1.0]);
        let b = DVector::from_vec(vec![-0.75, 2.0, 1.0, 0.5, -0.25, 0.1]);
        let da = chart.differential(&x, &a);
        let db = chart.differential(&x, &b);
        assert_relative_eq!(mink_inner(&da, &db), a.dot(&b), epsilon = 1e-12);
        assert_relative_eq!(mink_inner(&chart.embed(&x), &da), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn jet_embedding_matches_pointwise() {
        let chart = LightConeChart::standard(2);
        let centers = [0.4, -0.9, 1.3];
        let x = Jet::variables(2, 2, &[0.2, 0.5]);
        let coords: Vec<Jet> = vec![
            x[0].sin() + centers[0],
            &x[0] * &x[1] + centers[1],
            x[1].cosh() + centers[2],
        ];
        let psi = chart.embed_jets(&coords);
        let values = DVector::from_vec(coords.iter().map(|c| c.value()).collect::<Vec<_>>());
        let direct = chart.embed(&values);
        for (row, p) in psi.iter().enumerate() {
            assert_relative_eq!(p.value(), direct[row], epsilon = 1e-13);
        }
        // Null at jet level: every coefficient of <Psi, Psi> vanishes.
        let norm = mink_inner_jets(&psi, &psi);
        for alpha in [[0, 0], [1, 0], [0, 1], [2, 0], [1, 1], [0, 2]] {
            assert_relative_eq!(norm.coeff(&alpha), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn sig22_basis_squares() {
        assert_relative_eq!(sig22_inner(&[1.0, 0.0, 0.0, 0.0], &[1.0, 0.0, 0.0, 0.0]), 1.0);
        assert_relative_eq!(sig22_inner(&[0.0, 0.0, 1.0, 0.0], &[0.0, 0.0, 1.0, 0.0]), -1.0);
        let null = [1.0, 0.0, 1.0, 0.0];
        assert_relative_eq!(sig22_inner(&null, &null), 0.0);
    }
}
