//! Truncated multivariate Taylor expansions (jets).
//!
//! A [`Jet`] stores the Taylor coefficients of a smooth function at a chart
//! point: `coeff(alpha) = (d^alpha h)(center) / alpha!` for all multi-indices
//! `alpha` with `|alpha| <= order`. Coefficients live in a dense vector in
//! graded-lexicographic layout; arithmetic is exact truncated polynomial
//! algebra, so derivatives extracted from a jet pipeline carry no stencil
//! error, only rounding.
//!
//! Orders combine pessimistically: the result of a binary operation is
//! truncated to the lower operand order, so no coefficient of degree beyond
//! the reliable range is ever read or produced.

use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::OnceLock;

use crate::error::{GeomError, Result};

/// Largest supported number of chart variables.
pub const MAX_VARS: usize = 6;
/// Largest supported truncation order.
pub const MAX_ORDER: usize = 4;

/// Multi-index exponent vector, padded with zeros beyond `dim`.
type Exps = [u8; MAX_VARS];

fn degree(e: &Exps) -> usize {
    e.iter().map(|&x| x as usize).sum()
}

/// Perfect-hash key for exponent vectors with entries `<= MAX_ORDER`.
fn key(e: &Exps) -> usize {
    let mut k = 0usize;
    for i in (0..MAX_VARS).rev() {
        k = k * (MAX_ORDER + 1) + e[i] as usize;
    }
    k
}

/// Precomputed basis data for one variable count.
struct Basis {
    /// Exponent vectors in graded-lex order, all degrees `0..=MAX_ORDER`.
    exps: Vec<Exps>,
    /// `key(exps) -> position`, `u32::MAX` when absent.
    pos: Vec<u32>,
    /// `degree_start[d]` = first position of degree `d`; last entry = len.
    degree_start: [usize; MAX_ORDER + 2],
    /// Product triples `(i, j, k)` with `exps[i] + exps[j] = exps[k]`,
    /// sorted by the degree of `k`.
    mul: Vec<(u32, u32, u32)>,
    /// `mul_degree_start[d]` = first triple whose result has degree `d`.
    mul_degree_start: [usize; MAX_ORDER + 2],
}

impl Basis {
    fn build(dim: usize) -> Basis {
        let mut exps: Vec<Exps> = Vec::new();
        let mut degree_start = [0usize; MAX_ORDER + 2];
        for d in 0..=MAX_ORDER {
            degree_start[d] = exps.len();
            let mut cur = [0u8; MAX_VARS];
            gen_degree(dim, d, 0, &mut cur, &mut exps);
        }
        degree_start[MAX_ORDER + 1] = exps.len();

        let mut pos = vec![u32::MAX; (MAX_ORDER + 1).pow(MAX_VARS as u32)];
        for (i, e) in exps.iter().enumerate() {
            pos[key(e)] = i as u32;
        }

        let mut mul: Vec<(u32, u32, u32)> = Vec::new();
        for (i, a) in exps.iter().enumerate() {
            for (j, b) in exps.iter().enumerate() {
                if degree(a) + degree(b) <= MAX_ORDER {
                    let mut c = [0u8; MAX_VARS];
                    for v in 0..MAX_VARS {
                        c[v] = a[v] + b[v];
                    }
                    mul.push((i as u32, j as u32, pos[key(&c)]));
                }
            }
        }
        mul.sort_by_key(|&(i, j, k)| (degree(&exps[k as usize]), k, i, j));
        let mut mul_degree_start = [mul.len(); MAX_ORDER + 2];
        for (t, &(_, _, k)) in mul.iter().enumerate().rev() {
            let d = degree(&exps[k as usize]);
            mul_degree_start[d] = t;
        }
        for d in (0..=MAX_ORDER).rev() {
            if mul_degree_start[d] > mul_degree_start[d + 1] {
                mul_degree_start[d] = mul_degree_start[d + 1];
            }
        }
        Basis { exps, pos, degree_start, mul, mul_degree_start }
    }

    fn len_at(&self, order: usize) -> usize {
        self.degree_start[order + 1]
    }
}

/// Emit all exponent vectors of total degree `left` over variables `var..dim`,
/// first variable varying slowest from high to low exponent.
fn gen_degree(dim: usize, left: usize, var: usize, cur: &mut Exps, out: &mut Vec<Exps>) {
    if var == dim - 1 {
        cur[var] = left as u8;
        out.push(*cur);
        cur[var] = 0;
        return;
    }
    for e in (0..=left).rev() {
        cur[var] = e as u8;
        gen_degree(dim, left - e, var + 1, cur, out);
    }
    cur[var] = 0;
}

fn basis(dim: usize) -> &'static Basis {
    static TABLES: OnceLock<Vec<Basis>> = OnceLock::new();
    let tables = TABLES.get_or_init(|| (1..=MAX_VARS).map(Basis::build).collect());
    assert!(
        (1..=MAX_VARS).contains(&dim),
        "jet dimension {dim} outside 1..={MAX_VARS}"
    );
    &tables[dim - 1]
}

fn pad(alpha: &[usize]) -> Exps {
    let mut e = [0u8; MAX_VARS];
    for (i, &a) in alpha.iter().enumerate() {
        e[i] = a as u8;
    }
    e
}

fn factorial(alpha: &Exps) -> f64 {
    const FACT: [f64; MAX_ORDER + 1] = [1.0, 1.0, 2.0, 6.0, 24.0];
    alpha.iter().map(|&a| FACT[a as usize]).product()
}

/// Truncated Taylor expansion of a scalar function at a chart point.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet {
    dim: usize,
    order: usize,
    coeffs: Vec<f64>,
}

impl Jet {
    fn raw(dim: usize, order: usize, coeffs: Vec<f64>) -> Jet {
        debug_assert_eq!(coeffs.len(), basis(dim).len_at(order));
        Jet { dim, order, coeffs }
    }

    /// The constant function `value`.
    pub fn constant(dim: usize, order: usize, value: f64) -> Jet {
        assert!(order <= MAX_ORDER, "order {order} exceeds {MAX_ORDER}");
        let mut coeffs = vec![0.0; basis(dim).len_at(order)];
        coeffs[0] = value;
        Jet::raw(dim, order, coeffs)
    }

    /// The coordinate function `u_var` expanded at `center`.
    pub fn variable(dim: usize, order: usize, var: usize, center: f64) -> Jet {
        assert!(var < dim, "variable {var} outside dimension {dim}");
        let mut jet = Jet::constant(dim, order, center);
        if order >= 1 {
            // Degree-1 coefficients immediately follow the constant term.
            jet.coeffs[1 + var] = 0.0;
            let mut e = [0u8; MAX_VARS];
            e[var] = 1;
            let idx = basis(dim).pos[key(&e)] as usize;
            jet.coeffs[idx] = 1.0;
        }
        jet
    }

    /// All coordinate functions expanded at `center`.
    pub fn variables(dim: usize, order: usize, center: &[f64]) -> Vec<Jet> {
        assert_eq!(center.len(), dim);
        (0..dim).map(|v| Jet::variable(dim, order, v, center[v])).collect()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Function value at the expansion center.
    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    /// Largest absolute Taylor coefficient; zero exactly when the whole jet
    /// vanishes to its order.
    pub fn coeffs_abs_max(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// Taylor coefficient of the monomial `u^alpha`.
    pub fn coeff(&self, alpha: &[usize]) -> f64 {
        assert!(alpha.len() <= self.dim);
        let e = pad(alpha);
        assert!(
            degree(&e) <= self.order,
            "coefficient degree {} beyond order {}",
            degree(&e),
            self.order
        );
        self.coeffs[basis(self.dim).pos[key(&e)] as usize]
    }

    /// Partial derivative `d^alpha h` at the center: `alpha! * coeff(alpha)`.
    pub fn partial(&self, alpha: &[usize]) -> Result<f64> {
        let e = pad(alpha);
        let d = degree(&e);
        if d > self.order {
            return Err(GeomError::OrderExceeded { requested: d, order: self.order });
        }
        Ok(factorial(&e) * self.coeffs[basis(self.dim).pos[key(&e)] as usize])
    }

    /// Copy truncated to a lower order.
    pub fn truncate(&self, order: usize) -> Jet {
        assert!(order <= self.order);
        Jet::raw(self.dim, order, self.coeffs[..basis(self.dim).len_at(order)].to_vec())
    }

    /// Jet of the partial derivative with respect to `u_var`, one order lower.
    pub fn derivative(&self, var: usize) -> Jet {
        assert!(var < self.dim);
        assert!(self.order >= 1, "cannot differentiate an order-0 jet");
        let b = basis(self.dim);
        let order = self.order - 1;
        let mut coeffs = vec![0.0; b.len_at(order)];
        for (idx, c) in coeffs.iter_mut().enumerate() {
            let mut e = b.exps[idx];
            e[var] += 1;
            *c = (e[var] as f64) * self.coeffs[b.pos[key(&e)] as usize];
        }
        Jet::raw(self.dim, order, coeffs)
    }

    fn assert_same_dim(&self, rhs: &Jet) {
        assert_eq!(self.dim, rhs.dim, "jet dimension mismatch");
    }

    fn binary<F: Fn(f64, f64) -> f64>(&self, rhs: &Jet, f: F) -> Jet {
        self.assert_same_dim(rhs);
        let order = self.order.min(rhs.order);
        let len = basis(self.dim).len_at(order);
        let coeffs = (0..len).map(|i| f(self.coeffs[i], rhs.coeffs[i])).collect();
        Jet::raw(self.dim, order, coeffs)
    }

    fn mul_jet(&self, rhs: &Jet) -> Jet {
        self.assert_same_dim(rhs);
        let b = basis(self.dim);
        let order = self.order.min(rhs.order);
        let mut coeffs = vec![0.0; b.len_at(order)];
        for &(i, j, k) in &b.mul[..b.mul_degree_start[order + 1]] {
            coeffs[k as usize] += self.coeffs[i as usize] * rhs.coeffs[j as usize];
        }
        Jet::raw(self.dim, order, coeffs)
    }

    pub fn scale(&self, s: f64) -> Jet {
        Jet::raw(self.dim, self.order, self.coeffs.iter().map(|c| c * s).collect())
    }

    /// Horner evaluation of `sum_j series[j] * (self - value)^j`, where
    /// `series[j] = F^(j)(value) / j!`. The deviation is nilpotent, so the
    /// series terminates at the truncation order.
    fn apply_series(&self, series: &[f64]) -> Jet {
        debug_assert_eq!(series.len(), self.order + 1);
        let mut delta = self.clone();
        delta.coeffs[0] = 0.0;
        let mut result = Jet::constant(self.dim, self.order, series[self.order]);
        for j in (0..self.order).rev() {
            result = result.mul_jet(&delta) + series[j];
        }
        result
    }

    /// Reciprocal; fails when the center value is zero.
    pub fn try_recip(&self) -> Result<Jet> {
        let c = self.value();
        if c == 0.0 {
            return Err(GeomError::DivisionByZeroAtCenter);
        }
        // 1/x at c: derivatives give (-1)^j / c^(j+1).
        let mut series = [0.0; MAX_ORDER + 1];
        let mut p = 1.0 / c;
        for s in series.iter_mut().take(self.order + 1) {
            *s = p;
            p /= -c;
        }
        Ok(self.apply_series(&series[..=self.order]))
    }

    pub fn recip(&self) -> Jet {
        self.try_recip().expect("jet reciprocal")
    }

    /// Square root; requires a positive center value.
    pub fn try_sqrt(&self) -> Result<Jet> {
        let c = self.value();
        if c <= 0.0 {
            return Err(GeomError::DomainError { op: "sqrt", center: c });
        }
        // Binomial series for x^(1/2) at c.
        let mut series = [0.0; MAX_ORDER + 1];
        let mut coef = c.sqrt();
        for (j, s) in series.iter_mut().enumerate().take(self.order + 1) {
            *s = coef;
            coef *= (0.5 - j as f64) / (j as f64 + 1.0) / c;
        }
        Ok(self.apply_series(&series[..=self.order]))
    }

    pub fn sqrt(&self) -> Jet {
        self.try_sqrt().expect("jet sqrt")
    }

    /// Natural logarithm; requires a positive center value.
    pub fn try_ln(&self) -> Result<Jet> {
        let c = self.value();
        if c <= 0.0 {
            return Err(GeomError::DomainError { op: "ln", center: c });
        }
        let mut series = [0.0; MAX_ORDER + 1];
        series[0] = c.ln();
        let mut p = 1.0 / c;
        for j in 1..=self.order {
            // (-1)^(j+1) / (j c^j)
            series[j] = p / j as f64;
            p /= -c;
        }
        Ok(self.apply_series(&series[..=self.order]))
    }

    pub fn ln(&self) -> Jet {
        self.try_ln().expect("jet ln")
    }

    pub fn exp(&self) -> Jet {
        let mut series = [0.0; MAX_ORDER + 1];
        let e = self.value().exp();
        let mut f = 1.0;
        for (j, s) in series.iter_mut().enumerate().take(self.order + 1) {
            if j > 0 {
                f *= j as f64;
            }
            *s = e / f;
        }
        self.apply_series(&series[..=self.order])
    }

    pub fn sin(&self) -> Jet {
        self.apply_series(&trig_series(self.value(), self.order, false))
    }

    pub fn cos(&self) -> Jet {
        self.apply_series(&trig_series(self.value(), self.order, true))
    }

    pub fn sinh(&self) -> Jet {
        self.apply_series(&hyper_series(self.value(), self.order, false))
    }

    pub fn cosh(&self) -> Jet {
        self.apply_series(&hyper_series(self.value(), self.order, true))
    }

    /// Integer power by repeated multiplication; valid at any center.
    pub fn powi(&self, n: i32) -> Jet {
        if n < 0 {
            return self.recip().powi(-n);
        }
        let mut result = Jet::constant(self.dim, self.order, 1.0);
        for _ in 0..n {
            result = result.mul_jet(self);
        }
        result
    }

    /// Real power; requires a positive center value.
    pub fn try_powf(&self, p: f64) -> Result<Jet> {
        let c = self.value();
        if c <= 0.0 {
            return Err(GeomError::DomainError { op: "powf", center: c });
        }
        let mut series = [0.0; MAX_ORDER + 1];
        let mut coef = c.powf(p);
        for (j, s) in series.iter_mut().enumerate().take(self.order + 1) {
            *s = coef;
            coef *= (p - j as f64) / (j as f64 + 1.0) / c;
        }
        Ok(self.apply_series(&series[..=self.order]))
    }

    pub fn powf(&self, p: f64) -> Jet {
        self.try_powf(p).expect("jet powf")
    }

    /// Substitute deviation jets for this jet's variables.
    ///
    /// `deltas[v]` is the expansion of `u_v - center_v` in the target chart
    /// and must have value zero. The result is the composite expansion,
    /// truncated to the lower of the two orders involved.
    pub fn compose(&self, deltas: &[Jet]) -> Jet {
        assert_eq!(deltas.len(), self.dim, "one deviation jet per variable");
        let tdim = deltas[0].dim;
        let mut order = self.order;
        for d in deltas {
            assert_eq!(d.dim, tdim, "deviation jets share one chart");
            assert_eq!(d.value(), 0.0, "deviation jets have zero value");
            order = order.min(d.order);
        }
        // powers[v][e] = deltas[v]^e
        let one = Jet::constant(tdim, order, 1.0);
        let powers: Vec<Vec<Jet>> = deltas
            .iter()
            .map(|d| {
                let mut p = vec![one.clone()];
                for e in 1..=order {
                    p.push(p[e - 1].mul_jet(&d.truncate(order)));
                }
                p
            })
            .collect();
        let b = basis(self.dim);
        let mut result = Jet::constant(tdim, order, 0.0);
        for idx in 0..b.len_at(order) {
            let c = self.coeffs[idx];
            if c == 0.0 {
                continue;
            }
            let mut term = Jet::constant(tdim, order, c);
            for v in 0..self.dim {
                let e = b.exps[idx][v] as usize;
                if e > 0 {
                    term = term.mul_jet(&powers[v][e]);
                }
            }
            result = result + term;
        }
        result
    }
}

fn trig_series(c: f64, order: usize, cosine: bool) -> Vec<f64> {
    let (s, co) = c.sin_cos();
    // Derivative cycle sin -> cos -> -sin -> -cos, divided by j!.
    let cycle = if cosine { [co, -s, -co, s] } else { [s, co, -s, -co] };
    let mut f = 1.0;
    (0..=order)
        .map(|j| {
            if j > 0 {
                f *= j as f64;
            }
            cycle[j % 4] / f
        })
        .collect()
}

fn hyper_series(c: f64, order: usize, even: bool) -> Vec<f64> {
    let (sh, ch) = (c.sinh(), c.cosh());
    let cycle = if even { [ch, sh] } else { [sh, ch] };
    let mut f = 1.0;
    (0..=order)
        .map(|j| {
            if j > 0 {
                f *= j as f64;
            }
            cycle[j % 2] / f
        })
        .collect()
}

macro_rules! jet_binop {
    ($trait:ident, $method:ident, $imp:expr) => {
        impl $trait<&Jet> for &Jet {
            type Output = Jet;
            fn $method(self, rhs: &Jet) -> Jet {
                let f: fn(&Jet, &Jet) -> Jet = $imp;
                f(self, rhs)
            }
        }
        impl $trait<Jet> for Jet {
            type Output = Jet;
            fn $method(self, rhs: Jet) -> Jet {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Jet> for Jet {
            type Output = Jet;
            fn $method(self, rhs: &Jet) -> Jet {
                (&self).$method(rhs)
            }
        }
        impl $trait<Jet> for &Jet {
            type Output = Jet;
            fn $method(self, rhs: Jet) -> Jet {
                self.$method(&rhs)
            }
        }
    };
}

jet_binop!(Add, add, |a, b| a.binary(b, |x, y| x + y));
jet_binop!(Sub, sub, |a, b| a.binary(b, |x, y| x - y));
jet_binop!(Mul, mul, |a, b| a.mul_jet(b));
jet_binop!(Div, div, |a, b| a.mul_jet(&b.recip()));

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

macro_rules! jet_scalar_op {
    ($trait:ident, $method:ident, $imp:expr) => {
        impl $trait<f64> for &Jet {
            type Output = Jet;
            fn $method(self, rhs: f64) -> Jet {
                let f: fn(&Jet, f64) -> Jet = $imp;
                f(self, rhs)
            }
        }
        impl $trait<f64> for Jet {
            type Output = Jet;
            fn $method(self, rhs: f64) -> Jet {
                (&self).$method(rhs)
            }
        }
    };
}

jet_scalar_op!(Add, add, |a, s| {
    let mut out = a.clone();
    out.coeffs[0] += s;
    out
});
jet_scalar_op!(Sub, sub, |a, s| {
    let mut out = a.clone();
    out.coeffs[0] -= s;
    out
});
jet_scalar_op!(Mul, mul, |a, s| a.scale(s));
jet_scalar_op!(Div, div, |a, s| a.scale(1.0 / s));

impl Mul<&Jet> for f64 {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        rhs.scale(self)
    }
}

impl Mul<Jet> for f64 {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        rhs.scale(self)
    }
}

impl Sub<&Jet> for f64 {
    type Output = Jet;
    fn sub(self, rhs: &Jet) -> Jet {
        rhs.scale(-1.0) + self
    }
}

impl Sub<Jet> for f64 {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        rhs.scale(-1.0) + self
    }
}
