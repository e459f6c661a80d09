//! Truncated Taylor arithmetic to second order.
//!
//! A [`Jet`] carries the value, gradient and Hessian of a scalar quantity
//! with respect to the chart coordinates. Arithmetic propagates all three
//! exactly (up to rounding), so polynomial and rational fields get exact
//! derivatives without finite differences.
//!
//! Jets with an empty gradient behave as constants and combine with jets of
//! any dimension. The Hessian is stored packed (lower triangle, row major).

use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

/// Index of `(i, j)` in a packed lower-triangular symmetric matrix.
#[inline]
pub fn packed_index(i: usize, j: usize) -> usize {
    let (r, c) = if i >= j { (i, j) } else { (j, i) };
    r * (r + 1) / 2 + c
}

#[derive(Clone, Debug, PartialEq)]
pub struct Jet {
    value: f64,
    grad: Vec<f64>,
    hess: Vec<f64>,
}

impl Jet {
    pub fn constant(value: f64) -> Self {
        Jet {
            value,
            grad: Vec::new(),
            hess: Vec::new(),
        }
    }

    /// The coordinate function `x_index` at `value` in `dim` variables.
    /// `order` 0 yields a plain constant, 1 a gradient-only jet.
    pub fn variable(value: f64, index: usize, dim: usize, order: usize) -> Self {
        if order == 0 {
            return Jet::constant(value);
        }
        let mut grad = vec![0.0; dim];
        grad[index] = 1.0;
        let hess = if order >= 2 {
            vec![0.0; dim * (dim + 1) / 2]
        } else {
            Vec::new()
        };
        Jet { value, grad, hess }
    }

    /// Seeds all coordinates of `point` as independent variables.
    pub fn seed(point: &[f64], order: usize) -> Vec<Jet> {
        let n = point.len();
        point
            .iter()
            .enumerate()
            .map(|(i, &x)| Jet::variable(x, i, n, order))
            .collect()
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.value
    }

    /// Gradient component `i`, zero for constants.
    #[inline]
    pub fn d(&self, i: usize) -> f64 {
        self.grad.get(i).copied().unwrap_or(0.0)
    }

    /// Second derivative `∂_i ∂_j`, zero when not tracked.
    #[inline]
    pub fn dd(&self, i: usize, j: usize) -> f64 {
        self.hess.get(packed_index(i, j)).copied().unwrap_or(0.0)
    }

    pub fn grad(&self) -> &[f64] {
        &self.grad
    }

    pub fn order(&self) -> usize {
        if !self.hess.is_empty() {
            2
        } else if !self.grad.is_empty() {
            1
        } else {
            0
        }
    }

    pub fn dim(&self) -> usize {
        self.grad.len()
    }

    /// Applies a scalar function given its value and first two derivatives
    /// at `self.value`.
    fn chain(&self, f: f64, df: f64, d2f: f64) -> Jet {
        let grad: Vec<f64> = self.grad.iter().map(|g| df * g).collect();
        let mut hess = Vec::with_capacity(self.hess.len());
        if !self.hess.is_empty() {
            let n = self.grad.len();
            for i in 0..n {
                for j in 0..=i {
                    hess.push(df * self.hess[packed_index(i, j)] + d2f * self.grad[i] * self.grad[j]);
                }
            }
        }
        Jet {
            value: f,
            grad,
            hess,
        }
    }

    pub fn sqrt(&self) -> Jet {
        let s = self.value.sqrt();
        self.chain(s, 0.5 / s, -0.25 / (s * self.value))
    }

    pub fn ln(&self) -> Jet {
        let v = self.value;
        self.chain(v.ln(), 1.0 / v, -1.0 / (v * v))
    }

    pub fn exp(&self) -> Jet {
        let e = self.value.exp();
        self.chain(e, e, e)
    }

    pub fn sin(&self) -> Jet {
        let (s, c) = self.value.sin_cos();
        self.chain(s, c, -s)
    }

    pub fn cos(&self) -> Jet {
        let (s, c) = self.value.sin_cos();
        self.chain(c, -s, -c)
    }

    pub fn recip(&self) -> Jet {
        let v = self.value;
        let r = 1.0 / v;
        self.chain(r, -r * r, 2.0 * r * r * r)
    }

    pub fn powi(&self, n: i32) -> Jet {
        match n {
            0 => Jet::constant(1.0),
            1 => self.clone(),
            _ => {
                let v = self.value;
                let nf = n as f64;
                self.chain(
                    v.powi(n),
                    nf * v.powi(n - 1),
                    nf * (nf - 1.0) * v.powi(n - 2),
                )
            }
        }
    }

    pub fn powf(&self, p: f64) -> Jet {
        let v = self.value;
        self.chain(v.powf(p), p * v.powf(p - 1.0), p * (p - 1.0) * v.powf(p - 2.0))
    }

    pub fn scale(&self, c: f64) -> Jet {
        Jet {
            value: self.value * c,
            grad: self.grad.iter().map(|g| g * c).collect(),
            hess: self.hess.iter().map(|h| h * c).collect(),
        }
    }

    /// Truncates to at most `order` tracked derivatives.
    pub fn truncate(mut self, order: usize) -> Jet {
        if order < 2 {
            self.hess.clear();
        }
        if order < 1 {
            self.grad.clear();
        }
        self
    }
}

fn zip_add(a: &[f64], b: &[f64], sb: f64) -> Vec<f64> {
    match (a.is_empty(), b.is_empty()) {
        (true, true) => Vec::new(),
        (false, true) => a.to_vec(),
        (true, false) => b.iter().map(|x| sb * x).collect(),
        (false, false) => a.iter().zip(b).map(|(x, y)| x + sb * y).collect(),
    }
}

fn jet_add(a: &Jet, b: &Jet, sb: f64) -> Jet {
    Jet {
        value: a.value + sb * b.value,
        grad: zip_add(&a.grad, &b.grad, sb),
        hess: zip_add(&a.hess, &b.hess, sb),
    }
}

fn jet_mul(a: &Jet, b: &Jet) -> Jet {
    if a.grad.is_empty() {
        return b.scale(a.value);
    }
    if b.grad.is_empty() {
        return a.scale(b.value);
    }
    let n = a.grad.len();
    let grad: Vec<f64> = (0..n).map(|i| a.value * b.grad[i] + b.value * a.grad[i]).collect();
    let hess = if a.hess.is_empty() && b.hess.is_empty() {
        Vec::new()
    } else {
        let mut h = Vec::with_capacity(n * (n + 1) / 2);
        for i in 0..n {
            for j in 0..=i {
                let k = packed_index(i, j);
                let ha = a.hess.get(k).copied().unwrap_or(0.0);
                let hb = b.hess.get(k).copied().unwrap_or(0.0);
                h.push(
                    a.value * hb + b.value * ha + a.grad[i] * b.grad[j] + a.grad[j] * b.grad[i],
                );
            }
        }
        h
    };
    Jet {
        value: a.value * b.value,
        grad,
        hess,
    }
}

impl From<f64> for Jet {
    fn from(v: f64) -> Self {
        Jet::constant(v)
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $body:expr) => {
        impl $tr<&Jet> for &Jet {
            type Output = Jet;
            fn $method(self, rhs: &Jet) -> Jet {
                let f: fn(&Jet, &Jet) -> Jet = $body;
                f(self, rhs)
            }
        }
        impl $tr<Jet> for Jet {
            type Output = Jet;
            fn $method(self, rhs: Jet) -> Jet {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&Jet> for Jet {
            type Output = Jet;
            fn $method(self, rhs: &Jet) -> Jet {
                (&self).$method(rhs)
            }
        }
        impl $tr<Jet> for &Jet {
            type Output = Jet;
            fn $method(self, rhs: Jet) -> Jet {
                self.$method(&rhs)
            }
        }
        impl $tr<f64> for &Jet {
            type Output = Jet;
            fn $method(self, rhs: f64) -> Jet {
                self.$method(&Jet::constant(rhs))
            }
        }
        impl $tr<f64> for Jet {
            type Output = Jet;
            fn $method(self, rhs: f64) -> Jet {
                (&self).$method(&Jet::constant(rhs))
            }
        }
        impl $tr<&Jet> for f64 {
            type Output = Jet;
            fn $method(self, rhs: &Jet) -> Jet {
                (&Jet::constant(self)).$method(rhs)
            }
        }
        impl $tr<Jet> for f64 {
            type Output = Jet;
            fn $method(self, rhs: Jet) -> Jet {
                (&Jet::constant(self)).$method(&rhs)
            }
        }
    };
}

binop!(Add, add, |a, b| jet_add(a, b, 1.0));
binop!(Sub, sub, |a, b| jet_add(a, b, -1.0));
binop!(Mul, mul, jet_mul);
binop!(Div, div, |a, b| {
    if b.grad.is_empty() {
        a.scale(1.0 / b.value)
    } else {
        jet_mul(a, &b.recip())
    }
});

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

impl AddAssign<&Jet> for Jet {
    fn add_assign(&mut self, rhs: &Jet) {
        *self = jet_add(self, rhs, 1.0);
    }
}

impl AddAssign<Jet> for Jet {
    fn add_assign(&mut self, rhs: Jet) {
        *self = jet_add(self, &rhs, 1.0);
    }
}

impl SubAssign<&Jet> for Jet {
    fn sub_assign(&mut self, rhs: &Jet) {
        *self = jet_add(self, rhs, -1.0);
    }
}

impl SubAssign<Jet> for Jet {
    fn sub_assign(&mut self, rhs: Jet) {
        *self = jet_add(self, &rhs, -1.0);
    }
}

impl MulAssign<f64> for Jet {
    fn mul_assign(&mut self, rhs: f64) {
        *self = self.scale(rhs);
    }
}

impl std::iter::Sum for Jet {
    fn sum<I: Iterator<Item = Jet>>(iter: I) -> Jet {
        iter.fold(Jet::constant(0.0), |acc, x| acc + x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_rule_on_polynomial() {
        // f(x, y) = x^2 y at (1, 2)
        let v = Jet::seed(&[1.0, 2.0], 2);
        let f = &(&v[0] * &v[0]) * &v[1];
        assert_eq!(f.value(), 2.0);
        assert_eq!((f.d(0), f.d(1)), (4.0, 1.0));
        assert_eq!((f.dd(0, 0), f.dd(0, 1), f.dd(1, 0), f.dd(1, 1)), (4.0, 2.0, 2.0, 0.0));
    }

    #[test]
    fn constants_have_no_derivatives() {
        let v = Jet::seed(&[0.3, -1.2], 2);
        let f = &v[0] * 0.0 + 3.0;
        assert_eq!(f.value(), 3.0);
        for i in 0..2 {
            assert_eq!(f.d(i), 0.0);
            for j in 0..2 {
                assert_eq!(f.dd(i, j), 0.0);
            }
        }
    }

    #[test]
    fn log_of_square() {
        // log t^2 at t = 2: value 2 log 2, derivative 2/t = 1, second -2/t^2
        let t = Jet::seed(&[2.0], 2);
        let f = (&t[0] * &t[0]).ln();
        assert!((f.value() - 2.0 * 2f64.ln()).abs() < 1e-15);
        assert!((f.d(0) - 1.0).abs() < 1e-15);
        assert!((f.dd(0, 0) + 0.5).abs() < 1e-15);
    }

    #[test]
    fn quotient_and_transcendentals() {
        let v = Jet::seed(&[0.7, 0.4], 2);
        let (x, y) = (&v[0], &v[1]);
        // f = sin(x) exp(y) / (1 + x^2)
        let f = x.sin() * y.exp() / (1.0 + x * x);
        let g = |x: f64, y: f64| x.sin() * y.exp() / (1.0 + x * x);
        let h = 1e-5;
        let fx = (g(0.7 + h, 0.4) - g(0.7 - h, 0.4)) / (2.0 * h);
        let fxy = (g(0.7 + h, 0.4 + h) - g(0.7 + h, 0.4 - h) - g(0.7 - h, 0.4 + h)
            + g(0.7 - h, 0.4 - h))
            / (4.0 * h * h);
        assert!((f.d(0) - fx).abs() < 1e-8);
        assert!((f.dd(0, 1) - fxy).abs() < 1e-5);
    }

    #[test]
    fn order_one_skips_hessian() {
        let v = Jet::seed(&[1.0, 1.0], 1);
        let f = &v[0] * &v[1];
        assert_eq!(f.order(), 1);
        assert_eq!(f.dd(0, 1), 0.0);
    }
}
