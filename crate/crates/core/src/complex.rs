//! Complex coordinates as interleaved real pairs `(x_1, y_1, …, x_N, y_N)`
//! with `z_j = x_j + i y_j` and `J ∂_x = ∂_y`, `J ∂_y = −∂_x`.
//!
//! The operator `d^c = i(∂̄ − ∂)` acts on functions as `d^c f = −df ∘ J`,
//! which in each complex pair reads `f_x dy − f_y dx`. Then
//! `d d^c = 2i∂∂̄`, so `i∂∂̄ f = ½ d d^c f`.

use nalgebra::DMatrix;

use crate::jet::Jet;

/// Standard complex structure on `ℂ^n` as a `2n × 2n` matrix (`J^row_col`),
/// placed at `offset` inside an `dim × dim` zero matrix.
pub fn standard_j(n: usize, offset: usize, dim: usize) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(dim, dim);
    for k in 0..n {
        let (x, y) = (offset + 2 * k, offset + 2 * k + 1);
        j[(y, x)] = 1.0;
        j[(x, y)] = -1.0;
    }
    j
}

/// `|z|² = Σ x² + y²` over the given coordinates.
pub fn norm_sq(x: &[Jet]) -> Jet {
    x.iter().map(|v| v * v).sum()
}

/// Components of `c(z) Σ_j (x_j dy_j − y_j dx_j)`; this is `½ c d^c|z|²`.
pub fn angular_form(x: &[Jet], c: &Jet) -> Vec<Jet> {
    let mut out = Vec::with_capacity(x.len());
    for pair in x.chunks(2) {
        out.push(-(c * &pair[1]));
        out.push(c * &pair[0]);
    }
    out
}

/// `d^c f` at a point from the gradient of `f`, with `J` given as a matrix.
pub fn dc_from_gradient(grad: &[f64], j: &DMatrix<f64>) -> Vec<f64> {
    let n = grad.len();
    (0..n).map(|i| -(0..n).map(|m| grad[m] * j[(m, i)]).sum::<f64>()).collect()
}

/// Real components of the (1,1)-form `i∂∂̄ f` from the Hessian of `f`:
/// `i∂∂̄f = ½ d(d^c f) = ½ ((HJ)^T − HJ)` for constant `J`.
pub fn i_ddbar_from_hessian(hess: &DMatrix<f64>, j: &DMatrix<f64>) -> DMatrix<f64> {
    let hj = hess * j;
    (hj.transpose() - hj) * 0.5
}

/// Hessian of a scalar jet as a dense matrix.
pub fn hessian(f: &Jet, n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |a, b| f.dd(a, b))
}

/// Complex product on pairs.
pub fn cmul(a: (&Jet, &Jet), b: (&Jet, &Jet)) -> (Jet, Jet) {
    (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0)
}

/// Integer power of a complex number given as a pair.
pub fn cpow(z: (&Jet, &Jet), k: u32) -> (Jet, Jet) {
    let mut acc = (Jet::constant(1.0), Jet::constant(0.0));
    for _ in 0..k {
        acc = cmul((&acc.0, &acc.1), z);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn i_ddbar_of_norm_squared_is_twice_area_form() {
        let x = Jet::seed(&[0.3, -0.2], 2);
        let f = norm_sq(&x);
        let w = i_ddbar_from_hessian(&hessian(&f, 2), &standard_j(1, 0, 2));
        assert_eq!(w, DMatrix::from_row_slice(2, 2, &[0.0, 2.0, -2.0, 0.0]));
    }

    #[test]
    fn dc_of_log_radius_is_angle_form() {
        // d^c log|z| = (x dy − y dx)/|z|²
        let (x, y) = (0.6, -0.8);
        let r2 = x * x + y * y;
        let grad = [x / r2, y / r2];
        let dc = dc_from_gradient(&grad, &standard_j(1, 0, 2));
        assert!((dc[0] + y / r2).abs() < 1e-15 && (dc[1] - x / r2).abs() < 1e-15);
    }
}
