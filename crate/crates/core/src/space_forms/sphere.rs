//! The standard Sasakian sphere `S^{2N+1} ⊂ ℂ^{N+1}` in the stereographic
//! chart from the pole `Im z_N = −1`.
//!
//! Ambient real coordinates are ordered `(x_0, y_0, …, x_N, y_N)`; the chart
//! point `u ∈ ℝ^{2N+1}` maps to `X_a = 2u_a/(1+|u|²)` for `a < 2N+1` and
//! `y_N = (1−|u|²)/(1+|u|²)`.

use std::sync::Arc;

use crate::chart::Chart;
use crate::complex::norm_sq;
use crate::error::{GeometryError, Result};
use crate::field::{EndomorphismField, MetricField, OneForm, VectorField};
use crate::jet::Jet;
use crate::map::SmoothMap;

use super::contact::{ContactMetricStructure, Transverse};
use super::kahler::kahler_space_form;

/// Inverse stereographic projection on jets.
pub fn sphere_point(u: &[Jet]) -> Vec<Jet> {
    let s = norm_sq(u);
    let q = (&s + 1.0).recip();
    let mut x: Vec<Jet> = u.iter().map(|v| (v * &q).scale(2.0)).collect();
    x.push((1.0 - &s) * &q);
    x
}

/// Stereographic projection of an ambient point (normalized onto the
/// sphere first) into the chart.
pub fn stereographic(x: &[Jet]) -> Vec<Jet> {
    let r = norm_sq(x).sqrt().recip();
    let m = x.len() - 1;
    let den = (&x[m] * &r + 1.0).recip();
    x[..m].iter().map(|v| &(v * &r) * &den).collect()
}

pub fn stereographic_values(x: &[f64]) -> Vec<f64> {
    let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let m = x.len() - 1;
    let den = 1.0 + x[m] / r;
    x[..m].iter().map(|v| v / r / den).collect()
}

pub fn sphere_point_values(u: &[f64]) -> Vec<f64> {
    sphere_point(&Jet::seed(u, 0)).iter().map(Jet::value).collect()
}

/// `(X, ∂_i X_a)` in closed form so that derived tensors stay exact to
/// second order.
fn frame(u: &[Jet]) -> (Vec<Jet>, Vec<Vec<Jet>>, Jet) {
    let n = u.len();
    let s = norm_sq(u);
    let q = (&s + 1.0).recip();
    let q2 = &q * &q;
    let x = sphere_point(u);
    let mut dx = vec![vec![Jet::constant(0.0); n]; n + 1];
    for a in 0..n {
        for i in 0..n {
            let mut v = (&u[a] * &u[i] * &q2).scale(-4.0);
            if a == i {
                v += q.scale(2.0);
            }
            dx[a][i] = v;
        }
    }
    for i in 0..n {
        dx[n][i] = (&u[i] * &q2).scale(-4.0);
    }
    (x, dx, q)
}

/// Differential of the stereographic projection at a sphere point `X`
/// applied to an ambient vector `V`; `1 + y_N = 2q`.
fn project(x: &[Jet], q: &Jet, v: &[Jet]) -> Vec<Jet> {
    let m = x.len() - 1;
    let inv = q.recip().scale(0.5);
    let inv2 = &inv * &inv;
    (0..m).map(|a| &v[a] * &inv - &(&x[a] * &v[m]) * &inv2).collect()
}

fn ambient_j(v: &[Jet]) -> Vec<Jet> {
    let mut out = Vec::with_capacity(v.len());
    for pair in v.chunks(2) {
        out.push(-&pair[1]);
        out.push(pair[0].clone());
    }
    out
}

/// `η_i = Σ (x dy − y dx)(∂_i X)` restricted to the sphere.
fn eta_components(x: &[Jet], dx: &[Vec<Jet>], n: usize) -> Vec<Jet> {
    (0..n)
        .map(|i| {
            let mut acc = Jet::constant(0.0);
            for p in (0..x.len()).step_by(2) {
                acc += &x[p] * &dx[p + 1][i] - &x[p + 1] * &dx[p][i];
            }
            acc
        })
        .collect()
}

/// The round sphere `M(N, 1)` with `η₀ = d^c log|z|`, `R₀ = Jz`, round
/// metric and `Φ` induced by the ambient `J`.
pub fn sphere_structure(n: usize) -> Result<ContactMetricStructure> {
    if n < 1 {
        return Err(GeometryError::Parameter(format!("N must be >= 1, got {n}")));
    }
    let dim = 2 * n + 1;
    let label = format!("M({n},1)");
    let chart = Arc::new(Chart::euclidean(format!("S^{}", dim), dim, 1.5));

    let eta = OneForm::from_fn(chart.clone(), move |u| {
        let (x, dx, _) = frame(u);
        eta_components(&x, &dx, dim)
    });
    let reeb = VectorField::from_fn(chart.clone(), move |u| {
        let x = sphere_point(u);
        let s = norm_sq(u);
        let q = (&s + 1.0).recip();
        project(&x, &q, &ambient_j(&x))
    });
    let phi = EndomorphismField::from_fn(chart.clone(), move |u| {
        let (x, dx, q) = frame(u);
        let e = eta_components(&x, &dx, dim);
        let mut out = vec![Jet::constant(0.0); dim * dim];
        for i in 0..dim {
            // Φ∂_i = P(J ∂_iX + η_i X)
            let col: Vec<Jet> = (0..=dim).map(|a| dx[a][i].clone()).collect();
            let mut v = ambient_j(&col);
            for (va, xa) in v.iter_mut().zip(&x) {
                *va += xa * &e[i];
            }
            for (a, c) in project(&x, &q, &v).into_iter().enumerate() {
                out[a * dim + i] = c;
            }
        }
        out
    });
    let g = MetricField::from_fn(chart.clone(), move |u| {
        let s = norm_sq(u);
        let q = (&s + 1.0).recip();
        let c = (&q * &q).scale(4.0);
        (0..dim * dim)
            .map(|k| if k / dim == k % dim { c.clone() } else { Jet::constant(0.0) })
            .collect()
    });

    let base = kahler_space_form(n, 1.0)?;
    let projection = SmoothMap::from_fn(format!("π[{label}]"), chart.clone(), base.chart().clone(), move |u| {
        let x = sphere_point(u);
        let (x0, y0) = (&x[0], &x[1]);
        let r0 = (x0 * x0 + y0 * y0).recip();
        let mut w = Vec::with_capacity(2 * n);
        for j in 1..=n {
            let (xj, yj) = (&x[2 * j], &x[2 * j + 1]);
            w.push(&(xj * x0 + yj * y0) * &r0);
            w.push(&(yj * x0 - xj * y0) * &r0);
        }
        w
    });
    let section = SmoothMap::from_fn(format!("σ[{label}]"), base.chart().clone(), chart.clone(), |w| {
        let mut z = Vec::with_capacity(w.len() + 2);
        z.push(Jet::constant(1.0));
        z.push(Jet::constant(0.0));
        z.extend_from_slice(w);
        stereographic(&z)
    });
    Ok(ContactMetricStructure::new(label, eta, reeb, phi, g)?
        .with_transverse(Some(Transverse {
            base,
            projection,
            section,
        }))
        .with_phi_curvature(Some(1.0)))
}

#[cfg(test)]
mod tests {
    use nalgebra::DMatrix;

    use super::*;
    use crate::map::pullback_two_form;

    #[test]
    fn eta_of_reeb_at_chart_origin() {
        let s = sphere_structure(1).unwrap();
        let p = [0.0, 0.0, 0.0];
        // chart origin is the ambient point (0, 0, 0, 1)
        assert_eq!(sphere_point_values(&p), vec![0.0, 0.0, 0.0, 1.0]);
        let e = s.eta().value(&p).unwrap();
        let r = s.reeb().value(&p).unwrap();
        assert!((e.dot(&r) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn stereographic_round_trip() {
        let u = [0.3, -0.7, 1.1, 0.2, 0.05];
        let back = stereographic_values(&sphere_point_values(&u));
        for (a, b) in u.iter().zip(&back) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn half_deta_is_fubini_study_pullback() {
        let s = sphere_structure(2).unwrap();
        let t = s.transverse().unwrap();
        for p in s.chart().sample(2, 20).unwrap() {
            let d: DMatrix<f64> = s.eta().exterior_derivative(&p).unwrap() * 0.5;
            let w = pullback_two_form(&t.projection, t.base.omega(), &p).unwrap();
            assert!((d - w).amax() < 1e-10);
        }
    }
}
