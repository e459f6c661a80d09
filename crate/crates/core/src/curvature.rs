//! Levi-Civita curvature in a single chart, assembled from second-order jets
//! of the metric components.

use nalgebra::{DMatrix, DVector};

use crate::error::{GeometryError, Result};
use crate::field::MetricField;

const DEGENERATE_PLANE: f64 = 1e-14;

/// Riemann tensor at a point, `R^i_{jkl}` with `R(∂_k, ∂_l)∂_j = R^i_{jkl} ∂_i`.
#[derive(Clone, Debug)]
pub struct CurvatureAt {
    pub metric: DMatrix<f64>,
    riemann: Vec<f64>,
    n: usize,
}

impl CurvatureAt {
    #[inline]
    pub fn riemann(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        let n = self.n;
        self.riemann[((i * n + j) * n + k) * n + l]
    }

    /// `⟨R(X,Y)Y, X⟩`.
    pub fn rxyyx(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        let n = self.n;
        let mut acc = 0.0;
        for i in 0..n {
            let gx: f64 = (0..n).map(|m| self.metric[(i, m)] * x[m]).sum();
            if gx == 0.0 {
                continue;
            }
            for j in 0..n {
                if y[j] == 0.0 {
                    continue;
                }
                for k in 0..n {
                    if x[k] == 0.0 {
                        continue;
                    }
                    for l in 0..n {
                        acc += gx * self.riemann(i, j, k, l) * y[j] * x[k] * y[l];
                    }
                }
            }
        }
        acc
    }

    pub fn sectional(&self, x: &DVector<f64>, y: &DVector<f64>) -> Result<f64> {
        let g = &self.metric;
        let xx = (x.transpose() * g * x)[0];
        let yy = (y.transpose() * g * y)[0];
        let xy = (x.transpose() * g * y)[0];
        let denom = xx * yy - xy * xy;
        let scale = xx * yy;
        if !(denom > DEGENERATE_PLANE * scale.max(1.0)) {
            return Err(GeometryError::DegeneratePlane { denominator: denom });
        }
        Ok(self.rxyyx(x, y) / denom)
    }
}

/// Christoffel symbols `Γ^i_{jk}` and their derivatives, then the Riemann
/// tensor, at `p`.
pub fn curvature_at(g: &MetricField, p: &[f64]) -> Result<CurvatureAt> {
    let n = g.dim();
    let jets = g.jets(p, 2)?;
    if jets.iter().any(|j| j.order() == 1) {
        return Err(GeometryError::State(
            "metric components do not carry second derivatives".into(),
        ));
    }
    let gv = DMatrix::from_fn(n, n, |i, j| jets[i * n + j].value());
    let ginv = gv
        .clone()
        .try_inverse()
        .ok_or_else(|| GeometryError::State("metric is singular".into()))?;
    let dg = |i: usize, j: usize, k: usize| jets[i * n + j].d(k);
    let ddg = |i: usize, j: usize, k: usize, l: usize| jets[i * n + j].dd(k, l);

    // Γ_{l,jk} = ½ (∂_j g_lk + ∂_k g_lj − ∂_l g_jk) and its derivative along m
    let idx3 = |a: usize, b: usize, c: usize| (a * n + b) * n + c;
    let mut gamma_low = vec![0.0; n * n * n];
    let mut dgamma_low = vec![0.0; n * n * n * n];
    for l in 0..n {
        for j in 0..n {
            for k in 0..n {
                gamma_low[idx3(l, j, k)] = 0.5 * (dg(l, k, j) + dg(l, j, k) - dg(j, k, l));
                for m in 0..n {
                    dgamma_low[idx3(l, j, k) * n + m] =
                        0.5 * (ddg(l, k, j, m) + ddg(l, j, k, m) - ddg(j, k, l, m));
                }
            }
        }
    }
    // ∂_m g^{il} = −g^{ia} ∂_m g_ab g^{bl}
    let mut dginv = vec![DMatrix::zeros(n, n); n];
    for (m, d) in dginv.iter_mut().enumerate() {
        let dgm = DMatrix::from_fn(n, n, |a, b| dg(a, b, m));
        *d = -(&ginv * dgm * &ginv);
    }
    let mut gamma = vec![0.0; n * n * n];
    let mut dgamma = vec![0.0; n * n * n * n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let mut s = 0.0;
                for l in 0..n {
                    s += ginv[(i, l)] * gamma_low[idx3(l, j, k)];
                }
                gamma[idx3(i, j, k)] = s;
                for m in 0..n {
                    let mut ds = 0.0;
                    for l in 0..n {
                        ds += dginv[m][(i, l)] * gamma_low[idx3(l, j, k)]
                            + ginv[(i, l)] * dgamma_low[idx3(l, j, k) * n + m];
                    }
                    dgamma[idx3(i, j, k) * n + m] = ds;
                }
            }
        }
    }
    // R^i_{jkl} = ∂_k Γ^i_{lj} − ∂_l Γ^i_{kj} + Γ^i_{km} Γ^m_{lj} − Γ^i_{lm} Γ^m_{kj}
    let mut riemann = vec![0.0; n * n * n * n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let mut r = dgamma[idx3(i, l, j) * n + k] - dgamma[idx3(i, k, j) * n + l];
                    for m in 0..n {
                        r += gamma[idx3(i, k, m)] * gamma[idx3(m, l, j)]
                            - gamma[idx3(i, l, m)] * gamma[idx3(m, k, j)];
                    }
                    riemann[idx3(i, j, k) * n + l] = r;
                }
            }
        }
    }
    Ok(CurvatureAt {
        metric: gv,
        riemann,
        n,
    })
}

/// `Sec(X,Y) = ⟨R(X,Y)Y,X⟩ / (|X|²|Y|² − ⟨X,Y⟩²)`.
pub fn sectional_curvature(g: &MetricField, p: &[f64], x: &DVector<f64>, y: &DVector<f64>) -> Result<f64> {
    if x.len() != g.dim() || y.len() != g.dim() {
        return Err(GeometryError::Dimension("tangent vectors must match the chart".into()));
    }
    curvature_at(g, p)?.sectional(x, y)
}
