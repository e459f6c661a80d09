use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::chart::{Chart, SampleBlock};
use crate::complex::{norm_sq, standard_j};
use crate::curvature::sectional_curvature;
use crate::error::{GeometryError, Result};
use crate::field::{EndomorphismField, MetricField, ScalarField, TwoForm};
use crate::jet::Jet;

/// Kähler data `(ω, J, g)` on a chart of `ℂ^N` with `g(X, Y) = ω(X, JY)`.
#[derive(Clone, Debug)]
pub struct KahlerStructure {
    label: String,
    omega: TwoForm,
    j: EndomorphismField,
    g: MetricField,
    potential: Option<ScalarField>,
    holomorphic_curvature: Option<f64>,
}

pub(crate) fn constant_matrix_jets(m: &DMatrix<f64>) -> Vec<Jet> {
    let n = m.nrows();
    (0..n * n).map(|k| Jet::constant(m[(k / n, k % n)])).collect()
}

impl KahlerStructure {
    /// Builds `ω(X, Y) = g(JX, Y)` from a `J`-invariant metric.
    pub fn from_metric(label: impl Into<String>, g: MetricField, j: EndomorphismField) -> KahlerStructure {
        let n = g.dim();
        let (gr, jr) = (g.field().rule().clone(), j.field().rule().clone());
        let omega = TwoForm::from_fn(g.chart().clone(), move |x| {
            let gv = gr(x);
            let jv = jr(x);
            let mut out = Vec::with_capacity(n * n);
            for a in 0..n {
                for b in 0..n {
                    let mut acc = Jet::constant(0.0);
                    for m in 0..n {
                        let c = &jv[m * n + a];
                        if c.order() == 0 && c.value() == 0.0 {
                            continue;
                        }
                        acc += c * &gv[m * n + b];
                    }
                    out.push(acc);
                }
            }
            out
        });
        KahlerStructure {
            label: label.into(),
            omega,
            j,
            g,
            potential: None,
            holomorphic_curvature: None,
        }
    }

    /// Kähler metric of a radial potential `ψ(|z|²)` on `chart`, given
    /// `s ↦ (ψ(s), ψ'(s), ψ''(s))`. Then `ω = i∂∂̄ψ` and, with
    /// `H_{jk̄} = ψ' δ_{jk} + ψ'' z̄_j z_k = A + iB`, the real metric is
    /// `g_{x_j x_k} = g_{y_j y_k} = 2A_{jk}`, `g_{x_j y_k} = −g_{y_j x_k} = 2B_{jk}`.
    pub fn radial<F>(label: impl Into<String>, chart: Arc<Chart>, psi: F) -> KahlerStructure
    where
        F: Fn(&Jet) -> [Jet; 3] + Send + Sync + 'static,
    {
        let dim = chart.dim();
        assert!(dim.is_multiple_of(2), "Kähler chart must have even real dimension");
        let n = dim / 2;
        let psi = Arc::new(psi);
        let p2 = psi.clone();
        let g = MetricField::from_fn(chart.clone(), move |x| {
            let s = norm_sq(x);
            let [_, d1, d2] = p2(&s);
            let mut out = vec![Jet::constant(0.0); dim * dim];
            for j in 0..n {
                for k in 0..n {
                    let (xj, yj, xk, yk) = (&x[2 * j], &x[2 * j + 1], &x[2 * k], &x[2 * k + 1]);
                    let mut a = (xj * xk + yj * yk) * &d2;
                    if j == k {
                        a += &d1;
                    }
                    let b = (xj * yk - yj * xk) * &d2;
                    let (a2, b2) = (a.scale(2.0), b.scale(2.0));
                    out[(2 * j) * dim + 2 * k] = a2.clone();
                    out[(2 * j + 1) * dim + 2 * k + 1] = a2;
                    out[(2 * j) * dim + 2 * k + 1] = b2.clone();
                    out[(2 * j + 1) * dim + 2 * k] = -b2;
                }
            }
            out
        });
        let jm = standard_j(n, 0, dim);
        let j = EndomorphismField::from_fn(chart.clone(), move |_| constant_matrix_jets(&jm));
        let potential = ScalarField::from_fn(chart, move |x| {
            let [v, _, _] = psi(&norm_sq(x));
            vec![v]
        });
        let mut k = KahlerStructure::from_metric(label, g, j);
        k.potential = Some(potential);
        k
    }

    pub fn with_holomorphic_curvature(mut self, value: f64) -> KahlerStructure {
        self.holomorphic_curvature = Some(value);
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn chart(&self) -> &Arc<Chart> {
        self.g.chart()
    }

    pub fn dim(&self) -> usize {
        self.g.dim()
    }

    pub fn complex_dim(&self) -> usize {
        self.g.dim() / 2
    }

    pub fn omega(&self) -> &TwoForm {
        &self.omega
    }

    pub fn j(&self) -> &EndomorphismField {
        &self.j
    }

    pub fn g(&self) -> &MetricField {
        &self.g
    }

    /// Kähler potential `ψ` with `ω = i∂∂̄ψ`, when known.
    pub fn potential(&self) -> Option<&ScalarField> {
        self.potential.as_ref()
    }

    /// Nominal constant holomorphic sectional curvature, when known.
    pub fn holomorphic_curvature(&self) -> Option<f64> {
        self.holomorphic_curvature
    }

    /// `(aω, J, ag)`.
    pub fn scaled(&self, a: f64) -> KahlerStructure {
        KahlerStructure {
            label: format!("{}·{}", a, self.label),
            omega: self.omega.scaled(a),
            j: self.j.clone(),
            g: self.g.scaled(a),
            potential: self.potential.as_ref().map(|p| p.scaled(a)),
            holomorphic_curvature: self.holomorphic_curvature.map(|h| h / a),
        }
    }

    /// Riemannian product, coordinates concatenated in order.
    pub fn product(label: impl Into<String>, parts: &[KahlerStructure]) -> Result<KahlerStructure> {
        if parts.is_empty() {
            return Err(GeometryError::Parameter("empty Kähler product".into()));
        }
        if parts.len() == 1 {
            return Ok(parts[0].clone().relabel(label));
        }
        let label = label.into();
        let charts: Vec<&Chart> = parts.iter().map(|k| k.chart().as_ref()).collect();
        let chart = Arc::new(Chart::product(label.clone(), &charts));
        let dims: Vec<usize> = parts.iter().map(KahlerStructure::dim).collect();
        let total: usize = dims.iter().sum();
        let block = |rules: Vec<crate::field::Rule>| {
            let dims = dims.clone();
            move |x: &[Jet]| {
                let mut out = vec![Jet::constant(0.0); total * total];
                let mut off = 0;
                for (d, r) in dims.iter().zip(&rules) {
                    let v = r(&x[off..off + d]);
                    for a in 0..*d {
                        for b in 0..*d {
                            out[(off + a) * total + off + b] = v[a * d + b].clone();
                        }
                    }
                    off += d;
                }
                out
            }
        };
        let g = MetricField::from_fn(
            chart.clone(),
            block(parts.iter().map(|k| k.g.field().rule().clone()).collect()),
        );
        let j = EndomorphismField::from_fn(
            chart.clone(),
            block(parts.iter().map(|k| k.j.field().rule().clone()).collect()),
        );
        let omega = TwoForm::from_fn(
            chart,
            block(parts.iter().map(|k| k.omega.field().rule().clone()).collect()),
        );
        Ok(KahlerStructure {
            label,
            omega,
            j,
            g,
            potential: None,
            holomorphic_curvature: None,
        })
    }

    pub fn relabel(mut self, label: impl Into<String>) -> KahlerStructure {
        self.label = label.into();
        self
    }

    /// `Sec(X, JX)` at `p`.
    pub fn holomorphic_sectional_curvature(&self, p: &[f64], x: &DVector<f64>) -> Result<f64> {
        let jx = self.j.value(p)? * x;
        sectional_curvature(&self.g, p, x, &jx)
    }
}

/// Largest radius `r` with `1 + b r² > 0` and `r ≤ −1/b`, for `b < 0`.
pub fn ball_radius(b: f64) -> f64 {
    (-1.0 / b).min(1.0 / (-b).sqrt())
}

/// Complex space form `F(N, b)` with constant holomorphic sectional
/// curvature `4b`, from the radial potentials
/// `ψ = s/2` (`b = 0`), `ψ = log(1 + s)/(2b)` (`b > 0`, affine chart of
/// `CP^N` scaled by `1/b`) and `ψ = log(1 + bs)/(2b)` (`b < 0`, ball).
pub fn kahler_space_form(n: usize, b: f64) -> Result<KahlerStructure> {
    if n < 1 {
        return Err(GeometryError::Parameter(format!("N must be >= 1, got {n}")));
    }
    if !b.is_finite() {
        return Err(GeometryError::Parameter(format!("b must be finite, got {b}")));
    }
    let dim = 2 * n;
    let label = format!("F({n},{b})");
    let k = if b == 0.0 {
        let chart = Arc::new(Chart::euclidean(label.clone(), dim, 2.0));
        KahlerStructure::radial(label, chart, |s| {
            [s.scale(0.5), Jet::constant(0.5), Jet::constant(0.0)]
        })
    } else if b > 0.0 {
        let chart = Arc::new(Chart::euclidean(label.clone(), dim, 1.5));
        KahlerStructure::radial(label, chart, move |s| {
            let one_s = s + 1.0;
            let inv = one_s.recip();
            [
                one_s.ln().scale(0.5 / b),
                inv.scale(0.5 / b),
                (&inv * &inv).scale(-0.5 / b),
            ]
        })
    } else {
        let r = ball_radius(b);
        let chart = Arc::new(Chart::new(
            label.clone(),
            dim,
            Arc::new(move |p: &[f64]| {
                let s: f64 = p.iter().map(|v| v * v).sum();
                p.iter().all(|v| v.is_finite()) && s < r * r && 1.0 + b * s > 0.0
            }),
            vec![SampleBlock::Ball {
                dim,
                radius: 0.9 * r,
            }],
        )?);
        KahlerStructure::radial(label, chart, move |s| {
            let q = s.scale(b) + 1.0;
            let inv = q.recip();
            [
                q.ln().scale(0.5 / b),
                inv.scale(0.5),
                (&inv * &inv).scale(-0.5 * b),
            ]
        })
    };
    Ok(k.with_holomorphic_curvature(4.0 * b))
}
