use std::sync::Arc;

use crate::chart::{Chart, SampleBlock};
use crate::complex::{angular_form, norm_sq};
use crate::error::{GeometryError, Result};
use crate::field::{EndomorphismField, MetricField, OneForm, VectorField};
use crate::jet::Jet;
use crate::map::SmoothMap;

use super::kahler::{kahler_space_form, KahlerStructure};

/// Transverse Kähler data: the base, the local projection onto it and a
/// local section.
#[derive(Clone, Debug)]
pub struct Transverse {
    pub base: KahlerStructure,
    pub projection: SmoothMap,
    pub section: SmoothMap,
}

/// `(η, R, Φ, g)` on a chart of dimension `2N + 1`.
#[derive(Clone, Debug)]
pub struct ContactMetricStructure {
    label: String,
    eta: OneForm,
    reeb: VectorField,
    phi: EndomorphismField,
    g: MetricField,
    transverse: Option<Arc<Transverse>>,
    phi_curvature: Option<f64>,
    second_order: bool,
}

impl ContactMetricStructure {
    pub fn new(
        label: impl Into<String>,
        eta: OneForm,
        reeb: VectorField,
        phi: EndomorphismField,
        g: MetricField,
    ) -> Result<ContactMetricStructure> {
        let n = eta.dim();
        if n.is_multiple_of(2) {
            return Err(GeometryError::Dimension(format!(
                "contact chart must have odd dimension, got {n}"
            )));
        }
        if reeb.dim() != n || phi.dim() != n || g.dim() != n {
            return Err(GeometryError::Dimension("η, R, Φ, g live on charts of different dimension".into()));
        }
        Ok(ContactMetricStructure {
            label: label.into(),
            eta,
            reeb,
            phi,
            g,
            transverse: None,
            phi_curvature: None,
            second_order: true,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn chart(&self) -> &Arc<Chart> {
        self.eta.chart()
    }

    pub fn dim(&self) -> usize {
        self.eta.dim()
    }

    /// Complex dimension `N` of the transverse structure.
    pub fn n(&self) -> usize {
        (self.dim() - 1) / 2
    }

    pub fn eta(&self) -> &OneForm {
        &self.eta
    }

    pub fn reeb(&self) -> &VectorField {
        &self.reeb
    }

    pub fn phi(&self) -> &EndomorphismField {
        &self.phi
    }

    pub fn g(&self) -> &MetricField {
        &self.g
    }

    pub fn transverse(&self) -> Option<&Transverse> {
        self.transverse.as_deref()
    }

    /// Nominal φ-sectional curvature `c`, when the structure is a model.
    pub fn phi_curvature(&self) -> Option<f64> {
        self.phi_curvature
    }

    /// Whether the metric components carry exact second derivatives, which
    /// the curvature engine needs.
    pub fn supports_curvature(&self) -> bool {
        self.second_order
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn with_transverse(mut self, t: Option<Transverse>) -> Self {
        self.transverse = t.map(Arc::new);
        self
    }

    pub fn with_phi_curvature(mut self, c: Option<f64>) -> Self {
        self.phi_curvature = c;
        self
    }

    pub(crate) fn first_order_only(mut self) -> Self {
        self.second_order = false;
        self
    }

    pub fn with_eta(mut self, eta: OneForm) -> Self {
        self.eta = eta;
        self
    }

    pub fn with_reeb(mut self, reeb: VectorField) -> Self {
        self.reeb = reeb;
        self
    }

    pub fn with_phi(mut self, phi: EndomorphismField) -> Self {
        self.phi = phi;
        self
    }

    pub fn with_g(mut self, g: MetricField) -> Self {
        self.g = g;
        self
    }
}

/// Sasakian structure on `ℝ × X` with `η = dt + π*β`, `R = ∂_t`,
/// `Φ` the horizontal lift of `J` and `g = π*g^T + η⊗η`. The base must
/// satisfy `dβ = 2ω`. Chart coordinates are `(t, base coordinates)`.
pub fn horizontal_lift_structure(
    label: impl Into<String>,
    base: KahlerStructure,
    beta: OneForm,
    fiber: (f64, f64),
) -> Result<ContactMetricStructure> {
    let label = label.into();
    let m = base.dim();
    let n = m + 1;
    let fiber_chart = Chart::new(
        "t",
        1,
        Arc::new(|p: &[f64]| p[0].is_finite()),
        vec![SampleBlock::Interval { lo: fiber.0, hi: fiber.1 }],
    )?;
    let chart = Arc::new(Chart::product(label.clone(), &[&fiber_chart, base.chart()]));

    let br = beta.field().rule().clone();
    let eta = OneForm::from_fn(chart.clone(), move |x| {
        let mut out = Vec::with_capacity(n);
        out.push(Jet::constant(1.0));
        out.extend(br(&x[1..]));
        out
    });
    let reeb = VectorField::constant(chart.clone(), {
        let mut r = vec![0.0; n];
        r[0] = 1.0;
        r
    });
    let (br, jr) = (beta.field().rule().clone(), base.j().field().rule().clone());
    let phi = EndomorphismField::from_fn(chart.clone(), move |x| {
        let b = br(&x[1..]);
        let j = jr(&x[1..]);
        let mut out = vec![Jet::constant(0.0); n * n];
        for a in 0..m {
            // Φ∂_a = Σ_c J^c_a (∂_c − β_c ∂_t)
            let mut t = Jet::constant(0.0);
            for c in 0..m {
                let jca = &j[c * m + a];
                if jca.order() == 0 && jca.value() == 0.0 {
                    continue;
                }
                t -= jca * &b[c];
                out[(c + 1) * n + a + 1] = jca.clone();
            }
            out[a + 1] = t;
        }
        out
    });
    let (br, gr) = (beta.field().rule().clone(), base.g().field().rule().clone());
    let g = MetricField::from_fn(chart.clone(), move |x| {
        let b = br(&x[1..]);
        let gt = gr(&x[1..]);
        let mut out = Vec::with_capacity(n * n);
        out.push(Jet::constant(1.0));
        out.extend(b.iter().cloned());
        for a in 0..m {
            out.push(b[a].clone());
            for c in 0..m {
                out.push(&gt[a * m + c] + &b[a] * &b[c]);
            }
        }
        out
    });
    let projection = SmoothMap::from_fn(
        format!("π[{label}]"),
        chart.clone(),
        base.chart().clone(),
        |x| x[1..].to_vec(),
    );
    let section = SmoothMap::from_fn(
        format!("σ[{label}]"),
        base.chart().clone(),
        chart.clone(),
        |x| {
            let mut out = Vec::with_capacity(x.len() + 1);
            out.push(Jet::constant(0.0));
            out.extend_from_slice(x);
            out
        },
    );
    let c = base.holomorphic_curvature().map(|h| h - 3.0);
    Ok(ContactMetricStructure::new(label, eta, reeb, phi, g)?
        .with_transverse(Some(Transverse {
            base,
            projection,
            section,
        }))
        .with_phi_curvature(c))
}

/// `β = 2ψ'(s) Σ (x dy − y dx) = d^c ψ` for a radial potential `ψ(s)`.
fn radial_primitive<F>(chart: Arc<Chart>, dpsi: F) -> OneForm
where
    F: Fn(&Jet) -> Jet + Send + Sync + 'static,
{
    OneForm::from_fn(chart, move |x| {
        let c = dpsi(&norm_sq(x)).scale(2.0);
        angular_form(x, &c)
    })
}

/// The Heisenberg group `M(N, −3)`: `ℝ × ℂ^N` with
/// `η = dt + Σ (x_j dy_j − y_j dx_j)` over the flat base.
pub fn heisenberg_structure(n: usize) -> Result<ContactMetricStructure> {
    let base = kahler_space_form(n, 0.0)?;
    let beta = radial_primitive(base.chart().clone(), |_| Jet::constant(0.5));
    Ok(horizontal_lift_structure(format!("M({n},-3)"), base, beta, (-2.0, 2.0))?.with_phi_curvature(Some(-3.0)))
}

/// The primitive `α = (1/4b) d^c log(1 + b|z|²)` of `ω_hyp` on the ball,
/// `α = ½ Σ (x dy − y dx)/(1 + b|z|²)`.
pub fn hyperbolic_primitive(base: &KahlerStructure, b: f64) -> OneForm {
    OneForm::from_fn(base.chart().clone(), move |x| {
        let c = (norm_sq(x).scale(b) + 1.0).recip().scale(0.5);
        angular_form(x, &c)
    })
}

/// `M(N, c)` for `c < −3`: `ℝ × ball` over `F(N, b)`, `4b = c + 3`, with
/// `η = dt + 2π*α` for the canonical primitive `α` of `ω_hyp`.
pub fn hyperbolic_structure(n: usize, c: f64) -> Result<ContactMetricStructure> {
    if !(c < -3.0) {
        return Err(GeometryError::Family { c, expected: "hyperbolic (c < -3)" });
    }
    let b = (c + 3.0) / 4.0;
    let base = kahler_space_form(n, b)?;
    let alpha = hyperbolic_primitive(&base, b);
    let ar = alpha.field().rule().clone();
    let beta = OneForm::from_fn(base.chart().clone(), move |x| ar(x).iter().map(|v| v.scale(2.0)).collect());
    Ok(horizontal_lift_structure(format!("M({n},{c})"), base, beta, (-2.0, 2.0))?.with_phi_curvature(Some(c)))
}
