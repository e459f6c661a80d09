//! Multiplicative defects for mutation testing of the suites.

use crate::field::{EndomorphismField, MetricField, OneForm, VectorField};
use crate::map::SmoothMap;
use crate::space_forms::ContactMetricStructure;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Tensor {
    Eta,
    Reeb,
    Phi,
    Metric,
    /// `g` scaled on `ker η` only: `g + (λ − 1)(g − η⊗η)`.
    TransverseMetric,
}

impl Tensor {
    pub const ALL: [Tensor; 5] = [
        Tensor::Eta,
        Tensor::Reeb,
        Tensor::Phi,
        Tensor::Metric,
        Tensor::TransverseMetric,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Tensor::Eta => "eta",
            Tensor::Reeb => "reeb",
            Tensor::Phi => "phi",
            Tensor::Metric => "g",
            Tensor::TransverseMetric => "g_transverse",
        }
    }
}

/// Copy of `s` with one tensor multiplied by `factor`.
pub fn with_defect(s: &ContactMetricStructure, tensor: Tensor, factor: f64) -> ContactMetricStructure {
    let label = format!("{}[{}×{}]", s.label(), tensor.name(), factor);
    let out = s.clone().with_label(label);
    match tensor {
        Tensor::Eta => out.with_eta(OneForm(s.eta().field().scaled(factor))),
        Tensor::Reeb => out.with_reeb(VectorField(s.reeb().field().scaled(factor))),
        Tensor::Phi => out.with_phi(EndomorphismField(s.phi().field().scaled(factor))),
        Tensor::Metric => out.with_g(MetricField(s.g().field().scaled(factor))),
        Tensor::TransverseMetric => {
            let n = s.dim();
            let (gr, er) = (s.g().field().rule().clone(), s.eta().field().rule().clone());
            out.with_g(MetricField::from_fn(s.chart().clone(), move |x| {
                let g = gr(x);
                let e = er(x);
                let mut v = Vec::with_capacity(n * n);
                for i in 0..n {
                    for j in 0..n {
                        let h = &g[i * n + j] - &e[i] * &e[j];
                        v.push(&g[i * n + j] + h.scale(factor - 1.0));
                    }
                }
                v
            }))
        }
    }
}

/// `map` followed by scaling image coordinates `from..` by `factor`.
pub fn scale_image(map: &SmoothMap, factor: f64, from: usize) -> SmoothMap {
    let rule = map.rule().clone();
    SmoothMap::from_fn(
        format!("{}×{}", factor, map.label()),
        map.source().clone(),
        map.target().clone(),
        move |x| {
            rule(x)
                .into_iter()
                .enumerate()
                .map(|(i, v)| if i >= from { v.scale(factor) } else { v })
                .collect()
        },
    )
}
