use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::complex::{angular_form, hessian, i_ddbar_from_hessian, norm_sq};
use crate::error::{GeometryError, Result};
use crate::field::{OneForm, ScalarField};
use crate::jet::Jet;
use crate::map::SmoothMap;

use super::contact::{horizontal_lift_structure, ContactMetricStructure};
use super::kahler::{kahler_space_form, KahlerStructure};
use super::sphere::{sphere_structure, stereographic};

/// A function of `s = |z|²` evaluated on jets.
pub type Profile = Arc<dyn Fn(&Jet) -> Jet + Send + Sync>;

/// How the weight decays at infinity in the affine chart.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Decay {
    Polynomial,
    Gaussian,
}

/// Hermitian line bundle `L^k` over a Kähler base in a fixed
/// trivialization, with radial weight `h^k = exp F(|z|²)`. Holomorphic
/// sections are represented by polynomials of degree at most `degree`.
#[derive(Clone)]
pub struct LineBundleModel {
    label: String,
    base: KahlerStructure,
    k: u32,
    degree: usize,
    decay: Decay,
    h_weight: ScalarField,
    log_weight: Profile,
    dlog_weight: Profile,
}

impl fmt::Debug for LineBundleModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LineBundleModel")
            .field("label", &self.label)
            .field("base", &self.base.label())
            .field("k", &self.k)
            .field("degree", &self.degree)
            .finish()
    }
}

const CURVATURE_TOL: f64 = 1e-9;

impl LineBundleModel {
    /// Checks `F'` against the jet derivative of `F` and the curvature
    /// condition `−(i/2)∂∂̄ log h^k = k ω` at sampled base points.
    pub fn new(
        label: impl Into<String>,
        base: KahlerStructure,
        k: u32,
        degree: usize,
        decay: Decay,
        log_weight: Profile,
        dlog_weight: Profile,
    ) -> Result<LineBundleModel> {
        if k < 1 {
            return Err(GeometryError::Parameter("tensor power k must be >= 1".into()));
        }
        let n = base.dim();
        let f = log_weight.clone();
        let h_weight = ScalarField::from_fn(base.chart().clone(), move |x| vec![f(&norm_sq(x)).exp()]);
        let model = LineBundleModel {
            label: label.into(),
            base,
            k,
            degree,
            decay,
            h_weight,
            log_weight,
            dlog_weight,
        };
        let j = model.base.j();
        for p in model.base.chart().sample(0x5eed, 30)? {
            let x = Jet::seed(&p, 2);
            let s = norm_sq(&x);
            let sv = Jet::variable(s.value(), 0, 1, 1);
            let (d_jet, d_given) = ((model.log_weight)(&sv).d(0), (model.dlog_weight)(&sv).value());
            if (d_jet - d_given).abs() > CURVATURE_TOL * (1.0 + d_given.abs()) {
                return Err(GeometryError::Model(format!(
                    "F' disagrees with dF/ds at s = {}: {d_given} vs {d_jet}",
                    s.value()
                )));
            }
            let lw = (model.log_weight)(&s);
            let form = i_ddbar_from_hessian(&hessian(&lw, n), &j.value(&p)?) * -0.5;
            let omega = model.base.omega().value(&p)? * f64::from(k);
            let r = (&form - &omega).amax();
            if r > CURVATURE_TOL * (1.0 + omega.amax()) {
                return Err(GeometryError::Model(format!(
                    "curvature condition −(i/2)∂∂̄ log h^k = kω fails by {r:e} at {p:?}"
                )));
            }
        }
        Ok(model)
    }

    /// `O(k)` over `CP^n` in the affine chart, `h^k = (1 + |z|²)^{−k}`, over
    /// the Fubini–Study base with `b = 1`.
    pub fn projective(n: usize, k: u32) -> Result<LineBundleModel> {
        let base = kahler_space_form(n, 1.0)?;
        let kf = f64::from(k);
        LineBundleModel::new(
            format!("O({k})→CP^{n}"),
            base,
            k,
            k as usize,
            Decay::Polynomial,
            Arc::new(move |s| (s + 1.0).ln().scale(-kf)),
            Arc::new(move |s| (s + 1.0).recip().scale(-kf)),
        )
    }

    /// Trivial bundle over flat `ℂ` with weight `e^{−|z|²}`, sections
    /// truncated to degree `degree`.
    pub fn gaussian(degree: usize) -> Result<LineBundleModel> {
        let base = kahler_space_form(1, 0.0)?;
        LineBundleModel::new(
            format!("Gauss(d={degree})"),
            base,
            1,
            degree,
            Decay::Gaussian,
            Arc::new(|s| -s),
            Arc::new(|_| Jet::constant(-1.0)),
        )
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn base(&self) -> &KahlerStructure {
        &self.base
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn decay(&self) -> Decay {
        self.decay
    }

    pub fn h_weight(&self) -> &ScalarField {
        &self.h_weight
    }

    /// `h^k` at a base point, without a domain check.
    pub fn weight_at(&self, s: f64) -> f64 {
        (self.log_weight)(&Jet::constant(s)).value().exp()
    }

    /// `F(s) = log h^k`.
    pub fn log_weight(&self) -> &Profile {
        &self.log_weight
    }

    /// `F'(s)`.
    pub fn dlog_weight(&self) -> &Profile {
        &self.dlog_weight
    }
}

/// Unit circle bundle `{t = 1}` of `L^{−1}` in the chart `(θ, w)` with
/// `η = dθ − ½ d^c log h^k = dθ − F'(s) Σ (x dy − y dx)` over the base
/// scaled by `k`.
pub fn boothby_wang_sphere_presentation(model: &LineBundleModel) -> Result<ContactMetricStructure> {
    let base = model.base.scaled(f64::from(model.k)).relabel(format!("{}·{}", model.k, model.base.label()));
    let df = model.dlog_weight.clone();
    let beta = OneForm::from_fn(base.chart().clone(), move |x| {
        let c = -df(&norm_sq(x));
        angular_form(x, &c)
    });
    horizontal_lift_structure(format!("BW[{}]", model.label), base, beta, (-PI, PI))
}

/// `(θ, w) ↦ e^{iθ}(1, w)/√(1 + |w|²)` from the Boothby–Wang chart of
/// `O(1) → CP^N` into the stereographic chart of `S^{2N+1}`.
pub fn bundle_chart_to_sphere(bw: &ContactMetricStructure) -> Result<SmoothMap> {
    let n = bw.n();
    let target = sphere_structure(n)?;
    Ok(SmoothMap::from_fn(
        "bundle→sphere",
        bw.chart().clone(),
        target.chart().clone(),
        |x| {
            let (c, s) = (x[0].cos(), x[0].sin());
            let mut z = Vec::with_capacity(x.len() + 1);
            z.push(c.clone());
            z.push(s.clone());
            for w in x[1..].chunks(2) {
                z.push(&c * &w[0] - &s * &w[1]);
                z.push(&c * &w[1] + &s * &w[0]);
            }
            stereographic(&z)
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projective_model_satisfies_curvature_condition() {
        for (n, k) in [(1, 1), (1, 3), (2, 2)] {
            assert!(LineBundleModel::projective(n, k).is_ok());
        }
    }

    #[test]
    fn wrong_weight_is_rejected() {
        let base = kahler_space_form(1, 1.0).unwrap();
        // h = (1+s)^{-2} with k = 1 violates the curvature condition
        let r = LineBundleModel::new(
            "bad",
            base,
            1,
            1,
            Decay::Polynomial,
            Arc::new(|s| (s + 1.0).ln().scale(-2.0)),
            Arc::new(|s| (s + 1.0).recip().scale(-2.0)),
        );
        assert!(matches!(r, Err(GeometryError::Model(_))));
    }

    #[test]
    fn boothby_wang_half_deta_is_k_omega() {
        let m = LineBundleModel::projective(1, 2).unwrap();
        let s = boothby_wang_sphere_presentation(&m).unwrap();
        let t = s.transverse().unwrap();
        for p in s.chart().sample(4, 10).unwrap() {
            let d = s.eta().exterior_derivative(&p).unwrap() * 0.5;
            let w = m.base().omega().value(&p[1..]).unwrap() * 2.0;
            assert!((d.view((1, 1), (2, 2)) - &w).amax() < 1e-12);
            assert!((t.base.omega().value(&p[1..]).unwrap() - w).amax() < 1e-15);
        }
        assert_eq!(s.phi_curvature(), Some(-1.0));
    }
}
