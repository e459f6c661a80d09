//! D-homothety, transverse Kähler deformation and the Sasakian structure on
//! `X × ℝ` over an exact Kähler form.

use nalgebra::DMatrix;

use crate::complex::{hessian, i_ddbar_from_hessian};
use crate::error::{GeometryError, Result};
use crate::field::{EndomorphismField, MetricField, OneForm, ScalarField, VectorField};
use crate::jet::Jet;
use crate::map::pullback_two_form;
use crate::space_forms::{horizontal_lift_structure, ContactMetricStructure, KahlerStructure, Transverse};

const CHECK_SAMPLES: usize = 64;
const CHECK_SEED: u64 = 0xb45e;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HomothetyRatio(f64);

impl HomothetyRatio {
    pub fn new(a: f64) -> Result<HomothetyRatio> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(GeometryError::Parameter(format!("homothety ratio must be > 0, got {a}")));
        }
        Ok(HomothetyRatio(a))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// `η_a = aη`, `R_a = R/a`, `Φ_a = Φ`, `g_a = ag + (a² − a) η⊗η`.
pub fn d_homothety(s: &ContactMetricStructure, a: HomothetyRatio) -> Result<ContactMetricStructure> {
    let a = a.0;
    let n = s.dim();
    let chart = s.chart().clone();
    let er = s.eta().field().rule().clone();
    let eta = OneForm::from_fn(chart.clone(), move |x| er(x).iter().map(|v| v.scale(a)).collect());
    let rr = s.reeb().field().rule().clone();
    let reeb = VectorField::from_fn(chart.clone(), move |x| rr(x).iter().map(|v| v.scale(1.0 / a)).collect());
    let (er, gr) = (s.eta().field().rule().clone(), s.g().field().rule().clone());
    let g = MetricField::from_fn(chart, move |x| {
        let e = er(x);
        let gv = gr(x);
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                out.push(gv[i * n + j].scale(a) + (&e[i] * &e[j]).scale(a * a - a));
            }
        }
        out
    });
    let transverse = s.transverse().map(|t| Transverse {
        base: t.base.scaled(a),
        projection: t.projection.clone(),
        section: t.section.clone(),
    });
    let mut out = ContactMetricStructure::new(format!("D_{a}[{}]", s.label()), eta, reeb, s.phi().clone(), g)?
        .with_transverse(transverse)
        .with_phi_curvature(s.phi_curvature().map(|c| (c + 3.0) / a - 3.0));
    if !s.supports_curvature() {
        out = out.first_order_only();
    }
    Ok(out)
}

/// A function with `df(R) = 0`, carried with its differential in closed
/// form so that the deformed structure stays exact to the order the axiom
/// suite needs.
#[derive(Clone, Debug)]
pub struct BasicFunction {
    f: ScalarField,
    df: OneForm,
}

impl BasicFunction {
    /// Verifies `df` against the jets of `f` and `df(R) = 0` at sampled
    /// points of `s`.
    pub fn new(s: &ContactMetricStructure, f: ScalarField, df: OneForm) -> Result<BasicFunction> {
        if f.dim() != s.dim() || df.dim() != s.dim() {
            return Err(GeometryError::Dimension("basic function must live on the structure chart".into()));
        }
        let mut worst = 0.0f64;
        for p in s.chart().sample(CHECK_SEED, CHECK_SAMPLES)? {
            let jet = f.jet(&p, 1)?;
            let d = df.value(&p)?;
            let scale = 1.0 + d.amax();
            for i in 0..s.dim() {
                if (jet.d(i) - d[i]).abs() > 1e-10 * scale {
                    return Err(GeometryError::Parameter(format!(
                        "df does not match the derivative of f at {p:?}"
                    )));
                }
            }
            worst = worst.max(d.dot(&s.reeb().value(&p)?).abs() / scale);
        }
        if worst > 1e-10 {
            return Err(GeometryError::NotBasic { residual: worst });
        }
        Ok(BasicFunction { f, df })
    }

    pub fn constant(s: &ContactMetricStructure, c: f64) -> BasicFunction {
        BasicFunction {
            f: ScalarField::constant(s.chart().clone(), c),
            df: OneForm::constant(s.chart().clone(), vec![0.0; s.dim()]),
        }
    }

    pub fn f(&self) -> &ScalarField {
        &self.f
    }

    pub fn df(&self) -> &OneForm {
        &self.df
    }
}

/// `η̃ = η + d^c f = η − df∘Φ`, `R̃ = R`, `Φ̃ = Φ − R ⊗ (η̃∘Φ)` and
/// `g̃ = ½dη̃(·, Φ̃·) + η̃⊗η̃`. Fails when `g̃` is not positive definite at
/// a sampled point.
pub fn transverse_deformation(s: &ContactMetricStructure, f: &BasicFunction) -> Result<ContactMetricStructure> {
    let n = s.dim();
    let chart = s.chart().clone();
    let (er, pr, dr) = (
        s.eta().field().rule().clone(),
        s.phi().field().rule().clone(),
        f.df.field().rule().clone(),
    );
    let eta_rule = move |x: &[Jet]| -> Vec<Jet> {
        let e = er(x);
        let ph = pr(x);
        let d = dr(x);
        (0..n)
            .map(|i| {
                let mut v = e[i].clone();
                for k in 0..n {
                    v -= &d[k] * &ph[k * n + i];
                }
                v
            })
            .collect()
    };
    let eta_rule = std::sync::Arc::new(eta_rule);
    let eta = OneForm::from_fn(chart.clone(), {
        let r = eta_rule.clone();
        move |x| r(x)
    });
    let (pr, rr) = (s.phi().field().rule().clone(), s.reeb().field().rule().clone());
    let phi_rule = {
        let er = eta_rule.clone();
        std::sync::Arc::new(move |x: &[Jet]| -> Vec<Jet> {
            let e = er(x);
            let ph = pr(x);
            let r = rr(x);
            let mut out = ph.clone();
            for j in 0..n {
                let mut ej = Jet::constant(0.0);
                for k in 0..n {
                    ej += &e[k] * &ph[k * n + j];
                }
                for i in 0..n {
                    out[i * n + j] -= &r[i] * &ej;
                }
            }
            out
        })
    };
    let phi = EndomorphismField::from_fn(chart.clone(), {
        let r = phi_rule.clone();
        move |x| r(x)
    });
    let deta = eta.d_field();
    let dr = deta.field().rule().clone();
    let g = MetricField::from_fn(chart, move |x| {
        let d = dr(x);
        let ph = phi_rule(x);
        let e = eta_rule(x);
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut v = &e[i] * &e[j];
                for k in 0..n {
                    v += (&d[i * n + k] * &ph[k * n + j]).scale(0.5);
                }
                out.push(v);
            }
        }
        out
    });
    let out = ContactMetricStructure::new(format!("{}~f", s.label()), eta, s.reeb().clone(), phi, g)?
        .first_order_only();
    for p in s.chart().sample(CHECK_SEED, CHECK_SAMPLES)? {
        let gv = out.g().value(&p)?;
        let sym = (&gv + gv.transpose()) * 0.5;
        let ev = sym.symmetric_eigenvalues().min();
        if !(ev > 1e-10) {
            return Err(GeometryError::DeformationTooLarge { eigenvalue: ev, point: p });
        }
    }
    Ok(out)
}

/// `π*(i∂∂̄ f_B)` at `p`, where `f_B = f∘σ` is `f` read on the transverse
/// base through the structure's local section. This is computed from the
/// base Hessian, independently of any contact data.
pub fn basic_i_ddbar(s: &ContactMetricStructure, f: &BasicFunction, p: &[f64]) -> Result<DMatrix<f64>> {
    let t = s
        .transverse()
        .ok_or_else(|| GeometryError::State("structure has no transverse data".into()))?;
    let q = t.projection.image(p)?;
    let x = Jet::seed(&q, 2);
    let fb = &f.f.apply(&t.section.apply(&x))[0];
    let w = i_ddbar_from_hessian(&hessian(fb, q.len()), &t.base.j().value(&q)?);
    let wf = crate::field::TwoForm::from_fn(t.base.chart().clone(), {
        let m = w.clone();
        move |_| crate::space_forms::constant_matrix_jets(&m)
    });
    pullback_two_form(&t.projection, &wf, p)
}

/// Sasakian structure on `X × ℝ` from a primitive `α` of the Kähler form:
/// `η = dt + 2π*α`, so that `½dη = π*ω`. Fails with the largest residual
/// when `dα ≠ ω` at a sampled point.
pub fn exact_kahler_to_sasaki(x: &KahlerStructure, alpha: &OneForm) -> Result<ContactMetricStructure> {
    if alpha.dim() != x.dim() {
        return Err(GeometryError::Dimension("primitive must live on the Kähler chart".into()));
    }
    let mut worst = 0.0f64;
    for p in x.chart().sample(CHECK_SEED, CHECK_SAMPLES)? {
        let w = x.omega().value(&p)?;
        let d = alpha.exterior_derivative(&p)?;
        worst = worst.max((d - &w).amax() / (1.0 + w.amax()));
    }
    if worst > 1e-9 {
        return Err(GeometryError::PrimitiveMismatch { residual: worst });
    }
    let ar = alpha.field().rule().clone();
    let beta = OneForm::from_fn(x.chart().clone(), move |y| ar(y).iter().map(|v| v.scale(2.0)).collect());
    horizontal_lift_structure(format!("{}×ℝ", x.label()), x.clone(), beta, (-2.0, 2.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::angular_form;
    use crate::space_forms::{heisenberg_structure, kahler_space_form, sphere_structure};

    #[test]
    fn ratio_must_be_positive() {
        assert!(HomothetyRatio::new(0.0).is_err());
        assert!(HomothetyRatio::new(-1.0).is_err());
        assert!(HomothetyRatio::new(f64::NAN).is_err());
    }

    #[test]
    fn homothety_by_one_is_identity() {
        let s = sphere_structure(1).unwrap();
        let t = d_homothety(&s, HomothetyRatio::new(1.0).unwrap()).unwrap();
        for p in s.chart().sample(1, 10).unwrap() {
            assert_eq!(s.g().value(&p).unwrap(), t.g().value(&p).unwrap());
            assert_eq!(s.eta().value(&p).unwrap(), t.eta().value(&p).unwrap());
            assert_eq!(s.reeb().value(&p).unwrap(), t.reeb().value(&p).unwrap());
        }
    }

    #[test]
    fn flat_primitive_gives_heisenberg() {
        let x = kahler_space_form(1, 0.0).unwrap();
        let alpha = OneForm::from_fn(x.chart().clone(), |y| angular_form(y, &Jet::constant(0.5)));
        let s = exact_kahler_to_sasaki(&x, &alpha).unwrap();
        let h = heisenberg_structure(1).unwrap();
        for p in h.chart().sample(2, 10).unwrap() {
            assert_eq!(s.eta().value(&p).unwrap(), h.eta().value(&p).unwrap());
            assert_eq!(s.g().value(&p).unwrap(), h.g().value(&p).unwrap());
            assert_eq!(s.phi().value(&p).unwrap(), h.phi().value(&p).unwrap());
        }
    }

    #[test]
    fn wrong_primitive_is_rejected() {
        let x = kahler_space_form(1, 0.0).unwrap();
        let alpha = OneForm::from_fn(x.chart().clone(), |y| angular_form(y, &Jet::constant(1.0)));
        assert!(matches!(
            exact_kahler_to_sasaki(&x, &alpha),
            Err(GeometryError::PrimitiveMismatch { .. })
        ));
    }

    #[test]
    fn non_basic_function_is_rejected() {
        let s = heisenberg_structure(1).unwrap();
        let f = ScalarField::from_fn(s.chart().clone(), |x| vec![x[0].clone()]);
        let df = OneForm::constant(s.chart().clone(), vec![1.0, 0.0, 0.0]);
        assert!(matches!(BasicFunction::new(&s, f, df), Err(GeometryError::NotBasic { .. })));
    }

    #[test]
    fn large_negative_deformation_fails_positivity() {
        let s = heisenberg_structure(1).unwrap();
        let eps = -1.0;
        let f = ScalarField::from_fn(s.chart().clone(), move |x| vec![(&x[1] * &x[1] + &x[2] * &x[2]).scale(eps)]);
        let df = OneForm::from_fn(s.chart().clone(), move |x| {
            vec![Jet::constant(0.0), x[1].scale(2.0 * eps), x[2].scale(2.0 * eps)]
        });
        let bf = BasicFunction::new(&s, f, df).unwrap();
        assert!(matches!(
            transverse_deformation(&s, &bf),
            Err(GeometryError::DeformationTooLarge { .. })
        ));
    }
}
