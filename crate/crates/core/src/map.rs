//! Smooth maps between charts, with pullbacks and pushforwards computed
//! from first-order jets of the coordinate components.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::chart::Chart;
use crate::error::{GeometryError, Result};
use crate::field::{MetricField, OneForm, Rule, TwoForm};
use crate::jet::Jet;

/// Cone-level companion of a Sasakian map: a map from the source cone chart
/// (source coordinates followed by the radial coordinate `t`) into an
/// ambient `ℂ^M` whose cone coordinate is the Euclidean norm. A map with
/// such a lift is expected to satisfy `|lift(p, t)| = t^exponent`.
#[derive(Clone, Debug)]
pub struct ConeLift {
    pub map: SmoothMap,
    pub exponent: f64,
}

#[derive(Clone)]
pub struct SmoothMap {
    label: String,
    source: Arc<Chart>,
    target: Arc<Chart>,
    rule: Rule,
    cone: Option<Arc<ConeLift>>,
}

impl fmt::Debug for SmoothMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SmoothMap")
            .field("label", &self.label)
            .field("source", &self.source.label())
            .field("target", &self.target.label())
            .field("cone", &self.cone.is_some())
            .finish()
    }
}

impl SmoothMap {
    pub fn new(label: impl Into<String>, source: Arc<Chart>, target: Arc<Chart>, rule: Rule) -> Self {
        SmoothMap {
            label: label.into(),
            source,
            target,
            rule,
            cone: None,
        }
    }

    pub fn from_fn<F>(label: impl Into<String>, source: Arc<Chart>, target: Arc<Chart>, f: F) -> Self
    where
        F: Fn(&[Jet]) -> Vec<Jet> + Send + Sync + 'static,
    {
        SmoothMap::new(label, source, target, Arc::new(f))
    }

    pub fn identity(chart: Arc<Chart>) -> SmoothMap {
        SmoothMap::from_fn(
            format!("id[{}]", chart.label()),
            chart.clone(),
            chart,
            |x| x.to_vec(),
        )
    }

    /// `x ↦ A x` between Euclidean-type charts.
    pub fn linear(label: impl Into<String>, source: Arc<Chart>, target: Arc<Chart>, a: DMatrix<f64>) -> SmoothMap {
        assert_eq!(a.ncols(), source.dim());
        assert_eq!(a.nrows(), target.dim());
        SmoothMap::from_fn(label, source, target, move |x| {
            (0..a.nrows())
                .map(|r| {
                    let mut acc = Jet::constant(0.0);
                    for c in 0..a.ncols() {
                        if a[(r, c)] != 0.0 {
                            acc += x[c].scale(a[(r, c)]);
                        }
                    }
                    acc
                })
                .collect()
        })
    }

    pub fn with_cone(mut self, lift: ConeLift) -> SmoothMap {
        self.cone = Some(Arc::new(lift));
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> SmoothMap {
        self.label = label.into();
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn source(&self) -> &Arc<Chart> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Chart> {
        &self.target
    }

    pub fn cone(&self) -> Option<&ConeLift> {
        self.cone.as_deref()
    }

    pub fn rule(&self) -> &Rule {
        &self.rule
    }

    /// Evaluates on arbitrary jets (chain rule through composition).
    pub fn apply(&self, x: &[Jet]) -> Vec<Jet> {
        (self.rule)(x)
    }

    pub fn image(&self, p: &[f64]) -> Result<Vec<f64>> {
        self.source.check(p)?;
        let y: Vec<f64> = self.apply(&Jet::seed(p, 0)).iter().map(Jet::value).collect();
        self.target.check(&y)?;
        Ok(y)
    }

    /// Image point and Jacobian `J[(a, i)] = ∂_i φ^a`.
    pub fn jacobian(&self, p: &[f64]) -> Result<(Vec<f64>, DMatrix<f64>)> {
        self.source.check(p)?;
        let y = self.apply(&Jet::seed(p, 1));
        let vals: Vec<f64> = y.iter().map(Jet::value).collect();
        self.target.check(&vals)?;
        let jac = DMatrix::from_fn(y.len(), p.len(), |a, i| y[a].d(i));
        Ok((vals, jac))
    }

    /// `then ∘ self`.
    pub fn then(&self, then: &SmoothMap) -> SmoothMap {
        let (f, g) = (self.rule.clone(), then.rule.clone());
        SmoothMap::new(
            format!("{}∘{}", then.label, self.label),
            self.source.clone(),
            then.target.clone(),
            Arc::new(move |x: &[Jet]| g(&f(x))),
        )
    }

    pub fn pushforward_vector(&self, p: &[f64], v: &DVector<f64>) -> Result<DVector<f64>> {
        pushforward_vector(self, v, p)
    }
}

/// `dφ_p(v)`.
pub fn pushforward_vector(map: &SmoothMap, v: &DVector<f64>, p: &[f64]) -> Result<DVector<f64>> {
    if v.len() != map.source.dim() {
        return Err(GeometryError::Dimension(format!(
            "vector has {} components, source chart has dim {}",
            v.len(),
            map.source.dim()
        )));
    }
    let (_, jac) = map.jacobian(p)?;
    Ok(jac * v)
}

fn check_target(map: &SmoothMap, chart: &Chart) -> Result<()> {
    if chart.dim() != map.target.dim() {
        return Err(GeometryError::Dimension(format!(
            "form lives on `{}` (dim {}), map targets `{}` (dim {})",
            chart.label(),
            chart.dim(),
            map.target.label(),
            map.target.dim()
        )));
    }
    Ok(())
}

/// `(φ*α)_i = α_a(φ(p)) ∂_i φ^a`.
pub fn pullback_one_form(map: &SmoothMap, form: &OneForm, p: &[f64]) -> Result<DVector<f64>> {
    check_target(map, form.chart())?;
    let (y, jac) = map.jacobian(p)?;
    Ok(jac.transpose() * form.value(&y)?)
}

/// `(φ*ω)_ij = ω_ab(φ(p)) ∂_i φ^a ∂_j φ^b`.
pub fn pullback_two_form(map: &SmoothMap, form: &TwoForm, p: &[f64]) -> Result<DMatrix<f64>> {
    check_target(map, form.chart())?;
    let (y, jac) = map.jacobian(p)?;
    Ok(jac.transpose() * form.value(&y)? * jac)
}

pub fn pullback_metric(map: &SmoothMap, g: &MetricField, p: &[f64]) -> Result<DMatrix<f64>> {
    check_target(map, g.chart())?;
    let (y, jac) = map.jacobian(p)?;
    Ok(jac.transpose() * g.value(&y)? * jac)
}

/// Pullback of a one-form or two-form.
pub enum FormRef<'a> {
    One(&'a OneForm),
    Two(&'a TwoForm),
}

#[derive(Clone, Debug, PartialEq)]
pub enum FormValue {
    One(DVector<f64>),
    Two(DMatrix<f64>),
}

pub fn pullback_form(map: &SmoothMap, form: FormRef<'_>, p: &[f64]) -> Result<FormValue> {
    match form {
        FormRef::One(a) => pullback_one_form(map, a, p).map(FormValue::One),
        FormRef::Two(w) => pullback_two_form(map, w, p).map(FormValue::Two),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rn(n: usize) -> Arc<Chart> {
        Arc::new(Chart::euclidean(format!("R{n}"), n, 2.0))
    }

    #[test]
    fn identity_pullback_is_trivial() {
        let c = rn(2);
        let alpha = OneForm::from_fn(c.clone(), |x| vec![x[1].clone(), &x[0] * &x[0]]);
        let id = SmoothMap::identity(c);
        let p = [0.3, -0.7];
        assert_eq!(pullback_one_form(&id, &alpha, &p).unwrap(), alpha.value(&p).unwrap());
    }

    #[test]
    fn linear_pullback_is_transpose() {
        let a = DMatrix::from_row_slice(2, 3, &[1.0, 2.0, 0.0, -1.0, 0.5, 3.0]);
        let map = SmoothMap::linear("A", rn(3), rn(2), a.clone());
        let alpha = OneForm::constant(rn(2), vec![0.7, -0.2]);
        let got = pullback_one_form(&map, &alpha, &[0.1, 0.2, 0.3]).unwrap();
        let want = a.transpose() * DVector::from_vec(vec![0.7, -0.2]);
        assert!((got - want).amax() < 1e-15);
        let v = DVector::from_vec(vec![1.0, -1.0, 2.0]);
        assert!((map.pushforward_vector(&[0.0; 3], &v).unwrap() - &a * &v).amax() < 1e-15);
    }

    #[test]
    fn scaling_scales_flat_metric() {
        let c = rn(3);
        let lambda = 1.7;
        let map = SmoothMap::from_fn("scale", c.clone(), c.clone(), move |x| {
            x.iter().map(|v| v.scale(lambda)).collect()
        });
        let g = pullback_metric(&map, &MetricField::flat(c), &[0.2, 0.1, -0.5]).unwrap();
        assert!((g - DMatrix::identity(3, 3) * lambda * lambda).amax() < 1e-14);
    }

    #[test]
    fn image_outside_target_is_reported() {
        let src = rn(1);
        let tgt = Arc::new(
            Chart::new(
                "positive",
                1,
                Arc::new(|p: &[f64]| p[0] > 0.0),
                vec![crate::chart::SampleBlock::Interval { lo: 0.1, hi: 1.0 }],
            )
            .unwrap(),
        );
        let map = SmoothMap::from_fn("neg", src, tgt, |x| vec![-&x[0]]);
        assert!(matches!(map.image(&[1.0]), Err(GeometryError::Domain { .. })));
    }
}
