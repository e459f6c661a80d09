//! Tensor fields on a chart as pure evaluation rules over jets.
//!
//! Every field stores a rule mapping coordinate jets to component jets, so a
//! single formula yields values, first and second derivatives. Components
//! are stored row major: `ω_ij` at `i * n + j`, and for endomorphisms
//! `E^i_j` at `i * n + j` so that `(E v)^i = Σ_j E^i_j v^j`.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::chart::Chart;
use crate::error::{GeometryError, Result};
use crate::jet::Jet;

pub type Rule = Arc<dyn Fn(&[Jet]) -> Vec<Jet> + Send + Sync>;

/// Second-order jet of a scalar component: value, gradient and Hessian.
pub type Jet2 = Jet;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldKind {
    Scalar,
    Vector,
    OneForm,
    TwoForm,
    Metric,
    Endomorphism,
}

impl FieldKind {
    pub fn components(self, n: usize) -> usize {
        match self {
            FieldKind::Scalar => 1,
            FieldKind::Vector | FieldKind::OneForm => n,
            _ => n * n,
        }
    }
}

#[derive(Clone)]
pub struct Field {
    chart: Arc<Chart>,
    kind: FieldKind,
    rule: Rule,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field")
            .field("chart", &self.chart.label())
            .field("kind", &self.kind)
            .finish()
    }
}

impl Field {
    pub fn new(chart: Arc<Chart>, kind: FieldKind, rule: Rule) -> Field {
        Field { chart, kind, rule }
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn kind(&self) -> FieldKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn rule(&self) -> &Rule {
        &self.rule
    }

    /// Evaluates the rule on arbitrary coordinate jets (no domain check).
    /// Passing jets of a map's components composes the field with the map.
    pub fn apply(&self, x: &[Jet]) -> Vec<Jet> {
        let out = (self.rule)(x);
        debug_assert_eq!(out.len(), self.kind.components(self.dim()));
        out
    }

    pub fn jets(&self, p: &[f64], order: usize) -> Result<Vec<Jet>> {
        self.chart.check(p)?;
        Ok(self.apply(&Jet::seed(p, order)))
    }

    pub fn values(&self, p: &[f64]) -> Result<Vec<f64>> {
        Ok(self.jets(p, 0)?.iter().map(Jet::value).collect())
    }

    /// New field of the given kind built from the component jets of `parents`.
    pub fn derived<F>(chart: Arc<Chart>, kind: FieldKind, parents: &[&Field], f: F) -> Field
    where
        F: Fn(&[Vec<Jet>], &[Jet]) -> Vec<Jet> + Send + Sync + 'static,
    {
        let rules: Vec<Rule> = parents.iter().map(|p| p.rule.clone()).collect();
        Field::new(
            chart,
            kind,
            Arc::new(move |x: &[Jet]| {
                let vals: Vec<Vec<Jet>> = rules.iter().map(|r| r(x)).collect();
                f(&vals, x)
            }),
        )
    }

    pub fn scaled(&self, c: f64) -> Field {
        Field::derived(self.chart.clone(), self.kind, &[self], move |v, _| {
            v[0].iter().map(|j| j.scale(c)).collect()
        })
    }

    /// Same components on another chart of equal dimension.
    pub fn on_chart(&self, chart: Arc<Chart>) -> Field {
        assert_eq!(chart.dim(), self.dim());
        Field {
            chart,
            ..self.clone()
        }
    }
}

fn vector_of(v: &[f64]) -> DVector<f64> {
    DVector::from_column_slice(v)
}

fn matrix_of(n: usize, v: &[f64]) -> DMatrix<f64> {
    DMatrix::from_row_slice(n, n, v)
}

macro_rules! typed_field {
    ($(#[$m:meta])* $name:ident, $kind:expr) => {
        $(#[$m])*
        #[derive(Clone, Debug)]
        pub struct $name(pub Field);

        impl $name {
            pub const KIND: FieldKind = $kind;

            pub fn new(chart: Arc<Chart>, rule: Rule) -> $name {
                $name(Field::new(chart, $kind, rule))
            }

            pub fn from_fn<F>(chart: Arc<Chart>, f: F) -> $name
            where
                F: Fn(&[Jet]) -> Vec<Jet> + Send + Sync + 'static,
            {
                $name::new(chart, Arc::new(f))
            }

            pub fn field(&self) -> &Field {
                &self.0
            }

            pub fn chart(&self) -> &Arc<Chart> {
                self.0.chart()
            }

            pub fn dim(&self) -> usize {
                self.0.dim()
            }

            pub fn apply(&self, x: &[Jet]) -> Vec<Jet> {
                self.0.apply(x)
            }

            pub fn jets(&self, p: &[f64], order: usize) -> Result<Vec<Jet>> {
                self.0.jets(p, order)
            }

            pub fn scaled(&self, c: f64) -> $name {
                $name(self.0.scaled(c))
            }

            pub fn on_chart(&self, chart: Arc<Chart>) -> $name {
                $name(self.0.on_chart(chart))
            }
        }
    };
}

typed_field!(ScalarField, FieldKind::Scalar);
typed_field!(VectorField, FieldKind::Vector);
typed_field!(OneForm, FieldKind::OneForm);
typed_field!(
    /// Antisymmetric bilinear form, `ω_ij = ω(∂_i, ∂_j)`.
    TwoForm,
    FieldKind::TwoForm
);
typed_field!(MetricField, FieldKind::Metric);
typed_field!(
    /// (1,1)-tensor; component `(i, j)` is `E^i_j`.
    EndomorphismField,
    FieldKind::Endomorphism
);

impl ScalarField {
    pub fn value(&self, p: &[f64]) -> Result<f64> {
        Ok(self.0.values(p)?[0])
    }

    pub fn jet(&self, p: &[f64], order: usize) -> Result<Jet2> {
        Ok(self.0.jets(p, order)?.swap_remove(0))
    }

    pub fn constant(chart: Arc<Chart>, c: f64) -> ScalarField {
        ScalarField::from_fn(chart, move |_| vec![Jet::constant(c)])
    }

    /// The one-form `df`, carried to first order.
    pub fn differential(&self) -> OneForm {
        let rule = self.0.rule().clone();
        OneForm::from_fn(self.chart().clone(), move |x| {
            first_derivatives(&rule, x).swap_remove(0)
        })
    }
}

impl VectorField {
    pub fn value(&self, p: &[f64]) -> Result<DVector<f64>> {
        Ok(vector_of(&self.0.values(p)?))
    }

    pub fn constant(chart: Arc<Chart>, v: Vec<f64>) -> VectorField {
        VectorField::from_fn(chart, move |_| v.iter().map(|&c| Jet::constant(c)).collect())
    }
}

impl OneForm {
    pub fn value(&self, p: &[f64]) -> Result<DVector<f64>> {
        Ok(vector_of(&self.0.values(p)?))
    }

    pub fn constant(chart: Arc<Chart>, v: Vec<f64>) -> OneForm {
        OneForm::from_fn(chart, move |_| v.iter().map(|&c| Jet::constant(c)).collect())
    }

    /// `(dα)_ij = ∂_i α_j − ∂_j α_i` at `p`.
    pub fn exterior_derivative(&self, p: &[f64]) -> Result<DMatrix<f64>> {
        exterior_derivative(self, p)
    }

    /// `dα` as a two-form field, carried to first order.
    pub fn d_field(&self) -> TwoForm {
        let rule = self.0.rule().clone();
        TwoForm::from_fn(self.chart().clone(), move |x| {
            let da = first_derivatives(&rule, x);
            let n = x.len();
            let mut out = Vec::with_capacity(n * n);
            for i in 0..n {
                for j in 0..n {
                    out.push(&da[j][i] - &da[i][j]);
                }
            }
            out
        })
    }

    pub fn add(&self, other: &OneForm) -> OneForm {
        OneForm(Field::derived(
            self.chart().clone(),
            FieldKind::OneForm,
            &[&self.0, &other.0],
            |v, _| v[0].iter().zip(&v[1]).map(|(a, b)| a + b).collect(),
        ))
    }
}

impl TwoForm {
    pub fn value(&self, p: &[f64]) -> Result<DMatrix<f64>> {
        Ok(matrix_of(self.dim(), &self.0.values(p)?))
    }
}

impl MetricField {
    pub fn value(&self, p: &[f64]) -> Result<DMatrix<f64>> {
        Ok(matrix_of(self.dim(), &self.0.values(p)?))
    }

    pub fn flat(chart: Arc<Chart>) -> MetricField {
        let n = chart.dim();
        MetricField::from_fn(chart, move |_| {
            (0..n * n)
                .map(|k| Jet::constant(if k / n == k % n { 1.0 } else { 0.0 }))
                .collect()
        })
    }
}

impl EndomorphismField {
    pub fn value(&self, p: &[f64]) -> Result<DMatrix<f64>> {
        Ok(matrix_of(self.dim(), &self.0.values(p)?))
    }
}

/// `∂_i` of every component of `rule` as jets in the same variables as `x`,
/// exact to first order: the rule is re-expanded to second order at the
/// point and the Hessian row supplies the gradient of each partial.
/// Second derivatives of the result are not tracked.
pub(crate) fn first_derivatives(rule: &Rule, x: &[Jet]) -> Vec<Vec<Jet>> {
    let n = x.len();
    let p: Vec<f64> = x.iter().map(Jet::value).collect();
    let order = x.iter().map(Jet::order).max().unwrap_or(0);
    let f = rule(&Jet::seed(&p, if order == 0 { 1 } else { 2 }));
    f.iter()
        .map(|fc| {
            (0..n)
                .map(|i| {
                    let mut g = Jet::constant(fc.d(i));
                    if order > 0 {
                        for (k, xk) in x.iter().enumerate() {
                            let h = fc.dd(i, k);
                            if h != 0.0 {
                                g += (xk - p[k]).scale(h);
                            }
                        }
                        g = g.truncate(1);
                    }
                    g
                })
                .collect()
        })
        .collect()
}

/// Value, gradient and Hessian of a scalar field at `p`.
pub fn jet_eval(field: &ScalarField, p: &[f64], order: usize) -> Result<Jet2> {
    if order > 2 {
        return Err(GeometryError::Parameter(format!("jet order {order} > 2")));
    }
    field.jet(p, order)
}

/// `(dα)_ij = ∂_i α_j − ∂_j α_i`, antisymmetric by construction.
pub fn exterior_derivative(form: &OneForm, p: &[f64]) -> Result<DMatrix<f64>> {
    let a = form.jets(p, 1)?;
    let n = form.dim();
    Ok(DMatrix::from_fn(n, n, |i, j| a[j].d(i) - a[i].d(j)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plane() -> Arc<Chart> {
        Arc::new(Chart::euclidean("R2", 2, 3.0))
    }

    #[test]
    fn jet_eval_of_polynomial() {
        let f = ScalarField::from_fn(plane(), |x| vec![&(&x[0] * &x[0]) * &x[1]]);
        let j = jet_eval(&f, &[1.0, 2.0], 2).unwrap();
        assert_eq!(j.value(), 2.0);
        assert_eq!([j.d(0), j.d(1)], [4.0, 1.0]);
        assert_eq!([j.dd(0, 0), j.dd(0, 1), j.dd(1, 1)], [4.0, 2.0, 0.0]);
    }

    #[test]
    fn x_dy_has_area_form_derivative() {
        let alpha = OneForm::from_fn(plane(), |x| vec![Jet::constant(0.0), x[0].clone()]);
        for p in [[0.0, 0.0], [1.3, -2.0]] {
            let d = alpha.exterior_derivative(&p).unwrap();
            assert_eq!(d, DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]));
        }
    }

    #[test]
    fn differential_is_closed() {
        let f = ScalarField::from_fn(plane(), |x| vec![&x[0] * &x[0] + &x[1] * &x[1]]);
        let d = f.differential().exterior_derivative(&[0.4, -0.9]).unwrap();
        assert!(d.amax() < 1e-14);
    }

    #[test]
    fn domain_error_outside_chart() {
        let chart = Arc::new(
            Chart::new(
                "half-line",
                1,
                Arc::new(|p: &[f64]| p[0] > 0.0),
                vec![crate::chart::SampleBlock::Interval { lo: 0.1, hi: 1.0 }],
            )
            .unwrap(),
        );
        let f = ScalarField::from_fn(chart, |x| vec![x[0].ln()]);
        assert!(matches!(jet_eval(&f, &[-1.0], 1), Err(GeometryError::Domain { .. })));
    }
}
