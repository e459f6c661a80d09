use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{GeometryError, Result};
use crate::jet::Jet;
use crate::map::SmoothMap;
use crate::space_forms::{
    sphere_point, sphere_point_values, stereographic, stereographic_values, ContactMetricStructure, Family,
    SpaceFormSpec,
};

use super::report::sample_rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RigidKind {
    /// `Z ↦ UZ` on `ℂ^{N+1}` restricted to the sphere.
    Unitary,
    /// `(t, z) ↦ (t + a − Im⟨w, Uz⟩, Uz + w)` on `ℝ × ℂ^N`.
    Product,
}

/// A Sasakian transformation of a model space form.
#[derive(Clone, Debug)]
pub struct RigidTransform {
    pub kind: RigidKind,
    pub u: DMatrix<Complex64>,
    pub a: f64,
    pub w: DVector<Complex64>,
    /// `max |φ₁ − T∘φ₂|` over the holdout half, in target chart units.
    pub residual: f64,
}

fn to_complex(x: &[f64]) -> DVector<Complex64> {
    DVector::from_iterator(x.len() / 2, x.chunks(2).map(|p| Complex64::new(p[0], p[1])))
}

fn from_complex(z: &DVector<Complex64>) -> Vec<f64> {
    z.iter().flat_map(|c| [c.re, c.im]).collect()
}

/// `(Re Uz, Im Uz)` on jets.
fn unitary_jets(u: &DMatrix<Complex64>, z: &[Jet]) -> Vec<Jet> {
    let n = u.nrows();
    let mut out = Vec::with_capacity(2 * n);
    for i in 0..n {
        let mut re = Jet::constant(0.0);
        let mut im = Jet::constant(0.0);
        for j in 0..u.ncols() {
            let c = u[(i, j)];
            let (x, y) = (&z[2 * j], &z[2 * j + 1]);
            re += x.scale(c.re) - y.scale(c.im);
            im += y.scale(c.re) + x.scale(c.im);
        }
        out.push(re);
        out.push(im);
    }
    out
}

impl RigidTransform {
    pub fn identity(kind: RigidKind, n: usize) -> RigidTransform {
        let d = if kind == RigidKind::Unitary { n + 1 } else { n };
        RigidTransform {
            kind,
            u: DMatrix::identity(d, d),
            a: 0.0,
            w: DVector::zeros(d),
            residual: 0.0,
        }
    }

    /// `max |U†U − I|`.
    pub fn unitarity_defect(&self) -> f64 {
        let d = self.u.nrows();
        (self.u.adjoint() * &self.u - DMatrix::<Complex64>::identity(d, d))
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }

    /// Action on a target chart point.
    pub fn apply_point(&self, y: &[f64]) -> Vec<f64> {
        match self.kind {
            RigidKind::Unitary => stereographic_values(&from_complex(&(&self.u * to_complex(&sphere_point_values(y))))),
            RigidKind::Product => {
                let z = to_complex(&y[1..]);
                let uz = &self.u * z;
                let mut out = vec![y[0] + self.a - self.w.dotc(&uz).im];
                out.extend(from_complex(&(uz + &self.w)));
                out
            }
        }
    }

    /// `T ∘ φ`.
    pub fn compose(&self, phi: &SmoothMap) -> SmoothMap {
        let rule = phi.rule().clone();
        let t = self.clone();
        SmoothMap::from_fn(
            format!("T∘{}", phi.label()),
            phi.source().clone(),
            phi.target().clone(),
            move |x| {
                let y = rule(x);
                match t.kind {
                    RigidKind::Unitary => stereographic(&unitary_jets(&t.u, &sphere_point(&y))),
                    RigidKind::Product => {
                        let uz = unitary_jets(&t.u, &y[1..]);
                        // Im⟨w, v⟩ = Σ (Re w Im v − Im w Re v)
                        let mut shift = Jet::constant(t.a);
                        for (i, c) in t.w.iter().enumerate() {
                            shift -= uz[2 * i + 1].scale(c.re) - uz[2 * i].scale(c.im);
                        }
                        let mut out = vec![&y[0] + &shift];
                        for (i, c) in t.w.iter().enumerate() {
                            out.push(&uz[2 * i] + c.re);
                            out.push(&uz[2 * i + 1] + c.im);
                        }
                        out
                    }
                }
            },
        )
    }
}

/// Seeded unitary: the `Q` factor of a matrix with uniform entries in
/// the unit square.
pub fn random_unitary(d: usize, seed: u64) -> DMatrix<Complex64> {
    let mut rng = sample_rng(seed, 0);
    let m = DMatrix::from_fn(d, d, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    m.qr().q()
}

/// Polar factor of `M` together with its numerical rank.
fn polar_factor(m: &DMatrix<Complex64>) -> (DMatrix<Complex64>, usize) {
    let svd = m.clone().svd(true, true);
    let top = svd.singular_values.max();
    let rank = svd.singular_values.iter().filter(|s| **s > 1e-10 * top.max(f64::MIN_POSITIVE)).count();
    let u = svd.u.expect("requested");
    let vt = svd.v_t.expect("requested");
    (u * vt, rank)
}

/// Recovers `T` with `φ₁ ≈ T∘φ₂` from sampled images: complex Procrustes on
/// the ambient points for `c > −3`, and a centered Procrustes on the
/// transverse factor plus a least-squares translation for `c = −3`. Fits on
/// even samples and checks on odd ones.
pub fn recover_rigid_transform(
    phi1: &SmoothMap,
    phi2: &SmoothMap,
    source: &ContactMetricStructure,
    spec: SpaceFormSpec,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<RigidTransform> {
    if samples < 4 {
        return Err(GeometryError::Parameter("rigidity recovery needs at least 4 samples".into()));
    }
    if phi1.source().dim() != source.dim() || phi2.source().dim() != source.dim() {
        return Err(GeometryError::Dimension("maps do not share the source chart".into()));
    }
    let n = spec.n();
    let expected = 2 * n + 1;
    if phi1.target().dim() != expected || phi2.target().dim() != expected {
        return Err(GeometryError::Dimension(format!("targets must have dimension {expected}")));
    }
    let points = source.chart().sample(seed, samples)?;
    let y1: Vec<Vec<f64>> = points.iter().map(|p| phi1.image(p)).collect::<Result<_>>()?;
    let y2: Vec<Vec<f64>> = points.iter().map(|p| phi2.image(p)).collect::<Result<_>>()?;
    let fit: Vec<usize> = (0..samples).step_by(2).collect();
    let mut t = match spec.family() {
        Family::Elliptic => {
            let z1: Vec<_> = y1.iter().map(|y| to_complex(&sphere_point_values(y))).collect();
            let z2: Vec<_> = y2.iter().map(|y| to_complex(&sphere_point_values(y))).collect();
            let mut m = DMatrix::<Complex64>::zeros(n + 1, n + 1);
            for &i in &fit {
                m += &z1[i] * z2[i].adjoint();
            }
            let (u, rank) = polar_factor(&m);
            if rank < n + 1 {
                return Err(GeometryError::DegenerateAlignment { rank, expected: n + 1 });
            }
            RigidTransform {
                kind: RigidKind::Unitary,
                u,
                a: 0.0,
                w: DVector::zeros(n + 1),
                residual: 0.0,
            }
        }
        Family::Null => {
            let z1: Vec<_> = y1.iter().map(|y| to_complex(&y[1..])).collect();
            let z2: Vec<_> = y2.iter().map(|y| to_complex(&y[1..])).collect();
            let count = fit.len() as f64;
            let mean = |z: &[DVector<Complex64>]| {
                fit.iter().fold(DVector::<Complex64>::zeros(n), |acc, &i| acc + &z[i]) / Complex64::new(count, 0.0)
            };
            let (m1, m2) = (mean(&z1), mean(&z2));
            let mut m = DMatrix::<Complex64>::zeros(n, n);
            for &i in &fit {
                m += (&z1[i] - &m1) * (&z2[i] - &m2).adjoint();
            }
            let (u, rank) = polar_factor(&m);
            if rank < n {
                return Err(GeometryError::DegenerateAlignment { rank, expected: n });
            }
            let w = &m1 - &u * &m2;
            let a = fit
                .iter()
                .map(|&i| y1[i][0] - y2[i][0] + w.dotc(&(&u * &z2[i])).im)
                .sum::<f64>()
                / count;
            RigidTransform {
                kind: RigidKind::Product,
                u,
                a,
                w,
                residual: 0.0,
            }
        }
        Family::Hyperbolic => {
            return Err(GeometryError::Unsupported(
                "rigidity recovery for c < −3 needs a fit over ball isometries".into(),
            ))
        }
    };
    let residual = (1..samples)
        .step_by(2)
        .map(|i| {
            let ty = t.apply_point(&y2[i]);
            ty.iter().zip(&y1[i]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
        })
        .fold(0.0, f64::max);
    t.residual = residual;
    let limit = 10.0 * tol;
    if !(residual <= limit) {
        return Err(GeometryError::AlignmentMismatch { residual, limit });
    }
    Ok(t)
}
