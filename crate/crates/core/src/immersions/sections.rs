use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{GeometryError, Result};
use crate::jet::Jet;
use crate::space_forms::LineBundleModel;

use super::multi_index::{graded_indices, monomial};
use super::quadrature::{Node, Quadrature};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BasisState {
    Raw,
    Orthonormal,
    /// Orthonormal basis divided by `√B` so that the kernel is 1.
    Rescaled,
}

/// Holomorphic sections `s_a = Σ_b C_ab z^{j_b}` of `L^k` in the affine
/// trivialization, with the Gram matrix of the monomials under
/// `⟨s, t⟩_k = ∫ h^k s t̄ ω^n/n!`.
#[derive(Clone, Debug)]
pub struct SectionBasis {
    model: LineBundleModel,
    monomials: Vec<Vec<u32>>,
    gram: DMatrix<Complex64>,
    coefficients: DMatrix<Complex64>,
    state: BasisState,
    level: u32,
    bergman: Option<f64>,
}

fn monomial_values(x: &[f64], monomials: &[Vec<u32>]) -> Vec<Complex64> {
    let z: Vec<Complex64> = x.chunks(2).map(|p| Complex64::new(p[0], p[1])).collect();
    monomials
        .iter()
        .map(|j| j.iter().zip(&z).fold(Complex64::new(1.0, 0.0), |acc, (e, z)| acc * z.powu(*e)))
        .collect()
}

/// `h^k ω^n/n!` density against Lebesgue measure, from the base metric.
pub fn section_density(model: &LineBundleModel, x: &[f64]) -> Result<f64> {
    let s: f64 = x.iter().map(|v| v * v).sum();
    let g = model.base().g().value(x)?;
    Ok(model.weight_at(s) * g.determinant().sqrt())
}

/// `∫ f ω^n/n!` with the model's quadrature nodes.
pub fn integrate_volume<F>(model: &LineBundleModel, nodes: &[Node], f: F) -> Result<f64>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    let mut acc = 0.0;
    for n in nodes {
        let g = model.base().g().value(&n.point)?;
        acc += n.weight * g.determinant().sqrt() * f(&n.point)?;
    }
    Ok(acc)
}

fn gram_on(model: &LineBundleModel, monomials: &[Vec<u32>], nodes: &[Node]) -> Result<DMatrix<Complex64>> {
    let d = monomials.len();
    let mut g = DMatrix::<Complex64>::zeros(d, d);
    for n in nodes {
        let w = n.weight * section_density(model, &n.point)?;
        let m = monomial_values(&n.point, monomials);
        for a in 0..d {
            let ma = m[a] * w;
            for b in 0..d {
                g[(a, b)] += ma * m[b].conj();
            }
        }
    }
    Ok(g)
}

fn normalized_change(prev: &DMatrix<Complex64>, cur: &DMatrix<Complex64>) -> f64 {
    let d = cur.nrows();
    let mut worst: f64 = 0.0;
    for a in 0..d {
        for b in 0..d {
            let scale = (cur[(a, a)].re * cur[(b, b)].re).abs().sqrt().max(f64::MIN_POSITIVE);
            worst = worst.max((cur[(a, b)] - prev[(a, b)]).norm() / scale);
        }
    }
    worst
}

impl SectionBasis {
    /// Monomials of degree `≤ model.degree()` with their quadrature Gram.
    pub fn raw(model: &LineBundleModel, q: &Quadrature) -> Result<SectionBasis> {
        let n = model.base().complex_dim();
        let monomials = graded_indices(n, 0, model.degree());
        let (gram, level) = q.adaptive(
            n,
            model.decay(),
            model.degree(),
            |nodes| gram_on(model, &monomials, nodes),
            normalized_change,
        )?;
        let d = monomials.len();
        Ok(SectionBasis {
            model: model.clone(),
            monomials,
            gram,
            coefficients: DMatrix::identity(d, d),
            state: BasisState::Raw,
            level,
            bergman: None,
        })
    }

    pub fn model(&self) -> &LineBundleModel {
        &self.model
    }

    pub fn monomials(&self) -> &[Vec<u32>] {
        &self.monomials
    }

    /// Gram matrix of the monomials.
    pub fn gram(&self) -> &DMatrix<Complex64> {
        &self.gram
    }

    /// Gram matrix of the current sections, `C G C†`.
    pub fn section_gram(&self) -> DMatrix<Complex64> {
        &self.coefficients * &self.gram * self.coefficients.adjoint()
    }

    pub fn coefficients(&self) -> &DMatrix<Complex64> {
        &self.coefficients
    }

    pub fn state(&self) -> BasisState {
        self.state
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    /// Kernel value divided out by the rescaling, when rescaled.
    pub fn bergman_constant(&self) -> Option<f64> {
        self.bergman
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn k(&self) -> u32 {
        self.model.k()
    }

    pub fn values(&self, x: &[f64]) -> Vec<Complex64> {
        let m = monomial_values(x, &self.monomials);
        (0..self.len())
            .map(|a| (0..self.len()).map(|b| self.coefficients[(a, b)] * m[b]).sum())
            .collect()
    }

    /// `(Re s_a, Im s_a)` on jets.
    pub fn jets(&self, z: &[Jet]) -> Vec<(Jet, Jet)> {
        let m: Vec<(Jet, Jet)> = self.monomials.iter().map(|j| monomial(z, j)).collect();
        (0..self.len())
            .map(|a| {
                let mut re = Jet::constant(0.0);
                let mut im = Jet::constant(0.0);
                for (b, (mr, mi)) in m.iter().enumerate() {
                    let c = self.coefficients[(a, b)];
                    if c == Complex64::new(0.0, 0.0) {
                        continue;
                    }
                    re += mr.scale(c.re) - mi.scale(c.im);
                    im += mi.scale(c.re) + mr.scale(c.im);
                }
                (re, im)
            })
            .collect()
    }

    /// Sections `U s` for a unitary `U`.
    pub fn transformed(&self, u: &DMatrix<Complex64>) -> Result<SectionBasis> {
        let d = self.len();
        if u.shape() != (d, d) {
            return Err(GeometryError::Dimension(format!("unitary must be {d}×{d}")));
        }
        let defect = (u.adjoint() * u - DMatrix::<Complex64>::identity(d, d)).iter().map(|c| c.norm()).fold(0.0, f64::max);
        if defect > 1e-10 {
            return Err(GeometryError::Parameter(format!("matrix is not unitary, |U†U − I| = {defect:e}")));
        }
        let mut out = self.clone();
        out.coefficients = u * &self.coefficients;
        Ok(out)
    }

    /// Divides every section by `√B(x0)`.
    pub fn rescaled_at(&self, x0: &[f64]) -> Result<SectionBasis> {
        let b = bergman_kernel(self, x0)?;
        let mut out = self.clone();
        out.coefficients /= Complex64::new(b.sqrt(), 0.0);
        out.state = BasisState::Rescaled;
        out.bergman = Some(b * self.bergman.unwrap_or(1.0));
        Ok(out)
    }
}

/// Inverse Cholesky orthonormalization of the monomial Gram matrix.
pub fn orthonormalize_sections(model: &LineBundleModel, q: &Quadrature) -> Result<SectionBasis> {
    let mut basis = SectionBasis::raw(model, q)?;
    let d = basis.len();
    let chol = basis
        .gram
        .clone()
        .cholesky()
        .ok_or_else(|| GeometryError::Model("Gram matrix is not positive definite".into()))?;
    let l = chol.l();
    basis.coefficients = l
        .solve_lower_triangular(&DMatrix::identity(d, d))
        .ok_or_else(|| GeometryError::Model("singular Cholesky factor".into()))?;
    basis.state = BasisState::Orthonormal;
    Ok(basis)
}

/// `B(x) = h^k(x) Σ |s_a(x)|²`.
pub fn bergman_kernel(basis: &SectionBasis, x: &[f64]) -> Result<f64> {
    if basis.state == BasisState::Raw {
        return Err(GeometryError::State("Bergman kernel needs an orthonormal basis".into()));
    }
    let s: f64 = x.iter().map(|v| v * v).sum();
    Ok(basis.model.weight_at(s) * basis.values(x).iter().map(|c| c.norm_sqr()).sum::<f64>())
}

/// `(max − min)/mean` of the kernel over `points`.
pub fn bergman_variation(basis: &SectionBasis, points: &[Vec<f64>]) -> Result<(f64, f64)> {
    let b: Vec<f64> = points.iter().map(|p| bergman_kernel(basis, p)).collect::<Result<_>>()?;
    let mean = b.iter().sum::<f64>() / b.len().max(1) as f64;
    let (lo, hi) = b.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| (l.min(*v), h.max(*v)));
    Ok(((hi - lo) / mean, mean))
}

/// Rescales an orthonormal basis by its kernel after checking constancy
/// to `tol` at `points`.
pub fn rescale(basis: &SectionBasis, points: &[Vec<f64>], tol: f64) -> Result<SectionBasis> {
    if basis.state != BasisState::Orthonormal {
        return Err(GeometryError::State("rescaling needs a freshly orthonormalized basis".into()));
    }
    let (var, mean) = bergman_variation(basis, points)?;
    if !(var <= tol) {
        return Err(GeometryError::Model(format!(
            "Bergman kernel is not constant: relative variation {var:e} > {tol:e}"
        )));
    }
    let mut out = basis.clone();
    out.coefficients /= Complex64::new(mean.sqrt(), 0.0);
    out.state = BasisState::Rescaled;
    out.bergman = Some(mean);
    Ok(out)
}
