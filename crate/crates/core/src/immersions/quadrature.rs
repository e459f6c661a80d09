use std::f64::consts::PI;

use crate::error::{GeometryError, Result};
use crate::space_forms::Decay;

/// Gauss–Legendre nodes and weights on `[−1, 1]`.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; m];
    let mut w = vec![0.0; m];
    let mf = m as f64;
    for i in 0..m.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (mf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for j in 2..=m {
                let jf = j as f64;
                let p2 = ((2.0 * jf - 1.0) * z * p1 - (jf - 1.0) * p0) / jf;
                p0 = p1;
                p1 = p2;
            }
            dp = mf * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[m - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[m - 1 - i] = w[i];
    }
    (x, w)
}

/// Gauss–Legendre rule mapped to `[a, b]`.
pub fn gauss_legendre_on(m: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let (x, w) = gauss_legendre(m);
    let (h, c) = (0.5 * (b - a), 0.5 * (b + a));
    x.iter().zip(&w).map(|(x, w)| (c + h * x, h * w)).collect()
}

/// A point of `ℂ^n` (as real pairs) with its Lebesgue weight.
#[derive(Clone, Debug, PartialEq)]
pub struct Node {
    pub point: Vec<f64>,
    pub weight: f64,
}

/// Tensor rule in `(s = |z|², angles)` for U(n)-symmetric integrands on
/// `ℂ^n`, `n ∈ {1, 2}`. Angles use the trapezoid rule, exact for the
/// trigonometric polynomials that monomials of bounded degree produce;
/// refinement doubles the radial and polar orders.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quadrature {
    pub radial: usize,
    pub angular: usize,
    pub polar: usize,
    pub tol: f64,
    pub max_level: u32,
    pub floor: f64,
}

impl Default for Quadrature {
    fn default() -> Self {
        Quadrature {
            radial: 16,
            angular: 8,
            polar: 8,
            tol: 1e-10,
            max_level: 4,
            floor: 1e-16,
        }
    }
}

impl Quadrature {
    /// Radial nodes `(s, w)` with `∫_0^∞ f(s) ds ≈ Σ w f(s)`.
    fn radial_nodes(&self, decay: Decay, degree: usize, level: u32) -> Vec<(f64, f64)> {
        let m = self.radial << level;
        match decay {
            // s = u/(1−u), ds = du/(1−u)²
            Decay::Polynomial => gauss_legendre_on(m, 0.0, 1.0)
                .into_iter()
                .map(|(u, w)| (u / (1.0 - u), w / ((1.0 - u) * (1.0 - u))))
                .collect(),
            Decay::Gaussian => {
                let cut = self.gaussian_cutoff(degree);
                let panels = (cut / 4.0).ceil() as usize;
                let h = cut / panels as f64;
                (0..panels)
                    .flat_map(|p| gauss_legendre_on(m, p as f64 * h, (p + 1) as f64 * h))
                    .collect()
            }
        }
    }

    /// Smallest `S` with `S^d e^{−S}/d! < floor`.
    pub fn gaussian_cutoff(&self, degree: usize) -> f64 {
        let d = degree as f64;
        let lnf: f64 = (2..=degree).map(|k| (k as f64).ln()).sum();
        let mut s = d + 1.0;
        while d * s.ln() - s - lnf > self.floor.ln() {
            s += 1.0;
        }
        s
    }

    fn angles(&self, degree: usize) -> Vec<f64> {
        let m = self.angular.max(2 * degree + 2);
        (0..m).map(|i| 2.0 * PI * i as f64 / m as f64).collect()
    }

    /// Nodes on `ℂ^n` for integrands `p(z, z̄)·ρ(|z|²)` with `p` of degree at
    /// most `degree` in each of `z` and `z̄`.
    pub fn nodes(&self, n: usize, decay: Decay, degree: usize, level: u32) -> Result<Vec<Node>> {
        let radial = self.radial_nodes(decay, degree, level);
        let angles = self.angles(degree);
        let dth = 2.0 * PI / angles.len() as f64;
        let mut out = Vec::new();
        match n {
            1 => {
                for &(s, ws) in &radial {
                    let r = s.sqrt();
                    for &th in &angles {
                        out.push(Node {
                            point: vec![r * th.cos(), r * th.sin()],
                            weight: 0.5 * ws * dth,
                        });
                    }
                }
            }
            2 => {
                // z_1 = √(s(1−v)) e^{iθ_1}, z_2 = √(sv) e^{iθ_2}, dV = ¼ s ds dv dθ_1 dθ_2
                let polar = gauss_legendre_on(self.polar << level, 0.0, 1.0);
                for &(s, ws) in &radial {
                    for &(v, wv) in &polar {
                        let (r1, r2) = ((s * (1.0 - v)).sqrt(), (s * v).sqrt());
                        for &a in &angles {
                            for &b in &angles {
                                out.push(Node {
                                    point: vec![r1 * a.cos(), r1 * a.sin(), r2 * b.cos(), r2 * b.sin()],
                                    weight: 0.25 * s * ws * wv * dth * dth,
                                });
                            }
                        }
                    }
                }
            }
            _ => {
                return Err(GeometryError::Unsupported(format!(
                    "quadrature is implemented for complex dimension 1 and 2, not {n}"
                )))
            }
        }
        Ok(out)
    }

    /// Refines until `change(previous, current) < tol`; returns the value and
    /// the level reached.
    pub fn adaptive<T, F, C>(&self, n: usize, decay: Decay, degree: usize, integrate: F, change: C) -> Result<(T, u32)>
    where
        F: Fn(&[Node]) -> Result<T>,
        C: Fn(&T, &T) -> f64,
    {
        let mut prev = integrate(&self.nodes(n, decay, degree, 0)?)?;
        let mut last = f64::INFINITY;
        for level in 1..=self.max_level {
            let cur = integrate(&self.nodes(n, decay, degree, level)?)?;
            last = change(&prev, &cur);
            if last < self.tol {
                return Ok((cur, level));
            }
            prev = cur;
        }
        Err(GeometryError::Quadrature {
            change: last,
            tol: self.tol,
            level: self.max_level as usize,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_integrates_polynomials_exactly() {
        let rule = gauss_legendre_on(5, 0.0, 2.0);
        for p in 0..10 {
            let got: f64 = rule.iter().map(|(x, w)| w * x.powi(p)).sum();
            let want = 2f64.powi(p + 1) / f64::from(p + 1);
            assert!((got - want).abs() < 1e-13 * want, "x^{p}: {got} vs {want}");
        }
    }

    #[test]
    fn fubini_study_area_is_pi() {
        let q = Quadrature::default();
        let nodes = q.nodes(1, Decay::Polynomial, 0, 0).unwrap();
        let area: f64 = nodes
            .iter()
            .map(|n| n.weight / (1.0 + n.point[0].powi(2) + n.point[1].powi(2)).powi(2))
            .sum();
        assert!((area - PI).abs() < 1e-13);
    }

    #[test]
    fn gaussian_moments_are_factorials() {
        let q = Quadrature::default();
        let nodes = q.nodes(1, Decay::Gaussian, 6, 0).unwrap();
        let mut fact = 1.0;
        for j in 0..=6 {
            if j > 0 {
                fact *= f64::from(j);
            }
            let m: f64 = nodes
                .iter()
                .map(|n| {
                    let s = n.point[0].powi(2) + n.point[1].powi(2);
                    n.weight * s.powi(j) * (-s).exp()
                })
                .sum();
            assert!((m / (PI * fact) - 1.0).abs() < 1e-12, "j = {j}");
        }
    }

    #[test]
    fn ball_volume_in_two_variables() {
        let q = Quadrature::default();
        let nodes = q.nodes(2, Decay::Polynomial, 0, 0).unwrap();
        // ∫ (1+|z|²)^{-3} over ℂ² is π²/2
        let v: f64 = nodes
            .iter()
            .map(|n| n.weight * (1.0 + n.point.iter().map(|x| x * x).sum::<f64>()).powi(-3))
            .sum();
        assert!((v - PI * PI / 2.0).abs() < 1e-12);
    }
}
