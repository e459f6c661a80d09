//! Coordinate charts and seeded low-discrepancy sampling inside them.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{GeometryError, Result};

pub type Probe = Arc<dyn Fn(&[f64]) -> bool + Send + Sync>;

/// One factor of a chart's sampling region.
#[derive(Clone, Debug, PartialEq)]
pub enum SampleBlock {
    Interval { lo: f64, hi: f64 },
    /// Euclidean ball of the given real dimension and radius, centered at 0.
    Ball { dim: usize, radius: f64 },
}

impl SampleBlock {
    fn dim(&self) -> usize {
        match self {
            SampleBlock::Interval { .. } => 1,
            SampleBlock::Ball { dim, .. } => *dim,
        }
    }

    /// Maps `u ∈ [0,1)^dim` into the block.
    fn map(&self, u: &[f64], out: &mut Vec<f64>) {
        match self {
            SampleBlock::Interval { lo, hi } => out.push(lo + (hi - lo) * u[0]),
            SampleBlock::Ball { dim, radius } => {
                // cube -> ball: x * (|x|_inf / |x|_2), a continuous bijection
                let x: Vec<f64> = u[..*dim].iter().map(|v| 2.0 * v - 1.0).collect();
                let l2 = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                let linf = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                let s = if l2 > 0.0 { linf / l2 } else { 0.0 };
                out.extend(x.iter().map(|v| v * s * radius));
            }
        }
    }

    fn scaled(&self, factor: f64) -> SampleBlock {
        match self {
            SampleBlock::Interval { lo, hi } => SampleBlock::Interval { lo: *lo, hi: *hi },
            SampleBlock::Ball { dim, radius } => SampleBlock::Ball {
                dim: *dim,
                radius: radius * factor,
            },
        }
    }
}

/// A real coordinate chart: dimension, membership predicate and a region
/// from which verification points are drawn.
#[derive(Clone)]
pub struct Chart {
    dim: usize,
    label: String,
    probe: Probe,
    sampling: Vec<SampleBlock>,
}

impl fmt::Debug for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Chart")
            .field("dim", &self.dim)
            .field("label", &self.label)
            .field("sampling", &self.sampling)
            .finish()
    }
}

impl Chart {
    /// Builds a chart. `sampling` must cover `dim` coordinates and at least
    /// one of its points must pass `probe`.
    pub fn new(
        label: impl Into<String>,
        dim: usize,
        probe: Probe,
        sampling: Vec<SampleBlock>,
    ) -> Result<Chart> {
        let label = label.into();
        if dim == 0 {
            return Err(GeometryError::Parameter(format!("chart `{label}` must have dim >= 1")));
        }
        let covered: usize = sampling.iter().map(SampleBlock::dim).sum();
        if covered != dim {
            return Err(GeometryError::Parameter(format!(
                "chart `{label}`: sampling region covers {covered} coordinates, expected {dim}"
            )));
        }
        let chart = Chart {
            dim,
            label,
            probe,
            sampling,
        };
        let center = chart.map_unit(&vec![0.5; dim]);
        if !(chart.probe)(&center) && chart.sample(0, 1).is_err() {
            return Err(GeometryError::Parameter(format!(
                "chart `{}` has an empty domain",
                chart.label
            )));
        }
        Ok(chart)
    }

    /// All of ℝ^dim, sampled from a box `[-half_width, half_width]^dim`.
    pub fn euclidean(label: impl Into<String>, dim: usize, half_width: f64) -> Chart {
        Chart::new(
            label,
            dim,
            Arc::new(|p: &[f64]| p.iter().all(|x| x.is_finite())),
            vec![
                SampleBlock::Interval {
                    lo: -half_width,
                    hi: half_width
                };
                dim
            ],
        )
        .expect("euclidean chart is valid")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        p.len() == self.dim && p.iter().all(|x| x.is_finite()) && (self.probe)(p)
    }

    pub fn check(&self, p: &[f64]) -> Result<()> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(GeometryError::Domain {
                chart: self.label.clone(),
                point: p.to_vec(),
            })
        }
    }

    pub fn sampling(&self) -> &[SampleBlock] {
        &self.sampling
    }

    /// Same chart, with every ball in the sampling region shrunk by `factor`.
    pub fn with_sampling_scale(&self, factor: f64) -> Chart {
        Chart {
            sampling: self.sampling.iter().map(|b| b.scaled(factor)).collect(),
            ..self.clone()
        }
    }

    pub fn with_sampling(&self, sampling: Vec<SampleBlock>) -> Result<Chart> {
        Chart::new(self.label.clone(), self.dim, self.probe.clone(), sampling)
    }

    pub fn with_label(&self, label: impl Into<String>) -> Chart {
        Chart {
            label: label.into(),
            ..self.clone()
        }
    }

    fn map_unit(&self, u: &[f64]) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.dim);
        let mut offset = 0;
        for block in &self.sampling {
            let d = block.dim();
            block.map(&u[offset..offset + d], &mut out);
            offset += d;
        }
        out
    }

    /// `count` seeded Halton points mapped into the sampling region, with
    /// rejection against the domain probe. Fails when more than 90% of the
    /// draws are rejected.
    pub fn sample(&self, seed: u64, count: usize) -> Result<Vec<Vec<f64>>> {
        let mut halton = Halton::new(self.dim, seed);
        let mut out = Vec::with_capacity(count);
        let mut drawn = 0usize;
        let budget = 10 * count.max(1) + 10;
        while out.len() < count {
            if drawn >= budget {
                return Err(GeometryError::Sampling {
                    chart: self.label.clone(),
                    accepted: out.len(),
                    drawn,
                });
            }
            let p = self.map_unit(&halton.next_point());
            drawn += 1;
            if self.contains(&p) {
                out.push(p);
            }
        }
        Ok(out)
    }

    /// Cartesian product of charts (coordinates concatenated).
    pub fn product(label: impl Into<String>, factors: &[&Chart]) -> Chart {
        let dims: Vec<usize> = factors.iter().map(|c| c.dim).collect();
        let probes: Vec<Probe> = factors.iter().map(|c| c.probe.clone()).collect();
        let probe: Probe = Arc::new(move |p: &[f64]| {
            let mut off = 0;
            for (d, pr) in dims.iter().zip(&probes) {
                if !pr(&p[off..off + d]) {
                    return false;
                }
                off += d;
            }
            true
        });
        Chart::new(
            label,
            factors.iter().map(|c| c.dim).sum(),
            probe,
            factors.iter().flat_map(|c| c.sampling.iter().cloned()).collect(),
        )
        .expect("product of nonempty charts is nonempty")
    }
}

fn first_primes(count: usize) -> Vec<u64> {
    let mut out: Vec<u64> = Vec::with_capacity(count);
    let mut k = 2u64;
    while out.len() < count {
        if out.iter().take_while(|&&q| q * q <= k).all(|&q| !k.is_multiple_of(q)) {
            out.push(k);
        }
        k += 1;
    }
    out
}

/// Halton sequence with a seeded Cranley–Patterson rotation.
#[derive(Clone, Debug)]
pub struct Halton {
    index: u64,
    shift: Vec<f64>,
    bases: Vec<u64>,
}

impl Halton {
    pub fn new(dim: usize, seed: u64) -> Halton {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Halton {
            index: 1,
            shift: (0..dim).map(|_| rng.random::<f64>()).collect(),
            bases: first_primes(dim),
        }
    }

    fn radical_inverse(mut i: u64, base: u64) -> f64 {
        let mut f = 1.0;
        let mut r = 0.0;
        let b = base as f64;
        while i > 0 {
            f /= b;
            r += f * (i % base) as f64;
            i /= base;
        }
        r
    }

    pub fn next_point(&mut self) -> Vec<f64> {
        let i = self.index;
        self.index += 1;
        self.shift
            .iter()
            .zip(self.bases.iter())
            .map(|(s, &b)| (Self::radical_inverse(i, b) + s).fract())
            .collect()
    }
}
