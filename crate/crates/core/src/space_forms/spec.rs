use serde::{Deserialize, Serialize};

use crate::error::{GeometryError, Result};

/// The three families of Sasakian space forms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    /// `c > −3`: D-homothetic spheres.
    Elliptic,
    /// `c = −3`: the Heisenberg group.
    Null,
    /// `c < −3`: line bundles over the complex hyperbolic ball.
    Hyperbolic,
}

impl Family {
    pub fn of(c: f64) -> Family {
        if c > -3.0 {
            Family::Elliptic
        } else if c == -3.0 {
            Family::Null
        } else {
            Family::Hyperbolic
        }
    }
}

/// `(N, c)` with `4b = c + 3`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpaceFormSpec {
    n: usize,
    c: f64,
}

impl SpaceFormSpec {
    pub fn from_c(n: usize, c: f64) -> Result<SpaceFormSpec> {
        if n < 1 {
            return Err(GeometryError::Parameter(format!("N must be >= 1, got {n}")));
        }
        if !c.is_finite() {
            return Err(GeometryError::Parameter(format!("c must be finite, got {c}")));
        }
        Ok(SpaceFormSpec { n, c })
    }

    pub fn from_b(n: usize, b: f64) -> Result<SpaceFormSpec> {
        if !b.is_finite() {
            return Err(GeometryError::Parameter(format!("b must be finite, got {b}")));
        }
        SpaceFormSpec::from_c(n, 4.0 * b - 3.0)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn b(&self) -> f64 {
        (self.c + 3.0) / 4.0
    }

    pub fn family(&self) -> Family {
        Family::of(self.c)
    }
}
