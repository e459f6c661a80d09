use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use sasaki_core::space_forms::{Family, SpaceFormSpec};
use sasaki_core::verification::Tensor;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Axioms,
    Curvature,
    Immersion,
    Rigidity,
    Bergman,
    CalabiSweep,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Axioms => "axioms",
            Suite::Curvature => "curvature",
            Suite::Immersion => "immersion",
            Suite::Rigidity => "rigidity",
            Suite::Bergman => "bergman",
            Suite::CalabiSweep => "calabi-sweep",
        }
    }

    pub fn default_tolerance(self) -> f64 {
        match self {
            Suite::Axioms | Suite::Immersion => 1e-8,
            Suite::Curvature | Suite::Bergman => 1e-6,
            Suite::Rigidity => 1e-9,
            Suite::CalabiSweep => 1e-7,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum StructureKind {
    Sphere,
    Heisenberg,
    Hyperbolic,
    BoothbyWang,
    Kahler,
}

impl StructureKind {
    pub fn name(self) -> &'static str {
        match self {
            StructureKind::Sphere => "sphere",
            StructureKind::Heisenberg => "heisenberg",
            StructureKind::Hyperbolic => "hyperbolic",
            StructureKind::BoothbyWang => "boothby-wang",
            StructureKind::Kahler => "kahler",
        }
    }
}

/// One run, as given on the command line or as a line of a batch file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub suite: Suite,
    pub structure: StructureKind,
    #[serde(rename = "N", default)]
    pub n: Option<i64>,
    #[serde(default)]
    pub c: Option<f64>,
    #[serde(default)]
    pub b: Option<f64>,
    #[serde(default)]
    pub a: Option<f64>,
    #[serde(default)]
    pub k: Option<i64>,
    #[serde(default)]
    pub cutoff: Option<i64>,
    #[serde(default)]
    pub expected: Option<f64>,
    #[serde(default)]
    pub samples: Option<i64>,
    #[serde(default)]
    pub tol: Option<f64>,
    #[serde(default)]
    pub seed: Option<i64>,
    #[serde(default)]
    pub out: Option<String>,
    /// `tensor=factor` with tensor one of `eta`, `reeb`, `phi`, `g`,
    /// `g_transverse` or `map`.
    #[serde(default)]
    pub defect: Option<String>,
}

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("{0}")]
    Invalid(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

fn invalid(msg: impl Into<String>) -> ConfigError {
    ConfigError::Invalid(msg.into())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DefectTarget {
    Tensor(Tensor),
    Map,
}

/// A validated configuration with defaults filled in.
#[derive(Clone, Debug, PartialEq)]
pub struct Plan {
    pub suite: Suite,
    pub structure: StructureKind,
    pub n: usize,
    pub c: Option<f64>,
    pub b: Option<f64>,
    pub a: Option<f64>,
    pub k: u32,
    pub cutoff: Option<usize>,
    pub expected: Option<f64>,
    pub samples: usize,
    pub tol: f64,
    pub seed: u64,
    pub out: Option<String>,
    pub defect: Option<(DefectTarget, f64)>,
}

impl Plan {
    /// The space form parameter `c`, from `c` or `b`.
    pub fn c_value(&self) -> Option<f64> {
        self.c.or(self.b.map(|b| 4.0 * b - 3.0))
    }

    pub fn b_value(&self) -> Option<f64> {
        self.b.or(self.c.map(|c| (c + 3.0) / 4.0))
    }
}

fn parse_defect(s: &str) -> Result<(DefectTarget, f64), ConfigError> {
    let (name, factor) = s
        .split_once('=')
        .ok_or_else(|| invalid(format!("defect `{s}` must have the form tensor=factor")))?;
    let factor: f64 = factor
        .parse()
        .map_err(|_| invalid(format!("defect factor `{factor}` is not a number")))?;
    if !(factor.is_finite() && factor > 0.0) {
        return Err(invalid("defect factor must be positive"));
    }
    let target = if name == "map" {
        DefectTarget::Map
    } else {
        DefectTarget::Tensor(
            Tensor::ALL
                .into_iter()
                .find(|t| t.name() == name)
                .ok_or_else(|| invalid(format!("unknown defect tensor `{name}`")))?,
        )
    };
    Ok((target, factor))
}

impl RunConfig {
    pub fn new(suite: Suite, structure: StructureKind) -> RunConfig {
        RunConfig {
            suite,
            structure,
            n: None,
            c: None,
            b: None,
            a: None,
            k: None,
            cutoff: None,
            expected: None,
            samples: None,
            tol: None,
            seed: None,
            out: None,
            defect: None,
        }
    }

    /// Checks every precondition of the selected constructor and suite.
    pub fn validate(&self) -> Result<Plan, ConfigError> {
        use StructureKind as S;
        use Suite as U;
        let n = self.n.unwrap_or(1);
        if n < 1 {
            return Err(invalid(format!("--N must be >= 1, got {n}")));
        }
        let samples = self.samples.unwrap_or(100);
        if samples < 1 {
            return Err(invalid(format!("--samples must be >= 1, got {samples}")));
        }
        let seed = self.seed.unwrap_or(0);
        if seed < 0 {
            return Err(invalid(format!("--seed must be >= 0, got {seed}")));
        }
        let tol = self.tol.unwrap_or(self.suite.default_tolerance());
        if !(tol.is_finite() && tol > 0.0) {
            return Err(invalid(format!("--tol must be positive and finite, got {tol}")));
        }
        let k = self.k.unwrap_or(1);
        if !(1..=64).contains(&k) {
            return Err(invalid(format!("--k must be an integer in 1..=64, got {k}")));
        }
        if let Some(a) = self.a {
            if !(a.is_finite() && a > 0.0) {
                return Err(invalid(format!("--a must be positive, got {a}")));
            }
        }
        let cutoff = match self.cutoff {
            Some(d) if d < 1 => return Err(invalid(format!("--cutoff must be >= 1, got {d}"))),
            Some(d) => Some(d as usize),
            None => None,
        };
        for (name, v) in [("c", self.c), ("b", self.b), ("expected", self.expected)] {
            if v.is_some_and(|v| !v.is_finite()) {
                return Err(invalid(format!("--{name} must be finite")));
            }
        }
        if let (Some(c), Some(b)) = (self.c, self.b) {
            if (4.0 * b - (c + 3.0)).abs() > 1e-12 * (1.0 + c.abs()) {
                return Err(invalid(format!("--c {c} and --b {b} violate 4b = c + 3")));
            }
        }
        let defect = self.defect.as_deref().map(parse_defect).transpose()?;
        let plan = Plan {
            suite: self.suite,
            structure: self.structure,
            n: n as usize,
            c: self.c,
            b: self.b,
            a: self.a,
            k: k as u32,
            cutoff,
            expected: self.expected,
            samples: samples as usize,
            tol,
            seed: seed as u64,
            out: self.out.clone(),
            defect,
        };
        let family = plan.c_value().map(Family::of);
        match self.structure {
            S::Sphere => {
                if family.is_some_and(|f| f != Family::Elliptic) {
                    return Err(invalid("--structure sphere needs c > -3"));
                }
            }
            S::Heisenberg => {
                if family.is_some_and(|f| f != Family::Null) {
                    return Err(invalid("--structure heisenberg needs c = -3"));
                }
            }
            S::Hyperbolic => {
                if family != Some(Family::Hyperbolic) {
                    return Err(invalid("--structure hyperbolic needs --c < -3 or --b < 0"));
                }
            }
            S::BoothbyWang => {
                if plan.c.is_some() || plan.b.is_some() {
                    return Err(invalid("--structure boothby-wang takes --N and --k, not --c or --b"));
                }
            }
            S::Kahler => {
                if plan.a.is_some() {
                    return Err(invalid("--a applies to Sasakian structures, not --structure kahler"));
                }
            }
        }
        if self.structure != S::Kahler {
            SpaceFormSpec::from_c(plan.n, plan.c_value().unwrap_or(-3.0)).map_err(|e| invalid(e.to_string()))?;
        }
        let quadrature_dim = || {
            if plan.n > 2 {
                Err(invalid(format!("section quadrature supports --N 1 or 2, got {}", plan.n)))
            } else {
                Ok(())
            }
        };
        match (self.suite, self.structure) {
            (U::Rigidity, S::Hyperbolic) => {
                return Err(invalid("rigidity recovery for c < -3 is unsupported"));
            }
            (U::Rigidity, S::Kahler) => {
                return Err(invalid("rigidity runs on sphere, heisenberg or boothby-wang"));
            }
            (U::Immersion | U::Rigidity | U::Bergman, S::BoothbyWang) => quadrature_dim()?,
            (U::Immersion, S::Kahler) => {
                if plan.b_value().unwrap_or(0.0) > 0.0 {
                    return Err(invalid("immersions from --structure kahler need b <= 0"));
                }
                if plan.b_value().unwrap_or(0.0) == 0.0 && plan.n != 1 {
                    return Err(invalid("the Segal-Bargmann immersion is for --N 1"));
                }
            }
            (U::Bergman, S::Kahler) => {
                if plan.b_value().unwrap_or(0.0) != 0.0 || plan.n != 1 {
                    return Err(invalid("bergman on --structure kahler is the flat Segal-Bargmann model: --N 1, --b 0"));
                }
            }
            (U::Bergman, _) => return Err(invalid("bergman runs on boothby-wang or kahler")),
            (U::CalabiSweep, S::Kahler) => {
                if !(plan.b_value().unwrap_or(-1.0) < 0.0) {
                    return Err(invalid("calabi-sweep needs b < 0"));
                }
            }
            (U::CalabiSweep, _) => return Err(invalid("calabi-sweep runs on --structure kahler")),
            _ => {}
        }
        if matches!(plan.defect, Some((DefectTarget::Map, _))) && self.suite != U::Immersion {
            return Err(invalid("a map defect applies to the immersion suite only"));
        }
        if matches!(plan.defect, Some((DefectTarget::Tensor(_), _)))
            && (!matches!(self.suite, U::Axioms | U::Curvature) || self.structure == S::Kahler)
        {
            return Err(invalid("tensor defects apply to axioms or curvature on Sasakian structures"));
        }
        Ok(plan)
    }
}

/// Parses a JSON-lines batch; blank lines are skipped.
pub fn parse_batch(text: &str) -> Result<Vec<RunConfig>, ConfigError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| ConfigError::Parse {
                line: i + 1,
                message: e.to_string(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_dimension_names_the_precondition() {
        let mut c = RunConfig::new(Suite::Axioms, StructureKind::Sphere);
        c.n = Some(0);
        assert_eq!(c.validate().unwrap_err().to_string(), "--N must be >= 1, got 0");
    }

    #[test]
    fn hyperbolic_needs_negative_curvature() {
        let mut c = RunConfig::new(Suite::Curvature, StructureKind::Hyperbolic);
        assert!(c.validate().is_err());
        c.c = Some(-7.0);
        let p = c.validate().unwrap();
        assert_eq!(p.b_value(), Some(-1.0));
        c.b = Some(0.5);
        assert!(c.validate().is_err());
    }

    #[test]
    fn batch_lines_parse() {
        let text = "{\"suite\":\"axioms\",\"structure\":\"sphere\",\"N\":2}\n\n{\"suite\":\"calabi-sweep\",\"structure\":\"kahler\",\"b\":-1}\n";
        let b = parse_batch(text).unwrap();
        assert_eq!(b.len(), 2);
        assert_eq!(b[0].n, Some(2));
        assert_eq!(b[1].suite, Suite::CalabiSweep);
        assert!(matches!(parse_batch("{\"suite\":1}"), Err(ConfigError::Parse { line: 1, .. })));
    }

    #[test]
    fn defects_parse() {
        let mut c = RunConfig::new(Suite::Axioms, StructureKind::Heisenberg);
        c.defect = Some("g_transverse=1.01".into());
        assert_eq!(c.validate().unwrap().defect, Some((DefectTarget::Tensor(Tensor::TransverseMetric), 1.01)));
        c.defect = Some("nope=2".into());
        assert!(c.validate().is_err());
    }
}
