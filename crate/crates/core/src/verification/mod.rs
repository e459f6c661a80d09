//! Residual suites for structures, curvature and maps.

mod axioms;
mod defect;
mod immersion;
mod phi_curvature;
mod report;
mod rigidity;

pub use axioms::{axiom_residuals, axiom_suite, kahler_suite, AXIOMS, KAHLER_IDENTITIES};
pub use defect::{scale_image, with_defect, Tensor};
pub use immersion::{immersion_residuals, immersion_suite, immersion_suite_points};
pub use phi_curvature::{curvature_suite, holomorphic_curvature_suite, phi_section, PhiSection};
pub use report::{evaluate, sample_rng, ReportBuilder, ResidualStat, ResidualTable, SampleRow, VerificationReport};
pub use rigidity::{random_unitary, recover_rigid_transform, RigidKind, RigidTransform};
