//! Model Sasakian and Kähler space forms in explicit charts, structure
//! transforms, explicit immersions and numerical verification suites.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod chart;
pub mod complex;
pub mod curvature;
pub mod error;
pub mod field;
pub mod immersions;
pub mod jet;
pub mod map;
pub mod space_forms;
pub mod transforms;
pub mod verification;

pub use chart::{Chart, SampleBlock};
pub use error::{GeometryError, Result};
pub use field::{
    jet_eval, EndomorphismField, Field, FieldKind, Jet2, MetricField, OneForm, ScalarField, TwoForm,
    VectorField,
};
pub use jet::Jet;
pub use map::{pullback_form, pullback_metric, pushforward_vector, ConeLift, FormRef, FormValue, SmoothMap};
