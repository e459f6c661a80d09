//! Model structures: complex space forms `F(N, b)`, the three families of
//! Sasakian space forms `M(N, c)` and Boothby–Wang presentations.

mod bundle;
mod contact;
mod kahler;
mod spec;
mod sphere;

pub use bundle::{boothby_wang_sphere_presentation, bundle_chart_to_sphere, Decay, LineBundleModel, Profile};
pub use contact::{
    heisenberg_structure, horizontal_lift_structure, hyperbolic_primitive, hyperbolic_structure,
    ContactMetricStructure, Transverse,
};
pub use kahler::{ball_radius, kahler_space_form, KahlerStructure};
pub(crate) use kahler::constant_matrix_jets;
pub use spec::{Family, SpaceFormSpec};
pub use sphere::{
    sphere_point, sphere_point_values, sphere_structure, stereographic, stereographic_values,
};

use crate::error::Result;
use crate::transforms::{d_homothety, HomothetyRatio};

/// `M(N, c)` for any real `c`: `D_a`-homothetic sphere with `a = 4/(c+3)`
/// for `c > −3`, Heisenberg for `c = −3`, ball model for `c < −3`.
pub fn sasakian_space_form(spec: SpaceFormSpec) -> Result<ContactMetricStructure> {
    match spec.family() {
        Family::Elliptic => {
            let s = sphere_structure(spec.n())?;
            if spec.c() == 1.0 {
                return Ok(s);
            }
            let a = HomothetyRatio::new(4.0 / (spec.c() + 3.0))?;
            Ok(d_homothety(&s, a)?.with_label(format!("M({},{})", spec.n(), spec.c())))
        }
        Family::Null => heisenberg_structure(spec.n()),
        Family::Hyperbolic => hyperbolic_structure(spec.n(), spec.c()),
    }
}
