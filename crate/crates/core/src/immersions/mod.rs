//! Explicit immersions and embeddings of the model structures.

mod kodaira;
mod maps;
mod multi_index;
mod quadrature;
mod sections;

pub use kodaira::{
    kodaira_cone_map, kodaira_cr_embedding, segal_bargmann_immersion, segal_bargmann_tail, tau_ratio, KodairaEmbedding,
    SegalBargmann,
};
pub use maps::{
    calabi_coefficient, calabi_map, calabi_tail_bound, cone_radius_chart, linear_inclusion, product_immersion_null,
    CalabiMap, NullProductImmersion,
};
pub use multi_index::{count, degree, graded_indices, ln_factorial, ln_multi_factorial, monomial, MultiIndexBasis};
pub use quadrature::{gauss_legendre, gauss_legendre_on, Node, Quadrature};
pub use sections::{
    bergman_kernel, bergman_variation, integrate_volume, orthonormalize_sections, rescale, section_density,
    BasisState, SectionBasis,
};
