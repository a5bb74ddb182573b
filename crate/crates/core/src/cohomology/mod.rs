//! Integer linear algebra and group cohomology of Picard lattices.

mod catalog;
mod groups;
mod matrix;

pub use catalog::{
    catalog_entry, l5_bar, order_four_family, picard_action_catalog, Generator, LatticeAction,
    CATALOG_KEYS,
};
pub use groups::{
    cokernel, h1_bicyclic, h1_cyclic, h1_finite_group, h2_cyclic, homology, BicyclicComplex,
    CohomologyGroup, FiniteGroupAction, MAX_GROUP_ORDER,
};
pub use matrix::{smith_normal_form, Mat, Smith};
