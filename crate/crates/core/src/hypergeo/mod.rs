//! Extrinsic geometry of real hypersurfaces `Y = {ρ = 1}` in flat `C^n`, and of
//! products of Lagrangian graphs with `C^m`.
//!
//! Frames along `Y` put the characteristic direction `X_ρ = Jν` last, so the
//! normal `f_n = J X_ρ` is `−ν`. Second fundamental form coefficients are taken
//! along `f_n`; on the unit sphere they equal `+⟨v,w⟩`.

mod curvature;
mod leaf;
mod polynomial;
mod product;
mod sff;
mod surface;

pub use curvature::{
    is_integrable_prekahler, levi_form, transverse_curvature_bracket, transverse_curvature_from_blocks,
    transverse_curvature_sff, Extension, Integrability, LeviForm, TransverseCurvature,
};
pub use leaf::{leaf_minimality, LeafMinimality};
pub use polynomial::{Polynomial, MAX_DEGREE};
pub use product::LagrangianGraphProduct;
pub use sff::{
    leafwise_mean_curvature, leafwise_mean_curvature_from_blocks, second_fundamental_form, second_fundamental_form_at,
    sff_vector, LeafwiseMeanCurvature, SffBlock, SffBlocks,
};
pub use surface::{
    complex_ellipsoid, cylinder, ellipsoid, hyperplane, polynomial, sphere, tangent_splitting, LevelSetHypersurface,
    MatrixField, PointSampler, ScalarField, TangentSplitting, VectorField,
};
