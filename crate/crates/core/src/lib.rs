//! Coisotropic Maslov indices and extrinsic geometry of coisotropic
//! hypersurfaces in flat `C^n`.
//!
//! Everything is generic over the scalar type ([`Real`], implemented for `f32`
//! and `f64`); the aliases at the crate root fix `f64`.

pub mod error;
pub mod families;
pub mod grassmann;
pub mod hypergeo;
pub mod linalg;
pub mod maslov;
pub mod oracle;
pub mod rng;
pub mod scalar;
pub mod symplin;
pub mod tolerance;

pub use error::{Error, Result};
pub use scalar::Real;
pub use tolerance::Tolerances;

pub type SymplecticSpace = symplin::SymplecticSpace<f64>;
pub type Subspace = symplin::Subspace<f64>;
pub type CoisotropicSubspace = symplin::CoisotropicSubspace<f64>;
pub type AdaptedFrame = symplin::AdaptedFrame<f64>;
pub type CoisotropicLoop = grassmann::CoisotropicLoop<f64>;
pub type SymplecticMatrixLoop = grassmann::SymplecticMatrixLoop<f64>;
pub type MaslovSection = maslov::MaslovSection<f64>;
pub type LevelSetHypersurface = hypergeo::LevelSetHypersurface<f64>;
pub type SffBlocks = hypergeo::SffBlocks<f64>;
pub type TransverseCurvature = hypergeo::TransverseCurvature<f64>;
