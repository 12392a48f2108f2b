//! Relaxation dynamics of the relativistic BGK model for massless
//! particles in a spatially flat FLRW background.
//!
//! In covariant momentum variables `v = R²(t) p` the kinetic equation for an
//! isotropic, homogeneous distribution reduces to `∂ₜF = J(F) - F`, where the
//! Jüttner equilibrium `J(F)` depends on `F` only through its number and
//! energy moments. The crate provides
//!
//! - [`quadrature`]: radial grids and moment integrals,
//! - [`equilibrium`]: Maxwell-Boltzmann and Bose-Einstein equilibria,
//! - [`dynamics`]: time stepping, the explicit relaxation solution and the
//!   iteration scheme for the Bose-Einstein case,
//! - [`cosmology`]: the scale factor, characteristics and physical moments,
//! - [`verify`]: the end-to-end check suite behind `flrw-bgk verify`.

pub mod cosmology;
pub mod dynamics;
pub mod equilibrium;
pub mod error;
pub mod initial;
pub mod quadrature;
pub mod roots;
pub mod series;
pub mod sweep;
pub mod verify;

pub use equilibrium::{EquilibriumParams, Statistics};
pub use error::{Error, Result};
pub use quadrature::{DistributionState, MomentPair, RadialGrid, RuleKind};
pub use series::SeriesTolerance;
