//! Spacetime probability densities of free relativistic particles on a
//! 1+1-dimensional box.
//!
//! A single particle is described by a wave function `ψ` on the spacetime
//! bar `V = (0, cT) × (0, L)`, normalized in `H(V)`. Its density
//! `g(x) = ψ²(x)` gives the probability of the particle appearing at event
//! `x`. Around that object the crate provides:
//!
//! - [`lattice`]: the box, its uniform cells and cell-aligned regions.
//! - [`fields`]: on-shell plane-wave modes and grid wave functions.
//! - [`density`]: `g`, its marginals, conditionals and region probabilities.
//! - [`lorentz`]: boosts and invariance checks.
//! - [`momentum`]: mode decomposition and occupation numbers `n_k = |C_k|²`.
//! - [`fock`]: truncated Fock spaces and region-count operators `Λ(Q)`.
//! - [`sampling`]: simulated observation sessions and goodness of fit.
//! - [`uncertainty`]: coordinate and momentum spreads.
//!
//! All modules are generic over the scalar type ([`Real`]); the aliases at the
//! crate root fix it to `f64`. Natural units `ħ = c = 1` are used throughout.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod density;
pub mod error;
pub mod fields;
pub mod fock;
pub mod lattice;
pub mod lorentz;
pub mod momentum;
pub mod numeric;
pub mod sampling;
pub mod scalar;
pub mod uncertainty;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Event64 = lattice::Event<f64>;
pub type SpacetimeBox64 = lattice::SpacetimeBox<f64>;
pub type UniformGrid64 = lattice::UniformGrid<f64>;
pub type ParticleKind64 = fields::ParticleKind<f64>;
pub type FourMomentum64 = fields::FourMomentum<f64>;
pub type Mode64 = fields::Mode<f64>;
pub type ModeSet64 = fields::ModeSet<f64>;
pub type WaveFunction64 = fields::WaveFunction<f64>;
pub type SpacetimeDensity64 = density::SpacetimeDensity<f64>;
pub type Boost64 = lorentz::Boost<f64>;
pub type ModeCoefficients64 = momentum::ModeCoefficients<f64>;
pub type MomentumSpectrum64 = momentum::MomentumSpectrum<f64>;
pub type OccupationBasis64 = fock::OccupationBasis<f64>;
pub type FockState64 = fock::FockState<f64>;
pub type OneBodyOperator64 = fock::OneBodyOperator<f64>;
pub type EventSample64 = sampling::EventSample<f64>;
pub type MomentReport64 = uncertainty::MomentReport<f64>;
