//! Plane-wave modes on the spatially periodic box and the wave functions
//! synthesized from them.
//!
//! Every mode is `ψ_k(x) = a_k · w_k · exp(i(p¹x¹ − p⁰x⁰))` with `p¹ = 2πn/L`,
//! `p⁰ = ±√((p¹)² + m²)` and `a_k = |V|^(−1/2)`, so each mode has unit
//! spacetime norm on `V`.

mod evolve;
mod gauge;
mod mode;
mod wave;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::Minkowski;
use crate::scalar::Real;

pub use evolve::{dirac_residual, fd_evolve_klein_gordon, InitialData};
pub use gauge::{gauge_transform, sample_scalar_field, FourVectorField};
pub use mode::{
    electron_spinor, evaluate_mode, make_electron_mode, make_mode, synthesize, Mode, ModeSet,
};
pub use wave::WaveFunction;

/// Free particle species, each with its component space `U`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ParticleKind<T> {
    /// Neutral scalar boson, one real component.
    RealScalar { mass: T },
    /// Charged scalar boson, one complex component.
    ComplexScalar { mass: T },
    /// Massive vector boson: rest-frame spatial components `(u¹, u², u³)`.
    MassiveVector { mass: T },
    /// Photon in the transverse calibration: components `(u², u³)`.
    Photon,
    /// Two-component spinor of the 1+1D Dirac field.
    Electron { mass: T },
}

impl<T: Real> ParticleKind<T> {
    pub fn mass(&self) -> T {
        match *self {
            Self::RealScalar { mass }
            | Self::ComplexScalar { mass }
            | Self::MassiveVector { mass }
            | Self::Electron { mass } => mass,
            Self::Photon => T::zero(),
        }
    }

    /// Dimension `m` of the component space.
    pub fn components(&self) -> usize {
        match self {
            Self::RealScalar { .. } | Self::ComplexScalar { .. } => 1,
            Self::MassiveVector { .. } => 3,
            Self::Photon | Self::Electron { .. } => 2,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::RealScalar { .. } => "real-scalar",
            Self::ComplexScalar { .. } => "complex-scalar",
            Self::MassiveVector { .. } => "massive-vector",
            Self::Photon => "photon",
            Self::Electron { .. } => "electron",
        }
    }

    pub fn is_scalar(&self) -> bool {
        matches!(self, Self::RealScalar { .. } | Self::ComplexScalar { .. })
    }

    pub fn validate(&self) -> Result<()> {
        let mass = self.mass();
        let ok = match self {
            Self::RealScalar { .. } | Self::ComplexScalar { .. } => mass >= T::zero(),
            Self::MassiveVector { .. } | Self::Electron { .. } => mass > T::zero(),
            Self::Photon => true,
        };
        if ok && mass.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidMass {
                kind: self.name(),
                mass: mass.as_f64(),
            })
        }
    }
}

/// Sign of `p⁰`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FrequencySign {
    #[serde(rename = "+")]
    Positive,
    #[serde(rename = "-")]
    Negative,
}

impl FrequencySign {
    pub fn value<T: Real>(self) -> T {
        match self {
            Self::Positive => T::one(),
            Self::Negative => -T::one(),
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Self::Positive => '+',
            Self::Negative => '-',
        }
    }
}

/// Four-momentum `(p⁰, p¹)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FourMomentum<T> {
    pub energy: T,
    pub momentum: T,
}

impl<T: Real> FourMomentum<T> {
    pub fn new(energy: T, momentum: T) -> Self {
        Self { energy, momentum }
    }

    /// On-shell momentum for spatial wave number `2πn/L`.
    pub fn on_shell(n: i64, sign: FrequencySign, mass: T, space_extent: T) -> Self {
        let p1 = T::lit(2.0) * T::PI() * T::from_index(n) / space_extent;
        let p0 = sign.value::<T>() * (p1 * p1 + mass * mass).sqrt();
        Self::new(p0, p1)
    }

    /// `p·p = (p¹)² − (p⁰)²`.
    pub fn square(&self) -> T {
        Minkowski::momentum_square(self.energy, self.momentum)
    }

    /// `|p·p + m²|`.
    pub fn shell_residual(&self, mass: T) -> T {
        (self.square() + mass * mass).abs()
    }
}
