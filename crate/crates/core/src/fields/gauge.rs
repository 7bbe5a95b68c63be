use num_complex::Complex;

use super::{ParticleKind, WaveFunction};
use crate::error::{Error, Result};
use crate::lattice::{Event, UniformGrid};
use crate::scalar::Real;

/// Four-vector field `(u⁰, u¹, u², u³)` on a grid. Used to embed a photon in
/// the full vector space so gauge changes and boosts can be applied.
#[derive(Clone, Debug, PartialEq)]
pub struct FourVectorField<T> {
    grid: UniformGrid<T>,
    values: Vec<[Complex<T>; 4]>,
}

impl<T: Real> FourVectorField<T> {
    pub fn from_values(grid: UniformGrid<T>, values: Vec<[Complex<T>; 4]>) -> Result<Self> {
        if values.len() != grid.n_cells() {
            return Err(Error::GridMismatch(format!(
                "{} four-vectors for {} cells",
                values.len(),
                grid.n_cells()
            )));
        }
        Ok(Self { grid, values })
    }

    /// Embeds a transverse photon field as `(0, 0, u², u³)`.
    pub fn from_photon(psi: &WaveFunction<T>) -> Result<Self> {
        if !matches!(psi.kind(), ParticleKind::Photon) {
            return Err(Error::UnsupportedKind("four-vector embedding expects a photon"));
        }
        let zero = Complex::new(T::zero(), T::zero());
        let values = psi
            .values()
            .chunks(2)
            .map(|u| [zero, zero, u[0], u[1]])
            .collect();
        Ok(Self {
            grid: *psi.grid(),
            values,
        })
    }

    pub fn grid(&self) -> &UniformGrid<T> {
        &self.grid
    }

    pub fn values(&self) -> &[[Complex<T>; 4]] {
        &self.values
    }

    /// Pointwise Minkowski square `|u¹|² + |u²|² + |u³|² − |u⁰|²`.
    pub fn density(&self) -> Vec<T> {
        self.values.iter().map(|u| minkowski_square(u)).collect()
    }

    /// `max_ξ max(|u⁰|, |u¹|)`: zero exactly when the transverse calibration
    /// holds.
    pub fn calibration_residual(&self) -> T {
        self.values
            .iter()
            .map(|u| u[0].norm().max(u[1].norm()))
            .fold(T::zero(), T::max)
    }

    /// Applies `f` to every four-vector.
    pub fn map(&self, f: impl Fn(&[Complex<T>; 4]) -> [Complex<T>; 4]) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(f).collect(),
        }
    }
}

pub(crate) fn minkowski_square<T: Real>(u: &[Complex<T>; 4]) -> T {
    u[1].norm_sqr() + u[2].norm_sqr() + u[3].norm_sqr() - u[0].norm_sqr()
}

/// Samples a real scalar function at every cell center, in flat order.
pub fn sample_scalar_field<T: Real>(grid: &UniformGrid<T>, f: impl Fn(Event<T>) -> T) -> Vec<T> {
    grid.cells().map(|c| f(grid.cell_center(c))).collect()
}

/// Gauge change `u^α → u^α + ∂^α χ` of an embedded photon field.
///
/// Indices are raised with `diag(−1, +1)`, so `u⁰` shifts by `−∂₀χ`.
/// Derivatives are second-order central differences, one-sided at the box
/// edges, so linear `χ` is differentiated exactly. The result generally
/// leaves the transverse calibration.
pub fn gauge_transform<T: Real>(psi: &WaveFunction<T>, chi: &[T]) -> Result<FourVectorField<T>> {
    let grid = *psi.grid();
    if chi.len() != grid.n_cells() {
        return Err(Error::GridMismatch(format!(
            "gauge function has {} samples for {} cells",
            chi.len(),
            grid.n_cells()
        )));
    }
    let field = FourVectorField::from_photon(psi)?;
    let (nt, nx) = (grid.n_time(), grid.n_space());
    let at = |it: usize, ix: usize| chi[it * nx + ix];
    let mut values = field.values;
    for it in 0..nt {
        for ix in 0..nx {
            let d0 = derivative(|k| at(k, ix), it, nt, grid.dt());
            let d1 = derivative(|k| at(it, k), ix, nx, grid.dx());
            let u = &mut values[it * nx + ix];
            u[0] -= Complex::new(d0, T::zero());
            u[1] += Complex::new(d1, T::zero());
        }
    }
    Ok(FourVectorField { grid, values })
}

fn derivative<T: Real>(f: impl Fn(usize) -> T, k: usize, n: usize, h: T) -> T {
    let two = T::lit(2.0);
    if n < 3 {
        return (f(1) - f(0)) / h;
    }
    if k == 0 {
        (-T::lit(3.0) * f(0) + T::lit(4.0) * f(1) - f(2)) / (two * h)
    } else if k == n - 1 {
        (T::lit(3.0) * f(n - 1) - T::lit(4.0) * f(n - 2) + f(n - 3)) / (two * h)
    } else {
        (f(k + 1) - f(k - 1)) / (two * h)
    }
}
