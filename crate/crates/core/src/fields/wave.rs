use num_complex::Complex;

use super::ParticleKind;
use crate::error::{Error, Result};
use crate::lattice::{CellIndex, UniformGrid};
use crate::numeric::{self, NeumaierSum};
use crate::scalar::Real;

/// `m`-component complex field sampled at the cell centers of a grid,
/// viewed as an element of `H(V)`.
#[derive(Clone, Debug, PartialEq)]
pub struct WaveFunction<T> {
    grid: UniformGrid<T>,
    kind: ParticleKind<T>,
    values: Vec<Complex<T>>,
}

impl<T: Real> WaveFunction<T> {
    /// `values` holds `m` components per cell in flat cell order.
    pub fn from_values(
        grid: UniformGrid<T>,
        kind: ParticleKind<T>,
        values: Vec<Complex<T>>,
    ) -> Result<Self> {
        let expected = grid.n_cells() * kind.components();
        if values.len() != expected {
            return Err(Error::GridMismatch(format!(
                "{} values for {} cells × {} components",
                values.len(),
                grid.n_cells(),
                kind.components()
            )));
        }
        Ok(Self { grid, kind, values })
    }

    pub fn zeros(grid: UniformGrid<T>, kind: ParticleKind<T>) -> Self {
        let values = vec![Complex::new(T::zero(), T::zero()); grid.n_cells() * kind.components()];
        Self { grid, kind, values }
    }

    /// Samples `f(center)` on every cell.
    pub fn from_fn(
        grid: UniformGrid<T>,
        kind: ParticleKind<T>,
        mut f: impl FnMut(crate::lattice::Event<T>) -> Vec<Complex<T>>,
    ) -> Result<Self> {
        let mut values = Vec::with_capacity(grid.n_cells() * kind.components());
        for cell in grid.cells() {
            values.extend(f(grid.cell_center(cell)));
        }
        Self::from_values(grid, kind, values)
    }

    pub fn grid(&self) -> &UniformGrid<T> {
        &self.grid
    }

    pub fn kind(&self) -> ParticleKind<T> {
        self.kind
    }

    pub fn components(&self) -> usize {
        self.kind.components()
    }

    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    pub fn value(&self, cell: CellIndex) -> &[Complex<T>] {
        let m = self.components();
        let k = self.grid.flat(cell) * m;
        &self.values[k..k + m]
    }

    /// Components of the cell with flat index `flat`.
    pub fn value_flat(&self, flat: usize) -> &[Complex<T>] {
        let m = self.components();
        &self.values[flat * m..(flat + 1) * m]
    }

    /// `Σ_α |ψ^α(ξ)|²` for every cell in flat order.
    pub fn cell_moduli(&self) -> Vec<T> {
        self.values
            .chunks(self.components())
            .map(numeric::norm_sqr)
            .collect()
    }

    /// `‖ψ‖² = Σ_ξ |ψ(ξ)|² w(ξ)`.
    pub fn norm_sqr(&self) -> T {
        numeric::norm_sqr(&self.values) * self.grid.cell_volume()
    }

    /// Spacetime norm `‖ψ‖` in `H(V)`.
    pub fn norm_spacetime(&self) -> T {
        self.norm_sqr().sqrt()
    }

    /// `(ψ₁, ψ₂) = Σ_ξ ψ₁*(ξ)·ψ₂(ξ) w(ξ)`, antilinear in the first slot.
    pub fn inner_product(&self, other: &Self) -> Result<Complex<T>> {
        self.check_compatible(other)?;
        Ok(numeric::dot_conj(&self.values, &other.values) * self.grid.cell_volume())
    }

    pub fn check_compatible(&self, other: &Self) -> Result<()> {
        if !self.grid.same_shape(&other.grid) {
            return Err(Error::GridMismatch("wave functions on different grids".into()));
        }
        if self.components() != other.components() {
            return Err(Error::KindMismatch);
        }
        Ok(())
    }

    pub fn scaled(&self, factor: Complex<T>) -> Self {
        Self {
            grid: self.grid,
            kind: self.kind,
            values: self.values.iter().map(|v| v * factor).collect(),
        }
    }

    /// Rescales to `‖ψ‖ = 1`.
    pub fn normalize(&self) -> Result<Self> {
        let n = self.norm_spacetime();
        if !(n > T::zero()) || !n.is_finite() {
            return Err(Error::Degenerate("cannot normalize a zero field".into()));
        }
        Ok(self.scaled(Complex::new(n.recip(), T::zero())))
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - T::one()).abs() <= T::check_tolerance()
    }

    /// Fixed-time squared norm `Σ_ix |ψ(it, ix)|² Δx¹`.
    pub fn norm_spatial(&self, it: usize) -> Result<T> {
        let len = self.grid.n_time();
        if it >= len {
            return Err(Error::TimeIndexOutOfBounds { index: it, len });
        }
        let m = self.components();
        let row = self.grid.n_space() * m;
        let slice = &self.values[it * row..(it + 1) * row];
        Ok(numeric::norm_sqr(slice) * self.grid.dx())
    }

    /// Time slice `it` as a flat `n_space × m` array.
    pub fn time_slice(&self, it: usize) -> Result<&[Complex<T>]> {
        let len = self.grid.n_time();
        if it >= len {
            return Err(Error::TimeIndexOutOfBounds { index: it, len });
        }
        let row = self.grid.n_space() * self.components();
        Ok(&self.values[it * row..(it + 1) * row])
    }

    /// `max_ξ |ψ₁(ξ) − ψ₂(ξ)|` over all components.
    pub fn max_abs_diff(&self, other: &Self) -> Result<T> {
        self.check_compatible(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(T::zero(), T::max))
    }

    /// `‖ψ₁ − ψ₂‖` in `H(V)`.
    pub fn distance(&self, other: &Self) -> Result<T> {
        self.check_compatible(other)?;
        let mut acc = NeumaierSum::new();
        for (a, b) in self.values.iter().zip(&other.values) {
            acc.add((a - b).norm_sqr());
        }
        Ok((acc.value() * self.grid.cell_volume()).sqrt())
    }
}
