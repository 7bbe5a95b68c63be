//! The spacetime density `g(x) = ψ²(x)`, its marginals and region
//! probabilities.
//!
//! All integrals are midpoint sums over cell centers. A density built from an
//! unnormalized wave function keeps its scale and carries
//! `normalized = false`; ratios of region sums stay meaningful for it.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fields::{ParticleKind, WaveFunction};
use crate::lattice::{CellIndex, Region, UniformGrid};
use crate::numeric;
use crate::scalar::Real;

/// Nonnegative density on the cells of a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct SpacetimeDensity<T> {
    grid: UniformGrid<T>,
    values: Vec<T>,
    normalized: bool,
}

/// `g(ξ) = Σ_α |ψ^α(ξ)|²`.
///
/// For the massive vector boson this is `u²` with `u⁰ = 0` in the rest
/// frame, for the photon `(u²)² + (u³)²`, for the electron `Σ_α |u^α|²`.
pub fn density<T: Real>(psi: &WaveFunction<T>) -> SpacetimeDensity<T> {
    let values = psi.cell_moduli();
    SpacetimeDensity::build(*psi.grid(), values)
}

impl<T: Real> SpacetimeDensity<T> {
    fn build(grid: UniformGrid<T>, values: Vec<T>) -> Self {
        let total = numeric::sum(values.iter().copied()) * grid.cell_volume();
        let normalized = (total - T::one()).abs() <= T::check_tolerance();
        Self {
            grid,
            values,
            normalized,
        }
    }

    /// Density from explicit cell values (flat order); rejects negative or
    /// non-finite entries.
    pub fn from_values(grid: UniformGrid<T>, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.n_cells() {
            return Err(Error::GridMismatch(format!(
                "{} density values for {} cells",
                values.len(),
                grid.n_cells()
            )));
        }
        if values.iter().any(|v| !(*v >= T::zero()) || !v.is_finite()) {
            return Err(Error::InvalidArgument("density values must be finite and nonnegative".into()));
        }
        Ok(Self::build(grid, values))
    }

    pub fn grid(&self) -> &UniformGrid<T> {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn value(&self, cell: CellIndex) -> T {
        self.values[self.grid.flat(cell)]
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// `Σ_ξ g(ξ) w(ξ)`.
    pub fn total(&self) -> T {
        numeric::sum(self.values.iter().copied()) * self.grid.cell_volume()
    }

    /// Copy rescaled to unit total.
    pub fn normalize(&self) -> Result<Self> {
        let total = self.total();
        if !(total > T::zero()) {
            return Err(Error::Degenerate("density integrates to zero".into()));
        }
        Ok(Self::build(
            self.grid,
            self.values.iter().map(|v| *v / total).collect(),
        ))
    }

    fn require_normalized(&self) -> Result<()> {
        if self.normalized {
            Ok(())
        } else {
            Err(Error::NotNormalized {
                norm_sqr: self.total().as_f64(),
            })
        }
    }

    fn row(&self, it: usize) -> &[T] {
        let nx = self.grid.n_space();
        &self.values[it * nx..(it + 1) * nx]
    }

    /// `Σ_{ξ∈Q} g(ξ) w(ξ)` without any normalization check.
    pub fn region_sum(&self, region: &Region) -> Result<T> {
        if !region.fits(&self.grid) {
            return Err(Error::GridMismatch("region built for another grid shape".into()));
        }
        Ok(numeric::sum(region.iter().map(|c| self.value(c))) * self.grid.cell_volume())
    }
}

/// Which coordinate a [`Marginal`] is a density of.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    Temporal,
    Spatial,
}

/// One-dimensional density on the bins of one axis.
#[derive(Clone, Debug, PartialEq)]
pub struct Marginal<T> {
    pub axis: Axis,
    pub bin_width: T,
    pub values: Vec<T>,
}

impl<T: Real> Marginal<T> {
    /// `Σ_b value(b) · bin_width`.
    pub fn total(&self) -> T {
        numeric::sum(self.values.iter().copied()) * self.bin_width
    }
}

/// `g₁(x¹) = ∫ g dx⁰`.
pub fn marginal_spatial<T: Real>(g: &SpacetimeDensity<T>) -> Result<Marginal<T>> {
    g.require_normalized()?;
    let grid = &g.grid;
    let values = (0..grid.n_space())
        .map(|ix| numeric::sum((0..grid.n_time()).map(|it| g.value(CellIndex::new(it, ix)))) * grid.dt())
        .collect();
    Ok(Marginal {
        axis: Axis::Spatial,
        bin_width: grid.dx(),
        values,
    })
}

/// `g₀(x⁰) = ∫ g dx¹`.
pub fn marginal_temporal<T: Real>(g: &SpacetimeDensity<T>) -> Result<Marginal<T>> {
    g.require_normalized()?;
    Ok(Marginal {
        axis: Axis::Temporal,
        bin_width: g.grid.dt(),
        values: temporal_sums(g),
    })
}

fn temporal_sums<T: Real>(g: &SpacetimeDensity<T>) -> Vec<T> {
    (0..g.grid.n_time())
        .map(|it| numeric::sum(g.row(it).iter().copied()) * g.grid.dx())
        .collect()
}

/// `g₁(x¹ | x⁰) = g(x) / g₀(x⁰)` on time row `it`.
pub fn conditional_spatial<T: Real>(g: &SpacetimeDensity<T>, it: usize) -> Result<Marginal<T>> {
    let len = g.grid.n_time();
    if it >= len {
        return Err(Error::TimeIndexOutOfBounds { index: it, len });
    }
    g.require_normalized()?;
    let row = g.row(it);
    let g0 = numeric::sum(row.iter().copied()) * g.grid.dx();
    if !(g0 > T::zero()) {
        return Err(Error::Degenerate(format!("temporal marginal vanishes at time index {it}")));
    }
    Ok(Marginal {
        axis: Axis::Spatial,
        bin_width: g.grid.dx(),
        values: row.iter().map(|v| *v / g0).collect(),
    })
}

/// `P(Q) = Σ_{ξ∈Q} g(ξ) w(ξ)`.
pub fn region_probability<T: Real>(g: &SpacetimeDensity<T>, region: &Region) -> Result<T> {
    g.region_sum(region)
}

/// `P(Q₁) / P(Q₂)` from region sums of a possibly unnormalized density.
pub fn relative_probability<T: Real>(
    g: &SpacetimeDensity<T>,
    numerator: &Region,
    denominator: &Region,
) -> Result<T> {
    let den = g.region_sum(denominator)?;
    if !(den > T::zero()) {
        return Err(Error::Degenerate("denominator region has zero weight".into()));
    }
    Ok(g.region_sum(numerator)? / den)
}

/// Outcome of [`electron_temporal_check`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ElectronTemporalReport<T> {
    /// `1 / cT`.
    pub expected_g0: T,
    pub min_g0: T,
    pub max_g0: T,
    /// `max_t |g₀(t) − 1/cT| · cT`.
    pub max_relative_deviation: T,
    /// `max_t |‖u(t,·)‖² − 1|` for `u = (cT)^{1/2} ψ`.
    pub max_slice_norm_deviation: T,
    /// `‖(cT)^{−1/2} u‖²` rebuilt from the slice norms of `u`.
    pub rescaled_norm_sqr: T,
}

/// Checks that an electron state spends time uniformly: `g₀(x⁰) = 1/cT`,
/// and that `ψ = (cT)^{−1/2} u` with `‖u(t,·)‖ = 1` has unit spacetime norm.
pub fn electron_temporal_check<T: Real>(psi: &WaveFunction<T>) -> Result<ElectronTemporalReport<T>> {
    if !matches!(psi.kind(), ParticleKind::Electron { .. }) {
        return Err(Error::UnsupportedKind("temporal law applies to the electron"));
    }
    let g = density(psi);
    g.require_normalized()?;
    let ct = psi.grid().bounds().time_extent();
    let expected = ct.recip();
    let g0 = temporal_sums(&g);
    let min = g0.iter().copied().fold(T::infinity(), T::min);
    let max = g0.iter().copied().fold(T::neg_infinity(), T::max);
    let dev = g0
        .iter()
        .map(|v| (*v - expected).abs() * ct)
        .fold(T::zero(), T::max);
    // ‖u(t,·)‖² = cT · ‖ψ(t,·)‖².
    let slice_norms: Vec<T> = (0..psi.grid().n_time())
        .map(|it| psi.norm_spatial(it).map(|n| n * ct))
        .collect::<Result<_>>()?;
    let slice_dev = slice_norms
        .iter()
        .map(|n| (*n - T::one()).abs())
        .fold(T::zero(), T::max);
    let rescaled = numeric::sum(slice_norms.iter().copied()) * psi.grid().dt() / ct;
    Ok(ElectronTemporalReport {
        expected_g0: expected,
        min_g0: min,
        max_g0: max,
        max_relative_deviation: dev,
        max_slice_norm_deviation: slice_dev,
        rescaled_norm_sqr: rescaled,
    })
}
