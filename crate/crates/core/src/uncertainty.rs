//! Coordinate and momentum spreads and the two Heisenberg products.
//!
//! Momentum statistics come from a discrete spectrum `{(p_k, n_k)}`. For an
//! arbitrary grid field the spectrum is taken on the box's full spacetime
//! Fourier basis `exp(i(k_n x¹ − ω_j x⁰))/√|V|`, `ω_j = 2πj/cT`,
//! `k_n = 2πn/L`: on-shell periodic modes cannot be localized in `x⁰`, so
//! time-localized test states necessarily leave the mass shell.

use std::fmt::Write as _;

use num_complex::Complex;
use serde::Serialize;

use crate::density::{density, SpacetimeDensity};
use crate::error::{Error, Result};
use crate::fields::{FourMomentum, ParticleKind, WaveFunction};
use crate::lattice::UniformGrid;
use crate::momentum::MomentumSpectrum;
use crate::numeric::{self, NeumaierSum};
use crate::scalar::{cis, Real};

/// Relative slack on `ħ/2` for grid effects.
pub const PRODUCT_TOLERANCE: f64 = 1e-2;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CoordinateMoments<T> {
    pub mean_t: T,
    pub sd_t: T,
    pub mean_x: T,
    pub sd_x: T,
    /// `Δx⁰²/12`: the variance a uniform spread inside each cell would add.
    pub sheppard_t: T,
    /// `Δx¹²/12`.
    pub sheppard_x: T,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MomentumMoments<T> {
    pub mean_p0: T,
    pub sd_p0: T,
    pub mean_p1: T,
    pub sd_p1: T,
}

fn mean_and_sd<T: Real>(pairs: impl Iterator<Item = (T, T)> + Clone) -> (T, T) {
    let mean = numeric::sum(pairs.clone().map(|(w, v)| w * v));
    let var = numeric::sum(pairs.map(|(w, v)| w * (v - mean) * (v - mean)));
    (mean, var.max(T::zero()).sqrt())
}

/// Moments of `x⁰` and `x¹` over cell centers weighted by `g·w`.
pub fn coordinate_moments<T: Real>(g: &SpacetimeDensity<T>) -> Result<CoordinateMoments<T>> {
    if !g.is_normalized() {
        return Err(Error::NotNormalized {
            norm_sqr: g.total().as_f64(),
        });
    }
    let grid = g.grid();
    let w = grid.cell_volume();
    let weights: Vec<_> = grid.cells().map(|c| (g.value(c) * w, grid.cell_center(c))).collect();
    let (mean_t, sd_t) = mean_and_sd(weights.iter().map(|(p, e)| (*p, e.t)));
    let (mean_x, sd_x) = mean_and_sd(weights.iter().map(|(p, e)| (*p, e.x)));
    let twelve = T::lit(12.0);
    Ok(CoordinateMoments {
        mean_t,
        sd_t,
        mean_x,
        sd_x,
        sheppard_t: grid.dt() * grid.dt() / twelve,
        sheppard_x: grid.dx() * grid.dx() / twelve,
    })
}

/// Moments of `p⁰` and `p¹` under the occupations of a normalized spectrum.
pub fn momentum_moments<T: Real>(spectrum: &MomentumSpectrum<T>) -> Result<MomentumMoments<T>> {
    let total = spectrum.total();
    if (total - T::one()).abs() > T::check_tolerance() {
        return Err(Error::NotNormalized {
            norm_sqr: total.as_f64(),
        });
    }
    if spectrum.momenta.len() != spectrum.occupations.len() {
        return Err(Error::DimensionMismatch {
            expected: spectrum.momenta.len(),
            got: spectrum.occupations.len(),
        });
    }
    let pairs = spectrum.occupations.iter().copied().zip(spectrum.momenta.iter().copied());
    let (mean_p0, sd_p0) = mean_and_sd(pairs.clone().map(|(n, p)| (n, p.energy)));
    let (mean_p1, sd_p1) = mean_and_sd(pairs.map(|(n, p)| (n, p.momentum)));
    Ok(MomentumMoments {
        mean_p0,
        sd_p0,
        mean_p1,
        sd_p1,
    })
}

fn centered_indices(n: usize) -> impl Iterator<Item = i64> + Clone {
    let half = (n / 2) as i64;
    -half..(n as i64 - half)
}

/// Occupations of `ψ` on the spacetime Fourier basis of its grid, summed
/// over components. The basis is orthonormal on the grid, so the
/// occupations sum to `‖ψ‖²`.
pub fn spacetime_spectrum<T: Real>(psi: &WaveFunction<T>) -> MomentumSpectrum<T> {
    let grid = psi.grid();
    let (nt, nx, m) = (grid.n_time(), grid.n_space(), psi.components());
    let b = grid.bounds();
    let two_pi = T::lit(2.0) * T::PI();
    let ks: Vec<T> = centered_indices(nx).map(|n| two_pi * T::from_index(n) / b.space_extent()).collect();
    let ws: Vec<T> = centered_indices(nt).map(|j| two_pi * T::from_index(j) / b.time_extent()).collect();
    // Spatial transform of every row: r[it][n][α] = Σ_x e^{−i k_n x} ψ_α(t, x).
    let mut rows = vec![Complex::new(T::zero(), T::zero()); nt * nx * m];
    for it in 0..nt {
        for (n, &k) in ks.iter().enumerate() {
            for alpha in 0..m {
                let s = numeric::sum_complex(
                    (0..nx).map(|ix| cis(-k * grid.space_center(ix)) * psi.value_flat(it * nx + ix)[alpha]),
                );
                rows[(it * nx + n) * m + alpha] = s;
            }
        }
    }
    // c_{jn} = w/√V Σ_t e^{+i ω_j t} r[t][n].
    let scale = grid.cell_volume() / b.volume().sqrt();
    let mut momenta = Vec::with_capacity(nt * nx);
    let mut occupations = Vec::with_capacity(nt * nx);
    for &omega in &ws {
        for (n, &k) in ks.iter().enumerate() {
            let mut acc = NeumaierSum::new();
            for alpha in 0..m {
                let c = numeric::sum_complex((0..nt).map(|it| cis(omega * grid.time_center(it)) * rows[(it * nx + n) * m + alpha]));
                acc.add((c * scale).norm_sqr());
            }
            momenta.push(FourMomentum::new(omega, k));
            occupations.push(acc.value());
        }
    }
    MomentumSpectrum { momenta, occupations }
}

/// Gaussian weights on one axis of the spacetime Fourier basis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CombAxis<T> {
    /// Coordinate the packet is centered on.
    pub center: T,
    /// Central frequency or wave number.
    pub carrier: T,
    /// Standard deviation of the conjugate variable in the Gaussian weights.
    pub sigma: T,
    /// Quadratic phase `α`; widens the coordinate spread to
    /// `√(1/(4σ²) + 4α²σ²)` without changing the spectrum.
    pub chirp: T,
}

impl<T: Real> CombAxis<T> {
    /// Chirp that sets the ideal Heisenberg product of the axis to `product`.
    pub fn with_product(center: T, carrier: T, sigma: T, product: T) -> Self {
        let excess = (product * product - T::lit(0.25)).max(T::zero());
        let chirp = excess.sqrt() / (T::lit(2.0) * sigma * sigma);
        Self {
            center,
            carrier,
            sigma,
            chirp,
        }
    }

    /// Normalized weights on the frequencies `q`, with `sign` the sign of the
    /// coordinate in the plane-wave phase.
    fn weights(&self, q: &[T], sign: T) -> Vec<Complex<T>> {
        let four = T::lit(4.0);
        let raw: Vec<Complex<T>> = q
            .iter()
            .map(|&q| {
                let d = q - self.carrier;
                let amp = (-(d * d) / (four * self.sigma * self.sigma)).exp();
                cis(-self.chirp * d * d - sign * q * self.center) * amp
            })
            .collect();
        let norm = numeric::norm_sqr(&raw).sqrt();
        raw.into_iter().map(|c| c / norm).collect()
    }
}

/// Off-shell product state `A(x⁰)·B(x¹)` with Gaussian spectra on both axes
/// of the spacetime Fourier basis of `grid`. Returns the synthesized field
/// and its exact spectrum.
pub fn gaussian_comb_state<T: Real>(
    grid: &UniformGrid<T>,
    time: CombAxis<T>,
    space: CombAxis<T>,
) -> Result<(WaveFunction<T>, MomentumSpectrum<T>)> {
    let b = grid.bounds();
    let two_pi = T::lit(2.0) * T::PI();
    let ks: Vec<T> = centered_indices(grid.n_space()).map(|n| two_pi * T::from_index(n) / b.space_extent()).collect();
    let ws: Vec<T> = centered_indices(grid.n_time()).map(|j| two_pi * T::from_index(j) / b.time_extent()).collect();
    // Phase exp(i(k x − ω t)): the time coordinate enters with sign −1.
    let a = time.weights(&ws, -T::one());
    let bw = space.weights(&ks, T::one());
    let inv_sqrt_v = b.volume().sqrt().recip();
    let at: Vec<Complex<T>> = (0..grid.n_time())
        .map(|it| numeric::sum_complex(ws.iter().zip(&a).map(|(w, c)| *c * cis(-*w * grid.time_center(it)))))
        .collect();
    let bx: Vec<Complex<T>> = (0..grid.n_space())
        .map(|ix| numeric::sum_complex(ks.iter().zip(&bw).map(|(k, c)| *c * cis(*k * grid.space_center(ix)))))
        .collect();
    let values = grid.cells().map(|c| at[c.it] * bx[c.ix] * inv_sqrt_v).collect();
    let psi = WaveFunction::from_values(*grid, ParticleKind::ComplexScalar { mass: T::zero() }, values)?;
    let mut momenta = Vec::with_capacity(ws.len() * ks.len());
    let mut occupations = Vec::with_capacity(ws.len() * ks.len());
    for (w, aw) in ws.iter().zip(&a) {
        for (k, bk) in ks.iter().zip(&bw) {
            momenta.push(FourMomentum::new(*w, *k));
            occupations.push(aw.norm_sqr() * bk.norm_sqr());
        }
    }
    Ok((psi, MomentumSpectrum { momenta, occupations }))
}

/// Means, spreads and products of one state, in natural units.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MomentReport<T> {
    pub mean_t: T,
    pub sd_t: T,
    pub mean_x: T,
    pub sd_x: T,
    pub mean_p0: T,
    pub sd_p0: T,
    pub mean_p1: T,
    pub sd_p1: T,
    /// `Δx¹ Δp¹`.
    pub product_space: T,
    /// `Δx⁰ Δp⁰`.
    pub product_time: T,
    pub sheppard_t: T,
    pub sheppard_x: T,
    /// `ε = ⟨p⁰⟩`.
    pub energy: T,
    /// `ħc/ε`; infinite for `ε ≤ 0`.
    pub dx_min: T,
    /// `v = ⟨p¹⟩/⟨p⁰⟩`.
    pub velocity: T,
    /// `v Δx⁰ Δp¹`, reported without a bound.
    pub velocity_product: T,
    /// `Δp¹ = 0` or `Δp⁰ = 0`: the plane-wave case the bound does not cover.
    pub degenerate: bool,
    pub space_violation: bool,
    pub time_violation: bool,
}

impl<T: Real> MomentReport<T> {
    /// Flat `key = value` record, one line per field.
    pub fn to_record(&self) -> String {
        let reals = [
            ("mean_t", self.mean_t),
            ("sd_t", self.sd_t),
            ("mean_x", self.mean_x),
            ("sd_x", self.sd_x),
            ("mean_p0", self.mean_p0),
            ("sd_p0", self.sd_p0),
            ("mean_p1", self.mean_p1),
            ("sd_p1", self.sd_p1),
            ("product_space", self.product_space),
            ("product_time", self.product_time),
            ("sheppard_t", self.sheppard_t),
            ("sheppard_x", self.sheppard_x),
            ("energy", self.energy),
            ("dx_min", self.dx_min),
            ("velocity", self.velocity),
            ("velocity_product", self.velocity_product),
        ];
        let mut out = String::new();
        for (k, v) in reals {
            let _ = writeln!(out, "{k} = {:.16e}", v.as_f64());
        }
        for (k, v) in [
            ("degenerate", self.degenerate),
            ("space_violation", self.space_violation),
            ("time_violation", self.time_violation),
        ] {
            let _ = writeln!(out, "{k} = {v}");
        }
        out
    }
}

/// Combines coordinate moments of `g` with momentum moments of `spectrum`.
pub fn moment_report<T: Real>(g: &SpacetimeDensity<T>, spectrum: &MomentumSpectrum<T>) -> Result<MomentReport<T>> {
    let x = coordinate_moments(g)?;
    let p = momentum_moments(spectrum)?;
    let tiny = T::lit(1e-12);
    let degenerate = p.sd_p0 <= tiny || p.sd_p1 <= tiny;
    let bound = T::lit(0.5 * (1.0 - PRODUCT_TOLERANCE));
    let product_space = x.sd_x * p.sd_p1;
    let product_time = x.sd_t * p.sd_p0;
    let energy = p.mean_p0;
    let velocity = if energy != T::zero() { p.mean_p1 / energy } else { T::nan() };
    Ok(MomentReport {
        mean_t: x.mean_t,
        sd_t: x.sd_t,
        mean_x: x.mean_x,
        sd_x: x.sd_x,
        mean_p0: p.mean_p0,
        sd_p0: p.sd_p0,
        mean_p1: p.mean_p1,
        sd_p1: p.sd_p1,
        product_space,
        product_time,
        sheppard_t: x.sheppard_t,
        sheppard_x: x.sheppard_x,
        energy,
        dx_min: if energy > T::zero() { energy.recip() } else { T::infinity() },
        velocity,
        velocity_product: velocity * x.sd_t * p.sd_p1,
        degenerate,
        space_violation: !degenerate && product_space < bound,
        time_violation: !degenerate && product_time < bound,
    })
}

/// [`moment_report`] with the spectrum taken on the spacetime Fourier basis.
pub fn uncertainty_report<T: Real>(psi: &WaveFunction<T>) -> Result<MomentReport<T>> {
    if !psi.is_normalized() {
        return Err(Error::NotNormalized {
            norm_sqr: psi.norm_sqr().as_f64(),
        });
    }
    moment_report(&density(psi), &spacetime_spectrum(psi))
}
