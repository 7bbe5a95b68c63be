//! Boosts along `x¹` and executable invariance checks.
//!
//! Invariance is checked by transporting the modes, never by resampling a
//! grid: the field in the moving frame is evaluated analytically at the
//! image `x′ = Λx` of every probe. Grid quadrature only enters the region
//! check, where the boosted region is covered by cells of the moving frame's
//! grid (same extents and cell counts as the rest frame).

use std::collections::BTreeSet;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fields::{FourMomentum, FourVectorField, Mode, ModeSet, ParticleKind, WaveFunction};
use crate::lattice::{CellIndex, Event, Region, SpacetimeBox, UniformGrid};
use crate::numeric;
use crate::scalar::Real;

/// Pure boost with velocity `β` along `x¹`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Boost<T> {
    beta: T,
}

impl<T: Real> Boost<T> {
    pub fn new(beta: T) -> Result<Self> {
        if !(beta.abs() < T::one()) {
            return Err(Error::InvalidBoost(beta.as_f64()));
        }
        Ok(Self { beta })
    }

    pub fn identity() -> Self {
        Self { beta: T::zero() }
    }

    pub fn beta(&self) -> T {
        self.beta
    }

    /// `γ = 1/√(1 − β²)`.
    pub fn gamma(&self) -> T {
        (T::one() - self.beta * self.beta).sqrt().recip()
    }

    /// `η = atanh β`.
    pub fn rapidity(&self) -> T {
        self.beta.atanh()
    }

    pub fn inverse(&self) -> Self {
        Self { beta: -self.beta }
    }

    /// Boost equivalent to applying `other` first and then `self`.
    pub fn compose(&self, other: &Self) -> Self {
        Self {
            beta: (self.beta + other.beta) / (T::one() + self.beta * other.beta),
        }
    }

    /// `(a⁰, a¹) → (γ(a⁰ − βa¹), γ(a¹ − βa⁰))`.
    #[inline]
    pub fn apply(&self, x: Event<T>) -> Event<T> {
        let g = self.gamma();
        Event::new(g * (x.t - self.beta * x.x), g * (x.x - self.beta * x.t))
    }

    pub fn apply_momentum(&self, p: FourMomentum<T>) -> FourMomentum<T> {
        let e = self.apply(Event::new(p.energy, p.momentum));
        FourMomentum::new(e.t, e.x)
    }

    /// Vector law on `(u⁰, u¹, u², u³)`; transverse components are untouched.
    pub fn apply_vector(&self, u: &[Complex<T>; 4]) -> [Complex<T>; 4] {
        let g = self.gamma();
        [
            (u[0] - u[1] * self.beta) * g,
            (u[1] - u[0] * self.beta) * g,
            u[2],
            u[3],
        ]
    }

    /// Spinor law `S = cosh(η/2) − sinh(η/2) γ⁰γ¹` with `γ⁰γ¹ = [[0, 1], [1, 0]]`.
    ///
    /// The sign of the generator matches the passive event map of
    /// [`Boost::apply`]: `S` carries the Dirac spinor of momentum `p` onto a
    /// multiple of the spinor of `Λp`.
    pub fn apply_spinor(&self, u: &[Complex<T>]) -> Vec<Complex<T>> {
        let half = self.rapidity() / T::lit(2.0);
        let (ch, sh) = (half.cosh(), half.sinh());
        vec![u[0] * ch - u[1] * sh, u[1] * ch - u[0] * sh]
    }
}

/// `x′ = Λ_β x`.
pub fn boost_event<T: Real>(x: Event<T>, boost: &Boost<T>) -> Event<T> {
    boost.apply(x)
}

/// Carries a mode set into the moving frame.
///
/// Momenta transform as vectors and stay on the mass shell; coefficients are
/// unchanged. Weights follow the representation of each kind: scalars and
/// transverse photon weights are invariant, massive vector weights follow the
/// vector law after embedding `u⁰ = 0`, electron spinors follow the spinor
/// law. With `target`, every boosted `p¹` must stay below the band limit of
/// that grid.
pub fn boost_modes<T: Real>(
    set: &ModeSet<T>,
    boost: &Boost<T>,
    target: Option<&UniformGrid<T>>,
) -> Result<ModeSet<T>> {
    let modes = set
        .modes()
        .iter()
        .map(|m| boost_mode(m, boost))
        .collect::<Vec<_>>();
    if let Some(grid) = target {
        for m in &modes {
            m.check_band(grid)?;
        }
    }
    ModeSet::new(modes, set.coefficients().to_vec())
}

fn boost_mode<T: Real>(mode: &Mode<T>, boost: &Boost<T>) -> Mode<T> {
    let p = boost.apply_momentum(mode.momentum());
    let zero = Complex::new(T::zero(), T::zero());
    match mode.kind() {
        ParticleKind::RealScalar { .. } | ParticleKind::ComplexScalar { .. } | ParticleKind::Photon => {
            mode.transported(p, mode.weight().to_vec(), mode.temporal_weight())
        }
        ParticleKind::MassiveVector { .. } => {
            let w = mode.weight();
            let u = boost.apply_vector(&[mode.temporal_weight(), w[0], w[1], w[2]]);
            mode.transported(p, vec![u[1], u[2], u[3]], u[0])
        }
        ParticleKind::Electron { .. } => mode.transported(p, boost.apply_spinor(mode.weight()), zero),
    }
}

/// How the density is compared across frames.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DensityTransport {
    /// `g′(Λx) = g(x)`.
    Scalar,
    /// `g′(Λx) = γ(g(x) − β j¹(x))`: the electron's `Σ|u^α|²` is the time
    /// component of the Dirac current.
    CurrentTimeComponent,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DensityInvarianceReport<T> {
    pub beta: T,
    pub probes: usize,
    pub transport: DensityTransport,
    /// `max |g′(Λx) − expected(x)|` under `transport`.
    pub max_deviation: T,
    /// `max |g′(Λx) − g(x)|` regardless of kind.
    pub raw_max_deviation: T,
}

/// Evaluates `g` at each probe in the rest frame and `g′` at its image with
/// the transported modes.
pub fn check_density_invariance<T: Real>(
    set: &ModeSet<T>,
    boost: &Boost<T>,
    probes: &[Event<T>],
) -> Result<DensityInvarianceReport<T>> {
    let bounds = *set.bounds();
    let slack = T::lit(1e-12);
    let boosted = boost_modes(set, boost, None)?;
    let electron = matches!(set.kind(), ParticleKind::Electron { .. });
    let transport = if electron {
        DensityTransport::CurrentTimeComponent
    } else {
        DensityTransport::Scalar
    };
    let mut worst = T::zero();
    let mut worst_raw = T::zero();
    for &x in probes {
        let xp = boost.apply(x);
        for e in [x, xp] {
            if !bounds.contains(e, slack) {
                return Err(Error::OutsideBox {
                    t: e.t.as_f64(),
                    x: e.x.as_f64(),
                });
            }
        }
        let g = set.density_at(x);
        let gp = boosted.density_at(xp);
        let expected = if electron {
            let (j0, j1) = set.current_at(x)?;
            boost.gamma() * (j0 - boost.beta * j1)
        } else {
            g
        };
        worst = worst.max((gp - expected).abs());
        worst_raw = worst_raw.max((gp - g).abs());
    }
    Ok(DensityInvarianceReport {
        beta: boost.beta,
        probes: probes.len(),
        transport,
        max_deviation: worst,
        raw_max_deviation: worst_raw,
    })
}

/// `count` reproducible random events lying in `bounds` whose image under
/// `boost` also lies in `bounds`.
pub fn probes_in_both_frames<T: Real>(
    bounds: &SpacetimeBox<T>,
    boost: &Boost<T>,
    count: usize,
    seed: u64,
) -> Result<Vec<Event<T>>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0usize;
    while out.len() < count {
        attempts += 1;
        if attempts > 1000 * count.max(1) {
            return Err(Error::Degenerate("boosted box does not overlap the rest box".into()));
        }
        let e = Event::new(
            T::lit(rng.random::<f64>()) * bounds.time_extent(),
            T::lit(rng.random::<f64>()) * bounds.space_extent(),
        );
        if bounds.contains(boost.apply(e), T::zero()) {
            out.push(e);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegionInvarianceReport<T> {
    pub beta: T,
    pub n_time: usize,
    pub n_space: usize,
    /// `Σ_{ξ∈Q} g(ξ) w` in the rest frame.
    pub probability: T,
    /// `Σ_{ξ′∈cover(ΛQ)} g′(ξ′) w` in the moving frame.
    pub boosted_probability: T,
    pub relative_difference: T,
    pub source_cells: usize,
    pub covering_cells: usize,
}

/// Compares `P(Q)` with the quadrature of `g′` over the cells of the moving
/// frame's grid that cover the image of `Q`.
///
/// The covering over-counts by one layer of boundary cells, a first-order
/// bias in the cell size.
pub fn check_region_invariance<T: Real>(
    set: &ModeSet<T>,
    boost: &Boost<T>,
    region: &Region,
    grid: &UniformGrid<T>,
) -> Result<RegionInvarianceReport<T>> {
    if !region.fits(grid) {
        return Err(Error::GridMismatch("region built for another grid shape".into()));
    }
    if grid.bounds() != set.bounds() {
        return Err(Error::GridMismatch("grid box differs from the mode box".into()));
    }
    let boosted = boost_modes(set, boost, None)?;
    let w = grid.cell_volume();
    let probability = numeric::sum(region.iter().map(|c| set.density_at(grid.cell_center(c)))) * w;
    let cover = image_cover(region, boost, grid)?;
    let boosted_probability =
        numeric::sum(cover.iter().map(|c| boosted.density_at(grid.cell_center(*c)))) * w;
    let relative_difference = if probability > T::zero() {
        (boosted_probability - probability).abs() / probability
    } else {
        (boosted_probability - probability).abs()
    };
    Ok(RegionInvarianceReport {
        beta: boost.beta,
        n_time: grid.n_time(),
        n_space: grid.n_space(),
        probability,
        boosted_probability,
        relative_difference,
        source_cells: region.len(),
        covering_cells: cover.len(),
    })
}

/// Region check of the sub-box `t_range × x_range` at several square grid
/// resolutions, for refinement studies.
pub fn region_invariance_trend<T: Real>(
    set: &ModeSet<T>,
    boost: &Boost<T>,
    t_range: (T, T),
    x_range: (T, T),
    resolutions: &[usize],
) -> Result<Vec<RegionInvarianceReport<T>>> {
    resolutions
        .iter()
        .map(|&n| {
            let grid = UniformGrid::new(*set.bounds(), n, n)?;
            let region = grid.region_from_subbox(t_range, x_range)?;
            check_region_invariance(set, boost, &region, &grid)
        })
        .collect()
}

/// Cells of `grid` whose interior meets the image of some cell of `region`.
fn image_cover<T: Real>(
    region: &Region,
    boost: &Boost<T>,
    grid: &UniformGrid<T>,
) -> Result<BTreeSet<CellIndex>> {
    let (dt, dx) = (grid.dt(), grid.dx());
    let bounds = grid.bounds();
    let slack = T::lit(1e-9);
    let eps = T::lit(1e-9) * dt.min(dx);
    let mut cover = BTreeSet::new();
    for cell in region.iter() {
        let t0 = T::from_count(cell.it) * dt;
        let x0 = T::from_count(cell.ix) * dx;
        let corners = [
            Event::new(t0, x0),
            Event::new(t0 + dt, x0),
            Event::new(t0 + dt, x0 + dx),
            Event::new(t0, x0 + dx),
        ]
        .map(|e| boost.apply(e));
        if corners.iter().any(|e| !bounds.contains(*e, slack)) {
            return Err(Error::CoverageTruncated);
        }
        let (tmin, tmax) = extent(corners.iter().map(|e| e.t));
        let (xmin, xmax) = extent(corners.iter().map(|e| e.x));
        let range = |lo: T, hi: T, h: T, n: usize| {
            let a = (lo / h).floor().max(T::zero()).to_usize().unwrap_or(0);
            let b = (hi / h).ceil().to_usize().unwrap_or(n).min(n);
            a..b.max(a)
        };
        for it in range(tmin, tmax, dt, grid.n_time()) {
            for ix in range(xmin, xmax, dx, grid.n_space()) {
                let ct = T::from_count(it) * dt;
                let cx = T::from_count(ix) * dx;
                let rect = [
                    Event::new(ct, cx),
                    Event::new(ct + dt, cx),
                    Event::new(ct + dt, cx + dx),
                    Event::new(ct, cx + dx),
                ];
                if interiors_overlap(&rect, &corners, eps) {
                    cover.insert(CellIndex::new(it, ix));
                }
            }
        }
    }
    Ok(cover)
}

fn extent<T: Real>(values: impl Iterator<Item = T>) -> (T, T) {
    values.fold((T::infinity(), T::neg_infinity()), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

/// Separating-axis test for two convex quadrilaterals; touching edges do not
/// count as overlap.
fn interiors_overlap<T: Real>(a: &[Event<T>; 4], b: &[Event<T>; 4], eps: T) -> bool {
    for poly in [a, b] {
        for k in 0..4 {
            let p = poly[k];
            let q = poly[(k + 1) % 4];
            let normal = (q.x - p.x, -(q.t - p.t));
            let project = |e: &Event<T>| e.t * normal.0 + e.x * normal.1;
            let (amin, amax) = extent(a.iter().map(project));
            let (bmin, bmax) = extent(b.iter().map(project));
            let scale = (normal.0 * normal.0 + normal.1 * normal.1).sqrt();
            if amax <= bmin + eps * scale || bmax <= amin + eps * scale {
                return false;
            }
        }
    }
    true
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GaugeFamilyReport<T> {
    pub beta: T,
    /// `max(|u⁰|, |u¹|)` before the boost.
    pub residual_before: T,
    /// `max(|u′⁰|, |u′¹|)` after the boost.
    pub residual_after: T,
    /// `max |g′(x′) − g(x)|` with `g = u²` the Minkowski square.
    pub max_density_deviation: T,
    /// Whether `u′⁰ = u′¹ = 0` holds to `1e-12`.
    pub calibrated: bool,
}

/// Boosts a four-vector field cell by cell and checks that the transverse
/// calibration `u⁰ = u¹ = 0` survives. A field taken out of the calibration
/// by a gauge change reports `calibrated = false`.
pub fn gauge_family_check<T: Real>(field: &FourVectorField<T>, boost: &Boost<T>) -> GaugeFamilyReport<T> {
    let boosted = field.map(|u| boost.apply_vector(u));
    let before = field.density();
    let after = boosted.density();
    let dev = before
        .iter()
        .zip(&after)
        .map(|(a, b)| (*a - *b).abs())
        .fold(T::zero(), T::max);
    let residual_after = boosted.calibration_residual();
    let threshold = T::lit(1e-12).max(T::epsilon() * T::lit(100.0));
    GaugeFamilyReport {
        beta: boost.beta,
        residual_before: field.calibration_residual(),
        residual_after,
        max_density_deviation: dev,
        calibrated: residual_after <= threshold,
    }
}

/// [`gauge_family_check`] on a transverse photon wave function.
pub fn photon_gauge_family_check<T: Real>(
    psi: &WaveFunction<T>,
    boost: &Boost<T>,
) -> Result<GaugeFamilyReport<T>> {
    Ok(gauge_family_check(&FourVectorField::from_photon(psi)?, boost))
}
