use num_complex::Complex;

use super::{FourMomentum, FrequencySign, ParticleKind, WaveFunction};
use crate::error::{Error, Result};
use crate::lattice::{Event, SpacetimeBox, UniformGrid};
use crate::numeric;
use crate::scalar::{cis, Real};

/// One plane-wave eigenfunction of the free wave equation.
#[derive(Clone, Debug, PartialEq)]
pub struct Mode<T> {
    kind: ParticleKind<T>,
    index: i64,
    sign: FrequencySign,
    momentum: FourMomentum<T>,
    amplitude: T,
    weight: Vec<Complex<T>>,
    temporal: Complex<T>,
    bounds: SpacetimeBox<T>,
}

impl<T: Real> Mode<T> {
    pub fn kind(&self) -> ParticleKind<T> {
        self.kind
    }

    /// Spatial wave-number label `n` the mode was built with. Boosted modes
    /// keep the label of their source.
    pub fn index(&self) -> i64 {
        self.index
    }

    pub fn sign(&self) -> FrequencySign {
        self.sign
    }

    pub fn momentum(&self) -> FourMomentum<T> {
        self.momentum
    }

    /// `a_k`.
    pub fn amplitude(&self) -> T {
        self.amplitude
    }

    /// Unit polarization or spinor in the component space.
    pub fn weight(&self) -> &[Complex<T>] {
        &self.weight
    }

    /// Time component `u⁰` of a vector weight. Zero except for massive
    /// vector modes carried into a moving frame.
    pub fn temporal_weight(&self) -> Complex<T> {
        self.temporal
    }

    pub fn bounds(&self) -> &SpacetimeBox<T> {
        &self.bounds
    }

    /// Phase `exp(i(p¹x¹ − p⁰x⁰))`.
    #[inline]
    pub fn phase(&self, x: Event<T>) -> Complex<T> {
        cis(self.momentum.momentum * x.x - self.momentum.energy * x.t)
    }

    /// Rebuilds the mode with a transformed momentum and weight.
    pub(crate) fn transported(
        &self,
        momentum: FourMomentum<T>,
        weight: Vec<Complex<T>>,
        temporal: Complex<T>,
    ) -> Self {
        Self {
            momentum,
            weight,
            temporal,
            ..self.clone()
        }
    }

    /// Whether `|p¹| < π n_space / L`, i.e. `|n| < n_space/2` for lattice modes.
    pub fn within_band(&self, grid: &UniformGrid<T>) -> bool {
        self.momentum.momentum.abs() < self.band_limit(grid)
    }

    fn band_limit(&self, grid: &UniformGrid<T>) -> T {
        T::PI() * T::from_count(grid.n_space()) / grid.bounds().space_extent()
    }

    pub fn check_band(&self, grid: &UniformGrid<T>) -> Result<()> {
        let limit = self.band_limit(grid);
        // Lattice momenta are exact multiples of 2π/L; the relative slack
        // only guards the boundary `|n| = n_space/2` against rounding.
        if self.momentum.momentum.abs() < limit * (T::one() - T::lit(1e-12)) {
            Ok(())
        } else {
            Err(Error::Aliased {
                p1: self.momentum.momentum.as_f64(),
                limit: limit.as_f64(),
            })
        }
    }
}

fn unit_check<T: Real>(weight: &[Complex<T>]) -> Result<()> {
    let norm = numeric::norm_sqr(weight).sqrt();
    if (norm - T::one()).abs() > T::check_tolerance() {
        return Err(Error::NonUnitWeight { norm: norm.as_f64() });
    }
    Ok(())
}

/// Builds the on-shell mode `n` with the given frequency sign and unit weight.
///
/// Photon weights may be given either as the transverse pair `(u², u³)` or as
/// a full four-vector `(u⁰, u¹, u², u³)` whose first two entries vanish.
/// Electron weights must be parallel to the Dirac spinor of the mode (see
/// [`electron_spinor`]).
pub fn make_mode<T: Real>(
    kind: ParticleKind<T>,
    n: i64,
    sign: FrequencySign,
    weight: &[Complex<T>],
    bounds: SpacetimeBox<T>,
) -> Result<Mode<T>> {
    kind.validate()?;
    let mut weight = weight.to_vec();
    if matches!(kind, ParticleKind::Photon) {
        if weight.len() == 4 {
            let tol = T::check_tolerance();
            if weight[0].norm() > tol || weight[1].norm() > tol {
                return Err(Error::PhotonNotTransverse);
            }
            weight.drain(..2);
        }
        if n == 0 {
            return Err(Error::Degenerate("photon mode needs a nonzero wave vector".into()));
        }
    }
    if weight.len() != kind.components() {
        return Err(Error::WeightDimension {
            expected: kind.components(),
            got: weight.len(),
        });
    }
    unit_check(&weight)?;
    let momentum = FourMomentum::on_shell(n, sign, kind.mass(), bounds.space_extent());
    if let ParticleKind::Electron { mass } = kind {
        let spinor = electron_spinor(momentum, mass);
        let overlap = numeric::dot_conj(&spinor, &weight).norm();
        if (overlap - T::one()).abs() > T::check_tolerance() {
            return Err(Error::Degenerate(
                "electron weight does not solve the Dirac equation".into(),
            ));
        }
    }
    Ok(Mode {
        kind,
        index: n,
        sign,
        momentum,
        amplitude: bounds.volume().sqrt().recip(),
        weight,
        temporal: Complex::new(T::zero(), T::zero()),
        bounds,
    })
}

/// Unit spinor solving `(γ⁰p⁰ − γ¹p¹ − m)u = 0` with
/// `γ⁰ = diag(1, −1)` and `γ¹ = [[0, 1], [−1, 0]]`.
///
/// Sign convention: positive frequency uses `u ∝ (p⁰ + m, p¹)`, negative
/// frequency uses `u ∝ (p¹, p⁰ − m)`. Both are real, so the rest spinors are
/// `(1, 0)` and `(0, −1)`.
pub fn electron_spinor<T: Real>(p: FourMomentum<T>, mass: T) -> Vec<Complex<T>> {
    let (e, k) = (p.energy, p.momentum);
    let (a, b) = if e >= T::zero() {
        (e + mass, k)
    } else {
        (k, e - mass)
    };
    let norm = (a * a + b * b).sqrt();
    vec![Complex::new(a / norm, T::zero()), Complex::new(b / norm, T::zero())]
}

/// Electron mode `n`; the spinor weight is fixed by the Dirac equation.
pub fn make_electron_mode<T: Real>(
    n: i64,
    sign: FrequencySign,
    mass: T,
    bounds: SpacetimeBox<T>,
) -> Result<Mode<T>> {
    let kind = ParticleKind::Electron { mass };
    kind.validate()?;
    let momentum = FourMomentum::on_shell(n, sign, mass, bounds.space_extent());
    let weight = electron_spinor(momentum, mass);
    make_mode(kind, n, sign, &weight, bounds)
}

/// `w_k · a_k · exp(i(p¹x¹ − p⁰x⁰))`.
pub fn evaluate_mode<T: Real>(mode: &Mode<T>, x: Event<T>) -> Vec<Complex<T>> {
    let f = mode.phase(x) * mode.amplitude;
    mode.weight.iter().map(|w| w * f).collect()
}

/// Validated list of same-kind modes with expansion coefficients `C_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeSet<T> {
    modes: Vec<Mode<T>>,
    coefficients: Vec<Complex<T>>,
}

impl<T: Real> ModeSet<T> {
    pub fn new(modes: Vec<Mode<T>>, coefficients: Vec<Complex<T>>) -> Result<Self> {
        let first = modes.first().ok_or(Error::EmptyModes)?;
        if modes.len() != coefficients.len() {
            return Err(Error::LengthMismatch {
                modes: modes.len(),
                coefficients: coefficients.len(),
            });
        }
        let kind = first.kind;
        let bounds = first.bounds;
        if modes.iter().any(|m| m.kind != kind) {
            return Err(Error::KindMismatch);
        }
        if modes.iter().any(|m| m.bounds != bounds) {
            return Err(Error::GridMismatch("modes built on different boxes".into()));
        }
        if matches!(kind, ParticleKind::Photon) {
            let positive = first.momentum.momentum > T::zero();
            if modes.iter().any(|m| (m.momentum.momentum > T::zero()) != positive) {
                return Err(Error::PhotonNotCollinear);
            }
        }
        Ok(Self {
            modes,
            coefficients,
        })
    }

    pub fn modes(&self) -> &[Mode<T>] {
        &self.modes
    }

    pub fn coefficients(&self) -> &[Complex<T>] {
        &self.coefficients
    }

    pub fn kind(&self) -> ParticleKind<T> {
        self.modes[0].kind
    }

    pub fn bounds(&self) -> &SpacetimeBox<T> {
        &self.modes[0].bounds
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    /// `‖C‖²`.
    pub fn coefficient_norm_sqr(&self) -> T {
        numeric::norm_sqr(&self.coefficients)
    }

    /// Copy with coefficients rescaled to `‖C‖ = 1`.
    pub fn normalized(&self) -> Result<Self> {
        let n = self.coefficient_norm_sqr().sqrt();
        if n <= T::zero() {
            return Err(Error::Degenerate("all coefficients vanish".into()));
        }
        Ok(Self {
            modes: self.modes.clone(),
            coefficients: self.coefficients.iter().map(|c| c / n).collect(),
        })
    }

    pub fn with_coefficients(&self, coefficients: Vec<Complex<T>>) -> Result<Self> {
        Self::new(self.modes.clone(), coefficients)
    }

    /// Field components at `x`.
    pub fn evaluate(&self, x: Event<T>) -> Vec<Complex<T>> {
        let m = self.kind().components();
        let mut out = vec![Complex::new(T::zero(), T::zero()); m];
        for (mode, c) in self.modes.iter().zip(&self.coefficients) {
            let f = mode.phase(x) * mode.amplitude * c;
            for (o, w) in out.iter_mut().zip(&mode.weight) {
                *o += w * f;
            }
        }
        out
    }

    /// Time component `u⁰` at `x` (vector kinds only, zero otherwise).
    pub fn evaluate_temporal(&self, x: Event<T>) -> Complex<T> {
        numeric::sum_complex(
            self.modes
                .iter()
                .zip(&self.coefficients)
                .map(|(m, c)| m.temporal * m.phase(x) * m.amplitude * c),
        )
    }

    /// Pointwise density `u²`: `Σ_α |u^α|² − |u⁰|²`.
    pub fn density_at(&self, x: Event<T>) -> T {
        let spatial = numeric::norm_sqr(&self.evaluate(x));
        spatial - self.evaluate_temporal(x).norm_sqr()
    }

    /// Dirac current `(j⁰, j¹) = (u†u, u†γ⁰γ¹u)` at `x`; electron only.
    pub fn current_at(&self, x: Event<T>) -> Result<(T, T)> {
        if !matches!(self.kind(), ParticleKind::Electron { .. }) {
            return Err(Error::UnsupportedKind("current is defined for the electron"));
        }
        let u = self.evaluate(x);
        let j0 = u[0].norm_sqr() + u[1].norm_sqr();
        let j1 = T::lit(2.0) * (u[0].conj() * u[1]).re;
        Ok((j0, j1))
    }

    /// Sample the field at the cell centers of `grid`.
    pub fn synthesize(&self, grid: &UniformGrid<T>) -> Result<WaveFunction<T>> {
        if grid.bounds() != self.bounds() {
            return Err(Error::GridMismatch("grid box differs from the mode box".into()));
        }
        if self.modes.iter().any(|m| m.temporal != Complex::new(T::zero(), T::zero())) {
            return Err(Error::UnsupportedKind(
                "grid synthesis of vector modes with a time component",
            ));
        }
        for m in &self.modes {
            m.check_band(grid)?;
        }
        let m = self.kind().components();
        let mut values = Vec::with_capacity(grid.n_cells() * m);
        for cell in grid.cells() {
            values.extend(self.evaluate(grid.cell_center(cell)));
        }
        WaveFunction::from_values(*grid, self.kind(), values)
    }

    /// Exact `∫∫ u² dx⁰ dx¹` over `[t0, t1] × [x0, x1]` from the mode expansion.
    pub fn region_integral(&self, t_range: (T, T), x_range: (T, T)) -> T {
        let mut acc = numeric::NeumaierSum::new();
        for (mk, ck) in self.modes.iter().zip(&self.coefficients) {
            for (mj, cj) in self.modes.iter().zip(&self.coefficients) {
                let overlap = numeric::dot_conj(&mk.weight, &mj.weight)
                    - mk.temporal.conj() * mj.temporal;
                let it = phase_integral(-(mj.momentum.energy - mk.momentum.energy), t_range);
                let ix = phase_integral(mj.momentum.momentum - mk.momentum.momentum, x_range);
                let term = ck.conj() * cj * overlap * it * ix * mk.amplitude * mj.amplitude;
                acc.add(term.re);
            }
        }
        acc.value()
    }
}

/// `∫_{s0}^{s1} exp(iκs) ds`.
fn phase_integral<T: Real>(kappa: T, (s0, s1): (T, T)) -> Complex<T> {
    let len = s1 - s0;
    if (kappa * len).abs() < T::lit(1e-6) {
        // Series through second order avoids cancellation near κ = 0.
        let mid = (s0 + s1) / T::lit(2.0);
        let corr = T::one() - (kappa * len).powi(2) / T::lit(24.0);
        return cis(kappa * mid) * (len * corr);
    }
    let i = Complex::new(T::zero(), T::one());
    (cis(kappa * s1) - cis(kappa * s0)) / (i * kappa)
}

/// `ψ(ξ) = Σ_k C_k ψ_k(center(ξ))`; no normalization applied.
pub fn synthesize<T: Real>(
    modes: &[Mode<T>],
    coefficients: &[Complex<T>],
    grid: &UniformGrid<T>,
) -> Result<WaveFunction<T>> {
    ModeSet::new(modes.to_vec(), coefficients.to_vec())?.synthesize(grid)
}
