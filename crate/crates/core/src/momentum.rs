//! Projection onto the plane-wave basis and occupation numbers `n_k = |C_k|²`.

use num_complex::Complex;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fields::{synthesize, FourMomentum, FrequencySign, Mode, ModeSet, ParticleKind, WaveFunction};
use crate::numeric;
use crate::scalar::Real;

/// Largest `|G_ij − δ_ij|` of the grid Gram matrix accepted by [`decompose`].
pub const ORTHONORMALITY_TOLERANCE: f64 = 1e-9;

/// Coefficients of a wave function in a mode basis.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeCoefficients<T> {
    modes: Vec<Mode<T>>,
    coefficients: Vec<Complex<T>>,
    residual: T,
}

impl<T: Real> ModeCoefficients<T> {
    /// Coefficients of an analytic mode set, with zero residual.
    pub fn from_mode_set(set: &ModeSet<T>) -> Self {
        Self {
            modes: set.modes().to_vec(),
            coefficients: set.coefficients().to_vec(),
            residual: T::zero(),
        }
    }

    pub fn modes(&self) -> &[Mode<T>] {
        &self.modes
    }

    pub fn coefficients(&self) -> &[Complex<T>] {
        &self.coefficients
    }

    /// `‖ψ − Σ C_k ψ_k‖` on the grid the coefficients were taken from.
    pub fn residual(&self) -> T {
        self.residual
    }

    pub fn kind(&self) -> ParticleKind<T> {
        self.modes[0].kind()
    }

    pub fn occupations(&self) -> Vec<T> {
        self.coefficients.iter().map(|c| c.norm_sqr()).collect()
    }

    /// `‖C‖² = Σ n_k`.
    pub fn norm_sqr(&self) -> T {
        numeric::sum(self.coefficients.iter().map(|c| c.norm_sqr()))
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - T::one()).abs() <= T::check_tolerance()
    }

    pub fn spectrum(&self) -> MomentumSpectrum<T> {
        MomentumSpectrum {
            momenta: self.modes.iter().map(|m| m.momentum()).collect(),
            occupations: self.occupations(),
        }
    }

    pub fn to_mode_set(&self) -> Result<ModeSet<T>> {
        ModeSet::new(self.modes.clone(), self.coefficients.clone())
    }
}

/// Discrete momentum distribution: occupation `n_k` at four-momentum `p_k`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MomentumSpectrum<T> {
    pub momenta: Vec<FourMomentum<T>>,
    pub occupations: Vec<T>,
}

impl<T: Real> MomentumSpectrum<T> {
    pub fn total(&self) -> T {
        numeric::sum(self.occupations.iter().copied())
    }
}

fn sample_modes<T: Real>(modes: &[Mode<T>], psi: &WaveFunction<T>) -> Result<Vec<WaveFunction<T>>> {
    let grid = psi.grid();
    modes
        .par_iter()
        .map(|m| {
            if m.kind() != psi.kind() {
                return Err(Error::KindMismatch);
            }
            if m.bounds() != grid.bounds() {
                return Err(Error::GridMismatch("mode box differs from the grid box".into()));
            }
            m.check_band(grid)?;
            synthesize(std::slice::from_ref(m), &[Complex::new(T::one(), T::zero())], grid)
        })
        .collect()
}

/// Largest `|G_ij − δ_ij|` of the grid Gram matrix of `modes` sampled on
/// `grid`-shaped fields.
pub fn gram_deviation<T: Real>(sampled: &[WaveFunction<T>]) -> Result<T> {
    let rows: Vec<T> = (0..sampled.len())
        .into_par_iter()
        .map(|i| {
            let mut worst = T::zero();
            for j in i..sampled.len() {
                let g = sampled[i].inner_product(&sampled[j])?;
                let target = if i == j { T::one() } else { T::zero() };
                worst = worst.max((g - Complex::new(target, T::zero())).norm());
            }
            Ok(worst)
        })
        .collect::<Result<_>>()?;
    Ok(rows.into_iter().fold(T::zero(), T::max))
}

/// `C_k = (ψ_k, ψ)` with the grid inner product.
///
/// The modes must be orthonormal on the grid (their Gram matrix within
/// [`ORTHONORMALITY_TOLERANCE`] of the identity, or the scalar type's check
/// tolerance if that is looser) and below its band limit.
/// A state outside their span is not an error: the remainder is reported as
/// [`ModeCoefficients::residual`].
pub fn decompose<T: Real>(psi: &WaveFunction<T>, modes: &[Mode<T>]) -> Result<ModeCoefficients<T>> {
    if modes.is_empty() {
        return Err(Error::EmptyModes);
    }
    let sampled = sample_modes(modes, psi)?;
    let deviation = gram_deviation(&sampled)?;
    let tolerance = ORTHONORMALITY_TOLERANCE.max(T::check_tolerance().as_f64());
    if deviation.as_f64() > tolerance {
        return Err(Error::NotOrthonormal {
            deviation: deviation.as_f64(),
        });
    }
    let coefficients: Vec<Complex<T>> = sampled
        .par_iter()
        .map(|m| m.inner_product(psi))
        .collect::<Result<_>>()?;
    let rebuilt = synthesize(modes, &coefficients, psi.grid())?;
    let residual = psi.distance(&rebuilt)?;
    Ok(ModeCoefficients {
        modes: modes.to_vec(),
        coefficients,
        residual,
    })
}

/// `(⟨p⁰⟩, ⟨p¹⟩) = Σ_k n_k p_k` for normalized coefficients.
pub fn mean_four_momentum<T: Real>(coeffs: &ModeCoefficients<T>) -> Result<FourMomentum<T>> {
    if !coeffs.is_normalized() {
        return Err(Error::NotNormalized {
            norm_sqr: coeffs.norm_sqr().as_f64(),
        });
    }
    let n = coeffs.occupations();
    let energy = numeric::sum(coeffs.modes.iter().zip(&n).map(|(m, n)| *n * m.momentum().energy));
    let momentum = numeric::sum(coeffs.modes.iter().zip(&n).map(|(m, n)| *n * m.momentum().momentum));
    Ok(FourMomentum::new(energy, momentum))
}

/// `Σ_{+} n_k − Σ_{−} n_k`, the charge in units of the particle charge.
/// Defined for the charged kinds (complex scalar and electron).
pub fn charge_expectation<T: Real>(coeffs: &ModeCoefficients<T>) -> Result<T> {
    if !matches!(
        coeffs.kind(),
        ParticleKind::ComplexScalar { .. } | ParticleKind::Electron { .. }
    ) {
        return Err(Error::UnsupportedKind("charge is defined for charged kinds only"));
    }
    Ok(numeric::sum(coeffs.modes.iter().zip(&coeffs.coefficients).map(|(m, c)| {
        match m.sign() {
            FrequencySign::Positive => c.norm_sqr(),
            FrequencySign::Negative => -c.norm_sqr(),
        }
    })))
}

/// Occupations from a single time row: `|(ψ_k, ψ)_t|²` with the spatial inner
/// product, normalized to sum to one over the given modes.
///
/// Positive and negative frequency modes with the same `p¹` share a spatial
/// profile on one row, so only one sign per `p¹` should be passed.
pub fn fixed_time_occupations<T: Real>(psi: &WaveFunction<T>, modes: &[Mode<T>], it: usize) -> Result<Vec<T>> {
    if modes.is_empty() {
        return Err(Error::EmptyModes);
    }
    let sampled = sample_modes(modes, psi)?;
    let row = psi.time_slice(it)?;
    let dx = psi.grid().dx();
    let raw: Vec<T> = sampled
        .iter()
        .map(|m| {
            let mrow = m.time_slice(it)?;
            let overlap = numeric::dot_conj(mrow, row);
            let norm = numeric::norm_sqr(mrow) * dx;
            Ok((overlap * dx).norm_sqr() / norm)
        })
        .collect::<Result<_>>()?;
    let total = numeric::sum(raw.iter().copied());
    if total <= T::zero() {
        return Err(Error::Degenerate("state has no overlap with the modes on this row".into()));
    }
    Ok(raw.into_iter().map(|v| v / total).collect())
}

/// Spacetime against fixed-time momentum statistics, reported only.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FixedTimeComparison<T> {
    pub time_index: usize,
    pub spacetime: Vec<T>,
    pub fixed_time: Vec<T>,
    pub max_abs_difference: T,
}

pub fn compare_fixed_time<T: Real>(
    psi: &WaveFunction<T>,
    modes: &[Mode<T>],
    it: usize,
) -> Result<FixedTimeComparison<T>> {
    let coeffs = decompose(psi, modes)?;
    let total = coeffs.norm_sqr();
    let spacetime: Vec<T> = coeffs.occupations().into_iter().map(|n| n / total).collect();
    let fixed_time = fixed_time_occupations(psi, modes, it)?;
    let max_abs_difference = spacetime
        .iter()
        .zip(&fixed_time)
        .map(|(a, b)| (*a - *b).abs())
        .fold(T::zero(), T::max);
    Ok(FixedTimeComparison {
        time_index: it,
        spacetime,
        fixed_time,
        max_abs_difference,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::make_mode;
    use crate::lattice::{SpacetimeBox, UniformGrid};
    use crate::lorentz::{boost_modes, Boost};
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn unit_box() -> SpacetimeBox<f64> {
        SpacetimeBox::new(1.0, 1.0).unwrap()
    }

    fn massless(n: i64) -> Mode<f64> {
        make_mode(ParticleKind::ComplexScalar { mass: 0.0 }, n, FrequencySign::Positive, &[c(1.0, 0.0)], unit_box()).unwrap()
    }

    #[test]
    fn single_mode_is_a_unit_vector() {
        let grid = UniformGrid::new(unit_box(), 16, 16).unwrap();
        let modes: Vec<_> = (-3..=3).map(massless).collect();
        let psi = ModeSet::new(vec![modes[6].clone()], vec![c(1.0, 0.0)]).unwrap().synthesize(&grid).unwrap();
        let coeffs = decompose(&psi, &modes).unwrap();
        for (k, ck) in coeffs.coefficients().iter().enumerate() {
            let target = if k == 6 { 1.0 } else { 0.0 };
            assert!((ck - c(target, 0.0)).norm() <= 1e-12);
        }
        assert!(coeffs.residual() <= 1e-12);
    }

    #[test]
    fn equal_mix_moduli() {
        let grid = UniformGrid::new(unit_box(), 16, 16).unwrap();
        let modes = vec![massless(1), massless(2)];
        let s = 0.5f64.sqrt();
        let psi = ModeSet::new(modes.clone(), vec![c(s, 0.0), c(0.0, s)]).unwrap().synthesize(&grid).unwrap();
        let n = decompose(&psi, &modes).unwrap().occupations();
        assert!((n[0] - 0.5).abs() < 1e-12 && (n[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn round_trip_and_parseval() {
        let grid = UniformGrid::new(unit_box(), 32, 32).unwrap();
        let modes: Vec<_> = [-4, -1, 0, 2, 5].iter().map(|&n| massless(n)).collect();
        let coeffs = vec![c(0.3, -0.2), c(0.1, 0.5), c(-0.4, 0.0), c(0.2, 0.2), c(0.0, -0.3)];
        let set = ModeSet::new(modes.clone(), coeffs).unwrap().normalized().unwrap();
        let psi = set.synthesize(&grid).unwrap();
        let out = decompose(&psi, &modes).unwrap();
        for (a, b) in out.coefficients().iter().zip(set.coefficients()) {
            assert!((a - b).norm() <= 1e-10);
        }
        assert!((out.norm_sqr() - psi.norm_sqr()).abs() <= 1e-10);
        assert!((out.norm_sqr() - 1.0).abs() <= 1e-10);
        let rebuilt = out.to_mode_set().unwrap().synthesize(&grid).unwrap();
        assert!(rebuilt.max_abs_diff(&psi).unwrap() <= 1e-10);
    }

    #[test]
    fn residual_reports_outside_span() {
        let grid = UniformGrid::new(unit_box(), 16, 16).unwrap();
        let psi = ModeSet::new(vec![massless(1), massless(2)], vec![c(0.6, 0.0), c(0.8, 0.0)])
            .unwrap()
            .synthesize(&grid)
            .unwrap();
        let out = decompose(&psi, &[massless(1)]).unwrap();
        assert!((out.residual() - 0.8).abs() < 1e-12);
    }

    #[test]
    fn rejects_aliased_and_non_orthonormal() {
        let grid = UniformGrid::new(unit_box(), 8, 8).unwrap();
        let psi = WaveFunction::zeros(grid, ParticleKind::ComplexScalar { mass: 0.0 });
        assert!(matches!(decompose(&psi, &[massless(4)]), Err(Error::Aliased { .. })));
        let kind = ParticleKind::ComplexScalar { mass: 0.7 };
        let plus = make_mode(kind, 1, FrequencySign::Positive, &[c(1.0, 0.0)], unit_box()).unwrap();
        let minus = make_mode(kind, 1, FrequencySign::Negative, &[c(1.0, 0.0)], unit_box()).unwrap();
        let psi = WaveFunction::zeros(grid, kind);
        assert!(matches!(decompose(&psi, &[plus, minus]), Err(Error::NotOrthonormal { .. })));
    }

    #[test]
    fn mean_momentum_examples() {
        let single = ModeCoefficients::from_mode_set(&ModeSet::new(vec![massless(1)], vec![c(0.0, 1.0)]).unwrap());
        let p = mean_four_momentum(&single).unwrap();
        assert_eq!((p.energy, p.momentum), (2.0 * PI, 2.0 * PI));

        let s = 0.5f64.sqrt();
        let mix = ModeCoefficients::from_mode_set(
            &ModeSet::new(vec![massless(1), massless(-1)], vec![c(s, 0.0), c(s, 0.0)]).unwrap(),
        );
        let p = mean_four_momentum(&mix).unwrap();
        assert!(p.momentum.abs() < 1e-12 && (p.energy - 2.0 * PI).abs() < 1e-12);

        let skew = ModeCoefficients::from_mode_set(
            &ModeSet::new(vec![massless(1), massless(-1)], vec![c(0.5, 0.0), c(0.75f64.sqrt(), 0.0)]).unwrap(),
        );
        assert!((mean_four_momentum(&skew).unwrap().momentum + PI).abs() < 1e-12);

        let loose = ModeCoefficients::from_mode_set(&ModeSet::new(vec![massless(1)], vec![c(0.5, 0.0)]).unwrap());
        assert!(matches!(mean_four_momentum(&loose), Err(Error::NotNormalized { .. })));
    }

    #[test]
    fn charge_examples() {
        let kind = ParticleKind::ComplexScalar { mass: 1.0 };
        let mode = |n, s| make_mode(kind, n, s, &[c(1.0, 0.0)], unit_box()).unwrap();
        let charge = |coeffs: Vec<Complex<f64>>, signs: &[FrequencySign]| {
            let modes = signs.iter().enumerate().map(|(n, &s)| mode(n as i64, s)).collect();
            charge_expectation(&ModeCoefficients::from_mode_set(&ModeSet::new(modes, coeffs).unwrap())).unwrap()
        };
        use FrequencySign::*;
        assert!((charge(vec![c(0.6, 0.0), c(0.8, 0.0)], &[Positive, Positive]) - 1.0).abs() < 1e-12);
        let s = 0.5f64.sqrt();
        assert!(charge(vec![c(s, 0.0), c(s, 0.0)], &[Positive, Negative]).abs() < 1e-12);
        let a = 0.8f64.sqrt();
        let b = 0.2f64.sqrt();
        assert!((charge(vec![c(a, 0.0), c(b, 0.0)], &[Positive, Negative]) - 0.6).abs() < 1e-12);

        let neutral = ModeSet::new(
            vec![make_mode(ParticleKind::RealScalar { mass: 1.0 }, 0, Positive, &[c(1.0, 0.0)], unit_box()).unwrap()],
            vec![c(1.0, 0.0)],
        )
        .unwrap();
        assert!(charge_expectation(&ModeCoefficients::from_mode_set(&neutral)).is_err());
    }

    #[test]
    fn occupations_survive_boosts() {
        let kind = ParticleKind::ComplexScalar { mass: 0.5 };
        let modes: Vec<_> = (-2..=2)
            .map(|n| make_mode(kind, n, FrequencySign::Positive, &[c(1.0, 0.0)], unit_box()).unwrap())
            .collect();
        let set = ModeSet::new(modes, vec![c(0.1, 0.2), c(0.3, 0.0), c(0.0, 0.5), c(0.4, 0.1), c(0.2, 0.2)]).unwrap();
        let before = ModeCoefficients::from_mode_set(&set).occupations();
        let after = ModeCoefficients::from_mode_set(&boost_modes(&set, &Boost::new(0.6).unwrap(), None).unwrap()).occupations();
        assert_eq!(before, after);
    }

    #[test]
    fn fixed_time_statistics_agree_for_single_sign() {
        let grid = UniformGrid::new(unit_box(), 16, 16).unwrap();
        let modes = vec![massless(1), massless(-2), massless(3)];
        let set = ModeSet::new(modes.clone(), vec![c(0.6, 0.0), c(0.0, 0.48), c(0.64, 0.0)]).unwrap();
        let psi = set.synthesize(&grid).unwrap();
        let cmp = compare_fixed_time(&psi, &modes, 5).unwrap();
        assert!(cmp.max_abs_difference <= 1e-12);
    }
}
