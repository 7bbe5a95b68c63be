//! Simulated observation sessions: each session reports one appearance event
//! drawn from `g`, and sessions outside the filter box are discarded.
//!
//! Draws are organised in fixed-size streams. Stream `s` of seed `k` is
//! `ChaCha8Rng::seed_from_u64(k)` switched to stream `s`, and covers sessions
//! `[s·STREAM_LEN, (s+1)·STREAM_LEN)`. Streams run in parallel and are merged
//! in stream order, so the output depends only on the seed and the count.

mod stats;

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::weighted::WeightedAliasIndex;
use rand_distr::Distribution;
use rayon::prelude::*;
use serde::Serialize;

pub use stats::{chi_square_sf, gamma_p, gamma_q, ln_gamma};

use crate::density::SpacetimeDensity;
use crate::error::{Error, Result};
use crate::lattice::{CellIndex, Event, SpacetimeBox, UniformGrid};
use crate::scalar::Real;

/// Sessions drawn from one generator stream.
pub const STREAM_LEN: usize = 1 << 16;

/// Minimum expected count per chi-square bin.
pub const MIN_EXPECTED: f64 = 5.0;

/// Alias table over the cells of a normalized density.
#[derive(Clone, Debug)]
pub struct Sampler<T> {
    grid: UniformGrid<T>,
    probabilities: Vec<f64>,
    alias: WeightedAliasIndex<f64>,
    seed: u64,
}

/// Builds an alias sampler with cell probabilities `g(ξ)·w(ξ)`.
pub fn build_sampler<T: Real>(g: &SpacetimeDensity<T>, seed: u64) -> Result<Sampler<T>> {
    if !g.is_normalized() {
        return Err(Error::NotNormalized {
            norm_sqr: g.total().as_f64(),
        });
    }
    let w = g.grid().cell_volume();
    let probabilities: Vec<f64> = g.values().iter().map(|v| (*v * w).as_f64()).collect();
    let alias = WeightedAliasIndex::new(probabilities.clone())
        .map_err(|e| Error::Degenerate(format!("alias table: {e}")))?;
    Ok(Sampler {
        grid: *g.grid(),
        probabilities,
        alias,
        seed,
    })
}

impl<T: Real> Sampler<T> {
    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn grid(&self) -> &UniformGrid<T> {
        &self.grid
    }

    /// `g(ξ)·w(ξ)` in flat cell order.
    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    fn stream(&self, s: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(s);
        rng
    }

    /// One proposed event: a cell from the alias table and a uniform point in it.
    fn draw(&self, rng: &mut ChaCha8Rng) -> (usize, Event<T>) {
        let flat = self.alias.sample(rng);
        let cell = self.grid.cell_at(flat);
        let (u, v): (f64, f64) = (rng.random(), rng.random());
        let t = (T::from_count(cell.it) + T::lit(u)) * self.grid.dt();
        let x = (T::from_count(cell.ix) + T::lit(v)) * self.grid.dx();
        (flat, Event::new(t, x))
    }
}

/// Accepted appearance event with its provenance in the generator streams.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SampledEvent<T> {
    pub t: T,
    pub x: T,
    pub stream: u64,
    /// Session index within the stream.
    pub index: u64,
    /// Flat index of the cell the event was drawn in.
    pub cell: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EventSample<T> {
    pub seed: u64,
    pub filter: SpacetimeBox<T>,
    pub grid: UniformGrid<T>,
    pub sessions: usize,
    pub discarded: usize,
    pub events: Vec<SampledEvent<T>>,
}

impl<T: Real> EventSample<T> {
    pub fn accepted(&self) -> usize {
        self.events.len()
    }

    pub fn accepted_fraction(&self) -> f64 {
        self.accepted() as f64 / self.sessions as f64
    }

    /// Accepted events per cell, flat order.
    pub fn cell_counts(&self) -> Vec<u64> {
        let mut counts = vec![0u64; self.grid.n_cells()];
        for e in &self.events {
            counts[e.cell] += 1;
        }
        counts
    }
}

/// Runs `count` sessions and keeps the events inside `filter`, a box
/// anchored at the origin like the domain of `g`.
pub fn run_sessions<T: Real>(sampler: &Sampler<T>, count: usize, filter: SpacetimeBox<T>) -> Result<EventSample<T>> {
    if count == 0 {
        return Err(Error::InvalidArgument("session count must be at least 1".into()));
    }
    let streams = count.div_ceil(STREAM_LEN);
    let chunks: Vec<(Vec<SampledEvent<T>>, usize)> = (0..streams)
        .into_par_iter()
        .map(|s| {
            let mut rng = sampler.stream(s as u64);
            let len = STREAM_LEN.min(count - s * STREAM_LEN);
            let mut events = Vec::with_capacity(len);
            let mut discarded = 0;
            for index in 0..len {
                let (cell, e) = sampler.draw(&mut rng);
                if filter.contains(e, T::zero()) {
                    events.push(SampledEvent {
                        t: e.t,
                        x: e.x,
                        stream: s as u64,
                        index: index as u64,
                        cell,
                    });
                } else {
                    discarded += 1;
                }
            }
            (events, discarded)
        })
        .collect();
    let discarded = chunks.iter().map(|c| c.1).sum();
    let mut events = Vec::with_capacity(count - discarded);
    for (chunk, _) in chunks {
        events.extend(chunk);
    }
    Ok(EventSample {
        seed: sampler.seed,
        filter,
        grid: sampler.grid,
        sessions: count,
        discarded,
        events,
    })
}

/// How cells are grouped into chi-square bins.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Binning {
    /// One bin per cell; every cell with nonzero expectation must expect at
    /// least [`MIN_EXPECTED`] events.
    Cells,
    /// Consecutive cells (flat order) merged until each bin expects at least
    /// [`MIN_EXPECTED`] events.
    Coarsened,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GoodnessOfFit {
    pub chi2: f64,
    pub dof: usize,
    pub p_value: f64,
    pub bins: usize,
    pub events: usize,
}

/// Fraction of `cell` inside `filter`.
fn overlap_fraction<T: Real>(grid: &UniformGrid<T>, cell: CellIndex, filter: &SpacetimeBox<T>) -> f64 {
    let span = |lo: T, h: T, hi: T| ((lo + h).min(hi) - lo.max(T::zero())).max(T::zero()) / h;
    let t0 = T::from_count(cell.it) * grid.dt();
    let x0 = T::from_count(cell.ix) * grid.dx();
    (span(t0, grid.dt(), filter.time_extent()) * span(x0, grid.dx(), filter.space_extent())).as_f64()
}

/// Pearson chi-square of the accepted events against `g(ξ)·w(ξ)` restricted
/// to the filter box, with the p-value from the chi-square upper tail.
pub fn goodness_of_fit<T: Real>(sample: &EventSample<T>, g: &SpacetimeDensity<T>, binning: Binning) -> Result<GoodnessOfFit> {
    if !g.grid().same_shape(&sample.grid) || g.grid().bounds() != sample.grid.bounds() {
        return Err(Error::GridMismatch("sample and density use different grids".into()));
    }
    let n = sample.accepted();
    if n == 0 {
        return Err(Error::Degenerate("no accepted events".into()));
    }
    let w = g.grid().cell_volume();
    let weights: Vec<f64> = g
        .grid()
        .cells()
        .map(|c| (g.value(c) * w).as_f64() * overlap_fraction(g.grid(), c, &sample.filter))
        .collect();
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return Err(Error::Degenerate("filter box has zero probability".into()));
    }
    let expected: Vec<f64> = weights.iter().map(|p| p / total * n as f64).collect();
    let observed = sample.cell_counts();

    // Events in cells of zero expectation make the fit impossible.
    if expected.iter().zip(&observed).any(|(e, o)| *e == 0.0 && *o > 0) {
        return Ok(GoodnessOfFit {
            chi2: f64::INFINITY,
            dof: 0,
            p_value: 0.0,
            bins: 0,
            events: n,
        });
    }

    let mut bins: Vec<(f64, u64)> = Vec::new();
    match binning {
        Binning::Cells => {
            let under = expected.iter().filter(|e| **e > 0.0 && **e < MIN_EXPECTED).count();
            if under > 0 {
                return Err(Error::UnderfilledBins(under));
            }
            bins.extend(expected.iter().zip(&observed).filter(|(e, _)| **e > 0.0).map(|(e, o)| (*e, *o)));
        }
        Binning::Coarsened => {
            let mut acc = (0.0, 0u64);
            for (e, o) in expected.iter().zip(&observed) {
                acc.0 += e;
                acc.1 += o;
                if acc.0 >= MIN_EXPECTED {
                    bins.push(acc);
                    acc = (0.0, 0);
                }
            }
            if acc.0 > 0.0 {
                match bins.last_mut() {
                    Some(last) => {
                        last.0 += acc.0;
                        last.1 += acc.1;
                    }
                    None => bins.push(acc),
                }
            }
        }
    }
    let chi2: f64 = bins.iter().map(|(e, o)| (*o as f64 - e).powi(2) / e).sum();
    let dof = bins.len().saturating_sub(1);
    Ok(GoodnessOfFit {
        chi2,
        dof,
        p_value: chi_square_sf(chi2, dof),
        bins: bins.len(),
        events: n,
    })
}

/// Writes events as CSV with header `t,x,stream,index`.
pub fn write_events_csv<T: Real, W: Write>(sample: &EventSample<T>, mut out: W) -> std::io::Result<()> {
    writeln!(out, "t,x,stream,index")?;
    for e in &sample.events {
        writeln!(out, "{:.16e},{:.16e},{},{}", e.t.as_f64(), e.x.as_f64(), e.stream, e.index)?;
    }
    out.flush()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::{density, marginal_spatial};
    use crate::fields::{make_mode, FrequencySign, ModeSet, ParticleKind};
    use num_complex::Complex;

    fn unit_box() -> SpacetimeBox<f64> {
        SpacetimeBox::new(1.0, 1.0).unwrap()
    }

    fn uniform(n: usize) -> SpacetimeDensity<f64> {
        let grid = UniformGrid::new(unit_box(), n, n).unwrap();
        SpacetimeDensity::from_values(grid, vec![1.0; n * n]).unwrap()
    }

    fn interference(n: usize) -> SpacetimeDensity<f64> {
        let grid = UniformGrid::new(unit_box(), n, n).unwrap();
        let s = 0.5f64.sqrt();
        let modes = [0, 1]
            .iter()
            .map(|&k| {
                make_mode(ParticleKind::ComplexScalar { mass: 0.0 }, k, FrequencySign::Positive, &[Complex::new(1.0, 0.0)], unit_box())
                    .unwrap()
            })
            .collect();
        let set = ModeSet::new(modes, vec![Complex::new(s, 0.0); 2]).unwrap();
        density(&set.synthesize(&grid).unwrap())
    }

    #[test]
    fn rejects_unnormalized_and_empty_runs() {
        let grid = UniformGrid::new(unit_box(), 4, 4).unwrap();
        let g = SpacetimeDensity::from_values(grid, vec![2.0; 16]).unwrap();
        assert!(matches!(build_sampler(&g, 1), Err(Error::NotNormalized { .. })));
        let s = build_sampler(&uniform(4), 1).unwrap();
        assert!(run_sessions(&s, 0, unit_box()).is_err());
    }

    #[test]
    fn deterministic_streams() {
        let s = build_sampler(&interference(16), 42).unwrap();
        let a = run_sessions(&s, 200_000, unit_box()).unwrap();
        let b = run_sessions(&s, 200_000, unit_box()).unwrap();
        assert_eq!(a, b);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let c = pool.install(|| run_sessions(&s, 200_000, unit_box()).unwrap());
        assert_eq!(a, c);
        let other = run_sessions(&build_sampler(&interference(16), 43).unwrap(), 200_000, unit_box()).unwrap();
        assert_ne!(a.events, other.events);
        // A prefix of the sessions is the same regardless of the total count.
        let short = run_sessions(&s, 1000, unit_box()).unwrap();
        assert_eq!(short.events[..], a.events[..1000]);
    }

    #[test]
    fn point_mass() {
        let grid = UniformGrid::new(unit_box(), 4, 4).unwrap();
        let mut v = vec![0.0; 16];
        v[6] = 16.0;
        let g = SpacetimeDensity::from_values(grid, v).unwrap();
        let sample = run_sessions(&build_sampler(&g, 5).unwrap(), 10_000, unit_box()).unwrap();
        assert!(sample.events.iter().all(|e| e.cell == 6));
        assert!(sample.events.iter().all(|e| grid.locate(Event::new(e.t, e.x)) == Some(grid.cell_at(6))));
        let fit = goodness_of_fit(&sample, &g, Binning::Cells).unwrap();
        assert_eq!(fit.dof, 0);
        assert_eq!(fit.p_value, 1.0);
    }

    #[test]
    fn uniform_frequencies_within_multinomial_bounds() {
        let g = uniform(8);
        let s = build_sampler(&g, 7).unwrap();
        for count in [10_000, 100_000, 1_000_000] {
            let sample = run_sessions(&s, count, unit_box()).unwrap();
            assert_eq!(sample.discarded, 0);
            let p = 1.0 / 64.0;
            let sigma = (count as f64 * p * (1.0 - p)).sqrt();
            for o in sample.cell_counts() {
                assert!((o as f64 - count as f64 * p).abs() <= 4.0 * sigma);
            }
        }
    }

    #[test]
    fn half_box_filter_acceptance() {
        let g = interference(16);
        let s = build_sampler(&g, 11).unwrap();
        let count = 1_000_000;
        let half = SpacetimeBox::new(1.0, 0.5).unwrap();
        let sample = run_sessions(&s, count, half).unwrap();
        let q = g.grid().region_from_subbox((0.0, 1.0), (0.0, 0.5)).unwrap();
        let p = g.region_sum(&q).unwrap();
        let sigma = (p * (1.0 - p) / count as f64).sqrt();
        assert!((sample.accepted_fraction() - p).abs() <= 4.0 * sigma);
        assert_eq!(sample.accepted() + sample.discarded, count);
        assert!(sample.events.iter().all(|e| e.x <= 0.5));
        let fit = goodness_of_fit(&sample, &g, Binning::Coarsened).unwrap();
        assert!(fit.p_value >= 0.001);
        assert!(fit.bins > 100 && fit.bins <= 128);
    }

    #[test]
    fn fit_and_power() {
        let g = interference(16);
        let sample = run_sessions(&build_sampler(&g, 3).unwrap(), 1_000_000, unit_box()).unwrap();
        let fit = goodness_of_fit(&sample, &g, Binning::Coarsened).unwrap();
        assert!(fit.p_value >= 0.001, "{fit:?}");
        assert!(fit.dof > 200);

        let grid = *g.grid();
        let flat = run_sessions(&build_sampler(&uniform(16), 3).unwrap(), 1_000_000, unit_box()).unwrap();
        let flat = EventSample { grid, ..flat };
        let fit = goodness_of_fit(&flat, &g, Binning::Coarsened).unwrap();
        assert!(fit.p_value < 1e-6);
    }

    #[test]
    fn underfilled_bins() {
        let g = interference(32);
        let sample = run_sessions(&build_sampler(&g, 3).unwrap(), 2_000, unit_box()).unwrap();
        assert!(matches!(goodness_of_fit(&sample, &g, Binning::Cells), Err(Error::UnderfilledBins(_))));
        let fit = goodness_of_fit(&sample, &g, Binning::Coarsened).unwrap();
        assert!(fit.bins < 1024 && fit.bins > 100);
    }

    #[test]
    fn spatial_mean_matches_marginal() {
        let g = interference(16);
        let sample = run_sessions(&build_sampler(&g, 21).unwrap(), 1_000_000, unit_box()).unwrap();
        let g1 = marginal_spatial(&g).unwrap();
        let dx = g.grid().dx();
        let mean: f64 = g1.values.iter().enumerate().map(|(i, v)| v * g.grid().space_center(i) * dx).sum();
        let second: f64 = g1.values.iter().enumerate().map(|(i, v)| v * g.grid().space_center(i).powi(2) * dx).sum();
        // Jitter inside the cells adds dx²/12 to the variance.
        let var = second - mean * mean + dx * dx / 12.0;
        let n = sample.accepted() as f64;
        let emp = sample.events.iter().map(|e| e.x).sum::<f64>() / n;
        assert!((emp - mean).abs() <= 3.0 * (var / n).sqrt());
    }

    #[test]
    fn csv_header_and_rows() {
        let s = build_sampler(&uniform(4), 9).unwrap();
        let sample = run_sessions(&s, 3, unit_box()).unwrap();
        let mut buf = Vec::new();
        write_events_csv(&sample, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "t,x,stream,index");
        assert_eq!(lines.len(), 4);
        assert!(lines[1].ends_with(",0,0"));
    }
}
