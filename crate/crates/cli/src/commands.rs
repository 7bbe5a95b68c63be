use std::sync::Arc;

use num_complex::Complex;
use serde_json::{json, Value};

use spacetime_density::density::{
    density, electron_temporal_check, marginal_spatial, marginal_temporal, region_probability, SpacetimeDensity,
};
use spacetime_density::fields::{ParticleKind, WaveFunction};
use spacetime_density::fock::{
    cell_basis_count, expected_count, lambda_region, single_particle_subsystem, specialized_lambda, FockState,
    ModeBasis, OccupationBasis, Statistics,
};
use spacetime_density::lattice::UniformGrid;
use spacetime_density::lorentz::{
    check_density_invariance, photon_gauge_family_check, probes_in_both_frames, region_invariance_trend, Boost,
};
use spacetime_density::momentum::{charge_expectation, decompose, mean_four_momentum, ModeCoefficients};
use spacetime_density::sampling::{build_sampler, goodness_of_fit, run_sessions, write_events_csv, Binning};
use spacetime_density::uncertainty::{gaussian_comb_state, moment_report, MomentReport};

use crate::config::Scenario;
use crate::error::{CliError, CliResult};
use crate::output::{real, Csv, OutDir};

/// Tolerance of the analytic boost transport.
const INVARIANCE_TOLERANCE: f64 = 1e-10;
/// Tolerance of `|⟨N⟩ − P|` in the N = 1 subsystem.
const EQUIVALENCE_TOLERANCE: f64 = 1e-12;
/// Tolerance of `|‖ψ‖² − 1|` after grid normalization.
const NORM_TOLERANCE: f64 = 1e-10;

/// Result of a command: files are written either way; `failure` carries a
/// numeric assertion that did not hold.
pub struct Outcome {
    pub summary: String,
    pub failure: Option<String>,
}

fn kind_json(kind: &ParticleKind<f64>) -> Value {
    json!({ "kind": kind.name(), "mass": kind.mass() })
}

fn grid_json(grid: &UniformGrid<f64>) -> Value {
    json!({ "n_time": grid.n_time(), "n_space": grid.n_space(), "dt": grid.dt(), "dx": grid.dx() })
}

/// Grid wave function of the configured modes, normalized on the grid.
fn normalized_state(s: &Scenario, grid: &UniformGrid<f64>) -> CliResult<(WaveFunction<f64>, f64)> {
    let raw = s.mode_set()?.synthesize(grid)?;
    let before = raw.norm_sqr();
    Ok((raw.normalize()?, before))
}

fn region_rows(s: &Scenario, g: &SpacetimeDensity<f64>) -> CliResult<Vec<Value>> {
    s.regions
        .iter()
        .map(|r| {
            Ok(json!({
                "name": r.name,
                "t": [r.t.0, r.t.1],
                "x": [r.x.0, r.x.1],
                "cells": r.region.len(),
                "probability": region_probability(g, &r.region)?,
            }))
        })
        .collect()
}

pub fn density_cmd(s: &Scenario, out: &mut OutDir) -> CliResult<Outcome> {
    let (psi, grid_norm_before) = normalized_state(s, &s.grid)?;
    let g = density(&psi);
    let grid = &s.grid;

    let mut csv = Csv::new(&["it", "ix", "t", "x", "g"]);
    for c in grid.cells() {
        let e = grid.cell_center(c);
        csv.row(&[c.it.to_string(), c.ix.to_string(), real(e.t), real(e.x), real(g.value(c))]);
    }
    out.write("g.csv", &csv.into_bytes())?;

    let gx = marginal_spatial(&g)?;
    let mut csv = Csv::new(&["ix", "x", "g1"]);
    for (ix, v) in gx.values.iter().enumerate() {
        csv.row(&[ix.to_string(), real(grid.space_center(ix)), real(*v)]);
    }
    out.write("marginal_x.csv", &csv.into_bytes())?;

    let gt = marginal_temporal(&g)?;
    let mut csv = Csv::new(&["it", "t", "g0"]);
    for (it, v) in gt.values.iter().enumerate() {
        csv.row(&[it.to_string(), real(grid.time_center(it)), real(*v)]);
    }
    out.write("marginal_t.csv", &csv.into_bytes())?;

    let regions = region_rows(s, &g)?;
    let electron = match s.kind {
        ParticleKind::Electron { .. } => Some(electron_temporal_check(&psi)?),
        _ => None,
    };
    let total = g.total();
    out.write_json(
        "summary.json",
        &json!({
            "particle": kind_json(&s.kind),
            "grid": grid_json(grid),
            "coefficient_norm_sqr_input": s.coefficient_norm_sqr,
            "grid_norm_sqr_before_normalization": grid_norm_before,
            "total": total,
            "marginal_x_total": gx.total(),
            "marginal_t_total": gt.total(),
            "regions": regions,
            "electron_temporal": electron,
        }),
    )?;

    let mut summary = format!("density: total {total:.12}");
    for (r, v) in s.regions.iter().zip(&regions) {
        summary += &format!(", P({}) = {:.12}", r.name, v["probability"].as_f64().unwrap_or(f64::NAN));
    }
    let failure = ((total - 1.0).abs() > NORM_TOLERANCE).then(|| format!("|total - 1| = {:e}", (total - 1.0).abs()));
    Ok(Outcome { summary, failure })
}

pub fn boost_check_cmd(s: &Scenario, out: &mut OutDir) -> CliResult<Outcome> {
    let cfg = s
        .boost
        .as_ref()
        .ok_or_else(|| CliError::config("boost", "boost-check needs a [boost] section"))?;
    let set = s.mode_set()?;
    let boost = Boost::new(cfg.beta)?;
    let seed = s.sampling.as_ref().map_or(0, |c| c.seed);
    let probes = probes_in_both_frames(&s.bounds, &boost, cfg.probes, seed)?;
    let pointwise = check_density_invariance(set, &boost, &probes)?;

    let mut csv = Csv::new(&[
        "region",
        "n",
        "probability",
        "boosted_probability",
        "relative_difference",
        "source_cells",
        "covering_cells",
    ]);
    let mut tables = Vec::new();
    for r in &s.regions {
        match region_invariance_trend(set, &boost, r.t, r.x, &cfg.resolutions) {
            Ok(rows) => {
                let mismatch: Vec<f64> = rows.iter().map(|q| (q.boosted_probability - q.probability).abs()).collect();
                let ratios: Vec<f64> = mismatch.windows(2).map(|w| w[0] / w[1]).collect();
                for q in &rows {
                    csv.row(&[
                        r.name.clone(),
                        q.n_time.to_string(),
                        real(q.probability),
                        real(q.boosted_probability),
                        real(q.relative_difference),
                        q.source_cells.to_string(),
                        q.covering_cells.to_string(),
                    ]);
                }
                tables.push(json!({ "name": r.name, "rows": rows, "refinement_ratios": ratios }));
            }
            Err(e) => tables.push(json!({ "name": r.name, "error": e.to_string() })),
        }
    }
    out.write("region_invariance.csv", &csv.into_bytes())?;

    let gauge = match s.kind {
        ParticleKind::Photon => Some(photon_gauge_family_check(&set.synthesize(&s.grid)?, &boost)?),
        _ => None,
    };
    out.write_json(
        "boost.json",
        &json!({
            "particle": kind_json(&s.kind),
            "beta": boost.beta(),
            "gamma": boost.gamma(),
            "pointwise": pointwise,
            "regions": tables,
            "photon_gauge_family": gauge,
        }),
    )?;

    let mut failure = None;
    if pointwise.max_deviation > INVARIANCE_TOLERANCE {
        failure = Some(format!("max |g'(Lx) - g(x)| = {:e}", pointwise.max_deviation));
    }
    if let Some(r) = &gauge {
        if !r.calibrated {
            failure = Some(format!("photon calibration lost (residual {:e})", r.residual_after));
        }
    }
    Ok(Outcome {
        summary: format!(
            "boost-check: beta {}, max deviation {:.3e} over {} probes",
            boost.beta(),
            pointwise.max_deviation,
            pointwise.probes
        ),
        failure,
    })
}

pub fn momentum_cmd(s: &Scenario, out: &mut OutDir) -> CliResult<Outcome> {
    let set = s.mode_set()?;
    let coeffs = ModeCoefficients::from_mode_set(set);
    let mut csv = Csv::new(&["n", "freq_sign", "p0", "p1", "C_re", "C_im", "n_k"]);
    for (m, c) in coeffs.modes().iter().zip(coeffs.coefficients()) {
        let p = m.momentum();
        csv.row(&[
            m.index().to_string(),
            m.sign().symbol().to_string(),
            real(p.energy),
            real(p.momentum),
            real(c.re),
            real(c.im),
            real(c.norm_sqr()),
        ]);
    }
    out.write("spectrum.csv", &csv.into_bytes())?;

    let psi = set.synthesize(&s.grid)?;
    let recovered = match decompose(&psi, set.modes()) {
        Ok(d) => {
            let dev = d
                .coefficients()
                .iter()
                .zip(coeffs.coefficients())
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            json!({ "max_coefficient_deviation": dev, "residual": d.residual() })
        }
        Err(e) => json!({ "error": e.to_string() }),
    };
    let p = mean_four_momentum(&coeffs)?;
    let charge = charge_expectation(&coeffs).ok();
    let total: f64 = coeffs.occupations().iter().sum();
    out.write_json(
        "momentum.json",
        &json!({
            "particle": kind_json(&s.kind),
            "total_occupation": total,
            "mean_four_momentum": p,
            "charge": charge,
            "grid_decomposition": recovered,
        }),
    )?;
    Ok(Outcome {
        summary: format!("momentum: <p0> = {:.12}, <p1> = {:.12}", p.energy, p.momentum),
        failure: None,
    })
}

pub fn sample_cmd(s: &Scenario, out: &mut OutDir) -> CliResult<Outcome> {
    let cfg = s
        .sampling
        .as_ref()
        .ok_or_else(|| CliError::config("sampling", "sample needs a [sampling] section"))?;
    let (psi, _) = normalized_state(s, &s.grid)?;
    let g = density(&psi);
    let sampler = build_sampler(&g, cfg.seed)?;
    let sample = run_sessions(&sampler, cfg.events, cfg.filter)?;
    let mut buf = Vec::new();
    write_events_csv(&sample, &mut buf).map_err(|e| CliError::io("events.csv", e))?;
    out.write("events.csv", &buf)?;
    let fit = goodness_of_fit(&sample, &g, cfg.binning)?;
    out.write_json(
        "fit.json",
        &json!({
            "seed": cfg.seed,
            "sessions": sample.sessions,
            "accepted": sample.accepted(),
            "discarded": sample.discarded,
            "accepted_fraction": sample.accepted_fraction(),
            "filter": [cfg.filter.time_extent(), cfg.filter.space_extent()],
            "binning": match cfg.binning { Binning::Cells => "cells", Binning::Coarsened => "coarsened" },
            "chi2": fit.chi2,
            "dof": fit.dof,
            "p": fit.p_value,
            "bins": fit.bins,
        }),
    )?;
    Ok(Outcome {
        summary: format!(
            "sample: {} of {} sessions accepted, chi2 {:.3} on {} dof, p = {:.4}",
            sample.accepted(),
            sample.sessions,
            fit.chi2,
            fit.dof,
            fit.p_value
        ),
        failure: None,
    })
}

pub fn fock_cmd(s: &Scenario, out: &mut OutDir) -> CliResult<Outcome> {
    let cfg = s
        .fock
        .as_ref()
        .ok_or_else(|| CliError::config("fock", "fock needs a [fock] section"))?;
    if s.regions.is_empty() {
        return Err(CliError::config("regions", "fock needs at least one [[regions]] entry"));
    }
    let set = s.mode_set()?;
    let m = set.len();
    let mb = ModeBasis::from_modes(set.modes(), &s.grid)?;
    let fock = Arc::new(OccupationBasis::new(cfg.statistics, m, cfg.max_total)?);
    let terms: Vec<(Vec<usize>, Complex<f64>)> = set
        .coefficients()
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let mut n = vec![0; m];
            n[i] = 1;
            (n, *c)
        })
        .collect();
    let borrowed: Vec<(&[usize], Complex<f64>)> = terms.iter().map(|(n, c)| (n.as_slice(), *c)).collect();
    let phi = FockState::from_terms(fock.clone(), &borrowed)?.normalized()?;

    let mut csv = Csv::new(&["region", "i", "j", "re", "im"]);
    let mut lambda_rows = Vec::new();
    for r in &s.regions {
        let l = lambda_region(&r.region, &mb)?;
        for i in 0..m {
            for j in 0..m {
                let v = l.get(i, j);
                csv.row(&[r.name.clone(), i.to_string(), j.to_string(), real(v.re), real(v.im)]);
            }
        }
        let off = specialized_lambda(&s.kind, &r.region, &mb).ok().map(|sp| sp.off_sector());
        lambda_rows.push(json!({
            "name": r.name,
            "expected_count": expected_count(&phi, &l)?,
            "off_sector": off,
        }));
    }
    out.write("lambda.csv", &csv.into_bytes())?;

    let norm_v = set.region_integral((0.0, s.bounds.time_extent()), (0.0, s.bounds.space_extent()));
    let mut csv = Csv::new(&["n", "region", "expected_count", "probability", "analytic", "abs_diff"]);
    let mut worst = 0.0f64;
    for &n in &cfg.refinements {
        let grid = UniformGrid::new(s.bounds, n, n)?;
        let (psi, _) = normalized_state(s, &grid)?;
        let g = density(&psi);
        let sub = single_particle_subsystem(&psi)?;
        for r in &s.regions {
            let q = s.region_on(&grid, r)?;
            let count = expected_count(&sub, &cell_basis_count(&q, &grid)?)?;
            let p = region_probability(&g, &q)?;
            let analytic = set.region_integral(r.t, r.x) / norm_v;
            worst = worst.max((count - p).abs());
            csv.row(&[n.to_string(), r.name.clone(), real(count), real(p), real(analytic), real((count - p).abs())]);
        }
    }
    out.write("equivalence.csv", &csv.into_bytes())?;
    out.write_json(
        "fock.json",
        &json!({
            "particle": kind_json(&s.kind),
            "statistics": match cfg.statistics { Statistics::Bose => "bose", Statistics::Fermi => "fermi" },
            "modes": m,
            "max_total": cfg.max_total,
            "dimension": fock.dim(),
            "regions": lambda_rows,
            "max_equivalence_deviation": worst,
        }),
    )?;
    let failure = (worst > EQUIVALENCE_TOLERANCE).then(|| format!("|<N> - P| = {worst:e}"));
    Ok(Outcome {
        summary: format!("fock: dimension {}, max |<N> - P| {worst:.3e}", fock.dim()),
        failure,
    })
}

pub fn uncertainty_cmd(s: &Scenario, out: &mut OutDir) -> CliResult<Outcome> {
    let report: MomentReport<f64> = match &s.comb {
        Some((time, space)) => {
            let (psi, spectrum) = gaussian_comb_state(&s.grid, *time, *space)?;
            moment_report(&density(&psi), &spectrum)?
        }
        None => {
            let (psi, _) = normalized_state(s, &s.grid)?;
            let coeffs = ModeCoefficients::from_mode_set(s.mode_set()?);
            moment_report(&density(&psi), &coeffs.spectrum())?
        }
    };
    out.write("report.txt", report.to_record().as_bytes())?;
    out.write_json("report.json", &report)?;
    Ok(Outcome {
        summary: format!(
            "uncertainty: dx1 dp1 = {:.6}, dx0 dp0 = {:.6}{}",
            report.product_space,
            report.product_time,
            if report.degenerate { " (degenerate)" } else { "" }
        ),
        failure: None,
    })
}
