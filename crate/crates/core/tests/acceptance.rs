//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Runs as a plain binary so the lines always reach the terminal.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use spacetime_density::density::{
    conditional_spatial, density, electron_temporal_check, marginal_spatial, marginal_temporal, region_probability,
};
use spacetime_density::fields::{
    fd_evolve_klein_gordon, gauge_transform, make_electron_mode, make_mode, sample_scalar_field, FourVectorField,
    FrequencySign, Mode, ModeSet, ParticleKind,
};
use spacetime_density::fock::{
    cell_basis_count, expected_count, field_expansion_deviation, lambda_region, single_particle_subsystem, ModeBasis,
    OccupationBasis, Statistics,
};
use spacetime_density::lattice::{SpacetimeBox, UniformGrid};
use spacetime_density::lorentz::{
    boost_modes, check_density_invariance, photon_gauge_family_check, probes_in_both_frames, region_invariance_trend,
    Boost,
};
use spacetime_density::momentum::{decompose, mean_four_momentum, ModeCoefficients};
use spacetime_density::sampling::{build_sampler, goodness_of_fit, run_sessions, Binning};
use spacetime_density::uncertainty::{gaussian_comb_state, uncertainty_report, CombAxis, PRODUCT_TOLERANCE};

type C = Complex<f64>;
type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn c(re: f64, im: f64) -> C {
    Complex::new(re, im)
}

fn unit_box() -> SpacetimeBox<f64> {
    SpacetimeBox::new(1.0, 1.0).unwrap()
}

fn grid(nt: usize, nx: usize) -> UniformGrid<f64> {
    UniformGrid::new(unit_box(), nt, nx).unwrap()
}

fn check(ok: bool, what: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what.into())
    }
}

fn sci(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.3e}")).collect();
    format!("[{}]", parts.join(", "))
}

fn sign(positive: bool) -> FrequencySign {
    if positive {
        FrequencySign::Positive
    } else {
        FrequencySign::Negative
    }
}

fn random_unit(rng: &mut ChaCha8Rng, m: usize) -> Vec<C> {
    let v: Vec<C> = (0..m).map(|_| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect();
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / n).collect()
}

/// Random band-limited superposition of 1 to 5 modes with distinct `(n, sign)`.
fn random_state(kind: ParticleKind<f64>, rng: &mut ChaCha8Rng, band: i64) -> ModeSet<f64> {
    let count = rng.random_range(1..=5);
    let mut labels = Vec::new();
    while labels.len() < count {
        let n = rng.random_range(-band + 1..band);
        let s = rng.random_bool(0.5);
        // Photon packets move in one direction.
        if (kind == ParticleKind::Photon && n <= 0) || labels.contains(&(n, s)) {
            continue;
        }
        labels.push((n, s));
    }
    let modes: Vec<Mode<f64>> = labels
        .iter()
        .map(|&(n, s)| match kind {
            ParticleKind::Electron { mass } => make_electron_mode(n, sign(s), mass, unit_box()).unwrap(),
            _ => make_mode(kind, n, sign(s), &random_unit(rng, kind.components()), unit_box()).unwrap(),
        })
        .collect();
    let coeffs = (0..count).map(|_| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect();
    ModeSet::new(modes, coeffs).unwrap()
}

fn kinds(rng: &mut ChaCha8Rng) -> Vec<ParticleKind<f64>> {
    let mut mass = || rng.random_range(0.1..3.0);
    vec![
        ParticleKind::RealScalar { mass: mass() },
        ParticleKind::ComplexScalar { mass: mass() },
        ParticleKind::MassiveVector { mass: mass() },
        ParticleKind::Photon,
        ParticleKind::Electron { mass: mass() },
    ]
}

fn scalar_modes(kind: ParticleKind<f64>, labels: &[(i64, bool)]) -> Vec<Mode<f64>> {
    labels
        .iter()
        .map(|&(n, s)| make_mode(kind, n, sign(s), &[c(1.0, 0.0)], unit_box()).unwrap())
        .collect()
}

fn scalar_set() -> ModeSet<f64> {
    let modes = scalar_modes(ParticleKind::ComplexScalar { mass: 0.8 }, &[(0, true), (1, true), (-2, true)]);
    ModeSet::new(modes, vec![c(0.6, 0.0), c(0.0, 0.6), c(0.3, 0.4)]).unwrap()
}

fn photon_set() -> ModeSet<f64> {
    let w = [c(0.6, 0.0), c(0.0, 0.8)];
    let modes = vec![
        make_mode(ParticleKind::Photon, 1, FrequencySign::Positive, &w, unit_box()).unwrap(),
        make_mode(ParticleKind::Photon, 2, FrequencySign::Positive, &w, unit_box()).unwrap(),
        make_mode(ParticleKind::Photon, 3, FrequencySign::Negative, &[c(1.0, 0.0), c(0.0, 0.0)], unit_box()).unwrap(),
    ];
    ModeSet::new(modes, vec![c(0.6, 0.0), c(0.0, 0.6), c(0.3, 0.4)]).unwrap()
}

fn interference_set() -> ModeSet<f64> {
    let s = 0.5f64.sqrt();
    let modes = scalar_modes(ParticleKind::ComplexScalar { mass: 0.0 }, &[(0, true), (1, true)]);
    ModeSet::new(modes, vec![c(s, 0.0), c(s, 0.0)]).unwrap()
}

fn normalization_and_marginals() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let g16 = grid(16, 16);
    let (mut norm_dev, mut marg_dev, mut recon_dev) = (0.0f64, 0.0f64, 0.0f64);
    for kind in kinds(&mut rng) {
        for _ in 0..20 {
            let psi = random_state(kind, &mut rng, 8).synthesize(&g16).map_err(|e| e.to_string())?;
            let psi = psi.normalize().map_err(|e| e.to_string())?;
            norm_dev = norm_dev.max((psi.norm_sqr() - 1.0).abs());
            let g = density(&psi);
            let (gx, gt) = (marginal_spatial(&g).unwrap(), marginal_temporal(&g).unwrap());
            marg_dev = marg_dev.max((gx.total() - 1.0).abs()).max((gt.total() - 1.0).abs());
            for it in 0..g16.n_time() {
                let cond = conditional_spatial(&g, it).map_err(|e| e.to_string())?;
                for ix in 0..g16.n_space() {
                    let rebuilt = gt.values[it] * cond.values[ix];
                    recon_dev = recon_dev.max((rebuilt - g.values()[it * 16 + ix]).abs());
                }
            }
        }
    }
    let detail = format!("norm {norm_dev:.2e}, marginals {marg_dev:.2e}, reconstruction {recon_dev:.2e}");
    check(norm_dev <= 1e-12 && marg_dev <= 1e-10 && recon_dev <= 1e-12, &detail)?;
    Ok(detail)
}

fn electron_temporal_law() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let g = grid(32, 32);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let mass = rng.random_range(0.2..3.0);
        let set = random_state(ParticleKind::Electron { mass }, &mut rng, 16);
        let psi = set.synthesize(&g).unwrap().normalize().unwrap();
        let r = electron_temporal_check(&psi).map_err(|e| e.to_string())?;
        worst = worst.max(r.max_relative_deviation);
    }
    let modes = scalar_modes(ParticleKind::ComplexScalar { mass: 1.3 }, &[(0, true), (0, false), (2, true)]);
    let set = ModeSet::new(modes, vec![c(0.6, 0.0), c(0.6, 0.2), c(0.0, 0.5)]).unwrap();
    let g0 = marginal_temporal(&density(&set.synthesize(&g).unwrap().normalize().unwrap())).unwrap();
    let spread = g0.values.iter().copied().fold(f64::MIN, f64::max) - g0.values.iter().copied().fold(f64::MAX, f64::min);
    let detail = format!("electron max |g0 cT - 1| {worst:.2e}, scalar g0 spread {spread:.3e}");
    check(worst <= 1e-10 && spread >= 1e-3, &detail)?;
    Ok(detail)
}

fn lorentz_invariance() -> Outcome {
    let mut worst = 0.0f64;
    for set in [scalar_set(), photon_set()] {
        for beta in [0.3, 0.5, 0.7] {
            let b = Boost::new(beta).unwrap();
            let probes = probes_in_both_frames(set.bounds(), &b, 400, 3).map_err(|e| e.to_string())?;
            let r = check_density_invariance(&set, &b, &probes).map_err(|e| e.to_string())?;
            worst = worst.max(r.max_deviation);
        }
    }
    let trend = region_invariance_trend(&scalar_set(), &Boost::new(0.5).unwrap(), (0.5, 0.75), (0.5, 0.75), &[16, 32, 64, 128])
        .map_err(|e| e.to_string())?;
    let mismatch: Vec<f64> = trend.iter().map(|r| (r.boosted_probability - r.probability).abs()).collect();
    let ratios: Vec<f64> = mismatch.windows(2).map(|w| w[0] / w[1]).collect();
    // Asserted on the 16/32/64 ladder; the 64 to 128 step is reported only.
    let detail = format!(
        "max |g'(Lx)-g(x)| {worst:.2e}, region mismatch ratios 16/32/64 {:.3?}, 64/128 {:.3}",
        &ratios[..2],
        ratios[2]
    );
    check(worst <= 1e-10 && ratios[..2].iter().all(|r| *r >= 1.8), &detail)?;
    Ok(detail)
}

fn photon_gauge_family() -> Outcome {
    let psi = photon_set().synthesize(&grid(32, 32)).unwrap();
    let mut residual = 0.0f64;
    for beta in [-0.6, 0.0, 0.3, 0.5, 0.7, 0.9] {
        let r = photon_gauge_family_check(&psi, &Boost::new(beta).unwrap()).map_err(|e| e.to_string())?;
        residual = residual.max(r.residual_after);
        check(r.calibrated, format!("calibration lost at beta {beta}"))?;
    }
    let chi = sample_scalar_field(psi.grid(), |e| 0.1 * (2.0 * PI * e.x).sin() * e.t);
    let before = FourVectorField::from_photon(&psi).unwrap().density();
    let after = gauge_transform(&psi, &chi).unwrap().density();
    let change = before.iter().zip(&after).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let detail = format!("calibration residual {residual:.2e}, gauge change of g {change:.3e}");
    check(residual <= 1e-12 && change >= 1e-3, &detail)?;
    Ok(detail)
}

fn momentum_parseval() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let g = grid(16, 16);
    let (mut parseval, mut round_trip, mut boosted_dev) = (0.0f64, 0.0f64, 0.0f64);
    for kind in kinds(&mut rng) {
        for _ in 0..10 {
            // Distinct spatial indices keep the sampled modes orthonormal.
            let mut set = random_state(kind, &mut rng, 8);
            let mut seen = Vec::new();
            let keep: Vec<usize> = (0..set.len())
                .filter(|&i| {
                    let n = set.modes()[i].index();
                    !seen.contains(&n) && {
                        seen.push(n);
                        true
                    }
                })
                .collect();
            set = ModeSet::new(
                keep.iter().map(|&i| set.modes()[i].clone()).collect(),
                keep.iter().map(|&i| set.coefficients()[i]).collect(),
            )
            .unwrap()
            .normalized()
            .unwrap();
            let psi = set.synthesize(&g).unwrap();
            let coeffs = decompose(&psi, set.modes()).map_err(|e| e.to_string())?;
            parseval = parseval.max((coeffs.occupations().iter().sum::<f64>() - 1.0).abs());
            let rebuilt = coeffs.to_mode_set().unwrap().synthesize(&g).unwrap();
            round_trip = round_trip.max(rebuilt.max_abs_diff(&psi).unwrap());
            for (a, b) in coeffs.coefficients().iter().zip(set.coefficients()) {
                round_trip = round_trip.max((a - b).norm());
            }
            if kind.is_scalar() {
                let b = Boost::new(0.45).unwrap();
                let moved = ModeCoefficients::from_mode_set(&boost_modes(&set, &b, None).unwrap());
                for (a, b) in moved.occupations().iter().zip(coeffs.occupations()) {
                    boosted_dev = boosted_dev.max((a - b).abs());
                }
                let p = b.apply_momentum(mean_four_momentum(&coeffs).unwrap());
                let q = mean_four_momentum(&moved).unwrap();
                boosted_dev = boosted_dev.max((p.energy - q.energy).abs()).max((p.momentum - q.momentum).abs());
            }
        }
    }
    let detail = format!("|sum n_k - 1| {parseval:.2e}, round trip {round_trip:.2e}, boost {boosted_dev:.2e}");
    check(parseval <= 1e-10 && round_trip <= 1e-10 && boosted_dev <= 1e-12, &detail)?;
    Ok(detail)
}

fn fock_algebra() -> Outcome {
    let mut ccr = 0.0f64;
    for stats in [Statistics::Bose, Statistics::Fermi] {
        for m in 1..=4 {
            for n in 1..=3 {
                let b = OccupationBasis::<f64>::new(stats, m, n).unwrap();
                let down: Vec<_> = (0..m).map(|i| b.annihilation_matrix(i).unwrap().to_dense()).collect();
                let up: Vec<_> = (0..m).map(|i| b.creation_matrix(i).unwrap().to_dense()).collect();
                for i in 0..m {
                    for j in 0..m {
                        let (ab, ba) = (down[i].mul(&up[j]), up[j].mul(&down[i]));
                        let (aa, aa_rev) = (down[i].mul(&down[j]), down[j].mul(&down[i]));
                        let (rel, rel2) = match stats {
                            Statistics::Bose => (ab.sub(&ba), aa.sub(&aa_rev)),
                            Statistics::Fermi => (ab.add(&ba), aa.add(&aa_rev)),
                        };
                        ccr = ccr.max(rel2.max_abs());
                        for r in (0..b.dim()).filter(|&r| b.below_ceiling(r)) {
                            for col in (0..b.dim()).filter(|&k| b.below_ceiling(k)) {
                                let target = if r == col && i == j { 1.0 } else { 0.0 };
                                ccr = ccr.max((rel.get(r, col) - c(target, 0.0)).norm());
                            }
                        }
                    }
                }
            }
        }
    }
    let g = grid(8, 8);
    let mb = ModeBasis::from_modes(
        &scalar_modes(ParticleKind::ComplexScalar { mass: 0.5 }, &[(-1, true), (0, true), (1, true), (2, true)]),
        &g,
    )
    .unwrap();
    let full = lambda_region(&g.full_region(), &mb).unwrap();
    let mut count_dev = 0.0f64;
    for stats in [Statistics::Bose, Statistics::Fermi] {
        let b = OccupationBasis::new(stats, 4, 3).unwrap();
        let op = full.second_quantize(&b).unwrap().to_dense();
        for k in 0..b.dim() {
            for j in 0..b.dim() {
                let target = if j == k { b.occupation(k).total() as f64 } else { 0.0 };
                count_dev = count_dev.max((op.get(k, j) - c(target, 0.0)).norm());
            }
        }
    }
    let mut special = 0.0f64;
    let q = g.region_from_subbox((0.0, 0.5), (0.25, 0.75)).unwrap();
    for region in [g.full_region(), q] {
        let neutral = ParticleKind::RealScalar { mass: 1.0 };
        let mb = ModeBasis::from_modes(&scalar_modes(neutral, &[(0, true), (1, true), (-1, true)]), &g).unwrap();
        special = special.max(field_expansion_deviation(&neutral, &region, &mb, 3).unwrap());
        let charged = ParticleKind::ComplexScalar { mass: 1.0 };
        let mb = ModeBasis::from_modes(&scalar_modes(charged, &[(0, true), (2, true)]), &g).unwrap();
        special = special.max(field_expansion_deviation(&charged, &region, &mb, 3).unwrap());
        let photons: Vec<_> = [1, 2, 3]
            .iter()
            .map(|&n| make_mode(ParticleKind::Photon, n, FrequencySign::Positive, &[c(0.6, 0.0), c(0.0, 0.8)], unit_box()).unwrap())
            .collect();
        let mb = ModeBasis::from_modes(&photons, &g).unwrap();
        special = special.max(field_expansion_deviation(&ParticleKind::Photon, &region, &mb, 3).unwrap());
    }
    let detail = format!("relations {ccr:.2e}, Lambda(V) vs N {count_dev:.2e}, specialized forms {special:.2e}");
    check(ccr <= 1e-12 && count_dev <= 1e-12 && special <= 1e-12, &detail)?;
    Ok(detail)
}

fn subsystem_equivalence() -> Outcome {
    let set = interference_set();
    let (t_range, x_range) = ((0.0, 1.0), (0.0, 0.501));
    let exact = set.region_integral(t_range, x_range);
    let mut equiv = 0.0f64;
    let mut errors = Vec::new();
    for n in [16, 32, 64] {
        let g = grid(n, n);
        let psi = set.synthesize(&g).unwrap();
        let q = g.region_from_subbox(t_range, x_range).unwrap();
        let phi = single_particle_subsystem(&psi).map_err(|e| e.to_string())?;
        let count = expected_count(&phi, &cell_basis_count(&q, &g).unwrap()).unwrap();
        let p = region_probability(&density(&psi), &q).unwrap();
        equiv = equiv.max((count - p).abs());
        errors.push((count - exact).abs().max((p - exact).abs()));
    }
    let ratios: Vec<f64> = errors.windows(2).map(|w| w[0] / w[1]).collect();
    let detail = format!("|<N> - P| {equiv:.2e}, error vs integral {}, ratios {ratios:.3?}", sci(&errors));
    check(equiv <= 1e-12 && ratios.iter().all(|r| (1.6..=2.4).contains(r)), &detail)?;
    Ok(detail)
}

fn sampling() -> Outcome {
    const EVENTS: usize = 1_000_000;
    const SEEDS: u64 = 100;
    let g = grid(32, 32);
    let massive = ModeSet::new(
        scalar_modes(ParticleKind::RealScalar { mass: 2.0 }, &[(0, true), (0, false), (3, true)]),
        vec![c(0.5, 0.0), c(0.5, 0.3), c(0.0, 0.6)],
    )
    .unwrap();
    let densities = [
        ("uniform", ModeSet::new(scalar_modes(ParticleKind::ComplexScalar { mass: 1.0 }, &[(2, true)]), vec![c(1.0, 0.0)]).unwrap()),
        ("interference", interference_set()),
        ("massive", massive),
    ]
    .map(|(name, set)| (name, density(&set.synthesize(&g).unwrap().normalize().unwrap())));
    let mut passes = Vec::new();
    for (name, rho) in &densities {
        let mut ok = 0;
        for seed in 0..SEEDS {
            let sampler = build_sampler(rho, seed).map_err(|e| e.to_string())?;
            let sample = run_sessions(&sampler, EVENTS, unit_box()).unwrap();
            let fit = goodness_of_fit(&sample, rho, Binning::Coarsened).map_err(|e| e.to_string())?;
            if fit.p_value >= 1e-3 {
                ok += 1;
            }
        }
        passes.push(format!("{name} {ok}/{SEEDS}"));
        check(ok >= 99, format!("{name}: {ok}/{SEEDS} seeds pass"))?;
    }
    let rho = &densities[1].1;
    let half = SpacetimeBox::new(1.0, 0.5).unwrap();
    let p = region_probability(rho, &g.region_from_subbox((0.0, 1.0), (0.0, 0.5)).unwrap()).unwrap();
    let sampler = build_sampler(rho, 42).unwrap();
    let sample = run_sessions(&sampler, EVENTS, half).unwrap();
    let sigma = (p * (1.0 - p) / EVENTS as f64).sqrt();
    let z = (sample.accepted_fraction() - p) / sigma;
    let again = run_sessions(&sampler, EVENTS, half).unwrap();
    let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let serial = single.install(|| run_sessions(&build_sampler(rho, 42).unwrap(), EVENTS, half).unwrap());
    let identical = sample.events == again.events && sample.events == serial.events;
    let detail = format!("{}; half-box z = {z:.2}; streams identical: {identical}", passes.join(", "));
    check(z.abs() <= 4.0 && identical, &detail)?;
    Ok(detail)
}

fn uncertainty() -> Outcome {
    let g = grid(64, 64);
    let axis = |center: f64, n: f64, sigma: f64, product: f64| CombAxis::with_product(center, 2.0 * PI * n, sigma, product);
    let (a, b) = (axis(0.5, 8.0, 9.0, 0.55), axis(0.45, 6.0, 8.0, 0.53));
    let r = uncertainty_report(&gaussian_comb_state(&g, a, b).unwrap().0).unwrap();
    let s = uncertainty_report(&gaussian_comb_state(&g, b, a).unwrap().0).unwrap();
    let band = |v: f64| (0.5..=0.6).contains(&v);
    check(band(r.product_space) && band(r.product_time), format!("comb products {} {}", r.product_space, r.product_time))?;
    let exchange = (r.product_space - s.product_time).abs().max((r.product_time - s.product_space).abs());
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut lowest = f64::INFINITY;
    for _ in 0..20 {
        let random_axis = |rng: &mut ChaCha8Rng| {
            axis(rng.random_range(0.4..0.6), rng.random_range(-10.0..10.0), rng.random_range(7.5..12.0), rng.random_range(0.5..0.8))
        };
        let (ta, xa) = (random_axis(&mut rng), random_axis(&mut rng));
        let rep = uncertainty_report(&gaussian_comb_state(&g, ta, xa).unwrap().0).unwrap();
        lowest = lowest.min(rep.product_space).min(rep.product_time);
    }
    let detail = format!(
        "comb products {:.4}/{:.4}, exchange {exchange:.1e}, lowest localized product {lowest:.4}",
        r.product_space, r.product_time
    );
    check(exchange <= 1e-3 && lowest >= 0.5 * (1.0 - PRODUCT_TOLERANCE), &detail)?;
    Ok(detail)
}

fn fd_oracle() -> Outcome {
    let set = ModeSet::new(
        scalar_modes(ParticleKind::ComplexScalar { mass: 1.0 }, &[(1, true), (-2, true), (0, true)]),
        vec![c(0.6, 0.0), c(0.0, 0.6), c(0.3, 0.4)],
    )
    .unwrap();
    let errors: Vec<f64> = [32, 64, 128]
        .iter()
        .map(|&nx| {
            let g = grid(2 * nx, nx);
            let (v, r) = set.initial_data(&g).unwrap();
            let fd = fd_evolve_klein_gordon(&v, &r, &g, 1.0).unwrap();
            fd.max_abs_diff(&set.synthesize(&g).unwrap()).unwrap()
        })
        .collect();
    let ratios: Vec<f64> = errors.windows(2).map(|w| w[0] / w[1]).collect();
    let detail = format!("errors {}, ratios {ratios:.3?}", sci(&errors));
    check(ratios.iter().all(|r| (3.5..=4.5).contains(r)), &detail)?;
    Ok(detail)
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("normalization and marginals", normalization_and_marginals),
        ("electron temporal law", electron_temporal_law),
        ("Lorentz invariance", lorentz_invariance),
        ("photon gauge family", photon_gauge_family),
        ("momentum and Parseval", momentum_parseval),
        ("Fock algebra", fock_algebra),
        ("subsystem equivalence", subsystem_equivalence),
        ("sampling", sampling),
        ("uncertainty", uncertainty),
        ("finite-difference oracle", fd_oracle),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} ({secs:.1}s)", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail} ({secs:.1}s)", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
