//! Scenario files: TOML with fixed sections, validated into library types.

use std::path::{Path, PathBuf};

use num_complex::Complex;
use serde::Deserialize;

use spacetime_density::fields::{make_electron_mode, make_mode, FrequencySign, Mode, ModeSet, ParticleKind};
use spacetime_density::fock::Statistics;
use spacetime_density::lattice::{Region, SpacetimeBox, UniformGrid};
use spacetime_density::sampling::Binning;
use spacetime_density::uncertainty::CombAxis;

use crate::error::{CliError, CliResult};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub particle: RawParticle,
    #[serde(rename = "box")]
    pub bounds: RawBox,
    pub grid: RawGrid,
    #[serde(default)]
    pub modes: Vec<RawMode>,
    pub boost: Option<RawBoost>,
    #[serde(default)]
    pub regions: Vec<RawRegion>,
    pub sampling: Option<RawSampling>,
    pub fock: Option<RawFock>,
    pub uncertainty: Option<RawUncertainty>,
    pub output: Option<RawOutput>,
    pub units: Option<RawUnits>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawParticle {
    pub kind: String,
    #[serde(default)]
    pub mass: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawBox {
    pub time_extent: f64,
    pub space_extent: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawGrid {
    pub n_time: usize,
    pub n_space: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawMode {
    pub n: i64,
    #[serde(default = "default_sign")]
    pub sign: FrequencySign,
    pub coefficient: [f64; 2],
    pub weight: Option<Vec<[f64; 2]>>,
}

fn default_sign() -> FrequencySign {
    FrequencySign::Positive
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawBoost {
    pub beta: f64,
    #[serde(default = "default_probes")]
    pub probes: usize,
    #[serde(default = "default_refinements")]
    pub resolutions: Vec<usize>,
}

fn default_probes() -> usize {
    500
}

fn default_refinements() -> Vec<usize> {
    vec![16, 32, 64]
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawRegion {
    pub name: String,
    pub t: [f64; 2],
    pub x: [f64; 2],
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSampling {
    pub events: usize,
    #[serde(default)]
    pub seed: u64,
    /// `[cT′, L′]` of a filter box anchored at the origin.
    pub filter: Option<[f64; 2]>,
    #[serde(default = "default_binning")]
    pub binning: String,
}

fn default_binning() -> String {
    "coarsened".into()
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawFock {
    pub statistics: Option<String>,
    #[serde(default = "default_max_total")]
    pub max_total: usize,
    #[serde(default = "default_refinements")]
    pub refinements: Vec<usize>,
}

fn default_max_total() -> usize {
    2
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawUncertainty {
    pub time: RawCombAxis,
    pub space: RawCombAxis,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawCombAxis {
    pub center: f64,
    /// Carrier in units of the axis' fundamental frequency `2π/extent`.
    #[serde(default)]
    pub carrier_index: f64,
    pub sigma: f64,
    #[serde(default = "default_product")]
    pub product: f64,
}

fn default_product() -> f64 {
    0.5
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawOutput {
    pub dir: Option<PathBuf>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawUnits {
    pub system: String,
}

/// Command-line overrides applied before validation.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub grid: Option<(usize, usize)>,
    pub out: Option<PathBuf>,
}

#[derive(Debug)]
pub struct NamedRegion {
    pub name: String,
    pub t: (f64, f64),
    pub x: (f64, f64),
    pub region: Region,
}

#[derive(Debug)]
pub struct SamplingConfig {
    pub events: usize,
    pub seed: u64,
    pub filter: SpacetimeBox<f64>,
    pub binning: Binning,
}

#[derive(Debug)]
pub struct FockConfig {
    pub statistics: Statistics,
    pub max_total: usize,
    pub refinements: Vec<usize>,
}

#[derive(Debug)]
pub struct BoostConfig {
    pub beta: f64,
    pub probes: usize,
    pub resolutions: Vec<usize>,
}

/// Validated scenario.
#[derive(Debug)]
pub struct Scenario {
    pub kind: ParticleKind<f64>,
    pub bounds: SpacetimeBox<f64>,
    pub grid: UniformGrid<f64>,
    /// Modes with coefficients normalized to `‖C‖ = 1`; `None` without modes.
    pub modes: Option<ModeSet<f64>>,
    /// `‖C‖²` as written in the file.
    pub coefficient_norm_sqr: f64,
    pub boost: Option<BoostConfig>,
    pub regions: Vec<NamedRegion>,
    pub sampling: Option<SamplingConfig>,
    pub fock: Option<FockConfig>,
    pub comb: Option<(CombAxis<f64>, CombAxis<f64>)>,
    pub out: PathBuf,
}

impl Scenario {
    pub fn mode_set(&self) -> CliResult<&ModeSet<f64>> {
        self.modes
            .as_ref()
            .ok_or_else(|| CliError::config("modes", "this command needs at least one [[modes]] entry"))
    }

    pub fn region_on(&self, grid: &UniformGrid<f64>, r: &NamedRegion) -> CliResult<Region> {
        Ok(grid.region_from_subbox(r.t, r.x)?)
    }
}

pub fn load(path: &Path, overrides: &Overrides) -> CliResult<Scenario> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse(&text, overrides)
}

pub fn parse(text: &str, overrides: &Overrides) -> CliResult<Scenario> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
    validate(raw, overrides)
}

fn parse_kind(p: &RawParticle) -> CliResult<ParticleKind<f64>> {
    let mass = p.mass;
    let kind = match p.kind.as_str() {
        "real-scalar" => ParticleKind::RealScalar { mass },
        "complex-scalar" => ParticleKind::ComplexScalar { mass },
        "massive-vector" => ParticleKind::MassiveVector { mass },
        "photon" => ParticleKind::Photon,
        "electron" => ParticleKind::Electron { mass },
        other => {
            return Err(CliError::config(
                "particle.kind",
                format!("unknown kind {other:?} (real-scalar, complex-scalar, massive-vector, photon, electron)"),
            ))
        }
    };
    if matches!(kind, ParticleKind::Photon) && mass != 0.0 {
        return Err(CliError::config("particle.mass", "photon is massless"));
    }
    kind.validate().map_err(|e| CliError::config("particle.mass", e))?;
    Ok(kind)
}

fn complex(v: [f64; 2]) -> Complex<f64> {
    Complex::new(v[0], v[1])
}

fn build_mode(kind: ParticleKind<f64>, raw: &RawMode, bounds: SpacetimeBox<f64>, grid: &UniformGrid<f64>, i: usize) -> CliResult<Mode<f64>> {
    let field = format!("modes[{i}]");
    let mode = match (kind, &raw.weight) {
        (ParticleKind::Electron { mass }, None) => make_electron_mode(raw.n, raw.sign, mass, bounds),
        (_, Some(w)) => make_mode(kind, raw.n, raw.sign, &w.iter().copied().map(complex).collect::<Vec<_>>(), bounds),
        (_, None) if kind.is_scalar() => make_mode(kind, raw.n, raw.sign, &[Complex::new(1.0, 0.0)], bounds),
        (_, None) => return Err(CliError::config(&format!("{field}.weight"), format!("required for {}", kind.name()))),
    }
    .map_err(|e| CliError::config(&field, e))?;
    mode.check_band(grid).map_err(|e| CliError::config(&format!("{field}.n"), e))?;
    Ok(mode)
}

fn interval(v: [f64; 2]) -> (f64, f64) {
    (v[0], v[1])
}

fn validate(raw: RawConfig, overrides: &Overrides) -> CliResult<Scenario> {
    if let Some(u) = &raw.units {
        if u.system != "natural" {
            return Err(CliError::config("units.system", "only \"natural\" (hbar = c = 1) is supported"));
        }
    }
    let kind = parse_kind(&raw.particle)?;
    let bounds = SpacetimeBox::new(raw.bounds.time_extent, raw.bounds.space_extent).map_err(|e| CliError::config("box", e))?;
    let (nt, nx) = overrides.grid.unwrap_or((raw.grid.n_time, raw.grid.n_space));
    let grid = UniformGrid::new(bounds, nt, nx).map_err(|e| CliError::config("grid", e))?;

    let mut coefficient_norm_sqr = 0.0;
    let modes = if raw.modes.is_empty() {
        None
    } else {
        let built = raw
            .modes
            .iter()
            .enumerate()
            .map(|(i, m)| build_mode(kind, m, bounds, &grid, i))
            .collect::<CliResult<Vec<_>>>()?;
        let coeffs: Vec<_> = raw.modes.iter().map(|m| complex(m.coefficient)).collect();
        coefficient_norm_sqr = coeffs.iter().map(|c| c.norm_sqr()).sum();
        let set = ModeSet::new(built, coeffs).map_err(|e| CliError::config("modes", e))?;
        Some(set.normalized().map_err(|e| CliError::config("modes.coefficient", e))?)
    };

    let boost = raw
        .boost
        .map(|b| {
            if !(b.beta.abs() < 1.0) {
                return Err(CliError::config("boost.beta", "needs |beta| < 1"));
            }
            if b.resolutions.iter().any(|&n| n < 2) {
                return Err(CliError::config("boost.resolutions", "entries must be at least 2"));
            }
            Ok(BoostConfig {
                beta: b.beta,
                probes: b.probes,
                resolutions: b.resolutions,
            })
        })
        .transpose()?;

    let mut regions: Vec<NamedRegion> = Vec::new();
    for (i, r) in raw.regions.iter().enumerate() {
        let field = format!("regions[{i}]");
        if regions.iter().any(|q| q.name == r.name) {
            return Err(CliError::config(&format!("{field}.name"), format!("duplicate region {:?}", r.name)));
        }
        let (t, x) = (interval(r.t), interval(r.x));
        let region = grid.region_from_subbox(t, x).map_err(|e| CliError::config(&field, e))?;
        regions.push(NamedRegion {
            name: r.name.clone(),
            t,
            x,
            region,
        });
    }

    let sampling = raw
        .sampling
        .map(|s| {
            let filter = match s.filter {
                Some([t, x]) => SpacetimeBox::new(t, x).map_err(|e| CliError::config("sampling.filter", e))?,
                None => bounds,
            };
            let binning = match s.binning.as_str() {
                "cells" => Binning::Cells,
                "coarsened" => Binning::Coarsened,
                other => return Err(CliError::config("sampling.binning", format!("unknown binning {other:?} (cells, coarsened)"))),
            };
            if s.events == 0 {
                return Err(CliError::config("sampling.events", "must be positive"));
            }
            Ok(SamplingConfig {
                events: s.events,
                seed: overrides.seed.unwrap_or(s.seed),
                filter,
                binning,
            })
        })
        .transpose()?;

    let fock = raw
        .fock
        .map(|f| {
            let statistics = match f.statistics.as_deref() {
                Some("bose") => Statistics::Bose,
                Some("fermi") => Statistics::Fermi,
                None if matches!(kind, ParticleKind::Electron { .. }) => Statistics::Fermi,
                None => Statistics::Bose,
                Some(other) => return Err(CliError::config("fock.statistics", format!("unknown statistics {other:?} (bose, fermi)"))),
            };
            if f.refinements.iter().any(|&n| n < 2) {
                return Err(CliError::config("fock.refinements", "entries must be at least 2"));
            }
            Ok(FockConfig {
                statistics,
                max_total: f.max_total,
                refinements: f.refinements,
            })
        })
        .transpose()?;

    let comb = raw
        .uncertainty
        .map(|u| {
            let axis = |a: &RawCombAxis, extent: f64, field: &str| {
                if !(a.sigma > 0.0) {
                    return Err(CliError::config(field, "sigma must be positive"));
                }
                if a.product < 0.5 {
                    return Err(CliError::config(field, "product must be at least 0.5"));
                }
                let carrier = 2.0 * std::f64::consts::PI * a.carrier_index / extent;
                Ok(CombAxis::with_product(a.center, carrier, a.sigma, a.product))
            };
            Ok::<_, CliError>((
                axis(&u.time, bounds.time_extent(), "uncertainty.time")?,
                axis(&u.space, bounds.space_extent(), "uncertainty.space")?,
            ))
        })
        .transpose()?;

    let out = overrides
        .out
        .clone()
        .or(raw.output.and_then(|o| o.dir))
        .unwrap_or_else(|| PathBuf::from("out"));

    Ok(Scenario {
        kind,
        bounds,
        grid,
        modes,
        coefficient_norm_sqr,
        boost,
        regions,
        sampling,
        fock,
        comb,
        out,
    })
}
