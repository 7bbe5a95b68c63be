//! Spacetime box, uniform cell decomposition and cell-aligned regions.
//!
//! Coordinates are in natural units: `t` stands for `x⁰ = ct` and `x` for the
//! single spatial coordinate `x¹`. The metric has signature `(−, +)`.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric;
use crate::scalar::Real;

/// Event `(x⁰, x¹)` in 1+1 spacetime.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Event<T> {
    pub t: T,
    pub x: T,
}

impl<T: Real> Event<T> {
    pub fn new(t: T, x: T) -> Self {
        Self { t, x }
    }
}

/// Minkowski metric `diag(−1, +1)`.
#[derive(Clone, Copy, Debug, Default)]
pub struct Minkowski;

impl Minkowski {
    /// `a·b = a¹b¹ − a⁰b⁰`.
    #[inline]
    pub fn product<T: Real>(a: Event<T>, b: Event<T>) -> T {
        a.x * b.x - a.t * b.t
    }

    /// Same form applied to a four-momentum `(p⁰, p¹)`.
    #[inline]
    pub fn momentum_square<T: Real>(p0: T, p1: T) -> T {
        p1 * p1 - p0 * p0
    }
}

/// The bar `V = (0, cT) × (0, L)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpacetimeBox<T> {
    time_extent: T,
    space_extent: T,
}

impl<T: Real> SpacetimeBox<T> {
    pub fn new(time_extent: T, space_extent: T) -> Result<Self> {
        if !(time_extent > T::zero()) || !time_extent.is_finite() {
            return Err(Error::InvalidExtent(format!("time extent {time_extent}")));
        }
        if !(space_extent > T::zero()) || !space_extent.is_finite() {
            return Err(Error::InvalidExtent(format!("space extent {space_extent}")));
        }
        Ok(Self {
            time_extent,
            space_extent,
        })
    }

    /// `cT`.
    pub fn time_extent(&self) -> T {
        self.time_extent
    }

    /// `L`.
    pub fn space_extent(&self) -> T {
        self.space_extent
    }

    /// `|V| = cT · L`.
    pub fn volume(&self) -> T {
        self.time_extent * self.space_extent
    }

    /// Closed-box membership with a relative slack of `tol`.
    pub fn contains(&self, e: Event<T>, tol: T) -> bool {
        let st = tol * self.time_extent;
        let sx = tol * self.space_extent;
        e.t >= -st && e.t <= self.time_extent + st && e.x >= -sx && e.x <= self.space_extent + sx
    }
}

/// Cell label `ξ = (it, ix)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CellIndex {
    pub it: usize,
    pub ix: usize,
}

impl CellIndex {
    pub fn new(it: usize, ix: usize) -> Self {
        Self { it, ix }
    }
}

/// Uniform decomposition of a [`SpacetimeBox`] into `n_time × n_space` cells.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniformGrid<T> {
    bounds: SpacetimeBox<T>,
    n_time: usize,
    n_space: usize,
}

impl<T: Real> UniformGrid<T> {
    pub fn new(bounds: SpacetimeBox<T>, n_time: usize, n_space: usize) -> Result<Self> {
        if n_time < 2 || n_space < 2 {
            return Err(Error::GridTooSmall { n_time, n_space });
        }
        Ok(Self {
            bounds,
            n_time,
            n_space,
        })
    }

    pub fn bounds(&self) -> &SpacetimeBox<T> {
        &self.bounds
    }

    pub fn n_time(&self) -> usize {
        self.n_time
    }

    pub fn n_space(&self) -> usize {
        self.n_space
    }

    pub fn n_cells(&self) -> usize {
        self.n_time * self.n_space
    }

    /// `Δx⁰`.
    pub fn dt(&self) -> T {
        self.bounds.time_extent / T::from_count(self.n_time)
    }

    /// `Δx¹`.
    pub fn dx(&self) -> T {
        self.bounds.space_extent / T::from_count(self.n_space)
    }

    /// Cell volume `w(ξ)`, identical for every cell.
    pub fn cell_volume(&self) -> T {
        self.dt() * self.dx()
    }

    pub fn time_center(&self, it: usize) -> T {
        (T::from_count(it) + T::lit(0.5)) * self.dt()
    }

    pub fn space_center(&self, ix: usize) -> T {
        (T::from_count(ix) + T::lit(0.5)) * self.dx()
    }

    pub fn cell_center(&self, cell: CellIndex) -> Event<T> {
        Event::new(self.time_center(cell.it), self.space_center(cell.ix))
    }

    /// Row-major flat index, time slowest.
    #[inline]
    pub fn flat(&self, cell: CellIndex) -> usize {
        cell.it * self.n_space + cell.ix
    }

    #[inline]
    pub fn cell_at(&self, flat: usize) -> CellIndex {
        CellIndex::new(flat / self.n_space, flat % self.n_space)
    }

    pub fn contains_cell(&self, cell: CellIndex) -> bool {
        cell.it < self.n_time && cell.ix < self.n_space
    }

    pub fn check_cell(&self, cell: CellIndex) -> Result<()> {
        if self.contains_cell(cell) {
            Ok(())
        } else {
            Err(Error::CellOutOfBounds {
                it: cell.it,
                ix: cell.ix,
                n_time: self.n_time,
                n_space: self.n_space,
            })
        }
    }

    /// Cells in flat order.
    pub fn cells(&self) -> impl Iterator<Item = CellIndex> + '_ {
        (0..self.n_cells()).map(move |k| self.cell_at(k))
    }

    /// `Σ_ξ w(ξ)` summed cell by cell.
    pub fn total_cell_volume(&self) -> T {
        let w = self.cell_volume();
        numeric::sum((0..self.n_cells()).map(|_| w))
    }

    /// Cell containing `e`, clamping points on the outer boundary inward.
    pub fn locate(&self, e: Event<T>) -> Option<CellIndex> {
        if !self.bounds.contains(e, T::zero()) {
            return None;
        }
        let it = (e.t / self.dt()).floor().to_usize()?.min(self.n_time - 1);
        let ix = (e.x / self.dx()).floor().to_usize()?.min(self.n_space - 1);
        Some(CellIndex::new(it, ix))
    }

    pub fn same_shape(&self, other: &Self) -> bool {
        self.n_time == other.n_time && self.n_space == other.n_space && self.bounds == other.bounds
    }

    /// Minimal set `Q′` of cells covering the closed sub-box
    /// `[t_lo, t_hi] × [x_lo, x_hi]`.
    ///
    /// A cell belongs to `Q′` when its interior meets the sub-box; a sub-box
    /// that only touches a cell edge does not pull that cell in. The covering
    /// over-counts area by at most one boundary layer of cells.
    pub fn region_from_subbox(&self, t_range: (T, T), x_range: (T, T)) -> Result<Region> {
        let times = covering_range(t_range, self.bounds.time_extent, self.n_time)?;
        let spaces = covering_range(x_range, self.bounds.space_extent, self.n_space)?;
        let mut region = Region::empty(self.n_time, self.n_space);
        if let (Some((t0, t1)), Some((x0, x1))) = (times, spaces) {
            for it in t0..t1 {
                for ix in x0..x1 {
                    region.cells.insert(CellIndex::new(it, ix));
                }
            }
        }
        Ok(region)
    }

    /// Region made of every cell.
    pub fn full_region(&self) -> Region {
        Region {
            n_time: self.n_time,
            n_space: self.n_space,
            cells: self.cells().collect(),
        }
    }

    pub fn region_volume(&self, region: &Region) -> T {
        T::from_count(region.len()) * self.cell_volume()
    }
}

fn covering_range<T: Real>(range: (T, T), extent: T, cells: usize) -> Result<Option<(usize, usize)>> {
    let (lo, hi) = range;
    if lo > hi || lo.is_nan() || hi.is_nan() {
        return Err(Error::InvertedInterval {
            lo: lo.as_f64(),
            hi: hi.as_f64(),
        });
    }
    let point = lo == hi;
    if hi < T::zero() || lo > extent || (!point && (hi <= T::zero() || lo >= extent)) {
        return Ok(None);
    }
    let delta = extent / T::from_count(cells);
    let snap = |v: T| {
        let r = v.round();
        if (v - r).abs() <= T::lit(1e-9) * T::one().max(v.abs()) {
            r
        } else {
            v
        }
    };
    let a = snap(lo.max(T::zero()) / delta);
    let b = snap(hi.min(extent) / delta);
    let mut start = a.floor().to_usize().unwrap_or(0).min(cells - 1);
    let mut end = b.ceil().to_usize().unwrap_or(cells).min(cells);
    if end <= start {
        // Degenerate interval sitting on a cell edge.
        if start == cells {
            start = cells - 1;
        }
        end = start + 1;
    }
    Ok(Some((start, end)))
}

/// Cell-aligned region: an ordered set of distinct cells of one grid shape.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Region {
    n_time: usize,
    n_space: usize,
    cells: BTreeSet<CellIndex>,
}

impl Region {
    pub fn empty(n_time: usize, n_space: usize) -> Self {
        Self {
            n_time,
            n_space,
            cells: BTreeSet::new(),
        }
    }

    /// Builds a region from explicit cells, rejecting out-of-grid members.
    /// Duplicates collapse.
    pub fn from_cells<T: Real>(
        grid: &UniformGrid<T>,
        cells: impl IntoIterator<Item = CellIndex>,
    ) -> Result<Self> {
        let mut region = Self::empty(grid.n_time, grid.n_space);
        for c in cells {
            grid.check_cell(c)?;
            region.cells.insert(c);
        }
        Ok(region)
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn contains(&self, cell: CellIndex) -> bool {
        self.cells.contains(&cell)
    }

    pub fn iter(&self) -> impl Iterator<Item = CellIndex> + '_ {
        self.cells.iter().copied()
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.n_time, self.n_space)
    }

    pub fn fits<T: Real>(&self, grid: &UniformGrid<T>) -> bool {
        self.n_time == grid.n_time && self.n_space == grid.n_space
    }

    pub fn union(&self, other: &Region) -> Region {
        Region {
            n_time: self.n_time,
            n_space: self.n_space,
            cells: self.cells.union(&other.cells).copied().collect(),
        }
    }

    pub fn is_disjoint(&self, other: &Region) -> bool {
        self.cells.is_disjoint(&other.cells)
    }

    pub fn is_subset(&self, other: &Region) -> bool {
        self.cells.is_subset(&other.cells)
    }

    pub fn complement(&self) -> Region {
        let mut cells = BTreeSet::new();
        for it in 0..self.n_time {
            for ix in 0..self.n_space {
                let c = CellIndex::new(it, ix);
                if !self.cells.contains(&c) {
                    cells.insert(c);
                }
            }
        }
        Region {
            n_time: self.n_time,
            n_space: self.n_space,
            cells,
        }
    }
}
