use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex;
use serde::Serialize;

use super::matrix::{DenseMatrix, SparseMatrix};
use super::space::{FockState, OccupationBasis, Statistics};
use crate::error::{Error, Result};
use crate::fields::{synthesize, Mode, ParticleKind, WaveFunction};
use crate::lattice::{Region, UniformGrid};
use crate::numeric;
use crate::scalar::Real;

/// Orthonormal one-particle functions sampled on a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeBasis<T> {
    functions: Vec<WaveFunction<T>>,
}

impl<T: Real> ModeBasis<T> {
    /// Samples each mode on `grid` and rescales it to unit grid norm.
    pub fn from_modes(modes: &[Mode<T>], grid: &UniformGrid<T>) -> Result<Self> {
        if modes.is_empty() {
            return Err(Error::EmptyModes);
        }
        let functions = modes
            .iter()
            .map(|m| {
                m.check_band(grid)?;
                synthesize(std::slice::from_ref(m), &[Complex::new(T::one(), T::zero())], grid)?.normalize()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_functions(functions)
    }

    pub fn from_functions(functions: Vec<WaveFunction<T>>) -> Result<Self> {
        let first = functions.first().ok_or(Error::EmptyModes)?;
        for f in &functions[1..] {
            first.check_compatible(f)?;
        }
        Ok(Self { functions })
    }

    pub fn functions(&self) -> &[WaveFunction<T>] {
        &self.functions
    }

    pub fn len(&self) -> usize {
        self.functions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
    }

    pub fn grid(&self) -> &UniformGrid<T> {
        self.functions[0].grid()
    }

    pub fn kind(&self) -> ParticleKind<T> {
        self.functions[0].kind()
    }

    pub fn components(&self) -> usize {
        self.functions[0].components()
    }

    /// `(ψ_i, ψ_j)` on the grid.
    pub fn gram(&self) -> Result<DenseMatrix<T>> {
        let n = self.len();
        let mut g = DenseMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                g.set(i, j, self.functions[i].inner_product(&self.functions[j])?);
            }
        }
        Ok(g)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum OneBodyMatrix<T> {
    Dense(DenseMatrix<T>),
    /// Real diagonal, used for the cell basis where `M` is the cell count.
    Diagonal(Vec<T>),
}

/// Matrix `l_ij` of a one-particle operation; its Fock image is
/// `Λ = Σ l_ij a_i⁺ a_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct OneBodyOperator<T> {
    matrix: OneBodyMatrix<T>,
    hermitian: bool,
}

impl<T: Real> OneBodyOperator<T> {
    pub fn dense(matrix: DenseMatrix<T>) -> Self {
        let scale = T::one().max(matrix.max_abs());
        let hermitian = matrix.hermiticity_defect() <= T::lit(1e-12).max(T::check_tolerance()) * scale;
        Self {
            matrix: OneBodyMatrix::Dense(matrix),
            hermitian,
        }
    }

    pub fn diagonal(values: Vec<T>) -> Self {
        Self {
            matrix: OneBodyMatrix::Diagonal(values),
            hermitian: true,
        }
    }

    pub fn identity(modes: usize) -> Self {
        Self::diagonal(vec![T::one(); modes])
    }

    pub fn matrix(&self) -> &OneBodyMatrix<T> {
        &self.matrix
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn dim(&self) -> usize {
        match &self.matrix {
            OneBodyMatrix::Dense(m) => m.dim(),
            OneBodyMatrix::Diagonal(d) => d.len(),
        }
    }

    pub fn get(&self, i: usize, j: usize) -> Complex<T> {
        match &self.matrix {
            OneBodyMatrix::Dense(m) => m.get(i, j),
            OneBodyMatrix::Diagonal(d) if i == j => Complex::new(d[i], T::zero()),
            OneBodyMatrix::Diagonal(_) => Complex::new(T::zero(), T::zero()),
        }
    }

    pub fn to_dense(&self) -> DenseMatrix<T> {
        DenseMatrix::from_fn(self.dim(), |i, j| self.get(i, j))
    }

    /// `l → V l V⁺`.
    pub fn conjugated(&self, v: &DenseMatrix<T>) -> Result<Self> {
        if v.dim() != self.dim() {
            return Err(Error::BasisMismatch("unitary has the wrong size".into()));
        }
        Ok(Self::dense(v.mul(&self.to_dense()).mul(&v.adjoint())))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::BasisMismatch("operators of different size".into()));
        }
        Ok(match (&self.matrix, &other.matrix) {
            (OneBodyMatrix::Diagonal(a), OneBodyMatrix::Diagonal(b)) => {
                Self::diagonal(a.iter().zip(b).map(|(x, y)| *x + *y).collect())
            }
            _ => Self::dense(self.to_dense().add(&other.to_dense())),
        })
    }

    fn check_basis(&self, basis: &OccupationBasis<T>) -> Result<()> {
        if self.dim() != basis.modes() {
            return Err(Error::BasisMismatch(format!(
                "operator over {} one-particle states, Fock space over {}",
                self.dim(),
                basis.modes()
            )));
        }
        Ok(())
    }

    /// `Σ l_ij a_i⁺ a_j` as a matrix on the truncated Fock space. The
    /// operator conserves particle number, so the truncation is exact.
    pub fn second_quantize(&self, basis: &OccupationBasis<T>) -> Result<SparseMatrix<T>> {
        self.check_basis(basis)?;
        let dim = basis.dim();
        let zero = Complex::new(T::zero(), T::zero());
        let mut rows: Vec<BTreeMap<usize, Complex<T>>> = vec![BTreeMap::new(); dim];
        for k in 0..dim {
            let mut occupied: Vec<usize> = basis.occupation(k).entries().collect();
            occupied.dedup();
            match &self.matrix {
                OneBodyMatrix::Diagonal(d) => {
                    let ev = numeric::sum(basis.occupation(k).entries().map(|e| d[e]));
                    if ev != T::zero() {
                        rows[k].insert(k, Complex::new(ev, T::zero()));
                    }
                }
                OneBodyMatrix::Dense(m) => {
                    for &j in &occupied {
                        let Some((k1, f1)) = basis.annihilate(j, k) else { continue };
                        for i in 0..basis.modes() {
                            let l = m.get(i, j);
                            if l == zero {
                                continue;
                            }
                            if let Some((k2, f2)) = basis.create(i, k1)? {
                                *rows[k2].entry(k).or_insert(zero) += l * (f1 * f2);
                            }
                        }
                    }
                }
            }
        }
        Ok(SparseMatrix::from_rows(
            dim,
            rows.into_iter().map(|r| r.into_iter().collect()).collect(),
        ))
    }
}

/// `l_ij = (ψ_i, L ψ_j)` by grid quadrature.
pub fn one_body_operator_from_kernel<T: Real>(
    kernel: impl Fn(&WaveFunction<T>) -> Result<WaveFunction<T>>,
    basis: &ModeBasis<T>,
) -> Result<OneBodyOperator<T>> {
    let images = basis.functions().iter().map(&kernel).collect::<Result<Vec<_>>>()?;
    let n = basis.len();
    let mut m = DenseMatrix::zeros(n);
    for i in 0..n {
        for (j, image) in images.iter().enumerate() {
            m.set(i, j, basis.functions()[i].inner_product(image)?);
        }
    }
    Ok(OneBodyOperator::dense(m))
}

/// Kernel `∫_Q Σ_α conj(ψ_i^α) ψ_j^α dE` with conjugation flags on either
/// factor, by midpoint quadrature over the cells of `region`.
fn region_kernel<T: Real>(
    region: &Region,
    basis: &ModeBasis<T>,
    conj_left: bool,
    conj_right: bool,
) -> Result<DenseMatrix<T>> {
    let grid = basis.grid();
    if !region.fits(grid) {
        return Err(Error::GridMismatch("region built for another grid shape".into()));
    }
    let n = basis.len();
    let w = grid.cell_volume();
    let pick = |z: Complex<T>, c: bool| if c { z.conj() } else { z };
    let mut m = DenseMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            let (fi, fj) = (&basis.functions()[i], &basis.functions()[j]);
            let s = numeric::sum_complex(region.iter().flat_map(|cell| {
                let (a, b) = (fi.value(cell), fj.value(cell));
                a.iter().zip(b).map(move |(x, y)| pick(*x, conj_left) * pick(*y, conj_right))
            }));
            m.set(i, j, s * w);
        }
    }
    Ok(m)
}

/// Region-count operator `Λ(Q)` with `l_ij(Q) = Σ_{ξ∈Q} ψ_i*(ξ)·ψ_j(ξ) w(ξ)`.
pub fn lambda_region<T: Real>(region: &Region, basis: &ModeBasis<T>) -> Result<OneBodyOperator<T>> {
    let m = region_kernel(region, basis, true, false)?;
    // Enforce exact Hermiticity of the quadrature.
    let sym = DenseMatrix::from_fn(m.dim(), |i, j| {
        if i <= j {
            m.get(i, j)
        } else {
            m.get(j, i).conj()
        }
    });
    Ok(OneBodyOperator::dense(sym))
}

/// `⟨N⟩ = (Φ, ΛΦ)`.
pub fn expected_count<T: Real>(phi: &FockState<T>, op: &OneBodyOperator<T>) -> Result<T> {
    let basis = phi.basis();
    op.check_basis(basis)?;
    match op.matrix() {
        OneBodyMatrix::Diagonal(d) => Ok(numeric::sum((0..basis.dim()).map(|k| {
            let ev = numeric::sum(basis.occupation(k).entries().map(|e| d[e]));
            ev * basis.weight(k) * numeric::norm_sqr(phi.amplitude(k))
        }))),
        OneBodyMatrix::Dense(_) => {
            let image = phi.apply_sparse(&op.second_quantize(basis)?)?;
            Ok(phi.inner(&image)?.re)
        }
    }
}

/// `Λ(Q′) = Σ_{ξ∈Q′} n(ξ)` on the cell basis of `grid`.
pub fn cell_basis_count<T: Real>(region: &Region, grid: &UniformGrid<T>) -> Result<OneBodyOperator<T>> {
    if !region.fits(grid) {
        return Err(Error::GridMismatch("region built for another grid shape".into()));
    }
    let mut d = vec![T::zero(); grid.n_cells()];
    for cell in region.iter() {
        d[grid.flat(cell)] = T::one();
    }
    Ok(OneBodyOperator::diagonal(d))
}

/// One-particle sector of the cell-basis Fock space with `Φ(n) = ψ(ξ(n))`
/// for the tuple occupying only cell `ξ`. Tuples are unsymmetrized and
/// weighted by `w(ξ)`, so `‖Φ‖ = ‖ψ‖`.
pub fn single_particle_subsystem<T: Real>(psi: &WaveFunction<T>) -> Result<FockState<T>> {
    if !psi.is_normalized() {
        return Err(Error::NotNormalized {
            norm_sqr: psi.norm_sqr().as_f64(),
        });
    }
    let grid = psi.grid();
    let basis = Arc::new(OccupationBasis::cells(Statistics::Bose, grid, 1)?);
    let m = psi.components();
    let mut amplitudes = vec![Complex::new(T::zero(), T::zero()); basis.dim() * m];
    for cell in grid.cells() {
        let k = basis
            .find(&[grid.flat(cell)])
            .ok_or_else(|| Error::BasisMismatch("cell missing from the one-particle sector".into()))?;
        amplitudes[k * m..(k + 1) * m].copy_from_slice(psi.value(cell));
    }
    FockState::new(basis, m, amplitudes)
}

/// Normal-ordered region-count operator written with the field operator of
/// the kind, split by its action on particle number.
#[derive(Clone, Debug, PartialEq)]
pub struct SpecializedLambda<T> {
    /// Coefficients of `a_i⁺ a_j`. Over `M` modes for neutral kinds and over
    /// `2M` (particles, then antiparticles) for the charged scalar.
    pub number_conserving: OneBodyOperator<T>,
    /// Coefficients `c_ij` of `a_i⁺ a_j⁺` (charged: `a_i⁺ b_j⁺`).
    pub pair_creation: DenseMatrix<T>,
    /// Coefficients `d_ij` of `a_i a_j` (charged: `b_i a_j`).
    pub pair_annihilation: DenseMatrix<T>,
    /// c-number left over from normal ordering.
    pub vacuum_constant: T,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OffSectorSummary<T> {
    pub vacuum_constant: T,
    pub pair_creation_max: T,
    pub pair_annihilation_max: T,
}

impl<T: Real> SpecializedLambda<T> {
    pub fn off_sector(&self) -> OffSectorSummary<T> {
        OffSectorSummary {
            vacuum_constant: self.vacuum_constant,
            pair_creation_max: self.pair_creation.max_abs(),
            pair_annihilation_max: self.pair_annihilation.max_abs(),
        }
    }
}

fn check_kind<T: Real>(kind: &ParticleKind<T>, basis: &ModeBasis<T>) -> Result<()> {
    if kind.name() != basis.kind().name() {
        return Err(Error::KindMismatch);
    }
    match kind {
        ParticleKind::RealScalar { .. } | ParticleKind::Photon | ParticleKind::ComplexScalar { .. } => Ok(()),
        _ => Err(Error::UnsupportedKind(
            "field-operator form is defined for neutral scalars, photons and charged scalars",
        )),
    }
}

/// Region-count operator from the field operator of `kind`:
///
/// - neutral scalar, photon: `½ ∫_Q Σ_α Ψ^α Ψ^α dE` with
///   `Ψ^α = Σ_i (ψ_i^α a_i + ψ_i^α* a_i⁺)`;
/// - charged scalar: `∫_Q Ψ⁺Ψ dE` with `Ψ = Σ_i (ψ_i a_i + ψ_i* b_i⁺)`.
///
/// After normal ordering the particle-counting part equals
/// [`lambda_region`] (block-diagonal over particles and antiparticles in the
/// charged case).
pub fn specialized_lambda<T: Real>(
    kind: &ParticleKind<T>,
    region: &Region,
    basis: &ModeBasis<T>,
) -> Result<SpecializedLambda<T>> {
    check_kind(kind, basis)?;
    let l = lambda_region(region, basis)?;
    let trace = numeric::sum((0..l.dim()).map(|i| l.get(i, i).re));
    let creation = region_kernel(region, basis, true, true)?;
    let annihilation = region_kernel(region, basis, false, false)?;
    let half = Complex::new(T::lit(0.5), T::zero());
    if let ParticleKind::ComplexScalar { .. } = kind {
        let m = basis.len();
        let doubled = DenseMatrix::from_fn(2 * m, |i, j| match (i < m, j < m) {
            (true, true) => l.get(i, j),
            (false, false) => l.get(i - m, j - m),
            _ => Complex::new(T::zero(), T::zero()),
        });
        Ok(SpecializedLambda {
            number_conserving: OneBodyOperator::dense(doubled),
            pair_creation: creation,
            pair_annihilation: annihilation,
            vacuum_constant: trace,
        })
    } else {
        Ok(SpecializedLambda {
            number_conserving: l,
            pair_creation: creation.scale(half),
            pair_annihilation: annihilation.scale(half),
            vacuum_constant: trace * T::lit(0.5),
        })
    }
}

/// Builds the field-operator expression of [`specialized_lambda`] literally,
/// as products of truncated ladder matrices summed over the cells of
/// `region`, and returns the largest deviation of its number-conserving part
/// (minus the vacuum constant) from `Σ l_ij a_i⁺a_j`. Only tuples below the
/// truncation ceiling are compared.
pub fn field_expansion_deviation<T: Real>(
    kind: &ParticleKind<T>,
    region: &Region,
    basis: &ModeBasis<T>,
    max_total: usize,
) -> Result<T> {
    let special = specialized_lambda(kind, region, basis)?;
    let m = basis.len();
    let charged = matches!(kind, ParticleKind::ComplexScalar { .. });
    let fock_modes = if charged { 2 * m } else { m };
    let fock = OccupationBasis::<T>::new(Statistics::Bose, fock_modes, max_total)?;
    let dim = fock.dim();
    let down: Vec<DenseMatrix<T>> = (0..fock_modes)
        .map(|i| fock.annihilation_matrix(i).map(|s| s.to_dense()))
        .collect::<Result<_>>()?;
    let up: Vec<DenseMatrix<T>> = down.iter().map(DenseMatrix::adjoint).collect();
    let grid = basis.grid();
    let w = Complex::new(grid.cell_volume(), T::zero());
    let half = Complex::new(T::lit(0.5), T::zero());
    let mut total = DenseMatrix::zeros(dim);
    for cell in region.iter() {
        for alpha in 0..basis.components() {
            let mut field = DenseMatrix::zeros(dim);
            for i in 0..m {
                let v = basis.functions()[i].value(cell)[alpha];
                let (a, a_dag) = if charged { (&down[i], &up[m + i]) } else { (&down[i], &up[i]) };
                field = field.add(&a.scale(v)).add(&a_dag.scale(v.conj()));
            }
            let term = if charged {
                field.adjoint().mul(&field)
            } else {
                field.mul(&field).scale(half)
            };
            total = total.add(&term.scale(w));
        }
    }
    let expected = special.number_conserving.second_quantize(&fock)?.to_dense();
    let mut worst = T::zero();
    for r in 0..dim {
        for c in 0..dim {
            let (nr, nc) = (fock.occupation(r).total(), fock.occupation(c).total());
            if nr != nc || !fock.below_ceiling(r) {
                continue;
            }
            let vacuum = if r == c { special.vacuum_constant } else { T::zero() };
            let got = total.get(r, c) - Complex::new(vacuum, T::zero());
            worst = worst.max((got - expected.get(r, c)).norm());
        }
    }
    Ok(worst)
}
