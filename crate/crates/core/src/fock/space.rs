use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::matrix::{DenseMatrix, SparseMatrix};
use crate::error::{Error, Result};
use crate::lattice::UniformGrid;
use crate::numeric;
use crate::scalar::Real;

/// Upper bound on the number of enumerated occupation tuples.
pub const MAX_STATES: usize = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Statistics {
    Bose,
    Fermi,
}

/// What the one-particle index `i` labels.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "basis", rename_all = "kebab-case")]
pub enum OneParticleLabel {
    /// Plane-wave (or any orthonormal) functions.
    Modes,
    /// Cells of a grid, in flat order.
    Cells { n_time: usize, n_space: usize },
}

/// Occupation tuple viewed as a sorted multiset of one-particle indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Occupation<'a>(&'a [u16]);

impl<'a> Occupation<'a> {
    /// `n_i`.
    pub fn n(&self, i: usize) -> usize {
        self.0.iter().filter(|&&e| e as usize == i).count()
    }

    /// `Σ n_i`.
    pub fn total(&self) -> usize {
        self.0.len()
    }

    /// Occupied indices with repetition, ascending.
    pub fn entries(&self) -> impl Iterator<Item = usize> + 'a {
        self.0.iter().map(|&e| e as usize)
    }

    /// Dense occupation numbers `(n_0, …, n_{M−1})`.
    pub fn numbers(&self, modes: usize) -> Vec<usize> {
        let mut n = vec![0; modes];
        for e in self.entries() {
            n[e] += 1;
        }
        n
    }
}

/// Truncated Fock space: every tuple with `Σ n_i ≤ N` over `M` one-particle
/// states, ordered by total number and then lexicographically.
#[derive(Clone, Debug)]
pub struct OccupationBasis<T> {
    statistics: Statistics,
    modes: usize,
    max_total: usize,
    label: OneParticleLabel,
    cell_weight: T,
    states: Vec<Vec<u16>>,
    index: HashMap<Vec<u16>, usize>,
}

impl<T: Real> PartialEq for OccupationBasis<T> {
    fn eq(&self, other: &Self) -> bool {
        self.statistics == other.statistics
            && self.modes == other.modes
            && self.max_total == other.max_total
            && self.label == other.label
            && self.cell_weight == other.cell_weight
    }
}

impl<T: Real> OccupationBasis<T> {
    /// Basis over `modes` orthonormal one-particle functions.
    pub fn new(statistics: Statistics, modes: usize, max_total: usize) -> Result<Self> {
        Self::build(statistics, modes, max_total, OneParticleLabel::Modes, T::one())
    }

    /// Cell basis of `grid`: one-particle state `ξ` is the cell `v(ξ)`, and a
    /// tuple carries the inner-product weight `Π_ξ w(ξ)^{n(ξ)}`.
    pub fn cells(statistics: Statistics, grid: &UniformGrid<T>, max_total: usize) -> Result<Self> {
        Self::build(
            statistics,
            grid.n_cells(),
            max_total,
            OneParticleLabel::Cells {
                n_time: grid.n_time(),
                n_space: grid.n_space(),
            },
            grid.cell_volume(),
        )
    }

    fn build(statistics: Statistics, modes: usize, max_total: usize, label: OneParticleLabel, cell_weight: T) -> Result<Self> {
        if modes == 0 || modes > u16::MAX as usize {
            return Err(Error::InvalidArgument(format!("{modes} one-particle states")));
        }
        let count = count_states(statistics, modes, max_total);
        if count > MAX_STATES {
            return Err(Error::InvalidArgument(format!("{count} Fock states exceed the limit {MAX_STATES}")));
        }
        let mut states = Vec::with_capacity(count);
        for total in 0..=max_total {
            let mut current = Vec::with_capacity(total);
            enumerate(statistics, modes, total, 0, &mut current, &mut states);
        }
        let index = states.iter().enumerate().map(|(k, s)| (s.clone(), k)).collect();
        Ok(Self {
            statistics,
            modes,
            max_total,
            label,
            cell_weight,
            states,
            index,
        })
    }

    pub fn statistics(&self) -> Statistics {
        self.statistics
    }

    /// `M`.
    pub fn modes(&self) -> usize {
        self.modes
    }

    /// `N`.
    pub fn max_total(&self) -> usize {
        self.max_total
    }

    pub fn label(&self) -> OneParticleLabel {
        self.label
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn occupation(&self, k: usize) -> Occupation<'_> {
        Occupation(&self.states[k])
    }

    pub fn occupations(&self) -> impl Iterator<Item = Occupation<'_>> {
        self.states.iter().map(|s| Occupation(s))
    }

    /// Index of the tuple with the given occupied entries (any order).
    pub fn find(&self, entries: &[usize]) -> Option<usize> {
        let mut key: Vec<u16> = entries.iter().map(|&e| e as u16).collect();
        key.sort_unstable();
        self.index.get(&key).copied()
    }

    /// Index of the tuple with dense occupation numbers `n`.
    pub fn find_numbers(&self, n: &[usize]) -> Option<usize> {
        let entries: Vec<usize> = n.iter().enumerate().flat_map(|(i, &c)| std::iter::repeat_n(i, c)).collect();
        self.find(&entries)
    }

    /// Inner-product weight of tuple `k`.
    pub fn weight(&self, k: usize) -> T {
        match self.label {
            OneParticleLabel::Modes => T::one(),
            OneParticleLabel::Cells { .. } => self.cell_weight.powi(self.states[k].len() as i32),
        }
    }

    fn check_mode(&self, i: usize) -> Result<()> {
        if i >= self.modes {
            return Err(Error::ModeOutOfRange { index: i, len: self.modes });
        }
        Ok(())
    }

    /// `a_i` on tuple `k`: target index and matrix element, or `None` for zero.
    pub fn annihilate(&self, i: usize, k: usize) -> Option<(usize, T)> {
        let s = &self.states[k];
        let pos = s.iter().position(|&e| e as usize == i)?;
        let mut next = s.clone();
        next.remove(pos);
        let factor = match self.statistics {
            Statistics::Bose => T::from_count(s.iter().filter(|&&e| e as usize == i).count()).sqrt(),
            Statistics::Fermi => parity(pos),
        };
        Some((self.index[&next], factor))
    }

    /// `a_i⁺` on tuple `k`. `Ok(None)` is a zero result (Pauli exclusion);
    /// leaving the truncated space is [`Error::TruncationOverflow`].
    pub fn create(&self, i: usize, k: usize) -> Result<Option<(usize, T)>> {
        let s = &self.states[k];
        let below = s.iter().filter(|&&e| (e as usize) < i).count();
        let n_i = s.iter().filter(|&&e| e as usize == i).count();
        let factor = match self.statistics {
            Statistics::Bose => T::from_count(n_i + 1).sqrt(),
            Statistics::Fermi if n_i > 0 => return Ok(None),
            Statistics::Fermi => parity(below),
        };
        if s.len() >= self.max_total {
            return Err(Error::TruncationOverflow { max: self.max_total });
        }
        let mut next = s.clone();
        next.insert(below + n_i, i as u16);
        Ok(Some((self.index[&next], factor)))
    }

    /// Matrix of `a_i` on the truncated space.
    pub fn annihilation_matrix(&self, i: usize) -> Result<SparseMatrix<T>> {
        self.check_mode(i)?;
        let mut rows = vec![Vec::new(); self.dim()];
        for k in 0..self.dim() {
            if let Some((to, f)) = self.annihilate(i, k) {
                rows[to].push((k, Complex::new(f, T::zero())));
            }
        }
        Ok(SparseMatrix::from_rows(self.dim(), rows))
    }

    /// Matrix of `a_i⁺` with components leaving the truncated space dropped;
    /// it is the adjoint of [`OccupationBasis::annihilation_matrix`].
    pub fn creation_matrix(&self, i: usize) -> Result<SparseMatrix<T>> {
        self.check_mode(i)?;
        let mut rows = vec![Vec::new(); self.dim()];
        for k in 0..self.dim() {
            if let Ok(Some((to, f))) = self.create(i, k) {
                rows[to].push((k, Complex::new(f, T::zero())));
            }
        }
        Ok(SparseMatrix::from_rows(self.dim(), rows))
    }

    /// Tuples strictly below the truncation ceiling, where one creation
    /// followed by one annihilation is represented exactly.
    pub fn below_ceiling(&self, k: usize) -> bool {
        self.states[k].len() < self.max_total
    }
}

fn parity<T: Real>(count: usize) -> T {
    if count.is_multiple_of(2) {
        T::one()
    } else {
        -T::one()
    }
}

fn count_states(statistics: Statistics, modes: usize, max_total: usize) -> usize {
    let binom = |n: usize, k: usize| -> usize {
        if k > n {
            return 0;
        }
        let mut r: u128 = 1;
        for j in 0..k {
            r = r * (n - j) as u128 / (j + 1) as u128;
            if r > usize::MAX as u128 {
                return usize::MAX;
            }
        }
        r as usize
    };
    match statistics {
        // Multisets of size ≤ N from M symbols: C(M + N, N).
        Statistics::Bose => binom(modes + max_total, max_total),
        Statistics::Fermi => (0..=max_total.min(modes)).fold(0usize, |a, k| a.saturating_add(binom(modes, k))),
    }
}

fn enumerate(statistics: Statistics, modes: usize, remaining: usize, start: usize, current: &mut Vec<u16>, out: &mut Vec<Vec<u16>>) {
    if remaining == 0 {
        out.push(current.clone());
        return;
    }
    for i in start..modes {
        current.push(i as u16);
        let next = match statistics {
            Statistics::Bose => i,
            Statistics::Fermi => i + 1,
        };
        enumerate(statistics, modes, remaining - 1, next, current, out);
        current.pop();
    }
}

/// Amplitude `Φ(n)` for every tuple, with `m` components per tuple.
#[derive(Clone, Debug)]
pub struct FockState<T> {
    basis: Arc<OccupationBasis<T>>,
    components: usize,
    amplitudes: Vec<Complex<T>>,
}

impl<T: Real> PartialEq for FockState<T> {
    fn eq(&self, other: &Self) -> bool {
        *self.basis == *other.basis && self.components == other.components && self.amplitudes == other.amplitudes
    }
}

impl<T: Real> FockState<T> {
    /// `amplitudes` is tuple-major: component `α` of tuple `k` sits at
    /// `k·components + α`.
    pub fn new(basis: Arc<OccupationBasis<T>>, components: usize, amplitudes: Vec<Complex<T>>) -> Result<Self> {
        if components == 0 || amplitudes.len() != basis.dim() * components {
            return Err(Error::DimensionMismatch {
                expected: basis.dim() * components,
                got: amplitudes.len(),
            });
        }
        Ok(Self {
            basis,
            components,
            amplitudes,
        })
    }

    pub fn zeros(basis: Arc<OccupationBasis<T>>, components: usize) -> Self {
        let len = basis.dim() * components;
        Self {
            basis,
            components,
            amplitudes: vec![Complex::new(T::zero(), T::zero()); len],
        }
    }

    /// Single-component superposition `Σ c_k |n_k⟩`.
    pub fn from_terms(basis: Arc<OccupationBasis<T>>, terms: &[(&[usize], Complex<T>)]) -> Result<Self> {
        let mut state = Self::zeros(basis, 1);
        for (numbers, c) in terms {
            let k = state
                .basis
                .find_numbers(numbers)
                .ok_or_else(|| Error::BasisMismatch(format!("tuple {numbers:?} not in the truncated space")))?;
            state.amplitudes[k] += *c;
        }
        Ok(state)
    }

    pub fn vacuum(basis: Arc<OccupationBasis<T>>) -> Self {
        let mut s = Self::zeros(basis, 1);
        s.amplitudes[0] = Complex::new(T::one(), T::zero());
        s
    }

    pub fn basis(&self) -> &Arc<OccupationBasis<T>> {
        &self.basis
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amplitudes
    }

    /// Components of `Φ(n_k)`.
    pub fn amplitude(&self, k: usize) -> &[Complex<T>] {
        &self.amplitudes[k * self.components..(k + 1) * self.components]
    }

    /// `‖Φ‖² = Σ_n weight(n) Σ_α |Φ_α(n)|²`.
    pub fn norm_sqr(&self) -> T {
        numeric::sum((0..self.basis.dim()).map(|k| self.basis.weight(k) * numeric::norm_sqr(self.amplitude(k))))
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - T::one()).abs() <= T::lit(1e-10).max(T::check_tolerance())
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm_sqr();
        if n <= T::zero() {
            return Err(Error::Degenerate("zero Fock state".into()));
        }
        let s = n.sqrt().recip();
        Ok(self.map_amplitudes(|a| a * s))
    }

    fn map_amplitudes(&self, f: impl Fn(Complex<T>) -> Complex<T>) -> Self {
        Self {
            basis: self.basis.clone(),
            components: self.components,
            amplitudes: self.amplitudes.iter().map(|a| f(*a)).collect(),
        }
    }

    pub(crate) fn check_same_basis(&self, other: &OccupationBasis<T>) -> Result<()> {
        if !(std::ptr::eq(self.basis.as_ref(), other) || *self.basis == *other) {
            return Err(Error::BasisMismatch("state and operator use different Fock spaces".into()));
        }
        Ok(())
    }

    /// Weighted inner product `(self, other)`.
    pub fn inner(&self, other: &Self) -> Result<Complex<T>> {
        other.check_same_basis(&self.basis)?;
        if self.components != other.components {
            return Err(Error::DimensionMismatch {
                expected: self.components,
                got: other.components,
            });
        }
        Ok(numeric::sum_complex((0..self.basis.dim()).map(|k| {
            numeric::dot_conj(self.amplitude(k), other.amplitude(k)) * self.basis.weight(k)
        })))
    }

    /// Applies a matrix on the tuple index to every component.
    pub fn apply_sparse(&self, m: &SparseMatrix<T>) -> Result<Self> {
        if m.dim() != self.basis.dim() {
            return Err(Error::BasisMismatch("operator dimension differs from the Fock space".into()));
        }
        let mut out = Self::zeros(self.basis.clone(), self.components);
        for alpha in 0..self.components {
            let column: Vec<_> = (0..self.basis.dim()).map(|k| self.amplitude(k)[alpha]).collect();
            for (k, v) in m.apply(&column).into_iter().enumerate() {
                out.amplitudes[k * self.components + alpha] = v;
            }
        }
        Ok(out)
    }

    /// Applies a dense matrix on the tuple index to every component.
    pub fn apply_dense(&self, m: &DenseMatrix<T>) -> Result<Self> {
        if m.dim() != self.basis.dim() {
            return Err(Error::BasisMismatch("operator dimension differs from the Fock space".into()));
        }
        let mut out = Self::zeros(self.basis.clone(), self.components);
        for alpha in 0..self.components {
            let column: Vec<_> = (0..self.basis.dim()).map(|k| self.amplitude(k)[alpha]).collect();
            for (k, v) in m.apply(&column).into_iter().enumerate() {
                out.amplitudes[k * self.components + alpha] = v;
            }
        }
        Ok(out)
    }
}

/// `a_i Φ`.
pub fn apply_annihilation<T: Real>(i: usize, phi: &FockState<T>) -> Result<FockState<T>> {
    let basis = phi.basis();
    basis.check_mode(i)?;
    let mut out = FockState::zeros(basis.clone(), phi.components);
    for k in 0..basis.dim() {
        if let Some((to, f)) = basis.annihilate(i, k) {
            for alpha in 0..phi.components {
                out.amplitudes[to * phi.components + alpha] += phi.amplitude(k)[alpha] * f;
            }
        }
    }
    Ok(out)
}

/// `a_i⁺ Φ`; a nonzero amplitude pushed past the truncation is an error.
pub fn apply_creation<T: Real>(i: usize, phi: &FockState<T>) -> Result<FockState<T>> {
    let basis = phi.basis();
    basis.check_mode(i)?;
    let mut out = FockState::zeros(basis.clone(), phi.components);
    for k in 0..basis.dim() {
        let amp = phi.amplitude(k);
        if amp.iter().all(|a| a.norm_sqr() == T::zero()) {
            continue;
        }
        if let Some((to, f)) = basis.create(i, k)? {
            let m = phi.components;
            for (dst, a) in out.amplitudes[to * m..(to + 1) * m].iter_mut().zip(amp) {
                *dst += *a * f;
            }
        }
    }
    Ok(out)
}

/// `Σ_{n: predicate(n)} weight(n) |Φ(n)|²`.
pub fn event_probability<T: Real>(phi: &FockState<T>, predicate: impl Fn(Occupation<'_>) -> bool) -> T {
    let basis = phi.basis();
    numeric::sum(
        (0..basis.dim())
            .filter(|&k| predicate(basis.occupation(k)))
            .map(|k| basis.weight(k) * numeric::norm_sqr(phi.amplitude(k))),
    )
}

/// Fock-space image `Γ(V)` of a one-particle unitary `V` (`M × M`), which
/// maps `a_i⁺` to `Σ_k V_ki a_k⁺`.
pub fn induced_unitary<T: Real>(v: &DenseMatrix<T>, basis: &Arc<OccupationBasis<T>>) -> Result<DenseMatrix<T>> {
    if v.dim() != basis.modes() {
        return Err(Error::BasisMismatch("one-particle unitary has the wrong size".into()));
    }
    let dim = basis.dim();
    let mut out = DenseMatrix::zeros(dim);
    for k in 0..dim {
        let entries: Vec<usize> = basis.occupation(k).entries().collect();
        let mut state = vec![Complex::new(T::zero(), T::zero()); dim];
        state[0] = Complex::new(T::one(), T::zero());
        for &e in entries.iter().rev() {
            let mut next = vec![Complex::new(T::zero(), T::zero()); dim];
            for (src, amp) in state.iter().enumerate() {
                if amp.norm_sqr() == T::zero() {
                    continue;
                }
                for target_mode in 0..basis.modes() {
                    let coeff = v.get(target_mode, e);
                    if coeff.norm_sqr() == T::zero() {
                        continue;
                    }
                    if let Some((to, f)) = basis.create(target_mode, src)? {
                        next[to] += *amp * coeff * f;
                    }
                }
            }
            state = next;
        }
        if basis.statistics() == Statistics::Bose {
            let n = basis.occupation(k).numbers(basis.modes());
            let norm = n.iter().fold(T::one(), |acc, &c| acc * factorial::<T>(c)).sqrt();
            for a in &mut state {
                *a /= norm;
            }
        }
        for (row, a) in state.into_iter().enumerate() {
            out.set(row, k, a);
        }
    }
    Ok(out)
}

fn factorial<T: Real>(n: usize) -> T {
    (1..=n).fold(T::one(), |acc, k| acc * T::from_count(k))
}
