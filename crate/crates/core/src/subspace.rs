//! Subspaces given by full-column-rank bases, complements and direct-sum
//! projectors.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::mat::Mat;
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct Subspace<F> {
    basis: Mat<F>,
}

impl<F: Scalar> Subspace<F> {
    pub fn zero(ambient: usize) -> Self {
        Subspace { basis: Mat::zeros(ambient, 0) }
    }

    pub fn full(ambient: usize) -> Self {
        Subspace { basis: Mat::identity(ambient) }
    }

    /// Wraps a basis, rejecting dependent columns.
    pub fn from_basis(basis: Mat<F>) -> Result<Self> {
        if basis.rank() != basis.cols() {
            return Err(Error::DependentBasis);
        }
        Ok(Subspace { basis })
    }

    /// Caller guarantees full column rank.
    pub(crate) fn from_basis_unchecked(basis: Mat<F>) -> Self {
        Subspace { basis }
    }

    /// Column space of an arbitrary matrix (pivot columns kept).
    pub fn span(m: &Mat<F>) -> Self {
        range(m)
    }

    pub fn basis(&self) -> &Mat<F> {
        &self.basis
    }

    pub fn ambient(&self) -> usize {
        self.basis.rows()
    }

    pub fn dim(&self) -> usize {
        self.basis.cols()
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    pub fn contains_vector(&self, v: &[F]) -> bool {
        self.contains_cols(&Mat::column(v))
    }

    /// Every column of `m` lies in the subspace.
    pub fn contains_cols(&self, m: &Mat<F>) -> bool {
        assert_eq!(m.rows(), self.ambient(), "ambient mismatch");
        if m.cols() == 0 {
            return true;
        }
        if self.dim() == 0 {
            return m.is_zero();
        }
        self.basis.solve(m).is_some()
    }

    pub fn contains(&self, other: &Subspace<F>) -> bool {
        self.contains_cols(&other.basis)
    }

    pub fn same_as(&self, other: &Subspace<F>) -> bool {
        self.dim() == other.dim() && self.contains(other)
    }

    /// Coordinates of the columns of `m` in this basis.
    pub fn coordinates(&self, m: &Mat<F>) -> Option<Mat<F>> {
        if self.dim() == 0 {
            return m.is_zero().then(|| Mat::zeros(0, m.cols()));
        }
        self.basis.solve(m)
    }

    /// Image under a linear map: span of `a * basis`.
    pub fn image(&self, a: &Mat<F>) -> Subspace<F> {
        range(&(a * &self.basis))
    }

    /// Sum of subspaces.
    pub fn sum(parts: &[&Subspace<F>], ambient: usize) -> Subspace<F> {
        let bases: Vec<&Mat<F>> = parts.iter().map(|p| &p.basis).collect();
        range(&Mat::hstack(ambient, &bases))
    }
}

/// Null space of `m` as a subspace of its column space's domain.
pub fn kernel<F: Scalar>(m: &Mat<F>) -> Subspace<F> {
    Subspace { basis: m.kernel_basis() }
}

/// Column space of `m`, basis = pivot columns of `m` in index order.
pub fn range<F: Scalar>(m: &Mat<F>) -> Subspace<F> {
    let piv = m.rref().pivots;
    Subspace { basis: m.select_cols(&piv) }
}

/// Greedy complement of `inner` inside `outer`: extend `inner`'s basis by
/// columns of `outer`'s basis, lowest index first.
pub fn complement_in<F: Scalar>(inner: &Subspace<F>, outer: &Subspace<F>) -> Result<Subspace<F>> {
    if inner.ambient() != outer.ambient() {
        return Err(Error::Shape(alloc::format!(
            "ambient {} against {}",
            inner.ambient(),
            outer.ambient()
        )));
    }
    if !outer.contains(inner) {
        return Err(Error::Containment);
    }
    let n = outer.ambient();
    let target = outer.dim() - inner.dim();
    let mut current = inner.basis.clone();
    let mut chosen = Vec::new();
    for j in 0..outer.dim() {
        if chosen.len() == target {
            break;
        }
        let col = outer.basis.select_cols(&[j]);
        let trial = Mat::hstack(n, &[&current, &col]);
        if trial.rank() == trial.cols() {
            current = trial;
            chosen.push(j);
        }
    }
    Ok(Subspace { basis: outer.basis.select_cols(&chosen) })
}

/// Direct sum of subspaces with the associated projectors.
#[derive(Clone, Debug)]
pub struct Decomposition<F> {
    ambient: usize,
    parts: Vec<Subspace<F>>,
    projectors: Vec<Mat<F>>,
    coords: Vec<Mat<F>>,
}

impl<F: Scalar> Decomposition<F> {
    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn parts(&self) -> &[Subspace<F>] {
        &self.parts
    }

    pub fn projectors(&self) -> &[Mat<F>] {
        &self.projectors
    }

    pub fn projector(&self, i: usize) -> &Mat<F> {
        &self.projectors[i]
    }

    /// Rows of the inverted stacked basis belonging to part `i`:
    /// maps a vector to its coordinates in part `i`'s basis.
    pub fn coordinate_map(&self, i: usize) -> &Mat<F> {
        &self.coords[i]
    }
}

pub fn build_decomposition<F: Scalar>(parts: &[Subspace<F>], ambient: usize) -> Result<Decomposition<F>> {
    if parts.iter().any(|p| p.ambient() != ambient) {
        return Err(Error::Shape(alloc::format!("part outside ambient dimension {ambient}")));
    }
    let total: usize = parts.iter().map(|p| p.dim()).sum();
    if total != ambient {
        return Err(Error::NotDirectSum);
    }
    let bases: Vec<&Mat<F>> = parts.iter().map(|p| &p.basis).collect();
    let stacked = Mat::hstack(ambient, &bases);
    let w = stacked.inverse().ok_or(Error::NotDirectSum)?;
    let mut projectors = Vec::with_capacity(parts.len());
    let mut coords = Vec::with_capacity(parts.len());
    let mut r0 = 0;
    for p in parts {
        let rows = w.block(r0, 0, p.dim(), ambient);
        projectors.push(&p.basis * &rows);
        coords.push(rows);
        r0 += p.dim();
    }
    Ok(Decomposition { ambient, parts: parts.to_vec(), projectors, coords })
}
