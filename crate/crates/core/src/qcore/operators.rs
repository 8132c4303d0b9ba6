use crate::error::{QbcError, Result};

use super::{
    eigh, hermitize, kron, max_abs, max_abs_diff, CMatrix, StateVector, C64, DERIVED_TOL, PSD_TOL, STRUCT_TOL,
};

/// Hermitian, positive semidefinite, unit-trace operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: CMatrix,
}

impl DensityOperator {
    /// Validates hermiticity, trace and positivity. Roundoff-level
    /// anti-Hermitian parts are removed after the check.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(QbcError::DimensionMismatch { expected: matrix.nrows(), found: matrix.ncols() });
        }
        let deviation = max_abs_diff(&matrix, &matrix.adjoint());
        if deviation > STRUCT_TOL {
            return Err(QbcError::NotHermitian { deviation });
        }
        let matrix = hermitize(&matrix);
        let deviation = (matrix.trace() - C64::new(1.0, 0.0)).norm();
        if deviation > STRUCT_TOL {
            return Err(QbcError::TraceNotOne { deviation });
        }
        let min_eigenvalue = eigh(&matrix).0.last().copied().unwrap_or(0.0);
        if min_eigenvalue < -PSD_TOL {
            return Err(QbcError::NotPositive { min_eigenvalue });
        }
        Ok(Self { matrix })
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self { matrix: CMatrix::identity(dim, dim).unscale(dim as f64) }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Eigenvalues, non-increasing.
    pub fn eigenvalues(&self) -> Vec<f64> {
        eigh(&self.matrix).0
    }

    /// Max entry-wise distance to another operator.
    pub fn max_deviation(&self, other: &DensityOperator) -> f64 {
        max_abs_diff(&self.matrix, &other.matrix)
    }
}

/// Which factor of a bipartite operator survives a partial trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Keep {
    First,
    Second,
}

/// Reduced operator of one factor of a `d_first x d_second` system.
pub fn partial_trace(rho: &DensityOperator, dims: (usize, usize), keep: Keep) -> Result<DensityOperator> {
    let (d1, d2) = dims;
    if d1 * d2 != rho.dim() {
        return Err(QbcError::DimensionMismatch { expected: d1 * d2, found: rho.dim() });
    }
    let m = rho.matrix();
    let reduced = match keep {
        Keep::Second => CMatrix::from_fn(d2, d2, |j, q| (0..d1).map(|i| m[(i * d2 + j, i * d2 + q)]).sum()),
        Keep::First => CMatrix::from_fn(d1, d1, |i, p| (0..d2).map(|j| m[(i * d2 + j, p * d2 + j)]).sum()),
    };
    DensityOperator::new(reduced)
}

/// Square matrix with `U^dag U = I` to within 1e-10.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryOperator {
    matrix: CMatrix,
}

impl UnitaryOperator {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(QbcError::DimensionMismatch { expected: matrix.nrows(), found: matrix.ncols() });
        }
        let n = matrix.nrows();
        let deviation = max_abs(&(matrix.adjoint() * &matrix - CMatrix::identity(n, n)));
        if deviation > DERIVED_TOL {
            return Err(QbcError::NotUnitary { deviation });
        }
        Ok(Self { matrix })
    }

    pub fn from_row_slice(dim: usize, entries: &[C64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(QbcError::DimensionMismatch { expected: dim * dim, found: entries.len() });
        }
        Self::new(CMatrix::from_row_slice(dim, dim, entries))
    }

    pub fn identity(dim: usize) -> Self {
        Self { matrix: CMatrix::identity(dim, dim) }
    }

    pub fn pauli_x() -> Self {
        let (o, l) = (C64::new(0.0, 0.0), C64::new(1.0, 0.0));
        Self { matrix: CMatrix::from_row_slice(2, 2, &[o, l, l, o]) }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn dagger(&self) -> Self {
        Self { matrix: self.matrix.adjoint() }
    }

    /// `self * other`.
    pub fn compose(&self, other: &UnitaryOperator) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(QbcError::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        Ok(Self { matrix: &self.matrix * &other.matrix })
    }

    pub fn tensor(&self, other: &UnitaryOperator) -> Self {
        Self { matrix: kron(&self.matrix, &other.matrix) }
    }

    /// Applies the operator to the whole state; dims are kept.
    pub fn apply(&self, psi: &StateVector) -> Result<StateVector> {
        if self.dim() != psi.dim() {
            return Err(QbcError::DimensionMismatch { expected: self.dim(), found: psi.dim() });
        }
        Ok(StateVector::from_parts_unchecked(&self.matrix * psi.amplitudes(), psi.dims().to_vec()))
    }

    /// `max |(U^dag U - I)_{ij}|`.
    pub fn unitarity_deviation(&self) -> f64 {
        let n = self.dim();
        max_abs(&(self.matrix.adjoint() * &self.matrix - CMatrix::identity(n, n)))
    }

    /// `|Tr(self^dag other)| / d`: 1 iff equal up to global phase.
    pub fn phase_insensitive_overlap(&self, other: &UnitaryOperator) -> f64 {
        (self.matrix.adjoint() * &other.matrix).trace().norm() / self.dim() as f64
    }

    pub(crate) fn from_matrix_unchecked(matrix: CMatrix) -> Self {
        Self { matrix }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::c;
    use std::f64::consts::FRAC_1_SQRT_2 as H;

    fn state(amps: &[C64]) -> StateVector {
        StateVector::from_slice(amps).unwrap().with_dims(vec![2, 2]).unwrap()
    }

    #[test]
    fn identity_tensor_identity() {
        let i4 = UnitaryOperator::identity(2).tensor(&UnitaryOperator::identity(2));
        assert_eq!(i4, UnitaryOperator::identity(4));
    }

    #[test]
    fn partial_trace_of_product_state() {
        let rho = state(&[c(1., 0.), c(0., 0.), c(0., 0.), c(0., 0.)]).density();
        let red = partial_trace(&rho, (2, 2), Keep::Second).unwrap();
        assert!(red.max_deviation(&StateVector::basis(2, 0).density()) < 1e-15);
    }

    #[test]
    fn partial_trace_of_singlet_and_bell() {
        let singlet = state(&[c(0., 0.), c(H, 0.), c(-H, 0.), c(0., 0.)]).density();
        let half = DensityOperator::maximally_mixed(2);
        assert!(partial_trace(&singlet, (2, 2), Keep::Second).unwrap().max_deviation(&half) < 1e-15);
        let bell = state(&[c(H, 0.), c(0., 0.), c(0., 0.), c(H, 0.)]).density();
        assert!(partial_trace(&bell, (2, 2), Keep::First).unwrap().max_deviation(&half) < 1e-15);
    }

    #[test]
    fn partial_trace_rejects_wrong_dims() {
        let rho = DensityOperator::maximally_mixed(4);
        assert!(matches!(
            partial_trace(&rho, (2, 3), Keep::First),
            Err(QbcError::DimensionMismatch { expected: 6, found: 4 })
        ));
    }

    #[test]
    fn density_validation() {
        let m = CMatrix::from_row_slice(2, 2, &[c(1.2, 0.), c(0., 0.), c(0., 0.), c(-0.2, 0.)]);
        assert!(matches!(DensityOperator::new(m), Err(QbcError::NotPositive { .. })));
        let m = CMatrix::from_row_slice(2, 2, &[c(0.5, 0.), c(0.1, 0.), c(0., 0.), c(0.5, 0.)]);
        assert!(matches!(DensityOperator::new(m), Err(QbcError::NotHermitian { .. })));
        let m = CMatrix::from_row_slice(2, 2, &[c(0.5, 0.), c(0., 0.), c(0., 0.), c(0.6, 0.)]);
        assert!(matches!(DensityOperator::new(m), Err(QbcError::TraceNotOne { .. })));
    }

    #[test]
    fn rejects_non_unitary() {
        let m = CMatrix::from_row_slice(2, 2, &[c(1., 0.), c(1., 0.), c(0., 0.), c(1., 0.)]);
        assert!(matches!(UnitaryOperator::new(m), Err(QbcError::NotUnitary { .. })));
    }
}
