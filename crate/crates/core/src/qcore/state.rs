use crate::error::{QbcError, Result};

use super::{kron, CMatrix, CVector, DensityOperator, C64, MAX_SUBSYSTEM_DIM, STRUCT_TOL};

/// Unit vector with a declared subsystem factorization.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: CVector,
    dims: Vec<usize>,
}

fn check_dims(dims: &[usize], len: usize) -> Result<()> {
    if dims.is_empty() || dims.iter().any(|&d| d == 0 || d > MAX_SUBSYSTEM_DIM) {
        return Err(QbcError::InvalidInput(format!(
            "subsystem dimensions must lie in 1..={MAX_SUBSYSTEM_DIM}, got {dims:?}"
        )));
    }
    let product: usize = dims.iter().product();
    if product != len {
        return Err(QbcError::DimensionMismatch { expected: product, found: len });
    }
    Ok(())
}

impl StateVector {
    /// Validates norm and factorization.
    pub fn new(amplitudes: CVector, dims: Vec<usize>) -> Result<Self> {
        check_dims(&dims, amplitudes.len())?;
        let deviation = (amplitudes.norm() - 1.0).abs();
        if deviation > STRUCT_TOL {
            return Err(QbcError::NotNormalized { deviation });
        }
        Ok(Self { amplitudes, dims })
    }

    /// Rescales to unit norm. Rejects the zero vector.
    pub fn normalized(amplitudes: CVector, dims: Vec<usize>) -> Result<Self> {
        check_dims(&dims, amplitudes.len())?;
        let norm = amplitudes.norm();
        if norm < 1e-300 {
            return Err(QbcError::InvalidInput("cannot normalize the zero vector".into()));
        }
        Ok(Self { amplitudes: amplitudes.unscale(norm), dims })
    }

    pub fn from_slice(amps: &[C64]) -> Result<Self> {
        Self::normalized(CVector::from_column_slice(amps), vec![amps.len()])
    }

    /// Computational basis state `|index>` of a single system.
    pub fn basis(dim: usize, index: usize) -> Self {
        assert!(index < dim, "basis index {index} out of range for dimension {dim}");
        let mut v = CVector::zeros(dim);
        v[index] = C64::new(1.0, 0.0);
        Self { amplitudes: v, dims: vec![dim] }
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    /// Same amplitudes under a different factorization.
    pub fn with_dims(&self, dims: Vec<usize>) -> Result<Self> {
        check_dims(&dims, self.dim())?;
        Ok(Self { amplitudes: self.amplitudes.clone(), dims })
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        if self.dim() != other.dim() {
            return Err(QbcError::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    /// `|<self|other>|`, the pure-state fidelity.
    pub fn overlap(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm().min(1.0))
    }

    /// Equality up to global phase: `|<a|b>| >= 1 - tol`.
    pub fn same_ray(&self, other: &StateVector, tol: f64) -> bool {
        self.overlap(other).map(|f| f >= 1.0 - tol).unwrap_or(false)
    }

    pub fn tensor(&self, other: &StateVector) -> StateVector {
        let a = CMatrix::from_column_slice(self.dim(), 1, self.amplitudes.as_slice());
        let b = CMatrix::from_column_slice(other.dim(), 1, other.amplitudes.as_slice());
        let k = kron(&a, &b);
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        StateVector { amplitudes: CVector::from_column_slice(k.as_slice()), dims }
    }

    /// `|self><self|`.
    pub fn density(&self) -> DensityOperator {
        let outer = &self.amplitudes * self.amplitudes.adjoint();
        DensityOperator::new(outer).expect("projector onto a unit vector is a density operator")
    }

    /// Row-major `d_A x d_B` coefficient matrix `C_{ij} = <ij|psi>`.
    pub fn coefficient_matrix(&self, d_a: usize, d_b: usize) -> Result<CMatrix> {
        if d_a * d_b != self.dim() {
            return Err(QbcError::DimensionMismatch { expected: d_a * d_b, found: self.dim() });
        }
        Ok(CMatrix::from_row_slice(d_a, d_b, self.amplitudes.as_slice()))
    }

    pub(crate) fn from_parts_unchecked(amplitudes: CVector, dims: Vec<usize>) -> Self {
        debug_assert_eq!(dims.iter().product::<usize>(), amplitudes.len());
        Self { amplitudes, dims }
    }
}
