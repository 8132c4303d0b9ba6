use crate::error::Result;

use super::{eigh, svd_sorted, CVector, DensityOperator, StateVector, C64};

// Schmidt coefficients at or below this are dropped from the decomposition.
const COEFF_FLOOR: f64 = 1e-12;

/// `psi = sum_k coefficients[k] * left[k] (x) right[k]`.
#[derive(Debug, Clone)]
pub struct SchmidtDecomposition {
    pub coefficients: Vec<f64>,
    pub left_basis: Vec<CVector>,
    pub right_basis: Vec<CVector>,
}

impl SchmidtDecomposition {
    pub fn rank(&self) -> usize {
        self.coefficients.len()
    }

    pub fn reconstruct(&self) -> CVector {
        let (da, db) = (self.left_basis[0].len(), self.right_basis[0].len());
        let mut out = CVector::zeros(da * db);
        for ((s, a), b) in self.coefficients.iter().zip(&self.left_basis).zip(&self.right_basis) {
            for i in 0..da {
                for j in 0..db {
                    out[i * db + j] += a[i] * b[j] * *s;
                }
            }
        }
        out
    }
}

/// SVD of the row-major coefficient matrix `C = U S V^dag`; the right
/// Schmidt vectors are the rows of `V^dag`.
pub fn schmidt_decompose(psi: &StateVector, dims: (usize, usize)) -> Result<SchmidtDecomposition> {
    let c = psi.coefficient_matrix(dims.0, dims.1)?;
    let (u, s, v_t) = svd_sorted(&c);
    let mut out = SchmidtDecomposition { coefficients: vec![], left_basis: vec![], right_basis: vec![] };
    for (k, &sk) in s.iter().enumerate() {
        if sk <= COEFF_FLOOR && k > 0 {
            break;
        }
        out.coefficients.push(sk);
        out.left_basis.push(u.column(k).into_owned());
        out.right_basis.push(v_t.row(k).transpose());
    }
    Ok(out)
}

/// Purification on dims `(d, d)` with the ancilla second:
/// `sum_k sqrt(lambda_k) |e_k> (x) |k>`, eigenpairs in non-increasing order.
pub fn purify(rho: &DensityOperator) -> StateVector {
    let d = rho.dim();
    let (values, vectors) = eigh(rho.matrix());
    let mut amps = CVector::zeros(d * d);
    for (k, &lambda) in values.iter().enumerate() {
        let w = lambda.max(0.0).sqrt();
        for i in 0..d {
            amps[i * d + k] = vectors[(i, k)] * C64::new(w, 0.0);
        }
    }
    StateVector::normalized(amps, vec![d, d]).expect("purification of a unit-trace operator")
}
