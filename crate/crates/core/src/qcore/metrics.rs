use crate::error::{QbcError, Result};

use super::{eigh, sqrt_psd, svd_sorted, DensityOperator, PSD_TOL};

fn same_dim(rho: &DensityOperator, sigma: &DensityOperator) -> Result<()> {
    if rho.dim() != sigma.dim() {
        return Err(QbcError::DimensionMismatch { expected: rho.dim(), found: sigma.dim() });
    }
    Ok(())
}

/// Uhlmann fidelity `Tr sqrt(sqrt(rho) sigma sqrt(rho))`, computed as the
/// trace norm of `sqrt(rho) sqrt(sigma)`. Going through singular values
/// avoids square roots of roundoff-level eigenvalues.
pub fn fidelity(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    same_dim(rho, sigma)?;
    let not_psd = |min_eigenvalue| QbcError::NotPositive { min_eigenvalue };
    let a = sqrt_psd(rho.matrix(), PSD_TOL).map_err(not_psd)?;
    let b = sqrt_psd(sigma.matrix(), PSD_TOL).map_err(not_psd)?;
    let (_, s, _) = svd_sorted(&(a * b));
    Ok(s.iter().sum::<f64>().clamp(0.0, 1.0))
}

/// `(1/2) * sum |eig(rho - sigma)|`.
pub fn trace_distance(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    same_dim(rho, sigma)?;
    let (values, _) = eigh(&(rho.matrix() - sigma.matrix()));
    Ok((0.5 * values.iter().map(|v| v.abs()).sum::<f64>()).clamp(0.0, 1.0))
}
