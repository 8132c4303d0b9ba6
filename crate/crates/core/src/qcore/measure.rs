use rand::Rng;

use crate::error::{QbcError, Result};

use super::{CVector, StateVector, UnitaryOperator, C64, DERIVED_TOL};

// (left, local, right) extents around subsystem `target`.
fn split_dims(dims: &[usize], target: usize) -> Result<(usize, usize, usize)> {
    if target >= dims.len() {
        return Err(QbcError::InvalidInput(format!(
            "target subsystem {target} out of range for {} subsystems",
            dims.len()
        )));
    }
    let left = dims[..target].iter().product();
    let right = dims[target + 1..].iter().product();
    Ok((left, dims[target], right))
}

/// Applies `op` to subsystem `target`, identity elsewhere.
pub fn apply_local(op: &UnitaryOperator, psi: &StateVector, target: usize) -> Result<StateVector> {
    let (left, d, right) = split_dims(psi.dims(), target)?;
    if op.dim() != d {
        return Err(QbcError::DimensionMismatch { expected: d, found: op.dim() });
    }
    let m = op.matrix();
    let a = psi.amplitudes();
    let mut out = CVector::zeros(a.len());
    for l in 0..left {
        for r in 0..right {
            for s in 0..d {
                let mut acc = C64::new(0.0, 0.0);
                for t in 0..d {
                    acc += m[(s, t)] * a[(l * d + t) * right + r];
                }
                out[(l * d + s) * right + r] = acc;
            }
        }
    }
    Ok(StateVector::from_parts_unchecked(out, psi.dims().to_vec()))
}

#[derive(Debug, Clone)]
pub struct Measurement {
    pub outcome: usize,
    pub probabilities: Vec<f64>,
    pub post_state: StateVector,
}

/// Projective measurement of subsystem `target` in an orthonormal basis,
/// sampled with Born probabilities from one uniform draw.
pub fn measure_projective<R: Rng + ?Sized>(
    psi: &StateVector,
    basis: &[CVector],
    target: usize,
    rng: &mut R,
) -> Result<Measurement> {
    let (left, d, right) = split_dims(psi.dims(), target)?;
    if basis.len() != d {
        return Err(QbcError::DimensionMismatch { expected: d, found: basis.len() });
    }
    let mut deviation: f64 = 0.0;
    for (i, u) in basis.iter().enumerate() {
        if u.len() != d {
            return Err(QbcError::DimensionMismatch { expected: d, found: u.len() });
        }
        for (j, v) in basis.iter().enumerate() {
            let target_value = if i == j { 1.0 } else { 0.0 };
            deviation = deviation.max((u.dotc(v) - C64::new(target_value, 0.0)).norm());
        }
    }
    if deviation > DERIVED_TOL {
        return Err(QbcError::NotOrthonormal { deviation });
    }

    let a = psi.amplitudes();
    // projected[k][(l, r)] = <b_k| psi_{l, ., r}>
    let projected: Vec<Vec<C64>> = basis
        .iter()
        .map(|b| {
            let mut out = Vec::with_capacity(left * right);
            for l in 0..left {
                for r in 0..right {
                    out.push((0..d).map(|t| b[t].conj() * a[(l * d + t) * right + r]).sum());
                }
            }
            out
        })
        .collect();
    let probabilities: Vec<f64> = projected.iter().map(|p| p.iter().map(|z| z.norm_sqr()).sum()).collect();

    let u: f64 = rng.random::<f64>() * probabilities.iter().sum::<f64>();
    let mut outcome = probabilities.iter().rposition(|&p| p > 0.0).unwrap_or(0);
    let mut acc = 0.0;
    for (k, &p) in probabilities.iter().enumerate() {
        acc += p;
        if u < acc {
            outcome = k;
            break;
        }
    }

    let b = &basis[outcome];
    let coeffs = &projected[outcome];
    let mut post = CVector::zeros(a.len());
    for l in 0..left {
        for r in 0..right {
            for s in 0..d {
                post[(l * d + s) * right + r] = b[s] * coeffs[l * right + r];
            }
        }
    }
    let post_state = StateVector::normalized(post, psi.dims().to_vec())?;
    Ok(Measurement { outcome, probabilities, post_state })
}
