use rand::Rng;
use rand_distr::StandardNormal;

use super::{CMatrix, CVector, StateVector, UnitaryOperator, C64};

/// Haar-distributed unitary: QR of a complex Ginibre matrix, with the phases
/// of `diag(R)` moved into `Q` so the distribution is exactly Haar.
pub fn haar_random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> UnitaryOperator {
    assert!(dim >= 1, "dimension must be positive");
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let entries: Vec<C64> = (0..dim * dim)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            C64::new(re * scale, im * scale)
        })
        .collect();
    let z = CMatrix::from_row_slice(dim, dim, &entries);
    let qr = z.qr();
    let (q, r) = (qr.q(), qr.r());
    let phases: Vec<C64> = (0..dim)
        .map(|k| {
            let d = r[(k, k)];
            if d.norm() > 0.0 {
                d / d.norm()
            } else {
                C64::new(1.0, 0.0)
            }
        })
        .collect();
    let u = CMatrix::from_fn(dim, dim, |i, j| q[(i, j)] * phases[j]);
    UnitaryOperator::from_matrix_unchecked(u)
}

/// First column of a Haar unitary.
pub fn haar_random_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> StateVector {
    let u = haar_random_unitary(dim, rng);
    let col = CVector::from_iterator(dim, u.matrix().column(0).iter().copied());
    StateVector::normalized(col, vec![dim]).expect("column of a unitary is a unit vector")
}
