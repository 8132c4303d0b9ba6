//! Parameterized scheme families used by tests, sweeps and the acceptance
//! suite.

use rand::Rng;

use super::{BobPolicy, CommitmentScheme};
use crate::qcore::{haar_random_unitary, CMatrix, StateVector, UnitaryOperator, C64};

fn qubit_encodings() -> [StateVector; 2] {
    [StateVector::basis(2, 0), StateVector::basis(2, 1)]
}

/// `U = (|0><0| (x) V_0 + |1><1| (x) V_1)(H (x) I)`.
///
/// Its amplitudes satisfy `a_{ij1l} = (-1)^i a_{ij0l}`, so Bob's two views
/// agree for every initial state and `S_A = diag(1, -1)` flips the bit.
pub fn phase_scheme(name: &str, v0: &UnitaryOperator, v1: &UnitaryOperator) -> CommitmentScheme {
    assert_eq!(v0.dim(), v1.dim(), "Bob-side unitaries must share a dimension");
    let d_b = v0.dim();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut u = CMatrix::zeros(2 * d_b, 2 * d_b);
    // U|k, l> = (|0> V_0|l> + (-1)^k |1> V_1|l>) / sqrt(2)
    for k in 0..2 {
        let sign = if k == 0 { h } else { -h };
        for l in 0..d_b {
            for j in 0..d_b {
                u[(j, k * d_b + l)] = v0.matrix()[(j, l)] * h;
                u[(d_b + j, k * d_b + l)] = v1.matrix()[(j, l)] * sign;
            }
        }
    }
    let unitary = UnitaryOperator::new(u).expect("phase construction is unitary");
    CommitmentScheme::new(name, (2, d_b), unitary, qubit_encodings(), BobPolicy::RandomHaar)
        .expect("consistent dimensions")
}

pub fn random_phase_scheme<R: Rng + ?Sized>(d_b: usize, rng: &mut R) -> CommitmentScheme {
    let v0 = haar_random_unitary(d_b, rng);
    let v1 = haar_random_unitary(d_b, rng);
    phase_scheme("random-phase", &v0, &v1)
}

/// Perfectly concealing by construction, for every Bob input.
///
/// Alice holds a bit register and an `m`-dimensional ancilla
/// (`d_A = 2m`, encodings `|b>|0>`). The dynamics entangle ancilla and Bob
/// through a Haar `G`, then rotate the ancilla by `W^b`, and finish with
/// Haar local unitaries on both sides. `W^b` never touches Bob, so his
/// reduced state is independent of `b`.
pub fn random_concealing_scheme<R: Rng + ?Sized>(m: usize, d_b: usize, rng: &mut R) -> CommitmentScheme {
    assert!(m >= 1);
    let g = haar_random_unitary(m * d_b, rng);
    let w = haar_random_unitary(m, rng);
    let wg = w.tensor(&UnitaryOperator::identity(d_b)).compose(&g).expect("same dimension");
    let block = m * d_b;
    let mut u = CMatrix::zeros(2 * block, 2 * block);
    u.view_mut((0, 0), (block, block)).copy_from(g.matrix());
    u.view_mut((block, block), (block, block)).copy_from(wg.matrix());
    let local = haar_random_unitary(2 * m, rng).tensor(&haar_random_unitary(d_b, rng));
    let unitary = UnitaryOperator::new(local.matrix() * u).expect("product of unitaries");
    let encodings = [StateVector::basis(2 * m, 0), StateVector::basis(2 * m, m)];
    CommitmentScheme::new("random-concealing", (2 * m, d_b), unitary, encodings, BobPolicy::RandomHaar)
        .expect("consistent dimensions")
}

/// Haar-random joint dynamics with computational-basis encodings.
pub fn random_scheme<R: Rng + ?Sized>(d_a: usize, d_b: usize, rng: &mut R) -> CommitmentScheme {
    assert!(d_a >= 2);
    let unitary = haar_random_unitary(d_a * d_b, rng);
    let encodings = [StateVector::basis(d_a, 0), StateVector::basis(d_a, 1)];
    CommitmentScheme::new("random", (d_a, d_b), unitary, encodings, BobPolicy::RandomHaar)
        .expect("consistent dimensions")
}

/// `U = V (x) W`: Bob's view never depends on the bit.
pub fn random_product_scheme<R: Rng + ?Sized>(d_a: usize, d_b: usize, rng: &mut R) -> CommitmentScheme {
    assert!(d_a >= 2);
    let unitary = haar_random_unitary(d_a, rng).tensor(&haar_random_unitary(d_b, rng));
    let encodings = [StateVector::basis(d_a, 0), StateVector::basis(d_a, 1)];
    CommitmentScheme::new("random-product", (d_a, d_b), unitary, encodings, BobPolicy::RandomHaar)
        .expect("consistent dimensions")
}

/// Alice-controlled NOT onto Bob: `|b>|x> -> |b>|x xor b>`.
pub fn bit_copy_scheme() -> CommitmentScheme {
    let (o, l) = (C64::new(0.0, 0.0), C64::new(1.0, 0.0));
    let cnot =
        UnitaryOperator::from_row_slice(4, &[l, o, o, o, o, l, o, o, o, o, o, l, o, o, l, o]).expect("CNOT is unitary");
    CommitmentScheme::new("bobcopy", (2, 2), cnot, qubit_encodings(), BobPolicy::Fixed(StateVector::basis(2, 0)))
        .expect("consistent dimensions")
}
