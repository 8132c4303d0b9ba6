//! Synthesis of Alice's cheating unitary `S_A`.
//!
//! Two constructions are provided:
//!
//! * [`synthesize_diagonal`] builds a diagonal `S_A` directly from the
//!   amplitudes `a_{ijbl} = <ij|U_AB|b l>` when the term-wise concealing
//!   condition `a_{ij0l} a*_{iq0r} = a_{ij1l} a*_{iq1r}` holds. The result does
//!   not depend on Bob's initial state.
//! * [`synthesize_uhlmann`] works for any pair of bipartite states. With
//!   `C_b` the coefficient matrices and `C_0 C_1^dag = U S V^dag`, the local
//!   unitary `V U^dag` maximizes `|<phi_1|(S (x) I)|phi_0>|`, and the maximum
//!   is the trace norm `sum_k s_k`, which equals `F(rho_0^B, rho_1^B)`.

use serde::Serialize;

use crate::error::{QbcError, Result};
use crate::qcore::{apply_local, max_abs_diff, svd_sorted, CMatrix, StateVector, UnitaryOperator, C64};
use crate::scheme::{Bit, CommitmentScheme};

/// Residual threshold below which the diagonal construction is attempted.
pub const DIAGONAL_CONDITION_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum AttackMethod {
    Diagonal,
    Uhlmann,
}

#[derive(Debug, Clone, Serialize)]
pub struct AttackReport {
    pub s_a: UnitaryOperator,
    pub achieved_fidelity: f64,
    pub method: AttackMethod,
    /// Diagonal: term-wise residual of the amplitude condition.
    /// Uhlmann: max entry-wise distance between Bob's two reduced states.
    pub condition_residual: f64,
}

/// Both readings of the concealing condition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConditionResiduals {
    /// `max_{i,j,l,q,r} |a_{ij0l} a*_{iq0r} - a_{ij1l} a*_{iq1r}|`
    pub termwise: f64,
    /// `max_{j,l,q,r} |sum_i (a_{ij0l} a*_{iq0r} - a_{ij1l} a*_{iq1r})|`,
    /// i.e. equality of Bob's views for every initial state.
    pub summed: f64,
}

/// Amplitudes `a[b][(i, j, l)]` of the two commitment branches.
struct BranchAmplitudes {
    d_a: usize,
    d_b: usize,
    branches: [Vec<C64>; 2],
}

impl BranchAmplitudes {
    fn get(&self, bit: usize, i: usize, j: usize, l: usize) -> C64 {
        self.branches[bit][(i * self.d_b + j) * self.d_b + l]
    }
}

// Encodings must be computational basis states up to a phase, which is
// folded into the amplitudes.
fn branch_amplitudes(scheme: &CommitmentScheme) -> Result<BranchAmplitudes> {
    let (d_a, d_b) = scheme.dims();
    let u = scheme.unitary().matrix();
    let mut branches: [Vec<C64>; 2] = [vec![], vec![]];
    for bit in [Bit::Zero, Bit::One] {
        let e = scheme.encoding(bit).amplitudes();
        let k = (0..d_a)
            .find(|&k| (e[k].norm() - 1.0).abs() <= 1e-12)
            .ok_or_else(|| QbcError::InvalidInput(format!("encoding of bit {} is not a basis state", bit.index())))?;
        let phase = e[k];
        let mut a = Vec::with_capacity(d_a * d_b * d_b);
        for i in 0..d_a {
            for j in 0..d_b {
                for l in 0..d_b {
                    a.push(u[(i * d_b + j, k * d_b + l)] * phase);
                }
            }
        }
        branches[bit.index()] = a;
    }
    Ok(BranchAmplitudes { d_a, d_b, branches })
}

/// Evaluates the amplitude condition. Requires computational-basis
/// encodings; other schemes must go through [`synthesize_uhlmann`].
pub fn check_concealing_condition(scheme: &CommitmentScheme) -> Result<ConditionResiduals> {
    let a = branch_amplitudes(scheme)?;
    let (d_a, d_b) = (a.d_a, a.d_b);
    let mut termwise: f64 = 0.0;
    let mut summed: f64 = 0.0;
    for j in 0..d_b {
        for l in 0..d_b {
            for q in 0..d_b {
                for r in 0..d_b {
                    let mut total = C64::new(0.0, 0.0);
                    for i in 0..d_a {
                        let diff =
                            a.get(0, i, j, l) * a.get(0, i, q, r).conj() - a.get(1, i, j, l) * a.get(1, i, q, r).conj();
                        termwise = termwise.max(diff.norm());
                        total += diff;
                    }
                    summed = summed.max(total.norm());
                }
            }
        }
    }
    Ok(ConditionResiduals { termwise, summed })
}

/// Diagonal `S_A` with the default residual threshold.
pub fn synthesize_diagonal(scheme: &CommitmentScheme) -> Result<AttackReport> {
    synthesize_diagonal_with_tol(scheme, DIAGONAL_CONDITION_TOL)
}

/// Diagonal `S_A`: `s_xx = a*_{xq0r} / a*_{xq1r}` using the largest-magnitude
/// `a_{xq1r}` of row `x` as reference. Rows whose branch-1 amplitudes all
/// vanish get `s_xx = 1`, which keeps `S_A` unitary. The reported fidelity is
/// evaluated on the scheme's reference Bob state.
pub fn synthesize_diagonal_with_tol(scheme: &CommitmentScheme, tol: f64) -> Result<AttackReport> {
    let residual = check_concealing_condition(scheme)?.termwise;
    if residual > tol {
        return Err(QbcError::ConditionFailed { residual });
    }
    let a = branch_amplitudes(scheme)?;
    let (d_a, d_b) = (a.d_a, a.d_b);
    let mut diag = Vec::with_capacity(d_a);
    for x in 0..d_a {
        let mut best = (0usize, 0usize, 0.0f64);
        for q in 0..d_b {
            for r in 0..d_b {
                let m = a.get(1, x, q, r).norm();
                if m > best.2 {
                    best = (q, r, m);
                }
            }
        }
        let entry = if best.2 > 1e-14 {
            let ratio = a.get(0, x, best.0, best.1).conj() / a.get(1, x, best.0, best.1).conj();
            // |ratio| = 1 up to the residual; keep only the phase.
            ratio / ratio.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        diag.push(entry);
    }
    let s_a = UnitaryOperator::new(CMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag)))?;
    let bob = scheme.reference_bob_init();
    let phi0 = scheme.commit_state(Bit::Zero, &bob)?;
    let phi1 = scheme.commit_state(Bit::One, &bob)?;
    let achieved_fidelity = verify_attack(&s_a, &phi0, &phi1, scheme.dims())?;
    Ok(AttackReport { s_a, achieved_fidelity, method: AttackMethod::Diagonal, condition_residual: residual })
}

fn check_bipartite(psi: &StateVector, dims: (usize, usize)) -> Result<()> {
    if psi.dim() != dims.0 * dims.1 {
        return Err(QbcError::DimensionMismatch { expected: dims.0 * dims.1, found: psi.dim() });
    }
    Ok(())
}

/// Optimal local unitary on the first factor mapping `phi0` towards `phi1`.
pub fn synthesize_uhlmann(phi0: &StateVector, phi1: &StateVector, dims: (usize, usize)) -> Result<AttackReport> {
    check_bipartite(phi0, dims)?;
    check_bipartite(phi1, dims)?;
    let c0 = phi0.coefficient_matrix(dims.0, dims.1)?;
    let c1 = phi1.coefficient_matrix(dims.0, dims.1)?;
    let (u, s, v_t) = svd_sorted(&(&c0 * c1.adjoint()));
    let s_a = UnitaryOperator::new(v_t.adjoint() * u.adjoint())?;
    let achieved_fidelity = s.iter().sum::<f64>().clamp(0.0, 1.0);
    // rho_b^B = C_b^T C_b^*
    let rho0 = c0.transpose() * c0.map(|z| z.conj());
    let rho1 = c1.transpose() * c1.map(|z| z.conj());
    let condition_residual = max_abs_diff(&rho0, &rho1);
    Ok(AttackReport { s_a, achieved_fidelity, method: AttackMethod::Uhlmann, condition_residual })
}

/// Uhlmann attack on a scheme for one Bob initial state.
pub fn attack_scheme(scheme: &CommitmentScheme, bob_init: &StateVector) -> Result<AttackReport> {
    let phi0 = scheme.commit_state(Bit::Zero, bob_init)?;
    let phi1 = scheme.commit_state(Bit::One, bob_init)?;
    synthesize_uhlmann(&phi0, &phi1, scheme.dims())
}

/// `|<phi1|(S_A (x) I)|phi0>|`, computed by applying `S_A` to the state.
pub fn verify_attack(
    s_a: &UnitaryOperator,
    phi0: &StateVector,
    phi1: &StateVector,
    dims: (usize, usize),
) -> Result<f64> {
    check_bipartite(phi0, dims)?;
    check_bipartite(phi1, dims)?;
    if s_a.dim() != dims.0 {
        return Err(QbcError::DimensionMismatch { expected: dims.0, found: s_a.dim() });
    }
    let moved = apply_local(s_a, &phi0.with_dims(vec![dims.0, dims.1])?, 0)?;
    moved.overlap(phi1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{c, haar_random_state, haar_random_unitary};
    use crate::rng::stream;
    use crate::scheme::families::{bit_copy_scheme, random_phase_scheme};
    use crate::scheme::BobPolicy;
    use std::f64::consts::FRAC_1_SQRT_2 as H;

    fn two_qubit(amps: [C64; 4]) -> StateVector {
        StateVector::from_slice(&amps).unwrap().with_dims(vec![2, 2]).unwrap()
    }

    fn bell() -> StateVector {
        two_qubit([c(H, 0.), c(0., 0.), c(0., 0.), c(H, 0.)])
    }

    fn flipped_bell() -> StateVector {
        two_qubit([c(0., 0.), c(H, 0.), c(H, 0.), c(0., 0.)])
    }

    /// Both encodings are mapped to the same branch: `U|1,l> = U|0,l>` is
    /// impossible for a unitary, so use equal encodings instead.
    fn identical_branches() -> CommitmentScheme {
        let mut rng = stream(21, 0);
        CommitmentScheme::new(
            "same",
            (2, 2),
            haar_random_unitary(4, &mut rng),
            [StateVector::basis(2, 0), StateVector::basis(2, 0)],
            BobPolicy::RandomHaar,
        )
        .unwrap()
    }

    #[test]
    fn identical_branches_have_zero_residual_and_identity_cheat() {
        let s = identical_branches();
        let r = check_concealing_condition(&s).unwrap();
        assert!(r.termwise < 1e-15 && r.summed < 1e-15);
        let rep = synthesize_diagonal(&s).unwrap();
        assert!(rep.s_a.phase_insensitive_overlap(&UnitaryOperator::identity(2)) > 1.0 - 1e-12);
        assert!((rep.achieved_fidelity - 1.0).abs() < 1e-12);
    }

    #[test]
    fn phase_scheme_gives_z() {
        let mut rng = stream(22, 0);
        let s = random_phase_scheme(2, &mut rng);
        let r = check_concealing_condition(&s).unwrap();
        assert!(r.termwise < 1e-12, "{r:?}");
        let rep = synthesize_diagonal(&s).unwrap();
        let z = UnitaryOperator::from_row_slice(2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)]).unwrap();
        assert!(rep.s_a.phase_insensitive_overlap(&z) > 1.0 - 1e-12);
        for _ in 0..100 {
            let init = haar_random_state(2, &mut rng);
            let phi0 = s.commit_state(Bit::Zero, &init).unwrap();
            let phi1 = s.commit_state(Bit::One, &init).unwrap();
            assert!(verify_attack(&rep.s_a, &phi0, &phi1, (2, 2)).unwrap() > 1.0 - 1e-8);
        }
    }

    #[test]
    fn cnot_violates_condition() {
        let s = bit_copy_scheme();
        // a_{0000} a*_{0000} = 1 while a_{0010} = 0: residual exactly 1.
        let r = check_concealing_condition(&s).unwrap();
        assert!((r.termwise - 1.0).abs() < 1e-15);
        assert!(r.termwise > 0.1 && r.summed > 0.1);
        match synthesize_diagonal(&s) {
            Err(QbcError::ConditionFailed { residual }) => assert!((residual - 1.0).abs() < 1e-15),
            other => panic!("expected ConditionFailed, got {other:?}"),
        }
    }

    #[test]
    fn condition_failed_carries_residual() {
        // Rotate Bob's input on branch 1 only.
        let s = CommitmentScheme::builtin("phase").unwrap();
        let theta: f64 = 0.3;
        let rot = UnitaryOperator::from_row_slice(
            2,
            &[c(theta.cos(), 0.), c(-theta.sin(), 0.), c(theta.sin(), 0.), c(theta.cos(), 0.)],
        )
        .unwrap();
        let mut controlled = UnitaryOperator::identity(4).matrix().clone();
        controlled.view_mut((2, 2), (2, 2)).copy_from(rot.matrix());
        let u = s.unitary().compose(&UnitaryOperator::new(controlled).unwrap()).unwrap();
        let tilted = CommitmentScheme::new(
            "tilted",
            (2, 2),
            u,
            [StateVector::basis(2, 0), StateVector::basis(2, 1)],
            BobPolicy::RandomHaar,
        )
        .unwrap();
        let residual = check_concealing_condition(&tilted).unwrap().termwise;
        assert!(residual > 0.1);
        assert_eq!(synthesize_diagonal(&tilted).unwrap_err(), QbcError::ConditionFailed { residual });
    }

    #[test]
    fn non_basis_encodings_are_rejected() {
        let s = CommitmentScheme::builtin("choi-nottp").unwrap();
        assert!(matches!(check_concealing_condition(&s), Err(QbcError::InvalidInput(_))));
    }

    #[test]
    fn uhlmann_examples() {
        let rep = synthesize_uhlmann(&bell(), &bell(), (2, 2)).unwrap();
        assert!((rep.achieved_fidelity - 1.0).abs() < 1e-12);
        assert!(rep.s_a.phase_insensitive_overlap(&UnitaryOperator::identity(2)) > 1.0 - 1e-12);

        let rep = synthesize_uhlmann(&bell(), &flipped_bell(), (2, 2)).unwrap();
        assert!((rep.achieved_fidelity - 1.0).abs() < 1e-12);
        assert!(rep.s_a.phase_insensitive_overlap(&UnitaryOperator::pauli_x()) > 1.0 - 1e-12);

        let zz = two_qubit([c(1., 0.), c(0., 0.), c(0., 0.), c(0., 0.)]);
        let rep = synthesize_uhlmann(&zz, &bell(), (2, 2)).unwrap();
        assert!((rep.achieved_fidelity - H).abs() < 1e-12);
        assert!((verify_attack(&rep.s_a, &zz, &bell(), (2, 2)).unwrap() - H).abs() < 1e-12);
    }

    #[test]
    fn verify_examples() {
        let id = UnitaryOperator::identity(2);
        assert!((verify_attack(&id, &bell(), &bell(), (2, 2)).unwrap() - 1.0).abs() < 1e-15);
        let x = UnitaryOperator::pauli_x();
        assert!((verify_attack(&x, &bell(), &flipped_bell(), (2, 2)).unwrap() - 1.0).abs() < 1e-15);
        assert!(verify_attack(&id, &bell(), &flipped_bell(), (2, 2)).unwrap() < 1e-15);
        assert!(verify_attack(&UnitaryOperator::identity(3), &bell(), &bell(), (2, 2)).is_err());
        assert!(synthesize_uhlmann(&bell(), &bell(), (2, 3)).is_err());
    }

    #[test]
    fn uhlmann_beats_random_local_unitaries() {
        let mut rng = stream(23, 0);
        for _ in 0..20 {
            let s = crate::scheme::families::random_scheme(2, 3, &mut rng);
            let init = haar_random_state(3, &mut rng);
            let rep = attack_scheme(&s, &init).unwrap();
            let phi0 = s.commit_state(Bit::Zero, &init).unwrap();
            let phi1 = s.commit_state(Bit::One, &init).unwrap();
            for _ in 0..100 {
                let v = haar_random_unitary(2, &mut rng);
                assert!(verify_attack(&v, &phi0, &phi1, (2, 3)).unwrap() <= rep.achieved_fidelity + 1e-9);
            }
        }
    }
}
