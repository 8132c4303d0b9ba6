//! The TTP-assisted non-static commitment protocol and its two-party
//! variant.
//!
//! Preparing: Alice and the TTP share singlets; the TTP measures its half
//! of each in a secret random basis `{|f>, |f^perp>}`, which leaves Alice
//! with the opposite basis vector `|psi_i>`. Committing: Alice entangles an
//! ancilla `|+>_{A'}` with `|psi_i>` through the controlled pair `(M, N)` for
//! bit 0 or `(J, K)` for bit 1 and sends the qubit `A` to Bob. Sustaining:
//! nothing happens. Revealing: Alice names each `P_i`, the TTP announces
//! basis and outcome, and Bob undoes the named `P_i`, measures in the TTP's
//! basis and accepts only if every outcome is opposite to the TTP's.

use rand::Rng;
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::attack::{synthesize_uhlmann, AttackReport};
use crate::error::{QbcError, Result};
use crate::qcore::{
    apply_local, fidelity, haar_random_unitary, measure_projective, partial_trace, CMatrix, CVector, DensityOperator,
    Keep, StateVector, UnitaryOperator, C64,
};
use crate::rng::Seed;
use crate::scheme::{Bit, BobPolicy, CommitmentScheme};
use crate::serial::vector_pairs;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum OperatorLabel {
    M,
    N,
    J,
    K,
}

impl OperatorLabel {
    /// The bit this operator encodes.
    pub fn bit(self) -> Bit {
        match self {
            OperatorLabel::M | OperatorLabel::N => Bit::Zero,
            OperatorLabel::J | OperatorLabel::K => Bit::One,
        }
    }

    /// `(M, N)` for bit 0, `(J, K)` for bit 1, indexed by the ancilla branch.
    pub fn pair(bit: Bit) -> [OperatorLabel; 2] {
        match bit {
            Bit::Zero => [OperatorLabel::M, OperatorLabel::N],
            Bit::One => [OperatorLabel::J, OperatorLabel::K],
        }
    }
}

/// The four commitment operators.
#[derive(Debug, Clone)]
pub struct CommitOperators {
    pub m: UnitaryOperator,
    pub n: UnitaryOperator,
    pub j: UnitaryOperator,
    pub k: UnitaryOperator,
}

impl CommitOperators {
    pub fn standard() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let r = |x: f64| C64::new(x, 0.0);
        let i = |x: f64| C64::new(0.0, x);
        let op = |e: [C64; 4]| UnitaryOperator::from_row_slice(2, &e).expect("commit operators are unitary");
        CommitOperators {
            m: op([r(1.0), r(0.0), r(0.0), r(1.0)]),
            n: op([r(0.0), r(-1.0), r(1.0), r(0.0)]),
            j: op([r(h), i(h), r(h), i(-h)]),
            k: op([r(h), i(h), r(-h), i(h)]),
        }
    }

    pub fn get(&self, label: OperatorLabel) -> &UnitaryOperator {
        match label {
            OperatorLabel::M => &self.m,
            OperatorLabel::N => &self.n,
            OperatorLabel::J => &self.j,
            OperatorLabel::K => &self.k,
        }
    }
}

/// `(|01> - |10>) / sqrt(2)` on dims `(2, 2)`.
pub fn make_singlet() -> StateVector {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let amps = CVector::from_vec(vec![C64::new(0.0, 0.0), C64::new(h, 0.0), C64::new(-h, 0.0), C64::new(0.0, 0.0)]);
    StateVector::normalized(amps, vec![2, 2]).expect("singlet is normalized")
}

/// `|<psi^-|(U (x) U)|psi^->|`; equals `|det U| = 1` for every unitary.
pub fn check_uu_invariance(u: &UnitaryOperator) -> Result<f64> {
    if u.dim() != 2 {
        return Err(QbcError::DimensionMismatch { expected: 2, found: u.dim() });
    }
    let singlet = make_singlet();
    u.tensor(u).apply(&singlet)?.overlap(&singlet)
}

/// The TTP's secret measurement basis `{|f>, |f^perp>}`.
#[derive(Debug, Clone, PartialEq)]
pub struct TtpBasis(pub [CVector; 2]);

impl TtpBasis {
    pub fn computational() -> Self {
        TtpBasis([StateVector::basis(2, 0).amplitudes().clone(), StateVector::basis(2, 1).amplitudes().clone()])
    }

    pub fn haar<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let u = haar_random_unitary(2, rng);
        TtpBasis([u.matrix().column(0).into_owned(), u.matrix().column(1).into_owned()])
    }

    pub fn vector(&self, k: usize) -> StateVector {
        StateVector::normalized(self.0[k].clone(), vec![2]).expect("basis vectors are non-zero")
    }
}

impl Serialize for TtpBasis {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(2))?;
        for v in &self.0 {
            seq.serialize_element(&vector_pairs(v))?;
        }
        seq.end()
    }
}

/// Outcome of the preparing phase for one singlet.
#[derive(Debug, Clone, Serialize)]
pub struct PreparedRound {
    pub ttp_basis: TtpBasis,
    pub ttp_outcome: usize,
    /// Alice's collapsed qubit `|psi_i>`; unknown to her.
    pub alice_state: StateVector,
}

pub fn ttp_prepare_round<R: Rng + ?Sized>(rng: &mut R) -> PreparedRound {
    let basis = TtpBasis::haar(rng);
    ttp_prepare_round_in_basis(basis, rng).expect("Haar bases are orthonormal")
}

/// Measures the TTP half (second factor) of a fresh singlet in `basis`.
pub fn ttp_prepare_round_in_basis<R: Rng + ?Sized>(basis: TtpBasis, rng: &mut R) -> Result<PreparedRound> {
    let m = measure_projective(&make_singlet(), &basis.0, 1, rng)?;
    let f = &basis.0[m.outcome];
    let post = m.post_state.amplitudes();
    let alice = CVector::from_fn(2, |s, _| (0..2).map(|t| f[t].conj() * post[s * 2 + t]).sum());
    let alice_state = StateVector::normalized(alice, vec![2])?;
    Ok(PreparedRound { ttp_basis: basis, ttp_outcome: m.outcome, alice_state })
}

/// `(|0>_{A'} P_0|psi> + |1>_{A'} P_1|psi>) / sqrt(2)` with `(P_0, P_1)` the
/// operator pair of `bit`; dims `(2, 2)`, ancilla first.
pub fn alice_commit(bit: Bit, psi: &StateVector) -> Result<StateVector> {
    if psi.dim() != 2 {
        return Err(QbcError::DimensionMismatch { expected: 2, found: psi.dim() });
    }
    let ops = CommitOperators::standard();
    let [l0, l1] = OperatorLabel::pair(bit);
    let psi = psi.with_dims(vec![2])?;
    let b0 = ops.get(l0).apply(&psi)?;
    let b1 = ops.get(l1).apply(&psi)?;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let amps = CVector::from_fn(4, |idx, _| {
        let (a, s) = (idx / 2, idx % 2);
        let branch = if a == 0 { &b0 } else { &b1 };
        branch.amplitudes()[s] * h
    });
    StateVector::normalized(amps, vec![2, 2])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Verification {
    pub bob_outcome: usize,
    pub accepted: bool,
}

/// Bob undoes the claimed operator, measures in the announced basis and
/// accepts iff his outcome is opposite to the TTP's.
pub fn bob_verify_round<R: Rng + ?Sized>(
    claimed: OperatorLabel,
    received: &StateVector,
    basis: &TtpBasis,
    ttp_outcome: usize,
    rng: &mut R,
) -> Result<Verification> {
    let undone = CommitOperators::standard().get(claimed).dagger().apply(&received.with_dims(vec![2])?)?;
    let m = measure_projective(&undone, &basis.0, 0, rng)?;
    Ok(Verification { bob_outcome: m.outcome, accepted: m.outcome != ttp_outcome })
}

#[derive(Debug, Clone)]
pub enum AliceStrategy {
    Honest(Bit),
    /// Commits to 0, claims 1 with a uniformly chosen label from `{J, K}`.
    FlipAtReveal,
    /// Commits to 0, applies the given unitary to her ancilla before
    /// measuring it, and claims 1 with the label matching the ancilla outcome.
    CustomUnitaryCheat(UnitaryOperator),
}

impl AliceStrategy {
    fn committed_bit(&self) -> Bit {
        match self {
            AliceStrategy::Honest(b) => *b,
            _ => Bit::Zero,
        }
    }

    fn claimed_bit(&self) -> Bit {
        match self {
            AliceStrategy::Honest(b) => *b,
            _ => Bit::One,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RoundRecord {
    pub ttp_basis: TtpBasis,
    pub ttp_outcome: usize,
    pub alice_state: StateVector,
    /// Operator whose branch Bob's qubit is in; `None` after a custom
    /// ancilla rotation leaves it in a superposition of branches.
    pub alice_operator: Option<OperatorLabel>,
    pub claimed_operator: OperatorLabel,
    pub bob_outcome: usize,
    pub accepted: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Accept,
    Reject,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Phase {
    Preparing,
    Commitment,
    Sustaining,
    Revealing,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProtocolTranscript {
    pub rounds: Vec<RoundRecord>,
    pub committed_bit: Bit,
    pub claimed_bit: Bit,
    pub verdict: Verdict,
    /// Phases executed, in order. The sustaining phase is a no-op.
    pub phases: Vec<Phase>,
}

impl ProtocolTranscript {
    pub fn accepted_rounds(&self) -> usize {
        self.rounds.iter().filter(|r| r.accepted).count()
    }
}

// Bob's qubit after Alice's ancilla (first factor) was found in |a>.
fn bob_qubit(post: &StateVector, a: usize) -> Result<StateVector> {
    let amps = post.amplitudes();
    StateVector::normalized(CVector::from_fn(2, |s, _| amps[a * 2 + s]), vec![2])
}

fn play_round(strategy: &AliceStrategy, seed: Seed) -> Result<RoundRecord> {
    let mut rng = seed.rng();
    let prepared = ttp_prepare_round(&mut rng);
    let committed = alice_commit(strategy.committed_bit(), &prepared.alice_state)?;
    // sustaining: nothing happens
    let computational = TtpBasis::computational();
    let (applied, claimed, received) = match strategy {
        AliceStrategy::Honest(b) => {
            let m = measure_projective(&committed, &computational.0, 0, &mut rng)?;
            let label = OperatorLabel::pair(*b)[m.outcome];
            (Some(label), label, bob_qubit(&m.post_state, m.outcome)?)
        }
        AliceStrategy::FlipAtReveal => {
            let m = measure_projective(&committed, &computational.0, 0, &mut rng)?;
            let applied = OperatorLabel::pair(Bit::Zero)[m.outcome];
            let claimed = OperatorLabel::pair(Bit::One)[rng.random_range(0..2)];
            (Some(applied), claimed, bob_qubit(&m.post_state, m.outcome)?)
        }
        AliceStrategy::CustomUnitaryCheat(s) => {
            let rotated = apply_local(s, &committed, 0)?;
            let m = measure_projective(&rotated, &computational.0, 0, &mut rng)?;
            let claimed = OperatorLabel::pair(Bit::One)[m.outcome];
            (None, claimed, bob_qubit(&m.post_state, m.outcome)?)
        }
    };
    let v = bob_verify_round(claimed, &received, &prepared.ttp_basis, prepared.ttp_outcome, &mut rng)?;
    Ok(RoundRecord {
        ttp_basis: prepared.ttp_basis,
        ttp_outcome: prepared.ttp_outcome,
        alice_state: prepared.alice_state,
        alice_operator: applied,
        claimed_operator: claimed,
        bob_outcome: v.bob_outcome,
        accepted: v.accepted,
    })
}

/// Runs all four phases over `n_rounds` singlets. Each round draws from its
/// own stream derived from one seed taken from `rng`.
pub fn run_protocol<R: Rng + ?Sized>(
    n_rounds: usize,
    strategy: &AliceStrategy,
    rng: &mut R,
) -> Result<ProtocolTranscript> {
    if n_rounds == 0 {
        return Err(QbcError::InvalidInput("n_rounds must be at least 1".into()));
    }
    if let AliceStrategy::CustomUnitaryCheat(s) = strategy {
        if s.dim() != 2 {
            return Err(QbcError::DimensionMismatch { expected: 2, found: s.dim() });
        }
    }
    let seed = Seed::draw(rng);
    let rounds = (0..n_rounds as u64).map(|i| play_round(strategy, seed.child(i))).collect::<Result<Vec<_>>>()?;
    let verdict = if rounds.iter().all(|r| r.accepted) { Verdict::Accept } else { Verdict::Reject };
    Ok(ProtocolTranscript {
        rounds,
        committed_bit: strategy.committed_bit(),
        claimed_bit: strategy.claimed_bit(),
        verdict,
        phases: vec![Phase::Preparing, Phase::Commitment, Phase::Sustaining, Phase::Revealing],
    })
}

/// Bob's pre-reveal state of the commitment qubit, averaged over the TTP's
/// hidden basis and outcome across `n_rounds` sampled rounds.
pub fn average_bob_view<R: Rng + ?Sized>(bit: Bit, n_rounds: usize, rng: &mut R) -> Result<CMatrix> {
    let mut acc = CMatrix::zeros(2, 2);
    for _ in 0..n_rounds {
        let prepared = ttp_prepare_round(rng);
        let joint = alice_commit(bit, &prepared.alice_state)?;
        acc += partial_trace(&joint.density(), (2, 2), Keep::Second)?.matrix();
    }
    Ok(acc.unscale(n_rounds.max(1) as f64))
}

/// Bob's views of the commitment qubit when he knows `|psi>`.
pub fn no_ttp_views(psi: &StateVector) -> Result<(DensityOperator, DensityOperator)> {
    let rho = |bit| partial_trace(&alice_commit(bit, psi)?.density(), (2, 2), Keep::Second);
    Ok((rho(Bit::Zero)?, rho(Bit::One)?))
}

/// Least-squares fit of `J = aM + bN` and `K = cM + dN`.
#[derive(Debug, Clone, Serialize)]
pub struct LinearFit {
    #[serde(serialize_with = "ser_pairs")]
    pub coefficients: [C64; 4],
    /// Frobenius norm of `J - aM - bN`.
    pub residual_j: f64,
    /// Frobenius norm of `K - cM - dN`.
    pub residual_k: f64,
    /// `max |(S^dag S - I)_{ij}|` for `S = [[a, b], [c, d]]`.
    pub unitarity_deviation: f64,
}

fn ser_pairs<S: Serializer>(v: &[C64; 4], s: S) -> std::result::Result<S::Ok, S::Error> {
    let pairs: Vec<[f64; 2]> = v.iter().map(|z| [z.re, z.im]).collect();
    pairs.serialize(s)
}

fn fit_pair(ops: &CommitOperators, target: &UnitaryOperator) -> (C64, C64, f64) {
    let design = CMatrix::from_fn(4, 2, |row, col| {
        let basis = if col == 0 { &ops.m } else { &ops.n };
        basis.matrix()[(row / 2, row % 2)]
    });
    let rhs = CMatrix::from_fn(4, 1, |row, _| target.matrix()[(row / 2, row % 2)]);
    let (u, sv, vt) = crate::qcore::svd_sorted(&design);
    let coeffs = u.adjoint() * &rhs;
    let scaled = CMatrix::from_fn(2, 1, |k, _| if sv[k] > 1e-14 { coeffs[(k, 0)] / sv[k] } else { C64::new(0.0, 0.0) });
    let x = vt.adjoint() * scaled;
    let residual = (&design * &x - &rhs).norm();
    (x[(0, 0)], x[(1, 0)], residual)
}

pub fn fit_linear_relation() -> LinearFit {
    let ops = CommitOperators::standard();
    let (a, b, residual_j) = fit_pair(&ops, &ops.j);
    let (c, d, residual_k) = fit_pair(&ops, &ops.k);
    let s = CMatrix::from_row_slice(2, 2, &[a, b, c, d]);
    let unitarity_deviation = crate::qcore::max_abs(&(s.adjoint() * &s - CMatrix::identity(2, 2)));
    LinearFit { coefficients: [a, b, c, d], residual_j, residual_k, unitarity_deviation }
}

#[derive(Debug, Clone, Serialize)]
pub struct NoTtpAttack {
    pub psi: StateVector,
    pub report: AttackReport,
    /// `F(rho_0, rho_1)` from [`no_ttp_views`].
    pub view_fidelity: f64,
    pub linear_fit: LinearFit,
}

/// Best ancilla-side cheat when Bob knows `|psi>`.
pub fn no_ttp_attack(psi: &StateVector) -> Result<NoTtpAttack> {
    let phi0 = alice_commit(Bit::Zero, psi)?;
    let phi1 = alice_commit(Bit::One, psi)?;
    let report = synthesize_uhlmann(&phi0, &phi1, (2, 2))?;
    let (rho0, rho1) = no_ttp_views(psi)?;
    Ok(NoTtpAttack {
        psi: psi.with_dims(vec![2])?,
        report,
        view_fidelity: fidelity(&rho0, &rho1)?,
        linear_fit: fit_linear_relation(),
    })
}

/// The protocol without a TTP as a generic scheme: Alice holds a bit
/// register and the ancilla `A'` (`d_A = 4`, encodings `|b>|+>`), Bob's
/// input is `|psi>`, and `U = sum_b |b><b| (x) (|0><0| (x) P_{b,0} + |1><1| (x) P_{b,1})`.
pub fn no_ttp_scheme() -> CommitmentScheme {
    let ops = CommitOperators::standard();
    let mut u = CMatrix::zeros(8, 8);
    for bit in [Bit::Zero, Bit::One] {
        for (a, label) in OperatorLabel::pair(bit).into_iter().enumerate() {
            let offset = (bit.index() * 2 + a) * 2;
            u.view_mut((offset, offset), (2, 2)).copy_from(ops.get(label).matrix());
        }
    }
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let enc = |bit: usize| {
        let v = CVector::from_fn(4, |i, _| if i / 2 == bit { C64::new(h, 0.0) } else { C64::new(0.0, 0.0) });
        StateVector::normalized(v, vec![4]).expect("non-zero")
    };
    CommitmentScheme::new(
        "choi-nottp",
        (4, 2),
        UnitaryOperator::new(u).expect("block-diagonal unitary"),
        [enc(0), enc(1)],
        BobPolicy::RandomHaar,
    )
    .expect("consistent dimensions")
}
