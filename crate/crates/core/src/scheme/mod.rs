//! Generic purification-based commitment schemes and Bob's view of them.
//!
//! Alice's register (including any private ancillas) has dimension `d_A`;
//! Bob's has `d_B`. Committing to `b` produces
//! `|phi_b> = U_AB (|e_b>_A (x) |varphi>_B)` where `|e_b>` is Alice's encoding.

mod document;
pub mod families;

use rand::Rng;
use serde::Serialize;

pub use document::{PolicyDocument, SchemeDocument, SCHEME_SCHEMA_VERSION};

use crate::error::{QbcError, Result};
use crate::qcore::{
    fidelity, haar_random_state, partial_trace, trace_distance, CVector, DensityOperator, Keep, StateVector,
    UnitaryOperator, C64,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Bit {
    Zero,
    One,
}

impl Bit {
    pub fn index(self) -> usize {
        match self {
            Bit::Zero => 0,
            Bit::One => 1,
        }
    }

    pub fn flip(self) -> Bit {
        match self {
            Bit::Zero => Bit::One,
            Bit::One => Bit::Zero,
        }
    }

    pub fn from_index(i: usize) -> Bit {
        if i == 0 {
            Bit::Zero
        } else {
            Bit::One
        }
    }
}

/// How Bob prepares his initial state.
#[derive(Debug, Clone, PartialEq)]
pub enum BobPolicy {
    /// Static commitment: one known state.
    Fixed(StateVector),
    /// Non-static commitment: a fresh Haar-random state per evaluation.
    RandomHaar,
}

#[derive(Debug, Clone)]
pub struct CommitmentScheme {
    name: String,
    dim_a: usize,
    dim_b: usize,
    unitary: UnitaryOperator,
    encodings: [StateVector; 2],
    bob_policy: BobPolicy,
}

/// Distinguishability of Bob's two views for one initial state.
#[derive(Debug, Clone, Serialize)]
pub struct ConcealmentReport {
    pub fidelity: f64,
    pub trace_distance: f64,
    /// `1 - fidelity`.
    pub delta: f64,
    pub bob_state_used: StateVector,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Summary {
    pub min: f64,
    pub mean: f64,
    pub max: f64,
}

impl Summary {
    pub fn of(values: impl IntoIterator<Item = f64>) -> Summary {
        let (mut min, mut max, mut sum, mut n) = (f64::INFINITY, f64::NEG_INFINITY, 0.0, 0usize);
        for v in values {
            min = min.min(v);
            max = max.max(v);
            sum += v;
            n += 1;
        }
        assert!(n > 0, "summary of an empty sample");
        Summary { min, mean: sum / n as f64, max }
    }
}

/// Concealment over Bob's policy: worst case and average are both reported.
#[derive(Debug, Clone, Serialize)]
pub struct ConcealmentProfile {
    pub samples: usize,
    pub fidelity: Summary,
    pub trace_distance: Summary,
}

impl CommitmentScheme {
    pub fn new(
        name: impl Into<String>,
        dims: (usize, usize),
        unitary: UnitaryOperator,
        encodings: [StateVector; 2],
        bob_policy: BobPolicy,
    ) -> Result<Self> {
        let (dim_a, dim_b) = dims;
        if unitary.dim() != dim_a * dim_b {
            return Err(QbcError::DimensionMismatch { expected: dim_a * dim_b, found: unitary.dim() });
        }
        for e in &encodings {
            if e.dim() != dim_a {
                return Err(QbcError::DimensionMismatch { expected: dim_a, found: e.dim() });
            }
        }
        if let BobPolicy::Fixed(s) = &bob_policy {
            if s.dim() != dim_b {
                return Err(QbcError::DimensionMismatch { expected: dim_b, found: s.dim() });
            }
        }
        let [e0, e1] = encodings;
        let encodings = [e0.with_dims(vec![dim_a])?, e1.with_dims(vec![dim_a])?];
        Ok(Self { name: name.into(), dim_a, dim_b, unitary, encodings, bob_policy })
    }

    /// One of the shipped schemes: `phase`, `choi-nottp`, `product`, `bobcopy`.
    pub fn builtin(name: &str) -> Result<Self> {
        let text = document::builtin_text(name)
            .ok_or_else(|| QbcError::InvalidInput(format!("unknown built-in scheme `{name}`")))?;
        Self::from_json(text)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.dim_a, self.dim_b)
    }

    pub fn unitary(&self) -> &UnitaryOperator {
        &self.unitary
    }

    pub fn encoding(&self, bit: Bit) -> &StateVector {
        &self.encodings[bit.index()]
    }

    pub fn bob_policy(&self) -> &BobPolicy {
        &self.bob_policy
    }

    pub fn with_policy(mut self, policy: BobPolicy) -> Result<Self> {
        if let BobPolicy::Fixed(s) = &policy {
            if s.dim() != self.dim_b {
                return Err(QbcError::DimensionMismatch { expected: self.dim_b, found: s.dim() });
            }
        }
        self.bob_policy = policy;
        Ok(self)
    }

    fn check_bob(&self, bob_init: &StateVector) -> Result<()> {
        if bob_init.dim() != self.dim_b {
            return Err(QbcError::DimensionMismatch { expected: self.dim_b, found: bob_init.dim() });
        }
        Ok(())
    }

    /// `U_AB (|e_b> (x) |bob_init>)` on dims `(d_A, d_B)`.
    pub fn commit_state(&self, bit: Bit, bob_init: &StateVector) -> Result<StateVector> {
        self.check_bob(bob_init)?;
        let joint = self.encoding(bit).tensor(&bob_init.with_dims(vec![self.dim_b])?);
        self.unitary.apply(&joint)
    }

    /// `rho_b^B = Tr_A |phi_b><phi_b|`.
    pub fn bob_reduced(&self, bit: Bit, bob_init: &StateVector) -> Result<DensityOperator> {
        let phi = self.commit_state(bit, bob_init)?;
        partial_trace(&phi.density(), self.dims(), Keep::Second)
    }

    pub fn concealment(&self, bob_init: &StateVector) -> Result<ConcealmentReport> {
        let rho0 = self.bob_reduced(Bit::Zero, bob_init)?;
        let rho1 = self.bob_reduced(Bit::One, bob_init)?;
        let f = fidelity(&rho0, &rho1)?;
        Ok(ConcealmentReport {
            fidelity: f,
            trace_distance: trace_distance(&rho0, &rho1)?,
            delta: 1.0 - f,
            bob_state_used: bob_init.with_dims(vec![self.dim_b])?,
        })
    }

    /// Bob's initial state under the scheme's policy.
    pub fn draw_bob_init<R: Rng + ?Sized>(&self, rng: &mut R) -> StateVector {
        match &self.bob_policy {
            BobPolicy::Fixed(s) => s.clone(),
            BobPolicy::RandomHaar => haar_random_state(self.dim_b, rng),
        }
    }

    /// A deterministic representative of the policy: the fixed state, or the
    /// uniform superposition for random policies.
    pub fn reference_bob_init(&self) -> StateVector {
        match &self.bob_policy {
            BobPolicy::Fixed(s) => s.clone(),
            BobPolicy::RandomHaar => {
                StateVector::normalized(CVector::from_element(self.dim_b, C64::new(1.0, 0.0)), vec![self.dim_b])
                    .expect("non-zero vector")
            }
        }
    }

    /// Concealment over `n_samples` draws from the policy (one draw for a
    /// fixed policy).
    pub fn concealment_profile<R: Rng + ?Sized>(&self, n_samples: usize, rng: &mut R) -> Result<ConcealmentProfile> {
        if n_samples == 0 {
            return Err(QbcError::InvalidInput("n_samples must be at least 1".into()));
        }
        let n = match self.bob_policy {
            BobPolicy::Fixed(_) => 1,
            BobPolicy::RandomHaar => n_samples,
        };
        let reports = (0..n).map(|_| self.concealment(&self.draw_bob_init(rng))).collect::<Result<Vec<_>>>()?;
        Ok(ConcealmentProfile {
            samples: n,
            fidelity: Summary::of(reports.iter().map(|r| r.fidelity)),
            trace_distance: Summary::of(reports.iter().map(|r| r.trace_distance)),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{apply_local, c, haar_random_unitary, CMatrix};
    use crate::rng::stream;
    use std::f64::consts::FRAC_1_SQRT_2 as H;

    fn basis_scheme(u: UnitaryOperator) -> CommitmentScheme {
        CommitmentScheme::new(
            "test",
            (2, 2),
            u,
            [StateVector::basis(2, 0), StateVector::basis(2, 1)],
            BobPolicy::RandomHaar,
        )
        .unwrap()
    }

    fn cnot() -> UnitaryOperator {
        let (o, l) = (c(0., 0.), c(1., 0.));
        UnitaryOperator::from_row_slice(4, &[l, o, o, o, o, l, o, o, o, o, o, l, o, o, l, o]).unwrap()
    }

    #[test]
    fn identity_dynamics_leaves_bob_alone() {
        let s = basis_scheme(UnitaryOperator::identity(4));
        let one = StateVector::basis(2, 1);
        let phi = s.commit_state(Bit::Zero, &one).unwrap();
        assert!(phi.same_ray(&StateVector::basis(2, 0).tensor(&one), 1e-15));
        for bit in [Bit::Zero, Bit::One] {
            let rho = s.bob_reduced(bit, &one).unwrap();
            assert!(rho.max_deviation(&one.density()) < 1e-15);
        }
        assert!((s.concealment(&one).unwrap().fidelity - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cnot_copies_the_bit() {
        let s = basis_scheme(cnot());
        let phi = s.commit_state(Bit::One, &StateVector::basis(2, 0)).unwrap();
        assert!(phi.same_ray(&StateVector::basis(4, 3), 1e-15));
        let r = s.concealment(&StateVector::basis(2, 0)).unwrap();
        assert!(r.fidelity < 1e-12 && (r.trace_distance - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_wrong_bob_dimension() {
        let s = basis_scheme(cnot());
        assert!(matches!(
            s.commit_state(Bit::Zero, &StateVector::basis(3, 0)),
            Err(QbcError::DimensionMismatch { expected: 2, found: 3 })
        ));
        assert!(CommitmentScheme::new(
            "bad",
            (2, 3),
            cnot(),
            [StateVector::basis(2, 0), StateVector::basis(2, 1)],
            BobPolicy::RandomHaar
        )
        .is_err());
    }

    #[test]
    fn bob_reduced_matches_partial_trace_of_commit_state() {
        let mut rng = stream(1, 0);
        for _ in 0..50 {
            let s = basis_scheme(haar_random_unitary(4, &mut rng));
            let init = haar_random_state(2, &mut rng);
            for bit in [Bit::Zero, Bit::One] {
                let direct = s.bob_reduced(bit, &init).unwrap();
                let phi = s.commit_state(bit, &init).unwrap();
                let m = CMatrix::from_fn(2, 2, |j, q| {
                    (0..2).map(|i| phi.amplitudes()[i * 2 + j] * phi.amplitudes()[i * 2 + q].conj()).sum()
                });
                assert!(crate::qcore::max_abs_diff(direct.matrix(), &m) < 1e-12);
            }
        }
    }

    #[test]
    fn concealment_is_invariant_under_alice_local_unitaries() {
        let mut rng = stream(2, 0);
        for _ in 0..100 {
            let s = basis_scheme(haar_random_unitary(4, &mut rng));
            let init = haar_random_state(2, &mut rng);
            let before = s.concealment(&init).unwrap().fidelity;
            let v = haar_random_unitary(2, &mut rng);
            let rho = |bit| {
                let phi = apply_local(&v, &s.commit_state(bit, &init).unwrap(), 0).unwrap();
                partial_trace(&phi.density(), (2, 2), Keep::Second).unwrap()
            };
            let after = fidelity(&rho(Bit::Zero), &rho(Bit::One)).unwrap();
            assert!((before - after).abs() < 1e-10);
        }
    }

    #[test]
    fn profile_reports_worst_and_average() {
        let s = CommitmentScheme::builtin("choi-nottp").unwrap();
        let p = s.concealment_profile(200, &mut stream(4, 0)).unwrap();
        assert_eq!(p.samples, 200);
        assert!(p.fidelity.min <= p.fidelity.mean && p.fidelity.mean <= p.fidelity.max);
        assert!(p.fidelity.min >= H - 1e-9);
        let fixed = s.with_policy(BobPolicy::Fixed(StateVector::basis(2, 0))).unwrap();
        assert_eq!(fixed.concealment_profile(200, &mut stream(4, 0)).unwrap().samples, 1);
    }
}
