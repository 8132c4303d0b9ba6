//! Reproducible numerical studies built on the scheme, attack and protocol
//! modules.

use rand::Rng;
use serde::Serialize;

use crate::attack::{attack_scheme, synthesize_diagonal, verify_attack, AttackMethod};
use crate::choi::{run_protocol, AliceStrategy, Verdict};
use crate::error::{QbcError, Result};
use crate::qcore::{haar_random_state, CVector, StateVector, UnitaryOperator, C64};
use crate::rng::Seed;
use crate::scheme::{Bit, CommitmentScheme, Summary};

#[derive(Debug, Clone, Serialize)]
pub struct SweepSample {
    pub bob_init: StateVector,
    pub concealment_fidelity: f64,
    pub fixed_s_fidelity: f64,
    pub adapted_s_fidelity: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepResult {
    pub samples: Vec<SweepSample>,
    /// How the single Bob-independent `S_A` was obtained.
    pub fixed_method: AttackMethod,
    pub fixed_s: UnitaryOperator,
    pub concealment: Summary,
    pub fixed_s_summary: Summary,
    pub adapted_s_summary: Summary,
}

/// For `n_samples` Haar-random Bob inputs, compares Bob's concealment
/// fidelity with the cheat achieved by one fixed `S_A` and by an `S_A`
/// re-synthesized for each input. The fixed `S_A` is the diagonal
/// construction when the amplitude condition holds, otherwise the Uhlmann
/// unitary of the first sample.
pub fn nonstatic_sweep<R: Rng + ?Sized>(
    scheme: &CommitmentScheme,
    n_samples: usize,
    rng: &mut R,
) -> Result<SweepResult> {
    if n_samples == 0 {
        return Err(QbcError::InvalidInput("n_samples must be at least 1".into()));
    }
    let (_, d_b) = scheme.dims();
    let seed = Seed::draw(rng);
    let inits: Vec<StateVector> =
        (0..n_samples as u64).map(|i| haar_random_state(d_b, &mut seed.child(i).rng())).collect();

    let (fixed_s, fixed_method) = match synthesize_diagonal(scheme) {
        Ok(report) => (report.s_a, AttackMethod::Diagonal),
        Err(QbcError::ConditionFailed { .. }) | Err(QbcError::InvalidInput(_)) => {
            (attack_scheme(scheme, &inits[0])?.s_a, AttackMethod::Uhlmann)
        }
        Err(e) => return Err(e),
    };

    let samples = inits
        .into_iter()
        .map(|bob_init| {
            let phi0 = scheme.commit_state(Bit::Zero, &bob_init)?;
            let phi1 = scheme.commit_state(Bit::One, &bob_init)?;
            Ok(SweepSample {
                concealment_fidelity: scheme.concealment(&bob_init)?.fidelity,
                fixed_s_fidelity: verify_attack(&fixed_s, &phi0, &phi1, scheme.dims())?,
                adapted_s_fidelity: attack_scheme(scheme, &bob_init)?.achieved_fidelity,
                bob_init,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(SweepResult {
        concealment: Summary::of(samples.iter().map(|s| s.concealment_fidelity)),
        fixed_s_summary: Summary::of(samples.iter().map(|s| s.fixed_s_fidelity)),
        adapted_s_summary: Summary::of(samples.iter().map(|s| s.adapted_s_fidelity)),
        samples,
        fixed_method,
        fixed_s,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SearchResult {
    pub best_bob_init: StateVector,
    pub best_fidelity: f64,
    /// Concealment evaluations spent.
    pub iterations: usize,
    pub restarts: usize,
}

/// Smallest refinement step.
pub const SEARCH_STEP_FLOOR: f64 = 1e-4;
const SEARCH_INITIAL_STEP: f64 = 0.5;

/// Gauge-fixed pure state: hyperspherical magnitude angles in `[0, pi/2]`
/// followed by relative phases; the first amplitude is real and
/// non-negative.
fn state_from_angles(dim: usize, params: &[f64]) -> StateVector {
    let (thetas, phis) = params.split_at(dim - 1);
    let mut amps = CVector::zeros(dim);
    let mut carry = 1.0;
    for k in 0..dim {
        let mag = if k + 1 < dim { carry * thetas[k].cos() } else { carry };
        if k + 1 < dim {
            carry *= thetas[k].sin();
        }
        let phase = if k == 0 { 0.0 } else { phis[k - 1] };
        amps[k] = C64::from_polar(mag, phase);
    }
    StateVector::normalized(amps, vec![dim]).expect("hyperspherical vector has unit norm")
}

/// Looks for a Bob input that makes his two views as distinguishable as
/// possible (minimum concealment fidelity). Random restarts, each refined by
/// coordinate moves on the angle parameters; the step halves when no move
/// helps and a restart ends below [`SEARCH_STEP_FLOOR`]. Heuristic: no
/// global optimality is claimed.
pub fn find_distinguishing_bob_state<R: Rng + ?Sized>(
    scheme: &CommitmentScheme,
    budget: usize,
    rng: &mut R,
) -> Result<SearchResult> {
    if budget == 0 {
        return Err(QbcError::InvalidInput("budget must be at least 1".into()));
    }
    let (_, d_b) = scheme.dims();
    let n_params = 2 * (d_b - 1);
    let half_pi = std::f64::consts::FRAC_PI_2;
    let mut evals = 0usize;
    let mut eval = |params: &[f64]| -> Result<(f64, StateVector)> {
        evals += 1;
        let s = state_from_angles(d_b, params);
        Ok((scheme.concealment(&s)?.fidelity, s))
    };

    let mut best: Option<(f64, StateVector)> = None;
    let mut restarts = 0;
    let mut spent = 0usize;
    while spent < budget {
        restarts += 1;
        let mut params: Vec<f64> = (0..n_params)
            .map(|p| {
                if p < d_b - 1 {
                    rng.random_range(0.0..=half_pi)
                } else {
                    rng.random_range(0.0..std::f64::consts::TAU)
                }
            })
            .collect();
        let mut current = eval(&params)?;
        spent += 1;
        let mut step = SEARCH_INITIAL_STEP;
        'refine: while step >= SEARCH_STEP_FLOOR && n_params > 0 {
            let mut improved = false;
            for p in 0..n_params {
                for dir in [1.0, -1.0] {
                    if spent >= budget {
                        break 'refine;
                    }
                    let mut cand = params.clone();
                    cand[p] += dir * step;
                    if p < d_b - 1 {
                        cand[p] = cand[p].clamp(0.0, half_pi);
                    }
                    let next = eval(&cand)?;
                    spent += 1;
                    if next.0 < current.0 {
                        params = cand;
                        current = next;
                        improved = true;
                        break;
                    }
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
        if best.as_ref().is_none_or(|b| current.0 < b.0) {
            best = Some(current);
        }
        if n_params == 0 || best.as_ref().is_some_and(|b| b.0 <= 0.0) {
            break;
        }
    }
    let (best_fidelity, best_bob_init) = best.expect("at least one evaluation");
    Ok(SearchResult { best_bob_init, best_fidelity, iterations: evals, restarts })
}

/// 95% two-sided normal quantile.
const Z95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, Serialize)]
pub struct CheatStatistics {
    pub n_rounds: usize,
    pub n_trials: usize,
    pub accepted: usize,
    pub rate: f64,
    /// Wilson score interval at 95%.
    pub wilson_95: [f64; 2],
}

pub fn wilson_interval(successes: usize, trials: usize, z: f64) -> [f64; 2] {
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    [(center - half).max(0.0), (center + half).min(1.0)]
}

/// Accept rate of `strategy` over `n_trials` independent protocol runs.
pub fn cheat_statistics<R: Rng + ?Sized>(
    n_rounds: usize,
    n_trials: usize,
    strategy: &AliceStrategy,
    rng: &mut R,
) -> Result<CheatStatistics> {
    if n_trials == 0 {
        return Err(QbcError::InvalidInput("n_trials must be at least 1".into()));
    }
    let seed = Seed::draw(rng);
    let mut accepted = 0;
    for t in 0..n_trials as u64 {
        let transcript = run_protocol(n_rounds, strategy, &mut seed.child(t).rng())?;
        accepted += usize::from(transcript.verdict == Verdict::Accept);
    }
    Ok(CheatStatistics {
        n_rounds,
        n_trials,
        accepted,
        rate: accepted as f64 / n_trials as f64,
        wilson_95: wilson_interval(accepted, n_trials, Z95),
    })
}
