//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::f64::consts::FRAC_1_SQRT_2;
use std::process::Command;
use std::time::Instant;

use qbc_core::analysis::find_distinguishing_bob_state;
use qbc_core::attack::{check_concealing_condition, synthesize_diagonal, synthesize_uhlmann, verify_attack};
use qbc_core::choi::{
    check_uu_invariance, no_ttp_attack, no_ttp_scheme, no_ttp_views, run_protocol, AliceStrategy, CommitOperators,
    Verdict,
};
use qbc_core::qcore::{
    eigh, fidelity, haar_random_state, haar_random_unitary, partial_trace, purify, schmidt_decompose, sqrt_psd,
    trace_distance, CVector, Complex, DensityOperator, Keep, StateVector,
};
use qbc_core::rng::{stream, QRng, Seed};
use qbc_core::scheme::families::{random_concealing_scheme, random_phase_scheme, random_scheme};
use qbc_core::scheme::{Bit, CommitmentScheme};

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn plus_i() -> StateVector {
    let amps = CVector::from_vec(vec![Complex::new(FRAC_1_SQRT_2, 0.0), Complex::new(0.0, FRAC_1_SQRT_2)]);
    StateVector::normalized(amps, vec![2]).unwrap()
}

/// `sum_k sqrt(eig(sqrt(rho) sigma sqrt(rho)))`, computed without any SVD.
/// Only the leading `rank` eigenvalues count: the rest are roundoff whose
/// square roots would be ~1e-8.
fn fidelity_by_eigenvalues(rho: &DensityOperator, sigma: &DensityOperator, rank: usize) -> f64 {
    let r = sqrt_psd(rho.matrix(), 1e-10).unwrap();
    let (vals, _) = eigh(&(&r * sigma.matrix() * &r));
    vals.iter().take(rank).map(|v| v.max(0.0).sqrt()).sum()
}

fn both_views(scheme: &CommitmentScheme, bob: &StateVector) -> (DensityOperator, DensityOperator) {
    (scheme.bob_reduced(Bit::Zero, bob).unwrap(), scheme.bob_reduced(Bit::One, bob).unwrap())
}

fn criterion_1() -> Outcome {
    let mut rng = stream(1, 0);
    let (mut worst, mut worst_verify_gap) = (f64::INFINITY, 0.0f64);
    for k in 0..200 {
        let (m, d_b) = (1 + k % 3, 2 + (k / 3) % 3);
        let scheme = random_concealing_scheme(m, d_b, &mut rng);
        let bob = haar_random_state(d_b, &mut rng);
        let phi0 = scheme.commit_state(Bit::Zero, &bob).unwrap();
        let phi1 = scheme.commit_state(Bit::One, &bob).unwrap();
        let report = synthesize_uhlmann(&phi0, &phi1, scheme.dims()).unwrap();
        let verified = verify_attack(&report.s_a, &phi0, &phi1, scheme.dims()).unwrap();
        worst = worst.min(report.achieved_fidelity).min(verified);
        worst_verify_gap = worst_verify_gap.max((verified - report.achieved_fidelity).abs());
    }
    outcome(
        worst >= 1.0 - 1e-8 && worst_verify_gap <= 1e-10,
        format!("200 concealing schemes: min fidelity {worst:.15}, max |verify - achieved| {worst_verify_gap:.1e}"),
    )
}

fn criterion_2() -> Outcome {
    let mut rng = stream(2, 0);
    let (mut gap, mut oracle_gap) = (0.0f64, 0.0f64);
    for k in 0..200 {
        let (d_a, d_b) = (2 + k % 3, 2 + (k / 3) % 3);
        let scheme = random_scheme(d_a, d_b, &mut rng);
        let bob = haar_random_state(d_b, &mut rng);
        let report = scheme_uhlmann(&scheme, &bob);
        let (rho0, rho1) = both_views(&scheme, &bob);
        gap = gap.max((report - fidelity(&rho0, &rho1).unwrap()).abs());
        oracle_gap = oracle_gap.max((report - fidelity_by_eigenvalues(&rho0, &rho1, d_a.min(d_b))).abs());
    }
    outcome(
        gap <= 1e-9 && oracle_gap <= 1e-9,
        format!("200 random schemes: max |achieved - F| {gap:.1e}, vs eigenvalue oracle {oracle_gap:.1e}"),
    )
}

fn scheme_uhlmann(scheme: &CommitmentScheme, bob: &StateVector) -> f64 {
    let phi0 = scheme.commit_state(Bit::Zero, bob).unwrap();
    let phi1 = scheme.commit_state(Bit::One, bob).unwrap();
    synthesize_uhlmann(&phi0, &phi1, scheme.dims()).unwrap().achieved_fidelity
}

fn criterion_3() -> Outcome {
    let mut rng = stream(3, 0);
    let mut schemes: Vec<CommitmentScheme> = (0..10).map(|k| random_phase_scheme(2 + k % 3, &mut rng)).collect();
    schemes.push(CommitmentScheme::builtin("phase").unwrap());
    let (mut worst, mut max_residual) = (f64::INFINITY, 0.0f64);
    for scheme in &schemes {
        let residual = check_concealing_condition(scheme).unwrap().termwise;
        max_residual = max_residual.max(residual);
        let fixed = synthesize_diagonal(scheme).unwrap();
        let (_, d_b) = scheme.dims();
        for _ in 0..100 {
            let bob = haar_random_state(d_b, &mut rng);
            let phi0 = scheme.commit_state(Bit::Zero, &bob).unwrap();
            let phi1 = scheme.commit_state(Bit::One, &bob).unwrap();
            worst = worst.min(verify_attack(&fixed.s_a, &phi0, &phi1, scheme.dims()).unwrap());
        }
    }
    outcome(
        max_residual <= 1e-12 && worst >= 1.0 - 1e-8,
        format!(
            "{} phase schemes x 100 Bob inputs: max term-wise residual {max_residual:.1e}, min fixed-S fidelity {worst:.15}",
            schemes.len()
        ),
    )
}

fn accept_count(strategy: &AliceStrategy, rounds: usize, trials: u64, master: u64) -> usize {
    let seed = Seed(master);
    (0..trials)
        .filter(|&t| run_protocol(rounds, strategy, &mut seed.child(t).rng()).unwrap().verdict == Verdict::Accept)
        .count()
}

fn criterion_4() -> Outcome {
    let zero = accept_count(&AliceStrategy::Honest(Bit::Zero), 64, 1_000, 40);
    let one = accept_count(&AliceStrategy::Honest(Bit::One), 64, 1_000, 41);
    outcome(
        zero == 1_000 && one == 1_000,
        format!("honest runs of 64 rounds: bit 0 {zero}/1000, bit 1 {one}/1000 accepted"),
    )
}

fn criterion_5() -> Outcome {
    let ops = CommitOperators::standard();
    let pairs = [(&ops.j, &ops.m), (&ops.j, &ops.n), (&ops.k, &ops.m), (&ops.k, &ops.n)];
    let tr2: Vec<f64> = pairs.iter().map(|(c, a)| (c.matrix().adjoint() * a.matrix()).trace().norm_sqr()).collect();
    let oracle = tr2.iter().map(|t| (t + 2.0) / 6.0).sum::<f64>() / 4.0;
    let single = accept_count(&AliceStrategy::FlipAtReveal, 1, 10_000, 50);
    let rate = single as f64 / 10_000.0;
    let multi = accept_count(&AliceStrategy::FlipAtReveal, 64, 1_000, 51);
    let tr_ok = tr2.iter().all(|t| (t - 1.0).abs() < 1e-12);
    outcome(
        tr_ok && (oracle - 0.5).abs() < 1e-12 && (rate - oracle).abs() <= 0.02 && multi == 0,
        format!("|Tr W|^2 = {tr2:?}, oracle rate {oracle:.6}, single-round rate {rate:.4} over 10^4, 64-round accepts {multi}/1000"),
    )
}

fn criterion_6() -> Outcome {
    let psi = plus_i();
    let (rho0, rho1) = no_ttp_views(&psi).unwrap();
    // Qubit closed form: F^2 = Tr(rho sigma) + 2 sqrt(det rho det sigma).
    let (a, b) = (rho0.matrix(), rho1.matrix());
    let overlap = (a * b).trace().re;
    let hand = (overlap + 2.0 * (a.determinant().re.max(0.0) * b.determinant().re.max(0.0)).sqrt()).sqrt();
    let attack = no_ttp_attack(&psi).unwrap();
    let scheme = no_ttp_scheme();
    let as_scheme = scheme.concealment(&psi).unwrap().fidelity;
    let target = FRAC_1_SQRT_2;
    let err = [hand, attack.view_fidelity, attack.report.achieved_fidelity, as_scheme]
        .iter()
        .map(|f| (f - target).abs())
        .fold(0.0, f64::max);
    let search = find_distinguishing_bob_state(&scheme, 10_000, &mut stream(6, 0)).unwrap();
    outcome(
        hand.is_finite() && err <= 1e-9 && search.best_fidelity <= 0.7072,
        format!(
            "psi=(|0>+i|1>)/sqrt2: max |F - 1/sqrt2| {err:.1e} (hand formula {hand:.12}); search best {:.10}",
            search.best_fidelity
        ),
    )
}

fn criterion_7() -> Outcome {
    let mut rng = stream(7, 0);
    let worst =
        (0..100).map(|_| check_uu_invariance(&haar_random_unitary(2, &mut rng)).unwrap()).fold(f64::INFINITY, f64::min);
    outcome(worst >= 1.0 - 1e-12, format!("100 Haar U: min |<psi-|U(x)U|psi->| {worst:.16}"))
}

fn random_density(d: usize, k: usize, rng: &mut QRng) -> DensityOperator {
    let psi = haar_random_state(d * k, rng).with_dims(vec![d, k]).unwrap();
    partial_trace(&psi.density(), (d, k), Keep::First).unwrap()
}

fn criterion_8() -> Outcome {
    let mut rng = stream(8, 0);
    let mut failures = Vec::new();
    for n in 0..100 {
        let (d1, d2) = (1 + n % 4, 1 + (n / 4) % 4);
        let rho = random_density(d1 * d2, 1 + n % 3, &mut rng);
        for keep in [Keep::First, Keep::Second] {
            let red = partial_trace(&rho, (d1, d2), keep).unwrap();
            let min_eig = red.eigenvalues().into_iter().fold(f64::INFINITY, f64::min);
            if (red.matrix().trace().re - 1.0).abs() > 1e-10 || min_eig < -1e-10 {
                failures.push(format!("partial trace #{n}"));
            }
        }

        let d = 2 + n % 3;
        let (r, s) = (random_density(d, 1 + n % 3, &mut rng), random_density(d, 1 + (n / 3) % 3, &mut rng));
        let f = fidelity(&r, &s).unwrap();
        let t = trace_distance(&r, &s).unwrap();
        let sym = (f - fidelity(&s, &r).unwrap()).abs();
        if !(1.0 - f - 1e-10 <= t && t <= (1.0 - f * f).max(0.0).sqrt() + 1e-10)
            || sym > 1e-10
            || !(0.0..=1.0).contains(&f)
        {
            failures.push(format!("fidelity #{n}"));
        }

        let (da, db) = (1 + n % 4, 1 + (n / 4) % 4);
        let psi = haar_random_state(da * db, &mut rng).with_dims(vec![da, db]).unwrap();
        let sd = schmidt_decompose(&psi, (da, db)).unwrap();
        let recon = sd.reconstruct();
        let norm2: f64 = sd.coefficients.iter().map(|c| c * c).sum();
        if (&recon - psi.amplitudes()).norm() > 1e-12 || (norm2 - 1.0).abs() > 1e-12 {
            failures.push(format!("schmidt #{n}"));
        }

        let rho = random_density(d, 1 + n % 3, &mut rng);
        let pure = purify(&rho);
        let k = pure.dim() / d;
        let back = partial_trace(&pure.density(), (d, k), Keep::First).unwrap();
        let gap = (back.matrix() - rho.matrix()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if gap > 1e-10 {
            failures.push(format!("purification #{n}"));
        }
    }
    outcome(
        failures.is_empty(),
        format!(
            "partial trace, Fuchs-van de Graaf, Schmidt and purification on 100 instances each; failures: {failures:?}"
        ),
    )
}

fn qbc_results(args: &[&str]) -> Result<String, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_qbc")).args(args).output().map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("{args:?} exited with {:?}", out.status.code()));
    }
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    Ok(report["results"].to_string())
}

fn criterion_9() -> Outcome {
    let commands: [&[&str]; 6] = [
        &["demo-mlc", "--builtin", "choi-nottp", "--seed", "9"],
        &["sweep", "--builtin", "phase", "--samples", "50", "--seed", "9"],
        &["search", "--builtin", "choi-nottp", "--budget", "2000", "--seed", "9"],
        &["choi", "--strategy", "flip", "--trials", "50", "--seed", "9"],
        &["choi", "--mode", "attack", "--samples", "5", "--seed", "9"],
        &["choi", "--mode", "attack", "--psi", "plus-i", "--seed", "9"],
    ];
    let mut mismatched = Vec::new();
    for args in commands {
        match (qbc_results(args), qbc_results(args)) {
            (Ok(a), Ok(b)) if a == b => {}
            (Err(e), _) | (_, Err(e)) => mismatched.push(e),
            _ => mismatched.push(args.join(" ")),
        }
    }
    outcome(mismatched.is_empty(), format!("{} commands run twice; mismatches: {mismatched:?}", commands.len()))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("no-go reproduction", criterion_1),
        ("Uhlmann tightness", criterion_2),
        ("fixed cheat on phase-type schemes", criterion_3),
        ("protocol completeness", criterion_4),
        ("cheating detection", criterion_5),
        ("no-TTP insecurity", criterion_6),
        ("singlet invariance", criterion_7),
        ("core-math invariants", criterion_8),
        ("CLI determinism", criterion_9),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let o = f();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        failed += usize::from(!o.pass);
        println!("{tag} {} {name}: {} [{:.2}s]", k + 1, o.detail, t.elapsed().as_secs_f64());
    }
    println!(
        "{} of {} criteria passed in {:.1}s",
        criteria.len() - failed,
        criteria.len(),
        start.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
