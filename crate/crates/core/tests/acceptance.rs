//! Acceptance suite: one line per criterion, non-zero exit if any fails.
//!
//! Run with `cargo test -p skewlqu --test acceptance`.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use skewlqu::matcore::{self, kron, partial_trace, CMatrix};
use skewlqu::metrics::{local_skew, lqu, lqu_2xd, q_local, q_total, skew_information, variance, LquOptions};
use skewlqu::optimize::SearchOptions;
use skewlqu::quantum::{gaussian_matrix, gell_mann_basis, ginibre_state, haar_unitary, stream, Stream};
use skewlqu::steering::MeasurementBasis;
use skewlqu::verify::{
    avg_bound_instance, claim2_instance, random_hermitian, read_records, verify_avg_bound, verify_claim1,
    verify_claim2, verify_claim2_lemma, write_report, Claim2Mode, ClaimId, HarnessOutput, ReportFormat, VerifyConfig,
};
use skewlqu::{BipartiteState, DensityMatrix, Observable, Spectrum, Subsystem};

type Outcome = Result<String, String>;

fn c(re: f64) -> num_complex::Complex64 {
    num_complex::Complex64::new(re, 0.0)
}

fn ginibre(n: usize, rank: usize, rng: &mut Stream) -> DensityMatrix {
    ginibre_state(n, rank, rng).unwrap()
}

fn random_joint(dims: (usize, usize), rng: &mut Stream) -> BipartiteState {
    let n = dims.0 * dims.1;
    BipartiteState::new(ginibre(n, n, rng), dims.0, dims.1).unwrap()
}

fn bell() -> BipartiteState {
    BipartiteState::new(DensityMatrix::pure(&[c(1.0), c(0.0), c(0.0), c(1.0)]).unwrap(), 2, 2).unwrap()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within_budget(elapsed: Duration, budget: Duration) -> Result<(), String> {
    ensure(elapsed < budget, || format!("runtime {elapsed:.1?} exceeds {budget:?}"))
}

fn no_violations(out: &HarnessOutput, label: &str) -> Result<f64, String> {
    let mut min_margin = f64::INFINITY;
    for r in &out.reports {
        ensure(r.violations == 0 && r.failures == 0, || {
            format!("{label}: {} has {} violations, {} failures (min margin {:e})", r.claim, r.violations, r.failures, r.min_margin)
        })?;
        min_margin = min_margin.min(r.min_margin);
    }
    Ok(min_margin)
}

/// Random Hermitian matrix commuting with `rho`: a random function of its spectrum.
fn commuting_observable(rho: &DensityMatrix, rng: &mut Stream) -> Observable {
    let eig = matcore::hermitian_eig(rho.matrix()).unwrap();
    let h = random_hermitian(rho.dim(), rng);
    let coeffs: Vec<f64> = (0..rho.dim()).map(|i| h.matrix()[(i, i)].re).collect();
    let u = &eig.eigenvectors;
    let d = CMatrix::from_fn(rho.dim(), rho.dim(), |i, j| if i == j { c(coeffs[i]) } else { c(0.0) });
    Observable::new(u * d * u.adjoint()).unwrap()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut rng = stream(1001, 0);
    let (mut worst_gap, mut worst_pure, mut worst_commuting) = (f64::NEG_INFINITY, 0.0f64, 0.0f64);
    let mut min_skew = f64::INFINITY;
    for n in [2, 3, 4] {
        for i in 0..500 {
            let rank = 1 + i % n;
            let rho = ginibre(n, rank, &mut rng);
            let x = random_hermitian(n, &mut rng);
            let (skew, var) = (skew_information(&rho, &x).unwrap(), variance(&rho, &x).unwrap());
            min_skew = min_skew.min(skew);
            worst_gap = worst_gap.max(skew - var);

            let pure = ginibre(n, 1, &mut rng);
            let d = skew_information(&pure, &x).unwrap() - variance(&pure, &x).unwrap();
            worst_pure = worst_pure.max(d.abs());

            let k = commuting_observable(&rho, &mut rng);
            worst_commuting = worst_commuting.max(skew_information(&rho, &k).unwrap().abs());
        }
    }
    ensure(min_skew >= 0.0, || format!("negative skew information {min_skew:e}"))?;
    ensure(worst_gap <= 1e-9, || format!("I exceeds V by {worst_gap:e}"))?;
    ensure(worst_pure <= 1e-8, || format!("pure-state |I - V| = {worst_pure:e}"))?;
    ensure(worst_commuting <= 1e-10, || format!("commuting I = {worst_commuting:e}"))?;
    within_budget(start.elapsed(), Duration::from_secs(10))?;
    Ok(format!("max I-V {worst_gap:.2e}, pure |I-V| {worst_pure:.2e}, commuting I {worst_commuting:.2e}"))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let mut rng = stream(1002, 0);
    let mut worst_convexity = f64::NEG_INFINITY;
    for i in 0..500 {
        let n = 2 + i % 3;
        let parts = 2 + i % 2;
        let states: Vec<DensityMatrix> = (0..parts).map(|k| ginibre(n, 1 + (i + k) % n, &mut rng)).collect();
        let raw: Vec<f64> = (0..parts).map(|_| rand::Rng::random::<f64>(&mut rng) + 1e-3).collect();
        let total: f64 = raw.iter().sum();
        let weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
        let mut mix = CMatrix::zeros(n, n);
        for (w, s) in weights.iter().zip(&states) {
            mix += s.matrix() * c(*w);
        }
        let mix = DensityMatrix::new(mix).unwrap();
        let x = random_hermitian(n, &mut rng);
        let lhs = skew_information(&mix, &x).unwrap();
        let rhs: f64 = weights.iter().zip(&states).map(|(w, s)| w * skew_information(s, &x).unwrap()).sum();
        worst_convexity = worst_convexity.max(lhs - rhs);
    }
    let mut worst_monotone = f64::NEG_INFINITY;
    let configs = [(2, 2), (2, 3), (3, 2)];
    for i in 0..500 {
        let dims = configs[i % 3];
        let state = random_joint(dims, &mut rng);
        let x = random_hermitian(dims.0, &mut rng);
        let joint = local_skew(&state, Subsystem::A, x.matrix()).unwrap();
        let reduced = skew_information(&state.marginal(Subsystem::A).unwrap(), &x).unwrap();
        worst_monotone = worst_monotone.max(reduced - joint);
    }
    ensure(worst_convexity <= 1e-9, || format!("convexity violated by {worst_convexity:e}"))?;
    ensure(worst_monotone <= 1e-9, || format!("partial-trace monotonicity violated by {worst_monotone:e}"))?;
    within_budget(start.elapsed(), Duration::from_secs(10))?;
    Ok(format!("worst convexity excess {worst_convexity:.2e}, worst monotonicity excess {worst_monotone:.2e}"))
}

/// Ginibre state `GG†/t` with `G` of shape n × rank, together with the exact
/// `√ρ = G (G†G)^{-1/2} G† / √t` and the nonzero eigenvalues of ρ, all taken
/// from the rank × rank Gram matrix so that no spurious near-zero eigenvalues enter.
struct ExactState {
    rho: DensityMatrix,
    sqrt: CMatrix<f64>,
    support: Vec<f64>,
}

fn exact_ginibre(n: usize, rank: usize, rng: &mut Stream) -> ExactState {
    let g: CMatrix<f64> = gaussian_matrix(n, rank, rng);
    let gram = g.adjoint() * &g;
    let t = gram.trace().re;
    let eig = matcore::hermitian_eig(&gram).unwrap();
    let inv_sqrt = eig.map_spectrum(|m| 1.0 / m.sqrt());
    ExactState {
        rho: DensityMatrix::new(&g * g.adjoint() * c(1.0 / t)).unwrap(),
        sqrt: &g * inv_sqrt * g.adjoint() * c(1.0 / t.sqrt()),
        support: eig.eigenvalues.iter().map(|m| m / t).collect(),
    }
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let mut rng = stream(1003, 0);
    let (mut worst_total, mut worst_local, mut worst_rotation) = (0.0f64, 0.0f64, 0.0f64);
    for n in [2, 3, 4] {
        let basis = gell_mann_basis::<f64>(n);
        for i in 0..200 {
            let s = exact_ginibre(n, 1 + i % n, &mut rng);
            let q = q_total(&s.rho, &basis).unwrap();
            let tr_sqrt: f64 = s.support.iter().map(|l| l.sqrt()).sum();
            worst_total = worst_total.max((q - (n as f64 - tr_sqrt * tr_sqrt)).abs());
            let rotated = basis.rotated(&haar_unitary(n, &mut rng)).unwrap();
            worst_rotation = worst_rotation.max((q - q_total(&s.rho, &rotated).unwrap()).abs());
        }
    }
    for dims in [(2, 2), (2, 3), (3, 2)] {
        for i in 0..200 {
            let n = dims.0 * dims.1;
            let s = exact_ginibre(n, 1 + i % n, &mut rng);
            let state = BipartiteState::new(s.rho, dims.0, dims.1).unwrap();
            for side in [Subsystem::A, Subsystem::B] {
                let q = q_local(&state, side, &gell_mann_basis(state.dim_of(side))).unwrap();
                let other = partial_trace(&s.sqrt, dims, side).unwrap();
                let oracle = state.dim_of(side) as f64 - (&other * &other).trace().re;
                worst_local = worst_local.max((q - oracle).abs());
            }
        }
    }
    ensure(worst_total <= 1e-8, || format!("q_total vs closed form {worst_total:e}"))?;
    ensure(worst_local <= 1e-8, || format!("q_local vs closed form {worst_local:e}"))?;
    ensure(worst_rotation <= 1e-8, || format!("basis dependence {worst_rotation:e}"))?;
    within_budget(start.elapsed(), Duration::from_secs(20))?;
    Ok(format!("q_total {worst_total:.2e}, q_local {worst_local:.2e}, basis change {worst_rotation:.2e}"))
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let mut rng = stream(1004, 0);
    let opts = LquOptions::default();
    let qubit = Spectrum::equally_spaced(2);
    let mut worst_oracle = 0.0f64;
    for dims in [(2, 2), (2, 3)] {
        for _ in 0..100 {
            let state = random_joint(dims, &mut rng);
            let numeric = lqu(&state, &qubit, Subsystem::A, &opts, &mut rng).unwrap().value;
            worst_oracle = worst_oracle.max((numeric - lqu_2xd(&state).unwrap()).abs());
        }
    }
    let configs = [(2, 2), (2, 3), (3, 2)];
    let mut worst_zero = 0.0f64;
    for i in 0..50 {
        let (na, nb) = configs[i % 3];
        let prod = BipartiteState::product(&ginibre(na, na, &mut rng), &ginibre(nb, nb, &mut rng)).unwrap();
        let v = lqu(&prod, &Spectrum::equally_spaced(na), Subsystem::A, &opts, &mut rng).unwrap().value;
        worst_zero = worst_zero.max(v.abs());
    }
    for i in 0..50 {
        let (na, nb) = configs[i % 3];
        // Σ_k p_k |k⟩⟨k| ⊗ ρ_k
        let p = ginibre(na, na, &mut rng);
        let mut joint = CMatrix::zeros(na * nb, na * nb);
        for k in 0..na {
            let mut proj = CMatrix::zeros(na, na);
            proj[(k, k)] = c(1.0);
            joint += kron(&proj, ginibre(nb, 1 + (i + k) % nb, &mut rng).matrix()) * c(p.matrix()[(k, k)].re);
        }
        let cq = BipartiteState::new(DensityMatrix::new(joint).unwrap(), na, nb).unwrap();
        let v = lqu(&cq, &Spectrum::equally_spaced(na), Subsystem::A, &opts, &mut rng).unwrap().value;
        worst_zero = worst_zero.max(v.abs());
    }
    let bell_lqu = lqu(&bell(), &qubit, Subsystem::A, &opts, &mut rng).unwrap().value;
    ensure(worst_oracle <= 1e-6, || format!("numerical vs closed-form LQU {worst_oracle:e}"))?;
    ensure(worst_zero <= 1e-7, || format!("LQU of zero-discord state {worst_zero:e}"))?;
    ensure((bell_lqu - 1.0).abs() <= 1e-6, || format!("Bell LQU {bell_lqu}"))?;
    within_budget(start.elapsed(), Duration::from_secs(300))?;
    Ok(format!("oracle gap {worst_oracle:.2e}, zero-discord max {worst_zero:.2e}, Bell {bell_lqu:.9}"))
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let mut summary = Vec::new();
    for (n_a, n_b) in [(2, 2), (2, 3), (3, 2)] {
        for kraus_count in [1, 2, 3] {
            let cfg = VerifyConfig { n_a, n_b, kraus_count, trials: 1000, tol: 1e-7, master_seed: 5, ..Default::default() };
            let out = verify_claim1(&cfg).map_err(|e| e.to_string())?;
            ensure(out.report(ClaimId::Claim1Monotonicity).is_some(), || "missing monotonicity report".into())?;
            let m = no_violations(&out, &format!("{n_a}x{n_b} J={kraus_count}"))?;
            summary.push(format!("{n_a}x{n_b}/J{kraus_count}:{m:.1e}"));
        }
    }
    within_budget(start.elapsed(), Duration::from_secs(900))?;
    Ok(format!("9000 trials, 0 violations; min margins {}", summary.join(" ")))
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let mut summary = Vec::new();
    for (n_a, n_b) in [(2, 2), (2, 3), (3, 2)] {
        let cfg = VerifyConfig { n_a, n_b, trials: 1000, tol: 1e-7, master_seed: 6, ..Default::default() };
        let out = verify_claim2_lemma(&cfg).map_err(|e| e.to_string())?;
        let m = no_violations(&out, &format!("{n_a}x{n_b}"))?;
        summary.push(format!("{n_a}x{n_b}:{m:.1e}"));
    }
    within_budget(start.elapsed(), Duration::from_secs(300))?;
    Ok(format!("3000 triples, 0 violations; min margins {}", summary.join(" ")))
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let mut summary = Vec::new();
    for mode in [Claim2Mode::ArgminK, Claim2Mode::RandomK] {
        let cfg = VerifyConfig { trials: 500, tol: 1e-7, master_seed: 7, ..Default::default() };
        let out = verify_claim2(&cfg, mode).map_err(|e| e.to_string())?;
        let m = no_violations(&out, mode.as_str())?;
        summary.push(format!("{}:{m:.1e}", mode.as_str()));
    }
    let mut rng = stream(1007, 0);
    let search = SearchOptions::default();
    let (lhs, rhs, _) = claim2_instance(&bell(), Claim2Mode::ArgminK, &search, &mut rng).map_err(|e| e.to_string())?;
    ensure((rhs - lhs).abs() <= 1e-6 && (lhs - 1.0).abs() <= 1e-6, || format!("Bell: lhs {lhs}, rhs {rhs}"))?;
    let mut worst_product = 0.0f64;
    for _ in 0..10 {
        let prod = BipartiteState::product(&ginibre(2, 2, &mut rng), &ginibre(2, 2, &mut rng)).unwrap();
        for mode in [Claim2Mode::ArgminK, Claim2Mode::RandomK] {
            let (lhs, rhs, _) = claim2_instance(&prod, mode, &search, &mut rng).map_err(|e| e.to_string())?;
            worst_product = worst_product.max((rhs - lhs).abs());
        }
    }
    ensure(worst_product <= 1e-6, || format!("product-state margin {worst_product:e}"))?;
    within_budget(start.elapsed(), Duration::from_secs(1200))?;
    Ok(format!(
        "1000 trials, 0 violations; min margins {}; Bell margin {:.1e}; product max |margin| {worst_product:.1e}",
        summary.join(" "),
        rhs - lhs
    ))
}

fn criterion_8() -> Outcome {
    let start = Instant::now();
    let cfg = VerifyConfig { trials: 500, bases_per_trial: 20, tol: 1e-7, master_seed: 8, ..Default::default() };
    let out = verify_avg_bound(&cfg).map_err(|e| e.to_string())?;
    let m = no_violations(&out, "avg")?;
    let mut rng = stream(1008, 0);
    let bases: Vec<_> = (0..20).map(|_| MeasurementBasis::random(2, &mut rng)).collect();
    let (lhs, rhs) = avg_bound_instance(&bell(), &bases).map_err(|e| e.to_string())?;
    ensure((lhs - 1.0).abs() <= 1e-6 && (rhs - 1.5).abs() <= 1e-6, || format!("Bell: lhs {lhs}, rhs {rhs}"))?;
    let mixed = BipartiteState::new(DensityMatrix::maximally_mixed(4), 2, 2).unwrap();
    let (lhs0, rhs0) = avg_bound_instance(&mixed, &bases).map_err(|e| e.to_string())?;
    ensure(lhs0.abs() <= 1e-12 && rhs0.abs() <= 1e-12, || format!("maximally mixed: lhs {lhs0}, rhs {rhs0}"))?;
    within_budget(start.elapsed(), Duration::from_secs(300))?;
    Ok(format!("500x20, 0 violations, min margin {m:.2e}; Bell lhs {lhs:.9} rhs {rhs:.9}"))
}

fn criterion_9() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let base = VerifyConfig {
        trials: 40,
        master_seed: 9,
        search: SearchOptions { restarts: 4, ..Default::default() },
        ..Default::default()
    };
    let runs: [(&str, fn(&VerifyConfig) -> skewlqu::Result<HarnessOutput>); 4] = [
        ("claim1", verify_claim1),
        ("claim2", |c| verify_claim2(c, Claim2Mode::ArgminK)),
        ("lemma", verify_claim2_lemma),
        ("avg", verify_avg_bound),
    ];
    for (name, run) in runs {
        for format in [ReportFormat::JsonLines, ReportFormat::Csv] {
            let mut bytes = Vec::new();
            for workers in [1, 4] {
                let cfg = VerifyConfig { workers: Some(workers), ..base.clone() };
                let out = run(&cfg).map_err(|e| e.to_string())?;
                let path = dir.path().join(format!("{name}-{workers}-{format:?}"));
                write_report(&out.reports, &out.records, &path, format).map_err(|e| e.to_string())?;
                ensure(read_records(&path, format).map_err(|e| e.to_string())?.len() == out.records.len(), || {
                    "record count changed on re-read".into()
                })?;
                let mut summary = path.clone().into_os_string();
                summary.push(".summary");
                bytes.push((std::fs::read(&path).unwrap(), std::fs::read(summary).unwrap()));
            }
            ensure(bytes[0] == bytes[1], || format!("{name} {format:?} reports differ between 1 and 4 workers"))?;
        }
    }
    Ok("claim1, claim2, lemma, avg reports byte-identical for 1 and 4 workers (json-lines and csv)".into())
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("1 definition suite", criterion_1),
        ("2 convexity and partial-trace monotonicity", criterion_2),
        ("3 closed-form oracle equivalence", criterion_3),
        ("4 LQU cross-oracle", criterion_4),
        ("5 claim 1 harness", criterion_5),
        ("6 claim 2 per-basis lemma", criterion_6),
        ("7 claim 2 optimized harness", criterion_7),
        ("8 averaged bound", criterion_8),
        ("9 determinism across worker counts", criterion_9),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (name, check) in criteria {
        let number = name.split(' ').next().unwrap_or_default();
        let selected = filter.iter().any(|f| if f.parse::<u32>().is_ok() { f == number } else { name.contains(f.as_str()) });
        if !filter.is_empty() && !selected {
            continue;
        }
        let start = Instant::now();
        match check() {
            Ok(detail) => println!("PASS criterion {name} [{:.1?}]: {detail}", start.elapsed()),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {name} [{:.1?}]: {detail}", start.elapsed());
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
