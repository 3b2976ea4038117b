//! Monte Carlo verification of the skew-information / LQU bounds.
//!
//! Every trial owns the random stream `(master_seed, trial_index)`, so the
//! records are identical whatever the number of worker threads. Each harness
//! emits one [`TrialRecord`] per trial and per checked inequality, and one
//! [`VerificationReport`] per inequality.

mod report;

pub use report::{read_records, write_report, write_summary, ReportFormat};

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{self, CMatrix, Subsystem};
use crate::metrics::{local_skew, lqu, q_local, skew_information, LquOptions};
use crate::optimize::SearchOptions;
use crate::quantum::{
    commuting_kraus_channel, gell_mann_basis, ginibre_state, random, random_nondegenerate_observable, stream,
    BipartiteState, DensityMatrix, KrausChannel, NondegenerateObservable, Observable, Spectrum,
};
use crate::scalar::cr;
use crate::steering::{steered_q_sum, steered_skew_sum, steering_induced_skew, MeasurementBasis, SteeringOptions};

/// Default violation tolerance.
pub const DEFAULT_TOL: f64 = 1e-7;

/// Which inequality a record checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ClaimId {
    /// `U_A(Φ(ρ_A ⊗ τ_B)) ≤ I(ρ_A, K_A)` for commuting-Kraus channels.
    Claim1,
    /// `I(Φ(σ), K ⊗ I) ≤ I(σ, K ⊗ I)` inside each Claim1 trial.
    Claim1Monotonicity,
    /// Steering-induced skew information `≤` LQU on side B.
    Claim2,
    /// `Σ p^i I(ρ_B^i, K_B) ≤ I(ρ_AB, I ⊗ K_B)` for one basis and one `K_B`.
    Claim2Lemma,
    /// `Σ p^i Q(ρ_B^i) ≤ Q_B(ρ_AB)`.
    AvgBound,
}

impl ClaimId {
    pub fn as_str(self) -> &'static str {
        match self {
            ClaimId::Claim1 => "claim1",
            ClaimId::Claim1Monotonicity => "claim1-monotonicity",
            ClaimId::Claim2 => "claim2",
            ClaimId::Claim2Lemma => "claim2-lemma",
            ClaimId::AvgBound => "avg-bound",
        }
    }
}

impl fmt::Display for ClaimId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ClaimId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "claim1" => ClaimId::Claim1,
            "claim1-monotonicity" => ClaimId::Claim1Monotonicity,
            "claim2" => ClaimId::Claim2,
            "claim2-lemma" => ClaimId::Claim2Lemma,
            "avg-bound" => ClaimId::AvgBound,
            other => return Err(Error::Parse(format!("unknown claim id {other:?}"))),
        })
    }
}

/// How Claim 2 picks Bob's observable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Claim2Mode {
    /// `K_B` is the minimizer returned by the LQU search; rhs is the LQU value.
    ArgminK,
    /// `K_B` is random; rhs is `I(ρ_AB, I ⊗ K_B)`.
    RandomK,
}

impl Claim2Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Claim2Mode::ArgminK => "argmin_K",
            Claim2Mode::RandomK => "random_K",
        }
    }
}

/// One checked inequality `lhs ≤ rhs` on one random instance.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub trial_index: u64,
    /// `(master_seed, stream)`.
    pub seed: (u64, u64),
    pub dims: (usize, usize),
    pub claim: ClaimId,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs − lhs`.
    pub margin: f64,
    /// `margin < −tol`.
    pub violated: bool,
    /// Zero unless timing was requested, so that reports stay reproducible.
    pub wall_time_ms: f64,
    /// Construction error that aborted the trial, if any.
    pub diagnostic: Option<String>,
}

impl TrialRecord {
    fn checked(trial_index: u64, seed: (u64, u64), dims: (usize, usize), claim: ClaimId, lhs: f64, rhs: f64, tol: f64) -> Self {
        let margin = rhs - lhs;
        Self { trial_index, seed, dims, claim, lhs, rhs, margin, violated: margin < -tol, wall_time_ms: 0.0, diagnostic: None }
    }

    fn failed(trial_index: u64, seed: (u64, u64), dims: (usize, usize), claim: ClaimId, err: &Error) -> Self {
        Self {
            trial_index,
            seed,
            dims,
            claim,
            lhs: f64::NAN,
            rhs: f64::NAN,
            margin: f64::NAN,
            violated: false,
            wall_time_ms: 0.0,
            diagnostic: Some(err.to_string()),
        }
    }

    pub fn failed_trial(&self) -> bool {
        self.diagnostic.is_some()
    }
}

/// Settings shared by all harnesses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub n_a: usize,
    pub n_b: usize,
    pub trials: u64,
    pub tol: f64,
    pub master_seed: u64,
    pub search: SearchOptions,
    /// Kraus operators per channel (Claim 1).
    pub kraus_count: usize,
    /// Random measurement bases per trial (averaged bound).
    pub bases_per_trial: usize,
    /// Worker threads; `None` uses the global pool.
    pub workers: Option<usize>,
    pub record_timing: bool,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            n_a: 2,
            n_b: 2,
            trials: 1000,
            tol: DEFAULT_TOL,
            master_seed: 42,
            search: SearchOptions::default(),
            kraus_count: 2,
            bases_per_trial: 20,
            workers: None,
            record_timing: false,
        }
    }
}

/// Aggregate over all records of one claim.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub claim: ClaimId,
    pub trials: u64,
    pub violations: u64,
    /// Trials aborted by a construction error; not counted as violations.
    pub failures: u64,
    /// `+∞` when no trial completed.
    pub min_margin: f64,
    pub mode: Option<Claim2Mode>,
    pub config: VerifyConfig,
}

impl VerificationReport {
    pub fn from_records(claim: ClaimId, mode: Option<Claim2Mode>, config: &VerifyConfig, records: &[TrialRecord]) -> Self {
        let mine = records.iter().filter(|r| r.claim == claim);
        let (mut trials, mut violations, mut failures, mut min_margin) = (0, 0, 0, f64::INFINITY);
        for r in mine {
            trials += 1;
            if r.failed_trial() {
                failures += 1;
                continue;
            }
            violations += u64::from(r.violated);
            min_margin = min_margin.min(r.margin);
        }
        Self { claim, trials, violations, failures, min_margin, mode, config: config.clone() }
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Records plus one report per checked claim.
#[derive(Debug, Clone)]
pub struct HarnessOutput {
    pub reports: Vec<VerificationReport>,
    pub records: Vec<TrialRecord>,
}

impl HarnessOutput {
    pub fn violations(&self) -> u64 {
        self.reports.iter().map(|r| r.violations).sum()
    }

    pub fn report(&self, claim: ClaimId) -> Option<&VerificationReport> {
        self.reports.iter().find(|r| r.claim == claim)
    }
}

fn validate(cfg: &VerifyConfig, min_b: usize) -> Result<()> {
    if cfg.n_a < 2 || cfg.n_b < min_b {
        return Err(Error::InvalidArgument(format!("dimensions ({}, {}) too small", cfg.n_a, cfg.n_b)));
    }
    if cfg.n_a * cfg.n_b > matcore::MAX_DIM {
        return Err(Error::InvalidArgument(format!("joint dimension above {}", matcore::MAX_DIM)));
    }
    if cfg.trials == 0 || cfg.kraus_count == 0 || cfg.bases_per_trial == 0 || !(cfg.tol >= 0.0) {
        return Err(Error::InvalidArgument("trials, kraus count, bases and tolerance must be positive".into()));
    }
    Ok(())
}

/// Runs `trial` for every index on the configured pool and returns the
/// records sorted by trial index.
fn run_trials(
    cfg: &VerifyConfig,
    trial: impl Fn(u64, &mut random::Stream) -> Vec<TrialRecord> + Sync + Send,
) -> Result<Vec<TrialRecord>> {
    let body = || -> Vec<TrialRecord> {
        (0..cfg.trials)
            .into_par_iter()
            .map(|t| {
                let mut rng = stream(cfg.master_seed, t);
                let start = Instant::now();
                let mut records = trial(t, &mut rng);
                if cfg.record_timing {
                    let ms = start.elapsed().as_secs_f64() * 1e3;
                    records.iter_mut().for_each(|r| r.wall_time_ms = ms);
                }
                records
            })
            .collect::<Vec<_>>()
            .into_iter()
            .flatten()
            .collect()
    };
    match cfg.workers {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
            Ok(pool.install(body))
        }
        None => Ok(body()),
    }
}

/// Terms of one Claim 1 instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Claim1Terms {
    /// LQU of `Φ(ρ_A ⊗ τ_B)` on side A.
    pub lqu: f64,
    /// `I(ρ_A, K_A)`.
    pub skew: f64,
    /// `I(Φ(σ), K_A ⊗ I)`.
    pub skew_after: f64,
    /// `I(σ, K_A ⊗ I)` with `σ = ρ_A ⊗ τ_B`.
    pub skew_before: f64,
}

/// Evaluates both sides of Claim 1 for explicit ingredients.
pub fn claim1_instance<R: Rng + ?Sized>(
    rho_a: &DensityMatrix<f64>,
    tau_b: &DensityMatrix<f64>,
    k_a: &NondegenerateObservable<f64>,
    channel: &KrausChannel<f64>,
    search: &SearchOptions,
    rng: &mut R,
) -> Result<Claim1Terms> {
    let sigma = BipartiteState::product(rho_a, tau_b)?;
    let (n_a, n_b) = sigma.dims();
    let after = BipartiteState::new(channel.apply(sigma.state())?, n_a, n_b)?;
    let k = k_a.matrix();
    let opts = LquOptions { search: *search, seeds: vec![k_a.clone()] };
    let lqu_value = lqu(&after, k_a.spectrum(), Subsystem::A, &opts, rng)?.value;
    Ok(Claim1Terms {
        lqu: lqu_value,
        skew: skew_information(rho_a, &k_a.to_observable())?,
        skew_after: local_skew(&after, Subsystem::A, &k)?,
        skew_before: local_skew(&sigma, Subsystem::A, &k)?,
    })
}

/// Claim 1 harness: random `ρ_A`, `τ_B`, `K_A` and a channel commuting with
/// `K_A ⊗ I`; checks the LQU bound and the embedded monotonicity step.
pub fn verify_claim1(cfg: &VerifyConfig) -> Result<HarnessOutput> {
    validate(cfg, 1)?;
    let dims = (cfg.n_a, cfg.n_b);
    let records = run_trials(cfg, |t, rng| {
        let seed = (cfg.master_seed, t);
        let terms = (|| {
            let rho_a = ginibre_state::<f64, _>(cfg.n_a, cfg.n_a, rng)?;
            let tau_b = ginibre_state::<f64, _>(cfg.n_b, cfg.n_b, rng)?;
            let k_a = random_nondegenerate_observable::<f64, _>(cfg.n_a, None, rng)?;
            let channel = commuting_kraus_channel(&k_a, cfg.n_b, cfg.kraus_count, rng)?;
            claim1_instance(&rho_a, &tau_b, &k_a, &channel, &cfg.search, rng)
        })();
        match terms {
            Ok(v) => vec![
                TrialRecord::checked(t, seed, dims, ClaimId::Claim1, v.lqu, v.skew, cfg.tol),
                TrialRecord::checked(t, seed, dims, ClaimId::Claim1Monotonicity, v.skew_after, v.skew_before, cfg.tol),
            ],
            Err(e) => vec![
                TrialRecord::failed(t, seed, dims, ClaimId::Claim1, &e),
                TrialRecord::failed(t, seed, dims, ClaimId::Claim1Monotonicity, &e),
            ],
        }
    })?;
    Ok(HarnessOutput {
        reports: vec![
            VerificationReport::from_records(ClaimId::Claim1, None, cfg, &records),
            VerificationReport::from_records(ClaimId::Claim1Monotonicity, None, cfg, &records),
        ],
        records,
    })
}

/// Both sides of Claim 2 for an explicit state: `(steering-induced skew, bound)`.
pub fn claim2_instance<R: Rng + ?Sized>(
    state: &BipartiteState<f64>,
    mode: Claim2Mode,
    search: &SearchOptions,
    rng: &mut R,
) -> Result<(f64, f64, NondegenerateObservable<f64>)> {
    let n_b = state.dims().1;
    let (k_b, rhs) = match mode {
        Claim2Mode::ArgminK => {
            let opts = LquOptions { search: *search, seeds: vec![] };
            let r = lqu(state, &Spectrum::equally_spaced(n_b), Subsystem::B, &opts, rng)?;
            (r.minimizer, r.value)
        }
        Claim2Mode::RandomK => {
            let k = random_nondegenerate_observable::<f64, _>(n_b, None, rng)?;
            let rhs = local_skew(state, Subsystem::B, &k.matrix())?;
            (k, rhs)
        }
    };
    let opts = SteeringOptions { search: *search, seeds: vec![] };
    let lhs = steering_induced_skew(state, &k_b.to_observable(), &opts, rng)?.value;
    Ok((lhs, rhs, k_b))
}

/// Claim 2 harness on Ginibre states. Each trial also checks the
/// optimization-free per-basis inequality for the chosen `K_B` and one
/// random measurement basis.
pub fn verify_claim2(cfg: &VerifyConfig, mode: Claim2Mode) -> Result<HarnessOutput> {
    validate(cfg, 2)?;
    let dims = (cfg.n_a, cfg.n_b);
    let records = run_trials(cfg, |t, rng| {
        let seed = (cfg.master_seed, t);
        let terms = (|| {
            let state = BipartiteState::new(ginibre_state::<f64, _>(cfg.n_a * cfg.n_b, cfg.n_a * cfg.n_b, rng)?, cfg.n_a, cfg.n_b)?;
            let (lhs, rhs, k_b) = claim2_instance(&state, mode, &cfg.search, rng)?;
            let basis = MeasurementBasis::random(cfg.n_a, rng);
            let lemma_lhs = steered_skew_sum(&state, &basis, &k_b.to_observable())?;
            let lemma_rhs = local_skew(&state, Subsystem::B, &k_b.matrix())?;
            Ok::<_, Error>((lhs, rhs, lemma_lhs, lemma_rhs))
        })();
        match terms {
            Ok((lhs, rhs, ll, lr)) => vec![
                TrialRecord::checked(t, seed, dims, ClaimId::Claim2, lhs, rhs, cfg.tol),
                TrialRecord::checked(t, seed, dims, ClaimId::Claim2Lemma, ll, lr, cfg.tol),
            ],
            Err(e) => vec![
                TrialRecord::failed(t, seed, dims, ClaimId::Claim2, &e),
                TrialRecord::failed(t, seed, dims, ClaimId::Claim2Lemma, &e),
            ],
        }
    })?;
    Ok(HarnessOutput {
        reports: vec![
            VerificationReport::from_records(ClaimId::Claim2, Some(mode), cfg, &records),
            VerificationReport::from_records(ClaimId::Claim2Lemma, Some(mode), cfg, &records),
        ],
        records,
    })
}

/// Random Hermitian matrix with Gaussian entries, `(G + G†)/2`.
pub fn random_hermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Observable<f64> {
    let g: CMatrix<f64> = random::gaussian_matrix(n, n, rng);
    Observable::new((&g + g.adjoint()) * cr(0.5)).expect("Hermitian by construction")
}

/// Optimization-free Claim 2 lemma on random `(ρ_AB, Θ, K_B)` with `K_B` an
/// arbitrary Hermitian matrix.
pub fn verify_claim2_lemma(cfg: &VerifyConfig) -> Result<HarnessOutput> {
    validate(cfg, 2)?;
    let dims = (cfg.n_a, cfg.n_b);
    let records = run_trials(cfg, |t, rng| {
        let seed = (cfg.master_seed, t);
        let terms = (|| {
            let state = BipartiteState::new(ginibre_state::<f64, _>(cfg.n_a * cfg.n_b, cfg.n_a * cfg.n_b, rng)?, cfg.n_a, cfg.n_b)?;
            let basis = MeasurementBasis::random(cfg.n_a, rng);
            let k_b = random_hermitian(cfg.n_b, rng);
            Ok::<_, Error>((steered_skew_sum(&state, &basis, &k_b)?, local_skew(&state, Subsystem::B, k_b.matrix())?))
        })();
        vec![match terms {
            Ok((lhs, rhs)) => TrialRecord::checked(t, seed, dims, ClaimId::Claim2Lemma, lhs, rhs, cfg.tol),
            Err(e) => TrialRecord::failed(t, seed, dims, ClaimId::Claim2Lemma, &e),
        }]
    })?;
    Ok(HarnessOutput { reports: vec![VerificationReport::from_records(ClaimId::Claim2Lemma, None, cfg, &records)], records })
}

/// Both sides of the averaged bound for an explicit state and bases:
/// `(max_Θ Σ p^i Q(ρ_B^i), Q_B(ρ_AB))`.
pub fn avg_bound_instance(state: &BipartiteState<f64>, bases: &[MeasurementBasis<f64>]) -> Result<(f64, f64)> {
    let basis_b = gell_mann_basis::<f64>(state.dims().1);
    let rhs = q_local(state, Subsystem::B, &basis_b)?;
    let lhs = bases
        .iter()
        .map(|theta| steered_q_sum(state, theta, &basis_b))
        .try_fold(f64::NEG_INFINITY, |acc, v| v.map(|v| acc.max(v)))?;
    Ok((lhs, rhs))
}

/// Averaged-bound harness: `bases_per_trial` random bases per Ginibre state.
pub fn verify_avg_bound(cfg: &VerifyConfig) -> Result<HarnessOutput> {
    validate(cfg, 2)?;
    let dims = (cfg.n_a, cfg.n_b);
    let records = run_trials(cfg, |t, rng| {
        let seed = (cfg.master_seed, t);
        let terms = (|| {
            let state = BipartiteState::new(ginibre_state::<f64, _>(cfg.n_a * cfg.n_b, cfg.n_a * cfg.n_b, rng)?, cfg.n_a, cfg.n_b)?;
            let bases: Vec<_> = (0..cfg.bases_per_trial).map(|_| MeasurementBasis::random(cfg.n_a, rng)).collect();
            avg_bound_instance(&state, &bases)
        })();
        vec![match terms {
            Ok((lhs, rhs)) => TrialRecord::checked(t, seed, dims, ClaimId::AvgBound, lhs, rhs, cfg.tol),
            Err(e) => TrialRecord::failed(t, seed, dims, ClaimId::AvgBound, &e),
        }]
    })?;
    Ok(HarnessOutput { reports: vec![VerificationReport::from_records(ClaimId::AvgBound, None, cfg, &records)], records })
}
