use std::io::Write;

use skewlqu::metrics::{self, LquOptions};
use skewlqu::optimize::SearchOptions;
use skewlqu::quantum::{gell_mann_basis, ginibre_state, stream, NondegenerateObservable, Spectrum};
use skewlqu::steering::{average_steering_induced_q, steering_induced_skew, SteeringOptions};
use skewlqu::verify::{self, HarnessOutput, VerifyConfig};
use skewlqu::{BipartiteState, Error, Subsystem};

use crate::args::VerifyTarget;
use crate::config::{RunCommand, RunConfig};
use crate::state_file::{self, LoadedState};

/// Environment variable capping the verification worker threads.
pub const THREADS_ENV: &str = "UQ_THREADS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Exit status for a failed run: bad input is a usage error, anything else 1.
pub fn error_exit_code(e: &Error) -> i32 {
    match e {
        Error::NoConvergence { .. } | Error::NotPsd { .. } | Error::InvalidChannel { .. } => EXIT_VIOLATION,
        _ => EXIT_USAGE,
    }
}

fn search(cfg: &RunConfig) -> SearchOptions {
    SearchOptions { restarts: cfg.restarts, ..SearchOptions::default() }
}

fn spectrum_for(cfg: &RunConfig, n: usize) -> Result<Spectrum<f64>, Error> {
    match &cfg.spectrum {
        Some(values) if values.len() != n => Err(Error::DimensionMismatch(format!(
            "--spectrum has {} values but the observable acts on dimension {n}",
            values.len()
        ))),
        Some(values) => Spectrum::new(values.clone()),
        None => Ok(Spectrum::equally_spaced(n)),
    }
}

fn input_state(cfg: &RunConfig) -> Result<LoadedState, Error> {
    match &cfg.state_file {
        Some(path) => state_file::load_state(path),
        None => {
            let n = cfg.n_a * cfg.n_b;
            let mut rng = stream(cfg.master_seed, 0);
            Ok(LoadedState::Bipartite(BipartiteState::new(ginibre_state(n, n, &mut rng)?, cfg.n_a, cfg.n_b)?))
        }
    }
}

fn bipartite(state: LoadedState, what: &str) -> Result<BipartiteState, Error> {
    match state {
        LoadedState::Bipartite(b) => Ok(b),
        LoadedState::Single(_) => Err(Error::InvalidArgument(format!("{what} needs a bipartite state (`dims: n_a n_b` header)"))),
    }
}

fn describe(state: &LoadedState) -> String {
    match state {
        LoadedState::Single(s) => format!("dim {}", s.dim()),
        LoadedState::Bipartite(b) => format!("dims {} x {}", b.dims().0, b.dims().1),
    }
}

fn fmt_spectrum(s: &Spectrum<f64>) -> String {
    let v: Vec<String> = s.values().iter().map(|x| format!("{x}")).collect();
    format!("[{}]", v.join(", "))
}

/// Executes a parsed command, printing to `out`; returns the exit status.
pub fn run(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32, Error> {
    match cfg.command {
        RunCommand::Skew => run_skew(cfg, out),
        RunCommand::Q => run_q(cfg, out),
        RunCommand::Lqu => run_lqu(cfg, out),
        RunCommand::Steer => run_steer(cfg, out),
        RunCommand::Verify(target) => run_verify(cfg, target, out),
    }
}

fn run_skew(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32, Error> {
    let state = input_state(cfg)?;
    let rho = state.density();
    let spectrum = spectrum_for(cfg, rho.dim())?;
    let k = match &cfg.basis_file {
        Some(path) => {
            let (_, u) = state_file::parse_matrix(&std::fs::read_to_string(path)?)?;
            NondegenerateObservable::new(spectrum, u)?
        }
        None => NondegenerateObservable::diagonal(spectrum),
    };
    let x = k.to_observable();
    writeln!(out, "state: {}", describe(&state))?;
    writeln!(out, "observable spectrum: {}", fmt_spectrum(k.spectrum()))?;
    writeln!(out, "skew_information = {:.12}", metrics::skew_information(rho, &x)?)?;
    writeln!(out, "variance = {:.12}", metrics::variance(rho, &x)?)?;
    Ok(EXIT_OK)
}

fn run_q(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32, Error> {
    let state = input_state(cfg)?;
    let rho = state.density();
    writeln!(out, "state: {}", describe(&state))?;
    writeln!(out, "Q = {:.12}", metrics::q_total(rho, &gell_mann_basis(rho.dim()))?)?;
    if let LoadedState::Bipartite(b) = &state {
        let (n_a, n_b) = b.dims();
        writeln!(out, "Q_A = {:.12}", metrics::q_local(b, Subsystem::A, &gell_mann_basis(n_a))?)?;
        writeln!(out, "Q_B = {:.12}", metrics::q_local(b, Subsystem::B, &gell_mann_basis(n_b))?)?;
    }
    Ok(EXIT_OK)
}

fn run_lqu(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32, Error> {
    let state = bipartite(input_state(cfg)?, "lqu")?;
    let n = state.dim_of(cfg.side);
    let spectrum = spectrum_for(cfg, n)?;
    let mut rng = stream(cfg.master_seed, 1);
    let opts = LquOptions { search: search(cfg), seeds: vec![] };
    let r = metrics::lqu(&state, &spectrum, cfg.side, &opts, &mut rng)?;
    writeln!(out, "state: dims {} x {}", state.dims().0, state.dims().1)?;
    writeln!(out, "side: {:?}", cfg.side)?;
    writeln!(out, "spectrum: {}", fmt_spectrum(&spectrum))?;
    writeln!(out, "lqu = {:.9}", r.value)?;
    writeln!(out, "restarts = {}", r.restarts_used)?;
    writeln!(out, "converged = {}", r.converged)?;
    if cfg.side == Subsystem::A && n == 2 && spectrum.values() == [-1.0, 1.0] {
        writeln!(out, "lqu_closed_form = {:.9}", metrics::lqu_2xd(&state)?)?;
    }
    Ok(EXIT_OK)
}

fn run_steer(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32, Error> {
    let state = bipartite(input_state(cfg)?, "steer")?;
    let (n_a, n_b) = state.dims();
    if n_a < 2 || n_b < 2 {
        return Err(Error::InvalidArgument("steering needs both subsystems of dimension at least 2".into()));
    }
    let spectrum = spectrum_for(cfg, n_b)?;
    let mut rng = stream(cfg.master_seed, 1);
    let lqu_b = metrics::lqu(&state, &spectrum, Subsystem::B, &LquOptions { search: search(cfg), seeds: vec![] }, &mut rng)?;
    let steer_opts = SteeringOptions { search: search(cfg), seeds: vec![] };
    let induced = steering_induced_skew(&state, &lqu_b.minimizer.to_observable(), &steer_opts, &mut rng)?;
    let basis_b = gell_mann_basis(n_b);
    let averaged = average_steering_induced_q(&state, &basis_b, &steer_opts, &mut rng)?;
    let q_b = metrics::q_local(&state, Subsystem::B, &basis_b)?;
    writeln!(out, "state: dims {n_a} x {n_b}")?;
    writeln!(out, "spectrum_B: {}", fmt_spectrum(&spectrum))?;
    writeln!(out, "lqu_B = {:.9}", lqu_b.value)?;
    writeln!(out, "steering_induced_skew = {:.9}", induced.value)?;
    writeln!(out, "average_steering_induced_q = {:.9}", averaged.value)?;
    writeln!(out, "q_local_B = {:.9}", q_b)?;
    Ok(EXIT_OK)
}

fn workers_from_env() -> Result<Option<usize>, Error> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Error::InvalidArgument(format!("{THREADS_ENV} must be a positive integer, got {v:?}"))),
        },
        Err(_) => Ok(None),
    }
}

fn run_verify(cfg: &RunConfig, target: VerifyTarget, out: &mut dyn Write) -> Result<i32, Error> {
    if cfg.spectrum.is_some() {
        return Err(Error::InvalidArgument("verification always uses the default equally spaced spectrum".into()));
    }
    let vcfg = VerifyConfig {
        n_a: cfg.n_a,
        n_b: cfg.n_b,
        trials: cfg.trials,
        tol: cfg.tol,
        master_seed: cfg.master_seed,
        search: search(cfg),
        kraus_count: cfg.kraus_count,
        bases_per_trial: cfg.bases_per_trial,
        workers: workers_from_env()?,
        record_timing: cfg.timing,
    };
    let output: HarnessOutput = match target {
        VerifyTarget::Claim1 => verify::verify_claim1(&vcfg)?,
        VerifyTarget::Claim2 => verify::verify_claim2(&vcfg, cfg.mode)?,
        VerifyTarget::Avg => verify::verify_avg_bound(&vcfg)?,
        VerifyTarget::Lemma => verify::verify_claim2_lemma(&vcfg)?,
    };
    for r in &output.reports {
        let mode = r.mode.map(|m| format!(" ({})", m.as_str())).unwrap_or_default();
        writeln!(
            out,
            "{}{mode}: trials {} violations {} failures {} min_margin {:.6e} [{}]",
            r.claim,
            r.trials,
            r.violations,
            r.failures,
            r.min_margin,
            if r.passed() { "PASS" } else { "FAIL" }
        )?;
    }
    if let Some(path) = &cfg.out_path {
        verify::write_report(&output.reports, &output.records, path, cfg.out_format)?;
        writeln!(out, "records written to {}", path.display())?;
    }
    Ok(if output.violations() == 0 { EXIT_OK } else { EXIT_VIOLATION })
}
