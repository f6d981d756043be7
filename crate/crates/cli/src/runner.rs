//! Experiment orchestration: realizes a configuration into concrete inputs,
//! runs the requested pipeline and emits deterministic output files.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use gqsearch_core::random::random_state;
use gqsearch_core::{
    classify_regime, compute_deviations, compute_moments, eigen_decompose, evolution_matrix,
    grover_step, initial_mean_bounds, marked_probability, means_at, optimal_time,
    oscillation_profile, probability_at, reconstruct_state, solve_coefficients, two_point_strategy,
    AlgorithmParams, EigenStructure, EtaVector, EvolutionMatrix, MarkedSet, MeanBoundReport,
    MeasurementPlan, MomentSummary, OscillationProfile, QuantumState, Regime,
    SolutionCoefficients, TwoPointPlan,
};

use crate::config::{
    ConfigErrors, ConfigIssue, DimensionSpec, EtaSource, ExperimentConfig, InitSource, MarkedSpec,
};
use crate::report::{
    run_log, trace_row, CompareStats, RunEcho, Summary, SweepAnalytic, SweepRow, SWEEP_HEADER,
    TRACE_HEADER,
};
use crate::vectors;

/// Norm drift beyond this aborts a run with the numeric-guard exit code.
pub const NORM_DRIFT_GUARD: f64 = 1e-8;

/// Emitted probabilities must lie in [-slack, 1 + slack].
pub const PROBABILITY_SLACK: f64 = 1e-10;

/// Top-level failure of a run, mapped onto the process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Invalid configuration or invalid request for it. Exit code 1.
    Config(ConfigErrors),
    /// A numeric guard tripped (norm drift, probability range). Exit code 2.
    NumericGuard { message: String },
    /// Filesystem failure. Exit code 3.
    Io { path: PathBuf, message: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::NumericGuard { .. } => 2,
            CliError::Io { .. } => 3,
        }
    }

    fn config_message(message: String) -> Self {
        CliError::Config(ConfigErrors(vec![ConfigIssue {
            line: 0,
            message,
        }]))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(errors) => write!(f, "{errors}"),
            CliError::NumericGuard { message } => write!(f, "numeric guard: {message}"),
            CliError::Io { path, message } => write!(f, "{}: {message}", path.display()),
        }
    }
}

impl std::error::Error for CliError {}

/// The five pipelines behind the subcommands.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Simulate,
    Analyze,
    Compare,
    Sweep,
    Strategy,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Analyze => "analyze",
            Command::Compare => "compare",
            Command::Sweep => "sweep",
            Command::Strategy => "strategy",
        }
    }
}

/// Command-line overrides applied on top of the configuration file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
    pub t_end: Option<u64>,
    /// Replaces the seeds of seeded sources: eta receives the value, the
    /// initial state receives the value plus one.
    pub seed: Option<u64>,
}

/// A configuration realized into concrete vectors and parameters.
pub struct Experiment {
    pub params: AlgorithmParams,
    pub state0: QuantumState,
    pub qubits: Option<u32>,
    pub t_end: u64,
    pub strategy_t1: f64,
    pub seed_label: Option<u64>,
    pub eta_text: String,
    pub init_text: String,
}

fn core_issue(err: impl fmt::Display) -> ConfigErrors {
    ConfigErrors(vec![ConfigIssue {
        line: 0,
        message: err.to_string(),
    }])
}

fn apply_seed_override(config: &ExperimentConfig, seed: Option<u64>) -> ExperimentConfig {
    let mut config = config.clone();
    if let Some(seed) = seed {
        if let EtaSource::Random { seed: s } = &mut config.eta {
            *s = seed;
        }
        if let InitSource::Random { seed: s } = &mut config.init {
            *s = seed + 1;
        }
    }
    config
}

/// Turns a validated configuration into concrete inputs, loading any
/// referenced files.
pub fn realize(
    config: &ExperimentConfig,
    overrides: &Overrides,
) -> Result<Experiment, ConfigErrors> {
    let config = apply_seed_override(config, overrides.seed);
    let dim = config.dimension();

    let eta = match &config.eta {
        EtaSource::Hadamard => {
            EtaVector::hadamard(dim.trailing_zeros()).map_err(core_issue)?
        }
        EtaSource::VectorFile(path) => {
            let entries = vectors::load_vector(&config.resolve(path), dim)?;
            EtaVector::from_vector(entries).map_err(core_issue)?
        }
        EtaSource::UnitaryFile { path, column } => {
            let matrix = vectors::load_unitary(&config.resolve(path), dim)?;
            EtaVector::from_unitary(&matrix, *column).map_err(core_issue)?
        }
        EtaSource::Random { seed } => EtaVector::random(*seed, dim).map_err(core_issue)?,
    };

    let state0 = match &config.init {
        InitSource::EtaImage => eta.as_state(),
        InitSource::Uniform => QuantumState::uniform(dim).map_err(core_issue)?,
        InitSource::Random { seed } => random_state(*seed, dim).map_err(core_issue)?,
        InitSource::VectorFile(path) => {
            let entries = vectors::load_vector(&config.resolve(path), dim)?;
            QuantumState::new(entries).map_err(core_issue)?
        }
    };

    let marked = match &config.marked {
        MarkedSpec::Indices(indices) => MarkedSet::new(indices.iter().copied()),
        MarkedSpec::First(r) => MarkedSet::first(*r),
    }
    .map_err(core_issue)?;

    let params =
        AlgorithmParams::new(config.beta, config.gamma, eta, marked).map_err(core_issue)?;

    let seed_label = overrides.seed.or(match &config.eta {
        EtaSource::Random { seed } => Some(*seed),
        _ => None,
    });

    Ok(Experiment {
        qubits: config.dimension.qubits(),
        t_end: overrides.t_end.unwrap_or(config.t_end),
        strategy_t1: config.strategy_t1,
        seed_label,
        eta_text: config.eta_text(),
        init_text: config.init_text(),
        params,
        state0,
    })
}

/// Every analytic artifact computable for one experiment, with notes about
/// the parts that are unavailable and why.
pub struct AnalyticBundle {
    pub moments: MomentSummary,
    pub matrix: EvolutionMatrix,
    pub eigen: EigenStructure,
    pub regime: Regime,
    pub coefficients: Option<SolutionCoefficients>,
    pub profile: Option<OscillationProfile>,
    pub plan: Option<MeasurementPlan>,
    pub bounds: Option<MeanBoundReport>,
    pub notes: Vec<String>,
}

/// Runs the full analytic pipeline; never fails, parts degrade into notes.
pub fn analyze_experiment(experiment: &Experiment) -> AnalyticBundle {
    let params = &experiment.params;
    let moments = compute_moments(&experiment.state0, params.eta(), params.marked())
        .expect("dimensions are consistent after realization");
    let matrix = evolution_matrix(
        params.beta(),
        params.gamma(),
        moments.marked_weight,
        moments.unmarked_weight,
    );
    let eigen = eigen_decompose(
        &matrix,
        params.beta(),
        params.gamma(),
        moments.marked_weight,
        moments.unmarked_weight,
    );
    let regime = classify_regime(params.beta(), params.gamma(), moments.marked_weight);
    let mut notes = Vec::new();

    let coefficients = match solve_coefficients(&moments, &matrix, &eigen) {
        Ok(c) => Some(c),
        Err(e) => {
            notes.push(format!("closed form unavailable: {e}"));
            None
        }
    };
    let profile = coefficients.as_ref().and_then(|c| {
        match oscillation_profile(c, &eigen, &moments) {
            Ok(p) => Some(p),
            Err(e) => {
                notes.push(format!("oscillation profile unavailable: {e}"));
                None
            }
        }
    });
    let plan = profile.as_ref().map(|p| optimal_time(p, regime));
    let bounds = match initial_mean_bounds(&moments, params.marked().count()) {
        Ok(b) => Some(b),
        Err(e) => {
            notes.push(format!("initial-mean bounds unavailable: {e}"));
            None
        }
    };

    AnalyticBundle {
        moments,
        matrix,
        eigen,
        regime,
        coefficients,
        profile,
        plan,
        bounds,
        notes,
    }
}

fn build_summary(
    experiment: &Experiment,
    bundle: &AnalyticBundle,
    strategy: Option<TwoPointPlan>,
    compare: Option<CompareStats>,
) -> Summary {
    Summary {
        echo: RunEcho {
            qubits: experiment.qubits,
            dimension: experiment.params.dim(),
            marked: experiment.params.marked().indices().to_vec(),
            beta: experiment.params.beta(),
            gamma: experiment.params.gamma(),
            eta: experiment.eta_text.clone(),
            init: experiment.init_text.clone(),
            t_end: experiment.t_end,
            regime: bundle.regime,
        },
        moments: bundle.moments.clone(),
        matrix: bundle.matrix,
        eigen: bundle.eigen,
        profile: bundle.profile,
        plan: bundle.plan,
        strategy,
        bounds: bundle.bounds,
        compare,
    }
}

fn write_file(out_dir: &Path, name: &str, content: &str) -> Result<(), CliError> {
    let path = out_dir.join(name);
    fs::write(&path, content).map_err(|e| CliError::Io {
        path,
        message: e.to_string(),
    })
}

fn check_probability(p: f64, what: &str, t: u64) -> Result<(), CliError> {
    if !((-PROBABILITY_SLACK)..=1.0 + PROBABILITY_SLACK).contains(&p) {
        return Err(CliError::NumericGuard {
            message: format!("{what} = {p:.17e} out of [0, 1] at t = {t}"),
        });
    }
    Ok(())
}

struct TraceOutcome {
    stats: CompareStats,
    notes: Vec<String>,
}

/// Streams the simulated trajectory to `trace.csv`, filling the analytic
/// column from the best available route: the closed-form sinusoid, the
/// matrix-power means, or (with a note) a mirror of the simulated value.
fn run_trace(
    experiment: &Experiment,
    bundle: &AnalyticBundle,
    out_dir: &Path,
    with_amplitude_check: bool,
) -> Result<TraceOutcome, CliError> {
    let params = &experiment.params;
    let path = out_dir.join("trace.csv");
    let file = fs::File::create(&path).map_err(|e| CliError::Io {
        path: path.clone(),
        message: e.to_string(),
    })?;
    let mut writer = std::io::BufWriter::new(file);
    let io_fail = |e: std::io::Error| CliError::Io {
        path: path.clone(),
        message: e.to_string(),
    };

    let mut notes = Vec::new();
    // Matrix-power route: the class means stepped one iteration at a time.
    let mut power_means = bundle.moments.means().ok();
    let deviations = match compute_deviations(
        &experiment.state0,
        params.eta(),
        params.marked(),
        &bundle.moments,
    ) {
        Ok(table) => Some(table),
        Err(_) => None,
    };
    match (&bundle.profile, power_means.is_some()) {
        (Some(_), _) => notes.push("analytic route: closed-form sinusoid".to_string()),
        (None, true) => notes.push("analytic route: matrix-power means".to_string()),
        (None, false) => notes.push(
            "analytic route unavailable (undefined class means); analytic column mirrors the \
             simulation"
                .to_string(),
        ),
    }

    writer
        .write_all(TRACE_HEADER.as_bytes())
        .and_then(|_| writer.write_all(b"\n"))
        .map_err(io_fail)?;

    let mut stats = CompareStats {
        max_abs_err: 0.0,
        max_amp_err: 0.0,
        max_norm_drift: 0.0,
    };
    let mut state = experiment.state0.clone();
    let mut t = 0u64;
    let outcome = loop {
        let p_sim = marked_probability(&state, params.marked());
        let drift = state.norm_drift();
        if drift > NORM_DRIFT_GUARD {
            break Err(CliError::NumericGuard {
                message: format!(
                    "norm drift {drift:.3e} at t = {t} exceeds {NORM_DRIFT_GUARD:.0e}"
                ),
            });
        }
        let analytic_mean = match (&bundle.coefficients, &power_means) {
            (Some(coeffs), _) => Some(means_at(coeffs, &bundle.eigen, t)),
            (None, Some(means)) => Some(*means),
            (None, None) => None,
        };
        let p_analytic = match (&bundle.profile, &analytic_mean) {
            (Some(profile), _) => probability_at(profile, t as f64),
            (None, Some((marked_mean, _))) => {
                bundle.moments.marked_weight
                    * (bundle.moments.marked_variance + marked_mean.norm_sqr())
                    + bundle.moments.frozen_marked_prob
            }
            (None, None) => p_sim,
        };
        if let Err(e) = check_probability(p_sim, "simulated probability", t)
            .and_then(|_| check_probability(p_analytic, "analytic probability", t))
        {
            break Err(e);
        }
        stats.max_abs_err = stats.max_abs_err.max((p_sim - p_analytic).abs());
        stats.max_norm_drift = stats.max_norm_drift.max(drift);

        if with_amplitude_check {
            if let (Some(table), Some((marked_mean, unmarked_mean))) =
                (&deviations, &analytic_mean)
            {
                let rebuilt = reconstruct_state(
                    *marked_mean,
                    *unmarked_mean,
                    table,
                    params.eta(),
                    params.gamma(),
                    t,
                );
                let worst = rebuilt
                    .amplitudes()
                    .iter()
                    .zip(state.amplitudes())
                    .map(|(a, b)| (a - b).norm())
                    .fold(0.0f64, f64::max);
                stats.max_amp_err = stats.max_amp_err.max(worst);
            }
        }

        if let Err(e) = writer
            .write_all(trace_row(t, p_sim, p_analytic, drift).as_bytes())
            .map_err(io_fail)
        {
            break Err(e);
        }

        if t == experiment.t_end {
            break Ok(());
        }
        state = grover_step(&state, params);
        if let Some(means) = power_means {
            power_means = Some(bundle.matrix.apply(means));
        }
        t += 1;
    };
    if let Err(e) = outcome {
        drop(writer);
        fs::remove_file(&path).ok();
        return Err(e);
    }
    writer.flush().map_err(io_fail)?;
    Ok(TraceOutcome { stats, notes })
}

fn sweep_points(base: &ExperimentConfig) -> Result<Vec<(ExperimentConfig, Option<u64>)>, ConfigErrors> {
    let axes = &base.sweep;
    let ns: Vec<Option<u32>> = if axes.n.is_empty() {
        vec![None]
    } else {
        axes.n.iter().map(|&n| Some(n)).collect()
    };
    let rs: Vec<Option<usize>> = if axes.r.is_empty() {
        vec![None]
    } else {
        axes.r.iter().map(|&r| Some(r)).collect()
    };
    let betas: Vec<Option<f64>> = if axes.beta.is_empty() {
        vec![None]
    } else {
        axes.beta.iter().map(|&b| Some(b)).collect()
    };
    let gammas: Vec<Option<f64>> = if axes.gamma.is_empty() {
        vec![None]
    } else {
        axes.gamma.iter().map(|&g| Some(g)).collect()
    };
    let seeds: Vec<Option<u64>> = if axes.seed.is_empty() {
        vec![None]
    } else {
        axes.seed.iter().map(|&s| Some(s)).collect()
    };

    let mut points = Vec::new();
    let mut issues = Vec::new();
    for &n in &ns {
        for &r in &rs {
            for &beta in &betas {
                for &gamma in &gammas {
                    for &seed in &seeds {
                        let mut point = base.clone();
                        point.sweep = Default::default();
                        if let Some(n) = n {
                            point.dimension = DimensionSpec::Qubits(n);
                        }
                        if let Some(r) = r {
                            point.marked = MarkedSpec::First(r);
                        }
                        if let Some(beta) = beta {
                            point.beta = beta;
                        }
                        if let Some(gamma) = gamma {
                            point.gamma = gamma;
                        }
                        let point = apply_seed_override(&point, seed);
                        let dim = point.dimension();
                        let max_index = match &point.marked {
                            MarkedSpec::Indices(v) => v.iter().max().copied().unwrap_or(0),
                            MarkedSpec::First(r) => r.saturating_sub(1),
                        };
                        if max_index >= dim {
                            issues.push(ConfigIssue {
                                line: 0,
                                message: format!(
                                    "sweep point (dimension {dim}): marked states exceed the register"
                                ),
                            });
                            continue;
                        }
                        points.push((point, seed));
                    }
                }
            }
        }
    }
    if issues.is_empty() {
        Ok(points)
    } else {
        Err(ConfigErrors(issues))
    }
}

fn sweep_row(
    point: &ExperimentConfig,
    seed: Option<u64>,
    overrides: &Overrides,
) -> Result<SweepRow, CliError> {
    // Per-point seeds were already applied during expansion.
    let point_overrides = Overrides {
        out: None,
        workers: None,
        t_end: overrides.t_end,
        seed: None,
    };
    let experiment = realize(point, &point_overrides).map_err(CliError::Config)?;
    let bundle = analyze_experiment(&experiment);
    let analytic = bundle.plan.as_ref().zip(bundle.profile.as_ref()).map(
        |(plan, profile)| SweepAnalytic {
            omega: profile.omega,
            phi: profile.phase,
            p_av: profile.average,
            delta_p: profile.amplitude,
            t_real: plan.time,
            t_int: plan.step,
            p_at_t: plan.probability_at_step,
            p_max: plan.peak_probability,
        },
    );
    Ok(SweepRow {
        qubits: experiment.qubits,
        dimension: experiment.params.dim(),
        marked_count: experiment.params.marked().count(),
        beta: experiment.params.beta(),
        gamma: experiment.params.gamma(),
        seed: seed.or(experiment.seed_label),
        w_marked: bundle.moments.marked_weight,
        w_unmarked: bundle.moments.unmarked_weight,
        analytic,
        regime: bundle.regime,
    })
}

/// Runs `command` for the configuration at `config_path` and writes the
/// output files. Returns the output directory.
pub fn execute(
    command: Command,
    config_path: &Path,
    overrides: &Overrides,
) -> Result<PathBuf, CliError> {
    let config = ExperimentConfig::load(config_path).map_err(CliError::Config)?;
    let out_dir = overrides
        .out
        .clone()
        .or_else(|| config.out.as_ref().map(|o| config.resolve(o)))
        .unwrap_or_else(|| PathBuf::from("out"));
    fs::create_dir_all(&out_dir).map_err(|e| CliError::Io {
        path: out_dir.clone(),
        message: e.to_string(),
    })?;
    write_file(&out_dir, "config.txt", &config.canonical_text())?;

    let mut warnings: Vec<String> = Vec::new();
    let mut notes: Vec<String> = Vec::new();
    if !config.sweep.is_empty() && command != Command::Sweep {
        notes.push("sweep axes present but ignored by this command".to_string());
    }

    match command {
        Command::Sweep => {
            // A command-line seed override applies to every point unless the
            // seed axis replaces it.
            let base = apply_seed_override(&config, overrides.seed);
            let points = sweep_points(&base).map_err(CliError::Config)?;
            let workers = overrides.workers.or(config.workers);
            let compute = || -> Result<Vec<SweepRow>, CliError> {
                points
                    .par_iter()
                    .map(|(point, seed)| sweep_row(point, *seed, overrides))
                    .collect()
            };
            let rows = match workers {
                Some(w) => rayon::ThreadPoolBuilder::new()
                    .num_threads(w)
                    .build()
                    .map_err(|e| CliError::config_message(format!("worker pool: {e}")))?
                    .install(compute),
                None => compute(),
            }?;
            let mut csv = String::from(SWEEP_HEADER);
            csv.push('\n');
            for row in &rows {
                csv.push_str(&row.to_csv());
            }
            write_file(&out_dir, "sweep.csv", &csv)?;
            notes.push(format!("sweep points: {}", rows.len()));
        }
        Command::Simulate | Command::Compare | Command::Analyze | Command::Strategy => {
            let experiment = realize(&config, overrides).map_err(CliError::Config)?;
            warnings.extend(experiment.params.warnings());
            let bundle = analyze_experiment(&experiment);
            notes.extend(bundle.notes.clone());

            let mut strategy_plan = None;
            let mut compare_stats = None;
            let mut needs_trace = matches!(command, Command::Simulate | Command::Compare);

            match command {
                Command::Analyze => {
                    if bundle.profile.is_none() {
                        warnings.push(
                            "analytic profile unavailable; falling back to simulation".to_string(),
                        );
                        needs_trace = true;
                    }
                }
                Command::Strategy => {
                    if bundle.regime != Regime::EqualAngles {
                        return Err(CliError::config_message(format!(
                            "strategy requires the equal-angles regime, got {} \
                             (beta and gamma must agree)",
                            bundle.regime
                        )));
                    }
                    match &bundle.profile {
                        Some(profile) => {
                            let plan = two_point_strategy(
                                profile,
                                bundle.regime,
                                experiment.strategy_t1,
                            )
                            .map_err(|e| CliError::config_message(e.to_string()))?;
                            strategy_plan = Some(plan);
                        }
                        None => {
                            warnings.push(
                                "analytic profile unavailable; falling back to simulation"
                                    .to_string(),
                            );
                            needs_trace = true;
                        }
                    }
                }
                _ => {}
            }

            if needs_trace {
                let outcome = run_trace(
                    &experiment,
                    &bundle,
                    &out_dir,
                    command == Command::Compare,
                )?;
                notes.extend(outcome.notes);
                if command == Command::Compare {
                    compare_stats = Some(outcome.stats);
                }
            }

            let summary = build_summary(&experiment, &bundle, strategy_plan, compare_stats);
            write_file(&out_dir, "summary.txt", &summary.serialize())?;
        }
    }

    write_file(&out_dir, "run.log", &run_log(command.name(), &warnings, &notes))?;
    Ok(out_dir)
}
