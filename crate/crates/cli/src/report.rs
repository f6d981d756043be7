//! Output artifacts: the summary text format (with a byte-exact round trip),
//! the trace CSV and the sweep CSV.
//!
//! All floating-point values are serialized at 17 significant digits, which
//! reproduces the underlying doubles exactly. Complex numbers appear as
//! `re,im` pairs. Rows are in ascending time order, lines end with LF, and
//! nothing in a data file depends on when or where a run happened.

use num_complex::Complex64;

use gqsearch_core::{
    EigenStructure, EvolutionMatrix, MeanBoundReport, MeasurementPlan, MomentSummary,
    OscillationProfile, Regime, TwoPointPlan,
};

pub const TRACE_HEADER: &str = "t,P_marked_sim,P_marked_analytic,abs_err,norm_drift";
pub const SWEEP_HEADER: &str =
    "n,N,r,beta,gamma,seed,w_marked,w_unmarked,omega,phi,p_av,delta_p,t_real,t_int,p_at_t,p_max,regime";

fn fmt_f(v: f64) -> String {
    format!("{v:.16e}")
}

fn fmt_c(v: Complex64) -> String {
    format!("{:.16e},{:.16e}", v.re, v.im)
}

fn parse_f(text: &str) -> Result<f64, String> {
    text.parse::<f64>()
        .map_err(|_| format!("cannot parse number `{text}`"))
}

fn parse_c(text: &str) -> Result<Complex64, String> {
    let (re, im) = text
        .split_once(',')
        .ok_or_else(|| format!("cannot parse complex `{text}`"))?;
    Ok(Complex64::new(parse_f(re)?, parse_f(im)?))
}

fn parse_bool(text: &str) -> Result<bool, String> {
    match text {
        "true" => Ok(true),
        "false" => Ok(false),
        other => Err(format!("cannot parse boolean `{other}`")),
    }
}

/// Echo of the experiment a summary belongs to.
#[derive(Debug, Clone, PartialEq)]
pub struct RunEcho {
    pub qubits: Option<u32>,
    pub dimension: usize,
    pub marked: Vec<usize>,
    pub beta: f64,
    pub gamma: f64,
    pub eta: String,
    pub init: String,
    pub t_end: u64,
    pub regime: Regime,
}

/// Headline numbers of a compare run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompareStats {
    pub max_abs_err: f64,
    pub max_amp_err: f64,
    pub max_norm_drift: f64,
}

/// Everything a run knows about one experiment, in a form that serializes
/// to the summary file and parses back without loss.
#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub echo: RunEcho,
    pub moments: MomentSummary,
    pub matrix: EvolutionMatrix,
    pub eigen: EigenStructure,
    pub profile: Option<OscillationProfile>,
    pub plan: Option<MeasurementPlan>,
    pub strategy: Option<TwoPointPlan>,
    pub bounds: Option<MeanBoundReport>,
    pub compare: Option<CompareStats>,
}

impl Summary {
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        let echo = &self.echo;
        out.push_str("[config]\n");
        if let Some(n) = echo.qubits {
            out.push_str(&format!("n = {n}\n"));
        }
        out.push_str(&format!("N = {}\n", echo.dimension));
        out.push_str(&format!("r = {}\n", echo.marked.len()));
        let list = echo
            .marked
            .iter()
            .map(|i| i.to_string())
            .collect::<Vec<_>>()
            .join(",");
        out.push_str(&format!("marked = [{list}]\n"));
        out.push_str(&format!("beta = {}\n", fmt_f(echo.beta)));
        out.push_str(&format!("gamma = {}\n", fmt_f(echo.gamma)));
        out.push_str(&format!("eta = {}\n", echo.eta));
        out.push_str(&format!("init = {}\n", echo.init));
        out.push_str(&format!("t_end = {}\n", echo.t_end));
        out.push_str(&format!("regime = {}\n", echo.regime));

        out.push_str("[weights]\n");
        out.push_str(&format!("w_marked = {}\n", fmt_f(self.moments.marked_weight)));
        out.push_str(&format!(
            "w_unmarked = {}\n",
            fmt_f(self.moments.unmarked_weight)
        ));

        out.push_str("[moments]\n");
        let mean_line = |mean: Option<Complex64>| match mean {
            Some(m) => fmt_c(m),
            None => "undefined".to_string(),
        };
        out.push_str(&format!(
            "marked_mean = {}\n",
            mean_line(self.moments.marked_mean)
        ));
        out.push_str(&format!(
            "unmarked_mean = {}\n",
            mean_line(self.moments.unmarked_mean)
        ));
        out.push_str(&format!(
            "marked_variance = {}\n",
            fmt_f(self.moments.marked_variance)
        ));
        out.push_str(&format!(
            "unmarked_variance = {}\n",
            fmt_f(self.moments.unmarked_variance)
        ));
        out.push_str(&format!(
            "frozen_marked_prob = {}\n",
            fmt_f(self.moments.frozen_marked_prob)
        ));
        out.push_str(&format!(
            "frozen_unmarked_prob = {}\n",
            fmt_f(self.moments.frozen_unmarked_prob)
        ));

        out.push_str("[matrix]\n");
        out.push_str(&format!("a = {}\n", fmt_c(self.matrix.a)));
        out.push_str(&format!("b = {}\n", fmt_c(self.matrix.b)));
        out.push_str(&format!("c = {}\n", fmt_c(self.matrix.c)));
        out.push_str(&format!("d = {}\n", fmt_c(self.matrix.d)));

        out.push_str("[eigen]\n");
        out.push_str(&format!("lambda_plus = {}\n", fmt_c(self.eigen.lambda_plus)));
        out.push_str(&format!(
            "lambda_minus = {}\n",
            fmt_c(self.eigen.lambda_minus)
        ));
        out.push_str(&format!("omega_plus = {}\n", fmt_f(self.eigen.omega_plus)));
        out.push_str(&format!("omega_minus = {}\n", fmt_f(self.eigen.omega_minus)));
        out.push_str(&format!("omega = {}\n", fmt_f(self.eigen.omega)));
        out.push_str(&format!("degenerate = {}\n", self.eigen.degenerate));

        if let Some(profile) = &self.profile {
            out.push_str("[profile]\n");
            out.push_str(&format!("p_av = {}\n", fmt_f(profile.average)));
            out.push_str(&format!("delta_p = {}\n", fmt_f(profile.amplitude)));
            out.push_str(&format!("omega = {}\n", fmt_f(profile.omega)));
            out.push_str(&format!("phi = {}\n", fmt_f(profile.phase)));
            out.push_str(&format!(
                "frozen_marked_prob = {}\n",
                fmt_f(profile.frozen_marked_prob)
            ));
        }

        if let Some(plan) = &self.plan {
            out.push_str("[plan]\n");
            out.push_str(&format!("t_real = {}\n", fmt_f(plan.time)));
            out.push_str(&format!("t_int = {}\n", plan.step));
            out.push_str(&format!("p_at_t = {}\n", fmt_f(plan.probability_at_step)));
            out.push_str(&format!("p_floor = {}\n", fmt_f(plan.probability_at_floor)));
            out.push_str(&format!("p_ceil = {}\n", fmt_f(plan.probability_at_ceil)));
            out.push_str(&format!("p_max = {}\n", fmt_f(plan.peak_probability)));
            out.push_str(&format!(
                "discreteness_loss = {}\n",
                fmt_f(plan.discreteness_loss)
            ));
        }

        if let Some(strategy) = &self.strategy {
            out.push_str("[strategy]\n");
            out.push_str(&format!("t1 = {}\n", fmt_f(strategy.t1)));
            out.push_str(&format!("t2 = {}\n", fmt_f(strategy.t2)));
            out.push_str(&format!("p1 = {}\n", fmt_f(strategy.p1)));
            out.push_str(&format!("p2 = {}\n", fmt_f(strategy.p2)));
            out.push_str(&format!("t1_int = {}\n", strategy.t1_step));
            out.push_str(&format!("t2_int = {}\n", strategy.t2_step));
            out.push_str(&format!("p1_int = {}\n", fmt_f(strategy.p1_step)));
            out.push_str(&format!("p2_int = {}\n", fmt_f(strategy.p2_step)));
            out.push_str(&format!("guarantee_ok = {}\n", strategy.guarantee_ok));
            out.push_str(&format!(
                "discreteness_loss = {}\n",
                fmt_f(strategy.discreteness_loss)
            ));
        }

        if let Some(bounds) = &self.bounds {
            out.push_str("[bounds]\n");
            out.push_str(&format!(
                "marked_mean_abs = {}\n",
                fmt_f(bounds.marked_mean_abs)
            ));
            out.push_str(&format!("marked_bound = {}\n", fmt_f(bounds.marked_bound)));
            out.push_str(&format!("marked_ok = {}\n", bounds.marked_ok));
            out.push_str(&format!(
                "unmarked_mean_abs = {}\n",
                fmt_f(bounds.unmarked_mean_abs)
            ));
            out.push_str(&format!(
                "unmarked_bound = {}\n",
                fmt_f(bounds.unmarked_bound)
            ));
            out.push_str(&format!("unmarked_ok = {}\n", bounds.unmarked_ok));
        }

        if let Some(compare) = &self.compare {
            out.push_str("[compare]\n");
            out.push_str(&format!("max_abs_err = {}\n", fmt_f(compare.max_abs_err)));
            out.push_str(&format!("max_amp_err = {}\n", fmt_f(compare.max_amp_err)));
            out.push_str(&format!(
                "max_norm_drift = {}\n",
                fmt_f(compare.max_norm_drift)
            ));
        }

        out
    }

    /// Parses a serialized summary. Only text produced by [`serialize`] is
    /// supported; the two functions are inverse up to byte identity.
    ///
    /// [`serialize`]: Summary::serialize
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut sections: Vec<(String, Vec<(String, String)>)> = Vec::new();
        for raw_line in text.lines() {
            let line = raw_line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                sections.push((name.to_string(), Vec::new()));
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("expected `key = value`, got `{line}`"))?;
            let section = sections
                .last_mut()
                .ok_or_else(|| format!("`{line}` appears before any section"))?;
            section
                .1
                .push((key.trim().to_string(), value.trim().to_string()));
        }

        let section = |name: &str| -> Option<&Vec<(String, String)>> {
            sections.iter().find(|(n, _)| n == name).map(|(_, kv)| kv)
        };
        let field = |kv: &Vec<(String, String)>, key: &str| -> Result<String, String> {
            kv.iter()
                .find(|(k, _)| k == key)
                .map(|(_, v)| v.clone())
                .ok_or_else(|| format!("missing key `{key}`"))
        };

        let config = section("config").ok_or("missing [config] section")?;
        let qubits = config
            .iter()
            .find(|(k, _)| k == "n")
            .map(|(_, v)| v.parse::<u32>().map_err(|_| "bad qubit count".to_string()))
            .transpose()?;
        let marked_text = field(config, "marked")?;
        let marked_inner = marked_text
            .strip_prefix('[')
            .and_then(|v| v.strip_suffix(']'))
            .ok_or("bad marked list")?;
        let marked: Vec<usize> = marked_inner
            .split(',')
            .filter(|t| !t.trim().is_empty())
            .map(|t| t.trim().parse::<usize>().map_err(|_| "bad marked index".to_string()))
            .collect::<Result<_, _>>()?;
        let echo = RunEcho {
            qubits,
            dimension: field(config, "N")?.parse().map_err(|_| "bad dimension")?,
            marked,
            beta: parse_f(&field(config, "beta")?)?,
            gamma: parse_f(&field(config, "gamma")?)?,
            eta: field(config, "eta")?,
            init: field(config, "init")?,
            t_end: field(config, "t_end")?.parse().map_err(|_| "bad t_end")?,
            regime: field(config, "regime")?.parse()?,
        };

        let weights = section("weights").ok_or("missing [weights] section")?;
        let moments_kv = section("moments").ok_or("missing [moments] section")?;
        let mean = |key: &str| -> Result<Option<Complex64>, String> {
            let text = field(moments_kv, key)?;
            if text == "undefined" {
                Ok(None)
            } else {
                Ok(Some(parse_c(&text)?))
            }
        };
        let moments = MomentSummary {
            marked_weight: parse_f(&field(weights, "w_marked")?)?,
            unmarked_weight: parse_f(&field(weights, "w_unmarked")?)?,
            marked_mean: mean("marked_mean")?,
            unmarked_mean: mean("unmarked_mean")?,
            marked_variance: parse_f(&field(moments_kv, "marked_variance")?)?,
            unmarked_variance: parse_f(&field(moments_kv, "unmarked_variance")?)?,
            frozen_marked_prob: parse_f(&field(moments_kv, "frozen_marked_prob")?)?,
            frozen_unmarked_prob: parse_f(&field(moments_kv, "frozen_unmarked_prob")?)?,
        };

        let matrix_kv = section("matrix").ok_or("missing [matrix] section")?;
        let matrix = EvolutionMatrix {
            a: parse_c(&field(matrix_kv, "a")?)?,
            b: parse_c(&field(matrix_kv, "b")?)?,
            c: parse_c(&field(matrix_kv, "c")?)?,
            d: parse_c(&field(matrix_kv, "d")?)?,
        };

        let eigen_kv = section("eigen").ok_or("missing [eigen] section")?;
        let eigen = EigenStructure {
            lambda_plus: parse_c(&field(eigen_kv, "lambda_plus")?)?,
            lambda_minus: parse_c(&field(eigen_kv, "lambda_minus")?)?,
            omega_plus: parse_f(&field(eigen_kv, "omega_plus")?)?,
            omega_minus: parse_f(&field(eigen_kv, "omega_minus")?)?,
            omega: parse_f(&field(eigen_kv, "omega")?)?,
            degenerate: parse_bool(&field(eigen_kv, "degenerate")?)?,
        };

        let profile = section("profile")
            .map(|kv| -> Result<OscillationProfile, String> {
                Ok(OscillationProfile {
                    average: parse_f(&field(kv, "p_av")?)?,
                    amplitude: parse_f(&field(kv, "delta_p")?)?,
                    omega: parse_f(&field(kv, "omega")?)?,
                    phase: parse_f(&field(kv, "phi")?)?,
                    frozen_marked_prob: parse_f(&field(kv, "frozen_marked_prob")?)?,
                    marked_weight: moments.marked_weight,
                    marked_variance: moments.marked_variance,
                })
            })
            .transpose()?;

        let plan = section("plan")
            .map(|kv| -> Result<MeasurementPlan, String> {
                Ok(MeasurementPlan {
                    time: parse_f(&field(kv, "t_real")?)?,
                    step: field(kv, "t_int")?.parse().map_err(|_| "bad t_int")?,
                    probability_at_step: parse_f(&field(kv, "p_at_t")?)?,
                    probability_at_floor: parse_f(&field(kv, "p_floor")?)?,
                    probability_at_ceil: parse_f(&field(kv, "p_ceil")?)?,
                    peak_probability: parse_f(&field(kv, "p_max")?)?,
                    discreteness_loss: parse_f(&field(kv, "discreteness_loss")?)?,
                    regime: echo.regime,
                })
            })
            .transpose()?;

        let strategy = section("strategy")
            .map(|kv| -> Result<TwoPointPlan, String> {
                Ok(TwoPointPlan {
                    t1: parse_f(&field(kv, "t1")?)?,
                    t2: parse_f(&field(kv, "t2")?)?,
                    p1: parse_f(&field(kv, "p1")?)?,
                    p2: parse_f(&field(kv, "p2")?)?,
                    t1_step: field(kv, "t1_int")?.parse().map_err(|_| "bad t1_int")?,
                    t2_step: field(kv, "t2_int")?.parse().map_err(|_| "bad t2_int")?,
                    p1_step: parse_f(&field(kv, "p1_int")?)?,
                    p2_step: parse_f(&field(kv, "p2_int")?)?,
                    guarantee_ok: parse_bool(&field(kv, "guarantee_ok")?)?,
                    discreteness_loss: parse_f(&field(kv, "discreteness_loss")?)?,
                })
            })
            .transpose()?;

        let bounds = section("bounds")
            .map(|kv| -> Result<MeanBoundReport, String> {
                Ok(MeanBoundReport {
                    marked_mean_abs: parse_f(&field(kv, "marked_mean_abs")?)?,
                    marked_bound: parse_f(&field(kv, "marked_bound")?)?,
                    marked_ok: parse_bool(&field(kv, "marked_ok")?)?,
                    unmarked_mean_abs: parse_f(&field(kv, "unmarked_mean_abs")?)?,
                    unmarked_bound: parse_f(&field(kv, "unmarked_bound")?)?,
                    unmarked_ok: parse_bool(&field(kv, "unmarked_ok")?)?,
                })
            })
            .transpose()?;

        let compare = section("compare")
            .map(|kv| -> Result<CompareStats, String> {
                Ok(CompareStats {
                    max_abs_err: parse_f(&field(kv, "max_abs_err")?)?,
                    max_amp_err: parse_f(&field(kv, "max_amp_err")?)?,
                    max_norm_drift: parse_f(&field(kv, "max_norm_drift")?)?,
                })
            })
            .transpose()?;

        Ok(Summary {
            echo,
            moments,
            matrix,
            eigen,
            profile,
            plan,
            strategy,
            bounds,
            compare,
        })
    }
}

/// One data row of the trace CSV.
pub fn trace_row(t: u64, p_sim: f64, p_analytic: f64, norm_drift: f64) -> String {
    format!(
        "{t},{},{},{},{}\n",
        fmt_f(p_sim),
        fmt_f(p_analytic),
        fmt_f((p_sim - p_analytic).abs()),
        fmt_f(norm_drift)
    )
}

/// Analytic columns of one sweep row; absent when the closed form is
/// unavailable for that point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepAnalytic {
    pub omega: f64,
    pub phi: f64,
    pub p_av: f64,
    pub delta_p: f64,
    pub t_real: f64,
    pub t_int: u64,
    pub p_at_t: f64,
    pub p_max: f64,
}

/// One row of the sweep CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub qubits: Option<u32>,
    pub dimension: usize,
    pub marked_count: usize,
    pub beta: f64,
    pub gamma: f64,
    pub seed: Option<u64>,
    pub w_marked: f64,
    pub w_unmarked: f64,
    pub analytic: Option<SweepAnalytic>,
    pub regime: Regime,
}

impl SweepRow {
    pub fn to_csv(&self) -> String {
        let qubits = self.qubits.map_or(String::new(), |n| n.to_string());
        let seed = self.seed.map_or(String::new(), |s| s.to_string());
        let analytic = match &self.analytic {
            Some(a) => format!(
                "{},{},{},{},{},{},{},{}",
                fmt_f(a.omega),
                fmt_f(a.phi),
                fmt_f(a.p_av),
                fmt_f(a.delta_p),
                fmt_f(a.t_real),
                a.t_int,
                fmt_f(a.p_at_t),
                fmt_f(a.p_max)
            ),
            None => ",,,,,,,".to_string(),
        };
        format!(
            "{qubits},{},{},{},{},{seed},{},{},{analytic},{}\n",
            self.dimension,
            self.marked_count,
            fmt_f(self.beta),
            fmt_f(self.gamma),
            fmt_f(self.w_marked),
            fmt_f(self.w_unmarked),
            self.regime
        )
    }
}

/// Deterministic run log: command, warnings and notes. Never timestamps.
pub fn run_log(command: &str, warnings: &[String], notes: &[String]) -> String {
    let mut out = format!("command = {command}\n");
    for w in warnings {
        out.push_str(&format!("warning: {w}\n"));
    }
    for n in notes {
        out.push_str(&format!("note: {n}\n"));
    }
    out
}
