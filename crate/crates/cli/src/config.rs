//! Line-oriented experiment configuration: parsing with full error
//! collection, semantic validation and canonical re-serialization.
//!
//! The format is `key = value` lines grouped under `[experiment]` and
//! `[sweep]` section headers; `#` starts a comment. Keys appearing before
//! any header belong to `[experiment]`. Angles accept decimal radians or the
//! literal tokens `pi`, `pi/2`, `pi/3`, `pi/4`.

use std::f64::consts::PI;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

/// Hard cap on the register dimension (memory guard).
pub const MAX_DIMENSION: usize = 1 << 24;

/// One problem found while parsing or validating a configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigIssue {
    /// 1-based line number; 0 for file-level issues.
    pub line: usize,
    pub message: String,
}

impl ConfigIssue {
    fn file_level(message: impl Into<String>) -> Self {
        Self {
            line: 0,
            message: message.into(),
        }
    }

    fn at(line: usize, message: impl Into<String>) -> Self {
        Self {
            line,
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line == 0 {
            write!(f, "config: {}", self.message)
        } else {
            write!(f, "line {}: {}", self.line, self.message)
        }
    }
}

/// Every problem found in one pass; parsing never stops at the first error.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigErrors(pub Vec<ConfigIssue>);

impl fmt::Display for ConfigErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, issue) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{issue}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigErrors {}

/// Register size: either a qubit count (dimension `2^n`) or a direct
/// dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DimensionSpec {
    Qubits(u32),
    States(usize),
}

impl DimensionSpec {
    pub fn dimension(&self) -> usize {
        match *self {
            DimensionSpec::Qubits(n) => 1usize << n,
            DimensionSpec::States(n) => n,
        }
    }

    pub fn qubits(&self) -> Option<u32> {
        match *self {
            DimensionSpec::Qubits(n) => Some(n),
            DimensionSpec::States(_) => None,
        }
    }
}

/// Marked states: explicit indices or the first `r` of the register.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MarkedSpec {
    Indices(Vec<usize>),
    First(usize),
}

impl MarkedSpec {
    pub fn count(&self) -> usize {
        match self {
            MarkedSpec::Indices(v) => v.len(),
            MarkedSpec::First(r) => *r,
        }
    }
}

/// Where the diffusion vector comes from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EtaSource {
    Hadamard,
    VectorFile(String),
    UnitaryFile { path: String, column: usize },
    Random { seed: u64 },
}

/// Where the initial state comes from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InitSource {
    EtaImage,
    VectorFile(String),
    Random { seed: u64 },
    Uniform,
}

/// Swept axes; an empty vector means the axis is not swept.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepAxes {
    pub n: Vec<u32>,
    pub r: Vec<usize>,
    pub beta: Vec<f64>,
    pub gamma: Vec<f64>,
    pub seed: Vec<u64>,
}

impl SweepAxes {
    pub fn is_empty(&self) -> bool {
        self.n.is_empty()
            && self.r.is_empty()
            && self.beta.is_empty()
            && self.gamma.is_empty()
            && self.seed.is_empty()
    }

    /// Product of the swept axis lengths.
    pub fn point_count(&self) -> usize {
        let len = |v: usize| if v == 0 { 1 } else { v };
        len(self.n.len())
            * len(self.r.len())
            * len(self.beta.len())
            * len(self.gamma.len())
            * len(self.seed.len())
    }
}

/// A fully validated experiment description.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub dimension: DimensionSpec,
    pub marked: MarkedSpec,
    pub beta: f64,
    pub gamma: f64,
    pub eta: EtaSource,
    pub init: InitSource,
    pub t_end: u64,
    /// First measurement time of the two-point strategy.
    pub strategy_t1: f64,
    pub out: Option<String>,
    pub workers: Option<usize>,
    pub sweep: SweepAxes,
    /// Directory that relative file references resolve against.
    pub base_dir: PathBuf,
}

impl ExperimentConfig {
    pub fn dimension(&self) -> usize {
        self.dimension.dimension()
    }

    /// Canonical one-line form of the eta source.
    pub fn eta_text(&self) -> String {
        eta_source_text(&self.eta)
    }

    /// Canonical one-line form of the init source.
    pub fn init_text(&self) -> String {
        init_source_text(&self.init)
    }

    pub fn resolve(&self, raw: &str) -> PathBuf {
        let path = Path::new(raw);
        if path.is_absolute() {
            path.to_path_buf()
        } else {
            self.base_dir.join(path)
        }
    }

    /// Reads and parses a configuration file; relative paths inside it
    /// resolve against the file's directory.
    pub fn load(path: &Path) -> Result<Self, ConfigErrors> {
        let text = fs::read_to_string(path).map_err(|e| {
            ConfigErrors(vec![ConfigIssue::file_level(format!(
                "cannot read {}: {e}",
                path.display()
            ))])
        })?;
        let base_dir = path
            .parent()
            .filter(|p| !p.as_os_str().is_empty())
            .map(Path::to_path_buf)
            .unwrap_or_else(|| PathBuf::from("."));
        parse_config(&text, &base_dir)
    }

    /// Canonical text form: fixed key order, decimal angles, expanded sweep
    /// lists. Parsing the canonical form reproduces the config, and
    /// re-serializing reproduces the bytes.
    pub fn canonical_text(&self) -> String {
        let mut out = String::new();
        out.push_str("[experiment]\n");
        match self.dimension {
            DimensionSpec::Qubits(n) => out.push_str(&format!("n = {n}\n")),
            DimensionSpec::States(n) => out.push_str(&format!("N = {n}\n")),
        }
        match &self.marked {
            MarkedSpec::Indices(v) => {
                let list = v
                    .iter()
                    .map(|i| i.to_string())
                    .collect::<Vec<_>>()
                    .join(",");
                out.push_str(&format!("marked = [{list}]\n"));
            }
            MarkedSpec::First(r) => out.push_str(&format!("r = {r}\n")),
        }
        out.push_str(&format!("beta = {:.16e}\n", self.beta));
        out.push_str(&format!("gamma = {:.16e}\n", self.gamma));
        out.push_str(&format!("eta = {}\n", eta_source_text(&self.eta)));
        out.push_str(&format!("init = {}\n", init_source_text(&self.init)));
        out.push_str(&format!("t_end = {}\n", self.t_end));
        if self.strategy_t1 != 0.0 {
            out.push_str(&format!("t1 = {:.16e}\n", self.strategy_t1));
        }
        if !self.sweep.is_empty() {
            out.push_str("[sweep]\n");
            let join_u32 = |v: &[u32]| {
                v.iter()
                    .map(|x| x.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            };
            if !self.sweep.n.is_empty() {
                out.push_str(&format!("n = {}\n", join_u32(&self.sweep.n)));
            }
            if !self.sweep.r.is_empty() {
                let list = self
                    .sweep
                    .r
                    .iter()
                    .map(|x| x.to_string())
                    .collect::<Vec<_>>()
                    .join(",");
                out.push_str(&format!("r = {list}\n"));
            }
            if !self.sweep.beta.is_empty() {
                let list = self
                    .sweep
                    .beta
                    .iter()
                    .map(|x| format!("{x:.16e}"))
                    .collect::<Vec<_>>()
                    .join(",");
                out.push_str(&format!("beta = {list}\n"));
            }
            if !self.sweep.gamma.is_empty() {
                let list = self
                    .sweep
                    .gamma
                    .iter()
                    .map(|x| format!("{x:.16e}"))
                    .collect::<Vec<_>>()
                    .join(",");
                out.push_str(&format!("gamma = {list}\n"));
            }
            if !self.sweep.seed.is_empty() {
                let list = self
                    .sweep
                    .seed
                    .iter()
                    .map(|x| x.to_string())
                    .collect::<Vec<_>>()
                    .join(",");
                out.push_str(&format!("seed = {list}\n"));
            }
        }
        out
    }
}

fn eta_source_text(source: &EtaSource) -> String {
    match source {
        EtaSource::Hadamard => "hadamard".to_string(),
        EtaSource::VectorFile(path) => format!("vector-file {path}"),
        EtaSource::UnitaryFile { path, column } => format!("unitary-file {path} {column}"),
        EtaSource::Random { seed } => format!("random {seed}"),
    }
}

fn init_source_text(source: &InitSource) -> String {
    match source {
        InitSource::EtaImage => "eta-image".to_string(),
        InitSource::VectorFile(path) => format!("vector-file {path}"),
        InitSource::Random { seed } => format!("random {seed}"),
        InitSource::Uniform => "uniform".to_string(),
    }
}

/// Parses an angle literal: decimal radians or one of the tokens `pi`,
/// `pi/2`, `pi/3`, `pi/4`.
pub fn parse_angle(text: &str) -> Result<f64, String> {
    match text {
        "pi" => Ok(PI),
        "pi/2" => Ok(PI / 2.0),
        "pi/3" => Ok(PI / 3.0),
        "pi/4" => Ok(PI / 4.0),
        other => match other.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            Ok(_) => Err(format!("angle `{other}` is not finite")),
            Err(_) => Err(format!(
                "cannot parse `{other}` as an angle (decimal radians or pi, pi/2, pi/3, pi/4)"
            )),
        },
    }
}

struct RawEntry {
    line: usize,
    value: String,
}

#[derive(Default)]
struct RawConfig {
    experiment: Vec<(String, RawEntry)>,
    sweep: Vec<(String, RawEntry)>,
}

const EXPERIMENT_KEYS: &[&str] = &[
    "n", "N", "marked", "r", "beta", "gamma", "eta", "init", "t_end", "t1", "out", "workers",
];
const SWEEP_KEYS: &[&str] = &["n", "r", "beta", "gamma", "seed"];

fn split_sections(text: &str, issues: &mut Vec<ConfigIssue>) -> RawConfig {
    let mut raw = RawConfig::default();
    let mut section = "experiment".to_string();
    let mut seen_sections = vec![];
    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw_line.find('#') {
            Some(pos) => &raw_line[..pos],
            None => raw_line,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            match name.strip_suffix(']') {
                Some(name) if name == "experiment" || name == "sweep" => {
                    if seen_sections.contains(&name.to_string()) {
                        issues.push(ConfigIssue::at(line_no, format!("duplicate section [{name}]")));
                    }
                    seen_sections.push(name.to_string());
                    section = name.to_string();
                }
                Some(other) => {
                    issues.push(ConfigIssue::at(line_no, format!("unknown section [{other}]")));
                }
                None => {
                    issues.push(ConfigIssue::at(line_no, "malformed section header".to_string()));
                }
            }
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            issues.push(ConfigIssue::at(
                line_no,
                format!("expected `key = value`, got `{line}`"),
            ));
            continue;
        };
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        let (known, bucket) = if section == "sweep" {
            (SWEEP_KEYS.contains(&key.as_str()), &mut raw.sweep)
        } else {
            (EXPERIMENT_KEYS.contains(&key.as_str()), &mut raw.experiment)
        };
        if !known {
            issues.push(ConfigIssue::at(
                line_no,
                format!("unknown key `{key}` in section [{section}]"),
            ));
            continue;
        }
        if bucket.iter().any(|(k, _)| *k == key) {
            issues.push(ConfigIssue::at(
                line_no,
                format!("duplicate key `{key}` in section [{section}]"),
            ));
            continue;
        }
        bucket.push((key, RawEntry { line: line_no, value }));
    }
    raw
}

fn take<'a>(entries: &'a [(String, RawEntry)], key: &str) -> Option<&'a RawEntry> {
    entries.iter().find(|(k, _)| k == key).map(|(_, e)| e)
}

fn parse_index_list(value: &str) -> Result<Vec<usize>, String> {
    let inner = value
        .strip_prefix('[')
        .and_then(|v| v.strip_suffix(']'))
        .ok_or_else(|| format!("expected a bracketed index list like [0,3], got `{value}`"))?;
    let mut indices = Vec::new();
    for token in inner.split(',') {
        let token = token.trim();
        if token.is_empty() {
            continue;
        }
        indices.push(
            token
                .parse::<usize>()
                .map_err(|_| format!("cannot parse index `{token}`"))?,
        );
    }
    if indices.is_empty() {
        return Err("marked index list is empty".to_string());
    }
    Ok(indices)
}

fn parse_int_axis<T: std::str::FromStr + PartialOrd + Copy>(value: &str) -> Result<Vec<T>, String>
where
    T: std::ops::Add<Output = T> + From<u8>,
{
    if let Some((lo, hi)) = value.split_once("..") {
        let lo: T = lo
            .trim()
            .parse()
            .map_err(|_| format!("cannot parse range start `{}`", lo.trim()))?;
        let hi: T = hi
            .trim()
            .parse()
            .map_err(|_| format!("cannot parse range end `{}`", hi.trim()))?;
        if hi < lo {
            return Err(format!("empty range `{value}`"));
        }
        let mut out = Vec::new();
        let mut cursor = lo;
        loop {
            out.push(cursor);
            if !(cursor < hi) {
                break;
            }
            cursor = cursor + T::from(1u8);
        }
        return Ok(out);
    }
    let mut out = Vec::new();
    for token in value.split(',') {
        let token = token.trim();
        if token.is_empty() {
            continue;
        }
        out.push(
            token
                .parse::<T>()
                .map_err(|_| format!("cannot parse `{token}`"))?,
        );
    }
    if out.is_empty() {
        return Err("empty list".to_string());
    }
    Ok(out)
}

fn parse_angle_axis(value: &str) -> Result<Vec<f64>, String> {
    let mut out = Vec::new();
    for token in value.split(',') {
        let token = token.trim();
        if token.is_empty() {
            continue;
        }
        out.push(parse_angle(token)?);
    }
    if out.is_empty() {
        return Err("empty list".to_string());
    }
    Ok(out)
}

fn parse_eta_source(value: &str) -> Result<EtaSource, String> {
    let mut parts = value.split_whitespace();
    let kind = parts.next().unwrap_or("");
    let rest: Vec<&str> = parts.collect();
    match kind {
        "hadamard" if rest.is_empty() => Ok(EtaSource::Hadamard),
        "vector-file" if rest.len() == 1 => Ok(EtaSource::VectorFile(rest[0].to_string())),
        "unitary-file" if rest.len() == 2 => {
            let column = rest[1]
                .parse::<usize>()
                .map_err(|_| format!("cannot parse unitary column index `{}`", rest[1]))?;
            Ok(EtaSource::UnitaryFile {
                path: rest[0].to_string(),
                column,
            })
        }
        "random" if rest.len() == 1 => {
            let seed = rest[0]
                .parse::<u64>()
                .map_err(|_| format!("cannot parse seed `{}`", rest[0]))?;
            Ok(EtaSource::Random { seed })
        }
        _ => Err(format!(
            "cannot parse eta source `{value}` (expected `hadamard`, `vector-file <path>`, \
             `unitary-file <path> <column>` or `random <seed>`)"
        )),
    }
}

fn parse_init_source(value: &str) -> Result<InitSource, String> {
    let mut parts = value.split_whitespace();
    let kind = parts.next().unwrap_or("");
    let rest: Vec<&str> = parts.collect();
    match kind {
        "eta-image" if rest.is_empty() => Ok(InitSource::EtaImage),
        "uniform" if rest.is_empty() => Ok(InitSource::Uniform),
        "vector-file" if rest.len() == 1 => Ok(InitSource::VectorFile(rest[0].to_string())),
        "random" if rest.len() == 1 => {
            let seed = rest[0]
                .parse::<u64>()
                .map_err(|_| format!("cannot parse seed `{}`", rest[0]))?;
            Ok(InitSource::Random { seed })
        }
        _ => Err(format!(
            "cannot parse init source `{value}` (expected `eta-image`, `uniform`, \
             `vector-file <path>` or `random <seed>`)"
        )),
    }
}

/// Parses a configuration, collecting every error instead of stopping at the
/// first. `base_dir` is the directory relative file references resolve
/// against (and are existence-checked against).
pub fn parse_config(text: &str, base_dir: &Path) -> Result<ExperimentConfig, ConfigErrors> {
    let mut issues = Vec::new();
    let raw = split_sections(text, &mut issues);
    let exp = &raw.experiment;

    macro_rules! parse_entry {
        ($key:literal, $parser:expr) => {
            take(exp, $key).and_then(|entry| match $parser(entry.value.as_str()) {
                Ok(v) => Some((v, entry.line)),
                Err(msg) => {
                    issues.push(ConfigIssue::at(entry.line, format!("key `{}`: {msg}", $key)));
                    None
                }
            })
        };
    }

    let qubits = parse_entry!("n", |v: &str| v
        .parse::<u32>()
        .map_err(|_| format!("cannot parse qubit count `{v}`")));
    let states = parse_entry!("N", |v: &str| v
        .parse::<usize>()
        .map_err(|_| format!("cannot parse dimension `{v}`")));
    let marked_list = parse_entry!("marked", parse_index_list);
    let marked_first = parse_entry!("r", |v: &str| v
        .parse::<usize>()
        .map_err(|_| format!("cannot parse marked count `{v}`")));
    let beta = parse_entry!("beta", parse_angle);
    let gamma = parse_entry!("gamma", parse_angle);
    let eta = parse_entry!("eta", parse_eta_source);
    let init = parse_entry!("init", parse_init_source);
    let t_end = parse_entry!("t_end", |v: &str| v
        .parse::<u64>()
        .map_err(|_| format!("cannot parse iteration count `{v}`")));
    let t1 = parse_entry!("t1", |v: &str| match v.parse::<f64>() {
        Ok(x) if x.is_finite() && x >= 0.0 => Ok(x),
        _ => Err(format!("cannot parse nonnegative time `{v}`")),
    });
    let out = take(exp, "out").map(|e| (e.value.clone(), e.line));
    let workers = parse_entry!("workers", |v: &str| match v.parse::<usize>() {
        Ok(w) if w >= 1 => Ok(w),
        Ok(_) => Err("workers must be at least 1".to_string()),
        Err(_) => Err(format!("cannot parse worker count `{v}`")),
    });

    // Dimension: exactly one of `n` and `N`.
    let dimension = match (qubits, states) {
        (Some((n, line)), None) => {
            if n == 0 || n > 24 {
                issues.push(ConfigIssue::at(
                    line,
                    format!("qubit count {n} outside the supported range 1..=24"),
                ));
                None
            } else {
                Some(DimensionSpec::Qubits(n))
            }
        }
        (None, Some((n, line))) => {
            if n < 2 || n > MAX_DIMENSION {
                issues.push(ConfigIssue::at(
                    line,
                    format!("dimension {n} outside the supported range 2..={MAX_DIMENSION}"),
                ));
                None
            } else {
                Some(DimensionSpec::States(n))
            }
        }
        (Some((_, line)), Some(_)) => {
            issues.push(ConfigIssue::at(
                line,
                "give exactly one of `n` (qubits) and `N` (dimension), not both".to_string(),
            ));
            None
        }
        (None, None) => {
            if take(exp, "n").is_none() && take(exp, "N").is_none() {
                issues.push(ConfigIssue::file_level(
                    "missing required key: one of `n` (qubits) or `N` (dimension)",
                ));
            }
            None
        }
    };

    // Marked set: exactly one of `marked` and `r`.
    let marked = match (marked_list, marked_first) {
        (Some((v, _)), None) => Some(MarkedSpec::Indices(v)),
        (None, Some((r, line))) => {
            if r == 0 {
                issues.push(ConfigIssue::at(line, "marked count must be at least 1".to_string()));
                None
            } else {
                Some(MarkedSpec::First(r))
            }
        }
        (Some((_, line)), Some(_)) => {
            issues.push(ConfigIssue::at(
                line,
                "give exactly one of `marked` (indices) and `r` (count), not both".to_string(),
            ));
            None
        }
        (None, None) => {
            if take(exp, "marked").is_none() && take(exp, "r").is_none() {
                issues.push(ConfigIssue::file_level(
                    "missing required key: one of `marked` (indices) or `r` (count)",
                ));
            }
            None
        }
    };

    for (key, present) in [
        ("beta", beta.is_some() || take(exp, "beta").is_some()),
        ("gamma", gamma.is_some() || take(exp, "gamma").is_some()),
        ("eta", eta.is_some() || take(exp, "eta").is_some()),
        ("init", init.is_some() || take(exp, "init").is_some()),
        ("t_end", t_end.is_some() || take(exp, "t_end").is_some()),
    ] {
        if !present {
            issues.push(ConfigIssue::file_level(format!("missing required key `{key}`")));
        }
    }

    // Cross-checks that need the dimension.
    if let (Some(dim_spec), Some(marked_spec)) = (dimension, marked.as_ref()) {
        let dim = dim_spec.dimension();
        match marked_spec {
            MarkedSpec::Indices(indices) => {
                if let Some(&worst) = indices.iter().max() {
                    if worst >= dim {
                        let line = take(exp, "marked").map_or(0, |e| e.line);
                        issues.push(ConfigIssue::at(
                            line,
                            format!("marked index {worst} out of range for dimension {dim}"),
                        ));
                    }
                }
            }
            MarkedSpec::First(r) => {
                if *r > dim {
                    let line = take(exp, "r").map_or(0, |e| e.line);
                    issues.push(ConfigIssue::at(
                        line,
                        format!("marked count {r} out of range for dimension {dim}"),
                    ));
                }
            }
        }
        if let Some((EtaSource::Hadamard, _)) = eta.as_ref() {
            if !dim.is_power_of_two() {
                let line = take(exp, "eta").map_or(0, |e| e.line);
                issues.push(ConfigIssue::at(
                    line,
                    format!("eta = hadamard requires a power-of-two dimension, got {dim}"),
                ));
            }
        }
    }

    // Referenced files must exist.
    let check_file = |path_text: &str, line: usize, issues: &mut Vec<ConfigIssue>| {
        let path = Path::new(path_text);
        let resolved = if path.is_absolute() {
            path.to_path_buf()
        } else {
            base_dir.join(path)
        };
        if !resolved.is_file() {
            issues.push(ConfigIssue::at(
                line,
                format!("referenced file `{path_text}` does not exist"),
            ));
        }
    };
    if let Some((source, line)) = eta.as_ref() {
        match source {
            EtaSource::VectorFile(path) | EtaSource::UnitaryFile { path, .. } => {
                check_file(path, *line, &mut issues)
            }
            _ => {}
        }
    }
    if let Some((InitSource::VectorFile(path), line)) = init.as_ref() {
        check_file(path, *line, &mut issues);
    }

    // Sweep axes.
    let mut sweep = SweepAxes::default();
    for (key, entry) in &raw.sweep {
        let result: Result<(), String> = match key.as_str() {
            "n" => parse_int_axis::<u32>(&entry.value).and_then(|v| {
                if let Some(&bad) = v.iter().find(|&&n| n == 0 || n > 24) {
                    return Err(format!("qubit count {bad} outside the supported range 1..=24"));
                }
                sweep.n = v;
                Ok(())
            }),
            "r" => parse_int_axis::<usize>(&entry.value).and_then(|v| {
                if v.contains(&0) {
                    return Err("marked count must be at least 1".to_string());
                }
                sweep.r = v;
                Ok(())
            }),
            "beta" => parse_angle_axis(&entry.value).map(|v| sweep.beta = v),
            "gamma" => parse_angle_axis(&entry.value).map(|v| sweep.gamma = v),
            "seed" => parse_int_axis::<u64>(&entry.value).map(|v| sweep.seed = v),
            _ => unreachable!("unknown keys are filtered earlier"),
        };
        if let Err(msg) = result {
            issues.push(ConfigIssue::at(entry.line, format!("sweep key `{key}`: {msg}")));
        }
    }

    // Sweeping the size requires size-generic sources.
    if !sweep.n.is_empty() {
        if let Some((EtaSource::VectorFile(_) | EtaSource::UnitaryFile { .. }, _)) = eta.as_ref() {
            issues.push(ConfigIssue::file_level(
                "sweeping `n` is incompatible with a file-based eta source",
            ));
        }
        if let Some((InitSource::VectorFile(_), _)) = init.as_ref() {
            issues.push(ConfigIssue::file_level(
                "sweeping `n` is incompatible with a file-based init source",
            ));
        }
    }
    if !sweep.seed.is_empty() {
        let eta_seeded = matches!(eta.as_ref(), Some((EtaSource::Random { .. }, _)));
        let init_seeded = matches!(init.as_ref(), Some((InitSource::Random { .. }, _)));
        if eta.is_some() && init.is_some() && !eta_seeded && !init_seeded {
            issues.push(ConfigIssue::file_level(
                "sweeping `seed` requires a `random` eta or init source",
            ));
        }
    }

    if !issues.is_empty() {
        return Err(ConfigErrors(issues));
    }

    Ok(ExperimentConfig {
        dimension: dimension.expect("validated above"),
        marked: marked.expect("validated above"),
        beta: beta.expect("validated above").0,
        gamma: gamma.expect("validated above").0,
        eta: eta.expect("validated above").0,
        init: init.expect("validated above").0,
        t_end: t_end.expect("validated above").0,
        strategy_t1: t1.map_or(0.0, |(v, _)| v),
        out: out.map(|(v, _)| v),
        workers: workers.map(|(v, _)| v),
        sweep,
        base_dir: base_dir.to_path_buf(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "\
[experiment]
n = 2
marked = [0]
beta = pi
gamma = pi
eta = hadamard
init = eta-image
t_end = 10
";

    #[test]
    fn minimal_config_parses() {
        let config = parse_config(MINIMAL, Path::new(".")).unwrap();
        assert_eq!(config.dimension(), 4);
        assert_eq!(config.marked, MarkedSpec::Indices(vec![0]));
        assert_eq!(config.beta, PI);
        assert_eq!(config.eta, EtaSource::Hadamard);
        assert_eq!(config.init, InitSource::EtaImage);
        assert_eq!(config.t_end, 10);
        assert!(config.sweep.is_empty());
    }

    #[test]
    fn section_header_is_optional_for_experiment() {
        let text = MINIMAL.replace("[experiment]\n", "");
        assert!(parse_config(&text, Path::new(".")).is_ok());
    }

    #[test]
    fn bad_angle_names_key_and_line() {
        let text = MINIMAL.replace("beta = pi", "beta = abc");
        let errors = parse_config(&text, Path::new(".")).unwrap_err();
        assert_eq!(errors.0.len(), 1);
        let issue = &errors.0[0];
        assert_eq!(issue.line, 4);
        assert!(issue.message.contains("beta"), "{}", issue.message);
        assert!(issue.message.contains("abc"), "{}", issue.message);
    }

    #[test]
    fn out_of_range_marked_index_is_reported() {
        let text = MINIMAL.replace("marked = [0]", "marked = [4]");
        let errors = parse_config(&text, Path::new(".")).unwrap_err();
        assert!(errors.0[0].message.contains("out of range"));
    }

    #[test]
    fn all_errors_are_collected() {
        let text = "\
[experiment]
n = 2
marked = [9]
beta = abc
gamma = xyz
eta = hadamard
init = eta-image
t_end = soon
";
        let errors = parse_config(text, Path::new(".")).unwrap_err();
        assert!(errors.0.len() >= 4, "{errors}");
    }

    #[test]
    fn unknown_key_is_reported() {
        let text = format!("{MINIMAL}betaa = 3\n");
        let errors = parse_config(&text, Path::new(".")).unwrap_err();
        assert!(errors.0[0].message.contains("unknown key `betaa`"));
    }

    #[test]
    fn missing_required_keys_are_reported_at_file_level() {
        let errors = parse_config("[experiment]\nn = 2\n", Path::new(".")).unwrap_err();
        assert!(errors.0.iter().all(|i| i.line == 0));
        assert!(errors.0.iter().any(|i| i.message.contains("beta")));
        assert!(errors.0.iter().any(|i| i.message.contains("marked")));
    }

    #[test]
    fn both_dimension_keys_conflict() {
        let text = MINIMAL.replace("n = 2", "n = 2\nN = 4");
        let errors = parse_config(&text, Path::new(".")).unwrap_err();
        assert!(errors.0[0].message.contains("exactly one"));
    }

    #[test]
    fn hadamard_needs_power_of_two() {
        let text = MINIMAL.replace("n = 2", "N = 6");
        let errors = parse_config(&text, Path::new(".")).unwrap_err();
        assert!(errors.0[0].message.contains("power-of-two"));
    }

    #[test]
    fn missing_file_is_reported() {
        let text = MINIMAL.replace("eta = hadamard", "eta = vector-file nope.dat");
        let errors = parse_config(&text, Path::new("/nonexistent-base")).unwrap_err();
        assert!(errors.0[0].message.contains("nope.dat"));
    }

    #[test]
    fn sweep_axes_parse_with_ranges_and_lists() {
        let text = format!("{MINIMAL}[sweep]\nn = 4..6\nbeta = pi/2,pi\nseed = 1,2,3\n");
        let text = text.replace("eta = hadamard", "eta = random 7");
        let config = parse_config(&text, Path::new(".")).unwrap();
        assert_eq!(config.sweep.n, vec![4, 5, 6]);
        assert_eq!(config.sweep.beta.len(), 2);
        assert_eq!(config.sweep.seed, vec![1, 2, 3]);
        assert_eq!(config.sweep.point_count(), 18);
    }

    #[test]
    fn size_sweep_rejects_file_sources() {
        let dir = std::env::temp_dir();
        let file = dir.join("gqsearch-config-test-eta.dat");
        std::fs::write(&file, "1 0\n0 0\n0 0\n0 0\n").unwrap();
        let text = MINIMAL.replace(
            "eta = hadamard",
            &format!("eta = vector-file {}", file.display()),
        );
        let text = format!("{text}[sweep]\nn = 2..3\n");
        let errors = parse_config(&text, &dir).unwrap_err();
        assert!(errors
            .0
            .iter()
            .any(|i| i.message.contains("incompatible with a file-based eta")));
        std::fs::remove_file(&file).ok();
    }

    #[test]
    fn canonical_form_is_a_fixed_point() {
        let text = format!(
            "{MINIMAL}t1 = 1.5\n[sweep]\nn = 3..5\ngamma = pi/4\n"
        );
        let text = text.replace("eta = hadamard", "eta = random 11");
        let config = parse_config(&text, Path::new(".")).unwrap();
        let canonical = config.canonical_text();
        let reparsed = parse_config(&canonical, Path::new(".")).unwrap();
        assert_eq!(reparsed, config);
        assert_eq!(reparsed.canonical_text(), canonical);
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let text = "\n# top comment\n[experiment]\nn = 2  # qubits\n\nmarked = [0]\nbeta = pi\ngamma = pi\neta = hadamard\ninit = uniform\nt_end = 1\n";
        assert!(parse_config(text, Path::new(".")).is_ok());
    }
}
