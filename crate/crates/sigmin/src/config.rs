//! Experiment configuration files.
//!
//! A config is plain text made of blocks:
//!
//! ```text
//! # comment
//! [experiment sv-square]
//! kind = sv_tail
//! ensemble.kind = independent_columns
//! ensemble.column.kind = gaussian
//! N = 20
//! n = 20
//! thresholds = 0.05, 0.1, 0.2
//! normalization = eps_over_sqrt_n
//! trials = 10000
//! seed = 1
//! ```
//!
//! Keys are unique within a block. Nested ensembles use dotted keys
//! (`ensemble.column.*` for independent columns, `ensemble.base.*` and
//! `ensemble.copies` for concatenation); `ensemble = gaussian` is shorthand
//! for `ensemble.kind = gaussian`. Lists are comma separated.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use sigmin_core::geometry::SpreadParams;
use sigmin_core::montecarlo::Normalization;
use sigmin_core::EnsembleSpec;

/// What a block estimates or checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExperimentKind {
    SvTail,
    SmallBall,
    Paouris,
    CompInfTail,
    DistanceTail,
    OrderStat,
    ProjectedSvTail,
    EventCover,
    RoundingMoment,
    SparsityProb,
    NormalIncompressibility,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 11] = [
        Self::SvTail,
        Self::SmallBall,
        Self::Paouris,
        Self::CompInfTail,
        Self::DistanceTail,
        Self::OrderStat,
        Self::ProjectedSvTail,
        Self::EventCover,
        Self::RoundingMoment,
        Self::SparsityProb,
        Self::NormalIncompressibility,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::SvTail => "sv_tail",
            Self::SmallBall => "smallball",
            Self::Paouris => "paouris",
            Self::CompInfTail => "comp_inf_tail",
            Self::DistanceTail => "distance_tail",
            Self::OrderStat => "order_stat",
            Self::ProjectedSvTail => "projected_sv_tail",
            Self::EventCover => "event_cover",
            Self::RoundingMoment => "rounding_moment",
            Self::SparsityProb => "sparsity_prob",
            Self::NormalIncompressibility => "normal_incompressibility",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }

    /// Whether the block reports tail estimates over a threshold list.
    pub fn uses_thresholds(self) -> bool {
        !matches!(self, Self::EventCover | Self::RoundingMoment | Self::SparsityProb)
    }

    /// Whether the statistic is a singular value of an `N x n` matrix, so `N ≥ n` is required.
    pub fn needs_tall(self) -> bool {
        matches!(self, Self::SvTail | Self::CompInfTail | Self::ProjectedSvTail | Self::EventCover)
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Optional per-kind parameters. Unset values fall back to documented defaults at run time.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Params {
    pub delta: Option<f64>,
    pub rho: Option<f64>,
    pub epsilon: Option<f64>,
    pub c1: Option<f64>,
    /// Constant `C` of the large-norm event `‖X‖ ≥ Ct√n`.
    pub paouris_c: Option<f64>,
    pub spread: Option<SpreadParams>,
    pub spread_samples: Option<usize>,
    pub subset: Option<Vec<usize>>,
    pub x: Option<Vec<f64>>,
    pub center: Option<Vec<f64>>,
    pub y: Option<Vec<f64>>,
}

/// One `[experiment ...]` block.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub name: String,
    pub kind: ExperimentKind,
    pub ensemble: EnsembleSpec,
    /// `N`.
    pub rows: usize,
    /// `n`.
    pub cols: usize,
    pub thresholds: Vec<f64>,
    pub normalization: Normalization,
    pub trials: u64,
    pub seed: u64,
    pub threads: Option<usize>,
    pub params: Params,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: unknown experiment kind `{kind}`")]
    UnknownKind { line: usize, kind: String },
    #[error("experiment `{block}`: {message}")]
    Schema { block: String, message: String },
}

impl ConfigError {
    fn schema(block: &str, message: impl Into<String>) -> Self {
        Self::Schema { block: block.to_string(), message: message.into() }
    }
}

/// Parses every block of a config file.
pub fn parse(text: &str) -> Result<Vec<ExperimentConfig>, ConfigError> {
    let mut blocks: Vec<RawBlock> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        if let Some(header) = trimmed.strip_prefix('[') {
            let inner = header
                .strip_suffix(']')
                .ok_or_else(|| ConfigError::Syntax { line, message: "unterminated section header".into() })?;
            let name = inner
                .trim()
                .strip_prefix("experiment")
                .filter(|rest| rest.starts_with(char::is_whitespace))
                .map(str::trim)
                .filter(|name| !name.is_empty())
                .ok_or_else(|| ConfigError::Syntax {
                    line,
                    message: "section header must read `[experiment NAME]`".into(),
                })?;
            blocks.push(RawBlock { name: name.to_string(), entries: BTreeMap::new() });
            continue;
        }
        let (key, value) = trimmed
            .split_once('=')
            .ok_or_else(|| ConfigError::Syntax { line, message: format!("expected `key = value`, got `{trimmed}`") })?;
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() {
            return Err(ConfigError::Syntax { line, message: "empty key".into() });
        }
        let block = blocks
            .last_mut()
            .ok_or_else(|| ConfigError::Syntax { line, message: "key outside an `[experiment NAME]` section".into() })?;
        if block.entries.insert(key.to_string(), (value.to_string(), line)).is_some() {
            return Err(ConfigError::Syntax { line, message: format!("duplicate key `{key}`") });
        }
    }
    let mut names = std::collections::HashSet::new();
    let configs = blocks.into_iter().map(RawBlock::resolve).collect::<Result<Vec<_>, _>>()?;
    for c in &configs {
        if !names.insert(c.name.clone()) {
            return Err(ConfigError::schema(&c.name, "duplicate experiment name"));
        }
    }
    Ok(configs)
}

/// Renders configs in canonical form; `parse(&emit(c)) == c`.
pub fn emit(configs: &[ExperimentConfig]) -> String {
    let mut out = String::new();
    for (i, c) in configs.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        out.push_str(&c.to_text());
    }
    out
}

impl ExperimentConfig {
    /// Canonical text of this block.
    pub fn to_text(&self) -> String {
        let mut lines = vec![("kind".to_string(), self.kind.name().to_string())];
        emit_ensemble(&self.ensemble, "ensemble", &mut lines);
        lines.push(("N".into(), self.rows.to_string()));
        lines.push(("n".into(), self.cols.to_string()));
        lines.push(("thresholds".into(), join(&self.thresholds)));
        lines.push(("normalization".into(), self.normalization.name().into()));
        lines.push(("trials".into(), self.trials.to_string()));
        lines.push(("seed".into(), self.seed.to_string()));
        if let Some(t) = self.threads {
            lines.push(("threads".into(), t.to_string()));
        }
        let p = &self.params;
        for (k, v) in [
            ("delta", p.delta),
            ("rho", p.rho),
            ("epsilon", p.epsilon),
            ("c1", p.c1),
            ("paouris_c", p.paouris_c),
            ("spread.c_lo", p.spread.map(|s| s.c_lo)),
            ("spread.c_hi", p.spread.map(|s| s.c_hi)),
        ] {
            if let Some(v) = v {
                lines.push((k.into(), float(v)));
            }
        }
        if let Some(v) = p.spread_samples {
            lines.push(("spread.samples".into(), v.to_string()));
        }
        if let Some(v) = &p.subset {
            lines.push(("subset".into(), v.iter().map(usize::to_string).collect::<Vec<_>>().join(", ")));
        }
        for (k, v) in [("x", &p.x), ("center", &p.center), ("y", &p.y)] {
            if let Some(v) = v {
                lines.push((k.into(), join(v)));
            }
        }
        let mut text = format!("[experiment {}]\n", self.name);
        for (k, v) in lines {
            let _ = writeln!(text, "{k} = {v}");
        }
        text
    }

    /// Checks the cross-field constraints.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let err = |m: String| Err(ConfigError::schema(&self.name, m));
        if self.name.is_empty() || self.name.contains([']', '\n', '\r']) || self.name.trim() != self.name {
            return err(format!("invalid experiment name `{}`", self.name));
        }
        if self.trials == 0 {
            return err("trials must be positive".into());
        }
        if self.rows == 0 || self.cols == 0 {
            return err("dimensions must be positive".into());
        }
        if self.kind.needs_tall() && self.rows < self.cols {
            return err(format!("{} requires N ≥ n (N = {}, n = {})", self.kind, self.rows, self.cols));
        }
        if self.threads == Some(0) {
            return err("threads must be positive".into());
        }
        if self.thresholds.iter().any(|t| !t.is_finite()) {
            return err("thresholds must be finite".into());
        }
        if !self.thresholds.windows(2).all(|w| w[0] < w[1]) {
            return err("thresholds must be strictly increasing".into());
        }
        if self.kind.uses_thresholds() && self.thresholds.is_empty() {
            return err(format!("{} needs at least one threshold", self.kind));
        }
        let p = &self.params;
        for (name, v) in [
            ("delta", p.delta),
            ("rho", p.rho),
            ("epsilon", p.epsilon),
            ("c1", p.c1),
            ("paouris_c", p.paouris_c),
        ] {
            if let Some(v) = v {
                if !v.is_finite() {
                    return err(format!("{name} must be finite"));
                }
            }
        }
        for (name, v) in [("x", &p.x), ("center", &p.center), ("y", &p.y)] {
            if v.as_ref().is_some_and(|v| v.iter().any(|t| !t.is_finite())) {
                return err(format!("{name} must be finite"));
            }
        }
        if let Some(s) = p.spread {
            if SpreadParams::new(s.c_lo, s.c_hi).is_err() {
                return err(format!("invalid spread constants ({}, {})", s.c_lo, s.c_hi));
            }
        }
        Ok(())
    }
}

fn float(v: f64) -> String {
    format!("{v:?}")
}

fn join(v: &[f64]) -> String {
    v.iter().map(|x| float(*x)).collect::<Vec<_>>().join(", ")
}

fn emit_ensemble(spec: &EnsembleSpec, prefix: &str, out: &mut Vec<(String, String)>) {
    out.push((format!("{prefix}.kind"), spec.name().to_string()));
    match spec {
        EnsembleSpec::IndependentColumns(c) => emit_ensemble(c, &format!("{prefix}.column"), out),
        EnsembleSpec::Concatenated { base, copies } => {
            emit_ensemble(base, &format!("{prefix}.base"), out);
            out.push((format!("{prefix}.copies"), copies.to_string()));
        }
        _ => {}
    }
}

struct RawBlock {
    name: String,
    entries: BTreeMap<String, (String, usize)>,
}

impl RawBlock {
    fn take(&mut self, key: &str) -> Option<(String, usize)> {
        self.entries.remove(key)
    }

    fn required(&mut self, key: &str) -> Result<(String, usize), ConfigError> {
        self.take(key).ok_or_else(|| ConfigError::schema(&self.name, format!("missing key `{key}`")))
    }

    fn value<T: FromStr>(&mut self, key: &str) -> Result<Option<T>, ConfigError> {
        match self.take(key) {
            None => Ok(None),
            Some((v, line)) => parse_value(key, &v, line).map(Some),
        }
    }

    fn list<T: FromStr>(&mut self, key: &str) -> Result<Option<Vec<T>>, ConfigError> {
        match self.take(key) {
            None => Ok(None),
            Some((v, line)) => {
                if v.trim().is_empty() {
                    return Ok(Some(Vec::new()));
                }
                v.split(',').map(|item| parse_value(key, item.trim(), line)).collect::<Result<_, _>>().map(Some)
            }
        }
    }

    fn ensemble(&mut self, prefix: &str) -> Result<EnsembleSpec, ConfigError> {
        let short = self.take(prefix);
        let long = self.take(&format!("{prefix}.kind"));
        let (kind, line) = match (short, long) {
            (Some(_), Some((_, line))) => {
                return Err(ConfigError::Syntax { line, message: format!("both `{prefix}` and `{prefix}.kind` given") })
            }
            (Some(v), None) | (None, Some(v)) => v,
            (None, None) => return Err(ConfigError::schema(&self.name, format!("missing key `{prefix}.kind`"))),
        };
        Ok(match kind.as_str() {
            "gaussian" => EnsembleSpec::Gaussian,
            "uniform_cube" => EnsembleSpec::UniformCube,
            "laplace" => EnsembleSpec::Laplace,
            "ell1_ball" => EnsembleSpec::L1Ball,
            "independent_columns" => EnsembleSpec::independent_columns(self.ensemble(&format!("{prefix}.column"))?),
            "concatenated" => {
                let base = self.ensemble(&format!("{prefix}.base"))?;
                let key = format!("{prefix}.copies");
                let (copies, line) = self.required(&key)?;
                let copies: usize = parse_value(&key, &copies, line)?;
                if copies == 0 {
                    return Err(ConfigError::Syntax { line, message: format!("`{key}` must be positive") });
                }
                EnsembleSpec::Concatenated { base: Box::new(base), copies }
            }
            other => return Err(ConfigError::Syntax { line, message: format!("unknown ensemble kind `{other}`") }),
        })
    }

    fn resolve(mut self) -> Result<ExperimentConfig, ConfigError> {
        let (kind_text, kind_line) = self.required("kind")?;
        let kind = ExperimentKind::from_name(&kind_text)
            .ok_or(ConfigError::UnknownKind { line: kind_line, kind: kind_text })?;
        let ensemble = self.ensemble("ensemble")?;
        let cols: usize = self
            .value("n")?
            .ok_or_else(|| ConfigError::schema(&self.name, "missing key `n`"))?;
        let rows: usize = self.value("N")?.unwrap_or(cols);
        let thresholds = self.list("thresholds")?.unwrap_or_default();
        let normalization = match self.take("normalization") {
            None => Normalization::Absolute,
            Some((v, line)) => Normalization::from_name(&v)
                .ok_or_else(|| ConfigError::Syntax { line, message: format!("unknown normalization `{v}`") })?,
        };
        let trials: u64 = self.value("trials")?.ok_or_else(|| ConfigError::schema(&self.name, "missing key `trials`"))?;
        let seed: u64 = self.value("seed")?.ok_or_else(|| ConfigError::schema(&self.name, "missing key `seed`"))?;
        let threads = self.value("threads")?;
        let c_lo: Option<f64> = self.value("spread.c_lo")?;
        let c_hi: Option<f64> = self.value("spread.c_hi")?;
        let spread = match (c_lo, c_hi) {
            (None, None) => None,
            (lo, hi) => {
                let d = SpreadParams::default();
                Some(SpreadParams { c_lo: lo.unwrap_or(d.c_lo), c_hi: hi.unwrap_or(d.c_hi) })
            }
        };
        let params = Params {
            delta: self.value("delta")?,
            rho: self.value("rho")?,
            epsilon: self.value("epsilon")?,
            c1: self.value("c1")?,
            paouris_c: self.value("paouris_c")?,
            spread,
            spread_samples: self.value("spread.samples")?,
            subset: self.list("subset")?,
            x: self.list("x")?,
            center: self.list("center")?,
            y: self.list("y")?,
        };
        if let Some((key, (_, line))) = self.entries.into_iter().next() {
            return Err(ConfigError::Syntax { line, message: format!("unknown key `{key}`") });
        }
        let config = ExperimentConfig {
            name: self.name,
            kind,
            ensemble,
            rows,
            cols,
            thresholds,
            normalization,
            trials,
            seed,
            threads,
            params,
        };
        config.validate()?;
        Ok(config)
    }
}

fn parse_value<T: FromStr>(key: &str, text: &str, line: usize) -> Result<T, ConfigError> {
    text.parse()
        .map_err(|_| ConfigError::Syntax { line, message: format!("invalid value `{text}` for `{key}`") })
}
