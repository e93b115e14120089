//! Plain-text experiment configuration: `key = value` lines under
//! `[section]` headers, `#` comments, one file per experiment. CLI
//! `--override section.key=value` flags take precedence over file values.

use anyhow::{anyhow, bail, Context, Result};
use neurofield::response::ResponseKind;
use neurofield::stimulus::Stimulus;
use neurofield::{DogParams, GridSpec};
use std::collections::BTreeMap;
use std::path::Path;

/// Raw section -> key -> value map (kept for the manifest echo).
#[derive(Debug, Clone, Default)]
pub struct RawConfig {
    pub entries: BTreeMap<String, BTreeMap<String, String>>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries: BTreeMap<String, BTreeMap<String, String>> = BTreeMap::new();
        let mut section = String::from("experiment");
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
                section = name.trim().to_string();
                entries.entry(section.clone()).or_default();
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("line {}: expected key = value, got {raw:?}", lineno + 1))?;
            entries
                .entry(section.clone())
                .or_default()
                .insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(RawConfig { entries })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        Self::parse(&text)
    }

    /// Apply a `section.key=value` override.
    pub fn apply_override(&mut self, spec: &str) -> Result<()> {
        let (path, value) = spec
            .split_once('=')
            .ok_or_else(|| anyhow!("override must look like section.key=value, got {spec:?}"))?;
        let (section, key) = path
            .split_once('.')
            .ok_or_else(|| anyhow!("override key must be section.key, got {path:?}"))?;
        self.entries
            .entry(section.trim().to_string())
            .or_default()
            .insert(key.trim().to_string(), value.trim().to_string());
        Ok(())
    }

    fn get(&self, section: &str, key: &str) -> Option<&str> {
        self.entries.get(section)?.get(key).map(|s| s.as_str())
    }

    fn f64_or(&self, section: &str, key: &str, default: f64) -> Result<f64> {
        match self.get(section, key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .with_context(|| format!("[{section}] {key} = {v:?} is not a number")),
        }
    }

    fn usize_or(&self, section: &str, key: &str, default: usize) -> Result<usize> {
        match self.get(section, key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .with_context(|| format!("[{section}] {key} = {v:?} is not an integer")),
        }
    }

    fn str_or<'a>(&'a self, section: &str, key: &str, default: &'a str) -> &'a str {
        self.get(section, key).unwrap_or(default)
    }
}

/// Which experiment a config drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    Simulate,
    Stationary,
    KernelZeros,
    HeavisideZeros,
    MackayRays,
    MackayTarget,
    Control,
    Equivariance,
}

impl ExperimentKind {
    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "simulate" => Self::Simulate,
            "stationary" => Self::Stationary,
            "kernel-zeros" => Self::KernelZeros,
            "heaviside-zeros" => Self::HeavisideZeros,
            "mackay-rays" => Self::MackayRays,
            "mackay-target" => Self::MackayTarget,
            "control" => Self::Control,
            "equivariance" => Self::Equivariance,
            other => bail!(
                "unknown experiment kind {other:?}; expected one of simulate, stationary, \
                 kernel-zeros, heaviside-zeros, mackay-rays, mackay-target, control, equivariance"
            ),
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Simulate => "simulate",
            Self::Stationary => "stationary",
            Self::KernelZeros => "kernel-zeros",
            Self::HeavisideZeros => "heaviside-zeros",
            Self::MackayRays => "mackay-rays",
            Self::MackayTarget => "mackay-target",
            Self::Control => "control",
            Self::Equivariance => "equivariance",
        }
    }
}

/// Fully resolved experiment description. Defaults reproduce the reference
/// figure setup: L = 10, n = 2000 (dx = 0.01), kappa = 1,
/// 2 pi^2 sigma1^2 = 1, 2 pi^2 sigma2^2 = 2, mu = 1.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub grid: GridSpec,
    pub params: DogParams,
    pub mu: f64,
    pub response: ResponseKind,
    pub stimulus: Stimulus,
    pub tol: f64,
    pub max_iter: usize,
    pub dt: f64,
    pub t_final: f64,
    pub out_px: usize,
    pub r_max: f64,
    pub seam_margin: f64,
    pub horizon: f64,
    pub tau: f64,
    pub control_kind: ControlKind,
    pub seed: u64,
    pub zero_k_max: usize,
    pub raw: RawConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ControlKind {
    Linear,
    SmallTime,
    TwoPhase,
}

pub fn parse_response(name: &str, delta: f64) -> Result<ResponseKind> {
    Ok(match name {
        "linear" => ResponseKind::Linear,
        "tanh" => ResponseKind::Tanh,
        "erf" => ResponseKind::ErfSigmoid,
        "rational" => ResponseKind::Rational,
        "capped" | "capped-linear" => ResponseKind::CappedLinear { delta },
        other => bail!("unknown response {other:?}; expected linear, tanh, erf, rational, capped"),
    })
}

impl ExperimentConfig {
    pub fn resolve(raw: RawConfig) -> Result<Self> {
        let kind = ExperimentKind::parse(raw.str_or("experiment", "kind", "stationary"))?;

        let half_width = raw.f64_or("grid", "L", 10.0)?;
        let n = raw.usize_or("grid", "n", 2000)?;
        let dim = raw.usize_or("grid", "d", 2)?;
        let grid = GridSpec::new(half_width, n, dim).map_err(|e| anyhow!("{e}"))?;

        let canonical = DogParams::canonical();
        let kappa = raw.f64_or("kernel", "kappa", canonical.kappa())?;
        let sigma1 = raw.f64_or("kernel", "sigma1", canonical.sigma1())?;
        let sigma2 = raw.f64_or("kernel", "sigma2", canonical.sigma2())?;
        let params = DogParams::new(kappa, sigma1, sigma2).map_err(|e| anyhow!("{e}"))?;

        let mu = raw.f64_or("model", "mu", 1.0)?;
        let delta = raw.f64_or("model", "delta", 0.0)?;
        let response = parse_response(raw.str_or("model", "response", "linear"), delta)?;

        let lambda = raw.f64_or("stimulus", "lambda", 2.5)?;
        let epsilon = raw.f64_or("stimulus", "epsilon", 0.025)?;
        let theta = raw.f64_or("stimulus", "theta", 2.0)?;
        let offsets = [
            raw.f64_or("stimulus", "offset1", 9.75)?,
            raw.f64_or("stimulus", "offset2", 9.75)?,
            raw.f64_or("stimulus", "offset3", 0.25)?,
        ];
        let stim_default = match kind {
            ExperimentKind::MackayRays => "mackay-rays",
            ExperimentKind::MackayTarget => "mackay-target",
            _ => "funnel",
        };
        let stimulus = match raw.str_or("stimulus", "kind", stim_default) {
            "funnel" => Stimulus::Funnel { lambda },
            "tunnel" => Stimulus::Tunnel { lambda },
            "mackay-rays" => Stimulus::MackayRays {
                lambda,
                epsilon,
                theta,
            },
            "mackay-target" => Stimulus::MackayTarget {
                lambda,
                epsilon,
                offsets,
            },
            other => bail!("unknown stimulus kind {other:?}"),
        };

        let control_kind = match raw.str_or("control", "kind", "linear") {
            "linear" => ControlKind::Linear,
            "small-time" => ControlKind::SmallTime,
            "two-phase" => ControlKind::TwoPhase,
            other => bail!("unknown control kind {other:?}"),
        };

        Ok(ExperimentConfig {
            kind,
            grid,
            params,
            mu,
            response,
            stimulus,
            tol: raw.f64_or("solver", "tol", 1e-10)?,
            max_iter: raw.usize_or("solver", "max_iter", 500)?,
            dt: raw.f64_or("solver", "dt", 0.01)?,
            t_final: raw.f64_or("solver", "t_final", 10.0)?,
            out_px: raw.usize_or("output", "out_px", 768)?,
            r_max: raw.f64_or("output", "r_max", half_width.exp())?,
            seam_margin: raw.f64_or("output", "seam_margin", 1.0)?,
            horizon: raw.f64_or("control", "horizon", 1.0)?,
            tau: raw.f64_or("control", "tau", 0.1)?,
            control_kind,
            seed: raw.usize_or("control", "seed", 7)? as u64,
            zero_k_max: raw.usize_or("experiment", "k_max", 20)?,
            raw,
        })
    }
}
