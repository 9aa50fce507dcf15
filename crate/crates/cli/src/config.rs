//! Run configuration: a JSON file, overridden field by field from the command line.

use std::path::Path;

use bdp_core::rates::TailPolicy;
use bdp_core::simulate::SimOptions;
use bdp_core::spectral::LimitOptions;
use bdp_core::{gallery, Error, RateSpec, Result};
use serde::Deserialize;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Inline chain.
    pub chain: Option<RateSpec>,
    /// Name of a gallery chain, used when `chain` is absent.
    pub gallery: Option<String>,
    pub policy: Option<TailPolicy>,
    #[serde(default)]
    pub limit: LimitOptions,
    #[serde(default)]
    pub sim: SimOptions,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    /// Start state; `"inf"` on the command line.
    pub i: Option<usize>,
    /// Target state.
    pub n: Option<usize>,
    pub from_infinity: Option<bool>,
    pub to_infinity: Option<bool>,
    #[serde(rename = "N")]
    pub big_n: Option<usize>,
    pub s_grid: Option<Vec<f64>>,
    pub t_grid: Option<Vec<f64>>,
    pub states: Option<Vec<usize>>,
    pub l_max: Option<u32>,
    /// MGF arguments as fractions of `1 / E_0 tau`.
    pub lambda_fractions: Option<Vec<f64>>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let cfg: RunConfig = serde_json::from_str(&text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let grid_ok = |g: &Option<Vec<f64>>, name: &str| -> Result<()> {
            match g {
                Some(v) if v.is_empty() || v.iter().any(|x| !(x.is_finite() && *x >= 0.0)) => {
                    Err(Error::InvalidArgument(format!(
                        "{name} must be a nonempty list of finite nonnegative numbers"
                    )))
                }
                _ => Ok(()),
            }
        };
        grid_ok(&self.s_grid, "s_grid")?;
        grid_ok(&self.t_grid, "t_grid")?;
        if let Some(f) = &self.lambda_fractions {
            if f.iter().any(|x| !(*x > 0.0 && *x < 1.0)) {
                return Err(Error::InvalidArgument(
                    "lambda_fractions must lie in (0, 1)".into(),
                ));
            }
        }
        if self.samples == Some(0) {
            return Err(Error::InvalidArgument("samples must be positive".into()));
        }
        Ok(())
    }

    /// Limit options with the tail policy applied.
    pub fn limit_options(&self) -> LimitOptions {
        LimitOptions {
            policy: self.policy(),
            ..self.limit
        }
    }

    pub fn policy(&self) -> TailPolicy {
        self.policy.unwrap_or(self.limit.policy)
    }

    /// The chain from `--chain` (a gallery name or a JSON file), else from the config.
    pub fn resolve_chain(&self, flag: Option<&str>) -> Result<RateSpec> {
        if let Some(name) = flag {
            let p = Path::new(name);
            if p.is_file() {
                return RateSpec::from_json(&std::fs::read_to_string(p)?);
            }
            return gallery::get(name);
        }
        if let Some(c) = &self.chain {
            return Ok(c.clone());
        }
        if let Some(name) = &self.gallery {
            return gallery::get(name);
        }
        Err(Error::InvalidArgument(
            "no chain given: use --chain NAME|FILE or a config with \"chain\" or \"gallery\""
                .into(),
        ))
    }
}

/// A state argument; `None` is infinity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct State(pub Option<usize>);

/// Parses a state argument, with `inf` meaning infinity.
pub fn parse_state(text: &str) -> std::result::Result<State, String> {
    match text {
        "inf" | "infinity" => Ok(State(None)),
        _ => text
            .parse()
            .map(|v| State(Some(v)))
            .map_err(|e| format!("{text:?}: {e}")),
    }
}
