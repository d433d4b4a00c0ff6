//! Flat `key = value` experiment configs.
//!
//! One assignment per line; `#` starts a comment. Scalar keys may appear
//! once. List keys (`alpha`, `rho`, `steps`, `lambda`, `lambda_from`,
//! `cost_variant`, `traded`) may repeat, and each occurrence appends one
//! value. `lambda_from = MU_R SIGMA_R` appends `(MU_R − rate)/SIGMA_R`.

use std::fmt::{self, Write as _};
use std::path::Path;

use crate::decision::market_price_of_risk;
use crate::experiment::{CostVariant, ExperimentConfig};
use crate::hedge::StrategyChoice;
use crate::paths::AssetSpec;
use crate::{Error, DEFAULT_SEED};

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub key: String,
    pub message: String,
}

impl ConfigError {
    fn at(line: usize, key: &str, message: impl Into<String>) -> Self {
        ConfigError {
            line: Some(line),
            key: key.to_string(),
            message: message.into(),
        }
    }

    fn global(key: &str, message: impl Into<String>) -> Self {
        ConfigError {
            line: None,
            key: key.to_string(),
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "line {line}: {}: {}", self.key, self.message),
            None => write!(f, "{}: {}", self.key, self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

const SCALAR_KEYS: &[&str] = &[
    "s0_1", "s0_2", "mu_1", "mu_2", "sigma_1", "sigma_2", "k_1", "k_2", "strike", "rate", "expiry",
    "n_sims", "seed",
];
const LIST_KEYS: &[&str] = &[
    "alpha",
    "rho",
    "steps",
    "lambda",
    "lambda_from",
    "cost_variant",
    "traded",
];

#[derive(Default)]
struct Scalars {
    values: Vec<(&'static str, usize, String)>,
}

impl Scalars {
    fn raw(&self, key: &str) -> Option<(usize, &str)> {
        self.values
            .iter()
            .find(|(k, _, _)| *k == key)
            .map(|(_, line, v)| (*line, v.as_str()))
    }

    fn f64(&self, key: &str, default: Option<f64>) -> Result<(usize, f64), ConfigError> {
        match self.raw(key) {
            Some((line, v)) => parse_f64(line, key, v).map(|x| (line, x)),
            None => default
                .map(|d| (0, d))
                .ok_or_else(|| ConfigError::global(key, "required key is missing")),
        }
    }
}

fn parse_f64(line: usize, key: &str, v: &str) -> Result<f64, ConfigError> {
    let x: f64 = v
        .parse()
        .map_err(|_| ConfigError::at(line, key, format!("`{v}` is not a number")))?;
    if !x.is_finite() {
        return Err(ConfigError::at(line, key, format!("`{v}` is not finite")));
    }
    Ok(x)
}

fn line_ref(line: usize) -> Option<usize> {
    (line > 0).then_some(line)
}

fn check_range(line: usize, key: &str, x: f64, ok: bool, range: &str) -> Result<(), ConfigError> {
    if ok {
        Ok(())
    } else {
        Err(ConfigError {
            line: line_ref(line),
            key: key.to_string(),
            message: format!("{x} is outside the admissible range {range}"),
        })
    }
}

fn asset(s: &Scalars, id: u8) -> Result<AssetSpec, ConfigError> {
    let key = |base: &str| format!("{base}_{id}");
    let (l, s0) = s.f64(&key("s0"), None)?;
    check_range(l, &key("s0"), s0, s0 > 0.0, "s0 > 0")?;
    let (_, mu) = s.f64(&key("mu"), None)?;
    let (l, sigma) = s.f64(&key("sigma"), None)?;
    check_range(l, &key("sigma"), sigma, sigma >= 0.0, "sigma >= 0")?;
    let (l, k) = s.f64(&key("k"), Some(0.0))?;
    check_range(l, &key("k"), k, (0.0..1.0).contains(&k), "[0, 1)")?;
    Ok(AssetSpec {
        s0,
        mu,
        sigma,
        cost_rate: k,
    })
}

/// Parses and validates a config.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let mut scalars = Scalars::default();
    let mut lists: Vec<(&'static str, usize, String)> = Vec::new();

    for (idx, raw_line) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw_line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| ConfigError::at(line, content, "expected `key = value`"))?;
        let (key, value) = (key.trim(), value.trim());
        if value.is_empty() {
            return Err(ConfigError::at(line, key, "missing value"));
        }
        if let Some(&k) = SCALAR_KEYS.iter().find(|&&k| k == key) {
            if let Some((first, _)) = scalars.raw(k) {
                return Err(ConfigError::at(
                    line,
                    key,
                    format!("already set on line {first}"),
                ));
            }
            scalars.values.push((k, line, value.to_string()));
        } else if let Some(&k) = LIST_KEYS.iter().find(|&&k| k == key) {
            lists.push((k, line, value.to_string()));
        } else {
            return Err(ConfigError::at(line, key, "unknown key"));
        }
    }

    let asset1 = asset(&scalars, 1)?;
    let asset2 = asset(&scalars, 2)?;
    let (l, strike) = scalars.f64("strike", None)?;
    check_range(l, "strike", strike, strike > 0.0, "strike > 0")?;
    let (_, rate) = scalars.f64("rate", None)?;
    let (l, expiry) = scalars.f64("expiry", Some(1.0))?;
    check_range(l, "expiry", expiry, expiry > 0.0, "expiry > 0")?;

    let n_sims = match scalars.raw("n_sims") {
        Some((line, v)) => {
            let n: i64 = v
                .parse()
                .map_err(|_| ConfigError::at(line, "n_sims", format!("`{v}` is not an integer")))?;
            if n < 1 {
                return Err(ConfigError::at(
                    line,
                    "n_sims",
                    format!("{n} is outside the admissible range n_sims >= 1"),
                ));
            }
            n as u64
        }
        None => return Err(ConfigError::global("n_sims", "required key is missing")),
    };
    let master_seed = match scalars.raw("seed") {
        Some((line, v)) => v.parse().map_err(|_| {
            ConfigError::at(
                line,
                "seed",
                format!("`{v}` is not an unsigned 64-bit integer"),
            )
        })?,
        None => DEFAULT_SEED,
    };

    let mut alphas = Vec::new();
    let mut rhos = Vec::new();
    let mut steps = Vec::new();
    let mut lambdas = Vec::new();
    let mut cost_variants = Vec::new();
    let mut traded = Vec::new();
    for (key, line, value) in &lists {
        let (key, line) = (*key, *line);
        match key {
            "alpha" => {
                let a = parse_f64(line, key, value)?;
                check_range(line, key, a, (0.0..=1.0).contains(&a), "[0, 1]")?;
                alphas.push(a);
            }
            "rho" => {
                let r = parse_f64(line, key, value)?;
                check_range(line, key, r, (-1.0..=1.0).contains(&r), "[-1, 1]")?;
                rhos.push(r);
            }
            "steps" => {
                let n: i64 = value.parse().map_err(|_| {
                    ConfigError::at(line, key, format!("`{value}` is not an integer"))
                })?;
                if n < 1 {
                    return Err(ConfigError::at(
                        line,
                        key,
                        format!("{n} is outside the admissible range steps >= 1"),
                    ));
                }
                steps.push(n as usize);
            }
            "lambda" => lambdas.push(parse_f64(line, key, value)?),
            "lambda_from" => {
                let parts: Vec<&str> = value.split_whitespace().collect();
                let [mu_r, sigma_r] = parts[..] else {
                    return Err(ConfigError::at(line, key, "expected `MU_R SIGMA_R`"));
                };
                let mu_r = parse_f64(line, key, mu_r)?;
                let sigma_r = parse_f64(line, key, sigma_r)?;
                let lambda = market_price_of_risk(mu_r, rate, sigma_r)
                    .map_err(|e| ConfigError::at(line, key, e.to_string()))?;
                lambdas.push(lambda);
            }
            "cost_variant" => {
                let v = CostVariant::parse(value).ok_or_else(|| {
                    ConfigError::at(line, key, format!("`{value}` is not `with` or `without`"))
                })?;
                cost_variants.push(v);
            }
            "traded" => {
                let s = match value.as_str() {
                    "1" => StrategyChoice::TradeAsset1,
                    "2" => StrategyChoice::TradeAsset2,
                    _ => {
                        return Err(ConfigError::at(
                            line,
                            key,
                            format!("`{value}` is not 1 or 2"),
                        ))
                    }
                };
                traded.push(s);
            }
            _ => unreachable!("list key table and match arms agree"),
        }
    }
    for (name, empty) in [
        ("alpha", alphas.is_empty()),
        ("rho", rhos.is_empty()),
        ("steps", steps.is_empty()),
    ] {
        if empty {
            return Err(ConfigError::global(
                name,
                "list must have at least one value",
            ));
        }
    }
    if cost_variants.is_empty() {
        cost_variants = vec![CostVariant::Without, CostVariant::With];
    }
    if traded.is_empty() {
        traded = vec![StrategyChoice::TradeAsset1, StrategyChoice::TradeAsset2];
    }

    let config = ExperimentConfig {
        asset1,
        asset2,
        strike,
        rate,
        expiry,
        alphas,
        rhos,
        steps,
        lambdas,
        n_sims,
        master_seed,
        cost_variants,
        traded,
    };
    config.validate().map_err(|e| match e {
        Error::Domain { name, .. } => ConfigError::global(name, e.to_string()),
        other => ConfigError::global("config", other.to_string()),
    })?;
    Ok(config)
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        ConfigError::global("config", format!("cannot read {}: {e}", path.display()))
    })?;
    parse_config(&text)
}

/// Canonical text form; `parse_config(&render_config(c)) == c`.
pub fn render_config(config: &ExperimentConfig) -> String {
    let mut out = String::new();
    for (id, a) in [(1, &config.asset1), (2, &config.asset2)] {
        let _ = writeln!(out, "s0_{id} = {}", a.s0);
        let _ = writeln!(out, "mu_{id} = {}", a.mu);
        let _ = writeln!(out, "sigma_{id} = {}", a.sigma);
        let _ = writeln!(out, "k_{id} = {}", a.cost_rate);
    }
    let _ = writeln!(out, "strike = {}", config.strike);
    let _ = writeln!(out, "rate = {}", config.rate);
    let _ = writeln!(out, "expiry = {}", config.expiry);
    let _ = writeln!(out, "n_sims = {}", config.n_sims);
    let _ = writeln!(out, "seed = {}", config.master_seed);
    for a in &config.alphas {
        let _ = writeln!(out, "alpha = {a}");
    }
    for r in &config.rhos {
        let _ = writeln!(out, "rho = {r}");
    }
    for s in &config.steps {
        let _ = writeln!(out, "steps = {s}");
    }
    for l in &config.lambdas {
        let _ = writeln!(out, "lambda = {l}");
    }
    for c in &config.cost_variants {
        let _ = writeln!(out, "cost_variant = {}", c.label());
    }
    for t in &config.traded {
        if let Some(id) = t.asset_id() {
            let _ = writeln!(out, "traded = {id}");
        }
    }
    out
}
