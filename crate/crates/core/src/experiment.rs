//! Batch Monte Carlo over parameter grids.
//!
//! At one grid point every strategy is evaluated on the same simulated
//! paths (common random numbers): each path is generated once, handed to all
//! strategies, then dropped. Path `i` always uses stream `i` of the master
//! seed, so grid points also share shocks with each other.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{bs_call, leland_number, unhedged_value, BlendStats, PortfolioSpec};
use crate::hedge::{evaluate, StrategyChoice};
use crate::paths::{portfolio_price, AssetSpec, CorrelationSpec, GbmSource, PathSource, TimeGrid};
use crate::stats::{Moments, BLOCK_SIZE};
use crate::{Error, Result};

/// Whether the assets' cost rates are applied or zeroed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CostVariant {
    Without,
    With,
}

impl CostVariant {
    pub fn label(self) -> &'static str {
        match self {
            CostVariant::Without => "without",
            CostVariant::With => "with",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "without" => Some(CostVariant::Without),
            "with" => Some(CostVariant::With),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct StrategyKey {
    pub strategy: StrategyChoice,
    pub costs: CostVariant,
}

impl StrategyKey {
    pub fn new(strategy: StrategyChoice, costs: CostVariant) -> Self {
        StrategyKey { strategy, costs }
    }

    /// The no-hedge strategy; it never trades, so its cost variant is fixed.
    pub fn none() -> Self {
        StrategyKey::new(StrategyChoice::TradeNone, CostVariant::Without)
    }
}

/// Fully instantiated parameters for one grid point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellParams {
    pub asset1: AssetSpec,
    pub asset2: AssetSpec,
    pub portfolio: PortfolioSpec,
    pub corr: CorrelationSpec,
    pub grid: TimeGrid,
    pub n_sims: u64,
    pub master_seed: u64,
}

impl CellParams {
    pub fn validate(&self) -> Result<()> {
        self.asset1.validate()?;
        self.asset2.validate()?;
        self.portfolio.validate()?;
        if self.n_sims == 0 {
            return Err(Error::domain("n_sims", 0.0, "n_sims >= 1"));
        }
        if (self.grid.expiry() - self.portfolio.expiry).abs() > 0.0 {
            return Err(Error::Contract(
                "time grid and option disagree on expiry".into(),
            ));
        }
        Ok(())
    }

    pub fn source(&self) -> GbmSource {
        GbmSource {
            asset1: self.asset1,
            asset2: self.asset2,
            corr: self.corr,
            grid: self.grid,
            master_seed: self.master_seed,
        }
    }

    /// Asset specs as seen by a strategy under `costs`.
    pub fn assets_for(&self, costs: CostVariant) -> (AssetSpec, AssetSpec) {
        match costs {
            CostVariant::With => (self.asset1, self.asset2),
            CostVariant::Without => (self.asset1.with_cost(0.0), self.asset2.with_cost(0.0)),
        }
    }

    pub fn blend(&self) -> Result<BlendStats> {
        BlendStats::new(
            self.portfolio.alpha,
            self.asset1.mu,
            self.asset2.mu,
            self.asset1.sigma,
            self.asset2.sigma,
            self.corr.rho(),
        )
    }

    pub fn initial_portfolio_price(&self) -> f64 {
        portfolio_price(self.portfolio.alpha, self.asset1.s0, self.asset2.s0)
    }
}

/// Sample moments and analytic columns for one strategy at one grid point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrategySummary {
    pub n_sims: u64,
    pub mean_price: f64,
    pub std_price: f64,
    pub mean_s_t: f64,
    pub std_s_t: f64,
    pub mean_measure: f64,
    pub std_measure: f64,
    pub bs_price: f64,
    pub unhedged_value: f64,
    /// Leland number of the traded asset; absent for the no-hedge strategy or
    /// when the traded asset has no volatility.
    pub leland: Option<f64>,
}

impl StrategySummary {
    pub fn price_std_error(&self) -> f64 {
        self.std_price / (self.n_sims as f64).sqrt()
    }

    pub fn measure_std_error(&self) -> f64 {
        self.std_measure / (self.n_sims as f64).sqrt()
    }

    pub fn s_t_std_error(&self) -> f64 {
        self.std_s_t / (self.n_sims as f64).sqrt()
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Accumulator {
    price: Moments,
    s_t: Moments,
    measure: Moments,
}

impl Accumulator {
    fn merge(&mut self, other: &Accumulator) {
        self.price.merge(&other.price);
        self.s_t.merge(&other.s_t);
        self.measure.merge(&other.measure);
    }
}

fn analytic_columns(params: &CellParams) -> Result<(f64, f64)> {
    let blend = params.blend()?;
    let spot = params.initial_portfolio_price();
    let p = &params.portfolio;
    let bs = bs_call(spot, p.strike, p.rate, blend.sigma_p, p.expiry)?;
    let uv = unhedged_value(spot, p.strike, p.rate, blend.mu_p, blend.sigma_p, p.expiry)?;
    Ok((bs, uv))
}

fn leland_for(params: &CellParams, key: StrategyKey) -> Option<f64> {
    let (a1, a2) = params.assets_for(key.costs);
    let asset = match key.strategy {
        StrategyChoice::TradeAsset1 => a1,
        StrategyChoice::TradeAsset2 => a2,
        StrategyChoice::TradeNone => return None,
    };
    leland_number(asset.cost_rate, asset.sigma, params.grid.dt()).ok()
}

fn accumulate_block(
    params: &CellParams,
    keys: &[StrategyKey],
    source: &dyn PathSource,
    block: u64,
) -> Result<Vec<Accumulator>> {
    let start = block * BLOCK_SIZE;
    let end = (start + BLOCK_SIZE).min(params.n_sims);
    let specs: Vec<(AssetSpec, AssetSpec)> =
        keys.iter().map(|k| params.assets_for(k.costs)).collect();
    let mut acc = vec![Accumulator::default(); keys.len()];
    for index in start..end {
        let path = source.path(index);
        for ((key, (a1, a2)), slot) in keys.iter().zip(&specs).zip(acc.iter_mut()) {
            let out = evaluate(&path, &params.portfolio, key.strategy, a1, a2)?;
            slot.price.push(out.discounted_price);
            slot.s_t.push(out.terminal_portfolio_price);
            slot.measure.push(out.measure);
        }
    }
    Ok(acc)
}

/// Evaluates every strategy in `keys` on paths drawn from `source`.
///
/// The returned summaries are in the order of `keys`.
pub fn run_point_with_source(
    params: &CellParams,
    keys: &[StrategyKey],
    source: &dyn PathSource,
) -> Result<Vec<StrategySummary>> {
    params.validate()?;
    let (bs_price, uv) = analytic_columns(params)?;
    let n_blocks = params.n_sims.div_ceil(BLOCK_SIZE);
    let blocks = (0..n_blocks)
        .into_par_iter()
        .map(|b| accumulate_block(params, keys, source, b))
        .collect::<Result<Vec<_>>>()?;

    let mut totals = vec![Accumulator::default(); keys.len()];
    for block in &blocks {
        for (total, part) in totals.iter_mut().zip(block) {
            total.merge(part);
        }
    }
    Ok(keys
        .iter()
        .zip(totals)
        .map(|(key, t)| StrategySummary {
            n_sims: t.price.count(),
            mean_price: t.price.mean(),
            std_price: t.price.std(),
            mean_s_t: t.s_t.mean(),
            std_s_t: t.s_t.std(),
            mean_measure: t.measure.mean(),
            std_measure: t.measure.std(),
            bs_price,
            unhedged_value: uv,
            leland: leland_for(params, *key),
        })
        .collect())
}

pub fn run_point(params: &CellParams, keys: &[StrategyKey]) -> Result<Vec<StrategySummary>> {
    run_point_with_source(params, keys, &params.source())
}

/// One strategy at one grid point.
pub fn run_cell(params: &CellParams, key: StrategyKey) -> Result<StrategySummary> {
    Ok(run_point(params, &[key])?.remove(0))
}

/// Grid definition and simulation controls.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub asset1: AssetSpec,
    pub asset2: AssetSpec,
    pub strike: f64,
    pub rate: f64,
    pub expiry: f64,
    pub alphas: Vec<f64>,
    pub rhos: Vec<f64>,
    pub steps: Vec<usize>,
    /// Market prices of risk for the decision tables.
    pub lambdas: Vec<f64>,
    pub n_sims: u64,
    pub master_seed: u64,
    pub cost_variants: Vec<CostVariant>,
    /// Assets to hedge with; the no-hedge strategy is always evaluated.
    pub traded: Vec<StrategyChoice>,
}

fn check_unique<T: PartialEq + Copy + Into<f64>>(name: &'static str, values: &[T]) -> Result<()> {
    if values.is_empty() {
        return Err(Error::Contract(format!("{name} grid is empty")));
    }
    for (i, v) in values.iter().enumerate() {
        if values[..i].contains(v) {
            return Err(Error::domain(name, (*v).into(), "distinct grid values"));
        }
    }
    Ok(())
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        self.asset1.validate()?;
        self.asset2.validate()?;
        PortfolioSpec::new(0.0, self.strike, self.rate, self.expiry)?;
        check_unique("alpha", &self.alphas)?;
        check_unique("rho", &self.rhos)?;
        let steps: Vec<u32> = self.steps.iter().map(|&s| s as u32).collect();
        check_unique("steps", &steps)?;
        for &a in &self.alphas {
            if !(0.0..=1.0).contains(&a) {
                return Err(Error::domain("alpha", a, "0 <= alpha <= 1"));
            }
        }
        for &r in &self.rhos {
            CorrelationSpec::new(r)?;
        }
        for &s in &self.steps {
            TimeGrid::new(self.expiry, s)?;
        }
        for &l in &self.lambdas {
            if !l.is_finite() {
                return Err(Error::domain("lambda", l, "finite lambda"));
            }
        }
        if self.n_sims == 0 {
            return Err(Error::domain("n_sims", 0.0, "n_sims >= 1"));
        }
        if self.cost_variants.is_empty() {
            return Err(Error::Contract("no cost variants selected".into()));
        }
        if self.traded.is_empty() || self.traded.contains(&StrategyChoice::TradeNone) {
            return Err(Error::Contract(
                "traded must list asset 1 and/or asset 2".into(),
            ));
        }
        Ok(())
    }

    /// Strategies evaluated at every point: each traded asset under each
    /// cost variant, then the no-hedge strategy.
    pub fn strategy_keys(&self) -> Vec<StrategyKey> {
        let mut traded = self.traded.clone();
        traded.sort();
        traded.dedup();
        let mut variants = self.cost_variants.clone();
        variants.sort();
        variants.dedup();
        let mut keys = Vec::new();
        for &costs in &variants {
            for &strategy in &traded {
                keys.push(StrategyKey::new(strategy, costs));
            }
        }
        keys.push(StrategyKey::none());
        keys
    }

    /// Grid points ordered by (ρ, steps, α).
    pub fn points(&self) -> Result<Vec<CellParams>> {
        let mut rhos = self.rhos.clone();
        rhos.sort_by(f64::total_cmp);
        let mut steps = self.steps.clone();
        steps.sort();
        let mut alphas = self.alphas.clone();
        alphas.sort_by(f64::total_cmp);
        let mut points = Vec::with_capacity(rhos.len() * steps.len() * alphas.len());
        for &rho in &rhos {
            for &n in &steps {
                for &alpha in &alphas {
                    points.push(CellParams {
                        asset1: self.asset1,
                        asset2: self.asset2,
                        portfolio: PortfolioSpec::new(alpha, self.strike, self.rate, self.expiry)?,
                        corr: CorrelationSpec::new(rho)?,
                        grid: TimeGrid::new(self.expiry, n)?,
                        n_sims: self.n_sims,
                        master_seed: self.master_seed,
                    });
                }
            }
        }
        Ok(points)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointResult {
    pub params: CellParams,
    pub entries: Vec<(StrategyKey, StrategySummary)>,
}

impl PointResult {
    pub fn get(&self, key: StrategyKey) -> Option<&StrategySummary> {
        self.entries.iter().find(|(k, _)| *k == key).map(|(_, s)| s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridResults {
    pub points: Vec<PointResult>,
}

/// Evaluates the whole grid. `workers` sizes the thread pool; it has no
/// effect on the numbers produced.
pub fn run_grid(config: &ExperimentConfig, workers: Option<usize>) -> Result<GridResults> {
    config.validate()?;
    let points = config.points()?;
    let keys = config.strategy_keys();
    let run = || -> Result<GridResults> {
        let mut out = Vec::with_capacity(points.len());
        for params in points {
            let summaries = run_point(&params, &keys)?;
            out.push(PointResult {
                params,
                entries: keys.iter().copied().zip(summaries).collect(),
            });
        }
        Ok(GridResults { points: out })
    };
    match workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::Contract(format!("thread pool: {e}")))?
            .install(run),
        None => run(),
    }
}
